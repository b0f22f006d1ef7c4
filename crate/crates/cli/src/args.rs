use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::input::MatrixSource;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "spmm-lab", version, about = "CSR SpMM kernels on a SIMT memory model and on native threads")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a uniform random sparse matrix.
    Gen(GenArgs),
    /// Run kernels on the simulator and report memory metrics.
    Simulate(SimulateArgs),
    /// Check every variant on both backends against the dense oracle.
    Verify(VerifyArgs),
    /// Time kernels on the native backend.
    Bench(BenchArgs),
    /// Run a grid of matrices, widths and variants into one CSV table.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Sum,
    Max,
}

impl OpArg {
    pub fn op(self) -> spmm_lab::kernel::ReduceOp {
        match self {
            OpArg::Sum => spmm_lab::kernel::ReduceOp::sum(),
            OpArg::Max => spmm_lab::kernel::ReduceOp::max(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Sim,
    Native,
    Both,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Seed for generated matrices and for the dense operand B.
    #[arg(long, env = "SPMM_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub nnz: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub self_loops: bool,
    /// Output file; `.mtx` writes Matrix Market, anything else the binary cache.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Comma-separated: naive, crc, crc-cwm, crc-cwm:CF or auto.
    #[arg(long, value_delimiter = ',', default_value = "auto")]
    pub variant: Vec<String>,
    /// Coarsening factors for crc-cwm entries.
    #[arg(long, value_delimiter = ',')]
    pub cf: Vec<usize>,
    #[arg(long, value_enum, default_value = "sum")]
    pub op: OpArg,
    #[arg(long, default_value_t = 32)]
    pub warp_size: usize,
    #[arg(long, default_value_t = 8)]
    pub warps_per_block: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Matrix file (.mtx or .csr) or random:ROWS:NNZ[:SEED].
    pub matrix: MatrixSource,
    /// Columns of B; comma-separated for several.
    #[arg(short = 'N', long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Write JSON lines here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write the records as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the verbose access trace; several runs get `.VARIANT.nN` suffixes.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Evaluate row chunks on all cores.
    #[arg(long)]
    pub sim_parallel: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub matrix: MatrixSource,
    #[arg(short = 'N', long = "n", default_value_t = 64)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "sum")]
    pub op: OpArg,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Inject a kernel fault to exercise the checker.
    #[arg(long)]
    pub fault: Option<String>,
    #[arg(long, default_value_t = 32)]
    pub warp_size: usize,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub matrix: MatrixSource,
    #[arg(short = 'N', long = "n", default_value_t = 512)]
    pub n: usize,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = spmm_lab::native::DEFAULT_REPEATS)]
    pub repeats: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Matrices to sweep.
    #[arg(required = true)]
    pub matrices: Vec<MatrixSource>,
    #[arg(short = 'N', long = "n", value_delimiter = ',', default_value = "128,256,512")]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, value_enum, default_value = "sim")]
    pub backend: BackendArg,
    /// Check each (matrix, N) against the dense oracle.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long)]
    pub sim_parallel: bool,
    /// CSV destination; stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
