use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use spmm_lab::kernel::{select_variant, FaultInjection, KernelConfig, KernelVariant, ReduceOp};
use spmm_lab::native::{bench, speedup, ThroughputReport};
use spmm_lab::sim::{metrics_report, run_kernel_with, write_trace, SimOptions, TraceMode};
use spmm_lab::sparse::{gen_uniform_random, save_matrix, CsrMatrix, DenseMatrix, GraphGenSpec};
use spmm_lab::verify::{verify_all, Backend, VerifyOptions, VerifyReport};

use crate::args::{BackendArg, BenchArgs, GenArgs, KernelArgs, SimulateArgs, SweepArgs, VerifyArgs};
use crate::error::CliError;
use crate::input::MatrixSource;
use crate::record::{timestamp_now, write_csv, write_jsonl, RunRecord, Verification, TOOL_VERSION};

/// Expands `--variant` and `--cf` into concrete variants for width `n`.
pub fn expand_variants(specs: &[String], cfs: &[usize], n: usize) -> Result<Vec<KernelVariant>, CliError> {
    let mut out = Vec::new();
    let mut push = |v: KernelVariant| {
        if !out.contains(&v) {
            out.push(v);
        }
    };
    let mut used_cf = cfs.is_empty();
    for spec in specs {
        match spec.trim() {
            "auto" => push(select_variant(n)),
            "crc-cwm" if !cfs.is_empty() => {
                used_cf = true;
                for &cf in cfs {
                    push(KernelVariant::crc_cwm(cf).map_err(|e| CliError::Usage(e.to_string()))?);
                }
            }
            s => push(s.parse().map_err(|e: spmm_lab::kernel::ConfigError| CliError::Usage(e.to_string()))?),
        }
    }
    if !used_cf {
        return Err(CliError::Usage("--cf needs a crc-cwm entry in --variant".into()));
    }
    Ok(out)
}

fn kernel_config(k: &KernelArgs, variant: KernelVariant) -> Result<KernelConfig, CliError> {
    let cfg = KernelConfig::new(variant)
        .with_warp_size(k.warp_size)
        .with_warps_per_block(k.warps_per_block);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// The dense operand every command uses: uniform in [-1, 1) from `seed`.
pub fn dense_operand(k: usize, n: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::random(k, n, seed)
}

fn base_record(
    source: &MatrixSource,
    seed: u64,
    a: &CsrMatrix,
    n: usize,
    cfg: &KernelConfig,
    op: &ReduceOp,
    backend: Backend,
) -> RunRecord {
    RunRecord {
        input: source.to_string(),
        seed,
        m: a.n_rows(),
        k: a.n_cols(),
        n,
        nnz: a.nnz(),
        variant: cfg.variant.to_string(),
        cf: cfg.variant.cf_effective(),
        op: op.name().to_string(),
        backend,
        warp_size: cfg.warp_size,
        warps_per_block: cfg.warps_per_block,
        metrics: None,
        throughput: None,
        speedup_vs_naive: None,
        verification: Verification::NotRun,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: timestamp_now(),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let spec = GraphGenSpec::new(args.rows, args.nnz, args.seed.seed).with_self_loops(args.self_loops);
    let a = gen_uniform_random(&spec).map_err(CliError::input)?;
    save_matrix(&a, &args.output).map_err(CliError::input)?;
    println!(
        "wrote {}: M={} nnz={} mean degree {:.4}",
        args.output.display(),
        a.n_rows(),
        a.nnz(),
        a.mean_row_len()
    );
    Ok(())
}

fn trace_path(base: &Path, variant: KernelVariant, n: usize, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let tag = format!("{}.n{n}", variant.to_string().replace(':', ""));
    match (base.file_stem(), base.extension()) {
        (Some(stem), Some(ext)) => base.with_file_name(format!(
            "{}.{tag}.{}",
            stem.to_string_lossy(),
            ext.to_string_lossy()
        )),
        _ => PathBuf::from(format!("{}.{tag}", base.display())),
    }
}

/// Simulates every requested (N, variant) pair; one record each.
pub fn simulate_records(args: &SimulateArgs) -> Result<Vec<RunRecord>, CliError> {
    let seed = args.seed.seed;
    let source = args.matrix.clone().resolved(seed);
    let a = source.load(seed)?;
    let op = args.kernel.op.op();

    let mut plan = Vec::new();
    for &n in &args.n {
        for v in expand_variants(&args.kernel.variant, &args.kernel.cf, n)? {
            plan.push((n, kernel_config(&args.kernel, v)?));
        }
    }

    let mut records = Vec::new();
    for (n, cfg) in &plan {
        let b = dense_operand(a.n_cols(), *n, seed);
        let opts = SimOptions {
            parallel: args.sim_parallel,
            trace: args.trace.as_ref().map(|_| TraceMode::Verbose),
            ..SimOptions::default()
        };
        let run = run_kernel_with(&a, &b, cfg, &op, &opts).map_err(CliError::input)?;
        if let (Some(base), Some(trace)) = (&args.trace, &run.trace) {
            let path = trace_path(base, cfg.variant, *n, plan.len() > 1);
            let mut w = BufWriter::new(File::create(&path)?);
            write_trace(trace, &mut w)?;
            w.flush()?;
        }
        let mut r = base_record(&source, seed, &a, *n, cfg, &op, Backend::Sim);
        r.metrics = Some(metrics_report(&run.metrics));
        records.push(r);
    }
    Ok(records)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let records = simulate_records(args)?;
    write_jsonl(&records, open_output(args.output.as_deref())?)?;
    if let Some(p) = &args.csv {
        write_csv(&records, File::create(p)?)?;
    }
    Ok(())
}

pub fn verify_report(args: &VerifyArgs) -> Result<VerifyReport, CliError> {
    let seed = args.seed.seed;
    let source = args.matrix.clone().resolved(seed);
    let a = source.load(seed)?;
    let fault = args
        .fault
        .as_deref()
        .map(|f| f.parse::<FaultInjection>())
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    KernelConfig::default()
        .with_warp_size(args.warp_size)
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let b = dense_operand(a.n_cols(), args.n, seed);
    let opts = VerifyOptions {
        warp_size: args.warp_size,
        fault,
        workers: args.workers,
        ..VerifyOptions::default()
    };
    verify_all(&a, &b, &args.op.op(), &opts).map_err(CliError::input)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let report = verify_report(args)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, &report)?;
    writeln!(out)?;
    if report.passed() {
        eprintln!(
            "pass: {} checks, {} traces recounted",
            report.checks.len(),
            report.traces_recounted
        );
        return Ok(());
    }
    let why = match (&report.first_divergence, report.trace_mismatches.first()) {
        (Some(d), _) => d.to_string(),
        (None, Some(t)) => format!("trace recount mismatch: {t}"),
        (None, None) => "a check failed".to_string(),
    };
    Err(CliError::Verify(why))
}

pub fn bench_records(args: &BenchArgs) -> Result<Vec<RunRecord>, CliError> {
    let seed = args.seed.seed;
    let source = args.matrix.clone().resolved(seed);
    let a = source.load(seed)?;
    let op = args.kernel.op.op();
    let b = dense_operand(a.n_cols(), args.n, seed);

    let mut runs: Vec<(KernelConfig, ThroughputReport)> = Vec::new();
    for v in expand_variants(&args.kernel.variant, &args.kernel.cf, args.n)? {
        let cfg = kernel_config(&args.kernel, v)?;
        let t = bench(&a, &b, &cfg, &op, args.workers, args.repeats).map_err(CliError::input)?;
        eprintln!("checksum {}: {}", cfg.variant, t.checksum);
        runs.push((cfg, t));
    }
    let naive = runs
        .iter()
        .find(|(c, _)| c.variant == KernelVariant::Naive)
        .map(|(_, t)| t.clone());
    Ok(runs
        .into_iter()
        .map(|(cfg, t)| {
            let mut r = base_record(&source, seed, &a, args.n, &cfg, &op, Backend::Native);
            r.speedup_vs_naive = naive.as_ref().map(|base| speedup(base, &t));
            r.throughput = Some(t);
            r
        })
        .collect())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let records = bench_records(args)?;
    write_jsonl(&records, open_output(args.output.as_deref())?)?;
    if let Some(p) = &args.csv {
        write_csv(&records, File::create(p)?)?;
    }
    Ok(())
}

/// One line of the sweep table. `kind` is `data` or `geomean`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepRow {
    pub kind: String,
    pub matrix: String,
    pub variant: String,
    pub cf: usize,
    pub n: usize,
    pub backend: Backend,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub nnz: Option<usize>,
    pub gld_transactions: Option<f64>,
    pub gld_efficiency: Option<f64>,
    pub sparse_load_transactions: Option<f64>,
    pub b_load_transactions: Option<f64>,
    pub elapsed_s: Option<f64>,
    pub gflops: Option<f64>,
    pub checksum: Option<String>,
    pub verification: Verification,
    pub error: Option<String>,
}

/// `exp(mean(ln x))`; `None` when empty or any value is not positive.
pub fn geomean(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&x| x <= 0.0) {
        return None;
    }
    Some((values.iter().map(|x| x.ln()).sum::<f64>() / values.len() as f64).exp())
}

pub fn sweep_rows(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    let seed = args.seed.seed;
    let op = args.kernel.op.op();
    let backends: &[Backend] = match args.backend {
        BackendArg::Sim => &[Backend::Sim],
        BackendArg::Native => &[Backend::Native],
        BackendArg::Both => &[Backend::Sim, Backend::Native],
    };
    // Usage errors surface before any work.
    let mut per_n = Vec::new();
    for &n in &args.n {
        let mut cfgs = Vec::new();
        for v in expand_variants(&args.kernel.variant, &args.kernel.cf, n)? {
            cfgs.push(kernel_config(&args.kernel, v)?);
        }
        per_n.push((n, cfgs));
    }

    let mut rows = Vec::new();
    for source in &args.matrices {
        let source = source.clone().resolved(seed);
        let loaded = source.load(seed);
        for (n, cfgs) in &per_n {
            let blank = |cfg: &KernelConfig, backend: Backend| SweepRow {
                kind: "data".into(),
                matrix: source.to_string(),
                variant: cfg.variant.to_string(),
                cf: cfg.variant.cf_effective(),
                n: *n,
                backend,
                m: None,
                k: None,
                nnz: None,
                gld_transactions: None,
                gld_efficiency: None,
                sparse_load_transactions: None,
                b_load_transactions: None,
                elapsed_s: None,
                gflops: None,
                checksum: None,
                verification: Verification::NotRun,
                error: None,
            };
            let a = match &loaded {
                Ok(a) => a,
                Err(e) => {
                    for cfg in cfgs {
                        for &backend in backends {
                            rows.push(SweepRow {
                                error: Some(e.to_string()),
                                ..blank(cfg, backend)
                            });
                        }
                    }
                    continue;
                }
            };
            let b = dense_operand(a.n_cols(), *n, seed);

            let (verification, verify_error) = if args.verify {
                let opts = VerifyOptions {
                    variants: cfgs.iter().map(|c| c.variant).collect(),
                    warp_size: args.kernel.warp_size,
                    warps_per_block: args.kernel.warps_per_block,
                    workers: args.workers,
                    ..VerifyOptions::default()
                };
                match verify_all(a, &b, &op, &opts) {
                    Ok(r) if r.passed() => (Verification::Pass, None),
                    Ok(r) => (
                        Verification::Fail,
                        r.first_divergence.map(|d| d.to_string()),
                    ),
                    Err(e) => (Verification::NotRun, Some(e.to_string())),
                }
            } else {
                (Verification::NotRun, None)
            };

            for cfg in cfgs {
                for &backend in backends {
                    let mut row = SweepRow {
                        m: Some(a.n_rows()),
                        k: Some(a.n_cols()),
                        nnz: Some(a.nnz()),
                        verification,
                        error: verify_error.clone(),
                        ..blank(cfg, backend)
                    };
                    match backend {
                        Backend::Sim => {
                            let opts = SimOptions {
                                parallel: args.sim_parallel,
                                ..SimOptions::default()
                            };
                            match run_kernel_with(a, &b, cfg, &op, &opts) {
                                Ok(run) => {
                                    let r = metrics_report(&run.metrics);
                                    row.gld_transactions = Some(r.gld_transactions as f64);
                                    row.gld_efficiency = Some(r.gld_efficiency);
                                    row.sparse_load_transactions = Some(r.sparse_load_transactions as f64);
                                    row.b_load_transactions = Some(r.b_load_transactions as f64);
                                }
                                Err(e) => row.error = Some(e.to_string()),
                            }
                        }
                        Backend::Native => match bench(a, &b, cfg, &op, args.workers, args.repeats) {
                            Ok(t) => {
                                row.elapsed_s = Some(t.elapsed_s);
                                row.gflops = Some(t.gflops);
                                row.checksum = Some(t.checksum);
                            }
                            Err(e) => row.error = Some(e.to_string()),
                        },
                    }
                    rows.push(row);
                }
            }
        }
    }

    let summary = summary_rows(&rows);
    rows.extend(summary);
    Ok(rows)
}

/// One geometric-mean row per (variant, N, backend) over the data rows.
pub fn summary_rows(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut keys: Vec<(String, usize, usize, Backend)> = Vec::new();
    for r in rows {
        let key = (r.variant.clone(), r.cf, r.n, r.backend);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(variant, cf, n, backend)| {
            let group: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.variant == variant && r.n == n && r.backend == backend)
                .collect();
            let gm = |f: fn(&SweepRow) -> Option<f64>| {
                let vals: Vec<f64> = group.iter().filter_map(|r| f(r)).collect();
                geomean(&vals)
            };
            SweepRow {
                kind: "geomean".into(),
                matrix: format!("geomean({})", group.len()),
                variant,
                cf,
                n,
                backend,
                m: None,
                k: None,
                nnz: None,
                gld_transactions: gm(|r| r.gld_transactions),
                gld_efficiency: gm(|r| r.gld_efficiency),
                sparse_load_transactions: gm(|r| r.sparse_load_transactions),
                b_load_transactions: gm(|r| r.b_load_transactions),
                elapsed_s: gm(|r| r.elapsed_s),
                gflops: gm(|r| r.gflops),
                checksum: None,
                verification: Verification::NotRun,
                error: None,
            }
        })
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let rows = sweep_rows(args)?;
    let mut w = csv::Writer::from_writer(open_output(args.output.as_deref())?);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geomean_of_two_and_eight() {
        assert_eq!(geomean(&[2.0, 8.0]), Some(4.0));
        assert_eq!(geomean(&[]), None);
        assert_eq!(geomean(&[1.0, 0.0]), None);
    }

    #[test]
    fn variant_expansion() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(expand_variants(&s(&["auto"]), &[], 16).unwrap(), vec![KernelVariant::Crc]);
        assert_eq!(
            expand_variants(&s(&["auto"]), &[], 512).unwrap(),
            vec![KernelVariant::CrcCwm { cf: 2 }]
        );
        assert_eq!(
            expand_variants(&s(&["crc-cwm"]), &[2, 4, 8], 512).unwrap().len(),
            3
        );
        assert_eq!(
            expand_variants(&s(&["naive", "crc", "crc"]), &[], 64).unwrap(),
            vec![KernelVariant::Naive, KernelVariant::Crc]
        );
        assert!(matches!(expand_variants(&s(&["fast"]), &[], 1), Err(CliError::Usage(_))));
        assert!(matches!(expand_variants(&s(&["crc"]), &[4], 1), Err(CliError::Usage(_))));
        assert!(matches!(expand_variants(&s(&["crc-cwm"]), &[3], 1), Err(CliError::Usage(_))));
    }

    #[test]
    fn trace_paths_are_suffixed_for_several_runs() {
        let p = Path::new("out/t.jsonl");
        assert_eq!(trace_path(p, KernelVariant::Crc, 64, false), p);
        assert_eq!(
            trace_path(p, KernelVariant::CrcCwm { cf: 4 }, 64, true),
            Path::new("out/t.crc-cwm4.n64.jsonl")
        );
    }
}
