use std::fmt;
use std::str::FromStr;

use super::ConfigError;

/// Coarsening factors accepted for [`KernelVariant::CrcCwm`].
pub const SUPPORTED_CF: [usize; 3] = [2, 4, 8];

/// Largest warp the lane masks can describe.
pub const MAX_WARP_SIZE: usize = 64;

/// Which of the three kernel programs to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    /// Row-per-warp generalization of SpMV: every lane walks the sparse row
    /// itself, so sparse loads are warp-wide broadcasts.
    Naive,
    /// Coalesced row caching: the warp stages `warp_size` nonzeros at a time
    /// in shared memory with one coalesced load per array.
    Crc,
    /// Row caching plus warp merging: each lane owns `cf` output columns
    /// spaced `warp_size` apart and reuses every staged nonzero `cf` times.
    CrcCwm { cf: usize },
}

impl KernelVariant {
    pub fn crc_cwm(cf: usize) -> Result<Self, ConfigError> {
        if SUPPORTED_CF.contains(&cf) {
            Ok(KernelVariant::CrcCwm { cf })
        } else {
            Err(ConfigError::CoarseningFactor(cf))
        }
    }

    /// Output columns per thread.
    pub fn cf_effective(&self) -> usize {
        match *self {
            KernelVariant::Naive | KernelVariant::Crc => 1,
            KernelVariant::CrcCwm { cf } => cf,
        }
    }

    /// Family name without the coarsening factor.
    pub fn family(&self) -> &'static str {
        match self {
            KernelVariant::Naive => "naive",
            KernelVariant::Crc => "crc",
            KernelVariant::CrcCwm { .. } => "crc-cwm",
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            KernelVariant::CrcCwm { cf } if !SUPPORTED_CF.contains(&cf) => {
                Err(ConfigError::CoarseningFactor(cf))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelVariant::CrcCwm { cf } => write!(f, "crc-cwm:{cf}"),
            other => f.write_str(other.family()),
        }
    }
}

impl FromStr for KernelVariant {
    type Err = ConfigError;

    /// Accepts `naive`, `crc`, `crc-cwm` (factor 2) and `crc-cwm:<cf>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "naive" => Ok(KernelVariant::Naive),
            "crc" => Ok(KernelVariant::Crc),
            "crc-cwm" => KernelVariant::crc_cwm(2),
            other => match other.strip_prefix("crc-cwm:") {
                Some(cf) => cf
                    .parse()
                    .map_err(|_| ConfigError::UnknownVariant(s.to_string()))
                    .and_then(KernelVariant::crc_cwm),
                None => Err(ConfigError::UnknownVariant(s.to_string())),
            },
        }
    }
}

impl serde::Serialize for KernelVariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for KernelVariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Chooses the kernel for a dense operand with `n` columns.
///
/// Merging only pays once a row spans more than one warp of columns, so up
/// to 32 columns plain row caching runs; wider operands get a factor of 2.
pub fn select_variant(n: usize) -> KernelVariant {
    if n <= 32 {
        KernelVariant::Crc
    } else {
        KernelVariant::CrcCwm { cf: 2 }
    }
}

/// Deliberate kernel faults, used to prove that verification catches errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultInjection {
    /// Every row stops before its final tile of `warp_size` nonzeros.
    SkipTail,
}

impl FromStr for FaultInjection {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skip-tail" => Ok(FaultInjection::SkipTail),
            _ => Err(ConfigError::UnknownFault(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelConfig {
    pub warp_size: usize,
    pub warps_per_block: usize,
    pub variant: KernelVariant,
    pub fault: Option<FaultInjection>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            warp_size: 32,
            warps_per_block: 8,
            variant: KernelVariant::Crc,
            fault: None,
        }
    }
}

impl KernelConfig {
    pub fn new(variant: KernelVariant) -> Self {
        KernelConfig {
            variant,
            ..Default::default()
        }
    }

    pub fn with_warp_size(mut self, warp_size: usize) -> Self {
        self.warp_size = warp_size;
        self
    }

    pub fn with_warps_per_block(mut self, warps_per_block: usize) -> Self {
        self.warps_per_block = warps_per_block;
        self
    }

    pub fn with_fault(mut self, fault: Option<FaultInjection>) -> Self {
        self.fault = fault;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.warp_size.is_power_of_two() || !(4..=MAX_WARP_SIZE).contains(&self.warp_size) {
            return Err(ConfigError::WarpSize(self.warp_size));
        }
        if self.warps_per_block == 0 {
            return Err(ConfigError::WarpsPerBlock);
        }
        self.variant.validate()
    }
}

/// Mapping of `(row, column tile)` work onto warps and blocks.
///
/// Warps are numbered row-major over the `grid_rows x grid_col_tiles` grid;
/// consecutive runs of `warps_per_block` warps form a block. Lane `l` of the
/// warp for tile `t` owns columns `t * tile_width + l + s * warp_size` for
/// `s < cf`, keeping only those below `n_cols`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaunchGeometry {
    pub grid_rows: usize,
    pub grid_col_tiles: usize,
    pub threads_per_block: usize,
    pub warp_size: usize,
    pub warps_per_block: usize,
    pub cf: usize,
    pub n_cols: usize,
}

pub fn launch_geometry(m: usize, n: usize, cfg: &KernelConfig) -> LaunchGeometry {
    let cf = cfg.variant.cf_effective();
    let tile_width = cfg.warp_size * cf;
    LaunchGeometry {
        grid_rows: m,
        grid_col_tiles: n.div_ceil(tile_width),
        threads_per_block: cfg.warp_size * cfg.warps_per_block,
        warp_size: cfg.warp_size,
        warps_per_block: cfg.warps_per_block,
        cf,
        n_cols: n,
    }
}

impl LaunchGeometry {
    pub fn tile_width(&self) -> usize {
        self.warp_size * self.cf
    }

    pub fn n_warps(&self) -> usize {
        self.grid_rows * self.grid_col_tiles
    }

    pub fn n_blocks(&self) -> usize {
        self.n_warps().div_ceil(self.warps_per_block)
    }

    /// `(row, tile)` handled by a warp.
    pub fn warp_coords(&self, warp_global_id: usize) -> (usize, usize) {
        (
            warp_global_id / self.grid_col_tiles,
            warp_global_id % self.grid_col_tiles,
        )
    }

    /// `(block, warp index within block)`.
    pub fn block_of(&self, warp_global_id: usize) -> (usize, usize) {
        (
            warp_global_id / self.warps_per_block,
            warp_global_id % self.warps_per_block,
        )
    }

    /// First column of a lane; further owned columns follow at `warp_size` strides.
    pub fn lane_column(&self, tile: usize, lane: usize) -> usize {
        tile * self.tile_width() + lane
    }

    /// Columns written by one lane.
    pub fn owned_columns(&self, tile: usize, lane: usize) -> impl Iterator<Item = usize> + '_ {
        let first = self.lane_column(tile, lane);
        (0..self.cf)
            .map(move |s| first + s * self.warp_size)
            .filter(move |&c| c < self.n_cols)
    }

    /// Lanes of a tile whose first column is inside the matrix.
    pub fn active_lanes(&self, tile: usize) -> usize {
        self.n_cols
            .saturating_sub(tile * self.tile_width())
            .min(self.warp_size)
    }
}
