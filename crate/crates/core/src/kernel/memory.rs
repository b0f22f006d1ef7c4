use std::fmt;

use serde::{Deserialize, Serialize};

use super::LaneMask;

/// The five global arrays a kernel touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ArrayId {
    RowPtr,
    ColInd,
    Val,
    B,
    C,
}

impl ArrayId {
    pub const ALL: [ArrayId; 5] = [
        ArrayId::RowPtr,
        ArrayId::ColInd,
        ArrayId::Val,
        ArrayId::B,
        ArrayId::C,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ArrayId::RowPtr => "RowPtr",
            ArrayId::ColInd => "ColInd",
            ArrayId::Val => "Val",
            ArrayId::B => "B",
            ArrayId::C => "C",
        }
    }
}

impl fmt::Display for ArrayId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessKind {
    Load,
    Store,
}

/// Global memory as seen by one warp executing one instruction at a time.
///
/// Every method is a single warp-wide instruction: lane `l` takes part iff
/// `mask` contains `l`, and `idx[l]` is an element index into `array`.
/// Implementations may meter the access (the simulator) or just perform it
/// (the native backend). Lanes outside the mask leave `out` untouched.
pub trait WarpMemory {
    /// `RowPtr` or `ColInd`.
    fn load_u32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, out: &mut [u32]);

    /// `Val` or `B`.
    fn load_f32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, out: &mut [f32]);

    /// Every lane in `mask` reads the same element; the value is returned once.
    fn load_u32_uniform(&mut self, array: ArrayId, idx: usize, mask: LaneMask) -> u32;

    fn load_f32_uniform(&mut self, array: ArrayId, idx: usize, mask: LaneMask) -> f32;

    /// Only `C` is written.
    fn store_f32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, vals: &[f32]);
}
