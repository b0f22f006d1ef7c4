use crate::kernel::{AccessKind, ArrayId, LaneMask, MAX_WARP_SIZE};

/// Size and alignment of one memory transaction.
pub const SEGMENT_BYTES: u64 = 32;

/// One warp-wide memory instruction: lane `l` touches
/// `[addrs[l], addrs[l] + width)` if `mask` contains `l`.
#[derive(Debug, Clone, Copy)]
pub struct WarpAccess<'a> {
    pub array: ArrayId,
    pub kind: AccessKind,
    pub width: u32,
    pub addrs: &'a [u64],
    pub mask: LaneMask,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coalesced {
    /// Distinct 32-byte aligned segments covered.
    pub transactions: u32,
    /// Distinct bytes requested by the active lanes.
    pub requested_bytes: u32,
}

/// Counts the aligned segments and unique bytes an access touches.
///
/// Lanes that request the same bytes are counted once, so a broadcast costs
/// one transaction and `width` bytes. No active lanes means no transaction.
pub fn coalesce(access: &WarpAccess<'_>) -> Coalesced {
    let mut starts = [0u64; MAX_WARP_SIZE];
    let mut n = 0;
    for lane in access.mask.iter() {
        starts[n] = access.addrs[lane];
        n += 1;
    }
    if n == 0 || access.width == 0 {
        return Coalesced::default();
    }
    let starts = &mut starts[..n];
    if !starts.windows(2).all(|w| w[0] <= w[1]) {
        starts.sort_unstable();
    }

    let width = access.width as u64;
    let mut transactions = 0u64;
    let mut requested = 0u64;
    let mut last_segment: Option<u64> = None;
    let mut close = |lo: u64, hi: u64| {
        requested += hi - lo;
        let first = lo / SEGMENT_BYTES;
        let last = (hi - 1) / SEGMENT_BYTES;
        transactions += last - first + 1;
        if last_segment == Some(first) {
            transactions -= 1;
        }
        last_segment = Some(last);
    };

    let (mut lo, mut hi) = (starts[0], starts[0] + width);
    for &s in &starts[1..] {
        if s <= hi {
            hi = hi.max(s + width);
        } else {
            close(lo, hi);
            lo = s;
            hi = s + width;
        }
    }
    close(lo, hi);

    Coalesced {
        transactions: transactions as u32,
        requested_bytes: requested as u32,
    }
}
