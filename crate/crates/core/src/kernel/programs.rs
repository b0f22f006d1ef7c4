//! The three SpMM warp programs.
//!
//! Each function runs one warp on its `(row, tile)` pair. All of them fold a
//! row's products `val[p] * B[col_ind[p], j]` with `op.combine` in ascending
//! `p`, seeded with `op.init`, so for a given input every variant produces
//! bit-identical output. They differ only in how the sparse row reaches the
//! lanes, which is what the memory metrics observe.

use super::{ArrayId, KernelVariant, ReduceOp, SharedTile, WarpCtx, WarpMemory};

/// One lane per output column; every lane reads each nonzero itself.
pub fn kernel_naive<M: WarpMemory>(warp: &mut WarpCtx, op: &ReduceOp, mem: &mut M) {
    let active = warp.active_mask();
    if active.is_empty() {
        return;
    }
    let row_start = mem.load_u32_uniform(ArrayId::RowPtr, warp.row, active) as usize;
    let row_end = mem.load_u32_uniform(ArrayId::RowPtr, warp.row + 1, active) as usize;
    let end = warp.loop_end(row_start, row_end);
    let n = warp.n;

    for ptr in row_start..end {
        let k = mem.load_u32_uniform(ArrayId::ColInd, ptr, active) as usize;
        let v = mem.load_f32_uniform(ArrayId::Val, ptr, active);
        for lane in active.iter() {
            warp.idx[lane] = k * n + warp.threads[lane].col;
        }
        mem.load_f32(ArrayId::B, &warp.idx, active, &mut warp.fbuf);
        for lane in active.iter() {
            let t = &mut warp.threads[lane];
            t.accumulators[0] = op.combine(t.accumulators[0], v * warp.fbuf[lane]);
        }
    }

    store_outputs(warp, mem, 1);
}

/// Stages `warp_size` nonzeros of the row into `tile` with coalesced loads.
///
/// Every lane of the warp loads one element, including lanes past the last
/// output column; only the row bound masks the load.
fn stage_tile<M: WarpMemory>(
    warp: &mut WarpCtx,
    mem: &mut M,
    tile: &mut SharedTile,
    ptr: usize,
    row_end: usize,
) {
    let in_row = warp.full_mask().0 & super::LaneMask::first(row_end - ptr).0;
    let mask = super::LaneMask(in_row);
    for lane in mask.iter() {
        warp.idx[lane] = ptr + lane;
    }
    mem.load_u32(ArrayId::ColInd, &warp.idx, mask, &mut warp.ubuf);
    mem.load_f32(ArrayId::Val, &warp.idx, mask, &mut warp.fbuf);
    tile.write(mask, &warp.ubuf, &warp.fbuf);
    tile.sync();
}

/// Coalesced row caching: load a tile of the sparse row once per warp, then
/// consume it from shared memory.
pub fn kernel_crc<M: WarpMemory>(
    warp: &mut WarpCtx,
    op: &ReduceOp,
    mem: &mut M,
    tile: &mut SharedTile,
) {
    let full = warp.full_mask();
    let row_start = mem.load_u32_uniform(ArrayId::RowPtr, warp.row, full) as usize;
    let row_end = mem.load_u32_uniform(ArrayId::RowPtr, warp.row + 1, full) as usize;
    let end = warp.loop_end(row_start, row_end);
    let active = warp.active_mask();
    let (ws, n) = (warp.warp_size, warp.n);

    let mut ptr = row_start;
    while ptr < end {
        stage_tile(warp, mem, tile, ptr, row_end);

        for kk in 0..ws {
            if ptr + kk >= row_end {
                break;
            }
            let (k, v) = tile.read(kk);
            let b_row = k as usize * n;
            for lane in active.iter() {
                warp.idx[lane] = b_row + warp.threads[lane].col;
            }
            mem.load_f32(ArrayId::B, &warp.idx, active, &mut warp.fbuf);
            for lane in active.iter() {
                let t = &mut warp.threads[lane];
                t.accumulators[0] = op.combine(t.accumulators[0], v * warp.fbuf[lane]);
            }
        }
        ptr += ws;
    }

    store_outputs(warp, mem, 1);
}

/// Row caching with `warp.cf` output columns per lane.
///
/// For each staged nonzero a lane issues one `B` load per owned column and
/// updates the matching accumulator; the staged row is shared by all of them.
/// With `cf == 1` it issues the same instructions as [`kernel_crc`].
pub fn kernel_crc_cwm<M: WarpMemory>(
    warp: &mut WarpCtx,
    op: &ReduceOp,
    mem: &mut M,
    tile: &mut SharedTile,
) {
    let full = warp.full_mask();
    let row_start = mem.load_u32_uniform(ArrayId::RowPtr, warp.row, full) as usize;
    let row_end = mem.load_u32_uniform(ArrayId::RowPtr, warp.row + 1, full) as usize;
    let end = warp.loop_end(row_start, row_end);
    let (ws, n, cf) = (warp.warp_size, warp.n, warp.cf);

    let mut ptr = row_start;
    while ptr < end {
        stage_tile(warp, mem, tile, ptr, row_end);

        for kk in 0..ws {
            if ptr + kk >= row_end {
                break;
            }
            let (k, v) = tile.read(kk);
            let b_row = k as usize * n;
            for slot in 0..cf {
                let mask = warp.slot_mask(slot);
                if mask.is_empty() {
                    break;
                }
                for lane in mask.iter() {
                    warp.idx[lane] = b_row + warp.threads[lane].col + slot * ws;
                }
                mem.load_f32(ArrayId::B, &warp.idx, mask, &mut warp.fbuf);
                for lane in mask.iter() {
                    let acc = &mut warp.threads[lane].accumulators[slot];
                    *acc = op.combine(*acc, v * warp.fbuf[lane]);
                }
            }
        }
        ptr += ws;
    }

    store_outputs(warp, mem, cf);
}

fn store_outputs<M: WarpMemory>(warp: &mut WarpCtx, mem: &mut M, cf: usize) {
    let base = warp.row * warp.n;
    for slot in 0..cf {
        let mask = warp.slot_mask(slot);
        if mask.is_empty() {
            break;
        }
        for lane in mask.iter() {
            warp.idx[lane] = base + warp.threads[lane].col + slot * warp.warp_size;
            warp.fbuf[lane] = warp.threads[lane].accumulators[slot];
        }
        mem.store_f32(ArrayId::C, &warp.idx, mask, &warp.fbuf);
    }
}

/// Runs the program selected by `variant` for the warp in `warp`.
pub fn execute_warp<M: WarpMemory>(
    variant: KernelVariant,
    warp: &mut WarpCtx,
    op: &ReduceOp,
    mem: &mut M,
    tile: &mut SharedTile,
) {
    match variant {
        KernelVariant::Naive => kernel_naive(warp, op, mem),
        KernelVariant::Crc => kernel_crc(warp, op, mem, tile),
        KernelVariant::CrcCwm { .. } => kernel_crc_cwm(warp, op, mem, tile),
    }
}
