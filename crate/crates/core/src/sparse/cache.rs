//! Binary CSR cache files.
//!
//! Layout (little-endian): the magic `CSR1`, then `n_rows`, `n_cols` and
//! `nnz` as `u64`, then `row_ptr` (`u32` x `n_rows + 1`), `col_ind`
//! (`u32` x `nnz`) and `vals` (`f32` x `nnz`).

use std::io::{self, Read, Write};

use super::{CsrMatrix, SparseError};

pub const MAGIC: &[u8; 4] = b"CSR1";

pub fn write_csr_cache<W: Write>(m: &CsrMatrix, mut w: W) -> io::Result<()> {
    w.write_all(MAGIC)?;
    for dim in [m.n_rows(), m.n_cols(), m.nnz()] {
        w.write_all(&(dim as u64).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(4 * (m.n_rows() + 1 + 2 * m.nnz()));
    buf.extend(m.row_ptr().iter().flat_map(|x| x.to_le_bytes()));
    buf.extend(m.col_ind().iter().flat_map(|x| x.to_le_bytes()));
    buf.extend(m.vals().iter().flat_map(|x| x.to_le_bytes()));
    w.write_all(&buf)
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_words<R: Read>(r: &mut R, n: usize) -> io::Result<Vec<[u8; 4]>> {
    let mut raw = vec![0u8; 4 * n];
    r.read_exact(&mut raw)?;
    Ok(raw
        .chunks_exact(4)
        .map(|c| [c[0], c[1], c[2], c[3]])
        .collect())
}

/// Reads a cache file and rejects it unless the matrix is canonical.
pub fn read_csr_cache<R: Read>(mut r: R) -> Result<CsrMatrix, SparseError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SparseError::BadMagic(magic));
    }
    let n_rows = read_u64(&mut r)?;
    let n_cols = read_u64(&mut r)?;
    let nnz = read_u64(&mut r)?;
    if nnz > u32::MAX as u64 || n_rows >= u32::MAX as u64 || n_cols > u32::MAX as u64 {
        return Err(SparseError::TooLarge(nnz as usize));
    }
    let (n_rows, n_cols, nnz) = (n_rows as usize, n_cols as usize, nnz as usize);
    let row_ptr = read_words(&mut r, n_rows + 1)?
        .into_iter()
        .map(u32::from_le_bytes)
        .collect();
    let col_ind = read_words(&mut r, nnz)?
        .into_iter()
        .map(u32::from_le_bytes)
        .collect();
    let vals = read_words(&mut r, nnz)?
        .into_iter()
        .map(f32::from_le_bytes)
        .collect();
    CsrMatrix::new(n_rows, n_cols, row_ptr, col_ind, vals)
}
