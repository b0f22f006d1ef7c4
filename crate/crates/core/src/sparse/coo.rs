use super::{CsrMatrix, SparseError};

/// Coordinate-list triples with declared dimensions.
///
/// Duplicates are allowed; [`from_coo`] resolves them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CooEntries {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(u32, u32, f32)>,
}

impl CooEntries {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        CooEntries {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn with_entries(n_rows: usize, n_cols: usize, entries: Vec<(u32, u32, f32)>) -> Self {
        CooEntries {
            n_rows,
            n_cols,
            entries,
        }
    }

    pub fn push(&mut self, row: u32, col: u32, value: f32) {
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// How [`from_coo`] resolves repeated `(row, col)` positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupPolicy {
    /// Add the values, in input order.
    #[default]
    Sum,
    /// Keep the value that appears last in the input.
    Last,
}

/// Converts triples into canonical CSR.
///
/// The sort is stable, so `Sum` accumulates duplicates in input order and the
/// result is fully determined by the input sequence.
pub fn from_coo(coo: &CooEntries, dedup: DedupPolicy) -> Result<CsrMatrix, SparseError> {
    for &(r, c, v) in &coo.entries {
        if r as usize >= coo.n_rows || c as usize >= coo.n_cols {
            return Err(SparseError::EntryOutOfBounds {
                row: r,
                col: c,
                value: v,
                n_rows: coo.n_rows,
                n_cols: coo.n_cols,
            });
        }
    }

    let mut sorted = coo.entries.clone();
    sorted.sort_by_key(|&(r, c, _)| (r, c));

    let mut merged: Vec<(u32, u32, f32)> = Vec::with_capacity(sorted.len());
    for (r, c, v) in sorted {
        match merged.last_mut() {
            Some(last) if last.0 == r && last.1 == c => match dedup {
                DedupPolicy::Sum => last.2 += v,
                DedupPolicy::Last => last.2 = v,
            },
            _ => merged.push((r, c, v)),
        }
    }
    if merged.len() > u32::MAX as usize {
        return Err(SparseError::TooLarge(merged.len()));
    }

    let mut row_ptr = vec![0u32; coo.n_rows + 1];
    for &(r, _, _) in &merged {
        row_ptr[r as usize + 1] += 1;
    }
    for i in 0..coo.n_rows {
        row_ptr[i + 1] += row_ptr[i];
    }
    let col_ind = merged.iter().map(|e| e.1).collect();
    let vals = merged.iter().map(|e| e.2).collect();
    Ok(CsrMatrix::from_parts_unchecked(
        coo.n_rows, coo.n_cols, row_ptr, col_ind, vals,
    ))
}

/// Row-major triples of a CSR matrix.
pub fn to_coo(m: &CsrMatrix) -> CooEntries {
    let mut entries = Vec::with_capacity(m.nnz());
    for r in 0..m.n_rows() {
        let (cols, vals) = m.row(r);
        entries.extend(cols.iter().zip(vals).map(|(&c, &v)| (r as u32, c, v)));
    }
    CooEntries::with_entries(m.n_rows(), m.n_cols(), entries)
}
