use std::fmt;

use super::SparseError;

/// Sparse matrix in compressed-sparse-row form with 32-bit indices and values.
///
/// `row_ptr` has `n_rows + 1` offsets into `col_ind`/`vals`. A matrix built
/// through [`CsrMatrix::new`] or [`from_coo`](super::from_coo) is canonical:
/// within every row the column indices are strictly increasing. Kernels rely
/// on that ordering to fold nonzeros in the same order as the dense oracle.
///
/// [`CsrMatrix::from_parts_unchecked`] accepts anything, so that malformed
/// inputs can be inspected with [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<u32>,
    col_ind: Vec<u32>,
    vals: Vec<f32>,
}

impl CsrMatrix {
    /// Builds a matrix and rejects it unless it is canonical.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<u32>,
        col_ind: Vec<u32>,
        vals: Vec<f32>,
    ) -> Result<Self, SparseError> {
        let m = Self::from_parts_unchecked(n_rows, n_cols, row_ptr, col_ind, vals);
        let report = validate(&m);
        if report.is_canonical() {
            Ok(m)
        } else {
            Err(SparseError::NonCanonical(report))
        }
    }

    pub fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<u32>,
        col_ind: Vec<u32>,
        vals: Vec<f32>,
    ) -> Self {
        CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_ind,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        let idx: Vec<u32> = (0..n as u32).collect();
        let mut row_ptr = idx.clone();
        row_ptr.push(n as u32);
        CsrMatrix::from_parts_unchecked(n, n, row_ptr, idx, vec![1.0; n])
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_ind.len()
    }

    pub fn row_ptr(&self) -> &[u32] {
        &self.row_ptr
    }

    pub fn col_ind(&self) -> &[u32] {
        &self.col_ind
    }

    pub fn vals(&self) -> &[f32] {
        &self.vals
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f32]) {
        let lo = self.row_ptr[i] as usize;
        let hi = self.row_ptr[i + 1] as usize;
        (&self.col_ind[lo..hi], &self.vals[lo..hi])
    }

    pub fn row_len(&self, i: usize) -> usize {
        (self.row_ptr[i + 1] - self.row_ptr[i]) as usize
    }

    pub fn mean_row_len(&self) -> f64 {
        if self.n_rows == 0 {
            0.0
        } else {
            self.nnz() as f64 / self.n_rows as f64
        }
    }

    pub fn is_canonical(&self) -> bool {
        validate(self).is_canonical()
    }
}

/// One broken CSR invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowPtrLength { expected: usize, found: usize },
    RowPtrStart { found: u32 },
    RowPtrDecreasing { index: usize },
    RowPtrEnd { expected: usize, found: u32 },
    ValsLength { expected: usize, found: usize },
    ColumnOutOfBounds { position: usize, col: u32, n_cols: usize },
    ColumnOrder { row: usize, position: usize },
    TooManyNonzeros { nnz: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::RowPtrLength { expected, found } => {
                write!(f, "row_ptr length {found}, expected {expected}")
            }
            Violation::RowPtrStart { found } => write!(f, "row_ptr[0] = {found}, expected 0"),
            Violation::RowPtrDecreasing { index } => {
                write!(f, "row_ptr non-decreasing violated at index {index}")
            }
            Violation::RowPtrEnd { expected, found } => {
                write!(f, "row_ptr[n_rows] = {found}, expected nnz = {expected}")
            }
            Violation::ValsLength { expected, found } => {
                write!(f, "vals length {found}, expected nnz = {expected}")
            }
            Violation::ColumnOutOfBounds {
                position,
                col,
                n_cols,
            } => write!(
                f,
                "col_ind[{position}] = {col} out of bounds for {n_cols} columns"
            ),
            Violation::ColumnOrder { row, position } => write!(
                f,
                "col_ind not strictly increasing in row {row} at position {position}"
            ),
            Violation::TooManyNonzeros { nnz } => {
                write!(f, "nnz = {nnz} does not fit 32-bit offsets")
            }
        }
    }
}

/// Every invariant violation found in a CSR matrix; empty iff canonical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_canonical(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("canonical");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every CSR invariant and reports all violations.
pub fn validate(m: &CsrMatrix) -> ValidationReport {
    let mut violations = Vec::new();
    let nnz = m.col_ind.len();

    if nnz > u32::MAX as usize {
        violations.push(Violation::TooManyNonzeros { nnz });
    }
    if m.vals.len() != nnz {
        violations.push(Violation::ValsLength {
            expected: nnz,
            found: m.vals.len(),
        });
    }
    if m.row_ptr.len() != m.n_rows + 1 {
        violations.push(Violation::RowPtrLength {
            expected: m.n_rows + 1,
            found: m.row_ptr.len(),
        });
    }
    if let Some(&first) = m.row_ptr.first() {
        if first != 0 {
            violations.push(Violation::RowPtrStart { found: first });
        }
    }
    let mut monotone = true;
    for (i, w) in m.row_ptr.windows(2).enumerate() {
        if w[1] < w[0] {
            violations.push(Violation::RowPtrDecreasing { index: i + 1 });
            monotone = false;
        }
    }
    if let Some(&last) = m.row_ptr.last() {
        if last as usize != nnz {
            violations.push(Violation::RowPtrEnd {
                expected: nnz,
                found: last,
            });
        }
    }
    for (p, &c) in m.col_ind.iter().enumerate() {
        if c as usize >= m.n_cols {
            violations.push(Violation::ColumnOutOfBounds {
                position: p,
                col: c,
                n_cols: m.n_cols,
            });
        }
    }
    // Row-wise ordering only makes sense once the row boundaries are usable.
    if monotone && m.row_ptr.len() == m.n_rows + 1 {
        for row in 0..m.n_rows {
            let lo = (m.row_ptr[row] as usize).min(nnz);
            let hi = (m.row_ptr[row + 1] as usize).min(nnz);
            for p in lo + 1..hi {
                if m.col_ind[p] <= m.col_ind[p - 1] {
                    violations.push(Violation::ColumnOrder { row, position: p });
                }
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_matrix_has_empty_report() {
        let m = CsrMatrix::new(2, 2, vec![0, 1, 2], vec![1, 0], vec![2.0, 3.0]).unwrap();
        assert!(validate(&m).is_canonical());
    }

    #[test]
    fn decreasing_row_ptr_is_reported() {
        let m = CsrMatrix::from_parts_unchecked(2, 2, vec![0, 2, 1], vec![0], vec![1.0]);
        let report = validate(&m);
        assert!(report
            .violations
            .contains(&Violation::RowPtrDecreasing { index: 2 }));
        assert!(report
            .to_string()
            .contains("non-decreasing violated at index 2"));
    }

    #[test]
    fn column_at_n_cols_is_out_of_bounds() {
        let m = CsrMatrix::from_parts_unchecked(1, 3, vec![0, 1], vec![3], vec![1.0]);
        assert_eq!(
            validate(&m).violations,
            vec![Violation::ColumnOutOfBounds {
                position: 0,
                col: 3,
                n_cols: 3
            }]
        );
    }

    #[test]
    fn unsorted_and_duplicate_columns_are_reported() {
        let m = CsrMatrix::from_parts_unchecked(
            2,
            4,
            vec![0, 2, 4],
            vec![2, 1, 3, 3],
            vec![1.0; 4],
        );
        let v = validate(&m).violations;
        assert_eq!(
            v,
            vec![
                Violation::ColumnOrder { row: 0, position: 1 },
                Violation::ColumnOrder { row: 1, position: 3 },
            ]
        );
    }

    #[test]
    fn length_mismatches_are_reported() {
        let m = CsrMatrix::from_parts_unchecked(2, 2, vec![0, 1], vec![0], vec![]);
        let v = validate(&m).violations;
        assert!(v.contains(&Violation::ValsLength {
            expected: 1,
            found: 0
        }));
        assert!(v.contains(&Violation::RowPtrLength {
            expected: 3,
            found: 2
        }));
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![]).is_err());
    }

    #[test]
    fn identity_is_canonical() {
        let m = CsrMatrix::identity(5);
        assert!(m.is_canonical());
        assert_eq!(m.nnz(), 5);
        assert_eq!(m.row(3), (&[3u32][..], &[1.0f32][..]));
    }
}
