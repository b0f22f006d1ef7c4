use super::OracleError;
use crate::kernel::ReduceOp;
use crate::sparse::{CsrMatrix, DenseMatrix};

/// Largest `M * K` the oracle will densify.
pub const DENSE_CAP: usize = 1 << 24;

/// `A` with every zero stored explicitly, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseRef {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f32>,
}

impl DenseRef {
    pub fn densify(a: &CsrMatrix) -> Result<Self, OracleError> {
        let (rows, cols) = (a.n_rows(), a.n_cols());
        match rows.checked_mul(cols) {
            Some(len) if len <= DENSE_CAP => {
                let mut data = vec![0.0f32; len];
                for i in 0..rows {
                    let (ks, vs) = a.row(i);
                    for (&k, &v) in ks.iter().zip(vs) {
                        data[i * cols + k as usize] = v;
                    }
                }
                Ok(DenseRef { n_rows: rows, n_cols: cols, data })
            }
            _ => Err(OracleError::TooLarge {
                rows,
                cols,
                cap: DENSE_CAP,
            }),
        }
    }

    pub fn get(&self, i: usize, k: usize) -> f32 {
        self.data[i * self.n_cols + k]
    }
}

/// `C[i][j]` folds `A[i][k] * B[k][j]` over nonzero `A[i][k]` in ascending `k`,
/// starting from `op.init`.
pub fn dense_reference(a: &CsrMatrix, b: &DenseMatrix, op: &ReduceOp) -> Result<DenseMatrix, OracleError> {
    if a.n_cols() != b.n_rows() {
        return Err(OracleError::DimensionMismatch {
            a_cols: a.n_cols(),
            b_rows: b.n_rows(),
        });
    }
    let d = DenseRef::densify(a)?;
    let (m, kdim, n) = (d.n_rows, d.n_cols, b.n_cols());
    let mut c = DenseMatrix::filled(m, n, op.init());
    // Row i of C accumulates column-by-column; each element still sees its
    // terms in ascending k.
    let mut acc = vec![op.init(); n];
    for i in 0..m {
        acc.fill(op.init());
        for k in 0..kdim {
            let x = d.get(i, k);
            if x == 0.0 {
                continue;
            }
            for (j, slot) in acc.iter_mut().enumerate() {
                *slot = op.combine(*slot, x * b.get(k, j));
            }
        }
        for (j, &v) in acc.iter().enumerate() {
            c.set(i, j, v);
        }
    }
    Ok(c)
}
