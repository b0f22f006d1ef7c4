use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SparseError;

pub const DEFAULT_BASE_ALIGNMENT: u64 = 128;

/// Row-major dense matrix of `f32`.
///
/// `base_alignment` is the byte alignment the matrix is assumed to have when
/// placed in simulated global memory; element `(r, c)` lives at
/// `base + 4 * (r * n_cols + c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f32>,
    base_alignment: u64,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::filled(n_rows, n_cols, 0.0)
    }

    pub fn filled(n_rows: usize, n_cols: usize, value: f32) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![value; n_rows * n_cols],
            base_alignment: DEFAULT_BASE_ALIGNMENT,
        }
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<f32>) -> Result<Self, SparseError> {
        if data.len() != n_rows * n_cols {
            return Err(SparseError::DenseShape {
                n_rows,
                n_cols,
                len: data.len(),
            });
        }
        Ok(DenseMatrix {
            n_rows,
            n_cols,
            data,
            base_alignment: DEFAULT_BASE_ALIGNMENT,
        })
    }

    pub fn from_rows(rows: &[&[f32]]) -> Result<Self, SparseError> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<f32> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(rows.len(), n_cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Uniform values in `[-1, 1)`, deterministic for a given seed.
    pub fn random(n_rows: usize, n_cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n_rows * n_cols)
            .map(|_| rng.gen_range(-1.0f32..1.0))
            .collect();
        DenseMatrix {
            n_rows,
            n_cols,
            data,
            base_alignment: DEFAULT_BASE_ALIGNMENT,
        }
    }

    pub fn with_base_alignment(mut self, alignment: u64) -> Result<Self, SparseError> {
        if !alignment.is_power_of_two() {
            return Err(SparseError::Alignment(alignment));
        }
        self.base_alignment = alignment;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn base_alignment(&self) -> u64 {
        self.base_alignment
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.n_cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f32) {
        self.data[r * self.n_cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    /// Byte offset of element `(r, c)` from the matrix base.
    pub fn byte_offset(&self, r: usize, c: usize) -> u64 {
        4 * (r * self.n_cols + c) as u64
    }

    /// True when both matrices have the same shape and identical bit patterns.
    pub fn bitwise_eq(&self, other: &DenseMatrix) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// First position whose bit pattern differs, if any.
    pub fn first_difference(&self, other: &DenseMatrix) -> Option<(usize, usize)> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Some((0, 0));
        }
        self.data
            .iter()
            .zip(&other.data)
            .position(|(a, b)| a.to_bits() != b.to_bits())
            .map(|p| (p / self.n_cols.max(1), p % self.n_cols.max(1)))
    }
}
