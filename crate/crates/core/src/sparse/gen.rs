use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CsrMatrix, SparseError};

/// Parameters for a square random graph adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphGenSpec {
    pub n_rows: usize,
    pub nnz_target: usize,
    pub seed: u64,
    pub self_loops: bool,
}

impl GraphGenSpec {
    pub fn new(n_rows: usize, nnz_target: usize, seed: u64) -> Self {
        GraphGenSpec {
            n_rows,
            nnz_target,
            seed,
            self_loops: false,
        }
    }

    pub fn with_self_loops(mut self, self_loops: bool) -> Self {
        self.self_loops = self_loops;
        self
    }

    /// Number of distinct positions the generator may choose from.
    pub fn capacity(&self) -> u64 {
        let n = self.n_rows as u64;
        if self.self_loops {
            n * n
        } else {
            n * n - n
        }
    }
}

/// Samples exactly `nnz_target` distinct positions uniformly without
/// replacement; every value is 1.0.
///
/// Rejection sampling into a hash set. When more than half of the admissible
/// positions are requested the excluded positions are sampled instead, which
/// keeps the expected number of draws below `2 * nnz_target`.
pub fn gen_uniform_random(spec: &GraphGenSpec) -> Result<CsrMatrix, SparseError> {
    let capacity = spec.capacity();
    if spec.nnz_target as u64 > capacity {
        return Err(SparseError::InfeasibleGraph {
            n_rows: spec.n_rows,
            nnz: spec.nnz_target,
            capacity,
        });
    }
    if spec.nnz_target > u32::MAX as usize || spec.n_rows >= u32::MAX as usize {
        return Err(SparseError::TooLarge(spec.nnz_target));
    }

    let n = spec.n_rows as u64;
    let complement = 2 * spec.nnz_target as u64 > capacity;
    let draws = if complement {
        capacity - spec.nnz_target as u64
    } else {
        spec.nnz_target as u64
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut picked: HashSet<u64> = HashSet::with_capacity(draws as usize);
    while (picked.len() as u64) < draws {
        let pos = rng.gen_range(0..n * n);
        if !spec.self_loops && pos / n == pos % n {
            continue;
        }
        picked.insert(pos);
    }

    let mut positions: Vec<u64> = if complement {
        (0..n * n)
            .filter(|&p| (spec.self_loops || p / n != p % n) && !picked.contains(&p))
            .collect()
    } else {
        picked.into_iter().collect()
    };
    positions.sort_unstable();

    let mut row_ptr = vec![0u32; spec.n_rows + 1];
    let mut col_ind = Vec::with_capacity(positions.len());
    for p in positions {
        row_ptr[(p / n) as usize + 1] += 1;
        col_ind.push((p % n) as u32);
    }
    for i in 0..spec.n_rows {
        row_ptr[i + 1] += row_ptr[i];
    }
    let vals = vec![1.0; col_ind.len()];
    Ok(CsrMatrix::from_parts_unchecked(
        spec.n_rows,
        spec.n_rows,
        row_ptr,
        col_ind,
        vals,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph_has_exact_count() {
        let m = gen_uniform_random(&GraphGenSpec::new(4, 8, 7)).unwrap();
        assert!(m.is_canonical());
        assert_eq!(m.row_ptr()[4], 8);
        assert!(m.vals().iter().all(|&v| v == 1.0));
        for r in 0..4 {
            assert!(!m.row(r).0.contains(&(r as u32)), "self loop in row {r}");
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let spec = GraphGenSpec::new(300, 2000, 42);
        assert_eq!(
            gen_uniform_random(&spec).unwrap(),
            gen_uniform_random(&spec).unwrap()
        );
        let other = GraphGenSpec { seed: 43, ..spec };
        assert_ne!(
            gen_uniform_random(&spec).unwrap(),
            gen_uniform_random(&other).unwrap()
        );
    }

    #[test]
    fn infeasible_target_is_rejected() {
        assert!(matches!(
            gen_uniform_random(&GraphGenSpec::new(4, 13, 0)),
            Err(SparseError::InfeasibleGraph { capacity: 12, .. })
        ));
        assert!(gen_uniform_random(&GraphGenSpec::new(4, 16, 0).with_self_loops(true)).is_ok());
    }

    #[test]
    fn dense_request_uses_complement() {
        let full = gen_uniform_random(&GraphGenSpec::new(5, 20, 3)).unwrap();
        assert_eq!(full.nnz(), 20);
        for r in 0..5 {
            assert_eq!(full.row_len(r), 4);
        }
        let most = gen_uniform_random(&GraphGenSpec::new(6, 29, 3).with_self_loops(true)).unwrap();
        assert_eq!(most.nnz(), 29);
        assert!(most.is_canonical());
    }

    #[test]
    fn empty_graph() {
        let m = gen_uniform_random(&GraphGenSpec::new(0, 0, 0)).unwrap();
        assert_eq!(m.row_ptr(), &[0]);
    }
}
