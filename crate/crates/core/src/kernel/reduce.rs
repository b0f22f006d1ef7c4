use std::fmt;

/// Accumulator seed plus an associative, commutative combine function.
///
/// The multiplication `A[i,k] * B[k,j]` is fixed; only the reduction over a
/// row's products is user-defined. `sum` gives ordinary SpMM, `max` gives
/// max-pooling aggregation.
#[derive(Clone, Copy)]
pub struct ReduceOp {
    name: &'static str,
    init: f32,
    combine: fn(f32, f32) -> f32,
}

fn add(a: f32, b: f32) -> f32 {
    a + b
}

fn max(a: f32, b: f32) -> f32 {
    a.max(b)
}

impl ReduceOp {
    pub const fn new(name: &'static str, init: f32, combine: fn(f32, f32) -> f32) -> Self {
        ReduceOp {
            name,
            init,
            combine,
        }
    }

    pub const fn sum() -> Self {
        Self::new("sum", 0.0, add)
    }

    /// Seeded with `f32::MIN`, so an empty row yields the most negative
    /// finite value rather than infinity.
    pub const fn max() -> Self {
        Self::new("max", f32::MIN, max)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "sum" => Some(Self::sum()),
            "max" => Some(Self::max()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn init(&self) -> f32 {
        self.init
    }

    #[inline(always)]
    pub fn combine(&self, acc: f32, x: f32) -> f32 {
        (self.combine)(acc, x)
    }

    /// Left fold of `combine` over `items`, seeded with `init`.
    pub fn fold<I: IntoIterator<Item = f32>>(&self, items: I) -> f32 {
        items
            .into_iter()
            .fold(self.init, |acc, x| self.combine(acc, x))
    }
}

impl fmt::Debug for ReduceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReduceOp")
            .field("name", &self.name)
            .field("init", &self.init)
            .finish()
    }
}

impl PartialEq for ReduceOp {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.init.to_bits() == other.init.to_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Integers scaled by a power of two keep every sum exact, which is the
    // domain on which float addition is associative.
    fn exact_value(rng: &mut ChaCha8Rng) -> f32 {
        rng.gen_range(-4096i32..4096) as f32 / 8.0
    }

    fn check_laws(op: ReduceOp, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let (a, b, c) = (
                exact_value(&mut rng),
                exact_value(&mut rng),
                exact_value(&mut rng),
            );
            assert_eq!(
                op.combine(op.combine(a, b), c),
                op.combine(a, op.combine(b, c)),
                "{} not associative on ({a}, {b}, {c})",
                op.name()
            );
            assert_eq!(op.combine(a, b), op.combine(b, a));
            assert_eq!(op.combine(op.init(), a), a);
        }
    }

    #[test]
    fn sum_laws_hold() {
        check_laws(ReduceOp::sum(), 1);
    }

    #[test]
    fn max_laws_hold() {
        check_laws(ReduceOp::max(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let op = ReduceOp::max();
        for _ in 0..10_000 {
            let (a, b, c): (f32, f32, f32) = (rng.gen(), rng.gen(), rng.gen());
            assert_eq!(op.combine(op.combine(a, b), c), op.combine(a, op.combine(b, c)));
        }
    }

    #[test]
    fn fold_over_empty_is_init() {
        assert_eq!(ReduceOp::sum().fold([]), 0.0);
        assert_eq!(ReduceOp::max().fold([]), f32::MIN);
        assert_eq!(ReduceOp::max().fold([5.0, 3.0]), 5.0);
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(ReduceOp::by_name("max"), Some(ReduceOp::max()));
        assert!(ReduceOp::by_name("mean").is_none());
        let custom = ReduceOp::new("min", f32::MAX, f32::min);
        assert_eq!(custom.fold([2.0, -1.0]), -1.0);
    }
}
