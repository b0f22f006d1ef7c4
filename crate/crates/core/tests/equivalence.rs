//! Every variant on both backends agrees with the dense oracle bit for bit.

use proptest::prelude::*;
use spmm_lab::kernel::{launch_geometry, KernelConfig, KernelVariant, ReduceOp};
use spmm_lab::native::spmm_with;
use spmm_lab::oracle::dense_reference;
use spmm_lab::sim::run_kernel;
use spmm_lab::sparse::{from_coo, CooEntries, CsrMatrix, DedupPolicy, DenseMatrix};
use spmm_lab::verify::all_variants;

// Stored zeros are kept out: the kernels treat them as structural entries,
// which the dense oracle cannot see.
fn arb_case() -> impl Strategy<Value = (CsrMatrix, DenseMatrix, bool)> {
    (1usize..48, 1usize..48, 1usize..80, any::<u64>(), any::<bool>()).prop_flat_map(
        |(m, k, n, seed, use_max)| {
            prop::collection::vec((0..m as u32, 0..k as u32, -4i32..5), 0..(m * 6)).prop_map(
                move |triples| {
                    let entries = triples
                        .into_iter()
                        .map(|(r, c, v)| (r, c, if v == 0 { 1.5 } else { v as f32 * 0.75 }))
                        .collect();
                    let coo = CooEntries::with_entries(m, k, entries);
                    let a = from_coo(&coo, DedupPolicy::Last).unwrap();
                    (a, DenseMatrix::random(k, n, seed), use_max)
                },
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_variants_match_oracle((a, b, use_max) in arb_case(), ws in prop::sample::select(vec![8usize, 32])) {
        let op = if use_max { ReduceOp::max() } else { ReduceOp::sum() };
        let expected = dense_reference(&a, &b, &op).unwrap();
        for v in all_variants() {
            let cfg = KernelConfig::new(v).with_warp_size(ws).with_warps_per_block(3);
            let (sim, _) = run_kernel(&a, &b, &cfg, &op).unwrap();
            prop_assert_eq!(expected.first_difference(&sim), None, "sim {}", v);
            let native = spmm_with(&a, &b, &cfg, &op, 2).unwrap();
            prop_assert_eq!(expected.first_difference(&native), None, "native {}", v);
        }
    }
}

#[test]
fn ownership_partitions_the_output() {
    for (m, n) in [(3, 1), (5, 33), (2, 64), (4, 100), (1, 513)] {
        for v in all_variants() {
            let cfg = KernelConfig::new(v);
            let g = launch_geometry(m, n, &cfg);
            let mut hits = vec![0u32; m * n];
            for w in 0..g.n_warps() {
                let (row, tile) = g.warp_coords(w);
                for lane in 0..g.warp_size {
                    for col in g.owned_columns(tile, lane) {
                        hits[row * n + col] += 1;
                    }
                }
            }
            assert!(hits.iter().all(|&h| h == 1), "{v} m={m} n={n}");
        }
    }
}

#[test]
fn cwm_factors_agree_bitwise() {
    let a = spmm_lab::sparse::gen_uniform_random(&spmm_lab::sparse::GraphGenSpec::new(200, 3000, 8)).unwrap();
    let b = DenseMatrix::random(200, 96, 8);
    let op = ReduceOp::sum();
    let outputs: Vec<_> = [2, 4, 8]
        .into_iter()
        .map(|cf| run_kernel(&a, &b, &KernelConfig::new(KernelVariant::CrcCwm { cf }), &op).unwrap().0)
        .collect();
    assert!(outputs[0].bitwise_eq(&outputs[1]));
    assert!(outputs[1].bitwise_eq(&outputs[2]));
}
