//! Nesting, inclusion and duality of the hierarchies on random samples.

use hierarchy::{extension_state, mom_ext_feasible, nn_ext_feasible, pnn_member, rsos_member};
use dsmatrix::DSMatrix;
use numkernel::NumericContext;
use proptest::prelude::*;
use symtensor::SymTensor;

fn tensor(n: u32, d: usize, vals: &[f64]) -> SymTensor {
    let mut it = vals.iter().cycle();
    SymTensor::from_fn(n, d, |_| *it.next().unwrap()).unwrap()
}

/// A form with a positive diagonal and mixed-sign remaining entries.
fn witness_like(n: u32, d: usize, vals: &[f64]) -> SymTensor {
    let mut it = vals.iter().cycle();
    SymTensor::from_fn(n, d, |a| {
        let v = *it.next().unwrap();
        if a.support().len() == 1 { 1.0 + v.abs() } else { v }
    })
    .unwrap()
}

fn shape() -> impl Strategy<Value = (u32, usize)> {
    prop_oneof![Just((2u32, 2usize)), Just((2, 3)), Just((3, 2)), Just((3, 3)), Just((4, 2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polya_levels_are_nested((n, d) in shape(), vals in prop::collection::vec(-1.0f64..1.0, 1..12)) {
        let ctx = NumericContext::default();
        let t = witness_like(n, d, &vals);
        for r in 0..6 {
            if pnn_member(&t, r, &ctx).is_member() {
                prop_assert!(pnn_member(&t, r + 1, &ctx).is_member());
            }
        }
    }

    #[test]
    fn nonnegative_extension_levels_are_nested((n, d) in shape(),
        vals in prop::collection::vec(0.0f64..1.0, 1..12), zero in 0usize..12) {
        let ctx = NumericContext::default();
        let mut v = vals.clone();
        let k = zero % v.len();
        v[k] = 0.0;
        let q = tensor(n, d, &v);
        for r in 0..3 {
            if nn_ext_feasible(&q, r + 1, &ctx).is_member() {
                prop_assert!(nn_ext_feasible(&q, r, &ctx).is_member());
            }
        }
    }

    #[test]
    fn extension_and_polya_pair_nonnegatively((n, d) in shape(),
        q_vals in prop::collection::vec(0.0f64..1.0, 1..12),
        w_vals in prop::collection::vec(-1.0f64..1.0, 1..12), r in 0u32..3) {
        let ctx = NumericContext::default();
        let q = tensor(n, d, &q_vals);
        let w = witness_like(n, d, &w_vals);
        if nn_ext_feasible(&q, r, &ctx).is_member() && pnn_member(&w, r, &ctx).is_member() {
            prop_assert!(q.euclid_inner(&w).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn extension_round_trip_reproduces_the_state((n, d) in shape(),
        atoms in prop::collection::vec((0.1f64..1.0, prop::collection::vec(0.0f64..1.0, 3)), 1..4),
        r in 1u32..3) {
        let ctx = NumericContext::default();
        let mut q = SymTensor::zeros(n, d).unwrap();
        for (w, v) in &atoms {
            let u: Vec<f64> = v[..d].iter().map(|x| x + 0.01).collect();
            q = q.add_scaled(&SymTensor::rank_one(&u, n).unwrap(), *w).unwrap();
        }
        let x = DSMatrix::lambda_from_q(&q);
        let v = nn_ext_feasible(&q, r, &ctx);
        prop_assert!(v.is_member(), "{}", v.details);
        let ext = extension_state(&v).unwrap();
        let traced = ext.to_dense().unwrap().partial_trace_last(r);
        prop_assert!(traced.max_abs_diff(&x.to_dense().unwrap()) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn polya_members_are_reznick_members((n, d) in prop_oneof![Just((2u32, 2usize)), Just((2, 3)), Just((4, 2))],
        vals in prop::collection::vec(-1.0f64..1.0, 1..12), r in 0u32..3) {
        let ctx = NumericContext::default();
        let t = witness_like(n, d, &vals);
        if pnn_member(&t, r, &ctx).is_member() {
            let v = rsos_member(&t, r, &ctx).unwrap();
            prop_assert!(v.is_member(), "{}", v.details);
        }
    }

    #[test]
    fn reznick_levels_are_nested((n, d) in prop_oneof![Just((2u32, 2usize)), Just((2, 3))],
        vals in prop::collection::vec(-1.0f64..1.0, 1..12)) {
        let ctx = NumericContext::default();
        let t = witness_like(n, d, &vals);
        for r in 0..2 {
            if rsos_member(&t, r, &ctx).unwrap().is_member() {
                let v = rsos_member(&t, r + 1, &ctx).unwrap();
                prop_assert!(v.is_member(), "{}", v.details);
            }
        }
    }

    #[test]
    fn moment_extension_levels_are_nested_and_pair_with_reznick(
        (n, d) in prop_oneof![Just((2u32, 2usize)), Just((2, 3))],
        q_vals in prop::collection::vec(0.0f64..1.0, 1..8),
        w_vals in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let ctx = NumericContext::default();
        let q = tensor(n, d, &q_vals);
        let w = witness_like(n, d, &w_vals);
        let v2 = mom_ext_feasible(&q, 2, &ctx).unwrap();
        if v2.is_member() {
            prop_assert!(mom_ext_feasible(&q, 1, &ctx).unwrap().is_member());
        }
        for r in 0..2 {
            if mom_ext_feasible(&q, r, &ctx).unwrap().is_member() && rsos_member(&w, r, &ctx).unwrap().is_member() {
                prop_assert!(q.euclid_inner(&w).unwrap() >= -1e-6);
            }
        }
    }
}
