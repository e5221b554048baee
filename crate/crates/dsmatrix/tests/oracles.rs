//! Dense computational-basis oracles for DS matrices.

use combinat::{enumerate_occupations, flat_occupation, partitions};
use dsmatrix::{dicke_marginal_closed_form, dicke_marginal_exact, npt_2body, DSMatrix};
use num_rational::Ratio;
use proptest::prelude::*;
use symtensor::SymTensor;

fn ds(n: u32, d: usize, vals: &[f64]) -> DSMatrix {
    let mut it = vals.iter().cycle();
    DSMatrix::from_lambda(SymTensor::from_fn(n, d, |_| *it.next().unwrap()).unwrap())
}

fn shape() -> impl Strategy<Value = (u32, usize)> {
    prop_oneof![(1u32..=4, 2usize..=3), (1u32..=6, Just(2usize))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dense_export_is_psd_with_q_diagonal((n, d) in shape(), vals in prop::collection::vec(0.0f64..1.0, 1..20)) {
        let x = ds(n, d, &vals);
        let m = x.to_dense().unwrap();
        prop_assert!(m.min_eigenvalue().unwrap() > -1e-12);
        let q = x.q_view();
        for i in 0..m.dim {
            prop_assert_eq!(m.get(i, i), q.get(&flat_occupation(i, n, d)));
        }
        prop_assert!((m.trace() - x.trace()).abs() < 1e-12);
    }

    #[test]
    fn hs_inner_matches_dense_trace((n, d) in shape(),
        a in prop::collection::vec(-1.0f64..1.0, 1..20),
        b in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        let x = ds(n, d, &a);
        let y = ds(n, d, &b);
        let hs = x.hs_inner(&y).unwrap();
        let direct: f64 = x.lambda().values().iter().zip(y.lambda().values()).map(|(p, q)| p * q).sum();
        let dense = x.to_dense().unwrap().trace_product(&y.to_dense().unwrap());
        prop_assert!((hs - direct).abs() < 1e-12);
        prop_assert!((hs - dense).abs() < 1e-10);
    }

    #[test]
    fn marginal_matches_dense_partial_trace((n, d) in shape(), r in 0u32..4,
        vals in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        prop_assume!(r < n);
        let x = ds(n, d, &vals);
        let from_q = x.marginal(r).unwrap();
        let oracle = x.to_dense().unwrap().partial_trace_last(r);
        prop_assert!(from_q.to_dense().unwrap().max_abs_diff(&oracle) < 1e-12);
        let direct = x.q_view().marginal(r).unwrap();
        for (p, q) in from_q.q_view().values().iter().zip(direct.values()) {
            prop_assert!((p - q).abs() <= 1e-14 * q.abs().max(1.0));
        }
    }

    #[test]
    fn lambda_q_round_trip((n, d) in shape(), vals in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        let x = ds(n, d, &vals);
        let back = DSMatrix::lambda_from_q(&x.q_view());
        for (p, q) in back.lambda().values().iter().zip(x.lambda().values()) {
            prop_assert!((p - q).abs() <= 1e-15 * q.abs().max(1.0));
        }
        let w = x.w_view();
        for (a, v) in x.q_view().iter() {
            prop_assert!((w.get(a) - a.weight() * v).abs() <= 1e-15 * w.get(a).abs().max(1.0));
        }
    }

    #[test]
    fn symmetrize_is_idempotent_and_invariant((n, d) in shape(), vals in prop::collection::vec(0.0f64..1.0, 1..20)) {
        let s = ds(n, d, &vals).sd_symmetrize();
        let t = s.sd_symmetrize();
        for (p, q) in s.lambda().values().iter().zip(t.lambda().values()) {
            prop_assert!((p - q).abs() < 1e-15);
        }
        let coords = s.sd_coordinates(1e-12).unwrap();
        let total: f64 = coords.values().sum();
        prop_assert!((total - s.trace()).abs() < 1e-12);
    }
}

#[test]
fn closed_form_marginal_is_exact() {
    for d in 2..=3 {
        for n in 1..=5u32 {
            for alpha in enumerate_occupations(n, d) {
                let den = alpha.multinomial().unwrap();
                for r in 0..n {
                    let exact = dicke_marginal_exact(&alpha, r).unwrap();
                    // Marginal of Q = indicator(α)/multinomial(n,α), carried out in rationals.
                    for (beta, (num, dd)) in enumerate_occupations(n - r, d).iter().zip(&exact) {
                        let mut acc = Ratio::<u128>::from_integer(0);
                        for delta in enumerate_occupations(r, d) {
                            if beta.add(&delta) == alpha {
                                acc += Ratio::new(delta.multinomial().unwrap(), den);
                            }
                        }
                        assert_eq!(acc, Ratio::new(*num, *dd), "α={alpha} r={r} β={beta}");
                    }
                    let cf = dicke_marginal_closed_form(&alpha, r).unwrap();
                    let mg = DSMatrix::pure_dicke(&alpha).unwrap().q_view().marginal(r).unwrap();
                    for (p, q) in cf.values().iter().zip(mg.values()) {
                        assert!((p - q).abs() <= 1e-15 * q.abs().max(1e-300));
                    }
                    assert!((DSMatrix::lambda_from_q(&cf).trace() - 1.0).abs() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn npt_gap_matches_dense_partial_transpose() {
    for (n, d) in [(2u32, 2usize), (3, 2), (4, 2), (3, 3), (4, 3)] {
        for alpha in enumerate_occupations(n, d) {
            let rep = npt_2body(&alpha).unwrap();
            let x = DSMatrix::pure_dicke(&alpha).unwrap();
            let two = if n > 2 { x.marginal(n - 2).unwrap() } else { x };
            let pt = two.to_dense().unwrap().partial_transpose_first(1);
            let min = pt.min_eigenvalue().unwrap();
            if alpha.support().len() > 1 {
                assert!(rep.entangled && rep.gap > 0.0, "α={alpha}");
                assert!(min < -1e-12, "α={alpha} λ_min={min}");
                // The 2×2 block of the transposed marginal on |ll⟩, |mm⟩ has determinant −gap.
                let (l, m) = rep.pair.unwrap();
                let (a, b) = ((l - 1) * d + (l - 1), (m - 1) * d + (m - 1));
                let det = pt.get(a, a) * pt.get(b, b) - pt.get(a, b) * pt.get(b, a);
                assert!((det + rep.gap).abs() < 1e-14, "α={alpha}");
            } else {
                assert!(!rep.entangled);
                assert!(min > -1e-12);
            }
        }
    }
}

#[test]
fn orbit_states_are_normalized_and_orthogonal() {
    for d in 2..=4 {
        for n in 1..=4u32 {
            let ps = partitions(n, d);
            let states: Vec<DSMatrix> = ps.iter().map(|m| DSMatrix::sd_orbit_state(m).unwrap()).collect();
            for (i, x) in states.iter().enumerate() {
                assert!((x.trace() - 1.0).abs() < 1e-14);
                assert!(x.is_psd(0.0));
                for (j, y) in states.iter().enumerate() {
                    let v = x.hs_inner(y).unwrap();
                    if i == j {
                        let size = combinat::orbit(&ps[i]).len() as f64;
                        assert!((v - 1.0 / size).abs() < 1e-14);
                    } else {
                        assert_eq!(v, 0.0);
                    }
                }
            }
        }
    }
}
