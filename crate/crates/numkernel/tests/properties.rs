use numkernel::*;
use proptest::prelude::*;

fn sym_from(m: usize, raw: &[f64]) -> DenseSym {
    DenseSym::from_fn(m, |i, j| raw[(i * 31 + j * 17) % raw.len()] + raw[(j * 31 + i * 17) % raw.len()])
}

fn reconstruction_error(m: &DenseSym) -> (f64, f64) {
    let e = sym_eig(m).unwrap();
    let n = m.size();
    let rec = e.reconstruct_with(|x| x);
    let err = rec.add_scaled(m, -1.0).frobenius();
    let mut orth = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let dot: f64 = e.vectors[a].iter().zip(&e.vectors[b]).map(|(x, y)| x * y).sum();
            orth = orth.max((dot - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    (err / m.frobenius().max(1e-300), orth)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstruction(m in 1usize..40, raw in prop::collection::vec(-10.0f64..10.0, 64)) {
        let a = sym_from(m, &raw);
        let (rel, orth) = reconstruction_error(&a);
        prop_assert!(rel <= 1e-9, "relative reconstruction error {rel}");
        prop_assert!(orth <= 1e-10, "orthogonality defect {orth}");
    }

    #[test]
    fn min_eigenvalue_is_shift_equivariant(m in 1usize..12, raw in prop::collection::vec(-3.0f64..3.0, 32), t in -5.0f64..5.0) {
        let a = sym_from(m, &raw);
        let l0 = psd_check(&a, 1e-8).unwrap().min_eigenvalue;
        let l1 = psd_check(&a.shift(t), 1e-8).unwrap().min_eigenvalue;
        prop_assert!((l1 - l0 - t).abs() <= 1e-10 * (1.0 + a.frobenius()));
    }

    #[test]
    fn lp_verdicts_are_certified(rows in 1usize..6, cols in 1usize..8,
                                 raw in prop::collection::vec(-3i32..4, 64),
                                 rhs in prop::collection::vec(-3i32..4, 8)) {
        let a: Vec<Vec<f64>> = (0..rows)
            .map(|i| (0..cols).map(|j| raw[(i * cols + j) % raw.len()] as f64).collect())
            .collect();
        let b: Vec<f64> = (0..rows).map(|i| rhs[i] as f64).collect();
        let v1 = lp_feasibility(&a, &b, 1e-9);
        let v2 = lp_feasibility(&a, &b, 1e-9);
        prop_assert_eq!(&v1, &v2);
        match &v1.status {
            FeasibilityStatus::Feasible(x) => prop_assert!(verify_lp_point(&a, &b, x, 1e-9)),
            FeasibilityStatus::Infeasible(FeasibilityCertificate::FarkasRay { y }) => {
                prop_assert!(verify_farkas(&a, &b, y, 1e-9))
            }
            other => prop_assert!(false, "unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn planted_lp_is_feasible(rows in 1usize..6, cols in 1usize..9,
                              raw in prop::collection::vec(-2.0f64..2.0, 64),
                              xs in prop::collection::vec(0.0f64..1.0, 9)) {
        let a: Vec<Vec<f64>> = (0..rows)
            .map(|i| (0..cols).map(|j| raw[(i * cols + j) % raw.len()]).collect())
            .collect();
        let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&xs).map(|(p, q)| p * q).sum()).collect();
        let v = lp_feasibility(&a, &b, 1e-9);
        prop_assert!(v.is_feasible(), "{v:?}");
    }
}

#[test]
fn eigen_reconstruction_at_size_200() {
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let raw: Vec<f64> = (0..200 * 200).map(|_| next()).collect();
    let a = DenseSym::from_fn(200, |i, j| raw[i * 200 + j] + raw[j * 200 + i]);
    let (rel, orth) = reconstruction_error(&a);
    assert!(rel <= 1e-8, "relative reconstruction error {rel}");
    assert!(orth <= 1e-10);
}

#[test]
fn lp_never_flips_across_seeds() {
    let mut state = 99u64;
    let mut next = |k: i64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as i64 % k) - k / 2
    };
    for _ in 0..1000 {
        let rows = 1 + (next(8).unsigned_abs() as usize % 4);
        let cols = 1 + (next(10).unsigned_abs() as usize % 5);
        let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| next(7) as f64).collect()).collect();
        let b: Vec<f64> = (0..rows).map(|_| next(7) as f64).collect();
        let v1 = lp_feasibility(&a, &b, 1e-9);
        let v2 = lp_feasibility(&a, &b, 1e-9);
        assert_eq!(v1.is_feasible(), v2.is_feasible());
        assert!(!(v1.is_feasible() && v2.is_infeasible()));
        assert!(v1.is_feasible() || v1.is_infeasible(), "inconclusive LP {a:?} {b:?}");
    }
}
