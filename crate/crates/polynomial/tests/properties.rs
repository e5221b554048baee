//! Evaluation oracles and structural properties of homogeneous forms.

use combinat::{enumerate_occupations, flat_digits, OccupationVector};
use polynomial::{half_newton_basis, poly_from_tensor, tensor_from_poly, HomPoly};
use proptest::prelude::*;
use symtensor::SymTensor;

fn tensor(n: u32, d: usize, vals: &[f64]) -> SymTensor {
    let mut it = vals.iter().cycle();
    SymTensor::from_fn(n, d, |_| *it.next().unwrap()).unwrap()
}

/// `⟨T, x^{⊗n}⟩` summed over every dense multi-index.
fn dense_contraction(t: &SymTensor, x: &[f64]) -> f64 {
    let dense = t.to_dense();
    (0..dense.len())
        .map(|flat| {
            let digits = flat_digits(flat, t.order(), t.dim());
            dense[flat] * digits.iter().map(|&i| x[i]).product::<f64>()
        })
        .sum()
}

fn random_poly(d: usize, deg: u32, vals: &[f64], mask: u64) -> HomPoly {
    let terms = enumerate_occupations(deg, d)
        .into_iter()
        .enumerate()
        .filter(|(k, _)| mask >> (k % 64) & 1 == 1)
        .map(|(k, a)| (a, vals[k % vals.len()]));
    HomPoly::from_terms(d, deg, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_matches_dense_contraction(n in 1u32..=4, d in 2usize..=3,
        vals in prop::collection::vec(-1.0f64..1.0, 1..16),
        x in prop::collection::vec(-2.0f64..2.0, 3)) {
        let t = tensor(n, d, &vals);
        let p = poly_from_tensor(&t).unwrap();
        let lhs = p.eval(&x[..d]);
        let rhs = dense_contraction(&t, &x[..d]);
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        let back = tensor_from_poly(&p).unwrap();
        for (a, b) in back.values().iter().zip(t.values()) {
            prop_assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0) || (b.abs() < 1e-14 && *a == 0.0));
        }
    }

    #[test]
    fn multiply_matches_pointwise_product(d in 1usize..=3, p_deg in 0u32..=3, q_deg in 0u32..=3,
        vals in prop::collection::vec(-1.0f64..1.0, 1..12), mask in any::<u64>(),
        x in prop::collection::vec(-1.5f64..1.5, 3)) {
        let p = random_poly(d, p_deg, &vals, mask);
        let q = random_poly(d, q_deg, &vals, mask.rotate_left(7));
        let pq = p.multiply(&q).unwrap();
        prop_assert_eq!(pq.degree(), p_deg + q_deg);
        let lhs = pq.eval(&x[..d]);
        let rhs = p.eval(&x[..d]) * q.eval(&x[..d]);
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
    }

    #[test]
    fn half_newton_contains_even_support(d in 2usize..=3, half in 1u32..=3,
        vals in prop::collection::vec(-1.0f64..1.0, 1..12), mask in any::<u64>()) {
        let p = random_poly(d, 2 * half, &vals, mask);
        let basis = half_newton_basis(&p).unwrap();
        for a in p.support() {
            if a.entries().iter().all(|v| v % 2 == 0) {
                let beta = OccupationVector::new(a.entries().iter().map(|v| v / 2).collect());
                prop_assert!(basis.contains(&beta));
            }
        }
        // Every basis element doubles into the Newton polytope.
        for b in &basis {
            let twice: Vec<u32> = b.entries().iter().map(|v| 2 * v).collect();
            prop_assert!(polynomial::in_convex_hull(&p.support(), &twice));
        }
    }
}
