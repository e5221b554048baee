//! Structural properties of SOS verdicts on planted instances.

use combinat::{enumerate_occupations, OccupationVector};
use cones::{copositive_min, is_mom};
use numkernel::NumericContext;
use polynomial::{tensor_from_poly, HomPoly};
use proptest::prelude::*;
use soscone::{gram_reexpansion_error, is_sos_tensor, structured_sos_level};
use symtensor::SymTensor;

/// `Σ_k x^{α_k} · (c_k · m_{j_k})²` with every `j_k ≤ l`.
fn planted_level(n: u32, d: usize, l: u32, picks: &[(u32, usize, Vec<f64>)]) -> SymTensor {
    let mut p = HomPoly::zero(d, n);
    for (j, idx, coeffs) in picks {
        let j = j % (l + 1);
        let alphas = enumerate_occupations(n - 2 * j, d);
        let alpha = &alphas[idx % alphas.len()];
        let labels = enumerate_occupations(j, d);
        let lin = HomPoly::from_terms(d, j, labels.iter().cloned().zip(coeffs.iter().cycle().copied())).unwrap();
        let mono = HomPoly::from_terms(d, n - 2 * j, [(alpha.clone(), 1.0)]).unwrap();
        p = p.add_scaled(&mono.multiply(&lin.multiply(&lin).unwrap()).unwrap(), 1.0).unwrap();
    }
    tensor_from_poly(&p).unwrap()
}

fn picks() -> impl Strategy<Value = Vec<(u32, usize, Vec<f64>)>> {
    prop::collection::vec((0u32..3, 0usize..50, prop::collection::vec(-1.0f64..1.0, 1..6)), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn planted_levels_are_certified_and_nested(n in 2u32..=4, d in 2usize..=3, picks in picks()) {
        let ctx = NumericContext::default();
        let l = n / 2;
        let t = planted_level(n, d, l, &picks);
        let v = structured_sos_level(&t, l, &ctx).unwrap();
        prop_assert!(!v.is_not_sos(), "{:?}", v.obstruction);
        if v.is_sos() {
            let p = polynomial::poly_from_tensor(&t).unwrap();
            let scale = p.terms().fold(1.0f64, |m, (_, c)| m.max(c.abs()));
            let err = gram_reexpansion_error(&p, &v.gram);
            prop_assert!(err <= 1e-8 * scale, "err {err:e}, {}", v.details);
        }
        for k in 0..l {
            if structured_sos_level(&t, k, &ctx).unwrap().is_sos() {
                prop_assert!(structured_sos_level(&t, k + 1, &ctx).unwrap().is_sos());
            }
        }
    }

    #[test]
    fn sos_tensors_are_copositive(n in 2u32..=3, d in 2usize..=3, picks in picks(),
        noise in prop::collection::vec(-0.3f64..0.3, 1..8)) {
        let ctx = NumericContext::default();
        let base = planted_level(n, d, n / 2, &picks);
        let mut it = noise.iter().cycle();
        let t = base.add_scaled(&SymTensor::from_fn(n, d, |_| *it.next().unwrap()).unwrap(), 1.0).unwrap();
        for cand in [&base, &t] {
            let v = is_sos_tensor(cand, &ctx).unwrap();
            if v.is_sos() {
                prop_assert!(copositive_min(cand, 4).unwrap().value >= -1e-6);
            }
        }
    }

    #[test]
    fn level_cone_pairs_nonnegatively_with_moments(n in 2u32..=4, d in 2usize..=3, picks in picks(),
        factors in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..4),
        dicke in prop::collection::vec((0usize..40, 0.0f64..0.5), 0..3)) {
        let ctx = NumericContext::default();
        let l = n / 2;
        let t = planted_level(n, d, l, &picks);
        let mut s = SymTensor::zeros(n, d).unwrap();
        for v in &factors {
            s = s.add_scaled(&SymTensor::rank_one(&v[..d], n).unwrap(), 1.0).unwrap();
        }
        let keys: Vec<OccupationVector> = s.keys().to_vec();
        for (idx, w) in &dicke {
            let a = &keys[idx % keys.len()];
            s.set(a, s.get(a) + w / a.weight()).unwrap();
        }
        if is_mom(&s, l, 1e-9).unwrap().is_member() && structured_sos_level(&t, l, &ctx).unwrap().is_sos() {
            prop_assert!(s.euclid_inner(&t).unwrap() >= -1e-6);
        }
    }
}
