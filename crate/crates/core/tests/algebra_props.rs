mod common;

use std::collections::BTreeMap;

use common::*;
use folia_core::linalg::nullspace;
use folia_core::poly::{reduced_groebner, syzygies, FreeModuleElem, GroebnerConfig, Monomial, Poly, Rational, SubmoduleData};
use num::Zero;
use proptest::prelude::*;

fn monomials_upto(nvars: usize, deg: u32) -> Vec<Monomial> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| (0..=deg).map(move |d| [e.clone(), vec![d]].concat()))
            .filter(|e| e.iter().sum::<u32>() <= deg)
            .collect();
    }
    out.into_iter().map(Monomial::from_exponents).collect()
}

/// All syzygies `Σ aᵢgᵢ = 0` with `deg aᵢ ≤ deg`, by linear algebra over the coefficients.
fn brute_force_syzygies(gens: &[FreeModuleElem], deg: u32) -> Vec<Vec<Poly>> {
    let nvars = gens[0].nvars();
    let mons = monomials_upto(nvars, deg);
    let one = Rational::from_integer(1.into());
    let mut rows: BTreeMap<(usize, Monomial), Vec<Rational>> = BTreeMap::new();
    let ncols = gens.len() * mons.len();
    for (i, g) in gens.iter().enumerate() {
        for (j, m) in mons.iter().enumerate() {
            let prod = g.mul_term(m, &one);
            for (c, p) in prod.components().iter().enumerate() {
                for (mm, coef) in p.terms() {
                    let row = rows.entry((c, mm.clone())).or_insert_with(|| vec![Rational::zero(); ncols]);
                    row[i * mons.len() + j] = coef.clone();
                }
            }
        }
    }
    let rows: Vec<Vec<Rational>> = rows.into_values().collect();
    nullspace(&rows, ncols)
        .into_iter()
        .map(|v| {
            (0..gens.len())
                .map(|i| Poly::from_terms(nvars, mons.iter().enumerate().map(|(j, m)| (m.clone(), v[i * mons.len() + j].clone()))))
                .collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn ring_axioms(a in poly_strategy(3, 3, 5), b in poly_strategy(3, 3, 5), c in poly_strategy(3, 3, 5)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(3), a.clone());
    }

    #[test]
    fn groebner_is_idempotent(gens in prop::collection::vec(elem_strategy(2, 2, 2, 3), 1..=3)) {
        let cfg = GroebnerConfig::default();
        let g1 = reduced_groebner(&gens, &cfg).unwrap();
        let g2 = reduced_groebner(&g1, &cfg).unwrap();
        prop_assert_eq!(&g1, &g2);
        let mut rev = gens.clone();
        rev.reverse();
        prop_assert_eq!(g1, reduced_groebner(&rev, &cfg).unwrap());
    }

    #[test]
    fn syzygies_are_complete(gens in prop::collection::vec(elem_strategy(2, 1, 2, 3), 2..=3)) {
        prop_assume!(gens.iter().all(|g| !g.is_zero()));
        let cfg = GroebnerConfig::default();
        let syz = syzygies(&gens, &cfg).unwrap();
        let k = gens.len();
        for s in &syz {
            prop_assert!(FreeModuleElem::combination(2, 1, s, &gens).is_zero());
        }
        let brute = brute_force_syzygies(&gens, 3);
        if syz.is_empty() {
            prop_assert!(brute.is_empty());
        } else {
            let module = SubmoduleData::new(2, k, syz.iter().map(|s| FreeModuleElem::new(2, s.clone())).collect(), &cfg).unwrap();
            for s in brute {
                prop_assert!(module.contains(&FreeModuleElem::new(2, s)).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn division_round_trip(
        gens in prop::collection::vec(elem_strategy(2, 2, 2, 3), 1..=3),
        e in elem_strategy(2, 2, 3, 4),
        coeffs in prop::collection::vec(poly_strategy(2, 2, 3), 3),
    ) {
        let m = SubmoduleData::new(2, 2, gens.clone(), &GroebnerConfig::default()).unwrap();
        let (rem, cert) = m.normal_form(&e).unwrap();
        prop_assert_eq!(&m.combine(&cert) + &rem, e);
        let member = m.combine(&coeffs[..gens.len()]);
        let (rem, cert) = m.normal_form(&member).unwrap();
        prop_assert!(rem.is_zero());
        prop_assert_eq!(m.combine(&cert), member);
    }
}
