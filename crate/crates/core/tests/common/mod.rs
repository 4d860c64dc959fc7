#![allow(dead_code)]

use std::path::PathBuf;

use folia_core::geometry::{parse, SingularSubalgebroid};
use folia_core::poly::{FreeModuleElem, Monomial, Poly, Rational};
use proptest::prelude::*;
use rand::Rng;

pub const SHIPPED: [&str; 10] = [
    "rotation",
    "vanish_origin",
    "square",
    "linear",
    "translation",
    "hypersurface",
    "codim2",
    "noninv",
    "so3_action",
    "so2_in_so3",
];

pub fn module_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../modules").join(format!("{name}.sfo"))
}

pub fn load(name: &str) -> SingularSubalgebroid {
    let src = std::fs::read_to_string(module_path(name)).unwrap();
    parse(&src).unwrap()
}

pub fn r(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

pub fn poly_from(nvars: usize, terms: &[(Vec<u32>, i64, i64)]) -> Poly {
    Poly::from_terms(nvars, terms.iter().map(|(e, p, q)| (Monomial::from_exponents(e.clone()), r(*p, *q))))
}

/// Polynomials in `nvars` variables with up to `terms` terms of degree ≤ `deg`.
pub fn poly_strategy(nvars: usize, deg: u32, terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=deg, nvars), -5i64..=5, 1i64..=3), 0..=terms).prop_map(move |ts| {
        let ts: Vec<(Vec<u32>, i64, i64)> =
            ts.into_iter().filter(|(e, _, _)| e.iter().sum::<u32>() <= deg).collect();
        poly_from(nvars, &ts)
    })
}

pub fn elem_strategy(nvars: usize, rank: usize, deg: u32, terms: usize) -> impl Strategy<Value = FreeModuleElem> {
    prop::collection::vec(poly_strategy(nvars, deg, terms), rank).prop_map(move |cs| FreeModuleElem::new(nvars, cs))
}

pub fn random_point(n: usize, rng: &mut impl Rng) -> Vec<Rational> {
    (0..n).map(|_| r(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect()
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}
