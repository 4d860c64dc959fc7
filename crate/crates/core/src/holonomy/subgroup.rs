//! Integration of matrix Lie subalgebras `𝔨 ⊂ 𝔤` with kernel detection for
//! `Φ: H(𝔨) → G`.

use nalgebra::DMatrix;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::flows::{golden_min, matrix_exp, to_dmatrix, FlowError};
use crate::geometry::AmbientAlgebroid;
use crate::linalg;
use crate::poly::{rational_to_f64, Rational};

use super::HolonomyError;

#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupConfig {
    pub lambda_max: f64,
    pub step: f64,
    /// `exp(λv)` counts as the identity within this sup-norm distance.
    pub kernel_tol: f64,
    /// Tolerance of the numerical closure check for float bases.
    pub closure_tol: f64,
    pub seed: u64,
}

impl Default for SubgroupConfig {
    fn default() -> Self {
        SubgroupConfig { lambda_max: 20.0, step: 1e-3, kernel_tol: 1e-9, closure_tol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelElement {
    /// Index of the basis direction `v`.
    pub direction: usize,
    /// Smallest `λ > 0` with `exp(λv) = I` within tolerance.
    pub lambda: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Closure {
    /// A 1-parameter direction returns to the identity.
    Compact,
    /// Near-returns to the identity keep improving but never close up.
    NotClosed,
    /// No recurrence observed.
    NoRecurrence,
}

impl Closure {
    pub fn describe(&self) -> &'static str {
        match self {
            Closure::Compact => "closed (kernel detected)",
            Closure::NotClosed => "not closed (heuristic)",
            Closure::NoRecurrence => "closed (heuristic: no recurrence)",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubgroupReport {
    pub basis: Vec<DMatrix<f64>>,
    pub kernel: Vec<KernelElement>,
    /// Lower bound for the radius on which `exp` restricted to `𝔨` is injective.
    pub injectivity_radius: f64,
    pub closure: Closure,
    /// Best near-return distances found along each direction, in increasing `λ`.
    pub near_returns: Vec<Vec<(f64, f64)>>,
    pub lambda_max: f64,
}

impl SubgroupReport {
    pub fn to_json(&self) -> Value {
        json!({
            "dimension": self.basis.len(),
            "kernel": self.kernel.iter().map(|k| json!({
                "direction": k.direction, "lambda": k.lambda, "distance": k.distance
            })).collect::<Vec<_>>(),
            "injectivity_radius": self.injectivity_radius,
            "closure": self.closure.describe(),
            "lambda_max": self.lambda_max,
        })
    }

    /// Random products `exp(v₁)⋯exp(v_m)` with `vᵢ ∈ 𝔨`, coefficients in `[−r, r]`.
    pub fn sample_products(&self, count: usize, factors: usize, r: f64, seed: u64) -> Vec<DMatrix<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.basis.first().map_or(0, |m| m.nrows());
        (0..count)
            .map(|_| {
                (0..factors).fold(DMatrix::identity(d, d), |acc, _| {
                    let v = self.basis.iter().fold(DMatrix::zeros(d, d), |s, b| s + b * rng.gen_range(-r..r));
                    acc * matrix_exp(&v)
                })
            })
            .collect()
    }
}

fn bracket_coords(c: &[Vec<Vec<Rational>>], u: &[Rational], v: &[Rational]) -> Vec<Rational> {
    let r = c.len();
    let mut out = vec![Rational::zero(); r];
    for a in 0..r {
        for b in 0..r {
            if u[a].is_zero() || v[b].is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += &u[a] * &v[b] * &c[a][b][k];
            }
        }
    }
    out
}

/// Integrate the subalgebra spanned by `basis` (frame coordinates in `𝔤`).
/// Closure under the bracket is checked exactly.
pub fn integrate_lie_subalgebra(
    g: &AmbientAlgebroid,
    basis: &[Vec<Rational>],
    cfg: &SubgroupConfig,
) -> Result<SubgroupReport, HolonomyError> {
    let c = g.structure_constants();
    for (i, u) in basis.iter().enumerate() {
        if u.len() != g.rank() {
            return Err(HolonomyError::ParameterCount { expected: g.rank(), found: u.len() });
        }
        for (j, v) in basis.iter().enumerate().skip(i + 1) {
            let br = bracket_coords(c, u, v);
            if linalg::solve_in_span(basis, &br).is_none() {
                return Err(HolonomyError::NotSubalgebra { i, j, bracket: br.iter().map(rational_to_f64).collect() });
            }
        }
    }
    let fb: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().map(rational_to_f64).collect()).collect();
    integrate_core(g, &fb, cfg)
}

/// As [`integrate_lie_subalgebra`] for a float basis (e.g. irrational
/// directions); closure is checked numerically.
pub fn integrate_lie_subalgebra_f64(
    g: &AmbientAlgebroid,
    basis: &[Vec<f64>],
    cfg: &SubgroupConfig,
) -> Result<SubgroupReport, HolonomyError> {
    let c: Vec<Vec<Vec<f64>>> = g
        .structure_constants()
        .iter()
        .map(|m| m.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect())
        .collect();
    let r = g.rank();
    let bm = DMatrix::from_fn(r, basis.len(), |i, j| basis[j][i]);
    let svd = bm.clone().svd(true, true);
    for i in 0..basis.len() {
        if basis[i].len() != r {
            return Err(HolonomyError::ParameterCount { expected: r, found: basis[i].len() });
        }
        for j in i + 1..basis.len() {
            let mut br = vec![0.0; r];
            for a in 0..r {
                for b in 0..r {
                    for (k, o) in br.iter_mut().enumerate() {
                        *o += basis[i][a] * basis[j][b] * c[a][b][k];
                    }
                }
            }
            let rhs = nalgebra::DVector::from_vec(br.clone());
            let coeffs = svd.solve(&rhs, 1e-12).map_err(|_| HolonomyError::NotSubalgebra { i, j, bracket: br.clone() })?;
            let resid = (&bm * coeffs - &rhs).amax();
            if resid > cfg.closure_tol {
                return Err(HolonomyError::NotSubalgebra { i, j, bracket: br });
            }
        }
    }
    integrate_core(g, basis, cfg)
}

fn integrate_core(g: &AmbientAlgebroid, basis: &[Vec<f64>], cfg: &SubgroupConfig) -> Result<SubgroupReport, HolonomyError> {
    let mats: Vec<DMatrix<f64>> = g.matrices().iter().map(|m| to_dmatrix(m)).collect();
    let d = mats.first().map_or(0, |m| m.nrows());
    let vs: Vec<DMatrix<f64>> = basis
        .iter()
        .map(|v| v.iter().zip(&mats).fold(DMatrix::zeros(d, d), |acc, (c, m)| acc + m * *c))
        .collect();
    let id = DMatrix::<f64>::identity(d, d);
    let dist = |m: &DMatrix<f64>| (m - &id).amax();

    let mut kernel = Vec::new();
    let mut near_returns = Vec::new();
    let mut radius = f64::INFINITY;
    let mut recurrent = false;
    for (dir, v) in vs.iter().enumerate() {
        let scale = v.amax().max(1e-300);
        let step_mat = matrix_exp(&(v * cfg.step));
        let n = (cfg.lambda_max / cfg.step).ceil() as usize;
        let mut m = step_mat.clone();
        let (mut prev, mut cur) = (0.0, dist(&m));
        let mut records: Vec<(f64, f64)> = Vec::new();
        let mut found = None;
        for i in 1..n {
            let next_m = &m * &step_mat;
            let next = dist(&next_m);
            if cur < prev && cur <= next && cur < 0.5 {
                let lam = i as f64 * cfg.step;
                if records.last().is_none_or(|&(_, d)| cur < d) {
                    records.push((lam, cur));
                }
                if cur <= 10.0 * cfg.step * scale {
                    let f = |l: f64| -> Result<f64, FlowError> { Ok(dist(&matrix_exp(&(v * l)))) };
                    let l = golden_min(&f, lam - cfg.step, lam + cfg.step, 1e-14)?;
                    let dl = f(l)?;
                    if dl <= cfg.kernel_tol {
                        found = Some(KernelElement { direction: dir, lambda: l, distance: dl });
                        break;
                    }
                }
            }
            prev = cur;
            cur = next;
            m = next_m;
        }
        match found {
            Some(k) => {
                radius = radius.min(k.lambda / 2.0);
                kernel.push(k);
            }
            None => {
                radius = radius.min(cfg.lambda_max / 2.0);
                recurrent |= records.len() >= 2;
            }
        }
        near_returns.push(records);
    }
    let closure = if !kernel.is_empty() && kernel.len() == vs.len() {
        Closure::Compact
    } else if recurrent {
        Closure::NotClosed
    } else if !kernel.is_empty() {
        Closure::Compact
    } else {
        Closure::NoRecurrence
    };
    if vs.is_empty() {
        radius = 0.0;
    }
    Ok(SubgroupReport { basis: vs, kernel, injectivity_radius: radius, closure, near_returns, lambda_max: cfg.lambda_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use std::f64::consts::PI;

    #[test]
    fn rotations_about_z() {
        let g = AmbientAlgebroid::named_lie_algebra("so3").unwrap();
        let r = integrate_lie_subalgebra(&g, &[vec![rat(0, 1), rat(0, 1), rat(1, 1)]], &SubgroupConfig::default()).unwrap();
        assert_eq!(r.kernel.len(), 1);
        assert!((r.kernel[0].lambda - 2.0 * PI).abs() < 1e-9, "{}", r.kernel[0].lambda);
        assert!(r.injectivity_radius >= PI - 1e-2);
        assert_eq!(r.closure, Closure::Compact);
        for m in r.sample_products(20, 3, 2.0, 1) {
            assert!((m[(2, 2)] - 1.0).abs() < 1e-9 && m[(0, 2)].abs() < 1e-9 && m[(1, 2)].abs() < 1e-9);
        }
    }

    #[test]
    fn su2_diagonal() {
        let g = AmbientAlgebroid::named_lie_algebra("su2").unwrap();
        let r = integrate_lie_subalgebra(&g, &[vec![rat(1, 1), rat(0, 1), rat(0, 1)]], &SubgroupConfig::default()).unwrap();
        assert!((r.kernel[0].lambda - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn non_subalgebra_is_refused() {
        let g = AmbientAlgebroid::named_lie_algebra("so3").unwrap();
        let basis = vec![vec![rat(1, 1), rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1), rat(0, 1)]];
        assert!(matches!(
            integrate_lie_subalgebra(&g, &basis, &SubgroupConfig::default()),
            Err(HolonomyError::NotSubalgebra { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn irrational_torus_line() {
        let g = AmbientAlgebroid::named_lie_algebra("t2").unwrap();
        let cfg = SubgroupConfig { lambda_max: 200.0, ..SubgroupConfig::default() };
        let r = integrate_lie_subalgebra_f64(&g, &[vec![1.0, 2f64.sqrt()]], &cfg).unwrap();
        assert!(r.kernel.is_empty());
        assert_eq!(r.closure, Closure::NotClosed);
    }

    #[test]
    fn real_diagonal_has_no_recurrence() {
        let g = AmbientAlgebroid::named_lie_algebra("gl2").unwrap();
        let r = integrate_lie_subalgebra(&g, &[vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(2, 1)]], &SubgroupConfig::default()).unwrap();
        assert!(r.kernel.is_empty());
        assert_eq!(r.closure, Closure::NoRecurrence);
    }
}
