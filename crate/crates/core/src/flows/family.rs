//! 1-parameter groups of bisections `λ ↦ b_λ` generated by a module element.

use crate::geometry::SingularSubalgebroid;
use crate::poly::FreeModuleElem;

use super::exp::ExpMap;
use super::groupoid::GroupoidElement;
use super::ode::FlowConfig;
use super::FlowError;

/// Open box `∏ (loᵢ, hiᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Domain { lo, hi }
    }

    /// `(−r, r)ⁿ`
    pub fn cube(n: usize, r: f64) -> Self {
        Domain { lo: vec![-r; n], hi: vec![r; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| l < v && v < h)
    }
}

/// `b_λ(x) = exp_x(λα)` for `x ∈ V`, the unit outside `V` (the smooth cutoff is not modelled).
#[derive(Clone, Debug)]
pub struct BisectionFamily {
    generator: FreeModuleElem,
    exp: ExpMap,
    domain: Domain,
    interval: (f64, f64),
    cfg: FlowConfig,
}

/// Build the family of `α ∈ ℬ` on the box `V`; fails unless `α` is a member.
pub fn one_parameter_group(
    b: &SingularSubalgebroid,
    alpha: &FreeModuleElem,
    domain: Domain,
    cfg: FlowConfig,
) -> Result<BisectionFamily, FlowError> {
    if domain.dim() != b.base_dim() {
        return Err(FlowError::DimensionMismatch { expected: b.base_dim(), found: domain.dim() });
    }
    if !b.contains(alpha)? {
        return Err(FlowError::NotMember);
    }
    let exp = ExpMap::new(b.ambient(), std::slice::from_ref(alpha))?;
    Ok(BisectionFamily { generator: alpha.clone(), exp, domain, interval: (-1.0, 1.0), cfg })
}

impl BisectionFamily {
    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.interval = (lo, hi);
        self
    }

    pub fn generator(&self) -> &FreeModuleElem {
        &self.generator
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn config(&self) -> &FlowConfig {
        &self.cfg
    }

    pub fn unit(&self, x: &[f64]) -> GroupoidElement {
        self.exp.unit(x)
    }

    pub fn evaluate(&self, lambda: f64, x: &[f64]) -> Result<GroupoidElement, FlowError> {
        if !self.domain.contains(x) {
            if x.len() != self.domain.dim() {
                return Err(FlowError::DimensionMismatch { expected: self.domain.dim(), found: x.len() });
            }
            return Ok(self.exp.unit(x));
        }
        self.exp.exp(&[lambda], x, &self.cfg)
    }

    /// `(b₂ ∗ b₁)(x) = b₂(t(b₁(x))) · b₁(x)` with `b₂ = b_λ`, `b₁ = b_μ`.
    pub fn product(&self, lambda: f64, mu: f64, x: &[f64], tol: f64) -> Result<GroupoidElement, FlowError> {
        let first = self.evaluate(mu, x)?;
        let second = self.evaluate(lambda, &first.target())?;
        second.compose(&first, tol)
    }

    /// Velocity `d/dλ|₀ b_λ(x)` in frame coordinates by central differences.
    pub fn derivative(&self, x: &[f64], h: f64) -> Result<Vec<f64>, FlowError> {
        let plus = self.evaluate(h, x)?;
        let minus = self.evaluate(-h, x)?;
        Ok(self.exp.frame_velocity(&plus, &minus, h))
    }

    /// Smallest `λ ∈ (0, λ_max]` with `b_λ(x)` the unit within `tol`, if any:
    /// a coarse scan for local minima of the distance to the unit, then golden-section refinement.
    pub fn first_return(&self, x: &[f64], lambda_max: f64, step: f64, tol: f64) -> Result<Option<f64>, FlowError> {
        let dist = |l: f64| -> Result<f64, FlowError> { Ok(self.evaluate(l, x)?.distance_to_unit()) };
        let n = (lambda_max / step).ceil() as usize;
        let mut prev = 0.0;
        let mut cur = dist(step)?;
        for i in 1..n {
            let next = dist((i + 1) as f64 * step)?;
            if cur < prev && cur <= next {
                let l = golden_min(&dist, (i - 1) as f64 * step, (i + 1) as f64 * step, 1e-13)?;
                if dist(l)? <= tol {
                    return Ok(Some(l));
                }
            }
            prev = cur;
            cur = next;
        }
        Ok(None)
    }
}

/// Minimizer of a unimodal function on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> Result<f64, FlowError>>(f: &F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64, FlowError> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    // the bracket cannot shrink below the float spacing at its endpoints
    while (b - a).abs() > xtol.max(4.0 * f64::EPSILON * (a.abs() + b.abs())) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / 2.0)
}
