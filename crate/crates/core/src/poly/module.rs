use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::{AlgebraError, Monomial, Poly, Rational};

/// Section of a trivial bundle in a fixed frame: a vector of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeModuleElem {
    nvars: usize,
    comps: Vec<Poly>,
}

/// Leading term of a module element under position-over-term order.
/// Lower positions are larger; ties are broken by grevlex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleTerm<'a> {
    pub pos: usize,
    pub mono: &'a Monomial,
    pub coeff: &'a Rational,
}

impl FreeModuleElem {
    pub fn new(nvars: usize, comps: Vec<Poly>) -> Self {
        assert!(comps.iter().all(|p| p.nvars() == nvars), "component variable count mismatch");
        FreeModuleElem { nvars, comps }
    }

    pub fn zero(nvars: usize, rank: usize) -> Self {
        FreeModuleElem { nvars, comps: vec![Poly::zero(nvars); rank] }
    }

    /// The `i`-th frame element.
    pub fn basis(nvars: usize, rank: usize, i: usize) -> Self {
        let mut e = Self::zero(nvars, rank);
        e.comps[i] = Poly::one(nvars);
        e
    }

    pub fn from_constants(nvars: usize, values: &[Rational]) -> Self {
        FreeModuleElem {
            nvars,
            comps: values.iter().map(|c| Poly::constant(nvars, c.clone())).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn into_components(self) -> Vec<Poly> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.comps.iter().map(Poly::total_degree).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<ModuleTerm<'_>> {
        self.comps.iter().enumerate().find_map(|(pos, p)| {
            p.leading_term().map(|(mono, coeff)| ModuleTerm { pos, mono, coeff })
        })
    }

    pub fn scale_poly(&self, f: &Poly) -> Self {
        FreeModuleElem { nvars: self.nvars, comps: self.comps.iter().map(|c| c * f).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FreeModuleElem { nvars: self.nvars, comps: self.comps.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Self {
        FreeModuleElem { nvars: self.nvars, comps: self.comps.iter().map(|p| p.mul_term(m, c)).collect() }
    }

    /// `self += c * m * other`
    pub fn add_scaled_shifted(&mut self, c: &Rational, m: &Monomial, other: &FreeModuleElem) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_scaled_shifted(c, m, b);
        }
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
        if point.len() != self.nvars {
            return Err(AlgebraError::DimensionMismatch { expected: self.nvars, found: point.len() });
        }
        Ok(self.comps.iter().map(|p| p.eval(point)).collect())
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval_f64(point)).collect()
    }

    /// `Σ coeffs[i] * elems[i]`
    pub fn combination(nvars: usize, rank: usize, coeffs: &[Poly], elems: &[FreeModuleElem]) -> Self {
        let mut out = Self::zero(nvars, rank);
        for (c, e) in coeffs.iter().zip(elems) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.comps.iter_mut().zip(&e.comps) {
                *o = &*o + &(c * p);
            }
        }
        out
    }

    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        FreeModuleElem { nvars, comps: self.comps.iter().map(|p| p.embed(nvars, offset)).collect() }
    }

    /// Pad with zero components up to `rank`.
    pub fn pad(&self, rank: usize) -> Self {
        let mut comps = self.comps.clone();
        comps.resize(rank, Poly::zero(self.nvars));
        FreeModuleElem { nvars: self.nvars, comps }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let inner: Vec<String> = self.comps.iter().map(|p| p.display_with(names)).collect();
        format!("({})", inner.join(", "))
    }
}

/// Compare two module terms under position-over-term order.
pub fn cmp_module_terms(a: (usize, &Monomial), b: (usize, &Monomial)) -> Ordering {
    b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

impl fmt::Debug for FreeModuleElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&Poly::default_names(self.nvars)))
    }
}

impl<'a> Add<&'a FreeModuleElem> for &'a FreeModuleElem {
    type Output = FreeModuleElem;
    fn add(self, rhs: &FreeModuleElem) -> FreeModuleElem {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        FreeModuleElem {
            nvars: self.nvars,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a FreeModuleElem> for &'a FreeModuleElem {
    type Output = FreeModuleElem;
    fn sub(self, rhs: &FreeModuleElem) -> FreeModuleElem {
        assert_eq!(self.rank(), rhs.rank(), "rank mismatch");
        FreeModuleElem {
            nvars: self.nvars,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &FreeModuleElem {
    type Output = FreeModuleElem;
    fn neg(self) -> FreeModuleElem {
        FreeModuleElem { nvars: self.nvars, comps: self.comps.iter().map(|p| -p).collect() }
    }
}

/// Exact dot product `Σ a_i b_i` of two coefficient vectors.
pub fn dot(a: &[Poly], b: &[Poly]) -> Poly {
    let nvars = a.first().or(b.first()).map(Poly::nvars).unwrap_or(0);
    a.iter().zip(b).fold(Poly::zero(nvars), |acc, (x, y)| &acc + &(x * y))
}

pub(crate) fn is_zero_vec(v: &[Poly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

pub(crate) fn zero_vec(nvars: usize, len: usize) -> Vec<Poly> {
    vec![Poly::zero(nvars); len]
}

pub(crate) fn unit_vec(nvars: usize, len: usize, i: usize) -> Vec<Poly> {
    let mut v = zero_vec(nvars, len);
    v[i] = Poly::one(nvars);
    v
}
