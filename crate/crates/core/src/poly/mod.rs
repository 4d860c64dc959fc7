//! Exact polynomial arithmetic and Gröbner machinery for submodules of free modules.

mod groebner;
mod module;
mod monomial;
mod polynomial;

pub use groebner::{reduced_groebner, syzygies, GroebnerConfig, SubmoduleData};
pub use module::{cmp_module_terms, dot, FreeModuleElem, ModuleTerm};
pub use monomial::Monomial;
pub use polynomial::Poly;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Buchberger reached total degree {degree} above the bound {bound}")]
    DegreeBound { degree: u32, bound: u32 },
    #[error("empty generator list")]
    EmptyGenerators,
}

/// `p/q` as a rational.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `p`, `p/q` or a finite decimal such as `-1.25` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac).parse().ok()?;
        let den = num::pow(BigInt::from(10), frac.len());
        let r = Rational::new(digits, den);
        return Some(if neg { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Canonical text form: `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Exact rational equal to the given finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
