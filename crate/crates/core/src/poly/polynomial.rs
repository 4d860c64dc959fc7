use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, ToPrimitive, Zero};

use super::{Monomial, Rational};

/// Multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map ordered by grevlex, so the leading term is the
/// last entry. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Monomial::var(nvars, i), Rational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        debug_assert_eq!(m.nvars(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant coefficient if the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// Terms in decreasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * m * other`
    pub fn add_scaled_shifted(&mut self, c: &Rational, m: &Monomial, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (om, oc) in &other.terms {
            self.add_term(om.mul(m), c * oc);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[var] -= 1;
            out.add_term(Monomial::from_exponents(exps), c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (x, &e) in point.iter().zip(m.exponents()) {
                    if e > 0 {
                        t *= x.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitute `value` for variable `var`, keeping the variable count.
    pub fn substitute(&self, var: usize, value: &Rational) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.exponents().to_vec();
            let e = std::mem::replace(&mut exps[var], 0);
            out.add_term(Monomial::from_exponents(exps), c * num::pow(value.clone(), e as usize));
        }
        out
    }

    /// Remove variable `var`, which must not occur.
    pub fn drop_var(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            assert_eq!(m.exponents()[var], 0, "dropped variable occurs");
            let mut exps = m.exponents().to_vec();
            exps.remove(var);
            out.add_term(Monomial::from_exponents(exps), c.clone());
        }
        out
    }

    /// Re-embed into `nvars` variables, placing variable `i` at `offset + i`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= nvars);
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            exps[offset..offset + self.nvars].copy_from_slice(m.exponents());
            out.add_term(Monomial::from_exponents(exps), c.clone());
        }
        out
    }

    /// Render with the given variable names, e.g. `x^2*y - 3/2`.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = monomial_string(m, names);
            if mono.is_empty() {
                let _ = write!(s, "{}", a);
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                let _ = write!(s, "{}*{}", a, mono);
            }
        }
        s
    }

    pub(crate) fn default_names(nvars: usize) -> Vec<String> {
        (0..nvars).map(|i| format!("x{}", i + 1)).collect()
    }
}

fn monomial_string(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&Poly::default_names(self.nvars)))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&Poly::default_names(self.nvars)))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn x() -> Poly {
        Poly::var(2, 0)
    }
    fn y() -> Poly {
        Poly::var(2, 1)
    }

    #[test]
    fn arithmetic_and_zero_terms() {
        let p = &x() + &y();
        let q = &x() - &y();
        let prod = &p * &q;
        let expect = &x().pow(2) - &y().pow(2);
        assert_eq!(prod, expect);
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn derivative_and_eval() {
        let p = &x().pow(3).scale(&rat(2, 1)) + &(&x() * &y());
        assert_eq!(p.derivative(0), &x().pow(2).scale(&rat(6, 1)) + &y());
        assert_eq!(p.eval(&[rat(1, 2), rat(3, 1)]), rat(1, 4) + rat(3, 2));
        assert!((p.eval_f64(&[0.5, 3.0]) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn leading_term_is_grevlex_max() {
        let p = &(&x() * &y()) + &y().pow(2);
        let (m, _) = p.leading_term().unwrap();
        // x*y > y^2 in grevlex with x > y
        assert_eq!(m.exponents(), &[1, 1]);
    }

    #[test]
    fn substitute_and_embed() {
        let p = &x().pow(2) + &y();
        let s = p.substitute(0, &rat(2, 1));
        assert_eq!(s, &Poly::constant(2, rat(4, 1)) + &y());
        let e = Poly::var(1, 0).embed(3, 2);
        assert_eq!(e, Poly::var(3, 2));
        assert_eq!(s.drop_var(0), &Poly::constant(1, rat(4, 1)) + &Poly::var(1, 0));
    }

    #[test]
    fn display() {
        let names = vec!["x".to_string(), "y".to_string()];
        let p = &(&x().pow(2).scale(&rat(-3, 2)) + &y()) - &Poly::one(2);
        assert_eq!(p.display_with(&names), "-3/2*x^2 + y - 1");
    }
}
