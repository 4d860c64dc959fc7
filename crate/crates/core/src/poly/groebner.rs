//! Gröbner bases of submodules of free modules over `ℚ[x₁,…,xₙ]`.
//!
//! Buchberger's algorithm runs under position-over-term order with grevlex on
//! monomials. Every intermediate vector carries a tag expressing it in the
//! original generators, so one pass yields the lift matrix, and every
//! S-vector that reduces to zero yields a syzygy (Schreyer). The raw syzygies
//! are then replaced by the reduced Gröbner basis of the module they span.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num::One;

use super::module::{is_zero_vec, unit_vec, zero_vec};
use super::{AlgebraError, FreeModuleElem, Monomial, Poly, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerConfig {
    /// Buchberger aborts when an S-pair lcm exceeds this total degree.
    pub max_degree: u32,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig { max_degree: 40 }
    }
}

#[derive(Clone, Debug)]
struct Tagged {
    elem: FreeModuleElem,
    tag: Vec<Poly>,
}

#[derive(Clone, Debug)]
struct Lead {
    pos: usize,
    mono: Monomial,
    coeff: Rational,
}

fn lead_of(e: &FreeModuleElem) -> Option<Lead> {
    e.leading_term().map(|t| Lead { pos: t.pos, mono: t.mono.clone(), coeff: t.coeff.clone() })
}

fn add_scaled_tag(acc: &mut [Poly], c: &Rational, m: &Monomial, tag: &[Poly]) {
    for (a, t) in acc.iter_mut().zip(tag) {
        a.add_scaled_shifted(c, m, t);
    }
}

/// Divide `p` by `basis`. Returns the remainder and `Σ qⱼ·tagⱼ` where `qⱼ`
/// are the quotients, so that `p = Σ qⱼ·basisⱼ + remainder`.
///
/// With `full == false` only leading terms are reduced and the partially
/// reduced vector is returned as soon as its leading term is irreducible.
fn reduce(p: &FreeModuleElem, basis: &[Tagged], leads: &[Lead], tag_len: usize, full: bool) -> (FreeModuleElem, Vec<Poly>) {
    let nvars = p.nvars();
    let mut p = p.clone();
    let mut acc = zero_vec(nvars, tag_len);
    let mut rem_comps = zero_vec(nvars, p.rank());
    while let Some(lt) = lead_of(&p) {
        let hit = leads.iter().position(|l| l.pos == lt.pos && l.mono.divides(&lt.mono));
        match hit {
            Some(j) => {
                let q = lt.mono.div(&leads[j].mono);
                let c = &lt.coeff / &leads[j].coeff;
                p.add_scaled_shifted(&-c.clone(), &q, &basis[j].elem);
                if tag_len > 0 {
                    add_scaled_tag(&mut acc, &c, &q, &basis[j].tag);
                }
            }
            None if full => {
                let mut comps = p.into_components();
                comps[lt.pos].add_term(lt.mono.clone(), -lt.coeff.clone());
                rem_comps[lt.pos].add_term(lt.mono, lt.coeff);
                p = FreeModuleElem::new(nvars, comps);
            }
            None => {
                return (p, acc);
            }
        }
    }
    (FreeModuleElem::new(nvars, rem_comps), acc)
}

fn sub_vec(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Buchberger with tags. Returns a (non-reduced) Gröbner basis and, when
/// tags are tracked, a generating set of the syzygies of the inputs.
fn buchberger(
    inputs: Vec<Tagged>,
    tag_len: usize,
    cfg: &GroebnerConfig,
) -> Result<(Vec<Tagged>, Vec<Vec<Poly>>), AlgebraError> {
    let mut basis: Vec<Tagged> = Vec::new();
    let mut leads: Vec<Lead> = Vec::new();
    let mut syz = Vec::new();
    let mut pairs: BinaryHeap<Reverse<(u32, usize, usize)>> = BinaryHeap::new();

    let push = |t: Tagged, basis: &mut Vec<Tagged>, leads: &mut Vec<Lead>, pairs: &mut BinaryHeap<Reverse<(u32, usize, usize)>>| {
        let lead = lead_of(&t.elem).expect("nonzero element");
        let j = basis.len();
        for (i, l) in leads.iter().enumerate() {
            if l.pos == lead.pos {
                pairs.push(Reverse((l.mono.lcm(&lead.mono).degree(), i, j)));
            }
        }
        basis.push(t);
        leads.push(lead);
    };

    for t in inputs {
        if t.elem.is_zero() {
            if tag_len > 0 {
                syz.push(t.tag);
            }
            continue;
        }
        push(t, &mut basis, &mut leads, &mut pairs);
    }

    while let Some(Reverse((deg, i, j))) = pairs.pop() {
        if deg > cfg.max_degree {
            return Err(AlgebraError::DegreeBound { degree: deg, bound: cfg.max_degree });
        }
        let (li, lj) = (&leads[i], &leads[j]);
        let l = li.mono.lcm(&lj.mono);
        let (mi, mj) = (l.div(&li.mono), l.div(&lj.mono));
        let (ci, cj) = (Rational::one() / &li.coeff, Rational::one() / &lj.coeff);
        let nvars = basis[i].elem.nvars();
        let rank = basis[i].elem.rank();
        let mut s = FreeModuleElem::zero(nvars, rank);
        s.add_scaled_shifted(&ci, &mi, &basis[i].elem);
        s.add_scaled_shifted(&-cj.clone(), &mj, &basis[j].elem);
        let mut stag = zero_vec(nvars, tag_len);
        if tag_len > 0 {
            add_scaled_tag(&mut stag, &ci, &mi, &basis[i].tag);
            add_scaled_tag(&mut stag, &-cj, &mj, &basis[j].tag);
        }
        let (rem, acc) = reduce(&s, &basis, &leads, tag_len, false);
        let tag = sub_vec(&stag, &acc);
        if rem.is_zero() {
            if tag_len > 0 && !is_zero_vec(&tag) {
                syz.push(tag);
            }
        } else {
            let d = rem.total_degree();
            if d > cfg.max_degree {
                return Err(AlgebraError::DegreeBound { degree: d, bound: cfg.max_degree });
            }
            push(Tagged { elem: rem, tag }, &mut basis, &mut leads, &mut pairs);
        }
    }
    Ok((basis, syz))
}

/// Turn a Gröbner basis into the reduced one: minimal leading terms,
/// fully reduced tails, monic, sorted by decreasing leading term.
fn reduce_basis(basis: Vec<Tagged>, tag_len: usize) -> Vec<Tagged> {
    let leads: Vec<Lead> = basis.iter().map(|t| lead_of(&t.elem).unwrap()).collect();
    let mut keep = Vec::new();
    for (i, li) in leads.iter().enumerate() {
        let redundant = leads.iter().enumerate().any(|(j, lj)| {
            j != i && lj.pos == li.pos && lj.mono.divides(&li.mono) && (lj.mono != li.mono || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let mut min: Vec<Tagged> = keep.iter().map(|&i| basis[i].clone()).collect();
    for i in 0..min.len() {
        let others: Vec<Tagged> = min.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t.clone()).collect();
        let other_leads: Vec<Lead> = others.iter().map(|t| lead_of(&t.elem).unwrap()).collect();
        let (rem, acc) = reduce(&min[i].elem, &others, &other_leads, tag_len, true);
        let tag = sub_vec(&min[i].tag, &acc);
        let lc = lead_of(&rem).unwrap().coeff;
        let inv = Rational::one() / lc;
        min[i] = Tagged { elem: rem.scale(&inv), tag: tag.iter().map(|p| p.scale(&inv)).collect() };
    }
    min.sort_by(|a, b| {
        let la = a.elem.leading_term().unwrap();
        let lb = b.elem.leading_term().unwrap();
        super::module::cmp_module_terms((lb.pos, lb.mono), (la.pos, la.mono))
    });
    min
}

/// Reduced Gröbner basis of the module generated by `gens` (no tags).
pub fn reduced_groebner(gens: &[FreeModuleElem], cfg: &GroebnerConfig) -> Result<Vec<FreeModuleElem>, AlgebraError> {
    let inputs = gens.iter().map(|g| Tagged { elem: g.clone(), tag: Vec::new() }).collect();
    let (basis, _) = buchberger(inputs, 0, cfg)?;
    Ok(reduce_basis(basis, 0).into_iter().map(|t| t.elem).collect())
}

/// A finitely generated submodule of `ℚ[x]^r` with its reduced Gröbner basis,
/// the lift of that basis to the generators, and generating syzygies.
#[derive(Clone, Debug)]
pub struct SubmoduleData {
    nvars: usize,
    rank: usize,
    generators: Vec<FreeModuleElem>,
    groebner: Vec<FreeModuleElem>,
    lift: Vec<Vec<Poly>>,
    syzygies: Vec<Vec<Poly>>,
}

impl SubmoduleData {
    pub fn new(nvars: usize, rank: usize, generators: Vec<FreeModuleElem>, cfg: &GroebnerConfig) -> Result<Self, AlgebraError> {
        for g in &generators {
            if g.rank() != rank {
                return Err(AlgebraError::RankMismatch { expected: rank, found: g.rank() });
            }
            if g.nvars() != nvars {
                return Err(AlgebraError::DimensionMismatch { expected: nvars, found: g.nvars() });
            }
        }
        let k = generators.len();
        let inputs = generators
            .iter()
            .enumerate()
            .map(|(i, g)| Tagged { elem: g.clone(), tag: unit_vec(nvars, k, i) })
            .collect();
        let (basis, raw_syz) = buchberger(inputs, k, cfg)?;
        let reduced = reduce_basis(basis, k);
        let (groebner, lift) = reduced.into_iter().map(|t| (t.elem, t.tag)).unzip();
        let syzygies = if raw_syz.is_empty() {
            Vec::new()
        } else {
            let as_elems: Vec<FreeModuleElem> = raw_syz.into_iter().map(|s| FreeModuleElem::new(nvars, s)).collect();
            reduced_groebner(&as_elems, cfg)?.into_iter().map(FreeModuleElem::into_components).collect()
        };
        Ok(SubmoduleData { nvars, rank, generators, groebner, lift, syzygies })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[FreeModuleElem] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn groebner(&self) -> &[FreeModuleElem] {
        &self.groebner
    }

    /// `lift()[j]` expresses `groebner()[j]` in the generators.
    pub fn lift(&self) -> &[Vec<Poly>] {
        &self.lift
    }

    pub fn syzygies(&self) -> &[Vec<Poly>] {
        &self.syzygies
    }

    /// Division by the reduced Gröbner basis. Returns `(remainder, certificate)`
    /// with `e = Σ certificateᵢ·generatorᵢ + remainder`; the remainder is zero
    /// exactly when `e` lies in the module.
    pub fn normal_form(&self, e: &FreeModuleElem) -> Result<(FreeModuleElem, Vec<Poly>), AlgebraError> {
        if e.rank() != self.rank {
            return Err(AlgebraError::RankMismatch { expected: self.rank, found: e.rank() });
        }
        if e.nvars() != self.nvars {
            return Err(AlgebraError::DimensionMismatch { expected: self.nvars, found: e.nvars() });
        }
        let basis: Vec<Tagged> = self
            .groebner
            .iter()
            .zip(&self.lift)
            .map(|(g, l)| Tagged { elem: g.clone(), tag: l.clone() })
            .collect();
        let leads: Vec<Lead> = basis.iter().map(|t| lead_of(&t.elem).unwrap()).collect();
        let k = self.generators.len();
        let (rem, cert) = reduce(e, &basis, &leads, k, true);
        let cert = if k == 0 { Vec::new() } else { cert };
        Ok((rem, cert))
    }

    pub fn contains(&self, e: &FreeModuleElem) -> Result<bool, AlgebraError> {
        Ok(self.normal_form(e)?.0.is_zero())
    }

    /// Same module, compared through reduced Gröbner bases.
    pub fn same_module(&self, other: &SubmoduleData) -> bool {
        self.rank == other.rank && self.nvars == other.nvars && self.groebner == other.groebner
    }

    /// `Σ coeffs[i]·generators[i]`
    pub fn combine(&self, coeffs: &[Poly]) -> FreeModuleElem {
        FreeModuleElem::combination(self.nvars, self.rank, coeffs, &self.generators)
    }
}

/// Generating set of the syzygy module of `gens`, as coefficient vectors.
pub fn syzygies(gens: &[FreeModuleElem], cfg: &GroebnerConfig) -> Result<Vec<Vec<Poly>>, AlgebraError> {
    let first = gens.first().ok_or(AlgebraError::EmptyGenerators)?;
    let data = SubmoduleData::new(first.nvars(), first.rank(), gens.to_vec(), cfg)?;
    Ok(data.syzygies)
}
