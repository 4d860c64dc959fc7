use num::{One, Zero};

use crate::linalg;
use crate::poly::{FreeModuleElem, Poly, Rational};

use super::GeometryError;

/// Square matrix over ℚ, row-major.
pub type RatMatrix = Vec<Vec<Rational>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmbientKind {
    /// `TM` for `M = ℝⁿ`; integrated by the pair groupoid.
    Tangent,
    /// Action algebroid `𝔤 ⋉ ℝᵈ` of a linear action; integrated by `G ⋉ ℝᵈ`.
    LinearAction { name: String },
    /// A Lie algebra over a point; integrated by a matrix group.
    LieAlgebra { name: String },
}

/// A Lie algebroid on `ℝⁿ` with a global frame `e₁,…,e_r`.
///
/// The bracket on frame elements is `[e_i, e_j] = Σ_k c[i][j][k] e_k` and
/// the anchor sends `e_a` to a polynomial vector field. For linear actions
/// the anchor is `ρ(e_a)(x) = A_a·x`; since `A ↦ (x ↦ A·x)` reverses
/// commutators, the frame bracket is then the negated matrix commutator so
/// that the anchor is a morphism of brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbientAlgebroid {
    kind: AmbientKind,
    base_dim: usize,
    rank: usize,
    matrices: Vec<RatMatrix>,
    structure: Vec<Vec<Vec<Rational>>>,
    anchor: Vec<Vec<Poly>>,
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let m = b.first().map(Vec::len).unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| a[i].iter().zip(b).map(|(x, row)| x * &row[j]).sum())
                .collect()
        })
        .collect()
}

pub fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    ab.iter().zip(&ba).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

fn flatten(m: &RatMatrix) -> Vec<Rational> {
    m.iter().flatten().cloned().collect()
}

fn int_matrix(rows: &[&[i64]]) -> RatMatrix {
    rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect()).collect()
}

/// Real 4×4 form of a complex 2×2 matrix given as `(re, im)` integer pairs,
/// acting on `ℂ² ≅ ℝ⁴` with coordinates `(Re z₁, Im z₁, Re z₂, Im z₂)`.
fn realify(c: [[(i64, i64); 2]; 2]) -> RatMatrix {
    let mut m = vec![vec![Rational::zero(); 4]; 4];
    for r in 0..2 {
        for s in 0..2 {
            let (a, b) = c[r][s];
            m[2 * r][2 * s] = Rational::from_integer(a.into());
            m[2 * r][2 * s + 1] = Rational::from_integer((-b).into());
            m[2 * r + 1][2 * s] = Rational::from_integer(b.into());
            m[2 * r + 1][2 * s + 1] = Rational::from_integer(a.into());
        }
    }
    m
}

/// Matrix realization of a named Lie algebra.
pub fn named_realization(name: &str) -> Option<Vec<RatMatrix>> {
    Some(match name {
        "so2" => vec![int_matrix(&[&[0, -1], &[1, 0]])],
        "so3" => vec![
            int_matrix(&[&[0, 0, 0], &[0, 0, -1], &[0, 1, 0]]),
            int_matrix(&[&[0, 0, 1], &[0, 0, 0], &[-1, 0, 0]]),
            int_matrix(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 0]]),
        ],
        "su2" => vec![
            realify([[(0, 1), (0, 0)], [(0, 0), (0, -1)]]),
            realify([[(0, 0), (1, 0)], [(-1, 0), (0, 0)]]),
            realify([[(0, 0), (0, 1)], [(0, 1), (0, 0)]]),
        ],
        "gl2" => vec![
            int_matrix(&[&[1, 0], &[0, 0]]),
            int_matrix(&[&[0, 1], &[0, 0]]),
            int_matrix(&[&[0, 0], &[1, 0]]),
            int_matrix(&[&[0, 0], &[0, 1]]),
        ],
        "t2" => vec![
            int_matrix(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]),
            int_matrix(&[&[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]),
        ],
        _ => return None,
    })
}

/// Structure constants `c[i][j][k]` with `sign·[A_i, A_j] = Σ_k c_ijk A_k`.
fn structure_from_matrices(matrices: &[RatMatrix], sign: &Rational) -> Result<Vec<Vec<Vec<Rational>>>, GeometryError> {
    let d = matrices.first().map(Vec::len).unwrap_or(0);
    for m in matrices {
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(GeometryError::InvalidRealization("matrices must be square and of equal size".into()));
        }
    }
    let flat: Vec<Vec<Rational>> = matrices.iter().map(flatten).collect();
    if linalg::rank(&flat) != matrices.len() {
        return Err(GeometryError::InvalidRealization("realization matrices are linearly dependent".into()));
    }
    let r = matrices.len();
    let mut c = vec![vec![vec![Rational::zero(); r]; r]; r];
    for i in 0..r {
        for j in 0..r {
            let br: Vec<Rational> = flatten(&commutator(&matrices[i], &matrices[j])).into_iter().map(|v| v * sign).collect();
            let coeffs = linalg::solve_in_span(&flat, &br).ok_or(GeometryError::NotClosed { i, j })?;
            c[i][j] = coeffs;
        }
    }
    Ok(c)
}

/// Exact Jacobi check on structure constants; returns the first failing triple.
pub fn jacobi_violation(c: &[Vec<Vec<Rational>>]) -> Option<(usize, usize, usize)> {
    let r = c.len();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                // [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]
                for m in 0..r {
                    let mut s = Rational::zero();
                    for l in 0..r {
                        s += &c[i][j][l] * &c[l][k][m];
                        s += &c[j][k][l] * &c[l][i][m];
                        s += &c[k][i][l] * &c[l][j][m];
                    }
                    if !s.is_zero() {
                        return Some((i, j, k));
                    }
                }
            }
        }
    }
    None
}

impl AmbientAlgebroid {
    pub fn tangent(n: usize) -> Self {
        let anchor = (0..n)
            .map(|a| (0..n).map(|i| if i == a { Poly::one(n) } else { Poly::zero(n) }).collect())
            .collect();
        AmbientAlgebroid {
            kind: AmbientKind::Tangent,
            base_dim: n,
            rank: n,
            matrices: Vec::new(),
            structure: vec![vec![vec![Rational::zero(); n]; n]; n],
            anchor,
        }
    }

    pub fn linear_action(name: &str, matrices: Vec<RatMatrix>) -> Result<Self, GeometryError> {
        if matrices.is_empty() {
            return Err(GeometryError::InvalidRealization("no realization matrices".into()));
        }
        let structure = structure_from_matrices(&matrices, &-Rational::one())?;
        let d = matrices[0].len();
        let anchor: Vec<Vec<Poly>> = matrices
            .iter()
            .map(|m| {
                (0..d)
                    .map(|k| {
                        let mut p = Poly::zero(d);
                        for (l, a) in m[k].iter().enumerate() {
                            p = &p + &Poly::var(d, l).scale(a);
                        }
                        p
                    })
                    .collect()
            })
            .collect();
        let amb = AmbientAlgebroid {
            kind: AmbientKind::LinearAction { name: name.to_string() },
            base_dim: d,
            rank: matrices.len(),
            matrices,
            structure,
            anchor,
        };
        amb.validate()?;
        Ok(amb)
    }

    pub fn lie_algebra(name: &str, matrices: Vec<RatMatrix>) -> Result<Self, GeometryError> {
        if matrices.is_empty() {
            return Err(GeometryError::InvalidRealization("no realization matrices".into()));
        }
        let structure = structure_from_matrices(&matrices, &Rational::one())?;
        let r = matrices.len();
        let amb = AmbientAlgebroid {
            kind: AmbientKind::LieAlgebra { name: name.to_string() },
            base_dim: 0,
            rank: r,
            matrices,
            structure,
            anchor: vec![Vec::new(); r],
        };
        amb.validate()?;
        Ok(amb)
    }

    pub fn named_action(name: &str) -> Result<Self, GeometryError> {
        let m = named_realization(name).ok_or_else(|| GeometryError::UnknownAlgebra(name.to_string()))?;
        Self::linear_action(name, m)
    }

    pub fn named_lie_algebra(name: &str) -> Result<Self, GeometryError> {
        let m = named_realization(name).ok_or_else(|| GeometryError::UnknownAlgebra(name.to_string()))?;
        Self::lie_algebra(name, m)
    }

    /// Antisymmetry, Jacobi, and compatibility of anchor and bracket.
    fn validate(&self) -> Result<(), GeometryError> {
        let r = self.rank;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if self.structure[i][j][k] != -self.structure[j][i][k].clone() {
                        return Err(GeometryError::InvalidRealization(format!("structure constants not antisymmetric at ({i},{j})")));
                    }
                }
            }
        }
        if let Some((i, j, k)) = jacobi_violation(&self.structure) {
            return Err(GeometryError::InvalidRealization(format!("Jacobi identity fails on ({i},{j},{k})")));
        }
        let tangent = AmbientAlgebroid::tangent(self.base_dim);
        for i in 0..r {
            for j in 0..r {
                let lhs = tangent.bracket_unchecked(
                    &FreeModuleElem::new(self.base_dim, self.anchor[i].clone()),
                    &FreeModuleElem::new(self.base_dim, self.anchor[j].clone()),
                );
                let mut rhs = FreeModuleElem::zero(self.base_dim, self.base_dim);
                for k in 0..r {
                    rhs = &rhs + &FreeModuleElem::new(self.base_dim, self.anchor[k].clone()).scale(&self.structure[i][j][k]);
                }
                if lhs != rhs {
                    return Err(GeometryError::InvalidRealization(format!("anchor is not a bracket morphism on ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &AmbientKind {
        &self.kind
    }

    /// Dimension `n` of the base `ℝⁿ` (zero for a Lie algebra).
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.matrices
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.structure
    }

    /// Anchor of the frame element `e_a` as a vector field.
    pub fn frame_anchor(&self, a: usize) -> &[Poly] {
        &self.anchor[a]
    }

    pub fn name(&self) -> Option<&str> {
        match &self.kind {
            AmbientKind::Tangent => None,
            AmbientKind::LinearAction { name } | AmbientKind::LieAlgebra { name } => Some(name),
        }
    }

    /// `ρ(α)` as a tangent vector field.
    pub fn anchor(&self, alpha: &FreeModuleElem) -> Result<FreeModuleElem, GeometryError> {
        self.check(alpha)?;
        Ok(FreeModuleElem::new(self.base_dim, self.anchor_unchecked(alpha)))
    }

    fn check(&self, e: &FreeModuleElem) -> Result<(), GeometryError> {
        if e.rank() != self.rank {
            return Err(GeometryError::RankMismatch { expected: self.rank, found: e.rank() });
        }
        if e.nvars() != self.base_dim {
            return Err(GeometryError::DimensionMismatch { expected: self.base_dim, found: e.nvars() });
        }
        Ok(())
    }

    /// Algebroid bracket of two sections:
    /// `[α, β]_k = Σ_{a,b} α_a β_b c_abk + ρ(α)(β_k) − ρ(β)(α_k)`.
    pub fn bracket(&self, a: &FreeModuleElem, b: &FreeModuleElem) -> Result<FreeModuleElem, GeometryError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.bracket_unchecked(a, b))
    }

    fn bracket_unchecked(&self, a: &FreeModuleElem, b: &FreeModuleElem) -> FreeModuleElem {
        let n = self.base_dim;
        let r = self.rank;
        let ra = self.anchor_unchecked(a);
        let rb = self.anchor_unchecked(b);
        let mut out = vec![Poly::zero(n); r];
        for (ia, fa) in a.components().iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (ib, gb) in b.components().iter().enumerate() {
                if gb.is_zero() {
                    continue;
                }
                let prod = fa * gb;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.structure[ia][ib][k];
                    if !c.is_zero() {
                        *o = &*o + &prod.scale(c);
                    }
                }
            }
        }
        for k in 0..r {
            let d1 = derive_along(&ra, b.component(k));
            let d2 = derive_along(&rb, a.component(k));
            out[k] = &(&out[k] + &d1) - &d2;
        }
        FreeModuleElem::new(n, out)
    }

    fn anchor_unchecked(&self, alpha: &FreeModuleElem) -> Vec<Poly> {
        let n = self.base_dim;
        let mut comps = vec![Poly::zero(n); n];
        for (f, a) in alpha.components().iter().zip(&self.anchor) {
            if f.is_zero() {
                continue;
            }
            for (c, v) in comps.iter_mut().zip(a) {
                *c = &*c + &(f * v);
            }
        }
        comps
    }

    /// Symbol for frame element `a`: `d<var>` for the tangent bundle, `e<a+1>` otherwise.
    pub fn frame_symbol(&self, a: usize, vars: &[String]) -> String {
        match self.kind {
            AmbientKind::Tangent => format!("d{}", vars[a]),
            _ => format!("e{}", a + 1),
        }
    }
}

/// `v(f) = Σ vᵢ ∂ᵢ f`
pub fn derive_along(v: &[Poly], f: &Poly) -> Poly {
    let mut acc = Poly::zero(f.nvars());
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        let d = f.derivative(i);
        if !d.is_zero() {
            acc = &acc + &(vi * &d);
        }
    }
    acc
}
