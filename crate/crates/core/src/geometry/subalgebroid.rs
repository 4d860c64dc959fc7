use crate::poly::{FreeModuleElem, GroebnerConfig, Poly, SubmoduleData};

use super::{AmbientAlgebroid, AmbientKind, GeometryError};

/// Pair of generators whose bracket leaves the module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutivityWitness {
    pub i: usize,
    pub j: usize,
    pub bracket: FreeModuleElem,
    pub remainder: FreeModuleElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Involutivity {
    Unchecked,
    Verified,
    Refuted(InvolutivityWitness),
}

/// Finitely generated submodule of sections of an ambient Lie algebroid.
#[derive(Clone, Debug)]
pub struct SingularSubalgebroid {
    ambient: AmbientAlgebroid,
    vars: Vec<String>,
    module: SubmoduleData,
    involutivity: Involutivity,
    config: GroebnerConfig,
}

impl SingularSubalgebroid {
    pub fn new(
        ambient: AmbientAlgebroid,
        vars: Vec<String>,
        generators: Vec<FreeModuleElem>,
        config: GroebnerConfig,
    ) -> Result<Self, GeometryError> {
        if vars.len() != ambient.base_dim() {
            return Err(GeometryError::DimensionMismatch { expected: ambient.base_dim(), found: vars.len() });
        }
        let module = SubmoduleData::new(ambient.base_dim(), ambient.rank(), generators, &config)?;
        Ok(SingularSubalgebroid { ambient, vars, module, involutivity: Involutivity::Unchecked, config })
    }

    /// Tangent-ambient module with default variable names (`x, y, z`, then `x1, x2, …`).
    pub fn foliation(n: usize, generators: Vec<FreeModuleElem>) -> Result<Self, GeometryError> {
        Self::new(AmbientAlgebroid::tangent(n), default_vars(n), generators, GroebnerConfig::default())
    }

    pub fn ambient(&self) -> &AmbientAlgebroid {
        &self.ambient
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn module(&self) -> &SubmoduleData {
        &self.module
    }

    pub fn generators(&self) -> &[FreeModuleElem] {
        self.module.generators()
    }

    pub fn num_generators(&self) -> usize {
        self.module.num_generators()
    }

    pub fn base_dim(&self) -> usize {
        self.ambient.base_dim()
    }

    pub fn rank(&self) -> usize {
        self.ambient.rank()
    }

    pub fn config(&self) -> &GroebnerConfig {
        &self.config
    }

    pub fn involutivity(&self) -> &Involutivity {
        &self.involutivity
    }

    pub fn contains(&self, e: &FreeModuleElem) -> Result<bool, GeometryError> {
        Ok(self.module.contains(e)?)
    }

    pub fn bracket(&self, a: &FreeModuleElem, b: &FreeModuleElem) -> Result<FreeModuleElem, GeometryError> {
        self.ambient.bracket(a, b)
    }

    /// Exact membership of every pairwise generator bracket.
    pub fn check_involutive(&self) -> Result<Involutivity, GeometryError> {
        let gens = self.generators();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let br = self.ambient.bracket(&gens[i], &gens[j])?;
                let (rem, _) = self.module.normal_form(&br)?;
                if !rem.is_zero() {
                    return Ok(Involutivity::Refuted(InvolutivityWitness { i, j, bracket: br, remainder: rem }));
                }
            }
        }
        Ok(Involutivity::Verified)
    }

    /// Run the involutivity check and record its outcome.
    pub fn checked(mut self) -> Result<Self, GeometryError> {
        self.involutivity = self.check_involutive()?;
        Ok(self)
    }

    /// Recorded verdict, or a fresh check when none was recorded.
    pub fn is_involutive(&self) -> bool {
        match &self.involutivity {
            Involutivity::Verified => true,
            Involutivity::Refuted(_) => false,
            Involutivity::Unchecked => matches!(self.check_involutive(), Ok(Involutivity::Verified)),
        }
    }

    /// Fails unless involutivity has been verified.
    pub fn require_involutive(&self) -> Result<(), GeometryError> {
        match &self.involutivity {
            Involutivity::Verified => Ok(()),
            Involutivity::Unchecked => match self.check_involutive()? {
                Involutivity::Verified => Ok(()),
                Involutivity::Refuted(w) => Err(GeometryError::NotInvolutive { i: w.i, j: w.j }),
                Involutivity::Unchecked => unreachable!(),
            },
            Involutivity::Refuted(w) => Err(GeometryError::NotInvolutive { i: w.i, j: w.j }),
        }
    }

    /// Same ambient, different generators.
    pub fn with_generators(&self, generators: Vec<FreeModuleElem>) -> Result<Self, GeometryError> {
        Self::new(self.ambient.clone(), self.vars.clone(), generators, self.config.clone())
    }

    /// Module over `ℝⁿ` generated by the anchors `ρ(gᵢ)`.
    pub fn induced_foliation(&self) -> Result<SingularSubalgebroid, GeometryError> {
        let n = self.base_dim();
        let gens = self
            .generators()
            .iter()
            .map(|g| self.ambient.anchor(g))
            .collect::<Result<Vec<_>, _>>()?;
        let gens = if n == 0 { Vec::new() } else { gens };
        let fol = SingularSubalgebroid::new(AmbientAlgebroid::tangent(n), self.vars.clone(), gens, self.config.clone())?;
        fol.checked()
    }

    pub fn display_generator(&self, i: usize) -> String {
        super::dsl::section_expr(&self.ambient, &self.vars, &self.generators()[i])
    }
}

pub fn default_vars(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (0..n).map(|i| format!("x{}", i + 1)).collect(),
    }
}

/// Singular subalgebroid of sections whose restriction to the coordinate
/// subspace `N = {x_{n+1} = … = x_m = 0}` lies in the span of the first `b`
/// frame elements. Generators: `{e_j}_{j≤b} ∪ {x_i·e_j}_{i>n, j>b}`, ordered
/// by frame index first.
pub fn subalgebroid_over_submanifold(
    ambient: AmbientAlgebroid,
    vars: Vec<String>,
    n: usize,
    b: usize,
) -> Result<SingularSubalgebroid, GeometryError> {
    let m = ambient.base_dim();
    let r = ambient.rank();
    if n > m {
        return Err(GeometryError::IndexOutOfRange(format!("submanifold dimension {n} exceeds base dimension {m}")));
    }
    if b > r {
        return Err(GeometryError::IndexOutOfRange(format!("subframe size {b} exceeds rank {r}")));
    }
    let mut gens: Vec<FreeModuleElem> = (0..b).map(|j| FreeModuleElem::basis(m, r, j)).collect();
    for j in b..r {
        for i in n..m {
            gens.push(FreeModuleElem::basis(m, r, j).scale_poly(&Poly::var(m, i)));
        }
    }
    SingularSubalgebroid::new(ambient, vars, gens, GroebnerConfig::default())
}

impl PartialEq for SingularSubalgebroid {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vars == other.vars && self.generators() == other.generators()
    }
}

/// Is the ambient the tangent bundle?
pub fn is_tangent(b: &SingularSubalgebroid) -> bool {
    matches!(b.ambient().kind(), AmbientKind::Tangent)
}
