//! JSON descriptors for every domain object, with validated conversions.
//!
//! Complex scalars are `[re, im]` pairs; a matrix is a row-major nested
//! array of those; an element or state is one matrix per block. Linear maps
//! are dense matrices over the flattened block coordinates.

use crate::algebra::{AlgebraElement, FiniteCStarAlgebra, StarHomomorphism, TOL_HOM};
use crate::classical::{ClassicalFamily, SemiMetricSpace};
use crate::error::{QsmError, Result};
use crate::family::{QuantumFamily, StateSemiMetric};
use crate::linalg::{CMat, RMat};
use crate::seminorms::{FiniteGroup, GroupAction, NormDescriptor, Seminorm};
use crate::states::State;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type ComplexEntry = [f64; 2];
pub type MatrixData = Vec<Vec<ComplexEntry>>;
pub type BlockData = Vec<MatrixData>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub blocks: Vec<usize>,
}

impl AlgebraDescriptor {
    pub fn to_algebra(&self) -> Result<FiniteCStarAlgebra> {
        FiniteCStarAlgebra::new(self.blocks.clone())
    }

    pub fn of(algebra: &FiniteCStarAlgebra) -> Self {
        Self {
            blocks: algebra.blocks().to_vec(),
        }
    }
}

pub fn matrix_from_data(data: &MatrixData) -> Result<CMat> {
    let rows = data.len();
    let cols = data.first().map(|r| r.len()).unwrap_or(0);
    if data.iter().any(|r| r.len() != cols) {
        return Err(QsmError::InvalidDescriptor("ragged matrix".into()));
    }
    Ok(CMat::from_fn(rows, cols, |r, s| {
        Complex64::new(data[r][s][0], data[r][s][1])
    }))
}

pub fn matrix_to_data(m: &CMat) -> MatrixData {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|s| [m[(r, s)].re, m[(r, s)].im]).collect())
        .collect()
}

pub fn element_from_data(algebra: &FiniteCStarAlgebra, data: &BlockData) -> Result<AlgebraElement> {
    let mats = data.iter().map(matrix_from_data).collect::<Result<Vec<_>>>()?;
    AlgebraElement::new(algebra.clone(), mats)
}

pub fn element_to_data(e: &AlgebraElement) -> BlockData {
    e.mats().iter().map(matrix_to_data).collect()
}

pub fn state_from_data(algebra: &FiniteCStarAlgebra, data: &BlockData) -> Result<State> {
    let mats = data.iter().map(matrix_from_data).collect::<Result<Vec<_>>>()?;
    State::new(algebra.clone(), mats)
}

pub fn state_to_data(s: &State) -> BlockData {
    s.densities().iter().map(matrix_to_data).collect()
}

fn real_matrix_from_rows(rows: &[Vec<f64>]) -> Result<RMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(QsmError::InvalidDescriptor("distance matrix not square".into()));
    }
    Ok(RMat::from_fn(n, n, |r, s| rows[r][s]))
}

pub fn real_matrix_to_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|s| m[(r, s)]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomomorphismDescriptor {
    pub source: AlgebraDescriptor,
    pub target: AlgebraDescriptor,
    pub matrix: MatrixData,
}

impl HomomorphismDescriptor {
    /// Build and validate; the returned report carries the residuals even on
    /// failure, next to the (possibly unvalidated) map.
    pub fn to_homomorphism(&self) -> Result<(StarHomomorphism, crate::report::ValidationReport)> {
        let source = self.source.to_algebra()?;
        let target = self.target.to_algebra()?;
        let matrix = matrix_from_data(&self.matrix)?;
        let mut hom = StarHomomorphism::from_matrix(source, target, matrix)?;
        let report = hom.validate(TOL_HOM);
        Ok((hom, report))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case")]
pub enum NormData {
    Operator,
    CoordSup { weights: Option<Vec<f64>> },
    CoordOne { weights: Option<Vec<f64>> },
}

impl NormData {
    fn to_norm(&self, algebra: &FiniteCStarAlgebra) -> NormDescriptor {
        let default = || vec![1.0; algebra.dim()];
        match self {
            NormData::Operator => NormDescriptor::Operator,
            NormData::CoordSup { weights } => NormDescriptor::CoordSup {
                weights: weights.clone().unwrap_or_else(default),
            },
            NormData::CoordOne { weights } => NormDescriptor::CoordOne {
                weights: weights.clone().unwrap_or_else(default),
            },
        }
    }
}

/// Seminorm descriptors, one variant per constructor kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeminormDescriptor {
    Lipschitz {
        d: Vec<Vec<f64>>,
    },
    GroupAction {
        algebra: AlgebraDescriptor,
        mult_table: Vec<Vec<usize>>,
        maps: Vec<MatrixData>,
        lengths: Vec<f64>,
    },
    QuotientOfNorm {
        algebra: AlgebraDescriptor,
        #[serde(flatten)]
        norm: NormData,
    },
    StateMetric {
        algebra: AlgebraDescriptor,
        probes: Vec<BlockData>,
        d: Vec<Vec<f64>>,
    },
}

impl SeminormDescriptor {
    pub fn to_seminorm(&self) -> Result<Seminorm> {
        match self {
            SeminormDescriptor::Lipschitz { d } => {
                let space = SemiMetricSpace::new(real_matrix_from_rows(d)?)?;
                Seminorm::lipschitz(space)
            }
            SeminormDescriptor::GroupAction {
                algebra,
                mult_table,
                maps,
                lengths,
            } => {
                let algebra = algebra.to_algebra()?;
                let group = FiniteGroup::new(mult_table.clone())?;
                let maps = maps
                    .iter()
                    .map(|m| {
                        StarHomomorphism::from_matrix(
                            algebra.clone(),
                            algebra.clone(),
                            matrix_from_data(m)?,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                let action = GroupAction::new(group, algebra, maps)?;
                Seminorm::group_action(action, lengths.clone())
            }
            SeminormDescriptor::QuotientOfNorm { algebra, norm } => {
                let algebra = algebra.to_algebra()?;
                let norm = norm.to_norm(&algebra);
                Seminorm::quotient_of_norm(algebra, norm)
            }
            SeminormDescriptor::StateMetric { algebra, probes, d } => {
                let algebra = algebra.to_algebra()?;
                let states = probes
                    .iter()
                    .map(|p| state_from_data(&algebra, p))
                    .collect::<Result<Vec<_>>>()?;
                let n = states.len();
                let d = real_matrix_from_rows(d)?;
                if d.nrows() != n {
                    return Err(QsmError::InvalidDescriptor(
                        "distance matrix size must match probe count".into(),
                    ));
                }
                let metric = StateSemiMetric::from_matrix(states, d)?;
                Seminorm::state_metric(metric)
            }
        }
    }
}

/// Classical family descriptor: `{"X": {"d0": [[...]]}, "Y": m, "Z": n,
/// "F": [[x index per (y,z)]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalFamilyDescriptor {
    #[serde(rename = "X")]
    pub x: SpaceDescriptor,
    #[serde(rename = "Y")]
    pub y: usize,
    #[serde(rename = "Z")]
    pub z: usize,
    #[serde(rename = "F")]
    pub f: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub d0: Vec<Vec<f64>>,
}

impl ClassicalFamilyDescriptor {
    pub fn to_family(&self) -> Result<ClassicalFamily> {
        let space = SemiMetricSpace::new(real_matrix_from_rows(&self.d0_rows())?)?;
        ClassicalFamily::new(space, self.y, self.z, self.f.clone())
    }

    fn d0_rows(&self) -> Vec<Vec<f64>> {
        self.x.d0.clone()
    }
}

/// Quantum family descriptors: an explicit `Φ` matrix, one of the named
/// constructors (`identity`/`flip`/`unit_embedding` over a pair of algebras,
/// or a wrapped homomorphism), or a classical family table (compiled).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyDescriptor {
    Constructor {
        constructor: FamilyConstructor,
        #[serde(rename = "A")]
        a: AlgebraDescriptor,
        #[serde(rename = "C")]
        c: AlgebraDescriptor,
    },
    Homomorphism {
        constructor: HomConstructorTag,
        phi: HomomorphismDescriptor,
    },
    Classical {
        #[serde(flatten)]
        family: ClassicalFamilyDescriptor,
    },
    Explicit {
        #[serde(rename = "A")]
        a: AlgebraDescriptor,
        #[serde(rename = "B")]
        b: AlgebraDescriptor,
        #[serde(rename = "C")]
        c: AlgebraDescriptor,
        phi: MatrixData,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConstructor {
    Identity,
    Flip,
    UnitEmbedding,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomConstructorTag {
    Homomorphism,
}

impl FamilyDescriptor {
    pub fn to_family(&self) -> Result<QuantumFamily> {
        match self {
            FamilyDescriptor::Constructor { constructor, a, c } => {
                let a = a.to_algebra()?;
                let c = c.to_algebra()?;
                match constructor {
                    FamilyConstructor::Identity => QuantumFamily::identity_family(&a, &c),
                    FamilyConstructor::Flip => QuantumFamily::flip_family(&a, &c),
                    FamilyConstructor::UnitEmbedding => {
                        QuantumFamily::unit_embedding_family(&a, &c)
                    }
                }
            }
            FamilyDescriptor::Homomorphism { phi, .. } => {
                let (hom, report) = phi.to_homomorphism()?;
                if !report.passed() {
                    return Err(QsmError::NotValidated(format!(
                        "homomorphism residual {:.3e}",
                        report.worst_residual()
                    )));
                }
                QuantumFamily::homomorphism_family(&hom)
            }
            FamilyDescriptor::Classical { family } => {
                crate::classical::compile_family(&family.to_family()?)
            }
            FamilyDescriptor::Explicit { a, b, c, phi } => {
                let a = a.to_algebra()?;
                let b = b.to_algebra()?;
                let c = c.to_algebra()?;
                let phi =
                    StarHomomorphism::from_matrix(a.clone(), b.tensor(&c), matrix_from_data(phi)?)?;
                QuantumFamily::new(a, b, c, phi)
            }
        }
    }
}

/// Input for `dist`: an algebra, a seminorm on it, and a list of states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistJob {
    pub algebra: AlgebraDescriptor,
    pub seminorm: SeminormDescriptor,
    pub states: Vec<BlockData>,
}

impl DistJob {
    pub fn load(&self) -> Result<(FiniteCStarAlgebra, Seminorm, Vec<State>)> {
        let algebra = self.algebra.to_algebra()?;
        let seminorm = self.seminorm.to_seminorm()?;
        if seminorm.algebra() != &algebra {
            return Err(QsmError::AlgebraMismatch(
                "seminorm does not live on the declared algebra".into(),
            ));
        }
        let states = self
            .states
            .iter()
            .map(|s| state_from_data(&algebra, s))
            .collect::<Result<Vec<_>>>()?;
        Ok((algebra, seminorm, states))
    }
}

/// Input for `induce`: a family plus an optional base seminorm on `A`.
/// Defaults: the Lipschitz seminorm of `d₀` for classical families, and the
/// quotient of the operator norm (a quantum-metric structure on any
/// finite-dimensional algebra) otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InduceJob {
    #[serde(flatten)]
    pub family: FamilyDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<SeminormDescriptor>,
}

impl InduceJob {
    pub fn load(&self) -> Result<(QuantumFamily, Seminorm)> {
        let fam = self.family.to_family()?;
        let base = match &self.base {
            Some(desc) => desc.to_seminorm()?,
            None => match &self.family {
                FamilyDescriptor::Classical { family } => {
                    Seminorm::lipschitz(family.to_family()?.space().clone())?
                }
                _ => Seminorm::quotient_of_norm(
                    fam.algebra_a().clone(),
                    NormDescriptor::Operator,
                )?,
            },
        };
        if base.algebra() != fam.algebra_a() {
            return Err(QsmError::AlgebraMismatch(
                "base seminorm must live on the family's A".into(),
            ));
        }
        Ok((fam, base))
    }
}

/// Tagged input for `validate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ValidateInput {
    Seminorm {
        #[serde(flatten)]
        seminorm: SeminormDescriptor,
    },
    Homomorphism {
        #[serde(flatten)]
        hom: HomomorphismDescriptor,
    },
    Family {
        #[serde(flatten)]
        family: Box<FamilyDescriptor>,
    },
    ClassicalFamily {
        #[serde(flatten)]
        family: ClassicalFamilyDescriptor,
    },
    State {
        algebra: AlgebraDescriptor,
        densities: BlockData,
    },
    Semimetric {
        d: Vec<Vec<f64>>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip() {
        let json = r#"{"blocks":[2,1,3]}"#;
        let desc: AlgebraDescriptor = serde_json::from_str(json).unwrap();
        let alg = desc.to_algebra().unwrap();
        assert_eq!(alg.blocks(), &[2, 1, 3]);
        assert_eq!(
            serde_json::to_string(&AlgebraDescriptor::of(&alg)).unwrap(),
            json
        );
    }

    #[test]
    fn lipschitz_seminorm_descriptor_parses() {
        let json = r#"{"kind":"lipschitz","d":[[0.0,1.0],[1.0,0.0]]}"#;
        let desc: SeminormDescriptor = serde_json::from_str(json).unwrap();
        let l = desc.to_seminorm().unwrap();
        assert_eq!(l.kind_name(), "lipschitz");
        assert_eq!(l.algebra().num_blocks(), 2);
    }

    #[test]
    fn classical_family_descriptor_matches_contract() {
        let json = r#"{"X":{"d0":[[0.0,1.0],[1.0,0.0]]},"Y":1,"Z":2,"F":[[0,1]]}"#;
        let desc: ClassicalFamilyDescriptor = serde_json::from_str(json).unwrap();
        let fam = desc.to_family().unwrap();
        assert_eq!(fam.y_size(), 1);
        assert_eq!(fam.z_size(), 2);
        assert_eq!(fam.apply(0, 1), 1);
    }

    #[test]
    fn family_constructor_descriptor_parses() {
        let json = r#"{"constructor":"flip","A":{"blocks":[1,1]},"C":{"blocks":[2]}}"#;
        let desc: FamilyDescriptor = serde_json::from_str(json).unwrap();
        let fam = desc.to_family().unwrap();
        assert_eq!(fam.algebra_c().blocks(), &[1, 1]);
        assert_eq!(fam.algebra_b().blocks(), &[2]);
    }

    #[test]
    fn malformed_element_is_rejected() {
        let alg = FiniteCStarAlgebra::commutative(2).unwrap();
        let data: BlockData = vec![vec![vec![[1.0, 0.0]]]]; // one block instead of two
        assert!(element_from_data(&alg, &data).is_err());
    }
}
