//! The commutative case: finite semi-metric spaces, classical families
//! `F: Y×Z → X`, their compilation to quantum families, and exact
//! verification of the induced-structure equalities.
//!
//! For a finite family the induced semi-metric on `Z` has the closed form
//! `d₁(z,z′) = max_y d₀(F(y,z), F(y,z′))`, and the whole pipeline
//! (compile → induce on exhaustive point masses → LP) must reproduce it
//! exactly. That round trip is the strongest oracle in the crate: every
//! quantity on both sides is LP-certified, so the comparisons run at 1e−8.

use crate::algebra::{FiniteCStarAlgebra, StarHomomorphism};
use crate::duality::{rho, RatioOptions};
use crate::error::{QsmError, Result};
use crate::family::{
    induce_qsm, InduceOptions, QuantumFamily, StateSemiMetric,
};
use crate::linalg::{RMat, RVec};
use crate::report::{CheckItem, ValidationReport};
use crate::seminorms::{QSMStructure, Seminorm};
use crate::states::{build_probes, State};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Slack allowed when re-checking the triangle inequality on stored floats.
const TOL_TRIANGLE: f64 = 1e-9;

/// A finite semi-metric space: symmetric, nonnegative, zero diagonal,
/// triangle inequality; zero distances between distinct points are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiMetricSpace {
    d: RMat,
}

impl SemiMetricSpace {
    pub fn new(d: RMat) -> Result<Self> {
        let n = d.nrows();
        if n == 0 || d.ncols() != n {
            return Err(QsmError::InvalidSemiMetric("matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(QsmError::InvalidSemiMetric(format!(
                    "nonzero diagonal at {i}"
                )));
            }
            for j in 0..n {
                if d[(i, j)] < 0.0 || !d[(i, j)].is_finite() {
                    return Err(QsmError::InvalidSemiMetric(format!(
                        "invalid entry at ({i},{j})"
                    )));
                }
                if (d[(i, j)] - d[(j, i)]).abs() > 1e-12 {
                    return Err(QsmError::InvalidSemiMetric("not symmetric".into()));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if d[(x, z)] > d[(x, y)] + d[(y, z)] + TOL_TRIANGLE {
                        return Err(QsmError::InvalidSemiMetric(format!(
                            "triangle inequality fails on ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(Self { d })
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.d[(x, y)]
    }

    pub fn matrix(&self) -> &RMat {
        &self.d
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().fold(0.0_f64, |acc, &v| acc.max(v))
    }

    pub fn min_positive_distance(&self) -> Option<f64> {
        self.d
            .iter()
            .filter(|&&v| v > 0.0)
            .fold(None, |acc: Option<f64>, &v| {
                Some(acc.map_or(v, |a| a.min(v)))
            })
    }

    /// Pairs of distinct points at distance zero.
    pub fn zero_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in (x + 1)..self.len() {
                if self.d[(x, y)] == 0.0 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// True when all off-diagonal distances are positive.
    pub fn is_metric(&self) -> bool {
        self.zero_pairs().is_empty()
    }
}

/// A finite family of maps `F: Y×Z → X` into a semi-metric space.
#[derive(Debug, Clone)]
pub struct ClassicalFamily {
    x: SemiMetricSpace,
    y_size: usize,
    z_size: usize,
    /// `table[y][z]` is the index of `F(y,z)` in `X`.
    table: Vec<Vec<usize>>,
}

impl ClassicalFamily {
    pub fn new(
        x: SemiMetricSpace,
        y_size: usize,
        z_size: usize,
        table: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if y_size == 0 || z_size == 0 {
            return Err(QsmError::InvalidDescriptor("empty parameter sets".into()));
        }
        if table.len() != y_size {
            return Err(QsmError::ShapeMismatch("table has wrong row count".into()));
        }
        for row in &table {
            if row.len() != z_size {
                return Err(QsmError::ShapeMismatch("table has wrong column count".into()));
            }
            if row.iter().any(|&v| v >= x.len()) {
                return Err(QsmError::IndexOutOfRange("table entry outside X".into()));
            }
        }
        Ok(Self {
            x,
            y_size,
            z_size,
            table,
        })
    }

    pub fn space(&self) -> &SemiMetricSpace {
        &self.x
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn apply(&self, y: usize, z: usize) -> usize {
        self.table[y][z]
    }
}

/// The direct induced semi-metric `d₁(z,z′) = max_y d₀(F(y,z), F(y,z′))`.
pub fn d1_direct(fam: &ClassicalFamily) -> Result<SemiMetricSpace> {
    let n = fam.z_size();
    let mut d = RMat::zeros(n, n);
    for z1 in 0..n {
        for z2 in (z1 + 1)..n {
            let mut best = 0.0_f64;
            for y in 0..fam.y_size() {
                best = best.max(fam.x.distance(fam.apply(y, z1), fam.apply(y, z2)));
            }
            d[(z1, z2)] = best;
            d[(z2, z1)] = best;
        }
    }
    SemiMetricSpace::new(d)
}

/// Compile to the quantum family `F̂: C(X) → C(Y)⊗C(Z)`, `F̂(a) = a∘F`.
/// The coordinate matrix is the 0/1 table of `F` under the tensor index
/// convention `(y,z) ↦ y·|Z| + z`, and validates exactly.
pub fn compile_family(fam: &ClassicalFamily) -> Result<QuantumFamily> {
    let a = FiniteCStarAlgebra::commutative(fam.x.len())?;
    let b = FiniteCStarAlgebra::commutative(fam.y_size())?;
    let c = FiniteCStarAlgebra::commutative(fam.z_size())?;
    let target = b.tensor(&c);
    let z_size = fam.z_size();
    let mut phi = StarHomomorphism::from_element_map(&a, &target, |e| {
        let vals: Vec<num_complex::Complex64> = (0..fam.y_size())
            .flat_map(|y| (0..z_size).map(move |z| e.value_at(fam.apply(y, z))))
            .collect();
        crate::algebra::AlgebraElement::from_function(&target, &vals).expect("matching shape")
    })?;
    let report = phi.validate(crate::algebra::TOL_HOM);
    debug_assert!(report.passed());
    QuantumFamily::new(a, b, c, phi)
}

/// Exhaustive point-mass probe set of a commutative algebra in point order.
pub fn point_mass_probes(algebra: &FiniteCStarAlgebra) -> crate::states::ProbeSet {
    build_probes(algebra, 0, 0, 0)
}

/// Full verification of the induced-structure equalities for one family,
/// with everything on exhaustive point masses (`B = C(Y)` is commutative,
/// so every reported value is LP-exact):
/// * `theorem4.i` — `d₁(z,z′) = ρ_N(δ_z, δ_{z′})` on all pairs;
/// * `theorem4.ii` — every domain sample is `d₁`-Lipschitz with constant
///   `N(c)`;
/// * `theorem4.iii` — `‖c‖_{d₁} ≤ N(c)` on a spanning sample.
pub fn verify_theorem(fam: &ClassicalFamily, tol: f64, seed: u64) -> Result<ValidationReport> {
    let qf = compile_family(fam)?;
    let base_l = Seminorm::lipschitz(fam.x.clone())?;
    let base = QSMStructure::build(base_l, 8, seed)?;
    let probes = point_mass_probes(qf.algebra_c());
    let opts = InduceOptions {
        seed,
        ..InduceOptions::default()
    };
    let induced = induce_qsm(&qf, &base, &probes, &opts)?;
    let d1 = d1_direct(fam)?;
    let n = fam.z_size();
    let mut report = ValidationReport::new();

    report.push(CheckItem::new(
        "theorem4.exact",
        induced.metric.all_exact(),
        None,
        "induced distances enumerated over extreme points",
    ));

    // (i) equality of the direct semi-metric and the state distances of the
    // induced seminorm, each pair via the LP engine.
    let c_alg = qf.algebra_c().clone();
    let l_d = induced.seminorm();
    let mut eq_res = 0.0_f64;
    for z1 in 0..n {
        for z2 in (z1 + 1)..n {
            let dz1 = State::point_mass(&c_alg, z1)?;
            let dz2 = State::point_mass(&c_alg, z2)?;
            let r = rho(&dz1, &dz2, l_d, &opts.rho)?;
            let target = d1.distance(z1, z2);
            let res = if r.value.is_finite() {
                (r.value - target).abs()
            } else {
                f64::INFINITY
            };
            eq_res = eq_res.max(res);
        }
    }
    report.push(CheckItem::residual_le(
        "theorem4.i",
        eq_res,
        tol,
        "d₁(z,z′) = ρ_N(δ_z, δ_{z′}) on all pairs",
    ));

    // Spanning domain sample: the domain basis plus seeded combinations.
    let mut samples: Vec<crate::algebra::AlgebraElement> = Vec::new();
    let basis = l_d.domain_basis_mod_unit();
    for v in &basis {
        samples.push(crate::algebra::AlgebraElement::from_sa_coords(&c_alg, v));
    }
    samples.push(c_alg.unit());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8f0c_7a13);
    for _ in 0..8 {
        let mut sa = RVec::zeros(c_alg.dim());
        for v in &basis {
            sa += v * crate::linalg::standard_normal(&mut rng);
        }
        samples.push(crate::algebra::AlgebraElement::from_sa_coords(&c_alg, &sa));
    }

    let lip_d1 = Seminorm::lipschitz(d1.clone())?;
    let mut lip_res = 0.0_f64;
    let mut norm_res = 0.0_f64;
    for c in &samples {
        let n_c = l_d.eval(c)?;
        if !n_c.is_finite() {
            continue;
        }
        for z1 in 0..n {
            for z2 in 0..n {
                let diff = (c.value_at(z1) - c.value_at(z2)).norm();
                lip_res = lip_res.max(diff - n_c * d1.distance(z1, z2));
            }
        }
        let lip_c = lip_d1.eval(c)?;
        if lip_c.is_finite() {
            norm_res = norm_res.max(lip_c - n_c);
        } else {
            norm_res = f64::INFINITY;
        }
    }
    report.push(CheckItem::residual_le(
        "theorem4.ii",
        lip_res.max(0.0),
        tol,
        "|c(z)−c(z′)| ≤ N(c)·d₁(z,z′) for domain samples",
    ));
    report.push(CheckItem::residual_le(
        "theorem4.iii",
        norm_res.max(0.0),
        tol,
        "‖c‖_{d₁} ≤ N(c) on a spanning sample",
    ));

    if induced.is_degenerate() {
        report.push(CheckItem::new(
            "theorem4.degenerate",
            true,
            None,
            "induced semi-metric vanishes on all probes (constant-like family)",
        ));
    }
    Ok(report)
}

/// Verification of the point-mass equality `d(δ_x,δ_{x′}) = ρ_{L_d}(δ_x,δ_{x′})`
/// for a semi-metric on probes of `C(X)` (point masses plus arbitrary
/// extras). The witness functions `b_x(y) = d(δ_x, δ_y)` from the equality's
/// proof are evaluated and reported alongside.
pub fn verify_lemma5(metric: &StateSemiMetric, tol: f64) -> Result<ValidationReport> {
    let mut report = ValidationReport::new();
    let idx = metric.point_mass_probe_indices().ok_or_else(|| {
        QsmError::InvalidSemiMetric(
            "probe set must contain every point mass of a commutative algebra".into(),
        )
    })?;
    let algebra = metric.probes()[0].algebra().clone();
    let n = idx.len();
    let l_d = Seminorm::state_metric(metric.clone())?;

    // Witness functions: b_x(y) = d(δ_x, δ_y); the proof of the equality
    // certifies L_d(b_x) ≤ 1 and ratio attainment.
    let mut witness_res = 0.0_f64;
    for x in 0..n {
        let vals: Vec<f64> = (0..n).map(|y| metric.distance(idx[x], idx[y])).collect();
        let b_x = crate::algebra::AlgebraElement::from_real_function(&algebra, &vals)?;
        let l_val = l_d.eval(&b_x)?;
        if l_val.is_finite() {
            witness_res = witness_res.max((l_val - 1.0).max(0.0));
        } else {
            witness_res = f64::INFINITY;
        }
    }
    report.push(CheckItem::residual_le(
        "lemma5.witness",
        witness_res,
        tol.max(1e-9),
        "L_d(b_x) ≤ 1 for the witness functions b_x = d(δ_x, ·)",
    ));

    let opts = RatioOptions::default();
    let mut eq_res = 0.0_f64;
    for x1 in 0..n {
        for x2 in (x1 + 1)..n {
            let s1 = State::point_mass(&algebra, x1)?;
            let s2 = State::point_mass(&algebra, x2)?;
            let r = rho(&s1, &s2, &l_d, &opts)?;
            let target = metric.distance(idx[x1], idx[x2]);
            let res = if r.value.is_finite() {
                (r.value - target).abs()
            } else {
                f64::INFINITY
            };
            eq_res = eq_res.max(res);
        }
    }
    report.push(CheckItem::residual_le(
        "lemma5.eq",
        eq_res,
        tol,
        "d(δ_x, δ_{x′}) = ρ_{L_d}(δ_x, δ_{x′}) on point-mass pairs",
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_space() -> SemiMetricSpace {
        SemiMetricSpace::new(RMat::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0],
        ))
        .unwrap()
    }

    #[test]
    fn semimetric_validation_rejects_bad_matrices() {
        assert!(SemiMetricSpace::new(RMat::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]))
            .is_err());
        assert!(SemiMetricSpace::new(RMat::from_row_slice(2, 2, &[0.5, 1.0, 1.0, 0.0]))
            .is_err());
        // Triangle violation: d(0,2) = 5 > 1 + 1.
        assert!(SemiMetricSpace::new(RMat::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0],
        ))
        .is_err());
    }

    #[test]
    fn d1_of_constant_family_vanishes() {
        let fam = ClassicalFamily::new(line_space(), 2, 2, vec![vec![0, 0], vec![0, 0]]).unwrap();
        let d1 = d1_direct(&fam).unwrap();
        assert_eq!(d1.diameter(), 0.0);
    }

    #[test]
    fn d1_of_identity_family_is_base_metric() {
        let fam = ClassicalFamily::new(line_space(), 1, 3, vec![vec![0, 1, 2]]).unwrap();
        let d1 = d1_direct(&fam).unwrap();
        assert_eq!(d1.matrix(), line_space().matrix());
    }

    #[test]
    fn d1_hand_computed_instance() {
        // F(0,·) = (0,2), F(1,·) = (1,1) over the line metric:
        // d₁(0,1) = max(d(0,2), d(1,1)) = max(2, 0) = 2.
        let fam =
            ClassicalFamily::new(line_space(), 2, 2, vec![vec![0, 2], vec![1, 1]]).unwrap();
        let d1 = d1_direct(&fam).unwrap();
        assert!((d1.distance(0, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn compiled_family_validates_exactly() {
        let fam =
            ClassicalFamily::new(line_space(), 2, 2, vec![vec![0, 2], vec![1, 1]]).unwrap();
        let qf = compile_family(&fam).unwrap();
        assert!(qf.map().is_validated());

        // Pullback of δ_{(y,z)} is δ_{F(y,z)}.
        let b = qf.algebra_b().clone();
        let c = qf.algebra_c().clone();
        let a = qf.algebra_a().clone();
        for y in 0..2 {
            for z in 0..2 {
                let prod = State::point_mass(&b, y)
                    .unwrap()
                    .product(&State::point_mass(&c, z).unwrap());
                let pulled = prod.pullback(qf.map()).unwrap();
                let expect = State::point_mass(&a, fam.apply(y, z)).unwrap();
                assert!(pulled.distance_to(&expect) < 1e-12);
            }
        }
    }

    #[test]
    fn constant_family_compiles_to_scalar_map() {
        let fam = ClassicalFamily::new(line_space(), 2, 2, vec![vec![1, 1], vec![1, 1]]).unwrap();
        let qf = compile_family(&fam).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = qf.algebra_a().random_element(&mut rng);
        // Φ(a) = a(x₀)·1 on Y×Z for the constant family at x₀ = 1.
        let image = qf.map().apply(&a).unwrap();
        for k in 0..4 {
            assert!((image.value_at(k) - a.value_at(1)).norm() < 1e-12);
        }
    }

    #[test]
    fn theorem_holds_on_hand_instance() {
        let fam =
            ClassicalFamily::new(line_space(), 2, 2, vec![vec![0, 2], vec![1, 1]]).unwrap();
        let report = verify_theorem(&fam, 1e-8, 7).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn lemma5_discrete_metric() {
        let algebra = FiniteCStarAlgebra::commutative(3).unwrap();
        let probes = build_probes(&algebra, 0, 3, 5);
        let metric = StateSemiMetric::discrete(probes.states().to_vec()).unwrap();
        let report = verify_lemma5(&metric, 1e-8).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures().collect::<Vec<_>>());
        // Both sides are 1 for distinct point masses under the discrete d.
        assert!(report.find("lemma5.eq").unwrap().residual.unwrap() < 1e-8);
    }
}
