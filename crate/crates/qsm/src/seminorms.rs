//! Lipschitz-type seminorms behind one evaluable interface.
//!
//! Four constructors are provided:
//! * [`Seminorm::lipschitz`] — `‖a‖_d = sup |a(x)−a(x′)| / d(x,x′)` over a
//!   finite semi-metric space, with `∞` for functions that separate a
//!   zero-distance pair (they fall outside the continuous functions of `d`);
//! * [`Seminorm::group_action`] — `L(a) = max_{g≠e} ‖g·a − a‖ / ℓ(g)` for an
//!   ergodic action of a finite group by validated *-automorphisms;
//! * [`Seminorm::quotient_of_norm`] — `N₀(a) = inf_λ N(a + λ1)`;
//! * [`Seminorm::state_metric`] — `L_d(a) = sup |μ(a)−ν(a)| / d(μ,ν)` over a
//!   probed semi-metric on states.
//!
//! All four vanish on scalars and satisfy `L(a) = L(a*)`. The null space of
//! each kind is the joint kernel of finitely many linear maps, so the scalar
//! axiom is certified by a rank computation rather than sampling.

use crate::algebra::{AlgebraElement, FiniteCStarAlgebra, StarHomomorphism, TOL_HOM};
use crate::classical::SemiMetricSpace;
use crate::duality::{ratio_search, RatioOptions};
use crate::error::{QsmError, Result};
use crate::family::StateSemiMetric;
use crate::linalg::{golden_section_min, hermitian_eigenvalues, kernel_basis, RMat, RVec};
use crate::report::{CheckItem, ValidationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance for treating a zero-distance disagreement as a domain violation.
const TOL_DOMAIN: f64 = 1e-10;
/// Rank tolerance for null-space computations.
const TOL_RANK: f64 = 1e-8;

/// A norm on a finite-dimensional C*-algebra, used as input to the quotient
/// seminorm. The coordinate norms must be *-invariant, i.e. the weight at a
/// matrix position equals the weight at the transposed position.
#[derive(Debug, Clone)]
pub enum NormDescriptor {
    Operator,
    CoordSup { weights: Vec<f64> },
    CoordOne { weights: Vec<f64> },
}

impl NormDescriptor {
    fn validate(&self, algebra: &FiniteCStarAlgebra) -> Result<()> {
        let check_weights = |w: &Vec<f64>| -> Result<()> {
            if w.len() != algebra.dim() {
                return Err(QsmError::InvalidSeminorm(format!(
                    "{} weights for coordinate dimension {}",
                    w.len(),
                    algebra.dim()
                )));
            }
            if w.iter().any(|&x| x <= 0.0) {
                return Err(QsmError::InvalidSeminorm(
                    "norm weights must be positive".into(),
                ));
            }
            for (i, &n) in algebra.blocks().iter().enumerate() {
                let off = algebra.block_offset(i);
                for r in 0..n {
                    for s in 0..n {
                        let a = w[off + r * n + s];
                        let b = w[off + s * n + r];
                        if (a - b).abs() > 1e-12 {
                            return Err(QsmError::InvalidSeminorm(
                                "weights are not *-invariant (transpose-symmetric)".into(),
                            ));
                        }
                    }
                }
            }
            Ok(())
        };
        match self {
            NormDescriptor::Operator => Ok(()),
            NormDescriptor::CoordSup { weights } | NormDescriptor::CoordOne { weights } => {
                check_weights(weights)
            }
        }
    }

    fn value(&self, a: &AlgebraElement) -> f64 {
        match self {
            NormDescriptor::Operator => a.operator_norm(),
            NormDescriptor::CoordSup { weights } => {
                let coords = a.coords();
                coords
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| w * c.norm())
                    .fold(0.0, f64::max)
            }
            NormDescriptor::CoordOne { weights } => {
                let coords = a.coords();
                coords.iter().zip(weights).map(|(c, w)| w * c.norm()).sum()
            }
        }
    }
}

/// A finite group given by its Cayley table.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(QsmError::InvalidGroupAction("empty group".into()));
        }
        for row in &mult {
            if row.len() != n || row.iter().any(|&g| g >= n) {
                return Err(QsmError::InvalidGroupAction("malformed Cayley table".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mult[e][g] == g && mult[g][e] == g))
            .ok_or_else(|| QsmError::InvalidGroupAction("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| mult[g][h] == identity && mult[h][g] == identity)
                .ok_or_else(|| {
                    QsmError::InvalidGroupAction(format!("element {g} has no inverse"))
                })?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(QsmError::InvalidGroupAction(
                            "multiplication is not associative".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self {
            mult,
            identity,
            inverse,
        })
    }

    /// The Klein four-group (ℤ₂ × ℤ₂) with identity first.
    pub fn klein_four() -> Self {
        Self::new(vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ])
        .expect("valid table")
    }

    /// Cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Self {
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(mult).expect("valid table")
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn multiply(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }
}

/// A finite group acting by validated *-automorphisms.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: FiniteGroup,
    algebra: FiniteCStarAlgebra,
    maps: Vec<StarHomomorphism>,
}

impl GroupAction {
    /// Validates that every map is a *-automorphism, that the maps compose
    /// according to the Cayley table, and that the identity acts trivially.
    pub fn new(
        group: FiniteGroup,
        algebra: FiniteCStarAlgebra,
        mut maps: Vec<StarHomomorphism>,
    ) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(QsmError::InvalidGroupAction(format!(
                "{} maps for group order {}",
                maps.len(),
                group.order()
            )));
        }
        for (g, map) in maps.iter_mut().enumerate() {
            if map.source() != &algebra || map.target() != &algebra {
                return Err(QsmError::InvalidGroupAction(
                    "action maps must be endomorphisms of the algebra".into(),
                ));
            }
            if !map.is_validated() {
                let report = map.validate(TOL_HOM);
                if !report.passed() {
                    return Err(QsmError::InvalidGroupAction(format!(
                        "element {g} does not act as a *-homomorphism (residual {:.3e})",
                        report.worst_residual()
                    )));
                }
            }
        }
        let id_res = (maps[group.identity()].matrix()
            - StarHomomorphism::identity(&algebra).matrix())
        .norm();
        if id_res > TOL_HOM {
            return Err(QsmError::InvalidGroupAction(
                "identity element does not act trivially".into(),
            ));
        }
        for g in 0..group.order() {
            let inv = group.inverse(g);
            let comp = maps[g].compose(&maps[inv])?;
            let res = (comp.matrix() - StarHomomorphism::identity(&algebra).matrix()).norm();
            if res > 1e-8 {
                return Err(QsmError::InvalidGroupAction(format!(
                    "element {g} is not invertible as an automorphism"
                )));
            }
            for h in 0..group.order() {
                let gh = group.multiply(g, h);
                let res = (maps[g].compose(&maps[h])?.matrix() - maps[gh].matrix()).norm();
                if res > 1e-8 {
                    return Err(QsmError::InvalidGroupAction(
                        "maps do not compose along the Cayley table".into(),
                    ));
                }
            }
        }
        Ok(Self {
            group,
            algebra,
            maps,
        })
    }

    /// Action by conjugation `a ↦ u_g a u_g*` with one unitary per element.
    pub fn by_conjugation(
        group: FiniteGroup,
        algebra: &FiniteCStarAlgebra,
        unitaries: Vec<AlgebraElement>,
    ) -> Result<Self> {
        let maps = unitaries
            .iter()
            .map(|u| {
                StarHomomorphism::from_element_map(algebra, algebra, |a| &(u * a) * &u.adjoint())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, algebra.clone(), maps)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.algebra
    }

    pub fn apply(&self, g: usize, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.maps[g].apply(a)
    }

    /// Real rows over self-adjoint coordinates whose joint kernel is the
    /// fixed-point subspace of the action.
    fn fixed_space_rows(&self) -> RMat {
        let dim = self.algebra.dim();
        let basis = self.algebra.hermitian_basis();
        let n_off_id = self.group.order().saturating_sub(1);
        let mut rows = RMat::zeros(2 * dim * n_off_id.max(1), dim);
        let mut row = 0;
        for g in 0..self.group.order() {
            if g == self.group.identity() {
                continue;
            }
            for (k, h) in basis.iter().enumerate() {
                let moved = self.maps[g].apply(h).expect("endomorphism");
                let diff = (&moved - h).coords();
                for (i, v) in diff.iter().enumerate() {
                    rows[(row + 2 * i, k)] = v.re;
                    rows[(row + 2 * i + 1, k)] = v.im;
                }
            }
            row += 2 * dim;
        }
        rows
    }

    /// Ergodicity: only scalar multiples of the unit are fixed by all of G.
    pub fn is_ergodic(&self) -> bool {
        kernel_basis(&self.fixed_space_rows(), TOL_RANK).len() == 1
    }
}

/// Polyhedral description of a seminorm over self-adjoint coordinates:
/// `L(x) = max_k |gₖ·x| / bₖ`, with extra functionals that must vanish for
/// domain membership.
#[derive(Debug, Clone)]
pub struct LinearRep {
    pub bounded: Vec<(RVec, f64)>,
    pub zero: Vec<RVec>,
}

#[derive(Debug, Clone)]
enum SeminormKind {
    Lipschitz {
        space: SemiMetricSpace,
    },
    GroupAction {
        action: GroupAction,
        lengths: Vec<f64>,
    },
    QuotientOfNorm {
        norm: NormDescriptor,
    },
    StateMetric {
        metric: StateSemiMetric,
    },
    Scaled {
        base: Box<Seminorm>,
        factor: f64,
    },
}

/// An evaluable seminorm, tagged by construction kind; `∞` is a first-class
/// value (returned as `f64::INFINITY`).
#[derive(Debug, Clone)]
pub struct Seminorm {
    algebra: FiniteCStarAlgebra,
    kind: SeminormKind,
}

impl Seminorm {
    /// Lipschitz seminorm of a finite semi-metric space, on `C(X)`.
    pub fn lipschitz(space: SemiMetricSpace) -> Result<Self> {
        let algebra = FiniteCStarAlgebra::commutative(space.len())?;
        Ok(Self {
            algebra,
            kind: SeminormKind::Lipschitz { space },
        })
    }

    /// Ergodic group-action seminorm. `lengths` must be a length function:
    /// zero exactly at the identity, symmetric under inversion, subadditive.
    pub fn group_action(action: GroupAction, lengths: Vec<f64>) -> Result<Self> {
        let group = action.group();
        if lengths.len() != group.order() {
            return Err(QsmError::InvalidSeminorm("length table size".into()));
        }
        if lengths[group.identity()] != 0.0 {
            return Err(QsmError::InvalidSeminorm("ℓ(e) must be 0".into()));
        }
        for g in 0..group.order() {
            if g != group.identity() && lengths[g] <= 0.0 {
                return Err(QsmError::InvalidSeminorm(
                    "ℓ(g) must be positive off the identity".into(),
                ));
            }
            if (lengths[g] - lengths[group.inverse(g)]).abs() > 1e-12 {
                return Err(QsmError::InvalidSeminorm("ℓ(g) ≠ ℓ(g⁻¹)".into()));
            }
            for h in 0..group.order() {
                if lengths[group.multiply(g, h)] > lengths[g] + lengths[h] + 1e-12 {
                    return Err(QsmError::InvalidSeminorm(
                        "length function is not subadditive".into(),
                    ));
                }
            }
        }
        if !action.is_ergodic() {
            return Err(QsmError::InvalidGroupAction(
                "action is not ergodic: fixed space exceeds the scalars".into(),
            ));
        }
        let algebra = action.algebra().clone();
        Ok(Self {
            algebra,
            kind: SeminormKind::GroupAction { action, lengths },
        })
    }

    /// Quotient seminorm `N₀(a) = inf_λ N(a + λ1)`.
    pub fn quotient_of_norm(algebra: FiniteCStarAlgebra, norm: NormDescriptor) -> Result<Self> {
        norm.validate(&algebra)?;
        Ok(Self {
            algebra,
            kind: SeminormKind::QuotientOfNorm { norm },
        })
    }

    /// Seminorm induced by a semi-metric on a probe set of states.
    pub fn state_metric(metric: StateSemiMetric) -> Result<Self> {
        if metric.len() == 0 {
            return Err(QsmError::EmptyProbeSet);
        }
        let algebra = metric.probes()[0].algebra().clone();
        Ok(Self {
            algebra,
            kind: SeminormKind::StateMetric { metric },
        })
    }

    /// The seminorm `t·L`.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if factor <= 0.0 || !factor.is_finite() {
            return Err(QsmError::InvalidSeminorm("scale must be positive".into()));
        }
        let algebra = self.algebra.clone();
        Ok(Self {
            algebra,
            kind: SeminormKind::Scaled {
                base: Box::new(self),
                factor,
            },
        })
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.algebra
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            SeminormKind::Lipschitz { .. } => "lipschitz",
            SeminormKind::GroupAction { .. } => "group_action",
            SeminormKind::QuotientOfNorm { .. } => "quotient_of_norm",
            SeminormKind::StateMetric { .. } => "state_metric",
            SeminormKind::Scaled { base, .. } => base.kind_name(),
        }
    }

    pub fn lipschitz_space(&self) -> Option<&SemiMetricSpace> {
        match &self.kind {
            SeminormKind::Lipschitz { space } => Some(space),
            SeminormKind::Scaled { base, .. } => base.lipschitz_space(),
            _ => None,
        }
    }

    pub fn state_metric_data(&self) -> Option<&StateSemiMetric> {
        match &self.kind {
            SeminormKind::StateMetric { metric } => Some(metric),
            SeminormKind::Scaled { base, .. } => base.state_metric_data(),
            _ => None,
        }
    }

    /// For `L = t·(quotient of the operator norm)` the induced state distance
    /// has the closed form `ρ_L(μ,ν) = ‖μ−ν‖₁ / t` (trace-norm duality over
    /// the unit-ball slice `{b + λ1 : ‖b‖ ≤ 1}` and `(μ−ν)(1) = 0`).
    /// Returns `t` when that route applies.
    pub fn operator_quotient_scale(&self) -> Option<f64> {
        match &self.kind {
            SeminormKind::QuotientOfNorm {
                norm: NormDescriptor::Operator,
            } => Some(1.0),
            SeminormKind::Scaled { base, factor } => {
                base.operator_quotient_scale().map(|t| t * factor)
            }
            _ => None,
        }
    }

    pub fn eval(&self, a: &AlgebraElement) -> Result<f64> {
        if a.algebra() != &self.algebra {
            return Err(QsmError::AlgebraMismatch(
                "element not in the seminorm's algebra".into(),
            ));
        }
        Ok(self.eval_unchecked(a))
    }

    fn eval_unchecked(&self, a: &AlgebraElement) -> f64 {
        match &self.kind {
            SeminormKind::Lipschitz { space } => {
                let scale = 1.0 + a.operator_norm();
                let mut best = 0.0_f64;
                for x in 0..space.len() {
                    for y in (x + 1)..space.len() {
                        let diff = (a.value_at(x) - a.value_at(y)).norm();
                        let d = space.distance(x, y);
                        if d > 0.0 {
                            best = best.max(diff / d);
                        } else if diff > TOL_DOMAIN * scale {
                            return f64::INFINITY;
                        }
                    }
                }
                best
            }
            SeminormKind::GroupAction { action, lengths } => {
                let mut best = 0.0_f64;
                for g in 0..action.group().order() {
                    if g == action.group().identity() {
                        continue;
                    }
                    let moved = action.apply(g, a).expect("endomorphism");
                    best = best.max((&moved - a).operator_norm() / lengths[g]);
                }
                best
            }
            SeminormKind::QuotientOfNorm { norm } => quotient_min(norm, a),
            SeminormKind::StateMetric { metric } => {
                let mut best = 0.0_f64;
                for i in 0..metric.len() {
                    for j in (i + 1)..metric.len() {
                        let d = metric.distance(i, j);
                        if d > 0.0 {
                            let mi = metric.probes()[i].pairing(a).expect("same algebra");
                            let mj = metric.probes()[j].pairing(a).expect("same algebra");
                            best = best.max((mi - mj).norm() / d);
                        }
                    }
                }
                best
            }
            SeminormKind::Scaled { base, factor } => factor * base.eval_unchecked(a),
        }
    }

    /// Polyhedral representation over self-adjoint coordinates, when the
    /// seminorm is a finite max of `|functional|/bound` ratios.
    pub fn linear_rep(&self) -> Option<LinearRep> {
        match &self.kind {
            SeminormKind::Lipschitz { space } => {
                let n = space.len();
                let dim = self.algebra.dim();
                let mut bounded = Vec::new();
                let mut zero = Vec::new();
                for x in 0..n {
                    for y in (x + 1)..n {
                        let mut g = RVec::zeros(dim);
                        g[x] = 1.0;
                        g[y] = -1.0;
                        let d = space.distance(x, y);
                        if d > 0.0 {
                            bounded.push((g, d));
                        } else {
                            zero.push(g);
                        }
                    }
                }
                Some(LinearRep { bounded, zero })
            }
            SeminormKind::StateMetric { metric } => {
                let mut bounded = Vec::new();
                let mut zero = Vec::new();
                for i in 0..metric.len() {
                    for j in (i + 1)..metric.len() {
                        let gi = metric.probes()[i].sa_functional_coords();
                        let gj = metric.probes()[j].sa_functional_coords();
                        let g = gi - gj;
                        let d = metric.distance(i, j);
                        if d > 0.0 {
                            bounded.push((g, d));
                        } else if g.norm() > 1e-12 {
                            zero.push(g);
                        }
                    }
                }
                Some(LinearRep { bounded, zero })
            }
            SeminormKind::Scaled { base, factor } => base.linear_rep().map(|rep| LinearRep {
                bounded: rep
                    .bounded
                    .into_iter()
                    .map(|(g, b)| (g, b / factor))
                    .collect(),
                zero: rep.zero,
            }),
            _ => None,
        }
    }

    /// Functionals over self-adjoint coordinates that must vanish for an
    /// element to belong to the seminorm's domain.
    pub fn domain_zero_rows(&self) -> Vec<RVec> {
        match self.linear_rep() {
            Some(rep) => rep.zero,
            None => Vec::new(),
        }
    }

    /// Whether an element lies in the domain: finite seminorm value plus
    /// agreement on every zero-distance constraint (checked on the Hermitian
    /// and anti-Hermitian parts separately).
    pub fn domain_contains(&self, a: &AlgebraElement) -> Result<bool> {
        if a.algebra() != &self.algebra {
            return Err(QsmError::AlgebraMismatch(
                "element not in the seminorm's algebra".into(),
            ));
        }
        if !self.eval_unchecked(a).is_finite() {
            return Ok(false);
        }
        let scale = 1.0 + a.operator_norm();
        // a = h + i·k with h, k Hermitian; both parts must satisfy the
        // zero-distance constraints.
        let h = a.hermitian_part().sa_coords();
        let k = (a - &a.adjoint())
            .scale_complex(num_complex::Complex64::new(0.0, -0.5))
            .sa_coords();
        for row in self.domain_zero_rows() {
            if row.dot(&h).abs() > TOL_DOMAIN * scale || row.dot(&k).abs() > TOL_DOMAIN * scale {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Dimension of `{h self-adjoint : L(h) = 0 and h in the domain}`.
    /// The scalar axiom holds exactly when this is 1 (the span of the unit).
    pub fn null_space_dim(&self) -> usize {
        match &self.kind {
            SeminormKind::QuotientOfNorm { .. } => 1,
            SeminormKind::GroupAction { action, .. } => {
                kernel_basis(&action.fixed_space_rows(), TOL_RANK).len()
            }
            SeminormKind::Scaled { base, .. } => base.null_space_dim(),
            _ => {
                let rep = self.linear_rep().expect("pair kinds are polyhedral");
                let dim = self.algebra.dim();
                let total = rep.bounded.len() + rep.zero.len();
                if total == 0 {
                    return dim;
                }
                let mut rows = RMat::zeros(total, dim);
                for (r, (g, _)) in rep.bounded.iter().enumerate() {
                    rows.set_row(r, &g.transpose());
                }
                for (r, g) in rep.zero.iter().enumerate() {
                    rows.set_row(rep.bounded.len() + r, &g.transpose());
                }
                kernel_basis(&rows, TOL_RANK).len()
            }
        }
    }

    /// Orthonormal basis (in self-adjoint coordinates) of the domain subspace
    /// modulo the scalars.
    pub fn domain_basis_mod_unit(&self) -> Vec<RVec> {
        let dim = self.algebra.dim();
        let unit = self.algebra.unit().sa_coords();
        let zero_rows = self.domain_zero_rows();
        let mut rows = RMat::zeros(zero_rows.len() + 1, dim);
        for (r, g) in zero_rows.iter().enumerate() {
            rows.set_row(r, &g.transpose());
        }
        rows.set_row(zero_rows.len(), &(unit.transpose() / unit.norm()));
        kernel_basis(&rows, TOL_RANK)
    }

    /// Natural candidate directions for the ratio engines: the distance
    /// functions `x ↦ d(x₀, x)` (which attain the point-mass suprema) and,
    /// for small spaces, the distance-to-set functions `min_{x∈S} d(x, ·)`
    /// (extreme-ray material of the Lipschitz unit ball).
    pub fn suggested_directions(&self) -> Vec<AlgebraElement> {
        match &self.kind {
            SeminormKind::Lipschitz { space } => {
                let n = space.len();
                let mut out: Vec<AlgebraElement> = (0..n)
                    .map(|x| {
                        let vals: Vec<f64> = (0..n).map(|y| space.distance(x, y)).collect();
                        AlgebraElement::from_real_function(&self.algebra, &vals)
                            .expect("commutative")
                    })
                    .collect();
                if n <= 8 {
                    for mask in 1u32..((1 << n) - 1) {
                        if mask.count_ones() < 2 {
                            continue;
                        }
                        let vals: Vec<f64> = (0..n)
                            .map(|y| {
                                (0..n)
                                    .filter(|x| mask & (1 << x) != 0)
                                    .map(|x| space.distance(x, y))
                                    .fold(f64::INFINITY, f64::min)
                            })
                            .collect();
                        out.push(
                            AlgebraElement::from_real_function(&self.algebra, &vals)
                                .expect("commutative"),
                        );
                    }
                }
                out
            }
            SeminormKind::StateMetric { metric } => match metric.point_mass_reduction() {
                Some(space) => (0..space.len())
                    .map(|x| {
                        let vals: Vec<f64> =
                            (0..space.len()).map(|y| space.distance(x, y)).collect();
                        AlgebraElement::from_real_function(&self.algebra, &vals)
                            .expect("commutative")
                    })
                    .collect(),
                None => Vec::new(),
            },
            SeminormKind::Scaled { base, .. } => base.suggested_directions(),
            _ => Vec::new(),
        }
    }
}

/// `inf_λ N(a + λ1)` by convex minimization over `λ ∈ ℂ` (real line only when
/// `a` is self-adjoint, where a real minimizer always exists).
fn quotient_min(norm: &NormDescriptor, a: &AlgebraElement) -> f64 {
    let algebra = a.algebra();
    let unit = algebra.unit();
    let n_unit = norm.value(&unit).max(1e-12);
    let n_a = norm.value(a);
    if n_a == 0.0 {
        return 0.0;
    }
    let bracket = (a.operator_norm() + n_a).max(2.0 * n_a / n_unit) + 1.0;
    let value_at = |re: f64, im: f64| {
        let shifted = a + &unit.scale_complex(num_complex::Complex64::new(re, im));
        norm.value(&shifted)
    };
    if a.is_self_adjoint(1e-12 * (1.0 + a.operator_norm())) {
        let (_, v) = golden_section_min(|t| value_at(t, 0.0), -bracket, bracket, 1e-11, 400);
        return v;
    }
    // Cyclic coordinate descent, then a compass polish for nonsmooth norms.
    let (mut re, mut im) = (0.0_f64, 0.0_f64);
    let mut best = value_at(re, im);
    for _ in 0..40 {
        let (r, _) = golden_section_min(|t| value_at(t, im), -bracket, bracket, 1e-12, 300);
        re = r;
        let (i, v) = golden_section_min(|t| value_at(re, t), -bracket, bracket, 1e-12, 300);
        im = i;
        if best - v < 1e-13 {
            best = best.min(v);
            break;
        }
        best = v;
    }
    let mut step = bracket / 4.0;
    while step > 1e-12 {
        let mut improved = false;
        for (dr, di) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = value_at(re + dr, im + di);
            if v < best - 1e-15 {
                re += dr;
                im += di;
                best = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Estimate of the radius `R = sup ‖a‖~ / L(a)` over the domain modulo
/// scalars, where `‖·‖~` is the quotient of the operator norm.
///
/// Finiteness is certified by the null-space rank test (in finite dimension a
/// positive seminorm on the compact quotient sphere is bounded away from
/// zero); the numeric value is a grid-plus-ascent estimate.
#[derive(Debug, Clone)]
pub struct RadiusResult {
    pub value: f64,
    pub certified: bool,
}

pub fn seminorm_radius(l: &Seminorm, opts: &RatioOptions) -> Result<RadiusResult> {
    let basis = l.domain_basis_mod_unit();
    if basis.is_empty() {
        // Domain is the scalars only: the quotient ball is a point.
        return Ok(RadiusResult {
            value: 0.0,
            certified: true,
        });
    }
    if l.null_space_dim() != 1 {
        return Ok(RadiusResult {
            value: f64::INFINITY,
            certified: false,
        });
    }
    let algebra = l.algebra().clone();
    let dim = algebra.dim();
    let commutative = algebra.is_commutative();
    // Precompute once: the basis as a matrix over self-adjoint coordinates,
    // the basis directions as elements, and the polyhedral rows if any.
    let basis_mat = {
        let mut m = RMat::zeros(dim, basis.len());
        for (k, b) in basis.iter().enumerate() {
            m.set_column(k, b);
        }
        m
    };
    let basis_elems: Vec<AlgebraElement> = basis
        .iter()
        .map(|b| AlgebraElement::from_sa_coords(&algebra, b))
        .collect();
    let rep = l.linear_rep();
    let objective = |coords: &RVec| {
        let sa = &basis_mat * coords;
        let denom = match &rep {
            Some(rep) => {
                let mut den = 0.0_f64;
                for (g, b) in &rep.bounded {
                    den = den.max(g.dot(&sa).abs() / b);
                }
                den
            }
            None => {
                let mut elem = algebra.zero();
                for (k, bk) in basis_elems.iter().enumerate() {
                    if coords[k] != 0.0 {
                        elem = &elem + &bk.scale(coords[k]);
                    }
                }
                l.eval_unchecked_pub(&elem)
            }
        };
        if !denom.is_finite() || denom <= 1e-14 {
            return 0.0;
        }
        let spread = if commutative {
            // Self-adjoint coordinates of a commutative algebra are the
            // function values themselves.
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for v in sa.iter() {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
            (hi - lo) / 2.0
        } else {
            let mut elem = algebra.zero();
            for (k, bk) in basis_elems.iter().enumerate() {
                if coords[k] != 0.0 {
                    elem = &elem + &bk.scale(coords[k]);
                }
            }
            half_spectral_spread(&elem)
        };
        spread / denom
    };
    let seeds: Vec<RVec> = l
        .suggested_directions()
        .iter()
        .filter_map(|e| project_to_basis(&e.sa_coords(), &basis))
        .collect();
    let (value, _) = ratio_search(basis.len(), &objective, &seeds, opts);
    Ok(RadiusResult {
        value,
        certified: true,
    })
}

impl Seminorm {
    /// Internal evaluation without the algebra check (hot path for engines).
    pub(crate) fn eval_unchecked_pub(&self, a: &AlgebraElement) -> f64 {
        self.eval_unchecked(a)
    }
}

/// Quotient operator norm of a self-adjoint element: `(λ_max − λ_min)/2`
/// over all blocks jointly.
pub(crate) fn half_spectral_spread(a: &AlgebraElement) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in a.mats() {
        let eigs = hermitian_eigenvalues(m);
        if let (Some(&first), Some(&last)) = (eigs.first(), eigs.last()) {
            lo = lo.min(first);
            hi = hi.max(last);
        }
    }
    if lo.is_finite() && hi.is_finite() {
        (hi - lo) / 2.0
    } else {
        0.0
    }
}

pub(crate) fn project_to_basis(sa: &RVec, basis: &[RVec]) -> Option<RVec> {
    let mut coords = RVec::zeros(basis.len());
    for (k, b) in basis.iter().enumerate() {
        coords[k] = b.dot(sa);
    }
    let norm = coords.norm();
    if norm > 1e-10 {
        Some(coords / norm)
    } else {
        None
    }
}

/// A compact quantum (semi-)metric structure: an algebra, a seminorm with its
/// domain, the radius certificate, and the axiom report.
#[derive(Debug, Clone)]
pub struct QSMStructure {
    seminorm: Seminorm,
    radius: RadiusResult,
    qm: bool,
    degenerate: bool,
    report: ValidationReport,
}

impl QSMStructure {
    /// Run the axiom checks and cache the radius certificate.
    pub fn build(seminorm: Seminorm, sample_count: usize, seed: u64) -> Result<Self> {
        let opts = RatioOptions {
            seed,
            ..RatioOptions::default()
        };
        let (report, qm) = check_qsm_axioms(&seminorm, sample_count, seed, &opts);
        let radius = seminorm_radius(&seminorm, &opts)?;
        let degenerate = seminorm
            .linear_rep()
            .map(|rep| rep.bounded.is_empty())
            .unwrap_or(false);
        Ok(Self {
            seminorm,
            radius,
            qm,
            degenerate,
            report,
        })
    }

    pub fn seminorm(&self) -> &Seminorm {
        &self.seminorm
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        self.seminorm.algebra()
    }

    pub fn radius(&self) -> &RadiusResult {
        &self.radius
    }

    pub fn is_quantum_metric(&self) -> bool {
        self.qm
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn axioms_pass(&self) -> bool {
        ["qsm.a", "qsm.b", "qsm.c"]
            .iter()
            .all(|id| self.report.find(id).map(|c| c.passed).unwrap_or(false))
    }
}

/// Axiom report for a seminorm, plus the quantum-metric flag:
/// * `qsm.a` — adjoint invariance on random samples;
/// * `qsm.b` — the null space (within the domain) is exactly the scalars,
///   by rank computation;
/// * `qsm.c` — finite radius certificate;
/// * `qsm.qm` — informational: whether the domain spans the whole algebra
///   (the quantum-metric case, returned as the second value);
/// plus homogeneity/subadditivity/unit spot checks.
pub fn check_qsm_axioms(
    l: &Seminorm,
    sample_count: usize,
    seed: u64,
    opts: &RatioOptions,
) -> (ValidationReport, bool) {
    let mut report = ValidationReport::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algebra = l.algebra().clone();

    let unit_val = l.eval_unchecked_pub(&algebra.unit());
    report.push(CheckItem::residual_le(
        "seminorm.unit",
        unit_val,
        1e-9,
        "L(1) = 0",
    ));

    let mut star_res = 0.0_f64;
    let mut homog_res = 0.0_f64;
    let mut subadd_res = 0.0_f64;
    for _ in 0..sample_count.max(4) {
        let a = algebra.random_element(&mut rng);
        let b = algebra.random_element(&mut rng);
        let la = l.eval_unchecked_pub(&a);
        let lastar = l.eval_unchecked_pub(&a.adjoint());
        if la.is_finite() || lastar.is_finite() {
            star_res = star_res.max((la - lastar).abs());
        }
        let t = 0.25 + 3.0 * rng.gen::<f64>();
        let lta = l.eval_unchecked_pub(&a.scale(t));
        if la.is_finite() {
            homog_res = homog_res.max((lta - t * la).abs() / (1.0 + t * la));
        }
        let lb = l.eval_unchecked_pub(&b);
        let lab = l.eval_unchecked_pub(&(&a + &b));
        if la.is_finite() && lb.is_finite() {
            subadd_res = subadd_res.max((lab - la - lb).max(0.0) / (1.0 + la + lb));
        }
    }
    report.push(CheckItem::residual_le(
        "qsm.a",
        star_res,
        1e-9,
        "L(a) = L(a*) on samples",
    ));
    report.push(CheckItem::residual_le(
        "seminorm.homogeneous",
        homog_res,
        1e-9,
        "L(t·a) = t·L(a) on samples",
    ));
    report.push(CheckItem::residual_le(
        "seminorm.subadditive",
        subadd_res,
        1e-9,
        "L(a+b) ≤ L(a)+L(b) on samples",
    ));

    let null_dim = l.null_space_dim();
    report.push(CheckItem::new(
        "qsm.b",
        null_dim == 1,
        Some(null_dim as f64 - 1.0),
        format!("null space dimension {null_dim} (must be 1: the scalars)"),
    ));

    match seminorm_radius(l, opts) {
        Ok(r) => {
            report.push(CheckItem::new(
                "qsm.c",
                r.certified && r.value.is_finite(),
                None,
                format!("radius estimate {:.6e}, certified {}", r.value, r.certified),
            ));
        }
        Err(e) => report.push(CheckItem::new("qsm.c", false, None, format!("{e}"))),
    }

    // QM: the domain subspace is everything and the seminorm is finite on a
    // spanning set.
    let dim = algebra.dim();
    let zero_rows = l.domain_zero_rows();
    let domain_dim = if zero_rows.is_empty() {
        dim
    } else {
        let mut rows = RMat::zeros(zero_rows.len(), dim);
        for (r, g) in zero_rows.iter().enumerate() {
            rows.set_row(r, &g.transpose());
        }
        kernel_basis(&rows, TOL_RANK).len()
    };
    let finite_on_basis = algebra
        .hermitian_basis()
        .iter()
        .all(|h| l.eval_unchecked_pub(h).is_finite());
    let qm = domain_dim == dim && finite_on_basis;
    report.push(CheckItem::new(
        "qsm.qm",
        true,
        None,
        format!(
            "domain dimension {domain_dim} of {dim}: {}",
            if qm { "quantum metric" } else { "semi-metric only" }
        ),
    ));

    (report, qm)
}
