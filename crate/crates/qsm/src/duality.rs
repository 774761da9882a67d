//! Distance engines for `ρ_L(μ,ν) = sup{ |μ(a)−ν(a)| : L(a) ≤ 1 }`.
//!
//! Three routes:
//! * [`rho_lp_dual`] — exact linear programming, available whenever the
//!   seminorm has a polyhedral representation over self-adjoint coordinates
//!   (finite Lipschitz seminorms and probe-metric seminorms). The classic
//!   case is a commutative algebra with a Lipschitz seminorm, where the
//!   program is `max Σ (μ_x−ν_x) a_x` subject to `a_x − a_y ≤ d(x,y)`.
//! * [`kantorovich_primal`] — the transport formulation (minimize moved mass
//!   times distance subject to the two marginals), used as an independent
//!   oracle against the dual LP.
//! * [`rho_ratio`] — a generic lower-bound engine maximizing
//!   `|μ(a)−ν(a)| / L(a)` over unit directions in the self-adjoint part of
//!   the seminorm's domain modulo scalars, by a deterministic
//!   low-discrepancy grid with coordinate and hill-climb refinement.
//!
//! The reduction to self-adjoint elements loses nothing: for any `a` pick a
//! phase `θ` making `e^{iθ}(μ−ν)(a)` real; `b = Re(e^{iθ}a)` satisfies
//! `L(b) ≤ L(a)` (adjoint invariance plus subadditivity) and pairs to the
//! same absolute value.

use crate::algebra::{AlgebraElement, StarHomomorphism};
use crate::classical::SemiMetricSpace;
use crate::error::{QsmError, Result};
use crate::linalg::{golden_section_min, standard_normal, weyl_sphere, RMat, RVec};
use crate::seminorms::Seminorm;
use crate::simplex::{solve, LpOutcome, StandardLp};
use crate::states::State;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// LP pivot tolerance (feasibility and optimality).
pub const TOL_LP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LpDual,
    LpPrimal,
    RatioGrid,
}

#[derive(Debug, Clone)]
pub enum Witness {
    /// Optimal element (dual LP) or best direction (ratio engine).
    Element(AlgebraElement),
    /// Optimal transport plan (primal LP).
    Plan(RMat),
    None,
}

/// Outcome of a distance computation. `exact` distinguishes LP-certified
/// values from ratio-engine lower bounds.
#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub value: f64,
    pub exact: bool,
    pub method: Method,
    pub witness: Witness,
    /// Disagreement between the reported value and re-evaluating the witness.
    pub residual: f64,
    pub note: Option<String>,
}

impl DistanceResult {
    fn exact_zero(method: Method) -> Self {
        Self {
            value: 0.0,
            exact: true,
            method,
            witness: Witness::None,
            residual: 0.0,
            note: None,
        }
    }
}

/// Options for the ratio engine (all randomness is seeded).
#[derive(Debug, Clone)]
pub struct RatioOptions {
    /// Base number of low-discrepancy grid directions.
    pub grid: usize,
    /// Random-direction line searches per refinement start.
    pub refine_steps: usize,
    /// Coordinate-ascent sweeps per refinement start.
    pub sweeps: usize,
    /// Number of grid candidates kept for refinement.
    pub restarts: usize,
    /// Quotient dimensions above this cap fall back to sampled directions.
    pub dim_cap: usize,
    /// Rounds of polytope polish (polyhedral seminorms only).
    pub polish_rounds: usize,
    /// Ranked seed-function starts fed to the polish.
    pub polish_seed_starts: usize,
    /// Jittered restarts per polish round.
    pub polish_jitters: usize,
    pub seed: u64,
}

impl Default for RatioOptions {
    fn default() -> Self {
        Self {
            grid: 512,
            refine_steps: 120,
            sweeps: 6,
            restarts: 5,
            dim_cap: 16,
            polish_rounds: 4,
            polish_seed_starts: 20,
            polish_jitters: 10,
            seed: 0,
        }
    }
}

impl RatioOptions {
    /// A small budget for inequality checks, where the engine value only
    /// needs to be a sound lower bound, not a tight one.
    pub fn cheap(seed: u64) -> Self {
        Self {
            grid: 96,
            refine_steps: 30,
            sweeps: 3,
            restarts: 2,
            dim_cap: 16,
            polish_rounds: 1,
            polish_seed_starts: 4,
            polish_jitters: 2,
            seed,
        }
    }
}

/// Deterministic maximization of a scale-free objective over the unit sphere
/// of `R^dim`: low-discrepancy grid (densified in very low dimension), axis
/// and axis-pair candidates, caller-supplied seed directions, then coordinate
/// golden-section ascent plus seeded hill climbing from the best starts.
pub(crate) fn ratio_search(
    dim: usize,
    f: &dyn Fn(&RVec) -> f64,
    seeds: &[RVec],
    opts: &RatioOptions,
) -> (f64, RVec) {
    if dim == 0 {
        return (0.0, RVec::zeros(0));
    }
    let mut candidates: Vec<RVec> = Vec::new();
    for s in seeds {
        let n = s.norm();
        if n > 1e-12 {
            candidates.push(s / n);
        }
    }
    for i in 0..dim {
        let mut e = RVec::zeros(dim);
        e[i] = 1.0;
        candidates.push(e.clone());
        candidates.push(-e);
    }
    if dim <= 12 {
        for i in 0..dim {
            for j in (i + 1)..dim {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0)] {
                    let mut e = RVec::zeros(dim);
                    e[i] = si;
                    e[j] = sj;
                    candidates.push(e / 2.0_f64.sqrt());
                }
            }
        }
    }
    let grid_count = if dim <= 3 {
        opts.grid * 8
    } else if dim <= 8 {
        opts.grid * 4
    } else {
        opts.grid
    };
    candidates.extend(weyl_sphere(dim, grid_count));

    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(k, u)| (f(u), k))
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    if let Some(&(best, k)) = scored.first() {
        if best.is_infinite() {
            return (best, candidates[k].clone());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut global_best = (0.0_f64, RVec::zeros(dim));
    for &(start_val, k) in scored.iter().take(opts.restarts.max(1)) {
        let (best, u) = refine_on_sphere(f, candidates[k].clone(), start_val, opts, &mut rng);
        if best > global_best.0 {
            global_best = (best, u);
        }
    }
    global_best
}

/// Golden line search through a point on the sphere. Restricted to a line,
/// the objective is unimodal on each sign region of the numerator, so two
/// brackets cover it; improvements only.
fn sphere_line_search(f: &dyn Fn(&RVec) -> f64, u: &mut RVec, best: &mut f64, g: &RVec) -> bool {
    let base = u.clone();
    let eval_t = |t: f64| {
        let v = &base + g * t;
        let n = v.norm();
        if n < 1e-12 {
            return f64::INFINITY; // for the minimizer of -f
        }
        -f(&(v / n))
    };
    let mut improved = false;
    for (lo, hi) in [(-1.4, 0.0), (0.0, 1.4)] {
        let (t, neg_val) = golden_section_min(eval_t, lo, hi, 1e-10, 64);
        if -neg_val > *best + 1e-15 {
            *best = -neg_val;
            let v = &base + g * t;
            *u = &v / v.norm();
            improved = true;
        }
    }
    improved
}

/// Coordinate sweeps plus seeded random-direction line searches from one
/// start; returns the improved `(value, point)`.
fn refine_on_sphere(
    f: &dyn Fn(&RVec) -> f64,
    start: RVec,
    start_val: f64,
    opts: &RatioOptions,
    rng: &mut ChaCha8Rng,
) -> (f64, RVec) {
    let dim = start.len();
    let mut u = start;
    let mut best = start_val;
    for sweep in 0..opts.sweeps {
        let mut improved = false;
        for i in 0..dim {
            let mut e = RVec::zeros(dim);
            e[i] = 1.0;
            improved |= sphere_line_search(f, &mut u, &mut best, &e);
        }
        if sweep > 0 && !improved {
            break;
        }
    }
    for _ in 0..opts.refine_steps {
        let mut g = RVec::zeros(dim);
        for x in g.iter_mut() {
            *x = standard_normal(rng);
        }
        let n = g.norm();
        if n > 1e-12 {
            sphere_line_search(f, &mut u, &mut best, &(g / n));
        }
    }
    (best, u)
}

fn sa_functional_diff(mu: &State, nu: &State) -> RVec {
    mu.sa_functional_coords() - nu.sa_functional_coords()
}

/// Cyclic bound-tightening on `{x : |gₖ·x| ≤ bₖ}` maximizing `w·x`: each
/// coordinate moves to the end of its feasible interval favored by `w`.
/// Fixed points are coordinatewise-maximal vertices, which on transport-type
/// polytopes are (near-)optimal; the result is always feasible, so the
/// produced ratio stays a certified lower bound. Returns `None` when a
/// coordinate is unbounded in a direction `w` cares about (an infinite
/// distance direction).
fn polytope_ascent(
    rows: &[(RVec, f64)],
    w: &RVec,
    start: &RVec,
    sweeps: usize,
    order_seed: u64,
) -> Option<RVec> {
    let dim = w.len();
    let mut a = start.clone();
    // Scale into the feasible region first.
    let mut scale = 1.0_f64;
    for (g, b) in rows {
        let v = g.dot(&a).abs();
        if *b > 0.0 {
            scale = scale.max(v / b);
        } else if v > 1e-12 {
            return Some(RVec::zeros(dim)); // start violates an equality row
        }
    }
    if scale > 1.0 {
        a /= scale;
    }
    // The visiting order steers which vertex a sweep converges to; shuffle
    // it per restart so different restarts explore different corners.
    let mut order: Vec<usize> = (0..dim).collect();
    let mut pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| ((i + 1)..dim).map(move |j| (i, j)))
        .collect();
    if order_seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        for i in (1..pairs.len()).rev() {
            pairs.swap(i, rng.gen_range(0..=i));
        }
    }
    // Weights below this are numerical zeros of μ−ν, not real directions.
    let w_eps = 1e-12 * (1.0 + w.amax());
    // Phase 1: single-coordinate interval moves.
    for _ in 0..sweeps {
        let mut improved = false;
        for &i in &order {
            if w[i].abs() <= w_eps {
                continue;
            }
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (g, b) in rows {
                let gi = g[i];
                if gi.abs() < 1e-14 {
                    continue;
                }
                let rest = g.dot(&a) - gi * a[i];
                let t1 = (-b - rest) / gi;
                let t2 = (b - rest) / gi;
                lo = lo.max(t1.min(t2));
                hi = hi.min(t1.max(t2));
            }
            let target = if w[i] > 0.0 { hi } else { lo };
            if target.is_infinite() {
                return None;
            }
            if (w[i] > 0.0 && target > a[i] + 1e-15) || (w[i] < 0.0 && target < a[i] - 1e-15) {
                a[i] = target;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    // Phase 2: exact two-coordinate moves (each an O(rows²) planar LP),
    // which escape the single-coordinate ridge stalls of transport duals.
    for _ in 0..sweeps {
        let mut improved = false;
        for &(i, j) in &pairs {
            if w[i].abs() <= w_eps && w[j].abs() <= w_eps {
                continue;
            }
            match planar_move(rows, w, &mut a, i, j, w_eps) {
                Some(moved) => improved |= moved,
                None => return None,
            }
        }
        if !improved {
            break;
        }
    }
    Some(a)
}

/// Exact planar LP in coordinates `(i, j)` with the rest of `a` frozen:
/// walk every constraint boundary line, maximize the objective along the
/// feasible segment of that line, and keep the best improvement.
/// Returns whether the point moved, or `None` on an unbounded direction.
fn planar_move(
    rows: &[(RVec, f64)],
    w: &RVec,
    a: &mut RVec,
    i: usize,
    j: usize,
    w_eps: f64,
) -> Option<bool> {
    // Relevant halfplanes: |gi·s + gj·t + rest| ≤ b.
    let mut planes: Vec<(f64, f64, f64, f64)> = Vec::new(); // (gi, gj, rest, b)
    for (g, b) in rows {
        let gi = g[i];
        let gj = g[j];
        if gi.abs() < 1e-14 && gj.abs() < 1e-14 {
            continue;
        }
        let rest = g.dot(a) - gi * a[i] - gj * a[j];
        planes.push((gi, gj, rest, *b));
    }
    let obj = |s: f64, t: f64| w[i] * s + w[j] * t;
    let feasible = |s: f64, t: f64| {
        planes
            .iter()
            .all(|&(gi, gj, rest, b)| (gi * s + gj * t + rest).abs() <= b + 1e-9)
    };
    let mut best = (obj(a[i], a[j]), a[i], a[j]);
    if planes.is_empty() {
        // Nothing constrains the pair; any material weight is unbounded.
        return if w[i].abs() > w_eps || w[j].abs() > w_eps {
            None
        } else {
            Some(false)
        };
    }
    for &(gi, gj, rest, b) in &planes {
        for sigma in [1.0, -1.0] {
            // Boundary line: gi·s + gj·t = σ·b − rest, direction (−gj, gi).
            let norm2 = gi * gi + gj * gj;
            let c = sigma * b - rest;
            let (p_s, p_t) = (gi * c / norm2, gj * c / norm2);
            let (d_s, d_t) = (-gj, gi);
            let raw_slope = w[i] * d_s + w[j] * d_t;
            let slope = if raw_slope.abs() <= w_eps * (d_s.abs() + d_t.abs()) {
                0.0
            } else {
                raw_slope
            };
            // Feasible τ-interval along the line from the other planes.
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            let mut infeasible = false;
            for &(hi_g, hj_g, h_rest, h_b) in &planes {
                let dir = hi_g * d_s + hj_g * d_t;
                let at0 = hi_g * p_s + hj_g * p_t + h_rest;
                if dir.abs() < 1e-14 {
                    if at0.abs() > h_b + 1e-9 {
                        infeasible = true;
                        break;
                    }
                    continue;
                }
                let t1 = (-h_b - at0) / dir;
                let t2 = (h_b - at0) / dir;
                lo = lo.max(t1.min(t2));
                hi = hi.min(t1.max(t2));
            }
            if infeasible || lo > hi + 1e-12 {
                continue;
            }
            let tau = if slope > 0.0 {
                hi
            } else if slope < 0.0 {
                lo
            } else {
                lo.max(0.0).min(hi)
            };
            if tau.is_infinite() {
                return None;
            }
            let (s, t) = (p_s + tau * d_s, p_t + tau * d_t);
            if feasible(s, t) && obj(s, t) > best.0 + 1e-15 {
                best = (obj(s, t), s, t);
            }
        }
    }
    let moved = best.1 != a[i] || best.2 != a[j];
    a[i] = best.1;
    a[j] = best.2;
    Some(moved)
}

/// Exact `ρ_L` by linear programming over the seminorm's polyhedral
/// representation: maximize `w·x` subject to `|gₖ·x| ≤ bₖ` and the
/// zero-distance equalities, with `x` ranging over self-adjoint coordinates.
///
/// Unboundedness means the two states separate a direction invisible to the
/// seminorm (a zero-distance pair); the distance is reported as `+∞`.
pub fn rho_lp_dual(mu: &State, nu: &State, l: &Seminorm) -> Result<DistanceResult> {
    if mu.algebra() != l.algebra() || nu.algebra() != l.algebra() {
        return Err(QsmError::AlgebraMismatch(
            "states and seminorm must share one algebra".into(),
        ));
    }
    let rep = l.linear_rep().ok_or_else(|| {
        QsmError::InvalidSeminorm(format!(
            "no polyhedral representation for kind {}",
            l.kind_name()
        ))
    })?;
    let dim = l.algebra().dim();
    let w = sa_functional_diff(mu, nu);
    if w.norm() < 1e-14 {
        return Ok(DistanceResult::exact_zero(Method::LpDual));
    }

    // Columns: p (dim), q (dim), one slack per inequality row.
    let n_rows = 2 * (rep.bounded.len() + rep.zero.len());
    let n_cols = 2 * dim + n_rows;
    let mut a = vec![vec![0.0; n_cols]; n_rows];
    let mut b = vec![0.0; n_rows];
    let mut row = 0;
    let push_row = |a: &mut Vec<Vec<f64>>, b: &mut Vec<f64>, g: &RVec, sign: f64, rhs: f64, row: usize| {
        for k in 0..dim {
            a[row][k] = sign * g[k];
            a[row][dim + k] = -sign * g[k];
        }
        a[row][2 * dim + row] = 1.0;
        b[row] = rhs;
    };
    for (g, bound) in &rep.bounded {
        push_row(&mut a, &mut b, g, 1.0, *bound, row);
        row += 1;
        push_row(&mut a, &mut b, g, -1.0, *bound, row);
        row += 1;
    }
    for g in &rep.zero {
        push_row(&mut a, &mut b, g, 1.0, 0.0, row);
        row += 1;
        push_row(&mut a, &mut b, g, -1.0, 0.0, row);
        row += 1;
    }
    let mut c = vec![0.0; n_cols];
    for k in 0..dim {
        c[k] = -w[k];
        c[dim + k] = w[k];
    }
    let lp = StandardLp { a, b, c };
    match solve(&lp, TOL_LP)? {
        LpOutcome::Unbounded => Ok(DistanceResult {
            value: f64::INFINITY,
            exact: true,
            method: Method::LpDual,
            witness: Witness::None,
            residual: 0.0,
            note: Some(
                "states separate a zero-distance pair: distance is infinite".into(),
            ),
        }),
        LpOutcome::Infeasible => Err(QsmError::LpFailure(
            "dual program reported infeasible with a feasible origin".into(),
        )),
        LpOutcome::Optimal { x, objective } => {
            let mut sa = RVec::zeros(dim);
            for k in 0..dim {
                sa[k] = x[k] - x[dim + k];
            }
            let witness = AlgebraElement::from_sa_coords(l.algebra(), &sa);
            let value = (-objective).max(0.0);
            let paired = (mu.pairing(&witness)? - nu.pairing(&witness)?).norm();
            Ok(DistanceResult {
                value,
                exact: true,
                method: Method::LpDual,
                witness: Witness::Element(witness),
                residual: (paired - value).abs(),
                note: None,
            })
        }
    }
}

/// Optimal-transport formulation: minimize `Σ π(x,y) d(x,y)` over couplings
/// with marginals `μ` and `ν` on a finite semi-metric space.
pub fn kantorovich_primal(
    mu: &State,
    nu: &State,
    space: &SemiMetricSpace,
) -> Result<DistanceResult> {
    let n = space.len();
    if !mu.algebra().is_commutative()
        || mu.algebra() != nu.algebra()
        || mu.algebra().num_blocks() != n
    {
        return Err(QsmError::AlgebraMismatch(
            "transport needs two states on C(X) for the given X".into(),
        ));
    }
    let p: Vec<f64> = (0..n).map(|x| mu.densities()[x][(0, 0)].re).collect();
    let q: Vec<f64> = (0..n).map(|x| nu.densities()[x][(0, 0)].re).collect();

    let mut a = vec![vec![0.0; n * n]; 2 * n];
    let mut b = vec![0.0; 2 * n];
    for x in 0..n {
        for y in 0..n {
            a[x][x * n + y] = 1.0;
            a[n + y][x * n + y] = 1.0;
        }
        b[x] = p[x];
    }
    for y in 0..n {
        b[n + y] = q[y];
    }
    let c: Vec<f64> = (0..n * n)
        .map(|k| space.distance(k / n, k % n))
        .collect();
    let lp = StandardLp { a, b, c };
    match solve(&lp, TOL_LP)? {
        LpOutcome::Optimal { x, objective } => {
            let plan = RMat::from_fn(n, n, |r, s| x[r * n + s]);
            let mut marginal_defect = 0.0_f64;
            for r in 0..n {
                marginal_defect = marginal_defect.max((plan.row(r).sum() - p[r]).abs());
                marginal_defect = marginal_defect.max((plan.column(r).sum() - q[r]).abs());
            }
            Ok(DistanceResult {
                value: objective,
                exact: true,
                method: Method::LpPrimal,
                witness: Witness::Plan(plan),
                residual: marginal_defect,
                note: None,
            })
        }
        LpOutcome::Infeasible => Err(QsmError::LpFailure(
            "transport marginals admit no coupling (are both inputs states?)".into(),
        )),
        LpOutcome::Unbounded => Err(QsmError::LpFailure(
            "transport program unbounded (negative distances?)".into(),
        )),
    }
}

/// Lower-bound engine: maximize `|μ(a)−ν(a)| / L(a)` over unit directions in
/// the self-adjoint domain modulo scalars. Exactness is not claimed; on
/// commutative Lipschitz inputs the result lands within 1% of the LP value
/// (acceptance-tested).
pub fn rho_ratio(
    mu: &State,
    nu: &State,
    l: &Seminorm,
    opts: &RatioOptions,
) -> Result<DistanceResult> {
    if mu.algebra() != l.algebra() || nu.algebra() != l.algebra() {
        return Err(QsmError::AlgebraMismatch(
            "states and seminorm must share one algebra".into(),
        ));
    }
    let w = sa_functional_diff(mu, nu);
    if w.norm() < 1e-14 {
        return Ok(DistanceResult::exact_zero(Method::RatioGrid));
    }
    let basis = l.domain_basis_mod_unit();
    let dim_q = basis.len();
    if dim_q == 0 {
        return Ok(DistanceResult::exact_zero(Method::RatioGrid));
    }
    let mut note = None;
    if dim_q > opts.dim_cap {
        note = Some(format!(
            "quotient dimension {dim_q} above cap {}: sampled directions only",
            opts.dim_cap
        ));
    }

    let algebra = l.algebra().clone();
    // Numerator weights in quotient coordinates: (μ−ν)(Σ cₖ bₖ) = Σ cₖ (w·bₖ).
    let mut wq = RVec::zeros(dim_q);
    for (k, bk) in basis.iter().enumerate() {
        wq[k] = w.dot(bk);
    }

    let rep = l.linear_rep();
    let basis_mat = {
        let mut m = RMat::zeros(algebra.dim(), dim_q);
        for (k, bk) in basis.iter().enumerate() {
            m.set_column(k, bk);
        }
        m
    };
    let basis_elems: Vec<AlgebraElement> = basis
        .iter()
        .map(|bk| AlgebraElement::from_sa_coords(&algebra, bk))
        .collect();

    let objective = |coords: &RVec| -> f64 {
        let num = wq.dot(coords).abs();
        let den = match &rep {
            Some(rep) => {
                let sa = &basis_mat * coords;
                let mut den = 0.0_f64;
                for (g, bound) in &rep.bounded {
                    den = den.max(g.dot(&sa).abs() / bound);
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
        if !den.is_finite() {
            return 0.0;
        }
        if den <= 1e-13 {
            return if num > 1e-10 { f64::INFINITY } else { 0.0 };
        }
        num / den
    };

    let mut seeds: Vec<RVec> = l
        .suggested_directions()
        .iter()
        .filter_map(|e| crate::seminorms::project_to_basis(&e.sa_coords(), &basis))
        .collect();
    if let Some(s) = crate::seminorms::project_to_basis(&w, &basis) {
        seeds.push(s);
    }

    let (mut value, mut best) = ratio_search(dim_q, &objective, &seeds, opts);

    // Polyhedral polish: bound-tightening vertices beat sphere search on
    // transport-type programs. Still a lower bound (iterates stay feasible).
    if let Some(rep) = &rep {
        if value.is_finite() {
            let mut rows: Vec<(RVec, f64)> = rep.bounded.clone();
            for g in &rep.zero {
                rows.push((g.clone(), 0.0));
            }
            let full_from = |coords: &RVec| &basis_mat * coords;
            let eval_sa = |a: &RVec| -> f64 {
                let mut den = 0.0_f64;
                for (g, b) in &rep.bounded {
                    den = den.max(g.dot(a).abs() / b);
                }
                for g in &rep.zero {
                    if g.dot(a).abs() > 1e-11 {
                        return 0.0;
                    }
                }
                if den <= 1e-13 {
                    return 0.0;
                }
                w.dot(a).abs() / den
            };
            let mut prng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x1f83_d9ab);
            let rounds = opts.polish_rounds.max(1);
            'rounds: for round in 0..rounds {
                if rounds > 1 && round == rounds - 1 && value.is_finite() {
                    // Cross a face the pairwise moves cannot: polish the
                    // incumbent on the sphere, then let the final ascent
                    // round re-converge from there.
                    let (v, u) = refine_on_sphere(&objective, best.clone(), value, opts, &mut prng);
                    if v > value {
                        value = v;
                        best = u;
                    }
                }
                let mut starts: Vec<RVec> = vec![full_from(&best)];
                if round == 0 {
                    if let Some(pw) = crate::seminorms::project_to_basis(&w, &basis) {
                        starts.push(full_from(&pw));
                    }
                    // Rank the seed family (distance and distance-to-set
                    // functions) by objective value and ascend from the top:
                    // deterministic and far better than sampling.
                    let mut ranked: Vec<(f64, usize)> = seeds
                        .iter()
                        .enumerate()
                        .map(|(k, s)| (objective(s), k))
                        .collect();
                    ranked.sort_by(|a, b| {
                        b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal)
                    });
                    for &(_, k) in ranked.iter().take(opts.polish_seed_starts) {
                        starts.push(full_from(&seeds[k]));
                    }
                }
                // Seeded perturbations of the incumbent escape tie stalls
                // (jittered inside the domain subspace, so equality rows
                // stay satisfied); later rounds recenter on the improvement.
                for k in 0..opts.polish_jitters {
                    let scale = if k % 2 == 0 { 0.15 } else { 0.6 };
                    let jitter =
                        RVec::from_fn(dim_q, |_, _| scale * standard_normal(&mut prng));
                    starts.push(full_from(&(&best + jitter)));
                }
                for start in &starts {
                    for sign in [1.0, -1.0] {
                        let w_signed = w.clone() * sign;
                        let order_seed: u64 = prng.gen();
                        match polytope_ascent(&rows, &w_signed, start, 80, order_seed) {
                            Some(a) => {
                                let v = eval_sa(&a);
                                if v > value {
                                    value = v;
                                    if let Some(pb) =
                                        crate::seminorms::project_to_basis(&a, &basis)
                                    {
                                        best = pb;
                                    }
                                }
                            }
                            None => {
                                value = f64::INFINITY;
                            }
                        }
                    }
                    if value.is_infinite() {
                        break 'rounds;
                    }
                }
            }
        }
    }
    let witness = if value.is_finite() && best.norm() > 0.0 {
        let sa = &basis_mat * &best;
        Witness::Element(AlgebraElement::from_sa_coords(&algebra, &sa))
    } else {
        Witness::None
    };
    let residual = match (&witness, value.is_finite()) {
        (Witness::Element(e), true) => {
            let paired = (mu.pairing(e)? - nu.pairing(e)?).norm();
            let lval = l.eval(e)?;
            if lval > 1e-13 && lval.is_finite() {
                (paired / lval - value).abs()
            } else {
                0.0
            }
        }
        _ => 0.0,
    };
    Ok(DistanceResult {
        value,
        exact: false,
        method: Method::RatioGrid,
        witness,
        residual,
        note,
    })
}

/// Engine dispatch: exact LP when the seminorm is polyhedral, ratio engine
/// otherwise.
pub fn rho(mu: &State, nu: &State, l: &Seminorm, opts: &RatioOptions) -> Result<DistanceResult> {
    if l.linear_rep().is_some() {
        rho_lp_dual(mu, nu, l)
    } else {
        rho_ratio(mu, nu, l, opts)
    }
}

/// `ρ_L(μ∘Φ, ν∘Φ)` for a validated homomorphism into the states' algebra.
pub fn rho_between_pullbacks(
    mu: &State,
    nu: &State,
    phi: &StarHomomorphism,
    l: &Seminorm,
    opts: &RatioOptions,
) -> Result<DistanceResult> {
    if phi.source() != l.algebra() {
        return Err(QsmError::AlgebraMismatch(
            "seminorm must live on the homomorphism source".into(),
        ));
    }
    let mu_back = mu.pullback(phi)?;
    let nu_back = nu.pullback(phi)?;
    rho(&mu_back, &nu_back, l, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteCStarAlgebra;
    use crate::classical::SemiMetricSpace;

    fn two_point_space(d: f64) -> SemiMetricSpace {
        SemiMetricSpace::new(RMat::from_row_slice(2, 2, &[0.0, d, d, 0.0])).unwrap()
    }

    fn dist_state(alg: &FiniteCStarAlgebra, p: &[f64]) -> State {
        State::from_distribution(alg, p).unwrap()
    }

    #[test]
    fn two_point_masses_recover_distance() {
        let space = two_point_space(2.0);
        let l = Seminorm::lipschitz(space).unwrap();
        let alg = l.algebra().clone();
        let d0 = State::point_mass(&alg, 0).unwrap();
        let d1 = State::point_mass(&alg, 1).unwrap();
        let r = rho_lp_dual(&d0, &d1, &l).unwrap();
        assert!(r.exact);
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn mixed_two_point_instance() {
        // Frozen by enumerating the two-variable LP vertices by hand:
        // |0.75·a0 + 0.25·a1 − 0.25·a0 − 0.75·a1| with |a0−a1| ≤ 1 gives 0.5.
        let space = two_point_space(1.0);
        let l = Seminorm::lipschitz(space).unwrap();
        let alg = l.algebra().clone();
        let mu = dist_state(&alg, &[0.75, 0.25]);
        let nu = dist_state(&alg, &[0.25, 0.75]);
        let r = rho_lp_dual(&mu, &nu, &l).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);

        let primal = kantorovich_primal(&mu, &nu, l.lipschitz_space().unwrap()).unwrap();
        assert!((primal.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn identical_states_have_zero_distance() {
        let space = two_point_space(1.0);
        let l = Seminorm::lipschitz(space).unwrap();
        let alg = l.algebra().clone();
        let mu = dist_state(&alg, &[0.3, 0.7]);
        assert_eq!(rho_lp_dual(&mu, &mu, &l).unwrap().value, 0.0);
        assert_eq!(
            kantorovich_primal(&mu, &mu, l.lipschitz_space().unwrap())
                .unwrap()
                .value,
            0.0
        );
        let r = rho_ratio(&mu, &mu, &l, &RatioOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn line_metric_transport() {
        let space = SemiMetricSpace::new(RMat::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0],
        ))
        .unwrap();
        let alg = FiniteCStarAlgebra::commutative(3).unwrap();
        let d0 = State::point_mass(&alg, 0).unwrap();
        let d2 = State::point_mass(&alg, 2).unwrap();
        let r = kantorovich_primal(&d0, &d2, &space).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ratio_engine_matches_lp_on_two_points() {
        let space = two_point_space(1.0);
        let l = Seminorm::lipschitz(space).unwrap();
        let alg = l.algebra().clone();
        let mu = dist_state(&alg, &[0.75, 0.25]);
        let nu = dist_state(&alg, &[0.25, 0.75]);
        let r = rho_ratio(&mu, &nu, &l, &RatioOptions::default()).unwrap();
        assert!(!r.exact);
        assert!((r.value - 0.5).abs() / 0.5 < 0.01);
    }

    #[test]
    fn pullback_through_identity_matches_direct() {
        let space = two_point_space(1.5);
        let l = Seminorm::lipschitz(space).unwrap();
        let alg = l.algebra().clone();
        let mu = dist_state(&alg, &[0.9, 0.1]);
        let nu = dist_state(&alg, &[0.2, 0.8]);
        let id = StarHomomorphism::identity(&alg);
        let direct = rho_lp_dual(&mu, &nu, &l).unwrap();
        let pulled = rho_between_pullbacks(&mu, &nu, &id, &l, &RatioOptions::default()).unwrap();
        assert!((direct.value - pulled.value).abs() < 1e-10);
    }

    #[test]
    fn zero_distance_pair_collapses_distance() {
        // d ≡ 0 between the two points: the domain is the functions constant
        // on the zero-class, so even distinct point masses are at distance 0.
        let space = two_point_space(0.0);
        let l = Seminorm::lipschitz(space).unwrap();
        let alg = l.algebra().clone();
        let d0 = State::point_mass(&alg, 0).unwrap();
        let d1 = State::point_mass(&alg, 1).unwrap();
        let r = rho_lp_dual(&d0, &d1, &l).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
