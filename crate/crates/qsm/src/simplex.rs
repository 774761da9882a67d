//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x ≥ 0` for the small dense programs this
//! crate generates (tens of rows/columns). Bland's pivoting rule rules out
//! cycling, so the method terminates on degenerate transport instances too.
//! No external solver is involved; distance values coming out of these
//! programs are exact up to the pivot tolerance.

use crate::error::{QsmError, Result};

/// `min c·x  s.t.  A x = b, x ≥ 0` in dense row-major form.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

const MAX_PIVOTS: usize = 200_000;

struct Tableau {
    /// Rows of `[B⁻¹A | B⁻¹b]`; the rhs is the last entry of each row.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    tol: f64,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        debug_assert!(piv.abs() > 0.0);
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        self.rows[row][col] = 1.0;
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, p) in r.iter_mut().zip(pivot_row.iter()) {
                    *v -= factor * p;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs for the given cost vector (recomputed each pivot; the
    /// tableaus here are far too small for incremental updates to matter).
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.rows.len();
        let mut r = cost.to_vec();
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..self.ncols {
                    r[j] -= cb * self.rows[i][j];
                }
            }
        }
        r
    }

    /// Bland's rule: lowest-index entering column, lowest-index leaving basic
    /// variable among ratio-test ties. Returns `Ok(true)` when optimal.
    fn run(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let reduced = self.reduced_costs(cost);
            let entering = (0..self.ncols)
                .find(|&j| allowed(j) && !self.basis.contains(&j) && reduced[j] < -self.tol);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > self.tol {
                    let ratio = self.rhs(i) / a;
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((best_i, best)) => {
                            if ratio < best - self.tol
                                || (ratio < best + self.tol
                                    && self.basis[i] < self.basis[best_i])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(false); // unbounded in the entering direction
            };
            self.pivot(row, col);
        }
        Err(QsmError::LpFailure("pivot limit exceeded".into()))
    }
}

/// Solve the program with feasibility/optimality tolerance `tol`.
pub fn solve(lp: &StandardLp, tol: f64) -> Result<LpOutcome> {
    let m = lp.a.len();
    let n = lp.c.len();
    for (i, row) in lp.a.iter().enumerate() {
        if row.len() != n {
            return Err(QsmError::ShapeMismatch(format!(
                "lp row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    if lp.b.len() != m {
        return Err(QsmError::ShapeMismatch("lp rhs length".into()));
    }
    if m == 0 {
        if lp.c.iter().any(|&cj| cj < -tol) {
            return Ok(LpOutcome::Unbounded);
        }
        return Ok(LpOutcome::Optimal {
            x: vec![0.0; n],
            objective: 0.0,
        });
    }

    // Tableau with one artificial per row; flip rows so b ≥ 0.
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for j in 0..n {
            row[j] = sign * lp.a[i][j];
        }
        row[n + i] = 1.0;
        row[ncols] = sign * lp.b[i];
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        ncols,
        tol,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![0.0; ncols];
    for cj in phase1_cost.iter_mut().skip(n) {
        *cj = 1.0;
    }
    let optimal = t.run(&phase1_cost, |_| true)?;
    debug_assert!(optimal, "phase 1 is bounded below by zero");
    let phase1_value: f64 = (0..t.rows.len())
        .filter(|&i| t.basis[i] >= n)
        .map(|i| t.rhs(i))
        .sum();
    if phase1_value > tol.max(1e-9) {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive zero-level artificials out; rows with no real pivot are redundant.
    let mut drop_rows = Vec::new();
    for i in 0..t.rows.len() {
        if t.basis[i] < n {
            continue;
        }
        let col = (0..n).find(|&j| t.rows[i][j].abs() > tol && !t.basis.contains(&j));
        match col {
            Some(j) => t.pivot(i, j),
            None => drop_rows.push(i),
        }
    }
    if !drop_rows.is_empty() {
        let mut keep_rows = Vec::new();
        let mut keep_basis = Vec::new();
        for i in 0..t.rows.len() {
            if !drop_rows.contains(&i) {
                keep_rows.push(t.rows[i].clone());
                keep_basis.push(t.basis[i]);
            }
        }
        t.rows = keep_rows;
        t.basis = keep_basis;
    }

    // Phase 2 over the original columns only.
    let mut phase2_cost = lp.c.clone();
    phase2_cost.resize(ncols, 0.0);
    let optimal = t.run(&phase2_cost, |j| j < n)?;
    if !optimal {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for i in 0..t.rows.len() {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(cj, xj)| cj * xj).sum();
    Ok(LpOutcome::Optimal { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(lp: &StandardLp) -> (Vec<f64>, f64) {
        match solve(lp, 1e-10).unwrap() {
            LpOutcome::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn one_constraint() {
        // min -x0 s.t. x0 + x1 = 1 → x0 = 1.
        let lp = StandardLp {
            a: vec![vec![1.0, 1.0]],
            b: vec![1.0],
            c: vec![-1.0, 0.0],
        };
        let (x, obj) = optimal(&lp);
        assert!((x[0] - 1.0).abs() < 1e-9);
        assert!((obj + 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let lp = StandardLp {
            a: vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            b: vec![1.0, 2.0],
            c: vec![0.0, 0.0],
        };
        assert!(matches!(solve(&lp, 1e-10).unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn detects_unbounded() {
        // min -x0 with only x1 pinned.
        let lp = StandardLp {
            a: vec![vec![0.0, 1.0]],
            b: vec![1.0],
            c: vec![-1.0, 0.0],
        };
        assert!(matches!(solve(&lp, 1e-10).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let lp = StandardLp {
            a: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            b: vec![1.0, 2.0],
            c: vec![1.0, 2.0],
        };
        let (x, obj) = optimal(&lp);
        assert!((x[0] - 1.0).abs() < 1e-9);
        assert!(obj.abs() - 1.0 < 1e-9);
    }

    #[test]
    fn tiny_transport_instance() {
        // Two sites, marginals (0.75, 0.25) → (0.25, 0.75), unit distance:
        // optimal cost moves 0.5 of mass, so 0.5.
        // Variables: pi00 pi01 pi10 pi11.
        let lp = StandardLp {
            a: vec![
                vec![1.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0, 0.0],
                vec![0.0, 1.0, 0.0, 1.0],
            ],
            b: vec![0.75, 0.25, 0.25, 0.75],
            c: vec![0.0, 1.0, 1.0, 0.0],
        };
        let (_, obj) = optimal(&lp);
        assert!((obj - 0.5).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // Same as one_constraint but with the row negated.
        let lp = StandardLp {
            a: vec![vec![-1.0, -1.0]],
            b: vec![-1.0],
            c: vec![-1.0, 0.0],
        };
        let (x, _) = optimal(&lp);
        assert!((x[0] - 1.0).abs() < 1e-9);
    }
}
