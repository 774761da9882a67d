//! Small dense linear-algebra helpers shared across the crate.
//!
//! Everything here operates on `nalgebra` dynamic matrices over `f64` or
//! `Complex<f64>`. Problem sizes are tiny (block sizes ≤ 8, coordinate
//! dimensions ≤ a few hundred), so plain dense SVD/eigen calls are fine.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Largest singular value (operator norm of a single matrix block).
/// Sizes 1 and 2 are handled analytically; they dominate the hot paths.
pub fn spectral_norm(m: &CMat) -> f64 {
    match (m.nrows(), m.ncols()) {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => m[(0, 0)].norm(),
        (2, 2) => {
            // σ_max² = (‖M‖_F² + √(‖M‖_F⁴ − 4|det M|²)) / 2.
            let f2 = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm_sqr();
            let disc = (f2 * f2 - 4.0 * det).max(0.0).sqrt();
            (0.5 * (f2 + disc)).max(0.0).sqrt()
        }
        _ => m
            .clone()
            .singular_values()
            .iter()
            .fold(0.0_f64, |acc, s| acc.max(*s)),
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut vals: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Frobenius distance from being Hermitian.
pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

/// Sum of singular values (trace norm); dual of the operator norm.
pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Numerical rank of a real matrix at the given singular-value tolerance.
pub fn rank(m: &RMat, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone()
        .singular_values()
        .iter()
        .filter(|s| **s > tol)
        .count()
}

/// Orthonormal basis of the kernel of a real matrix.
///
/// The matrix is zero-padded to at least `ncols` rows so the thin SVD
/// exposes the full right-singular space.
pub fn kernel_basis(m: &RMat, tol: f64) -> Vec<RVec> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    let rows = m.nrows().max(n);
    let mut padded = RMat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let mut basis = Vec::new();
    for i in 0..n {
        let s = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        if s <= tol {
            basis.push(v_t.row(i).transpose());
        }
    }
    basis
}

/// Orthonormal basis of the span of the given vectors.
pub fn orthonormal_span(vectors: &[RVec], tol: f64) -> Vec<RVec> {
    let mut basis: Vec<RVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let coeff = b.dot(&w);
            w -= b * coeff;
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / norm);
        }
    }
    basis
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
///
/// Returns `(argmin, min)`. The function need only be unimodal (convex is
/// enough); ties are resolved arbitrarily.
pub fn golden_section_min(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0;
    while (hi - lo).abs() > tol && iter < max_iter {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        iter += 1;
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Deterministic low-discrepancy directions on the unit sphere of `R^dim`.
///
/// A Weyl (Kronecker) sequence over `[0,1)^dim` is pushed through Box-Muller
/// pairs to approximate isotropic Gaussians, then normalized. Degenerate
/// points are skipped.
pub fn weyl_sphere(dim: usize, count: usize) -> Vec<RVec> {
    if dim == 0 {
        return Vec::new();
    }
    let alphas: Vec<f64> = (0..dim + 1)
        .map(|j| {
            let p = NTH_PRIMES[j % NTH_PRIMES.len()] as f64;
            p.sqrt().fract()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut k = 1usize;
    while out.len() < count && k < 64 * (count + 4) {
        let u: Vec<f64> = (0..dim + 1)
            .map(|j| (0.5 + (k as f64) * alphas[j]).fract())
            .collect();
        let mut g = RVec::zeros(dim);
        for i in 0..dim {
            // Box-Muller on consecutive coordinates, guarded away from 0.
            let u1 = u[i].max(1e-12);
            let u2 = u[i + 1];
            g[i] = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
        let norm = g.norm();
        if norm > 1e-9 {
            out.push(g / norm);
        }
        k += 1;
    }
    out
}

const NTH_PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// One standard normal draw via Box-Muller.
pub fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn spectral_norm_of_diag() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(-3.0, 0.0)]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_two_by_two_matches_svd() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m = CMat::from_fn(2, 2, |_, _| {
                c(standard_normal(&mut rng), standard_normal(&mut rng))
            });
            let fast = spectral_norm(&m);
            let slow = m
                .clone()
                .singular_values()
                .iter()
                .fold(0.0_f64, |a, s| a.max(*s));
            assert!((fast - slow).abs() < 1e-10 * (1.0 + slow));
        }
    }

    #[test]
    fn hermitian_eigenvalues_sorted() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let vals = hermitian_eigenvalues(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_of_difference_matrix() {
        // rows: x0 - x1, x1 - x2 over R^3; kernel = constants.
        let m = RMat::from_row_slice(2, 3, &[1.0, -1.0, 0.0, 0.0, 1.0, -1.0]);
        let basis = kernel_basis(&m, 1e-10);
        assert_eq!(basis.len(), 1);
        let b = &basis[0];
        assert!((b[0] - b[1]).abs() < 1e-10);
        assert!((b[1] - b[2]).abs() < 1e-10);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        // 1 row, 4 columns: kernel dimension 3 (needs the zero-padding path).
        let m = RMat::from_row_slice(1, 4, &[1.0, 1.0, 1.0, 1.0]);
        let basis = kernel_basis(&m, 1e-10);
        assert_eq!(basis.len(), 3);
        for b in &basis {
            assert!(b.iter().sum::<f64>().abs() < 1e-10);
        }
    }

    #[test]
    fn golden_section_finds_quadratic_min() {
        // Positional accuracy on smooth minima floors at √ε; the value is
        // quadratically better and is what callers consume.
        let (x, fx) = golden_section_min(|t| (t - 1.25) * (t - 1.25) + 0.5, -10.0, 10.0, 1e-12, 200);
        assert!((x - 1.25).abs() < 1e-6);
        assert!((fx - 0.5).abs() < 1e-12);
    }

    #[test]
    fn golden_section_piecewise_linear() {
        // min over t of max(|t|, |2 + t|) is 1 at t = -1.
        let (x, fx) = golden_section_min(
            |t| t.abs().max((2.0 + t).abs()),
            -10.0,
            10.0,
            1e-12,
            300,
        );
        assert!((x + 1.0).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weyl_directions_are_unit() {
        let dirs = weyl_sphere(5, 64);
        assert_eq!(dirs.len(), 64);
        for d in &dirs {
            assert!((d.norm() - 1.0).abs() < 1e-9);
        }
    }
}
