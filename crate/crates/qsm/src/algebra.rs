//! Finite-dimensional C*-algebras as direct sums of matrix blocks.
//!
//! An algebra is described by its block-dimension signature `(n₁,…,n_k)`,
//! standing for `M_{n₁}(ℂ) ⊕ … ⊕ M_{n_k}(ℂ)`. Commutative algebras are
//! exactly the ones with all blocks of size 1, i.e. functions on a finite
//! set. Elements carry one complex matrix per block.
//!
//! Coordinate convention (fixed once, used everywhere): each block is
//! flattened row-major, blocks are concatenated in order, so the coordinate
//! dimension is `Σ nᵢ²`. Tensor products list blocks in row-major pair order
//! `(i,j) ↦ i·k_B + j` with Kronecker products inside each pair, and the
//! coordinates of a tensor block are the row-major flattening of the
//! Kronecker product.

use crate::classical::SemiMetricSpace;
use crate::error::{QsmError, Result};
use crate::linalg::{hermitian_defect, spectral_norm, CMat, CVec};
use crate::report::{CheckItem, ValidationReport};
use num_complex::Complex64;
use rand::Rng;

/// Default tolerance for homomorphism validation.
pub const TOL_HOM: f64 = 1e-9;

/// Block-dimension signature of a finite-dimensional C*-algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteCStarAlgebra {
    blocks: Vec<usize>,
}

impl FiniteCStarAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(QsmError::InvalidAlgebra("no blocks".into()));
        }
        if blocks.iter().any(|&n| n == 0) {
            return Err(QsmError::InvalidAlgebra("zero-size block".into()));
        }
        Ok(Self { blocks })
    }

    /// Functions on a finite set with `n` points.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Full matrix algebra `M_n(ℂ)`.
    pub fn full_matrix(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }

    /// Coordinate dimension `Σ nᵢ²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Coordinate offset of block `i`.
    pub fn block_offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|n| n * n).sum()
    }

    /// Spatial tensor product: blocks `(nᵢ·mⱼ)` in row-major pair order.
    pub fn tensor(&self, other: &Self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .flat_map(|&n| other.blocks.iter().map(move |&m| n * m))
            .collect();
        Self { blocks }
    }

    pub fn zero(&self) -> AlgebraElement {
        let mats = self.blocks.iter().map(|&n| CMat::zeros(n, n)).collect();
        AlgebraElement {
            algebra: self.clone(),
            mats,
        }
    }

    /// The unit: identity matrix in every block.
    pub fn unit(&self) -> AlgebraElement {
        let mats = self.blocks.iter().map(|&n| CMat::identity(n, n)).collect();
        AlgebraElement {
            algebra: self.clone(),
            mats,
        }
    }

    /// Coordinate basis element `k` (a matrix unit in one block).
    pub fn basis_element(&self, k: usize) -> AlgebraElement {
        assert!(k < self.dim(), "basis index {k} out of range");
        let mut elem = self.zero();
        let (block, r, s) = self.unflatten_index(k);
        elem.mats[block][(r, s)] = Complex64::new(1.0, 0.0);
        elem
    }

    fn unflatten_index(&self, k: usize) -> (usize, usize, usize) {
        let mut rem = k;
        for (i, &n) in self.blocks.iter().enumerate() {
            if rem < n * n {
                return (i, rem / n, rem % n);
            }
            rem -= n * n;
        }
        unreachable!("index checked against dim")
    }

    /// Orthonormal Hermitian basis of the self-adjoint part (real dimension
    /// `Σ nᵢ²`), orthonormal for `⟨A,B⟩ = Re tr(A*B)`.
    pub fn hermitian_basis(&self) -> Vec<AlgebraElement> {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut basis = Vec::with_capacity(self.dim());
        for (i, &n) in self.blocks.iter().enumerate() {
            for r in 0..n {
                let mut e = self.zero();
                e.mats[i][(r, r)] = Complex64::new(1.0, 0.0);
                basis.push(e);
            }
            for r in 0..n {
                for s in (r + 1)..n {
                    let mut p = self.zero();
                    p.mats[i][(r, s)] = Complex64::new(inv_sqrt2, 0.0);
                    p.mats[i][(s, r)] = Complex64::new(inv_sqrt2, 0.0);
                    basis.push(p);
                    let mut q = self.zero();
                    q.mats[i][(r, s)] = Complex64::new(0.0, inv_sqrt2);
                    q.mats[i][(s, r)] = Complex64::new(0.0, -inv_sqrt2);
                    basis.push(q);
                }
            }
        }
        basis
    }

    pub fn element_from_coords(&self, coords: &CVec) -> Result<AlgebraElement> {
        if coords.len() != self.dim() {
            return Err(QsmError::ShapeMismatch(format!(
                "coords length {} vs dim {}",
                coords.len(),
                self.dim()
            )));
        }
        let mut elem = self.zero();
        for (i, &n) in self.blocks.iter().enumerate() {
            let off = self.block_offset(i);
            for r in 0..n {
                for s in 0..n {
                    elem.mats[i][(r, s)] = coords[off + r * n + s];
                }
            }
        }
        Ok(elem)
    }

    /// Element with independent standard complex Gaussian entries.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> AlgebraElement {
        let mut elem = self.zero();
        for (i, &n) in self.blocks.iter().enumerate() {
            for r in 0..n {
                for s in 0..n {
                    elem.mats[i][(r, s)] = Complex64::new(
                        crate::linalg::standard_normal(rng),
                        crate::linalg::standard_normal(rng),
                    );
                }
            }
        }
        elem
    }

    pub fn random_self_adjoint<R: Rng>(&self, rng: &mut R) -> AlgebraElement {
        let a = self.random_element(rng);
        (&a + &a.adjoint()).scale(0.5)
    }
}

/// One complex matrix per block of its algebra.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: FiniteCStarAlgebra,
    mats: Vec<CMat>,
}

impl AlgebraElement {
    pub fn new(algebra: FiniteCStarAlgebra, mats: Vec<CMat>) -> Result<Self> {
        if mats.len() != algebra.num_blocks() {
            return Err(QsmError::ShapeMismatch(format!(
                "{} matrices for {} blocks",
                mats.len(),
                algebra.num_blocks()
            )));
        }
        for (m, &n) in mats.iter().zip(algebra.blocks()) {
            if m.nrows() != n || m.ncols() != n {
                return Err(QsmError::ShapeMismatch(format!(
                    "block of shape {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { algebra, mats })
    }

    /// Function on a finite set, as an element of the commutative algebra.
    pub fn from_function(algebra: &FiniteCStarAlgebra, values: &[Complex64]) -> Result<Self> {
        if !algebra.is_commutative() {
            return Err(QsmError::InvalidAlgebra(
                "from_function requires a commutative algebra".into(),
            ));
        }
        if values.len() != algebra.num_blocks() {
            return Err(QsmError::ShapeMismatch("function length".into()));
        }
        let mats = values
            .iter()
            .map(|v| CMat::from_element(1, 1, *v))
            .collect();
        Ok(Self {
            algebra: algebra.clone(),
            mats,
        })
    }

    pub fn from_real_function(algebra: &FiniteCStarAlgebra, values: &[f64]) -> Result<Self> {
        let vals: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_function(algebra, &vals)
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.algebra
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.mats[i]
    }

    /// Value at a point of a commutative algebra.
    pub fn value_at(&self, x: usize) -> Complex64 {
        debug_assert!(self.algebra.blocks()[x] == 1);
        self.mats[x][(0, 0)]
    }

    pub fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(QsmError::AlgebraMismatch(format!(
                "{:?} vs {:?}",
                self.algebra.blocks(),
                other.algebra.blocks()
            )));
        }
        Ok(())
    }

    pub fn scale(&self, t: f64) -> Self {
        self.scale_complex(Complex64::new(t, 0.0))
    }

    pub fn scale_complex(&self, z: Complex64) -> Self {
        let mats = self.mats.iter().map(|m| m * z).collect();
        Self {
            algebra: self.algebra.clone(),
            mats,
        }
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mats = self.mats.iter().map(|m| m.adjoint()).collect();
        Self {
            algebra: self.algebra.clone(),
            mats,
        }
    }

    /// Max over blocks of the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.mats
            .iter()
            .map(spectral_norm)
            .fold(0.0, |acc, s| acc.max(s))
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.mats.iter().all(|m| hermitian_defect(m) <= tol)
    }

    /// Hermitian part `(a + a*)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(0.5)
    }

    /// Row-major block coordinates.
    pub fn coords(&self) -> CVec {
        let mut coords = CVec::zeros(self.algebra.dim());
        for (i, &n) in self.algebra.blocks().iter().enumerate() {
            let off = self.algebra.block_offset(i);
            for r in 0..n {
                for s in 0..n {
                    coords[off + r * n + s] = self.mats[i][(r, s)];
                }
            }
        }
        coords
    }

    /// Coefficients of the Hermitian part in the orthonormal Hermitian basis.
    pub fn sa_coords(&self) -> crate::linalg::RVec {
        let basis = self.algebra.hermitian_basis();
        let mut out = crate::linalg::RVec::zeros(basis.len());
        for (k, h) in basis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (hm, am) in h.mats.iter().zip(&self.mats) {
                // ⟨H, a⟩ = tr(H* a); H Hermitian.
                acc += (hm.adjoint() * am).trace();
            }
            out[k] = acc.re;
        }
        out
    }

    /// Self-adjoint element from Hermitian-basis coefficients.
    pub fn from_sa_coords(algebra: &FiniteCStarAlgebra, coords: &crate::linalg::RVec) -> Self {
        let basis = algebra.hermitian_basis();
        assert_eq!(coords.len(), basis.len(), "sa coordinate length");
        let mut acc = algebra.zero();
        for (k, h) in basis.iter().enumerate() {
            if coords[k] != 0.0 {
                acc = &acc + &h.scale(coords[k]);
            }
        }
        acc
    }

    /// Tensor product element in `A ⊗ B` (blockwise Kronecker).
    pub fn tensor(&self, other: &Self) -> Self {
        let algebra = self.algebra.tensor(&other.algebra);
        let mut mats = Vec::with_capacity(algebra.num_blocks());
        for a in &self.mats {
            for b in &other.mats {
                mats.push(a.kronecker(b));
            }
        }
        Self { algebra, mats }
    }

    /// Factor swap `A ⊗ B → B ⊗ A` on simple tensors `a⊗b ↦ b⊗a`, extended
    /// linearly via an index permutation of tensor-block entries.
    pub fn flip_factors(
        &self,
        a: &FiniteCStarAlgebra,
        b: &FiniteCStarAlgebra,
    ) -> Result<AlgebraElement> {
        if self.algebra != a.tensor(b) {
            return Err(QsmError::AlgebraMismatch(
                "element does not live on the stated tensor product".into(),
            ));
        }
        let flipped_alg = b.tensor(a);
        let mut out = flipped_alg.zero();
        let kb = b.num_blocks();
        let ka = a.num_blocks();
        for (i, &n) in a.blocks().iter().enumerate() {
            for (j, &m) in b.blocks().iter().enumerate() {
                let src = &self.mats[i * kb + j];
                let dst = &mut out.mats[j * ka + i];
                for r in 0..n {
                    for u in 0..m {
                        for s in 0..n {
                            for v in 0..m {
                                dst[(u * n + r, v * n + s)] = src[(r * m + u, s * m + v)];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

macro_rules! elementwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                assert_eq!(
                    self.algebra, rhs.algebra,
                    "element arithmetic requires one algebra"
                );
                let mats = self
                    .mats
                    .iter()
                    .zip(&rhs.mats)
                    .map(|(a, b)| a $op b)
                    .collect();
                AlgebraElement {
                    algebra: self.algebra.clone(),
                    mats,
                }
            }
        }
    };
}

elementwise_op!(Add, add, +);
elementwise_op!(Sub, sub, -);

impl std::ops::Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(
            self.algebra, rhs.algebra,
            "element arithmetic requires one algebra"
        );
        let mats = self.mats.iter().zip(&rhs.mats).map(|(a, b)| a * b).collect();
        AlgebraElement {
            algebra: self.algebra.clone(),
            mats,
        }
    }
}

impl std::ops::Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

/// A linear map between algebras, stored as a dense matrix over the flattened
/// block coordinates, with a validation pass for the *-homomorphism axioms.
#[derive(Debug, Clone)]
pub struct StarHomomorphism {
    source: FiniteCStarAlgebra,
    target: FiniteCStarAlgebra,
    matrix: CMat,
    validated: bool,
}

impl StarHomomorphism {
    pub fn from_matrix(
        source: FiniteCStarAlgebra,
        target: FiniteCStarAlgebra,
        matrix: CMat,
    ) -> Result<Self> {
        if matrix.nrows() != target.dim() || matrix.ncols() != source.dim() {
            return Err(QsmError::ShapeMismatch(format!(
                "map is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(Self {
            source,
            target,
            matrix,
            validated: false,
        })
    }

    /// Build the matrix column-by-column from an element-level map.
    pub fn from_element_map(
        source: &FiniteCStarAlgebra,
        target: &FiniteCStarAlgebra,
        f: impl Fn(&AlgebraElement) -> AlgebraElement,
    ) -> Result<Self> {
        let mut matrix = CMat::zeros(target.dim(), source.dim());
        for k in 0..source.dim() {
            let image = f(&source.basis_element(k));
            if image.algebra() != target {
                return Err(QsmError::AlgebraMismatch(
                    "element map lands outside the stated target".into(),
                ));
            }
            matrix.set_column(k, &image.coords());
        }
        Self::from_matrix(source.clone(), target.clone(), matrix)
    }

    pub fn identity(algebra: &FiniteCStarAlgebra) -> Self {
        let mut hom = Self {
            source: algebra.clone(),
            target: algebra.clone(),
            matrix: CMat::identity(algebra.dim(), algebra.dim()),
            validated: true,
        };
        hom.validated = true;
        hom
    }

    /// The flip `A ⊗ B → B ⊗ A`, `a⊗b ↦ b⊗a`.
    pub fn flip(a: &FiniteCStarAlgebra, b: &FiniteCStarAlgebra) -> Result<Self> {
        let source = a.tensor(b);
        let target = b.tensor(a);
        let mut hom = Self::from_element_map(&source, &target, |e| {
            e.flip_factors(a, b).expect("element lives on source")
        })?;
        hom.validate(TOL_HOM);
        Ok(hom)
    }

    /// The unital embedding `a ↦ a ⊗ 1_C`.
    pub fn tensor_with_unit(a: &FiniteCStarAlgebra, c: &FiniteCStarAlgebra) -> Result<Self> {
        let unit = c.unit();
        let mut hom = Self::from_element_map(a, &a.tensor(c), |e| e.tensor(&unit))?;
        hom.validate(TOL_HOM);
        Ok(hom)
    }

    pub fn source(&self) -> &FiniteCStarAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FiniteCStarAlgebra {
        &self.target
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.algebra() != &self.source {
            return Err(QsmError::AlgebraMismatch(
                "element not in the source algebra".into(),
            ));
        }
        let coords = &self.matrix * a.coords();
        self.target.element_from_coords(&coords)
    }

    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.target != self.source {
            return Err(QsmError::AlgebraMismatch(
                "composition shapes do not line up".into(),
            ));
        }
        Ok(Self {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &inner.matrix,
            validated: self.validated && inner.validated,
        })
    }

    /// Check unitality, *-preservation, and multiplicativity (the latter on
    /// the matrix-unit basis; bilinearity extends it). Sets the `validated`
    /// flag iff all residuals are within `tol`.
    pub fn validate(&mut self, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::new();

        let unit_res = match self.apply(&self.source.unit()) {
            Ok(img) => (&img - &self.target.unit()).operator_norm(),
            Err(_) => f64::INFINITY,
        };
        report.push(CheckItem::residual_le(
            "hom.unital",
            unit_res,
            tol,
            "‖Φ(1) − 1‖",
        ));

        let dim = self.source.dim();
        let images: Vec<AlgebraElement> = (0..dim)
            .map(|k| self.apply(&self.source.basis_element(k)).expect("shape ok"))
            .collect();

        let mut star_res = 0.0_f64;
        for k in 0..dim {
            let e = self.source.basis_element(k);
            let lhs = self.apply(&e.adjoint()).expect("shape ok");
            let rhs = images[k].adjoint();
            star_res = star_res.max((&lhs - &rhs).operator_norm());
        }
        report.push(CheckItem::residual_le(
            "hom.star",
            star_res,
            tol,
            "max ‖Φ(e*) − Φ(e)*‖ over the basis",
        ));

        let mut mult_res = 0.0_f64;
        for p in 0..dim {
            let ep = self.source.basis_element(p);
            for q in 0..dim {
                let eq = self.source.basis_element(q);
                let lhs = self.apply(&(&ep * &eq)).expect("shape ok");
                let rhs = &images[p] * &images[q];
                mult_res = mult_res.max((&lhs - &rhs).operator_norm());
            }
        }
        report.push(CheckItem::residual_le(
            "hom.mult",
            mult_res,
            tol,
            "max ‖Φ(e_p e_q) − Φ(e_p)Φ(e_q)‖ over basis pairs",
        ));

        self.validated = report.passed();
        report
    }

    pub fn require_validated(&self) -> Result<()> {
        if self.validated {
            Ok(())
        } else {
            Err(QsmError::NotValidated(
                "run validate() and fix residuals first".into(),
            ))
        }
    }
}

/// Merge zero-distance points of a semi-metric space; the result is a genuine
/// metric space and the class map is an isometry: `d̂(x̂₁,x̂₂) = d(x₁,x₂)`.
pub fn quotient_space(space: &SemiMetricSpace) -> (SemiMetricSpace, Vec<usize>) {
    let n = space.len();
    let mut class = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..n {
        if class[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        class[x] = id;
        reps.push(x);
        for y in (x + 1)..n {
            if class[y] == usize::MAX && space.distance(x, y) == 0.0 {
                class[y] = id;
            }
        }
    }
    let k = reps.len();
    let mut d = crate::linalg::RMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            d[(i, j)] = space.distance(reps[i], reps[j]);
        }
    }
    let quotient = SemiMetricSpace::new(d).expect("quotient of a valid semi-metric is valid");
    (quotient, class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_block_signatures() {
        let c2 = FiniteCStarAlgebra::commutative(2).unwrap();
        let c3 = FiniteCStarAlgebra::commutative(3).unwrap();
        assert_eq!(c2.tensor(&c3).blocks(), &[1, 1, 1, 1, 1, 1]);

        let m2 = FiniteCStarAlgebra::full_matrix(2).unwrap();
        let scalars = FiniteCStarAlgebra::commutative(1).unwrap();
        assert_eq!(m2.tensor(&scalars).blocks(), &[2]);

        let m3 = FiniteCStarAlgebra::full_matrix(3).unwrap();
        assert_eq!(m2.tensor(&m3).blocks(), &[6]);
    }

    #[test]
    fn operator_norm_examples() {
        let m2 = FiniteCStarAlgebra::full_matrix(2).unwrap();
        assert!((m2.unit().operator_norm() - 1.0).abs() < 1e-15);

        let sz = AlgebraElement::new(
            m2.clone(),
            vec![CMat::from_row_slice(
                2,
                2,
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            )],
        )
        .unwrap();
        assert!((sz.operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_conjugates_scalars() {
        let scalars = FiniteCStarAlgebra::commutative(1).unwrap();
        let a = AlgebraElement::from_function(&scalars, &[c(0.0, 1.0)]).unwrap();
        assert_eq!(a.adjoint().value_at(0), c(0.0, -1.0));
    }

    #[test]
    fn coords_round_trip() {
        let alg = FiniteCStarAlgebra::new(vec![2, 1, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = alg.random_element(&mut rng);
        let b = alg.element_from_coords(&a.coords()).unwrap();
        assert!((&a - &b).operator_norm() < 1e-14);
    }

    #[test]
    fn sa_coords_round_trip() {
        let alg = FiniteCStarAlgebra::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = alg.random_self_adjoint(&mut rng);
        let back = AlgebraElement::from_sa_coords(&alg, &h.sa_coords());
        assert!((&h - &back).operator_norm() < 1e-12);
    }

    #[test]
    fn tensor_arithmetic_is_multiplicative() {
        let m2 = FiniteCStarAlgebra::full_matrix(2).unwrap();
        let c2 = FiniteCStarAlgebra::commutative(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = m2.random_element(&mut rng);
            let a2 = m2.random_element(&mut rng);
            let b = c2.random_element(&mut rng);
            let b2 = c2.random_element(&mut rng);
            let lhs = &a.tensor(&b) * &a2.tensor(&b2);
            let rhs = (&a * &a2).tensor(&(&b * &b2));
            assert!((&lhs - &rhs).operator_norm() < 1e-12);

            let star_lhs = a.tensor(&b).adjoint();
            let star_rhs = a.adjoint().tensor(&b.adjoint());
            assert!((&star_lhs - &star_rhs).operator_norm() < 1e-12);
        }
    }

    #[test]
    fn cstar_identity_on_samples() {
        let alg = FiniteCStarAlgebra::new(vec![2, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let a = alg.random_element(&mut rng);
            let lhs = (&a.adjoint() * &a).operator_norm();
            let rhs = a.operator_norm().powi(2);
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs));
        }
    }

    #[test]
    fn identity_hom_validates_exactly() {
        let alg = FiniteCStarAlgebra::new(vec![2, 1]).unwrap();
        let mut hom = StarHomomorphism::identity(&alg);
        let report = hom.validate(0.0);
        assert!(report.passed());
        assert_eq!(report.worst_residual(), 0.0);
    }

    #[test]
    fn flip_is_a_homomorphism() {
        let m2 = FiniteCStarAlgebra::full_matrix(2).unwrap();
        let c2 = FiniteCStarAlgebra::commutative(2).unwrap();
        let flip = StarHomomorphism::flip(&m2, &c2).unwrap();
        assert!(flip.is_validated());

        // Spot check on a simple tensor.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = m2.random_element(&mut rng);
        let b = c2.random_element(&mut rng);
        let lhs = flip.apply(&a.tensor(&b)).unwrap();
        let rhs = b.tensor(&a);
        assert!((&lhs - &rhs).operator_norm() < 1e-12);
    }

    #[test]
    fn transpose_is_not_multiplicative() {
        // The transpose is unital and *-preserving but fails on E12·E21.
        let m2 = FiniteCStarAlgebra::full_matrix(2).unwrap();
        let mut hom = StarHomomorphism::from_element_map(&m2, &m2, |e| {
            AlgebraElement::new(m2.clone(), vec![e.block(0).transpose()]).unwrap()
        })
        .unwrap();

        // Direct oracle: Φ(E12·E21) vs Φ(E12)·Φ(E21).
        let e12 = m2.basis_element(1);
        let e21 = m2.basis_element(2);
        let lhs = hom.apply(&(&e12 * &e21)).unwrap();
        let rhs = &hom.apply(&e12).unwrap() * &hom.apply(&e21).unwrap();
        let oracle_residual = (&lhs - &rhs).operator_norm();
        assert!(oracle_residual > 0.5);

        let report = hom.validate(TOL_HOM);
        assert!(!report.passed());
        assert!(!hom.is_validated());
        let mult = report.find("hom.mult").unwrap();
        assert!(!mult.passed);
        assert!(mult.residual.unwrap() >= oracle_residual - 1e-12);
        // Unitality and adjoints are fine for the transpose.
        assert!(report.find("hom.unital").unwrap().passed);
        assert!(report.find("hom.star").unwrap().passed);
    }

    #[test]
    fn quotient_space_merges_zero_classes() {
        use crate::linalg::RMat;

        // All distances zero: a single point.
        let x = SemiMetricSpace::new(RMat::zeros(3, 3)).unwrap();
        let (q, proj) = quotient_space(&x);
        assert_eq!(q.len(), 1);
        assert_eq!(proj, vec![0, 0, 0]);

        // A genuine metric: nothing merges.
        let m = SemiMetricSpace::new(RMat::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 0.0],
        ))
        .unwrap();
        let (q, proj) = quotient_space(&m);
        assert_eq!(q.len(), 2);
        assert_eq!(proj, vec![0, 1]);

        // d(0,1)=0, d(0,2)=d(1,2)=1: the pair {0,1} merges.
        let s = SemiMetricSpace::new(RMat::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0],
        ))
        .unwrap();
        let (q, proj) = quotient_space(&s);
        assert_eq!(q.len(), 2);
        assert_eq!(proj, vec![0, 0, 1]);
        assert!((q.distance(0, 1) - 1.0).abs() < 1e-15);

        // Projection is an isometry on every pair.
        for x1 in 0..3 {
            for x2 in 0..3 {
                assert_eq!(q.distance(proj[x1], proj[x2]), s.distance(x1, x2));
            }
        }
    }
}
