//! Finite-dimensional C*-algebras, their states and Lipschitz-type
//! seminorms, and the quantum (semi-)metric structures induced on quantum
//! families of maps.
//!
//! The crate models a compact quantum semi-metric structure as a triple:
//! an algebra `𝔄` (a direct sum of matrix blocks), a domain of elements, and
//! an adjoint-invariant seminorm `L` vanishing exactly on the scalars. The
//! seminorm turns the state space into a semi-metric space via
//! `ρ_L(μ,ν) = sup{ |μ(a)−ν(a)| : L(a) ≤ 1 }`, computed here by exact linear
//! programming on commutative/polyhedral inputs and by a deterministic
//! ratio-maximization engine elsewhere. A quantum family `Φ: A → B⊗C` then
//! pushes a structure on `A` to one on `C` through the induced state
//! semi-metric `d(ν,ν′) = sup_μ ρ_L((μ⊗ν)Φ, (μ⊗ν′)Φ)`, and the classical
//! case (`F: Y×Z → X` compiled to `F̂`) closes the loop with the exact
//! formula `d₁(z,z′) = max_y d₀(F(y,z), F(y,z′))`.
//!
//! Modules:
//! * [`algebra`] — block algebras, elements, tensor products, validated
//!   *-homomorphisms, quotient of a semi-metric space;
//! * [`states`] — states, point masses, product states, pullbacks, slices,
//!   probe sets;
//! * [`seminorms`] — the four seminorm constructors, axiom checks, radius;
//! * [`duality`] — the distance engines (dual LP, transport LP, ratio grid);
//! * [`family`] — quantum families and the induced structures;
//! * [`classical`] — finite classical families and exact verification;
//! * [`suites`] — seeded random-instance verification suites;
//! * [`descriptor`] — JSON descriptors for every domain object.

pub mod algebra;
pub mod classical;
pub mod descriptor;
pub mod duality;
pub mod error;
pub mod family;
pub mod linalg;
pub mod report;
pub mod seminorms;
pub mod simplex;
pub mod states;
pub mod suites;

pub use algebra::{quotient_space, AlgebraElement, FiniteCStarAlgebra, StarHomomorphism};
pub use classical::{
    compile_family, d1_direct, verify_lemma5, verify_theorem, ClassicalFamily, SemiMetricSpace,
};
pub use duality::{
    kantorovich_primal, rho, rho_between_pullbacks, rho_lp_dual, rho_ratio, DistanceResult,
    Method, RatioOptions, Witness,
};
pub use error::{QsmError, Result};
pub use family::{
    check_lemma3, check_prop2, check_prop4_density, induce_qsm, induced_state_semimetric,
    InduceOptions, InducedQsm, QuantumFamily, StateSemiMetric,
};
pub use report::{CheckItem, ValidationReport};
pub use seminorms::{
    check_qsm_axioms, seminorm_radius, FiniteGroup, GroupAction, NormDescriptor, QSMStructure,
    RadiusResult, Seminorm,
};
pub use states::{build_probes, slice, ProbeSet, ProbeTag, State};
