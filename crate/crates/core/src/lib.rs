//! Continuous K-g-frames on finite quadrature discretizations.
//!
//! A measure space is a finite list of nodes with positive masses; a family
//! `{Λ_i}` assigns each node an operator `C^n → C^{d_i}`. Everything the theory
//! states about such families reduces to finite Hermitian eigenproblems, which
//! this crate computes and certifies:
//!
//! - [`frame`]: analysis/synthesis/frame operators and optimal bounds `A`, `B`
//!   in `A ||K* f||² <= Σ μ_i ||Λ_i f||² <= B ||f||²`.
//! - [`douglas`]: range inclusion and the minimal factorization `L1 = L2 U`.
//! - [`duals`]: dual families, the canonical dual and its norm floor.
//! - [`atomic`]: atomic systems and constructions producing new ones.

pub mod atomic;
pub mod block;
pub mod douglas;
pub mod duals;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod random;

pub use atomic::{
    atomic_check, coefficient_map, operator_algebra_bounds, orthogonal_combine, positive_perturb,
    range_combine, restricted_dual_frame, AlgebraOutcome, AtomicCertificate, BoundCheck,
    CombineOutcome, PerturbOutcome, RestrictedDual,
};
pub use block::{BlockVector, MeasurePoints};
pub use douglas::{douglas_solve, equivalence_check, DouglasSolution, EquivalenceReport};
pub use duals::{
    canonical_dual, dual_norm_floor, perturb_dual, subspace_dual_bound, verify_dual,
    CanonicalDual, DualCertificate, SubspaceDualOutcome,
};
pub use error::{Error, Result};
pub use frame::{
    analysis, bessel_bound, frame_bounds, frame_operator, synthesis, FrameCertificate,
    OperatorFamily,
};
pub use linalg::{
    hermitian_eigs, pencil_extremes, pseudo_inverse, range_included, Bound, CMatrix, CVector,
    HermitianEigen, LinearMap, PencilExtremes, Tolerance, C64,
};
