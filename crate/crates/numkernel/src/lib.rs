//! Self-contained dense numerics.
//!
//! * [`sym_eig`] is a cyclic Jacobi eigensolver for real symmetric matrices
//!   and [`psd_check`] builds the semidefiniteness test on top of it.
//! * [`affine_psd_feasibility`] and [`BlockProblem`] search for a point in the
//!   intersection of an affine subspace with a product of PSD cones.
//! * [`lp_feasibility`] is a phase-one simplex with Bland's rule that returns
//!   either a nonnegative solution or a Farkas ray. An exact rational variant
//!   is exposed through [`lp_feasibility_exact`].
//! * [`nnls`] solves nonnegative least squares problems.
//!
//! Tolerances are collected in [`NumericContext`].

mod context;
mod dense;
mod eig;
mod lp;
mod nnls;
mod sdp;

pub use context::NumericContext;
pub use dense::{cholesky_solve, DenseSym, KernelError, Matrix};
pub use eig::{psd_check, sym_eig, PsdCheck, SymEigen};
pub use lp::{
    lp_feasibility, lp_feasibility_exact, verify_farkas, verify_lp_point, ExactLpOutcome,
    LpScalar,
};
pub use nnls::{nnls, NnlsResult};
pub use sdp::{
    affine_psd_feasibility, verify_block_point, verify_psd_separator, BlockPoint, BlockProblem,
    ConstraintTerm, FeasibilityCertificate, FeasibilityStatus, FeasibilityVerdict, SolveOptions,
};
