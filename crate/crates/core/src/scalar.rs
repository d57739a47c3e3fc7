//! Floating-point scalar abstraction.
//!
//! All numeric kernels are generic over [`Scalar`] so the same code runs in
//! f32 or f64. Tolerances that the rest of the crate relies on (orthonormality
//! checks, eigensolver residuals, symmetry drift) are pinned per type here:
//! the f64 values are the contractual ones, the f32 values are scaled
//! equivalents for when memory matters more than the last digits.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum + Send + Sync + Debug + Display + 'static
{
    /// Max allowed entrywise deviation of a basis gram matrix from identity.
    const ORTH_TOL: Self;
    /// Relative residual bound for accepted eigenpairs.
    const EIG_TOL: Self;
    /// Allowed asymmetry in matrices that are symmetric by contract.
    const SYM_TOL: Self;
    /// L1 convergence tolerance for stationary-distribution iterations.
    const WALK_TOL: Self;

    /// Lossy conversion from f64; panics only on NaN inputs, which never
    /// occur for the constants this is used with.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant not representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f64 {
    const ORTH_TOL: Self = 1e-10;
    const EIG_TOL: Self = 1e-8;
    const SYM_TOL: Self = 1e-10;
    const WALK_TOL: Self = 1e-10;
}

impl Scalar for f32 {
    const ORTH_TOL: Self = 1e-4;
    const EIG_TOL: Self = 1e-3;
    const SYM_TOL: Self = 1e-4;
    const WALK_TOL: Self = 1e-5;
}
