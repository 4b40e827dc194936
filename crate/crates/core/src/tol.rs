//! Shared numeric tolerances.
//!
//! Each threshold is an `f64` target with a machine-epsilon floor so the same
//! code stays usable at `f32`, where the nominal values sit below the
//! representable resolution.

use crate::scalar::{cast, Scalar};

fn floored<T: Scalar>(nominal: f64, eps_multiple: f64) -> T {
    let floor = T::epsilon() * cast::<T>(eps_multiple);
    cast::<T>(nominal).max(floor)
}

/// Probability vectors must sum to one within this.
pub fn prob_sum<T: Scalar>() -> T {
    floored(1e-12, 16.0)
}

/// Maximum |A(i,j) - A(j,i)| accepted as "symmetric".
pub fn symmetry<T: Scalar>() -> T {
    floored(1e-10, 16.0)
}

/// Jacobi stops when the off-diagonal Frobenius norm falls below this factor
/// times the Frobenius norm of the input.
pub fn jacobi_factor<T: Scalar>() -> T {
    floored(1e-12, 64.0)
}

/// |lambda| below this factor times (1 + inf-norm) classifies as a zero
/// eigenvalue. Sits well above the Jacobi residual and far below the smallest
/// genuine Laplacian eigenvalue at desk scale (about 4e-4 for a circle of 256).
pub fn zero_eigenvalue_factor<T: Scalar>() -> T {
    floored(1e-9, 32.0)
}

/// Pivots smaller than this magnitude abort Gaussian elimination.
pub fn min_pivot<T: Scalar>() -> T {
    floored(1e-13, 16.0)
}

/// Tolerance for internal consistency checks on derived quantities
/// (row sums, coefficient cross-checks).
pub fn consistency<T: Scalar>() -> T {
    floored(1e-12, 64.0)
}

/// Tolerance for the constructive eigenvector-basis property checks.
pub fn basis_property<T: Scalar>() -> T {
    floored(1e-8, 256.0)
}
