use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar for matrix and walk computations: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant into `T`.
///
/// Panics only if `T` cannot represent any finite `f64`, which cannot happen
/// for the two implementors above.
pub(crate) fn cast<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("f64 constant must convert to scalar type")
}
