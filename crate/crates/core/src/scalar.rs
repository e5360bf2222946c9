//! Scalar abstraction over the floating-point types the model runs on.
//!
//! All orbit math is written against [`Scalar`] so the same code paths run
//! in `f64` (the precision the tables are produced at) and in `f32`, where
//! the cancellation-safe formulations still deliver the tabulated digits.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar usable throughout the crate.
///
/// Beyond the `num-traits` bundle this adds the low word of π, so that
/// π can be carried to twice the native precision by the compensated
/// arithmetic in [`crate::fp`].
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + 'static {
    /// Low word of π: `Self::PI() + Self::PI_LO` approximates π to roughly
    /// twice the native precision.
    const PI_LO: Self;
}

impl Scalar for f64 {
    const PI_LO: Self = 1.224_646_799_147_353_2e-16;
}

impl Scalar for f32 {
    // written at f64 precision; rounds to the correct f32
    #[allow(clippy::excessive_precision)]
    const PI_LO: Self = -8.742_277_657_347_586e-8;
}

/// Convert an `f64` literal into the working scalar type.
///
/// Panics only if the literal is not representable at all, which cannot
/// happen for the finite constants used in this crate.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}
