//! Floating-point scalar abstraction for the numeric kernels.

use num_traits::FromPrimitive;

/// Floating scalar for all numeric kernels: `f32` or `f64`.
///
/// `nalgebra::RealField` supplies the transcendental and linear-algebra
/// surface; `num_traits::FromPrimitive` is the bridge for literals.
pub trait Scalar: nalgebra::RealField + FromPrimitive + Copy + Default {
    /// Convert an `f64` literal into the scalar type.
    #[inline]
    fn fl(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy conversion back to `f64` (reporting, serialization).
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}
