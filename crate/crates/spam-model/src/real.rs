//! Scalar abstraction: the model runs in f32 for speed and in f64 for
//! finite-difference gradient verification.

use num_traits::Float;

/// Floating-point scalar the tensor machinery is generic over.
pub trait Real:
    Float + std::fmt::Debug + std::fmt::Display + Default + Send + Sync + 'static
{
    fn from_f64c(v: f64) -> Self;
    fn to_f64c(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn from_f64c(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64c(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64c(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64c(self) -> f64 {
        self
    }
}
