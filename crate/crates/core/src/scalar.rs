//! Floating-point abstraction used throughout the numerical core.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Scalar type the simulator is generic over.
///
/// Implemented for `f32` and `f64` (and anything else satisfying the
/// bounds). The default solver tolerances shipped with this crate are
/// calibrated for `f64`, which is also the precision the CLI runs at;
/// `f32` users should loosen them accordingly.
pub trait Scalar:
    Float + FloatConst + NumAssign + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    ///
    /// Panics if the conversion fails, which cannot happen for the finite
    /// literals this crate feeds it.
    fn cast(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must convert")
    }

    /// Converts a count into the scalar type (for averages and sizes).
    fn cast_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must convert to scalar")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + NumAssign + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}
