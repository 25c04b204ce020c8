//! Scalar abstraction: everything numeric in this crate is generic over a
//! floating-point type implementing [`Real`]; `f64` is the default used by
//! the concrete aliases at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// 1/sqrt(3), the map parameter at which the proof's Bloch-norm bound is tight.
    fn inv_sqrt_3() -> Self {
        Self::c(1.0 / 3.0f64.sqrt())
    }
}

impl Real for f32 {}
impl Real for f64 {}
