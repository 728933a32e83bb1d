use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar used by grids, operators and solvers: `f32` or `f64`.
///
/// All closed-form constants are converted from `f64` literals, so an `f32`
/// instantiation carries ordinary single-precision error.
pub trait Real:
    Float + FromPrimitive + NumAssign + std::iter::Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant; panics only if the target
    /// type cannot represent any finite approximation (never for f32/f64).
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
