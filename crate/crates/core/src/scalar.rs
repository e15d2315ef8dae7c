//! Scalar abstraction for the simulation core.
//!
//! Every numeric kernel in this crate is generic over [`Real`] so the same
//! code drives `f32` and `f64` state. Parameter tables and reference values
//! are written as `f64` literals and narrowed through [`Real::lit`].

use core::fmt::{Debug, Display};
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable for simulation state, `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    ///
    /// Panics if the value has no finite representation, which for the
    /// parameter ranges used here cannot happen.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Widens back to `f64` for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}
