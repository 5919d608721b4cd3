//! Floating-point scalar abstraction for the numeric kernels.
//!
//! Graph metrics, assortativity, attachment indices, and the statistics
//! routines are generic over [`Scalar`] so they run on `f32` or `f64`.
//! Concrete `f64` aliases for the result types live at the crate root.

use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from a count. Counts in this crate stay far below
    /// 2^53, so the `f64` path is exact in practice.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
