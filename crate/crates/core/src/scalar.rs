//! Scalar abstraction: every numerical routine in this crate is generic over
//! the floating-point type through [`Real`].

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the solver and measurement code are generic over.
///
/// `f32` works for smoke runs; quantitative checks (exponent fits, exactness
/// regressions) assume `f64`.
pub trait Real:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for pulling an `f64` literal into the generic scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}

/// `x` as `f64` for diagnostics and report serialization.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip_in_both_widths() {
        assert_eq!(real::<f64>(0.25), 0.25);
        assert_eq!(real::<f32>(0.25), 0.25f32);
        assert_eq!(to_f64(real::<f64>(-1.5)), -1.5);
    }
}
