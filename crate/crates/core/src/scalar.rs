use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point scalar the crate is generic over (f32 or f64).
pub trait Scalar:
    Float + FromPrimitive + NumCast + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Convert an `f64` literal into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy view as `f64`, for reporting and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }

    /// Smallest tolerance the scalar type can meaningfully resolve; spec-level
    /// tolerances are floored by this so f32 instantiations stay usable.
    #[inline]
    fn tol_floor(requested: f64) -> Self {
        let eps = Self::epsilon() * Self::of(32.0);
        let req = Self::of(requested);
        if req > eps {
            req
        } else {
            eps
        }
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + NumCast + Debug + Display + LowerExp + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion_roundtrips() {
        assert_eq!(<f64 as Scalar>::of(1.5), 1.5);
        assert_eq!(<f32 as Scalar>::of(0.25), 0.25f32);
        assert_eq!(1.5f64.as_f64(), 1.5);
    }

    #[test]
    fn tolerance_floor_respects_precision() {
        let t64: f64 = Scalar::tol_floor(1e-12);
        assert_eq!(t64, 1e-12);
        let t32: f32 = Scalar::tol_floor(1e-12);
        assert!(t32 > 1e-7 && t32 < 1e-4);
    }
}
