//! Real scalar abstraction shared by every numerical module.
//!
//! All matrix code is written against [`Real`] and operates on `Complex<T>` entries, so the
//! library runs in both `f32` and `f64`. Tolerances are passed as `T`; the defaults in
//! [`Real::tol`] never drop below a few hundred ulps of the chosen precision.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Unit roundoff of the type, as `f64`.
    const UNIT_ROUNDOFF: f64;

    /// Converts a literal. Panics only for values not representable at all (NaN stays NaN).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `base` clamped from below to `1000 * unit_roundoff`.
    #[inline]
    fn tol(base: f64) -> Self {
        Self::lit(base.max(1.0e3 * Self::UNIT_ROUNDOFF))
    }

    #[inline]
    fn nat(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f32 {
    const UNIT_ROUNDOFF: f64 = f32::EPSILON as f64;
}

impl Real for f64 {
    const UNIT_ROUNDOFF: f64 = f64::EPSILON;
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// The imaginary unit.
#[inline]
pub fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    let re = z.re.as_f64();
    let im = z.im.as_f64();
    re.is_finite() && im.is_finite()
}

/// Modulus of a complex number (`Complex::norm` needs `num_traits::Float`).
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}
