//! Scalar abstraction shared by every module.
//!
//! All numerics are written against [`Real`], a thin layer over
//! [`nalgebra::RealField`] plus the `num-traits` conversions needed for
//! literals and serialization. `f64` is the working precision; `f32`
//! compiles and runs but cannot meet the tighter residual thresholds.

use nalgebra::ComplexField;
use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn from_real<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn modulus<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

/// Rescales an `f64` tolerance to the precision of `T`, so thresholds stated
/// for double precision keep their meaning for `f32`.
pub fn tol<T: Real>(x: f64) -> T {
    let ratio = T::default_epsilon().to_f64_lossy() / f64::EPSILON;
    T::lit(x * ratio.max(1.0))
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1<T: Real>(z: C<T>) -> C<T> {
    if modulus(z) < T::lit(0.5) {
        let mut term = z;
        let mut sum = z;
        let mut k = T::one();
        for _ in 0..40 {
            k += T::one();
            term = term * z / from_real(k);
            sum += term;
            if modulus(term) <= T::default_epsilon() * modulus(sum) {
                break;
            }
        }
        sum
    } else {
        z.exp() - C::new(T::one(), T::zero())
    }
}

/// Formats a complex number in the `a+bi` grammar used by scenario files.
pub fn format_complex(z: C<f64>) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im.is_sign_negative() {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_direct_for_moderate_arguments() {
        let z: C<f64> = cplx(0.3, -0.2);
        let direct = z.exp() - Complex::new(1.0, 0.0);
        assert!(modulus(expm1(z) - direct) < 1e-15);
    }

    #[test]
    fn expm1_is_accurate_for_tiny_arguments() {
        let z: C<f64> = cplx(1e-12, 1e-12);
        let got = expm1(z);
        assert!(modulus(got - z) < 1e-23);
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex::new(0.0, 1.0)), "0+1i");
        assert_eq!(format_complex(Complex::new(0.0, -1.0)), "0-1i");
        assert_eq!(format_complex(Complex::new(-0.5, 2.25)), "-0.5+2.25i");
    }
}
