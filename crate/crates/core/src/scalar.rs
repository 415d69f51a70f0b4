//! Scalar field abstraction shared by every numeric routine in the crate.
//!
//! Structural operations (indexing, matricization, slicing) only need
//! `T: Clone`; anything that does arithmetic is bounded on [`Scalar`], which
//! layers a few conversion hooks on top of nalgebra's `ComplexField`.

use nalgebra::ComplexField;
use num_complex::Complex;
use num_traits::{One, Zero};

/// A real or complex floating-point field element.
pub trait Scalar: ComplexField + Copy + Zero + One {
    /// True for complex fields. Decides file encodings and random sampling.
    const IS_COMPLEX: bool;

    /// Machine epsilon of the underlying real type.
    fn epsilon() -> Self::RealField;

    /// Builds a value from real and imaginary parts. The imaginary part is
    /// dropped for real fields.
    fn from_parts(re: f64, im: f64) -> Self;

    /// Real and imaginary parts widened to `f64`.
    fn to_parts(self) -> (f64, f64);

    fn real_to_f64(r: Self::RealField) -> f64;

    fn real_from_f64(x: f64) -> Self::RealField;

    fn from_re(x: f64) -> Self {
        Self::from_parts(x, 0.0)
    }

    /// Modulus as `f64`, for reporting and tolerance checks.
    fn abs_f64(self) -> f64 {
        Self::real_to_f64(self.modulus())
    }
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const IS_COMPLEX: bool = false;

            fn epsilon() -> $t {
                <$t>::EPSILON
            }

            fn from_parts(re: f64, _im: f64) -> Self {
                re as $t
            }

            fn to_parts(self) -> (f64, f64) {
                (self as f64, 0.0)
            }

            fn real_to_f64(r: $t) -> f64 {
                r as f64
            }

            fn real_from_f64(x: f64) -> $t {
                x as $t
            }
        }
    };
}

macro_rules! complex_scalar {
    ($t:ty) => {
        impl Scalar for Complex<$t> {
            const IS_COMPLEX: bool = true;

            fn epsilon() -> $t {
                <$t>::EPSILON
            }

            fn from_parts(re: f64, im: f64) -> Self {
                Complex::new(re as $t, im as $t)
            }

            fn to_parts(self) -> (f64, f64) {
                (self.re as f64, self.im as f64)
            }

            fn real_to_f64(r: $t) -> f64 {
                r as f64
            }

            fn real_from_f64(x: f64) -> $t {
                x as $t
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);
complex_scalar!(f32);
complex_scalar!(f64);
