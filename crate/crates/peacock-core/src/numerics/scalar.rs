//! The complex scalar abstraction.
//!
//! All analytic code in this crate is generic over [`Scalar`], a complex
//! floating-point number that knows its own working precision. Two backends
//! implement it:
//!
//! - [`num_complex::Complex64`] — hardware doubles (`prec() == 53` bits), used
//!   by the geometry, tracing and quadrature code where 1e-10 .. 1e-13
//!   absolute accuracy suffices;
//! - [`crate::numerics::big::BigC`] — arbitrary-precision software floats,
//!   used wherever ill-conditioned series manipulation (Borel–Padé) requires
//!   tens of digits.
//!
//! Precision propagates through computations from the inputs: binary
//! operations produce results at the larger operand precision, and derived
//! constants (π, Bernoulli numbers, …) are materialised at the precision of
//! the value that requests them.

use num_bigint::BigInt;
use num_complex::Complex64;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Convert a decimal-digit count to a binary mantissa size with guard bits.
///
/// 60 decimal digits land on 232 bits. The 32 guard bits absorb the rounding
/// of long dependency chains so that results remain trustworthy to the
/// requested decimal precision.
pub fn digits_to_bits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32
}

/// A complex floating-point scalar with self-describing precision.
///
/// Associated constructors take the precision in bits; the `f64` backend
/// ignores it. `exp`, `ln` and `sqrt` are principal branches.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Mantissa precision (bits) carried by this value.
    fn prec(&self) -> usize;

    /// Construct `re + i·im` at `prec` bits.
    fn from_f64_prec(re: f64, im: f64, prec: usize) -> Self;

    /// Construct the real integer `n` (exact) at `prec` bits.
    fn from_i64_prec(n: i64, prec: usize) -> Self;

    /// Construct the real value `num/den` correctly rounded at `prec` bits.
    fn from_ratio_prec(num: &BigInt, den: &BigInt, prec: usize) -> Self;

    /// Real part as a hardware double (saturating conversion).
    fn re_f64(&self) -> f64;

    /// Imaginary part as a hardware double (saturating conversion).
    fn im_f64(&self) -> f64;

    /// Modulus as a hardware double.
    fn abs_f64(&self) -> f64;

    /// Principal argument as a hardware double.
    fn arg_f64(&self) -> f64;

    /// Real part, as a value of the same backend (imaginary part zero).
    fn re_part(&self) -> Self;

    /// Imaginary part, as a value of the same backend (imaginary part zero).
    fn im_part(&self) -> Self;

    /// Complex conjugate.
    fn conj(&self) -> Self;

    /// Multiplication by `i` (exact).
    fn mul_i(&self) -> Self;

    /// Modulus |z| (imaginary part zero).
    fn abs(&self) -> Self;

    /// Principal-branch complex exponential.
    fn exp(&self) -> Self;

    /// Principal-branch complex logarithm (cut along ℝ≤0).
    fn ln(&self) -> Self;

    /// Principal-branch complex square root (cut along ℝ<0).
    fn sqrt(&self) -> Self;

    /// Integer power by binary exponentiation (negative = power of inverse).
    fn powi(&self, n: i64) -> Self;

    /// Multiply by 2^k exactly (exponent manipulation).
    fn scale2(&self, k: i32) -> Self;

    fn is_zero(&self) -> bool;

    fn is_finite(&self) -> bool;

    /// π at this value's precision.
    fn pi_like(&self) -> Self;

    /// Zero at this value's precision.
    fn zero_like(&self) -> Self {
        Self::from_i64_prec(0, self.prec())
    }

    /// One at this value's precision.
    fn one_like(&self) -> Self {
        Self::from_i64_prec(1, self.prec())
    }

    /// The relative rounding unit 2^(2−prec) of this value's precision.
    fn eps_f64(&self) -> f64 {
        (2.0f64).powi(2 - (self.prec() as i32).min(1060))
    }

    /// Full-precision decimal rendering of the real and imaginary parts.
    fn to_decimal_strings(&self) -> (String, String);
}

/// `e(z) = exp(2πi z)`, the unit-normalised exponential used throughout.
pub fn e2pi<T: Scalar>(z: &T) -> T {
    let two_pi = z.pi_like().scale2(1);
    (z.mul_i() * &two_pi).exp()
}

/// 2πi at the precision of `proto`.
pub fn two_pi_i<T: Scalar>(proto: &T) -> T {
    proto.pi_like().scale2(1).mul_i()
}

impl Scalar for Complex64 {
    fn prec(&self) -> usize {
        53
    }

    fn from_f64_prec(re: f64, im: f64, _prec: usize) -> Self {
        Complex64::new(re, im)
    }

    fn from_i64_prec(n: i64, _prec: usize) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn from_ratio_prec(num: &BigInt, den: &BigInt, _prec: usize) -> Self {
        // Scale both parts into f64 range before dividing. For the ratios met
        // here (Bernoulli numbers, binomials) a direct conversion suffices,
        // with a bit-length guard for the astronomically large ones.
        let nb = num.bits() as i64;
        let db = den.bits() as i64;
        let shift = ((nb.max(db)) - 900).max(0) as u64;
        let n2: BigInt = num >> shift;
        let d2: BigInt = den >> shift;
        let nf = bigint_to_f64(&n2);
        let df = bigint_to_f64(&d2);
        Complex64::new(nf / df, 0.0)
    }

    fn re_f64(&self) -> f64 {
        self.re
    }

    fn im_f64(&self) -> f64 {
        self.im
    }

    fn abs_f64(&self) -> f64 {
        num_complex::Complex::norm(*self)
    }

    fn arg_f64(&self) -> f64 {
        num_complex::Complex::arg(*self)
    }

    fn re_part(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }

    fn im_part(&self) -> Self {
        Complex64::new(self.im, 0.0)
    }

    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }

    fn mul_i(&self) -> Self {
        Complex64::new(-self.im, self.re)
    }

    fn abs(&self) -> Self {
        Complex64::new(num_complex::Complex::norm(*self), 0.0)
    }

    fn exp(&self) -> Self {
        num_complex::Complex::exp(*self)
    }

    fn ln(&self) -> Self {
        num_complex::Complex::ln(*self)
    }

    fn sqrt(&self) -> Self {
        num_complex::Complex::sqrt(*self)
    }

    fn powi(&self, n: i64) -> Self {
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let base = if n < 0 { 1.0 / self } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Complex64::new(1.0, 0.0);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc *= sq;
            }
            sq *= sq;
            e >>= 1;
        }
        acc
    }

    fn scale2(&self, k: i32) -> Self {
        let f = (2.0f64).powi(k);
        Complex64::new(self.re * f, self.im * f)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn pi_like(&self) -> Self {
        Complex64::new(std::f64::consts::PI, 0.0)
    }

    fn to_decimal_strings(&self) -> (String, String) {
        (format!("{:.17e}", self.re), format!("{:.17e}", self.im))
    }
}

/// Saturating BigInt → f64 conversion (used only for moderate-size integers).
fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::INFINITY)
}
