//! Arbitrary-precision complex backend over `astro_float::BigFloat`.
//!
//! `BigC` stores real and imaginary parts as software floats whose mantissa
//! length is fixed at construction. Elementary complex functions (exp, ln,
//! sqrt) are assembled from the real functions of the underlying library;
//! the constants cache lives in a thread-local so that all operations stay
//! `Send`-friendly and lock-free.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, WORD_BIT_SIZE};
use num_bigint::BigInt;
use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

/// Run `f` with the thread-local constants cache.
fn with_cc<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Negate by reference (BigFloat's `Neg` consumes its receiver).
fn bneg(x: &BigFloat) -> BigFloat {
    let mut y = x.clone();
    y.inv_sign();
    y
}

/// π at `p` bits.
pub fn pi(p: usize) -> BigFloat {
    with_cc(|cc| cc.pi(p, RM))
}

/// Natural exponential of a real `BigFloat`.
pub fn rexp(x: &BigFloat, p: usize) -> BigFloat {
    with_cc(|cc| x.exp(p, RM, cc))
}

/// Natural logarithm of a positive real `BigFloat`.
pub fn rln(x: &BigFloat, p: usize) -> BigFloat {
    with_cc(|cc| x.ln(p, RM, cc))
}

/// Sine of a real `BigFloat`.
pub fn rsin(x: &BigFloat, p: usize) -> BigFloat {
    with_cc(|cc| x.sin(p, RM, cc))
}

/// Cosine of a real `BigFloat`.
pub fn rcos(x: &BigFloat, p: usize) -> BigFloat {
    with_cc(|cc| x.cos(p, RM, cc))
}

/// Arctangent of a real `BigFloat`.
pub fn ratan(x: &BigFloat, p: usize) -> BigFloat {
    with_cc(|cc| x.atan(p, RM, cc))
}

/// Square root of a nonnegative real `BigFloat`.
pub fn rsqrt(x: &BigFloat, p: usize) -> BigFloat {
    x.sqrt(p, RM)
}

/// Two-argument arctangent with the usual quadrant conventions.
pub fn ratan2(y: &BigFloat, x: &BigFloat, p: usize) -> BigFloat {
    let zero = BigFloat::from_i8(0, p);
    if x.is_zero() {
        if y.is_zero() {
            return zero;
        }
        let mut h = pi(p);
        h.set_exponent(h.exponent().unwrap() - 1); // π/2
        return if y.is_negative() { h.neg() } else { h };
    }
    let base = ratan(&y.div(x, p, RM), p);
    if x.is_positive() {
        base
    } else if y.is_negative() {
        base.sub(&pi(p), p, RM)
    } else {
        base.add(&pi(p), p, RM)
    }
}

/// Saturating conversion to a hardware double.
pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _n, sign, e, _) = x.as_raw_parts().expect("finite value has raw parts");
    // Mantissa words are little-endian; the value is 0.m · 2^e with the top
    // mantissa bit set. Accumulate the two most significant words.
    let mut frac = 0.0f64;
    let mut scale = 0i32;
    for w in words.iter().rev().take(2) {
        scale -= WORD_BIT_SIZE as i32;
        frac += (*w as f64) * (2.0f64).powi(scale);
    }
    if e > 1080 {
        return if sign.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    if e < -1080 {
        return if sign.is_negative() { -0.0 } else { 0.0 };
    }
    let v = frac * (2.0f64).powi(e);
    if sign.is_negative() {
        -v
    } else {
        v
    }
}

/// Arbitrary-precision complex number (see module docs).
#[derive(Clone, PartialEq)]
pub struct BigC {
    re: BigFloat,
    im: BigFloat,
    p: usize,
}

impl BigC {
    /// Wrap a pair of real parts, recording precision `p` bits.
    pub fn new(re: BigFloat, im: BigFloat, p: usize) -> Self {
        BigC { re, im, p }
    }

    /// Real part (borrow).
    pub fn re_big(&self) -> &BigFloat {
        &self.re
    }

    /// Imaginary part (borrow).
    pub fn im_big(&self) -> &BigFloat {
        &self.im
    }

    /// Construct from decimal strings (e.g. `"-0.4357"`), rounded at `p` bits.
    pub fn from_dec_strings(re: &str, im: &str, p: usize) -> Self {
        let re = with_cc(|cc| BigFloat::parse(re, Radix::Dec, p, RM, cc));
        let im = with_cc(|cc| BigFloat::parse(im, Radix::Dec, p, RM, cc));
        BigC { re, im, p }
    }

    fn binop(&self, rhs: &Self, f: impl Fn(&BigFloat, &BigFloat, usize) -> (BigFloat, BigFloat)) -> Self {
        let p = self.p.max(rhs.p);
        let (re, im) = f(&rhs.re, &rhs.im, p);
        BigC { re, im, p }
    }

    fn add_impl(&self, rhs: &Self) -> Self {
        self.binop(rhs, |rre, rim, p| {
            (self.re.add(rre, p, RM), self.im.add(rim, p, RM))
        })
    }

    fn sub_impl(&self, rhs: &Self) -> Self {
        self.binop(rhs, |rre, rim, p| {
            (self.re.sub(rre, p, RM), self.im.sub(rim, p, RM))
        })
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        self.binop(rhs, |rre, rim, p| {
            let ac = self.re.mul(rre, p, RM);
            let bd = self.im.mul(rim, p, RM);
            let ad = self.re.mul(rim, p, RM);
            let bc = self.im.mul(rre, p, RM);
            (ac.sub(&bd, p, RM), ad.add(&bc, p, RM))
        })
    }

    fn div_impl(&self, rhs: &Self) -> Self {
        self.binop(rhs, |rre, rim, p| {
            let den = rre.mul(rre, p, RM).add(&rim.mul(rim, p, RM), p, RM);
            let nre = self.re.mul(rre, p, RM).add(&self.im.mul(rim, p, RM), p, RM);
            let nim = self.im.mul(rre, p, RM).sub(&self.re.mul(rim, p, RM), p, RM);
            (nre.div(&den, p, RM), nim.div(&den, p, RM))
        })
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl $trait for BigC {
            type Output = BigC;
            fn $method(self, rhs: BigC) -> BigC {
                self.$impl_fn(&rhs)
            }
        }
        impl<'a> $trait<&'a BigC> for BigC {
            type Output = BigC;
            fn $method(self, rhs: &'a BigC) -> BigC {
                self.$impl_fn(rhs)
            }
        }
        impl<'a, 'b> $trait<&'b BigC> for &'a BigC {
            type Output = BigC;
            fn $method(self, rhs: &'b BigC) -> BigC {
                self.$impl_fn(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, div_impl);

impl Neg for BigC {
    type Output = BigC;
    fn neg(self) -> BigC {
        BigC { re: self.re.neg(), im: self.im.neg(), p: self.p }
    }
}

impl fmt::Debug for BigC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigC({:e}, {:e}; p={})", self.re_f64(), self.im_f64(), self.p)
    }
}

impl fmt::Display for BigC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

impl Scalar for BigC {
    fn prec(&self) -> usize {
        self.p
    }

    fn from_f64_prec(re: f64, im: f64, prec: usize) -> Self {
        BigC { re: BigFloat::from_f64(re, prec), im: BigFloat::from_f64(im, prec), p: prec }
    }

    fn from_i64_prec(n: i64, prec: usize) -> Self {
        BigC { re: BigFloat::from_i64(n, prec), im: BigFloat::from_i8(0, prec), p: prec }
    }

    fn from_ratio_prec(num: &BigInt, den: &BigInt, prec: usize) -> Self {
        // Decimal-string round trip is exact for integers; the final division
        // is the only rounding step.
        let n = with_cc(|cc| {
            BigFloat::parse(&num.to_string(), Radix::Dec, prec + 64, RoundingMode::ToEven, cc)
        });
        let d = with_cc(|cc| {
            BigFloat::parse(&den.to_string(), Radix::Dec, prec + 64, RoundingMode::ToEven, cc)
        });
        BigC { re: n.div(&d, prec, RM), im: BigFloat::from_i8(0, prec), p: prec }
    }

    fn re_f64(&self) -> f64 {
        bf_to_f64(&self.re)
    }

    fn im_f64(&self) -> f64 {
        bf_to_f64(&self.im)
    }

    fn abs_f64(&self) -> f64 {
        self.re_f64().hypot(self.im_f64())
    }

    fn arg_f64(&self) -> f64 {
        bf_to_f64(&ratan2(&self.im, &self.re, self.p))
    }

    fn re_part(&self) -> Self {
        BigC { re: self.re.clone(), im: BigFloat::from_i8(0, self.p), p: self.p }
    }

    fn im_part(&self) -> Self {
        BigC { re: self.im.clone(), im: BigFloat::from_i8(0, self.p), p: self.p }
    }

    fn conj(&self) -> Self {
        BigC { re: self.re.clone(), im: bneg(&self.im), p: self.p }
    }

    fn mul_i(&self) -> Self {
        BigC { re: bneg(&self.im), im: self.re.clone(), p: self.p }
    }

    fn abs(&self) -> Self {
        let p = self.p;
        let m = self
            .re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM);
        BigC { re: rsqrt(&m, p), im: BigFloat::from_i8(0, p), p }
    }

    fn exp(&self) -> Self {
        let p = self.p;
        let ea = rexp(&self.re, p);
        let c = rcos(&self.im, p);
        let s = rsin(&self.im, p);
        BigC { re: ea.mul(&c, p, RM), im: ea.mul(&s, p, RM), p }
    }

    fn ln(&self) -> Self {
        let p = self.p;
        let m2 = self
            .re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM);
        let mut half_ln = rln(&m2, p);
        half_ln.set_exponent(half_ln.exponent().unwrap_or(0) - 1);
        BigC { re: half_ln, im: ratan2(&self.im, &self.re, p), p }
    }

    fn sqrt(&self) -> Self {
        let p = self.p;
        let zero = BigFloat::from_i8(0, p);
        if self.re.is_zero() && self.im.is_zero() {
            return BigC { re: zero.clone(), im: zero, p };
        }
        let r = {
            let m2 = self
                .re
                .mul(&self.re, p, RM)
                .add(&self.im.mul(&self.im, p, RM), p, RM);
            rsqrt(&m2, p)
        };
        // Stable half-angle form: u = sqrt((r+|re|)/2).
        let abs_re = self.re.abs();
        let mut t = r.add(&abs_re, p, RM);
        t.set_exponent(t.exponent().unwrap_or(0) - 1);
        let u = rsqrt(&t, p);
        let two_u = {
            let mut v = u.clone();
            v.set_exponent(v.exponent().unwrap_or(0) + 1);
            v
        };
        if !self.re.is_negative() {
            let im = self.im.div(&two_u, p, RM);
            BigC { re: u, im, p }
        } else {
            let re = self.im.abs().div(&two_u, p, RM);
            let im = if self.im.is_negative() { u.neg() } else { u };
            BigC { re, im, p }
        }
    }

    fn powi(&self, n: i64) -> Self {
        let one = Self::from_i64_prec(1, self.p);
        if n == 0 {
            return one;
        }
        let base = if n < 0 { one.clone() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = one;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &sq;
            }
            sq = sq.clone() * &sq;
            e >>= 1;
        }
        acc
    }

    fn scale2(&self, k: i32) -> Self {
        let shift = |x: &BigFloat| {
            if x.is_zero() {
                return x.clone();
            }
            let mut y = x.clone();
            y.set_exponent(y.exponent().unwrap() + k);
            y
        };
        BigC { re: shift(&self.re), im: shift(&self.im), p: self.p }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    fn pi_like(&self) -> Self {
        BigC { re: pi(self.p), im: BigFloat::from_i8(0, self.p), p: self.p }
    }

    fn to_decimal_strings(&self) -> (String, String) {
        (format!("{}", self.re), format!("{}", self.im))
    }
}

impl BigC {
    /// Signed BigInt constructor (exact when `prec` exceeds the bit length).
    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let re = with_cc(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, prec, RM, cc));
        BigC { re, im: BigFloat::from_i8(0, prec), p: prec }
    }
}
