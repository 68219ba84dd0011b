//! Jacobi theta functions, q-Pochhammer symbols and Eisenstein series.
//!
//! The theta function used throughout is
//!
//! ```text
//! theta(x; q) = (qx; q)_oo (x^-1; q)_oo (q; q)_oo
//!             = sum_{n in Z} (-1)^n q^{n(n+1)/2} x^n,
//! ```
//!
//! the second line by the Jacobi triple product. Both forms are available:
//! the product numerically at any `|q| < 1`, and the sum as an exact
//! [`QxSeries`] when `x` is a signed monomial in a fractional power of `q`.
//! The module also provides the divisor Eisenstein series
//!
//! ```text
//! E_1(q) = -1/4  + sum_{n>=1} d(n)    q^n,
//! E_2(q) = -1/24 + sum_{n>=1} sigma_1(n) q^n,
//! ```
//!
//! which enter the `q`-factorization of Stokes matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::qseries::QxSeries;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Infinite q-Pochhammer `(x; q)_oo = prod_{k>=0} (1 - x q^k)`, numerically.
///
/// Requires `|q| < 1`; factors are multiplied until they are `1` to working
/// precision.
pub fn pochhammer<S: Scalar>(x: &S, q: &S) -> Result<S> {
    if q.abs_f64() >= 1.0 {
        return Err(Error::OutOfDomain(format!(
            "(x; q)_oo needs |q| < 1, got |q| = {}",
            q.abs_f64()
        )));
    }
    let p = x.prec();
    let one = S::from_i64_prec(1, p);
    let eps = x.eps_f64();
    let mut acc = one.clone();
    let mut xq = x.clone();
    // |x q^k| < eps after a predictable number of steps; 4x slack for safety.
    let kmax = if x.abs_f64() == 0.0 {
        0
    } else {
        let n = (eps.ln() - x.abs_f64().max(1e-300).ln()) / q.abs_f64().max(1e-300).ln();
        ((n.max(0.0) as usize) + 8) * 4
    };
    for _ in 0..=kmax {
        acc = acc * (one.clone() - &xq);
        if xq.abs_f64() < eps {
            return Ok(acc);
        }
        xq = xq * q;
    }
    Err(Error::NoConvergence {
        method: "pochhammer",
        iterations: kmax,
        residual: xq.abs_f64(),
    })
}

/// Finite q-Pochhammer `(x; q)_k = prod_{j=0}^{k-1} (1 - x q^j)`.
pub fn pochhammer_finite<S: Scalar>(x: &S, q: &S, k: usize) -> S {
    let p = x.prec();
    let one = S::from_i64_prec(1, p);
    let mut acc = one.clone();
    let mut xq = x.clone();
    for _ in 0..k {
        acc = acc * (one.clone() - &xq);
        xq = xq * q;
    }
    acc
}

/// `theta(x; q)` numerically via the triple product.
pub fn theta<S: Scalar>(x: &S, q: &S) -> Result<S> {
    let p = x.prec();
    let one = S::from_i64_prec(1, p);
    let qx = q.clone() * x;
    let xinv = one / x;
    Ok(pochhammer(&qx, q)? * pochhammer(&xinv, q)? * pochhammer(q, q)?)
}

/// Exact series for `theta(sign * q^{a/scale}; q^{b/scale})` from the triple
/// product sum `sum_n (-sign)^n q^{(b n(n+1)/2 + a n)/scale}`.
///
/// `b` must be positive; the result is a Laurent series on the `1/scale`
/// grid truncated at `trunc`.
pub fn theta_series(sign: i8, a: i64, b: i64, scale: u32, trunc: i64) -> QxSeries {
    assert!(b > 0, "theta nome exponent must be positive");
    let mut out = QxSeries::zero(scale, trunc);
    let term = |n: i64| -> i64 { b * n * (n + 1) / 2 + a * n };
    // The exponent is a upward parabola in n; walk both directions from the
    // vertex until the exponent passes the truncation.
    let n0 = (-(a as f64) / (b as f64) - 0.5).round() as i64;
    for dir in [0i64, 1] {
        let mut n = n0 + dir;
        let step = if dir == 0 { -1 } else { 1 };
        loop {
            let e = term(n);
            if e >= trunc && (n - n0).abs() > 2 {
                break;
            }
            if e < trunc {
                // Coefficient (-1)^n sign^n = (-sign)^n.
                let c = if sign < 0 || n.rem_euclid(2) == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                out = out.add(&QxSeries::monomial(BigRational::from(c), e, scale, trunc));
            }
            n += step;
            if (n - n0).abs() > 4 + (2 * trunc.unsigned_abs() as i64 / b + 2) {
                break;
            }
        }
    }
    out
}

/// Exact series for the infinite product `prod_{k>=0} (1 - c q^{(a + k*step)/scale})`.
///
/// Requires `a > 0` and `step > 0` so that the product converges `q`-adically.
pub fn pochhammer_series(c: &BigRational, a: i64, step: i64, scale: u32, trunc: i64) -> QxSeries {
    assert!(a > 0 && step > 0, "pochhammer series needs positive exponents");
    let mut acc = QxSeries::one(scale, trunc);
    let mut e = a;
    while e < trunc {
        let factor = QxSeries::one(scale, trunc).sub(&QxSeries::monomial(c.clone(), e, scale, trunc));
        acc = acc.mul(&factor);
        e += step;
    }
    acc
}

/// Exact finite product `prod_{j=0}^{k-1} (1 - c q^{(a + j*step)/scale})`.
pub fn pochhammer_finite_series(
    c: &BigRational,
    a: i64,
    step: i64,
    scale: u32,
    trunc: i64,
    k: usize,
) -> QxSeries {
    let mut acc = QxSeries::one(scale, trunc);
    for j in 0..k as i64 {
        let factor =
            QxSeries::one(scale, trunc).sub(&QxSeries::monomial(c.clone(), a + j * step, scale, trunc));
        acc = acc.mul(&factor);
    }
    acc
}

/// Divisor counts `d(1..n)` by sieve.
fn divisor_counts(n: usize) -> Vec<u64> {
    let mut d = vec![0u64; n + 1];
    for i in 1..=n {
        let mut j = i;
        while j <= n {
            d[j] += 1;
            j += i;
        }
    }
    d
}

/// Divisor sums `sigma_1(1..n)` by sieve.
fn divisor_sums(n: usize) -> Vec<u64> {
    let mut s = vec![0u64; n + 1];
    for i in 1..=n {
        let mut j = i;
        while j <= n {
            s[j] += i as u64;
            j += i;
        }
    }
    s
}

/// `E_1(q) = -1/4 + sum d(n) q^n` as an exact series (scale 1).
pub fn eisenstein_e1(trunc: i64) -> QxSeries {
    let mut out = QxSeries::monomial(
        BigRational::new(BigInt::from(-1), BigInt::from(4)),
        0,
        1,
        trunc,
    );
    let d = divisor_counts(trunc.max(0) as usize);
    for (n, &dn) in d.iter().enumerate().skip(1) {
        out = out.add(&QxSeries::term_i64(dn as i64, n as i64, 1, trunc));
    }
    out
}

/// `E_2(q) = -1/24 + sum sigma_1(n) q^n` as an exact series (scale 1).
pub fn eisenstein_e2(trunc: i64) -> QxSeries {
    let mut out = QxSeries::monomial(
        BigRational::new(BigInt::from(-1), BigInt::from(24)),
        0,
        1,
        trunc,
    );
    let s = divisor_sums(trunc.max(0) as usize);
    for (n, &sn) in s.iter().enumerate().skip(1) {
        out = out.add(&QxSeries::term_i64(sn as i64, n as i64, 1, trunc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triple_product_matches_series() {
        let q = c(0.17, 0.08);
        for x in [c(0.6, 0.3), c(-1.2, 0.5), c(0.2, -0.9)] {
            let prod = theta(&x, &q).unwrap();
            // Direct sum: sum_n (-1)^n q^{n(n+1)/2} x^n.
            let mut sum = c(0.0, 0.0);
            for n in -40i32..=40 {
                let e = (n * (n + 1) / 2) as f64;
                let term = q.powf(e) * x.powi(n);
                sum += if n % 2 == 0 { term } else { -term };
            }
            assert!((prod - sum).norm() < 1e-12, "x = {x}: {prod} vs {sum}");
        }
    }

    #[test]
    fn theta_series_matches_numeric() {
        // theta(-q^{3/8}; q^{1/2}) at q = 0.3 via series and via product.
        let s = theta_series(-1, 3, 4, 8, 400);
        let q = c(0.3, 0.0);
        let root8 = q.powf(1.0 / 8.0);
        let x = -root8.powi(3);
        let nome = root8.powi(4);
        let series_val = s.eval(&q);
        let prod_val = theta(&x, &nome).unwrap();
        assert!((series_val - prod_val).norm() < 1e-10, "{series_val} vs {prod_val}");
    }

    #[test]
    fn theta_quasi_periodicity_series() {
        // theta(q x; q) = -(q x)^{-1} theta(x; q) with x = -q^2:
        // theta(-q^3; q) = q^{-3} theta(-q^2; q).
        let lhs = theta_series(-1, 3, 1, 1, 30);
        let rhs = theta_series(-1, 2, 1, 1, 30).shift(-3);
        assert!(lhs.agrees_through(&rhs, 20));
    }

    #[test]
    fn qq_infinite_euler_pentagonal() {
        // (q; q)_oo = 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
        let s = pochhammer_series(&BigRational::one(), 1, 1, 1, 20);
        let expect: &[(i64, i64)] =
            &[(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1), (15, -1)];
        for n in 0..20i64 {
            let want = expect.iter().find(|(k, _)| *k == n).map(|(_, v)| *v).unwrap_or(0);
            assert_eq!(s.coeff_int(n), BigRational::from(BigInt::from(want)), "q^{n}");
        }
    }

    #[test]
    fn finite_pochhammer_series_and_numeric_agree() {
        let s = pochhammer_finite_series(&BigRational::one(), 1, 1, 1, 30, 3);
        let q = c(0.21, -0.13);
        let series_val = s.eval(&q);
        let direct = pochhammer_finite(&q, &q, 3);
        assert!((series_val - direct).norm() < 1e-13);
    }

    #[test]
    fn eisenstein_leading_terms() {
        let e1 = eisenstein_e1(10);
        let want1 = [(0, -1, 4), (1, 1, 1), (2, 2, 1), (3, 2, 1), (4, 3, 1), (5, 2, 1), (6, 4, 1), (7, 2, 1), (8, 4, 1), (9, 3, 1)];
        for (n, num, den) in want1 {
            assert_eq!(e1.coeff_int(n), BigRational::new(BigInt::from(num), BigInt::from(den)), "E1 q^{n}");
        }
        let e2 = eisenstein_e2(8);
        let want2 = [(0, -1, 24), (1, 1, 1), (2, 3, 1), (3, 4, 1), (4, 7, 1), (5, 6, 1), (6, 12, 1), (7, 8, 1)];
        for (n, num, den) in want2 {
            assert_eq!(e2.coeff_int(n), BigRational::new(BigInt::from(num), BigInt::from(den)), "E2 q^{n}");
        }
    }

    #[test]
    fn pochhammer_numeric_converges_and_rejects_bad_nome() {
        let q = c(0.4, 0.2);
        let x = c(0.9, -0.3);
        let v = pochhammer(&x, &q).unwrap();
        // Compare against a long finite product.
        let direct = pochhammer_finite(&x, &q, 200);
        assert!((v - direct).norm() < 1e-13);
        assert!(pochhammer(&x, &c(1.1, 0.0)).is_err());
    }
}
