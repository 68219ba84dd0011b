//! Polylogarithms `Li_n` for `n <= 2` on the principal branch.
//!
//! The dilogarithm `Li_2` is taken with its cut along `[1, oo)`; `Li_1(x) =
//! -log(1 - x)` inherits the principal logarithm's cut on the same ray. The
//! non-positive orders `Li_{-n}` are rational functions of `x` with a single
//! pole at `x = 1`, evaluated through their closed Eulerian-number form
//!
//! ```text
//! Li_{-n}(x) = (1 - x)^{-(n+1)} * sum_{l=0}^{n-1} <n, l> x^{n-l}   (n >= 1),
//! Li_0(x)    = x / (1 - x).
//! ```
//!
//! `Li_2` is reduced to the disk `{|x| <= 1, Re x <= 1/2}` by the inversion
//! and reflection identities and then summed by the Debye series
//! `Li_2(x) = sum_{k>=0} B_k u^{k+1} / (k+1)!` with `u = -log(1 - x)`, whose
//! ratio `|u| / 2 pi` stays below `0.21` on that region. All routines are
//! generic over [`Scalar`], so the same code path serves both double and
//! arbitrary precision.

use num_bigint::BigInt;
use num_traits::One;

use super::bernoulli::{bernoulli, eulerian};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Distance to `x = 1` below which the rational forms are reported as poles
/// rather than evaluated (relative to double precision; the arbitrary
/// precision backends can in principle go closer, but every caller treats
/// such a point as singular anyway).
const POLE_CLEARANCE: f64 = 1e-280;

fn from_ratio<S: Scalar>(num: &BigInt, den: &BigInt, model: &S) -> S {
    S::from_ratio_prec(num, den, model.prec())
}

/// `Li_{-n}(x)` for `n >= 0` via the Eulerian closed form.
///
/// Fails with [`Error::Pole`] when `x` is (numerically) `1`.
pub fn polylog_nonpos<S: Scalar>(n: usize, x: &S) -> Result<S> {
    let one = S::from_i64_prec(1, x.prec());
    let omx = one - x;
    if omx.abs_f64() < POLE_CLEARANCE {
        return Err(Error::Pole(format!("Li_{}", -(n as i64))));
    }
    if n == 0 {
        return Ok(x.clone() / &omx);
    }
    // Horner evaluation of sum_l <n,l> x^{n-l} = x * sum_l <n,l> x^{n-1-l}.
    let unit = BigInt::one();
    let mut num = from_ratio(&eulerian(n, 0), &unit, x);
    for l in 1..n {
        num = num * x + from_ratio(&eulerian(n, l), &unit, x);
    }
    num = num * x;
    Ok(num / omx.powi(n as i64 + 1))
}

/// `Li_1(x) = -log(1 - x)` on the principal branch (cut `[1, oo)`).
pub fn li1<S: Scalar>(x: &S) -> S {
    let one = S::from_i64_prec(1, x.prec());
    -(one - x).ln()
}

/// `pi^2 / 6` at the working precision of `model`.
fn zeta2<S: Scalar>(model: &S) -> S {
    let pi = model.pi_like();
    let six = S::from_i64_prec(6, model.prec());
    pi.clone() * &pi / six
}

/// The principal dilogarithm `Li_2(x)`, cut along `[1, oo)`.
///
/// For `|x| > 1` the inversion identity
/// `Li_2(x) = -pi^2/6 - log(-x)^2 / 2 - Li_2(1/x)` is applied first; if the
/// remaining argument has `Re x > 1/2`, the reflection
/// `Li_2(x) = pi^2/6 - log(x) log(1-x) - Li_2(1-x)` follows. The reduced
/// argument is summed with the Debye series in `u = -log(1 - x)`.
///
/// On the cut itself the branch follows the sign of `Im x` including IEEE
/// signed zeros: `x + i*(+0)` gives the limit from above (`Im = +pi log x`),
/// `x - i*0` the limit from below, consistent with the principal logarithm.
pub fn dilog<S: Scalar>(x: &S) -> S {
    let p = x.prec();
    let one = S::from_i64_prec(1, p);
    if x.is_zero() {
        return x.clone();
    }
    if (x.clone() - &one).abs_f64() < POLE_CLEARANCE {
        return zeta2(x);
    }
    if x.abs_f64() > 1.0 {
        // Li_2(x) = -pi^2/6 - log(-x)^2/2 - Li_2(1/x)
        let lnmx = (-x.clone()).ln();
        let half_sq = (lnmx.clone() * &lnmx).scale2(-1);
        return -zeta2(x) - half_sq - dilog(&(one / x));
    }
    if x.re_f64() > 0.5 {
        // Li_2(x) = pi^2/6 - log(x) log(1-x) - Li_2(1-x)
        let omx = one - x;
        return zeta2(x) - x.ln() * omx.ln() - dilog(&omx);
    }
    debye_series(x)
}

/// Debye series for `Li_2` on the reduced region `|x| <= 1, Re x <= 1/2`.
fn debye_series<S: Scalar>(x: &S) -> S {
    let p = x.prec();
    let one = S::from_i64_prec(1, p);
    let u = -(one - x).ln();
    let eps = x.eps_f64();
    // term_k = B_k u^{k+1} / (k+1)!; build u^{k+1}/(k+1)! incrementally.
    let mut pow = u.clone();
    let mut acc = u.clone();
    // k = 1 handled explicitly (the only odd k with nonzero Bernoulli).
    pow = pow * &u / S::from_i64_prec(2, p);
    acc = acc - pow.scale2(-1);
    let mut k = 2usize;
    loop {
        pow = pow * &u / S::from_i64_prec(k as i64 + 1, p);
        let b = bernoulli(k);
        let term = from_ratio(b.numer(), b.denom(), x) * &pow;
        let t = term.abs_f64();
        acc = acc + term;
        if t < eps * (acc.abs_f64() + 1.0) {
            break;
        }
        // Skip odd k > 1: B_k = 0, but the power/factorial must advance.
        pow = pow * &u / S::from_i64_prec(k as i64 + 2, p);
        k += 2;
        if k > 2000 {
            // |u| < 2 pi guarantees convergence; this is unreachable and
            // only protects against NaN inputs cycling forever.
            break;
        }
    }
    acc
}

/// Dispatcher for `Li_n(x)`, `n <= 2`.
pub fn polylog<S: Scalar>(n: i64, x: &S) -> Result<S> {
    match n {
        2 => Ok(dilog(x)),
        1 => Ok(li1(x)),
        _ if n <= 0 => polylog_nonpos((-n) as usize, x),
        _ => Err(Error::Unsupported(format!("Li_{n} not implemented"))),
    }
}

// --- Compositions with e(z) = exp(2 pi i z) -------------------------------
//
// Every potential and every branch function in this crate evaluates
// polylogarithms at x = e(z). For Im z << 0 the argument overflows any
// floating point format, so the helpers below apply the inversion identities
// *before* exponentiating, reducing to arguments e(-z) with |e(-z)| < 1.
// All of them are principal-branch values; the cut of the composed map
// z -> Li_k(e(z)) (k = 2, 1) is the vertical family Z + i*R_{<=0}.

/// `z + 1/2 - ceil(Re z)`, the representative with `Re` in `(-1/2, 1/2]`.
///
/// This is the principal value of `log(-e(z)) / (2 pi i)`; the tie at
/// integer `Re z` (i.e. `-e(z)` on the negative real axis) resolves to
/// `Re = 1/2`, matching `arg = +pi` for the principal logarithm.
fn log_neg_e2pi_norm<S: Scalar>(z: &S) -> S {
    let m = z.re_f64().ceil() as i64;
    z.clone() + S::from_ratio_prec(&BigInt::one(), &BigInt::from(2), z.prec())
        - S::from_i64_prec(m, z.prec())
}

/// Principal `Li_2(e(z)) / (2 pi i)^2`, robust for arbitrary `Im z`.
pub fn li2_e2pi_norm<S: Scalar>(z: &S) -> S {
    if z.im_f64() >= -0.5 {
        let tpi = crate::numerics::two_pi_i(z);
        let tpi2 = tpi.clone() * &tpi;
        dilog(&crate::numerics::e2pi(z)) / tpi2
    } else {
        // Li2(x) = -zeta(2) - log(-x)^2/2 - Li2(1/x), normalised by (2 pi i)^2:
        // 1/24 - w^2/2 - Li2(e(-z))/(2 pi i)^2 with w = log(-e(z))/(2 pi i).
        let w = log_neg_e2pi_norm(z);
        let w2h = (w.clone() * &w).scale2(-1);
        S::from_ratio_prec(&BigInt::one(), &BigInt::from(24), z.prec())
            - w2h
            - li2_e2pi_norm(&-z.clone())
    }
}

/// Principal `Li_1(e(z)) / (2 pi i) = -log(1 - e(z)) / (2 pi i)`, robust.
pub fn li1_e2pi_norm<S: Scalar>(z: &S) -> S {
    if z.im_f64() >= -0.5 {
        li1(&crate::numerics::e2pi(z)) / crate::numerics::two_pi_i(z)
    } else {
        // -log(1-x) = -log(-x) - log(1 - 1/x) with both factors principal
        // (generic z; the measure-zero tie sits on the cut anyway).
        li1_e2pi_norm(&-z.clone()) - log_neg_e2pi_norm(z)
    }
}

/// `Li_0(e(z)) = e(z) / (1 - e(z))`, robust. Pole at `z` in `Z`.
pub fn li0_e2pi<S: Scalar>(z: &S) -> Result<S> {
    if z.im_f64() >= -0.5 {
        polylog_nonpos(0, &crate::numerics::e2pi(z))
    } else {
        // Li0(x) = -1 - Li0(1/x).
        let one = S::from_i64_prec(1, z.prec());
        Ok(-one - li0_e2pi(&-z.clone())?)
    }
}

/// `Li_{-n}(e(z))` for `n >= 0`, robust on both half-planes.
///
/// Uses `Li_{-n}(x) = (-1)^{n+1} Li_{-n}(1/x)` (n >= 1) to keep the
/// exponential argument bounded. Pole at `z` in `Z`.
pub fn li_neg_e2pi<S: Scalar>(n: usize, z: &S) -> Result<S> {
    if n == 0 {
        return li0_e2pi(z);
    }
    if z.im_f64() >= -0.5 {
        polylog_nonpos(n, &crate::numerics::e2pi(z))
    } else {
        let v = polylog_nonpos(n, &crate::numerics::e2pi(&-z.clone()))?;
        Ok(if n % 2 == 1 { v } else { -v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BigC;
    use num_complex::Complex64;

    const CATALAN: f64 = 0.915_965_594_177_219;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn dilog_special_values() {
        let pi = std::f64::consts::PI;
        let ln2 = std::f64::consts::LN_2;
        assert!(close(
            dilog(&c(0.5, 0.0)),
            c(pi * pi / 12.0 - ln2 * ln2 / 2.0, 0.0),
            1e-15
        ));
        assert!(close(dilog(&c(-1.0, 0.0)), c(-pi * pi / 12.0, 0.0), 1e-15));
        assert!(close(dilog(&c(1.0, 0.0)), c(pi * pi / 6.0, 0.0), 1e-15));
        assert!(close(
            dilog(&c(0.0, 1.0)),
            c(-pi * pi / 48.0, CATALAN),
            1e-15
        ));
        // On-cut values follow the signed zero: +0 is the limit from above.
        assert!(close(
            dilog(&c(2.0, 0.0)),
            c(pi * pi / 4.0, pi * ln2),
            1e-14
        ));
        assert!(close(
            dilog(&c(2.0, -0.0)),
            c(pi * pi / 4.0, -pi * ln2),
            1e-14
        ));
    }

    #[test]
    fn dilog_square_identity() {
        // Li_2(x) + Li_2(-x) = Li_2(x^2) / 2 away from the cuts.
        for (re, im) in [(0.3, 0.4), (-0.6, 0.2), (0.1, -0.7), (0.45, 0.0)] {
            let x = c(re, im);
            let lhs = dilog(&x) + dilog(&(-x));
            let rhs = dilog(&(x * x)) / 2.0;
            assert!(close(lhs, rhs, 1e-14), "x = {x}");
        }
    }

    #[test]
    fn dilog_derivative_matches_li1() {
        // d/dx Li_2 = -log(1-x)/x = Li_1(x)/x, via central differences.
        let h = 1e-6;
        for (re, im) in [(0.2, 0.3), (-1.5, 0.8), (3.0, -2.0), (0.9, 0.1)] {
            let x = c(re, im);
            let num = (dilog(&(x + c(h, 0.0))) - dilog(&(x - c(h, 0.0)))) / (2.0 * h);
            let exact = li1(&x) / x;
            assert!(close(num, exact, 1e-7), "x = {x}");
        }
    }

    #[test]
    fn dilog_bigc_matches_f64_and_refines() {
        let xf = c(0.37, -0.22);
        let xb = BigC::from_f64_prec(0.37, -0.22, 256);
        let df = dilog(&xf);
        let db = dilog(&xb);
        assert!((db.re_f64() - df.re).abs() < 1e-15);
        assert!((db.im_f64() - df.im).abs() < 1e-15);
        // Identity at high precision: Li_2(x) + Li_2(1-x) + log x log(1-x) = pi^2/6.
        let one = BigC::from_f64_prec(1.0, 0.0, 256);
        let lhs = dilog(&xb) + dilog(&(&one - &xb)) + xb.ln() * (&one - &xb).ln();
        let rhs = zeta2(&xb);
        let diff = lhs - rhs;
        assert!(diff.abs_f64() < 1e-70, "residual {}", diff.abs_f64());
    }

    #[test]
    fn nonpos_orders_match_rational_forms() {
        let x = c(0.5, 0.0);
        assert!(close(polylog_nonpos(0, &x).unwrap(), c(1.0, 0.0), 1e-15));
        assert!(close(polylog_nonpos(1, &x).unwrap(), c(2.0, 0.0), 1e-15));
        assert!(close(polylog_nonpos(2, &x).unwrap(), c(6.0, 0.0), 1e-14));
        assert!(close(polylog_nonpos(3, &x).unwrap(), c(26.0, 0.0), 1e-13));
        // Li_{-1}(x) = x/(1-x)^2 at a complex point.
        let z = c(-0.3, 0.8);
        let expect = z / ((c(1.0, 0.0) - z) * (c(1.0, 0.0) - z));
        assert!(close(polylog_nonpos(1, &z).unwrap(), expect, 1e-14));
    }

    #[test]
    fn nonpos_orders_satisfy_euler_derivative_chain() {
        // x * d/dx Li_{-n}(x) = Li_{-(n+1)}(x), checked by central differences.
        let h = 1e-6;
        for n in 0..5usize {
            for (re, im) in [(0.4, 0.3), (-1.2, 0.5), (2.0, 2.0)] {
                let x = c(re, im);
                let up = polylog_nonpos(n, &(x + c(h, 0.0))).unwrap();
                let dn = polylog_nonpos(n, &(x - c(h, 0.0))).unwrap();
                let lhs = x * (up - dn) / (2.0 * h);
                let rhs = polylog_nonpos(n + 1, &x).unwrap();
                assert!(
                    (lhs - rhs).norm() < 1e-5 * (1.0 + rhs.norm()),
                    "n = {n}, x = {x}"
                );
            }
        }
    }

    #[test]
    fn pole_is_reported() {
        assert!(polylog_nonpos(2, &c(1.0, 0.0)).is_err());
    }

    /// e(z)-composed helpers agree with direct evaluation while the direct
    /// route is still representable, across the Im z = -1/2 formula switch.
    #[test]
    fn e2pi_helpers_match_direct_evaluation() {
        let tpi = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        for z in [
            c(0.31, 0.62),
            c(-0.73, 0.08),
            c(0.31, -0.45),
            c(0.31, -0.55),
            c(-1.27, -2.3),
            c(3.41, -0.92),
        ] {
            let x = (tpi * z).exp();
            let d2 = dilog(&x) / (tpi * tpi);
            let d1 = li1(&x) / tpi;
            let d0 = x / (1.0 - x);
            assert!(close(li2_e2pi_norm(&z), d2, 1e-12), "Li2 at {z}");
            assert!(close(li1_e2pi_norm(&z), d1, 1e-12), "Li1 at {z}");
            assert!(close(li0_e2pi(&z).unwrap(), d0, 1e-12), "Li0 at {z}");
            for n in 1..4usize {
                let dn = polylog_nonpos(n, &x).unwrap();
                assert!(
                    close(li_neg_e2pi(n, &z).unwrap(), dn, 1e-11),
                    "Li_-{n} at {z}"
                );
            }
        }
    }

    /// Deep in the lower half-plane the inverted formulas stay finite and
    /// obey the derivative chain d/dz Li2/(2pii)^2 = Li1/(2pii), then Li0.
    #[test]
    fn e2pi_helpers_derivative_chain_deep() {
        let h = 1e-5;
        for z in [c(0.3, -4.0), c(-2.6, -37.0), c(0.45, 2.0)] {
            let up2 = li2_e2pi_norm(&(z + c(h, 0.0)));
            let dn2 = li2_e2pi_norm(&(z - c(h, 0.0)));
            let d1 = li1_e2pi_norm(&z);
            assert!(
                ((up2 - dn2) / (2.0 * h) - d1).norm() < 1e-8 * (1.0 + d1.norm()),
                "chain 2->1 at {z}"
            );
            let up1 = li1_e2pi_norm(&(z + c(h, 0.0)));
            let dn1 = li1_e2pi_norm(&(z - c(h, 0.0)));
            let d0 = li0_e2pi(&z).unwrap();
            assert!(
                ((up1 - dn1) / (2.0 * h) - d0).norm() < 1e-8 * (1.0 + d0.norm()),
                "chain 1->0 at {z}"
            );
            assert!(li2_e2pi_norm(&z).is_finite());
        }
    }

    /// The lower-half-plane reduction reproduces the reflection identity
    /// Li2-norm(z) = -(z(z+1)/2 + 1/12) - Li2-norm(-z) on Re z in (-1, 0).
    #[test]
    fn e2pi_reflection_identity_strip() {
        for z in [c(-0.25, -3.0), c(-0.8, -1.1), c(-0.5, -0.51)] {
            let lhs = li2_e2pi_norm(&z);
            let rhs = -(z * (z + 1.0) / 2.0 + 1.0 / 12.0) - li2_e2pi_norm(&-z);
            assert!(close(lhs, rhs, 1e-13), "reflection at {z}");
        }
    }

    /// BigC evaluation of the deep-plane route agrees with f64.
    #[test]
    fn e2pi_helpers_bigc_agree() {
        let z64 = c(0.37, -1.42);
        let zb = BigC::from_f64_prec(0.37, -1.42, 160);
        let a = li2_e2pi_norm(&zb);
        let b = li2_e2pi_norm(&z64);
        assert!(
            (a.re_f64() - b.re).abs() + (a.im_f64() - b.im).abs() < 1e-13,
            "BigC {a} vs f64 {b}"
        );
    }
}
