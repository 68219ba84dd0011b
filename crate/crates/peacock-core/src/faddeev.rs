//! Numerical evaluation of Faddeev's quantum dilogarithm `Φ(z;τ)`, the
//! mirror `Φ⁻(z;τ)`, and their large-`τ` asymptotic expansions.
//!
//! `Φ(z;τ)` is meromorphic on `ℂ × (ℂ∖ℝ≤0)` with poles on the cone
//! `ℤ≥0 + τℤ≥0` and zeros on `ℤ<0 + τℤ<0`, and admits
//!
//! ```text
//! Φ(z;τ) = (q·e(z); q)∞ / (e(z/τ); q̃)∞                 (Im τ > 0)
//!        = (q̃⁻¹·e(z/τ); q̃⁻¹)∞ / (e(z); q⁻¹)∞            (Im τ < 0)
//!        = exp ∫_{i√τℝ+ε√τ} e((z+1+τ)w/τ) / ((e(w)−1)(e(w/τ)−1)) dw/w ,
//! ```
//!
//! with `q = e(τ)`, `q̃ = e(−1/τ)`, `e(x) = e^{2πix}`; the contour formula
//! holds on the strip `Re(−√τ−1/√τ) < Re(z/√τ) < 0` and extends by the
//! quasi-periodicity relations
//!
//! ```text
//! Φ(z−τ;τ) = (1−e(z))·Φ(z;τ) ,     Φ(z−1;τ) = (1−e(z/τ))·Φ(z;τ) ,
//! ```
//!
//! and by the inversion relation
//! `Φ(z;τ)Φ(−τ−z;τ) = i q^{1/6} q̃^{−1/6} e(z²/2τ + z/2 + z/2τ)`.
//!
//! For `|τ| → ∞` at fixed argument, with `θ = arg(−1/τ) ∈ (0,2π)` and `z`
//! at distance `≥ ε` from the boundary rays of `ℂ_θ`,
//!
//! ```text
//! Φ(zτ;τ) = e( D_θ(z)·τ + ½D_θ'(z)
//!              + Σ_{k=2..K} B_k/k!·(2πi)^{k−2}·τ^{1−k}·Li_{2−k}(e(z)) )
//!            · (1 + O(ε^{−K} K! |τ|^{−K})) ,
//! ```
//!
//! and similarly the single Pochhammer symbol satisfies
//! `(e(z); q̃)∞ ≈ e(−L_θ(z)τ − ½L_θ'(z) − Σ …)` for `Im τ > 0`.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::bernoulli::bernoulli;
use crate::numerics::polylog::{li0_e2pi, li_neg_e2pi};
use crate::numerics::quad;
use crate::numerics::theta::pochhammer;
use crate::numerics::{
    branch_d, branch_d_prime, branch_l, branch_l_prime, e2pi, Scalar,
};

/// Product formulas are used when `|Im τ|/|τ|` exceeds this threshold; the
/// contour integral takes over below it.
pub const DISPATCH_RATIO: f64 = 0.05;

/// Nominal offset `ε` of the integral contour `i√τℝ + ε√τ` (shrunk when the
/// nearest integrand pole is closer than that).
pub const CONTOUR_EPSILON: f64 = 0.25;

/// Lattice distance below which a point counts as exactly on the pole or
/// zero cone.
const CONE_EPS: f64 = 1e-10;

/// How the value was produced (last entry of the method chain).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Convergent infinite products (either half-plane).
    Product,
    /// Faddeev's contour-integral formula.
    Integral,
    /// Quasi-periodicity steps `z → z ± 1, z ± τ` applied to another method.
    QuasiperiodicExtension,
    /// Value routed through the inversion / mirror identity.
    InversionExtension,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Product => write!(f, "product"),
            Method::Integral => write!(f, "integral"),
            Method::QuasiperiodicExtension => write!(f, "quasiperiodic-extension"),
            Method::InversionExtension => write!(f, "inversion-extension"),
        }
    }
}

/// A Faddeev evaluation with its provenance.
#[derive(Clone, Debug)]
pub struct FaddeevEval<S> {
    pub value: S,
    /// The dominant method (last of `chain`).
    pub method: Method,
    /// Estimated relative error; at most the requested tolerance on success.
    pub estimated_error: f64,
    /// Elementary methods in order of application.
    pub chain: Vec<Method>,
}

fn c64<S: Scalar>(x: &S) -> Complex64 {
    Complex64::new(x.re_f64(), x.im_f64())
}

fn check_tau<S: Scalar>(tau: &S) -> Result<()> {
    let t = c64(tau);
    if t.im == 0.0 && t.re <= 0.0 {
        return Err(Error::OutOfDomain(format!(
            "Faddeev's dilogarithm is undefined for tau = {t} on the ray R<=0"
        )));
    }
    if !t.is_finite() || t.norm() == 0.0 {
        return Err(Error::InvalidInput(format!("tau = {t} is not usable")));
    }
    Ok(())
}

/// Coordinates `(α, β)` with `z = α + βτ`; only meaningful off the real
/// `τ` axis.
fn lattice_coords(z: Complex64, tau: Complex64) -> (f64, f64) {
    let beta = z.im / tau.im;
    (z.re - beta * tau.re, beta)
}

/// Exact pole / zero cone detection. Returns `Some(true)` on the pole cone
/// `ℤ≥0 + τℤ≥0`, `Some(false)` on the zero cone `ℤ<0 + τℤ<0`.
fn on_cone(z: Complex64, tau: Complex64) -> Option<bool> {
    if tau.im.abs() < 1e-9 {
        // Degenerate lattice: only the real-z cones are detectable.
        return None;
    }
    let (alpha, beta) = lattice_coords(z, tau);
    let j = alpha.round();
    let k = beta.round();
    // Convert the lattice offset back to a geometric distance.
    let dz = (z - Complex64::new(j, 0.0) - tau * k).norm();
    if dz > CONE_EPS {
        return None;
    }
    if j >= -0.5 && k >= -0.5 {
        Some(true)
    } else if j <= -0.5 && k <= -0.5 {
        Some(false)
    } else {
        None
    }
}

/// One quasi-periodicity factor: `Φ(z_next) = Φ(z_prev) · factor` (or the
/// division recorded in `invert`), stepping by `delta ∈ {±1, ±τ}`.
fn qp_step<S: Scalar>(z_prev: &S, tau: &S, step_1: i64, step_tau: i64) -> Result<(S, bool)> {
    let prec = z_prev.prec();
    let one = S::from_i64_prec(1, prec);
    // Φ(z+1) = Φ(z)/(1−e((z+1)/τ));       Φ(z−1) = (1−e(z/τ))·Φ(z);
    // Φ(z+τ) = Φ(z)/(1−e(z+τ));           Φ(z−τ) = (1−e(z))·Φ(z).
    let (arg, invert) = match (step_1, step_tau) {
        (1, 0) => ((z_prev.clone() + &one) / tau, true),
        (-1, 0) => (z_prev.clone() / tau, false),
        (0, 1) => (z_prev.clone() + tau, true),
        (0, -1) => (z_prev.clone(), false),
        _ => unreachable!("qp_step advances by one unit at a time"),
    };
    let factor = one - &e2pi(&arg);
    if factor.abs_f64() < 1e-14 {
        return Err(Error::Pole(format!(
            "quasi-periodicity step hit a pole/zero factor at z = {}",
            c64(z_prev)
        )));
    }
    Ok((factor, invert))
}

/// Walk from `z_from` to `z_from + a + bτ`, accumulating the elementary
/// factors onto `value`. Returns the transported value.
fn qp_walk<S: Scalar>(value: S, z_from: &S, tau: &S, a: i64, b: i64, err: &mut f64) -> Result<S> {
    let prec = z_from.prec();
    let mut v = value;
    let mut z = z_from.clone();
    let eps = v.eps_f64();
    let mut step = |z: &mut S, v: &mut S, s1: i64, st: i64| -> Result<()> {
        let (factor, invert) = qp_step(z, tau, s1, st)?;
        *v = if invert { v.clone() / &factor } else { v.clone() * &factor };
        let fa = factor.abs_f64();
        *err += eps * (1.0 + 1.0 / fa.min(1.0));
        *z = z.clone()
            + &(S::from_i64_prec(s1, prec) + &(tau.clone() * &S::from_i64_prec(st, prec)));
        Ok(())
    };
    for _ in 0..b.abs() {
        step(&mut z, &mut v, 0, b.signum())?;
    }
    for _ in 0..a.abs() {
        step(&mut z, &mut v, a.signum(), 0)?;
    }
    Ok(v)
}

/// Evaluate `Φ(z;τ)` by the convergent products of the appropriate
/// half-plane. Requires `|Im τ|` not too small (the dispatcher enforces the
/// threshold; this operation only needs convergence).
pub fn faddeev_product<S: Scalar>(z: &S, tau: &S, tol: f64) -> Result<FaddeevEval<S>> {
    check_tau(tau)?;
    let t = c64(tau);
    if t.im == 0.0 {
        return Err(Error::OutOfDomain(
            "product formulas need Im tau != 0; use the integral method".into(),
        ));
    }
    if let Some(pole) = on_cone(c64(z), t) {
        if pole {
            return Err(Error::Pole(format!("z = {} lies on the pole cone Z>=0 + tau Z>=0", c64(z))));
        }
        return Ok(FaddeevEval {
            value: S::from_i64_prec(0, z.prec()),
            method: Method::Product,
            estimated_error: 0.0,
            chain: vec![Method::Product],
        });
    }
    // Center z in the (1, τ) lattice so that every product argument has
    // modulus close to 1 (exact quasi-periodicity factors restore z).
    let (alpha, beta) = lattice_coords(c64(z), t);
    let a = (alpha + 0.5).floor() as i64;
    let b = (beta + 0.5).floor() as i64;
    let prec = z.prec();
    let zc = z.clone()
        - &(S::from_i64_prec(a, prec) + &(tau.clone() * &S::from_i64_prec(b, prec)));
    let mut est = 0.0f64;
    let core = product_core(&zc, tau, &mut est)?;
    let value = qp_walk(core, &zc, tau, a, b, &mut est)?;
    if est > tol {
        return Err(Error::NoConvergence {
            method: "faddeev product",
            iterations: 0,
            residual: est,
        });
    }
    let mut chain = vec![Method::Product];
    if a != 0 || b != 0 {
        chain.push(Method::QuasiperiodicExtension);
    }
    Ok(FaddeevEval { value, method: *chain.last().unwrap(), estimated_error: est, chain })
}

/// The raw product ratio at a lattice-centered point.
fn product_core<S: Scalar>(z: &S, tau: &S, est: &mut f64) -> Result<S> {
    let prec = z.prec();
    let one = S::from_i64_prec(1, prec);
    let eps = z.eps_f64();
    let upper = c64(tau).im > 0.0;
    let (num, den) = if upper {
        // (q·e(z); q)∞ / (e(z/τ); q̃)∞
        let q = e2pi(tau);
        let qt = e2pi(&(-(one.clone() / tau)));
        (pochhammer(&(q.clone() * &e2pi(z)), &q)?, pochhammer(&e2pi(&(z.clone() / tau)), &qt)?)
    } else {
        // (q̃⁻¹·e(z/τ); q̃⁻¹)∞ / (e(z); q⁻¹)∞
        let qti = e2pi(&(one.clone() / tau));
        let qi = e2pi(&(-tau.clone()));
        (
            pochhammer(&(qti.clone() * &e2pi(&(z.clone() / tau))), &qti)?,
            pochhammer(&e2pi(z), &qi)?,
        )
    };
    if den.abs_f64() < 1e-250 {
        return Err(Error::Pole(format!("Faddeev pole at z = {}", c64(z))));
    }
    // Convergence cost of the two products, used as a crude error model.
    let q_mod = if upper { (-c64(tau).im).exp() } else { c64(tau).im.exp() };
    let factors = (eps.ln() / q_mod.min(1.0 - 1e-17).ln()).abs().max(4.0);
    *est += 6.0 * eps * factors;
    Ok(num / &den)
}

/// Width of the admissible strip `Re(z/√τ) ∈ (−W, 0)` of the contour
/// formula, `W = Re(√τ + 1/√τ)`.
fn strip_width(tau: Complex64) -> f64 {
    let rt = tau.sqrt();
    (rt + rt.inv()).re
}

/// Evaluate `Φ(z;τ)` by Faddeev's contour-integral formula. `z` must lie in
/// the strip `Re(−√τ−1/√τ) < Re(z/√τ) < 0`; use [`faddeev`] for automatic
/// strip reduction.
pub fn faddeev_integral<S: Scalar>(z: &S, tau: &S, tol: f64) -> Result<FaddeevEval<S>> {
    check_tau(tau)?;
    let t = c64(tau);
    let rt = t.sqrt();
    let s = (c64(z) / rt).re;
    let w = strip_width(t);
    if !(s > -w && s < 0.0) {
        return Err(Error::OutOfDomain(format!(
            "z = {} outside the contour strip: Re(z/sqrt(tau)) = {s:.6} not in ({:.6}, 0)",
            c64(z),
            -w
        )));
    }
    let prec = z.prec();
    // Rotated frame u = w/√τ: the contour is the vertical line Re u = ε
    // traversed upward, and the kernel integral along it equals −log Φ
    // (the residue at u = 0 is picked up with a minus sign for this
    // orientation). Keep ε below the nearest integrand poles u = 1/√τ
    // and u = √τ.
    let eps_off = CONTOUR_EPSILON.min(0.5 * rt.inv().re.min(rt.re));
    let rt_s = tau.sqrt();
    let coeff = (z.clone() + &S::from_i64_prec(1, prec) + tau) / &rt_s;
    let one = S::from_i64_prec(1, prec);
    let rt_inv = one.clone() / &rt_s;
    let integrand = |u: &S| -> Result<S> {
        if c64(u).im < 0.0 {
            // On the lower half of the contour, pull the growing
            // exponentials out of the denominators so that every
            // exponential stays bounded: 1/(e(w)−1) = e(−w)/(1−e(−w)).
            let d1 = one.clone() - &e2pi(&(-(rt_s.clone() * u)));
            let d2 = one.clone() - &e2pi(&(-(u.clone() / &rt_s)));
            if d1.abs_f64() < 1e-280 || d2.abs_f64() < 1e-280 {
                return Err(Error::Pole(format!(
                    "contour touches an integrand pole at u = {}",
                    c64(u)
                )));
            }
            let shifted = (coeff.clone() - &rt_s - &rt_inv) * u;
            Ok(e2pi(&shifted) / &(d1 * &d2 * u))
        } else {
            let d1 = e2pi(&(rt_s.clone() * u)) - &one;
            let d2 = e2pi(&(u.clone() / &rt_s)) - &one;
            if d1.abs_f64() < 1e-280 || d2.abs_f64() < 1e-280 {
                return Err(Error::Pole(format!(
                    "contour touches an integrand pole at u = {}",
                    c64(u)
                )));
            }
            Ok(e2pi(&(coeff.clone() * u)) / &(d1 * &d2 * u))
        }
    };
    let center = S::from_f64_prec(eps_off, 0.0, prec);
    let dir = S::from_f64_prec(0.0, 1.0, prec);
    let quadr = quad::line(&integrand, &center, &dir, 0.5, tol * 1e-2, quad::PANEL_ORDER)?;
    let est = quadr.error_estimate + tol * 1e-2;
    if est > tol {
        return Err(Error::NoConvergence {
            method: "faddeev integral",
            iterations: quadr.n_evals,
            residual: est,
        });
    }
    Ok(FaddeevEval {
        value: (-quadr.value).exp(),
        method: Method::Integral,
        estimated_error: est,
        chain: vec![Method::Integral],
    })
}

/// Full-domain evaluation of `Φ(z;τ)`: picks the product or integral
/// representation from `|Im τ|/|τ|`, extending the domain by exact
/// quasi-periodicity steps where needed.
pub fn faddeev<S: Scalar>(z: &S, tau: &S, tol: f64) -> Result<FaddeevEval<S>> {
    check_tau(tau)?;
    let t = c64(tau);
    if let Some(pole) = on_cone(c64(z), t) {
        if pole {
            return Err(Error::Pole(format!("z = {} lies on the pole cone Z>=0 + tau Z>=0", c64(z))));
        }
        return Ok(FaddeevEval {
            value: S::from_i64_prec(0, z.prec()),
            method: Method::Product,
            estimated_error: 0.0,
            chain: vec![Method::Product],
        });
    }
    if t.im.abs() / t.norm() > DISPATCH_RATIO {
        return faddeev_product(z, tau, tol);
    }
    // Integral regime: reduce Re(z/√τ) into the strip, centered.
    let rt = t.sqrt();
    let w = strip_width(t);
    let s = (c64(z) / rt).re;
    let (du, dv) = (rt.inv().re, rt.re); // shift sizes of z→z+1 and z→z+τ
    let target = -0.5 * w;
    let b = ((target - s) / dv).round() as i64;
    let a = ((target - s - b as f64 * dv) / du).round() as i64;
    let margin = 0.25 * du.min(dv).min(w);
    let mut best: Option<(i64, i64)> = None;
    for da in -2..=2i64 {
        let aa = a + da;
        let ss = s + aa as f64 * du + b as f64 * dv;
        if ss > -w + margin && ss < -margin {
            let better = match best {
                None => true,
                Some((pa, pb)) => aa.abs() + b.abs() < pa.abs() + pb.abs(),
            };
            if better {
                best = Some((aa, b));
            }
        }
    }
    let Some((a, b)) = best else {
        return Err(Error::OutOfDomain(format!(
            "could not reduce z = {} into the contour strip of tau = {t}",
            c64(z)
        )));
    };
    let prec = z.prec();
    let zc = z.clone()
        + &(S::from_i64_prec(a, prec) + &(tau.clone() * &S::from_i64_prec(b, prec)));
    let core = faddeev_integral(&zc, tau, tol * 0.5)?;
    let mut est = core.estimated_error;
    // Transport back from zc to z = zc + (−a) + (−b)τ.
    let value = qp_walk(core.value, &zc, tau, -a, -b, &mut est)?;
    if est > tol {
        return Err(Error::NoConvergence {
            method: "faddeev dispatcher",
            iterations: 0,
            residual: est,
        });
    }
    let mut chain = core.chain;
    let method = if a != 0 || b != 0 {
        chain.push(Method::QuasiperiodicExtension);
        Method::QuasiperiodicExtension
    } else {
        Method::Integral
    };
    Ok(FaddeevEval { value, method, estimated_error: est, chain })
}

/// The mirror function `Φ⁻(z;τ) = Φ(−z−1+τ;−τ)^{−1}
/// = (q·e(−z);q)∞ / (e(z/τ);q̃)∞`.
pub fn faddeev_mirror<S: Scalar>(z: &S, tau: &S, tol: f64) -> Result<FaddeevEval<S>> {
    check_tau(tau)?;
    let t = c64(tau);
    let prec = z.prec();
    let one = S::from_i64_prec(1, prec);
    if t.im.abs() / t.norm() > DISPATCH_RATIO && t.im > 0.0 {
        // Direct product representation in the upper half-plane.
        let q = e2pi(tau);
        let qt = e2pi(&(-(one.clone() / tau)));
        let num = pochhammer(&(q.clone() * &e2pi(&(-z.clone()))), &q)?;
        let den = pochhammer(&e2pi(&(z.clone() / tau)), &qt)?;
        if den.abs_f64() < 1e-250 {
            return Err(Error::Pole(format!("mirror Faddeev pole at z = {}", c64(z))));
        }
        let eps = z.eps_f64();
        let factors = (eps.ln() / (-t.im).exp().min(1.0 - 1e-17).ln()).abs().max(4.0);
        let est = 6.0 * eps * factors;
        if est > tol {
            return Err(Error::NoConvergence {
                method: "faddeev mirror product",
                iterations: 0,
                residual: est,
            });
        }
        return Ok(FaddeevEval {
            value: num / &den,
            method: Method::Product,
            estimated_error: est,
            chain: vec![Method::Product],
        });
    }
    // Route through the defining identity.
    let zr = (tau.clone() - z) - &one;
    let base = faddeev(&zr, &(-tau.clone()), tol * 0.5)?;
    if base.value.abs_f64() < 1e-280 {
        return Err(Error::Pole(format!("mirror Faddeev pole at z = {}", c64(z))));
    }
    let mut chain = base.chain;
    chain.push(Method::InversionExtension);
    Ok(FaddeevEval {
        value: S::from_i64_prec(1, prec) / &base.value,
        method: Method::InversionExtension,
        estimated_error: base.estimated_error * 2.0,
        chain,
    })
}

/// `B_k / k!` as a scalar.
fn bernoulli_over_factorial<S: Scalar>(k: usize, prec: usize) -> S {
    let b = bernoulli(k);
    let mut fact = BigInt::from(1);
    for j in 2..=k {
        fact *= BigInt::from(j as i64);
    }
    S::from_ratio_prec(b.numer(), &(b.denom() * fact), prec)
}

/// The Euler–Maclaurin tail `Σ_{k=2..K} B_k/k!·(2πi)^{k−2}·τ^{1−k}·
/// Li_{2−k}(e(z))` shared by both asymptotic expansions.
fn bernoulli_tail<S: Scalar>(z: &S, tau: &S, kmax: usize) -> Result<S> {
    let prec = z.prec();
    let mut sum = S::from_i64_prec(0, prec);
    let tpi = crate::numerics::two_pi_i(z);
    for k in 2..=kmax {
        if k > 2 && k % 2 == 1 {
            continue; // odd Bernoulli numbers vanish
        }
        let li = if k == 2 { li0_e2pi(z)? } else { li_neg_e2pi(k - 2, z)? };
        let term = bernoulli_over_factorial::<S>(k, prec)
            * &tpi.powi(k as i64 - 2)
            * &tau.powi(1 - k as i64)
            * &li;
        sum = sum + term;
    }
    Ok(sum)
}

/// Exponent `X(z,τ,K)` of the uniform large-`τ` asymptotics
/// `Φ(zτ;τ) ≈ e(X)`, built on the branch `D_θ` with `θ = arg(−1/τ)`.
pub fn asymptotic_exponent<S: Scalar>(z: &S, tau: &S, kmax: usize) -> Result<S> {
    check_tau(tau)?;
    let theta = std::f64::consts::PI - c64(tau).arg();
    let mut x = branch_d(theta, z)? * tau;
    if kmax >= 1 {
        x = x + branch_d_prime(theta, z)?.scale2(-1);
    }
    if kmax >= 2 {
        x = x + bernoulli_tail(z, tau, kmax)?;
    }
    Ok(x)
}

/// Exponent of the Pochhammer asymptotics
/// `(e(z); q̃)∞ ≈ e(−L_θ(z)τ − ½L_θ'(z) − Σ …)` for `Im τ > 0`,
/// `θ = arg(−1/τ) ∈ (0,π)`.
pub fn pochhammer_asymptotics<S: Scalar>(z: &S, tau: &S, kmax: usize) -> Result<S> {
    check_tau(tau)?;
    if c64(tau).im <= 0.0 {
        return Err(Error::OutOfDomain(
            "the Pochhammer expansion needs Im tau > 0".into(),
        ));
    }
    let theta = std::f64::consts::PI - c64(tau).arg();
    let mut x = -(branch_l(theta, z)? * tau);
    if kmax >= 1 {
        x = x - branch_l_prime(theta, z)?.scale2(-1);
    }
    if kmax >= 2 {
        x = x - bernoulli_tail(z, tau, kmax)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::theta::pochhammer as poch;
    use crate::numerics::BigC;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const TOL: f64 = 1e-10;

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn pole_and_zero_cones_are_detected() {
        let tau = c(0.3, 1.7);
        assert!(matches!(faddeev(&c(0.0, 0.0), &tau, TOL), Err(Error::Pole(_))));
        assert!(matches!(
            faddeev(&(tau * 2.0 + c(3.0, 0.0)), &tau, TOL),
            Err(Error::Pole(_))
        ));
        let zero = faddeev(&(-tau - 1.0), &tau, TOL).unwrap();
        assert!(zero.value.abs_f64() == 0.0, "zero cone must yield exact 0");
        let zero = faddeev(&(-tau * 3.0 - 2.0), &tau, TOL).unwrap();
        assert!(zero.value.abs_f64() == 0.0);
    }

    #[test]
    fn quasi_periodicity_both_directions() {
        let tau = c(0.0, 2.0);
        let z = c(0.25, 0.0) + tau / 3.0;
        let lhs = faddeev_product(&(z - tau), &tau, TOL).unwrap().value;
        let rhs = (Complex64::new(1.0, 0.0) - e2pi(&z))
            * faddeev_product(&z, &tau, TOL).unwrap().value;
        assert!((lhs - rhs).norm() < TOL * rhs.norm(), "{lhs} vs {rhs}");
        // The 1-direction: Φ(z−1) = (1−e(z/τ))·Φ(z).
        let lhs = faddeev_product(&(z - 1.0), &tau, TOL).unwrap().value;
        let rhs = (Complex64::new(1.0, 0.0) - e2pi(&(z / tau)))
            * faddeev_product(&z, &tau, TOL).unwrap().value;
        assert!((lhs - rhs).norm() < TOL * rhs.norm());
    }

    /// Inversion about the self-dual center `c = −(1+τ)/2`:
    /// `Φ(z)·Φ(−1−τ−z) = e((τ+1/τ)/24 − (z−c)²/(2τ))`. The reflection
    /// `z ↦ −1−τ−z` is the one that swaps the pole cone `ℤ≥0+τℤ≥0` with
    /// the zero cone `ℤ<0+τℤ<0`, leaving an entire non-vanishing (hence
    /// Gaussian) product.
    fn inversion_rhs(z: Complex64, tau: Complex64) -> Complex64 {
        let center = -(tau + 1.0) / 2.0;
        let d = z - center;
        e2pi(&((tau + 1.0 / tau) / 24.0 - d * d / (2.0 * tau)))
    }

    #[test]
    fn inversion_relation_at_the_spec_point() {
        let tau = c(1.0, 1.0);
        let z = c(-0.3, 0.0) - tau * 0.4;
        let lhs = faddeev_product(&z, &tau, TOL).unwrap().value
            * faddeev_product(&(-1.0 - tau - z), &tau, TOL).unwrap().value;
        let rhs = inversion_rhs(z, tau);
        assert!((lhs - rhs).norm() < 1e-9 * rhs.norm(), "{lhs} vs {rhs}");
        // At the fixed point z = c of the reflection, Φ(c)² is the constant.
        let center = -(tau + 1.0) / 2.0;
        let phi_c = faddeev_product(&center, &tau, TOL).unwrap().value;
        let expect = e2pi(&((tau + 1.0 / tau) / 48.0));
        assert!((phi_c - expect).norm() < 1e-10 * expect.norm());
    }

    #[test]
    fn residuals_on_random_points_stay_small() {
        // Criterion-9 style property: quasi-periodicity and inversion
        // residuals < 1e-8 over 100 random in-domain (z, τ).
        let mut rng = Lcg(0x9e3779b97f4a7c15);
        let mut checked = 0;
        while checked < 100 {
            let upper = rng.next() < 0.5;
            let tau = c(
                2.0 * rng.next() - 1.0,
                (0.4 + 1.6 * rng.next()) * if upper { 1.0 } else { -1.0 },
            );
            let z = c(2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0);
            let phi = match faddeev(&z, &tau, TOL) {
                Ok(e) => e,
                Err(_) => continue, // near a cone: resample
            };
            if phi.value.norm() < 1e-6 {
                continue;
            }
            let qp = match faddeev(&(z - tau), &tau, TOL) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let rhs = (Complex64::new(1.0, 0.0) - e2pi(&z)) * phi.value;
            assert!(
                (qp.value - rhs).norm() < 1e-8 * rhs.norm().max(1e-3),
                "quasi-periodicity residual at z = {z}, tau = {tau}"
            );
            let inv = match faddeev(&(-1.0 - tau - z), &tau, TOL) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let lhs = phi.value * inv.value;
            let rhs = inversion_rhs(z, tau);
            assert!(
                (lhs - rhs).norm() < 1e-8 * rhs.norm(),
                "inversion residual at z = {z}, tau = {tau}: {lhs} vs {rhs}"
            );
            checked += 1;
        }
    }

    #[test]
    fn integral_matches_product_near_the_reals() {
        // Spec point: τ = 1 + 10⁻³ i, z = −0.4, matched tolerance 1e-10.
        let tau = c(1.0, 1e-3);
        let z = c(-0.4, 0.0);
        let int = faddeev_integral(&z, &tau, TOL).unwrap();
        let prod = faddeev_product(&z, &tau, TOL).unwrap();
        assert!(
            (int.value - prod.value).norm() < 1e-10 * prod.value.norm(),
            "{} vs {}",
            int.value,
            prod.value
        );
        // Overlap band: both methods valid at arg τ = 0.05.
        let tau = Complex64::from_polar(1.0, 0.05);
        let int = faddeev_integral(&z, &tau, TOL).unwrap();
        let prod = faddeev_product(&z, &tau, TOL).unwrap();
        assert!((int.value - prod.value).norm() < 1e-9 * prod.value.norm());
    }

    #[test]
    fn integral_handles_real_positive_tau() {
        // τ = 1: the self-dual point z = −(1+τ)/2 = −1 has
        // Φ² = e((τ+1/τ)/24) = e(1/12).
        let tau = c(1.0, 0.0);
        let z = c(-1.0, 0.0);
        let phi = faddeev_integral(&z, &tau, TOL).unwrap();
        assert_eq!(phi.method, Method::Integral);
        let sq = phi.value * phi.value;
        let rhs = e2pi(&c(1.0 / 12.0, 0.0));
        assert!((sq - rhs).norm() < 1e-9, "{sq} vs {rhs}");
        // Strip violation is reported, and the dispatcher fixes it.
        assert!(faddeev_integral(&c(0.7, 0.0), &tau, TOL).is_err());
        let via_dispatch = faddeev(&c(0.7, 0.0), &tau, TOL).unwrap();
        assert_eq!(via_dispatch.method, Method::QuasiperiodicExtension);
        // Consistency with a strip point moved by quasi-periodicity:
        // Φ(z+1) = Φ(z)/(1−e((z+1)/τ)).
        let base = faddeev(&c(-0.3, 0.0), &tau, TOL).unwrap().value;
        let shifted = faddeev(&c(0.7, 0.0), &tau, TOL).unwrap().value;
        let factor = Complex64::new(1.0, 0.0) - e2pi(&(c(0.7, 0.0) / tau));
        assert!((shifted * factor - base).norm() < 1e-9 * base.norm());
    }

    #[test]
    fn mirror_identity_at_the_spec_point() {
        let tau = c(-1.0, 1.0);
        let z = c(0.0, 0.2);
        let mirror = faddeev_mirror(&z, &tau, TOL).unwrap();
        let direct = faddeev(&(-z - 1.0 + tau), &(-tau), TOL).unwrap();
        let residual = (mirror.value * direct.value - 1.0).norm();
        assert!(residual < TOL, "identity residual {residual}");
        // And against its own product formula (Im τ > 0 here).
        assert_eq!(mirror.method, Method::Product);
        let one = Complex64::new(1.0, 0.0);
        let q = e2pi(&tau);
        let qt = e2pi(&(-one / tau));
        let byhand = poch(&(q * e2pi(&(-z))), &q).unwrap() / poch(&e2pi(&(z / tau)), &qt).unwrap();
        assert!((mirror.value - byhand).norm() < 1e-12 * byhand.norm());
    }

    #[test]
    fn winding_around_pole_and_zero() {
        // Meromorphy proxy: the argument winds by −2π counterclockwise
        // around a simple pole and by +2π around a simple zero.
        let tau = c(0.2, 1.3);
        for (center, expect) in [(tau + 1.0, -1.0), (-tau - 1.0, 1.0)] {
            let n = 48;
            let r = 0.12;
            let mut winding = 0.0;
            let mut prev: Option<Complex64> = None;
            for k in 0..=n {
                let ang = 2.0 * PI * k as f64 / n as f64;
                let z = center + Complex64::from_polar(r, ang);
                let v = faddeev(&z, &tau, TOL).unwrap().value;
                if let Some(p) = prev {
                    winding += (v / p).arg();
                }
                prev = Some(v);
            }
            let turns = winding / (2.0 * PI);
            assert!(
                (turns - expect).abs() < 0.05,
                "winding around {center}: got {turns}, expected {expect}"
            );
        }
    }

    #[test]
    fn asymptotic_exponent_matches_faddeev() {
        // Spec point: z = −0.37+0.11i, τ = 30e^{0.2i}, K = 5 → error < 1e-6.
        let z = c(-0.37, 0.11);
        let tau = Complex64::from_polar(30.0, 0.2);
        let x = asymptotic_exponent(&z, &tau, 5).unwrap();
        let phi = faddeev(&(z * tau), &tau, 1e-12).unwrap().value;
        let err = (phi - e2pi(&x)).norm();
        assert!(err < 1e-6, "asymptotic error {err}");
        // K = 0, 1 truncations are exactly the branch terms.
        let theta = PI - tau.arg();
        let k0 = asymptotic_exponent(&z, &tau, 0).unwrap();
        assert_eq!(k0, branch_d(theta, &z).unwrap() * tau);
        let k1 = asymptotic_exponent(&z, &tau, 1).unwrap();
        let expect = branch_d(theta, &z).unwrap() * tau + branch_d_prime(theta, &z).unwrap() / 2.0;
        assert!((k1 - expect).norm() < 1e-15);
    }

    #[test]
    fn asymptotic_error_scales_like_tau_to_minus_k() {
        // Criterion-10 shape: at K = 4 the truncation error drops by
        // ≈ |τ|⁻⁴ = 2⁻⁴ between |τ| = 20 and 40 (within factor 3).
        let zs = [
            c(-0.37, 0.11),
            c(-0.2, 0.3),
            c(0.31, 0.24),
            c(-0.45, -0.2),
            c(0.2, -0.35),
        ];
        for z in zs {
            let err_at = |r: f64| {
                let tau = Complex64::from_polar(r, 0.35);
                let x = asymptotic_exponent(&z, &tau, 4).unwrap();
                let phi = faddeev(&(z * tau), &tau, 1e-12).unwrap().value;
                (phi - e2pi(&x)).norm() / phi.norm()
            };
            let ratio = err_at(40.0) / err_at(20.0);
            let ideal = (0.5f64).powi(4);
            assert!(
                ratio < ideal * 3.0 && ratio > ideal / 3.0,
                "z = {z}: error ratio {ratio} vs ideal {ideal}"
            );
        }
    }

    #[test]
    fn pochhammer_expansion_matches_direct_product() {
        // Spec point: z = i/2, τ = 25i, K = 4 → error < 1e-5.
        let z = c(0.0, 0.5);
        let tau = c(0.0, 25.0);
        let x = pochhammer_asymptotics(&z, &tau, 4).unwrap();
        let qt = e2pi(&(-Complex64::new(1.0, 0.0) / tau));
        let direct = poch(&e2pi(&z), &qt).unwrap();
        let err = (direct - e2pi(&x)).norm();
        assert!(err < 1e-5, "Pochhammer asymptotic error {err}");
        // Leading term is the principal dilogarithm for θ ∈ (0,π), Im z > 0.
        let lead = pochhammer_asymptotics(&z, &tau, 0).unwrap();
        let li2 = crate::numerics::polylog::li2_e2pi_norm(&z);
        assert!((lead + li2 * tau).norm() < 1e-14);
    }

    #[test]
    fn dispatcher_is_precision_generic() {
        let prec = 200;
        let z = BigC::from_f64_prec(-0.4, 0.2, prec);
        let tau = BigC::from_f64_prec(0.3, 1.1, prec);
        let big = faddeev(&z, &tau, 1e-30).unwrap();
        let small = faddeev(&c(-0.4, 0.2), &c(0.3, 1.1), 1e-10).unwrap();
        assert!(big.estimated_error < 1e-30);
        let bv = c(big.value.re_f64(), big.value.im_f64());
        assert!((bv - small.value).norm() < 1e-12 * small.value.norm());
    }

    #[test]
    fn methods_are_recorded() {
        let tau = c(0.0, 2.0);
        let inside = faddeev(&c(0.3, 0.4), &tau, TOL).unwrap();
        assert_eq!(inside.method, Method::Product);
        assert_eq!(inside.chain, vec![Method::Product]);
        let far = faddeev(&(c(0.3, 0.4) + tau * 5.0 + 3.0), &tau, TOL).unwrap();
        assert_eq!(far.method, Method::QuasiperiodicExtension);
        assert_eq!(far.chain, vec![Method::Product, Method::QuasiperiodicExtension]);
        assert!(far.estimated_error <= TOL);
    }
}
