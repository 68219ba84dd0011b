//! Branched lifts `D_θ` and `L_θ` of the normalised dilogarithm.
//!
//! Both functions are particular branches of the multivalued
//! `z ↦ Li₂(e(z))/(2πi)²`, defined by iterated contour integrals of the
//! single-valued density `Li₀(e(ζ)) = e(ζ)/(1 − e(ζ))`:
//!
//! * `D_θ(z) = ∫_z^{e^{iθ/2}∞} ∫_w^{e^{iθ/2}∞} Li₀(e(ζ)) dζ dw` with both
//!   contours inside `ℂ_θ = ℂ ∖ ((ℤ≥0 + e^{iθ}ℝ≤0) ∪ (ℤ<0 + e^{iθ}ℝ≥0))`,
//!   for `θ ∈ (0, 2π)`;
//! * `L_θ(z) = ∫_{z+e^{iθ}ℝ≥0} ∫_{w+e^{iθ}ℝ≥0} Li₀(e(ζ)) dζ dw` on
//!   `ℂ ∖ (ℤ + e^{iθ}ℝ≤0)`, convergent for `θ ∈ (0, π)`.
//!
//! # Evaluation strategy
//!
//! Rather than quadrature, the lifts are computed as the principal value
//! plus an exact affine correction `n₁ z + n₀` with integer `n₁, n₀`
//! obtained combinatorially. The density has residue `−1/(2πi)` at every
//! `ζ ∈ ℤ`, so analytic continuation of any branch counterclockwise around
//! the branch point `z = k` adds `−(z − k)` at the dilogarithm level (and
//! `−1` at the derivative level). Fix a straight reference segment `γ` from
//! an anchor `a` to `z` and let `σ = sign Im(u/d)` be the orientation of a
//! transversal crossing of a cut ray with direction `d` by the segment
//! direction `u` (`σ = +1` is the counterclockwise sense around the branch
//! point). Continuing the common germ at the anchor along `γ` gives the
//! identity
//!
//! ```text
//! F_γ(z) = princ(z) − Σ_{principal cuts} σ (z − k)
//!        = lift(z)  − Σ_{θ cuts}        σ (z − k),
//! ```
//!
//! hence `lift(z) = princ(z) − Σ_P σ(z − k) + Σ_T σ(z − k)`. Only the
//! difference of the two crossing sums enters, which makes the result
//! independent of the chosen path. The principal cuts are `ℤ + iℝ≤0`.
//!
//! # Anchors
//!
//! For `D_θ` the anchor is `e^{iθ/2}·R₀`: the full escape ray
//! `{t e^{iθ/2} : t ≥ R₀}` provably avoids every cut of both families for
//! every `θ ∈ (0, 2π)`, and both `D_θ` and the principal branch tend to `0`
//! along it, so they agree there (branches differ by an affine term, which
//! vanishes at infinity only if it is zero).
//!
//! For `L_θ` with `θ ∈ (0, π)` the anchor `e^{iθ/2}·R₀` lies in the upper
//! half-plane where `L_θ` is the principal branch. For `θ ∈ (π, 2π)` the
//! defining ray integral diverges (the density tends to `−1` in the lower
//! half-plane); we *define* the branch on that range by anchoring at
//! `−1/2 − i R₀`, i.e. `L_θ = princ` on the deep lower strip
//! `Re z ∈ (−1, 0)` — the cut-free region common to all `θ ∈ (π, 2π)`
//! containing the canonical gap. (A strip must be chosen: the principal
//! branch jumps across each vertical cut while `L_θ` does not.) At `θ = π`
//! the domain disconnects (the cut set covers all of `ℝ`) and the lift is
//! rejected.
//!
//! All cut-set geometry is done in hardware doubles; the returned values
//! carry the precision of the scalar input.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::polylog::{li1_e2pi_norm, li2_e2pi_norm};
use crate::numerics::Scalar;

/// Distance from the origin at which the reference anchors are placed.
pub const ANCHOR_RADIUS: f64 = 10.0;

/// Angles closer than this to `0` or `2π` are rejected: the cut families
/// degenerate onto the real axis and the crossing combinatorics blow up.
pub const THETA_MARGIN: f64 = 0.05;

/// `L_θ` is rejected for `|θ − π|` below this margin (domain disconnects).
pub const L_PI_MARGIN: f64 = 0.02;

/// Minimal geometric clearance from the relevant cut set required of `z`.
const CUT_GUARD: f64 = 1e-7;

/// Hard cap on the number of candidate branch points per segment.
const MAX_CANDIDATES: f64 = 2.0e5;

const TAU: f64 = std::f64::consts::TAU;

/// The three parallel-ray cut families used by the lifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    /// `ℤ + iℝ≤0` — the cuts of the principal `z ↦ Li₂(e(z))/(2πi)²`.
    Principal,
    /// `ℤ + e^{iθ}ℝ≤0` — the cuts of `L_θ`.
    LTheta,
    /// `(ℤ≥0 + e^{iθ}ℝ≤0) ∪ (ℤ<0 + e^{iθ}ℝ≥0)` — the cuts of `D_θ`.
    DTheta,
}

/// A transversal crossing of one cut ray by the reference segment.
#[derive(Clone, Copy, Debug)]
struct Crossing {
    k: i64,
    /// `+1` when the segment crosses the ray counterclockwise around `k`.
    sigma: i64,
}

/// Sub-families of parallel rays: inclusive `k` clamps and unit direction.
fn sub_families(family: Family, theta: f64) -> Vec<(Option<i64>, Option<i64>, Complex64)> {
    let e = Complex64::from_polar(1.0, theta);
    match family {
        Family::Principal => vec![(None, None, Complex64::new(0.0, -1.0))],
        Family::LTheta => vec![(None, None, -e)],
        Family::DTheta => vec![(Some(0), None, -e), (None, Some(-1), e)],
    }
}

fn clamp_k(lo: Option<i64>, hi: Option<i64>, k: i64) -> i64 {
    k.max(lo.unwrap_or(i64::MIN)).min(hi.unwrap_or(i64::MAX))
}

/// Distance from `z` to the ray `{k + t d : t ≥ 0}` (`|d| = 1`).
fn ray_dist(z: Complex64, k: i64, d: Complex64) -> f64 {
    let v = z - Complex64::new(k as f64, 0.0);
    let w = v * d.conj();
    if w.re <= 0.0 {
        v.norm()
    } else {
        w.im.abs()
    }
}

/// Distance from `z` to the cut set of `family`.
///
/// For fixed ray direction the distance is a convex function of the
/// (real-valued) base point, so the integer minimiser is adjacent to one of
/// the three real candidates: the base putting `z` on the ray's line, the
/// base closest to `z` itself, and the base where the projection regime
/// switches.
fn family_clearance(family: Family, theta: f64, z: Complex64) -> f64 {
    let mut best = f64::INFINITY;
    for (lo, hi, d) in sub_families(family, theta) {
        let zd = z * d.conj();
        let mut cands = vec![z.re];
        if d.im.abs() > 1e-12 {
            cands.push(-zd.im / d.im);
        }
        if d.re.abs() > 1e-12 {
            cands.push(zd.re / d.re);
        }
        for c in cands {
            let c = c.clamp(-1.0e15, 1.0e15);
            for kk in [c.floor() as i64, c.ceil() as i64] {
                best = best.min(ray_dist(z, clamp_k(lo, hi, kk), d));
            }
        }
        if let Some(l) = lo {
            best = best.min(ray_dist(z, l, d));
        }
        if let Some(h) = hi {
            best = best.min(ray_dist(z, h, d));
        }
    }
    best
}

/// All transversal crossings of cuts of `family` by the segment `[a, b]`.
///
/// Errors when the segment runs along a cut or passes through a branch
/// point (the crossing count would be ambiguous).
fn segment_crossings(
    family: Family,
    theta: f64,
    a: Complex64,
    b: Complex64,
) -> Result<Vec<Crossing>> {
    let mut out = Vec::new();
    let u = b - a;
    if u.norm() < 1e-300 {
        return Ok(out);
    }
    for (lo, hi, d) in sub_families(family, theta) {
        let den = (u * d.conj()).im;
        // Candidate band of base points whose line can meet the segment.
        let (klo, khi) = if d.im.abs() >= 1e-9 {
            let ks = |p: Complex64| p.re - p.im * d.re / d.im;
            let (x, y) = (ks(a), ks(b));
            (x.min(y) - 2.0, x.max(y) + 2.0)
        } else {
            // Horizontal cuts: a crossing needs the segment to cross ℝ.
            if a.im * b.im >= 0.0 {
                continue;
            }
            let s0 = a.im / (a.im - b.im);
            let xs = a.re + s0 * (b.re - a.re);
            (xs.min(0.0) - 1.0, xs.max(0.0) + 1.0)
        };
        let klo = klo.clamp(-1.0e15, 1.0e15);
        let khi = khi.clamp(-1.0e15, 1.0e15);
        if khi - klo > MAX_CANDIDATES {
            return Err(Error::Unsupported(format!(
                "cut family too oblique for segment crossing count ({} candidates)",
                khi - klo
            )));
        }
        let klo = clamp_k(lo, hi, klo as i64);
        let khi = clamp_k(lo, hi, khi.ceil() as i64);
        if den.abs() < 1e-12 * (1.0 + u.norm()) {
            // Segment parallel to the cuts: either clear of them or along one.
            for k in klo..=khi {
                let ak = (a - Complex64::new(k as f64, 0.0)) * d.conj();
                if ak.im.abs() < 1e-9 {
                    let bk = (b - Complex64::new(k as f64, 0.0)) * d.conj();
                    if ak.re.max(bk.re) > -1e-9 {
                        return Err(Error::BranchCut {
                            z: format!("{a} -> {b}"),
                            dist: ak.im.abs(),
                            what: "segment runs along a cut ray",
                        });
                    }
                }
            }
            continue;
        }
        for k in klo..=khi {
            let ak = (a - Complex64::new(k as f64, 0.0)) * d.conj();
            let s = -ak.im / den;
            if !(0.0..=1.0).contains(&s) {
                continue;
            }
            let t = ak.re + s * (u * d.conj()).re;
            if t.abs() <= 1e-9 {
                return Err(Error::BranchCut {
                    z: format!("{a} -> {b}"),
                    dist: t.abs(),
                    what: "segment passes through a branch point",
                });
            }
            if t < 0.0 {
                continue;
            }
            out.push(Crossing { k, sigma: if den > 0.0 { 1 } else { -1 } });
        }
    }
    Ok(out)
}

/// Affine correction coefficients `(n₁, n₀)` of one continuation leg:
/// `lift − princ` changes by `n₁ z + n₀` relative to the start of the leg.
fn leg_coeffs(family: Family, theta: f64, a: Complex64, b: Complex64) -> Result<(i64, i64)> {
    let pc = segment_crossings(Family::Principal, theta, a, b)?;
    let tc = segment_crossings(family, theta, a, b)?;
    let mut n1 = 0i64;
    let mut n0 = 0i64;
    for c in &pc {
        n1 -= c.sigma;
        n0 += c.sigma * c.k;
    }
    for c in &tc {
        n1 += c.sigma;
        n0 -= c.sigma * c.k;
    }
    Ok((n1, n0))
}

/// Validate and canonicalise `θ` into `(0, 2π)` with the working margin.
fn check_theta(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::InvalidInput("theta must be finite".into()));
    }
    let t = theta.rem_euclid(TAU);
    if !(THETA_MARGIN..=TAU - THETA_MARGIN).contains(&t) {
        return Err(Error::OutOfDomain(format!(
            "theta = {t:.6} is within {THETA_MARGIN} of the degenerate directions 0, 2pi"
        )));
    }
    Ok(t)
}

/// Anchor of the `D_θ` branch: `e^{iθ/2} R₀`, valid for all `θ ∈ (0, 2π)`.
pub fn d_anchor(theta: f64) -> Complex64 {
    Complex64::from_polar(ANCHOR_RADIUS, theta / 2.0)
}

/// Anchor of the `L_θ` branch (see the module notes for `θ > π`).
pub fn l_anchor(theta: f64) -> Complex64 {
    if theta < std::f64::consts::PI {
        Complex64::from_polar(ANCHOR_RADIUS, theta / 2.0)
    } else {
        Complex64::new(-0.5, -ANCHOR_RADIUS)
    }
}

/// The domain `ℂ_θ` of `D_θ` together with a working clearance.
#[derive(Clone, Copy, Debug)]
pub struct BranchDomain {
    theta: f64,
    epsilon: f64,
}

impl BranchDomain {
    /// Build the domain for `θ` (reduced mod `2π`) and clearance `ε > 0`.
    pub fn new(theta: f64, epsilon: f64) -> Result<Self> {
        let theta = check_theta(theta)?;
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "clearance epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self { theta, epsilon })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Distance from `z` to the cut set `ℂ ∖ ℂ_θ`.
    pub fn clearance(&self, z: Complex64) -> f64 {
        family_clearance(Family::DTheta, self.theta, z)
    }

    /// Membership in `ℂ_θ` with at least the configured clearance.
    pub fn contains(&self, z: Complex64) -> bool {
        self.clearance(z) >= self.epsilon
    }
}

/// Distance from `z` to the cut set `ℤ + e^{iθ}ℝ≤0` of `L_θ`.
pub fn l_clearance(theta: f64, z: Complex64) -> f64 {
    family_clearance(Family::LTheta, theta, z)
}

fn guarded(cl: f64, z: Complex64, what: &'static str) -> Result<()> {
    if cl < CUT_GUARD {
        return Err(Error::BranchCut { z: format!("{z}"), dist: cl, what });
    }
    Ok(())
}

/// Integer coefficients `(n₁, n₀)` with `D_θ(z) = princ(z) + n₁ z + n₀`,
/// where `princ = Li₂(e(z))/(2πi)²` is the principal branch.
pub fn d_lift_coeffs(theta: f64, z: Complex64) -> Result<(i64, i64)> {
    let th = check_theta(theta)?;
    let cl = family_clearance(Family::DTheta, th, z)
        .min(family_clearance(Family::Principal, th, z));
    guarded(cl, z, "D_theta / principal cut set")?;
    leg_coeffs(Family::DTheta, th, d_anchor(th), z)
}

/// Integer coefficients `(n₁, n₀)` with `L_θ(z) = princ(z) + n₁ z + n₀`.
pub fn l_lift_coeffs(theta: f64, z: Complex64) -> Result<(i64, i64)> {
    let th = check_theta(theta)?;
    if (th - std::f64::consts::PI).abs() < L_PI_MARGIN {
        return Err(Error::OutOfDomain(
            "L_theta is not defined at theta = pi (cut set covers the real line)".into(),
        ));
    }
    let cl = family_clearance(Family::LTheta, th, z)
        .min(family_clearance(Family::Principal, th, z));
    guarded(cl, z, "L_theta / principal cut set")?;
    leg_coeffs(Family::LTheta, th, l_anchor(th), z)
}

fn geom<S: Scalar>(z: &S) -> Complex64 {
    Complex64::new(z.re_f64(), z.im_f64())
}

fn with_coeffs<S: Scalar>(base: S, z: &S, n1: i64, n0: i64) -> S {
    let p = z.prec();
    base + S::from_i64_prec(n1, p) * z + S::from_i64_prec(n0, p)
}

/// `D_θ(z)` — branch of `Li₂(e(z))/(2πi)²` on `ℂ_θ`, `θ ∈ (0, 2π)`.
pub fn branch_d<S: Scalar>(theta: f64, z: &S) -> Result<S> {
    let (n1, n0) = d_lift_coeffs(theta, geom(z))?;
    Ok(with_coeffs(li2_e2pi_norm(z), z, n1, n0))
}

/// `D_θ'(z)` — branch of `Li₁(e(z))/(2πi)` matching [`branch_d`].
pub fn branch_d_prime<S: Scalar>(theta: f64, z: &S) -> Result<S> {
    let (n1, _) = d_lift_coeffs(theta, geom(z))?;
    Ok(li1_e2pi_norm(z) + S::from_i64_prec(n1, z.prec()))
}

/// `L_θ(z)` — branch of `Li₂(e(z))/(2πi)²` off `ℤ + e^{iθ}ℝ≤0`.
pub fn branch_l<S: Scalar>(theta: f64, z: &S) -> Result<S> {
    let (n1, n0) = l_lift_coeffs(theta, geom(z))?;
    Ok(with_coeffs(li2_e2pi_norm(z), z, n1, n0))
}

/// `L_θ'(z)` — branch of `Li₁(e(z))/(2πi)` matching [`branch_l`].
pub fn branch_l_prime<S: Scalar>(theta: f64, z: &S) -> Result<S> {
    let (n1, _) = l_lift_coeffs(theta, geom(z))?;
    Ok(li1_e2pi_norm(z) + S::from_i64_prec(n1, z.prec()))
}
