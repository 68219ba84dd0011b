//! The branched surface Σ: potential `V`/`Λ`, critical points, cut
//! transitions and the Stokes-ray fan.
//!
//! The geometry is a pair of positive integers `(A, B)`, `A ≠ B`. On the
//! upper convention the potential is
//!
//! ```text
//! V(z, m, n) = B·Li₂(e(z))/(2πi)² + B/24 + (A/2) z(z+1) + m z + n ,
//! ```
//!
//! holomorphic off the downward cuts `ℤ − iℝ≥0`; the lower convention
//! replaces the principal part by its reflection,
//!
//! ```text
//! Λ(z, m, n) = −B·Li₂(e(−z))/(2πi)² + B/12 − (B/2)(z−1/2)² + (A/2) z(z+1) + m z + n ,
//! ```
//!
//! holomorphic off the upward cuts `ℤ + iℝ≥0`. The two agree on overlap via
//! `V(z, m, n) = Λ(z, m + Bk, n − Bk(k+1)/2)`, `k = ⌊Re z⌋`. Sheets are
//! tracked by the integer pair `(m, n)`; crossing the cut below `k` to the
//! right on the upper convention maps `(m, n) ↦ (m − B, n + Bk)`, and the
//! identification `(z, m, n) ∼ (z + 1, m − A, n − m)` relates unit
//! translates.
//!
//! Critical points sit at `z₀ = Log(x₀)/(2πi)` over the roots `x₀` of
//! `P(x) = (−x)^A − (1−x)^B`, with the exact integer sheet
//! `m₀ = [B·Log(1−x₀) − A·Log(x₀)]/(2πi) − A/2` (principal logarithms). The
//! Stokes directions attached to a base critical value `V₀` are
//! `ϑ = π/2 + arg(𝒱 − V₀ + n)`, where `𝒱` ranges over the critical values
//! together with the trivial value `0`; rays from the trivial targets carry
//! no Stokes jump.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::polylog::{li0_e2pi, li1_e2pi_norm, li2_e2pi_norm, li_neg_e2pi};
use crate::numerics::{digits_to_bits, two_pi_i, BigC, Scalar};

/// Default `|n| ≤ N_max` window for Stokes-ray enumeration.
pub const DEFAULT_N_MAX: i64 = 5;

/// Geometric distance below which a point counts as lying on a cut.
const CUT_EPS: f64 = 1e-12;

/// Clearance demanded of segment endpoints / branch points in transitions.
const SEG_EPS: f64 = 1e-9;

/// Two ray arguments within this tolerance are the same Stokes ray.
const RAY_MERGE: f64 = 1e-9;

/// Which branch convention a surface point is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// `V`: principal part `B·Li₂(e(z))/(2πi)²`, cuts `ℤ − iℝ≥0`.
    Upper,
    /// `Λ`: reflected principal part, cuts `ℤ + iℝ≥0`.
    Lower,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::Upper => write!(f, "upper"),
            Convention::Lower => write!(f, "lower"),
        }
    }
}

/// A point of the branched surface Σ: position plus sheet bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint<S: Scalar> {
    pub z: S,
    pub m: i64,
    pub n: i64,
    pub convention: Convention,
}

impl<S: Scalar> SurfacePoint<S> {
    pub fn upper(z: S, m: i64, n: i64) -> Self {
        Self { z, m, n, convention: Convention::Upper }
    }

    pub fn lower(z: S, m: i64, n: i64) -> Self {
        Self { z, m, n, convention: Convention::Lower }
    }

    /// The equivalent representative shifted by one unit to the right,
    /// `(z, m, n) ∼ (z + 1, m − A, n − m)`; the potential is unchanged.
    pub fn shift_right(&self, a: i64) -> Self {
        Self {
            z: self.z.clone() + S::from_i64_prec(1, self.z.prec()),
            m: self.m - a,
            n: self.n - self.m,
            convention: self.convention,
        }
    }

    /// Inverse of [`shift_right`]: `(z, m, n) ∼ (z − 1, m + A, n + m + A)`.
    pub fn shift_left(&self, a: i64) -> Self {
        Self {
            z: self.z.clone() - S::from_i64_prec(1, self.z.prec()),
            m: self.m + a,
            n: self.n + self.m + a,
            convention: self.convention,
        }
    }

    /// The representative with `0 ≤ m ≤ A − 1` (translates `z` by integers).
    pub fn canonical_m(&self, a: i64) -> Self {
        let mut p = self.clone();
        while p.m < 0 {
            p = p.shift_left(a);
        }
        while p.m >= a {
            p = p.shift_right(a);
        }
        p
    }
}

/// Distance from `z` to the cut set of the given convention.
fn cut_distance(convention: Convention, z: Complex64) -> f64 {
    let fr = z.re - z.re.round();
    let toward_cut = match convention {
        Convention::Upper => z.im < 0.0,
        Convention::Lower => z.im > 0.0,
    };
    if toward_cut {
        fr.abs()
    } else {
        (fr * fr + z.im * z.im).sqrt()
    }
}

/// The geometry `Ξ = (A, B, p₀)`: the two exponents plus a selected
/// critical index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryXi {
    a: i64,
    b: i64,
    index: usize,
}

impl GeometryXi {
    /// Validates positivity, `A ≠ B`, the simple-roots property of
    /// `P(x) = (−x)^A − (1−x)^B`, and `index < max{A, B}`.
    pub fn new(a: i64, b: i64, index: usize) -> Result<Self> {
        if a <= 0 || b <= 0 {
            return Err(Error::InvalidInput(format!(
                "exponents must be positive, got A = {a}, B = {b}"
            )));
        }
        if a == b {
            return Err(Error::InvalidInput(format!("exponents must differ, got A = B = {a}")));
        }
        if !check_simple_roots(a, b)? {
            return Err(Error::InvalidInput(format!(
                "P(x) = (-x)^{a} - (1-x)^{b} has a multiple root"
            )));
        }
        let deg = a.max(b) as usize;
        if index >= deg {
            return Err(Error::InvalidInput(format!(
                "critical index {index} out of range (geometry has {deg} critical points)"
            )));
        }
        Ok(Self { a, b, index })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// The selected critical index `p₀`.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Degree of `P`, which equals the number of critical points.
    pub fn degree(&self) -> usize {
        self.a.max(self.b) as usize
    }

    /// Coefficients of `P(x) = (−x)^A − (1−x)^B`, ascending, exact.
    pub fn poly_coeffs(&self) -> Vec<BigInt> {
        let deg = self.degree();
        let mut c = vec![BigInt::from(0); deg + 1];
        let sign_a = if self.a % 2 == 0 { 1 } else { -1 };
        c[self.a as usize] += sign_a;
        for k in 0..=self.b {
            let binom = num_integer::binomial(BigInt::from(self.b), BigInt::from(k));
            let sign = if k % 2 == 0 { 1 } else { -1 };
            c[k as usize] -= binom * sign;
        }
        c
    }
}

fn ratio<S: Scalar>(num: i64, den: i64, prec: usize) -> S {
    S::from_ratio_prec(&BigInt::from(num), &BigInt::from(den), prec)
}

/// The potential `V` (upper) or `Λ` (lower) at a surface point, including
/// the `m z + n` sheet terms.
pub fn potential<S: Scalar>(xi: &GeometryXi, p: &SurfacePoint<S>) -> Result<S> {
    let zg = Complex64::new(p.z.re_f64(), p.z.im_f64());
    let dist = cut_distance(p.convention, zg);
    if dist < CUT_EPS {
        return Err(Error::BranchCut {
            z: format!("{zg}"),
            dist,
            what: "potential branch cut",
        });
    }
    let prec = p.z.prec();
    let (a, b) = (xi.a, xi.b);
    let z = &p.z;
    let half_a_z_zp1 =
        ratio::<S>(a, 2, prec) * z * &(z.clone() + S::from_i64_prec(1, prec));
    let sheet = S::from_i64_prec(p.m, prec) * z + S::from_i64_prec(p.n, prec);
    match p.convention {
        Convention::Upper => Ok(S::from_i64_prec(b, prec) * &li2_e2pi_norm(z)
            + ratio::<S>(b, 24, prec)
            + half_a_z_zp1
            + sheet),
        Convention::Lower => {
            let zm = z.clone().neg();
            let w = z.clone() - ratio::<S>(1, 2, prec);
            Ok(S::from_i64_prec(-b, prec) * &li2_e2pi_norm(&zm)
                + ratio::<S>(b, 12, prec)
                - ratio::<S>(b, 2, prec) * &(w.clone() * &w)
                + half_a_z_zp1
                + sheet)
        }
    }
}

/// First derivative of the potential with respect to `z`.
pub fn potential_derivative<S: Scalar>(xi: &GeometryXi, p: &SurfacePoint<S>) -> Result<S> {
    let zg = Complex64::new(p.z.re_f64(), p.z.im_f64());
    let dist = cut_distance(p.convention, zg);
    if dist < CUT_EPS {
        return Err(Error::BranchCut {
            z: format!("{zg}"),
            dist,
            what: "potential branch cut",
        });
    }
    let prec = p.z.prec();
    let (a, b) = (xi.a, xi.b);
    let z = &p.z;
    let m = S::from_i64_prec(p.m, prec);
    match p.convention {
        Convention::Upper => Ok(S::from_i64_prec(b, prec) * &li1_e2pi_norm(z)
            + S::from_i64_prec(a, prec) * z
            + ratio::<S>(a, 2, prec)
            + m),
        Convention::Lower => {
            let zm = z.clone().neg();
            Ok(S::from_i64_prec(b, prec) * &li1_e2pi_norm(&zm)
                + S::from_i64_prec(a - b, prec) * z
                + ratio::<S>(a + b, 2, prec)
                + m)
        }
    }
}

/// `j`-th derivative of the potential, `j ≥ 1`. For `j ≥ 2` the two
/// conventions agree (they differ by an affine-plus-quadratic term), and
/// the value is `B·(2πi)^{j−2}·Li_{2−j}(e(z))` plus `A` at `j = 2`.
pub fn potential_derivative_j<S: Scalar>(
    xi: &GeometryXi,
    p: &SurfacePoint<S>,
    j: u32,
) -> Result<S> {
    if j == 0 {
        return potential(xi, p);
    }
    if j == 1 {
        return potential_derivative(xi, p);
    }
    let prec = p.z.prec();
    let b = S::from_i64_prec(xi.b, prec);
    if j == 2 {
        return Ok(b * &li0_e2pi(&p.z)? + S::from_i64_prec(xi.a, prec));
    }
    let li = li_neg_e2pi((j - 2) as usize, &p.z)?;
    Ok(b * &two_pi_i(&p.z).powi((j - 2) as i64) * &li)
}

/// Transport a surface point along the straight segment from `p.z` to `to`,
/// updating `(m, n)` at every transversal cut crossing so the potential
/// stays continuous along the segment.
pub fn cross_branch<S: Scalar>(
    xi: &GeometryXi,
    p: &SurfacePoint<S>,
    to: &S,
) -> Result<SurfacePoint<S>> {
    let a = Complex64::new(p.z.re_f64(), p.z.im_f64());
    let b = Complex64::new(to.re_f64(), to.im_f64());
    let u = b - a;
    let downward = p.convention == Convention::Upper;
    // (position along the segment, branch point, +1 for left-to-right).
    let mut events: Vec<(f64, i64, i64)> = Vec::new();
    if u.re.abs() > 1e-15 {
        let lo = (a.re.min(b.re)).floor() as i64 - 1;
        let hi = (a.re.max(b.re)).ceil() as i64 + 1;
        for k in lo..=hi {
            let s = (k as f64 - a.re) / u.re;
            if !(0.0..=1.0).contains(&s) {
                continue;
            }
            let y = a.im + s * u.im;
            if y.abs() <= SEG_EPS {
                return Err(Error::BranchCut {
                    z: format!("{a} -> {b}"),
                    dist: y.abs(),
                    what: "segment passes through a branch point",
                });
            }
            let active = if downward { y < 0.0 } else { y > 0.0 };
            if !active {
                continue;
            }
            if !(1e-12..=1.0 - 1e-12).contains(&s) {
                return Err(Error::BranchCut {
                    z: format!("{a} -> {b}"),
                    dist: 0.0,
                    what: "segment endpoint lies on a cut",
                });
            }
            events.push((s, k, if u.re > 0.0 { 1 } else { -1 }));
        }
    } else {
        let fr = a.re - a.re.round();
        if fr.abs() < SEG_EPS {
            let into_cut = if downward {
                a.im.min(b.im) < SEG_EPS
            } else {
                a.im.max(b.im) > -SEG_EPS
            };
            if into_cut {
                return Err(Error::BranchCut {
                    z: format!("{a} -> {b}"),
                    dist: fr.abs(),
                    what: "segment runs along a cut",
                });
            }
        }
    }
    events.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let (mut m, mut n) = (p.m, p.n);
    for (_, k, dir) in events {
        // Upper, left-to-right across the cut below k: (m, n) -> (m−B, n+Bk);
        // the lower convention and the reverse direction flip the sign.
        let sign = if downward { dir } else { -dir };
        m -= sign * xi.b;
        n += sign * xi.b * k;
    }
    Ok(SurfacePoint { z: to.clone(), m, n, convention: p.convention })
}

/// A critical point of the potential: surface point, root of `P`, and the
/// chosen lift of the critical value.
#[derive(Clone, Debug)]
pub struct CriticalPoint<S: Scalar> {
    pub point: SurfacePoint<S>,
    /// `x₀` with `P(x₀) = 0` and `e(z₀) = x₀`.
    pub root: S,
    /// The lift of `V(p₀)` with `Re ∈ (−1/2, 1/2]`; equals
    /// `potential(point)` exactly (the shift is stored in `point.n`).
    pub value: S,
}

impl CriticalPoint<BigC> {
    pub fn to_f64(&self) -> CriticalPoint<Complex64> {
        let c = |x: &BigC| Complex64::new(x.re_f64(), x.im_f64());
        CriticalPoint {
            point: SurfacePoint {
                z: c(&self.point.z),
                m: self.point.m,
                n: self.point.n,
                convention: self.point.convention,
            },
            root: c(&self.root),
            value: c(&self.value),
        }
    }
}

/// Exact simple-roots test: `resultant(P, P′) ≠ 0` over the integers.
pub fn check_simple_roots(a: i64, b: i64) -> Result<bool> {
    if a <= 0 || b <= 0 || a == b {
        return Err(Error::InvalidInput(format!(
            "check_simple_roots needs positive A != B, got ({a}, {b})"
        )));
    }
    let xi = GeometryXi { a, b, index: 0 };
    let p = xi.poly_coeffs();
    let dp: Vec<BigInt> = (1..p.len()).map(|j| &p[j] * BigInt::from(j)).collect();
    Ok(!resultant_is_zero(&p, &dp))
}

/// Whether `resultant(p, q) = 0`, via fraction-free (Bareiss) elimination
/// of the Sylvester matrix over `ℤ`.
fn resultant_is_zero(p: &[BigInt], q: &[BigInt]) -> bool {
    let zero = BigInt::from(0);
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let n = dp + dq;
    let mut m = vec![vec![zero.clone(); n]; n];
    for (i, row) in m.iter_mut().enumerate().take(dq) {
        for (j, c) in p.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
    }
    for i in 0..dp {
        for (j, c) in q.iter().rev().enumerate() {
            m[dq + i][i + j] = c.clone();
        }
    }
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k] == zero {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != zero) else {
                return true; // structurally singular: zero determinant
            };
            m.swap(k, r);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact division (Bareiss)
            }
            m[i][k] = zero.clone();
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1] == zero
}

/// All roots of `P` in hardware precision (Aberth–Ehrlich iteration).
fn aberth_roots(coeffs: &[BigInt]) -> Result<Vec<Complex64>> {
    let c: Vec<f64> = coeffs
        .iter()
        .map(|b| {
            let s = b.to_string();
            s.parse::<f64>().unwrap_or(0.0)
        })
        .collect();
    let deg = c.len() - 1;
    let lead = c[deg];
    let mono: Vec<f64> = c.iter().map(|x| x / lead).collect();
    if deg == 1 {
        return Ok(vec![Complex64::new(-mono[0], 0.0)]);
    }
    let radius = 1.0 + mono[..deg].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut x: Vec<Complex64> = (0..deg)
        .map(|i| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * i as f64 / deg as f64))
        .collect();
    let eval = |z: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &ck in mono.iter().rev() {
            d = d * z + v;
            v = v * z + ck;
        }
        (v, d)
    };
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        let prev = x.clone();
        for i in 0..deg {
            let (v, d) = eval(prev[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &xj) in prev.iter().enumerate() {
                if j != i {
                    s += (prev[i] - xj).inv();
                }
            }
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            x[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { method: "aberth", iterations: 200, residual: f64::NAN })
}

/// Newton-polish a root of the integer polynomial in `BigC` at `prec` bits.
fn polish_root(coeffs: &[BigInt], seed: Complex64, prec: usize) -> BigC {
    let one = BigInt::from(1);
    let cs: Vec<BigC> = coeffs.iter().map(|c| BigC::from_ratio_prec(c, &one, prec)).collect();
    let mut x = BigC::from_f64_prec(seed.re, seed.im, prec);
    for _ in 0..(2 + prec.ilog2() * 2) {
        let mut v = BigC::from_i64_prec(0, prec);
        let mut d = BigC::from_i64_prec(0, prec);
        for ck in cs.iter().rev() {
            d = d * &x + &v;
            v = v * &x + ck;
        }
        x = x - &(v / &d);
    }
    x
}

/// Index permutation matching the worked-example labelling conventions.
fn paper_order(a: i64, b: i64, vals: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    if (a, b) == (4, 1) {
        // Real values first (ascending), then Im > 0 before Im < 0.
        idx.sort_by(|&i, &j| {
            let (u, v) = (vals[i], vals[j]);
            let cls = |w: Complex64| i32::from(w.im.abs() > 1e-9);
            cls(u)
                .cmp(&cls(v))
                .then(if cls(u) == 0 {
                    u.re.partial_cmp(&v.re).unwrap()
                } else {
                    v.im.partial_cmp(&u.im).unwrap()
                })
        });
    } else {
        idx.sort_by(|&i, &j| {
            let (u, v) = (vals[i], vals[j]);
            u.re.partial_cmp(&v.re).unwrap().then(u.im.partial_cmp(&v.im).unwrap())
        });
    }
    idx
}

/// All critical points at `prec` bits, ordered by the labelling convention
/// of the worked examples (lexicographic in the value otherwise).
pub fn critical_points(xi: &GeometryXi, prec: usize) -> Result<Vec<CriticalPoint<BigC>>> {
    let coeffs = xi.poly_coeffs();
    let seeds = aberth_roots(&coeffs)?;
    let tpi = two_pi_i(&BigC::from_i64_prec(0, prec));
    let mut pts = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let x0 = polish_root(&coeffs, seed, prec);
        let one = BigC::from_i64_prec(1, prec);
        let mut z0 = x0.ln() / &tpi;
        let log_term = BigC::from_i64_prec(xi.b, prec) * &(one.clone() - &x0).ln()
            - BigC::from_i64_prec(xi.a, prec) * &x0.ln();
        let m0_exact = log_term / &tpi - ratio::<BigC>(xi.a, 2, prec);
        let mut m0 = m0_exact.re_f64().round() as i64;
        let resid = (m0_exact - &BigC::from_i64_prec(m0, prec)).abs_f64();
        if resid > 1e-8 {
            return Err(Error::NoConvergence {
                method: "critical sheet index m0",
                iterations: 0,
                residual: resid,
            });
        }
        // Principal log puts Re z0 in (−1/2, 1/2]; move 1/2 (negative real
        // root) down to −1/2 so the window is [−1/2, 1/2).
        if z0.re_f64() > 0.5 - 1e-12 {
            z0 = z0 - &one;
            m0 += xi.a;
        }
        let mut point = SurfacePoint::upper(z0, m0, 0);
        let raw = potential(xi, &point)?;
        point.n = -(raw.re_f64() - 0.5).ceil() as i64;
        let value = potential(xi, &point)?;
        let deriv = potential_derivative(xi, &point)?.abs_f64();
        if deriv > 1e-20 {
            return Err(Error::NoConvergence {
                method: "critical point residual",
                iterations: 0,
                residual: deriv,
            });
        }
        pts.push(CriticalPoint { point, root: x0, value });
    }
    let vals: Vec<Complex64> =
        pts.iter().map(|p| Complex64::new(p.value.re_f64(), p.value.im_f64())).collect();
    let order = paper_order(xi.a, xi.b, &vals);
    Ok(order.into_iter().map(|i| pts[i].clone()).collect())
}

/// Convenience double-precision view of [`critical_points`].
pub fn critical_points_f64(xi: &GeometryXi) -> Result<Vec<CriticalPoint<Complex64>>> {
    Ok(critical_points(xi, digits_to_bits(30))?.iter().map(|p| p.to_f64()).collect())
}

/// One source `(base, target, n)` of a Stokes ray; `target = None` is the
/// trivial value `0 mod ℤ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaySource {
    pub base: usize,
    pub target: Option<usize>,
    pub n: i64,
}

/// A single Stokes ray with all sources that generate it.
#[derive(Clone, Debug, Serialize)]
pub struct StokesRay {
    pub vartheta: f64,
    pub sources: Vec<RaySource>,
    /// True when every source is a trivial (`0 + n`) or self target: the
    /// thimble decomposition changes representation but nothing jumps.
    pub trivial: bool,
}

/// An open arc between consecutive rays.
#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    pub label: String,
}

impl Region {
    pub fn contains(&self, vartheta: f64) -> bool {
        self.lo < vartheta && vartheta < self.hi
    }
}

/// The fan of Stokes rays in the window `(π/2, 3π/2]` and its regions.
#[derive(Clone, Debug, Serialize)]
pub struct RayFan {
    /// Base critical index, or `None` for the union over all bases.
    pub base: Option<usize>,
    pub rays: Vec<StokesRay>,
    pub regions: Vec<Region>,
}

impl RayFan {
    pub fn region_of(&self, vartheta: f64) -> Option<&Region> {
        self.regions.iter().find(|r| r.contains(vartheta))
    }

    pub fn region_labelled(&self, label: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.label == label)
    }

    /// The nearest ray argument to `vartheta` (for margin checks).
    pub fn nearest_ray(&self, vartheta: f64) -> Option<f64> {
        self.rays
            .iter()
            .map(|r| r.vartheta)
            .min_by(|x, y| (x - vartheta).abs().partial_cmp(&(y - vartheta).abs()).unwrap())
    }
}

fn paper_region_samples(a: i64, b: i64) -> Vec<(&'static str, f64)> {
    match (a, b) {
        (1, 2) => vec![("I", 3.6), ("II", 2.0), ("III", 1.65)],
        (4, 1) => vec![("I", 2.2), ("I*", 1.85), ("II", 1.70), ("III", 1.63), ("IV", 1.615)],
        _ => vec![],
    }
}

fn build_fan(
    xi: &GeometryXi,
    points: &[CriticalPoint<BigC>],
    bases: &[usize],
    n_max: i64,
) -> RayFan {
    use std::f64::consts::{FRAC_PI_2, PI};
    let vals: Vec<Complex64> =
        points.iter().map(|p| Complex64::new(p.value.re_f64(), p.value.im_f64())).collect();
    let mut raw: Vec<(f64, RaySource)> = Vec::new();
    for &base in bases {
        let v0 = vals[base];
        let mut targets: Vec<(Option<usize>, Complex64)> =
            (0..vals.len()).map(|t| (Some(t), vals[t])).collect();
        targets.push((None, Complex64::new(0.0, 0.0)));
        for (t, vt) in targets {
            for n in -n_max..=n_max {
                let x = vt - v0 + n as f64;
                if x.norm() < 1e-14 {
                    continue;
                }
                let src = RaySource { base, target: t, n };
                if x.im.abs() < 1e-12 {
                    // Real difference: the vertical boundary ray, reduced
                    // to its representative at 3π/2.
                    raw.push((1.5 * PI, src));
                } else if x.im > 0.0 {
                    raw.push((FRAC_PI_2 + x.im.atan2(x.re), src));
                }
                // Im < 0 belongs to the mirrored fan in (−π/2, π/2).
            }
        }
    }
    raw.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut rays: Vec<StokesRay> = Vec::new();
    for (th, src) in raw {
        match rays.last_mut() {
            Some(last) if (last.vartheta - th).abs() < RAY_MERGE => {
                if !last.sources.contains(&src) {
                    last.sources.push(src);
                }
            }
            _ => rays.push(StokesRay { vartheta: th, sources: vec![src], trivial: true }),
        }
    }
    for ray in &mut rays {
        ray.trivial = ray
            .sources
            .iter()
            .all(|s| s.target.is_none() || s.target == Some(s.base));
    }
    let mut bounds = vec![FRAC_PI_2];
    bounds.extend(rays.iter().map(|r| r.vartheta));
    if *bounds.last().unwrap() < 1.5 * PI - RAY_MERGE {
        bounds.push(1.5 * PI);
    }
    let mut regions: Vec<Region> = bounds
        .windows(2)
        .enumerate()
        .map(|(i, w)| Region { lo: w[0], hi: w[1], label: format!("R{i}") })
        .collect();
    for (label, sample) in paper_region_samples(xi.a, xi.b) {
        if let Some(r) = regions.iter_mut().find(|r| r.contains(sample)) {
            r.label = label.to_string();
        }
    }
    RayFan { base: if bases.len() == 1 { Some(bases[0]) } else { None }, rays, regions }
}

/// Stokes rays seen from one base critical point.
pub fn stokes_rays(
    xi: &GeometryXi,
    points: &[CriticalPoint<BigC>],
    base: usize,
    n_max: i64,
) -> RayFan {
    build_fan(xi, points, &[base], n_max)
}

/// The union fan over all base points — the full peacock pattern, whose
/// arcs are the regions in which every thimble decomposition is constant.
pub fn stokes_fan(xi: &GeometryXi, points: &[CriticalPoint<BigC>], n_max: i64) -> RayFan {
    let bases: Vec<usize> = (0..points.len()).collect();
    build_fan(xi, points, &bases, n_max)
}

/// Serializable record of one critical point (the JSON table row).
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPointRecord {
    pub a: i64,
    pub b: i64,
    pub index: usize,
    pub z_re: f64,
    pub z_im: f64,
    pub m: i64,
    pub value_re: f64,
    pub value_im: f64,
}

/// The critical-point table in the layout of the worked examples.
pub fn critical_points_table(
    xi: &GeometryXi,
    points: &[CriticalPoint<BigC>],
) -> Vec<CriticalPointRecord> {
    points
        .iter()
        .enumerate()
        .map(|(index, p)| CriticalPointRecord {
            a: xi.a,
            b: xi.b,
            index,
            z_re: p.point.z.re_f64(),
            z_im: p.point.z.im_f64(),
            m: p.point.m,
            value_re: p.value.re_f64(),
            value_im: p.value.im_f64(),
        })
        .collect()
}

/// JSON emission of the critical-point table.
pub fn critical_points_json(xi: &GeometryXi, points: &[CriticalPoint<BigC>]) -> String {
    serde_json::to_string_pretty(&critical_points_table(xi, points)).expect("table serializes")
}
