//! Gauss–Legendre quadrature over straight segments and decaying rays.
//!
//! The contour integrals in this crate (the integral representation of the
//! quantum dilogarithm, the state integrals, the Laplace transform of the
//! Borel sum) all run along straight rays on which the integrand decays at
//! least exponentially. They are evaluated panel-by-panel with a fixed-order
//! Gauss–Legendre rule: panel lengths grow geometrically away from the
//! vertex (ratio [`PANEL_GROWTH`]), and integration stops once several
//! consecutive panels contribute nothing at the requested tolerance.
//!
//! Nodes and weights are computed once per order in `f64` by Newton
//! iteration on the Legendre recurrence. That limits each node's *position*
//! to double accuracy, which caps the achievable accuracy of any single
//! integral near `1e-15` relative — ample for every quadrature target in the
//! crate (the tight tolerances live in exact series arithmetic, not in
//! contour integrals). Integrands may still be evaluated at arbitrary
//! [`Scalar`] precision to avoid internal overflow/cancellation.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Default Gauss–Legendre order per panel.
pub const PANEL_ORDER: usize = 32;

/// Geometric growth of successive panel lengths along a ray.
pub const PANEL_GROWTH: f64 = 1.5;

/// Hard cap on panels per ray; with growth 1.5 this covers ray lengths
/// beyond `1e12` times the first panel, far past where the integrands here
/// underflow.
const MAX_PANELS: usize = 80;

/// Consecutive negligible panels required before a ray is declared finished.
const QUIET_PANELS: usize = 3;

/// Nodes and weights of one quadrature rule.
pub type NodesWeights = (Vec<f64>, Vec<f64>);

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_legendre(n: usize) -> &'static NodesWeights {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static NodesWeights>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    if let Some(&hit) = map.get(&n) {
        return hit;
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    let leaked: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new((nodes, weights)));
    map.insert(n, leaked);
    leaked
}

/// Outcome of an adaptive contour integration.
#[derive(Clone, Debug)]
pub struct QuadResult<S> {
    pub value: S,
    /// Crude absolute error estimate (embedded lower-order rule difference
    /// summed over panels).
    pub error_estimate: f64,
    pub n_evals: usize,
}

impl<S: Scalar> QuadResult<S> {
    fn zero_like(model: &S) -> Self {
        Self { value: S::from_i64_prec(0, model.prec()), error_estimate: 0.0, n_evals: 0 }
    }
}

/// Integrate `f` over the straight segment from `a` to `b` with a single
/// `order`-point panel. Returns the plain value (no error estimate).
pub fn segment<S: Scalar, F: Fn(&S) -> Result<S>>(f: &F, a: &S, b: &S, order: usize) -> Result<S> {
    let (nodes, weights) = gauss_legendre(order);
    let p = a.prec();
    let half = S::from_f64_prec(0.5, 0.0, p);
    let mid = (a.clone() + b) * &half;
    let rad = (b.clone() - a) * &half;
    let mut acc = S::from_i64_prec(0, p);
    for (x, w) in nodes.iter().zip(weights) {
        let z = mid.clone() + rad.clone() * &S::from_f64_prec(*x, 0.0, p);
        acc = acc + f(&z)? * &S::from_f64_prec(*w, 0.0, p);
    }
    Ok(acc * rad)
}

/// Integrate `f` along a polyline through `points`, splitting every segment
/// into `panels` equal panels of the default order.
pub fn polyline<S: Scalar, F: Fn(&S) -> Result<S>>(f: &F, points: &[S], panels: usize) -> Result<S> {
    let p = points[0].prec();
    let mut acc = S::from_i64_prec(0, p);
    for pair in points.windows(2) {
        for k in 0..panels {
            let t0 = k as f64 / panels as f64;
            let t1 = (k + 1) as f64 / panels as f64;
            let a = lerp(&pair[0], &pair[1], t0);
            let b = lerp(&pair[0], &pair[1], t1);
            acc = acc + segment(f, &a, &b, PANEL_ORDER)?;
        }
    }
    Ok(acc)
}

fn lerp<S: Scalar>(a: &S, b: &S, t: f64) -> S {
    let p = a.prec();
    a.clone() + (b.clone() - a) * &S::from_f64_prec(t, 0.0, p)
}

/// Integrate `f(z) dz` over the ray `z = vertex + t * dir`, `t in [0, oo)`.
///
/// `first_len` is the length (in `t`) of the first panel; subsequent panels
/// grow by [`PANEL_GROWTH`]. The ray is cut off after [`QUIET_PANELS`]
/// consecutive panels contribute less than `tol` relative to the running
/// value. The error estimate accumulates the difference between the full
/// rule and an embedded rule of two-thirds order on every panel.
pub fn ray<S: Scalar, F: Fn(&S) -> Result<S>>(
    f: &F,
    vertex: &S,
    dir: &S,
    first_len: f64,
    tol: f64,
    order: usize,
) -> Result<QuadResult<S>> {
    let p = vertex.prec();
    let mut out = QuadResult::zero_like(vertex);
    let sub_order = (order * 2 / 3).max(4);
    let mut t0 = 0.0f64;
    let mut len = first_len;
    let mut quiet = 0usize;
    for _ in 0..MAX_PANELS {
        let a = vertex.clone() + dir.clone() * &S::from_f64_prec(t0, 0.0, p);
        let b = vertex.clone() + dir.clone() * &S::from_f64_prec(t0 + len, 0.0, p);
        let main = segment(f, &a, &b, order)?;
        let check = segment(f, &a, &b, sub_order)?;
        out.n_evals += order + sub_order;
        out.error_estimate += (main.clone() - &check).abs_f64();
        let mag = main.abs_f64();
        out.value = out.value + main;
        let scale = out.value.abs_f64().max(1e-300);
        if mag <= tol * scale {
            quiet += 1;
            if quiet >= QUIET_PANELS {
                return Ok(out);
            }
        } else {
            quiet = 0;
        }
        t0 += len;
        len *= PANEL_GROWTH;
    }
    Err(Error::NoConvergence {
        method: "ray quadrature",
        iterations: MAX_PANELS,
        residual: out.error_estimate,
    })
}

/// Integrate `f(z) dz` over the full line `z = center + t * dir`,
/// `t in (-oo, oo)`, as two opposite rays.
pub fn line<S: Scalar, F: Fn(&S) -> Result<S>>(
    f: &F,
    center: &S,
    dir: &S,
    first_len: f64,
    tol: f64,
    order: usize,
) -> Result<QuadResult<S>> {
    let plus = ray(f, center, dir, first_len, tol, order)?;
    let minus = ray(f, center, &(-dir.clone()), first_len, tol, order)?;
    Ok(QuadResult {
        value: plus.value - minus.value,
        error_estimate: plus.error_estimate + minus.error_estimate,
        n_evals: plus.n_evals + minus.n_evals,
    })
}

/// Integrate over the bent contour that comes in from infinity along
/// `-dir_in`, reaches `vertex`, and leaves along `dir_out`; that is,
/// `int_C f dz = int_ray(dir_out) - int_ray(dir_in)`.
pub fn bent<S: Scalar, F: Fn(&S) -> Result<S>>(
    f: &F,
    vertex: &S,
    dir_in: &S,
    dir_out: &S,
    first_len: f64,
    tol: f64,
    order: usize,
) -> Result<QuadResult<S>> {
    let out = ray(f, vertex, dir_out, first_len, tol, order)?;
    let inc = ray(f, vertex, dir_in, first_len, tol, order)?;
    Ok(QuadResult {
        value: out.value - inc.value,
        error_estimate: out.error_estimate + inc.error_estimate,
        n_evals: out.n_evals + inc.n_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BigC;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // Exact for degree <= 15: check x^14 -> 2/15.
        let s: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let s1: f64 = w.iter().sum();
        assert!((s1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn segment_integrates_exp() {
        let f = |z: &Complex64| Ok(z.exp());
        let v = segment(&f, &c(0.0, 0.0), &c(1.0, 1.0), 32).unwrap();
        let exact = c(1.0, 1.0).exp() - 1.0;
        assert!((v - exact).norm() < 1e-14);
    }

    #[test]
    fn ray_gaussian_full_line() {
        // int_-oo^oo e^{-z^2} dz = sqrt(pi), along a tilted line through 0.
        let dir = Complex64::from_polar(1.0, 0.3);
        let f = |z: &Complex64| Ok((-z * z).exp());
        let r = line(&f, &c(0.0, 0.0), &dir, 0.5, 1e-14, 32).unwrap();
        assert!((r.value - c(std::f64::consts::PI.sqrt(), 0.0)).norm() < 1e-12, "{}", r.value);
        assert!(r.error_estimate < 1e-10);
        assert!(r.n_evals > 0);
    }

    #[test]
    fn ray_exponential_decay_bigc() {
        // int_0^oo e^{-t} dt = 1 with BigC evaluation.
        let one_dir = BigC::from_f64_prec(1.0, 0.0, 192);
        let zero = BigC::from_f64_prec(0.0, 0.0, 192);
        let f = |z: &BigC| Ok((-z.clone()).exp());
        let r = ray(&f, &zero, &one_dir, 0.7, 1e-15, 32).unwrap();
        assert!((r.value.re_f64() - 1.0).abs() < 1e-13, "{}", r.value);
    }

    #[test]
    fn bent_contour_closes_against_line() {
        // For an entire integrand with Gaussian decay, tilting the incoming
        // ray within the decay sector must not change the integral (Cauchy).
        let d_out = Complex64::from_polar(1.0, 0.3);
        let d_in = Complex64::from_polar(1.0, std::f64::consts::PI - 0.3);
        let f = |z: &Complex64| Ok((-(z * z)).exp() * (z + 2.0));
        let straight = line(&f, &c(0.0, 0.0), &d_out, 0.5, 1e-14, 32).unwrap();
        let bent_v = bent(&f, &c(0.0, 0.0), &d_in, &d_out, 0.5, 1e-14, 32).unwrap();
        assert!((straight.value - bent_v.value).norm() < 1e-12);
    }
}
