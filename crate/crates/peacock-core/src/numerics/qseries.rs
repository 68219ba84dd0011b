//! Truncated Laurent series in a fractional power of `q`, with exact
//! rational coefficients.
//!
//! A [`QxSeries`] represents `sum_k c_k q^{k/scale}` where the integer grid
//! `k` runs over `valuation .. trunc` — the series is *known modulo*
//! `q^{trunc/scale}`. Every operation tracks the truncation honestly:
//! products lose precision as `min(T_a + v_b, T_b + v_a)` (valuations `v`),
//! and inversion of a series of valuation `v` costs `2v` grid steps. All
//! coefficients are `BigRational`, so equality checks against tabulated
//! series are exact.
//!
//! The `q`-factorization computations for the two-parameter families need
//! eighth roots (`scale = 8`) and plain integer series (`scale = 1`);
//! mixed-scale arithmetic aligns to the least common multiple transparently.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::qlaurent::QLaurent;
use crate::error::{Error, Result};

/// A truncated Laurent series in `q^{1/scale}` over `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QxSeries {
    scale: u32,
    /// Known modulo `q^{trunc/scale}`: all stored exponents are `< trunc`.
    trunc: i64,
    /// Map from exponent (in units of `1/scale`) to nonzero coefficient.
    coeffs: BTreeMap<i64, BigRational>,
}

impl QxSeries {
    /// The zero series at the given scale, known modulo `q^{trunc/scale}`.
    pub fn zero(scale: u32, trunc: i64) -> Self {
        assert!(scale > 0);
        Self { scale, trunc, coeffs: BTreeMap::new() }
    }

    /// The constant series `1`.
    pub fn one(scale: u32, trunc: i64) -> Self {
        Self::monomial(BigRational::one(), 0, scale, trunc)
    }

    /// The single term `c * q^{k/scale}`.
    pub fn monomial(c: BigRational, k: i64, scale: u32, trunc: i64) -> Self {
        let mut s = Self::zero(scale, trunc);
        if !c.is_zero() && k < trunc {
            s.coeffs.insert(k, c);
        }
        s
    }

    /// Integer-coefficient convenience monomial `c * q^{k/scale}`.
    pub fn term_i64(c: i64, k: i64, scale: u32, trunc: i64) -> Self {
        Self::monomial(BigRational::from(BigInt::from(c)), k, scale, trunc)
    }

    /// Lift an exact Laurent polynomial to a series at the given grid.
    pub fn from_qlaurent(p: &QLaurent, scale: u32, trunc: i64) -> Self {
        let mut s = Self::zero(scale, trunc);
        for (k, c) in p.terms() {
            let e = k * scale as i64;
            if e < trunc {
                s.coeffs.insert(e, BigRational::from(c.clone()));
            }
        }
        s
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Truncation exponent, in units of `1/scale`.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Coefficient of `q^{k/scale}`. Zero for absent terms below the
    /// truncation; panics if the term is beyond what the series knows.
    pub fn coeff(&self, k: i64) -> BigRational {
        assert!(k < self.trunc, "coefficient q^({k}/{}) beyond truncation", self.scale);
        self.coeffs.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of the integer power `q^n`.
    pub fn coeff_int(&self, n: i64) -> BigRational {
        self.coeff(n * self.scale as i64)
    }

    /// Smallest exponent (scaled units) with a nonzero coefficient, if any
    /// term is known.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// True if no nonzero coefficient is known below the truncation.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Iterate `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Return a copy at a coarser truncation (or unchanged if already
    /// tighter).
    pub fn truncate(&self, trunc: i64) -> Self {
        if trunc >= self.trunc {
            return self.clone();
        }
        let coeffs = self.coeffs.range(..trunc).map(|(k, c)| (*k, c.clone())).collect();
        Self { scale: self.scale, trunc, coeffs }
    }

    /// Rewrite on a finer grid whose scale is a multiple of the current one.
    pub fn with_scale(&self, scale: u32) -> Self {
        assert!(scale.is_multiple_of(self.scale), "scale {scale} not a multiple of {}", self.scale);
        let f = (scale / self.scale) as i64;
        let coeffs = self.coeffs.iter().map(|(k, c)| (k * f, c.clone())).collect();
        Self { scale, trunc: self.trunc * f, coeffs }
    }

    fn aligned(&self, rhs: &Self) -> (Self, Self) {
        if self.scale == rhs.scale {
            (self.clone(), rhs.clone())
        } else {
            let l = num_integer::lcm(self.scale, rhs.scale);
            (self.with_scale(l), rhs.with_scale(l))
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (mut a, b) = self.aligned(rhs);
        a.trunc = a.trunc.min(b.trunc);
        a.coeffs.retain(|k, _| *k < a.trunc);
        for (k, c) in b.coeffs {
            if k >= a.trunc {
                continue;
            }
            let v = a.coeffs.remove(&k).unwrap_or_else(BigRational::zero) + c;
            if !v.is_zero() {
                a.coeffs.insert(k, v);
            }
        }
        a
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect();
        Self { scale: self.scale, trunc: self.trunc, coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = self.aligned(rhs);
        let va = a.valuation().unwrap_or(a.trunc);
        let vb = b.valuation().unwrap_or(b.trunc);
        let trunc = (a.trunc + vb).min(b.trunc + va);
        let mut out = Self::zero(a.scale, trunc);
        for (ka, ca) in &a.coeffs {
            for (kb, cb) in &b.coeffs {
                let k = ka + kb;
                if k >= trunc {
                    continue;
                }
                let v = out.coeffs.remove(&k).unwrap_or_else(BigRational::zero) + ca * cb;
                if !v.is_zero() {
                    out.coeffs.insert(k, v);
                }
            }
        }
        out
    }

    /// Multiply by the exact scalar `c`.
    pub fn scalar_mul(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.scale, self.trunc);
        }
        let coeffs = self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect();
        Self { scale: self.scale, trunc: self.trunc, coeffs }
    }

    /// Multiply by the monomial `q^{k/scale}` (shifts every exponent and the
    /// truncation).
    pub fn shift(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e + k, c.clone())).collect();
        Self { scale: self.scale, trunc: self.trunc + k, coeffs }
    }

    /// Substitute `q -> q^m` for a positive integer `m` (exponents multiply).
    pub fn subst_pow(&self, m: u32) -> Self {
        assert!(m > 0);
        let f = m as i64;
        let coeffs = self.coeffs.iter().map(|(k, c)| (k * f, c.clone())).collect();
        Self { scale: self.scale, trunc: self.trunc * f, coeffs }
    }

    /// Multiplicative inverse. Requires a known leading term; a series of
    /// valuation `v` known modulo `q^T` yields an inverse known modulo
    /// `q^{T - 2v}` (scaled units).
    pub fn inv(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::Singular("inverting a series with no known terms".into()))?;
        let n = self.trunc - v; // number of known grid coefficients
        let a: Vec<BigRational> = (0..n).map(|j| self.coeff(v + j)).collect();
        let a0 = &a[0];
        let mut b: Vec<BigRational> = Vec::with_capacity(n as usize);
        b.push(a0.recip());
        for m in 1..n as usize {
            let mut acc = BigRational::zero();
            for j in 1..=m {
                if !a[j].is_zero() && !b[m - j].is_zero() {
                    acc += &a[j] * &b[m - j];
                }
            }
            b.push(-acc / a0);
        }
        let mut out = Self::zero(self.scale, self.trunc - 2 * v);
        for (m, c) in b.into_iter().enumerate() {
            let k = -v + m as i64;
            if !c.is_zero() && k < out.trunc {
                out.coeffs.insert(k, c);
            }
        }
        Ok(out)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Integer power (negative exponents via the inverse).
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        if e == 0 {
            return Ok(Self::one(self.scale, i64::MAX / 4));
        }
        // The identity starts "fully known"; truncation narrows through the
        // min-tracking in `mul` to T + (e-1) * valuation, as it should.
        let mut acc = Self::one(self.scale, i64::MAX / 4);
        let mut base = self.clone();
        let mut e = e as u64;
        loop {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(acc)
    }

    /// Convert to an exact Laurent polynomial when every known coefficient is
    /// an integer sitting on the integer-power grid.
    pub fn to_qlaurent(&self) -> Result<QLaurent> {
        let s = self.scale as i64;
        let mut out = QLaurent::zero();
        for (k, c) in self.terms() {
            if k.rem_euclid(s) != 0 {
                return Err(Error::InvalidInput(format!(
                    "fractional exponent q^({k}/{s}) cannot become a Laurent polynomial"
                )));
            }
            if !c.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "non-integer coefficient {c} cannot become a Laurent polynomial"
                )));
            }
            out = out.add(&QLaurent::monomial(c.to_integer(), k / s));
        }
        Ok(out)
    }

    /// Evaluate the known terms at a numeric point, using the principal
    /// branch for the fractional root `q^{1/scale}`.
    pub fn eval<S: super::scalar::Scalar>(&self, q: &S) -> S {
        let p = q.prec();
        let root = if self.scale == 1 {
            q.clone()
        } else {
            let s = S::from_i64_prec(self.scale as i64, p);
            (q.ln() / s).exp()
        };
        let mut acc = S::from_i64_prec(0, p);
        for (k, c) in self.terms() {
            let coeff = S::from_ratio_prec(c.numer(), c.denom(), p);
            acc = acc + coeff * root.powi(k);
        }
        acc
    }

    /// Exact equality of all coefficients up to (and excluding) the integer
    /// power `q^{through+1}`; both series must actually know that range.
    pub fn agrees_through(&self, rhs: &Self, through: i64) -> bool {
        let (a, b) = self.aligned(rhs);
        let bound = (through + 1) * a.scale as i64;
        if a.trunc < bound || b.trunc < bound {
            return false;
        }
        let mut keys: Vec<i64> = a.coeffs.range(..bound).map(|(k, _)| *k).collect();
        keys.extend(b.coeffs.range(..bound).map(|(k, _)| *k));
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().all(|k| a.coeff(k) == b.coeff(k))
    }
}

impl fmt::Display for QxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (k, c) in self.terms() {
                let neg = c.is_negative();
                let mag = c.abs();
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                    first = false;
                } else if neg {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                let s = self.scale as i64;
                let g = num_integer::gcd(k.unsigned_abs(), self.scale as u64) as i64;
                let (num, den) = (k / g, s / g);
                let show_coeff = !mag.is_one() || k == 0;
                if show_coeff {
                    write!(f, "{mag}")?;
                }
                if k != 0 {
                    if show_coeff {
                        write!(f, "*")?;
                    }
                    if den == 1 {
                        if num == 1 {
                            write!(f, "q")?;
                        } else {
                            write!(f, "q^{num}")?;
                        }
                    } else {
                        write!(f, "q^({num}/{den})")?;
                    }
                }
            }
        }
        let s = self.scale as i64;
        let g = num_integer::gcd(self.trunc.unsigned_abs(), self.scale as u64) as i64;
        if s / g == 1 {
            write!(f, " + O(q^{})", self.trunc / g)
        } else {
            write!(f, " + O(q^({}/{}))", self.trunc / g, s / g)
        }
    }
}

/// A dense square matrix over formal `q`-series, with exact Gauss inversion.
#[derive(Clone, Debug)]
pub struct SeriesMatrix {
    pub n: usize,
    pub rows: Vec<Vec<QxSeries>>,
}

impl SeriesMatrix {
    pub fn from_rows(rows: Vec<Vec<QxSeries>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, rows }
    }

    pub fn identity(n: usize, scale: u32, trunc: i64) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { QxSeries::one(scale, trunc) } else { QxSeries::zero(scale, trunc) })
                    .collect()
            })
            .collect();
        Self { n, rows }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let mut acc: Option<QxSeries> = None;
                        for k in 0..self.n {
                            let t = self.rows[i][k].mul(&rhs.rows[k][j]);
                            acc = Some(match acc {
                                None => t,
                                Some(a) => a.add(&t),
                            });
                        }
                        acc.unwrap()
                    })
                    .collect()
            })
            .collect();
        Self { n: self.n, rows }
    }

    pub fn map<F: Fn(&QxSeries) -> QxSeries>(&self, f: F) -> Self {
        let rows = self.rows.iter().map(|r| r.iter().map(&f).collect()).collect();
        Self { n: self.n, rows }
    }

    /// Gauss–Jordan inverse over the formal Laurent-series field. Pivots are
    /// chosen with minimal valuation to lose as little truncation as
    /// possible.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.rows.clone();
        let scale = a[0][0].scale();
        let trunc = a.iter().flatten().map(|s| s.trunc()).min().unwrap();
        let mut inv = SeriesMatrix::identity(n, scale, trunc).rows;
        for col in 0..n {
            // Pivot: the row (>= col) whose entry has minimal valuation.
            let pivot = (col..n)
                .filter(|&r| !a[r][col].is_zero())
                .min_by_key(|&r| a[r][col].valuation().unwrap())
                .ok_or_else(|| Error::Singular(format!("series matrix singular at column {col}")))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = a[col][j].mul(&pinv);
                inv[col][j] = inv[col][j].mul(&pinv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
        Ok(Self { n, rows: inv })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(scale: u32, trunc: i64) -> QxSeries {
        // 1/(1-q) = 1 + q + q^2 + ...
        let mut s = QxSeries::zero(scale, trunc);
        let step = scale as i64;
        let mut k = 0;
        while k < trunc {
            s = s.add(&QxSeries::term_i64(1, k, scale, trunc));
            k += step;
        }
        s
    }

    #[test]
    fn inverse_of_one_minus_q() {
        let one_minus_q = QxSeries::term_i64(1, 0, 1, 12).sub(&QxSeries::term_i64(1, 1, 1, 12));
        let inv = one_minus_q.inv().unwrap();
        assert!(inv.agrees_through(&geom(1, 12), 11));
    }

    #[test]
    fn truncation_tracking_in_products() {
        // Multiplying by a monomial of valuation 2 (known well past the
        // other factor's truncation) gains two grid steps.
        let a = QxSeries::term_i64(1, 2, 1, 40); // q^2, trunc 40
        let b = geom(1, 10);
        let p = a.mul(&b);
        assert_eq!(p.trunc(), 12);
        // But if the monomial itself is only known to 10, the O(q^10) tail
        // caps the product there.
        let a10 = QxSeries::term_i64(1, 2, 1, 10);
        assert_eq!(a10.mul(&b).trunc(), 10);
        let v = QxSeries::term_i64(1, 3, 1, 9);
        let vi = v.inv().unwrap();
        assert_eq!(vi.trunc(), 9 - 6);
        assert_eq!(vi.valuation(), Some(-3));
    }

    #[test]
    fn mixed_scale_alignment() {
        let a = QxSeries::term_i64(3, 1, 8, 80); // 3 q^{1/8}
        let b = QxSeries::term_i64(2, 1, 2, 20); // 2 q^{1/2}
        let s = a.add(&b);
        assert_eq!(s.scale(), 8);
        assert_eq!(s.coeff(1), BigRational::from(BigInt::from(3)));
        assert_eq!(s.coeff(4), BigRational::from(BigInt::from(2)));
        let p = a.mul(&b);
        assert_eq!(p.coeff(5), BigRational::from(BigInt::from(6)));
    }

    #[test]
    fn pow_and_display() {
        let x = QxSeries::term_i64(1, 1, 2, 21); // q^{1/2}
        let sq = x.pow(3).unwrap();
        assert_eq!(sq.valuation(), Some(3));
        assert_eq!(format!("{x}"), "q^(1/2) + O(q^(21/2))");
        let c = QxSeries::monomial(BigRational::new(BigInt::from(3), BigInt::from(2)), 2, 2, 10);
        assert_eq!(format!("{c}"), "3/2*q + O(q^5)");
    }

    #[test]
    fn laurent_round_trip() {
        let p = QLaurent::monomial(BigInt::from(-7), 2).add(&QLaurent::one());
        let s = QxSeries::from_qlaurent(&p, 4, 40);
        assert_eq!(s.to_qlaurent().unwrap(), p);
        let frac = QxSeries::term_i64(1, 1, 4, 40);
        assert!(frac.to_qlaurent().is_err());
    }

    #[test]
    fn series_matrix_inverse_round_trips() {
        let t = 14;
        let a = SeriesMatrix::from_rows(vec![
            vec![geom(1, t), QxSeries::term_i64(2, 1, 1, t)],
            vec![QxSeries::term_i64(-1, 2, 1, t), QxSeries::term_i64(1, 0, 1, t).add(&QxSeries::term_i64(5, 3, 1, t))],
        ]);
        let ai = a.inverse().unwrap();
        let prod = a.mul(&ai);
        let id = SeriesMatrix::identity(2, 1, 4);
        for i in 0..2 {
            for j in 0..2 {
                assert!(prod.rows[i][j].agrees_through(&id.rows[i][j], 3), "entry ({i},{j}) = {}", prod.rows[i][j]);
            }
        }
    }

    #[test]
    fn matrix_inverse_with_valuation_pivots() {
        // Leading entry has positive valuation; pivoting must pick row 1.
        let t = 16;
        let a = SeriesMatrix::from_rows(vec![
            vec![QxSeries::term_i64(1, 2, 1, t), QxSeries::term_i64(1, 0, 1, t)],
            vec![QxSeries::term_i64(1, 0, 1, t), QxSeries::zero(1, t)],
        ]);
        let ai = a.inverse().unwrap();
        let prod = a.mul(&ai);
        let id = SeriesMatrix::identity(2, 1, 4);
        for i in 0..2 {
            for j in 0..2 {
                assert!(prod.rows[i][j].agrees_through(&id.rows[i][j], 3));
            }
        }
    }
}
