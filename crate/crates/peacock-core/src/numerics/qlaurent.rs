//! Laurent polynomials in `q` with integer coefficients.
//!
//! Decomposition coefficients, reduction-relation weights and Stokes matrices
//! all live in the ring `Z[q, q^-1]`. [`QLaurent`] stores a sparse map from
//! exponent to coefficient (never retaining zeros), supports exact ring
//! arithmetic plus exact division, and evaluates at any [`Scalar`] point.
//! [`QLMatrix`] provides the small dense exact matrices needed for Stokes
//! cocycle checks, with inversion through the adjugate (the matrices that
//! arise have unit determinant `±q^k`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// An element of `Z[q, q^-1]`, stored sparsely by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QLaurent {
    coeffs: BTreeMap<i64, BigInt>,
}

impl QLaurent {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    /// The single term `c * q^k`.
    pub fn monomial(c: BigInt, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Self { coeffs }
    }

    /// The constant polynomial `n`.
    pub fn from_i64(n: i64) -> Self {
        Self::monomial(BigInt::from(n), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^k` (zero if absent).
    pub fn coeff(&self, k: i64) -> BigInt {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    /// Smallest exponent with nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest exponent with nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Iterate `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    fn insert(&mut self, k: i64, c: BigInt) {
        if c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    fn add_term(&mut self, k: i64, c: &BigInt) {
        let v = self.coeff(k) + c;
        self.insert(k, v);
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect();
        Self { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in self.terms() {
            for (kb, cb) in rhs.terms() {
                out.add_term(ka + kb, &(ca * cb));
            }
        }
        out
    }

    /// Multiply by the monomial `c * q^k` in place-free form.
    pub fn mul_monomial(&self, c: &BigInt, k: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, v)| (*e + k, v * c))
            .collect();
        Self { coeffs }
    }

    /// Exact division: returns `self / rhs` when the division leaves no
    /// remainder in `Z[q, q^-1]`, otherwise an error. Used to divide by unit
    /// determinants `±q^k` and in cocycle verification.
    pub fn div_exact(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Singular("division by zero Laurent polynomial".into()));
        }
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let (dk, dc) = {
            let k = rhs.max_exp().unwrap();
            (k, rhs.coeff(k))
        };
        while let Some(rk) = rem.max_exp() {
            let rc = rem.coeff(rk);
            let q = &rc / &dc;
            if !(&rc - &q * &dc).is_zero() {
                return Err(Error::Singular("inexact Laurent division".into()));
            }
            let term = Self::monomial(q, rk - dk);
            rem = rem.sub(&term.mul(rhs));
            quot = quot.add(&term);
            if quot.coeffs.len() > self.coeffs.len() + rhs.coeffs.len() + 64 {
                return Err(Error::Singular("inexact Laurent division".into()));
            }
        }
        Ok(quot)
    }

    /// Evaluate at the point `q`.
    pub fn eval<S: Scalar>(&self, q: &S) -> S {
        let one = BigInt::one();
        let mut acc = S::from_i64_prec(0, q.prec());
        for (k, c) in self.terms() {
            let coeff = S::from_ratio_prec(c, &one, q.prec());
            acc = acc + coeff * q.powi(k);
        }
        acc
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            let mag = c.abs();
            let sign = c.is_negative();
            if first {
                if sign {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || k == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if k != 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if k == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for QLaurent {
    /// Serializes as a list of `[exponent, coefficient-string]` pairs in
    /// increasing exponent order, e.g. `[[0, "1"], [1, "-8"]]`.
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for (k, c) in self.terms() {
            seq.serialize_element(&(k, c.to_string()))?;
        }
        seq.end()
    }
}

/// A dense matrix over `Z[q, q^-1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QLMatrix {
    pub n: usize,
    /// Row-major entries, `rows[i][j]`.
    pub rows: Vec<Vec<QLaurent>>,
}

impl QLMatrix {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { QLaurent::one() } else { QLaurent::zero() })
                    .collect()
            })
            .collect();
        Self { n, rows }
    }

    pub fn from_rows(rows: Vec<Vec<QLaurent>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, rows }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let mut acc = QLaurent::zero();
                        for k in 0..self.n {
                            acc = acc.add(&self.rows[i][k].mul(&rhs.rows[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { n: self.n, rows }
    }

    /// Determinant by Laplace expansion (matrices here are at most 4x4).
    pub fn det(&self) -> QLaurent {
        match self.n {
            0 => QLaurent::one(),
            1 => self.rows[0][0].clone(),
            _ => {
                let mut acc = QLaurent::zero();
                for j in 0..self.n {
                    if self.rows[0][j].is_zero() {
                        continue;
                    }
                    let minor = self.minor(0, j);
                    let term = self.rows[0][j].mul(&minor.det());
                    acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let rows: Vec<Vec<QLaurent>> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != row)
            .map(|(_, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        Self { n: self.n - 1, rows }
    }

    /// Exact inverse via the adjugate. Fails unless every adjugate entry is
    /// exactly divisible by the determinant (in particular, succeeds whenever
    /// `det = ±q^k`).
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::Singular("singular Laurent matrix".into()));
        }
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        // adj(A)_{ij} = (-1)^{i+j} det(minor_{ji})
                        let c = self.minor(j, i).det();
                        let c = if (i + j) % 2 == 0 { c } else { c.neg() };
                        c.div_exact(&det)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, rows })
    }

    /// Evaluate entrywise at the point `q`.
    pub fn eval<S: Scalar>(&self, q: &S) -> Vec<Vec<S>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.eval(q)).collect())
            .collect()
    }
}

impl fmt::Display for QLMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            write!(f, "[ ")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "{e}")?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ql(pairs: &[(i64, i64)]) -> QLaurent {
        let mut out = QLaurent::zero();
        for &(k, c) in pairs {
            out = out.add(&QLaurent::monomial(BigInt::from(c), k));
        }
        out
    }

    #[test]
    fn ring_arithmetic() {
        let a = ql(&[(-1, 2), (0, 1)]); // 2 q^-1 + 1
        let b = ql(&[(0, -1), (2, 3)]); // -1 + 3 q^2
        let prod = a.mul(&b);
        assert_eq!(prod, ql(&[(-1, -2), (0, -1), (1, 6), (2, 3)]));
        assert_eq!(a.sub(&a), QLaurent::zero());
        assert_eq!(a.add(&b).sub(&b), a);
    }

    #[test]
    fn display_formatting() {
        assert_eq!(ql(&[(0, 1), (1, -8), (2, -9)]).to_string(), "1 - 8*q - 9*q^2");
        assert_eq!(ql(&[(-1, 1)]).to_string(), "q^-1");
        assert_eq!(ql(&[(1, 1)]).to_string(), "q");
        assert_eq!(QLaurent::zero().to_string(), "0");
        assert_eq!(ql(&[(0, -3)]).to_string(), "-3");
    }

    #[test]
    fn exact_division() {
        let a = ql(&[(0, 1), (1, -1)]); // 1 - q
        let b = ql(&[(0, 1), (1, 1)]); // 1 + q
        let prod = a.mul(&b); // 1 - q^2
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!(a.div_exact(&b).is_err());
        // Unit division.
        let u = QLaurent::monomial(BigInt::from(-1), 3); // -q^3
        let x = ql(&[(2, 5), (4, -7)]);
        assert_eq!(x.div_exact(&u).unwrap(), ql(&[(-1, -5), (1, 7)]));
    }

    #[test]
    fn eval_matches_direct() {
        let p = ql(&[(-2, 3), (0, -1), (3, 2)]);
        let q = Complex64::new(0.3, 0.4);
        let direct = 3.0 * q.powi(-2) - 1.0 + 2.0 * q.powi(3);
        assert!((p.eval(&q) - direct).norm() < 1e-14);
    }

    #[test]
    fn matrix_inverse_unit_det() {
        // [[1, 0], [-9q, 1]] has det 1.
        let m = QLMatrix::from_rows(vec![
            vec![QLaurent::one(), QLaurent::zero()],
            vec![ql(&[(1, -9)]), QLaurent::one()],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QLMatrix::identity(2));
        assert_eq!(inv.rows[1][0], ql(&[(1, 9)]));
    }

    #[test]
    fn matrix_det_4x4() {
        // Triangular with unit diagonal times a q-shifted diagonal.
        let mut m = QLMatrix::identity(4);
        m.rows[0][2] = ql(&[(1, 5)]);
        m.rows[2][3] = ql(&[(0, -2), (2, 1)]);
        m.rows[1][1] = QLaurent::monomial(BigInt::from(-1), 3);
        assert_eq!(m.det(), QLaurent::monomial(BigInt::from(-1), 3));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QLMatrix::identity(4));
    }

    #[test]
    fn serialization_shape() {
        let p = ql(&[(0, 1), (1, -8)]);
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, r#"[[0,"1"],[1,"-8"]]"#);
    }
}
