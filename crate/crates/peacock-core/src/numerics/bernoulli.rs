//! Exact Bernoulli numbers and Eulerian numbers.
//!
//! Both sequences are computed over exact arithmetic and memoized for the
//! lifetime of the process:
//!
//! * Bernoulli numbers `B_n` (convention `B_1 = -1/2`) from the recurrence
//!   `sum_{k=0}^{n} C(n+1, k) B_k = 0` for `n >= 1`, as rationals.
//! * Eulerian numbers `<n, k>` from the triangle recurrence
//!   `<n, k> = (k+1) <n-1, k> + (n-k) <n-1, k-1>`, as big integers.
//!
//! The Bernoulli numbers feed the Debye series for the dilogarithm and the
//! `tau`-expansion coefficients of the quantum dilogarithm; the Eulerian
//! numbers give the closed rational form of `Li_{-n}`.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

static BERNOULLI_CACHE: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());
static EULERIAN_CACHE: Mutex<Vec<Vec<BigInt>>> = Mutex::new(Vec::new());

/// The Bernoulli number `B_n` with the convention `B_1 = -1/2`.
///
/// Values are produced by the defining recurrence
/// `B_n = -1/(n+1) * sum_{k=0}^{n-1} C(n+1, k) B_k` and cached, so repeated
/// queries are cheap and every returned value is exact.
pub fn bernoulli(n: usize) -> BigRational {
    let mut cache = BERNOULLI_CACHE.lock().expect("bernoulli cache poisoned");
    while cache.len() <= n {
        let m = cache.len();
        if m == 0 {
            cache.push(BigRational::one());
            continue;
        }
        // binom accumulates C(m+1, k) incrementally across the sum.
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (k, b) in cache.iter().enumerate() {
            acc += BigRational::from(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        cache.push(-acc / BigRational::from(BigInt::from(m + 1)));
    }
    cache[n].clone()
}

/// The Eulerian number `<n, k>`: the number of permutations of `n` elements
/// with exactly `k` descents. Returns zero outside the triangle `0 <= k < n`
/// (with the convention `<0, 0> = 1`).
pub fn eulerian(n: usize, k: usize) -> BigInt {
    if n == 0 {
        return if k == 0 { BigInt::one() } else { BigInt::zero() };
    }
    if k >= n {
        return BigInt::zero();
    }
    let mut cache = EULERIAN_CACHE.lock().expect("eulerian cache poisoned");
    if cache.is_empty() {
        cache.push(vec![BigInt::one()]);
    }
    while cache.len() <= n {
        let m = cache.len();
        let prev = &cache[m - 1];
        let at = |j: isize| -> BigInt {
            if j < 0 || j as usize >= prev.len() {
                BigInt::zero()
            } else {
                prev[j as usize].clone()
            }
        };
        let row: Vec<BigInt> = (0..m)
            .map(|j| {
                BigInt::from(j + 1) * at(j as isize) + BigInt::from(m - j) * at(j as isize - 1)
            })
            .collect();
        cache.push(row);
    }
    cache[n][k].clone()
}

/// The binomial coefficient `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}
