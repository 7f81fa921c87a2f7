//! Truncated integer power series and the generating-function identities for
//! the Witt numbers `N_k(n)` and `D_k(n) = nN_k - N_{k+1}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::lyndon::{d_rank, witt_rank};
use crate::ring::binomial;

/// `Σ_{j ≤ N} c_j z^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    pub coeffs: Vec<BigInt>,
}

impl PowerSeries {
    pub fn one(degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[0] = BigInt::one();
        PowerSeries { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn multiply(&self, other: &PowerSeries) -> PowerSeries {
        let d = self.degree().min(other.degree());
        let mut coeffs = vec![BigInt::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(d + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        PowerSeries { coeffs }
    }

    /// `(1 - c z^k)^e` for any integer `e`, via `Σ_j binom(e, j) (-c)^j z^{kj}`.
    pub fn binomial_power(degree: usize, c: &BigInt, k: usize, e: &BigInt) -> PowerSeries {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        let mut cpow = BigInt::one();
        for j in 0..=degree / k {
            coeffs[j * k] = binomial(e, j) * &cpow;
            cpow *= -c;
        }
        PowerSeries { coeffs }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub degree: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub n: u64,
    pub degree: usize,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
}

fn compare(identity: &str, n: u64, lhs: &PowerSeries, rhs: &PowerSeries) -> IdentityReport {
    let first_mismatch = lhs
        .coeffs
        .iter()
        .zip(&rhs.coeffs)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(degree, (a, b))| Mismatch {
            degree,
            lhs: a.to_string(),
            rhs: b.to_string(),
        });
    IdentityReport {
        identity: identity.into(),
        n,
        degree: lhs.degree(),
        pass: first_mismatch.is_none(),
        first_mismatch,
    }
}

/// `Π_k (1 - z^k)^{-a_k}` truncated at `degree`.
fn euler_product(degree: usize, exponent: impl Fn(u64) -> BigInt) -> PowerSeries {
    let one = BigInt::one();
    (1..=degree).fold(PowerSeries::one(degree), |acc, k| {
        acc.multiply(&PowerSeries::binomial_power(
            degree,
            &one,
            k,
            &-exponent(k as u64),
        ))
    })
}

/// `Π_k (1 - z^k)^{-N_k(n)} = 1/(1 - nz)`.
pub fn cyclotomic_identity(n: u64, degree: usize) -> IdentityReport {
    let lhs = euler_product(degree, |k| witt_rank(n, k));
    let rhs = PowerSeries::binomial_power(degree, &BigInt::from(n), 1, &BigInt::from(-1));
    compare("cyclotomic", n, &lhs, &rhs)
}

/// `Π_k (1 - z^k)^{-D_k(n)} = (1 - z)^n / (1 - nz)^{n-1}`.
pub fn dk_identity(n: u64, degree: usize) -> IdentityReport {
    let lhs = euler_product(degree, |k| d_rank(n, k));
    let one = BigInt::one();
    let rhs = PowerSeries::binomial_power(degree, &one, 1, &BigInt::from(n)).multiply(
        &PowerSeries::binomial_power(degree, &BigInt::from(n), 1, &BigInt::from(1 - n as i64)),
    );
    compare("dk-genfun", n, &lhs, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_holds() {
        for n in 1..=5 {
            assert!(cyclotomic_identity(n, 12).pass);
        }
    }

    #[test]
    fn dk_product_differs_already_at_degree_one() {
        // z-coefficient: D_1 = n(n+1)/2 on the left, -n + n(n-1) on the right
        for n in 2..=4u64 {
            let r = dk_identity(n, 12);
            let m = r
                .first_mismatch
                .expect("stated product formula does not hold");
            assert_eq!(m.degree, 1);
            assert_eq!(m.lhs, (n * (n + 1) / 2).to_string());
            assert_eq!(m.rhs, (n * n - 2 * n).to_string());
        }
    }

    #[test]
    fn geometric_series() {
        let s = PowerSeries::binomial_power(5, &BigInt::from(3), 1, &BigInt::from(-1));
        let expect: Vec<BigInt> = [1, 3, 9, 27, 81, 243]
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        assert_eq!(s.coeffs, expect);
    }

    #[test]
    fn mismatch_is_reported() {
        let a = PowerSeries::one(3);
        let mut b = PowerSeries::one(3);
        b.coeffs[2] = BigInt::from(7);
        let r = compare("x", 1, &a, &b);
        assert!(!r.pass);
        assert_eq!(r.first_mismatch.unwrap().degree, 2);
    }
}
