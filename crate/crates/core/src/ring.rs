use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact coefficient ring for truncated series.
///
/// `Rationals` carries integer coefficients in practice: Magnus expansions of
/// words are integral, so no denominators ever appear.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Ring {
    Integers,
    ModPrimePower { ell: u64, m: u32 },
    Rationals,
}

impl Ring {
    pub fn mod_prime_power(ell: u64, m: u32) -> Result<Ring> {
        if !is_prime(ell) {
            return Err(Error::InvalidRing(format!("{ell} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidRing("exponent M must be at least 1".into()));
        }
        Ok(Ring::ModPrimePower { ell, m })
    }

    pub fn modulus(&self) -> Option<BigInt> {
        match self {
            Ring::ModPrimePower { ell, m } => Some(BigInt::from(*ell).pow(*m)),
            _ => None,
        }
    }

    /// Canonical representative: least non-negative residue for modular rings.
    pub fn reduce(&self, x: BigInt) -> BigInt {
        match self.modulus() {
            Some(q) => x.mod_floor(&q),
            None => x,
        }
    }

    pub fn is_zero(&self, x: &BigInt) -> bool {
        match self.modulus() {
            Some(q) => x.mod_floor(&q).is_zero(),
            None => x.is_zero(),
        }
    }

    pub fn is_one(&self, x: &BigInt) -> bool {
        self.reduce(x.clone()).is_one()
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::ModPrimePower { ell, m } => write!(f, "Z/{ell}^{m}"),
            Ring::Rationals => write!(f, "Q"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `binom(c, j) = c(c-1)…(c-j+1)/j!` for any integer `c`.
pub fn binomial(c: &BigInt, j: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..j {
        num *= c - BigInt::from(t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

/// ℓ-adic valuation of `k!`.
pub fn factorial_valuation(ell: u64, k: usize) -> u32 {
    let mut v = 0u32;
    let mut q = ell as u128;
    while q <= k as u128 {
        v += (k as u128 / q) as u32;
        q *= ell as u128;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_construction() {
        assert!(Ring::mod_prime_power(4, 2).is_err());
        assert!(Ring::mod_prime_power(3, 0).is_err());
        let r = Ring::mod_prime_power(3, 2).unwrap();
        assert_eq!(r.modulus(), Some(BigInt::from(9)));
        assert_eq!(r.reduce(BigInt::from(-1)), BigInt::from(8));
        assert_eq!(r.to_string(), "Z/3^2");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(&BigInt::from(10), 3), BigInt::from(120));
        assert_eq!(binomial(&BigInt::from(-1), 5), BigInt::from(-1));
        assert_eq!(binomial(&BigInt::from(-2), 2), BigInt::from(3));
        assert_eq!(binomial(&BigInt::from(2), 3), BigInt::from(0));
    }

    #[test]
    fn factorial_valuations() {
        assert_eq!(factorial_valuation(3, 8), 2);
        assert_eq!(factorial_valuation(2, 8), 7);
        assert_eq!(factorial_valuation(5, 4), 0);
    }
}
