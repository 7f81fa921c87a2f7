//! Truncated Magnus expansion `x_i ↦ 1 + X_i` and Magnus coefficients.
//!
//! Series are stored as dense degree blocks: block `d` holds the `n^d`
//! coefficients of words of length `d`, indexed in base `n` with the first
//! letter most significant. The sparse `(index, coeff)` view is used only for
//! serialization.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{binomial, factorial_valuation, Ring};
use crate::words::Word;

/// Multi-index `(i_1 … i_k)` with 1-based entries.
pub type MultiIndex = Vec<usize>;

/// Largest number of stored coefficients per series.
pub const MAX_COEFFS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusSeries {
    n: usize,
    degree: usize,
    ring: Ring,
    blocks: Vec<Vec<BigInt>>,
}

/// Lower-central-series depth, or a lower bound when the truncation runs out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Exact(usize),
    AtLeast(usize),
}

impl Depth {
    /// `true` when the element is known to lie in `Γ_k`.
    pub fn at_least(&self, k: usize) -> bool {
        match *self {
            Depth::Exact(d) => d >= k,
            Depth::AtLeast(b) => k <= b,
        }
    }

    pub fn min(self, other: Depth) -> Depth {
        use Depth::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (Exact(a), AtLeast(b)) | (AtLeast(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    AtLeast(b)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Exact(d) => write!(f, "{d}"),
            Depth::AtLeast(b) => write!(f, "≥ {b}"),
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Exact(d) => s.serialize_u64(*d as u64),
            Depth::AtLeast(_) => s.serialize_str(&self.to_string()),
        }
    }
}

fn check_size(n: usize, degree: usize) -> Result<()> {
    let mut total: usize = 0;
    let mut block: usize = 1;
    for _ in 0..=degree {
        total = total.saturating_add(block);
        if total > MAX_COEFFS {
            return Err(Error::SeriesTooLarge(total));
        }
        block = block.saturating_mul(n);
    }
    Ok(())
}

/// Position of a multi-index inside its degree block.
pub fn flat_index(n: usize, index: &[usize]) -> usize {
    index.iter().fold(0, |acc, &i| acc * n + (i - 1))
}

/// Inverse of [`flat_index`].
pub fn unflatten(n: usize, d: usize, mut pos: usize) -> MultiIndex {
    let mut out = vec![0; d];
    for slot in out.iter_mut().rev() {
        *slot = pos % n + 1;
        pos /= n;
    }
    out
}

impl MagnusSeries {
    pub fn zero(n: usize, degree: usize, ring: Ring) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if degree == 0 {
            return Err(Error::Precondition(
                "truncation degree K must be at least 1".into(),
            ));
        }
        check_size(n, degree)?;
        let blocks = (0..=degree)
            .map(|d| vec![BigInt::zero(); n.pow(d as u32)])
            .collect();
        Ok(MagnusSeries {
            n,
            degree,
            ring,
            blocks,
        })
    }

    pub fn one(n: usize, degree: usize, ring: Ring) -> Result<Self> {
        let mut s = Self::zero(n, degree, ring)?;
        s.blocks[0][0] = BigInt::one();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Coefficients of all words of length `d`.
    pub fn block(&self, d: usize) -> &[BigInt] {
        &self.blocks[d]
    }

    pub fn coeff(&self, index: &[usize]) -> Result<BigInt> {
        if index.len() > self.degree {
            return Err(Error::IndexTooLong {
                len: index.len(),
                degree: self.degree,
            });
        }
        for &i in index {
            if i == 0 || i > self.n {
                return Err(Error::GeneratorOutOfRange {
                    index: i,
                    n: self.n,
                });
            }
        }
        Ok(self.blocks[index.len()][flat_index(self.n, index)].clone())
    }

    pub fn set_coeff(&mut self, index: &[usize], value: BigInt) -> Result<()> {
        self.coeff(index)?;
        self.blocks[index.len()][flat_index(self.n, index)] = self.ring.reduce(value);
        Ok(())
    }

    /// Nonzero terms in degree-then-lex order.
    pub fn terms(&self) -> Vec<(MultiIndex, BigInt)> {
        let mut out = Vec::new();
        for (d, block) in self.blocks.iter().enumerate() {
            for (pos, c) in block.iter().enumerate() {
                if !c.is_zero() {
                    out.push((unflatten(self.n, d, pos), c.clone()));
                }
            }
        }
        out
    }

    fn same_shape(&self, other: &MagnusSeries) -> Result<()> {
        if self.n != other.n || self.degree != other.degree || self.ring != other.ring {
            return Err(Error::SeriesMismatch(format!(
                "(n={}, K={}, {}) vs (n={}, K={}, {})",
                self.n, self.degree, self.ring, other.n, other.degree, other.ring
            )));
        }
        Ok(())
    }

    fn normalize(&mut self) {
        if self.ring.modulus().is_some() {
            for block in &mut self.blocks {
                for c in block.iter_mut() {
                    *c = self.ring.reduce(std::mem::take(c));
                }
            }
        }
    }

    /// Truncated noncommutative product.
    pub fn multiply(&self, other: &MagnusSeries) -> Result<MagnusSeries> {
        self.same_shape(other)?;
        let n = self.n;
        let mut out = MagnusSeries::zero(n, self.degree, self.ring.clone())?;
        for d in 0..=self.degree {
            let target = &mut out.blocks[d];
            for da in 0..=d {
                let db = d - da;
                let a = &self.blocks[da];
                let b = &other.blocks[db];
                let stride = n.pow(db as u32);
                for (pa, ca) in a.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    let base = pa * stride;
                    for (pb, cb) in b.iter().enumerate() {
                        if !cb.is_zero() {
                            target[base + pb] += ca * cb;
                        }
                    }
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn add(&self, other: &MagnusSeries) -> Result<MagnusSeries> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (bo, bb) in out.blocks.iter_mut().zip(&other.blocks) {
            for (x, y) in bo.iter_mut().zip(bb) {
                *x += y;
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> MagnusSeries {
        let mut out = self.clone();
        for block in &mut out.blocks {
            for x in block.iter_mut() {
                *x *= c;
            }
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &MagnusSeries) -> Result<MagnusSeries> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    /// The series with its constant term removed.
    pub fn augmentation_part(&self) -> MagnusSeries {
        let mut u = self.clone();
        u.blocks[0][0] = BigInt::zero();
        u
    }

    /// `s^e` for a series with constant term 1, via `Σ_j binom(e,j) u^j`.
    pub fn pow(&self, e: &BigInt) -> Result<MagnusSeries> {
        if !self.ring.is_one(&self.blocks[0][0]) {
            return Err(Error::NotInvertible(self.blocks[0][0].to_string()));
        }
        let u = self.augmentation_part();
        let mut out = MagnusSeries::one(self.n, self.degree, self.ring.clone())?;
        let mut upow = MagnusSeries::one(self.n, self.degree, self.ring.clone())?;
        for j in 1..=self.degree {
            upow = upow.multiply(&u)?;
            let c = binomial(e, j);
            if !c.is_zero() {
                out = out.add(&upow.scale(&c))?;
            }
        }
        Ok(out)
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self) -> Result<MagnusSeries> {
        self.pow(&BigInt::from(-1))
    }

    /// Smallest `d ≥ 1` carrying a nonzero coefficient.
    pub fn depth(&self) -> Depth {
        for d in 1..=self.degree {
            if self.blocks[d].iter().any(|c| !self.ring.is_zero(c)) {
                return Depth::Exact(d);
            }
        }
        Depth::AtLeast(self.degree + 1)
    }

    /// `self · x_i^c`, with `c` taken as an exact integer (the caller is
    /// responsible for the guard precision of an ℓ-adic residue).
    pub fn mul_generator_power(&self, i: usize, c: &BigInt) -> Result<MagnusSeries> {
        if i == 0 || i > self.n {
            return Err(Error::GeneratorOutOfRange {
                index: i,
                n: self.n,
            });
        }
        let coeffs: Vec<BigInt> = (0..=self.degree)
            .map(|j| self.ring.reduce(binomial(c, j)))
            .collect();
        Ok(self.mul_single_variable(i, &coeffs))
    }

    /// Multiply on the right by the polynomial `Σ_j c_j X_i^j`.
    fn mul_single_variable(&self, i: usize, coeffs: &[BigInt]) -> MagnusSeries {
        let n = self.n;
        let mut out = self.clone();
        for block in out.blocks.iter_mut() {
            for x in block.iter_mut() {
                *x *= &coeffs[0];
            }
        }
        for d in 1..=self.degree {
            let mut rep = 0usize;
            let mut stride = 1usize;
            for (j, cj) in coeffs.iter().enumerate().take(d + 1).skip(1) {
                rep = rep * n + (i - 1);
                stride *= n;
                if cj.is_zero() {
                    continue;
                }
                let src = &self.blocks[d - j];
                let target = &mut out.blocks[d];
                for (p, c) in src.iter().enumerate() {
                    if !c.is_zero() {
                        target[p * stride + rep] += c * cj;
                    }
                }
            }
        }
        out.normalize();
        out
    }

    /// Substitute `X_j ↦ images[j] - 1` (images must have constant term 1).
    pub fn substitute(&self, images: &[MagnusSeries]) -> Result<MagnusSeries> {
        if images.len() != self.n {
            return Err(Error::RankMismatch(self.n, images.len()));
        }
        for img in images {
            self.same_shape(img)?;
        }
        let us: Vec<MagnusSeries> = images.iter().map(|s| s.augmentation_part()).collect();
        // Horner over the first letter: s = c_∅ + Σ_i X_i · s_i.
        self.substitute_from(&us, &[])
    }

    fn substitute_from(&self, us: &[MagnusSeries], prefix: &[usize]) -> Result<MagnusSeries> {
        let mut out = MagnusSeries::zero(self.n, self.degree, self.ring.clone())?;
        out.blocks[0][0] = self.blocks[prefix.len()][flat_index(self.n, prefix)].clone();
        if prefix.len() == self.degree {
            return Ok(out);
        }
        let mut next = prefix.to_vec();
        next.push(0);
        for i in 1..=self.n {
            *next.last_mut().unwrap() = i;
            if !self.subtree_nonzero(&next) {
                continue;
            }
            let tail = self.substitute_from(us, &next)?;
            out = out.add(&us[i - 1].multiply(&tail)?)?;
        }
        Ok(out)
    }

    fn subtree_nonzero(&self, prefix: &[usize]) -> bool {
        let base = flat_index(self.n, prefix);
        let mut width = 1usize;
        for d in prefix.len()..=self.degree {
            let start = base * width;
            if self.blocks[d][start..start + width]
                .iter()
                .any(|c| !c.is_zero())
            {
                return true;
            }
            width *= self.n;
        }
        false
    }

    /// Sparse JSON encoding `{n, K, ring, terms}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "K": self.degree,
            "ring": self.ring.to_string(),
            "terms": self.terms().into_iter().map(|(i, c)| serde_json::json!({
                "index": i,
                "coeff": c.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn check_ring_for_words(ring: &Ring) -> Result<()> {
    if let Ring::ModPrimePower { ell, m } = ring {
        Ring::mod_prime_power(*ell, *m)?;
    }
    Ok(())
}

/// Magnus expansion of a word, truncated at degree `degree`.
pub fn expand(w: &Word, degree: usize, ring: &Ring) -> Result<MagnusSeries> {
    check_ring_for_words(ring)?;
    let mut out = MagnusSeries::one(w.n(), degree, ring.clone())?;
    for s in w.syllables() {
        let coeffs: Vec<BigInt> = (0..=degree)
            .map(|j| ring.reduce(binomial(&s.exponent, j)))
            .collect();
        out = out.mul_single_variable(s.generator, &coeffs);
    }
    Ok(out)
}

/// Expansion of `x_i^c` for an ℓ-adic exponent `c` given modulo `ℓ^guard`.
///
/// `binom(c, j) mod ℓ^M` only depends on `c mod ℓ^(M + v_ℓ(j!))`, so the
/// residue must carry at least `v_ℓ(K!)` extra digits.
pub fn power_expand(
    n: usize,
    i: usize,
    c: &BigInt,
    guard: u32,
    degree: usize,
    ring: &Ring,
) -> Result<MagnusSeries> {
    if i == 0 || i > n {
        return Err(Error::GeneratorOutOfRange { index: i, n });
    }
    if let Ring::ModPrimePower { ell, m } = ring {
        let needed = m + factorial_valuation(*ell, degree);
        if guard < needed {
            return Err(Error::InsufficientGuard {
                needed: format!("{ell}^{needed}"),
                given: format!("{ell}^{guard}"),
            });
        }
    }
    let coeffs: Vec<BigInt> = (0..=degree).map(|j| ring.reduce(binomial(c, j))).collect();
    let one = MagnusSeries::one(n, degree, ring.clone())?;
    Ok(one.mul_single_variable(i, &coeffs))
}

/// `μ(I; w)` without building the full series.
///
/// Dynamic programme over syllables: after processing a prefix of `w`,
/// `v[t]` is the coefficient of `I[..t]` in its expansion.
pub fn coefficient(w: &Word, index: &[usize], degree: usize, ring: &Ring) -> Result<BigInt> {
    if index.len() > degree {
        return Err(Error::IndexTooLong {
            len: index.len(),
            degree,
        });
    }
    for &i in index {
        if i == 0 || i > w.n() {
            return Err(Error::GeneratorOutOfRange { index: i, n: w.n() });
        }
    }
    let k = index.len();
    let mut v = vec![BigInt::zero(); k + 1];
    v[0] = BigInt::one();
    let mut binoms: Vec<BigInt> = Vec::with_capacity(k + 1);
    for s in w.syllables() {
        binoms.clear();
        binoms.extend((0..=k).map(|j| binomial(&s.exponent, j)));
        // iterate t downward so v[s] for s < t is still the old value
        for t in (1..=k).rev() {
            let mut acc = BigInt::zero();
            let mut j = 1;
            while j <= t && index[t - j] == s.generator {
                if !v[t - j].is_zero() {
                    acc += &v[t - j] * &binoms[j];
                }
                j += 1;
            }
            if !acc.is_zero() {
                v[t] += acc;
                if ring.modulus().is_some() {
                    v[t] = ring.reduce(std::mem::take(&mut v[t]));
                }
            }
        }
    }
    Ok(ring.reduce(v.pop().unwrap()))
}

/// Largest `k ≤ K` with all `μ(I; w) = 0` for `|I| < k`, read off the
/// first nonzero degree.
pub fn lcs_depth(w: &Word, degree: usize, ring: &Ring) -> Result<Depth> {
    if w.is_identity() {
        return Ok(Depth::AtLeast(degree + 1));
    }
    Ok(expand(w, degree, ring)?.depth())
}

/// Sum of absolute values, handy for quick sanity bounds in tests.
pub fn l1_norm(s: &MagnusSeries) -> BigInt {
    s.blocks.iter().flatten().map(|c| c.abs()).sum()
}
