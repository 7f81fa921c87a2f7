//! Lyndon words, standard factorization, Witt ranks and collection normal
//! forms in `F_n / Γ_k`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lie;
use crate::magnus::{expand, MagnusSeries, MultiIndex};
use crate::ring::Ring;
use crate::words::Word;

/// A Lyndon word. Ordered weight-major, then lexicographically — the total
/// order used for normal forms, Koszul bases and `c(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LyndonWord(Vec<usize>);

impl LyndonWord {
    pub fn new(index: Vec<usize>) -> Result<Self> {
        if !is_lyndon(&index) {
            return Err(Error::NotLyndon(format_index(&index)));
        }
        Ok(LyndonWord(index))
    }

    pub fn letter(i: usize) -> Self {
        LyndonWord(vec![i])
    }

    pub fn index(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_index(s)?)
    }
}

impl Ord for LyndonWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LyndonWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_index(&self.0))
    }
}

impl Serialize for LyndonWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `"112"` for small alphabets, `"1,10,2"` once an entry exceeds 9.
pub fn format_index(index: &[usize]) -> String {
    if index.iter().all(|&i| i < 10) {
        index.iter().map(|i| i.to_string()).collect()
    } else {
        index
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn parse_index(s: &str) -> Result<MultiIndex> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let bad = || Error::Invalid(format!("bad multi-index '{s}'"));
    if s.contains(',') {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
            .collect()
    }
}

/// Strictly smaller than each proper end.
pub fn is_lyndon(index: &[usize]) -> bool {
    !index.is_empty() && (1..index.len()).all(|m| index < &index[m..])
}

/// All Lyndon words of length `k` over `{1..n}`, lex-sorted (Duval's
/// generation algorithm).
pub fn enumerate_lyndon(n: usize, k: usize) -> Vec<LyndonWord> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![1];
    loop {
        if w.len() == k {
            out.push(LyndonWord(w.clone()));
        }
        // extend periodically to length k, then increment the last letter
        let m = w.len();
        while w.len() < k {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&n) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// `I = (I_1, I_2)` with `I_2` the longest proper Lyndon end.
pub fn standard_factorization(word: &LyndonWord) -> Result<(LyndonWord, LyndonWord)> {
    let idx = &word.0;
    if idx.len() < 2 {
        return Err(Error::NoFactorization(word.to_string()));
    }
    for m in 1..idx.len() {
        if is_lyndon(&idx[m..]) {
            return Ok((LyndonWord(idx[..m].to_vec()), LyndonWord(idx[m..].to_vec())));
        }
    }
    unreachable!("a single letter is always a Lyndon end")
}

pub fn mobius(mut d: u64) -> i64 {
    let mut result = 1i64;
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p) {
            d /= p;
            if d.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if d > 1 {
        result = -result;
    }
    result
}

/// `N_k(n) = (1/k) Σ_{d|k} μ(d) n^{k/d}`.
pub fn witt_rank(n: u64, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::zero();
    }
    let base = BigInt::from(n);
    let mut sum = BigInt::zero();
    for d in 1..=k {
        if k.is_multiple_of(d) {
            let m = mobius(d);
            if m != 0 {
                sum += BigInt::from(m) * base.clone().pow((k / d) as u32);
            }
        }
    }
    sum.div_floor(&BigInt::from(k))
}

/// `D_k(n) = n N_k(n) - N_{k+1}(n)`.
pub fn d_rank(n: u64, k: u64) -> BigInt {
    BigInt::from(n) * witt_rank(n, k) - witt_rank(n, k + 1)
}

/// Group word realizing `e(I)`: nested commutators along the standard
/// bracketing.
pub fn lyndon_group_word(word: &LyndonWord, n: usize) -> Result<Word> {
    if word.weight() == 1 {
        return Word::generator(n, word.0[0]);
    }
    let (a, b) = standard_factorization(word)?;
    lyndon_group_word(&a, n)?.commutator(&lyndon_group_word(&b, n)?)
}

/// `Π e(I)^{a_I}` over basis elements of weight `< k`, in basis order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub n: usize,
    pub k: usize,
    pub ring: Ring,
    pub factors: Vec<(LyndonWord, BigInt)>,
}

impl NormalForm {
    /// Multiply the factors out as a word (exponents taken as integers).
    pub fn to_word(&self) -> Result<Word> {
        let mut w = Word::identity(self.n)?;
        for (b, a) in &self.factors {
            w.append(&power_word(&lyndon_group_word(b, self.n)?, a)?)?;
        }
        Ok(w)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "ring": self.ring.to_string(),
            "factors": self.factors.iter().map(|(b, a)| serde_json::json!({
                "basis": b.to_string(),
                "exponent": a.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `w^a` for an integer exponent; single-letter words stay compact.
pub fn power_word(w: &Word, a: &BigInt) -> Result<Word> {
    if let [s] = w.syllables() {
        return Word::power_of_generator(w.n(), s.generator, &s.exponent * a);
    }
    let small = a
        .to_i64()
        .ok_or_else(|| Error::Invalid(format!("exponent {a} too large for a composite word")))?;
    Ok(w.pow(small))
}

/// Symmetric representative in `(-q/2, q/2]`, keeping word powers short.
fn symmetric(x: BigInt, q: &BigInt) -> BigInt {
    let r = x.mod_floor(q);
    if &r * 2 > *q {
        r - q
    } else {
        r
    }
}

/// Collection normal form of a group-like series modulo degree `k`.
///
/// Strips one degree at a time: the degree-`j` part of the residual is a Lie
/// element, decomposed in the Lyndon basis, and the residual is divided on the
/// left by the corresponding product of basis words.
pub fn normal_form_of_series(series: &MagnusSeries, k: usize) -> Result<NormalForm> {
    let mut factors = strip_factors(series, k)?;
    let ring = series.ring().clone();
    if let Some(q) = ring.modulus() {
        for (_, a) in factors.iter_mut() {
            *a = a.mod_floor(&q);
        }
    }
    Ok(NormalForm {
        n: series.n(),
        k,
        ring,
        factors,
    })
}

/// A word whose expansion agrees with `series` through degree `k - 1`.
///
/// Unlike the normal form, exponents keep their symmetric representatives:
/// over `Z/ℓ^M` the expansion of `x^a` depends on more than `a mod ℓ^M`.
pub fn realize_series(series: &MagnusSeries, k: usize) -> Result<Word> {
    let mut w = Word::identity(series.n())?;
    for (b, a) in strip_factors(series, k)? {
        w.append(&power_word(&lyndon_group_word(&b, series.n())?, &a)?)?;
    }
    Ok(w)
}

fn strip_factors(series: &MagnusSeries, k: usize) -> Result<Vec<(LyndonWord, BigInt)>> {
    let n = series.n();
    let ring = series.ring().clone();
    if k < 2 {
        return Err(Error::Precondition("normal form needs k ≥ 2".into()));
    }
    if series.degree() < k - 1 {
        return Err(Error::Precondition(format!(
            "series truncated at {} but k-1 = {}",
            series.degree(),
            k - 1
        )));
    }
    let q = ring.modulus();
    let mut residual = series.clone();
    let mut factors = Vec::new();
    for j in 1..k {
        let t = lie::TensorElement::from_block(n, j, residual.block(j));
        let coeffs = lie::decompose_integral(&t, j, q.as_ref())?;
        let mut step = MagnusSeries::one(n, series.degree(), ring.clone())?;
        for (b, a) in coeffs {
            let a = match &q {
                Some(q) => symmetric(a, q),
                None => a,
            };
            if a.is_zero() {
                continue;
            }
            let bw = lyndon_group_word(&b, n)?;
            step = step.multiply(&expand(&bw, series.degree(), &ring)?.pow(&a)?)?;
            factors.push((b, a));
        }
        residual = step.inverse()?.multiply(&residual)?;
    }
    Ok(factors)
}

/// Normal form of `w` in `F_n/Γ_k` over the integers or `Z/ℓ^M`.
pub fn normal_form(w: &Word, k: usize, ring: &Ring) -> Result<NormalForm> {
    if matches!(ring, Ring::Rationals) {
        return Err(Error::InvalidRing(
            "normal forms are defined over Z or Z/ℓ^M".into(),
        ));
    }
    if k < 2 {
        return Err(Error::Precondition("normal form needs k ≥ 2".into()));
    }
    let s = expand(w, k - 1, ring)?;
    normal_form_of_series(&s, k)
}

/// Normal form of `c(a, b) = b⁻¹ a⁻¹ b a` for basis elements `a < b`.
pub fn commutator_word(a: &LyndonWord, b: &LyndonWord, n: usize, k: usize) -> Result<NormalForm> {
    if a >= b {
        return Err(Error::OrderViolation(a.to_string(), b.to_string()));
    }
    if a.weight() >= k || b.weight() >= k {
        return Err(Error::Precondition(format!(
            "basis elements must have weight < {k}"
        )));
    }
    let wa = lyndon_group_word(a, n)?;
    let wb = lyndon_group_word(b, n)?;
    let c = wb
        .invert()
        .multiply(&wa.invert())?
        .multiply(&wb)?
        .multiply(&wa)?;
    normal_form(&c, k, &Ring::Integers)
}

/// Sanity helper: all exponents nonnegative and below the modulus.
pub fn exponents_reduced(nf: &NormalForm) -> bool {
    match nf.ring.modulus() {
        Some(q) => nf.factors.iter().all(|(_, a)| !a.is_negative() && a < &q),
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnus::lcs_depth;

    fn lw(s: &str) -> LyndonWord {
        LyndonWord::parse(s).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_lyndon(2, 1), vec![lw("1"), lw("2")]);
        assert_eq!(enumerate_lyndon(2, 3), vec![lw("112"), lw("122")]);
        assert!(is_lyndon(&[1, 2, 2]));
        assert!(is_lyndon(&[1, 1, 2, 2]));
        assert!(!is_lyndon(&[1, 2, 1]));
        assert!(!is_lyndon(&[1, 3, 1, 2]));
    }

    #[test]
    fn enumeration_matches_brute_force_and_witt() {
        for n in 1..=4usize {
            for k in 1..=6usize {
                let got = enumerate_lyndon(n, k);
                let mut brute = Vec::new();
                for pos in 0..n.pow(k as u32) {
                    let idx = crate::magnus::unflatten(n, k, pos);
                    if is_lyndon(&idx) {
                        brute.push(LyndonWord(idx));
                    }
                }
                assert_eq!(got, brute, "n={n} k={k}");
                assert_eq!(BigInt::from(got.len()), witt_rank(n as u64, k as u64));
            }
        }
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(
            standard_factorization(&lw("122")).unwrap(),
            (lw("12"), lw("2"))
        );
        assert_eq!(
            standard_factorization(&lw("1112")).unwrap(),
            (lw("1"), lw("112"))
        );
        assert_eq!(
            standard_factorization(&lw("12")).unwrap(),
            (lw("1"), lw("2"))
        );
        assert!(matches!(
            standard_factorization(&lw("1")),
            Err(Error::NoFactorization(_))
        ));
        assert_eq!(
            standard_factorization(&lw("1122")).unwrap(),
            (lw("1"), lw("122"))
        );
    }

    #[test]
    fn witt_and_d_examples() {
        assert_eq!(witt_rank(2, 2), BigInt::from(1));
        assert_eq!(witt_rank(2, 5), BigInt::from(6));
        assert_eq!(witt_rank(3, 3), BigInt::from(8));
        assert_eq!(witt_rank(9, 9), BigInt::from(43046640));
        assert_eq!(witt_rank(7, 1), BigInt::from(7));
        assert_eq!(d_rank(2, 3), BigInt::from(1));
        assert_eq!(d_rank(2, 5), BigInt::from(3));
        assert_eq!(d_rank(4, 2), BigInt::from(4));
        assert_eq!(d_rank(2, 4), BigInt::from(0));
        assert_eq!(d_rank(2, 1), BigInt::from(3));
    }

    #[test]
    fn normal_form_examples() {
        let z = Ring::Integers;
        let w = Word::parse("x2 x1", 2).unwrap();
        let nf = normal_form(&w, 3, &z).unwrap();
        assert_eq!(
            nf.factors,
            vec![
                (lw("1"), BigInt::from(1)),
                (lw("2"), BigInt::from(1)),
                (lw("12"), BigInt::from(-1))
            ]
        );
        let resid = nf.to_word().unwrap().invert().multiply(&w).unwrap();
        assert!(lcs_depth(&resid, 4, &z).unwrap().at_least(3));

        assert!(normal_form(&Word::identity(2).unwrap(), 3, &z)
            .unwrap()
            .factors
            .is_empty());
        let c = Word::parse("[x1,x2]", 2).unwrap();
        assert_eq!(
            normal_form(&c, 3, &z).unwrap().factors,
            vec![(lw("12"), BigInt::from(1))]
        );
    }

    #[test]
    fn normal_form_mod_prime_power() {
        let r = Ring::mod_prime_power(3, 2).unwrap();
        let w = Word::parse("x1^-1 x2^10", 2).unwrap();
        let nf = normal_form(&w, 3, &r).unwrap();
        assert!(exponents_reduced(&nf));
        assert_eq!(nf.factors[0], (lw("1"), BigInt::from(8)));
        assert_eq!(nf.factors[1], (lw("2"), BigInt::from(1)));
    }

    #[test]
    fn commutator_word_examples() {
        let nf = commutator_word(&lw("1"), &lw("2"), 2, 3).unwrap();
        // x2⁻¹x1⁻¹x2x1 ≡ [x1,x2]⁻¹ modulo Γ_3
        assert_eq!(nf.factors, vec![(lw("12"), BigInt::from(-1))]);
        let nf = commutator_word(&lw("1"), &lw("12"), 2, 4).unwrap();
        assert!(!nf.factors.is_empty());
        assert!(nf.factors.iter().all(|(b, _)| b.weight() >= 3));
        let nf = commutator_word(&lw("12"), &lw("112"), 2, 4).unwrap();
        assert!(nf.factors.is_empty());
        assert!(matches!(
            commutator_word(&lw("2"), &lw("1"), 2, 3),
            Err(Error::OrderViolation(_, _))
        ));
    }

    #[test]
    fn mobius_values() {
        let v: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(v, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }
}
