//! Massey products on `F_n/Γ_k` from the Magnus-coefficient defining system.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lyndon::{enumerate_lyndon, format_index, lyndon_group_word, LyndonWord};
use crate::magnus::{coefficient, expand, MultiIndex};
use crate::ring::Ring;
use crate::words::{Syllable, Word};

fn mu(index: &[usize], g: &Word) -> BigInt {
    coefficient(g, index, index.len().max(1), &Ring::Integers).expect("index within truncation")
}

/// The array `a_rs = sign · μ((i_r … i_{s-1}); −)`; the standard system has
/// `sign = -1`. `scaled` multiplies one entry, for negative controls.
#[derive(Debug, Clone)]
pub struct DefiningSystem {
    pub index: MultiIndex,
    pub sign: i64,
    pub scaled: Option<((usize, usize), i64)>,
}

impl DefiningSystem {
    pub fn magnus(index: MultiIndex) -> Self {
        DefiningSystem {
            index,
            sign: -1,
            scaled: None,
        }
    }

    pub fn m(&self) -> usize {
        self.index.len()
    }

    /// `a_rs(g)` for `1 ≤ r < s ≤ m+1` (1-based).
    pub fn entry(&self, r: usize, s: usize, g: &Word) -> BigInt {
        let mut v = mu(&self.index[r - 1..s - 1], g) * self.sign;
        if let Some(((rr, ss), f)) = self.scaled {
            if (rr, ss) == (r, s) {
                v *= f;
            }
        }
        v
    }
}

/// Outcome of checking the defining-system identities on sample pairs.
#[derive(Debug, Clone, Serialize)]
pub struct DefiningSystemReport {
    pub index: String,
    pub k: usize,
    pub samples: usize,
    pub checks: usize,
    pub pass: bool,
    pub first_violation: Option<Violation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub entry: (usize, usize),
    pub identity: &'static str,
    pub g1: String,
    pub g2: String,
    pub lhs: String,
    pub rhs: String,
}

/// Coboundary of a 1-cochain with trivial action:
/// `(da)(g1, g2) = a(g2) - a(g1 g2) + a(g1)`.
fn coboundary<F: Fn(&Word) -> BigInt>(a: F, g1: &Word, g2: &Word) -> BigInt {
    let g12 = g1.multiply(g2).expect("same rank");
    a(g2) - a(&g12) + a(g1)
}

/// Random word with `len` syllables and small exponents.
pub fn random_word<R: Rng>(rng: &mut R, n: usize, len: usize) -> Word {
    let raw = (0..len)
        .map(|_| {
            let e = loop {
                let e: i64 = rng.gen_range(-3..=3);
                if e != 0 {
                    break e;
                }
            };
            Syllable::new(rng.gen_range(1..=n), e)
        })
        .collect();
    Word::reduce(raw, n).expect("valid generators")
}

/// Checks, for every `(r, s)` with `s ≥ r+2` and `(r, s) ≠ (1, m+1)`:
///
/// * `d a_rs = Σ_t a_rt · a_ts` with the plain product of values
///   (the homomorphism form into the unipotent group), and
/// * `d μ_rs = Σ_t μ_rt ⌣ μ_ts` with the signed cup `(-1)^{pq}`.
pub fn defining_system_check(
    system: &DefiningSystem,
    n: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<DefiningSystemReport> {
    let m = system.m();
    if m < 2 || k < 2 {
        return Err(Error::Precondition("need |I| ≥ 2 and k ≥ 2".into()));
    }
    if let Some(&bad) = system.index.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::GeneratorOutOfRange { index: bad, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut first_violation = None;
    'outer: for _ in 0..samples {
        let len1 = rng.gen_range(0..=6);
        let len2 = rng.gen_range(0..=6);
        let g1 = random_word(&mut rng, n, len1);
        let g2 = random_word(&mut rng, n, len2);
        for r in 1..=m {
            for s in r + 2..=m + 1 {
                if (r, s) == (1, m + 1) {
                    continue;
                }
                checks += 1;
                let lhs = coboundary(|g| system.entry(r, s, g), &g1, &g2);
                let rhs: BigInt = (r + 1..s)
                    .map(|t| system.entry(r, t, &g1) * system.entry(t, s, &g2))
                    .sum();
                if lhs != rhs {
                    first_violation = Some(Violation {
                        entry: (r, s),
                        identity: "d a = Σ a·a",
                        g1: g1.to_string(),
                        g2: g2.to_string(),
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                    break 'outer;
                }
                let muv = |a: usize, b: usize, g: &Word| system.entry(a, b, g) * system.sign;
                let lhs = coboundary(|g| muv(r, s, g), &g1, &g2);
                let rhs: BigInt = (r + 1..s).map(|t| -(muv(r, t, &g1) * muv(t, s, &g2))).sum();
                if lhs != rhs {
                    first_violation = Some(Violation {
                        entry: (r, s),
                        identity: "dμ = Σ μ⌣μ",
                        g1: g1.to_string(),
                        g2: g2.to_string(),
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(DefiningSystemReport {
        index: format_index(&system.index),
        k,
        samples,
        checks,
        pass: first_violation.is_none(),
        first_violation,
    })
}

/// `⟨-x*_{i_1}, …, -x*_{i_m}⟩(η_f) = (-1)^{m+1} μ(I; f)` for `f ∈ Γ_k`, `m ≤ k`.
pub fn massey_evaluate(index: &[usize], f: &Word, k: usize) -> Result<BigInt> {
    let m = index.len();
    if m == 0 || m > k {
        return Err(Error::Precondition(format!(
            "Massey product of length {m} on F/Γ_{k}"
        )));
    }
    let depth = expand(f, k, &Ring::Integers)?.depth();
    if !depth.at_least(k) {
        return Err(Error::Precondition(format!(
            "f has lower-central depth {depth}, need ≥ {k}"
        )));
    }
    let mu = coefficient(f, index, m, &Ring::Integers)?;
    Ok(if m % 2 == 1 { mu } else { -mu })
}

/// Values `a_rs(x_i)` of a defining system on the generators.
#[derive(Debug, Clone)]
pub struct GeneratorValues {
    pub m: usize,
    pub n: usize,
    /// `(r, s) ↦ [a_rs(x_1), …, a_rs(x_n)]`; missing entries are zero.
    pub values: BTreeMap<(usize, usize), Vec<BigInt>>,
}

impl GeneratorValues {
    pub fn from_system(system: &DefiningSystem, n: usize) -> Result<Self> {
        let m = system.m();
        let mut values = BTreeMap::new();
        for r in 1..=m {
            for s in r + 1..=m + 1 {
                if (r, s) == (1, m + 1) {
                    continue;
                }
                let v = (1..=n)
                    .map(|i| Ok(system.entry(r, s, &Word::generator(n, i)?)))
                    .collect::<Result<Vec<_>>>()?;
                values.insert((r, s), v);
            }
        }
        Ok(GeneratorValues { m, n, values })
    }

    fn get(&self, r: usize, s: usize, i: usize) -> BigInt {
        self.values
            .get(&(r, s))
            .map(|v| v[i - 1].clone())
            .unwrap_or_else(BigInt::zero)
    }
}

/// The full composition sum
/// `Σ_r (-1)^{r+1} Σ_{c_1+…+c_r=m} Σ_{i_1…i_r} a_{1,1+c_1}(x_{i_1}) ⋯ μ((i_1…i_r); f)`.
///
/// The `r = 1` term would need `a_{1,m+1}`, which is not part of a defining
/// system; it multiplies `μ((i); f) = 0` for `f ∈ [F, F]` and is skipped.
pub fn general_massey_evaluate(system: &GeneratorValues, f: &Word) -> Result<BigInt> {
    if f.n() != system.n {
        return Err(Error::RankMismatch(f.n(), system.n));
    }
    if f.abelianization().iter().any(|c| !c.is_zero()) {
        return Err(Error::Precondition("f must lie in [F, F]".into()));
    }
    let m = system.m;
    let n = system.n;
    let mut total = BigInt::zero();
    for comp in compositions(m) {
        let r = comp.len();
        if r == 1 {
            continue;
        }
        let mut breaks = vec![1usize];
        for c in &comp {
            breaks.push(breaks.last().unwrap() + c);
        }
        let sign: i64 = if r % 2 == 1 { 1 } else { -1 };
        // iterate over (i_1..i_r), pruning on zero partial products
        let mut stack: Vec<(Vec<usize>, BigInt)> = vec![(Vec::new(), BigInt::one())];
        while let Some((idx, prod)) = stack.pop() {
            let t = idx.len();
            if t == r {
                let mu = coefficient(f, &idx, r, &Ring::Integers)?;
                total += prod * mu * sign;
                continue;
            }
            for i in 1..=n {
                let v = system.get(breaks[t], breaks[t + 1], i);
                if v.is_zero() {
                    continue;
                }
                let mut next = idx.clone();
                next.push(i);
                stack.push((next, &prod * v));
            }
        }
    }
    Ok(total)
}

/// Ordered compositions of `m` into positive parts.
fn compositions(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=m {
        for mut rest in compositions(m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `M[I][J] = ⟨-x*_I⟩(e(J))` over `I, J ∈ LW_k`.
#[derive(Debug, Clone, Serialize)]
pub struct DualBasisMatrix {
    pub n: usize,
    pub k: usize,
    pub basis: Vec<LyndonWord>,
    pub matrix: Vec<Vec<BigInt>>,
}

impl DualBasisMatrix {
    /// `(-1)^{k+1}` times the identity.
    pub fn is_signed_identity(&self) -> bool {
        let s = BigInt::from(if self.k % 2 == 1 { 1 } else { -1 });
        self.matrix.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, x)| if i == j { *x == s } else { x.is_zero() })
        })
    }

    /// Diagonal `(-1)^{k+1}` and zero above it: still a basis over Z.
    pub fn is_signed_unitriangular(&self) -> bool {
        let s = BigInt::from(if self.k % 2 == 1 { 1 } else { -1 });
        self.matrix.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, x)| match i.cmp(&j) {
                std::cmp::Ordering::Equal => *x == s,
                std::cmp::Ordering::Less => x.is_zero(),
                std::cmp::Ordering::Greater => true,
            })
        })
    }

    /// Nonzero off-diagonal entries as `(I, J, value)`.
    pub fn off_diagonal(&self) -> Vec<(String, String, BigInt)> {
        let mut out = Vec::new();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j && !x.is_zero() {
                    out.push((
                        self.basis[i].to_string(),
                        self.basis[j].to_string(),
                        x.clone(),
                    ));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "basis": self.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "matrix": self.matrix.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "signed_identity": self.is_signed_identity(),
            "signed_unitriangular": self.is_signed_unitriangular(),
        })
    }
}

pub fn dual_basis_matrix(n: usize, k: usize) -> Result<DualBasisMatrix> {
    let basis = enumerate_lyndon(n, k);
    let words = basis
        .iter()
        .map(|j| lyndon_group_word(j, n))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = Vec::with_capacity(basis.len());
    for i in &basis {
        let row = words
            .iter()
            .map(|w| massey_evaluate(i.index(), w, k))
            .collect::<Result<Vec<_>>>()?;
        matrix.push(row);
    }
    Ok(DualBasisMatrix {
        n,
        k,
        basis,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, n: usize) -> Word {
        Word::parse(s, n).unwrap()
    }

    #[test]
    fn defining_system_passes() {
        let r = defining_system_check(&DefiningSystem::magnus(vec![1, 2]), 2, 3, 50, 1).unwrap();
        assert!(r.pass);
        let r = defining_system_check(&DefiningSystem::magnus(vec![1, 2, 2]), 2, 4, 50, 2).unwrap();
        assert!(r.pass && r.checks > 0);
    }

    #[test]
    fn corrupted_system_fails_with_witness() {
        let mut sys = DefiningSystem::magnus(vec![1, 2, 2]);
        sys.scaled = Some(((1, 3), 2));
        let r = defining_system_check(&sys, 2, 4, 50, 3).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_violation.unwrap().entry, (1, 3));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(
            massey_evaluate(&[1, 2], &w("[x1,x2]", 2), 2).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            massey_evaluate(&[1, 1, 2], &w("[[x1,x2],x2]", 2), 3).unwrap(),
            BigInt::zero()
        );
        assert!(massey_evaluate(&[1, 2, 2], &Word::identity(2).unwrap(), 3)
            .unwrap()
            .is_zero());
        assert!(massey_evaluate(&[1, 2], &w("x1", 2), 2).is_err());
    }

    #[test]
    fn general_formula_specializes() {
        let f = w("[[x1,x2],x2] [x1,[x1,x2]]^2", 2);
        for idx in [vec![1, 2, 2], vec![1, 1, 2], vec![2, 1, 2]] {
            let plus = DefiningSystem {
                index: idx.clone(),
                sign: 1,
                scaled: None,
            };
            let gv = GeneratorValues::from_system(&plus, 2).unwrap();
            assert_eq!(
                general_massey_evaluate(&gv, &f).unwrap(),
                massey_evaluate(&idx, &f, 3).unwrap()
            );
            let gv = GeneratorValues::from_system(&DefiningSystem::magnus(idx.clone()), 2).unwrap();
            assert_eq!(
                general_massey_evaluate(&gv, &f).unwrap(),
                -coefficient(&f, &idx, 3, &Ring::Integers).unwrap()
            );
        }
        let gv = GeneratorValues::from_system(&DefiningSystem::magnus(vec![1, 2]), 2).unwrap();
        assert!(general_massey_evaluate(&gv, &Word::identity(2).unwrap())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn length_two_is_cup_pairing() {
        let f = w("[x1,x2]^3 [x2,x1^2]", 2);
        let sys = DefiningSystem::magnus(vec![2, 1]);
        let gv = GeneratorValues::from_system(&sys, 2).unwrap();
        let mut brute = BigInt::zero();
        for i1 in 1..=2 {
            for i2 in 1..=2 {
                let a = sys.entry(1, 2, &w(&format!("x{i1}"), 2));
                let b = sys.entry(2, 3, &w(&format!("x{i2}"), 2));
                brute -= a * b * coefficient(&f, &[i1, i2], 2, &Ring::Integers).unwrap();
            }
        }
        assert_eq!(general_massey_evaluate(&gv, &f).unwrap(), brute);
    }

    #[test]
    fn dual_basis_small_cases() {
        let m = dual_basis_matrix(2, 2).unwrap();
        assert_eq!(m.matrix, vec![vec![BigInt::from(-1)]]);
        assert!(dual_basis_matrix(2, 3).unwrap().is_signed_identity());
        assert!(dual_basis_matrix(3, 2).unwrap().is_signed_identity());
        let m = dual_basis_matrix(3, 3).unwrap();
        assert!(m.is_signed_unitriangular());
        assert!(m
            .off_diagonal()
            .contains(&("132".into(), "123".into(), BigInt::from(-1))));
    }

    #[test]
    fn vanishing_below_threshold() {
        let f = w("[[x1,x2],x2]^2 [[x1,x2],x1]", 2);
        for idx in [vec![1, 2], vec![2, 1], vec![1, 1]] {
            assert!(massey_evaluate(&idx, &f, 3).unwrap().is_zero());
        }
    }
}
