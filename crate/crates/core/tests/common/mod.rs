//! Property checks shared by the proptest suite and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use orrkit::galois::GaloisAutomorphism;
use orrkit::lie::{bracket, LieElement};
use orrkit::linalg::Q;
use orrkit::lyndon::{enumerate_lyndon, lyndon_group_word, normal_form, power_word};
use orrkit::magnus::{coefficient, expand, lcs_depth};
use orrkit::massey::{defining_system_check, DefiningSystem};
use orrkit::ring::Ring;
use orrkit::words::Word;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 256;

pub fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let syllable = (1..=n, prop_oneof![-3i64..=-1, 1i64..=3]);
    prop::collection::vec(syllable, 0..=max_len)
        .prop_map(move |pairs| Word::from_pairs(n, &pairs).expect("generators in range"))
}

pub fn index(n: usize, min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=n, min_len..=max_len)
}

/// Integer combination of Lyndon basis elements of weight 1 and 2 on 3 letters.
pub fn lie_element() -> impl Strategy<Value = LieElement> {
    let basis: Vec<_> = (1..=2).flat_map(|w| enumerate_lyndon(3, w)).collect();
    let len = basis.len();
    prop::collection::vec(-3i64..=3, len).prop_map(move |cs| {
        let coeffs: BTreeMap<_, _> = basis
            .iter()
            .cloned()
            .zip(cs)
            .filter(|(_, c)| *c != 0)
            .map(|(b, c)| (b, Q::from_integer(BigInt::from(c))))
            .collect();
        LieElement::from_coeffs(3, coeffs)
    })
}

/// Exponents for `y_i = Π e(b)^{c_b}` over Lyndon words of weight `k` and `k+1`
/// on two letters, `k ∈ {2, 3}`.
pub fn deep_automorphism_data() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    (2usize..=3).prop_flat_map(|k| {
        let count = enumerate_lyndon(2, k).len() + enumerate_lyndon(2, k + 1).len();
        let one = prop::collection::vec(prop::collection::vec(-4i64..=4, count), 2);
        (Just(k), one.clone(), one)
    })
}

pub fn deep_automorphism(k: usize, exps: &[Vec<i64>]) -> GaloisAutomorphism {
    let basis: Vec<_> = enumerate_lyndon(2, k)
        .into_iter()
        .chain(enumerate_lyndon(2, k + 1))
        .collect();
    let y = exps
        .iter()
        .map(|cs| {
            let mut w = Word::identity(2).unwrap();
            for (b, c) in basis.iter().zip(cs) {
                let e = lyndon_group_word(b, 2).unwrap();
                w.append(&power_word(&e, &BigInt::from(*c)).unwrap())
                    .unwrap();
            }
            w
        })
        .collect();
    GaloisAutomorphism::new(2, k + 1, 3, 2, None, BigInt::one(), y, false).unwrap()
}

fn mu(w: &Word, i: &[usize]) -> BigInt {
    if i.is_empty() {
        BigInt::one()
    } else {
        coefficient(w, i, i.len(), &Ring::Integers).unwrap()
    }
}

/// `μ(I; g1 g2) = Σ_{I = I1 I2} μ(I1; g1) μ(I2; g2)`.
pub fn comultiplication(g1: &Word, g2: &Word, i: &[usize]) -> Result<(), TestCaseError> {
    let lhs = mu(&g1.multiply(g2).unwrap(), i);
    let rhs: BigInt = (0..=i.len())
        .map(|p| mu(g1, &i[..p]) * mu(g2, &i[p..]))
        .sum();
    prop_assert_eq!(lhs, rhs, "I = {:?}, g1 = {}, g2 = {}", i, g1, g2);
    Ok(())
}

/// Associativity, identity, inverses, and the expansion as a homomorphism.
pub fn free_group_axioms(a: &Word, b: &Word, c: &Word) -> Result<(), TestCaseError> {
    let ab = a.multiply(b).unwrap();
    prop_assert_eq!(
        ab.multiply(c).unwrap(),
        a.multiply(&b.multiply(c).unwrap()).unwrap()
    );
    prop_assert_eq!(&a.multiply(&Word::identity(a.n()).unwrap()).unwrap(), a);
    prop_assert!(a.multiply(&a.invert()).unwrap().is_identity());
    prop_assert!(a.invert().multiply(a).unwrap().is_identity());
    let ring = Ring::Integers;
    let (ea, eb) = (expand(a, 4, &ring).unwrap(), expand(b, 4, &ring).unwrap());
    prop_assert_eq!(expand(&ab, 4, &ring).unwrap(), ea.multiply(&eb).unwrap());
    prop_assert_eq!(
        expand(&a.invert(), 4, &ring).unwrap(),
        ea.inverse().unwrap()
    );
    Ok(())
}

/// `[[a,b],c] + [[b,c],a] + [[c,a],b] = 0` and `[a,b] = -[b,a]`.
pub fn jacobi_identity(
    a: &LieElement,
    b: &LieElement,
    c: &LieElement,
) -> Result<(), TestCaseError> {
    let br = |x: &LieElement, y: &LieElement| bracket(x, y).unwrap();
    let sum = br(&br(a, b), c)
        .add(&br(&br(b, c), a))
        .add(&br(&br(c, a), b));
    prop_assert!(sum.is_zero());
    prop_assert!(br(a, b).add(&br(b, a)).is_zero());
    Ok(())
}

/// `w⁻¹ · Π e(I)^{a_I}` lies in `Γ_k`.
pub fn normal_form_round_trip(w: &Word, k: usize) -> Result<(), TestCaseError> {
    let nf = normal_form(w, k, &Ring::Integers).unwrap();
    let residual = w.invert().multiply(&nf.to_word().unwrap()).unwrap();
    let depth = lcs_depth(&residual, k, &Ring::Integers).unwrap();
    prop_assert!(depth.at_least(k), "w = {}, k = {}, depth = {}", w, k, depth);
    Ok(())
}

/// `μ(σ1σ2; J) = μ(σ1; J) + μ(σ2; J)` mod `ℓ^M` for `|J| = k+1` when both have depth `≥ k`.
pub fn milnor_additivity(k: usize, e1: &[Vec<i64>], e2: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let (s1, s2) = (deep_automorphism(k, e1), deep_automorphism(k, e2));
    prop_assert!(s1.depth().unwrap().at_least(k) && s2.depth().unwrap().at_least(k));
    let s12 = s1.compose(&s2).unwrap();
    let ring = s1.ring();
    let (i1, i2, i12) = (
        s1.invariants_of_length(k + 1).unwrap(),
        s2.invariants_of_length(k + 1).unwrap(),
        s12.invariants_of_length(k + 1).unwrap(),
    );
    let mut keys: Vec<_> = i1
        .keys()
        .chain(i2.keys())
        .chain(i12.keys())
        .cloned()
        .collect();
    keys.sort();
    keys.dedup();
    let zero = BigInt::zero();
    for j in keys {
        let sum = ring.reduce(i1.get(&j).unwrap_or(&zero) + i2.get(&j).unwrap_or(&zero));
        prop_assert_eq!(i12.get(&j).unwrap_or(&zero), &sum, "J = {:?}", j);
    }
    Ok(())
}

/// `d a_rs = Σ a_rt a_ts` and `dμ_rs = Σ μ_rt ⌣ μ_ts` on random pairs.
pub fn defining_system(i: &[usize], seed: u64) -> Result<(), TestCaseError> {
    let r =
        defining_system_check(&DefiningSystem::magnus(i.to_vec()), 3, i.len(), 2, seed).unwrap();
    prop_assert!(r.pass, "{:?}", r.first_violation);
    Ok(())
}
