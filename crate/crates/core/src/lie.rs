//! Free Lie algebra in the Lyndon basis, computed inside the tensor algebra.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::lyndon::{enumerate_lyndon, standard_factorization, LyndonWord};
use crate::magnus::{expand, unflatten, MultiIndex};
use crate::ring::Ring;
use crate::words::Word;

/// Element of the free associative algebra on `X_1..X_n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    pub n: usize,
    pub terms: BTreeMap<MultiIndex, Q>,
}

impl TensorElement {
    pub fn zero(n: usize) -> Self {
        TensorElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: usize, index: MultiIndex, c: Q) -> Self {
        let mut t = Self::zero(n);
        t.add_term(index, c);
        t
    }

    /// Homogeneous element from a dense Magnus degree block.
    pub fn from_block(n: usize, d: usize, block: &[BigInt]) -> Self {
        let mut t = Self::zero(n);
        for (pos, c) in block.iter().enumerate() {
            if !c.is_zero() {
                t.terms
                    .insert(unflatten(n, d, pos), Q::from_integer(c.clone()));
            }
        }
        t
    }

    pub fn add_term(&mut self, index: MultiIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(index) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, index: &[usize]) -> Q {
        self.terms.get(index).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> TensorElement {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        TensorElement {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.scale(&-Q::one()))
    }

    /// Concatenation product.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let mut acc: HashMap<MultiIndex, Q> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut k = a.clone();
                k.extend_from_slice(b);
                *acc.entry(k).or_insert_with(Q::zero) += ca * cb;
            }
        }
        TensorElement {
            n: self.n,
            terms: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &TensorElement) -> TensorElement {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|k| k.len()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn homogeneous_part(&self, d: usize) -> TensorElement {
        TensorElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.len() == d)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

type TensorCache = RwLock<HashMap<(usize, Vec<usize>), Arc<TensorElement>>>;

fn tensor_cache() -> &'static TensorCache {
    static CACHE: OnceLock<TensorCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Tensor expansion of `e(I)` via the standard bracketing.
pub fn lyndon_bracket_tensor(word: &LyndonWord, n: usize) -> Arc<TensorElement> {
    let key = (n, word.index().to_vec());
    if let Some(t) = tensor_cache().read().unwrap().get(&key) {
        return t.clone();
    }
    let t = if word.weight() == 1 {
        TensorElement::monomial(n, word.index().to_vec(), Q::one())
    } else {
        let (a, b) = standard_factorization(word).expect("weight ≥ 2");
        lyndon_bracket_tensor(&a, n).commutator(&lyndon_bracket_tensor(&b, n))
    };
    let t = Arc::new(t);
    tensor_cache().write().unwrap().insert(key, t.clone());
    t
}

/// Graded Lie element with rational coefficients in the Lyndon basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LieElement {
    pub n: usize,
    pub parts: BTreeMap<usize, BTreeMap<LyndonWord, Q>>,
}

impl LieElement {
    pub fn zero(n: usize) -> Self {
        LieElement {
            n,
            parts: BTreeMap::new(),
        }
    }

    pub fn basis(n: usize, word: LyndonWord) -> Self {
        let mut e = Self::zero(n);
        e.add_term(word, Q::one());
        e
    }

    pub fn generator(n: usize, i: usize) -> Self {
        Self::basis(n, LyndonWord::letter(i))
    }

    pub fn add_term(&mut self, word: LyndonWord, c: Q) {
        if c.is_zero() {
            return;
        }
        let part = self.parts.entry(word.weight()).or_default();
        let e = part.entry(word.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            part.remove(&word);
        }
        self.parts.retain(|_, p| !p.is_empty());
    }

    pub fn from_coeffs(n: usize, coeffs: BTreeMap<LyndonWord, Q>) -> Self {
        let mut e = Self::zero(n);
        for (w, c) in coeffs {
            e.add_term(w, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn coeff(&self, word: &LyndonWord) -> Q {
        self.parts
            .get(&word.weight())
            .and_then(|p| p.get(word))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LyndonWord, &Q)> {
        self.parts.values().flat_map(|p| p.iter())
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> LieElement {
        let mut out = LieElement::zero(self.n);
        for (w, v) in self.terms() {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn to_tensor(&self) -> TensorElement {
        let mut t = TensorElement::zero(self.n);
        for (w, c) in self.terms() {
            t = t.add(&lyndon_bracket_tensor(w, self.n).scale(c));
        }
        t
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut parts = serde_json::Map::new();
        for (k, p) in &self.parts {
            let mut m = serde_json::Map::new();
            for (w, c) in p {
                m.insert(w.to_string(), serde_json::Value::String(c.to_string()));
            }
            parts.insert(k.to_string(), serde_json::Value::Object(m));
        }
        serde_json::json!({ "n": self.n, "parts": parts })
    }
}

/// Lie bracket, computed as a tensor commutator and decomposed.
pub fn bracket(a: &LieElement, b: &LieElement) -> Result<LieElement> {
    if a.n != b.n {
        return Err(Error::RankMismatch(a.n, b.n));
    }
    let mut out = LieElement::zero(a.n);
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            let sc = bracket_basis(a.n, wa, wb)?;
            let f = ca * cb;
            for (w, c) in sc.iter() {
                out.add_term(w.clone(), c * &f);
            }
        }
    }
    Ok(out)
}

type BracketCache = RwLock<HashMap<(usize, Vec<usize>, Vec<usize>), Arc<BTreeMap<LyndonWord, Q>>>>;

fn bracket_cache() -> &'static BracketCache {
    static CACHE: OnceLock<BracketCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Structure constants `[e(I), e(J)] = Σ c_K e(K)`, cached per `(n, I, J)`.
pub fn bracket_basis(
    n: usize,
    a: &LyndonWord,
    b: &LyndonWord,
) -> Result<Arc<BTreeMap<LyndonWord, Q>>> {
    let key = (n, a.index().to_vec(), b.index().to_vec());
    if let Some(v) = bracket_cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let t = lyndon_bracket_tensor(a, n).commutator(&lyndon_bracket_tensor(b, n));
    let v = Arc::new(decompose(&t)?);
    bracket_cache().write().unwrap().insert(key, v.clone());
    Ok(v)
}

/// Coefficients `c_I` with `t = Σ c_I e(I)`.
///
/// Fast path: read `c_I` as the coefficient of the word `I` and verify by
/// re-expansion. Otherwise peel Lyndon words in increasing lex order, which
/// is exact because `e(J)` is `J` plus lex-larger words.
pub fn decompose(t: &TensorElement) -> Result<BTreeMap<LyndonWord, Q>> {
    let mut out = BTreeMap::new();
    for d in t.degrees() {
        let part = t.homogeneous_part(d);
        out.extend(decompose_homogeneous(&part, d, None)?);
    }
    Ok(out)
}

fn decompose_homogeneous(
    t: &TensorElement,
    d: usize,
    modulus: Option<&BigInt>,
) -> Result<BTreeMap<LyndonWord, Q>> {
    let n = t.n;
    let basis = enumerate_lyndon(n, d);
    let reduce = |x: Q| -> Q {
        match modulus {
            Some(q) => Q::from_integer(x.to_integer().mod_floor(q)),
            None => x,
        }
    };
    let clean = |t: TensorElement| -> TensorElement {
        match modulus {
            None => t,
            Some(_) => TensorElement {
                n: t.n,
                terms: t
                    .terms
                    .into_iter()
                    .map(|(k, v)| (k, reduce(v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect(),
            },
        }
    };

    let fast: BTreeMap<LyndonWord, Q> = basis
        .iter()
        .map(|w| (w.clone(), reduce(t.coeff(w.index()))))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mut check = TensorElement::zero(n);
    for (w, c) in &fast {
        check = check.add(&lyndon_bracket_tensor(w, n).scale(c));
    }
    if clean(check.sub(t)).is_zero() {
        return Ok(fast);
    }

    let mut residual = clean(t.clone());
    let mut out = BTreeMap::new();
    for w in &basis {
        let c = residual.coeff(w.index());
        if c.is_zero() {
            continue;
        }
        residual = clean(residual.sub(&lyndon_bracket_tensor(w, n).scale(&c)));
        out.insert(w.clone(), c);
    }
    if !residual.is_zero() {
        return Err(Error::NotLie(d));
    }
    Ok(out)
}

/// Integral decomposition of a homogeneous degree-`d` tensor, optionally
/// modulo `q`, in basis order.
pub fn decompose_integral(
    t: &TensorElement,
    d: usize,
    modulus: Option<&BigInt>,
) -> Result<Vec<(LyndonWord, BigInt)>> {
    let coeffs = decompose_homogeneous(&t.homogeneous_part(d), d, modulus)?;
    coeffs
        .into_iter()
        .map(|(w, c)| {
            if c.is_integer() {
                Ok((w, c.to_integer()))
            } else {
                Err(Error::Invalid(format!(
                    "non-integral Lyndon coefficient {c}"
                )))
            }
        })
        .collect()
}

/// `M[I][J]` = coefficient of the word `I` in `e(J)`, rows and columns in
/// lex order over `LW_k`.
pub fn pairing_matrix(n: usize, k: usize) -> (Vec<LyndonWord>, Vec<Vec<Q>>) {
    let basis = enumerate_lyndon(n, k);
    let m = basis
        .iter()
        .map(|i| {
            basis
                .iter()
                .map(|j| lyndon_bracket_tensor(j, n).coeff(i.index()))
                .collect()
        })
        .collect();
    (basis, m)
}

/// Ones on the diagonal, zeros above it (a word `I` only occurs in `e(J)`
/// for `I ≥ J`).
pub fn is_unitriangular(m: &[Vec<Q>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| match i.cmp(&j) {
            std::cmp::Ordering::Equal => x.is_one(),
            std::cmp::Ordering::Less => x.is_zero(),
            std::cmp::Ordering::Greater => true,
        })
    })
}

/// Kernel of `[-,-]: H ⊗ L_k → L_{k+1}`.
#[derive(Debug, Clone)]
pub struct DkKernel {
    /// Coordinates: `X_i ⊗ e(J)`.
    pub columns: Vec<(usize, LyndonWord)>,
    pub rows: Vec<LyndonWord>,
    pub matrix: Vec<Vec<Q>>,
    pub basis: Vec<Vec<Q>>,
}

impl DkKernel {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Image of a vector of `H ⊗ L_k` under the bracket map.
    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column_of(&self, i: usize, w: &LyndonWord) -> Option<usize> {
        self.columns.iter().position(|(a, b)| *a == i && b == w)
    }
}

pub fn dk_kernel_basis(n: usize, k: usize) -> Result<DkKernel> {
    let lk = enumerate_lyndon(n, k);
    let rows = enumerate_lyndon(n, k + 1);
    let columns: Vec<(usize, LyndonWord)> = (1..=n)
        .flat_map(|i| lk.iter().map(move |w| (i, w.clone())))
        .collect();
    let mut matrix = vec![vec![Q::zero(); columns.len()]; rows.len()];
    for (c, (i, w)) in columns.iter().enumerate() {
        let sc = bracket(
            &LieElement::generator(n, *i),
            &LieElement::basis(n, w.clone()),
        )?;
        for (r, row_word) in rows.iter().enumerate() {
            matrix[r][c] = sc.coeff(row_word);
        }
    }
    let basis = linalg::nullspace(&matrix, columns.len());
    Ok(DkKernel {
        columns,
        rows,
        matrix,
        basis,
    })
}

/// Class of `w ∈ Γ_k` in `Γ_k/Γ_{k+1}` in the Lyndon basis.
pub fn group_graded_decompose(
    w: &Word,
    k: usize,
    ring: &Ring,
) -> Result<BTreeMap<LyndonWord, BigInt>> {
    let s = expand(w, k, ring)?;
    let depth = s.depth();
    if !depth.at_least(k) {
        return Err(Error::Precondition(format!(
            "element has lower-central depth {depth}, need ≥ {k}"
        )));
    }
    let t = TensorElement::from_block(w.n(), k, s.block(k));
    Ok(decompose_integral(&t, k, ring.modulus().as_ref())?
        .into_iter()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn lw(s: &str) -> LyndonWord {
        LyndonWord::parse(s).unwrap()
    }

    fn x(n: usize, i: usize) -> TensorElement {
        TensorElement::monomial(n, vec![i], Q::one())
    }

    #[test]
    fn bracket_tensor_examples() {
        let e12 = lyndon_bracket_tensor(&lw("12"), 2);
        let mut want = TensorElement::zero(2);
        want.add_term(vec![1, 2], q(1));
        want.add_term(vec![2, 1], q(-1));
        assert_eq!(*e12, want);
        let (x1, x2) = (x(2, 1), x(2, 2));
        assert_eq!(
            *lyndon_bracket_tensor(&lw("122"), 2),
            x1.commutator(&x2).commutator(&x2)
        );
        assert_eq!(
            *lyndon_bracket_tensor(&lw("1112"), 2),
            x1.commutator(&x1.commutator(&x1.commutator(&x2)))
        );
    }

    #[test]
    fn bracket_examples() {
        let e1 = LieElement::generator(2, 1);
        let e2 = LieElement::generator(2, 2);
        let e12 = bracket(&e1, &e2).unwrap();
        assert_eq!(e12, LieElement::basis(2, lw("12")));
        assert_eq!(bracket(&e12, &e2).unwrap(), LieElement::basis(2, lw("122")));
        assert!(bracket(&e12, &e12).unwrap().is_zero());
    }

    #[test]
    fn decompose_examples() {
        let t = x(2, 1).commutator(&x(2, 2));
        assert_eq!(decompose(&t).unwrap(), BTreeMap::from([(lw("12"), q(1))]));
        let t = t.commutator(&x(2, 2));
        assert_eq!(decompose(&t).unwrap(), BTreeMap::from([(lw("122"), q(1))]));
        let not_lie = TensorElement::monomial(2, vec![1, 2], q(1));
        assert_eq!(decompose(&not_lie), Err(Error::NotLie(2)));
    }

    #[test]
    fn decompose_uses_fallback_when_pairing_is_not_diagonal() {
        // e(123) contains the Lyndon word 132 with coefficient -1
        let e = lyndon_bracket_tensor(&lw("123"), 3);
        assert_eq!(e.coeff(&[1, 3, 2]), q(-1));
        assert_eq!(decompose(&e).unwrap(), BTreeMap::from([(lw("123"), q(1))]));
    }

    #[test]
    fn pairing_is_unitriangular() {
        for (n, k) in [
            (2, 2),
            (2, 3),
            (2, 4),
            (2, 5),
            (3, 2),
            (3, 3),
            (3, 4),
            (4, 3),
        ] {
            let (_, m) = pairing_matrix(n, k);
            assert!(is_unitriangular(&m), "n={n} k={k}");
        }
        let (basis, m) = pairing_matrix(3, 3);
        let i = basis.iter().position(|w| *w == lw("132")).unwrap();
        let j = basis.iter().position(|w| *w == lw("123")).unwrap();
        assert_eq!(m[i][j], q(-1));
    }

    #[test]
    fn dk_kernel_dimensions() {
        assert_eq!(dk_kernel_basis(2, 2).unwrap().dimension(), 0);
        assert_eq!(dk_kernel_basis(2, 3).unwrap().dimension(), 1);
        assert_eq!(dk_kernel_basis(3, 2).unwrap().dimension(), 1);
        for n in 1..=4usize {
            for k in 1..=5usize {
                if n.pow(k as u32 + 1) > 2000 {
                    continue;
                }
                let d = crate::lyndon::d_rank(n as u64, k as u64);
                assert_eq!(
                    BigInt::from(dk_kernel_basis(n, k).unwrap().dimension()),
                    d,
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn graded_decompose_examples() {
        let z = Ring::Integers;
        let w = Word::parse("[x1,x2]", 2).unwrap();
        assert_eq!(
            group_graded_decompose(&w, 2, &z).unwrap(),
            BTreeMap::from([(lw("12"), BigInt::from(1))])
        );
        let w = Word::parse("[[x1,x2],x2]", 2).unwrap();
        assert_eq!(
            group_graded_decompose(&w, 3, &z).unwrap(),
            BTreeMap::from([(lw("122"), BigInt::from(1))])
        );
        let w = Word::parse("[x1,x2]^2", 2).unwrap();
        assert_eq!(
            group_graded_decompose(&w, 2, &z).unwrap(),
            BTreeMap::from([(lw("12"), BigInt::from(2))])
        );
        assert!(group_graded_decompose(&Word::parse("x1", 2).unwrap(), 2, &z).is_err());
    }
}
