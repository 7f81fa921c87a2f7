//! Weight-graded Koszul complex `Λ_*(L/L_{≥k})` of the free nilpotent Lie
//! algebra, its integral homology, and the maps induced by `L/L_{≥k'} → L/L_{≥k}`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::bracket_basis;
use crate::linalg::{self, Q};
use crate::lyndon::{d_rank, enumerate_lyndon, LyndonWord};
use crate::snf::{self, ZMatrix};

/// Basis of `L/L_{≥k}` in the global order together with the chain groups
/// `Λ_m` split by weight.
#[derive(Debug, Clone)]
pub struct WeightGradedComplex {
    pub n: usize,
    pub k: usize,
    pub m_max: usize,
    pub basis: Vec<LyndonWord>,
    /// `brackets[(a, b)]` for `a < b`: `[g_a, g_b]` truncated to weight `< k`.
    brackets: HashMap<(usize, usize), Vec<(usize, BigInt)>>,
    /// `chains[m][w]` = sorted index tuples of `Λ_m` with total weight `w`.
    pub chains: Vec<BTreeMap<usize, Vec<Vec<usize>>>>,
}

impl WeightGradedComplex {
    pub fn build(n: usize, k: usize, m_max: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition("Koszul complex needs k ≥ 2".into()));
        }
        if m_max < 1 {
            return Err(Error::Precondition("m_max must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let basis: Vec<LyndonWord> = (1..k).flat_map(|w| enumerate_lyndon(n, w)).collect();
        let position: HashMap<&LyndonWord, usize> =
            basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut brackets = HashMap::new();
        for a in 0..basis.len() {
            for b in a + 1..basis.len() {
                if basis[a].weight() + basis[b].weight() >= k {
                    continue;
                }
                let sc = bracket_basis(n, &basis[a], &basis[b])?;
                let mut terms = Vec::new();
                for (w, c) in sc.iter() {
                    if !c.is_integer() {
                        return Err(Error::Invalid(format!(
                            "non-integral structure constant {c}"
                        )));
                    }
                    terms.push((position[w], c.to_integer()));
                }
                if !terms.is_empty() {
                    brackets.insert((a, b), terms);
                }
            }
        }
        let weights: Vec<usize> = basis.iter().map(|b| b.weight()).collect();
        let chains = (0..=m_max + 1)
            .map(|m| {
                let mut by_weight: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
                for c in combinations(basis.len(), m) {
                    let w = c.iter().map(|&i| weights[i]).sum();
                    by_weight.entry(w).or_default().push(c);
                }
                by_weight
            })
            .collect();
        Ok(WeightGradedComplex {
            n,
            k,
            m_max,
            basis,
            brackets,
            chains,
        })
    }

    /// Number of columns of the largest weight block up to degree `m_max + 1`.
    pub fn largest_block(&self) -> usize {
        self.chains
            .iter()
            .flat_map(|c| c.values().map(|v| v.len()))
            .max()
            .unwrap_or(0)
    }

    pub fn chain_basis(&self, m: usize, w: usize) -> &[Vec<usize>] {
        self.chains
            .get(m)
            .and_then(|c| c.get(&w))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn weights(&self, m: usize) -> Vec<usize> {
        self.chains
            .get(m)
            .map(|c| c.keys().copied().collect())
            .unwrap_or_default()
    }

    /// `∂_m(g_1∧…∧g_m) = Σ_{i<j} (-1)^{i+j+1} [g_i,g_j] ∧ g_1∧…ĝ_i…ĝ_j…∧g_m`.
    pub fn boundary_of(&self, tuple: &[usize]) -> Vec<(Vec<usize>, BigInt)> {
        let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
        let m = tuple.len();
        for i in 0..m {
            for j in i + 1..m {
                let Some(terms) = self.brackets.get(&(tuple[i], tuple[j])) else {
                    continue;
                };
                // 1-based positions i+1, j+1
                let sign: i64 = if (i + j + 2 + 1) % 2 == 0 { 1 } else { -1 };
                let rest: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != i && p != j)
                    .map(|(_, &g)| g)
                    .collect();
                for (h, c) in terms {
                    if rest.contains(h) {
                        continue;
                    }
                    let pos = rest.iter().filter(|&&g| g < *h).count();
                    let mut t = rest.clone();
                    t.insert(pos, *h);
                    let s = if pos % 2 == 0 { sign } else { -sign };
                    *acc.entry(t).or_insert_with(BigInt::zero) += c * s;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Integer matrix of `∂_m: Λ_m^{(w)} → Λ_{m-1}^{(w)}` (rows: targets).
    pub fn boundary_matrix(&self, m: usize, w: usize) -> ZMatrix {
        let cols = self.chain_basis(m, w);
        let rows = if m == 0 {
            &[][..]
        } else {
            self.chain_basis(m - 1, w)
        };
        let row_pos: HashMap<&Vec<usize>, usize> =
            rows.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut mat = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
        for (c, t) in cols.iter().enumerate() {
            for (target, coeff) in self.boundary_of(t) {
                mat[row_pos[&target]][c] = coeff;
            }
        }
        mat
    }

    /// `∂_{m-1} ∘ ∂_m = 0` on every weight block for `m ≤ m_max + 1`.
    pub fn verify_square_zero(&self) -> bool {
        for m in 2..=self.m_max + 1 {
            for w in self.weights(m) {
                let a = self.boundary_matrix(m - 1, w);
                let b = self.boundary_matrix(m, w);
                let inner = self.chain_basis(m - 1, w).len();
                let cols = self.chain_basis(m, w).len();
                if snf::multiply(&a, &b, inner, cols)
                    .iter()
                    .flatten()
                    .any(|x| !x.is_zero())
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn homology(&self, m: usize) -> Result<HomologyResult> {
        if m > self.m_max {
            return Err(Error::Precondition(format!(
                "complex built up to degree {}, asked for H_{m}",
                self.m_max
            )));
        }
        let mut per_weight = BTreeMap::new();
        for w in self.weights(m) {
            let dim = self.chain_basis(m, w).len();
            let out_rank = if m == 0 {
                0
            } else {
                snf::invariant_factors(self.boundary_matrix(m, w)).len()
            };
            let (in_rank, torsion) = snf::rank_and_torsion(self.boundary_matrix(m + 1, w));
            let rank = dim - out_rank - in_rank;
            if rank > 0 || !torsion.is_empty() {
                per_weight.insert(
                    w,
                    WeightHomology {
                        rank,
                        torsion: torsion.iter().map(|t| t.to_string()).collect(),
                    },
                );
            }
        }
        Ok(HomologyResult {
            n: self.n,
            k: self.k,
            degree: m,
            per_weight,
        })
    }

    /// Cycles, boundaries and homology representatives of `(m, w)` over Q.
    fn rational_homology(&self, m: usize, w: usize) -> RationalHomology {
        let dim = self.chain_basis(m, w).len();
        let to_q = |mat: ZMatrix| -> Vec<Vec<Q>> {
            mat.into_iter()
                .map(|r| r.into_iter().map(Q::from_integer).collect())
                .collect()
        };
        let cycles = if m == 0 {
            identity(dim)
        } else {
            let d = to_q(self.boundary_matrix(m, w));
            if d.is_empty() {
                identity(dim)
            } else {
                linalg::nullspace(&d, dim)
            }
        };
        let dnext = to_q(self.boundary_matrix(m + 1, w));
        let ncols = self.chain_basis(m + 1, w).len();
        let boundary_cols: Vec<Vec<Q>> = (0..ncols)
            .map(|c| dnext.iter().map(|row| row[c].clone()).collect())
            .collect();
        let bpick = linalg::extend_independent(&[], &boundary_cols, dim);
        let boundaries: Vec<Vec<Q>> = bpick.iter().map(|&i| boundary_cols[i].clone()).collect();
        let rpick = linalg::extend_independent(&boundaries, &cycles, dim);
        let reps = rpick.iter().map(|&i| cycles[i].clone()).collect();
        RationalHomology { boundaries, reps }
    }
}

struct RationalHomology {
    boundaries: Vec<Vec<Q>>,
    reps: Vec<Vec<Q>>,
}

fn identity(d: usize) -> Vec<Vec<Q>> {
    (0..d)
        .map(|i| {
            let mut v = vec![Q::zero(); d];
            v[i] = Q::from_integer(1.into());
            v
        })
        .collect()
}

/// All strictly increasing `m`-tuples from `0..len`.
fn combinations(len: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, len: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < m - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, len, m, cur, out);
            cur.pop();
        }
    }
    rec(0, len, m, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightHomology {
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub n: usize,
    pub k: usize,
    pub degree: usize,
    pub per_weight: BTreeMap<usize, WeightHomology>,
}

impl HomologyResult {
    pub fn rank_at(&self, w: usize) -> usize {
        self.per_weight.get(&w).map_or(0, |h| h.rank)
    }

    pub fn total_rank(&self) -> usize {
        self.per_weight.values().map(|h| h.rank).sum()
    }

    pub fn torsion_free(&self) -> bool {
        self.per_weight.values().all(|h| h.torsion.is_empty())
    }

    /// `"a⊕b⊕…"` over the weights `k+1 ..= 2k-1` (a single entry for `k = 2`).
    pub fn table_cell(&self) -> String {
        (self.k + 1..=2 * self.k - 1)
            .map(|w| self.rank_at(w).to_string())
            .collect::<Vec<_>>()
            .join("⊕")
    }
}

/// `H_i` of `L/L_{≥k}` computed directly.
pub fn homology(n: usize, k: usize, i: usize) -> Result<HomologyResult> {
    WeightGradedComplex::build(n, k, i.max(1))?.homology(i)
}

/// `H_3` weight decomposition from the rank formula: weight `w ∈ [k+1, 2k-1]`
/// carries `D_{w-1}`.
pub fn h3_formula(n: u64, k: u64) -> Vec<BigInt> {
    (k..=2 * k - 2).map(|i| d_rank(n, i)).collect()
}

pub fn h3_formula_cell(n: u64, k: u64) -> String {
    h3_formula(n, k)
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("⊕")
}

/// Rank of `π_3` of the complete space: `Σ_{i=k}^{2k-1} D_i`.
pub fn pi3_rank(n: u64, k: u64) -> BigInt {
    (k..=2 * k - 1).map(|i| d_rank(n, i)).sum()
}

/// The map `H_i^{(w)}(L/L_{≥k_from}) → H_i^{(w)}(L/L_{≥k_to})` over Q.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionMap {
    pub n: usize,
    pub k_from: usize,
    pub k_to: usize,
    pub degree: usize,
    pub weight: usize,
    pub source_rank: usize,
    pub target_rank: usize,
    /// `target_rank × source_rank`, entries as decimal fractions.
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
}

impl ReductionMap {
    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source_rank == self.target_rank && self.rank == self.source_rank
    }
}

/// Pair of complexes for computing reduction maps at several weights.
pub struct ReductionContext {
    source: WeightGradedComplex,
    target: WeightGradedComplex,
}

impl ReductionContext {
    pub fn new(n: usize, k_from: usize, k_to: usize, m_max: usize) -> Result<Self> {
        if k_from < k_to {
            return Err(Error::Precondition(format!(
                "reduction goes from a higher level: {k_from} < {k_to}"
            )));
        }
        Ok(ReductionContext {
            source: WeightGradedComplex::build(n, k_from, m_max)?,
            target: WeightGradedComplex::build(n, k_to, m_max)?,
        })
    }

    pub fn map(&self, i: usize, w: usize) -> Result<ReductionMap> {
        let (s, t) = (&self.source, &self.target);
        if i > s.m_max {
            return Err(Error::Precondition(format!("degree {i} above m_max")));
        }
        // chain map: basis elements of weight ≥ k_to are killed
        let tpos: HashMap<&LyndonWord, usize> =
            t.basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let tchains: HashMap<&Vec<usize>, usize> = t
            .chain_basis(i, w)
            .iter()
            .enumerate()
            .map(|(p, c)| (c, p))
            .collect();
        let tdim = t.chain_basis(i, w).len();
        let image_of = |v: &[Q]| -> Vec<Q> {
            let mut out = vec![Q::zero(); tdim];
            for (tuple, c) in s.chain_basis(i, w).iter().zip(v) {
                if c.is_zero() {
                    continue;
                }
                let mapped: Option<Vec<usize>> = tuple
                    .iter()
                    .map(|&g| tpos.get(&s.basis[g]).copied())
                    .collect();
                if let Some(m) = mapped {
                    // the order on B is preserved, so the tuple stays sorted
                    out[tchains[&m]] += c;
                }
            }
            out
        };
        let sh = s.rational_homology(i, w);
        let th = t.rational_homology(i, w);
        let mut matrix = Vec::new();
        let mut images = Vec::new();
        for rep in &sh.reps {
            let img = image_of(rep);
            let mut cols = th.boundaries.clone();
            cols.extend(th.reps.iter().cloned());
            let x = linalg::solve_columns(&cols, &img)
                .ok_or_else(|| Error::Invalid("image of a cycle is not a cycle".into()))?;
            let coords: Vec<Q> = x[th.boundaries.len()..].to_vec();
            images.push(coords.clone());
            matrix.push(coords);
        }
        let rank = if images.is_empty() || th.reps.is_empty() {
            0
        } else {
            linalg::rank(
                &linalg::columns_to_matrix(&images, th.reps.len()),
                images.len(),
            )
        };
        // store as target × source
        let matrix: Vec<Vec<String>> = (0..th.reps.len())
            .map(|r| matrix.iter().map(|col| col[r].to_string()).collect())
            .collect();
        Ok(ReductionMap {
            n: s.n,
            k_from: s.k,
            k_to: t.k,
            degree: i,
            weight: w,
            source_rank: sh.reps.len(),
            target_rank: th.reps.len(),
            matrix,
            rank,
        })
    }

    /// Weights at which either side has chains in degree `i`.
    pub fn weights(&self, i: usize) -> Vec<usize> {
        let mut w = self.source.weights(i);
        w.extend(self.target.weights(i));
        w.sort_unstable();
        w.dedup();
        w
    }
}

pub fn reduction_map(
    n: usize,
    k_from: usize,
    k_to: usize,
    i: usize,
    w: usize,
) -> Result<ReductionMap> {
    ReductionContext::new(n, k_from, k_to, i.max(1))?.map(i, w)
}

/// Column count of the largest weight block needed for `H_i` of `L/L_{≥k}`,
/// computed from binomial counts without building the complex.
pub fn estimate_block(n: usize, k: usize, m_max: usize) -> u128 {
    let weights: Vec<usize> = (1..k)
        .flat_map(|w| {
            let c = crate::lyndon::witt_rank(n as u64, w as u64)
                .to_usize()
                .unwrap_or(usize::MAX);
            std::iter::repeat_n(w, c.min(1 << 20))
        })
        .collect();
    let max_w = (k - 1) * (m_max + 1);
    // count[m][w]: number of m-subsets with total weight w
    let mut count = vec![vec![0u128; max_w + 1]; m_max + 2];
    count[0][0] = 1;
    for &wt in &weights {
        for m in (1..=m_max + 1).rev() {
            for w in (wt..=max_w).rev() {
                count[m][w] = count[m][w].saturating_add(count[m - 1][w - wt]);
            }
        }
    }
    count.iter().flatten().copied().max().unwrap_or(0)
}
