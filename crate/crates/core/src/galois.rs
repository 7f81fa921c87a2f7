//! Simulated Galois-like automorphisms `x_i ↦ y_i⁻¹ x_i^χ y_i` of the truncated
//! free pro-ℓ group: Johnson depth, ℓ-adic Milnor invariants and the vanishing
//! criteria for the Orr invariants `θ_k`, `τ_k`.
//!
//! Composition follows `φ(σ₁σ₂) = φ(σ₁) ∘ φ(σ₂)`, so
//! `y_i(σ₁σ₂) = y_i(σ₁) · σ₁(y_i(σ₂))` and `χ(σ₁σ₂) = χ(σ₁)χ(σ₂)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyndon::{format_index, realize_series};
use crate::magnus::{coefficient, expand, power_expand, unflatten, Depth, MagnusSeries};
use crate::ring::{factorial_valuation, Ring};
use crate::words::Word;

/// Automorphism data as read from a JSON config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaloisConfig {
    pub n: usize,
    #[serde(rename = "K")]
    pub degree: usize,
    pub ell: u64,
    #[serde(rename = "M")]
    pub m: u32,
    /// Residue as a decimal string (a bare integer is accepted too).
    pub chi: serde_json::Value,
    pub y: Vec<String>,
    #[serde(default)]
    pub strict_x0: bool,
    /// Precision `M'` of `chi`; defaults to `M + v_ℓ(K!)`.
    #[serde(default)]
    pub guard: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisAutomorphism {
    n: usize,
    degree: usize,
    ell: u64,
    m: u32,
    guard: u32,
    chi: BigInt,
    y: Vec<Word>,
    strict_x0: bool,
}

/// One Milnor invariant `μ(σ; J)` keyed by its index string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Invariant {
    pub index: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauReport {
    pub k: usize,
    pub max_length: usize,
    pub vanishes: bool,
    pub witness: Option<Invariant>,
}

#[derive(Debug, Clone, Serialize)]
pub struct N2Report {
    pub k: usize,
    pub invariants: Vec<Invariant>,
    pub vanishes: bool,
    /// `tau_vanishes(σ, k)` over all invariants, when `2k-1 ≤ K`.
    pub tau_vanishes: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelStatus {
    Vacuous,
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct TowerLevel {
    pub level: usize,
    pub max_length: usize,
    pub status: LevelStatus,
    pub witness: Option<Invariant>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TowerReport {
    pub m: usize,
    pub l: usize,
    pub levels: Vec<TowerLevel>,
    pub first_failure: Option<usize>,
    pub verdict: bool,
}

fn parse_residue(v: &serde_json::Value) -> Result<BigInt> {
    let text = match v {
        serde_json::Value::String(s) => s.trim().to_string(),
        serde_json::Value::Number(n) => n.to_string(),
        other => {
            return Err(Error::Invalid(format!(
                "chi must be an integer residue, got {other}"
            )))
        }
    };
    text.parse()
        .map_err(|_| Error::Invalid(format!("chi: '{text}' is not an integer")))
}

fn pow_ell(ell: u64, e: u32) -> BigInt {
    BigInt::from(ell).pow(e)
}

impl GaloisAutomorphism {
    /// Builds and normalizes `y_i ← x_i^{-c} y_i`; in strict mode the
    /// constraint `σ(x_0) = x_0^χ` must hold.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        degree: usize,
        ell: u64,
        m: u32,
        guard: Option<u32>,
        chi: BigInt,
        y: Vec<Word>,
        strict_x0: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ring::mod_prime_power(ell, m)?;
        if degree == 0 {
            return Err(Error::Precondition(
                "truncation K must be at least 1".into(),
            ));
        }
        if y.len() != n {
            return Err(Error::RankMismatch(n, y.len()));
        }
        let needed = m + factorial_valuation(ell, degree);
        let guard = guard.unwrap_or(needed);
        if guard < needed {
            return Err(Error::InsufficientGuard {
                needed: format!("{ell}^{needed}"),
                given: format!("{ell}^{guard}"),
            });
        }
        let chi = chi.mod_floor(&pow_ell(ell, guard));
        if chi.is_multiple_of(&BigInt::from(ell)) {
            return Err(Error::Precondition(format!(
                "chi = {chi} is not a unit mod {ell}"
            )));
        }
        let mut normalized = Vec::with_capacity(n);
        for (i, w) in y.into_iter().enumerate() {
            if w.n() != n {
                return Err(Error::RankMismatch(n, w.n()));
            }
            let c = w.abelianization()[i].clone();
            normalized.push(Word::power_of_generator(n, i + 1, -c)?.multiply(&w)?);
        }
        let sigma = GaloisAutomorphism {
            n,
            degree,
            ell,
            m,
            guard,
            chi,
            y: normalized,
            strict_x0,
        };
        if strict_x0 && !sigma.x0_constraint_holds()? {
            return Err(Error::Precondition("σ(x_0) ≠ x_0^χ (strict_x0)".into()));
        }
        Ok(sigma)
    }

    pub fn identity(n: usize, degree: usize, ell: u64, m: u32) -> Result<Self> {
        let y = (0..n)
            .map(|_| Word::identity(n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, degree, ell, m, None, BigInt::one(), y, false)
    }

    pub fn from_config(c: &GaloisConfig) -> Result<Self> {
        let chi = parse_residue(&c.chi)?;
        let y =
            c.y.iter()
                .enumerate()
                .map(|(i, s)| {
                    Word::parse(s, c.n).map_err(|e| match e {
                        Error::Parse {
                            line,
                            column,
                            message,
                        } => Error::Parse {
                            line,
                            column,
                            message: format!("y[{}]: {message}", i + 1),
                        },
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        Self::new(c.n, c.degree, c.ell, c.m, c.guard, chi, y, c.strict_x0)
    }

    /// Parse a JSON config; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: GaloisConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_config(&c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    pub fn chi(&self) -> &BigInt {
        &self.chi
    }

    pub fn y(&self) -> &[Word] {
        &self.y
    }

    pub fn ring(&self) -> Ring {
        Ring::ModPrimePower {
            ell: self.ell,
            m: self.m,
        }
    }

    pub fn to_config(&self) -> GaloisConfig {
        GaloisConfig {
            n: self.n,
            degree: self.degree,
            ell: self.ell,
            m: self.m,
            chi: serde_json::Value::String(self.chi.to_string()),
            y: self.y.iter().map(|w| w.to_string()).collect(),
            strict_x0: self.strict_x0,
            guard: Some(self.guard),
        }
    }

    fn same_parameters(&self, other: &Self) -> Result<()> {
        if (self.n, self.degree, self.ell, self.m, self.guard)
            != (other.n, other.degree, other.ell, other.m, other.guard)
        {
            return Err(Error::Precondition(
                "automorphisms have different parameters (n, K, ℓ, M, M')".into(),
            ));
        }
        Ok(())
    }

    /// Series of `σ(x_i) = y_i⁻¹ x_i^χ y_i`.
    pub fn generator_image(&self, i: usize) -> Result<MagnusSeries> {
        let ring = self.ring();
        let yi = expand(&self.y[i - 1], self.degree, &ring)?;
        let p = power_expand(self.n, i, &self.chi, self.guard, self.degree, &ring)?;
        yi.inverse()?.multiply(&p)?.multiply(&yi)
    }

    /// Magnus expansion of `σ(w)` to degree `K` over `Z/ℓ^M`.
    pub fn apply(&self, w: &Word) -> Result<MagnusSeries> {
        if w.n() != self.n {
            return Err(Error::RankMismatch(self.n, w.n()));
        }
        let ring = self.ring();
        let q = pow_ell(self.ell, self.guard);
        let ys = self
            .y
            .iter()
            .map(|y| {
                let s = expand(y, self.degree, &ring)?;
                Ok((s.inverse()?, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = MagnusSeries::one(self.n, self.degree, ring)?;
        for s in w.syllables() {
            let (yinv, y) = &ys[s.generator - 1];
            let c = (&self.chi * &s.exponent).mod_floor(&q);
            out = out
                .multiply(yinv)?
                .mul_generator_power(s.generator, &c)?
                .multiply(y)?;
        }
        Ok(out)
    }

    /// `x_0 = (x_n ⋯ x_1)⁻¹`.
    pub fn x0(&self) -> Result<Word> {
        let mut w = Word::identity(self.n)?;
        for i in (1..=self.n).rev() {
            w = w.multiply(&Word::generator(self.n, i)?)?;
        }
        Ok(w.invert())
    }

    /// Whether `σ(x_0) = x_0^χ` holds to degree `K` mod `ℓ^M`.
    pub fn x0_constraint_holds(&self) -> Result<bool> {
        let x0 = self.x0()?;
        let lhs = self.apply(&x0)?;
        let rhs = expand(&x0, self.degree, &self.ring())?.pow(&self.chi)?;
        Ok(lhs == rhs)
    }

    /// `σ₁ ∘ σ₂`, computed on words with the integer representative of `χ₁`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_parameters(other)?;
        let n = self.n;
        let y = (0..n)
            .map(|i| {
                let twisted = other.y[i].substitute(|j, e| {
                    let yj = &self.y[j - 1];
                    yj.invert()
                        .multiply(&Word::power_of_generator(n, j, &self.chi * e)?)?
                        .multiply(yj)
                })?;
                self.y[i].multiply(&twisted)
            })
            .collect::<Result<Vec<_>>>()?;
        let chi = (&self.chi * &other.chi).mod_floor(&pow_ell(self.ell, self.guard));
        Self::new(
            n,
            self.degree,
            self.ell,
            self.m,
            Some(self.guard),
            chi,
            y,
            false,
        )
    }

    /// Inverse for `χ = 1`: solve `y_i σ(z_i) = 1` by fixed-point iteration
    /// `z ← z · (y σ(z))⁻¹` on series, then realize `z_i` as words.
    pub fn inverse(&self) -> Result<Self> {
        if !self.chi.is_one() {
            return Err(Error::Precondition(
                "inverse is only available for χ = 1".into(),
            ));
        }
        let ring = self.ring();
        let images = (1..=self.n)
            .map(|i| self.generator_image(i))
            .collect::<Result<Vec<_>>>()?;
        let ys = self
            .y
            .iter()
            .map(|w| expand(w, self.degree, &ring))
            .collect::<Result<Vec<_>>>()?;
        let mut zs = ys.iter().map(|s| s.inverse()).collect::<Result<Vec<_>>>()?;
        let one = MagnusSeries::one(self.n, self.degree, ring)?;
        for _ in 0..=self.degree {
            let mut done = true;
            for (z, y) in zs.iter_mut().zip(&ys) {
                let e = y.multiply(&z.substitute(&images)?)?;
                if e != one {
                    done = false;
                    *z = z.multiply(&e.inverse()?)?;
                }
            }
            if done {
                break;
            }
        }
        let y = zs
            .iter()
            .map(|z| realize_series(z, self.degree + 1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            self.n,
            self.degree,
            self.ell,
            self.m,
            Some(self.guard),
            BigInt::one(),
            y,
            false,
        )
    }

    /// `ψ σ ψ⁻¹` for the basing change `ψ: x_i ↦ w_i⁻¹ x_i w_i`.
    pub fn basing_twist(&self, w: Vec<Word>) -> Result<Self> {
        let psi = Self::new(
            self.n,
            self.degree,
            self.ell,
            self.m,
            Some(self.guard),
            BigInt::one(),
            w,
            false,
        )?;
        psi.compose(self)?.compose(&psi.inverse()?)
    }

    /// Largest `k ≤ cap` with `χ ≡ 1 (mod ℓ^M)` and every `y_i ∈ Γ_k`.
    pub fn johnson_depth(&self, cap: usize) -> Result<Depth> {
        let ring = self.ring();
        if !ring.is_one(&self.chi) {
            return Ok(Depth::Exact(0));
        }
        let cap = cap.min(self.degree);
        let mut d = Depth::AtLeast(cap + 1);
        for w in &self.y {
            d = d.min(expand(w, cap, &ring)?.depth());
        }
        Ok(d)
    }

    pub fn depth(&self) -> Result<Depth> {
        self.johnson_depth(self.degree)
    }

    /// `μ(σ; (i_1 ⋯ i_k i)) = μ((i_1 ⋯ i_k); y_i)` mod `ℓ^M`.
    pub fn milnor_invariant(&self, j: &[usize]) -> Result<BigInt> {
        if j.len() < 2 {
            return Err(Error::Precondition("Milnor invariants need |J| ≥ 2".into()));
        }
        let (last, head) = j.split_last().expect("nonempty");
        if *last == 0 || *last > self.n {
            return Err(Error::GeneratorOutOfRange {
                index: *last,
                n: self.n,
            });
        }
        coefficient(&self.y[last - 1], head, self.degree, &self.ring())
    }

    /// All nonzero invariants of length `len`, keyed and ordered by index.
    pub fn invariants_of_length(&self, len: usize) -> Result<BTreeMap<Vec<usize>, BigInt>> {
        if len < 2 || len > self.degree + 1 {
            return Err(Error::IndexTooLong {
                len: len.saturating_sub(1),
                degree: self.degree,
            });
        }
        let ring = self.ring();
        let d = len - 1;
        let per_y = self
            .y
            .par_iter()
            .map(|w| expand(w, d, &ring))
            .collect::<Result<Vec<_>>>()?;
        let mut out = BTreeMap::new();
        for (i, s) in per_y.iter().enumerate() {
            for (pos, c) in s.block(d).iter().enumerate() {
                if !ring.is_zero(c) {
                    let mut j = unflatten(self.n, d, pos);
                    j.push(i + 1);
                    out.insert(j, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Lexicographically smallest nonzero invariant of minimal length in `2..=max_len`.
    pub fn first_nonvanishing(&self, max_len: usize) -> Result<Option<Invariant>> {
        for len in 2..=max_len {
            if let Some((j, v)) = self.invariants_of_length(len)?.into_iter().next() {
                return Ok(Some(Invariant {
                    index: format_index(&j),
                    value: v.to_string(),
                }));
            }
        }
        Ok(None)
    }

    pub fn theta_defined(&self, k: usize) -> Result<bool> {
        if k > self.degree {
            return Err(Error::Precondition(format!(
                "k = {k} exceeds truncation K = {}",
                self.degree
            )));
        }
        Ok(self.depth()?.at_least(k))
    }

    /// `τ_k(σ) = 0` iff every invariant of length `≤ 2k-1` vanishes.
    pub fn tau_vanishes(&self, k: usize) -> Result<TauReport> {
        if k < 2 {
            return Err(Error::Precondition("τ_k needs k ≥ 2".into()));
        }
        let max_length = 2 * k - 1;
        if max_length > self.degree {
            return Err(Error::Precondition(format!(
                "τ_{k} needs 2k-1 = {max_length} ≤ K = {}",
                self.degree
            )));
        }
        let depth = self.depth()?;
        if !depth.at_least(k) {
            return Err(Error::Precondition(format!(
                "τ_{k} is not defined: Johnson depth {depth} < {k}"
            )));
        }
        let witness = if depth.at_least(max_length) {
            None
        } else {
            self.first_nonvanishing(max_length)?
        };
        Ok(TauReport {
            k,
            max_length,
            vanishes: witness.is_none(),
            witness,
        })
    }

    /// The invariants controlling `τ_k` for two generators, `k ∈ {2, 3, 4}`.
    pub fn n2_report(&self, k: usize) -> Result<N2Report> {
        if self.n != 2 {
            return Err(Error::Precondition(format!(
                "n2 report needs n = 2, got n = {}",
                self.n
            )));
        }
        let indices: &[&[usize]] = match k {
            2 => &[],
            3 => &[&[1, 2, 2, 1]],
            4 => &[
                &[1, 1, 1, 2, 2, 1],
                &[1, 2, 1, 2, 2, 1],
                &[1, 2, 2, 2, 2, 1],
            ],
            _ => {
                return Err(Error::Precondition(format!(
                    "n2 report covers k ∈ {{2, 3, 4}}, got {k}"
                )))
            }
        };
        let depth = self.depth()?;
        if !depth.at_least(k) {
            return Err(Error::Precondition(format!(
                "τ_{k} is not defined: Johnson depth {depth} < {k}"
            )));
        }
        let invariants = indices
            .iter()
            .map(|j| {
                Ok(Invariant {
                    index: format_index(j),
                    value: self.milnor_invariant(j)?.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let vanishes = invariants.iter().all(|i| i.value == "0");
        let tau_vanishes = if 2 * k - 1 <= self.degree {
            Some(self.tau_vanishes(k)?.vanishes)
        } else {
            None
        };
        Ok(N2Report {
            k,
            invariants,
            vanishes,
            tau_vanishes,
        })
    }

    /// Lifting ladder for `θ_m` on `G[l]`: level `j` (from `m` to `2m-1`)
    /// passes when all invariants of length `≤ j+1` vanish. Levels below `l`
    /// vanish automatically on the restriction and are marked vacuous; they
    /// fail only if `σ` is not in `G[l]` after all.
    pub fn obstruction_tower(&self, m: usize, l: usize) -> Result<TowerReport> {
        if m < 1 || m > l || l > self.degree {
            return Err(Error::Precondition(format!(
                "need 1 ≤ m ≤ l ≤ K, got m = {m}, l = {l}, K = {}",
                self.degree
            )));
        }
        if 2 * m > self.degree + 1 {
            return Err(Error::Precondition(format!(
                "tower for m = {m} needs invariants of length {} > K + 1",
                2 * m
            )));
        }
        let mut levels = Vec::new();
        let mut first_failure = None;
        for j in m..2 * m {
            let witness = self.first_nonvanishing(j + 1)?;
            let status = match (&witness, j < l) {
                (Some(_), _) => LevelStatus::Fail,
                (None, true) => LevelStatus::Vacuous,
                (None, false) => LevelStatus::Pass,
            };
            if status == LevelStatus::Fail && first_failure.is_none() {
                first_failure = Some(j);
            }
            levels.push(TowerLevel {
                level: j,
                max_length: j + 1,
                status,
                witness,
            });
        }
        Ok(TowerReport {
            m,
            l,
            verdict: first_failure.is_none(),
            levels,
            first_failure,
        })
    }

    /// The `θ_m` cocycle vanishes on `σ` iff `σ ∈ G[2m]`.
    pub fn theta_cocycle_vanishes(&self, m: usize) -> Result<bool> {
        Ok(self.johnson_depth(2 * m)?.at_least(2 * m))
    }

    /// Checks `(2k)! (1 - ℓ^{2k}) μ(σ; (1 2^{2k} 1)) ≡ χ_{2k+1}` mod `ℓ^M`
    /// for a user-supplied character value.
    pub fn ihara_consistent(&self, k: usize, chi_value: &BigInt) -> Result<bool> {
        let mut j = vec![1];
        j.extend(std::iter::repeat_n(2, 2 * k));
        j.push(1);
        let mu = self.milnor_invariant(&j)?;
        let fact: BigInt = (1..=2 * k).map(BigInt::from).product();
        let e = u32::try_from(2 * k).map_err(|_| Error::Invalid("k too large".into()))?;
        let factor = BigInt::one() - pow_ell(self.ell, e);
        let ring = self.ring();
        Ok(ring.reduce(fact * factor * mu) == ring.reduce(chi_value.clone()))
    }

    /// JSON report for `depth | milnor | tau | tower | n2`.
    pub fn report_json(
        &self,
        report: &str,
        k: Option<usize>,
        l: Option<usize>,
    ) -> Result<serde_json::Value> {
        let header = serde_json::json!({
            "n": self.n,
            "K": self.degree,
            "ell": self.ell,
            "M": self.m,
            "guard": self.guard,
            "chi": self.chi.to_string(),
            "y": self.y.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        });
        let need_k =
            || k.ok_or_else(|| Error::Precondition(format!("report '{report}' needs --k")));
        let body = match report {
            "depth" => {
                let d = self.depth()?;
                serde_json::json!({
                    "depth": d,
                    "x0_constraint": self.x0_constraint_holds()?,
                })
            }
            "milnor" => {
                let max_len = k.unwrap_or(self.degree + 1);
                let mut table = serde_json::Map::new();
                for len in 2..=max_len {
                    for (j, v) in self.invariants_of_length(len)? {
                        table.insert(format_index(&j), serde_json::Value::String(v.to_string()));
                    }
                }
                serde_json::json!({ "max_length": max_len, "nonzero": table })
            }
            "tau" => serde_json::to_value(self.tau_vanishes(need_k()?)?).expect("serializable"),
            "n2" => serde_json::to_value(self.n2_report(need_k()?)?).expect("serializable"),
            "tower" => {
                let m = need_k()?;
                let l = l.unwrap_or(m);
                let mut v =
                    serde_json::to_value(self.obstruction_tower(m, l)?).expect("serializable");
                v["theta_cocycle_vanishes"] = self.theta_cocycle_vanishes(m)?.into();
                v
            }
            other => {
                return Err(Error::Invalid(format!(
                    "unknown report '{other}' (expected depth, milnor, tau, tower or n2)"
                )))
            }
        };
        Ok(serde_json::json!({ "automorphism": header, "report": report, "result": body }))
    }
}
