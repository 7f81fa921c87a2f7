//! Acceptance run: one PASS/FAIL line per criterion with its runtime.
//! Two criteria fail for mathematical reasons; for those the run checks that
//! the failure is exactly the known one, and exits nonzero on anything else.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use orrkit::galois::GaloisAutomorphism;
use orrkit::genfun::{cyclotomic_identity, dk_identity};
use orrkit::jacobi::{ct_dimension, palindromic_vanishing};
use orrkit::koszul::{h3_formula_cell, homology, ReductionContext};
use orrkit::lyndon::{d_rank, witt_rank};
use orrkit::massey::dual_basis_matrix;
use orrkit::words::Word;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

const TABLE1: [[u64; 8]; 8] = [
    [1, 2, 3, 6, 9, 18, 30, 56],
    [3, 8, 18, 48, 116, 312, 810, 2184],
    [6, 20, 60, 204, 670, 2340, 8160, 29120],
    [10, 40, 150, 624, 2580, 11160, 48750, 217000],
    [15, 70, 315, 1554, 7735, 39990, 209790, 1119720],
    [21, 112, 588, 3360, 19544, 117648, 720300, 4483696],
    [28, 168, 1008, 6552, 43596, 299592, 2096640, 14913024],
    [36, 240, 1620, 11808, 88440, 683280, 5380020, 43046640],
];

const TABLE2: [[u64; 8]; 8] = [
    [0, 1, 0, 3, 0, 6, 4, 13],
    [1, 6, 6, 28, 36, 126, 246, 672],
    [4, 20, 36, 146, 340, 1200, 3520, 11726],
    [10, 50, 126, 540, 1740, 7050, 26750, 108752],
    [20, 105, 336, 1589, 6420, 30150, 139020, 672483],
    [35, 196, 756, 3976, 19160, 103236, 558404, 3140032],
    [56, 336, 1512, 8820, 49176, 300096, 1860096, 11933292],
    [84, 540, 2772, 17832, 112680, 769500, 5373540, 38747232],
];

const TABLE3: [[&str; 4]; 8] = [
    ["0", "1⊕0", "0⊕3⊕0", "3⊕0⊕6⊕4"],
    ["1", "6⊕6", "6⊕28⊕36", "28⊕36⊕126⊕246"],
    ["4", "20⊕36", "36⊕146⊕340", "146⊕340⊕1200⊕3520"],
    ["10", "50⊕126", "126⊕540⊕1740", "540⊕1740⊕7050⊕26750"],
    ["20", "105⊕336", "336⊕1589⊕6420", "1589⊕6420⊕30150⊕139020"],
    [
        "35",
        "196⊕756",
        "756⊕3976⊕19160",
        "3976⊕19160⊕103236⊕558404",
    ],
    [
        "56",
        "336⊕1512",
        "1512⊕8820⊕49176",
        "8820⊕49176⊕300096⊕1860096",
    ],
    [
        "84",
        "540⊕2772",
        "2772⊕17832⊕112680",
        "17832⊕112680⊕769500⊕5373540",
    ],
];

/// Result of one criterion. `known` is set when the criterion fails and the
/// failure matches the documented counterexample exactly.
struct Verdict {
    pass: bool,
    detail: String,
    known: bool,
}

impl Verdict {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
            known: false,
        }
    }
}

fn table1() -> Verdict {
    let mut bad = Vec::new();
    for (r, row) in TABLE1.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let (n, k) = (r as u64 + 2, c as u64 + 2);
            if witt_rank(n, k) != BigInt::from(want) {
                bad.push(format!("N_{k}({n})"));
            }
        }
    }
    Verdict::check(bad.is_empty(), format!("64 cells, mismatches: {bad:?}"))
}

fn table2() -> Verdict {
    let mut bad = Vec::new();
    for (r, row) in TABLE2.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let (n, k) = (r as u64 + 2, c as u64 + 2);
            if d_rank(n, k) != BigInt::from(want) {
                bad.push(format!("D_{k}({n})"));
            }
        }
    }
    Verdict::check(bad.is_empty(), format!("64 cells, mismatches: {bad:?}"))
}

fn table3_formula() -> Verdict {
    let mut bad = Vec::new();
    for (r, row) in TABLE3.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let (n, k) = (r as u64 + 2, c as u64 + 2);
            if h3_formula_cell(n, k) != want {
                bad.push(format!("({n},{k})"));
            }
        }
    }
    Verdict::check(bad.is_empty(), format!("32 cells, mismatches: {bad:?}"))
}

fn table3_direct() -> Verdict {
    let mut bad = Vec::new();
    let mut cells = Vec::new();
    for (n, k) in [(2, 2), (2, 3), (2, 4), (2, 5), (3, 3), (3, 4), (4, 3)] {
        let h3 = homology(n, k, 3).unwrap();
        let want = TABLE3[n - 2][k - 2];
        if h3.table_cell() != want || !h3.torsion_free() {
            bad.push(format!(
                "H3({n},{k}) = {} torsion {}",
                h3.table_cell(),
                !h3.torsion_free()
            ));
        }
        // weights outside k+1..2k-1 carry nothing
        if h3
            .per_weight
            .iter()
            .any(|(&w, h)| h.rank > 0 && !(k + 1..=2 * k - 1).contains(&w))
        {
            bad.push(format!("H3({n},{k}) off-range weight"));
        }
        let h1 = homology(n, k, 1).unwrap();
        if h1.total_rank() != n || h1.rank_at(1) != n || !h1.torsion_free() {
            bad.push(format!("H1({n},{k})"));
        }
        let h2 = homology(n, k, 2).unwrap();
        let nk = witt_rank(n as u64, k as u64);
        if BigInt::from(h2.total_rank()) != nk
            || BigInt::from(h2.rank_at(k)) != nk
            || !h2.torsion_free()
        {
            bad.push(format!("H2({n},{k})"));
        }
        cells.push(format!("({n},{k}):{}", h3.table_cell()));
    }
    Verdict::check(
        bad.is_empty(),
        format!("{} ; failures: {bad:?}", cells.join(" ")),
    )
}

/// Required for `n = 2`; `n = 3` is run as well since its ranks are not all zero.
fn reduction_pattern() -> Verdict {
    let k = 3;
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for n in [2, 3] {
        let ctx = ReductionContext::new(n, k + 1, k, 3).unwrap();
        for w in ctx.weights(3) {
            let m = ctx.map(3, w).unwrap();
            let expect_zero = [k + 1, 2 * k, 2 * k + 1].contains(&w);
            let ok = if expect_zero {
                m.is_zero()
            } else {
                m.is_isomorphism()
            };
            if !ok {
                bad.push(format!(
                    "n={n} w={w} rank {} ({}→{})",
                    m.rank, m.source_rank, m.target_rank
                ));
            }
            if m.source_rank + m.target_rank > 0 {
                seen.push(format!(
                    "n{n} w{w}:{}→{} rank {}",
                    m.source_rank, m.target_rank, m.rank
                ));
            }
        }
        for w in ctx.weights(2) {
            if !ctx.map(2, w).unwrap().is_zero() {
                bad.push(format!("n={n} H2 w={w} nonzero"));
            }
        }
    }
    Verdict::check(
        bad.is_empty(),
        format!("H3 {} ; H2 maps zero ; failures: {bad:?}", seen.join(", ")),
    )
}

/// The product formula for `D_k` is false at `z^1`: `n(n+1)/2` against `n² - 2n`.
fn generating_identities() -> Verdict {
    let mut cyclotomic_ok = true;
    let mut dk_ok = true;
    let mut dk_as_known = true;
    let mut notes = Vec::new();
    for n in 2..=4u64 {
        cyclotomic_ok &= cyclotomic_identity(n, 12).pass;
        let r = dk_identity(n, 12);
        dk_ok &= r.pass;
        match &r.first_mismatch {
            Some(m) => {
                notes.push(format!("n={n}: z^{} {} vs {}", m.degree, m.lhs, m.rhs));
                dk_as_known &= m.degree == 1
                    && m.lhs == (n * (n + 1) / 2).to_string()
                    && m.rhs == (n * n - 2 * n).to_string();
            }
            None => dk_as_known = false,
        }
    }
    let pass = cyclotomic_ok && dk_ok;
    Verdict {
        pass,
        detail: format!(
            "cyclotomic {} ; D_k product {} ({})",
            if cyclotomic_ok { "holds" } else { "FAILS" },
            if dk_ok { "holds" } else { "fails" },
            notes.join("; ")
        ),
        known: !pass && cyclotomic_ok && dk_as_known,
    }
}

/// At `(3,3)` the Lyndon word 132 appears in `e(123) = [x1,[x2,x3]]`, so one
/// off-diagonal entry is `-1`; the matrix stays unitriangular.
fn massey_dual() -> Verdict {
    let mut failing = Vec::new();
    let mut as_known = true;
    for (n, k) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)] {
        let m = dual_basis_matrix(n, k).unwrap();
        if m.is_signed_identity() {
            continue;
        }
        let off: Vec<_> = m
            .off_diagonal()
            .into_iter()
            .map(|(i, j, x)| format!("M[{i}][{j}]={x}"))
            .collect();
        as_known &= (n, k) == (3, 3) && m.is_signed_unitriangular() && off == ["M[132][123]=-1"];
        failing.push(format!("({n},{k}): {}", off.join(" ")));
    }
    let pass = failing.is_empty();
    Verdict {
        pass,
        detail: if pass {
            "all five matrices are (-1)^{k+1}·I".into()
        } else {
            format!("not ±I at {}", failing.join("; "))
        },
        known: !pass && as_known,
    }
}

fn run_property<S, F>(name: &str, strategy: S, test: F, failures: &mut Vec<String>)
where
    S: proptest::strategy::Strategy,
    F: Fn(S::Value) -> Result<(), proptest::test_runner::TestCaseError>,
{
    let config = Config {
        cases: common::CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    match runner.run(&strategy, test) {
        Ok(()) => {}
        Err(TestError::Fail(reason, value)) => {
            failures.push(format!("{name}: {reason} at {value:?}"))
        }
        Err(TestError::Abort(reason)) => failures.push(format!("{name}: aborted ({reason})")),
    }
}

fn property_suite() -> Verdict {
    use common::*;
    let mut failures = Vec::new();
    run_property(
        "comultiplication",
        (word(3, 6), word(3, 6), index(3, 1, 5)),
        |(a, b, i)| comultiplication(&a, &b, &i),
        &mut failures,
    );
    run_property(
        "free group",
        (word(3, 6), word(3, 6), word(3, 6)),
        |(a, b, c)| free_group_axioms(&a, &b, &c),
        &mut failures,
    );
    run_property(
        "jacobi",
        (lie_element(), lie_element(), lie_element()),
        |(a, b, c)| jacobi_identity(&a, &b, &c),
        &mut failures,
    );
    run_property(
        "normal form",
        (word(3, 6), 2usize..=5),
        |(w, k)| normal_form_round_trip(&w, k),
        &mut failures,
    );
    run_property(
        "milnor additivity",
        deep_automorphism_data(),
        |(k, a, b)| milnor_additivity(k, &a, &b),
        &mut failures,
    );
    run_property(
        "defining system",
        (index(3, 2, 4), proptest::num::u64::ANY),
        |(i, seed)| defining_system(&i, seed),
        &mut failures,
    );
    Verdict::check(
        failures.is_empty(),
        format!(
            "6 properties × {} cases ; failures: {failures:?}",
            common::CASES
        ),
    )
}

fn jacobi_dimensions() -> Verdict {
    let mut bad = Vec::new();
    let mut dims = Vec::new();
    for (k, want) in [(2, 0), (3, 1), (4, 0), (5, 3)] {
        let r = ct_dimension(2, k).unwrap();
        dims.push(r.dimension.to_string());
        if r.dimension != want || !r.matches_d_rank {
            bad.push(format!("dim C_{k} = {}", r.dimension));
        }
        if r.phi_rank != r.dimension {
            bad.push(format!("φ rank {} on C_{k}", r.phi_rank));
        }
        if !r.phi_in_kernel || !r.phi_kills_relations {
            bad.push(format!("φ image on C_{k}"));
        }
    }
    for k in 0..=2 {
        if !palindromic_vanishing(k).unwrap().zero {
            bad.push(format!("caterpillar k={k} nonzero"));
        }
    }
    Verdict::check(
        bad.is_empty(),
        format!(
            "dims {} ; caterpillars k=0,1,2 vanish ; failures: {bad:?}",
            dims.join(",")
        ),
    )
}

/// `y1 = e(122)^a · g1`, `y2 = e(112)^a · g2` with `g_i ∈ Γ_5`; over `ℓ = 3`,
/// `M = 4` the degree-3 part vanishes iff `81 | a`.
fn vanishing_family() -> Vec<(i64, Vec<String>)> {
    let gamma5 = [
        "([[[[x1,x2],x2],x2],x2])",
        "([[[[x1,x2],x2],x2],x1])",
        "([[[[x1,x2],x1],x1],x2])",
    ];
    let gamma6 = [
        "([[[[[x1,x2],x2],x2],x2],x1])",
        "([[[[[x1,x2],x1],x2],x2],x2])",
    ];
    let a_values = [
        0, 81, 1, 2, 27, 162, 5, 40, 0, 81, 3, 9, 80, 0, 243, 7, 54, 0, 162, 11,
    ];
    a_values
        .iter()
        .enumerate()
        .map(|(t, &a)| {
            let (c5, c6) = (t % 4, (t + 1) % 3);
            // every fourth config has no Γ_5 factor, leaving depth ≥ 6 when 81 | a
            let tail = |i: usize| {
                let mut s = String::new();
                if c5 != 0 {
                    s.push_str(&format!(
                        " {}^{}",
                        gamma5[(i + t) % 3],
                        c5 as i64 * if i == 0 { 1 } else { -1 }
                    ));
                }
                if c6 != 0 {
                    s.push_str(&format!(" {}^{}", gamma6[(i + t) % 2], c6));
                }
                s
            };
            let y = vec![
                format!("([[x1,x2],x2])^{a}{}", tail(0)),
                format!("([x1,[x1,x2]])^{a}{}", tail(1)),
            ];
            (a, y)
        })
        .collect()
}

fn vanishing_criteria() -> Verdict {
    let mut bad = Vec::new();
    let (mut fails, mut holds, mut tower_true) = (0, 0, 0);
    for (a, y) in vanishing_family() {
        let words = y.iter().map(|s| Word::parse(s, 2).unwrap()).collect();
        let sigma =
            GaloisAutomorphism::new(2, 8, 3, 4, None, BigInt::from(1), words, false).unwrap();
        let depth = sigma.depth().unwrap();
        if !depth.at_least(3) {
            bad.push(format!("a={a}: depth {depth}"));
            continue;
        }
        let tau = sigma.tau_vanishes(3).unwrap();
        let mu = sigma.milnor_invariant(&[1, 2, 2, 1]).unwrap();
        if tau.vanishes != (mu == BigInt::from(0)) {
            bad.push(format!("a={a}: tau {} but μ(1221) = {mu}", tau.vanishes));
        }
        if tau.vanishes != (a % 81 == 0) {
            bad.push(format!("a={a}: tau {}", tau.vanishes));
        }
        let tower = sigma.obstruction_tower(3, 3).unwrap();
        let theta = sigma.theta_cocycle_vanishes(3).unwrap();
        if tower.verdict != theta {
            bad.push(format!("a={a}: tower {} vs θ {theta}", tower.verdict));
        }
        if tau.vanishes {
            holds += 1;
        } else {
            fails += 1;
        }
        tower_true += tower.verdict as usize;
    }
    if holds == 0 || fails == 0 || tower_true == 0 || tower_true == holds + fails {
        bad.push("family does not exercise both outcomes".into());
    }
    Verdict::check(
        bad.is_empty(),
        format!("20 configs: τ vanishes {holds}, fails {fails}; tower verdict true {tower_true} ; failures: {bad:?}"),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("N_k grid", Duration::from_secs(1), table1),
        ("D_k grid", Duration::from_secs(1), table2),
        (
            "H_3 cells via formula",
            Duration::from_secs(1),
            table3_formula,
        ),
        (
            "H_3 cells via Koszul homology",
            Duration::from_secs(300),
            table3_direct,
        ),
        (
            "reduction-map pattern",
            Duration::from_secs(60),
            reduction_pattern,
        ),
        (
            "generating identities",
            Duration::from_secs(1),
            generating_identities,
        ),
        ("Massey dual basis", Duration::from_secs(30), massey_dual),
        ("property suite", Duration::MAX, property_suite),
        (
            "Jacobi dimensions",
            Duration::from_secs(120),
            jacobi_dimensions,
        ),
        (
            "vanishing criteria end-to-end",
            Duration::from_secs(60),
            vanishing_criteria,
        ),
    ];
    let mut unexpected = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = v.pass && in_time;
        let mut line = format!(
            "{} criterion {:>2}: {name} [{:.3}s] {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            v.detail
        );
        if !in_time {
            line.push_str(&format!(" ; over the {}s budget", limit.as_secs()));
        }
        if !pass && v.known && in_time {
            line.push_str(" ; known counterexample reproduced exactly");
        } else if !pass {
            unexpected += 1;
        }
        println!("{line}");
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
