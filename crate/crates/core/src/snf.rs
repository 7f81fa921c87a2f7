//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type ZMatrix = Vec<Vec<BigInt>>;

/// Invariant factors of the matrix: the nonzero diagonal of its Smith form,
/// positive and each dividing the next. Their count is the rank.
pub fn invariant_factors(mut a: ZMatrix) -> Vec<BigInt> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < a[bi][bj].magnitude())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let (top, rest) = a.split_at_mut(i);
                let pivot_row = &top[t];
                for (x, p) in rest[0].iter_mut().zip(pivot_row.iter()).skip(t) {
                    if !p.is_zero() {
                        *x -= &q * p;
                    }
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        let p = row[t].clone();
                        row[j] -= &q * p;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                move_min_to_pivot(&mut a, t);
                continue;
            }
            // pivot must divide the trailing block
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let (top, rest) = a.split_at_mut(i);
                    for (x, y) in top[t].iter_mut().zip(rest[0].iter()) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

fn move_min_to_pivot(a: &mut ZMatrix, t: usize) {
    let rows = a.len();
    let cols = a[0].len();
    let mut best = (t, t);
    for i in t..rows {
        if !a[i][t].is_zero()
            && (a[best.0][best.1].is_zero() || a[i][t].magnitude() < a[best.0][best.1].magnitude())
        {
            best = (i, t);
        }
    }
    for j in t..cols {
        if !a[t][j].is_zero()
            && (a[best.0][best.1].is_zero() || a[t][j].magnitude() < a[best.0][best.1].magnitude())
        {
            best = (t, j);
        }
    }
    a.swap(t, best.0);
    if best.1 != t {
        for row in a.iter_mut() {
            row.swap(t, best.1);
        }
    }
}

/// Rank and torsion (invariant factors > 1).
pub fn rank_and_torsion(a: ZMatrix) -> (usize, Vec<BigInt>) {
    let f = invariant_factors(a);
    let torsion = f.iter().filter(|x| !x.is_one()).cloned().collect();
    (f.len(), torsion)
}

pub fn multiply(a: &ZMatrix, b: &ZMatrix, inner: usize, cols: usize) -> ZMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .map(|k| &row[k] * &b[k][j])
                        .sum()
                })
                .collect()
        })
        .collect()
}
