//! Dense exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
pub type QMatrix = Vec<Vec<Q>>;

pub fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMatrix, cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix, cols: usize) -> usize {
    let mut a = m.clone();
    rref(&mut a, cols).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &QMatrix, cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -a[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Transpose of a list of column vectors into a row-major matrix.
pub fn columns_to_matrix(columns: &[Vec<Q>], rows: usize) -> QMatrix {
    (0..rows)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect()
}

/// Solve `A x = b` where `A` is given by its columns; `None` if inconsistent.
pub fn solve_columns(columns: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = b.len();
    let ncols = columns.len();
    let mut aug: QMatrix = (0..rows)
        .map(|r| {
            let mut row: Vec<Q> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Indices of a maximal independent subset of `vectors`, scanning in order,
/// on top of an already spanned set `base`.
pub fn extend_independent(base: &[Vec<Q>], vectors: &[Vec<Q>], dim: usize) -> Vec<usize> {
    let mut all: Vec<Vec<Q>> = base.to_vec();
    all.extend(vectors.iter().cloned());
    if all.is_empty() || dim == 0 {
        return Vec::new();
    }
    let mut m = columns_to_matrix(&all, dim);
    rref(&mut m, all.len())
        .into_iter()
        .filter(|&p| p >= base.len())
        .map(|p| p - base.len())
        .collect()
}
