//! Dense linear algebra over ℚ.

use num::{One, Zero};

use crate::poly::Rational;

/// Row-reduce in place to reduced row echelon form; returns pivot columns.
pub fn rref(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let Some(ncols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{v : M v = 0}` for the matrix with the given rows.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Coefficients `c` with `Σ cᵢ basis[i] = target`, if any.
pub fn solve_in_span(basis: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = basis.len();
    let dim = target.len();
    let mut rows: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rational> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut sol = vec![Rational::zero(); n];
    for (r, &pc) in pivots.iter().enumerate() {
        sol[pc] = rows[r][n].clone();
    }
    Some(sol)
}

/// Greedily pick candidates that are independent of `span` and of each other.
/// Returns the chosen candidate indices in order.
pub fn extend_independent(span: &[Vec<Rational>], candidates: &[Vec<Rational>]) -> Vec<usize> {
    let mut current: Vec<Vec<Rational>> = span.to_vec();
    let mut r = rank(&current);
    let mut chosen = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        current.push(c.clone());
        let nr = rank(&current);
        if nr > r {
            r = nr;
            chosen.push(i);
        } else {
            current.pop();
        }
    }
    chosen
}

/// Independent rows spanning the row space (the nonzero rows of the RREF).
pub fn row_basis(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let p = rref(&mut m, ncols).len();
    m.truncate(p);
    m
}
