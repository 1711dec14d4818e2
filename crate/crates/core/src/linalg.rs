//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Row-reduced echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][col].clone();
        for x in rows[r].iter_mut().skip(col) {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                if !pv.is_zero() {
                    row[c] = &row[c] - &(&f * pv);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

pub fn rank(mut rows: Vec<Vec<Rational>>, ncols: usize) -> usize {
    rref(&mut rows, ncols).len()
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn nullspace(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Vec<Vec<Rational>> {
    let pivots = rref(&mut rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in rows.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}
