//! Exact rational linear algebra on small dense matrices.
//!
//! Everything here works over arbitrary-precision rationals, so rank is an
//! exact integer, never a numerical guess. Matrices are row-major
//! `Vec<Vec<BigRational>>`; all the matrices in this crate are at most 5
//! columns wide, so no pivoting strategy beyond "first nonzero" is needed.

use num_rational::BigRational;
use num_traits::Zero;

/// Exact rank via Gaussian elimination over the rationals.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    rref(rows).len()
}

/// Reduced row echelon form with zero rows dropped.
///
/// The result is the canonical basis of the row space: pivots are 1, pivot
/// columns are cleared above and below, rows are ordered by pivot column.
/// Two row sets span the same subspace iff their `rref`s are equal.
pub fn rref(rows: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return m;
    }
    let ncols = m[0].len();
    debug_assert!(m.iter().all(|r| r.len() == ncols));

    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(src) = (pivot_row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = m[pivot_row][col].clone();
        for x in m[pivot_row].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..nrows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..ncols {
                    let delta = &factor * &m[pivot_row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

/// True iff the square matrix has full rank.
pub fn is_invertible(rows: &[Vec<BigRational>]) -> bool {
    !rows.is_empty() && rows.len() == rows[0].len() && rank(rows) == rows.len()
}

/// Matrix product of two dense rational matrices.
pub fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let inner = if a.is_empty() { 0 } else { a[0].len() };
    debug_assert_eq!(inner, b.len());
    let ncols = if b.is_empty() { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|c| {
                    let mut acc = BigRational::zero();
                    for (x, brow) in row.iter().zip(b.iter()) {
                        acc += x * &brow[c];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Builds a rational matrix from machine-integer rows.
pub fn from_int_rows(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| crate::rat::int(v)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn rank_small() {
        assert_eq!(rank(&from_int_rows(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&from_int_rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&from_int_rows(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&from_int_rows(&[&[3, 0, 0], &[0, 0, 3]])), 2);
    }

    #[test]
    fn rank_with_rationals() {
        let m = vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), int(1)],
            vec![int(0), int(5)],
        ];
        // second row = 3 * first, third independent
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn rref_is_canonical() {
        let a = from_int_rows(&[&[1, 0, 0, 0, 0], &[1, 1, 0, 0, 0]]);
        let b = from_int_rows(&[&[0, 1, 0, 0, 0], &[2, 1, 0, 0, 0]]);
        assert_eq!(rref(&a), rref(&b));
        let c = from_int_rows(&[&[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0]]);
        assert_ne!(rref(&a), rref(&c));
    }

    #[test]
    fn mat_mul_identity() {
        let a = from_int_rows(&[&[2, 3], &[5, 7]]);
        let id = from_int_rows(&[&[1, 0], &[0, 1]]);
        assert_eq!(mat_mul(&a, &id), a);
        assert!(is_invertible(&a));
        assert!(!is_invertible(&from_int_rows(&[&[1, 2], &[2, 4]])));
    }
}
