//! Exact Gaussian elimination over the rationals for the small square
//! systems of the extraction step.

use num_traits::{One, Zero};

use crate::exact::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn from_integers(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect()
}

/// Row echelon form in place; returns the determinant sign/scale factor
/// accumulated along the way and the pivot columns.
fn eliminate(m: &mut Matrix) -> (Rational, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut factor = Rational::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            factor = -factor;
        }
        let piv = m[r][c].clone();
        factor *= &piv;
        for x in m[r].iter_mut() {
            *x /= &piv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (factor, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    eliminate(&mut a).1.len()
}

pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let (factor, pivots) = eliminate(&mut a);
    if pivots.len() < n {
        Rational::zero()
    } else {
        factor
    }
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (_, pivots) = eliminate(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = from_integers(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        let inv = inverse(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: Rational = (0..3).map(|k| &m[i][k] * &inv[k][j]).sum();
                assert_eq!(s, if i == j { Rational::one() } else { Rational::zero() });
            }
        }
        assert_eq!(determinant(&m), Rational::from_integer(18.into()));
    }

    #[test]
    fn singular_detected() {
        let m = from_integers(&[vec![1, 2], vec![2, 4]]);
        assert!(inverse(&m).is_none());
        assert_eq!(rank(&m), 1);
        assert!(determinant(&m).is_zero());
    }
}
