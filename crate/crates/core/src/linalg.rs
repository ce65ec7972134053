//! Fraction-free (Bareiss) elimination over the integers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Reduces `rows` in place to echelon form and returns the rank. After the
/// call, the last nonzero pivot equals ± the determinant when the matrix is
/// square and of full rank.
fn bareiss(rows: &mut [Vec<BigInt>]) -> (usize, BigInt, bool) {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut negated = false;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        if pivot != rank {
            rows.swap(pivot, rank);
            negated = !negated;
        }
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = &rows[rank][col] * &rows[r][c] - &rows[r][col] * &rows[rank][c];
                rows[r][c] = v / &prev;
            }
            rows[r][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
    }
    (rank, prev, negated)
}

/// Rank over ℚ of an integer matrix given as rows.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut work = rows.to_vec();
    bareiss(&mut work).0
}

/// Determinant of a square integer matrix.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return BigInt::one();
    }
    let mut work = rows.to_vec();
    let (rank, last, negated) = bareiss(&mut work);
    if rank < n {
        return BigInt::zero();
    }
    if negated {
        -last
    } else {
        last
    }
}

/// Rank of a set of column vectors.
pub fn column_rank(columns: &[Vec<BigInt>]) -> usize {
    // Row rank of the transpose equals column rank.
    rank(columns)
}

pub fn abs_determinant_of_columns(columns: &[Vec<BigInt>]) -> BigInt {
    determinant(columns).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&m(&[&[1, 1], &[2, 0]])), BigInt::from(-2));
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            determinant(&m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])),
            BigInt::from(4)
        );
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]])), 2);
        assert_eq!(rank(&m(&[&[2], &[3]])), 1);
    }
}
