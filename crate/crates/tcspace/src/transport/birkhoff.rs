//! Constructive Birkhoff decomposition: a doubly stochastic matrix is peeled
//! into a convex combination of permutation matrices. Each round extracts a
//! perfect matching on the positive entries and subtracts the minimal matched
//! entry, zeroing at least one entry, so at most (n-1)^2 + 1 terms appear.

use crate::error::{Error, Result};
use crate::tol;

/// Validates double stochasticity (entries >= -tol, rows and columns summing
/// to 1 within `tol::DOUBLY_STOCHASTIC_TOL`) and decomposes. Returns
/// `(weight, permutation)` pairs with positive weights summing to 1 within
/// the same tolerance; `permutation[i]` is the column assigned to row `i`.
pub fn birkhoff_decompose(matrix: &[Vec<f64>]) -> Result<Vec<(f64, Vec<usize>)>> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::NotDoublyStochastic { reason: "empty matrix".into() });
    }
    let eps = tol::DOUBLY_STOCHASTIC_TOL;
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotDoublyStochastic {
                reason: format!("row {i} has length {}", row.len()),
            });
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() || x < -eps {
                return Err(Error::NotDoublyStochastic {
                    reason: format!("entry ({i}, {j}) = {x}"),
                });
            }
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > eps {
            return Err(Error::NotDoublyStochastic { reason: format!("row {i} sums to {s}") });
        }
    }
    for j in 0..n {
        let s: f64 = matrix.iter().map(|row| row[j]).sum();
        if (s - 1.0).abs() > eps {
            return Err(Error::NotDoublyStochastic { reason: format!("column {j} sums to {s}") });
        }
    }

    let mut rest: Vec<Vec<f64>> = matrix.iter().map(|row| row.iter().map(|x| x.max(0.0)).collect()).collect();
    let mut remaining = 1.0f64;
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    while remaining > eps {
        let perm = positive_matching(&rest).ok_or_else(|| Error::NotDoublyStochastic {
            reason: "no perfect matching on positive entries".into(),
        })?;
        let mut theta = remaining;
        for (i, &j) in perm.iter().enumerate() {
            theta = theta.min(rest[i][j]);
        }
        for (i, &j) in perm.iter().enumerate() {
            rest[i][j] -= theta;
            if rest[i][j] < tol::MATRIX_ZERO_ABS {
                rest[i][j] = 0.0;
            }
        }
        remaining -= theta;
        terms.push((theta, perm));
    }
    Ok(terms)
}

/// Perfect matching on entries above the zero threshold (Kuhn augmenting
/// paths). Returns `perm` with `perm[i] = j`, or `None` if none exists.
fn positive_matching(a: &[Vec<f64>]) -> Option<Vec<usize>> {
    let n = a.len();
    let mut col_of_row = vec![usize::MAX; n];
    let mut row_of_col = vec![usize::MAX; n];
    fn try_augment(
        a: &[Vec<f64>],
        i: usize,
        visited: &mut [bool],
        col_of_row: &mut [usize],
        row_of_col: &mut [usize],
    ) -> bool {
        for j in 0..a.len() {
            if a[i][j] > tol::MATRIX_ZERO_ABS && !visited[j] {
                visited[j] = true;
                if row_of_col[j] == usize::MAX
                    || try_augment(a, row_of_col[j], visited, col_of_row, row_of_col)
                {
                    col_of_row[i] = j;
                    row_of_col[j] = i;
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n {
        let mut visited = vec![false; n];
        if !try_augment(a, i, &mut visited, &mut col_of_row, &mut row_of_col) {
            return None;
        }
    }
    Some(col_of_row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matrix() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let terms = birkhoff_decompose(&id).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, 1.0);
        assert_eq!(terms[0].1, vec![0, 1]);
    }

    #[test]
    fn uniform_two_by_two() {
        let half = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let terms = birkhoff_decompose(&half).unwrap();
        assert_eq!(terms.len(), 2);
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_doubly_stochastic() {
        assert!(birkhoff_decompose(&[vec![0.9, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(birkhoff_decompose(&[vec![1.5, -0.5], vec![-0.5, 1.5]]).is_err());
        assert!(birkhoff_decompose(&[vec![1.0]]).is_ok());
    }

    #[test]
    fn reconstructs_random_combination() {
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 2..=6usize {
            // Random convex combination of up to 2n permutations.
            let mut a = vec![vec![0.0f64; n]; n];
            let k = rng.gen_range(1..=2 * n);
            let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= s);
            for w in weights {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                for (i, &j) in perm.iter().enumerate() {
                    a[i][j] += w;
                }
            }
            let terms = birkhoff_decompose(&a).unwrap();
            assert!(terms.len() <= (n - 1) * (n - 1) + 1);
            let mut rec = vec![vec![0.0f64; n]; n];
            for (w, perm) in &terms {
                for (i, &j) in perm.iter().enumerate() {
                    rec[i][j] += w;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    assert!((rec[i][j] - a[i][j]).abs() < 1e-9);
                }
            }
        }
    }
}
