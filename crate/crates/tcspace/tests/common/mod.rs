//! Shared helpers for the integration suites: seeded random instances and
//! an independent LP oracle for the transport problem.

#![allow(dead_code)] // each integration target uses a different subset
#![allow(clippy::needless_range_loop)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tcspace::measure::{ProbabilityMeasure, ZeroSumMeasure};
use tcspace::metric::{FiniteMetricSpace, WeightedGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random metric space: shortest-path closure of a complete graph with
/// uniform random edge weights. Valid by construction, distances bounded
/// away from zero.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(0.5..3.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::from_matrix(d).expect("closure of positive weights is a metric")
}

/// Random zero-sum measure supported on `k >= 2` distinct points.
pub fn random_zero_sum(rng: &mut ChaCha8Rng, n: usize) -> ZeroSumMeasure {
    loop {
        let k = rng.gen_range(2..=n);
        let mut points: Vec<usize> = (0..n).collect();
        points.shuffle(rng);
        points.truncate(k);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = raw.iter().sum::<f64>() / k as f64;
        let entries: Vec<(usize, f64)> =
            points.iter().zip(&raw).map(|(&p, &c)| (p, c - mean)).collect();
        if let Ok(mu) = ZeroSumMeasure::new(&entries) {
            if !mu.is_zero() {
                return mu;
            }
        }
    }
}

/// Random probability measure with full random support.
pub fn random_probability(rng: &mut ChaCha8Rng, n: usize) -> ProbabilityMeasure {
    let k = rng.gen_range(1..=n);
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    points.truncate(k);
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let entries: Vec<(usize, f64)> =
        points.iter().zip(&raw).map(|(&p, &w)| (p, w / total)).collect();
    ProbabilityMeasure::new(&entries).expect("normalized positive weights")
}

/// Random tree graph: uniform attachment with weights in `[0.5, 2.0]`.
pub fn random_tree_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        edges.push((parent, v, rng.gen_range(0.5..2.0)));
    }
    WeightedGraph::new(n, edges).expect("attachment construction is a connected tree")
}

/// Independent transport oracle: the coupling LP solved by a dense
/// two-phase simplex with Bland's rule. Minimizes `sum d(x_i, y_j) t_ij`
/// subject to row sums = positive masses and column sums = negative
/// masses (last column constraint dropped as redundant).
pub fn lp_tc_norm(space: &FiniteMetricSpace, mu: &ZeroSumMeasure) -> f64 {
    let pos = mu.positive_part();
    let neg = mu.negative_part(); // both parts carry positive masses
    if pos.is_empty() {
        return 0.0;
    }
    let (np, nn) = (pos.len(), neg.len());
    let vars = np * nn;
    let cost: Vec<f64> = (0..vars)
        .map(|v| space.dist(pos[v / nn].0, neg[v % nn].0))
        .collect();
    // Row-sum constraints for every supply, column sums for all demands but
    // the last (implied by mass balance).
    let rows = np + nn - 1;
    let mut a = vec![vec![0.0; vars]; rows];
    let mut b = vec![0.0; rows];
    for i in 0..np {
        for j in 0..nn {
            a[i][i * nn + j] = 1.0;
        }
        b[i] = pos[i].1;
    }
    for j in 0..nn - 1 {
        for i in 0..np {
            a[np + j][i * nn + j] = 1.0;
        }
        b[np + j] = neg[j].1;
    }
    simplex_min(&cost, &a, &b)
}

/// Dense two-phase primal simplex, Bland's rule throughout (no cycling).
/// Requires `b >= 0`; panics on infeasible or unbounded input, which cannot
/// occur for transport instances.
fn simplex_min(cost: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    const EPS: f64 = 1e-11;
    let m = a.len();
    let n = cost.len();
    // Tableau columns: n structural, m artificial, then the rhs.
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
        basis[i] = n + i;
    }

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, row: usize, col: usize| {
        let scale = t[row][col];
        for x in t[row].iter_mut() {
            *x /= scale;
        }
        for r in 0..t.len() {
            if r != row && t[r][col].abs() > 0.0 {
                let factor = t[r][col];
                for c in 0..t[r].len() {
                    let delta = factor * t[row][c];
                    t[r][c] -= delta;
                }
            }
        }
        basis[row] = col;
    };

    // Runs Bland's rule against the given objective row until no column
    // prices out negative; `limit` restricts the entering columns.
    let optimize = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, obj: &mut Vec<f64>, limit: usize| {
        loop {
            let entering = (0..limit).find(|&c| obj[c] < -EPS);
            let Some(col) = entering else { return };
            let mut row: Option<usize> = None;
            let mut best = f64::INFINITY;
            for r in 0..t.len() {
                if t[r][col] > EPS {
                    let ratio = t[r][width - 1] / t[r][col];
                    // Bland tie-break: smallest ratio, then smallest basis id.
                    let take = match row {
                        None => true,
                        Some(cur) => {
                            ratio < best - EPS || (ratio <= best + EPS && basis[r] < basis[cur])
                        }
                    };
                    if take {
                        best = best.min(ratio);
                        row = Some(r);
                    }
                }
            }
            let row = row.expect("transport polytope is bounded");
            pivot(t, basis, row, col);
            let factor = obj[col];
            for c in 0..width {
                obj[c] -= factor * t[row][c];
            }
        }
    };

    // Phase 1: drive the artificial variables to zero.
    let mut obj = vec![0.0; width];
    for i in 0..m {
        obj[n + i] = 1.0;
    }
    for i in 0..m {
        for c in 0..width {
            obj[c] -= t[i][c];
        }
    }
    optimize(&mut t, &mut basis, &mut obj, n);
    assert!(
        obj[width - 1].abs() <= 1e-7,
        "phase 1 failed: residual {}",
        obj[width - 1]
    );
    // Pivot any still-basic artificial out on a nonzero structural entry;
    // a fully zero row is a redundant constraint and stays harmless.
    for r in 0..m {
        if basis[r] >= n {
            if let Some(col) = (0..n).find(|&c| t[r][c].abs() > EPS) {
                pivot(&mut t, &mut basis, r, col);
            }
        }
    }

    // Phase 2 on the real objective, artificial columns barred.
    let mut obj = vec![0.0; width];
    obj[..n].copy_from_slice(cost);
    for r in 0..m {
        if basis[r] < n {
            let factor = obj[basis[r]];
            if factor != 0.0 {
                for c in 0..width {
                    obj[c] -= factor * t[r][c];
                }
            }
        }
    }
    optimize(&mut t, &mut basis, &mut obj, n);
    -obj[width - 1]
}
