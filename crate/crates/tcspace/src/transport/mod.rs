//! The transportation-cost norm and its certificates: exact norm values via
//! min-cost flow over the bipartite coupling formulation, optimal plans,
//! norming Lipschitz potentials, disjoint representations, optimal
//! bijections, Birkhoff decompositions, and extreme-molecule diagnostics.

mod assignment;
mod birkhoff;
mod flow;

pub use birkhoff::birkhoff_decompose;

use crate::error::{Error, Result};
use crate::measure::{LipschitzFunction, MolecularRepresentation, ProbabilityMeasure, ZeroSumMeasure};
use crate::metric::{geodesic_metric, FiniteMetricSpace, WeightedGraph};
use crate::tol;

/// An optimal coupling between the positive and negative parts of a measure:
/// entries `(from, to, mass)` index space points and carry positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    entries: Vec<(usize, usize, f64)>,
}

impl TransportPlan {
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cost(&self, space: &FiniteMetricSpace) -> f64 {
        self.entries.iter().map(|&(x, y, m)| m * space.dist(x, y)).sum()
    }

    /// The plan as a molecular representation (empty for the zero measure).
    pub fn to_representation(&self) -> MolecularRepresentation {
        MolecularRepresentation::new(
            self.entries.iter().map(|&(x, y, m)| (m, x, y)).collect(),
        )
        .expect("plan entries have positive mass and distinct endpoints")
    }

    /// Row and column marginals as `(point, mass)` lists in index order.
    #[allow(clippy::type_complexity)]
    pub fn marginals(&self) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
        use std::collections::BTreeMap;
        let mut rows: BTreeMap<usize, f64> = BTreeMap::new();
        let mut cols: BTreeMap<usize, f64> = BTreeMap::new();
        for &(x, y, m) in &self.entries {
            *rows.entry(x).or_insert(0.0) += m;
            *cols.entry(y).or_insert(0.0) += m;
        }
        (rows.into_iter().collect(), cols.into_iter().collect())
    }
}

/// The transportation-cost norm of `mu` together with an optimal plan, via
/// successive shortest paths on the bipartite network between the positive
/// and negative parts. The zero measure has norm 0 and an empty plan.
pub fn tc_norm(space: &FiniteMetricSpace, mu: &ZeroSumMeasure) -> Result<(f64, TransportPlan)> {
    mu.check_space(space)?;
    if mu.is_zero() {
        return Ok((0.0, TransportPlan { entries: Vec::new() }));
    }
    let pos = mu.positive_part();
    let neg = mu.negative_part();
    let sol = flow::solve_transport(
        &pos.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        &neg.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        |i, j| space.dist(pos[i].0, neg[j].0),
    );
    debug_assert!(
        (0..pos.len()).all(|i| {
            (0..neg.len()).all(|j| {
                space.dist(pos[i].0, neg[j].0) + sol.supply_potential[i]
                    - sol.demand_potential[j]
                    >= -tol::DUALITY_REL * (1.0 + space.diameter())
            })
        }),
        "reduced costs must stay nonnegative at optimality"
    );
    let entries = sol
        .shipments
        .iter()
        .map(|&(i, j, m)| (pos[i].0, neg[j].0, m))
        .collect();
    Ok((sol.value, TransportPlan { entries }))
}

/// A norming Kantorovich potential for `mu`: a 1-Lipschitz function with
/// `<f, mu> = tc_norm(mu)` and `f(base) = 0`. Built from the flow solver's
/// node potentials, tightened by a c-transform so the extension
/// `f(m) = min_j (w_j + d(m, y_j))` over the negative support is 1-Lipschitz
/// on the whole space. Errors with `ZeroMeasure` when `mu = 0`.
pub fn dual_potential(space: &FiniteMetricSpace, mu: &ZeroSumMeasure) -> Result<LipschitzFunction> {
    mu.check_space(space)?;
    if mu.is_zero() {
        return Err(Error::ZeroMeasure);
    }
    let pos = mu.positive_part();
    let neg = mu.negative_part();
    let sol = flow::solve_transport(
        &pos.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        &neg.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        |i, j| space.dist(pos[i].0, neg[j].0),
    );
    // Dual feasible pair: u_i - w_j <= d(x_i, y_j), tight on shipped arcs.
    let u: Vec<f64> = sol.supply_potential.iter().map(|p| -p).collect();
    // c-transform of u onto the negative support; the transform is
    // 1-Lipschitz there, so its cone extension attains it pointwise.
    let w_hat: Vec<f64> = (0..neg.len())
        .map(|j| {
            (0..pos.len())
                .map(|i| u[i] - space.dist(pos[i].0, neg[j].0))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let values: Vec<f64> = (0..space.len())
        .map(|m| {
            (0..neg.len())
                .map(|j| w_hat[j] + space.dist(m, neg[j].0))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    LipschitzFunction::new(space, values)
}

/// Cost of a molecular representation: `sum_j r_j d(x_j, y_j)`.
pub fn transport_cost(space: &FiniteMetricSpace, rep: &MolecularRepresentation) -> Result<f64> {
    rep.cost(space)
}

/// Rewrites a representation so no point is both a source and a target, by
/// splicing pairs `(r, x, v), (s, v, y)` through each shared point `v` into
/// direct terms. The represented measure is unchanged and the cost never
/// increases (triangle inequality); 2-cycles cancel outright.
pub fn make_disjoint(rep: &MolecularRepresentation) -> MolecularRepresentation {
    use std::collections::BTreeSet;
    let mut terms: Vec<(f64, usize, usize)> = rep.terms().to_vec();
    loop {
        let sources: BTreeSet<usize> = terms.iter().map(|&(_, x, _)| x).collect();
        let targets: BTreeSet<usize> = terms.iter().map(|&(_, _, y)| y).collect();
        let Some(&v) = sources.intersection(&targets).next() else { break };
        let mut incoming: Vec<(f64, usize)> = Vec::new(); // (mass, source x)
        let mut outgoing: Vec<(f64, usize)> = Vec::new(); // (mass, target y)
        let mut rest: Vec<(f64, usize, usize)> = Vec::new();
        for (r, x, y) in terms {
            if y == v {
                incoming.push((r, x));
            } else if x == v {
                outgoing.push((r, y));
            } else {
                rest.push((r, x, y));
            }
        }
        let (mut i, mut j) = (0usize, 0usize);
        while i < incoming.len() && j < outgoing.len() {
            let m = incoming[i].0.min(outgoing[j].0);
            let (x, y) = (incoming[i].1, outgoing[j].1);
            if x != y {
                rest.push((m, x, y));
            }
            incoming[i].0 -= m;
            outgoing[j].0 -= m;
            if incoming[i].0 <= 0.0 {
                i += 1;
            }
            if outgoing[j].0 <= 0.0 {
                j += 1;
            }
        }
        rest.extend(incoming[i..].iter().map(|&(r, x)| (r, x, v)).filter(|&(r, _, _)| r > 0.0));
        rest.extend(outgoing[j..].iter().map(|&(r, y)| (r, v, y)).filter(|&(r, _, _)| r > 0.0));
        terms = rest;
    }
    // Consolidate repeated (x, y) pairs for a canonical result.
    let mut merged: std::collections::BTreeMap<(usize, usize), f64> = std::collections::BTreeMap::new();
    for (r, x, y) in terms {
        *merged.entry((x, y)).or_insert(0.0) += r;
    }
    MolecularRepresentation::new(merged.into_iter().map(|((x, y), r)| (r, x, y)).collect())
        .expect("splicing preserves positive masses and distinct endpoints")
}

/// Optimality certificate check: `f` must be 1-Lipschitz (else
/// `NotOneLipschitz`), and the representation is optimal iff every term is
/// tight, `f(x_j) - f(y_j) = d(x_j, y_j)`, within the duality tolerance.
pub fn verify_optimality(
    space: &FiniteMetricSpace,
    rep: &MolecularRepresentation,
    f: &LipschitzFunction,
) -> Result<bool> {
    let n = space.len();
    if f.values().len() != n {
        return Err(Error::SizeMismatch { left: f.values().len(), right: n });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(i, j);
            let slope = (f.value(i) - f.value(j)).abs() / d;
            if slope > 1.0 + tol::DUALITY_REL * (1.0 + 1.0 / d) {
                return Err(Error::NotOneLipschitz { i, j, slope });
            }
        }
    }
    rep.cost(space)?;
    Ok(rep.terms().iter().all(|&(_, x, y)| {
        let d = space.dist(x, y);
        (f.value(x) - f.value(y) - d).abs() <= tol::DUALITY_REL * (1.0 + d)
    }))
}

/// The Wasserstein distance between probability measures: the norm of
/// `sigma - tau` (shared atoms cancel exactly) with an optimal plan.
pub fn wasserstein(
    space: &FiniteMetricSpace,
    sigma: &ProbabilityMeasure,
    tau: &ProbabilityMeasure,
) -> Result<(f64, TransportPlan)> {
    sigma.check_space(space)?;
    tau.check_space(space)?;
    tc_norm(space, &sigma.diff(tau))
}

/// Minimum-cost bijection between equal-size point lists (multisets are
/// allowed). Returns `(assign, cost)` with `assign[i]` the index into `b`
/// matched to `a[i]` and `cost = sum_i d(a_i, b_{assign(i)})`.
pub fn optimal_bijection(
    space: &FiniteMetricSpace,
    a: &[usize],
    b: &[usize],
) -> Result<(Vec<usize>, f64)> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptySubset);
    }
    for &p in a.iter().chain(b.iter()) {
        if p >= space.len() {
            return Err(Error::VertexOutOfRange { vertex: p, size: space.len() });
        }
    }
    Ok(assignment::solve_assignment(a.len(), |i, j| space.dist(a[i], b[j])))
}

/// Pairs `(x, y)`, `x < y`, whose normalized molecules are extreme points of
/// the unit ball: no third point `z` lies metrically between them, i.e.
/// `d(x, y) = d(x, z) + d(z, y)` within `tol::EXTREME_POINT_REL * d(x, y)`.
pub fn extreme_molecules(space: &FiniteMetricSpace) -> Vec<(usize, usize)> {
    let n = space.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let d = space.dist(x, y);
            let eps = tol::EXTREME_POINT_REL * d;
            let has_midpoint = (0..n).any(|z| {
                z != x && z != y && (space.dist(x, z) + space.dist(z, y) - d).abs() <= eps
            });
            if !has_midpoint {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

/// Recognizes geodesic tree metrics: the extreme pairs must form a spanning
/// tree whose path metric reproduces `d`. Returns the tree on success.
pub fn recognize_tree_metric(space: &FiniteMetricSpace) -> Option<WeightedGraph> {
    let n = space.len();
    if n == 1 {
        return WeightedGraph::new(1, Vec::new()).ok();
    }
    let pairs = extreme_molecules(space);
    if pairs.len() != n - 1 {
        return None;
    }
    let edges = pairs.iter().map(|&(x, y)| (x, y, space.dist(x, y))).collect();
    let graph = WeightedGraph::new(n, edges).ok()?;
    if !graph.is_connected() {
        return None;
    }
    let geo = geodesic_metric(&graph).ok()?;
    let scale = 1.0 + space.diameter();
    for i in 0..n {
        for j in (i + 1)..n {
            if (geo.dist(i, j) - space.dist(i, j)).abs() > tol::TREE_METRIC_REL * scale {
                return None;
            }
        }
    }
    Some(graph)
}
