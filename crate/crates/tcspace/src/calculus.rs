//! Discrete vector calculus on weighted graphs: gradients of vertex
//! functions, line integrals along walks, recognition of conservative
//! fields, and the integral operator recovering a potential from its
//! gradient. A stochastic tree embedding extends the integral operator to
//! arbitrary (non-conservative) fields: integrate the field along chosen
//! geodesics realizing each tree edge, then average the per-tree prefix
//! sums. The extension is linear, agrees with the exact operator on
//! gradients, and has Lipschitz norm at most the embedding's worst per-edge
//! expected stretch times the sup norm of the field.

use std::collections::BTreeMap;

use crate::embed::StochasticTreeEmbedding;
use crate::error::{Error, Result};
use crate::metric::WeightedGraph;
use crate::tol::{CYCLE_INTEGRAL_REL, TREE_METRIC_REL};

/// An antisymmetric edge function (discrete 1-form): one value per graph
/// edge, read as the flow from the lower-indexed endpoint to the higher.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    n: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl VectorField {
    /// Assigns `values[k]` to the `k`-th edge of `graph` (in its sorted
    /// edge order), oriented from the lower to the higher endpoint.
    pub fn new(graph: &WeightedGraph, values: &[f64]) -> Result<Self> {
        if values.len() != graph.edges().len() {
            return Err(Error::SizeMismatch {
                left: values.len(),
                right: graph.edges().len(),
            });
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                let (u, w, _) = graph.edges()[k];
                return Err(Error::InvalidParameters(format!(
                    "non-finite field value on edge ({u}, {w})"
                )));
            }
        }
        let entries = graph
            .edges()
            .iter()
            .zip(values)
            .map(|(&(u, v, _), &f)| ((u, v), f))
            .collect();
        Ok(VectorField { n: graph.vertex_count(), entries })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// `F(u -> v)`; antisymmetric, `None` when `{u, v}` is not an edge.
    pub fn value(&self, u: usize, v: usize) -> Option<f64> {
        if u < v {
            self.entries.get(&(u, v)).copied()
        } else {
            self.entries.get(&(v, u)).copied().map(|f| -f)
        }
    }

    /// Values in sorted edge order, oriented low-to-high.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The gradient field of a vertex function: `(grad f)(u -> v) = f(v) - f(u)`
/// on every edge.
pub fn gradient(graph: &WeightedGraph, f: &[f64]) -> Result<VectorField> {
    if f.len() != graph.vertex_count() {
        return Err(Error::SizeMismatch { left: f.len(), right: graph.vertex_count() });
    }
    let values: Vec<f64> = graph.edges().iter().map(|&(u, v, _)| f[v] - f[u]).collect();
    VectorField::new(graph, &values)
}

/// Integrates `field` along the walk `w_0, w_1, ..., w_k`: the sum of
/// `F(w_t -> w_{t+1})`. Every step must traverse an edge.
pub fn line_integral(field: &VectorField, walk: &[usize]) -> Result<f64> {
    let mut total = 0.0;
    for (step, pair) in walk.windows(2).enumerate() {
        let (u, v) = (pair[0], pair[1]);
        if u.max(v) >= field.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: u.max(v),
                size: field.vertex_count(),
            });
        }
        total += field.value(u, v).ok_or(Error::NotAWalk { step, u, v })?;
    }
    Ok(total)
}

/// Potential from a BFS spanning tree: `phi[0] = 0` and
/// `phi[v] = phi[parent] + F(parent -> v)` along tree edges.
fn spanning_potential(graph: &WeightedGraph, field: &VectorField) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    if field.vertex_count() != n {
        return Err(Error::SizeMismatch { left: field.vertex_count(), right: n });
    }
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let adj = graph.adjacency();
    let mut phi = vec![f64::NAN; n];
    phi[0] = 0.0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if phi[v].is_nan() {
                phi[v] = phi[u] + field.value(u, v).expect("adjacency edge");
                queue.push_back(v);
            }
        }
    }
    Ok(phi)
}

fn circulation_tolerance(graph: &WeightedGraph, field: &VectorField) -> f64 {
    CYCLE_INTEGRAL_REL * (1.0 + field.sup_norm() * graph.vertex_count() as f64)
}

/// Whether every cycle integral of `field` vanishes, i.e. the field is a
/// gradient.
pub fn is_conservative(graph: &WeightedGraph, field: &VectorField) -> Result<bool> {
    let phi = spanning_potential(graph, field)?;
    let eps = circulation_tolerance(graph, field);
    Ok(graph.edges().iter().all(|&(u, v, _)| {
        (field.value(u, v).expect("graph edge") - (phi[v] - phi[u])).abs() <= eps
    }))
}

/// The inverse of the gradient on conservative fields: the unique vertex
/// function with `grad f = field` and `f(base) = 0`. A non-vanishing cycle
/// integral is reported through `NotConservative`, carrying the circulation
/// of the offending edge against the spanning-tree potential.
pub fn integral_operator(
    graph: &WeightedGraph,
    field: &VectorField,
    base: usize,
) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    if base >= n {
        return Err(Error::VertexOutOfRange { vertex: base, size: n });
    }
    let phi = spanning_potential(graph, field)?;
    let eps = circulation_tolerance(graph, field);
    for &(u, v, _) in graph.edges() {
        let circulation = field.value(u, v).expect("graph edge") - (phi[v] - phi[u]);
        if circulation.abs() > eps {
            return Err(Error::NotConservative { u, v, integral: circulation });
        }
    }
    let shift = phi[base];
    Ok(phi.into_iter().map(|p| p - shift).collect())
}

/// How tree edges are realized as graph geodesics when extending the
/// integral operator.
#[derive(Debug, Clone)]
pub enum PathChoice {
    /// The lexicographically smallest shortest path for every pair, built
    /// greedily: from `u`, always step to the lowest-indexed neighbor that
    /// stays on a shortest path to `v`.
    LexMinShortest,
    /// Caller-provided paths, keyed by `(u, v)` with `u < v` and listed
    /// from `u` to `v`. Every tree edge of the embedding must be covered by
    /// a path realizing the graph distance.
    Explicit(BTreeMap<(usize, usize), Vec<usize>>),
}

/// Checks a candidate path for the pair `(u, v)`: endpoints, adjacency of
/// consecutive steps, and total weight equal to the geodesic distance.
fn check_path(
    graph: &WeightedGraph,
    adj: &[Vec<(usize, f64)>],
    u: usize,
    v: usize,
    geodesic: f64,
    path: &[usize],
) -> Result<()> {
    let fail = |reason: String| Err(Error::PathMismatch { u, v, reason });
    if path.first() != Some(&u) || path.last() != Some(&v) {
        return fail("endpoints do not match the pair".into());
    }
    let mut length = 0.0;
    for pair in path.windows(2) {
        if pair[0].max(pair[1]) >= graph.vertex_count() {
            return fail(format!("vertex {} out of range", pair[0].max(pair[1])));
        }
        match adj[pair[0]].iter().find(|&&(z, _)| z == pair[1]) {
            Some(&(_, w)) => length += w,
            None => return fail(format!("({}, {}) is not an edge", pair[0], pair[1])),
        }
    }
    if (length - geodesic).abs() > TREE_METRIC_REL * (1.0 + geodesic) {
        return fail(format!("path length {length} differs from geodesic {geodesic}"));
    }
    Ok(())
}

/// The lexicographically smallest shortest `u`-`v` path, walked greedily on
/// the shortest-path DAG towards `v`.
fn lex_min_geodesic(
    adj: &[Vec<(usize, f64)>],
    dist_to_v: &[f64],
    u: usize,
    v: usize,
) -> Vec<usize> {
    let mut path = vec![u];
    let mut w = u;
    while w != v {
        let dw = dist_to_v[w];
        let next = adj[w]
            .iter()
            .filter(|&&(z, wt)| {
                (dist_to_v[z] + wt - dw).abs() <= TREE_METRIC_REL * (1.0 + dw)
            })
            .map(|&(z, _)| z)
            .min()
            .expect("shortest-path DAG has an outgoing edge");
        path.push(next);
        w = next;
    }
    path
}

/// Extends the integral operator through a bijective stochastic tree
/// embedding: each tree edge `(parent, child)` is realized by a geodesic of
/// `graph`, the field is integrated along it, per-tree prefix sums along
/// root paths give one potential per component, and the result is their
/// probability average, shifted to vanish at the base point (which makes
/// it independent of the component roots). Requires a canonical embedding
/// of the graph's geodesic space: identity vertex maps and edge weights
/// equal to base distances.
///
/// On gradients the extension telescopes to the exact integral operator;
/// in general it is linear with `Lip <= stretch * sup_norm`, where
/// `stretch` is the embedding's largest per-edge expected stretch.
pub fn extend_integral_operator(
    graph: &WeightedGraph,
    embedding: &StochasticTreeEmbedding,
    field: &VectorField,
    paths: &PathChoice,
) -> Result<Vec<f64>> {
    let n = graph.vertex_count();
    let base_space = embedding.base();
    if base_space.len() != n {
        return Err(Error::SizeMismatch { left: base_space.len(), right: n });
    }
    if field.vertex_count() != n {
        return Err(Error::SizeMismatch { left: field.vertex_count(), right: n });
    }
    if !embedding.is_bijective() {
        return Err(Error::EmbeddingNotCanonical {
            reason: "components are not trees on the base points".into(),
        });
    }
    let base = base_space.base_point();
    for (i, comp) in embedding.components().iter().enumerate() {
        if comp.vertex_map.iter().enumerate().any(|(p, &v)| p != v) {
            return Err(Error::EmbeddingNotCanonical {
                reason: format!("component {i} does not use the identity vertex map"),
            });
        }
        for c in comp.tree.oriented_edges() {
            let p = comp.tree.parent(c).expect("non-root");
            let w = comp.tree.edge_weight(c).expect("tree edge");
            let d = base_space.dist(p, c);
            if (w - d).abs() > TREE_METRIC_REL * (1.0 + d) {
                return Err(Error::EmbeddingNotCanonical {
                    reason: format!(
                        "component {i} edge ({p}, {c}) has weight {w}, base distance {d}"
                    ),
                });
            }
        }
    }

    // Every tree edge as an unordered base pair, deduplicated.
    let mut needed: std::collections::BTreeSet<(usize, usize)> = std::collections::BTreeSet::new();
    for comp in embedding.components() {
        for c in comp.tree.oriented_edges() {
            let p = comp.tree.parent(c).expect("non-root");
            needed.insert((p.min(c), p.max(c)));
        }
    }

    let adj = graph.adjacency();
    let mut integrals: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    match paths {
        PathChoice::LexMinShortest => {
            // Group by target so each Dijkstra serves every pair ending there.
            let mut by_target: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &(u, v) in &needed {
                by_target.entry(v).or_default().push(u);
            }
            for (&v, sources) in &by_target {
                let dist_to_v = graph.distances_from(v)?;
                for &u in sources {
                    let path = lex_min_geodesic(&adj, &dist_to_v, u, v);
                    check_path(graph, &adj, u, v, base_space.dist(u, v), &path)?;
                    integrals.insert((u, v), line_integral(field, &path)?);
                }
            }
        }
        PathChoice::Explicit(table) => {
            for &(u, v) in &needed {
                let path = table.get(&(u, v)).ok_or_else(|| Error::PathMismatch {
                    u,
                    v,
                    reason: "no path provided for this tree edge".into(),
                })?;
                check_path(graph, &adj, u, v, base_space.dist(u, v), path)?;
                integrals.insert((u, v), line_integral(field, path)?);
            }
        }
    }

    let oriented = |p: usize, c: usize| -> f64 {
        if p < c {
            integrals[&(p, c)]
        } else {
            -integrals[&(c, p)]
        }
    };
    let mut out = vec![0.0; n];
    for comp in embedding.components() {
        let mut val = vec![0.0; n];
        // Children after parents: reversed post-order is a valid preorder.
        for &c in comp.tree.post_order().iter().rev() {
            if let Some(p) = comp.tree.parent(c) {
                val[c] = val[p] + oriented(p, c);
            }
        }
        for x in 0..n {
            out[x] += comp.probability * val[x];
        }
    }
    let shift = out[base];
    Ok(out.into_iter().map(|v| v - shift).collect())
}
