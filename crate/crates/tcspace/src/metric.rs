//! Finite metric spaces, weighted graphs, geodesic metrics, and the generated
//! graph families used throughout the crate.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tol;

/// A finite metric space: named points, a validated distance matrix, and a
/// distinguished base point (the origin of the pointed Lipschitz structure).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<Vec<f64>>,
    base: usize,
}

impl FiniteMetricSpace {
    /// Validates all metric axioms. The triangle inequality and symmetry are
    /// checked up to `tol::METRIC_AXIOM_REL * (1 + max entry)`; distinct
    /// points at distance zero are rejected.
    pub fn new(points: Vec<String>, dist: Vec<Vec<f64>>, base: usize) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidParameters("empty point set".into()));
        }
        if dist.len() != n {
            return Err(Error::ShapeMismatch { row: 0, len: dist.len(), expected: n });
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch { row: i, len: row.len(), expected: n });
            }
        }
        let mut max_entry: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = dist[i][j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::NegativeDistance { i, j });
                }
                max_entry = max_entry.max(d);
            }
        }
        let eps = tol::METRIC_AXIOM_REL * (1.0 + max_entry);
        for i in 0..n {
            if dist[i][i].abs() > eps {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in (i + 1)..n {
                if (dist[i][j] - dist[j][i]).abs() > eps {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
                if dist[i][j] <= eps {
                    return Err(Error::ZeroDistanceDistinctPoints { i, j });
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if dist[i][j] > dist[i][k] + dist[k][j] + eps {
                        return Err(Error::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        if base >= n {
            return Err(Error::VertexOutOfRange { vertex: base, size: n });
        }
        Ok(Self { points, dist, base })
    }

    /// Builds a space from a bare matrix; points are named by index, base 0.
    pub fn from_matrix(dist: Vec<Vec<f64>>) -> Result<Self> {
        let points = (0..dist.len()).map(|i| i.to_string()).collect();
        Self::new(points, dist, 0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn base_point(&self) -> usize {
        self.base
    }

    pub fn with_base(mut self, base: usize) -> Result<Self> {
        if base >= self.len() {
            return Err(Error::VertexOutOfRange { vertex: base, size: self.len() });
        }
        self.base = base;
        Ok(self)
    }

    /// Largest pairwise distance (0 for a single point).
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                d = d.max(self.dist[i][j]);
            }
        }
        d
    }

    /// Smallest positive pairwise distance; `None` for a single point.
    pub fn min_distance(&self) -> Option<f64> {
        let mut m: Option<f64> = None;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                m = Some(m.map_or(self.dist[i][j], |v: f64| v.min(self.dist[i][j])));
            }
        }
        m
    }

    /// Closed ball `{ y : d(center, y) <= r }`, returned in index order.
    /// A negative radius yields the empty set.
    pub fn ball(&self, center: usize, r: f64) -> Result<Vec<usize>> {
        if center >= self.len() {
            return Err(Error::VertexOutOfRange { vertex: center, size: self.len() });
        }
        Ok((0..self.len()).filter(|&y| self.dist[center][y] <= r).collect())
    }

    /// Space with every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor <= 0.0 || !factor.is_finite() {
            return Err(Error::InvalidParameters(format!("scale factor {factor}")));
        }
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d * factor).collect())
            .collect();
        Ok(Self { points: self.points.clone(), dist, base: self.base })
    }
}

/// An undirected graph with strictly positive edge weights. Edges are stored
/// with `u < v`, sorted, and deduplicated; self-loops are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("graph with no vertices".into()));
        }
        let mut norm: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { vertex: u, size: n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, size: n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonPositiveWeight { u, v, weight: w });
            }
            norm.push((u.min(v), u.max(v), w));
        }
        norm.sort_by_key(|e| (e.0, e.1));
        for pair in norm.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::DuplicateEdge { u: pair[0].0, v: pair[0].1 });
            }
        }
        Ok(Self { n, edges: norm })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Single-source shortest-path distances (Dijkstra); unreachable vertices
    /// are `f64::INFINITY`.
    pub fn distances_from(&self, src: usize) -> Result<Vec<f64>> {
        if src >= self.n {
            return Err(Error::VertexOutOfRange { vertex: src, size: self.n });
        }
        Ok(dijkstra(&self.adjacency(), src))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<(Reverse<OrdF64>, usize)> = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push((Reverse(OrdF64(0.0)), src));
    while let Some((Reverse(OrdF64(d)), u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push((Reverse(OrdF64(nd)), v));
            }
        }
    }
    dist
}

/// Total-order wrapper so finite `f64` keys can drive a binary heap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest-path metric of a connected weighted graph. The resulting space
/// keeps vertex indices as point names and uses vertex 0 as base point.
pub fn geodesic_metric(graph: &WeightedGraph) -> Result<FiniteMetricSpace> {
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let adj = graph.adjacency();
    let n = graph.vertex_count();
    let mut dist = Vec::with_capacity(n);
    for src in 0..n {
        dist.push(dijkstra(&adj, src));
    }
    FiniteMetricSpace::from_matrix(dist)
}

/// The generated graph families. All members are connected; weights are 1
/// except for `RandomTree`, which draws them uniformly from a range.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Cycle on `n >= 3` vertices.
    Cycle(usize),
    /// Path on `n >= 1` vertices.
    Path(usize),
    /// Star with center 0 and `n - 1` leaves (`n >= 1` vertices total).
    Star(usize),
    /// Discrete torus `(Z/nZ)^2` grid graph, `n >= 1`.
    Torus(usize),
    /// Diamond graph of the given level: level 0 is a single edge and each
    /// level replaces every edge by a 4-cycle, so level `k` has `4^k` edges.
    Diamond(usize),
    /// Uniformly random attachment tree with weights in `[wmin, wmax]`,
    /// deterministic for a fixed seed.
    RandomTree { n: usize, seed: u64, wmin: f64, wmax: f64 },
}

pub fn generate_family(family: &Family) -> Result<WeightedGraph> {
    match *family {
        Family::Cycle(n) => {
            if n < 3 {
                return Err(Error::InvalidSize { family: "cycle".into(), n });
            }
            let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
            WeightedGraph::new(n, edges)
        }
        Family::Path(n) => {
            if n < 1 {
                return Err(Error::InvalidSize { family: "path".into(), n });
            }
            let edges = (1..n).map(|i| (i - 1, i, 1.0)).collect();
            WeightedGraph::new(n, edges)
        }
        Family::Star(n) => {
            if n < 1 {
                return Err(Error::InvalidSize { family: "star".into(), n });
            }
            let edges = (1..n).map(|i| (0, i, 1.0)).collect();
            WeightedGraph::new(n, edges)
        }
        Family::Torus(n) => {
            if n < 1 {
                return Err(Error::InvalidSize { family: "torus".into(), n });
            }
            let id = |x: usize, y: usize| x * n + y;
            let mut edges = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    for (nx, ny) in [((x + 1) % n, y), (x, (y + 1) % n)] {
                        let (a, b) = (id(x, y), id(nx, ny));
                        if a != b {
                            let e = (a.min(b), a.max(b), 1.0);
                            // n = 2 wraps both directions onto the same pair.
                            if !edges.contains(&e) {
                                edges.push(e);
                            }
                        }
                    }
                }
            }
            WeightedGraph::new(n * n, edges)
        }
        Family::Diamond(level) => {
            let mut n = 2usize;
            let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
            for _ in 0..level {
                let mut next = Vec::with_capacity(edges.len() * 4);
                for (u, v) in edges {
                    let (a, b) = (n, n + 1);
                    n += 2;
                    next.extend_from_slice(&[(u, a), (a, v), (u, b), (b, v)]);
                }
                edges = next;
            }
            WeightedGraph::new(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect())
        }
        Family::RandomTree { n, seed, wmin, wmax } => {
            if n < 1 {
                return Err(Error::InvalidSize { family: "random_tree".into(), n });
            }
            if !(wmin > 0.0 && wmax >= wmin && wmax.is_finite()) {
                return Err(Error::InvalidParameters(format!(
                    "random_tree weight range [{wmin}, {wmax}]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::with_capacity(n.saturating_sub(1));
            for v in 1..n {
                let parent = rng.gen_range(0..v);
                let w = if wmin == wmax { wmin } else { rng.gen_range(wmin..=wmax) };
                edges.push((parent, v, w));
            }
            WeightedGraph::new(n, edges)
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `name:params`, e.g. `cycle:8`, `torus:4`, or
    /// `random_tree:12,7,0.5,2.0` (`n,seed[,wmin,wmax]`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameters(format!("family spec '{s}': {msg}"));
        let (name, params) = s.split_once(':').ok_or_else(|| bad("expected name:params"))?;
        let parse_n = |p: &str| p.trim().parse::<usize>().map_err(|_| bad("bad size"));
        match name.trim() {
            "cycle" => Ok(Family::Cycle(parse_n(params)?)),
            "path" => Ok(Family::Path(parse_n(params)?)),
            "star" => Ok(Family::Star(parse_n(params)?)),
            "torus" => Ok(Family::Torus(parse_n(params)?)),
            "diamond" => Ok(Family::Diamond(parse_n(params)?)),
            "random_tree" => {
                let parts: Vec<&str> = params.split(',').collect();
                if parts.len() != 2 && parts.len() != 4 {
                    return Err(bad("expected n,seed[,wmin,wmax]"));
                }
                let n = parse_n(parts[0])?;
                let seed = parts[1].trim().parse::<u64>().map_err(|_| bad("bad seed"))?;
                let (wmin, wmax) = if parts.len() == 4 {
                    (
                        parts[2].trim().parse::<f64>().map_err(|_| bad("bad wmin"))?,
                        parts[3].trim().parse::<f64>().map_err(|_| bad("bad wmax"))?,
                    )
                } else {
                    (1.0, 1.0)
                };
                Ok(Family::RandomTree { n, seed, wmin, wmax })
            }
            other => Err(bad(&format!("unknown family '{other}'"))),
        }
    }
}
