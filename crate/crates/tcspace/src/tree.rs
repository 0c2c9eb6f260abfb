//! Rooted weighted trees and the closed-form transportation-cost norm: for a
//! tree metric the norm of a measure is `sum_e w_e |mu(T_e)|` over oriented
//! edges `e` with subtree `T_e` below the endpoint farther from the root.
//! The same coordinates give a linear isometry into weighted `l1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::ZeroSumMeasure;
use crate::metric::WeightedGraph;

/// A tree with positive edge weights, stored as parent pointers from a root.
/// Oriented edges are identified with their child endpoint (the endpoint
/// farther from the root).
#[derive(Debug, Clone, PartialEq)]
pub struct RootedWeightedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    weight: Vec<f64>, // weight of the edge to the parent; unused at the root
    children: Vec<Vec<usize>>,
    post_order: Vec<usize>,
}

impl RootedWeightedTree {
    /// Builds a tree from parent pointers. `parents[v]` is `None` exactly at
    /// `root`; `weights[v]` must be a positive weight for `v != root` and
    /// `None` at the root. Connectivity from the root is required.
    pub fn new(root: usize, parents: Vec<Option<usize>>, weights: Vec<Option<f64>>) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(Error::NotATree { reason: "no vertices".into() });
        }
        if weights.len() != n {
            return Err(Error::SizeMismatch { left: weights.len(), right: n });
        }
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, size: n });
        }
        let mut children = vec![Vec::new(); n];
        let mut weight = vec![0.0; n];
        for v in 0..n {
            match (parents[v], weights[v]) {
                (None, None) if v == root => {}
                (None, _) => {
                    return Err(Error::NotATree { reason: format!("vertex {v} has no parent") })
                }
                (Some(_), _) if v == root => {
                    return Err(Error::NotATree { reason: "root has a parent".into() })
                }
                (Some(p), Some(w)) => {
                    if p >= n {
                        return Err(Error::VertexOutOfRange { vertex: p, size: n });
                    }
                    if p == v {
                        return Err(Error::SelfLoop(v));
                    }
                    if !w.is_finite() || w <= 0.0 {
                        return Err(Error::NonPositiveWeight { u: p, v, weight: w });
                    }
                    children[p].push(v);
                    weight[v] = w;
                }
                (Some(p), None) => {
                    return Err(Error::NonPositiveWeight { u: p, v, weight: f64::NAN })
                }
            }
        }
        // Reachability from the root certifies the parent map is acyclic.
        let mut pre = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            pre.push(u);
            for &c in children[u].iter().rev() {
                stack.push(c);
            }
        }
        if pre.len() != n {
            return Err(Error::NotATree { reason: "parent map has a cycle".into() });
        }
        pre.reverse(); // children precede parents
        Ok(Self { root, parent: parents, weight, children, post_order: pre })
    }

    /// Orients a connected graph with `n - 1` edges away from `root`.
    pub fn from_graph(graph: &WeightedGraph, root: usize) -> Result<Self> {
        let n = graph.vertex_count();
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, size: n });
        }
        if graph.edges().len() != n - 1 {
            return Err(Error::NotATree {
                reason: format!("{} edges on {} vertices", graph.edges().len(), n),
            });
        }
        if !graph.is_connected() {
            return Err(Error::NotATree { reason: "graph is disconnected".into() });
        }
        let adj = graph.adjacency();
        let mut parents = vec![None; n];
        let mut weights = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parents[v] = Some(u);
                    weights[v] = Some(w);
                    stack.push(v);
                }
            }
        }
        Self::new(root, parents, weights)
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Weight of the oriented edge into `child`; `None` at the root.
    pub fn edge_weight(&self, child: usize) -> Option<f64> {
        self.parent[child].map(|_| self.weight[child])
    }

    /// Child endpoints of all oriented edges (every vertex except the root),
    /// in index order.
    pub fn oriented_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(move |&v| v != self.root)
    }

    /// Vertices in an order where children precede parents.
    pub fn post_order(&self) -> &[usize] {
        &self.post_order
    }

    /// Distance from every vertex to the root.
    pub fn depths(&self) -> Vec<f64> {
        let n = self.vertex_count();
        let mut d = vec![0.0; n];
        for &v in self.post_order.iter().rev() {
            if let Some(p) = self.parent[v] {
                d[v] = d[p] + self.weight[v];
            }
        }
        d
    }

    /// Path metric distances from `src` to every vertex.
    pub fn distances_from(&self, src: usize) -> Result<Vec<f64>> {
        self.to_graph()?.distances_from(src)
    }

    /// The underlying undirected weighted graph.
    pub fn to_graph(&self) -> Result<WeightedGraph> {
        let edges = self
            .oriented_edges()
            .map(|v| (self.parent[v].unwrap(), v, self.weight[v]))
            .collect();
        WeightedGraph::new(self.vertex_count(), edges)
    }

    /// The same tree re-rooted at `new_root`.
    pub fn rerooted(&self, new_root: usize) -> Result<Self> {
        Self::from_graph(&self.to_graph()?, new_root)
    }

    /// Vertices on the path from the root to `v`, root first.
    pub fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut u = v;
        while let Some(p) = self.parent[u] {
            path.push(p);
            u = p;
        }
        path.reverse();
        path
    }
}

fn check_measure(tree: &RootedWeightedTree, mu: &ZeroSumMeasure) -> Result<()> {
    match mu.max_index() {
        Some(i) if i >= tree.vertex_count() => {
            Err(Error::VertexOutOfRange { vertex: i, size: tree.vertex_count() })
        }
        _ => Ok(()),
    }
}

/// Mass of the subtree below every vertex, in one bottom-up pass. The entry
/// at the root is the total mass (0 for a zero-sum measure).
pub fn subtree_masses(tree: &RootedWeightedTree, mu: &ZeroSumMeasure) -> Result<Vec<f64>> {
    check_measure(tree, mu)?;
    let mut mass = vec![0.0f64; tree.vertex_count()];
    for &(i, c) in mu.coeffs() {
        mass[i] = c;
    }
    for &v in tree.post_order() {
        if let Some(p) = tree.parent(v) {
            mass[p] += mass[v];
        }
    }
    Ok(mass)
}

/// Mass of the subtree below the oriented edge `(parent, child)`.
pub fn subtree_mass(
    tree: &RootedWeightedTree,
    mu: &ZeroSumMeasure,
    edge: (usize, usize),
) -> Result<f64> {
    let (p, c) = edge;
    if c >= tree.vertex_count() || tree.parent(c) != Some(p) {
        return Err(Error::EdgeNotInTree { parent: p, child: c });
    }
    Ok(subtree_masses(tree, mu)?[c])
}

/// Closed-form transportation-cost norm on a tree: `sum_e w_e |mu(T_e)|`.
pub fn tree_tc_norm(tree: &RootedWeightedTree, mu: &ZeroSumMeasure) -> Result<f64> {
    let mass = subtree_masses(tree, mu)?;
    Ok(tree
        .oriented_edges()
        .map(|v| tree.edge_weight(v).unwrap() * mass[v].abs())
        .sum())
}

/// A finitely supported vector indexed by oriented tree edges (keyed by the
/// child endpoint).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVector {
    coords: BTreeMap<usize, f64>,
}

impl EdgeVector {
    pub fn coords(&self) -> &BTreeMap<usize, f64> {
        &self.coords
    }

    pub fn coord(&self, child: usize) -> f64 {
        self.coords.get(&child).copied().unwrap_or(0.0)
    }

    /// Plain `l1` norm, `sum_e |x_e|`.
    pub fn l1_norm(&self) -> f64 {
        self.coords.values().map(|x| x.abs()).sum()
    }

    /// Weighted norm `sum_e w_e |x_e|` over the tree's edge weights.
    pub fn weighted_l1_norm(&self, tree: &RootedWeightedTree) -> Result<f64> {
        let mut s = 0.0;
        for (&child, &x) in &self.coords {
            let w = tree
                .edge_weight(child)
                .ok_or(Error::EdgeNotInTree { parent: child, child })?;
            s += w * x.abs();
        }
        Ok(s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut coords = self.coords.clone();
        for (&k, &x) in &other.coords {
            let e = coords.entry(k).or_insert(0.0);
            *e -= x;
            if *e == 0.0 {
                coords.remove(&k);
            }
        }
        Self { coords }
    }
}

/// The tree isometry into `l1`: coordinate `w_e * mu(T_e)` at each oriented
/// edge, so the plain `l1` norm of the image equals `tree_tc_norm(mu)`.
pub fn tree_isometry(tree: &RootedWeightedTree, mu: &ZeroSumMeasure) -> Result<EdgeVector> {
    let mass = subtree_masses(tree, mu)?;
    let coords = tree
        .oriented_edges()
        .filter_map(|v| {
            let x = tree.edge_weight(v).unwrap() * mass[v];
            (x != 0.0).then_some((v, x))
        })
        .collect();
    Ok(EdgeVector { coords })
}

/// The vertex embedding `v -> indicator of the root-to-v edge set`; distances
/// in the weighted `l1` norm reproduce the tree metric.
pub fn vertex_embedding(tree: &RootedWeightedTree, v: usize) -> Result<EdgeVector> {
    if v >= tree.vertex_count() {
        return Err(Error::VertexOutOfRange { vertex: v, size: tree.vertex_count() });
    }
    let coords = tree
        .path_from_root(v)
        .into_iter()
        .filter(|&u| u != tree.root())
        .map(|u| (u, 1.0))
        .collect();
    Ok(EdgeVector { coords })
}
