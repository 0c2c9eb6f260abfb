//! Steiner-point removal: restricting a weighted tree to a subset of its
//! vertices while keeping all pairwise distances within a factor of 8
//! (between the kept pairs, the restricted metric never shrinks below 1/4
//! nor grows above 2 times the original).
//!
//! The construction recurses on a designated center `x0`: with `r0` the
//! distance from `x0` to the nearest kept vertex `v0`, every edge straddling
//! distance `r0/2` from `x0` is subdivided at that midpoint radius, the
//! branches beyond the cuts are restricted recursively from the cut points,
//! and the resulting subtrees are glued at `v0`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::metric::WeightedGraph;
use crate::tol::STEINER_REUSE_ABS;
use crate::tree::RootedWeightedTree;

/// A tree on a subset of the vertices of an original tree.
#[derive(Debug, Clone)]
pub struct RestrictedTree {
    /// Kept original vertex ids, ascending; position `i` is vertex `i` of
    /// `tree`.
    pub vertices: Vec<usize>,
    pub tree: RootedWeightedTree,
}

/// Working tree over sparse vertex ids (originals plus fresh cut points).
#[derive(Clone)]
struct Scratch {
    adj: BTreeMap<usize, BTreeMap<usize, f64>>,
}

impl Scratch {
    fn from_edges(edges: &[(usize, usize, f64)], isolated: Option<usize>) -> Self {
        let mut adj: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
        if let Some(v) = isolated {
            adj.entry(v).or_default();
        }
        for &(u, v, w) in edges {
            adj.entry(u).or_default().insert(v, w);
            adj.entry(v).or_default().insert(u, w);
        }
        Scratch { adj }
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (&u, nbrs) in &self.adj {
            for (&v, &w) in nbrs {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Repeatedly removes leaves outside `protect`.
    fn prune(&mut self, protect: &BTreeSet<usize>) {
        loop {
            let doomed: Vec<usize> = self
                .adj
                .iter()
                .filter(|(v, nbrs)| nbrs.len() <= 1 && !protect.contains(v))
                .map(|(&v, _)| v)
                .collect();
            if doomed.is_empty() || doomed.len() == self.adj.len() {
                break;
            }
            for v in doomed {
                let nbrs: Vec<usize> = self.adj[&v].keys().copied().collect();
                for u in nbrs {
                    self.adj.get_mut(&u).unwrap().remove(&v);
                }
                self.adj.remove(&v);
            }
        }
    }

    /// Distances and parent pointers from `center` by weighted DFS.
    fn walk_from(&self, center: usize) -> (BTreeMap<usize, f64>, BTreeMap<usize, usize>) {
        let mut dist = BTreeMap::new();
        let mut parent = BTreeMap::new();
        let mut stack = vec![center];
        dist.insert(center, 0.0);
        while let Some(u) = stack.pop() {
            let du = dist[&u];
            for (&v, &w) in &self.adj[&u] {
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(v) {
                    slot.insert(du + w);
                    parent.insert(v, u);
                    stack.push(v);
                }
            }
        }
        (dist, parent)
    }

    /// Vertices on the far side of the oriented edge `(near, far)`.
    fn beyond(&self, near: usize, far: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        seen.insert(far);
        let mut stack = vec![far];
        while let Some(u) = stack.pop() {
            for &v in self.adj[&u].keys() {
                if v != near && seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn restrict_to(&self, keep: &BTreeSet<usize>) -> Scratch {
        let mut adj: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
        for &v in keep {
            adj.insert(v, BTreeMap::new());
        }
        for (&u, nbrs) in &self.adj {
            if !keep.contains(&u) {
                continue;
            }
            for (&v, &w) in nbrs {
                if keep.contains(&v) {
                    adj.get_mut(&u).unwrap().insert(v, w);
                }
            }
        }
        Scratch { adj }
    }
}

/// The center-based step: all leaves of `scratch` are kept (the designated
/// `center` may be a non-kept leaf). Returns the restricted edges together
/// with the nearest kept vertex `v0` and its distance `r0` from `center`.
fn restrict_from_center(
    scratch: &Scratch,
    kept: &BTreeSet<usize>,
    center: usize,
    next_id: &mut usize,
) -> (Vec<(usize, usize, f64)>, usize, f64) {
    let (dist, parent) = scratch.walk_from(center);
    let (&v0, &r0) = kept
        .iter()
        .map(|v| (v, &dist[v]))
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(b.0)))
        .expect("kept is nonempty");
    if kept.len() == 1 {
        return (Vec::new(), v0, r0);
    }
    let half = r0 / 2.0;

    // Edges straddling distance r0/2 from the center, oriented (near, far).
    // Distances increase strictly along root paths, so each kept vertex
    // lies beyond exactly one straddling edge.
    let mut crossing: Vec<(usize, usize)> = scratch
        .edges()
        .iter()
        .map(|&(u, v, _)| if dist[&u] <= dist[&v] { (u, v) } else { (v, u) })
        .filter(|&(a, b)| dist[&a] < half && dist[&b] >= half)
        .collect();

    // The edge through which v0 is reached goes first; the rest follow in
    // far-endpoint order.
    let e1 = {
        let mut v = v0;
        while dist[&parent[&v]] >= half {
            v = parent[&v];
        }
        (parent[&v], v)
    };
    crossing.sort_by_key(|&(_, b)| b);
    crossing.retain(|&e| e != e1);
    crossing.insert(0, e1);

    let mut edges = Vec::new();
    let mut first_v = None;
    for (j, &(a, b)) in crossing.iter().enumerate() {
        let branch = scratch.beyond(a, b);
        let kept_j: BTreeSet<usize> = kept.intersection(&branch).copied().collect();
        debug_assert!(!kept_j.is_empty());
        let stub = dist[&b] - half;
        let mut sub = scratch.restrict_to(&branch);
        // Cut point at distance exactly r0/2; reuse `b` when it already
        // sits there.
        let cut = if stub <= STEINER_REUSE_ABS {
            b
        } else {
            let x = *next_id;
            *next_id += 1;
            sub.adj.entry(x).or_default().insert(b, stub);
            sub.adj.entry(b).or_default().insert(x, stub);
            x
        };
        let (sub_edges, v_j, r_j) = restrict_from_center(&sub, &kept_j, cut, next_id);
        edges.extend(sub_edges);
        if j == 0 {
            debug_assert_eq!(v_j, v0);
            first_v = Some(v_j);
        } else {
            // Glue the branch's representative to v0 at its recursive radius.
            edges.push((first_v.expect("first branch set"), v_j, r_j));
        }
    }
    (edges, v0, r0)
}

/// Top-level recursion: prune to the kept hull, split at kept cut vertices
/// (each branch keeps the cut vertex as a leaf), and hand irreducible
/// pieces to the center-based step from the lowest non-kept vertex.
fn restrict_tree(scratch: &mut Scratch, kept: &BTreeSet<usize>, next_id: &mut usize) -> Vec<(usize, usize, f64)> {
    scratch.prune(kept);
    if scratch.adj.keys().all(|v| kept.contains(v)) {
        return scratch.edges();
    }
    let split = scratch
        .adj
        .iter()
        .find(|(v, nbrs)| kept.contains(v) && nbrs.len() >= 2)
        .map(|(&v, _)| v);
    if let Some(a) = split {
        let mut edges = Vec::new();
        let nbrs: Vec<usize> = scratch.adj[&a].keys().copied().collect();
        for w in nbrs {
            let mut branch = scratch.beyond(a, w);
            branch.insert(a);
            let mut sub = scratch.restrict_to(&branch);
            let kept_sub: BTreeSet<usize> = kept.intersection(&branch).copied().collect();
            edges.extend(restrict_tree(&mut sub, &kept_sub, next_id));
        }
        return edges;
    }
    // All kept vertices are leaves here; pick the lowest non-kept vertex as
    // the center.
    let center = *scratch.adj.keys().find(|v| !kept.contains(v)).expect("non-kept exists");
    let (edges, _, _) = restrict_from_center(scratch, kept, center, next_id);
    edges
}

/// Restricts `tree` to the vertex subset `keep`, eliminating all other
/// (Steiner) vertices. Kept pairwise distances satisfy
/// `d(u,v)/4 <= d'(u,v) <= 2 d(u,v)`.
pub fn gupta_restrict(tree: &RootedWeightedTree, keep: &[usize]) -> Result<RestrictedTree> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let n = tree.vertex_count();
    let mut kept = BTreeSet::new();
    for &v in keep {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, size: n });
        }
        kept.insert(v);
    }
    let orig_edges: Vec<(usize, usize, f64)> = tree
        .oriented_edges()
        .map(|c| {
            (tree.parent(c).expect("non-root"), c, tree.edge_weight(c).expect("tree edge"))
        })
        .collect();
    let isolated = if orig_edges.is_empty() { Some(tree.root()) } else { None };
    let mut scratch = Scratch::from_edges(&orig_edges, isolated);
    let mut next_id = n;
    let edges = restrict_tree(&mut scratch, &kept, &mut next_id);

    let vertices: Vec<usize> = kept.iter().copied().collect();
    let index: BTreeMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    debug_assert_eq!(edges.len() + 1, vertices.len());
    let mapped: Vec<(usize, usize, f64)> = edges
        .iter()
        .map(|&(u, v, w)| (index[&u], index[&v], w))
        .collect();
    let graph = WeightedGraph::new(vertices.len(), mapped)?;
    let restricted = RootedWeightedTree::from_graph(&graph, 0)?;
    Ok(RestrictedTree { vertices, tree: restricted })
}

/// Extremes of `d_restricted / d_original` over kept pairs; `None` for a
/// single kept vertex.
pub fn restriction_ratios(
    original: &RootedWeightedTree,
    restricted: &RestrictedTree,
) -> Result<Option<(f64, f64)>> {
    let m = restricted.vertices.len();
    if m < 2 {
        return Ok(None);
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..m {
        let d_new = restricted.tree.distances_from(i)?;
        let d_old = original.distances_from(restricted.vertices[i])?;
        for j in (i + 1)..m {
            let ratio = d_new[j] / d_old[restricted.vertices[j]];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok(Some((lo, hi)))
}
