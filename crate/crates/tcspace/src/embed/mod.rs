//! Stochastic embeddings of a finite metric space into dominating trees,
//! and the induced linear embeddings of transportation-cost space into l1.
//!
//! A stochastic embedding is a finite family of weighted trees with
//! probabilities: each tree's metric dominates the base metric pointwise
//! under its vertex map, and quality is measured by the expected stretch.
//! When every component tree lives on the base point set itself (a
//! bijective embedding), averaging the per-tree isometric coordinates gives
//! a linear map into l1 whose distortion on zero-sum measures is bounded by
//! the worst per-edge expected stretch.

mod frt;
mod gupta;
mod l1map;

pub use frt::{
    ball_containment, estimate_expected_stretch, sample_frt_partition, sample_frt_tree,
    ContainmentStat, FrtSample, HierarchicalPartition, PairStretch, StretchReport,
    RESCALE_MARGIN,
};
pub use gupta::{gupta_restrict, restriction_ratios, RestrictedTree};
pub use l1map::{build_l1_map, measure_distortion, DistortionReport, DistortionRow, L1Image, L1EmbeddingMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, WeightedGraph};
use crate::tol::EXPANSIVE_SLACK;
use crate::tree::RootedWeightedTree;

/// One tree of a stochastic embedding, with its probability and the map
/// from base points to tree vertices.
#[derive(Debug, Clone)]
pub struct EmbeddingComponent {
    pub probability: f64,
    pub tree: RootedWeightedTree,
    /// `vertex_map[p]` is the tree vertex carrying base point `p`.
    pub vertex_map: Vec<usize>,
}

/// A probability distribution over dominating trees for one base space.
///
/// Construction verifies that probabilities are positive and sum to 1, that
/// vertex maps are well formed, and that every component dominates the base
/// metric: `d_T(f(x), f(y)) >= d(x, y)` for all pairs, up to float slack.
#[derive(Debug, Clone)]
pub struct StochasticTreeEmbedding {
    base: FiniteMetricSpace,
    components: Vec<EmbeddingComponent>,
    /// `mapped_dist[i][x][y]`: tree distance in component `i` between the
    /// images of base points `x` and `y`.
    mapped_dist: Vec<Vec<Vec<f64>>>,
}

impl StochasticTreeEmbedding {
    pub fn new(
        base: FiniteMetricSpace,
        components: Vec<EmbeddingComponent>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::NotProbability { reason: "no components".into() });
        }
        let total: f64 = components.iter().map(|c| c.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotProbability {
                reason: format!("component probabilities sum to {total}"),
            });
        }
        let n = base.len();
        let mut mapped_dist = Vec::with_capacity(components.len());
        for (i, comp) in components.iter().enumerate() {
            if comp.probability.is_nan() || comp.probability <= 0.0 {
                return Err(Error::NotProbability {
                    reason: format!("component {i} has probability {}", comp.probability),
                });
            }
            if comp.vertex_map.len() != n {
                return Err(Error::SizeMismatch { left: comp.vertex_map.len(), right: n });
            }
            let m = comp.tree.vertex_count();
            for &v in &comp.vertex_map {
                if v >= m {
                    return Err(Error::VertexOutOfRange { vertex: v, size: m });
                }
            }
            let mut dist = vec![vec![0.0; n]; n];
            for x in 0..n {
                let from = comp.tree.distances_from(comp.vertex_map[x])?;
                for y in 0..n {
                    dist[x][y] = from[comp.vertex_map[y]];
                }
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    let d = base.dist(x, y);
                    if dist[x][y] < d - EXPANSIVE_SLACK * (1.0 + d) {
                        return Err(Error::InvalidParameters(format!(
                            "component {i} contracts pair ({x},{y}): {} < {d}",
                            dist[x][y]
                        )));
                    }
                }
            }
            mapped_dist.push(dist);
        }
        Ok(StochasticTreeEmbedding { base, components, mapped_dist })
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn components(&self) -> &[EmbeddingComponent] {
        &self.components
    }

    /// Tree distance between the images of `x` and `y` in component `i`.
    pub fn component_distance(&self, i: usize, x: usize, y: usize) -> f64 {
        self.mapped_dist[i][x][y]
    }

    /// Expected tree distance between the images of `x` and `y`.
    pub fn mean_distance(&self, x: usize, y: usize) -> f64 {
        self.components
            .iter()
            .zip(&self.mapped_dist)
            .map(|(c, d)| c.probability * d[x][y])
            .sum()
    }

    /// Expected stretch of one pair of distinct points.
    pub fn mean_stretch(&self, x: usize, y: usize) -> f64 {
        self.mean_distance(x, y) / self.base.dist(x, y)
    }

    /// Largest expected stretch over all point pairs.
    pub fn max_mean_stretch_pairs(&self) -> f64 {
        let n = self.base.len();
        let mut worst = 1.0f64;
        for x in 0..n {
            for y in (x + 1)..n {
                worst = worst.max(self.mean_stretch(x, y));
            }
        }
        worst
    }

    /// Largest expected stretch over the edges of `graph`. Edges on
    /// shortest paths have weight equal to the base distance, so this value
    /// bounds the expected stretch of every pair whose base distance is a
    /// geodesic in `graph`.
    pub fn max_mean_stretch_edges(&self, graph: &WeightedGraph) -> Result<f64> {
        if graph.vertex_count() != self.base.len() {
            return Err(Error::SizeMismatch {
                left: graph.vertex_count(),
                right: self.base.len(),
            });
        }
        let mut worst = 1.0f64;
        for &(u, v, _) in graph.edges() {
            worst = worst.max(self.mean_stretch(u, v));
        }
        Ok(worst)
    }

    /// Whether every component is a tree on the base points themselves.
    pub fn is_bijective(&self) -> bool {
        let n = self.base.len();
        self.components.iter().all(|c| {
            c.tree.vertex_count() == n && {
                let mut seen = vec![false; n];
                c.vertex_map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
            }
        })
    }
}

/// The classical embedding of an `n`-cycle into its `n` spanning paths,
/// each with probability `1/n`: component `t` removes the cycle edge
/// `(t, t+1 mod n)`. Every cycle edge has expected stretch `2(n-1)/n`.
pub fn cycle_path_embedding(n: usize) -> Result<StochasticTreeEmbedding> {
    if n < 3 {
        return Err(Error::InvalidSize { family: "cycle".into(), n });
    }
    let graph = crate::metric::generate_family(&crate::metric::Family::Cycle(n))?;
    let base = crate::metric::geodesic_metric(&graph)?;
    let p = 1.0 / n as f64;
    let mut components = Vec::with_capacity(n);
    for t in 0..n {
        // Path t+1, t+2, ..., t (indices mod n), rooted at t+1.
        let mut parents: Vec<Option<usize>> = vec![None; n];
        let mut weights: Vec<Option<f64>> = vec![None; n];
        for s in 1..n {
            let v = (t + 1 + s) % n;
            let prev = (t + s) % n;
            parents[v] = Some(prev);
            weights[v] = Some(1.0);
        }
        let tree = RootedWeightedTree::new((t + 1) % n, parents, weights)?;
        components.push(EmbeddingComponent {
            probability: p,
            tree,
            vertex_map: (0..n).collect(),
        });
    }
    StochasticTreeEmbedding::new(base, components)
}

/// Samples a bijective stochastic embedding: each component draws a
/// dominating tree, removes its internal (non-leaf) vertices by the
/// restriction construction, identifies the surviving leaves with the base
/// points, and canonicalizes every edge weight to the base distance of its
/// endpoints, which restores domination exactly.
///
/// Component `i` draws from stream `i` of a ChaCha generator seeded with
/// `master_seed`; results are reproducible and independent of thread count.
pub fn bijective_embedding(
    space: &FiniteMetricSpace,
    samples: usize,
    master_seed: u64,
) -> Result<StochasticTreeEmbedding> {
    if samples == 0 {
        return Err(Error::InvalidParameters("samples = 0".into()));
    }
    let n = space.len();
    let p = 1.0 / samples as f64;
    let components: Vec<EmbeddingComponent> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(i as u64);
            let frt = sample_frt_tree(space, &mut rng)?;
            let restricted = gupta_restrict(&frt.tree, &frt.leaf_map)?;
            let point_of_leaf: BTreeMap<usize, usize> =
                frt.leaf_map.iter().enumerate().map(|(pt, &leaf)| (leaf, pt)).collect();
            let to_point: Vec<usize> = restricted
                .vertices
                .iter()
                .map(|leaf| point_of_leaf[leaf])
                .collect();
            let edges: Vec<(usize, usize, f64)> = restricted
                .tree
                .oriented_edges()
                .map(|c| {
                    let (a, b) = (
                        to_point[restricted.tree.parent(c).expect("non-root")],
                        to_point[c],
                    );
                    (a, b, space.dist(a, b))
                })
                .collect();
            let graph = WeightedGraph::new(n, edges)?;
            let tree = RootedWeightedTree::from_graph(&graph, space.base_point())?;
            Ok(EmbeddingComponent { probability: p, tree, vertex_map: (0..n).collect() })
        })
        .collect::<Result<_>>()?;
    StochasticTreeEmbedding::new(space.clone(), components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{generate_family, geodesic_metric, Family};

    fn cycle_space(n: usize) -> FiniteMetricSpace {
        geodesic_metric(&generate_family(&Family::Cycle(n)).unwrap()).unwrap()
    }

    #[test]
    fn cycle_paths_have_the_classical_edge_stretch() {
        for n in [3usize, 4, 6, 9] {
            let emb = cycle_path_embedding(n).unwrap();
            assert!(emb.is_bijective());
            let expected = 2.0 * (n as f64 - 1.0) / n as f64;
            let graph = generate_family(&Family::Cycle(n)).unwrap();
            for &(u, v, _) in graph.edges() {
                assert!((emb.mean_stretch(u, v) - expected).abs() < 1e-12);
            }
            assert!((emb.max_mean_stretch_edges(&graph).unwrap() - expected).abs() < 1e-12);
        }
        assert!(cycle_path_embedding(2).is_err());
    }

    #[test]
    fn cycle_path_components_are_expansive_paths() {
        let emb = cycle_path_embedding(5).unwrap();
        for i in 0..5 {
            for x in 0..5 {
                for y in 0..5 {
                    let d = emb.base().dist(x, y);
                    assert!(emb.component_distance(i, x, y) >= d - 1e-12);
                }
            }
        }
    }

    #[test]
    fn contracting_component_is_rejected() {
        let base = cycle_space(4);
        // A star with tiny spokes contracts everything.
        let tree = RootedWeightedTree::new(
            0,
            vec![None, Some(0), Some(0), Some(0)],
            vec![None, Some(0.1), Some(0.1), Some(0.1)],
        )
        .unwrap();
        let comp = EmbeddingComponent { probability: 1.0, tree, vertex_map: vec![0, 1, 2, 3] };
        assert!(StochasticTreeEmbedding::new(base, vec![comp]).is_err());
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let base = cycle_space(3);
        let tree = RootedWeightedTree::new(
            0,
            vec![None, Some(0), Some(1)],
            vec![None, Some(1.0), Some(1.0)],
        )
        .unwrap();
        let comp =
            EmbeddingComponent { probability: 0.5, tree, vertex_map: vec![0, 1, 2] };
        assert!(matches!(
            StochasticTreeEmbedding::new(base, vec![comp]),
            Err(Error::NotProbability { .. })
        ));
    }

    #[test]
    fn bijective_embedding_dominates_and_is_deterministic() {
        let space = cycle_space(8);
        let emb = bijective_embedding(&space, 24, 5).unwrap();
        assert!(emb.is_bijective());
        assert_eq!(emb.components().len(), 24);
        // Construction already validates domination; spot-check stretch
        // sanity and reproducibility.
        assert!(emb.max_mean_stretch_pairs() >= 1.0);
        let again = bijective_embedding(&space, 24, 5).unwrap();
        for (a, b) in emb.components().iter().zip(again.components()) {
            assert_eq!(a.tree.vertex_count(), b.tree.vertex_count());
            for v in 0..a.tree.vertex_count() {
                assert_eq!(a.tree.parent(v), b.tree.parent(v));
                assert_eq!(a.tree.edge_weight(v), b.tree.edge_weight(v));
            }
        }
    }

    #[test]
    fn bijective_embedding_edge_weights_are_base_distances() {
        let space = cycle_space(6);
        let emb = bijective_embedding(&space, 10, 99).unwrap();
        for comp in emb.components() {
            assert_eq!(comp.tree.root(), space.base_point());
            for c in comp.tree.oriented_edges() {
                let p = comp.tree.parent(c).unwrap();
                assert_eq!(comp.tree.edge_weight(c).unwrap(), space.dist(p, c));
            }
        }
    }

    #[test]
    fn bijective_embedding_single_point() {
        let space = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        let emb = bijective_embedding(&space, 3, 0).unwrap();
        assert!(emb.is_bijective());
        assert_eq!(emb.components().len(), 3);
    }
}
