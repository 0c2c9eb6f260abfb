//! Random hierarchical partitions and the induced dominating trees, sampled
//! by iterated ball carving: a cluster of diameter bound `R` is split by
//! visiting its points in a random order and cutting closed balls of a
//! common radius drawn uniformly from `[R/4, R/2)`. Chaining the carve over
//! dyadic scales yields a partition chain whose quotient tree dominates the
//! metric, with logarithmic expected stretch.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::tree::RootedWeightedTree;

/// Multiplicative rescaling headroom: distances are scaled so the minimum
/// positive distance becomes `1 + RESCALE_MARGIN`, keeping the leaf scale
/// strictly above 1.
pub const RESCALE_MARGIN: f64 = 1e-6;

/// One ball-carving pass over `cluster` with diameter bound `bound`:
/// draws the radius, then a random order; each center claims the not-yet
/// claimed points of its closed ball. Parts keep ascending point order and
/// appear in carving order; empty claims are dropped.
fn carve(
    dist: impl Fn(usize, usize) -> f64,
    cluster: &[usize],
    bound: f64,
    rng: &mut impl Rng,
) -> Vec<Vec<usize>> {
    let r = rng.gen_range(bound / 4.0..bound / 2.0);
    let mut order = cluster.to_vec();
    order.shuffle(rng);
    let mut remaining = cluster.to_vec();
    let mut parts = Vec::new();
    for &center in &order {
        if remaining.is_empty() {
            break;
        }
        let (inside, rest): (Vec<usize>, Vec<usize>) =
            remaining.iter().partition(|&&y| dist(center, y) <= r);
        if !inside.is_empty() {
            parts.push(inside);
        }
        remaining = rest;
    }
    debug_assert!(remaining.is_empty(), "every point claims itself");
    parts
}

/// Samples one carving of the whole space at diameter bound `bound`.
/// Every part has diameter < `bound` (in fact at most `2r < bound`).
pub fn sample_frt_partition(
    space: &FiniteMetricSpace,
    bound: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<usize>>> {
    if bound <= 0.0 || !bound.is_finite() {
        return Err(Error::InvalidParameters(format!("diameter bound {bound}")));
    }
    let all: Vec<usize> = (0..space.len()).collect();
    Ok(carve(|x, y| space.dist(x, y), &all, bound, rng))
}

/// A chain of partitions `P(0) = {M} .. P(k) = singletons`, each refining
/// the previous one, with level-`j` clusters of (rescaled) diameter
/// `< 2^(k-j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalPartition {
    levels: Vec<Vec<Vec<usize>>>,
    rescale: f64,
    scale_levels: usize,
}

impl HierarchicalPartition {
    /// Clusters of level `j`, in carving order; points ascend within each.
    pub fn level(&self, j: usize) -> &[Vec<usize>] {
        &self.levels[j]
    }

    pub fn levels(&self) -> &[Vec<Vec<usize>>] {
        &self.levels
    }

    /// The factor by which distances were multiplied before carving.
    pub fn rescale(&self) -> f64 {
        self.rescale
    }

    /// The top scale exponent `k`.
    pub fn scale_levels(&self) -> usize {
        self.scale_levels
    }
}

/// One sampled dominating tree: the partition chain, the quotient tree
/// (vertices are clusters, root the whole space, leaves the singletons,
/// level-`j` edge weight `2^(k-j) / rescale`), and the map from points to
/// leaf vertices.
#[derive(Debug, Clone)]
pub struct FrtSample {
    pub partition: HierarchicalPartition,
    pub tree: RootedWeightedTree,
    /// `leaf_map[p]` is the tree vertex of the singleton cluster `{p}`.
    pub leaf_map: Vec<usize>,
}

/// Samples one dominating tree. Distances are rescaled so the minimum is
/// `1 + RESCALE_MARGIN`, the top scale `k` is the least integer with
/// `diam < 2^k`, and each cluster is carved independently per level; edge
/// weights are mapped back to the original scale, so the leaf-to-leaf tree
/// metric dominates `d` pointwise.
pub fn sample_frt_tree(space: &FiniteMetricSpace, rng: &mut impl Rng) -> Result<FrtSample> {
    let n = space.len();
    if n == 1 {
        let tree = RootedWeightedTree::new(0, vec![None], vec![None])?;
        let partition = HierarchicalPartition {
            levels: vec![vec![vec![0]]],
            rescale: 1.0,
            scale_levels: 0,
        };
        return Ok(FrtSample { partition, tree, leaf_map: vec![0] });
    }
    let rescale = (1.0 + RESCALE_MARGIN) / space.min_distance().expect("n >= 2");
    let dist = |x: usize, y: usize| space.dist(x, y) * rescale;
    let diam = space.diameter() * rescale;
    let mut k = 1usize;
    while diam >= (2.0f64).powi(k as i32) {
        k += 1;
    }

    // Quotient-tree vertices in BFS order over levels.
    let mut clusters: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut vertex_level = vec![0usize];
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut levels: Vec<Vec<Vec<usize>>> = vec![vec![(0..n).collect()]];
    let mut frontier = vec![0usize]; // vertex ids of the previous level
    for j in 1..=k {
        let bound = (2.0f64).powi((k - j) as i32);
        let mut next_frontier = Vec::new();
        let mut level_clusters = Vec::new();
        for &v in &frontier {
            let cluster = clusters[v].clone();
            let parts = if cluster.len() == 1 {
                vec![cluster]
            } else {
                carve(dist, &cluster, bound, rng)
            };
            for part in parts {
                let id = clusters.len();
                clusters.push(part.clone());
                vertex_level.push(j);
                parents.push(Some(v));
                next_frontier.push(id);
                level_clusters.push(part);
            }
        }
        levels.push(level_clusters);
        frontier = next_frontier;
    }
    debug_assert!(frontier.len() == n, "bottom level must be singletons");

    let weights: Vec<Option<f64>> = (0..clusters.len())
        .map(|v| {
            parents[v].map(|_| (2.0f64).powi((k - vertex_level[v]) as i32) / rescale)
        })
        .collect();
    let mut leaf_map = vec![usize::MAX; n];
    for &v in &frontier {
        debug_assert_eq!(clusters[v].len(), 1);
        leaf_map[clusters[v][0]] = v;
    }
    let tree = RootedWeightedTree::new(0, parents, weights)?;
    let partition =
        HierarchicalPartition { levels, rescale, scale_levels: k };
    Ok(FrtSample { partition, tree, leaf_map })
}

/// Containment statistics for one point: how often its `t`-ball stays
/// inside its own part of a sampled partition at diameter bound `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentStat {
    pub point: usize,
    /// Empirical `P(B_t(x) subset of P_x)`.
    pub empirical: f64,
    /// Binomial standard error of the empirical probability.
    pub std_error: f64,
    /// The guaranteed lower bound `(|B_{R/8}(x)| / |B_R(x)|)^{8t/R}`.
    pub lower_bound: f64,
}

/// Estimates, per point, the probability that the closed `t`-ball around
/// the point is contained in the point's part of a partition sampled at
/// diameter bound `bound`, against the guaranteed lower bound. Sample `i`
/// draws from ChaCha stream `i` of `master_seed`.
pub fn ball_containment(
    space: &FiniteMetricSpace,
    bound: f64,
    t: f64,
    samples: usize,
    master_seed: u64,
) -> Result<Vec<ContainmentStat>> {
    if bound <= 0.0 || !bound.is_finite() {
        return Err(Error::InvalidParameters(format!("diameter bound {bound}")));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameters(format!("ball radius {t}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameters("samples = 0".into()));
    }
    let n = space.len();
    let balls: Vec<Vec<usize>> = (0..n).map(|x| space.ball(x, t)).collect::<Result<_>>()?;
    let per_sample: Vec<Vec<bool>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(s as u64);
            let parts = sample_frt_partition(space, bound, &mut rng)?;
            let mut part_of = vec![usize::MAX; n];
            for (id, part) in parts.iter().enumerate() {
                for &p in part {
                    part_of[p] = id;
                }
            }
            Ok((0..n)
                .map(|x| balls[x].iter().all(|&y| part_of[y] == part_of[x]))
                .collect())
        })
        .collect::<Result<_>>()?;
    (0..n)
        .map(|x| {
            let hits = per_sample.iter().filter(|row| row[x]).count();
            let empirical = hits as f64 / samples as f64;
            let std_error = (empirical * (1.0 - empirical) / samples as f64).sqrt();
            let small = space.ball(x, bound / 8.0)?.len() as f64;
            let large = space.ball(x, bound)?.len() as f64;
            let lower_bound = (small / large).powf(8.0 * t / bound);
            Ok(ContainmentStat { point: x, empirical, std_error, lower_bound })
        })
        .collect()
}

/// Stretch statistics for one point pair across samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStretch {
    pub x: usize,
    pub y: usize,
    /// Mean of `d_T(x, y) / d(x, y)` over samples.
    pub mean: f64,
    /// Standard error of the mean.
    pub std_error: f64,
}

/// Monte Carlo stretch report over independent tree samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchReport {
    pub samples: usize,
    pub pairs: Vec<PairStretch>,
    /// Largest per-pair mean stretch.
    pub max_mean: f64,
    /// Smallest single-sample stretch observed (must be >= 1: domination).
    pub min_stretch: f64,
}

/// Per-pair mean stretch of the sampled dominating trees, with standard
/// errors. Sample `i` draws from stream `i` of a ChaCha generator seeded by
/// `master_seed`, so the result is independent of evaluation order and
/// thread count.
pub fn estimate_expected_stretch(
    space: &FiniteMetricSpace,
    samples: usize,
    master_seed: u64,
) -> Result<StretchReport> {
    if samples == 0 {
        return Err(Error::InvalidParameters("samples = 0".into()));
    }
    if space.len() < 2 {
        return Err(Error::InvalidParameters("need at least two points".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..space.len())
        .flat_map(|x| ((x + 1)..space.len()).map(move |y| (x, y)))
        .collect();
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(s as u64);
            let frt = sample_frt_tree(space, &mut rng)?;
            Ok(pair_stretches(space, &frt, &pairs))
        })
        .collect::<Result<_>>()?;

    // Deterministic fold in sample order regardless of thread count.
    let mut pairs_out = Vec::with_capacity(pairs.len());
    let mut max_mean = 0.0f64;
    let mut min_stretch = f64::INFINITY;
    for (pi, &(x, y)) in pairs.iter().enumerate() {
        let values: Vec<f64> = per_sample.iter().map(|row| row[pi]).collect();
        let mean = values.iter().sum::<f64>() / samples as f64;
        let std_error = if samples > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / ((samples - 1) as f64);
            (var / samples as f64).sqrt()
        } else {
            0.0
        };
        min_stretch = values.iter().fold(min_stretch, |m, &v| m.min(v));
        max_mean = max_mean.max(mean);
        pairs_out.push(PairStretch { x, y, mean, std_error });
    }
    Ok(StretchReport { samples, pairs: pairs_out, max_mean, min_stretch })
}

/// `d_T(x, y) / d(x, y)` for the listed pairs. Leaf paths are aligned by
/// level, so the leaf-to-leaf distance is read off at the first level where
/// the paths separate.
pub(crate) fn pair_stretches(
    space: &FiniteMetricSpace,
    frt: &FrtSample,
    pairs: &[(usize, usize)],
) -> Vec<f64> {
    let depths = frt.tree.depths();
    let paths: Vec<Vec<usize>> =
        (0..space.len()).map(|p| frt.tree.path_from_root(frt.leaf_map[p])).collect();
    pairs
        .iter()
        .map(|&(x, y)| {
            let (px, py) = (&paths[x], &paths[y]);
            debug_assert_eq!(px.len(), py.len());
            let mut split = px.len();
            for i in 0..px.len() {
                if px[i] != py[i] {
                    split = i;
                    break;
                }
            }
            debug_assert!(split > 0 && split < px.len());
            let lca = px[split - 1];
            let d_t = (depths[*px.last().unwrap()] - depths[lca])
                + (depths[*py.last().unwrap()] - depths[lca]);
            d_t / space.dist(x, y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{generate_family, geodesic_metric, Family};

    fn cycle_space(n: usize) -> FiniteMetricSpace {
        geodesic_metric(&generate_family(&Family::Cycle(n)).unwrap()).unwrap()
    }

    #[test]
    fn carve_is_a_partition_with_small_parts() {
        let space = cycle_space(12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let parts = sample_frt_partition(&space, 4.0, &mut rng).unwrap();
            let mut seen = [false; 12];
            for part in &parts {
                for &p in part {
                    assert!(!seen[p]);
                    seen[p] = true;
                }
                for &a in part {
                    for &b in part {
                        assert!(space.dist(a, b) < 4.0);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
        assert!(sample_frt_partition(&space, 0.0, &mut rng).is_err());
    }

    #[test]
    fn two_point_space_splits_at_level_one() {
        let space =
            FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let frt = sample_frt_tree(&space, &mut rng).unwrap();
        assert_eq!(frt.partition.scale_levels(), 1);
        assert_eq!(frt.partition.level(1).len(), 2);
        let d = frt.tree.distances_from(frt.leaf_map[0]).unwrap()[frt.leaf_map[1]];
        // Two unit edges at the rescaled top level, mapped back: 2 / s ~ 3.
        assert!(d >= 1.5);
        assert!((d - 3.0).abs() < 1e-4);
    }

    #[test]
    fn single_point_space() {
        let space = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let frt = sample_frt_tree(&space, &mut rng).unwrap();
        assert_eq!(frt.tree.vertex_count(), 1);
        assert_eq!(frt.leaf_map, vec![0]);
    }

    #[test]
    fn sampled_trees_dominate_the_metric() {
        let space = cycle_space(9);
        let pairs: Vec<(usize, usize)> =
            (0..9).flat_map(|x| ((x + 1)..9).map(move |y| (x, y))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let frt = sample_frt_tree(&space, &mut rng).unwrap();
            for (&(_, _), s) in pairs.iter().zip(pair_stretches(&space, &frt, &pairs)) {
                assert!(s >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn cluster_diameters_shrink_dyadically() {
        let space = cycle_space(16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frt = sample_frt_tree(&space, &mut rng).unwrap();
        let k = frt.partition.scale_levels();
        let s = frt.partition.rescale();
        for j in 0..=k {
            let bound = (2.0f64).powi((k - j) as i32);
            for cluster in frt.partition.level(j) {
                for &a in cluster {
                    for &b in cluster {
                        assert!(space.dist(a, b) * s < bound + 1e-12);
                    }
                }
            }
        }
        for cluster in frt.partition.level(k) {
            assert_eq!(cluster.len(), 1);
        }
    }

    #[test]
    fn containment_probability_beats_its_bound_on_a_cycle() {
        let space = cycle_space(8);
        for t in [0.25, 0.5] {
            let stats = ball_containment(&space, 4.0, t, 400, 11).unwrap();
            for s in &stats {
                assert!(
                    s.empirical >= s.lower_bound - 3.0 * s.std_error,
                    "point {}: {} < {} - 3 * {}",
                    s.point,
                    s.empirical,
                    s.lower_bound,
                    s.std_error
                );
            }
        }
        // t = 1: the ball has 3 points, containment is no longer trivial.
        let stats = ball_containment(&space, 4.0, 1.0, 400, 11).unwrap();
        assert!(stats.iter().any(|s| s.empirical < 1.0));
        for s in &stats {
            assert!(s.empirical >= s.lower_bound - 3.0 * s.std_error);
        }
        assert!(ball_containment(&space, -1.0, 0.5, 10, 0).is_err());
        assert!(ball_containment(&space, 4.0, 0.5, 0, 0).is_err());
    }

    #[test]
    fn huge_bound_gives_a_single_cluster() {
        // r >= bound/4 >= diam guarantees the first ball swallows the space.
        let space = cycle_space(10);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let parts =
                sample_frt_partition(&space, 4.0 * space.diameter(), &mut rng).unwrap();
            assert_eq!(parts.len(), 1);
        }
    }

    #[test]
    fn tiny_bound_gives_singletons() {
        let space = cycle_space(7);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let parts = sample_frt_partition(&space, 0.9, &mut rng).unwrap();
            assert_eq!(parts.len(), 7);
        }
    }

    #[test]
    fn stretch_report_is_deterministic_per_seed() {
        let space = cycle_space(8);
        let a = estimate_expected_stretch(&space, 20, 42).unwrap();
        let b = estimate_expected_stretch(&space, 20, 42).unwrap();
        assert_eq!(a, b);
        let c = estimate_expected_stretch(&space, 20, 43).unwrap();
        assert_ne!(a, c);
        assert!(a.min_stretch >= 1.0 - 1e-9);
        assert!(a.max_mean >= 1.0);
    }
}
