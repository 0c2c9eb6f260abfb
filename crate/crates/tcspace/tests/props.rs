//! Property suites for the contract invariants: norm axioms, duality,
//! splicing, tree isometry, embedding guarantees, calculus identities, and
//! the isoperimetric/Sobolev inequalities, over structurally generated
//! random instances.


#![allow(clippy::needless_range_loop)]
mod common;

use proptest::prelude::*;

use tcspace::calculus::{gradient, integral_operator, line_integral};
use tcspace::embed::{gupta_restrict, restriction_ratios, sample_frt_tree};
use tcspace::measure::{MolecularRepresentation, ZeroSumMeasure};
use tcspace::metric::{FiniteMetricSpace, WeightedGraph};
use tcspace::spectral::{
    induced_vertex_measure, isoperimetric_constant, lower_bound_estimate, perimeter,
    sobolev_check, sobolev_norm, EdgeMeasure, SubsetMode,
};
use tcspace::transport::{birkhoff_decompose, dual_potential, make_disjoint, tc_norm};
use tcspace::tree::{tree_isometry, tree_tc_norm, RootedWeightedTree};

/// Metric space from free upper-triangle weights via shortest-path closure.
fn space_from_weights(n: usize, weights: &[f64]) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    let mut it = weights.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = *it.next().expect("enough weights");
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
    FiniteMetricSpace::from_matrix(d).expect("closure is a metric")
}

/// Centered coefficient vector, rejected when it collapses to zero.
fn zero_sum_from(raw: &[f64]) -> Option<ZeroSumMeasure> {
    let n = raw.len();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let entries: Vec<(usize, f64)> =
        raw.iter().enumerate().map(|(p, &c)| (p, c - mean)).collect();
    ZeroSumMeasure::new(&entries).ok().filter(|mu| !mu.is_zero())
}

fn arb_space_and_measure(max_n: usize) -> impl Strategy<Value = (FiniteMetricSpace, ZeroSumMeasure)> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.5..3.0f64, n * (n - 1) / 2),
                prop::collection::vec(-1.0..1.0f64, n),
            )
                .prop_map(move |(w, raw)| (space_from_weights(n, &w), zero_sum_from(&raw)))
        })
        .prop_filter_map("nonzero measure", |(s, m)| m.map(|m| (s, m)))
}

/// Random uniform-attachment tree graph from free choice bits.
fn tree_from_choices(parents: &[usize], weights: &[f64]) -> WeightedGraph {
    let n = parents.len() + 1;
    let edges: Vec<(usize, usize, f64)> = parents
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&p, &w))| (p % (i + 1), i + 1, w))
        .collect();
    WeightedGraph::new(n, edges).expect("attachment tree")
}

fn arb_tree(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0..1000usize, n - 1),
            prop::collection::vec(0.5..2.0f64, n - 1),
        )
            .prop_map(|(p, w)| tree_from_choices(&p, &w))
    })
}

fn add_measures(a: &ZeroSumMeasure, b: &ZeroSumMeasure) -> ZeroSumMeasure {
    let mut entries: Vec<(usize, f64)> = a.coeffs().to_vec();
    entries.extend_from_slice(b.coeffs());
    ZeroSumMeasure::new(&entries).expect("sum of zero-sum measures")
}

fn scale_measure(mu: &ZeroSumMeasure, lambda: f64) -> ZeroSumMeasure {
    let entries: Vec<(usize, f64)> =
        mu.coeffs().iter().map(|&(p, c)| (p, lambda * c)).collect();
    ZeroSumMeasure::new(&entries).expect("scaled zero-sum measure")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn norm_axioms((space, mu) in arb_space_and_measure(8), lambda in -3.0..3.0f64) {
        let (norm, _) = tc_norm(&space, &mu).unwrap();
        prop_assert!(norm > 0.0, "nonzero measure with zero norm");
        let scaled = scale_measure(&mu, lambda);
        let (snorm, _) = tc_norm(&space, &scaled).unwrap();
        prop_assert!(
            (snorm - lambda.abs() * norm).abs() <= 1e-9 * (1.0 + norm),
            "homogeneity: {snorm} vs {} * {norm}", lambda.abs()
        );
    }

    #[test]
    fn norm_triangle_inequality(
        (space, mu) in arb_space_and_measure(8),
        raw in prop::collection::vec(-1.0..1.0f64, 8),
    ) {
        let Some(nu) = zero_sum_from(&raw[..space.len()]) else { return Ok(()) };
        let (a, _) = tc_norm(&space, &mu).unwrap();
        let (b, _) = tc_norm(&space, &nu).unwrap();
        let (ab, _) = tc_norm(&space, &add_measures(&mu, &nu)).unwrap();
        prop_assert!(ab <= a + b + 1e-9 * (1.0 + a + b), "{ab} > {a} + {b}");
    }

    #[test]
    fn duality_certificate((space, mu) in arb_space_and_measure(8)) {
        let (primal, _) = tc_norm(&space, &mu).unwrap();
        let f = dual_potential(&space, &mu).unwrap();
        prop_assert!(f.lip_norm(&space) <= 1.0 + 1e-9);
        prop_assert!((primal - f.pairing(&mu)).abs() <= 1e-7 * (1.0 + primal));
    }

    #[test]
    fn splicing_preserves_measure_and_reduces_cost(
        (space, _) in arb_space_and_measure(6),
        raw in prop::collection::vec((0..6usize, 0..6usize, 0.01..1.0f64), 1..6),
    ) {
        let terms: Vec<(f64, usize, usize)> = raw
            .iter()
            .filter(|&&(x, y, _)| x != y && x < space.len() && y < space.len())
            .map(|&(x, y, r)| (r, x, y))
            .collect();
        if terms.is_empty() { return Ok(()) }
        let rep = MolecularRepresentation::new(terms).unwrap();
        let spliced = make_disjoint(&rep);
        prop_assert!(spliced.is_disjoint());
        prop_assert!(spliced.cost(&space).unwrap() <= rep.cost(&space).unwrap() + 1e-9);
        let before = rep.measure();
        let after = spliced.measure();
        for p in 0..space.len() {
            prop_assert!((before.coeff(p) - after.coeff(p)).abs() <= 1e-9);
        }
    }

    #[test]
    fn tree_norm_matches_flow_and_isometry_is_linear(
        graph in arb_tree(12),
        raw in prop::collection::vec(-1.0..1.0f64, 12),
        raw2 in prop::collection::vec(-1.0..1.0f64, 12),
    ) {
        let n = graph.vertex_count();
        let tree = RootedWeightedTree::from_graph(&graph, 0).unwrap();
        let space = tcspace::metric::geodesic_metric(&graph).unwrap();
        let Some(mu) = zero_sum_from(&raw[..n]) else { return Ok(()) };
        let closed = tree_tc_norm(&tree, &mu).unwrap();
        let (flow, _) = tc_norm(&space, &mu).unwrap();
        prop_assert!((closed - flow).abs() <= 1e-9 * (1.0 + flow));

        let phi = tree_isometry(&tree, &mu).unwrap();
        prop_assert!((phi.l1_norm() - closed).abs() <= 1e-9 * (1.0 + closed));
        if let Some(nu) = zero_sum_from(&raw2[..n]) {
            let diff_image = tree_isometry(&tree, &mu.sub(&nu)).unwrap();
            let image_diff = phi.sub(&tree_isometry(&tree, &nu).unwrap());
            for (child, coord) in diff_image.coords() {
                prop_assert!((coord - image_diff.coord(*child)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn frt_samples_dominate(
        (space, _) in arb_space_and_measure(8),
        seed in 0u64..1 << 48,
    ) {
        let mut rng = common::rng(seed);
        let sample = sample_frt_tree(&space, &mut rng).unwrap();
        let depths = sample.tree.distances_from(sample.leaf_map[0]).unwrap();
        prop_assert!(depths.iter().all(|d| d.is_finite()));
        for x in 0..space.len() {
            let from = sample.tree.distances_from(sample.leaf_map[x]).unwrap();
            for y in (x + 1)..space.len() {
                let d = space.dist(x, y);
                prop_assert!(
                    from[sample.leaf_map[y]] >= d - 1e-9 * (1.0 + d),
                    "contraction on ({x}, {y})"
                );
            }
        }
    }

    #[test]
    fn gupta_window_holds(
        graph in arb_tree(12),
        picks in prop::collection::vec(0..1000usize, 1..12),
    ) {
        let n = graph.vertex_count();
        let tree = RootedWeightedTree::from_graph(&graph, 0).unwrap();
        let mut keep: Vec<usize> = picks.iter().map(|&p| p % n).collect();
        keep.sort_unstable();
        keep.dedup();
        let restricted = gupta_restrict(&tree, &keep).unwrap();
        if let Some((lo, hi)) = restriction_ratios(&tree, &restricted).unwrap() {
            prop_assert!(lo >= 0.25 - 1e-9 && hi <= 2.0 + 1e-9, "window [{lo}, {hi}]");
        }
    }

    #[test]
    fn gradient_fields_are_exact(
        graph in arb_tree(10),
        extra in prop::collection::vec((0..10usize, 0..10usize), 0..4),
        f in prop::collection::vec(-5.0..5.0f64, 10),
    ) {
        // Densify the tree with a few extra edges to create cycles.
        let n = graph.vertex_count();
        let mut edges = graph.edges().to_vec();
        for &(a, b) in &extra {
            let (u, v) = (a % n, b % n);
            if u != v && !edges.iter().any(|&(x, y, _)| (x, y) == (u.min(v), u.max(v))) {
                edges.push((u.min(v), u.max(v), 1.0));
            }
        }
        let graph = WeightedGraph::new(n, edges).unwrap();
        let field = gradient(&graph, &f[..n]).unwrap();
        let potential = integral_operator(&graph, &field, 0).unwrap();
        for v in 0..n {
            prop_assert!((potential[v] - (f[v] - f[0])).abs() <= 1e-12);
        }
        // Closed walks of a gradient integrate to zero.
        let walk: Vec<usize> = graph
            .adjacency()[0]
            .first()
            .map(|&(v, _)| vec![0, v, 0])
            .unwrap_or_default();
        if walk.len() == 3 {
            prop_assert!(line_integral(&field, &walk).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn perimeter_symmetry_and_induced_mass(
        graph in arb_tree(10),
        mask in 1u32..1022,
        nu_raw in prop::collection::vec(0.05..1.0f64, 9),
    ) {
        let n = graph.vertex_count();
        let m = graph.edges().len();
        let total: f64 = nu_raw[..m].iter().sum();
        let nu = EdgeMeasure::new(&graph, nu_raw[..m].iter().map(|w| w / total).collect()).unwrap();
        let mu = induced_vertex_measure(&graph, &nu).unwrap();
        prop_assert!((mu.iter().sum::<f64>() - 1.0).abs() <= 1e-9);

        let space = tcspace::metric::geodesic_metric(&graph).unwrap();
        let inside: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        let outside: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 0).collect();
        if inside.is_empty() || outside.is_empty() {
            return Ok(());
        }
        let pa = perimeter(&graph, &space, &nu, &inside).unwrap();
        let pb = perimeter(&graph, &space, &nu, &outside).unwrap();
        prop_assert!((pa - pb).abs() <= 1e-12 * (1.0 + pa));
    }

    #[test]
    fn sobolev_holds_and_is_monotone_in_p(
        graph in arb_tree(8),
        f in prop::collection::vec(-3.0..3.0f64, 8),
        delta in 1.0..3.0f64,
    ) {
        let n = graph.vertex_count();
        let space = tcspace::metric::geodesic_metric(&graph).unwrap();
        let nu = EdgeMeasure::uniform(&graph).unwrap();
        let iso = isoperimetric_constant(&graph, &space, &nu, delta, SubsetMode::Exhaustive).unwrap();
        let check = sobolev_check(&graph, &space, &nu, delta, iso.constant, &f[..n]).unwrap();
        prop_assert!(check.holds, "{} > {}", check.lhs, check.rhs);

        let mut last = 0.0;
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let v = sobolev_norm(&graph, &space, &nu, &f[..n], p).unwrap();
            prop_assert!(v >= last - 1e-9, "p = {p}: {v} < {last}");
            last = v;
        }
    }

    #[test]
    fn lower_bound_monotone(
        di in 2.0..4.0f64,
        ds in 1.0..4.0f64,
        beta in 1.0..20.0f64,
        c in 1.0..3.0f64,
    ) {
        let v = lower_bound_estimate(di, ds, beta, c).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(lower_bound_estimate(di, ds, beta + 0.5, c).unwrap() >= v - 1e-12);
        prop_assert!(lower_bound_estimate(di, ds + 0.5, beta, c).unwrap() >= v - 1e-12);
        prop_assert!(lower_bound_estimate(di, ds, beta, c + 0.5).unwrap() <= v + 1e-12);
    }

    #[test]
    fn birkhoff_reconstructs(
        n in 2..=6usize,
        keys in prop::collection::vec(prop::collection::vec(0u64..1 << 32, 6), 1..6),
        coeffs in prop::collection::vec(0.05..1.0f64, 6),
    ) {
        let total: f64 = coeffs[..keys.len()].iter().sum();
        let mut matrix = vec![vec![0.0; n]; n];
        for (key, &c) in keys.iter().zip(&coeffs) {
            // Permutation by argsort of free keys (ties broken by index).
            let mut perm: Vec<usize> = (0..n).collect();
            perm.sort_by_key(|&i| (key[i], i));
            for (row, &col) in perm.iter().enumerate() {
                matrix[row][col] += c / total;
            }
        }
        let terms = birkhoff_decompose(&matrix).unwrap();
        prop_assert!(terms.len() <= (n - 1) * (n - 1) + 1);
        let mut rebuilt = vec![vec![0.0; n]; n];
        for (c, perm) in &terms {
            for (row, &col) in perm.iter().enumerate() {
                rebuilt[row][col] += c;
            }
        }
        for i in 0..n {
            for j in 0..n {
                prop_assert!((rebuilt[i][j] - matrix[i][j]).abs() < 1e-9);
            }
        }
    }
}
