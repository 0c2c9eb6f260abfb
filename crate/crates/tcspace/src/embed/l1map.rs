//! The linear map into l1 induced by a bijective stochastic tree embedding:
//! a zero-sum measure is sent, per component, to its tree-isometry
//! coordinates scaled by the component probability. The l1 norm of the
//! image is the probability-weighted average of the tree norms, hence lies
//! between the transportation cost and its worst expected stretch multiple.

use crate::error::{Error, Result};
use crate::measure::ZeroSumMeasure;
use crate::transport::tc_norm;
use crate::tree::tree_isometry;

use super::StochasticTreeEmbedding;

/// A vector in the l1 sum of the per-component edge spaces, keyed by
/// `(component, edge child endpoint)`; only nonzero coordinates are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Image {
    coords: Vec<((usize, usize), f64)>,
}

impl L1Image {
    /// Nonzero coordinates in ascending key order.
    pub fn coords(&self) -> &[((usize, usize), f64)] {
        &self.coords
    }

    pub fn l1_norm(&self) -> f64 {
        self.coords.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut merged: std::collections::BTreeMap<(usize, usize), f64> =
            self.coords.iter().copied().collect();
        for &(key, v) in &other.coords {
            *merged.entry(key).or_insert(0.0) -= v;
        }
        L1Image {
            coords: merged.into_iter().filter(|&(_, v)| v != 0.0).collect(),
        }
    }
}

/// The induced linear embedding of the space of zero-sum measures into l1.
#[derive(Debug, Clone)]
pub struct L1EmbeddingMap {
    embedding: StochasticTreeEmbedding,
}

/// Wraps an embedding as a linear l1 map. Components whose vertex map is
/// not injective are rejected (embeddings validated at construction always
/// pass, since a collapsed pair would already violate expansiveness);
/// injective maps into larger trees (extra Steiner vertices) are fine, the
/// unused edges simply carry zero mass.
pub fn build_l1_map(embedding: StochasticTreeEmbedding) -> Result<L1EmbeddingMap> {
    let bad = embedding
        .components()
        .iter()
        .filter(|c| {
            let mut seen = vec![false; c.tree.vertex_count()];
            !c.vertex_map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
        .count();
    if bad > 0 {
        return Err(Error::NonBijectiveComponents(bad));
    }
    Ok(L1EmbeddingMap { embedding })
}

impl L1EmbeddingMap {
    pub fn embedding(&self) -> &StochasticTreeEmbedding {
        &self.embedding
    }

    /// Image of a zero-sum measure: coordinate `((i, c), .)` carries
    /// `p_i * w_e * mu(subtree below c)` for edge `e = (parent(c), c)` of
    /// component `i`.
    pub fn apply(&self, mu: &ZeroSumMeasure) -> Result<L1Image> {
        mu.check_space(self.embedding.base())?;
        let mut coords = Vec::new();
        for (i, comp) in self.embedding.components().iter().enumerate() {
            let pushed: Vec<(usize, f64)> =
                mu.coeffs().iter().map(|&(p, c)| (comp.vertex_map[p], c)).collect();
            let nu = ZeroSumMeasure::new(&pushed)?;
            let vec = tree_isometry(&comp.tree, &nu)?;
            for (&child, &value) in vec.coords() {
                coords.push(((i, child), comp.probability * value));
            }
        }
        Ok(L1Image { coords })
    }
}

/// Distortion of one measure under the l1 map.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionRow {
    /// Index of the measure in the input slice.
    pub id: usize,
    pub tc_norm: f64,
    pub l1_norm: f64,
    /// `l1_norm / tc_norm`.
    pub ratio: f64,
}

/// Distortion summary over a family of measures.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub rows: Vec<DistortionRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Compares `||Phi(mu)||_1` with `||mu||_tc` for each measure. All measures
/// must be nonzero (the ratio at zero is vacuous).
pub fn measure_distortion(
    map: &L1EmbeddingMap,
    measures: &[ZeroSumMeasure],
) -> Result<DistortionReport> {
    if measures.is_empty() {
        return Err(Error::InvalidParameters("no measures".into()));
    }
    let base = map.embedding().base();
    let mut rows = Vec::with_capacity(measures.len());
    for (id, mu) in measures.iter().enumerate() {
        if mu.is_zero() {
            return Err(Error::ZeroMeasure);
        }
        let (tc, _) = tc_norm(base, mu)?;
        let l1 = map.apply(mu)?.l1_norm();
        rows.push(DistortionRow { id, tc_norm: tc, l1_norm: l1, ratio: l1 / tc });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mean_ratio = rows.iter().map(|r| r.ratio).sum::<f64>() / rows.len() as f64;
    Ok(DistortionReport { rows, min_ratio, max_ratio, mean_ratio })
}

#[cfg(test)]
mod tests {
    use super::super::{bijective_embedding, cycle_path_embedding, sample_frt_tree};
    use super::*;
    use crate::metric::{generate_family, geodesic_metric, Family};
    use crate::transport::wasserstein;
    use crate::measure::ProbabilityMeasure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycle_molecule_norms_sit_between_tc_and_stretch_bound() {
        let emb = cycle_path_embedding(6).unwrap();
        let base = emb.base().clone();
        let bound = emb.max_mean_stretch_pairs();
        let map = build_l1_map(emb).unwrap();
        for x in 0..6 {
            for y in (x + 1)..6 {
                let mu = ZeroSumMeasure::molecule(x, y).unwrap();
                let (tc, _) = tc_norm(&base, &mu).unwrap();
                let l1 = map.apply(&mu).unwrap().l1_norm();
                assert!(l1 >= tc - 1e-9, "({x},{y}): {l1} < {tc}");
                assert!(l1 <= bound * tc + 1e-9, "({x},{y}): {l1} > {bound} * {tc}");
            }
        }
    }

    #[test]
    fn map_is_linear() {
        let emb = cycle_path_embedding(5).unwrap();
        let map = build_l1_map(emb).unwrap();
        let a = ZeroSumMeasure::new(&[(0, 2.0), (2, -1.5), (4, -0.5)]).unwrap();
        let b = ZeroSumMeasure::new(&[(1, 1.0), (3, -1.0)]).unwrap();
        let img_diff = map.apply(&a.sub(&b)).unwrap();
        let diff_img = map.apply(&a).unwrap().sub(&map.apply(&b).unwrap());
        for (l, r) in img_diff.coords().iter().zip(diff_img.coords()) {
            assert_eq!(l.0, r.0);
            assert!((l.1 - r.1).abs() < 1e-12);
        }
    }

    #[test]
    fn frt_leaf_maps_are_accepted_and_match_the_tree_norm_average() {
        use crate::tree::tree_tc_norm;
        let graph = generate_family(&Family::Cycle(5)).unwrap();
        let space = geodesic_metric(&graph).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let frt = sample_frt_tree(&space, &mut rng).unwrap();
        let comp = super::super::EmbeddingComponent {
            probability: 1.0,
            tree: frt.tree.clone(),
            vertex_map: frt.leaf_map.clone(),
        };
        let emb = StochasticTreeEmbedding::new(space, vec![comp]).unwrap();
        let map = build_l1_map(emb).unwrap();
        let mu = ZeroSumMeasure::new(&[(0, 1.0), (2, 0.5), (3, -1.5)]).unwrap();
        let pushed: Vec<(usize, f64)> =
            mu.coeffs().iter().map(|&(p, c)| (frt.leaf_map[p], c)).collect();
        let nu = ZeroSumMeasure::new(&pushed).unwrap();
        let expected = tree_tc_norm(&frt.tree, &nu).unwrap();
        assert!((map.apply(&mu).unwrap().l1_norm() - expected).abs() < 1e-12);
    }

    #[test]
    fn distortion_report_respects_the_embedding_bounds() {
        let graph = generate_family(&Family::Cycle(8)).unwrap();
        let space = geodesic_metric(&graph).unwrap();
        let emb = bijective_embedding(&space, 32, 7).unwrap();
        let bound = emb.max_mean_stretch_pairs();
        let map = build_l1_map(emb).unwrap();
        let mut measures = Vec::new();
        for x in 0..8 {
            for y in (x + 1)..8 {
                measures.push(ZeroSumMeasure::molecule(x, y).unwrap());
            }
        }
        measures.push(
            ProbabilityMeasure::uniform_on(&[0, 1, 2, 3])
                .unwrap()
                .diff(&ProbabilityMeasure::uniform_on(&[4, 5, 6, 7]).unwrap()),
        );
        let report = measure_distortion(&map, &measures).unwrap();
        assert_eq!(report.rows.len(), measures.len());
        assert!(report.min_ratio >= 1.0 - 1e-9, "min ratio {}", report.min_ratio);
        assert!(report.max_ratio <= bound + 1e-9, "max {} vs {bound}", report.max_ratio);
        assert!(report.mean_ratio >= report.min_ratio && report.mean_ratio <= report.max_ratio);
        // The uniform split across the cycle: check the l1 value equals the
        // average of the component tree norms by recomputing one row.
        let last = report.rows.last().unwrap();
        let w = wasserstein(
            &space,
            &ProbabilityMeasure::uniform_on(&[0, 1, 2, 3]).unwrap(),
            &ProbabilityMeasure::uniform_on(&[4, 5, 6, 7]).unwrap(),
        )
        .unwrap()
        .0;
        assert!((last.tc_norm - w).abs() < 1e-9);
    }

    #[test]
    fn zero_measure_rejected_in_reports() {
        let emb = cycle_path_embedding(4).unwrap();
        let map = build_l1_map(emb).unwrap();
        assert!(matches!(
            measure_distortion(&map, &[ZeroSumMeasure::zero()]),
            Err(Error::ZeroMeasure)
        ));
    }
}
