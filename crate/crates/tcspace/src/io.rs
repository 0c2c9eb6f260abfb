//! On-disk formats: JSON schemas for spaces, graphs, measures, trees,
//! embeddings, vector fields, and bound certificates, plus the CSV shapes
//! for plans and distortion tables.
//!
//! All serialization is deterministic: struct fields keep declaration
//! order, maps are sorted, and floats print in shortest round-trip form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::VectorField;
use crate::embed::{EmbeddingComponent, StochasticTreeEmbedding};
use crate::error::{Error, Result};
use crate::measure::{ProbabilityMeasure, ZeroSumMeasure};
use crate::metric::{FiniteMetricSpace, WeightedGraph};
use crate::spectral::BoundsReport;
use crate::transport::TransportPlan;
use crate::tree::{EdgeVector, RootedWeightedTree};

/// `{"points": [names], "dist": [[...]], "base": 0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default)]
    pub base: usize,
}

impl SpaceJson {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        SpaceJson {
            points: space.points().to_vec(),
            dist: space.matrix().to_vec(),
            base: space.base_point(),
        }
    }

    pub fn into_space(self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::new(self.points, self.dist, self.base)
    }
}

/// `{"n": int, "edges": [[u, v, w], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphJson {
    pub fn from_graph(graph: &WeightedGraph) -> Self {
        GraphJson { n: graph.vertex_count(), edges: graph.edges().to_vec() }
    }

    pub fn into_graph(self) -> Result<WeightedGraph> {
        WeightedGraph::new(self.n, self.edges)
    }
}

/// Either a path to a space file or an inline space object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceJson),
}

/// `{"space": <path or inline, optional>, "coeffs": {"pointIndex": value}}`.
///
/// The same shape carries signed (zero-sum) and probability coefficients;
/// the consumer picks the interpretation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceRef>,
    pub coeffs: BTreeMap<String, f64>,
}

impl MeasureJson {
    pub fn from_zero_sum(mu: &ZeroSumMeasure) -> Self {
        MeasureJson {
            space: None,
            coeffs: mu.coeffs().iter().map(|&(p, c)| (p.to_string(), c)).collect(),
        }
    }

    pub fn from_probability(mu: &ProbabilityMeasure) -> Self {
        MeasureJson {
            space: None,
            coeffs: mu.weights().iter().map(|&(p, c)| (p.to_string(), c)).collect(),
        }
    }

    fn entries(&self) -> Result<Vec<(usize, f64)>> {
        self.coeffs
            .iter()
            .map(|(k, &v)| {
                k.parse::<usize>()
                    .map(|p| (p, v))
                    .map_err(|_| Error::InvalidParameters(format!("point index {k:?}")))
            })
            .collect()
    }

    pub fn to_zero_sum(&self, space: &FiniteMetricSpace) -> Result<ZeroSumMeasure> {
        let mu = ZeroSumMeasure::new(&self.entries()?)?;
        mu.check_space(space)?;
        Ok(mu)
    }

    pub fn to_probability(&self, space: &FiniteMetricSpace) -> Result<ProbabilityMeasure> {
        let mu = ProbabilityMeasure::new(&self.entries()?)?;
        mu.check_space(space)?;
        Ok(mu)
    }
}

/// `{"n": int, "root": int, "parents": [null|int, ...], "weights": [null|w, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub root: usize,
    pub parents: Vec<Option<usize>>,
    pub weights: Vec<Option<f64>>,
}

impl TreeJson {
    pub fn from_tree(tree: &RootedWeightedTree) -> Self {
        let n = tree.vertex_count();
        TreeJson {
            n,
            root: tree.root(),
            parents: (0..n).map(|v| tree.parent(v)).collect(),
            weights: (0..n).map(|v| tree.edge_weight(v)).collect(),
        }
    }

    pub fn into_tree(self) -> Result<RootedWeightedTree> {
        if self.parents.len() != self.n || self.weights.len() != self.n {
            return Err(Error::SizeMismatch {
                left: self.parents.len().max(self.weights.len()),
                right: self.n,
            });
        }
        RootedWeightedTree::new(self.root, self.parents, self.weights)
    }
}

/// `{"p": [...], "trees": [...], "maps": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub p: Vec<f64>,
    pub trees: Vec<TreeJson>,
    pub maps: Vec<Vec<usize>>,
}

impl EmbeddingJson {
    pub fn from_embedding(embedding: &StochasticTreeEmbedding) -> Self {
        EmbeddingJson {
            p: embedding.components().iter().map(|c| c.probability).collect(),
            trees: embedding
                .components()
                .iter()
                .map(|c| TreeJson::from_tree(&c.tree))
                .collect(),
            maps: embedding.components().iter().map(|c| c.vertex_map.clone()).collect(),
        }
    }

    /// Rebuilds the embedding over `base`, re-running all domination checks.
    pub fn into_embedding(self, base: FiniteMetricSpace) -> Result<StochasticTreeEmbedding> {
        if self.p.len() != self.trees.len() || self.p.len() != self.maps.len() {
            return Err(Error::SizeMismatch {
                left: self.trees.len().max(self.maps.len()),
                right: self.p.len(),
            });
        }
        let components = self
            .p
            .into_iter()
            .zip(self.trees)
            .zip(self.maps)
            .map(|((probability, tree), vertex_map)| {
                Ok(EmbeddingComponent { probability, tree: tree.into_tree()?, vertex_map })
            })
            .collect::<Result<Vec<_>>>()?;
        StochasticTreeEmbedding::new(base, components)
    }
}

/// `{"edges": [[u, v, value], ...]}` with `u < v` fixing the stored sign:
/// `value` is the flow from `u` toward `v`. Reversed input pairs are
/// normalized by flipping the sign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorFieldJson {
    pub edges: Vec<(usize, usize, f64)>,
}

impl VectorFieldJson {
    pub fn from_field(field: &VectorField) -> Self {
        VectorFieldJson {
            edges: field.entries().map(|((u, v), w)| (u, v, w)).collect(),
        }
    }

    /// Aligns the listed values with `graph`'s edge set; edges of the graph
    /// absent from the list carry value 0, and listed non-edges are
    /// rejected.
    pub fn into_field(self, graph: &WeightedGraph) -> Result<VectorField> {
        let mut by_edge = BTreeMap::new();
        for (u, v, w) in self.edges {
            if u == v {
                return Err(Error::InvalidParameters(format!("loop edge ({u}, {v})")));
            }
            let (key, signed) = if u < v { ((u, v), w) } else { ((v, u), -w) };
            if by_edge.insert(key, signed).is_some() {
                return Err(Error::InvalidParameters(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
        }
        let values: Vec<f64> = graph
            .edges()
            .iter()
            .map(|&(u, v, _)| by_edge.remove(&(u, v)).unwrap_or(0.0))
            .collect();
        if let Some((&(u, v), _)) = by_edge.iter().next() {
            return Err(Error::InvalidParameters(format!("({u}, {v}) is not a graph edge")));
        }
        VectorField::new(graph, &values)
    }
}

/// Sparse l1 coordinates keyed by the child endpoint of each tree edge.
pub fn edge_vector_json(vector: &EdgeVector) -> BTreeMap<String, f64> {
    vector.coords().iter().map(|(&child, &c)| (child.to_string(), c)).collect()
}

/// `{delta_iso, C_iso, delta_spec, beta, C_spec, lower_bound_D}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReportJson {
    pub delta_iso: f64,
    #[serde(rename = "C_iso")]
    pub c_iso: f64,
    pub delta_spec: f64,
    pub beta: f64,
    #[serde(rename = "C_spec")]
    pub c_spec: f64,
    #[serde(rename = "lower_bound_D")]
    pub lower_bound_d: f64,
}

impl BoundsReportJson {
    pub fn from_report(report: &BoundsReport) -> Self {
        BoundsReportJson {
            delta_iso: report.delta_iso,
            c_iso: report.c_iso,
            delta_spec: report.delta_spec,
            beta: report.beta,
            c_spec: report.c_spec,
            lower_bound_d: report.lower_bound_d,
        }
    }
}

/// `row,col,mass` lines for a transport plan.
pub fn plan_csv(plan: &TransportPlan) -> String {
    let mut out = String::from("row,col,mass\n");
    for &(i, j, m) in plan.entries() {
        out.push_str(&format!("{i},{j},{m}\n"));
    }
    out
}

/// `measure_id,tc_norm,l1_norm,ratio` lines for a distortion report.
pub fn distortion_csv(rows: &[crate::embed::DistortionRow]) -> String {
    let mut out = String::from("measure_id,tc_norm,l1_norm,ratio\n");
    for row in rows {
        out.push_str(&format!("{},{},{},{}\n", row.id, row.tc_norm, row.l1_norm, row.ratio));
    }
    out
}
