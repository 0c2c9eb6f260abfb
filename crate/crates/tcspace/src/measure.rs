//! Finitely supported measures and Lipschitz functions over a finite metric
//! space. Points are referenced by index into the space.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::tol;

/// A zero-sum signed measure with finite support: the ambient vector of a
/// transportation-cost space. Coefficients are kept sorted by point index
/// with exact zeros dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumMeasure {
    coeffs: Vec<(usize, f64)>,
}

impl ZeroSumMeasure {
    /// Sums duplicate indices, drops (near-)zero coefficients, and verifies
    /// the total mass vanishes within `tol::MASS_BALANCE_REL * (1 + scale)`.
    pub fn new(entries: &[(usize, f64)]) -> Result<Self> {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for &(i, c) in entries {
            if !c.is_finite() {
                return Err(Error::InvalidParameters(format!("coefficient {c} at point {i}")));
            }
            *merged.entry(i).or_insert(0.0) += c;
        }
        let scale = merged.values().fold(0.0f64, |m, c| m.max(c.abs()));
        let sum: f64 = merged.values().sum();
        if sum.abs() > tol::MASS_BALANCE_REL * (1.0 + scale) {
            return Err(Error::NonZeroSum { sum });
        }
        let eps = tol::MASS_BALANCE_REL * scale;
        let coeffs = merged.into_iter().filter(|(_, c)| c.abs() > eps).collect();
        Ok(Self { coeffs })
    }

    /// The elementary molecule `delta_x - delta_y` (`x != y`).
    pub fn molecule(x: usize, y: usize) -> Result<Self> {
        if x == y {
            return Err(Error::InvalidParameters(format!("molecule with x = y = {x}")));
        }
        let mut coeffs = vec![(x, 1.0), (y, -1.0)];
        coeffs.sort_by_key(|&(i, _)| i);
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sorted `(point, coefficient)` pairs with nonzero coefficients.
    pub fn coeffs(&self) -> &[(usize, f64)] {
        &self.coeffs
    }

    pub fn coeff(&self, point: usize) -> f64 {
        self.coeffs
            .binary_search_by_key(&point, |&(i, _)| i)
            .map_or(0.0, |k| self.coeffs[k].1)
    }

    /// Support points with positive coefficient, as `(point, mass)`.
    pub fn positive_part(&self) -> Vec<(usize, f64)> {
        self.coeffs.iter().copied().filter(|&(_, c)| c > 0.0).collect()
    }

    /// Support points with negative coefficient, as `(point, |mass|)`.
    pub fn negative_part(&self) -> Vec<(usize, f64)> {
        self.coeffs.iter().map(|&(i, c)| (i, -c)).filter(|&(_, c)| c > 0.0).collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.last().map(|&(i, _)| i)
    }

    /// Verifies all support indices are valid for `space`.
    pub fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        match self.max_index() {
            Some(i) if i >= space.len() => {
                Err(Error::VertexOutOfRange { vertex: i, size: space.len() })
            }
            _ => Ok(()),
        }
    }

    /// Pointwise difference `self - other` (exact cancellation of shared
    /// coefficients).
    pub fn sub(&self, other: &Self) -> Self {
        let mut merged: BTreeMap<usize, f64> = self.coeffs.iter().copied().collect();
        for &(i, c) in &other.coeffs {
            *merged.entry(i).or_insert(0.0) -= c;
        }
        let coeffs = merged.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Self { coeffs }
    }
}

/// A probability distribution with finite support over space points.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    weights: Vec<(usize, f64)>,
}

impl ProbabilityMeasure {
    pub fn new(entries: &[(usize, f64)]) -> Result<Self> {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for &(i, w) in entries {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NotProbability {
                    reason: format!("weight {w} at point {i}"),
                });
            }
            *merged.entry(i).or_insert(0.0) += w;
        }
        let sum: f64 = merged.values().sum();
        if (sum - 1.0).abs() > tol::MASS_BALANCE_REL * 2.0 {
            return Err(Error::NotProbability { reason: format!("total mass {sum}") });
        }
        let weights = merged.into_iter().filter(|(_, w)| *w > 0.0).collect();
        Ok(Self { weights })
    }

    /// Uniform distribution on a nonempty multiset of points (multiplicity
    /// counts).
    pub fn uniform_on(points: &[usize]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySubset);
        }
        let w = 1.0 / points.len() as f64;
        Self::new(&points.iter().map(|&p| (p, w)).collect::<Vec<_>>())
    }

    pub fn weights(&self) -> &[(usize, f64)] {
        &self.weights
    }

    /// The zero-sum difference `self - other`.
    pub fn diff(&self, other: &Self) -> ZeroSumMeasure {
        let mut entries: Vec<(usize, f64)> = self.weights.clone();
        entries.extend(other.weights.iter().map(|&(i, w)| (i, -w)));
        // Probability validation makes the difference sum to ~0; new() merges
        // shared atoms exactly.
        ZeroSumMeasure::new(&entries).expect("difference of probabilities is zero-sum")
    }

    pub fn max_index(&self) -> Option<usize> {
        self.weights.last().map(|&(i, _)| i)
    }

    pub fn check_space(&self, space: &FiniteMetricSpace) -> Result<()> {
        match self.max_index() {
            Some(i) if i >= space.len() => {
                Err(Error::VertexOutOfRange { vertex: i, size: space.len() })
            }
            _ => Ok(()),
        }
    }
}

/// A molecular representation `sum_j r_j (delta_{x_j} - delta_{y_j})` with
/// `r_j > 0` and `x_j != y_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularRepresentation {
    terms: Vec<(f64, usize, usize)>,
}

impl MolecularRepresentation {
    pub fn new(terms: Vec<(f64, usize, usize)>) -> Result<Self> {
        for (k, &(r, x, y)) in terms.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidTerm { term: k, reason: format!("mass {r}") });
            }
            if x == y {
                return Err(Error::InvalidTerm { term: k, reason: format!("x = y = {x}") });
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, usize, usize)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The measure this representation stands for.
    pub fn measure(&self) -> ZeroSumMeasure {
        let mut entries = Vec::with_capacity(self.terms.len() * 2);
        for &(r, x, y) in &self.terms {
            entries.push((x, r));
            entries.push((y, -r));
        }
        ZeroSumMeasure::new(&entries).expect("molecular terms are zero-sum")
    }

    /// Total cost `sum_j r_j d(x_j, y_j)`.
    pub fn cost(&self, space: &FiniteMetricSpace) -> Result<f64> {
        let n = space.len();
        for &(_, x, y) in &self.terms {
            let v = x.max(y);
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, size: n });
            }
        }
        Ok(self.terms.iter().map(|&(r, x, y)| r * space.dist(x, y)).sum())
    }

    /// True when no point is simultaneously a source `x_j` and a target
    /// `y_k`.
    pub fn is_disjoint(&self) -> bool {
        use std::collections::BTreeSet;
        let sources: BTreeSet<usize> = self.terms.iter().map(|&(_, x, _)| x).collect();
        self.terms.iter().all(|&(_, _, y)| !sources.contains(&y))
    }
}

/// A real function on the points of a space, normalized to vanish at the
/// base point.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzFunction {
    values: Vec<f64>,
}

impl LipschitzFunction {
    /// Stores `values` shifted so the base point maps to 0.
    pub fn new(space: &FiniteMetricSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::SizeMismatch { left: values.len(), right: space.len() });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters(format!("non-finite value {v}")));
        }
        let shift = values[space.base_point()];
        Ok(Self { values: values.into_iter().map(|v| v - shift).collect() })
    }

    pub fn value(&self, point: usize) -> f64 {
        self.values[point]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The Lipschitz norm `max_{x != y} |f(x) - f(y)| / d(x, y)`; 0 for a
    /// single point.
    pub fn lip_norm(&self, space: &FiniteMetricSpace) -> f64 {
        let n = self.values.len();
        let mut lip = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                lip = lip.max((self.values[i] - self.values[j]).abs() / space.dist(i, j));
            }
        }
        lip
    }

    /// The dual pairing `<f, mu> = sum_x f(x) mu(x)`.
    pub fn pairing(&self, mu: &ZeroSumMeasure) -> f64 {
        mu.coeffs().iter().map(|&(i, c)| self.values[i] * c).sum()
    }
}
