//! Lower-bound diagnostics for l1 embeddings: isoperimetric-dimension
//! constants with respect to an edge measure, Sobolev norms and the
//! mean-centered Sobolev inequality they imply, Lipschitz-spectral
//! profiles built from torus characters, and the closed-form distortion
//! lower bound combining the two dimensions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{generate_family, geodesic_metric, Family, FiniteMetricSpace, WeightedGraph};
use crate::tol::{EDGE_MEASURE_SUM_ABS, ORTHOGONALITY_TOL, REPORT_SLACK};

/// Exhaustive subset enumeration cap: `2^24` subsets.
pub const EXHAUSTIVE_VERTEX_CAP: usize = 24;

/// A strictly positive probability measure on the edges of a graph, stored
/// in the graph's sorted edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMeasure {
    values: Vec<f64>,
}

impl EdgeMeasure {
    pub fn new(graph: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.edges().len() {
            return Err(Error::SizeMismatch {
                left: values.len(),
                right: graph.edges().len(),
            });
        }
        if let Some(k) = values.iter().position(|v| *v <= 0.0 || !v.is_finite()) {
            return Err(Error::InvalidEdgeMeasure {
                reason: format!("edge {k} has mass {}", values[k]),
            });
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > EDGE_MEASURE_SUM_ABS {
            return Err(Error::InvalidEdgeMeasure {
                reason: format!("total mass {total}"),
            });
        }
        Ok(EdgeMeasure { values })
    }

    /// Uniform mass `1/|E|` per edge.
    pub fn uniform(graph: &WeightedGraph) -> Result<Self> {
        let m = graph.edges().len();
        if m == 0 {
            return Err(Error::InvalidEdgeMeasure { reason: "graph has no edges".into() });
        }
        Self::new(graph, vec![1.0 / m as f64; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The vertex probability induced by an edge measure:
/// `mu(v) = 1/2 sum_{e: v in e} nu(e)`.
pub fn induced_vertex_measure(graph: &WeightedGraph, nu: &EdgeMeasure) -> Result<Vec<f64>> {
    if nu.values.len() != graph.edges().len() {
        return Err(Error::SizeMismatch {
            left: nu.values.len(),
            right: graph.edges().len(),
        });
    }
    let mut mu = vec![0.0; graph.vertex_count()];
    for (&(u, v, _), &m) in graph.edges().iter().zip(&nu.values) {
        mu[u] += 0.5 * m;
        mu[v] += 0.5 * m;
    }
    Ok(mu)
}

fn check_sizes(graph: &WeightedGraph, space: &FiniteMetricSpace, nu: &EdgeMeasure) -> Result<()> {
    if space.len() != graph.vertex_count() {
        return Err(Error::SizeMismatch { left: space.len(), right: graph.vertex_count() });
    }
    if nu.values.len() != graph.edges().len() {
        return Err(Error::SizeMismatch {
            left: nu.values.len(),
            right: graph.edges().len(),
        });
    }
    Ok(())
}

/// Perimeter of a vertex subset: `sum over boundary edges of nu(e)/d(e)`,
/// where the boundary consists of edges with exactly one endpoint in the
/// subset and `d(e)` is the metric distance between its endpoints.
pub fn perimeter(
    graph: &WeightedGraph,
    space: &FiniteMetricSpace,
    nu: &EdgeMeasure,
    subset: &[usize],
) -> Result<f64> {
    check_sizes(graph, space, nu)?;
    let mut inside = vec![false; graph.vertex_count()];
    for &v in subset {
        if v >= inside.len() {
            return Err(Error::VertexOutOfRange { vertex: v, size: inside.len() });
        }
        inside[v] = true;
    }
    Ok(graph
        .edges()
        .iter()
        .zip(&nu.values)
        .filter(|(&(u, v, _), _)| inside[u] != inside[v])
        .map(|(&(u, v, _), &m)| m / space.dist(u, v))
        .sum())
}

/// Subset search strategy for the isoperimetric constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMode {
    /// All `2^n - 2` nonempty proper subsets; requires at most
    /// `EXHAUSTIVE_VERTEX_CAP` vertices.
    Exhaustive,
    /// All singletons, all metric balls, plus `count` uniformly random
    /// subsets drawn from the given seed. Yields a lower bound on the
    /// exhaustive constant.
    Sampled { count: usize, seed: u64 },
}

/// Result of an isoperimetric-constant search.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoperimetricResult {
    /// The least `C` with `min(mu A, mu A^c)^((delta-1)/delta) <= C Per(A)`
    /// over the searched subsets.
    pub constant: f64,
    /// A subset attaining the constant, ascending.
    pub witness: Vec<usize>,
    /// Whether the search was exhaustive (otherwise the constant is only a
    /// lower bound).
    pub exhaustive: bool,
    pub delta: f64,
}

fn subset_ratio(
    edges: &[(usize, usize)],
    nu_over_d: &[f64],
    mu_prefix: &[f64],
    exponent: f64,
    contains: impl Fn(usize) -> bool,
) -> f64 {
    let mut mass = 0.0;
    for (v, &m) in mu_prefix.iter().enumerate() {
        if contains(v) {
            mass += m;
        }
    }
    let small = mass.min(1.0 - mass).max(0.0);
    let lhs = if exponent == 0.0 { 1.0 } else { small.powf(exponent) };
    let mut per = 0.0;
    for (&(u, v), &w) in edges.iter().zip(nu_over_d) {
        if contains(u) != contains(v) {
            per += w;
        }
    }
    lhs / per
}

/// Numeric order of multiword bitmasks (word 0 least significant).
fn mask_lt(a: &[u64], b: &[u64]) -> bool {
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return a[i] < b[i];
        }
    }
    false
}

/// The least isoperimetric constant over the searched subsets: the graph
/// has `nu`-isoperimetric dimension `delta` with any `C >=` this value (for
/// the exhaustive mode; sampled mode only certifies a lower bound).
pub fn isoperimetric_constant(
    graph: &WeightedGraph,
    space: &FiniteMetricSpace,
    nu: &EdgeMeasure,
    delta: f64,
    mode: SubsetMode,
) -> Result<IsoperimetricResult> {
    check_sizes(graph, space, nu)?;
    if delta < 1.0 || !delta.is_finite() {
        return Err(Error::InvalidParameters(format!("delta = {delta}")));
    }
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = graph.vertex_count();
    if n < 2 {
        return Err(Error::InvalidParameters("need at least two vertices".into()));
    }
    let mu = induced_vertex_measure(graph, nu)?;
    let exponent = (delta - 1.0) / delta;
    let nu_over_d: Vec<f64> = graph
        .edges()
        .iter()
        .zip(nu.values())
        .map(|(&(u, v, _), &m)| m / space.dist(u, v))
        .collect();

    let edges: Vec<(usize, usize)> = graph.edges().iter().map(|&(u, v, _)| (u, v)).collect();

    let (constant, witness) = match mode {
        SubsetMode::Exhaustive => {
            if n > EXHAUSTIVE_VERTEX_CAP {
                return Err(Error::TooLargeForExhaustive {
                    size: n,
                    cap: EXHAUSTIVE_VERTEX_CAP,
                });
            }
            let top = (1u64 << n) - 1;
            let best = (1..top)
                .into_par_iter()
                .map(|mask| {
                    let r = subset_ratio(&edges, &nu_over_d, &mu, exponent, |v| {
                        mask >> v & 1 == 1
                    });
                    (r, mask)
                })
                // Strict comparison with low-mask tie-break keeps the fold
                // deterministic under any parallel split.
                .reduce(
                    || (f64::NEG_INFINITY, 0),
                    |a, b| {
                        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                            b
                        } else {
                            a
                        }
                    },
                );
            (best.0, (0..n).filter(|v| best.1 >> v & 1 == 1).collect())
        }
        SubsetMode::Sampled { count, seed } => {
            // Subsets as multiword bitmasks, so any vertex count works.
            let words = n.div_ceil(64);
            let bit = |m: &mut Vec<u64>, v: usize| m[v / 64] |= 1 << (v % 64);
            let mut candidates: Vec<Vec<u64>> = Vec::new();
            for v in 0..n {
                let mut m = vec![0u64; words];
                bit(&mut m, v);
                candidates.push(m);
            }
            let mut radii: Vec<f64> = space
                .matrix()
                .iter()
                .flatten()
                .copied()
                .filter(|&d| d > 0.0)
                .collect();
            radii.sort_by(f64::total_cmp);
            radii.dedup();
            for v in 0..n {
                for &r in &radii {
                    let ball = space.ball(v, r)?;
                    if ball.is_empty() || ball.len() == n {
                        continue;
                    }
                    let mut m = vec![0u64; words];
                    for p in ball {
                        bit(&mut m, p);
                    }
                    candidates.push(m);
                }
            }
            let tail = if n.is_multiple_of(64) { u64::MAX } else { (1u64 << (n % 64)) - 1 };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut drawn = 0usize;
            while drawn < count {
                let mut m: Vec<u64> = (0..words).map(|_| rng.gen()).collect();
                *m.last_mut().expect("n >= 2") &= tail;
                let ones: usize = m.iter().map(|w| w.count_ones() as usize).sum();
                if ones == 0 || ones == n {
                    continue;
                }
                candidates.push(m);
                drawn += 1;
            }
            let best = candidates
                .into_iter()
                .map(|m| {
                    let r = subset_ratio(&edges, &nu_over_d, &mu, exponent, |v| {
                        m[v / 64] >> (v % 64) & 1 == 1
                    });
                    (r, m)
                })
                .fold((f64::NEG_INFINITY, vec![0u64; words]), |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && mask_lt(&b.1, &a.1)) {
                        b
                    } else {
                        a
                    }
                });
            (best.0, (0..n).filter(|&v| best.1[v / 64] >> (v % 64) & 1 == 1).collect())
        }
    };

    Ok(IsoperimetricResult {
        constant,
        witness,
        exhaustive: matches!(mode, SubsetMode::Exhaustive),
        delta,
    })
}

/// The `(1,p)`-Sobolev norm `|| |grad f| ||_{L_p(nu)}` with
/// `|grad f|(e) = |f(u) - f(v)| / d(u,v)`. At `p = infinity` this is the
/// plain gradient sup, which equals `Lip(f)` when the metric is geodesic
/// for the graph.
pub fn sobolev_norm(
    graph: &WeightedGraph,
    space: &FiniteMetricSpace,
    nu: &EdgeMeasure,
    f: &[f64],
    p: f64,
) -> Result<f64> {
    check_sizes(graph, space, nu)?;
    if f.len() != graph.vertex_count() {
        return Err(Error::SizeMismatch { left: f.len(), right: graph.vertex_count() });
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameters(format!("p = {p}")));
    }
    let grads: Vec<f64> = graph
        .edges()
        .iter()
        .map(|&(u, v, _)| (f[u] - f[v]).abs() / space.dist(u, v))
        .collect();
    let top = grads.iter().fold(0.0, |a: f64, &g| a.max(g));
    if p.is_infinite() || top == 0.0 {
        return Ok(top);
    }
    // Factor out the max so large `p` cannot overflow the powers.
    let total: f64 = grads.iter().zip(nu.values()).map(|(g, &m)| m * (g / top).powf(p)).sum();
    Ok(top * total.powf(1.0 / p))
}

/// Both sides of the Sobolev inequality
/// `|| f - E_mu f ||_{L_{delta'}(mu)} <= 2 C || f ||_{W^{1,1}(nu,d)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the Sobolev inequality for `f` at dimension `delta` with
/// isoperimetric constant `c`; `delta' = delta/(delta-1)` (the essential
/// sup when `delta = 1`).
pub fn sobolev_check(
    graph: &WeightedGraph,
    space: &FiniteMetricSpace,
    nu: &EdgeMeasure,
    delta: f64,
    c: f64,
    f: &[f64],
) -> Result<SobolevCheck> {
    if delta < 1.0 || !delta.is_finite() {
        return Err(Error::InvalidParameters(format!("delta = {delta}")));
    }
    let mu = induced_vertex_measure(graph, nu)?;
    if f.len() != mu.len() {
        return Err(Error::SizeMismatch { left: f.len(), right: mu.len() });
    }
    let mean: f64 = mu.iter().zip(f).map(|(&m, &v)| m * v).sum();
    let conjugate = delta / (delta - 1.0);
    let top = f.iter().map(|&v| (v - mean).abs()).fold(0.0, f64::max);
    let lhs = if delta == 1.0 || top == 0.0 {
        top
    } else {
        // Factor out the max so large conjugate exponents cannot overflow.
        let total: f64 = mu
            .iter()
            .zip(f)
            .map(|(&m, &v)| m * ((v - mean).abs() / top).powf(conjugate))
            .sum();
        top * total.powf(1.0 / conjugate)
    };
    let rhs = 2.0 * c * sobolev_norm(graph, space, nu, f, 1.0)?;
    Ok(SobolevCheck { lhs, rhs, holds: lhs <= rhs + REPORT_SLACK })
}

/// Which real part of a complex character a profile function is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterKind {
    Cosine,
    Sine,
}

/// One real character function of the discrete torus.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterFunction {
    /// Frequency pair, the lexicographically smaller of `(k, m)` and
    /// `(n-k, n-m)` mod `n`.
    pub k: usize,
    pub m: usize,
    pub kind: CharacterKind,
    /// Values indexed by vertex `x * n + y`.
    pub values: Vec<f64>,
    /// Exact Lipschitz constant over all pairs.
    pub lip_exact: f64,
    /// The guaranteed bound `2 pi max(k, m)`.
    pub lip_bound: f64,
}

/// A Lipschitz-spectral profile of the discrete torus: an orthogonal,
/// uniformly bounded family with polynomially many low-frequency members.
///
/// The family consists of the real and imaginary parts of the `n^2` torus
/// characters under the normalized geodesic metric `d = (1/n) d_graph`
/// (identically zero imaginary parts are dropped; the constant character
/// stays, carrying the `Lip = 0` entry the counting condition needs at
/// small scales). The constant `c_spec` is computed as the least value
/// making all three profile conditions hold with `delta_spec = 2` on
/// `s in [1, beta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub space: FiniteMetricSpace,
    pub graph: WeightedGraph,
    pub functions: Vec<CharacterFunction>,
    pub delta_spec: f64,
    /// Bandwidth: the largest exact Lipschitz constant in the family.
    pub beta: f64,
    /// The computed profile constant.
    pub c_spec: f64,
}

impl SpectralProfile {
    /// Vertex measure of the profile: uniform (the torus is edge-transitive,
    /// so the induced measure of the uniform edge measure is uniform too).
    pub fn vertex_measure(&self) -> Vec<f64> {
        vec![1.0 / self.space.len() as f64; self.space.len()]
    }

    /// Members that are not the constant character.
    pub fn nonconstant_count(&self) -> usize {
        self.functions.iter().filter(|f| !(f.k == 0 && f.m == 0)).count()
    }

    /// `|{ i : Lip(f_i) <= s }|`.
    pub fn count_below(&self, s: f64) -> usize {
        self.functions.iter().filter(|f| f.lip_exact <= s).count()
    }

    /// Verifies the three profile conditions at constant `c` over
    /// `s in [1, beta]`; returns the first violated condition.
    pub fn verify(&self, c: f64) -> std::result::Result<(), String> {
        let mu = self.vertex_measure();
        let nf = self.functions.len();
        for f in &self.functions {
            let linf = f.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            let l1: f64 = f.values.iter().zip(&mu).map(|(&v, &m)| m * v.abs()).sum();
            if linf > c + REPORT_SLACK || l1 < 1.0 / c - REPORT_SLACK {
                return Err(format!(
                    "norm condition fails for ({}, {}) {:?}: Linf {linf}, L1 {l1}",
                    f.k, f.m, f.kind
                ));
            }
        }
        for i in 0..nf {
            for j in (i + 1)..nf {
                let inner: f64 = self.functions[i]
                    .values
                    .iter()
                    .zip(&self.functions[j].values)
                    .zip(&mu)
                    .map(|((&a, &b), &m)| m * a * b)
                    .sum();
                if inner.abs() > ORTHOGONALITY_TOL {
                    return Err(format!("orthogonality fails at pair ({i}, {j}): {inner}"));
                }
            }
        }
        // Counting condition: between consecutive Lipschitz values the
        // count is flat while s^delta grows, so checking the suprema at the
        // right ends of the flat intervals covers every s in [1, beta].
        let mut lips: Vec<f64> = self.functions.iter().map(|f| f.lip_exact).collect();
        lips.sort_by(f64::total_cmp);
        for (idx, window) in lips.windows(2).enumerate() {
            let s = window[1].clamp(1.0, self.beta);
            let count = (idx + 1) as f64;
            if s >= 1.0 && s.powf(self.delta_spec) / c > count + REPORT_SLACK {
                return Err(format!("counting condition fails below s = {s}"));
            }
        }
        let s = self.beta.max(1.0);
        if s.powf(self.delta_spec) / c > nf as f64 + REPORT_SLACK {
            return Err(format!("counting condition fails at s = {s}"));
        }
        Ok(())
    }
}

/// Exact Lipschitz constant of a vertex function over all pairs.
fn exact_lip(space: &FiniteMetricSpace, values: &[f64]) -> f64 {
    let mut lip = 0.0f64;
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            lip = lip.max((values[x] - values[y]).abs() / space.dist(x, y));
        }
    }
    lip
}

/// Builds the Lipschitz-spectral profile of the discrete torus `Z_n x Z_n`
/// under the normalized geodesic metric `(1/n) d_graph` and the uniform
/// vertex measure, and computes its constant.
pub fn torus_spectral_profile(n: usize) -> Result<SpectralProfile> {
    if n < 2 {
        return Err(Error::InvalidSize { family: "torus".into(), n });
    }
    let graph = generate_family(&Family::Torus(n))?;
    let space = geodesic_metric(&graph)?.scaled(1.0 / n as f64)?;
    let nn = n * n;
    let tau = 2.0 * std::f64::consts::PI / n as f64;

    let mut functions = Vec::new();
    for k in 0..n {
        for m in 0..n {
            let partner = ((n - k) % n, (n - m) % n);
            if (k, m) > partner {
                continue; // the partner already contributed this pair
            }
            let lip_bound = 2.0 * std::f64::consts::PI * k.max(m) as f64;
            let mut cos_values = vec![0.0; nn];
            let mut sin_values = vec![0.0; nn];
            for x in 0..n {
                for y in 0..n {
                    let arg = tau * ((k * x + m * y) % n) as f64;
                    cos_values[x * n + y] = arg.cos();
                    sin_values[x * n + y] = arg.sin();
                }
            }
            let lip_exact = exact_lip(&space, &cos_values);
            functions.push(CharacterFunction {
                k,
                m,
                kind: CharacterKind::Cosine,
                values: cos_values,
                lip_exact,
                lip_bound,
            });
            // The sine vanishes identically exactly when the character is
            // real-valued (self-paired frequency).
            if (k, m) != partner {
                let lip_exact = exact_lip(&space, &sin_values);
                functions.push(CharacterFunction {
                    k,
                    m,
                    kind: CharacterKind::Sine,
                    values: sin_values,
                    lip_exact,
                    lip_bound,
                });
            }
        }
    }
    debug_assert_eq!(functions.len(), nn, "one real function per character");

    let beta = functions.iter().map(|f| f.lip_exact).fold(0.0, f64::max);
    let delta_spec = 2.0;

    // Smallest constant satisfying the norm and counting conditions.
    let mu = 1.0 / nn as f64;
    let mut c = 1.0f64;
    for f in &functions {
        let linf = f.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let l1: f64 = f.values.iter().map(|v| mu * v.abs()).sum();
        c = c.max(linf).max(1.0 / l1);
    }
    let mut lips: Vec<f64> = functions.iter().map(|f| f.lip_exact).collect();
    lips.sort_by(f64::total_cmp);
    for (idx, window) in lips.windows(2).enumerate() {
        let s = window[1].clamp(1.0, beta);
        c = c.max(s.powf(delta_spec) / (idx + 1) as f64);
    }
    c = c.max(beta.max(1.0).powf(delta_spec) / lips.len() as f64);

    let profile =
        SpectralProfile { space, graph, functions, delta_spec, beta, c_spec: c };
    profile
        .verify(profile.c_spec)
        .map_err(Error::InvalidParameters)?;
    Ok(profile)
}

/// The certified distortion lower bound of Eq `D >= (1/(2 C^5)) I^(1/delta_iso)`
/// with `I = integral over [1, beta] of s^(delta_spec - delta_iso - 1) ds`,
/// in closed form: `ln beta` when the dimensions agree, otherwise
/// `(beta^(delta_spec - delta_iso) - 1) / (delta_spec - delta_iso)`.
pub fn lower_bound_estimate(
    delta_iso: f64,
    delta_spec: f64,
    beta: f64,
    c: f64,
) -> Result<f64> {
    if delta_iso < 2.0 || !delta_iso.is_finite() {
        return Err(Error::InvalidParameters(format!("delta_iso = {delta_iso}")));
    }
    if delta_spec < 1.0 || !delta_spec.is_finite() {
        return Err(Error::InvalidParameters(format!("delta_spec = {delta_spec}")));
    }
    if beta < 1.0 || !beta.is_finite() {
        return Err(Error::InvalidParameters(format!("beta = {beta}")));
    }
    if c < 1.0 || !c.is_finite() {
        return Err(Error::InvalidParameters(format!("C = {c}")));
    }
    let gap = delta_spec - delta_iso;
    let integral = if gap == 0.0 { beta.ln() } else { (beta.powf(gap) - 1.0) / gap };
    Ok(integral.powf(1.0 / delta_iso) / (2.0 * c.powi(5)))
}

/// One-line certificate combining both dimensions, ready for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub delta_iso: f64,
    pub c_iso: f64,
    pub delta_spec: f64,
    pub beta: f64,
    pub c_spec: f64,
    /// `lower_bound_estimate` at `C = max(c_iso, c_spec)` (the theorem uses
    /// one constant for both roles).
    pub lower_bound_d: f64,
}

/// Evaluates the combined lower bound from an isoperimetric search and a
/// spectral profile, using the larger of the two constants.
pub fn bounds_report(
    iso: &IsoperimetricResult,
    profile: &SpectralProfile,
) -> Result<BoundsReport> {
    let c = iso.constant.max(profile.c_spec).max(1.0);
    let lower_bound_d =
        lower_bound_estimate(iso.delta.max(2.0), profile.delta_spec, profile.beta.max(1.0), c)?;
    Ok(BoundsReport {
        delta_iso: iso.delta,
        c_iso: iso.constant,
        delta_spec: profile.delta_spec,
        beta: profile.beta,
        c_spec: profile.c_spec,
        lower_bound_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_setup(n: usize) -> (WeightedGraph, FiniteMetricSpace, EdgeMeasure) {
        let g = generate_family(&Family::Cycle(n)).unwrap();
        let s = geodesic_metric(&g).unwrap();
        let nu = EdgeMeasure::uniform(&g).unwrap();
        (g, s, nu)
    }

    #[test]
    fn induced_measure_examples() {
        let (g, _, nu) = cycle_setup(6);
        let mu = induced_vertex_measure(&g, &nu).unwrap();
        for &m in &mu {
            assert!((m - 1.0 / 6.0).abs() < 1e-15);
        }
        // Star: center meets every edge.
        let star = generate_family(&Family::Star(5)).unwrap();
        let nu = EdgeMeasure::uniform(&star).unwrap();
        let mu = induced_vertex_measure(&star, &nu).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-15);
        for &m in &mu[1..] {
            assert!((m - 1.0 / 8.0).abs() < 1e-15);
        }
        assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edge_measure_validation() {
        let g = generate_family(&Family::Cycle(4)).unwrap();
        assert!(EdgeMeasure::new(&g, vec![0.5, 0.5, 0.0, 0.0]).is_err());
        assert!(EdgeMeasure::new(&g, vec![0.5, 0.5, 0.25]).is_err());
        assert!(EdgeMeasure::new(&g, vec![0.5, 0.25, 0.15, 0.2]).is_err());
        assert!(EdgeMeasure::new(&g, vec![0.4, 0.3, 0.2, 0.1]).is_ok());
    }

    #[test]
    fn perimeter_of_arcs_and_trivial_sets() {
        let (g, s, nu) = cycle_setup(6);
        assert_eq!(perimeter(&g, &s, &nu, &[]).unwrap(), 0.0);
        assert_eq!(perimeter(&g, &s, &nu, &[0, 1, 2, 3, 4, 5]).unwrap(), 0.0);
        for len in 1..6 {
            let arc: Vec<usize> = (0..len).collect();
            let p = perimeter(&g, &s, &nu, &arc).unwrap();
            assert!((p - 2.0 / 6.0).abs() < 1e-12, "arc of {len}: {p}");
            // Complement symmetry.
            let comp: Vec<usize> = (len..6).collect();
            assert!((perimeter(&g, &s, &nu, &comp).unwrap() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn isoperimetric_constants_of_known_graphs() {
        // Single edge: only subsets are the two singletons, both ratio 1.
        let g = generate_family(&Family::Path(2)).unwrap();
        let s = geodesic_metric(&g).unwrap();
        let nu = EdgeMeasure::uniform(&g).unwrap();
        let r = isoperimetric_constant(&g, &s, &nu, 1.0, SubsetMode::Exhaustive).unwrap();
        assert!((r.constant - 1.0).abs() < 1e-12);

        let (g, s, nu) = cycle_setup(6);
        let r = isoperimetric_constant(&g, &s, &nu, 1.0, SubsetMode::Exhaustive).unwrap();
        assert!((r.constant - 3.0).abs() < 1e-12);
        assert!(r.exhaustive);

        // Sampled mode can only certify a lower bound.
        let sampled = isoperimetric_constant(
            &g,
            &s,
            &nu,
            1.0,
            SubsetMode::Sampled { count: 50, seed: 3 },
        )
        .unwrap();
        assert!(!sampled.exhaustive);
        assert!(sampled.constant <= r.constant + 1e-12);
        // Arcs are metric balls, so the sampler's ball family already
        // attains the true constant here.
        assert!((sampled.constant - 3.0).abs() < 1e-12);
    }

    #[test]
    fn torus_isoperimetric_baseline() {
        let g = generate_family(&Family::Torus(4)).unwrap();
        let s = geodesic_metric(&g).unwrap();
        let nu = EdgeMeasure::uniform(&g).unwrap();
        let r = isoperimetric_constant(&g, &s, &nu, 2.0, SubsetMode::Exhaustive).unwrap();
        // Half-torus witness: mass 1/2, 8 boundary edges of 32.
        assert!((r.constant - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.witness.len(), 8);
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let g = generate_family(&Family::Torus(5)).unwrap();
        let s = geodesic_metric(&g).unwrap();
        let nu = EdgeMeasure::uniform(&g).unwrap();
        assert!(matches!(
            isoperimetric_constant(&g, &s, &nu, 2.0, SubsetMode::Exhaustive),
            Err(Error::TooLargeForExhaustive { size: 25, cap: 24 })
        ));
    }

    #[test]
    fn sobolev_norm_examples() {
        let (g, s, nu) = cycle_setup(6);
        let constant = vec![2.5; 6];
        for p in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(sobolev_norm(&g, &s, &nu, &constant, p).unwrap(), 0.0);
        }
        let indicator = vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!((sobolev_norm(&g, &s, &nu, &indicator, 1.0).unwrap() - 2.0 / 6.0).abs() < 1e-12);
        assert!(
            (sobolev_norm(&g, &s, &nu, &indicator, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12
        );
        // Monotone in p for a probability measure.
        let f = vec![0.3, -1.0, 2.0, 0.0, 1.4, -0.2];
        let mut last = 0.0;
        for p in [1.0, 1.5, 2.0, 4.0, 16.0, f64::INFINITY] {
            let v = sobolev_norm(&g, &s, &nu, &f, p).unwrap();
            assert!(v >= last - 1e-12, "p = {p}");
            last = v;
        }
    }

    #[test]
    fn sobolev_inequality_holds_with_the_exhaustive_constant() {
        use rand::Rng;
        let (g, s, nu) = cycle_setup(6);
        let c = isoperimetric_constant(&g, &s, &nu, 1.0, SubsetMode::Exhaustive)
            .unwrap()
            .constant;
        // All indicators.
        for mask in 1u32..(1 << 6) - 1 {
            let f: Vec<f64> = (0..6).map(|v| f64::from(mask >> v & 1)).collect();
            let chk = sobolev_check(&g, &s, &nu, 1.0, c, &f).unwrap();
            assert!(chk.holds, "mask {mask}: {} > {}", chk.lhs, chk.rhs);
        }
        // Random functions, delta = 1 and delta = 2.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c2 = isoperimetric_constant(&g, &s, &nu, 2.0, SubsetMode::Exhaustive)
            .unwrap()
            .constant;
        for _ in 0..200 {
            let f: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
            assert!(sobolev_check(&g, &s, &nu, 1.0, c, &f).unwrap().holds);
            assert!(sobolev_check(&g, &s, &nu, 2.0, c2, &f).unwrap().holds);
        }
    }

    #[test]
    fn profile_smallest_torus() {
        let p = torus_spectral_profile(2).unwrap();
        assert_eq!(p.functions.len(), 4);
        assert_eq!(p.nonconstant_count(), 3);
        // All three nonconstant characters are +-1-valued with Lip 4 under
        // d = (1/2) d_graph.
        for f in &p.functions {
            if f.k == 0 && f.m == 0 {
                assert_eq!(f.lip_exact, 0.0);
            } else {
                assert!((f.lip_exact - 4.0).abs() < 1e-12);
                assert!(f.lip_exact <= f.lip_bound + 1e-12);
            }
        }
        assert!((p.beta - 4.0).abs() < 1e-12);
        assert!(torus_spectral_profile(1).is_err());
    }

    #[test]
    fn profile_conditions_hold_for_medium_tori() {
        for n in [3usize, 4, 8] {
            let p = torus_spectral_profile(n).unwrap();
            assert_eq!(p.functions.len(), n * n);
            p.verify(p.c_spec).unwrap();
            // A smaller constant must fail one of the conditions.
            assert!(p.verify(p.c_spec * 0.9).is_err());
            for f in &p.functions {
                assert!(
                    f.lip_exact <= f.lip_bound + 1e-9,
                    "n = {n}, ({}, {}) {:?}: {} > {}",
                    f.k,
                    f.m,
                    f.kind,
                    f.lip_exact,
                    f.lip_bound
                );
            }
        }
    }

    #[test]
    fn lower_bound_closed_forms() {
        assert_eq!(lower_bound_estimate(2.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
        let e4 = (4.0f64).exp();
        assert!((lower_bound_estimate(2.0, 2.0, e4, 1.0).unwrap() - 1.0).abs() < 1e-12);
        // Equal-exponent power rule: integrand s^0 over [1, 2] integrates
        // to 1, so the bound is sqrt(1)/2.
        assert!((lower_bound_estimate(2.0, 3.0, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(lower_bound_estimate(1.5, 2.0, 2.0, 1.0).is_err());
        assert!(lower_bound_estimate(2.0, 0.5, 2.0, 1.0).is_err());
        assert!(lower_bound_estimate(2.0, 2.0, 0.5, 1.0).is_err());
        assert!(lower_bound_estimate(2.0, 2.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn lower_bound_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let di = rng.gen_range(2.0..4.0);
            let ds = rng.gen_range(1.0..4.0);
            let beta = rng.gen_range(1.0..20.0);
            let c = rng.gen_range(1.0..3.0);
            let v = lower_bound_estimate(di, ds, beta, c).unwrap();
            assert!(v >= 0.0);
            assert!(lower_bound_estimate(di, ds, beta + 1.0, c).unwrap() >= v - 1e-12);
            assert!(lower_bound_estimate(di, ds + 0.5, beta, c).unwrap() >= v - 1e-12);
            assert!(lower_bound_estimate(di, ds, beta, c + 0.5).unwrap() <= v + 1e-12);
        }
    }

    #[test]
    fn report_combines_both_constants() {
        let profile = torus_spectral_profile(4).unwrap();
        let nu = EdgeMeasure::uniform(&profile.graph).unwrap();
        let iso = isoperimetric_constant(
            &profile.graph,
            &profile.space,
            &nu,
            2.0,
            SubsetMode::Exhaustive,
        )
        .unwrap();
        let report = bounds_report(&iso, &profile).unwrap();
        assert!(report.lower_bound_d > 0.0);
        assert_eq!(report.delta_spec, 2.0);
        assert_eq!(report.c_iso, iso.constant);
    }
}
