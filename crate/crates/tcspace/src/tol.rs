//! Centralized numeric tolerances.
//!
//! Every comparison tolerance used by the library lives here so the numeric
//! contract is auditable in one place. Relative tolerances are applied as
//! `tol * (1 + scale)` where `scale` is the natural magnitude of the data
//! (max matrix entry, norm value, ...), so they behave absolutely near zero.

/// Metric axioms (symmetry, triangle inequality) are enforced up to this
/// relative tolerance, scaled by `1 + max_entry` of the distance matrix.
pub const METRIC_AXIOM_REL: f64 = 1e-9;

/// Zero-sum / unit-sum checks on measure coefficient vectors.
pub const MASS_BALANCE_REL: f64 = 1e-12;

/// Transport plan feasibility (marginal agreement) and flow residual snapping.
pub const FLOW_FEASIBILITY_REL: f64 = 1e-9;

/// Residual capacities below `FLOW_SNAP_REL * scale` are treated as exhausted.
pub const FLOW_SNAP_REL: f64 = 1e-12;

/// Duality-gap tolerance: `|tc_norm - <f, mu>| <= DUALITY_REL * max(1, tc_norm)`.
pub const DUALITY_REL: f64 = 1e-7;

/// Strict-betweenness test for extreme molecules, scaled by `d(x, y)`.
pub const EXTREME_POINT_REL: f64 = 1e-9;

/// Agreement of a candidate tree's geodesic metric with the input metric.
pub const TREE_METRIC_REL: f64 = 1e-9;

/// Steiner points in tree restriction reuse an existing vertex when it sits
/// within this absolute distance of the exact half-radius location.
pub const STEINER_REUSE_ABS: f64 = 1e-12;

/// Slack allowed when checking expansiveness `d_T(x, y) >= d(x, y)`.
pub const EXPANSIVE_SLACK: f64 = 1e-9;

/// Slack on the [1/4, 2] distortion window of tree restriction.
pub const RESTRICTION_RATIO_SLACK: f64 = 1e-9;

/// Doubly-stochastic validation and reconstruction of Birkhoff decompositions.
pub const DOUBLY_STOCHASTIC_TOL: f64 = 1e-9;

/// Entries of a residual bistochastic matrix below this are treated as zero.
pub const MATRIX_ZERO_ABS: f64 = 1e-12;

/// Conservativity of vector fields: cycle integrals must vanish within this
/// tolerance scaled by `1 + max |f| * cycle length`.
pub const CYCLE_INTEGRAL_REL: f64 = 1e-9;

/// Orthogonality of spectral profile functions in L2(mu).
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Edge measures must sum to one within this absolute tolerance.
pub const EDGE_MEASURE_SUM_ABS: f64 = 1e-12;

/// Generic equality slack used by report-level checks (Sobolev, profiles).
pub const REPORT_SLACK: f64 = 1e-9;
