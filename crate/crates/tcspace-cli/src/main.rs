//! Batch front end: generate spaces, compute transportation-cost norms and
//! dual certificates, run tree-embedding experiments, evaluate discrete
//! calculus operators, and emit isoperimetric/spectral lower-bound
//! certificates.
//!
//! Reports are deterministic functions of (subcommand, flags, seed): the
//! config hash embedded in each report covers exactly the flags that may
//! influence the output, so `--threads` and `--out` never change bytes.
//! Exit codes: 0 success, 1 domain error (stable `error[CODE]:` line on
//! stderr), 2 usage error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tcspace::calculus::{
    extend_integral_operator, gradient, integral_operator, is_conservative, PathChoice,
};
use tcspace::embed::{
    bijective_embedding, build_l1_map, estimate_expected_stretch, gupta_restrict,
    measure_distortion, restriction_ratios,
};
use tcspace::io::{
    distortion_csv, edge_vector_json, plan_csv, BoundsReportJson, EmbeddingJson, GraphJson,
    MeasureJson, SpaceRef, TreeJson, VectorFieldJson,
};
use tcspace::measure::{MolecularRepresentation, ZeroSumMeasure};
use tcspace::metric::{generate_family, geodesic_metric, Family, FiniteMetricSpace, WeightedGraph};
use tcspace::spectral::{
    bounds_report, isoperimetric_constant, sobolev_check, torus_spectral_profile, EdgeMeasure,
    SubsetMode, EXHAUSTIVE_VERTEX_CAP,
};
use tcspace::transport::{dual_potential, tc_norm, verify_optimality, wasserstein};
use tcspace::tree::{tree_isometry, tree_tc_norm, RootedWeightedTree};
use tcspace::Error;

#[derive(Parser)]
#[command(name = "tcspace", version, about = "Transportation-cost norms, tree embeddings into l1, and lower-bound certificates", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph family and print its JSON.
    Gen(Opts),
    /// Transportation-cost norm of a zero-sum measure: value, optimal plan,
    /// dual certificate.
    Tcnorm(Opts),
    /// Wasserstein distance between two probability measures.
    Wasserstein(Opts),
    /// Closed-form tc norm on a tree graph, with the sparse l1 vector.
    TreeNorm(Opts),
    /// Sample dominating trees and report per-pair expected stretch.
    Frt(Opts),
    /// Restrict a tree to a kept vertex subset (Steiner-point removal).
    Gupta(Opts),
    /// Bijective stochastic embedding plus the induced l1 map and its
    /// distortion table.
    Embed(Opts),
    /// Discrete calculus: gradient of a function, or the (extended)
    /// integral operator of a vector field.
    Calculus(Opts),
    /// Isoperimetric constant, Sobolev spot-check, spectral profile (tori),
    /// and the combined lower-bound certificate, as one line of JSON.
    Bounds(Opts),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Gen(_) => "gen",
            Cmd::Tcnorm(_) => "tcnorm",
            Cmd::Wasserstein(_) => "wasserstein",
            Cmd::TreeNorm(_) => "tree-norm",
            Cmd::Frt(_) => "frt",
            Cmd::Gupta(_) => "gupta",
            Cmd::Embed(_) => "embed",
            Cmd::Calculus(_) => "calculus",
            Cmd::Bounds(_) => "bounds",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Cmd::Gen(o)
            | Cmd::Tcnorm(o)
            | Cmd::Wasserstein(o)
            | Cmd::TreeNorm(o)
            | Cmd::Frt(o)
            | Cmd::Gupta(o)
            | Cmd::Embed(o)
            | Cmd::Calculus(o)
            | Cmd::Bounds(o) => o,
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Graph input: `family:params` (cycle:8, path:5, star:6, torus:4,
    /// diamond:2, random_tree:n,seed[,wmin,wmax]) or a path to a graph
    /// JSON file `{"n":..., "edges":[[u,v,w],...]}`.
    #[arg(long)]
    graph: Option<String>,

    /// Measure file `{"coeffs":{"point":value},...}`; repeat the flag for
    /// subcommands that take two measures.
    #[arg(long = "measure")]
    measures: Vec<PathBuf>,

    /// RNG seed for randomized subcommands; always recorded in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Sample count for randomized subcommands (trees, subsets).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,

    /// Reporting tolerance for consistency checks embedded in reports.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,

    /// Emit the report's tabular section as CSV instead of JSON.
    #[arg(long)]
    csv: bool,

    /// Cap worker threads. Never changes report bytes.
    #[arg(long)]
    threads: Option<usize>,

    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Kept vertices for `gupta`, comma-separated (e.g. `0,3,7`).
    #[arg(long)]
    keep: Option<String>,

    /// Vertex function for `calculus`: JSON array of values.
    #[arg(long)]
    function: Option<PathBuf>,

    /// Vector field for `calculus`: JSON `{"edges":[[u,v,value],...]}`.
    #[arg(long)]
    field: Option<PathBuf>,
}

/// Domain failures carry a module error; usage failures a message.
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Stable machine-readable code for each module error.
fn error_code(e: &Error) -> &'static str {
    match e {
        Error::ShapeMismatch { .. } => "E_SHAPE",
        Error::AsymmetricMatrix { .. } => "E_ASYMMETRIC",
        Error::NegativeDistance { .. } => "E_NEGATIVE_DISTANCE",
        Error::NonzeroDiagonal(_) => "E_DIAGONAL",
        Error::ZeroDistanceDistinctPoints { .. } => "E_ZERO_DISTANCE",
        Error::TriangleViolation { .. } => "E_TRIANGLE",
        Error::VertexOutOfRange { .. } => "E_VERTEX_RANGE",
        Error::SelfLoop(_) => "E_SELF_LOOP",
        Error::DuplicateEdge { .. } => "E_DUPLICATE_EDGE",
        Error::NonPositiveWeight { .. } => "E_EDGE_WEIGHT",
        Error::DisconnectedGraph => "E_DISCONNECTED",
        Error::InvalidSize { .. } => "E_FAMILY_SIZE",
        Error::NonZeroSum { .. } => "E_NONZERO_SUM",
        Error::ZeroMeasure => "E_ZERO_MEASURE",
        Error::NotProbability { .. } => "E_NOT_PROBABILITY",
        Error::InvalidTerm { .. } => "E_MOLECULAR_TERM",
        Error::NotOneLipschitz { .. } => "E_NOT_LIPSCHITZ",
        Error::SizeMismatch { .. } => "E_SIZE_MISMATCH",
        Error::NotDoublyStochastic { .. } => "E_NOT_DOUBLY_STOCHASTIC",
        Error::NotATree { .. } => "E_NOT_A_TREE",
        Error::EdgeNotInTree { .. } => "E_EDGE_NOT_IN_TREE",
        Error::EmptyKeepSet => "E_EMPTY_KEEP",
        Error::NonBijectiveComponents(_) => "E_NON_BIJECTIVE",
        Error::NotAWalk { .. } => "E_NOT_A_WALK",
        Error::NotConservative { .. } => "E_NOT_CONSERVATIVE",
        Error::EmbeddingNotCanonical { .. } => "E_NOT_CANONICAL",
        Error::PathMismatch { .. } => "E_PATH_MISMATCH",
        Error::TooLargeForExhaustive { .. } => "E_TOO_LARGE",
        Error::InvalidParameters(_) => "E_INVALID_PARAMETERS",
        Error::InvalidEdgeMeasure { .. } => "E_EDGE_MEASURE",
        Error::EmptySubset => "E_EMPTY_SUBSET",
    }
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Report metadata: the seed and a hash of every output-relevant flag.
#[derive(Serialize)]
struct Meta {
    seed: u64,
    config: String,
}

impl Meta {
    fn new(cmd: &Cmd) -> Self {
        let o = cmd.opts();
        let mut text = String::new();
        let _ = write!(
            text,
            "{} graph={:?} measures={:?} seed={} samples={:?} tol={} csv={} keep={:?} function={:?} field={:?}",
            cmd.name(),
            o.graph,
            o.measures,
            o.seed,
            o.samples,
            o.tol,
            o.csv,
            o.keep,
            o.function,
            o.field,
        );
        Meta { seed: o.seed, config: format!("{:016x}", fnv1a(&text)) }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.command.opts().threads {
        // Capping workers must never change results; all parallel folds in
        // the library are order-deterministic.
        if rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_err() {
            eprintln!("usage error: thread pool already initialized");
            return ExitCode::from(2);
        }
    }
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error[{}]: {e}", error_code(&e));
            ExitCode::from(1)
        }
    }
}

fn run(cmd: &Cmd) -> CliResult<()> {
    let payload = match cmd {
        Cmd::Gen(o) => cmd_gen(o)?,
        Cmd::Tcnorm(o) => cmd_tcnorm(cmd, o)?,
        Cmd::Wasserstein(o) => cmd_wasserstein(cmd, o)?,
        Cmd::TreeNorm(o) => cmd_tree_norm(cmd, o)?,
        Cmd::Frt(o) => cmd_frt(cmd, o)?,
        Cmd::Gupta(o) => cmd_gupta(cmd, o)?,
        Cmd::Embed(o) => cmd_embed(cmd, o)?,
        Cmd::Calculus(o) => cmd_calculus(cmd, o)?,
        Cmd::Bounds(o) => cmd_bounds(cmd, o)?,
    };
    let opts = cmd.opts();
    match &opts.out {
        Some(path) => std::fs::write(path, payload).map_err(|e| {
            Failure::Domain(Error::InvalidParameters(format!("cannot write {path:?}: {e}")))
        })?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::Domain(Error::InvalidParameters(format!("cannot read {path:?}: {e}")))
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| {
        Failure::Domain(Error::InvalidParameters(format!("malformed JSON in {path:?}: {e}")))
    })
}

/// Loads `--graph`: a family spec when the value contains `:` and no path
/// separator, otherwise a graph JSON file. Returns the parsed family too,
/// when there is one (`bounds` keys its profile off it).
fn load_graph(opts: &Opts) -> CliResult<(WeightedGraph, Option<Family>)> {
    let Some(spec) = &opts.graph else {
        return usage("--graph is required");
    };
    if spec.contains(':') && !spec.contains('/') {
        let family: Family = spec.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
        return Ok((generate_family(&family)?, Some(family)));
    }
    let json: GraphJson = parse_json(Path::new(spec))?;
    Ok((json.into_graph()?, None))
}

fn load_measure(opts: &Opts, index: usize, expected: usize) -> CliResult<MeasureJson> {
    if opts.measures.len() != expected {
        return usage(format!(
            "expected {expected} --measure flag(s), got {}",
            opts.measures.len()
        ));
    }
    parse_json(&opts.measures[index])
}

/// The working metric space: the graph's geodesic metric, unless the
/// measure file pins an inline space (which must match the graph size when
/// a graph is also given).
fn resolve_space(graph: &WeightedGraph, measure: &MeasureJson) -> CliResult<FiniteMetricSpace> {
    match &measure.space {
        None => Ok(geodesic_metric(graph)?),
        Some(SpaceRef::Inline(json)) => {
            let space = json.clone().into_space()?;
            if space.len() != graph.vertex_count() {
                return Err(Failure::Domain(Error::SizeMismatch {
                    left: space.len(),
                    right: graph.vertex_count(),
                }));
            }
            Ok(space)
        }
        Some(SpaceRef::Path(path)) => {
            let json: tcspace::io::SpaceJson = parse_json(Path::new(path))?;
            Ok(json.into_space()?)
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    text
}

fn cmd_gen(opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    Ok(to_pretty(&GraphJson::from_graph(&graph)))
}

#[derive(Serialize)]
struct TcnormReport {
    value: f64,
    plan: Vec<(usize, usize, f64)>,
    dual: Vec<f64>,
    /// Dual certificate accepted by the optimality checker.
    verified: bool,
    duality_gap: f64,
    meta: Meta,
}

fn cmd_tcnorm(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let measure = load_measure(opts, 0, 1)?;
    let space = resolve_space(&graph, &measure)?;
    let mu = measure.to_zero_sum(&space)?;
    let (value, plan) = tc_norm(&space, &mu)?;
    let (dual, verified, gap) = if mu.is_zero() {
        (vec![0.0; space.len()], true, 0.0)
    } else {
        let f = dual_potential(&space, &mu)?;
        let rep = MolecularRepresentation::new(
            plan.entries().iter().map(|&(i, j, m)| (m, i, j)).collect(),
        )?;
        let verified = verify_optimality(&space, &rep, &f)?;
        let gap = (value - f.pairing(&mu)).abs();
        (f.values().to_vec(), verified, gap)
    };
    if gap > opts.tol * (1.0 + value) {
        return Err(Failure::Domain(Error::InvalidParameters(format!(
            "duality gap {gap} exceeds tolerance"
        ))));
    }
    if opts.csv {
        return Ok(plan_csv(&plan));
    }
    Ok(to_pretty(&TcnormReport {
        value,
        plan: plan.entries().to_vec(),
        dual,
        verified,
        duality_gap: gap,
        meta: Meta::new(cmd),
    }))
}

#[derive(Serialize)]
struct WassersteinReport {
    value: f64,
    plan: Vec<(usize, usize, f64)>,
    meta: Meta,
}

fn cmd_wasserstein(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let first = load_measure(opts, 0, 2)?;
    let second: MeasureJson = parse_json(&opts.measures[1])?;
    let space = resolve_space(&graph, &first)?;
    let sigma = first.to_probability(&space)?;
    let tau = second.to_probability(&space)?;
    let (value, plan) = wasserstein(&space, &sigma, &tau)?;
    if opts.csv {
        return Ok(plan_csv(&plan));
    }
    Ok(to_pretty(&WassersteinReport {
        value,
        plan: plan.entries().to_vec(),
        meta: Meta::new(cmd),
    }))
}

#[derive(Serialize)]
struct TreeNormReport {
    value: f64,
    /// Sparse l1 coordinates keyed by each edge's child endpoint.
    l1_vector: BTreeMap<String, f64>,
    meta: Meta,
}

fn cmd_tree_norm(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let measure = load_measure(opts, 0, 1)?;
    let tree = RootedWeightedTree::from_graph(&graph, 0)?;
    let space = resolve_space(&graph, &measure)?;
    let mu = measure.to_zero_sum(&space)?;
    let value = tree_tc_norm(&tree, &mu)?;
    let vector = tree_isometry(&tree, &mu)?;
    Ok(to_pretty(&TreeNormReport {
        value,
        l1_vector: edge_vector_json(&vector),
        meta: Meta::new(cmd),
    }))
}

#[derive(Serialize)]
struct FrtReport {
    samples: usize,
    max_mean_stretch: f64,
    min_stretch: f64,
    /// `(x, y, mean stretch, standard error)` per pair.
    pairs: Vec<(usize, usize, f64, f64)>,
    meta: Meta,
}

fn cmd_frt(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let space = geodesic_metric(&graph)?;
    let samples = opts.samples.unwrap_or(100) as usize;
    let report = estimate_expected_stretch(&space, samples, opts.seed)?;
    if opts.csv {
        let mut out = String::from("x,y,mean_stretch,std_error\n");
        for p in &report.pairs {
            let _ = writeln!(out, "{},{},{},{}", p.x, p.y, p.mean, p.std_error);
        }
        return Ok(out);
    }
    Ok(to_pretty(&FrtReport {
        samples: report.samples,
        max_mean_stretch: report.max_mean,
        min_stretch: report.min_stretch,
        pairs: report.pairs.iter().map(|p| (p.x, p.y, p.mean, p.std_error)).collect(),
        meta: Meta::new(cmd),
    }))
}

#[derive(Serialize)]
struct GuptaReport {
    /// Kept original vertex ids; position `i` is vertex `i` of `tree`.
    vertices: Vec<usize>,
    tree: TreeJson,
    ratio_min: Option<f64>,
    ratio_max: Option<f64>,
    meta: Meta,
}

fn cmd_gupta(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let Some(keep_text) = &opts.keep else {
        return usage("--keep is required for gupta");
    };
    let keep = keep_text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("bad --keep list {keep_text:?}")))?;
    let tree = RootedWeightedTree::from_graph(&graph, 0)?;
    let restricted = gupta_restrict(&tree, &keep)?;
    let ratios = restriction_ratios(&tree, &restricted)?;
    Ok(to_pretty(&GuptaReport {
        vertices: restricted.vertices.clone(),
        tree: TreeJson::from_tree(&restricted.tree),
        ratio_min: ratios.map(|r| r.0),
        ratio_max: ratios.map(|r| r.1),
        meta: Meta::new(cmd),
    }))
}

/// Deterministic zero-sum test measures for the distortion table: supports
/// of size >= 2 with centered uniform coefficients.
fn random_measures(space: &FiniteMetricSpace, count: usize, seed: u64) -> Vec<ZeroSumMeasure> {
    // Stream u64::MAX cannot collide with per-component embedding streams.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let n = space.len();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(2..=n.clamp(2, 8));
        let mut points: Vec<usize> = (0..n).collect();
        points.shuffle(&mut rng);
        points.truncate(k);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = raw.iter().sum::<f64>() / k as f64;
        let entries: Vec<(usize, f64)> =
            points.iter().zip(&raw).map(|(&p, &c)| (p, c - mean)).collect();
        if let Ok(mu) = ZeroSumMeasure::new(&entries) {
            if !mu.is_zero() {
                out.push(mu);
            }
        }
    }
    out
}

#[derive(Serialize)]
struct EmbedReport {
    components: usize,
    max_mean_stretch_pairs: f64,
    max_mean_stretch_edges: f64,
    distortion_min: f64,
    distortion_max: f64,
    distortion_mean: f64,
    /// `(measure id, tc norm, l1 norm, ratio)` rows.
    distortion: Vec<(usize, f64, f64, f64)>,
    embedding: EmbeddingJson,
    meta: Meta,
}

fn cmd_embed(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let space = geodesic_metric(&graph)?;
    if space.len() < 2 {
        return Err(Failure::Domain(Error::InvalidParameters(
            "distortion table needs at least two points".into(),
        )));
    }
    let samples = opts.samples.unwrap_or(100) as usize;
    let embedding = bijective_embedding(&space, samples, opts.seed)?;
    let stretch_pairs = embedding.max_mean_stretch_pairs();
    let stretch_edges = embedding.max_mean_stretch_edges(&graph)?;
    let embedding_json = EmbeddingJson::from_embedding(&embedding);
    let map = build_l1_map(embedding)?;
    let measures = random_measures(&space, 20, opts.seed);
    let report = measure_distortion(&map, &measures)?;
    if opts.csv {
        return Ok(distortion_csv(&report.rows));
    }
    Ok(to_pretty(&EmbedReport {
        components: samples,
        max_mean_stretch_pairs: stretch_pairs,
        max_mean_stretch_edges: stretch_edges,
        distortion_min: report.min_ratio,
        distortion_max: report.max_ratio,
        distortion_mean: report.mean_ratio,
        distortion: report
            .rows
            .iter()
            .map(|r| (r.id, r.tc_norm, r.l1_norm, r.ratio))
            .collect(),
        embedding: embedding_json,
        meta: Meta::new(cmd),
    }))
}

#[derive(Serialize)]
struct CalculusReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<VectorFieldJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    potential: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conservative: Option<bool>,
    /// Lipschitz constant of the extended potential (extension only).
    #[serde(skip_serializing_if = "Option::is_none")]
    lipschitz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sup_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_mean_stretch_edges: Option<f64>,
    meta: Meta,
}

fn cmd_calculus(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, _) = load_graph(opts)?;
    let meta = Meta::new(cmd);
    match (&opts.function, &opts.field) {
        (Some(path), None) => {
            let values: Vec<f64> = parse_json(path)?;
            let field = gradient(&graph, &values)?;
            Ok(to_pretty(&CalculusReport {
                field: Some(VectorFieldJson::from_field(&field)),
                potential: None,
                conservative: None,
                lipschitz: None,
                sup_norm: None,
                max_mean_stretch_edges: None,
                meta,
            }))
        }
        (None, Some(path)) => {
            let json: VectorFieldJson = parse_json(path)?;
            let field = json.into_field(&graph)?;
            let space = geodesic_metric(&graph)?;
            if is_conservative(&graph, &field)? {
                let potential = integral_operator(&graph, &field, space.base_point())?;
                return Ok(to_pretty(&CalculusReport {
                    field: None,
                    potential: Some(potential),
                    conservative: Some(true),
                    lipschitz: None,
                    sup_norm: Some(field.sup_norm()),
                    max_mean_stretch_edges: None,
                    meta,
                }));
            }
            let samples = opts.samples.unwrap_or(100) as usize;
            let embedding = bijective_embedding(&space, samples, opts.seed)?;
            let stretch = embedding.max_mean_stretch_edges(&graph)?;
            let potential =
                extend_integral_operator(&graph, &embedding, &field, &PathChoice::LexMinShortest)?;
            let mut lip = 0.0f64;
            for x in 0..space.len() {
                for y in (x + 1)..space.len() {
                    lip = lip.max((potential[x] - potential[y]).abs() / space.dist(x, y));
                }
            }
            Ok(to_pretty(&CalculusReport {
                field: None,
                potential: Some(potential),
                conservative: Some(false),
                lipschitz: Some(lip),
                sup_norm: Some(field.sup_norm()),
                max_mean_stretch_edges: Some(stretch),
                meta,
            }))
        }
        _ => usage("calculus needs exactly one of --function or --field"),
    }
}

#[derive(Serialize)]
struct BoundsLine {
    delta_iso: f64,
    #[serde(rename = "C_iso")]
    c_iso: f64,
    delta_spec: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "C_spec")]
    c_spec: Option<f64>,
    #[serde(rename = "lower_bound_D")]
    lower_bound_d: Option<f64>,
    exhaustive: bool,
    witness: Vec<usize>,
    sobolev_functions: usize,
    sobolev_holds: bool,
    meta: Meta,
}

fn cmd_bounds(cmd: &Cmd, opts: &Opts) -> CliResult<String> {
    let (graph, family) = load_graph(opts)?;
    let torus_side = match family {
        Some(Family::Torus(n)) => Some(n),
        _ => None,
    };
    // Tori use the unit-diameter-per-side normalization their profile is
    // stated in; everything else keeps the plain geodesic metric.
    let space = match torus_side {
        Some(n) => geodesic_metric(&graph)?.scaled(1.0 / n as f64)?,
        None => geodesic_metric(&graph)?,
    };
    let nu = EdgeMeasure::uniform(&graph)?;
    let delta_iso = 2.0;
    let mode = if graph.vertex_count() <= EXHAUSTIVE_VERTEX_CAP {
        SubsetMode::Exhaustive
    } else {
        SubsetMode::Sampled { count: opts.samples.unwrap_or(100) as usize, seed: opts.seed }
    };
    let iso = isoperimetric_constant(&graph, &space, &nu, delta_iso, mode)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(u64::MAX);
    let sobolev_functions = 100;
    let mut sobolev_holds = true;
    for _ in 0..sobolev_functions {
        let f: Vec<f64> = (0..graph.vertex_count()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if !sobolev_check(&graph, &space, &nu, delta_iso, iso.constant, &f)?.holds {
            sobolev_holds = false;
        }
    }

    let line = match torus_side {
        Some(n) => {
            let profile = torus_spectral_profile(n)?;
            let report = bounds_report(&iso, &profile)?;
            let json = BoundsReportJson::from_report(&report);
            BoundsLine {
                delta_iso: json.delta_iso,
                c_iso: json.c_iso,
                delta_spec: Some(json.delta_spec),
                beta: Some(json.beta),
                c_spec: Some(json.c_spec),
                lower_bound_d: Some(json.lower_bound_d),
                exhaustive: iso.exhaustive,
                witness: iso.witness,
                sobolev_functions,
                sobolev_holds,
                meta: Meta::new(cmd),
            }
        }
        None => BoundsLine {
            delta_iso,
            c_iso: iso.constant,
            delta_spec: None,
            beta: None,
            c_spec: None,
            lower_bound_d: None,
            exhaustive: iso.exhaustive,
            witness: iso.witness,
            sobolev_functions,
            sobolev_holds,
            meta: Meta::new(cmd),
        },
    };
    // One-line certificate per graph.
    let mut text = serde_json::to_string(&line).expect("report serialization");
    text.push('\n');
    Ok(text)
}
