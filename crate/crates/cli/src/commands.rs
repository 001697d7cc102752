//! Subcommand implementations. Each returns the text to emit.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use schursample_core::generators::{random_connected, Weights};
use schursample_core::stats::{distribution_report, marginal_report, DistributionTestReport, MarginalReport};
use schursample_core::{
    approx_schur, estimate_reff, exact_schur_graph, sample_tree_seeded, ApproxConfig, EdgeSet, EpsMode,
    EpsilonSchedule, Error, ReffConfig, SamplerConfig, SamplerStats, WeightedMultigraph,
};
use serde::Serialize;

use crate::input::{parse_graph, parse_pairs, parse_trees, parse_vertices, read_source};
use crate::CliError;

/// Version stamped into every single-document JSON report.
pub const SCHEMA_VERSION: u32 = 1;

fn load_graph(path: &Path) -> Result<WeightedMultigraph, CliError> {
    let edges = parse_graph(&read_source(path)?)?;
    Ok(WeightedMultigraph::build(&edges)?)
}

fn check_unit_interval(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {x}")).into())
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn vertex(g: &WeightedMultigraph, label: u64) -> Result<usize, CliError> {
    g.vertex_of_label(label).ok_or(CliError::UnknownLabel(label))
}

#[derive(Serialize)]
struct SampleLine {
    edges: Vec<usize>,
    seed: u64,
    climb_hist: Vec<u64>,
    root_fallbacks: u64,
}

pub fn sample(
    graph: &Path,
    trees: u64,
    delta: f64,
    eps_mode: EpsMode,
    seed: u64,
    approx: ApproxConfig,
) -> Result<String, CliError> {
    check_unit_interval("delta", delta)?;
    let g = load_graph(graph)?;
    g.ensure_connected()?;
    let cfg = SamplerConfig {
        delta,
        eps_mode,
        approx,
        trace: false,
    };
    let lines: Vec<String> = (0..trees)
        .into_par_iter()
        .map(|i| {
            let t = sample_tree_seeded(&g, &cfg, seed ^ i)?;
            let line = SampleLine {
                edges: t.edges.original_indices(),
                seed: seed ^ i,
                climb_hist: t.stats.climb_hist,
                root_fallbacks: t.stats.root_fallbacks,
            };
            serde_json::to_string(&line).map_err(|e| Error::Internal(e.to_string()))
        })
        .collect::<Result<_, Error>>()?;
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct ReffRow {
    u: u64,
    v: u64,
    reff: f64,
}

pub fn reff(graph: &Path, pairs: &Path, eps: f64, exact: bool, seed: u64, approx: ApproxConfig) -> Result<String, CliError> {
    let g = load_graph(graph)?;
    let labels = parse_pairs(&read_source(pairs)?)?;
    let idx = labels
        .iter()
        .map(|&(u, v)| Ok((vertex(&g, u)?, vertex(&g, v)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let cfg = ReffConfig {
        exact,
        instrument: false,
        approx,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let est = estimate_reff(&g, &idx, eps, &cfg, &mut rng)?;
    let rows: Vec<ReffRow> = labels
        .iter()
        .zip(est.values)
        .map(|(&(u, v), reff)| ReffRow { u, v, reff })
        .collect();
    to_json(&rows)
}

#[derive(Serialize)]
struct ValidateReport {
    schema_version: u32,
    trees: usize,
    invalid_trees: usize,
    distribution: Option<DistributionTestReport>,
    distribution_skipped: Option<String>,
    marginals: MarginalReport,
    pass: bool,
}

pub fn validate(graph: &Path, trees: &Path, alpha: f64) -> Result<(String, bool), CliError> {
    check_unit_interval("alpha", alpha)?;
    let g = load_graph(graph)?;
    g.ensure_connected()?;
    let samples: Vec<EdgeSet> = parse_trees(&read_source(trees)?)?
        .into_iter()
        .map(|t| t.into_iter().collect())
        .collect();
    if samples.is_empty() {
        return Err(CliError::Parse("no trees to validate".into()));
    }
    let invalid_trees = samples.iter().filter(|t| !g.is_spanning_tree(t)).count();
    let (distribution, distribution_skipped) = match distribution_report(&g, &samples, alpha) {
        Ok(r) => (Some(r), None),
        Err(e @ (Error::TooLarge { .. } | Error::UndersampledCell { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let marginals = marginal_report(&g, &samples)?;
    let pass = invalid_trees == 0 && distribution.as_ref().is_none_or(|d| d.pass) && marginals.pass;
    let report = ValidateReport {
        schema_version: SCHEMA_VERSION,
        trees: samples.len(),
        invalid_trees,
        distribution,
        distribution_skipped,
        marginals,
        pass,
    };
    Ok((to_json(&report)?, pass))
}

pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub density: usize,
    pub graph: Option<PathBuf>,
    pub trees: u64,
    pub delta: f64,
    pub timings: bool,
    pub seed: u64,
    pub approx: ApproxConfig,
}

#[derive(Serialize)]
struct BenchRun {
    n: usize,
    m: usize,
    mode: EpsMode,
    schedule: EpsilonSchedule,
    trees: u64,
    node_counts_max: Vec<u64>,
    node_bounds: Vec<u64>,
    node_bound_ok: bool,
    climb_hist: Vec<u64>,
    root_fallbacks: u64,
    decisions: u64,
    max_rejection_mass: f64,
    rejection_alarm: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

#[derive(Serialize)]
struct BenchReport {
    schema_version: u32,
    seed: u64,
    delta: f64,
    runs: Vec<BenchRun>,
}

fn merge_into(acc: &mut Vec<u64>, xs: &[u64], combine: fn(u64, u64) -> u64) {
    if acc.len() < xs.len() {
        acc.resize(xs.len(), 0);
    }
    for (a, &x) in acc.iter_mut().zip(xs) {
        *a = combine(*a, x);
    }
}

fn bench_run(g: &WeightedMultigraph, mode: EpsMode, opts: &BenchOptions) -> Result<BenchRun, CliError> {
    let cfg = SamplerConfig {
        delta: opts.delta,
        eps_mode: mode,
        approx: opts.approx.clone(),
        trace: false,
    };
    let start = Instant::now();
    let samples: Vec<SamplerStats> = (0..opts.trees)
        .map(|i| sample_tree_seeded(g, &cfg, opts.seed ^ i).map(|t| t.stats))
        .collect::<Result<_, Error>>()?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut node_counts_max = Vec::new();
    let mut climb_hist = Vec::new();
    for s in &samples {
        merge_into(&mut node_counts_max, &s.node_counts, u64::max);
        merge_into(&mut climb_hist, &s.climb_hist, |a, b| a + b);
    }
    let node_bounds: Vec<u64> = (0..node_counts_max.len()).map(SamplerStats::node_bound).collect();
    let max_rejection_mass = samples.iter().map(|s| s.max_rejection_mass).fold(0.0, f64::max);
    Ok(BenchRun {
        n: g.vertex_count(),
        m: g.edge_count(),
        mode,
        schedule: EpsilonSchedule::new(g.vertex_count(), g.edge_count(), mode)?,
        trees: opts.trees,
        node_bound_ok: samples.iter().all(|s| s.node_counts_within_bound()),
        node_counts_max,
        node_bounds,
        climb_hist,
        root_fallbacks: samples.iter().map(|s| s.root_fallbacks).sum(),
        decisions: samples.iter().map(|s| s.decisions).sum(),
        max_rejection_mass,
        rejection_alarm: samples.iter().any(|s| s.rejection_alarm()),
        wall_ms: opts.timings.then_some(wall_ms),
    })
}

pub fn bench(opts: &BenchOptions) -> Result<String, CliError> {
    check_unit_interval("delta", opts.delta)?;
    let graphs: Vec<WeightedMultigraph> = match &opts.graph {
        Some(path) => vec![load_graph(path)?],
        None => opts
            .sizes
            .iter()
            .map(|&n| {
                if n < 2 {
                    return Err(CliError::Core(Error::TooFewVertices { needed: 2, found: n }));
                }
                Ok(random_connected(n, opts.density * n, Weights::Uniform(0.5, 2.0), opts.seed ^ n as u64))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut runs = Vec::new();
    for g in &graphs {
        g.ensure_connected()?;
        for mode in [EpsMode::Exact, EpsMode::Auto] {
            runs.push(bench_run(g, mode, opts)?);
        }
    }
    to_json(&BenchReport {
        schema_version: SCHEMA_VERSION,
        seed: opts.seed,
        delta: opts.delta,
        runs,
    })
}

pub fn schur(
    graph: &Path,
    keep: &Path,
    eps: f64,
    delta: f64,
    exact: bool,
    seed: u64,
    approx: ApproxConfig,
) -> Result<String, CliError> {
    let g = load_graph(graph)?;
    let mut positions = parse_vertices(&read_source(keep)?)?
        .into_iter()
        .map(|l| vertex(&g, l))
        .collect::<Result<Vec<_>, _>>()?;
    positions.sort_unstable();
    positions.dedup();
    let s = if exact {
        exact_schur_graph(&g, &positions)?
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        approx_schur(&g, &positions, eps, delta, &approx, &mut rng)?
    };
    let mut out = format!("# schur complement onto {} vertices\n", s.vertex_count());
    for e in s.edges() {
        out.push_str(&format!("{} {} {}\n", s.label(e.u), s.label(e.v), e.weight));
    }
    Ok(out)
}
