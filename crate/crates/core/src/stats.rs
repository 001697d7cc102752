//! Statistical checks for samplers and randomized estimators.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dense::{enumerate_trees, leverage_scores_exact};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, WeightedMultigraph};

/// Default per-test significance level.
pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Chi-square needs at least this many expected observations per cell.
pub const MIN_EXPECTED_COUNT: f64 = 10.0;

/// Per-test level when `tests` tests share an overall level `alpha`.
pub fn bonferroni(alpha: f64, tests: usize) -> f64 {
    alpha / tests.max(1) as f64
}

/// Anything with a pass/fail verdict.
pub trait Verdict {
    fn passed(&self) -> bool;
}

/// Runs `test(attempt)` and, if it fails, once more with `attempt = 1`.
/// Returns the last report and the number of attempts used.
pub fn retry_once<T: Verdict>(mut test: impl FnMut(u32) -> Result<T>) -> Result<(T, u32)> {
    let first = test(0)?;
    if first.passed() {
        return Ok((first, 1));
    }
    Ok((test(1)?, 2))
}

/// Canonical key of a tree: its sorted edge ids joined by commas.
pub fn tree_key<'a>(edges: impl IntoIterator<Item = &'a EdgeId>) -> String {
    let mut ids: Vec<&EdgeId> = edges.into_iter().collect();
    ids.sort();
    ids.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionTestReport {
    pub samples: u64,
    pub observed: BTreeMap<String, u64>,
    pub expected: BTreeMap<String, f64>,
    /// Samples that were not spanning trees of the graph.
    pub invalid: u64,
    pub statistic: f64,
    pub dof: usize,
    pub pvalue: f64,
    pub tv_distance: f64,
    pub alpha: f64,
    pub pass: bool,
}

impl Verdict for DistributionTestReport {
    fn passed(&self) -> bool {
        self.pass
    }
}

/// Chi-square goodness of fit of `samples` against the `w`-uniform
/// distribution over the spanning trees of `g`.
pub fn distribution_report(g: &WeightedMultigraph, samples: &[EdgeSet], alpha: f64) -> Result<DistributionTestReport> {
    let support = enumerate_trees(g)?;
    let total: f64 = support.values().sum();
    let expected: BTreeMap<String, f64> = support.iter().map(|(t, w)| (tree_key(t), w / total)).collect();
    let n = samples.len() as f64;
    let min_p = expected.values().cloned().fold(f64::INFINITY, f64::min);
    if n * min_p < MIN_EXPECTED_COUNT {
        return Err(Error::UndersampledCell { expected: n * min_p });
    }
    let mut observed: BTreeMap<String, u64> = expected.keys().map(|k| (k.clone(), 0)).collect();
    let mut invalid = 0;
    for s in samples {
        match observed.get_mut(&tree_key(s.iter().collect::<Vec<_>>().iter())) {
            Some(c) => *c += 1,
            None => invalid += 1,
        }
    }
    let mut statistic = 0.0;
    let mut tv = 0.0;
    for (k, &p) in &expected {
        let o = observed[k] as f64;
        let e = n * p;
        statistic += (o - e) * (o - e) / e;
        tv += (o / n - p).abs();
    }
    tv += invalid as f64 / n;
    let dof = expected.len() - 1;
    let pvalue = if invalid > 0 {
        statistic = f64::INFINITY;
        0.0
    } else if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Internal(e.to_string()))?;
        1.0 - dist.cdf(statistic)
    };
    Ok(DistributionTestReport {
        samples: samples.len() as u64,
        observed,
        expected,
        invalid,
        statistic,
        dof,
        pvalue,
        tv_distance: tv / 2.0,
        alpha,
        pass: pvalue >= alpha,
    })
}

/// Draws `n_samples` trees with `sampler(index)` in parallel and tests them.
pub fn tree_distribution_test<F>(
    g: &WeightedMultigraph,
    sampler: F,
    n_samples: u64,
    alpha: f64,
) -> Result<DistributionTestReport>
where
    F: Fn(u64) -> Result<EdgeSet> + Sync,
{
    let samples = draw_parallel(n_samples, sampler)?;
    distribution_report(g, &samples, alpha)
}

/// `f(0..n)` evaluated in parallel, results in index order.
pub fn draw_parallel<T: Send, F>(n: u64, f: F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T> + Sync,
{
    (0..n).into_par_iter().map(&f).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalRow {
    pub edge: EdgeId,
    pub frequency: f64,
    pub leverage: f64,
    pub sigma: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalReport {
    pub samples: u64,
    pub rows: Vec<MarginalRow>,
    pub fraction_within: f64,
    pub pass: bool,
}

impl Verdict for MarginalReport {
    fn passed(&self) -> bool {
        self.pass
    }
}

/// Fraction of edges that must fall within three standard deviations.
pub const MARGINAL_PASS_FRACTION: f64 = 0.95;

/// Compares per-edge inclusion frequencies with exact leverage scores.
pub fn marginal_report(g: &WeightedMultigraph, samples: &[EdgeSet]) -> Result<MarginalReport> {
    g.ensure_connected()?;
    let lev = leverage_scores_exact(g)?;
    let n = samples.len() as f64;
    let mut counts: BTreeMap<EdgeId, u64> = lev.keys().map(|&k| (k, 0)).collect();
    for s in samples {
        for id in s.iter() {
            if let Some(c) = counts.get_mut(&id) {
                *c += 1;
            }
        }
    }
    let rows: Vec<MarginalRow> = lev
        .iter()
        .map(|(&edge, &l)| {
            let l = l.clamp(0.0, 1.0);
            let frequency = counts[&edge] as f64 / n;
            let sigma = (l * (1.0 - l) / n).sqrt();
            MarginalRow {
                edge,
                frequency,
                leverage: l,
                sigma,
                within: (frequency - l).abs() <= 3.0 * sigma + 1e-12,
            }
        })
        .collect();
    let fraction_within = rows.iter().filter(|r| r.within).count() as f64 / rows.len().max(1) as f64;
    Ok(MarginalReport {
        samples: samples.len() as u64,
        rows,
        fraction_within,
        pass: fraction_within >= MARGINAL_PASS_FRACTION,
    })
}

pub fn marginal_test<F>(g: &WeightedMultigraph, sampler: F, n_samples: u64) -> Result<MarginalReport>
where
    F: Fn(u64) -> Result<EdgeSet> + Sync,
{
    g.ensure_connected()?;
    let samples = draw_parallel(n_samples, sampler)?;
    marginal_report(g, &samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub draws: u64,
    pub tol_sigma: f64,
    /// Largest `|mean - exact| / (std / sqrt(draws))` over all entries.
    pub max_z: f64,
    pub worst_entry: (usize, usize),
    pub pass: bool,
}

impl Verdict for ExpectationReport {
    fn passed(&self) -> bool {
        self.pass
    }
}

pub const MIN_EXPECTATION_DRAWS: u64 = 1000;

#[derive(Clone)]
struct Moments {
    count: f64,
    mean: DMatrix<f64>,
    m2: DMatrix<f64>,
}

impl Moments {
    fn new(r: usize, c: usize) -> Self {
        Self {
            count: 0.0,
            mean: DMatrix::zeros(r, c),
            m2: DMatrix::zeros(r, c),
        }
    }

    fn push(&mut self, x: &DMatrix<f64>) {
        self.count += 1.0;
        let delta = x - &self.mean;
        self.mean += &delta / self.count;
        let delta2 = x - &self.mean;
        self.m2 += delta.component_mul(&delta2);
    }

    fn merge(self, other: Self) -> Self {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = &other.mean - &self.mean;
        let mean = &self.mean + &delta * (other.count / count);
        let m2 = self.m2 + other.m2 + delta.component_mul(&delta) * (self.count * other.count / count);
        Self { count, mean, m2 }
    }
}

/// Entrywise check that the mean of `draw(0..n_draws)` matches `exact`
/// within `tol_sigma` standard errors (plus `1e-12`).
pub fn expectation_test<F>(draw: F, exact: &DMatrix<f64>, n_draws: u64, tol_sigma: f64) -> Result<ExpectationReport>
where
    F: Fn(u64) -> Result<DMatrix<f64>> + Sync,
{
    if n_draws < MIN_EXPECTATION_DRAWS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_EXPECTATION_DRAWS} draws, got {n_draws}"
        )));
    }
    let (r, c) = exact.shape();
    const CHUNK: u64 = 256;
    let chunks = n_draws.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut m = Moments::new(r, c);
            for i in k * CHUNK..((k + 1) * CHUNK).min(n_draws) {
                let x = draw(i)?;
                if x.shape() != (r, c) {
                    return Err(Error::InvalidParameter("draw has the wrong shape".into()));
                }
                m.push(&x);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let m = parts.into_iter().fold(Moments::new(r, c), Moments::merge);
    let n = m.count;
    let mut max_z = 0.0;
    let mut worst_entry = (0, 0);
    let mut pass = true;
    for i in 0..r {
        for j in 0..c {
            let std = (m.m2[(i, j)] / (n - 1.0)).max(0.0).sqrt();
            let se = std / n.sqrt();
            let diff = (m.mean[(i, j)] - exact[(i, j)]).abs();
            if diff > tol_sigma * se + 1e-12 {
                pass = false;
            }
            let z = if diff <= 1e-12 { 0.0 } else if se > 0.0 { diff / se } else { f64::INFINITY };
            if z > max_z {
                max_z = z;
                worst_entry = (i, j);
            }
        }
    }
    Ok(ExpectationReport {
        draws: n_draws,
        tol_sigma,
        max_z,
        worst_entry,
        pass,
    })
}
