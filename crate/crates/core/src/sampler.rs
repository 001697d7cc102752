//! Recursive spanning tree sampler.
//!
//! The recursion splits the vertex set in halves, samples inside each half
//! on an (approximate) Schur complement onto that half, then samples the
//! crossing edges by quartering the two sides. Every decision about an edge
//! draws `r ~ U[0, 1)` and accepts iff `r` is below the edge's leverage in
//! the conditioned graph. Leverage is first read off the smallest graph on
//! the stack; when `r` falls inside the uncertainty interval of that graph
//! the sampler climbs to larger graphs, and as a last resort computes the
//! leverage in the conditioned input graph.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{approx_schur_edges, ApproxConfig};
use crate::dense::{leverage_score_exact, schur_dense, GroundedSolver};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, UnionFind, WeightedMultigraph};

/// How the per-level accuracies are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsMode {
    /// Dense schedule iff `m > n^(4/3)`, sparse otherwise.
    Auto,
    Sparse,
    Dense,
    /// Exact Schur complements, no sparsification.
    Exact,
}

impl fmt::Display for EpsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpsMode::Auto => "auto",
            EpsMode::Sparse => "sparse",
            EpsMode::Dense => "dense",
            EpsMode::Exact => "exact",
        })
    }
}

impl FromStr for EpsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(EpsMode::Auto),
            "sparse" => Ok(EpsMode::Sparse),
            "dense" => Ok(EpsMode::Dense),
            "exact" => Ok(EpsMode::Exact),
            other => Err(Error::InvalidParameter(format!("unknown eps mode {other:?}"))),
        }
    }
}

/// Per-level accuracy schedule `eps(i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSchedule {
    pub n: usize,
    pub m: usize,
    /// Resolved mode: never `Auto`.
    pub mode: EpsMode,
    /// Levels at or above `t1` are climbed through; below it the sampler
    /// jumps to the input graph.
    pub t1: usize,
    /// `ceil(log2 n)`, the leaf level.
    pub max_level: usize,
}

impl EpsilonSchedule {
    pub fn new(n: usize, m: usize, mode: EpsMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices { needed: 2, found: n });
        }
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        let nf = n as f64;
        let mode = match mode {
            EpsMode::Auto if (m as f64) > nf.powf(4.0 / 3.0) => EpsMode::Dense,
            EpsMode::Auto => EpsMode::Sparse,
            other => other,
        };
        let t1 = ((nf * nf / m as f64).log2() / 2.0).ceil().max(0.0) as usize;
        Ok(Self {
            n,
            m,
            mode,
            t1,
            max_level: ceil_log2(n),
        })
    }

    fn log_n(&self) -> f64 {
        (self.n as f64).log2()
    }

    /// `eps(i)`; zero in exact mode.
    pub fn epsilon_at(&self, i: usize) -> Result<f64> {
        if i > self.max_level {
            return Err(Error::LevelOutOfRange {
                level: i,
                max: self.max_level,
            });
        }
        let n = self.n as f64;
        let log = self.log_n();
        let scale = 2f64.powf(i as f64 / 2.0) / (log * log);
        Ok(match self.mode {
            EpsMode::Exact => 0.0,
            EpsMode::Sparse => scale * n.powf(-0.5),
            EpsMode::Dense => scale * n.powf(-1.0 / 6.0) * (self.m as f64).powf(-0.25),
            EpsMode::Auto => unreachable!("mode is resolved on construction"),
        })
    }

    fn clamped(&self, i: usize) -> f64 {
        self.epsilon_at(i.min(self.max_level)).expect("level clamped")
    }

    /// Width of the leverage uncertainty interval at level `i`: `2 eps(i) log n`.
    pub fn interval_at(&self, i: usize) -> f64 {
        2.0 * self.clamped(i) * self.log_n()
    }
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// True iff `r` lies outside `[(1 - eps) l, (1 + eps) l]`.
pub fn is_good(l: f64, eps: f64, r: f64) -> bool {
    r < (1.0 - eps) * l || r > (1.0 + eps) * l
}

/// Smallest accuracy on the input-graph refinement ladder.
pub const ROOT_ACCURACY_FLOOR: f64 = 1e-14;

/// Rejection runs whose summed leverage exceeds this are flagged.
pub const REJECTION_ALARM: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Overall failure probability budget.
    pub delta: f64,
    pub eps_mode: EpsMode,
    pub approx: ApproxConfig,
    /// Record every decision.
    pub trace: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            eps_mode: EpsMode::Auto,
            approx: ApproxConfig::default(),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SamplerStats {
    /// `climb_hist[k]`: decisions that needed `k` graphs beyond the leaf.
    pub climb_hist: Vec<u64>,
    /// Decisions settled only on the input graph.
    pub root_fallbacks: u64,
    /// Graphs built per recursion level (the input graph counts at level 0).
    pub node_counts: Vec<u64>,
    /// Edges decided by a coin flip.
    pub decisions: u64,
    /// Parallel edges dropped because their endpoints were merged.
    pub auto_rejections: u64,
    /// Largest summed leverage over a run of consecutive rejections.
    pub max_rejection_mass: f64,
}

impl SamplerStats {
    /// Level `i` may hold at most `4^(i+1) - 2^i` recursion nodes.
    pub fn node_bound(level: usize) -> u64 {
        4u64.saturating_pow(level as u32 + 1) - 2u64.pow(level as u32)
    }

    pub fn node_counts_within_bound(&self) -> bool {
        self.node_counts
            .iter()
            .enumerate()
            .all(|(i, &c)| c <= Self::node_bound(i))
    }

    pub fn rejection_alarm(&self) -> bool {
        self.max_rejection_mass > REJECTION_ALARM
    }

    fn record_climb(&mut self, k: usize) {
        if self.climb_hist.len() <= k {
            self.climb_hist.resize(k + 1, 0);
        }
        self.climb_hist[k] += 1;
    }

    fn record_node(&mut self, level: usize) {
        if self.node_counts.len() <= level {
            self.node_counts.resize(level + 1, 0);
        }
        self.node_counts[level] += 1;
    }
}

/// One coin-flip decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub edge: EdgeId,
    pub r: f64,
    /// Leverage in the leaf graph.
    pub leaf_leverage: f64,
    /// Leverage in the graph that settled the decision.
    pub final_leverage: f64,
    pub climbed: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeSample {
    pub edges: EdgeSet,
    pub seed: Option<u64>,
    pub stats: SamplerStats,
    pub trace: Option<Vec<TraceEntry>>,
}

/// One graph on the recursion stack, stored as a dense Laplacian over the
/// current union-find roots in `reps`.
#[derive(Debug, Clone)]
struct Frame {
    level: usize,
    reps: Vec<usize>,
    lap: DMatrix<f64>,
    // accumulated approximation error of the chain leading here
    acc: f64,
}

impl Frame {
    fn index_of(&self, rep: usize) -> Option<usize> {
        self.reps.iter().position(|&r| r == rep)
    }

    fn merge(&mut self, a: usize, b: usize, root: usize) {
        let (Some(i), Some(j)) = (self.index_of(a), self.index_of(b)) else {
            return;
        };
        let row = self.lap.row(j).into_owned();
        let mut r = self.lap.row_mut(i);
        r += row;
        let col = self.lap.column(j).into_owned();
        let mut c = self.lap.column_mut(i);
        c += col;
        let lap = std::mem::replace(&mut self.lap, DMatrix::zeros(0, 0));
        self.lap = lap.remove_row(j).remove_column(j);
        self.reps[i] = root;
        self.reps.remove(j);
    }

    fn remove_edge(&mut self, a: usize, b: usize, w: f64) {
        let (Some(i), Some(j)) = (self.index_of(a), self.index_of(b)) else {
            return;
        };
        self.lap[(i, i)] -= w;
        self.lap[(j, j)] -= w;
        self.lap[(i, j)] += w;
        self.lap[(j, i)] += w;
        if self.lap[(i, j)].abs() <= 1e-12 * w {
            self.lap[(i, j)] = 0.0;
            self.lap[(j, i)] = 0.0;
        }
    }

    /// `w R(a, b)` in this graph; `None` if the endpoints are not connected
    /// here.
    fn leverage(&self, a: usize, b: usize, w: f64) -> Option<f64> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        if self.reps.len() == 2 {
            let total = -self.lap[(i, j)];
            return (total > 0.0).then(|| w / total);
        }
        let solver = GroundedSolver::new(&self.lap).ok()?;
        solver.resistance(i, j).ok().map(|r| w * r)
    }
}

struct Sampler<'a, R: Rng + ?Sized> {
    schedule: EpsilonSchedule,
    cfg: &'a SamplerConfig,
    delta_call: f64,
    // original edges over compacted vertices of the input graph
    ids: Vec<EdgeId>,
    ends: Vec<(usize, usize, f64)>,
    live: BTreeSet<usize>,
    accepted: Vec<usize>,
    uf: UnionFind,
    stack: Vec<Frame>,
    stats: SamplerStats,
    trace: Option<Vec<TraceEntry>>,
    rejection_mass: f64,
    rng: &'a mut R,
}

impl<R: Rng + ?Sized> Sampler<'_, R> {
    fn find(&self, x: usize) -> usize {
        self.uf.find(x)
    }

    fn is_live(&self, e: usize) -> bool {
        self.live.contains(&e)
    }

    fn reps_of(&self, vs: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = vs.iter().map(|&v| self.find(v)).collect();
        set.into_iter().collect()
    }

    fn interval(&self, frame: &Frame) -> f64 {
        if frame.level == 0 || self.schedule.mode == EpsMode::Exact {
            0.0
        } else {
            self.schedule.interval_at(frame.level).max(frame.acc.exp_m1())
        }
    }

    /// Pushes the Schur complement of the top graph onto the current roots
    /// of `vs`.
    fn push_child(&mut self, vs: &[usize]) -> Result<()> {
        let reps = self.reps_of(vs);
        let parent = self.stack.last().expect("stack is never empty");
        let level = parent.level + 1;
        let keep_mask: Vec<bool> = parent.reps.iter().map(|r| reps.binary_search(r).is_ok()).collect();
        let keep: Vec<usize> = (0..parent.reps.len()).filter(|&i| keep_mask[i]).collect();
        let child_reps: Vec<usize> = keep.iter().map(|&i| parent.reps[i]).collect();
        let (lap, eps) = if self.schedule.mode == EpsMode::Exact {
            (schur_dense(&parent.lap, &keep)?, 0.0)
        } else {
            let eps = self.schedule.clamped(parent.level).min(0.5);
            let p = parent.reps.len();
            let scale = parent.lap.diagonal().amax();
            let mut touching = Vec::new();
            let mut local = vec![usize::MAX; p];
            for (k, &i) in keep.iter().enumerate() {
                local[i] = k;
            }
            let mut lap = DMatrix::zeros(keep.len(), keep.len());
            for i in 0..p {
                for j in i + 1..p {
                    let w = -parent.lap[(i, j)];
                    if w <= 1e-14 * scale {
                        continue;
                    }
                    if keep_mask[i] && keep_mask[j] {
                        add_weight(&mut lap, local[i], local[j], w);
                    } else {
                        touching.push((i, j, w));
                    }
                }
            }
            let created = approx_schur_edges(
                p,
                &touching,
                &keep_mask,
                eps,
                self.delta_call,
                &self.cfg.approx,
                self.rng,
            )?;
            for (i, j, w) in created {
                add_weight(&mut lap, local[i], local[j], w);
            }
            (lap, eps)
        };
        let acc = parent.acc + eps;
        self.stats.record_node(level);
        self.stack.push(Frame {
            level,
            reps: child_reps,
            lap,
            acc,
        });
        Ok(())
    }

    fn live_of(&self, edges: &[usize]) -> Vec<usize> {
        edges.iter().copied().filter(|&e| self.is_live(e)).collect()
    }

    fn recur_tree(&mut self, vs: &[usize], edges: &[usize]) -> Result<()> {
        let live = self.live_of(edges);
        let reps = self.reps_of(vs);
        if live.is_empty() || reps.len() < 2 {
            return Ok(());
        }
        let cut = reps.len().div_ceil(2);
        let left_reps = &reps[..cut];
        let in_left = |x: usize| left_reps.binary_search(&self.find(x)).is_ok();
        let (v1, v2): (Vec<usize>, Vec<usize>) = vs.iter().partition(|&&v| in_left(v));
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        let mut across = Vec::new();
        for &e in &live {
            let (u, v, _) = self.ends[e];
            match (in_left(u), in_left(v)) {
                (true, true) => e1.push(e),
                (false, false) => e2.push(e),
                (true, false) => across.push((e, u, v)),
                (false, true) => across.push((e, v, u)),
            }
        }
        for (part, part_edges) in [(&v1, &e1), (&v2, &e2)] {
            if self.live_of(part_edges).is_empty() {
                continue;
            }
            self.push_child(part)?;
            let out = self.recur_tree(part, part_edges);
            self.stack.pop();
            out?;
        }
        self.across(&v1, &v2, &across)
    }

    /// Decides the crossing edges `(id, x, y)` with `x` in `left` and `y` in
    /// `right` (base vertices).
    fn across(&mut self, left: &[usize], right: &[usize], edges: &[(usize, usize, usize)]) -> Result<()> {
        let live: Vec<(usize, usize, usize)> = edges.iter().copied().filter(|&(e, _, _)| self.is_live(e)).collect();
        if live.is_empty() {
            return Ok(());
        }
        let lc = self.reps_of(left);
        let rc = self.reps_of(right);
        if lc.len() == 1 && rc.len() == 1 {
            for (e, _, _) in live {
                if self.is_live(e) {
                    self.sample_edge(e)?;
                }
            }
            return Ok(());
        }
        let halves = |all: &[usize], reps: &[usize]| -> (Vec<usize>, Vec<usize>) {
            let cut = reps.len().div_ceil(2);
            let first = &reps[..cut];
            all.iter().partition(|&&v| first.binary_search(&self.find(v)).is_ok())
        };
        let (l1, l2) = halves(left, &lc);
        let (r1, r2) = halves(right, &rc);
        let l_first: BTreeSet<usize> = l1.iter().copied().collect();
        let r_first: BTreeSet<usize> = r1.iter().copied().collect();
        let mut quadrants: [Vec<(usize, usize, usize)>; 4] = Default::default();
        for &(e, x, y) in &live {
            let i = usize::from(!l_first.contains(&x));
            let j = usize::from(!r_first.contains(&y));
            quadrants[2 * i + j].push((e, x, y));
        }
        let sides = [(&l1, &r1), (&l1, &r2), (&l2, &r1), (&l2, &r2)];
        for (q, (ls, rs)) in sides.into_iter().enumerate() {
            if ls.is_empty() || rs.is_empty() || !quadrants[q].iter().any(|&(e, _, _)| self.is_live(e)) {
                continue;
            }
            let mut vs = ls.clone();
            vs.extend_from_slice(rs);
            self.push_child(&vs)?;
            let out = self.across(ls, rs, &quadrants[q]);
            self.stack.pop();
            out?;
        }
        Ok(())
    }

    fn sample_edge(&mut self, e: usize) -> Result<()> {
        let r: f64 = self.rng.random();
        let (u, v, w) = self.ends[e];
        let (a, b) = (self.find(u), self.find(v));
        let top = self.stack.len() - 1;
        let leaf = &self.stack[top];
        let leaf_l = leaf.leverage(a, b, w);
        let mut climbed = 0;
        let mut decided = leaf_l.filter(|&l| is_good(l, self.interval(leaf), r)).map(|l| (l, r < l));
        if decided.is_none() {
            let floor = self.schedule.t1.max(1);
            for k in (1..top).rev() {
                let frame = &self.stack[k];
                if frame.level < floor {
                    break;
                }
                climbed += 1;
                if let Some(l) = frame.leverage(a, b, w) {
                    if is_good(l, self.interval(frame), r) {
                        decided = Some((l, r < l));
                        break;
                    }
                }
            }
        }
        let (final_l, accept) = match decided {
            Some(d) => d,
            None => {
                climbed += 1;
                self.stats.root_fallbacks += 1;
                let l = self.stack[0]
                    .leverage(a, b, w)
                    .ok_or_else(|| Error::Internal("input graph lost connectivity".into()))?;
                let mut rho = 1.0 / self.schedule.n as f64;
                while !is_good(l, rho, r) && rho > ROOT_ACCURACY_FLOOR {
                    rho /= 2.0;
                }
                (l, r < l)
            }
        };
        self.stats.record_climb(climbed);
        self.stats.decisions += 1;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry {
                edge: self.ids[e],
                r,
                leaf_leverage: leaf_l.unwrap_or(f64::NAN),
                final_leverage: final_l,
                climbed,
                accepted: accept,
            });
        }
        if accept {
            self.rejection_mass = 0.0;
            self.contract(e);
        } else {
            self.rejection_mass += final_l;
            self.stats.max_rejection_mass = self.stats.max_rejection_mass.max(self.rejection_mass);
            self.reject(e);
        }
        Ok(())
    }

    fn contract(&mut self, e: usize) {
        let (u, v, _) = self.ends[e];
        let (a, b) = (self.find(u), self.find(v));
        let root = self.uf.union(a, b);
        for frame in &mut self.stack {
            frame.merge(a, b, root);
        }
        self.live.remove(&e);
        self.accepted.push(e);
        let loops: Vec<usize> = self
            .live
            .iter()
            .copied()
            .filter(|&f| {
                let (x, y, _) = self.ends[f];
                self.uf.find(x) == self.uf.find(y)
            })
            .collect();
        for f in loops {
            self.live.remove(&f);
            self.stats.auto_rejections += 1;
        }
    }

    fn reject(&mut self, e: usize) {
        let (u, v, w) = self.ends[e];
        let (a, b) = (self.find(u), self.find(v));
        for frame in &mut self.stack {
            frame.remove_edge(a, b, w);
        }
        self.live.remove(&e);
    }
}

fn add_weight(lap: &mut DMatrix<f64>, i: usize, j: usize, w: f64) {
    lap[(i, i)] += w;
    lap[(j, j)] += w;
    lap[(i, j)] -= w;
    lap[(j, i)] -= w;
}

/// Samples a spanning tree of `g` from the `w`-uniform distribution.
pub fn generate_spanning_tree<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<TreeSample> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::TooFewVertices { needed: 2, found: n });
    }
    g.ensure_connected()?;
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {}", cfg.delta)));
    }
    let views: Vec<_> = g.edges().collect();
    let schedule = EpsilonSchedule::new(n, views.len(), cfg.eps_mode)?;
    let big_l = schedule.max_level as f64 + 1.0;
    let delta_call = cfg.delta / (6.0 * 4f64.powf(big_l + 1.0) * big_l);
    let root = Frame {
        level: 0,
        reps: (0..n).collect(),
        lap: g.laplacian().into_matrix(),
        acc: 0.0,
    };
    let mut sampler = Sampler {
        schedule,
        cfg,
        delta_call,
        ids: views.iter().map(|e| e.id).collect(),
        ends: views.iter().map(|e| (e.u, e.v, e.weight)).collect(),
        live: (0..views.len()).collect(),
        accepted: Vec::with_capacity(n - 1),
        uf: UnionFind::new(n),
        stack: vec![root],
        stats: SamplerStats::default(),
        trace: cfg.trace.then(Vec::new),
        rejection_mass: 0.0,
        rng,
    };
    sampler.stats.record_node(0);
    let all: Vec<usize> = (0..n).collect();
    let edges: Vec<usize> = (0..views.len()).collect();
    sampler.recur_tree(&all, &edges)?;
    let tree: EdgeSet = sampler.accepted.iter().map(|&e| sampler.ids[e]).collect();
    if !g.is_spanning_tree(&tree) {
        return Err(Error::Internal("sampler produced a non-tree".into()));
    }
    Ok(TreeSample {
        edges: tree,
        seed: None,
        stats: sampler.stats,
        trace: sampler.trace,
    })
}

/// [`generate_spanning_tree`] driven by a ChaCha20 stream seeded with `seed`.
pub fn sample_tree_seeded(g: &WeightedMultigraph, cfg: &SamplerConfig, seed: u64) -> Result<TreeSample> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut sample = generate_spanning_tree(g, cfg, &mut rng)?;
    sample.seed = Some(seed);
    Ok(sample)
}

/// A decision replayed by [`sequential_sample`].
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveDecision {
    pub edge: EdgeId,
    pub leverage: f64,
    pub accepted: bool,
}

/// Replays `(edge, r)` decisions on the exactly conditioned input graph:
/// each edge is accepted iff `r` is below its current exact leverage, then
/// contracted or deleted. Parallel edges that collapse into self-loops
/// disappear and must not appear later in `draws`.
pub fn sequential_sample(g: &WeightedMultigraph, draws: &[(EdgeId, f64)]) -> Result<(EdgeSet, Vec<NaiveDecision>)> {
    let mut h = g.clone();
    let mut tree = EdgeSet::new();
    let mut out = Vec::with_capacity(draws.len());
    for &(id, r) in draws {
        if !h.contains_edge(id) {
            return Err(Error::UnknownEdge(id));
        }
        let l = leverage_score_exact(&h, id)?;
        let accepted = r < l;
        if accepted {
            h.contract_edge(id)?;
            tree.insert(id);
        } else {
            h.delete_edge(id)?;
        }
        out.push(NaiveDecision {
            edge: id,
            leverage: l,
            accepted,
        });
    }
    Ok((tree, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exact_cfg() -> SamplerConfig {
        SamplerConfig {
            eps_mode: EpsMode::Exact,
            trace: true,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn sparse_schedule_example() {
        let s = EpsilonSchedule::new(4096, 4096 * 3, EpsMode::Sparse).unwrap();
        assert_relative_eq!(s.epsilon_at(0).unwrap(), 1.0 / 64.0 / 144.0, max_relative = 1e-12);
        assert_eq!(s.max_level, 12);
        assert_eq!(
            s.epsilon_at(13).unwrap_err(),
            Error::LevelOutOfRange { level: 13, max: 12 }
        );
        for i in 0..12 {
            assert!(s.epsilon_at(i).unwrap() < s.epsilon_at(i + 1).unwrap());
        }
        assert!(s.epsilon_at(12).unwrap() <= 1.0 / 144.0 + 1e-15);
    }

    #[test]
    fn dense_schedule_example() {
        let s = EpsilonSchedule::new(4096, 1 << 24, EpsMode::Auto).unwrap();
        assert_eq!(s.mode, EpsMode::Dense);
        assert_relative_eq!(
            s.epsilon_at(0).unwrap(),
            0.25 * (1.0 / 64.0) / 144.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn t1_example() {
        assert_eq!(EpsilonSchedule::new(1024, 1 << 16, EpsMode::Auto).unwrap().t1, 2);
        assert_eq!(EpsilonSchedule::new(4, 6, EpsMode::Auto).unwrap().t1, 1);
        assert_eq!(EpsilonSchedule::new(4, 16, EpsMode::Auto).unwrap().t1, 0);
    }

    #[test]
    fn is_good_examples() {
        assert!(!is_good(0.5, 0.2, 0.41));
        assert!(is_good(0.5, 0.2, 0.39));
        assert!(is_good(0.5, 0.0, 0.49));
        assert!(!is_good(0.5, 0.0, 0.5));
        // 0.9 lies above (1 + eps) * 0.4 for eps < 1.25
        assert!(is_good(0.4, 1.2, 0.9));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn single_edge() {
        let g = WeightedMultigraph::from_edges(2, &[(0, 1, 3.0)]).unwrap();
        for mode in [EpsMode::Exact, EpsMode::Auto] {
            let cfg = SamplerConfig {
                eps_mode: mode,
                ..SamplerConfig::default()
            };
            let t = sample_tree_seeded(&g, &cfg, 1).unwrap();
            assert_eq!(t.edges.original_indices(), vec![0]);
        }
    }

    #[test]
    fn tree_input_returns_all_edges() {
        let g = WeightedMultigraph::from_edges(6, &[(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5), (3, 4, 1.0), (4, 5, 7.0)])
            .unwrap();
        for seed in 0..20 {
            let t = sample_tree_seeded(&g, &SamplerConfig::default(), seed).unwrap();
            assert_eq!(t.edges.len(), 5);
        }
    }

    #[test]
    fn errors() {
        let g = WeightedMultigraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(sample_tree_seeded(&g, &SamplerConfig::default(), 0).unwrap_err(), Error::Disconnected);
        let g = WeightedMultigraph::with_vertices(1);
        assert!(matches!(
            sample_tree_seeded(&g, &SamplerConfig::default(), 0).unwrap_err(),
            Error::TooFewVertices { .. }
        ));
    }

    #[test]
    fn exact_trace_matches_naive() {
        let g = WeightedMultigraph::from_edges(
            5,
            &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 1.5), (4, 0, 1.0), (1, 3, 3.0), (0, 2, 0.7), (0, 1, 0.3)],
        )
        .unwrap();
        for seed in 0..30 {
            let t = sample_tree_seeded(&g, &exact_cfg(), seed).unwrap();
            let trace = t.trace.unwrap();
            let draws: Vec<(EdgeId, f64)> = trace.iter().map(|d| (d.edge, d.r)).collect();
            let (tree, naive) = sequential_sample(&g, &draws).unwrap();
            assert_eq!(tree, t.edges);
            for (d, nd) in trace.iter().zip(&naive) {
                assert!((d.leaf_leverage - nd.leverage).abs() < 1e-8);
                assert_eq!(d.accepted, nd.accepted);
                assert_eq!(d.climbed, 0);
            }
        }
    }

    #[test]
    fn node_counts_bounded() {
        let mut edges = Vec::new();
        for i in 0..12 {
            for j in i + 1..12 {
                if (i * 7 + j * 3) % 4 != 0 {
                    edges.push((i, j, 1.0 + ((i + j) % 3) as f64));
                }
            }
        }
        let g = WeightedMultigraph::from_edges(12, &edges).unwrap();
        for seed in 0..5 {
            let t = sample_tree_seeded(&g, &SamplerConfig::default(), seed).unwrap();
            assert!(t.stats.node_counts_within_bound(), "{:?}", t.stats.node_counts);
            assert!(!t.stats.rejection_alarm());
            assert_eq!(t.stats.decisions + t.stats.auto_rejections, edges.len() as u64);
        }
    }

    #[test]
    fn eps_mode_parses() {
        for m in [EpsMode::Auto, EpsMode::Sparse, EpsMode::Dense, EpsMode::Exact] {
            assert_eq!(m.to_string().parse::<EpsMode>().unwrap(), m);
        }
        assert!("fast".parse::<EpsMode>().is_err());
    }
}
