//! Randomized Schur complement approximation.
//!
//! The pipeline follows the approximate partial Cholesky scheme: estimate
//! leverage scores, split every edge into many light copies, eliminate the
//! vertices outside the kept set in uniformly random order while replacing
//! each elimination clique by an unbiased sample, and finally sparsify.
//!
//! Copies of an edge are never materialized during elimination. A
//! [`GroupedMultigraph`] stores, per vertex pair, the total weight and the
//! number of copies; all copies of a pair are treated as having the average
//! weight. Merging copies this way keeps the Laplacian and the copy count
//! unchanged and never raises the largest per-copy leverage, and it lets the
//! per-copy random choices be drawn as multinomial counts.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::dense::{DenseLaplacian, GroundedSolver};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, WeightedMultigraph};

/// Tuning constants for the randomized routines.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ApproxConfig {
    /// Number of JL projections is `ceil(c_jl * ln(n / delta))`.
    pub c_jl: f64,
    /// Sparsifier draws `ceil(c_sp * n * eps^-2 * ln(n / delta))` samples.
    pub c_sp: f64,
    /// Graphs with at most this many vertices get exact leverage scores.
    pub exact_leverage_max_n: usize,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            c_jl: 48.0,
            c_sp: 16.0,
            exact_leverage_max_n: 64,
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2], got {eps}")))
    }
}

/// Effective resistance estimates for every edge of an edge list over
/// `0..n`. The graph may be disconnected; resistances are taken within
/// components. Returns the estimates and whether they are exact.
pub(crate) fn estimate_resistances<R: Rng + ?Sized>(
    n: usize,
    edges: &[(usize, usize, f64)],
    delta: f64,
    cfg: &ApproxConfig,
    rng: &mut R,
) -> Result<(Vec<f64>, bool)> {
    if edges.is_empty() {
        return Ok((Vec::new(), true));
    }
    // compact to the touched vertices
    let mut local = vec![usize::MAX; n];
    let mut count = 0;
    for &(u, v, _) in edges {
        for x in [u, v] {
            if local[x] == usize::MAX {
                local[x] = count;
                count += 1;
            }
        }
    }
    let lap = DenseLaplacian::from_edges(count, edges.iter().map(|&(u, v, w)| (local[u], local[v], w)));
    let solver = GroundedSolver::new(lap.entries())?;
    if count <= cfg.exact_leverage_max_n {
        let r = edges
            .iter()
            .map(|&(u, v, _)| solver.resistance(local[u], local[v]))
            .collect::<Result<Vec<_>>>()?;
        return Ok((r, true));
    }
    let k = (cfg.c_jl * (count as f64 / delta).ln()).ceil().max(1.0) as usize;
    let mut proj = DMatrix::<f64>::zeros(k, count);
    for i in 0..k {
        let mut rhs = DVector::<f64>::zeros(count);
        for &(u, v, w) in edges {
            let s = if rng.random::<bool>() { w.sqrt() } else { -w.sqrt() };
            rhs[local[u]] += s;
            rhs[local[v]] -= s;
        }
        let y = solver.solve(&rhs);
        proj.row_mut(i).copy_from(&y.transpose());
    }
    let r = edges
        .iter()
        .map(|&(u, v, _)| {
            let d = proj.column(local[u]) - proj.column(local[v]);
            d.norm_squared() / k as f64
        })
        .collect();
    Ok((r, false))
}

/// Upper estimates of edge leverage scores.
#[derive(Debug, Clone, PartialEq)]
pub struct LeverageEstimates {
    pub tau_hat: BTreeMap<EdgeId, f64>,
    /// True when the estimates are exact leverage scores.
    pub exact: bool,
}

impl LeverageEstimates {
    pub fn total(&self) -> f64 {
        self.tau_hat.values().sum()
    }
}

fn tau_from_resistance(w: f64, r: f64, exact: bool) -> f64 {
    if exact {
        (w * r).min(1.0)
    } else {
        (1.5 * w * r).min(1.0)
    }
}

/// Leverage score upper estimates: `min(1, 3/2 * w_e * R_hat_e)` from a JL
/// sketch of the weighted incidence operator, or exact scores on small graphs.
pub fn lev_score_est<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    delta: f64,
    cfg: &ApproxConfig,
    rng: &mut R,
) -> Result<LeverageEstimates> {
    check_delta(delta)?;
    g.ensure_connected()?;
    let views: Vec<_> = g.edges().collect();
    let edges: Vec<_> = views.iter().map(|e| (e.u, e.v, e.weight)).collect();
    let (r, exact) = estimate_resistances(g.vertex_count(), &edges, delta, cfg, rng)?;
    Ok(LeverageEstimates {
        tau_hat: views
            .iter()
            .zip(r)
            .map(|(e, r)| (e.id, tau_from_resistance(e.weight, r, exact)))
            .collect(),
        exact,
    })
}

/// `ceil(tau * 12 * (eps/2)^-2 * ln^2(3n/delta))`, at least 1.
pub fn split_count(tau_hat: f64, eps: f64, delta: f64, n: usize) -> u64 {
    let log = (3.0 * n as f64 / delta).ln();
    let rho = (tau_hat * 12.0 * (eps / 2.0).powi(-2) * log * log).ceil();
    rho.max(1.0) as u64
}

/// One parent edge split into `copies` equal copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitEdge {
    pub parent: EdgeId,
    pub u: usize,
    pub v: usize,
    /// Total weight of all copies (the parent weight).
    pub weight: f64,
    pub copies: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitMultigraph {
    pub n: usize,
    pub edges: Vec<SplitEdge>,
}

impl SplitMultigraph {
    pub fn copy_count(&self) -> u64 {
        self.edges.iter().map(|e| e.copies).sum()
    }

    /// Materializes every copy as `(u, v, w, parent)`. All but the last copy
    /// of a parent weigh `w / rho`; the last absorbs the rounding so the
    /// copies sum to the parent weight exactly.
    pub fn expand(&self) -> Vec<(usize, usize, f64, EdgeId)> {
        let mut out = Vec::with_capacity(self.copy_count() as usize);
        for e in &self.edges {
            let piece = e.weight / e.copies as f64;
            let mut used = 0.0;
            for _ in 1..e.copies {
                out.push((e.u, e.v, piece, e.parent));
                used += piece;
            }
            out.push((e.u, e.v, e.weight - used, e.parent));
        }
        out
    }
}

/// Splits each edge `e` of `g` into `rho_e` copies of weight `w_e / rho_e`.
pub fn split_edges(
    g: &WeightedMultigraph,
    tau: &LeverageEstimates,
    eps: f64,
    delta: f64,
) -> Result<SplitMultigraph> {
    check_eps(eps)?;
    check_delta(delta)?;
    let n = g.vertex_count();
    let edges = g
        .edges()
        .map(|e| {
            let t = *tau.tau_hat.get(&e.id).ok_or(Error::UnknownEdge(e.id))?;
            Ok(SplitEdge {
                parent: e.id,
                u: e.u,
                v: e.v,
                weight: e.weight,
                copies: split_count(t, eps, delta, n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SplitMultigraph { n, edges })
}

/// Samples a replacement for the clique created by eliminating `v` from an
/// explicit multigraph. Every multi-edge `e = (v, a)` draws a multi-edge
/// `f = (v, b)` with probability `w_f / W_v` (possibly itself) and emits
/// `(a, b)` with weight `w_e w_f / (w_e + w_f)` when `a != b`.
pub fn clique_sample<R: Rng + ?Sized>(
    edges: &[(usize, usize, f64)],
    v: usize,
    rng: &mut R,
) -> Result<Vec<(usize, usize, f64)>> {
    let star: Vec<(usize, f64)> = edges
        .iter()
        .filter_map(|&(a, b, w)| match (a == v, b == v) {
            (true, false) => Some((b, w)),
            (false, true) => Some((a, w)),
            _ => None,
        })
        .collect();
    if star.is_empty() {
        return Err(Error::IsolatedVertex(v));
    }
    let cumulative: Vec<f64> = star
        .iter()
        .scan(0.0, |acc, &(_, w)| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let total = cumulative[cumulative.len() - 1];
    let mut out = Vec::new();
    for &(a, we) in &star {
        let t = rng.random::<f64>() * total;
        let k = cumulative.partition_point(|&c| c <= t).min(star.len() - 1);
        let (b, wf) = star[k];
        if a != b {
            out.push((a, b, we * wf / (we + wf)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Group {
    pub weight: f64,
    pub copies: u64,
}

/// Multigraph stored as per-pair groups of equal-weight copies.
#[derive(Debug, Clone)]
pub(crate) struct GroupedMultigraph {
    adj: Vec<BTreeMap<usize, Group>>,
}

impl GroupedMultigraph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![BTreeMap::new(); n],
        }
    }

    pub fn add(&mut self, u: usize, v: usize, weight: f64, copies: u64) {
        debug_assert_ne!(u, v);
        for (a, b) in [(u, v), (v, u)] {
            let g = self.adj[a].entry(b).or_insert(Group {
                weight: 0.0,
                copies: 0,
            });
            g.weight += weight;
            g.copies += copies;
        }
    }

    fn take_star(&mut self, v: usize) -> Vec<(usize, Group)> {
        let star: Vec<(usize, Group)> = std::mem::take(&mut self.adj[v]).into_iter().collect();
        for &(a, _) in &star {
            self.adj[a].remove(&v);
        }
        star
    }

    /// Edges `(u, v, total weight, copies)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize, f64, u64)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for (&v, g) in nbrs.range(u + 1..) {
                out.push((u, v, g.weight, g.copies));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueRule {
    /// Unbiased sampled replacement.
    Sampled,
    /// The exact elimination clique `w_a w_b / d` on every neighbor pair.
    Exact,
}

/// Multinomial draw of `total` trials over categories with probabilities
/// `probs` (summing to one), as a chain of conditional binomials.
fn multinomial<R: Rng + ?Sized>(rng: &mut R, total: u64, probs: &[f64]) -> Vec<u64> {
    let mut out = vec![0; probs.len()];
    let mut remaining = total;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            out[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
        let c = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q).expect("valid binomial").sample(rng)
        };
        out[i] = c;
        remaining -= c;
        mass -= p;
    }
    out
}

/// Eliminates `v`, adding its (sampled or exact) clique to the graph.
/// Returns the eliminated weighted degree and the star `(neighbor, weight)`.
pub(crate) fn eliminate_vertex<R: Rng + ?Sized>(
    graph: &mut GroupedMultigraph,
    v: usize,
    rule: CliqueRule,
    rng: &mut R,
) -> (f64, Vec<(usize, f64)>) {
    let star = graph.take_star(v);
    let degree: f64 = star.iter().map(|(_, g)| g.weight).sum();
    if star.is_empty() || degree <= 0.0 {
        return (0.0, Vec::new());
    }
    match rule {
        CliqueRule::Exact => {
            for (i, &(a, ga)) in star.iter().enumerate() {
                for &(b, gb) in &star[i + 1..] {
                    graph.add(a, b, ga.weight * gb.weight / degree, 1);
                }
            }
        }
        CliqueRule::Sampled => {
            let probs: Vec<f64> = star.iter().map(|(_, g)| g.weight / degree).collect();
            for (i, &(a, ga)) in star.iter().enumerate() {
                let wa = ga.weight / ga.copies as f64;
                let counts = multinomial(rng, ga.copies, &probs);
                for (j, &c) in counts.iter().enumerate() {
                    if c == 0 || j == i {
                        continue;
                    }
                    let (b, gb) = star[j];
                    let wb = gb.weight / gb.copies as f64;
                    graph.add(a, b, c as f64 * (wa * wb / (wa + wb)), c);
                }
            }
        }
    }
    (degree, star.into_iter().map(|(a, g)| (a, g.weight)).collect())
}

/// Spectral sparsifier of an edge list over `0..n` (components allowed):
/// `q` i.i.d. draws with probability proportional to `w_e * R_hat_e`, each
/// reweighted by `w_e / (q p_e)` and merged per pair.
pub(crate) fn sparsify_edges<R: Rng + ?Sized>(
    n: usize,
    edges: &[(usize, usize, f64)],
    eps: f64,
    delta: f64,
    cfg: &ApproxConfig,
    rng: &mut R,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(u, v, w) in edges {
        *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
    }
    if merged.is_empty() {
        return Ok(Vec::new());
    }
    let pairs: Vec<(usize, usize, f64)> = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    let touched = {
        let mut seen = vec![false; n];
        for &(u, v, _) in &pairs {
            seen[u] = true;
            seen[v] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    };
    let (r, _) = estimate_resistances(n, &pairs, delta, cfg, rng)?;
    let scores: Vec<f64> = pairs.iter().zip(&r).map(|(&(_, _, w), &r)| w * r).collect();
    let total: f64 = scores.iter().sum();
    let probs: Vec<f64> = scores.iter().map(|s| s / total).collect();
    let q = sample_count(cfg.c_sp, touched, eps, delta);
    let counts = multinomial(rng, q, &probs);
    Ok(pairs
        .iter()
        .zip(probs.iter().zip(counts))
        .filter(|(_, (_, c))| *c > 0)
        .map(|(&(u, v, w), (&p, c))| (u, v, c as f64 * w / (q as f64 * p)))
        .collect())
}

/// `ceil(c_sp * n * eps^-2 * ln(n / delta))`.
pub fn sample_count(c_sp: f64, n: usize, eps: f64, delta: f64) -> u64 {
    let n = n.max(2) as f64;
    (c_sp * n * eps.powi(-2) * (n / delta).ln()).ceil().max(1.0) as u64
}

/// Sparsifies a connected graph. Output edges are new (Schur namespace), one
/// per vertex pair.
pub fn graph_sparsify<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    eps: f64,
    delta: f64,
    cfg: &ApproxConfig,
    rng: &mut R,
) -> Result<WeightedMultigraph> {
    check_delta(delta)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    g.ensure_connected()?;
    let sampled = sparsify_edges(g.vertex_count(), &g.weighted_edges(), eps, delta, cfg, rng)?;
    let mut out = g.clone();
    out.delete_edges(&out.edge_ids().into_iter().collect())?;
    for (u, v, w) in sampled {
        out.add_schur_edge(u, v, w);
    }
    Ok(out)
}

/// What to run inside the elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CholeskyOptions {
    pub clique: CliqueRule,
    pub sparsify: bool,
}

impl Default for CholeskyOptions {
    fn default() -> Self {
        Self {
            clique: CliqueRule::Sampled,
            sparsify: true,
        }
    }
}

/// Output of approximate partial elimination: `L ~ sum_i alpha_i c_i c_i^T + S`.
#[derive(Debug, Clone)]
pub struct PartialCholesky {
    /// Order of the original graph.
    pub n: usize,
    /// Eliminated compacted vertices in elimination order.
    pub elim_order: Vec<usize>,
    pub elim_diag: Vec<f64>,
    pub elim_cols: Vec<DVector<f64>>,
    /// Kept compacted vertices (sorted); `schur_tilde` vertex `i` is `keep[i]`.
    pub keep: Vec<usize>,
    pub schur_tilde: WeightedMultigraph,
}

impl PartialCholesky {
    /// `sum_i alpha_i c_i c_i^T` plus `S` embedded on the kept vertices.
    pub fn reconstruct(&self) -> DenseLaplacian {
        let mut m = DMatrix::<f64>::zeros(self.n, self.n);
        for (alpha, c) in self.elim_diag.iter().zip(&self.elim_cols) {
            m += c * c.transpose() * *alpha;
        }
        let s = self.schur_tilde.laplacian();
        for (i, &a) in self.keep.iter().enumerate() {
            for (j, &b) in self.keep.iter().enumerate() {
                m[(a, b)] += s.get(i, j);
            }
        }
        DenseLaplacian::from_matrix(m)
    }
}

fn keep_mask(n: usize, keep: &[usize]) -> Result<Vec<bool>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut mask = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::UnknownVertex(k));
        }
        mask[k] = true;
    }
    Ok(mask)
}

/// Approximate partial Cholesky factorization eliminating every vertex
/// outside `keep` in uniformly random order.
pub fn apx_partial_cholesky<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    keep: &[usize],
    eps: f64,
    delta: f64,
    cfg: &ApproxConfig,
    opts: CholeskyOptions,
    rng: &mut R,
) -> Result<PartialCholesky> {
    check_eps(eps)?;
    check_delta(delta)?;
    g.ensure_connected()?;
    let n = g.vertex_count();
    let mask = keep_mask(n, keep)?;
    let tau = lev_score_est(g, delta / 3.0, cfg, rng)?;
    let split = split_edges(g, &tau, eps, delta)?;
    let mut grouped = GroupedMultigraph::new(n);
    for e in &split.edges {
        grouped.add(e.u, e.v, e.weight, e.copies);
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| !mask[v]).collect();
    order.shuffle(rng);
    let mut elim_diag = Vec::with_capacity(order.len());
    let mut elim_cols = Vec::with_capacity(order.len());
    for &v in &order {
        let (alpha, star) = eliminate_vertex(&mut grouped, v, opts.clique, rng);
        let mut c = DVector::zeros(n);
        if alpha > 0.0 {
            c[v] = 1.0;
            for (a, w) in star {
                c[a] = -w / alpha;
            }
        }
        elim_diag.push(alpha);
        elim_cols.push(c);
    }
    let remaining: Vec<(usize, usize, f64)> = grouped.edges().into_iter().map(|(u, v, w, _)| (u, v, w)).collect();
    let final_edges = if opts.sparsify {
        sparsify_edges(n, &remaining, eps, delta / 3.0, cfg, rng)?
    } else {
        remaining
    };
    let mut sorted_keep: Vec<usize> = (0..n).filter(|&v| mask[v]).collect();
    sorted_keep.dedup();
    let schur_tilde = rebuild_on_keep(g, &sorted_keep, &[], &final_edges)?;
    Ok(PartialCholesky {
        n,
        elim_order: order,
        elim_diag,
        elim_cols,
        keep: sorted_keep,
        schur_tilde,
    })
}

/// `g` restricted to `keep` with all edges removed except `retained`, plus
/// `created` (given over `g`'s compacted indices) as Schur-namespace edges.
fn rebuild_on_keep(
    g: &WeightedMultigraph,
    sorted_keep: &[usize],
    retained: &[EdgeId],
    created: &[(usize, usize, f64)],
) -> Result<WeightedMultigraph> {
    let mut out = g.restrict_to(sorted_keep)?;
    let drop: crate::graph::EdgeSet = out.edge_ids().into_iter().filter(|id| !retained.contains(id)).collect();
    out.delete_edges(&drop)?;
    let mut pos = vec![usize::MAX; g.vertex_count()];
    for (i, &k) in sorted_keep.iter().enumerate() {
        pos[k] = i;
    }
    for &(u, v, w) in created {
        out.add_schur_edge(pos[u], pos[v], w);
    }
    Ok(out)
}

/// Core of [`approx_schur`] over an index space `0..n`: eliminates every
/// vertex not in `keep_mask` from the edges in `touching` (which should be
/// exactly the edges incident to eliminated vertices) and returns the
/// sparsified Schur-created edges on kept vertices.
pub(crate) fn approx_schur_edges<R: Rng + ?Sized>(
    n: usize,
    touching: &[(usize, usize, f64)],
    keep_mask: &[bool],
    eps: f64,
    delta: f64,
    cfg: &ApproxConfig,
    rng: &mut R,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut order: Vec<usize> = (0..n).filter(|&v| !keep_mask[v]).collect();
    if order.is_empty() || touching.is_empty() {
        return Ok(Vec::new());
    }
    let (r, exact) = estimate_resistances(n, touching, delta / 3.0, cfg, rng)?;
    let mut grouped = GroupedMultigraph::new(n);
    for (&(u, v, w), r) in touching.iter().zip(r) {
        let tau = tau_from_resistance(w, r, exact);
        grouped.add(u, v, w, split_count(tau, eps, delta, n));
    }
    order.shuffle(rng);
    for &v in &order {
        eliminate_vertex(&mut grouped, v, CliqueRule::Sampled, rng);
    }
    let created: Vec<(usize, usize, f64)> = grouped.edges().into_iter().map(|(u, v, w, _)| (u, v, w)).collect();
    let kept = keep_mask.iter().filter(|&&k| k).count();
    let sparsified = sparsify_edges(n, &created, eps, delta / 3.0, cfg, rng)?;
    debug_assert!(kept >= 1);
    Ok(sparsified)
}

/// Exact counterpart of [`approx_schur_edges`].
pub(crate) fn exact_schur_edges(
    n: usize,
    touching: &[(usize, usize, f64)],
    keep_mask: &[bool],
) -> Result<Vec<(usize, usize, f64)>> {
    if touching.is_empty() || keep_mask.iter().all(|&k| k) {
        return Ok(Vec::new());
    }
    let lap = DenseLaplacian::from_edges(n, touching.iter().copied());
    let keep: Vec<usize> = (0..n).filter(|&v| keep_mask[v]).collect();
    let s = crate::dense::schur_dense(lap.entries(), &keep)?;
    let scale = lap.max_abs_entry();
    let mut out = Vec::new();
    for i in 0..keep.len() {
        for j in i + 1..keep.len() {
            let w = -s[(i, j)];
            if w > 1e-14 * scale {
                out.push((keep[i], keep[j], w));
            }
        }
    }
    Ok(out)
}

/// Splits `g`'s edges over compacted indices into those inside `mask` and
/// those touching an eliminated vertex.
fn partition_edges(g: &WeightedMultigraph, mask: &[bool]) -> (Vec<EdgeId>, Vec<(usize, usize, f64)>) {
    let mut inside = Vec::new();
    let mut touching = Vec::new();
    for e in g.edges() {
        if mask[e.u] && mask[e.v] {
            inside.push(e.id);
        } else {
            touching.push((e.u, e.v, e.weight));
        }
    }
    (inside, touching)
}

/// Approximate Schur complement of `g` onto `keep`. Edges of `g` with both
/// endpoints in `keep` are carried over exactly (ids and origin preserved);
/// only the edges created by eliminating the other vertices are approximated.
pub fn approx_schur<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    keep: &[usize],
    eps: f64,
    delta: f64,
    cfg: &ApproxConfig,
    rng: &mut R,
) -> Result<WeightedMultigraph> {
    check_eps(eps)?;
    check_delta(delta)?;
    g.ensure_connected()?;
    let n = g.vertex_count();
    let mask = keep_mask(n, keep)?;
    let (inside, touching) = partition_edges(g, &mask);
    let created = approx_schur_edges(n, &touching, &mask, eps, delta, cfg, rng)?;
    let sorted_keep: Vec<usize> = (0..n).filter(|&v| mask[v]).collect();
    rebuild_on_keep(g, &sorted_keep, &inside, &created)
}

/// Exact Schur complement as a graph, with the same bookkeeping as
/// [`approx_schur`].
pub fn exact_schur_graph(g: &WeightedMultigraph, keep: &[usize]) -> Result<WeightedMultigraph> {
    g.ensure_connected()?;
    let n = g.vertex_count();
    let mask = keep_mask(n, keep)?;
    let (inside, touching) = partition_edges(g, &mask);
    let created = exact_schur_edges(n, &touching, &mask)?;
    let sorted_keep: Vec<usize> = (0..n).filter(|&v| mask[v]).collect();
    rebuild_on_keep(g, &sorted_keep, &inside, &created)
}
