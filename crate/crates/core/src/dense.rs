//! Exact dense reference computations.
//!
//! Everything here is `O(n^3)` dense linear algebra and is meant for graphs
//! with at most a few thousand vertices. These routines are the ground truth
//! the randomized code is tested against, and the sampler also uses them for
//! small frames and for its final exact fallback.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{component_labels, EdgeId, EdgeSet, UnionFind, WeightedMultigraph};

/// Symmetric Laplacian matrix over compacted vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLaplacian {
    m: DMatrix<f64>,
}

impl DenseLaplacian {
    pub fn zeros(n: usize) -> Self {
        Self { m: DMatrix::zeros(n, n) }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut l = Self::zeros(n);
        for (u, v, w) in edges {
            l.add_edge(u, v, w);
        }
        l
    }

    /// Wraps a matrix without checking the Laplacian invariants.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert!(m.is_square());
        Self { m }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        self.m[(u, u)] += w;
        self.m[(v, v)] += w;
        self.m[(u, v)] -= w;
        self.m[(v, u)] -= w;
    }

    pub fn order(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.m.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
    }

    /// Symmetric, zero row sums and nonpositive off-diagonals, all within
    /// `tol * max|entry|`.
    pub fn is_laplacian(&self, tol: f64) -> bool {
        let n = self.order();
        let slack = tol * self.max_abs_entry().max(1.0);
        for i in 0..n {
            if self.m.row(i).sum().abs() > slack {
                return false;
            }
            for j in 0..n {
                if (self.m[(i, j)] - self.m[(j, i)]).abs() > slack {
                    return false;
                }
                if i != j && self.m[(i, j)] > slack {
                    return false;
                }
            }
        }
        true
    }

    /// Edge list `(i, j, -L_ij)` for `i < j` with weight above `threshold`.
    pub fn to_edges(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let n = self.order();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = -self.m[(i, j)];
                if w > threshold {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn max_entry_diff(&self, other: &DenseLaplacian) -> f64 {
        (&self.m - &other.m).amax()
    }
}

/// Factorization of a Laplacian with one vertex per connected component
/// grounded (row and column removed). Solves `L x = b` for `b` orthogonal to
/// the constant vector on every component; returns the minimum-norm solution.
#[derive(Debug, Clone)]
pub struct GroundedSolver {
    n: usize,
    component: Vec<usize>,
    // position of each vertex in the reduced system, None for grounded ones
    reduced: Vec<Option<usize>>,
    chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    component_sizes: Vec<usize>,
}

impl GroundedSolver {
    pub fn new(l: &DMatrix<f64>) -> Result<Self> {
        let n = l.nrows();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if l[(i, j)] != 0.0 {
                    pairs.push((i, j));
                }
            }
        }
        let component = component_labels(n, pairs.into_iter());
        let ncomp = component.iter().max().map_or(0, |c| c + 1);
        let mut component_sizes = vec![0; ncomp];
        let mut seen = vec![false; ncomp];
        let mut reduced = vec![None; n];
        let mut next = 0;
        for v in 0..n {
            let c = component[v];
            component_sizes[c] += 1;
            if seen[c] {
                reduced[v] = Some(next);
                next += 1;
            } else {
                seen[c] = true;
            }
        }
        let chol = if next == 0 {
            None
        } else {
            let keep: Vec<usize> = (0..n).filter(|&v| reduced[v].is_some()).collect();
            let sub = l.select_rows(&keep).select_columns(&keep);
            Some(
                nalgebra::Cholesky::new(sub)
                    .ok_or_else(|| Error::Internal("grounded Laplacian is not positive definite".into()))?,
            )
        };
        Ok(Self {
            n,
            component,
            reduced,
            chol,
            component_sizes,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    /// Solves without checking orthogonality of `b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.n);
        if let Some(chol) = &self.chol {
            let rhs = DVector::from_iterator(
                chol.l_dirty().nrows(),
                (0..self.n).filter(|&v| self.reduced[v].is_some()).map(|v| b[v]),
            );
            let y = chol.solve(&rhs);
            for v in 0..self.n {
                if let Some(r) = self.reduced[v] {
                    x[v] = y[r];
                }
            }
        }
        // shift each component to mean zero
        let mut sums = vec![0.0; self.component_sizes.len()];
        for v in 0..self.n {
            sums[self.component[v]] += x[v];
        }
        for v in 0..self.n {
            let c = self.component[v];
            x[v] -= sums[c] / self.component_sizes[c] as f64;
        }
        x
    }

    /// `b_uv^T L^+ b_uv`.
    pub fn resistance(&self, u: usize, v: usize) -> Result<f64> {
        if u == v {
            return Err(Error::SameVertex(u));
        }
        if self.component[u] != self.component[v] {
            return Err(Error::Disconnected);
        }
        let mut b = DVector::zeros(self.n);
        b[u] = 1.0;
        b[v] = -1.0;
        let x = self.solve(&b);
        Ok(x[u] - x[v])
    }
}

fn check_vertex(g: &WeightedMultigraph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        Err(Error::UnknownVertex(v))
    } else {
        Ok(())
    }
}

/// Effective resistance between compacted vertices `u` and `v`.
pub fn effective_resistance_exact(g: &WeightedMultigraph, u: usize, v: usize) -> Result<f64> {
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    if u == v {
        return Err(Error::SameVertex(u));
    }
    g.ensure_connected()?;
    GroundedSolver::new(g.laplacian().entries())?.resistance(u, v)
}

/// `w_e * R_eff(u, v)` for edge `e`.
pub fn leverage_score_exact(g: &WeightedMultigraph, e: EdgeId) -> Result<f64> {
    let view = g.edge(e).ok_or(Error::UnknownEdge(e))?;
    Ok(view.weight * effective_resistance_exact(g, view.u, view.v)?)
}

/// Leverage scores of every edge from one factorization.
pub fn leverage_scores_exact(g: &WeightedMultigraph) -> Result<BTreeMap<EdgeId, f64>> {
    g.ensure_connected()?;
    let solver = GroundedSolver::new(g.laplacian().entries())?;
    g.edges()
        .map(|e| Ok((e.id, e.weight * solver.resistance(e.u, e.v)?)))
        .collect()
}

/// Schur complement `A - B C^{-1} B^T` of a dense Laplacian onto the indices
/// in `keep` (result ordered as `keep`).
pub fn schur_dense(l: &DMatrix<f64>, keep: &[usize]) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    let mut in_keep = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::UnknownVertex(k));
        }
        if in_keep[k] {
            return Err(Error::SameVertex(k));
        }
        in_keep[k] = true;
    }
    let elim: Vec<usize> = (0..n).filter(|&v| !in_keep[v]).collect();
    let a = l.select_rows(keep).select_columns(keep);
    if elim.is_empty() {
        return Ok(a);
    }
    let b = l.select_rows(keep).select_columns(&elim);
    let c = l.select_rows(&elim).select_columns(&elim);
    let chol = nalgebra::Cholesky::new(c).ok_or(Error::SingularBlock)?;
    let cinv_bt = chol.solve(&b.transpose());
    let mut s = a - b * cinv_bt;
    // restore exact symmetry lost to rounding
    let st = s.transpose();
    s = (s + st) * 0.5;
    Ok(s)
}

/// Exact Schur complement of `g` onto the compacted vertices in `keep`.
pub fn schur_exact(g: &WeightedMultigraph, keep: &[usize]) -> Result<DenseLaplacian> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    Ok(DenseLaplacian::from_matrix(schur_dense(g.laplacian().entries(), keep)?))
}

/// Natural log of the weighted spanning tree count (any cofactor of `L`).
pub fn log_spanning_tree_count(g: &WeightedMultigraph) -> Result<f64> {
    g.ensure_connected()?;
    let n = g.vertex_count();
    if n == 1 {
        return Ok(0.0);
    }
    let l = g.laplacian().into_matrix();
    let minor = l.view((1, 1), (n - 1, n - 1)).into_owned();
    let lu = minor.lu();
    let mut sign = lu.p().determinant::<f64>();
    let mut log_abs = 0.0;
    for d in lu.u().diagonal().iter() {
        if *d == 0.0 {
            return Err(Error::Internal("zero pivot in cofactor".into()));
        }
        if *d < 0.0 {
            sign = -sign;
        }
        log_abs += d.abs().ln();
    }
    if sign < 0.0 {
        return Err(Error::Internal("negative cofactor".into()));
    }
    Ok(log_abs)
}

/// Weighted spanning tree count `sum_T prod_{e in T} w_e`.
pub fn spanning_tree_count(g: &WeightedMultigraph) -> Result<f64> {
    log_spanning_tree_count(g).map(f64::exp)
}

pub const ENUMERATION_MAX_VERTICES: usize = 10;
pub const ENUMERATION_MAX_EDGES: usize = 20;

/// Every spanning tree (as a sorted edge-id list) with its weight, by
/// deletion-contraction on the lowest edge id.
pub fn enumerate_trees(g: &WeightedMultigraph) -> Result<BTreeMap<Vec<EdgeId>, f64>> {
    let (n, m) = (g.vertex_count(), g.edge_count());
    if n > ENUMERATION_MAX_VERTICES || m > ENUMERATION_MAX_EDGES {
        return Err(Error::TooLarge { n, m });
    }
    g.ensure_connected()?;
    let mut out = BTreeMap::new();
    let mut chosen = Vec::new();
    enumerate_rec(g.clone(), &mut chosen, 1.0, &mut out)?;
    Ok(out)
}

fn enumerate_rec(
    g: WeightedMultigraph,
    chosen: &mut Vec<EdgeId>,
    weight: f64,
    out: &mut BTreeMap<Vec<EdgeId>, f64>,
) -> Result<()> {
    if g.vertex_count() == 1 {
        let mut key = chosen.clone();
        key.sort();
        out.insert(key, weight);
        return Ok(());
    }
    if !g.is_connected() {
        return Ok(());
    }
    let Some(first) = g.edges().next() else {
        return Ok(());
    };
    let mut contracted = g.clone();
    contracted.contract_edge(first.id)?;
    chosen.push(first.id);
    enumerate_rec(contracted, chosen, weight * first.weight, out)?;
    chosen.pop();
    let mut deleted = g;
    deleted.delete_edge(first.id)?;
    enumerate_rec(deleted, chosen, weight, out)
}

/// Extreme generalized eigenvalues of `(a, b)` on the complement of the
/// constant vector.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpectralBound {
    pub lo: f64,
    pub hi: f64,
}

/// Absolute slack on the `[e^-eps, e^eps]` containment check.
pub const SPECTRAL_SLACK: f64 = 1e-9;

impl SpectralBound {
    /// True iff `e^-eps <= lo` and `hi <= e^eps` (with a small float slack).
    pub fn within(&self, eps: f64) -> bool {
        self.lo >= (-eps).exp() - SPECTRAL_SLACK && self.hi <= eps.exp() + SPECTRAL_SLACK
    }

    /// Smallest `eps` for which `within(eps)` holds.
    pub fn distortion(&self) -> f64 {
        self.lo.ln().abs().max(self.hi.ln().abs())
    }
}

/// Generalized eigenvalue range of `a` relative to `b`. Both must be
/// Laplacians of connected graphs on the same vertex set.
pub fn check_spectral_approx(a: &DenseLaplacian, b: &DenseLaplacian) -> Result<SpectralBound> {
    let n = a.order();
    if n != b.order() || n < 2 {
        return Err(Error::NullSpaceMismatch);
    }
    // Both null spaces are the constant vector, so grounding the last vertex
    // leaves the quotient quadratic forms unchanged.
    let ag = a.entries().view((0, 0), (n - 1, n - 1)).into_owned();
    let bg = b.entries().view((0, 0), (n - 1, n - 1)).into_owned();
    if nalgebra::Cholesky::new(ag.clone()).is_none() {
        return Err(Error::NullSpaceMismatch);
    }
    let chol = nalgebra::Cholesky::new(bg).ok_or(Error::NullSpaceMismatch)?;
    let lower = chol.l();
    let linv_a = lower
        .solve_lower_triangular(&ag)
        .ok_or(Error::NullSpaceMismatch)?;
    let m = lower
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or(Error::NullSpaceMismatch)?;
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    Ok(SpectralBound {
        lo: eig.min(),
        hi: eig.max(),
    })
}

pub const DEFAULT_WALK_BUDGET: u64 = 100_000_000;

/// Wilson's loop-erased random walk sampler: a `w`-uniform spanning tree
/// rooted at vertex 0. Steps choose an incident multi-edge with probability
/// proportional to its weight.
pub fn wilson_sample<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    rng: &mut R,
    step_budget: u64,
) -> Result<EdgeSet> {
    g.ensure_connected()?;
    let n = g.vertex_count();
    let mut incident: Vec<Vec<(usize, EdgeId, f64)>> = vec![Vec::new(); n];
    for e in g.edges() {
        incident[e.u].push((e.v, e.id, e.weight));
        incident[e.v].push((e.u, e.id, e.weight));
    }
    let cumulative: Vec<Vec<f64>> = incident
        .iter()
        .map(|inc| {
            inc.iter()
                .scan(0.0, |acc, &(_, _, w)| {
                    *acc += w;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let mut in_tree = vec![false; n];
    let mut next: Vec<Option<(usize, EdgeId)>> = vec![None; n];
    in_tree[0] = true;
    let mut steps = 0u64;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            steps += 1;
            if steps > step_budget {
                return Err(Error::StepBudgetExceeded(step_budget));
            }
            let cum = &cumulative[u];
            let target = rng.random::<f64>() * cum[cum.len() - 1];
            let k = cum.partition_point(|&c| c <= target).min(cum.len() - 1);
            let (v, id, _) = incident[u][k];
            next[u] = Some((v, id));
            u = v;
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u].expect("walk visited vertex").0;
        }
    }
    Ok((1..n)
        .map(|v| next[v].expect("every non-root vertex has a parent").1)
        .collect())
}

/// Solves `L x = b` for a connected Laplacian and `b` orthogonal to the
/// all-ones vector, returning the solution orthogonal to all-ones.
///
/// The solve is a direct grounded factorization, so the energy-norm error is
/// at rounding level and meets any `tol >= 1e-10`.
pub fn laplacian_solve(l: &DenseLaplacian, b: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let scale = b.iter().map(|x| x.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    if b.sum().abs() > 1e-9 * scale {
        return Err(Error::NotOrthogonal);
    }
    let solver = GroundedSolver::new(l.entries())?;
    if solver.component_count() > 1 {
        return Err(Error::Disconnected);
    }
    Ok(solver.solve(b))
}

/// Number of connected components of a dense Laplacian's support.
pub fn laplacian_components(l: &DMatrix<f64>) -> usize {
    let n = l.nrows();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if l[(i, j)] != 0.0 {
                uf.union(i, j);
            }
        }
    }
    (0..n).filter(|&v| uf.find(v) == v).count()
}
