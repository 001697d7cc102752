//! Batch effective resistance estimation by recursive Schur complements.
//!
//! The graph is first reduced to the vertices that occur in some query
//! pair. Pairs on one side of a vertex split are answered on that side;
//! crossing pairs are split again by quartering the two sides. Every reduction
//! is an approximate Schur complement with accuracy `eps / ceil(log2 n)`, and
//! a pair's answer on two vertices is the inverse of the total weight between
//! them.

use rand::Rng;
use serde::Serialize;

use crate::approx::{approx_schur_edges, exact_schur_edges, ApproxConfig};
use crate::dense::{check_spectral_approx, schur_dense, DenseLaplacian};
use crate::error::{Error, Result};
use crate::graph::WeightedMultigraph;
use crate::sampler::ceil_log2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReffConfig {
    /// Use exact Schur complements (no randomness).
    pub exact: bool,
    /// Record per-layer spectral distortion against exact complements.
    pub instrument: bool,
    pub approx: ApproxConfig,
}

impl Default for ReffConfig {
    fn default() -> Self {
        Self {
            exact: false,
            instrument: false,
            approx: ApproxConfig::default(),
        }
    }
}

/// One reduction step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerRecord {
    pub depth: usize,
    pub vertices_before: usize,
    pub vertices_after: usize,
    /// Smallest `eps` with the reduced graph an `eps`-approximation of the
    /// exact complement of its input.
    pub distortion: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReffInstrumentation {
    pub layers: Vec<LayerRecord>,
    /// Number of reductions on the path that answered each pair.
    pub pair_layers: Vec<usize>,
    /// Sum of layer distortions on that path.
    pub pair_distortion: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReffEstimates {
    /// `values[i]` answers pair `i`.
    pub values: Vec<f64>,
    pub epsilon: f64,
    pub instrumentation: Option<ReffInstrumentation>,
}

struct Estimator<'a, R: Rng + ?Sized> {
    eps_layer: f64,
    delta: f64,
    max_depth: usize,
    cfg: &'a ReffConfig,
    values: Vec<f64>,
    inst: Option<ReffInstrumentation>,
    rng: &'a mut R,
}

/// A graph on a subset of the input vertices: `vs[i]` is local vertex `i`.
struct Layer {
    vs: Vec<usize>,
    edges: Vec<(usize, usize, f64)>,
    layers: usize,
    distortion: f64,
}

impl<R: Rng + ?Sized> Estimator<'_, R> {
    /// Schur complement of `layer` onto the local vertices `keep`, in that order.
    fn reduce(&mut self, layer: &Layer, keep: &[usize], depth: usize) -> Result<Layer> {
        let n = layer.vs.len();
        let mut mask = vec![false; n];
        let mut pos = vec![usize::MAX; n];
        for (k, &v) in keep.iter().enumerate() {
            mask[v] = true;
            pos[v] = k;
        }
        let mut inside = Vec::new();
        let mut touching = Vec::new();
        for &(u, v, w) in &layer.edges {
            if mask[u] && mask[v] {
                inside.push((pos[u], pos[v], w));
            } else {
                touching.push((u, v, w));
            }
        }
        let created = if self.cfg.exact {
            exact_schur_edges(n, &touching, &mask)?
        } else {
            approx_schur_edges(
                n,
                &touching,
                &mask,
                self.eps_layer.min(0.5),
                self.delta,
                &self.cfg.approx,
                self.rng,
            )?
        };
        inside.extend(created.into_iter().map(|(u, v, w)| (pos[u], pos[v], w)));
        let mut distortion = 0.0;
        if let Some(inst) = &mut self.inst {
            let before = DenseLaplacian::from_edges(n, layer.edges.iter().copied());
            let exact = DenseLaplacian::from_matrix(schur_dense(before.entries(), keep)?);
            let approx = DenseLaplacian::from_edges(keep.len(), inside.iter().copied());
            distortion = check_spectral_approx(&approx, &exact)?.distortion();
            inst.layers.push(LayerRecord {
                depth,
                vertices_before: n,
                vertices_after: keep.len(),
                distortion,
            });
        }
        Ok(Layer {
            vs: keep.iter().map(|&k| layer.vs[k]).collect(),
            edges: inside,
            layers: layer.layers + 1,
            distortion: layer.distortion + distortion,
        })
    }

    /// Answers `pairs` (pair index, local u, local v) on `layer`.
    fn help(&mut self, layer: &Layer, pairs: &[(usize, usize, usize)], depth: usize) -> Result<()> {
        if pairs.is_empty() {
            return Ok(());
        }
        if depth > self.max_depth {
            return Err(Error::Internal(format!("recursion deeper than {}", self.max_depth)));
        }
        // local vertices in order of first appearance among the pairs
        let mut order = Vec::new();
        let mut seen = vec![false; layer.vs.len()];
        for &(_, u, v) in pairs {
            for x in [u, v] {
                if !seen[x] {
                    seen[x] = true;
                    order.push(x);
                }
            }
        }
        let reduced;
        let (g, pairs): (&Layer, Vec<(usize, usize, usize)>) = if order.len() < layer.vs.len() {
            reduced = self.reduce(layer, &order, depth)?;
            let mut pos = vec![usize::MAX; layer.vs.len()];
            for (k, &v) in order.iter().enumerate() {
                pos[v] = k;
            }
            (&reduced, pairs.iter().map(|&(i, u, v)| (i, pos[u], pos[v])).collect())
        } else {
            // already on exactly the pair vertices; relabel so that local
            // order is first-appearance order
            let mut pos = vec![usize::MAX; layer.vs.len()];
            for (k, &v) in order.iter().enumerate() {
                pos[v] = k;
            }
            reduced = Layer {
                vs: order.iter().map(|&v| layer.vs[v]).collect(),
                edges: layer.edges.iter().map(|&(u, v, w)| (pos[u], pos[v], w)).collect(),
                layers: layer.layers,
                distortion: layer.distortion,
            };
            (&reduced, pairs.iter().map(|&(i, u, v)| (i, pos[u], pos[v])).collect())
        };
        let n = g.vs.len();
        if n == 2 {
            let total: f64 = g.edges.iter().map(|e| e.2).sum();
            if !(total > 0.0) {
                return Err(Error::Disconnected);
            }
            for &(i, _, _) in &pairs {
                self.values[i] = 1.0 / total;
                if let Some(inst) = &mut self.inst {
                    inst.pair_layers[i] = g.layers;
                    inst.pair_distortion[i] = g.distortion;
                }
            }
            return Ok(());
        }
        let half = n.div_ceil(2);
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        let mut s3: [Vec<(usize, usize, usize)>; 4] = Default::default();
        let q1 = half.div_ceil(2);
        let q2 = half + (n - half).div_ceil(2);
        for &(i, u, v) in &pairs {
            match (u < half, v < half) {
                (true, true) => s1.push((i, u, v)),
                (false, false) => s2.push((i, u, v)),
                _ => {
                    let (l, r) = if u < half { (u, v) } else { (v, u) };
                    let q = 2 * usize::from(l >= q1) + usize::from(r >= q2);
                    s3[q].push((i, u, v));
                }
            }
        }
        self.help(g, &s1, depth + 1)?;
        self.help(g, &s2, depth + 1)?;
        for part in &s3 {
            self.help(g, part, depth + 1)?;
        }
        Ok(())
    }
}

/// Estimates `R_eff(u, v)` for every pair (compacted vertex indices) to
/// within `e^(+-eps)` with high probability.
pub fn estimate_reff<R: Rng + ?Sized>(
    g: &WeightedMultigraph,
    pairs: &[(usize, usize)],
    eps: f64,
    cfg: &ReffConfig,
    rng: &mut R,
) -> Result<ReffEstimates> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    g.ensure_connected()?;
    let n = g.vertex_count();
    for (index, &(u, v)) in pairs.iter().enumerate() {
        if u >= n || v >= n || u == v {
            return Err(Error::BadPair { index });
        }
    }
    let log = ceil_log2(n).max(1);
    let mut est = Estimator {
        eps_layer: eps / log as f64,
        delta: 1.0 / (n as f64).powi(3),
        max_depth: 2 * log + 4,
        cfg,
        values: vec![f64::NAN; pairs.len()],
        inst: cfg.instrument.then(|| ReffInstrumentation {
            layers: Vec::new(),
            pair_layers: vec![0; pairs.len()],
            pair_distortion: vec![0.0; pairs.len()],
        }),
        rng,
    };
    let root = Layer {
        vs: (0..n).collect(),
        edges: g.weighted_edges(),
        layers: 0,
        distortion: 0.0,
    };
    let indexed: Vec<(usize, usize, usize)> = pairs.iter().enumerate().map(|(i, &(u, v))| (i, u, v)).collect();
    est.help(&root, &indexed, 0)?;
    if est.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Internal("a pair was left unanswered".into()));
    }
    Ok(ReffEstimates {
        values: est.values,
        epsilon: eps,
        instrumentation: est.inst,
    })
}
