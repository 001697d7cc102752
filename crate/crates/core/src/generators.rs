//! Seeded graph families for tests and benchmarks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::graph::WeightedMultigraph;

/// Edge weights drawn for generated graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    Unit,
    /// Uniform on `[lo, hi)`.
    Uniform(f64, f64),
}

impl Weights {
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Weights::Unit => 1.0,
            Weights::Uniform(lo, hi) => rng.random_range(lo..hi),
        }
    }
}

/// A random connected simple graph on `n` vertices with about `m` edges: a
/// random recursive tree plus distinct random extra edges.
pub fn random_connected(n: usize, m: usize, weights: Weights, seed: u64) -> WeightedMultigraph {
    assert!(n >= 2, "need at least two vertices");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut pairs = BTreeSet::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        pairs.insert((u, v));
        edges.push((u, v, weights.draw(&mut rng)));
    }
    let target = m.min(n * (n - 1) / 2);
    let mut attempts = 0;
    while edges.len() < target && attempts < 50 * target {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if pairs.insert(key) {
            edges.push((key.0, key.1, weights.draw(&mut rng)));
        }
    }
    WeightedMultigraph::from_edges(n, &edges).expect("generated edges are valid")
}

pub fn complete(n: usize, weights: Weights, seed: u64) -> WeightedMultigraph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, weights.draw(&mut rng)));
        }
    }
    WeightedMultigraph::from_edges(n, &edges).expect("generated edges are valid")
}

pub fn path(n: usize) -> WeightedMultigraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    WeightedMultigraph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Every connected simple graph on `0..n` with unit weights, in order of
/// the bitmask over pairs `(i, j)`, `i < j`, listed lexicographically.
pub fn all_connected(n: usize) -> Vec<WeightedMultigraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    assert!(pairs.len() < 32, "too many vertices to enumerate");
    let mut out = Vec::new();
    for mask in 1u32..(1 << pairs.len()) {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &(i, j))| (i, j, 1.0))
            .collect();
        let g = WeightedMultigraph::from_edges(n, &edges).expect("generated edges are valid");
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// `g` with every weight redrawn.
pub fn reweighted(g: &WeightedMultigraph, weights: Weights, seed: u64) -> WeightedMultigraph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let edges: Vec<_> = g.edges().map(|e| (e.u, e.v, weights.draw(&mut rng))).collect();
    WeightedMultigraph::from_edges(g.vertex_count(), &edges).expect("generated edges are valid")
}
