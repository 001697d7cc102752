//! Weighted multigraphs with contraction and deletion.
//!
//! Vertices live in a fixed "base" index space (one slot per vertex of the
//! graph the value was built from). Contraction merges base vertices through a
//! union-find; the live vertices are the representatives, numbered
//! `0..vertex_count()` in increasing base order (the compacted order).
//! Edges keep the base indices they were created with and are resolved through
//! the union-find on every read.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dense::DenseLaplacian;
use crate::error::{Error, Result};

/// Stable edge identity. Original edges are numbered by input position;
/// edges created by Schur complementation live in a separate namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum EdgeId {
    Original(usize),
    Schur(usize),
}

impl EdgeId {
    pub fn is_original(self) -> bool {
        matches!(self, EdgeId::Original(_))
    }

    /// Input position of an original edge.
    pub fn original_index(self) -> Option<usize> {
        match self {
            EdgeId::Original(i) => Some(i),
            EdgeId::Schur(_) => None,
        }
    }

    pub fn origin(self) -> Origin {
        match self {
            EdgeId::Original(_) => Origin::Original,
            EdgeId::Schur(_) => Origin::Schur,
        }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeId::Original(i) => write!(f, "e{i}"),
            EdgeId::Schur(i) => write!(f, "s{i}"),
        }
    }
}

impl From<EdgeId> for String {
    fn from(id: EdgeId) -> String {
        id.to_string()
    }
}

impl TryFrom<String> for EdgeId {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl std::str::FromStr for EdgeId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("malformed edge id {s:?}");
        let (kind, rest) = s.split_at_checked(1).ok_or_else(bad)?;
        let index: usize = rest.parse().map_err(|_| bad())?;
        match kind {
            "e" => Ok(EdgeId::Original(index)),
            "s" => Ok(EdgeId::Schur(index)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Original,
    Schur,
}

/// Disjoint-set forest with union by size. `find` does not compress paths so
/// it can be called through a shared reference; depth stays logarithmic.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b` and returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        big
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct StoredEdge {
    u: usize,
    v: usize,
    weight: f64,
}

/// An edge as seen through the current contraction state; endpoints are
/// compacted vertex indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeView {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl EdgeView {
    pub fn origin(&self) -> Origin {
        self.id.origin()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeSet {
    pub members: BTreeSet<EdgeId>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.members.contains(&id)
    }

    pub fn insert(&mut self, id: EdgeId) -> bool {
        self.members.insert(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members.iter().copied()
    }

    /// Input positions of the original members, sorted.
    pub fn original_indices(&self) -> Vec<usize> {
        self.members.iter().filter_map(|e| e.original_index()).collect()
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> Self {
        Self {
            members: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct WeightedMultigraph {
    labels: Vec<u64>,
    dsu: UnionFind,
    alive: Vec<bool>,
    edges: BTreeMap<EdgeId, StoredEdge>,
    next_schur: usize,
    // compacted order of live representatives and its inverse
    order: Vec<usize>,
    position: Vec<usize>,
}

const NO_POSITION: usize = usize::MAX;

impl WeightedMultigraph {
    /// `n` isolated vertices labelled `0..n`.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self {
            labels: (0..n as u64).collect(),
            dsu: UnionFind::new(n),
            alive: vec![true; n],
            edges: BTreeMap::new(),
            next_schur: 0,
            order: Vec::new(),
            position: Vec::new(),
        };
        g.reindex();
        g
    }

    /// Builds a graph from `(u, v, w)` triples over arbitrary vertex labels.
    /// Vertices are compacted in order of first appearance; edge `i` gets id
    /// `EdgeId::Original(i)`.
    pub fn build(edge_list: &[(u64, u64, f64)]) -> Result<Self> {
        if edge_list.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut stored = Vec::with_capacity(edge_list.len());
        for (i, &(u, v, w)) in edge_list.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { index: i, weight: w });
            }
            if u == v {
                return Err(Error::SelfLoopInput { index: i, vertex: u });
            }
            let mut slot = |x: u64| {
                *index.entry(x).or_insert_with(|| {
                    labels.push(x);
                    labels.len() - 1
                })
            };
            let (a, b) = (slot(u), slot(v));
            stored.push(StoredEdge { u: a, v: b, weight: w });
        }
        let n = labels.len();
        let mut g = Self {
            labels,
            dsu: UnionFind::new(n),
            alive: vec![true; n],
            edges: stored
                .into_iter()
                .enumerate()
                .map(|(i, e)| (EdgeId::Original(i), e))
                .collect(),
            next_schur: 0,
            order: Vec::new(),
            position: Vec::new(),
        };
        g.reindex();
        Ok(g)
    }

    /// Convenience constructor over vertices `0..n` with original edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { index: i, weight: w });
            }
            if u == v {
                return Err(Error::SelfLoopInput {
                    index: i,
                    vertex: u as u64,
                });
            }
            if u >= n || v >= n {
                return Err(Error::UnknownVertex(u.max(v)));
            }
            g.edges
                .insert(EdgeId::Original(i), StoredEdge { u, v, weight: w });
        }
        Ok(g)
    }

    fn reindex(&mut self) {
        self.order = (0..self.alive.len()).filter(|&i| self.alive[i]).collect();
        self.position = vec![NO_POSITION; self.alive.len()];
        for (p, &b) in self.order.iter().enumerate() {
            self.position[b] = p;
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn original_edge_count(&self) -> usize {
        self.edges.keys().filter(|e| e.is_original()).count()
    }

    /// External label of compacted vertex `pos` (the label of its representative).
    pub fn label(&self, pos: usize) -> u64 {
        self.labels[self.order[pos]]
    }

    pub fn labels(&self) -> Vec<u64> {
        self.order.iter().map(|&b| self.labels[b]).collect()
    }

    /// Compacted vertex currently holding the input vertex with `label`.
    pub fn vertex_of_label(&self, label: u64) -> Option<usize> {
        let base = self.labels.iter().position(|&l| l == label)?;
        self.resolve(base)
    }

    /// Compacted position of the representative of base vertex `base`, if it
    /// is still part of this graph.
    pub fn resolve(&self, base: usize) -> Option<usize> {
        if base >= self.alive.len() {
            return None;
        }
        match self.position[self.dsu.find(base)] {
            NO_POSITION => None,
            p => Some(p),
        }
    }

    pub fn contraction_map(&self) -> &UnionFind {
        &self.dsu
    }

    fn view(&self, id: EdgeId, e: &StoredEdge) -> EdgeView {
        EdgeView {
            id,
            u: self.position[self.dsu.find(e.u)],
            v: self.position[self.dsu.find(e.v)],
            weight: e.weight,
        }
    }

    pub fn edge(&self, id: EdgeId) -> Option<EdgeView> {
        self.edges.get(&id).map(|e| self.view(id, e))
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    /// Edges in id order (originals first).
    pub fn edges(&self) -> impl Iterator<Item = EdgeView> + '_ {
        self.edges.iter().map(|(&id, e)| self.view(id, e))
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.keys().copied().collect()
    }

    /// `(u, v, w)` over compacted indices, in id order.
    pub fn weighted_edges(&self) -> Vec<(usize, usize, f64)> {
        self.edges().map(|e| (e.u, e.v, e.weight)).collect()
    }

    /// Adds an edge in the Schur namespace between compacted vertices.
    pub fn add_schur_edge(&mut self, u: usize, v: usize, weight: f64) -> EdgeId {
        debug_assert!(u != v && weight > 0.0 && weight.is_finite());
        let id = EdgeId::Schur(self.next_schur);
        self.next_schur += 1;
        let e = StoredEdge {
            u: self.order[u],
            v: self.order[v],
            weight,
        };
        self.edges.insert(id, e);
        id
    }

    /// Contracts `id`: merges its endpoints and drops every edge that became
    /// a self-loop. Parallel edges between other vertices are kept.
    pub fn contract_edge(&mut self, id: EdgeId) -> Result<()> {
        let e = *self.edges.get(&id).ok_or(Error::UnknownEdge(id))?;
        let (ru, rv) = (self.dsu.find(e.u), self.dsu.find(e.v));
        debug_assert_ne!(ru, rv, "stored edges are never self-loops");
        let root = self.dsu.union(ru, rv);
        let gone = if root == ru { rv } else { ru };
        self.alive[gone] = false;
        let dsu = &self.dsu;
        self.edges.retain(|_, s| dsu.find(s.u) != dsu.find(s.v));
        self.reindex();
        Ok(())
    }

    /// Removes exactly the given edges; all ids must exist.
    pub fn delete_edges(&mut self, es: &EdgeSet) -> Result<()> {
        if let Some(missing) = es.iter().find(|id| !self.edges.contains_key(id)) {
            return Err(Error::UnknownEdge(missing));
        }
        for id in es.iter() {
            self.edges.remove(&id);
        }
        Ok(())
    }

    pub fn delete_edge(&mut self, id: EdgeId) -> Result<()> {
        self.edges
            .remove(&id)
            .map(|_| ())
            .ok_or(Error::UnknownEdge(id))
    }

    pub fn laplacian(&self) -> DenseLaplacian {
        DenseLaplacian::from_edges(self.vertex_count(), self.weighted_edges())
    }

    /// First `ceil(n/2)` compacted vertices to the left, the rest right.
    pub fn split_vertices(&self) -> Result<VertexPartition> {
        let n = self.vertex_count();
        if n < 2 {
            return Err(Error::TooFewVertices { needed: 2, found: n });
        }
        let cut = n.div_ceil(2);
        Ok(VertexPartition {
            left: (0..cut).collect(),
            right: (cut..n).collect(),
        })
    }

    /// Component index for every compacted vertex, numbered by first vertex.
    pub fn components(&self) -> Vec<usize> {
        component_labels(self.vertex_count(), self.edges().map(|e| (e.u, e.v)))
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |c| c + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.component_count() == 1
    }

    pub fn ensure_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Restricts the graph to the compacted vertices in `keep`, dropping every
    /// edge with an endpoint outside. Edge ids and the contraction map carry
    /// over unchanged.
    pub fn restrict_to(&self, keep: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        let mut mask = vec![false; n];
        for &v in keep {
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
            mask[v] = true;
        }
        let mut g = self.clone();
        for (p, &b) in self.order.iter().enumerate() {
            g.alive[b] = mask[p];
        }
        g.edges.retain(|_, e| {
            let (u, v) = (self.position[self.dsu.find(e.u)], self.position[self.dsu.find(e.v)]);
            mask[u] && mask[v]
        });
        g.reindex();
        Ok(g)
    }

    /// Edges with both endpoints in the vertex mask.
    pub fn edges_within(&self, mask: &[bool]) -> Vec<EdgeView> {
        self.edges().filter(|e| mask[e.u] && mask[e.v]).collect()
    }

    /// Checks that `es` is a spanning tree of this graph: `n - 1` existing
    /// edges forming no cycle.
    pub fn is_spanning_tree(&self, es: &EdgeSet) -> bool {
        let n = self.vertex_count();
        if es.len() + 1 != n {
            return false;
        }
        let mut uf = UnionFind::new(n);
        for id in es.iter() {
            let Some(e) = self.edge(id) else { return false };
            if uf.find(e.u) == uf.find(e.v) {
                return false;
            }
            uf.union(e.u, e.v);
        }
        true
    }
}

/// Connected-component numbering of `0..n` under the given edges.
pub fn component_labels(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for (u, v) in edges {
        uf.union(u, v);
    }
    let mut id = HashMap::new();
    (0..n)
        .map(|v| {
            let next = id.len();
            *id.entry(uf.find(v)).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedMultigraph {
        WeightedMultigraph::build(&[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap()
    }

    #[test]
    fn build_single_edge() {
        let g = WeightedMultigraph::build(&[(0, 1, 1.0)]).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn build_keeps_parallel_edges() {
        let g = WeightedMultigraph::build(&[(0, 1, 2.0), (0, 1, 3.0)]).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
    }

    #[test]
    fn build_triangle_connected() {
        let g = triangle();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 3));
        assert!(g.is_connected());
    }

    #[test]
    fn build_compacts_labels_by_first_appearance() {
        let g = WeightedMultigraph::build(&[(10, 7, 1.0), (7, 3, 1.0)]).unwrap();
        assert_eq!(g.labels(), vec![10, 7, 3]);
        let e = g.edge(EdgeId::Original(1)).unwrap();
        assert_eq!((e.u, e.v), (1, 2));
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(WeightedMultigraph::build(&[]).unwrap_err(), Error::EmptyInput);
        assert!(matches!(
            WeightedMultigraph::build(&[(0, 1, 0.0)]),
            Err(Error::NonPositiveWeight { index: 0, .. })
        ));
        assert!(matches!(
            WeightedMultigraph::build(&[(0, 1, 1.0), (0, 1, f64::NAN)]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            WeightedMultigraph::build(&[(2, 2, 1.0)]),
            Err(Error::SelfLoopInput { index: 0, vertex: 2 })
        ));
    }

    #[test]
    fn contract_triangle_edge_leaves_parallel_pair() {
        let mut g = triangle();
        g.contract_edge(EdgeId::Original(0)).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert!(g.edges().all(|e| e.u != e.v));
    }

    #[test]
    fn contract_parallel_edge_drops_the_other() {
        let mut g = WeightedMultigraph::build(&[(0, 1, 2.0), (0, 1, 3.0)]).unwrap();
        g.contract_edge(EdgeId::Original(0)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        assert!(!g.contains_edge(EdgeId::Original(1)));
    }

    #[test]
    fn contract_path_edge() {
        let mut g = WeightedMultigraph::build(&[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        g.contract_edge(EdgeId::Original(0)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn contract_unknown_edge() {
        let mut g = triangle();
        assert_eq!(
            g.contract_edge(EdgeId::Original(9)).unwrap_err(),
            Error::UnknownEdge(EdgeId::Original(9))
        );
    }

    #[test]
    fn delete_edges_cases() {
        let mut g = triangle();
        g.delete_edges(&EdgeSet::new()).unwrap();
        assert_eq!(g.edge_count(), 3);
        g.delete_edges(&[EdgeId::Original(1)].into_iter().collect()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
        assert!(g.is_connected());
        g.delete_edges(&g.edge_ids().into_iter().collect()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 0));
        assert!(!g.is_connected());
        let err = g.delete_edges(&[EdgeId::Original(0)].into_iter().collect());
        assert_eq!(err.unwrap_err(), Error::UnknownEdge(EdgeId::Original(0)));
    }

    #[test]
    fn laplacian_examples() {
        let g = WeightedMultigraph::build(&[(0, 1, 2.0)]).unwrap();
        assert_eq!(g.laplacian().entries().as_slice(), &[2.0, -2.0, -2.0, 2.0]);
        let g = WeightedMultigraph::build(&[(0, 1, 2.0), (0, 1, 3.0)]).unwrap();
        assert_eq!(g.laplacian().entries().as_slice(), &[5.0, -5.0, -5.0, 5.0]);
        let l = triangle().laplacian();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn split_examples() {
        let split = |n: usize| {
            let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
            WeightedMultigraph::from_edges(n, &edges).unwrap().split_vertices().unwrap()
        };
        assert_eq!(split(4), VertexPartition { left: vec![0, 1], right: vec![2, 3] });
        assert_eq!(split(5), VertexPartition { left: vec![0, 1, 2], right: vec![3, 4] });
        assert_eq!(split(2), VertexPartition { left: vec![0], right: vec![1] });
        let single = WeightedMultigraph::with_vertices(1);
        assert_eq!(
            single.split_vertices().unwrap_err(),
            Error::TooFewVertices { needed: 2, found: 1 }
        );
    }

    #[test]
    fn restrict_keeps_ids() {
        let g = WeightedMultigraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let h = g.restrict_to(&[1, 2, 3]).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_ids(), vec![EdgeId::Original(1), EdgeId::Original(2)]);
        assert_eq!(h.label(0), 1);
    }

    #[test]
    fn spanning_tree_check() {
        let g = triangle();
        let t: EdgeSet = [EdgeId::Original(0), EdgeId::Original(1)].into_iter().collect();
        assert!(g.is_spanning_tree(&t));
        assert!(!g.is_spanning_tree(&[EdgeId::Original(0)].into_iter().collect()));
    }

    #[test]
    fn edge_id_round_trips_through_strings() {
        for id in [EdgeId::Original(0), EdgeId::Original(17), EdgeId::Schur(3)] {
            assert_eq!(id.to_string().parse::<EdgeId>().unwrap(), id);
        }
        assert!("x1".parse::<EdgeId>().is_err());
        assert!("e".parse::<EdgeId>().is_err());
        assert!("".parse::<EdgeId>().is_err());
    }
}
