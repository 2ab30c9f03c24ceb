//! Graph representation, price functions, distances and the graph transforms
//! every other module builds on.
//!
//! A [`DirectedGraph`] is immutable. Its topology (tails, heads and the CSR
//! adjacency indices) sits behind an [`Arc`], so the weight-only transforms
//! ([`DirectedGraph::reweight`], [`DirectedGraph::raise_negative`],
//! [`DirectedGraph::clamp_nonneg`]) share it and only allocate a new weight
//! vector. Edge ids are stable across those transforms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Edge weights and potentials. Inputs are restricted to the `i64` range;
/// the reductions scale and dilate them, so internal arithmetic is 128-bit.
pub type Weight = i128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: Weight,
}

#[derive(Debug)]
struct Topology {
    n: usize,
    tails: Vec<VertexId>,
    heads: Vec<VertexId>,
    out_start: Vec<usize>,
    out_edges: Vec<EdgeId>,
    in_start: Vec<usize>,
    in_edges: Vec<EdgeId>,
}

impl Topology {
    fn build(n: usize, tails: Vec<VertexId>, heads: Vec<VertexId>) -> Self {
        let (out_start, out_edges) = csr(n, &tails);
        let (in_start, in_edges) = csr(n, &heads);
        Topology { n, tails, heads, out_start, out_edges, in_start, in_edges }
    }
}

fn csr(n: usize, keys: &[VertexId]) -> (Vec<usize>, Vec<EdgeId>) {
    let mut start = vec![0usize; n + 1];
    for &k in keys {
        start[k + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut ids = vec![0; keys.len()];
    for (e, &k) in keys.iter().enumerate() {
        ids[fill[k]] = e;
        fill[k] += 1;
    }
    (start, ids)
}

/// Upper bound on input weight magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightBound {
    /// `|w| <= n^4` (at least 1).
    PolyDefault,
    Explicit(i128),
    /// Only the overflow guard applies.
    Unbounded,
}

impl WeightBound {
    pub fn resolve(self, n: usize) -> Option<i128> {
        match self {
            WeightBound::PolyDefault => Some((n.max(1) as i128).saturating_pow(4)),
            WeightBound::Explicit(b) => Some(b),
            WeightBound::Unbounded => None,
        }
    }
}

/// Rejects inputs whose largest weight, scaled by `n^3` (negative-cycle
/// reporting) and then by `2n` (the distance recovery scaling), leaves `i64`.
pub fn check_overflow_guard(n: usize, max_abs: i128) -> Result<()> {
    let n = n.max(1) as i128;
    let scaled = n
        .checked_pow(4)
        .and_then(|n4| n4.checked_mul(2))
        .and_then(|f| f.checked_mul(max_abs));
    match scaled {
        Some(v) if v <= i64::MAX as i128 => Ok(()),
        _ => Err(Error::WeightOverflow {
            n: n as usize,
            max_abs,
            detail: "2 * n^4 * max|w| must fit in a signed 64-bit integer",
        }),
    }
}

#[derive(Clone)]
pub struct DirectedGraph {
    topo: Arc<Topology>,
    weights: Vec<Weight>,
}

impl fmt::Debug for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectedGraph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.topo.tails == other.topo.tails
            && self.topo.heads == other.topo.heads
            && self.weights == other.weights
    }
}

impl Eq for DirectedGraph {}

impl DirectedGraph {
    /// Builds a graph from user-supplied `i64` weights, checking vertex ids,
    /// the default `n^4` weight bound and the overflow guard.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, i64)>,
    {
        Self::with_bound(n, edges, WeightBound::PolyDefault)
    }

    pub fn with_bound<I>(n: usize, edges: I, bound: WeightBound) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, i64)>,
    {
        let limit = bound.resolve(n);
        let mut max_abs: i128 = 0;
        let mut wide = Vec::new();
        for (e, (u, v, w)) in edges.into_iter().enumerate() {
            let w = w as i128;
            if let Some(b) = limit {
                if w.abs() > b {
                    return Err(Error::WeightOutOfRange { edge: e, weight: w as i64, bound: b });
                }
            }
            max_abs = max_abs.max(w.abs());
            wide.push((u, v, w));
        }
        check_overflow_guard(n, max_abs)?;
        Self::unbounded(n, wide)
    }

    /// Builds a graph with arbitrary 128-bit weights; only vertex ids are
    /// checked.
    pub fn unbounded<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Weight)>,
    {
        let mut tails = Vec::new();
        let mut heads = Vec::new();
        let mut weights = Vec::new();
        for (e, (u, v, w)) in edges.into_iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Contract(format!(
                    "edge {e} ({u} -> {v}) references a vertex outside [0, {n})"
                )));
            }
            tails.push(u);
            heads.push(v);
            weights.push(w);
        }
        Ok(DirectedGraph { topo: Arc::new(Topology::build(n, tails, heads)), weights })
    }

    pub fn empty(n: usize) -> Self {
        DirectedGraph { topo: Arc::new(Topology::build(n, Vec::new(), Vec::new())), weights: Vec::new() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.topo.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.topo.tails[e]
    }

    #[inline]
    pub fn head(&self, e: EdgeId) -> VertexId {
        self.topo.heads[e]
    }

    #[inline]
    pub fn weight(&self, e: EdgeId) -> Weight {
        self.weights[e]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        Edge { tail: self.tail(e), head: self.head(e), weight: self.weight(e) }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.m()).map(move |e| self.edge(e))
    }

    #[inline]
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.topo.out_edges[self.topo.out_start[v]..self.topo.out_start[v + 1]]
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.topo.in_edges[self.topo.in_start[v]..self.topo.in_start[v + 1]]
    }

    /// Smallest edge weight, `None` for an edgeless graph.
    pub fn min_weight(&self) -> Option<Weight> {
        self.weights.iter().copied().min()
    }

    pub fn max_abs_weight(&self) -> Weight {
        self.weights.iter().map(|w| w.abs()).max().unwrap_or(0)
    }

    /// `E^neg`: ids of the negative edges.
    pub fn negative_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.m()).filter(move |&e| self.weights[e] < 0)
    }

    pub fn has_negative_edge(&self) -> bool {
        self.weights.iter().any(|&w| w < 0)
    }

    /// Same topology and edge ids, new weights.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Self {
        assert_eq!(weights.len(), self.m(), "weight vector length must equal m");
        DirectedGraph { topo: Arc::clone(&self.topo), weights }
    }

    pub fn map_weights(&self, f: impl Fn(EdgeId, Weight) -> Weight) -> Self {
        let weights = self.weights.iter().enumerate().map(|(e, &w)| f(e, w)).collect();
        self.with_weights(weights)
    }

    /// `G_phi`: `w_phi(u,v) = w(u,v) + phi(u) - phi(v)`.
    pub fn reweight(&self, phi: &PriceFunction) -> Result<Self> {
        if phi.len() != self.n() {
            return Err(Error::Contract(format!(
                "price function has length {} but the graph has {} vertices",
                phi.len(),
                self.n()
            )));
        }
        Ok(self.map_weights(|e, w| w + phi[self.tail(e)] - phi[self.head(e)]))
    }

    /// `G^B`: adds `b` to every negative weight.
    pub fn raise_negative(&self, b: Weight) -> Self {
        debug_assert!(b >= 0);
        self.map_weights(|_, w| if w < 0 { w + b } else { w })
    }

    /// `w_{>=0}(e) = max(0, w(e))`.
    pub fn clamp_nonneg(&self) -> Self {
        self.map_weights(|_, w| w.max(0))
    }

    /// Every weight set to zero; the reachability view of the graph.
    pub fn zeroed(&self) -> Self {
        self.with_weights(vec![0; self.m()])
    }

    /// `G_s`: appends vertex `s = n` with a weight-0 edge to every vertex.
    /// Existing edge ids are preserved; the new edge to `v` gets id `m + v`.
    pub fn add_dummy_source(&self) -> (Self, VertexId) {
        let n = self.n();
        let s = n;
        let mut tails = self.topo.tails.clone();
        let mut heads = self.topo.heads.clone();
        let mut weights = self.weights.clone();
        tails.extend(std::iter::repeat_n(s, n));
        heads.extend(0..n);
        weights.extend(std::iter::repeat_n(0, n));
        let g = DirectedGraph { topo: Arc::new(Topology::build(n + 1, tails, heads)), weights };
        (g, s)
    }

    /// Same graph with every edge reversed. Edge ids are preserved.
    pub fn reversed(&self) -> Self {
        let topo = Topology::build(self.n(), self.topo.heads.clone(), self.topo.tails.clone());
        DirectedGraph { topo: Arc::new(topo), weights: self.weights.clone() }
    }

    /// Keeps the edges for which `keep` holds, on the same vertex set.
    /// Returns the new graph and the map from new edge ids to old ones.
    pub fn filter_edges(&self, keep: impl Fn(EdgeId) -> bool) -> (Self, Vec<EdgeId>) {
        let edge_map: Vec<EdgeId> = (0..self.m()).filter(|&e| keep(e)).collect();
        let tails = edge_map.iter().map(|&e| self.tail(e)).collect();
        let heads = edge_map.iter().map(|&e| self.head(e)).collect();
        let weights = edge_map.iter().map(|&e| self.weight(e)).collect();
        let g = DirectedGraph { topo: Arc::new(Topology::build(self.n(), tails, heads)), weights };
        (g, edge_map)
    }

    /// `G[S]` with explicit, invertible vertex and edge maps.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Subgraph {
        assert_eq!(s.capacity(), self.n(), "vertex set must range over the graph's vertices");
        let vertex_map: Vec<VertexId> = s.iter().collect();
        let mut local_of = vec![usize::MAX; self.n()];
        for (i, &v) in vertex_map.iter().enumerate() {
            local_of[v] = i;
        }
        let mut tails = Vec::new();
        let mut heads = Vec::new();
        let mut weights = Vec::new();
        let mut edge_map = Vec::new();
        for &v in &vertex_map {
            for &e in self.out_edges(v) {
                let h = self.head(e);
                if s.contains(h) {
                    edge_map.push(e);
                }
            }
        }
        edge_map.sort_unstable();
        for &e in &edge_map {
            tails.push(local_of[self.tail(e)]);
            heads.push(local_of[self.head(e)]);
            weights.push(self.weight(e));
        }
        let graph = DirectedGraph {
            topo: Arc::new(Topology::build(vertex_map.len(), tails, heads)),
            weights,
        };
        Subgraph { graph, vertex_map, edge_map, local_of }
    }

    /// `delta^-(S)` for [`Direction::In`], `delta^+(S)` for [`Direction::Out`].
    pub fn boundary(&self, s: &VertexSet, direction: Direction) -> EdgeSet {
        let mut out = EdgeSet::new(self.m());
        for e in 0..self.m() {
            let (t, h) = (s.contains(self.tail(e)), s.contains(self.head(e)));
            let crossing = match direction {
                Direction::In => !t && h,
                Direction::Out => t && !h,
            };
            if crossing {
                out.insert(e);
            }
        }
        out
    }

    /// Total weight of a list of edge ids.
    pub fn path_weight(&self, edges: &[EdgeId]) -> Weight {
        edges.iter().map(|&e| self.weight(e)).sum()
    }
}

/// An induced subgraph together with the maps back into its parent.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: DirectedGraph,
    /// Local vertex id -> parent vertex id.
    pub vertex_map: Vec<VertexId>,
    /// Local edge id -> parent edge id.
    pub edge_map: Vec<EdgeId>,
    local_of: Vec<usize>,
}

impl Subgraph {
    /// Parent vertex id -> local id, if the vertex was kept.
    pub fn local(&self, parent: VertexId) -> Option<VertexId> {
        match self.local_of.get(parent) {
            Some(&i) if i != usize::MAX => Some(i),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

/// A potential `phi: V -> Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceFunction(pub Vec<Weight>);

impl PriceFunction {
    pub fn zero(n: usize) -> Self {
        PriceFunction(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise sum; `(G_phi)_psi = G_(phi + psi)`.
    pub fn compose(&self, other: &PriceFunction) -> PriceFunction {
        assert_eq!(self.len(), other.len(), "price functions must have equal length");
        PriceFunction(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Appends one entry (used for the dummy source).
    pub fn extended(&self, value: Weight) -> PriceFunction {
        let mut v = self.0.clone();
        v.push(value);
        PriceFunction(v)
    }

    pub fn as_slice(&self) -> &[Weight] {
        &self.0
    }
}

impl std::ops::Index<VertexId> for PriceFunction {
    type Output = Weight;
    fn index(&self, v: VertexId) -> &Weight {
        &self.0[v]
    }
}

/// A distance: an integer or `+inf`.
///
/// `+inf` is the reserved value `i128::MAX`; finite distances never reach
/// it, and [`Dist::add`] saturates so unreachable stays unreachable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist(i128);

impl Dist {
    pub const INF: Dist = Dist(i128::MAX);
    pub const ZERO: Dist = Dist(0);

    #[inline]
    pub fn finite(x: Weight) -> Dist {
        debug_assert!(x != i128::MAX);
        Dist(x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 != i128::MAX
    }

    #[inline]
    pub fn value(self) -> Option<Weight> {
        self.is_finite().then_some(self.0)
    }

    /// Finite value; panics on `+inf`.
    #[inline]
    pub fn expect_finite(self) -> Weight {
        self.value().expect("distance is +inf")
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, w: Weight) -> Dist {
        if self.is_finite() {
            Dist(self.0 + w)
        } else {
            Dist::INF
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(x) => write!(f, "{x}"),
            None => f.write_str("inf"),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Option<Weight>> for Dist {
    fn from(x: Option<Weight>) -> Dist {
        x.map_or(Dist::INF, Dist::finite)
    }
}

impl Serialize for Dist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.value() {
            Some(x) => s.serialize_i128(x),
            None => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i128),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(x) => Ok(Dist::finite(x)),
            Raw::Str(s) if s == "inf" => Ok(Dist::INF),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad distance {s:?}"))),
        }
    }
}

/// Per-vertex distances from a (possibly virtual) source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceVector(pub Vec<Dist>);

impl DistanceVector {
    pub fn unreachable(n: usize) -> Self {
        DistanceVector(vec![Dist::INF; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Dist> + '_ {
        self.0.iter().copied()
    }

    /// `{v | dist[v] <= radius}`; with `radius` the ball radius this is a
    /// ball around the source.
    pub fn within(&self, radius: Weight) -> VertexSet {
        VertexSet::from_iter(
            self.len(),
            self.0.iter().enumerate().filter(|(_, d)| d.value().is_some_and(|x| x <= radius)).map(|(v, _)| v),
        )
    }

    pub fn reached(&self) -> VertexSet {
        VertexSet::from_iter(
            self.len(),
            self.0.iter().enumerate().filter(|(_, d)| d.is_finite()).map(|(v, _)| v),
        )
    }
}

impl std::ops::Index<VertexId> for DistanceVector {
    type Output = Dist;
    fn index(&self, v: VertexId) -> &Dist {
        &self.0[v]
    }
}

macro_rules! id_set {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash)]
        pub struct $name {
            bits: Vec<bool>,
            count: usize,
        }

        impl $name {
            pub fn new(capacity: usize) -> Self {
                $name { bits: vec![false; capacity], count: 0 }
            }

            pub fn full(capacity: usize) -> Self {
                $name { bits: vec![true; capacity], count: capacity }
            }

            #[allow(clippy::should_implement_trait)]
            pub fn from_iter(capacity: usize, ids: impl IntoIterator<Item = usize>) -> Self {
                let mut s = Self::new(capacity);
                for i in ids {
                    s.insert(i);
                }
                s
            }

            /// Size of the id universe, not the number of members.
            pub fn capacity(&self) -> usize {
                self.bits.len()
            }

            pub fn len(&self) -> usize {
                self.count
            }

            pub fn is_empty(&self) -> bool {
                self.count == 0
            }

            #[inline]
            pub fn contains(&self, i: usize) -> bool {
                self.bits.get(i).copied().unwrap_or(false)
            }

            /// Returns whether `i` was newly inserted.
            pub fn insert(&mut self, i: usize) -> bool {
                let was = std::mem::replace(&mut self.bits[i], true);
                if !was {
                    self.count += 1;
                }
                !was
            }

            pub fn remove(&mut self, i: usize) -> bool {
                let was = std::mem::replace(&mut self.bits[i], false);
                if was {
                    self.count -= 1;
                }
                was
            }

            pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
                self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
            }

            pub fn union(&self, other: &Self) -> Self {
                self.zip_with(other, |a, b| a || b)
            }

            pub fn intersection(&self, other: &Self) -> Self {
                self.zip_with(other, |a, b| a && b)
            }

            pub fn difference(&self, other: &Self) -> Self {
                self.zip_with(other, |a, b| a && !b)
            }

            pub fn complement(&self) -> Self {
                let bits: Vec<bool> = self.bits.iter().map(|b| !b).collect();
                $name { count: bits.len() - self.count, bits }
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.iter().all(|i| other.contains(i))
            }

            pub fn is_disjoint(&self, other: &Self) -> bool {
                self.iter().all(|i| !other.contains(i))
            }

            fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
                assert_eq!(self.capacity(), other.capacity(), "set universes differ");
                let bits: Vec<bool> = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
                let count = bits.iter().filter(|&&b| b).count();
                $name { bits, count }
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter()).finish()
            }
        }
    };
}

id_set!(
    /// Membership bitmap over `[0, n)`.
    VertexSet
);
id_set!(
    /// Set of edge ids of one graph.
    EdgeSet
);

impl EdgeSet {
    /// Maps ids of a subgraph's edges into the parent's id space.
    pub fn lift(&self, edge_map: &[EdgeId], parent_m: usize) -> EdgeSet {
        EdgeSet::from_iter(parent_m, self.iter().map(|e| edge_map[e]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(g: &DirectedGraph) -> Vec<Weight> {
        g.weights().to_vec()
    }

    #[test]
    fn reweight_identity_and_two_cycle() {
        let g = DirectedGraph::new(2, [(0, 1, 3), (1, 0, -3)]).unwrap();
        assert_eq!(g.reweight(&PriceFunction::zero(2)).unwrap(), g);
        let h = g.reweight(&PriceFunction(vec![5, 0])).unwrap();
        assert_eq!(weights(&h), vec![8, -8]);
        assert_eq!(h.path_weight(&[0, 1]), 0);
    }

    #[test]
    fn reweight_rejects_length_mismatch() {
        let g = DirectedGraph::new(2, [(0, 1, 3)]).unwrap();
        assert!(matches!(g.reweight(&PriceFunction::zero(3)), Err(Error::Contract(_))));
    }

    #[test]
    fn raise_negative_examples() {
        let g = DirectedGraph::new(3, [(0, 1, -4), (1, 2, 2), (2, 0, 0)]).unwrap();
        assert_eq!(weights(&g.raise_negative(3)), vec![-1, 2, 0]);
        assert_eq!(g.raise_negative(0), g);
        let g = DirectedGraph::new(2, [(0, 1, -4), (1, 0, 2)]).unwrap();
        let r = g.raise_negative(10);
        assert_eq!(weights(&r), vec![6, 2]);
        assert_eq!(r.negative_edges().count(), 0);
    }

    #[test]
    fn dummy_source_on_empty_and_path() {
        let (g, s) = DirectedGraph::empty(0).add_dummy_source();
        assert_eq!((g.n(), g.m(), s), (1, 0, 0));

        let g = DirectedGraph::new(2, [(0, 1, -2)]).unwrap();
        let (gs, s) = g.add_dummy_source();
        assert_eq!(s, 2);
        assert_eq!(gs.m(), 3);
        assert!(gs.in_edges(s).is_empty());
        assert_eq!(gs.edge(0), g.edge(0));
        assert_eq!(gs.edge(1), Edge { tail: 2, head: 0, weight: 0 });
    }

    #[test]
    fn clamp_examples() {
        let g = DirectedGraph::new(3, [(0, 1, -1), (1, 2, 0), (2, 0, 5)]).unwrap();
        assert_eq!(weights(&g.clamp_nonneg()), vec![0, 0, 5]);
        let g = DirectedGraph::new(3, [(0, 1, 1), (1, 2, 0)]).unwrap();
        assert_eq!(g.clamp_nonneg(), g);
        let g = DirectedGraph::new(3, [(0, 1, -1), (1, 2, -1), (2, 0, -1)]).unwrap();
        assert_eq!(weights(&g.clamp_nonneg()), vec![0, 0, 0]);
    }

    #[test]
    fn induced_subgraph_examples() {
        let g = DirectedGraph::new(3, [(0, 1, 1), (1, 2, 2), (2, 0, 3), (1, 0, 4)]).unwrap();
        let all = g.induced_subgraph(&VertexSet::full(3));
        assert_eq!(all.graph, g);
        assert_eq!(all.vertex_map, vec![0, 1, 2]);

        let none = g.induced_subgraph(&VertexSet::new(3));
        assert_eq!((none.graph.n(), none.graph.m()), (0, 0));

        let two = g.induced_subgraph(&VertexSet::from_iter(3, [0, 1]));
        assert_eq!(two.graph.n(), 2);
        assert_eq!(two.edge_map, vec![0, 3]);
        assert_eq!(two.local(1), Some(1));
        assert_eq!(two.local(2), None);
    }

    #[test]
    fn boundary_examples() {
        let g = DirectedGraph::new(2, [(0, 1, 1)]).unwrap();
        assert!(g.boundary(&VertexSet::full(2), Direction::In).is_empty());
        assert!(g.boundary(&VertexSet::full(2), Direction::Out).is_empty());
        let b = g.boundary(&VertexSet::from_iter(2, [1]), Direction::In);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn weight_bound_and_overflow_guard() {
        assert!(matches!(
            DirectedGraph::new(2, [(0, 1, 17)]),
            Err(Error::WeightOutOfRange { edge: 0, weight: 17, bound: 16 })
        ));
        assert!(DirectedGraph::with_bound(2, [(0, 1, 17)], WeightBound::Explicit(20)).is_ok());
        assert!(matches!(
            DirectedGraph::with_bound(1000, [(0, 1, i64::MAX / 1000)], WeightBound::Unbounded),
            Err(Error::WeightOverflow { .. })
        ));
        assert!(DirectedGraph::new(2, [(0, 5, 1)]).is_err());
    }

    #[test]
    fn dist_saturates() {
        assert_eq!(Dist::INF.add(-5), Dist::INF);
        assert_eq!(Dist::finite(3).add(-5), Dist::finite(-2));
        assert!(Dist::finite(i64::MAX as i128) < Dist::INF);
    }
}
