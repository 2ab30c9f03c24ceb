//! The non-negative SSSP oracle, its reference implementation and call metering.
//!
//! Every oracle invocation made by the reductions goes through a [`Meter`],
//! which validates the query, counts it under a [`CallTag`] and (in debug
//! builds) checks the answer against a distance certificate.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Dist, DistanceVector, VertexId, VertexSet, Weight};

/// Where an oracle query starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Vertex(VertexId),
    /// A virtual super-source with an edge of the given weight to each
    /// listed vertex. The source itself is not part of the answer.
    Super(Vec<(VertexId, Weight)>),
}

impl Source {
    fn seeds(&self) -> Vec<(VertexId, Weight)> {
        match self {
            Source::Vertex(v) => vec![(*v, 0)],
            Source::Super(att) => att.clone(),
        }
    }
}

/// Exact single-source shortest paths on non-negative weights.
pub trait SsspOracle: Sync {
    /// Implementations may assume every weight and attachment is `>= 0`.
    fn distances(&self, g: &DirectedGraph, source: &Source) -> DistanceVector;
}

/// Binary-heap label-setting reference oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dijkstra;

impl SsspOracle for Dijkstra {
    fn distances(&self, g: &DirectedGraph, source: &Source) -> DistanceVector {
        let mut dist = vec![Dist::INF; g.n()];
        let mut heap = BinaryHeap::new();
        for (v, w) in source.seeds() {
            let d = Dist::finite(w);
            if d < dist[v] {
                dist[v] = d;
                heap.push(Reverse((d, v)));
            }
        }
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in g.out_edges(u) {
                let v = g.head(e);
                let nd = d.add(g.weight(e));
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        DistanceVector(dist)
    }
}

/// Which phase issued an oracle call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CallTag {
    Ldd,
    Scc,
    EstDist,
    SpMain,
    NegCycle,
}

/// Recursive algorithms whose depth is recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Ldd,
    Scc,
    ScaleDown,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedEdgeSummary {
    pub runs: u64,
    pub total: u64,
    pub max: u64,
}

/// Counters for one run.
///
/// `calls` follows the accounting rule: a batch of queries on vertex-disjoint
/// parts of one graph, and sibling recursive calls on disjoint vertex sets,
/// count once per lockstep step. `raw_calls` counts every individual query.
/// With batching disabled both agree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleStats {
    pub calls: u64,
    pub calls_by_tag: BTreeMap<CallTag, u64>,
    pub raw_calls: u64,
    pub raw_by_tag: BTreeMap<CallTag, u64>,
    pub max_depth: BTreeMap<Algo, u64>,
    /// Vertices plus edges of every graph handed to the oracle.
    pub work: u64,
    pub removed_edges: RemovedEdgeSummary,
    pub ldd_return_all: u64,
    pub precondition_warnings: u64,
    pub fixdag_violations: u64,
    pub scc_retries: u64,
}

impl OracleStats {
    pub fn tag_calls(&self, tag: CallTag) -> u64 {
        self.calls_by_tag.get(&tag).copied().unwrap_or(0)
    }

    pub fn depth(&self, algo: Algo) -> u64 {
        self.max_depth.get(&algo).copied().unwrap_or(0)
    }

    pub fn record_depth(&mut self, algo: Algo, depth: usize) {
        let d = self.max_depth.entry(algo).or_insert(0);
        *d = (*d).max(depth as u64);
    }

    pub fn record_removed(&mut self, count: usize) {
        let r = &mut self.removed_edges;
        r.runs += 1;
        r.total += count as u64;
        r.max = r.max.max(count as u64);
    }

    fn count(&mut self, tag: CallTag, metered: u64, raw: u64) {
        self.calls += metered;
        *self.calls_by_tag.entry(tag).or_insert(0) += metered;
        self.raw_calls += raw;
        *self.raw_by_tag.entry(tag).or_insert(0) += raw;
    }

    /// Sequential composition: everything adds up.
    pub fn merge(&mut self, other: &OracleStats) {
        self.calls += other.calls;
        add_maps(&mut self.calls_by_tag, &other.calls_by_tag);
        self.merge_common(other);
    }

    /// Concurrent composition of data-independent siblings on disjoint
    /// vertex sets: metered calls take the maximum, the rest adds up.
    pub fn merge_parallel(&mut self, siblings: &[OracleStats]) {
        let Some(longest) = siblings.iter().max_by_key(|s| s.calls) else { return };
        self.calls += longest.calls;
        for tag in siblings.iter().flat_map(|s| s.calls_by_tag.keys()).collect::<std::collections::BTreeSet<_>>() {
            let m = siblings.iter().map(|s| s.tag_calls(*tag)).max().unwrap_or(0);
            *self.calls_by_tag.entry(*tag).or_insert(0) += m;
        }
        for s in siblings {
            self.merge_common(s);
        }
    }

    fn merge_common(&mut self, other: &OracleStats) {
        self.raw_calls += other.raw_calls;
        add_maps(&mut self.raw_by_tag, &other.raw_by_tag);
        for (&a, &d) in &other.max_depth {
            let e = self.max_depth.entry(a).or_insert(0);
            *e = (*e).max(d);
        }
        self.work += other.work;
        let (r, o) = (&mut self.removed_edges, &other.removed_edges);
        r.runs += o.runs;
        r.total += o.total;
        r.max = r.max.max(o.max);
        self.ldd_return_all += other.ldd_return_all;
        self.precondition_warnings += other.precondition_warnings;
        self.fixdag_violations += other.fixdag_violations;
        self.scc_retries += other.scc_retries;
    }
}

fn add_maps<K: Ord + Copy>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
    for (&k, &v) in from {
        *into.entry(k).or_insert(0) += v;
    }
}

/// One part of a [`Meter::disjoint_calls`] batch.
#[derive(Clone, Debug)]
pub struct DisjointPart {
    /// Vertices of the part, as host-graph ids.
    pub vertices: Vec<VertexId>,
    /// Source, in host-graph ids; every seed must lie in `vertices`.
    pub source: Source,
}

/// Oracle handle plus the statistics of the computation using it.
pub struct Meter<'o> {
    oracle: &'o dyn SsspOracle,
    batching: bool,
    pub stats: OracleStats,
}

impl<'o> Meter<'o> {
    pub fn new(oracle: &'o dyn SsspOracle) -> Self {
        Meter { oracle, batching: true, stats: OracleStats::default() }
    }

    /// With batching off every query is metered individually.
    pub fn with_batching(mut self, on: bool) -> Self {
        self.batching = on;
        self
    }

    pub fn batching(&self) -> bool {
        self.batching
    }

    pub fn oracle(&self) -> &'o dyn SsspOracle {
        self.oracle
    }

    /// Fresh statistics, same oracle and accounting rule.
    pub fn fork(&self) -> Meter<'o> {
        Meter { oracle: self.oracle, batching: self.batching, stats: OracleStats::default() }
    }

    pub fn join(&mut self, child: Meter<'o>) {
        self.stats.merge(&child.stats);
    }

    pub fn join_parallel(&mut self, children: Vec<Meter<'o>>) {
        let stats: Vec<OracleStats> = children.into_iter().map(|c| c.stats).collect();
        if self.batching {
            self.stats.merge_parallel(&stats);
        } else {
            for s in &stats {
                self.stats.merge(s);
            }
        }
    }

    /// One metered oracle call.
    pub fn query(&mut self, g: &DirectedGraph, source: &Source, tag: CallTag) -> Result<DistanceVector> {
        validate(g, source)?;
        let d = self.oracle.distances(g, source);
        #[cfg(debug_assertions)]
        if let Err(msg) = check_certificate(g, source, &d) {
            return Err(Error::Internal(format!("oracle answer failed its certificate: {msg}")));
        }
        self.stats.count(tag, 1, 1);
        self.stats.work += (g.n() + g.m()) as u64;
        Ok(d)
    }

    /// Answers one query per part as a single call on `host` restricted to
    /// the intra-part edges, then splits the answer. Vectors are indexed by
    /// position in the part's vertex list.
    pub fn disjoint_calls(
        &mut self,
        host: &DirectedGraph,
        parts: &[DisjointPart],
        tag: CallTag,
    ) -> Result<Vec<DistanceVector>> {
        let mut owner = vec![usize::MAX; host.n()];
        for (i, p) in parts.iter().enumerate() {
            for &v in &p.vertices {
                if v >= host.n() {
                    return Err(Error::Contract(format!("part {i} lists vertex {v} outside the host")));
                }
                if owner[v] != usize::MAX {
                    return Err(Error::Contract(format!("vertex {v} appears in parts {} and {i}", owner[v])));
                }
                owner[v] = i;
            }
        }
        let mut seeds = Vec::new();
        for (i, p) in parts.iter().enumerate() {
            for (v, w) in p.source.seeds() {
                if v >= host.n() || owner[v] != i {
                    return Err(Error::Contract(format!("source vertex {v} of part {i} lies outside the part")));
                }
                seeds.push((v, w));
            }
        }
        if parts.is_empty() {
            return Ok(Vec::new());
        }
        let (masked, _) = host.filter_edges(|e| {
            let o = owner[host.tail(e)];
            o != usize::MAX && o == owner[host.head(e)]
        });
        let source = Source::Super(seeds);
        validate(&masked, &source)?;
        let d = self.oracle.distances(&masked, &source);
        #[cfg(debug_assertions)]
        if let Err(msg) = check_certificate(&masked, &source, &d) {
            return Err(Error::Internal(format!("oracle answer failed its certificate: {msg}")));
        }
        let raw = parts.len() as u64;
        self.stats.count(tag, if self.batching { 1 } else { raw }, raw);
        self.stats.work += (masked.n() + masked.m()) as u64;
        Ok(parts.iter().map(|p| DistanceVector(p.vertices.iter().map(|&v| d[v]).collect())).collect())
    }
}

fn validate(g: &DirectedGraph, source: &Source) -> Result<()> {
    if let Some(e) = (0..g.m()).find(|&e| g.weight(e) < 0) {
        return Err(Error::NegativeWeightRejected { edge: e, weight: g.weight(e) });
    }
    for (v, w) in source.seeds() {
        if v >= g.n() {
            return Err(Error::Contract(format!("source vertex {v} outside [0, {})", g.n())));
        }
        if w < 0 {
            return Err(Error::NegativeAttachmentRejected { vertex: v, weight: w });
        }
    }
    Ok(())
}

/// Checks that `d` is the exact distance vector of a non-negative query:
/// seeds bound their entries, every edge satisfies the triangle inequality,
/// and every finite entry is reached from a seed through tight edges.
pub fn check_certificate(g: &DirectedGraph, source: &Source, d: &DistanceVector) -> Result<(), String> {
    if d.len() != g.n() {
        return Err(format!("vector has length {} for {} vertices", d.len(), g.n()));
    }
    let seeds = source.seeds();
    for &(v, w) in &seeds {
        if d[v] > Dist::finite(w) {
            return Err(format!("vertex {v} has distance {} above its seed weight {w}", d[v]));
        }
    }
    for e in 0..g.m() {
        let (u, v) = (g.tail(e), g.head(e));
        if d[u].is_finite() && d[v] > d[u].add(g.weight(e)) {
            return Err(format!("edge {e} ({u} -> {v}) violates the triangle inequality"));
        }
    }
    let mut justified = VertexSet::new(g.n());
    let mut queue = VecDeque::new();
    for &(v, w) in &seeds {
        if d[v] == Dist::finite(w) && justified.insert(v) {
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &e in g.out_edges(u) {
            let v = g.head(e);
            if d[v] == d[u].add(g.weight(e)) && justified.insert(v) {
                queue.push_back(v);
            }
        }
    }
    for v in 0..g.n() {
        if d[v].is_finite() && !justified.contains(v) {
            return Err(format!("vertex {v} has finite distance {} without a tight path", d[v]));
        }
    }
    Ok(())
}
