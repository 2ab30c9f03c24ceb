//! Strongly connected components with topologically ordered labels, using
//! only reachability queries to the oracle.
//!
//! The recursion follows Schudy's prefix-reachability scheme: pick a random
//! order, find the shortest prefix whose reachable set covers half of
//! `n + m`, and split the vertices into five regions around the pivot's SCC.
//! Subproblems of one recursion layer are vertex-disjoint, so the layer is
//! processed in lockstep and each oracle round is one batched call.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, DistanceVector, VertexId};
use crate::oracle::{Algo, CallTag, DisjointPart, Meter, Source};

/// `r[v]`: equal within an SCC, and `r[u] > r[v]` for every edge `(u, v)`
/// between different SCCs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccLabelling {
    pub r: Vec<u64>,
}

impl SccLabelling {
    pub fn same(&self, u: VertexId, v: VertexId) -> bool {
        self.r[u] == self.r[v]
    }

    /// Dense component ids, numbered in decreasing label order.
    pub fn component_ids(&self) -> Vec<usize> {
        let mut labels: Vec<u64> = self.r.clone();
        labels.sort_unstable_by(|a, b| b.cmp(a));
        labels.dedup();
        self.r.iter().map(|x| labels.binary_search_by(|y| x.cmp(y)).unwrap_or(0)).collect()
    }

    pub fn component_count(&self) -> usize {
        let mut labels = self.r.clone();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    /// Number of distinct label pairs joined by an edge of `g`.
    pub fn condensation_edges(&self, g: &DirectedGraph) -> usize {
        let mut pairs: Vec<(u64, u64)> = g
            .edges()
            .filter(|e| self.r[e.tail] != self.r[e.head])
            .map(|e| (self.r[e.tail], self.r[e.head]))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len()
    }

    /// First edge breaking the topological-order law, if any.
    pub fn order_violation(&self, g: &DirectedGraph) -> Option<usize> {
        (0..g.m()).find(|&e| self.r[g.tail(e)] < self.r[g.head(e)])
    }
}

/// `4 ceil(log2 n) + 8`.
pub fn depth_cutoff(n: usize) -> usize {
    4 * ceil_log2(n) + 8
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

struct Task {
    /// Host vertex ids.
    vertices: Vec<VertexId>,
    ell: u64,
}

struct Search {
    order: Vec<VertexId>,
    lo: usize,
    hi: usize,
    /// Reach sets already computed, as `(prefix length, reached flags)`.
    probes: Vec<(usize, Vec<bool>)>,
}

impl Search {
    fn cached(&self, i: usize) -> Option<&Vec<bool>> {
        self.probes.iter().find(|(k, _)| *k == i).map(|(_, s)| s)
    }
}

/// Labels the SCCs of `g` (weights are ignored).
///
/// Fails with [`Error::RecursionDepthExceeded`] past [`depth_cutoff`]; the
/// caller retries with fresh randomness.
pub fn scc_topsort<R: Rng + ?Sized>(g: &DirectedGraph, rng: &mut R, meter: &mut Meter<'_>) -> Result<SccLabelling> {
    let n = g.n();
    let big_n = n.max(1) as u64;
    let n2 = big_n * big_n;
    let host = g.zeroed();
    let rev = host.reversed();
    let cutoff = depth_cutoff(n);
    let mut r = vec![0u64; n];
    let mut region = vec![0u8; n];
    let mut in_task = vec![usize::MAX; n];

    let mut layer = if n == 0 { Vec::new() } else { vec![Task { vertices: (0..n).collect(), ell: 0 }] };
    let mut depth = 0;
    while !layer.is_empty() {
        depth += 1;
        if depth > cutoff {
            return Err(Error::RecursionDepthExceeded { depth, cutoff });
        }
        meter.stats.record_depth(Algo::Scc, depth);
        for (t, task) in layer.iter().enumerate() {
            for &v in &task.vertices {
                in_task[v] = t;
            }
        }

        let mut searches: Vec<Search> = random_orders(&layer, rng)
            .into_iter()
            .map(|order| {
                let len = order.len();
                Search { order, lo: 1, hi: len, probes: Vec::new() }
            })
            .collect();

        // lockstep lower-bound searches for the smallest p with
        // |S_p| + |E_p| >= (n + m) / 2
        let sizes: Vec<(usize, usize)> = layer.iter().map(|t| (t.vertices.len(), induced_edges(&host, &t.vertices, &in_task))).collect();
        loop {
            let active: Vec<usize> = (0..layer.len()).filter(|&t| searches[t].lo < searches[t].hi).collect();
            if active.is_empty() {
                break;
            }
            let mids: Vec<usize> = active.iter().map(|&t| (searches[t].lo + searches[t].hi) / 2).collect();
            let parts: Vec<DisjointPart> = active
                .iter()
                .zip(&mids)
                .map(|(&t, &mid)| prefix_part(&layer[t], &searches[t].order[..mid]))
                .collect();
            let answers = meter.disjoint_calls(&host, &parts, CallTag::Scc)?;
            for ((&t, &mid), d) in active.iter().zip(&mids).zip(answers) {
                let reached = reached_flags(&d);
                let (nv, mv) = sizes[t];
                let covered = count_true(&reached) + edges_within(&host, &layer[t].vertices, &reached);
                let s = &mut searches[t];
                if 2 * covered >= nv + mv {
                    s.hi = mid;
                } else {
                    s.lo = mid + 1;
                }
                s.probes.push((mid, reached));
            }
        }

        // A = S_{p-1}; prefixes of length 0 reach nothing
        let need_a: Vec<usize> =
            (0..layer.len()).filter(|&t| searches[t].lo > 1 && searches[t].cached(searches[t].lo - 1).is_none()).collect();
        if !need_a.is_empty() {
            let parts: Vec<DisjointPart> =
                need_a.iter().map(|&t| prefix_part(&layer[t], &searches[t].order[..searches[t].lo - 1])).collect();
            let answers = meter.disjoint_calls(&host, &parts, CallTag::Scc)?;
            for (&t, d) in need_a.iter().zip(answers) {
                let p = searches[t].lo;
                searches[t].probes.push((p - 1, reached_flags(&d)));
            }
        }
        let pivots: Vec<VertexId> = searches.iter().map(|s| s.order[s.lo - 1]).collect();
        let pivot_parts = |t: usize| DisjointPart { vertices: layer[t].vertices.clone(), source: Source::Vertex(pivots[t]) };
        let all: Vec<DisjointPart> = (0..layer.len()).map(pivot_parts).collect();
        let outs = meter.disjoint_calls(&host, &all, CallTag::Scc)?;
        let ins = meter.disjoint_calls(&rev, &all, CallTag::Scc)?;

        let mut next = Vec::new();
        for (t, task) in layer.iter().enumerate() {
            let k = task.vertices.len();
            let s = &searches[t];
            let a = if s.lo > 1 { s.cached(s.lo - 1).cloned().unwrap_or_else(|| vec![false; k]) } else { vec![false; k] };
            let b = reached_flags(&outs[t]);
            let back = reached_flags(&ins[t]);
            let mut regions: [Vec<VertexId>; 5] = Default::default();
            for (i, &v) in task.vertices.iter().enumerate() {
                let c = b[i] && back[i];
                let j = match (a[i], b[i], c) {
                    (_, _, true) => 2,
                    (false, false, _) => 0,
                    (true, false, _) => 1,
                    (false, true, _) => 3,
                    (true, true, _) => 4,
                };
                region[v] = j as u8;
                regions[j].push(v);
            }
            if regions[2].len() == k {
                let label = rng.gen_range(task.ell * n2..=(task.ell + k as u64 - 1) * n2);
                for &v in &task.vertices {
                    r[v] = label;
                }
                continue;
            }
            for &v in &task.vertices {
                for &e in host.out_edges(v) {
                    let h = host.head(e);
                    if in_task[h] == t && region[h] < region[v] {
                        return Err(Error::Internal(format!(
                            "edge {e} goes from region R{} to R{}",
                            region[v] + 1,
                            region[h] + 1
                        )));
                    }
                }
            }
            let sz: Vec<u64> = regions.iter().map(|x| x.len() as u64).collect();
            let offsets = [
                task.ell + sz[1] + sz[2] + sz[3] + sz[4],
                task.ell + sz[2] + sz[3] + sz[4],
                task.ell + sz[3] + sz[4],
                task.ell + sz[4],
                task.ell,
            ];
            for (vertices, ell) in regions.into_iter().zip(offsets) {
                if !vertices.is_empty() {
                    next.push(Task { vertices, ell });
                }
            }
        }
        for task in &layer {
            for &v in &task.vertices {
                in_task[v] = usize::MAX;
            }
        }
        layer = next;
    }
    Ok(SccLabelling { r })
}

/// A uniformly random order per task, from i.i.d. keys in `[k^3]`; any
/// collision redraws the whole layer.
fn random_orders<R: Rng + ?Sized>(layer: &[Task], rng: &mut R) -> Vec<Vec<VertexId>> {
    'draw: loop {
        let mut orders = Vec::with_capacity(layer.len());
        for task in layer {
            let k = task.vertices.len().max(2) as u64;
            let mut keyed: Vec<(u64, VertexId)> = task.vertices.iter().map(|&v| (rng.gen_range(0..k * k * k), v)).collect();
            keyed.sort_unstable();
            if keyed.windows(2).any(|w| w[0].0 == w[1].0) {
                continue 'draw;
            }
            orders.push(keyed.into_iter().map(|(_, v)| v).collect());
        }
        return orders;
    }
}

fn prefix_part(task: &Task, prefix: &[VertexId]) -> DisjointPart {
    DisjointPart {
        vertices: task.vertices.clone(),
        source: Source::Super(prefix.iter().map(|&v| (v, 0)).collect()),
    }
}

fn reached_flags(d: &DistanceVector) -> Vec<bool> {
    d.iter().map(|x| x.is_finite()).collect()
}

fn count_true(flags: &[bool]) -> usize {
    flags.iter().filter(|&&b| b).count()
}

fn induced_edges(host: &DirectedGraph, vertices: &[VertexId], in_task: &[usize]) -> usize {
    let t = in_task[vertices[0]];
    vertices.iter().map(|&v| host.out_edges(v).iter().filter(|&&e| in_task[host.head(e)] == t).count()).sum()
}

/// Edges with both endpoints flagged; `flags` is indexed like `vertices`.
fn edges_within(host: &DirectedGraph, vertices: &[VertexId], flags: &[bool]) -> usize {
    let inside: HashSet<VertexId> = vertices.iter().zip(flags).filter(|(_, &f)| f).map(|(&v, _)| v).collect();
    inside.iter().map(|&v| host.out_edges(v).iter().filter(|&&e| inside.contains(&host.head(e))).count()).sum()
}
