//! Potential-producing subroutines: [`fix_dag_edges`] (no oracle calls) and
//! [`est_dist`] (Bellman-Ford steps interleaved with oracle calls), plus the
//! [`certify_nonneg`] checker.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Dist, DistanceVector, EdgeId, PriceFunction, VertexId, Weight};
use crate::oracle::{CallTag, Meter, Source};
use crate::scc::SccLabelling;
use crate::verify::CycleWitness;

/// An edge and its (reweighted) weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub edge: EdgeId,
    pub weight: Weight,
}

/// `Ok` if every `w_phi(e) >= floor`, else the edge of minimum reweighted
/// weight.
pub fn certify_nonneg(g: &DirectedGraph, phi: &PriceFunction, floor: Weight) -> Result<(), EdgeWitness> {
    assert_eq!(phi.len(), g.n(), "price function length must equal n");
    let worst = (0..g.m())
        .map(|e| EdgeWitness { edge: e, weight: g.weight(e) + phi[g.tail(e)] - phi[g.head(e)] })
        .min_by_key(|w| (w.weight, w.edge));
    match worst {
        Some(w) if w.weight < floor => Err(w),
        _ => Ok(()),
    }
}

/// `psi(v) = B r_v` with `-B = min(0, min_e w(e))`, without the post-check.
pub fn fix_dag_potential(g: &DirectedGraph, labels: &SccLabelling) -> PriceFunction {
    let b = -g.min_weight().unwrap_or(0).min(0);
    PriceFunction(labels.r.iter().map(|&r| b * r as Weight).collect())
}

/// Price function making every edge of `g` non-negative, given that edges
/// inside SCCs are already non-negative and `labels` orders the SCCs
/// topologically.
pub fn fix_dag_edges(g: &DirectedGraph, labels: &SccLabelling) -> Result<PriceFunction> {
    if labels.r.len() != g.n() {
        return Err(Error::Contract(format!("{} labels for {} vertices", labels.r.len(), g.n())));
    }
    let psi = fix_dag_potential(g, labels);
    match certify_nonneg(g, &psi, 0) {
        Ok(()) => Ok(psi),
        Err(w) => Err(Error::PreconditionViolated { edge: w.edge, weight: w.weight }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstDistResult {
    pub dtilde: DistanceVector,
    /// Iterations actually run.
    pub h_used: usize,
    /// The shift added to the source's outgoing edges.
    pub b_shift: Weight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstDistOptions {
    /// Stop once an iteration leaves the estimate unchanged; later
    /// iterations would reproduce it exactly.
    pub early_exit: bool,
    /// Keep predecessor edges and stop with a witness once they close a
    /// negative cycle.
    pub track_cycles: bool,
}

impl Default for EstDistOptions {
    fn default() -> Self {
        EstDistOptions { early_exit: true, track_cycles: true }
    }
}

impl EstDistOptions {
    pub const EXACT: EstDistOptions = EstDistOptions { early_exit: false, track_cycles: false };
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EstDistOutcome {
    Estimate(EstDistResult),
    NegativeCycle(CycleWitness),
}

/// Distance estimate from `s`, exact for every vertex with a shortest path
/// using at most `h` negative edges and never below the true distance.
/// Makes exactly `h + 1` oracle calls.
pub fn est_dist(g: &DirectedGraph, s: VertexId, h: usize, meter: &mut Meter<'_>) -> Result<EstDistResult> {
    match est_dist_with(g, s, h, EstDistOptions::EXACT, meter)? {
        EstDistOutcome::Estimate(r) => Ok(r),
        EstDistOutcome::NegativeCycle(_) => Err(Error::Internal("cycle reported with tracking off".into())),
    }
}

pub fn est_dist_with(
    g: &DirectedGraph,
    s: VertexId,
    h: usize,
    opts: EstDistOptions,
    meter: &mut Meter<'_>,
) -> Result<EstDistOutcome> {
    let n = g.n();
    if s >= n {
        return Err(Error::Contract(format!("source {s} outside [0, {n})")));
    }
    let min_w = g.min_weight().unwrap_or(0);
    let b = (-(h as Weight + 1) * min_w).max(0);
    // H_0: the source's out-edges shifted by B, then negatives zeroed
    let h0 = g.map_weights(|e, w| if g.tail(e) == s { w + b } else { w }.max(0));
    let mut d = meter.query(&h0, &Source::Vertex(s), CallTag::EstDist)?;
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    if opts.track_cycles {
        let mut anchors = vec![false; n];
        anchors[s] = true;
        assign_tight(&h0, &d, &anchors, &mut pred);
    }

    let mut used = 0;
    for _ in 0..h {
        used += 1;
        let mut d1 = d.0.clone();
        for e in 0..g.m() {
            let u = g.tail(e);
            if u == s {
                continue;
            }
            let v = g.head(e);
            let cand = d[u].add(g.weight(e));
            if cand < d1[v] {
                d1[v] = cand;
                if opts.track_cycles {
                    pred[v] = Some(e);
                }
            }
        }
        let mut att = vec![(s, 0)];
        att.extend((0..n).filter(|&v| v != s).filter_map(|v| d1[v].value().map(|x| (v, x))));
        let next = meter.query(&h0, &Source::Super(att), CallTag::EstDist)?;
        if opts.track_cycles {
            let anchors: Vec<bool> = (0..n).map(|v| v == s || next[v] == d1[v]).collect();
            assign_tight(&h0, &next, &anchors, &mut pred);
        }
        let unchanged = next == d;
        d = next;
        if opts.track_cycles {
            if let Some(cycle) = pred_cycle(g, &pred) {
                if g.path_weight(&cycle) < 0 {
                    return Ok(EstDistOutcome::NegativeCycle(CycleWitness::from_edges(g, cycle)?));
                }
            }
        }
        if opts.early_exit && unchanged {
            break;
        }
    }

    let mut dtilde: Vec<Dist> = d.iter().map(|x| x.add(-b)).collect();
    dtilde[s] = Dist::ZERO;
    Ok(EstDistOutcome::Estimate(EstDistResult { dtilde: DistanceVector(dtilde), h_used: used, b_shift: b }))
}

/// Points every non-anchor vertex at a tight in-edge of `h0`, growing from
/// the anchors; `d` are exact distances in `h0` from the anchors' values.
fn assign_tight(h0: &DirectedGraph, d: &DistanceVector, anchors: &[bool], pred: &mut [Option<EdgeId>]) {
    let n = h0.n();
    let mut done = anchors.to_vec();
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| anchors[v] && d[v].is_finite()).collect();
    while let Some(u) = queue.pop_front() {
        for &e in h0.out_edges(u) {
            let v = h0.head(e);
            if !done[v] && d[v] == d[u].add(h0.weight(e)) {
                done[v] = true;
                pred[v] = Some(e);
                queue.push_back(v);
            }
        }
    }
}

/// A cycle in the predecessor graph, as edges in walk order.
fn pred_cycle(g: &DirectedGraph, pred: &[Option<EdgeId>]) -> Option<Vec<EdgeId>> {
    let n = pred.len();
    // 0 unvisited, otherwise 1 + the start vertex of the walk that saw it
    let mut mark = vec![0usize; n];
    for start in 0..n {
        let mut v = start;
        while mark[v] == 0 {
            mark[v] = start + 1;
            match pred[v] {
                Some(e) => v = g.tail(e),
                None => break,
            }
        }
        if mark[v] == start + 1 && pred[v].is_some() {
            let first = v;
            let mut edges = Vec::new();
            loop {
                let e = pred[v]?;
                edges.push(e);
                v = g.tail(e);
                if v == first {
                    break;
                }
            }
            edges.reverse();
            return Some(edges);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Dijkstra;
    use crate::rng::seeded;
    use crate::verify::{bellman_ford, min_negative_edges, Reference};
    use rand::Rng;

    fn labels(r: &[u64]) -> SccLabelling {
        SccLabelling { r: r.to_vec() }
    }

    #[test]
    fn fix_dag_nonneg_is_zero() {
        let g = DirectedGraph::new(3, [(0, 1, 2), (1, 2, 0)]).unwrap();
        assert_eq!(fix_dag_edges(&g, &labels(&[2, 1, 0])).unwrap(), PriceFunction::zero(3));
    }

    #[test]
    fn fix_dag_single_edge() {
        let g = DirectedGraph::new(2, [(0, 1, -5)]).unwrap();
        let psi = fix_dag_edges(&g, &labels(&[1, 0])).unwrap();
        assert_eq!(psi, PriceFunction(vec![5, 0]));
        assert_eq!(g.reweight(&psi).unwrap().weights(), &[0]);
    }

    #[test]
    fn fix_dag_reports_witness() {
        let g = DirectedGraph::new(2, [(0, 1, -5), (1, 0, 1)]).unwrap();
        assert!(matches!(
            fix_dag_edges(&g, &labels(&[0, 0])),
            Err(Error::PreconditionViolated { edge: 0, weight: -5 })
        ));
    }

    #[test]
    fn certify_examples() {
        let g = DirectedGraph::new(3, [(0, 1, -2), (1, 2, 3)]).unwrap();
        assert!(certify_nonneg(&g, &PriceFunction::zero(3), -2).is_ok());
        assert_eq!(certify_nonneg(&g, &PriceFunction::zero(3), -1), Err(EdgeWitness { edge: 0, weight: -2 }));
    }

    #[test]
    fn est_dist_nonneg_is_exact() {
        let g = DirectedGraph::new(3, [(0, 1, 2), (1, 2, 3)]).unwrap();
        for h in [0, 1, 3] {
            let mut meter = Meter::new(&Dijkstra);
            let r = est_dist(&g, 0, h, &mut meter).unwrap();
            assert_eq!(r.dtilde.0, vec![Dist::finite(0), Dist::finite(2), Dist::finite(5)]);
            assert_eq!(meter.stats.calls, h as u64 + 1);
        }
    }

    #[test]
    fn est_dist_two_negative_edges() {
        let g = DirectedGraph::new(3, [(0, 1, -3), (1, 2, -3)]).unwrap();
        let r = est_dist(&g, 0, 2, &mut Meter::new(&Dijkstra)).unwrap();
        assert_eq!(r.dtilde.0, vec![Dist::finite(0), Dist::finite(-3), Dist::finite(-6)]);
        assert_eq!(r.b_shift, 9);
    }

    #[test]
    fn est_dist_contract_on_random_graphs() {
        let mut rng = seeded(1);
        let mut checked = 0;
        while checked < 40 {
            let n = rng.gen_range(2..30);
            let edges: Vec<_> = (0..3 * n).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(-4..15))).collect();
            let (g, s) = DirectedGraph::new(n, edges).unwrap().add_dummy_source();
            let Reference::Distances(dist) = bellman_ford(&g, s) else { continue };
            let eta = min_negative_edges(&g, s).unwrap();
            let h = rng.gen_range(0..5);
            let mut meter = Meter::new(&Dijkstra);
            let r = est_dist(&g, s, h, &mut meter).unwrap();
            assert_eq!(meter.stats.calls, h as u64 + 1);
            for v in 0..g.n() {
                assert!(r.dtilde[v] >= dist[v]);
                if eta[v].is_some_and(|k| k <= h) {
                    assert_eq!(r.dtilde[v], dist[v]);
                }
            }
            match est_dist_with(&g, s, h, EstDistOptions::default(), &mut Meter::new(&Dijkstra)).unwrap() {
                EstDistOutcome::Estimate(fast) => assert_eq!(fast.dtilde, r.dtilde),
                EstDistOutcome::NegativeCycle(w) => panic!("spurious cycle {w:?}"),
            }
            checked += 1;
        }
    }

    #[test]
    fn est_dist_is_monotone_in_h() {
        let g = DirectedGraph::new(5, [(0, 1, -1), (1, 2, -1), (2, 3, -1), (3, 4, -1), (0, 4, 1)]).unwrap();
        let mut prev: Option<DistanceVector> = None;
        for h in 0..6 {
            let r = est_dist(&g, 0, h, &mut Meter::new(&Dijkstra)).unwrap();
            if let Some(p) = prev {
                assert!((0..5).all(|v| r.dtilde[v] <= p[v]));
            }
            prev = Some(r.dtilde);
        }
    }

    #[test]
    fn tracked_cycle_is_reported() {
        let (g, s) = DirectedGraph::new(3, [(0, 1, -2), (1, 2, 1), (2, 0, 0)]).unwrap().add_dummy_source();
        let out = est_dist_with(&g, s, 20, EstDistOptions::default(), &mut Meter::new(&Dijkstra)).unwrap();
        match out {
            EstDistOutcome::NegativeCycle(w) => {
                assert!(w.is_valid_for(&g));
                assert_eq!(w.total_weight, -1);
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }
}
