//! Las Vegas solver: exact distances or a verified negative cycle.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_overflow_guard, DirectedGraph, DistanceVector, EdgeId, VertexId, Weight};
use crate::oracle::{CallTag, Meter, OracleStats};
use crate::rng::derive_seed;
use crate::scc::ceil_log2;
use crate::solver::{sp_main_tagged, SolverConfig};
use crate::verify::{classical_scc, CycleWitness};

/// Default restart budget of [`solve`].
pub const DEFAULT_MAX_RESTARTS: usize = 50;

/// `3 ceil(log2 n) + 5` repetitions per probe.
pub fn probe_repeats(n: usize) -> usize {
    3 * ceil_log2(n) + 5
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub b: Weight,
    pub error: bool,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub b: Weight,
    pub probes: Vec<Probe>,
    /// A cycle of the probed graph handed back by a failing run. Probed
    /// graphs only raise weights, so it is negative in the input as well.
    pub witness: Option<CycleWitness>,
}

/// Smallest `B >= 0` such that `G^B` has no negative cycle, with high
/// probability. A probe counts as ERROR only after `repeats` failing runs,
/// or immediately when a run returns a verified cycle.
pub fn find_thresh(
    g: &DirectedGraph,
    source: VertexId,
    cfg: &SolverConfig,
    seed: u64,
    meter: &mut Meter<'_>,
) -> Result<Threshold> {
    if source >= g.n() {
        return Err(Error::Contract(format!("source {source} outside [0, {})", g.n())));
    }
    let repeats = probe_repeats(g.n());
    let mut stream = 0u64;
    let mut probes = Vec::new();
    let mut witness = None;
    let (mut lo, mut hi) = (0, (-g.min_weight().unwrap_or(0)).max(0));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let gb = g.raise_negative(mid);
        let mut error = true;
        let mut runs = 0;
        while runs < repeats {
            runs += 1;
            let r = sp_main_tagged(&gb, source, cfg, derive_seed(seed, stream), meter, CallTag::NegCycle)?;
            stream += 1;
            if !r.is_error() {
                error = false;
                break;
            }
            if let Some(c) = r.witness() {
                witness.get_or_insert_with(|| c.clone());
                if cfg.shortcuts {
                    break;
                }
            }
        }
        probes.push(Probe { b: mid, error, runs });
        if error {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let witness = witness.map(|c| CycleWitness::from_edges(g, c.edges)).transpose()?;
    Ok(Threshold { b: lo, probes, witness })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Distances(DistanceVector),
    Cycle(CycleWitness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub answer: Answer,
    /// Threshold found on the `n^3`-scaled graph in the successful attempt.
    pub threshold: Weight,
    pub restarts: usize,
    pub stats: OracleStats,
    pub seed: u64,
}

/// Distances from `source`, or a cycle that is negative in `g`. Restarts
/// on every Monte Carlo failure; gives up after `max_restarts`.
pub fn solve(
    g: &DirectedGraph,
    source: VertexId,
    cfg: &SolverConfig,
    max_restarts: usize,
    seed: u64,
    meter: &mut Meter<'_>,
) -> Result<SolveReport> {
    let n = g.n();
    if source >= n {
        return Err(Error::Contract(format!("source {source} outside [0, {n})")));
    }
    check_overflow_guard(n, g.max_abs_weight())?;
    let mut run = meter.fork();
    let mut failures = Vec::new();
    for restart in 0..=max_restarts {
        let attempt_seed = if restart == 0 { seed } else { derive_seed(seed, restart as u64) };
        match attempt(g, source, cfg, attempt_seed, &mut run)? {
            Ok((answer, threshold)) => {
                let stats = run.stats.clone();
                meter.join(run);
                return Ok(SolveReport { answer, threshold, restarts: restart, stats, seed });
            }
            Err(why) => failures.push(why),
        }
    }
    meter.join(run);
    Err(Error::RetryBudgetExhausted { restarts: max_restarts, diagnostics: summarize(&failures) })
}

fn summarize(failures: &[&'static str]) -> String {
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for f in failures {
        match counts.iter_mut().find(|(k, _)| k == f) {
            Some((_, c)) => *c += 1,
            None => counts.push((f, 1)),
        }
    }
    counts.iter().map(|(k, c)| format!("{k} x{c}")).collect::<Vec<_>>().join(", ")
}

type Attempt = std::result::Result<(Answer, Weight), &'static str>;

fn attempt(g: &DirectedGraph, source: VertexId, cfg: &SolverConfig, seed: u64, meter: &mut Meter<'_>) -> Result<Attempt> {
    let n = g.n();
    let n3 = (n as Weight).pow(3);
    let scaled = g.map_weights(|_, w| w * n3);
    let thresh = find_thresh(&scaled, source, cfg, derive_seed(seed, 0), meter)?;
    if cfg.shortcuts {
        if let Some(c) = thresh.witness {
            return Ok(Ok((Answer::Cycle(CycleWitness::from_edges(g, c.edges)?), thresh.b)));
        }
    }
    let b = thresh.b;
    if b == 0 {
        let r = sp_main_tagged(g, source, cfg, derive_seed(seed, 1), meter, CallTag::NegCycle)?;
        return Ok(match (r.distances, r.cause) {
            (Some(d), _) => Ok((Answer::Distances(d), 0)),
            (None, Some(crate::solver::ErrorCause::NegativeCycle(c))) if cfg.shortcuts => Ok((Answer::Cycle(c), 0)),
            _ => Err("sp_main error at threshold 0"),
        });
    }

    // potentials from a dummy source so that every vertex gets a finite value
    let gb = scaled.raise_negative(b);
    let (gbs, s) = gb.add_dummy_source();
    let r = sp_main_tagged(&gbs, s, cfg, derive_seed(seed, 2), meter, CallTag::NegCycle)?;
    let Some(d) = r.distances else {
        return Ok(Err("sp_main error on the thresholded graph"));
    };
    let phi: Vec<Weight> = (0..n).map(|v| d[v].expect_finite()).collect();
    let plus = gb.map_weights(|e, w| w + phi[gb.tail(e)] - phi[gb.head(e)]);
    if plus.has_negative_edge() {
        return Err(Error::Internal("potential from exact distances is infeasible".into()));
    }
    let (small, map) = plus.filter_edges(|e| plus.weight(e) <= n as Weight);
    let Some(local) = cycle_through_negative_edge(&small, |e| g.weight(map[e]) < 0) else {
        return Ok(Err("no cycle through a negative edge below the weight cut"));
    };
    let edges: Vec<EdgeId> = local.into_iter().map(|e| map[e]).collect();
    if g.path_weight(&edges) >= 0 {
        return Ok(Err("extracted cycle is not negative"));
    }
    Ok(Ok((Answer::Cycle(CycleWitness::from_edges(g, edges)?), b)))
}

/// Edge ids of a cycle through the first edge satisfying `pick` whose
/// endpoints share a strongly connected component, closed by a fewest-edge
/// path.
fn cycle_through_negative_edge(g: &DirectedGraph, pick: impl Fn(EdgeId) -> bool) -> Option<Vec<EdgeId>> {
    let scc = classical_scc(g);
    let e = (0..g.m()).find(|&e| pick(e) && scc.same(g.tail(e), g.head(e)))?;
    let (from, to) = (g.head(e), g.tail(e));
    let mut via: Vec<Option<EdgeId>> = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &f in g.out_edges(u) {
            let v = g.head(f);
            if !seen[v] && scc.same(v, from) {
                seen[v] = true;
                via[v] = Some(f);
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let f = via[v]?;
        path.push(f);
        v = g.tail(f);
    }
    path.reverse();
    let mut cycle = vec![e];
    cycle.extend(path);
    Some(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightBound;
    use crate::oracle::{Dijkstra, Source, SsspOracle};
    use crate::rng::seeded;
    use crate::verify::{bellman_ford, has_negative_cycle, Reference};
    use rand::Rng;

    fn graph(n: usize, edges: Vec<(usize, usize, i64)>) -> DirectedGraph {
        DirectedGraph::with_bound(n, edges, WeightBound::Unbounded).unwrap()
    }

    fn brute_threshold(g: &DirectedGraph) -> Weight {
        (0..).find(|&b| !has_negative_cycle(&g.raise_negative(b))).unwrap()
    }

    fn planted(n: usize, seed: u64) -> DirectedGraph {
        let mut rng = seeded(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(0.1) {
                    edges.push((u, v, rng.gen_range(0..=20)));
                }
            }
        }
        let len = rng.gen_range(2..=5);
        let mut cyc: Vec<usize> = Vec::new();
        while cyc.len() < len {
            let v = rng.gen_range(0..n);
            if !cyc.contains(&v) {
                cyc.push(v);
            }
        }
        let total = -rng.gen_range(1..=8i64);
        for i in 0..len {
            let w = if i == 0 { total - 2 * (len as i64 - 1) } else { 2 };
            edges.push((cyc[i], cyc[(i + 1) % len], w));
        }
        graph(n, edges)
    }

    #[test]
    fn threshold_of_non_negative_graph_is_zero() {
        let g = graph(3, vec![(0, 1, 4), (1, 2, 0)]);
        let mut meter = Meter::new(&Dijkstra);
        let t = find_thresh(&g, 0, &SolverConfig::default(), 1, &mut meter).unwrap();
        assert_eq!(t.b, 0);
        assert!(t.probes.is_empty());
    }

    #[test]
    fn threshold_of_two_cycle() {
        let g = graph(2, vec![(0, 1, -3), (1, 0, -3)]);
        for shortcuts in [true, false] {
            let cfg = SolverConfig { shortcuts, ..SolverConfig::default() };
            let mut meter = Meter::new(&Dijkstra);
            assert_eq!(find_thresh(&g, 0, &cfg, 1, &mut meter).unwrap().b, 3);
        }
    }

    #[test]
    fn threshold_matches_brute_force_on_planted_cycles() {
        let mut hits = 0;
        for seed in 0..20 {
            let g = planted(14, seed);
            let mut meter = Meter::new(&Dijkstra);
            let t = find_thresh(&g, 0, &SolverConfig::default(), seed, &mut meter).unwrap();
            hits += (t.b == brute_threshold(&g)) as usize;
        }
        assert!(hits >= 19, "{hits}/20");
    }

    #[test]
    fn non_negative_graph_gives_direct_distances() {
        let g = graph(4, vec![(0, 1, 2), (1, 2, 3), (0, 2, 9)]);
        let mut meter = Meter::new(&Dijkstra);
        let r = solve(&g, 0, &SolverConfig::default(), DEFAULT_MAX_RESTARTS, 3, &mut meter).unwrap();
        assert_eq!(r.answer, Answer::Distances(Dijkstra.distances(&g, &Source::Vertex(0))));
    }

    #[test]
    fn triangle_of_weight_minus_one() {
        let g = graph(4, vec![(0, 1, 2), (1, 2, -4), (2, 0, 1), (2, 3, 5)]);
        for shortcuts in [true, false] {
            let cfg = SolverConfig { shortcuts, ..SolverConfig::default() };
            let mut meter = Meter::new(&Dijkstra);
            let r = solve(&g, 3, &cfg, DEFAULT_MAX_RESTARTS, 7, &mut meter).unwrap();
            let Answer::Cycle(c) = r.answer else { panic!("expected a cycle") };
            assert_eq!(c.total_weight, -1);
            let mut es = c.edges.clone();
            es.sort();
            assert_eq!(es, vec![0, 1, 2]);
            assert!(c.is_valid_for(&g));
        }
    }

    #[test]
    fn planted_cycles_are_reported_without_shortcuts() {
        let cfg = SolverConfig { shortcuts: false, ..SolverConfig::default() };
        for seed in 0..4 {
            let g = planted(7, 50 + seed);
            let mut meter = Meter::new(&Dijkstra);
            let r = solve(&g, 0, &cfg, DEFAULT_MAX_RESTARTS, seed, &mut meter).unwrap();
            let Answer::Cycle(c) = r.answer else { panic!("expected a cycle") };
            assert!(c.is_valid_for(&g));
        }
    }

    #[test]
    fn agrees_with_bellman_ford_verdict() {
        for seed in 0..12 {
            let mut rng = seeded(seed);
            let n = rng.gen_range(3..15);
            let edges: Vec<_> = (0..3 * n)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(-4..12)))
                .collect();
            let g = graph(n, edges);
            let mut meter = Meter::new(&Dijkstra);
            let r = solve(&g, 0, &SolverConfig::default(), DEFAULT_MAX_RESTARTS, seed, &mut meter).unwrap();
            match (r.answer, has_negative_cycle(&g)) {
                (Answer::Cycle(c), true) => assert!(c.is_valid_for(&g)),
                (Answer::Distances(d), false) => {
                    let Reference::Distances(bf) = bellman_ford(&g, 0) else { unreachable!() };
                    assert_eq!(d, bf);
                }
                (a, cyc) => panic!("seed {seed}: answer {a:?} but negative cycle = {cyc}"),
            }
        }
    }

    #[test]
    fn repeats_formula() {
        assert_eq!(probe_repeats(1), 5);
        assert_eq!(probe_repeats(16), 17);
    }
}
