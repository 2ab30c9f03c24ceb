//! Random instances: Erdős–Rényi digraphs with uniform integer weights,
//! optionally guaranteed free of negative cycles or with one planted.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexId, WeightBound};
use crate::verify::has_negative_cycle;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: usize,
    /// Probability of each ordered pair `(u, v)`, `u != v`.
    pub p: f64,
    pub min_weight: i64,
    pub max_weight: i64,
}

impl ErParams {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Contract(format!("edge probability {} outside [0, 1]", self.p)));
        }
        if self.min_weight > self.max_weight {
            return Err(Error::Contract(format!("empty weight range [{}, {}]", self.min_weight, self.max_weight)));
        }
        Ok(())
    }
}

fn er_edges<R: Rng + ?Sized>(params: &ErParams, rng: &mut R) -> Vec<(VertexId, VertexId, i64)> {
    let mut edges = Vec::new();
    for u in 0..params.n {
        for v in 0..params.n {
            if u != v && rng.gen_bool(params.p) {
                edges.push((u, v, rng.gen_range(params.min_weight..=params.max_weight)));
            }
        }
    }
    edges
}

fn build(n: usize, edges: Vec<(VertexId, VertexId, i64)>) -> Result<DirectedGraph> {
    DirectedGraph::with_bound(n, edges, WeightBound::Unbounded)
}

pub fn erdos_renyi<R: Rng + ?Sized>(params: &ErParams, rng: &mut R) -> Result<DirectedGraph> {
    params.validate()?;
    build(params.n, er_edges(params, rng))
}

/// An instance with no negative cycle. Each weight is raised to at least
/// `pi(v) - pi(u)` for a random potential `pi`, which keeps it inside the
/// range and makes `pi` feasible; Bellman-Ford confirms the result.
pub fn without_negative_cycle<R: Rng + ?Sized>(params: &ErParams, rng: &mut R) -> Result<DirectedGraph> {
    params.validate()?;
    let spread = params.max_weight.min(-params.min_weight).max(0);
    let pi: Vec<i64> = (0..params.n).map(|_| rng.gen_range(0..=spread)).collect();
    let edges = er_edges(params, rng)
        .into_iter()
        .map(|(u, v, w)| (u, v, w.max(pi[v] - pi[u])))
        .collect();
    let g = build(params.n, edges)?;
    if has_negative_cycle(&g) {
        return Err(Error::Internal("generated graph has a negative cycle".into()));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Planted {
    pub graph: DirectedGraph,
    /// Vertices of the planted cycle in order; its edges are the last ones.
    pub cycle: Vec<VertexId>,
    pub cycle_weight: i64,
}

/// An Erdős–Rényi instance plus a cycle on 2 to 6 distinct vertices whose
/// weight lies in `[-10, -1]` (lower if every weight in range is below
/// `-1`), every planted weight inside the range.
pub fn with_planted_cycle<R: Rng + ?Sized>(params: &ErParams, rng: &mut R) -> Result<Planted> {
    params.validate()?;
    if params.min_weight >= 0 {
        return Err(Error::Contract("a negative cycle needs a negative minimum weight".into()));
    }
    if params.n == 0 {
        return Err(Error::Contract("a negative cycle needs at least one vertex".into()));
    }
    let mut edges = er_edges(params, rng);
    let len = if params.n == 1 { 1 } else { rng.gen_range(2..=params.n.min(6)) };
    let mut cycle: Vec<VertexId> = Vec::with_capacity(len);
    while cycle.len() < len {
        let v = rng.gen_range(0..params.n);
        if !cycle.contains(&v) {
            cycle.push(v);
        }
    }
    let weights: Vec<i64> = if params.max_weight < 0 {
        (0..len).map(|_| rng.gen_range(params.min_weight..=params.max_weight)).collect()
    } else {
        let total = -rng.gen_range(1..=10i64).min(-params.min_weight);
        let rest = len as i64 - 1;
        let cap = if rest == 0 { 0 } else { ((total - params.min_weight) / rest).clamp(0, params.max_weight) };
        let mut w: Vec<i64> = (0..rest).map(|_| rng.gen_range(0..=cap)).collect();
        w.insert(0, total - w.iter().sum::<i64>());
        w
    };
    let total = weights.iter().sum();
    for (i, &w) in weights.iter().enumerate() {
        edges.push((cycle[i], cycle[(i + 1) % len], w));
    }
    Ok(Planted { graph: build(params.n, edges)?, cycle, cycle_weight: total })
}
