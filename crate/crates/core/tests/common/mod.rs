#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};

use negsp::gen::{without_negative_cycle, ErParams};
use negsp::graph::WeightBound;
use negsp::rng::SeededRng;
use negsp::{Dijkstra, DirectedGraph, DistanceVector, Source, SsspOracle};
use rand::Rng;

/// Edge probability giving an expected out-degree of about `deg`.
pub fn density(n: usize, deg: f64) -> f64 {
    if n < 2 {
        0.0
    } else {
        (deg / (n - 1) as f64).min(1.0)
    }
}

pub fn cycle_free(n: usize, deg: f64, lo: i64, hi: i64, rng: &mut SeededRng) -> DirectedGraph {
    let p = ErParams { n, p: density(n, deg), min_weight: lo, max_weight: hi };
    without_negative_cycle(&p, rng).expect("generator")
}

pub fn random_nonneg(n: usize, deg: f64, hi: i64, rng: &mut SeededRng) -> DirectedGraph {
    let p = density(n, deg);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(0..=hi)));
            }
        }
    }
    DirectedGraph::with_bound(n, edges, WeightBound::Unbounded).unwrap()
}

/// Strongly connected blocks with non-negative inner weights, joined by
/// forward edges of any sign. Returns the graph and each vertex's block.
pub fn dag_of_sccs(rng: &mut SeededRng) -> (DirectedGraph, Vec<usize>) {
    let blocks = rng.gen_range(1..8);
    let mut block_of = Vec::new();
    let mut edges = Vec::new();
    for b in 0..blocks {
        let size = rng.gen_range(1..6);
        let first = block_of.len();
        block_of.extend(std::iter::repeat_n(b, size));
        if size > 1 {
            for i in 0..size {
                edges.push((first + i, first + (i + 1) % size, rng.gen_range(0..=10)));
            }
            for _ in 0..size {
                let (u, v) = (first + rng.gen_range(0..size), first + rng.gen_range(0..size));
                edges.push((u, v, rng.gen_range(0..=10)));
            }
        }
    }
    let n = block_of.len();
    for _ in 0..2 * n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if block_of[u] < block_of[v] {
            edges.push((u, v, rng.gen_range(-20..=10)));
        }
    }
    (DirectedGraph::with_bound(n, edges, WeightBound::Unbounded).unwrap(), block_of)
}

/// Dijkstra that counts every query it answers.
#[derive(Default)]
pub struct Counting {
    pub queries: AtomicU64,
}

impl Counting {
    pub fn count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }
}

impl SsspOracle for Counting {
    fn distances(&self, g: &DirectedGraph, source: &Source) -> DistanceVector {
        self.queries.fetch_add(1, Ordering::SeqCst);
        Dijkstra.distances(g, source)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
