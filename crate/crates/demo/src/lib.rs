//! Browser demo: generate a graph, decompose it, and run the solver with
//! its oracle-call counts on display. Every export takes and returns
//! strings so the page needs no bindings beyond `wasm-bindgen`'s.

use negsp::gen::{self, ErParams};
use negsp::graph::WeightBound;
use negsp::ldd::{low_diameter_decomposition, LddParams, TruncGeom};
use negsp::rng::seeded;
use negsp::verify::{bellman_ford, classical_scc, Reference};
use negsp::{dimacs, sp_main, Dijkstra, DirectedGraph, Meter, SolverConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse(text: &str) -> Result<DirectedGraph, String> {
    dimacs::parse(text, WeightBound::Unbounded).map_err(|e| e.to_string())
}

/// DIMACS text of a random instance; `planted` adds a negative cycle.
pub fn random_graph(n: usize, degree: f64, lo: i64, hi: i64, seed: u64, planted: bool) -> Result<String, String> {
    let p = if n < 2 { 0.0 } else { (degree / (n - 1) as f64).min(1.0) };
    let params = ErParams { n, p, min_weight: lo, max_weight: hi };
    let mut rng = seeded(seed);
    let g = if planted {
        gen::with_planted_cycle(&params, &mut rng).map(|pl| pl.graph)
    } else {
        gen::without_negative_cycle(&params, &mut rng)
    };
    g.map(|g| dimacs::write(&g)).map_err(|e| e.to_string())
}

/// Removed edges and the components left behind. Negative weights are
/// clamped to zero first.
pub fn ldd_json(text: &str, d: i64, seed: u64) -> Result<String, String> {
    let g = parse(text)?.clamp_nonneg();
    let mut meter = Meter::new(&Dijkstra);
    let params = LddParams::new(d as i128, g.n());
    let rem = low_diameter_decomposition(&g, &params, &mut seeded(seed), &mut meter).map_err(|e| e.to_string())?;
    let (kept, _) = g.filter_edges(|e| !rem.contains(e));
    let scc = classical_scc(&kept);
    let removed: Vec<_> = rem.iter().map(|e| json!([g.tail(e) + 1, g.head(e) + 1, g.weight(e)])).collect();
    Ok(json!({
        "removed": removed,
        "m": g.m(),
        "component": scc.component,
        "components": scc.count,
        "radius_p": params.radius_p(),
        "calls": meter.stats.calls,
    })
    .to_string())
}

/// Distances or ERROR, call counts by kind, and agreement with Bellman-Ford.
pub fn sssp_json(text: &str, source: usize, seed: u64) -> Result<String, String> {
    let g = parse(text)?;
    if source == 0 || source > g.n() {
        return Err(format!("source {source} outside 1..={}", g.n()));
    }
    let mut meter = Meter::new(&Dijkstra);
    let r = sp_main(&g, source - 1, &SolverConfig::default(), seed, &mut meter).map_err(|e| e.to_string())?;
    let agrees = match (bellman_ford(&g, source - 1), &r.distances) {
        (Reference::Distances(d), Some(ours)) => d == *ours,
        (Reference::NegativeCycle(_), None) => true,
        _ => false,
    };
    Ok(json!({
        "distances": r.distances,
        "error": r.is_error(),
        "witness": r.witness().map(|c| c.vertices.iter().map(|v| v + 1).collect::<Vec<_>>()),
        "calls": r.stats.calls,
        "raw_calls": r.stats.raw_calls,
        "calls_by_tag": r.stats.calls_by_tag,
        "params": r.params,
        "bellman_ford_agrees": agrees,
    })
    .to_string())
}

/// Empirical frequencies of the truncated geometric radius next to its pmf.
pub fn trunc_geom_json(p: f64, t: u64, samples: u32, seed: u64) -> Result<String, String> {
    let dist = TruncGeom::new(p, t).map_err(|e| e.to_string())?;
    let mut counts = vec![0u32; t as usize + 1];
    let mut rng = seeded(seed);
    for _ in 0..samples {
        counts[dist.sample(&mut rng) as usize] += 1;
    }
    let pmf: Vec<f64> = (0..=t).map(|k| dist.pmf(k)).collect();
    Ok(json!({ "counts": counts, "pmf": pmf, "mean": dist.mean(), "samples": samples }).to_string())
}

fn js<T>(r: Result<T, String>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = randomGraph)]
pub fn random_graph_js(n: usize, degree: f64, lo: i32, hi: i32, seed: u32, planted: bool) -> Result<String, JsValue> {
    js(random_graph(n, degree, lo as i64, hi as i64, seed as u64, planted))
}

#[wasm_bindgen(js_name = ldd)]
pub fn ldd_js(text: &str, d: i32, seed: u32) -> Result<String, JsValue> {
    js(ldd_json(text, d as i64, seed as u64))
}

#[wasm_bindgen(js_name = sssp)]
pub fn sssp_js(text: &str, source: usize, seed: u32) -> Result<String, JsValue> {
    js(sssp_json(text, source, seed as u64))
}

#[wasm_bindgen(js_name = truncGeom)]
pub fn trunc_geom_js(p: f64, t: u32, samples: u32, seed: u32) -> Result<String, JsValue> {
    js(trunc_geom_json(p, t as u64, samples, seed as u64))
}
