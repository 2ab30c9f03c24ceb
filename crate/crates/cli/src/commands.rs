use std::fmt::Write as _;
use std::fs;

use negsp::gen::{self, ErParams};
use negsp::graph::WeightBound;
use negsp::ldd::{low_diameter_decomposition, LddParams};
use negsp::rng::{derived, seeded};
use negsp::scc::scc_topsort;
use negsp::solver::ErrorCause;
use negsp::verify::{bellman_ford, classical_scc, has_negative_cycle, Reference};
use negsp::{
    sp_main, sp_main_with_retry, Answer, CycleWitness, Dijkstra, DirectedGraph, Dist, DistanceVector, Meter,
    SolverConfig, Source, SsspOracle, Weight,
};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{Common, Format, GenArgs, Outcome};

/// All-pairs verification up to this many vertices, sampled sources beyond.
const ALL_PAIRS_LIMIT: usize = 200;
const SAMPLED_SOURCES: usize = 64;

fn source_index(g: &DirectedGraph, source: usize) -> Result<usize, CliError> {
    if source == 0 || source > g.n() {
        return Err(CliError::Usage(format!("source {source} outside 1..={}", g.n())));
    }
    Ok(source - 1)
}

fn meter(common: &Common) -> Meter<'static> {
    Meter::new(&Dijkstra).with_batching(!common.raw_calls)
}

fn bound_json(common: &Common) -> Value {
    match common.weight_bound {
        None | Some(WeightBound::PolyDefault) => json!("n^4"),
        Some(WeightBound::Explicit(b)) => json!(b),
        Some(WeightBound::Unbounded) => json!("none"),
    }
}

fn params_json(g: &DirectedGraph, cfg: &SolverConfig, common: &Common) -> Value {
    json!({
        "effective": cfg.effective(g.n()),
        "shortcuts": cfg.shortcuts,
        "threads": cfg.threads,
        "max_retries": cfg.max_retries,
        "weight_bound": bound_json(common),
        "batching": !common.raw_calls,
    })
}

fn cycle_json(c: &CycleWitness) -> Value {
    json!({
        "cycle": c.vertices.iter().map(|v| v + 1).collect::<Vec<_>>(),
        "edges": c.edges.iter().map(|e| e + 1).collect::<Vec<_>>(),
        "weight": c.total_weight,
    })
}

fn cause_json(cause: &ErrorCause) -> Value {
    match cause {
        ErrorCause::NegativeCycle(c) => json!({ "kind": "negative_cycle", "witness": cycle_json(c) }),
        ErrorCause::RoundFloor { round, edge, weight, floor } => {
            json!({ "kind": "round_floor", "round": round, "edge": edge + 1, "weight": weight, "floor": floor })
        }
        ErrorCause::FinalNegativeEdge { edge, weight } => {
            json!({ "kind": "final_negative_edge", "edge": edge + 1, "weight": weight })
        }
    }
}

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn tsv_distances(d: &DistanceVector) -> String {
    let mut out = String::new();
    for (v, x) in d.iter().enumerate() {
        let _ = writeln!(out, "{}\t{x}", v + 1);
    }
    out
}

/// Distances agree with Bellman-Ford from the same source.
fn agrees_with_reference(g: &DirectedGraph, source: usize, d: &DistanceVector) -> bool {
    match bellman_ford(g, source) {
        Reference::Distances(r) => r == *d,
        Reference::NegativeCycle(_) => false,
    }
}

pub fn sssp(
    g: &DirectedGraph,
    source: usize,
    expect_no_cycle: bool,
    check: bool,
    cfg: &SolverConfig,
    common: &Common,
) -> Result<Outcome, CliError> {
    let s = source_index(g, source)?;
    let mut meter = meter(common);
    let report = if expect_no_cycle {
        sp_main_with_retry(g, s, cfg, common.seed, &mut meter)?
    } else {
        sp_main(g, s, cfg, common.seed, &mut meter)?
    };
    let agrees = check.then(|| match &report.distances {
        Some(d) => agrees_with_reference(g, s, d),
        None => has_negative_cycle(g),
    });
    let mismatch = report.distances.is_some() && agrees == Some(false);
    let code = if mismatch {
        3
    } else if report.is_error() {
        2
    } else {
        0
    };
    if common.format == Format::Tsv {
        if let Some(cause) = &report.cause {
            eprintln!("negsp: ERROR ({})", cause_json(cause)["kind"].as_str().unwrap_or("unknown"));
        }
        let stdout = report.distances.as_ref().map(tsv_distances).unwrap_or_default();
        return Ok(Outcome { stdout, code });
    }
    let mut value = json!({
        "command": "sssp",
        "source": source,
        "distances": report.distances,
        "error": report.is_error(),
        "cause": report.cause.as_ref().map(cause_json),
        "stats": report.stats,
        "retries": report.retries,
        "seed": report.seed,
        "params": params_json(g, cfg, common),
    });
    if let Some(a) = agrees {
        value["bellman_ford_agrees"] = json!(a);
    }
    Ok(Outcome { stdout: render(&value), code })
}

pub fn solve(
    g: &DirectedGraph,
    source: usize,
    max_restarts: usize,
    cfg: &SolverConfig,
    common: &Common,
) -> Result<Outcome, CliError> {
    let s = source_index(g, source)?;
    let mut meter = meter(common);
    let report = negsp::solve(g, s, cfg, max_restarts, common.seed, &mut meter)?;
    if common.format == Format::Tsv {
        let stdout = match &report.answer {
            Answer::Distances(d) => tsv_distances(d),
            Answer::Cycle(c) => c.vertices.iter().map(|v| format!("{}\n", v + 1)).collect(),
        };
        return Ok(Outcome::ok(stdout));
    }
    let mut value = match &report.answer {
        Answer::Distances(d) => json!({ "distances": d, "error": false }),
        Answer::Cycle(c) => cycle_json(c),
    };
    value["command"] = json!("solve");
    value["source"] = json!(source);
    value["threshold"] = json!(report.threshold);
    value["restarts"] = json!(report.restarts);
    value["stats"] = json!(report.stats);
    value["seed"] = json!(report.seed);
    value["params"] = json!({ "solver": params_json(g, cfg, common), "max_restarts": max_restarts });
    Ok(Outcome::ok(render(&value)))
}

/// Weak-diameter check of a decomposition: every pair in one strongly
/// connected component of `g` minus `removed` is within `d` of each other
/// in `g`, both ways.
fn verify_weak_diameter(g: &DirectedGraph, removed: &negsp::EdgeSet, d: Weight, seed: u64) -> Value {
    let (kept, _) = g.filter_edges(|e| !removed.contains(e));
    let scc = classical_scc(&kept);
    let n = g.n();
    let (method, sources): (&str, Vec<usize>) = if n <= ALL_PAIRS_LIMIT {
        ("all_pairs", (0..n).collect())
    } else {
        let mut rng = derived(seed, u64::MAX);
        ("sampled", (0..SAMPLED_SOURCES).map(|_| rng.gen_range(0..n)).collect())
    };
    let reversed = g.reversed();
    let mut worst: Option<(usize, usize, Dist)> = None;
    let mut pairs = 0u64;
    for &u in &sources {
        let out = Dijkstra.distances(g, &Source::Vertex(u));
        let inn = Dijkstra.distances(&reversed, &Source::Vertex(u));
        for v in (0..n).filter(|&v| v != u && scc.same(u, v)) {
            for (a, b, x) in [(u, v, out.0[v]), (v, u, inn.0[v])] {
                pairs += 1;
                if worst.is_none_or(|(_, _, w)| x > w) {
                    worst = Some((a, b, x));
                }
            }
        }
    }
    let ok = worst.is_none_or(|(_, _, x)| x <= Dist::finite(d));
    json!({
        "verdict": if ok { "ok" } else { "violated" },
        "method": method,
        "sources": sources.len(),
        "pairs_checked": pairs,
        "max_distance": worst.map(|(_, _, x)| x),
        "max_pair": worst.map(|(a, b, _)| [a + 1, b + 1]),
    })
}

pub fn ldd(g: &DirectedGraph, diameter: i64, c: u32, common: &Common) -> Result<Outcome, CliError> {
    if let Some(e) = g.negative_edges().next() {
        return Err(CliError::Usage(format!(
            "ldd needs non-negative weights; arc {} has weight {}",
            e + 1,
            g.weight(e)
        )));
    }
    let params = LddParams { d: diameter as Weight, c, n_global: g.n() };
    let mut meter = meter(common);
    let removed = low_diameter_decomposition(g, &params, &mut seeded(common.seed), &mut meter)?;
    let verification = verify_weak_diameter(g, &removed, params.d, common.seed);
    let ok = verification["verdict"] == "ok";
    if common.format == Format::Tsv {
        let stdout = removed.iter().map(|e| format!("{}\n", e + 1)).collect();
        return Ok(Outcome { stdout, code: if ok { 0 } else { 3 } });
    }
    let value = json!({
        "command": "ldd",
        "removed": removed.iter().map(|e| e + 1).collect::<Vec<_>>(),
        "removed_count": removed.len(),
        "m": g.m(),
        "verification": verification,
        "stats": meter.stats,
        "seed": common.seed,
        "params": { "d": params.d, "c": params.c, "n": g.n(), "weight_bound": bound_json(common) },
    });
    Ok(Outcome { stdout: render(&value), code: if ok { 0 } else { 3 } })
}

/// Partition equality and label order against the classical algorithm.
fn scc_check(g: &DirectedGraph, labels: &negsp::scc::SccLabelling) -> (bool, bool) {
    let reference = classical_scc(g);
    let n = g.n();
    let same = (0..n).all(|u| (0..n).all(|v| labels.same(u, v) == reference.same(u, v)));
    (same, labels.order_violation(g).is_none())
}

pub fn scc(g: &DirectedGraph, common: &Common) -> Result<Outcome, CliError> {
    let mut meter = meter(common);
    let labels = scc_topsort(g, &mut seeded(common.seed), &mut meter)?;
    let (partition, order) = scc_check(g, &labels);
    let code = if partition && order { 0 } else { 3 };
    if common.format == Format::Tsv {
        let stdout = labels.r.iter().enumerate().map(|(v, r)| format!("{}\t{r}\n", v + 1)).collect();
        return Ok(Outcome { stdout, code });
    }
    let value = json!({
        "command": "scc",
        "labels": labels.r.iter().enumerate().map(|(v, &r)| json!([v + 1, r])).collect::<Vec<_>>(),
        "components": labels.component_count(),
        "condensation_edges": labels.condensation_edges(g),
        "check": { "partition_matches": partition, "topological_order": order },
        "stats": meter.stats,
        "seed": common.seed,
        "params": { "n": g.n(), "weight_bound": bound_json(common) },
    });
    Ok(Outcome { stdout: render(&value), code })
}

struct Battery {
    checks: Vec<Value>,
    failed: usize,
}

impl Battery {
    fn record(&mut self, name: &str, ok: bool, detail: Value) {
        self.failed += !ok as usize;
        self.checks.push(json!({ "name": name, "ok": ok, "detail": detail }));
    }
}

pub fn check(
    g: &DirectedGraph,
    source: usize,
    max_restarts: usize,
    cfg: &SolverConfig,
    common: &Common,
) -> Result<Outcome, CliError> {
    let s = source_index(g, source)?;
    let seed = common.seed;
    let cyclic = has_negative_cycle(g);
    let mut b = Battery { checks: Vec::new(), failed: 0 };

    let mut m = meter(common);
    if cyclic {
        let r = sp_main(g, s, cfg, seed, &mut m)?;
        b.record("sssp", r.is_error(), json!({ "expected": "error", "error": r.is_error(), "calls": r.stats.calls }));
    } else {
        let r = sp_main_with_retry(g, s, cfg, seed, &mut m)?;
        let ok = r.distances.as_ref().is_some_and(|d| agrees_with_reference(g, s, d));
        b.record("sssp", ok, json!({ "expected": "distances", "retries": r.retries, "calls": r.stats.calls }));
    }

    let mut m = meter(common);
    let r = negsp::solve(g, s, cfg, max_restarts, seed, &mut m)?;
    let (ok, answer) = match &r.answer {
        Answer::Distances(d) => (!cyclic && agrees_with_reference(g, s, d), "distances"),
        Answer::Cycle(c) => (cyclic && c.is_valid_for(g), "cycle"),
    };
    b.record("solve", ok, json!({ "answer": answer, "negative_cycle": cyclic, "restarts": r.restarts }));

    let mut m = meter(common);
    let labels = scc_topsort(g, &mut seeded(seed), &mut m)?;
    let (partition, order) = scc_check(g, &labels);
    b.record(
        "scc",
        partition && order,
        json!({ "partition_matches": partition, "topological_order": order, "components": labels.component_count() }),
    );

    let clamped = g.clamp_nonneg();
    let d = (clamped.max_abs_weight() * 4).max(1);
    let mut m = meter(common);
    let removed = low_diameter_decomposition(&clamped, &LddParams::new(d, g.n()), &mut seeded(seed), &mut m)?;
    let v = verify_weak_diameter(&clamped, &removed, d, seed);
    b.record("ldd", v["verdict"] == "ok", json!({ "d": d, "removed": removed.len(), "verification": v }));

    let value = json!({
        "command": "check",
        "ok": b.failed == 0,
        "checks": b.checks,
        "seed": seed,
        "params": { "solver": params_json(g, cfg, common), "max_restarts": max_restarts, "source": source },
    });
    Ok(Outcome { stdout: render(&value), code: if b.failed == 0 { 0 } else { 3 } })
}

pub fn gen(args: &GenArgs, common: &Common) -> Result<Outcome, CliError> {
    let p = match (args.p, args.degree) {
        (Some(p), _) => p,
        (None, degree) => {
            let degree = degree.unwrap_or(3.0);
            if degree < 0.0 {
                return Err(CliError::Usage(format!("negative degree {degree}")));
            }
            if args.n < 2 {
                0.0
            } else {
                (degree / (args.n - 1) as f64).min(1.0)
            }
        }
    };
    let params = ErParams { n: args.n, p, min_weight: args.min_weight, max_weight: args.max_weight };
    let mut rng = seeded(common.seed);
    let mut text = format!(
        "c negsp gen n={} p={} weights=[{},{}] seed={}\n",
        args.n, p, args.min_weight, args.max_weight, common.seed
    );
    let mut planted = None;
    let g = if args.plant_negative_cycle {
        let pl = gen::with_planted_cycle(&params, &mut rng)?;
        let mut walk: Vec<usize> = pl.cycle.iter().map(|v| v + 1).collect();
        walk.push(walk[0]);
        let ids: Vec<String> = walk.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(text, "c planted cycle {} weight {}", ids.join(" "), pl.cycle_weight);
        planted = Some(json!({ "cycle": walk, "weight": pl.cycle_weight }));
        pl.graph
    } else if args.no_negative_cycle {
        gen::without_negative_cycle(&params, &mut rng)?
    } else {
        gen::erdos_renyi(&params, &mut rng)?
    };
    text.push_str(&negsp::dimacs::write(&g));
    match &args.output {
        None => Ok(Outcome::ok(text)),
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let value = json!({
                "command": "gen",
                "output": path.display().to_string(),
                "n": g.n(),
                "m": g.m(),
                "planted": planted,
                "seed": common.seed,
                "params": params,
            });
            Ok(Outcome::ok(render(&value)))
        }
    }
}
