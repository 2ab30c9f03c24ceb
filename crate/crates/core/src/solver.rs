//! The recursive scaling procedure [`scale_down`] and the driver [`sp_main`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Dist, DistanceVector, EdgeId, PriceFunction, VertexId, Weight};
use crate::ldd::{low_diameter_decomposition, LddParams, DEFAULT_C};
use crate::oracle::{Algo, CallTag, Meter, OracleStats, Source};
use crate::potentials::{est_dist_with, fix_dag_edges, fix_dag_potential, EstDistOptions, EstDistOutcome};
use crate::rng::{derive_seed, derived, seeded};
use crate::scc::{ceil_log2, scc_topsort, SccLabelling};
use crate::verify::CycleWitness;

/// SCC+Topsort reruns per iteration before the failure is propagated.
const SCC_ATTEMPTS: usize = 8;

/// Tunable constants. Unset fields follow the global vertex count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k: Option<usize>,
    pub iters: Option<usize>,
    pub h3: Option<usize>,
    pub c_h: usize,
    pub ldd_c: u32,
    /// Skip work whose result is already determined (fixed points, verified
    /// cycles). Outputs are unchanged; only call counts drop.
    pub shortcuts: bool,
    /// Worker threads for the top-level iterations. Results do not depend on it.
    pub threads: usize,
    pub max_retries: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: None,
            iters: None,
            h3: None,
            c_h: 3,
            ldd_c: DEFAULT_C,
            shortcuts: true,
            threads: 1,
            max_retries: 20,
        }
    }
}

/// The constants actually used for a graph on `n_global` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effective {
    pub n_global: usize,
    pub k: usize,
    pub iters: usize,
    pub h3: usize,
    pub ldd_c: u32,
}

impl SolverConfig {
    pub fn effective(&self, n_global: usize) -> Effective {
        let lg = ceil_log2(n_global).max(1);
        let k = self.k.unwrap_or_else(|| default_k(n_global));
        Effective {
            n_global,
            k,
            iters: self.iters.unwrap_or(10 * lg),
            h3: self.h3.unwrap_or(self.c_h * lg * lg * k),
            ldd_c: self.ldd_c,
        }
    }

    pub fn scale_down_params(&self, n_global: usize, delta: usize, b: Weight) -> ScaleDownParams {
        let e = self.effective(n_global);
        ScaleDownParams {
            delta,
            b,
            k: e.k,
            iters: e.iters,
            h3: e.h3,
            n_global,
            ldd_c: e.ldd_c,
            shortcuts: self.shortcuts,
            threads: self.threads.max(1),
        }
    }
}

/// `max(2, 2^ceil(sqrt(ceil(log2 n))))`.
pub fn default_k(n: usize) -> usize {
    let lg = ceil_log2(n) as f64;
    (1usize << (lg.sqrt().ceil() as u32)).max(2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleDownParams {
    pub delta: usize,
    pub b: Weight,
    pub k: usize,
    pub iters: usize,
    pub h3: usize,
    pub n_global: usize,
    pub ldd_c: u32,
    pub shortcuts: bool,
    pub threads: usize,
}

impl ScaleDownParams {
    fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Contract(m));
        if self.delta == 0 {
            return bad("delta must be positive".into());
        }
        if self.b < 0 {
            return bad(format!("B = {} is negative", self.b));
        }
        if self.k < 2 || self.iters == 0 || self.h3 == 0 {
            return bad(format!("need k >= 2, iters >= 1, h3 >= 1 (got {}, {}, {})", self.k, self.iters, self.h3));
        }
        if self.n_global < n {
            return bad(format!("global n {} below graph size {n}", self.n_global));
        }
        Ok(())
    }

    fn est_opts(&self) -> EstDistOptions {
        if self.shortcuts {
            EstDistOptions::default()
        } else {
            EstDistOptions::EXACT
        }
    }
}

/// Largest depth [`scale_down`] can reach: `ceil(log_k n) + 1`.
pub fn depth_bound(n: usize, k: usize) -> usize {
    let mut levels = 0;
    let mut reach = 1usize;
    while reach < n {
        reach = reach.saturating_mul(k);
        levels += 1;
    }
    levels + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaleDownOutcome {
    Potential(PriceFunction),
    /// A cycle that is negative in the input graph.
    NegativeCycle(CycleWitness),
}

/// Price function `phi` with `w_phi(e) >= -B` on every edge, with high
/// probability, when `g` has no negative cycle and `eta(G^B) <= delta`.
/// Requires `w(e) >= -2B`.
pub fn scale_down<R: Rng + ?Sized>(
    g: &DirectedGraph,
    params: &ScaleDownParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
) -> Result<ScaleDownOutcome> {
    params.validate(g.n())?;
    if let Some(e) = (0..g.m()).find(|&e| g.weight(e) < -2 * params.b) {
        return Err(Error::Contract(format!(
            "edge {e} has weight {} below -2B = {}",
            g.weight(e),
            -2 * params.b
        )));
    }
    scale_down_at(g, params, rng, meter, 1)
}

fn scale_down_at<R: Rng + ?Sized>(
    g: &DirectedGraph,
    params: &ScaleDownParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
    depth: usize,
) -> Result<ScaleDownOutcome> {
    meter.stats.record_depth(Algo::ScaleDown, depth);
    let n = g.n();
    let gb = g.raise_negative(params.b);
    if n == 0 {
        return Ok(ScaleDownOutcome::Potential(PriceFunction::zero(0)));
    }
    if params.delta <= params.k {
        let (gbs, s) = gb.add_dummy_source();
        return Ok(match est_dist_with(&gbs, s, params.k, params.est_opts(), meter)? {
            EstDistOutcome::Estimate(r) => {
                ScaleDownOutcome::Potential(PriceFunction(r.dtilde.0[..n].iter().map(|d| d.expect_finite()).collect()))
            }
            EstDistOutcome::NegativeCycle(c) => ScaleDownOutcome::NegativeCycle(CycleWitness::from_edges(g, c.edges)?),
        });
    }

    let base: u64 = rng.gen();
    let threads = if depth == 1 { params.threads } else { 1 };
    let mut phi: Option<Vec<Weight>> = None;
    let mut next = 0;
    while next < params.iters {
        let chunk: Vec<usize> = (next..params.iters.min(next + threads)).collect();
        next += chunk.len();
        let results = run_chunk(g, &gb, params, base, depth, &chunk, meter)?;
        for (child, outcome) in results {
            meter.join(child);
            let est = match outcome? {
                Iteration::Estimate(est) => est,
                Iteration::Cycle(c) => return Ok(ScaleDownOutcome::NegativeCycle(c)),
            };
            let cur = phi.get_or_insert_with(|| est.clone());
            for (p, x) in cur.iter_mut().zip(est) {
                *p = (*p).min(x);
            }
            if params.shortcuts && is_exact(&gb, cur) {
                return Ok(ScaleDownOutcome::Potential(PriceFunction(cur.clone())));
            }
        }
    }
    Ok(ScaleDownOutcome::Potential(PriceFunction(phi.expect("iters >= 1"))))
}

/// An upper bound on `dist_{G^B_s}(s, .)` that is also a feasible potential
/// with `phi(s) = 0` equals the distance, and no later estimate can lower it.
fn is_exact(gb: &DirectedGraph, phi: &[Weight]) -> bool {
    phi.iter().all(|&p| p <= 0) && (0..gb.m()).all(|e| gb.weight(e) + phi[gb.tail(e)] - phi[gb.head(e)] >= 0)
}

enum Iteration {
    Estimate(Vec<Weight>),
    Cycle(CycleWitness),
}

type ChunkResult<'o> = Vec<(Meter<'o>, Result<Iteration>)>;

fn run_chunk<'o>(
    g: &DirectedGraph,
    gb: &DirectedGraph,
    params: &ScaleDownParams,
    base: u64,
    depth: usize,
    chunk: &[usize],
    meter: &Meter<'o>,
) -> Result<ChunkResult<'o>> {
    let one = |i: usize| {
        let mut child = meter.fork();
        let mut rng = derived(base, i as u64);
        let r = iteration(g, gb, params, &mut rng, &mut child, depth);
        (child, r)
    };
    if chunk.len() == 1 {
        return Ok(vec![one(chunk[0])]);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunk.iter().map(|&i| scope.spawn(move || one(i))).collect();
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| Error::Internal("iteration worker panicked".into())))
            .collect()
    })
}

fn iteration<R: Rng + ?Sized>(
    g: &DirectedGraph,
    gb: &DirectedGraph,
    params: &ScaleDownParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
    depth: usize,
) -> Result<Iteration> {
    let n = g.n();
    let delta_next = params.delta / params.k;

    // phase 0
    let ldd_params = LddParams { c: params.ldd_c, ..LddParams::new(delta_next as Weight * params.b, params.n_global) };
    let rem = if params.b == 0 {
        crate::graph::EdgeSet::new(g.m())
    } else {
        low_diameter_decomposition(&gb.clamp_nonneg(), &ldd_params, rng, meter)?
    };
    let (kept, _) = g.filter_edges(|e| !rem.contains(e));
    let labels = scc_with_retries(&kept, rng, meter)?;

    // phase 1
    let (h, h_map) = g.filter_edges(|e| labels.same(g.tail(e), g.head(e)));
    let child = ScaleDownParams { delta: delta_next, ..params.clone() };
    let phi1 = match scale_down_at(&h, &child, rng, meter, depth + 1)? {
        ScaleDownOutcome::Potential(p) => p,
        ScaleDownOutcome::NegativeCycle(c) => return Ok(Iteration::Cycle(c.lift(g, &h_map)?)),
    };

    // phase 2
    let (dag, _) = gb.reweight(&phi1)?.filter_edges(|e| !rem.contains(e));
    let psi2 = match fix_dag_edges(&dag, &labels) {
        Ok(p) => p,
        Err(Error::PreconditionViolated { .. }) => {
            meter.stats.fixdag_violations += 1;
            fix_dag_potential(&dag, &labels)
        }
        Err(e) => return Err(e),
    };
    let phi2 = phi1.compose(&psi2);

    // phase 3
    let (gbs, s) = gb.add_dummy_source();
    let shifted = gbs.reweight(&phi2.extended(0))?;
    match est_dist_with(&shifted, s, params.h3, params.est_opts(), meter)? {
        EstDistOutcome::Estimate(r) => {
            Ok(Iteration::Estimate((0..n).map(|v| r.dtilde[v].expect_finite() + phi2[v]).collect()))
        }
        EstDistOutcome::NegativeCycle(c) => Ok(Iteration::Cycle(CycleWitness::from_edges(g, c.edges)?)),
    }
}

fn scc_with_retries<R: Rng + ?Sized>(g: &DirectedGraph, rng: &mut R, meter: &mut Meter<'_>) -> Result<SccLabelling> {
    let mut attempt = 0;
    loop {
        match scc_topsort(g, rng, meter) {
            Err(Error::RecursionDepthExceeded { .. }) if attempt + 1 < SCC_ATTEMPTS => {
                attempt += 1;
                meter.stats.scc_retries += 1;
            }
            r => return r,
        }
    }
}

/// Why a run ended in ERROR.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCause {
    /// A cycle negative in the input graph was found along the way.
    NegativeCycle(CycleWitness),
    /// After round `round`, edge `edge` had scaled reweighted weight below
    /// `-B/2^round`.
    RoundFloor { round: u32, edge: EdgeId, weight: Weight, floor: Weight },
    /// The final graph had a negative edge.
    FinalNegativeEdge { edge: EdgeId, weight: Weight },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpMainReport {
    /// `None` means ERROR.
    pub distances: Option<DistanceVector>,
    pub cause: Option<ErrorCause>,
    /// Final potential on the `2n`-scaled graph.
    pub phi_final: PriceFunction,
    pub stats: OracleStats,
    pub retries: usize,
    pub seed: u64,
    pub params: Effective,
}

impl SpMainReport {
    pub fn is_error(&self) -> bool {
        self.distances.is_none()
    }

    pub fn witness(&self) -> Option<&CycleWitness> {
        match &self.cause {
            Some(ErrorCause::NegativeCycle(c)) => Some(c),
            _ => None,
        }
    }
}

/// Single run: exact distances from `source` with high probability, ERROR
/// whenever `g` has a negative cycle. Never retries.
pub fn sp_main(g: &DirectedGraph, source: VertexId, cfg: &SolverConfig, seed: u64, meter: &mut Meter<'_>) -> Result<SpMainReport> {
    crate::graph::check_overflow_guard(g.n(), g.max_abs_weight())?;
    sp_main_tagged(g, source, cfg, seed, meter, CallTag::SpMain)
}

/// [`sp_main`] without the input guard, metering the final query under `tag`.
pub(crate) fn sp_main_tagged(
    g: &DirectedGraph,
    source: VertexId,
    cfg: &SolverConfig,
    seed: u64,
    meter: &mut Meter<'_>,
    tag: CallTag,
) -> Result<SpMainReport> {
    let n = g.n();
    if source >= n {
        return Err(Error::Contract(format!("source {source} outside [0, {n})")));
    }
    let mut run = meter.fork();
    let (distances, cause, phi_final) = run_sp_main(g, source, cfg, &mut seeded(seed), &mut run, tag)?;
    let stats = run.stats.clone();
    meter.join(run);
    Ok(SpMainReport { distances, cause, phi_final, stats, retries: 0, seed, params: cfg.effective(n) })
}

type SpOutcome = (Option<DistanceVector>, Option<ErrorCause>, PriceFunction);

fn run_sp_main<R: Rng + ?Sized>(
    g: &DirectedGraph,
    source: VertexId,
    cfg: &SolverConfig,
    rng: &mut R,
    meter: &mut Meter<'_>,
    tag: CallTag,
) -> Result<SpOutcome> {
    let n = g.n();
    let scale = 2 * n as Weight;
    let wbar = g.map_weights(|_, w| w * scale);
    let min = wbar.min_weight().unwrap_or(0);
    if min >= 0 {
        let d = meter.query(g, &Source::Vertex(source), tag)?;
        return Ok((Some(d), None, PriceFunction::zero(n)));
    }
    let b = (-min as u128).next_power_of_two() as Weight;
    let t = b.trailing_zeros();
    let mut phi = PriceFunction::zero(n);
    for i in 1..=t {
        let bi = b >> i;
        let params = cfg.scale_down_params(n, n, bi);
        let current = wbar.reweight(&phi)?;
        let psi = match scale_down(&current, &params, rng, meter)? {
            ScaleDownOutcome::Potential(p) => p,
            ScaleDownOutcome::NegativeCycle(c) => {
                let c = CycleWitness::from_edges(g, c.edges)?;
                return Ok((None, Some(ErrorCause::NegativeCycle(c)), phi));
            }
        };
        phi = phi.compose(&psi);
        if let Err(w) = crate::potentials::certify_nonneg(&wbar, &phi, -bi) {
            let cause = ErrorCause::RoundFloor { round: i, edge: w.edge, weight: w.weight, floor: -bi };
            return Ok((None, Some(cause), phi));
        }
    }
    let star = wbar.reweight(&phi)?.map_weights(|_, w| w + 1);
    if let Some(e) = (0..star.m()).find(|&e| star.weight(e) < 0) {
        let cause = ErrorCause::FinalNegativeEdge { edge: e, weight: star.weight(e) };
        return Ok((None, Some(cause), phi));
    }
    let dstar = meter.query(&star, &Source::Vertex(source), tag)?;
    let d = (0..n)
        .map(|v| match dstar[v].value() {
            Some(x) => Dist::finite((x - phi[source] + phi[v]).div_euclid(scale)),
            None => Dist::INF,
        })
        .collect();
    Ok((Some(DistanceVector(d)), None, phi))
}

/// [`sp_main`] rerun with fresh derived seeds while it reports ERROR, up to
/// `cfg.max_retries` extra runs. Stops early once a verified negative cycle
/// is in hand, since no rerun can succeed then. Stats cover every run.
pub fn sp_main_with_retry(
    g: &DirectedGraph,
    source: VertexId,
    cfg: &SolverConfig,
    seed: u64,
    meter: &mut Meter<'_>,
) -> Result<SpMainReport> {
    let mut total = OracleStats::default();
    let mut attempt = 0;
    loop {
        let run_seed = if attempt == 0 { seed } else { derive_seed(seed, attempt as u64) };
        let mut report = sp_main(g, source, cfg, run_seed, meter)?;
        total.merge(&report.stats);
        let hopeless = report.witness().is_some();
        if !report.is_error() || hopeless || attempt >= cfg.max_retries {
            report.stats = total;
            report.retries = attempt;
            report.seed = seed;
            return Ok(report);
        }
        attempt += 1;
    }
}
