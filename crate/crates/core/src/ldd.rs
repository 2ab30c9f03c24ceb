//! Directed low-diameter decomposition.
//!
//! [`low_diameter_decomposition`] returns a set of edges `E^rem` such that
//! every strongly connected component of `E \ E^rem` has weak diameter at
//! most `d`, while an edge of weight `w` is removed with probability roughly
//! `w log^2 n / d`. Balls are grown with truncated geometric radii from light
//! vertices ([`find_balanced_set`]); heavy vertices are close to everything.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Direction, EdgeSet, VertexSet, Weight};
use crate::oracle::{Algo, CallTag, Meter, Source};

pub const DEFAULT_C: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LddParams {
    /// Target weak diameter.
    pub d: Weight,
    pub c: u32,
    /// Size of the top-level graph; fixed for every recursive call.
    pub n_global: usize,
}

impl LddParams {
    pub fn new(d: Weight, n_global: usize) -> Self {
        LddParams { d, c: DEFAULT_C, n_global }
    }

    fn log_n(&self) -> f64 {
        (self.n_global.max(1) as f64).log2()
    }

    /// `|S| = ceil(c log n)`, at least one sample.
    pub fn sample_count(&self) -> usize {
        ((self.c as f64 * self.log_n()).ceil() as usize).max(1)
    }

    /// Success probability of the radius distribution.
    pub fn radius_p(&self) -> f64 {
        if self.d <= 0 {
            return 1.0;
        }
        (self.c as f64 * self.log_n() / self.d as f64).min(1.0)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.d < 1 || self.c < 1 || self.n_global < n {
            return Err(Error::Contract(format!(
                "ldd parameters d={} c={} n_global={} invalid for a graph on {n} vertices",
                self.d, self.c, self.n_global
            )));
        }
        Ok(())
    }
}

/// Geometric distribution with success probability `p` truncated to `0..=t`.
/// `p = 0` is the uniform limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncGeom {
    p: f64,
    t: u64,
}

impl TruncGeom {
    pub fn new(p: f64, t: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Contract(format!("truncated geometric needs p in [0, 1], got {p}")));
        }
        Ok(TruncGeom { p, t })
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k > self.t {
            return 0.0;
        }
        if self.p == 0.0 {
            return 1.0 / (self.t + 1) as f64;
        }
        let q = 1.0 - self.p;
        q.powi(k as i32) * self.p / (1.0 - q.powi(self.t as i32 + 1))
    }

    pub fn mean(&self) -> f64 {
        (0..=self.t).map(|k| k as f64 * self.pmf(k)).sum()
    }

    /// Inverse-CDF draw: `F(k) = (1 - q^(k+1)) / (1 - q^(t+1))`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.p >= 1.0 || self.t == 0 {
            return 0;
        }
        let u: f64 = rng.gen();
        if self.p == 0.0 {
            return ((u * (self.t + 1) as f64) as u64).min(self.t);
        }
        let ln_q = (-self.p).ln_1p();
        let z = -((self.t + 1) as f64 * ln_q).exp_m1();
        let x = (-u * z).ln_1p() / ln_q;
        if x.is_finite() && x >= 0.0 {
            (x.floor() as u64).min(self.t)
        } else {
            0
        }
    }
}

/// Phase-1 marking; the three sets partition `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    pub in_light: VertexSet,
    pub out_light: VertexSet,
    pub heavy: VertexSet,
    /// Sampled vertices, with multiplicity.
    pub sample: Vec<usize>,
}

/// Samples `S` and marks every vertex by how many sampled vertices lie in
/// its in- and out-ball of radius `d/4`.
pub fn mark_vertices<R: Rng + ?Sized>(
    g: &DirectedGraph,
    params: &LddParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
) -> Result<Marking> {
    params.validate(g.n())?;
    let n = g.n();
    let mut marking = Marking {
        in_light: VertexSet::new(n),
        out_light: VertexSet::new(n),
        heavy: VertexSet::new(n),
        sample: Vec::new(),
    };
    if n == 0 {
        return Ok(marking);
    }
    let size = params.sample_count();
    let sample: Vec<usize> = (0..size).map(|_| rng.gen_range(0..n)).collect();
    let mut mult = vec![0usize; n];
    for &s in &sample {
        mult[s] += 1;
    }
    let rev = g.reversed();
    let mut cnt_in = vec![0usize; n];
    let mut cnt_out = vec![0usize; n];
    for s in (0..n).filter(|&s| mult[s] > 0) {
        // s is in Ball^in(v, d/4) iff dist(s, v) <= d/4
        let from = meter.query(g, &Source::Vertex(s), CallTag::Ldd)?;
        let to = meter.query(&rev, &Source::Vertex(s), CallTag::Ldd)?;
        for v in 0..n {
            if within(from[v].value(), params.d, 4) {
                cnt_in[v] += mult[s];
            }
            if within(to[v].value(), params.d, 4) {
                cnt_out[v] += mult[s];
            }
        }
    }
    for v in 0..n {
        if 10 * cnt_in[v] <= 6 * size {
            marking.in_light.insert(v);
        } else if 10 * cnt_out[v] <= 6 * size {
            marking.out_light.insert(v);
        } else {
            marking.heavy.insert(v);
        }
    }
    marking.sample = sample;
    Ok(marking)
}

/// `dist <= d / div` without rounding `d / div`.
fn within(dist: Option<Weight>, d: Weight, div: Weight) -> bool {
    dist.is_some_and(|x| x * div <= d)
}

/// Union of balls `Ball^*(v_j, d_j)` around a prefix of `vprime`, with the
/// prefix chosen as the first one covering more than a tenth of `V`.
pub fn find_balanced_set<R: Rng + ?Sized>(
    g: &DirectedGraph,
    vprime: &VertexSet,
    params: &LddParams,
    direction: Direction,
    rng: &mut R,
    meter: &mut Meter<'_>,
) -> Result<VertexSet> {
    params.validate(g.n())?;
    let n = g.n();
    let centers: Vec<usize> = vprime.iter().collect();
    if centers.is_empty() {
        return Ok(VertexSet::new(n));
    }
    let dist = TruncGeom::new(params.radius_p(), (params.d / 4) as u64)?;
    let radii: Vec<Weight> = centers.iter().map(|_| dist.sample(rng) as Weight).collect();
    let host = match direction {
        Direction::In => g.reversed(),
        Direction::Out => g.clone(),
    };

    let mut cache: Vec<Option<VertexSet>> = vec![None; centers.len() + 1];
    let mut probe = |i: usize, meter: &mut Meter<'_>| -> Result<usize> {
        if cache[i].is_none() {
            let att = (0..i).map(|j| (centers[j], params.d - radii[j])).collect();
            let d = meter.query(&host, &Source::Super(att), CallTag::Ldd)?;
            cache[i] = Some(d.within(params.d));
        }
        Ok(cache[i].as_ref().map_or(0, |s| s.len()))
    };

    let (mut lo, mut hi) = (1, centers.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if 10 * probe(mid, meter)? > n {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    probe(lo, meter)?;
    let a = cache[lo].take().unwrap_or_else(|| VertexSet::new(n));
    // f(k-1) <= |V|/10, so a k-th ball covering the rest beyond .8|V| is
    // itself larger than .7|V|.
    if 10 * a.len() > 8 * n {
        meter.stats.precondition_warnings += 1;
    }
    Ok(a)
}

/// Returns `E^rem` as ids of `g`'s edges.
pub fn low_diameter_decomposition<R: Rng + ?Sized>(
    g: &DirectedGraph,
    params: &LddParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
) -> Result<EdgeSet> {
    params.validate(g.n())?;
    if let Some(e) = (0..g.m()).find(|&e| g.weight(e) < 0) {
        return Err(Error::NegativeWeightRejected { edge: e, weight: g.weight(e) });
    }
    let rem = ldd(g, params, rng, meter, 1)?;
    meter.stats.record_removed(rem.len());
    Ok(rem)
}

fn ldd<R: Rng + ?Sized>(
    g: &DirectedGraph,
    params: &LddParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
    depth: usize,
) -> Result<EdgeSet> {
    let n = g.n();
    if n == 0 || g.m() == 0 {
        return Ok(EdgeSet::new(g.m()));
    }
    meter.stats.record_depth(Algo::Ldd, depth);

    let marking = mark_vertices(g, params, rng, meter)?;
    let a_in = find_balanced_set(g, &marking.in_light, params, Direction::In, rng, meter)?;
    let a_out = find_balanced_set(g, &marking.out_light, params, Direction::Out, rng, meter)?;

    for (a, dir) in [(&a_in, Direction::In), (&a_out, Direction::Out)] {
        if 10 * a.len() >= n && 10 * a.len() <= 9 * n {
            let mut rem = g.boundary(a, dir);
            let parts = [a.clone(), a.complement()];
            recurse(g, &parts, params, rng, meter, depth, &mut rem)?;
            return Ok(rem);
        }
    }

    let covered = a_in.union(&a_out);
    let rest = covered.complement();
    let all = || EdgeSet::full(g.m());
    let Some(u) = rest.iter().next() else {
        meter.stats.ldd_return_all += 1;
        return Ok(all());
    };
    let out = meter.query(g, &Source::Vertex(u), CallTag::Ldd)?;
    let inn = meter.query(&g.reversed(), &Source::Vertex(u), CallTag::Ldd)?;
    let close = rest.iter().all(|v| within(out[v].value(), params.d, 2) && within(inn[v].value(), params.d, 2));
    if !close || 2 * covered.len() >= n {
        meter.stats.ldd_return_all += 1;
        return Ok(all());
    }

    let mut rem = g.boundary(&a_in, Direction::In).union(&g.boundary(&a_out, Direction::Out));
    let parts = [a_in.clone(), a_out.difference(&a_in)];
    recurse(g, &parts, params, rng, meter, depth, &mut rem)?;
    Ok(rem)
}

/// Decomposes the vertex-disjoint induced subgraphs `parts` as siblings and
/// adds their removed edges to `rem`.
fn recurse<R: Rng + ?Sized>(
    g: &DirectedGraph,
    parts: &[VertexSet],
    params: &LddParams,
    rng: &mut R,
    meter: &mut Meter<'_>,
    depth: usize,
    rem: &mut EdgeSet,
) -> Result<()> {
    let mut children = Vec::with_capacity(parts.len());
    for part in parts {
        let sub = g.induced_subgraph(part);
        let mut child = meter.fork();
        let local = ldd(&sub.graph, params, rng, &mut child, depth + 1)?;
        for e in local.iter() {
            rem.insert(sub.edge_map[e]);
        }
        children.push(child);
    }
    meter.join_parallel(children);
    Ok(())
}

/// Recursion depth bound `ceil(log_{10/9} n) + 1`.
pub fn depth_bound(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    ((n as f64).ln() / (10.0f64 / 9.0).ln()).ceil() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Dijkstra;
    use crate::rng::seeded;
    use proptest::prelude::{any, prop_assert, prop_oneof, proptest, Just, ProptestConfig};

    const INF: i128 = i128::MAX / 4;

    fn floyd(g: &DirectedGraph) -> Vec<Vec<i128>> {
        let n = g.n();
        let mut d = vec![vec![INF; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0;
        }
        for e in g.edges() {
            d[e.tail][e.head] = d[e.tail][e.head].min(e.weight);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] < INF && d[k][j] < INF {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
        }
        d
    }

    /// SCCs of the edges outside `rem`, by mutual reachability.
    fn scc_pairs(g: &DirectedGraph, rem: &EdgeSet) -> Vec<(usize, usize)> {
        let (kept, _) = g.filter_edges(|e| !rem.contains(e));
        let reach = floyd(&kept.zeroed());
        let mut pairs = Vec::new();
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                if reach[u][v] < INF && reach[v][u] < INF {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    fn weak_diameter_ok(g: &DirectedGraph, rem: &EdgeSet, d: Weight) -> bool {
        let dist = floyd(g);
        scc_pairs(g, rem).into_iter().all(|(u, v)| dist[u][v] <= d && dist[v][u] <= d)
    }

    #[test]
    fn trunc_geom_p_one_is_zero() {
        let t = TruncGeom::new(1.0, 10).unwrap();
        let mut rng = seeded(1);
        assert!((0..1000).all(|_| t.sample(&mut rng) == 0));
    }

    #[test]
    fn trunc_geom_half_truncated_at_one() {
        let t = TruncGeom::new(0.5, 1).unwrap();
        assert!((t.pmf(0) - 2.0 / 3.0).abs() < 1e-12);
        let mut rng = seeded(2);
        let zeros = (0..100_000).filter(|_| t.sample(&mut rng) == 0).count();
        assert!((zeros as f64 / 1e5 - 2.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn trunc_geom_mean() {
        let t = TruncGeom::new(0.1, 10).unwrap();
        let direct: f64 = (0..=10u32)
            .map(|k| k as f64 * 0.9f64.powi(k as i32) * 0.1 / (1.0 - 0.9f64.powi(11)))
            .sum();
        assert!((t.mean() - direct).abs() < 1e-12);
        let mut rng = seeded(3);
        let emp = (0..100_000).map(|_| t.sample(&mut rng) as f64).sum::<f64>() / 1e5;
        assert!((emp - direct).abs() / direct < 0.02);
    }

    #[test]
    fn zero_weight_complete_graph_is_all_heavy() {
        let n = 12;
        let edges = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v, 0)));
        let g = DirectedGraph::new(n, edges).unwrap();
        let mut meter = Meter::new(&Dijkstra);
        let m = mark_vertices(&g, &LddParams::new(4, n), &mut seeded(4), &mut meter).unwrap();
        assert_eq!(m.heavy.len(), n);
    }

    #[test]
    fn edgeless_graph_is_all_in_light() {
        let n = 200;
        let g = DirectedGraph::empty(n);
        let params = LddParams::new(8, n);
        assert!(n > params.sample_count());
        let m = mark_vertices(&g, &params, &mut seeded(5), &mut Meter::new(&Dijkstra)).unwrap();
        assert_eq!(m.in_light.len(), n);
    }

    #[test]
    fn balanced_set_of_empty_vprime_is_free() {
        let g = DirectedGraph::new(3, [(0, 1, 1)]).unwrap();
        let mut meter = Meter::new(&Dijkstra);
        let a = find_balanced_set(&g, &VertexSet::new(3), &LddParams::new(8, 3), Direction::Out, &mut seeded(6), &mut meter)
            .unwrap();
        assert!(a.is_empty());
        assert_eq!(meter.stats.calls, 0);
    }

    #[test]
    fn balanced_set_is_a_whole_star_ball() {
        // center 0 reaches 1..=7 with weight 0; 8 and 9 are isolated
        let g = DirectedGraph::new(10, (1..8).map(|v| (0, v, 0))).unwrap();
        let vprime = VertexSet::from_iter(10, [0]);
        let a = find_balanced_set(&g, &vprime, &LddParams::new(8, 10), Direction::Out, &mut seeded(7), &mut Meter::new(&Dijkstra))
            .unwrap();
        assert_eq!(a, VertexSet::from_iter(10, 0..8));
    }

    #[test]
    fn zero_weight_edges_never_cross_a_ball() {
        let mut rng = seeded(8);
        for trial in 0..20 {
            let n = 40;
            let edges: Vec<_> = (0..120).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), 0)).collect();
            let g = DirectedGraph::new(n, edges).unwrap();
            let vprime = VertexSet::from_iter(n, (0..n).filter(|v| v % 3 == trial % 3));
            for dir in [Direction::In, Direction::Out] {
                let a = find_balanced_set(&g, &vprime, &LddParams::new(8, n), dir, &mut rng, &mut Meter::new(&Dijkstra)).unwrap();
                assert!(g.boundary(&a, dir).is_empty());
            }
        }
    }

    #[test]
    fn empty_graph_removes_nothing() {
        let g = DirectedGraph::empty(0);
        let rem = low_diameter_decomposition(&g, &LddParams::new(4, 1), &mut seeded(9), &mut Meter::new(&Dijkstra)).unwrap();
        assert!(rem.is_empty());
    }

    #[test]
    fn zero_cycle_is_kept_whole() {
        let n = 10;
        let g = DirectedGraph::new(n, (0..n).map(|v| (v, (v + 1) % n, 0))).unwrap();
        for seed in 0..30 {
            let rem = low_diameter_decomposition(&g, &LddParams::new(4, n), &mut seeded(seed), &mut Meter::new(&Dijkstra))
                .unwrap();
            assert!(rem.is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn two_cliques_joined_by_heavy_edge() {
        let d = 8;
        let k = 12;
        let mut edges = Vec::new();
        for base in [0, k] {
            for u in 0..k {
                for v in 0..k {
                    if u != v {
                        edges.push((base + u, base + v, 0));
                    }
                }
            }
        }
        edges.push((0, k, 10 * d as i64));
        let g = DirectedGraph::new(2 * k, edges).unwrap();
        for seed in 0..20 {
            let mut meter = Meter::new(&Dijkstra);
            let rem = low_diameter_decomposition(&g, &LddParams::new(d, 2 * k), &mut seeded(seed), &mut meter).unwrap();
            assert!(weak_diameter_ok(&g, &rem, d));
            assert!(meter.stats.depth(Algo::Ldd) as usize <= depth_bound(2 * k));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let mut rng = seeded(10);
        let edges: Vec<_> = (0..80).map(|_| (rng.gen_range(0..25), rng.gen_range(0..25), rng.gen_range(0..10))).collect();
        let g = DirectedGraph::new(25, edges).unwrap();
        let run = || {
            let mut meter = Meter::new(&Dijkstra);
            let r = low_diameter_decomposition(&g, &LddParams::new(8, 25), &mut seeded(11), &mut meter).unwrap();
            (r, meter.stats)
        };
        assert_eq!(run(), run());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn weak_diameter_holds(
            n in 1usize..25,
            raw in proptest::collection::vec((0usize..25, 0usize..25, 0i64..12), 0..70),
            d in prop_oneof![Just(4i128), Just(8i128), 1i128..30],
            seed in any::<u64>(),
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(u, v, w)| (u % n, v % n, w as Weight)).collect();
            let g = DirectedGraph::unbounded(n, edges).unwrap();
            let mut meter = Meter::new(&Dijkstra);
            let rem = low_diameter_decomposition(&g, &LddParams::new(d, n), &mut seeded(seed), &mut meter).unwrap();
            prop_assert!(weak_diameter_ok(&g, &rem, d));
            prop_assert!(meter.stats.depth(Algo::Ldd) as usize <= depth_bound(n));
        }
    }
}
