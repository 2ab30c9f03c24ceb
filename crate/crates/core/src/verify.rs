//! Reference answers for tests and the CLI's `check` command. None of these
//! use the oracle; they are classical and slow.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Dist, DistanceVector, EdgeId, VertexId, Weight};
use crate::oracle::{check_certificate, Source};

/// A closed walk of negative total weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    /// Vertices along the walk; the first equals the last.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub total_weight: Weight,
}

impl CycleWitness {
    /// Builds a witness from consecutive edge ids of `g`, checking that they
    /// close up and sum to a negative weight.
    pub fn from_edges(g: &DirectedGraph, edges: Vec<EdgeId>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Internal("empty cycle".into()));
        }
        let mut vertices = vec![g.tail(edges[0])];
        for &e in &edges {
            if e >= g.m() || g.tail(e) != *vertices.last().unwrap_or(&usize::MAX) {
                return Err(Error::Internal(format!("edge {e} does not continue the walk")));
            }
            vertices.push(g.head(e));
        }
        if vertices.first() != vertices.last() {
            return Err(Error::Internal("walk is not closed".into()));
        }
        let total_weight = g.path_weight(&edges);
        if total_weight >= 0 {
            return Err(Error::Internal(format!("cycle weight {total_weight} is not negative")));
        }
        Ok(CycleWitness { vertices, edges, total_weight })
    }

    /// Re-checks every invariant against `g` by independent summation.
    pub fn is_valid_for(&self, g: &DirectedGraph) -> bool {
        let closed = !self.edges.is_empty()
            && self.vertices.len() == self.edges.len() + 1
            && self.vertices.first() == self.vertices.last();
        let linked = self.edges.iter().enumerate().all(|(i, &e)| {
            e < g.m() && g.tail(e) == self.vertices[i] && g.head(e) == self.vertices[i + 1]
        });
        let sum: Weight = self.edges.iter().map(|&e| if e < g.m() { g.weight(e) } else { 0 }).sum();
        closed && linked && sum == self.total_weight && sum < 0
    }

    /// Re-expresses the cycle in a parent graph through an edge map.
    pub fn lift(&self, parent: &DirectedGraph, edge_map: &[EdgeId]) -> Result<Self> {
        CycleWitness::from_edges(parent, self.edges.iter().map(|&e| edge_map[e]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Distances(DistanceVector),
    NegativeCycle(CycleWitness),
}

impl Reference {
    pub fn distances(&self) -> Option<&DistanceVector> {
        match self {
            Reference::Distances(d) => Some(d),
            Reference::NegativeCycle(_) => None,
        }
    }

    pub fn has_negative_cycle(&self) -> bool {
        matches!(self, Reference::NegativeCycle(_))
    }
}

/// Bellman-Ford from `source`; reports a negative cycle only if one is
/// reachable from `source`.
pub fn bellman_ford(g: &DirectedGraph, source: VertexId) -> Reference {
    let mut d = vec![Dist::INF; g.n()];
    d[source] = Dist::ZERO;
    bf_from(g, d)
}

/// Bellman-Ford from a dummy source with zero edges to every vertex, so any
/// negative cycle is found. Distances are `min_u dist(u, v)`.
pub fn bellman_ford_all(g: &DirectedGraph) -> Reference {
    bf_from(g, vec![Dist::ZERO; g.n()])
}

pub fn has_negative_cycle(g: &DirectedGraph) -> bool {
    bellman_ford_all(g).has_negative_cycle()
}

fn bf_from(g: &DirectedGraph, mut d: Vec<Dist>) -> Reference {
    let n = g.n();
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for e in 0..g.m() {
            let (u, v) = (g.tail(e), g.head(e));
            let nd = d[u].add(g.weight(e));
            if nd < d[v] {
                d[v] = nd;
                pred[v] = Some(e);
                last = Some(v);
            }
        }
        if last.is_none() {
            break;
        }
    }
    let Some(mut v) = last else {
        return Reference::Distances(DistanceVector(d));
    };
    // n steps back from a vertex relaxed in round n + 1 land on a cycle
    for _ in 0..n {
        v = pred[v].map_or(v, |e| g.tail(e));
    }
    let start = v;
    let mut edges = Vec::new();
    loop {
        let e = pred[v].expect("vertex on a predecessor cycle has a predecessor");
        edges.push(e);
        v = g.tail(e);
        if v == start {
            break;
        }
    }
    edges.reverse();
    let w = CycleWitness::from_edges(g, edges).expect("Bellman-Ford predecessor cycle is negative");
    Reference::NegativeCycle(w)
}

/// Floyd-Warshall; `None` if some vertex lies on a negative cycle.
pub fn all_pairs(g: &DirectedGraph) -> Option<Vec<Vec<Dist>>> {
    let n = g.n();
    let mut d = vec![vec![Dist::INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Dist::ZERO;
    }
    for e in g.edges() {
        let cell = &mut d[e.tail][e.head];
        *cell = (*cell).min(Dist::finite(e.weight));
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = d[k][j].value().map_or(Dist::INF, |x| dik.add(x));
                if cand < d[i][j] {
                    d[i][j] = cand;
                }
            }
        }
    }
    (0..n).all(|v| d[v][v] >= Dist::ZERO).then_some(d)
}

/// For every vertex, the fewest negative edges on a shortest `source -> v`
/// path (`None` if unreachable). Distances are stratified by the number of
/// negative edges used, up to `n`. Returns `None` on a negative cycle
/// reachable from `source`.
pub fn min_negative_edges(g: &DirectedGraph, source: VertexId) -> Option<Vec<Option<usize>>> {
    let dist = match bellman_ford(g, source) {
        Reference::Distances(d) => d,
        Reference::NegativeCycle(_) => return None,
    };
    Some(stratify(g, vec![source], &dist))
}

/// `eta_G(v)`: fewest negative edges on a shortest path from the dummy
/// source of `G_s`. `None` if `g` has a negative cycle.
pub fn eta_profile(g: &DirectedGraph) -> Option<Vec<usize>> {
    let (gs, s) = g.add_dummy_source();
    let eta = min_negative_edges(&gs, s)?;
    Some(eta[..g.n()].iter().map(|x| x.unwrap_or(0)).collect())
}

fn stratify(g: &DirectedGraph, sources: Vec<VertexId>, dist: &DistanceVector) -> Vec<Option<usize>> {
    let n = g.n();
    let mut best = vec![Dist::INF; n];
    for s in sources {
        best[s] = Dist::ZERO;
    }
    let mut eta: Vec<Option<usize>> = vec![None; n];
    for k in 0..=n {
        // close layer k under non-negative edges
        for _ in 0..n {
            let mut changed = false;
            for e in (0..g.m()).filter(|&e| g.weight(e) >= 0) {
                let nd = best[g.tail(e)].add(g.weight(e));
                if nd < best[g.head(e)] {
                    best[g.head(e)] = nd;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for v in 0..n {
            if eta[v].is_none() && best[v].is_finite() && best[v] == dist[v] {
                eta[v] = Some(k);
            }
        }
        if k == n {
            break;
        }
        let prev = best.clone();
        for e in (0..g.m()).filter(|&e| g.weight(e) < 0) {
            let nd = prev[g.tail(e)].add(g.weight(e));
            if nd < best[g.head(e)] {
                best[g.head(e)] = nd;
            }
        }
    }
    eta
}

/// SCCs of `g` and a topological order of its condensation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccPartition {
    /// Component id per vertex; ids follow the topological order, so every
    /// edge between components goes from a smaller id to a larger one.
    pub component: Vec<usize>,
    pub count: usize,
}

impl SccPartition {
    pub fn same(&self, u: VertexId, v: VertexId) -> bool {
        self.component[u] == self.component[v]
    }
}

pub fn classical_scc(g: &DirectedGraph) -> SccPartition {
    let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(g.n(), g.m());
    let nodes: Vec<_> = (0..g.n()).map(|_| pg.add_node(())).collect();
    for e in g.edges() {
        pg.add_edge(nodes[e.tail], nodes[e.head], ());
    }
    // tarjan_scc lists components in reverse topological order
    let comps = tarjan_scc(&pg);
    let count = comps.len();
    let mut component = vec![0; g.n()];
    for (i, comp) in comps.iter().enumerate() {
        for node in comp {
            component[node.index()] = count - 1 - i;
        }
    }
    SccPartition { component, count }
}

/// Checks that `d` are exact distances from `source` in `g` (any weights):
/// `d[source] = 0`, every edge satisfies the triangle inequality, and every
/// finite vertex is reached from `source` along tight edges.
pub fn check_distances(g: &DirectedGraph, source: VertexId, d: &DistanceVector) -> Result<(), String> {
    if d.len() == g.n() && source < g.n() && d[source] != Dist::ZERO {
        return Err(format!("source {source} has distance {}", d[source]));
    }
    check_certificate(g, &Source::Vertex(source), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightBound;
    use crate::oracle::{CallTag, Dijkstra, Meter};
    use crate::rng::seeded;
    use rand::Rng;

    fn dists(xs: &[Option<i128>]) -> DistanceVector {
        DistanceVector(xs.iter().map(|&x| Dist::from(x)).collect())
    }

    #[test]
    fn path_matches_oracle() {
        let g = DirectedGraph::new(4, [(0, 1, 2), (1, 2, 3), (0, 2, 9)]).unwrap();
        let bf = bellman_ford(&g, 0);
        let or = Meter::new(&Dijkstra).query(&g, &Source::Vertex(0), CallTag::SpMain).unwrap();
        assert_eq!(bf, Reference::Distances(or.clone()));
        assert_eq!(or, dists(&[Some(0), Some(2), Some(5), None]));
    }

    #[test]
    fn planted_cycle_has_witness() {
        let g = DirectedGraph::new(4, [(0, 1, 1), (1, 2, -3), (2, 1, 2), (2, 3, 1)]).unwrap();
        match bellman_ford(&g, 0) {
            Reference::NegativeCycle(w) => {
                assert!(w.is_valid_for(&g));
                assert_eq!(w.total_weight, -1);
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
        assert!(!bellman_ford(&g, 3).has_negative_cycle());
        assert!(has_negative_cycle(&g));
    }

    #[test]
    fn random_against_floyd() {
        let mut rng = seeded(1);
        for _ in 0..40 {
            let n = rng.gen_range(1..30);
            let edges: Vec<_> = (0..3 * n).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(-3..20))).collect();
            let g = DirectedGraph::with_bound(n, edges, WeightBound::Unbounded).unwrap();
            let fw = all_pairs(&g);
            match (bellman_ford_all(&g), &fw) {
                (Reference::Distances(_), Some(ap)) => {
                    let Reference::Distances(d) = bellman_ford(&g, 0) else { panic!() };
                    assert_eq!(d.0, ap[0]);
                    assert!(check_distances(&g, 0, &d).is_ok());
                }
                (Reference::NegativeCycle(w), None) => assert!(w.is_valid_for(&g)),
                (r, _) => panic!("Bellman-Ford and Floyd-Warshall disagree: {r:?}"),
            }
        }
    }

    #[test]
    fn eta_examples() {
        let g = DirectedGraph::new(3, [(0, 1, 4), (1, 2, 1)]).unwrap();
        assert_eq!(eta_profile(&g), Some(vec![0, 0, 0]));
        let chain = DirectedGraph::new(4, [(0, 1, -1), (1, 2, -1), (2, 3, -1)]).unwrap();
        assert_eq!(eta_profile(&chain), Some(vec![0, 1, 2, 3]));
        let cyc = DirectedGraph::new(2, [(0, 1, -1), (1, 0, -1)]).unwrap();
        assert_eq!(eta_profile(&cyc), None);
    }

    #[test]
    fn eta_prefers_fewer_negative_edges_on_ties() {
        // 0 -> 2 directly (-2) ties with 0 -> 1 -> 2 (-1, -1)
        let g = DirectedGraph::new(3, [(0, 1, -1), (1, 2, -1), (0, 2, -2)]).unwrap();
        assert_eq!(min_negative_edges(&g, 0), Some(vec![Some(0), Some(1), Some(1)]));
    }

    #[test]
    fn scc_examples() {
        let dag = DirectedGraph::new(3, [(0, 1, 0), (1, 2, 0)]).unwrap();
        let p = classical_scc(&dag);
        assert_eq!(p.count, 3);
        assert!(p.component[0] < p.component[1] && p.component[1] < p.component[2]);
        let cyc = DirectedGraph::new(3, [(0, 1, 0), (1, 2, 0), (2, 0, 0)]).unwrap();
        assert_eq!(classical_scc(&cyc).count, 1);
    }

    #[test]
    fn certificate_rejects_wrong_distances() {
        let g = DirectedGraph::new(3, [(0, 1, -2), (1, 2, 1)]).unwrap();
        assert!(check_distances(&g, 0, &dists(&[Some(0), Some(-2), Some(-1)])).is_ok());
        assert!(check_distances(&g, 0, &dists(&[Some(0), Some(-2), Some(-2)])).is_err());
        assert!(check_distances(&g, 0, &dists(&[Some(0), Some(-2), None])).is_err());
    }
}
