//! The shortest path subgraph of a source: the union of all shortest paths
//! leaving it. An arc `(u, v)` belongs to it exactly when
//! `d(u) + w(u, v) = d(v)`, so any path inside it from `x` to `y` weighs
//! `d(y) - d(x)` and is itself shortest in the original graph.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    bellman_ford, bfs_hops, co_reachable, dijkstra, tarjan_scc, Distances, Edge, Graph, VertexId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpsError {
    #[error("terminal {0} is not reachable from the source")]
    TerminalUnreachable(VertexId),
    #[error("vertex {0} is not reachable from the source")]
    UnreachableTarget(VertexId),
    #[error("vertex {vertex} is outside [0, {vertex_count})")]
    InvalidVertex { vertex: VertexId, vertex_count: usize },
}

/// Shortest path subgraph `G~(s)` or its terminal-pruned form `G~(s, X)`.
///
/// The arc set lives in a [`Graph`] over the original vertex ids; vertices
/// that were not retained are simply isolated there. Arcs keep their original
/// weights so the subgraph can be checked against the source graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpSubgraph {
    graph: Graph,
    source: VertexId,
    dist: Distances,
    retained: Vec<bool>,
}

impl SpSubgraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    /// Distances from the source in the original graph.
    pub fn dist(&self) -> &Distances {
        &self.dist
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.retained.get(v).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.retained
            .iter()
            .enumerate()
            .filter_map(|(v, &keep)| keep.then_some(v))
    }

    pub fn vertex_count(&self) -> usize {
        self.retained.iter().filter(|&&k| k).count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// No directed cycle at all.
    pub fn is_acyclic(&self) -> bool {
        tarjan_scc(&self.graph)
            .components
            .iter()
            .all(|c| c.len() == 1)
    }

    /// Arcs lying on a directed cycle. With nonnegative weights these all
    /// have weight zero.
    pub fn cyclic_edges(&self) -> Vec<Edge> {
        let scc = tarjan_scc(&self.graph);
        self.graph
            .edges()
            .iter()
            .copied()
            .filter(|e| scc.component_of[e.tail] == scc.component_of[e.head])
            .collect()
    }

    /// Restricts to the vertices and arcs lying on some path from the source
    /// to a vertex of `terminals` (reverse BFS from the terminals).
    pub fn prune_to_terminals(&self, terminals: &[VertexId]) -> Result<SpSubgraph, SpsError> {
        for &t in terminals {
            if t >= self.retained.len() {
                return Err(SpsError::InvalidVertex {
                    vertex: t,
                    vertex_count: self.retained.len(),
                });
            }
            if !self.retained[t] {
                return Err(SpsError::TerminalUnreachable(t));
            }
        }
        let mut keep = co_reachable(&self.graph, terminals);
        keep[self.source] = true;
        for (k, &r) in keep.iter_mut().zip(&self.retained) {
            *k &= r;
        }
        // A retained tail always lies on a path from the source, so an arc
        // is on a source-terminal path iff its head reaches a terminal.
        let graph = self.graph.filter_edges(|e| keep[e.head] && keep[e.tail]);
        Ok(SpSubgraph {
            graph,
            source: self.source,
            dist: self.dist.clone(),
            retained: keep,
        })
    }

    /// A random walk along subgraph arcs starting at a random retained vertex.
    /// Always contains at least one vertex.
    pub fn sample_path<R: Rng>(&self, rng: &mut R, max_edges: usize) -> Vec<VertexId> {
        let starts: Vec<VertexId> = self.vertices().collect();
        let mut cur = *starts.choose(rng).expect("subgraph contains its source");
        let mut path = vec![cur];
        let len = rng.gen_range(0..=max_edges);
        for _ in 0..len {
            let out = self.graph.out_edges(cur);
            if out.is_empty() {
                break;
            }
            cur = out[rng.gen_range(0..out.len())].head;
            path.push(cur);
        }
        path
    }

    // Hands out the subgraph and original distances without copying.
    pub(crate) fn into_parts(self) -> (Graph, Distances) {
        (self.graph, self.dist)
    }
}

/// Builds `G~(s)`: every vertex reachable from `s` and every arc passing
/// the equality test `d(u) + w(u, v) = d(v)`.
pub fn build_sps(g: &Graph, s: VertexId) -> SpSubgraph {
    let dist = dijkstra(g, s);
    let graph = g
        .filter_edges(|e| match (dist.get(e.tail), dist.get(e.head)) {
            (Some(du), Some(dv)) => du + e.weight == dv,
            _ => false,
        })
        .with_directed_flag(true);
    let retained = dist.as_slice().iter().map(Option::is_some).collect();
    SpSubgraph {
        graph,
        source: s,
        dist,
        retained,
    }
}

/// Over which vertices a radius is taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelevantSet {
    AllReachable,
    Vertices(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShallownessReport {
    /// Max over relevant vertices of the min hop count from the source in `g`.
    pub radius_hops: u64,
    /// Same maximum, measured inside `G~(s)` (only shortest paths count).
    pub sp_radius_hops: u64,
    pub relevant: RelevantSet,
}

pub fn shallowness(
    g: &Graph,
    s: VertexId,
    relevant: &RelevantSet,
) -> Result<ShallownessReport, SpsError> {
    let hops = bfs_hops(g, s);
    let sps = build_sps(g, s);
    let sp_hops = bfs_hops(sps.graph(), s);
    let vertices: Vec<VertexId> = match relevant {
        RelevantSet::AllReachable => hops.reachable().collect(),
        RelevantSet::Vertices(vs) => vs.clone(),
    };
    let mut radius = 0;
    let mut sp_radius = 0;
    for v in vertices {
        if v >= g.vertex_count() {
            return Err(SpsError::InvalidVertex {
                vertex: v,
                vertex_count: g.vertex_count(),
            });
        }
        radius = radius.max(hops.get(v).ok_or(SpsError::UnreachableTarget(v))?);
        sp_radius = sp_radius.max(sp_hops.get(v).ok_or(SpsError::UnreachableTarget(v))?);
    }
    Ok(ShallownessReport {
        radius_hops: radius,
        sp_radius_hops: sp_radius,
        relevant: relevant.clone(),
    })
}

/// A reason `verify_sps` rejected a subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpsWitness {
    /// Recorded distance differs from an independent recomputation.
    DistanceMismatch { vertex: VertexId, recorded: Option<u64>, expected: Option<u64> },
    /// Vertex retained iff reachable does not hold here.
    VertexSet(VertexId),
    /// A qualifying arc of the graph is absent.
    MissingEdge(Edge),
    /// An arc is present that fails the equality test or is not in the graph.
    ExtraEdge(Edge),
    /// A sampled path whose weight is not `d(y) - d(x)`.
    PathWeight { path: Vec<VertexId>, weight: u64, expected: i128 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpsVerification {
    pub checked_edges: usize,
    pub checked_paths: usize,
    pub witnesses: Vec<SpsWitness>,
}

impl SpsVerification {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Checks an unpruned subgraph against `g` with 50 sampled paths.
pub fn verify_sps(g: &Graph, sps: &SpSubgraph) -> SpsVerification {
    verify_sps_with(g, sps, 50, 0x5eed)
}

/// Edge characterization against Bellman-Ford distances, then `paths`
/// random walks inside the subgraph checked for the telescoping weight.
pub fn verify_sps_with(g: &Graph, sps: &SpSubgraph, paths: usize, seed: u64) -> SpsVerification {
    let reference = bellman_ford(g, sps.source);
    let mut witnesses = Vec::new();

    for v in 0..g.vertex_count() {
        if sps.dist.get(v) != reference.get(v) {
            witnesses.push(SpsWitness::DistanceMismatch {
                vertex: v,
                recorded: sps.dist.get(v),
                expected: reference.get(v),
            });
        }
        if sps.contains(v) != reference.is_reachable(v) {
            witnesses.push(SpsWitness::VertexSet(v));
        }
    }

    let qualifies = |e: &Edge| match (reference.get(e.tail), reference.get(e.head)) {
        (Some(du), Some(dv)) => du + e.weight == dv,
        _ => false,
    };
    for e in g.edges() {
        if qualifies(e) && sps.graph.edge_weight(e.tail, e.head) != Some(e.weight) {
            witnesses.push(SpsWitness::MissingEdge(*e));
        }
    }
    for e in sps.graph.edges() {
        if g.edge_weight(e.tail, e.head) != Some(e.weight) || !qualifies(e) {
            witnesses.push(SpsWitness::ExtraEdge(*e));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_edges = g.vertex_count().max(1);
    for _ in 0..paths {
        let path = sps.sample_path(&mut rng, max_edges);
        let weight: u64 = path
            .windows(2)
            .map(|p| sps.graph.edge_weight(p[0], p[1]).unwrap_or(0))
            .sum();
        let (x, y) = (path[0], path[path.len() - 1]);
        let expected = match (reference.get(x), reference.get(y)) {
            (Some(dx), Some(dy)) => dy as i128 - dx as i128,
            _ => -1,
        };
        if weight as i128 != expected {
            witnesses.push(SpsWitness::PathWeight {
                path,
                weight,
                expected,
            });
        }
    }

    SpsVerification {
        checked_edges: g.edge_count() + sps.graph.edge_count(),
        checked_paths: paths,
        witnesses,
    }
}
