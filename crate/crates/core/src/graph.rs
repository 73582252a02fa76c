//! Directed graph storage and the classical traversals everything else is
//! built on: Dijkstra, Bellman-Ford, BFS (hops and trees), Tarjan SCC and
//! induced subgraphs.
//!
//! Graphs are normalized on construction: undirected input is expanded into
//! pairs of opposite arcs, self-loops are dropped and parallel arcs collapse
//! to their minimum weight. Adjacency is kept sorted by head id, which makes
//! every traversal below deterministic.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::tree::Arborescence;

pub type VertexId = usize;
pub type Weight = u64;

/// Largest admissible edge weight. Any simple path then has length below
/// 2^40 * 2^23, far inside `u64`.
pub const MAX_WEIGHT: Weight = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({tail}, {head}) references a vertex outside [0, {vertex_count})")]
    VertexOutOfRange {
        tail: VertexId,
        head: VertexId,
        vertex_count: usize,
    },
    #[error("edge ({tail}, {head}) has weight {weight} above the limit 2^40")]
    WeightTooLarge {
        tail: VertexId,
        head: VertexId,
        weight: Weight,
    },
    #[error("vertex {0} is not reachable from the source")]
    UnreachableTarget(VertexId),
    #[error("vertex {vertex} is outside [0, {vertex_count})")]
    InvalidVertex { vertex: VertexId, vertex_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: Weight,
}

impl Edge {
    pub fn new(tail: VertexId, head: VertexId, weight: Weight) -> Self {
        Edge { tail, head, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    directed: bool,
    // Sorted by (tail, head); at most one arc per ordered pair.
    edges: Vec<Edge>,
    out_offsets: Vec<usize>,
    // Indices into `edges`, grouped by head and sorted by tail inside a group.
    in_edges: Vec<usize>,
    in_offsets: Vec<usize>,
}

impl Graph {
    /// Builds a normalized graph. When `directed` is false every input edge
    /// stands for both of its orientations.
    pub fn new<I>(vertex_count: usize, edges: I, directed: bool) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut arcs = Vec::new();
        for e in edges {
            if e.tail >= vertex_count || e.head >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    tail: e.tail,
                    head: e.head,
                    vertex_count,
                });
            }
            if e.weight > MAX_WEIGHT {
                return Err(GraphError::WeightTooLarge {
                    tail: e.tail,
                    head: e.head,
                    weight: e.weight,
                });
            }
            if e.tail == e.head {
                continue;
            }
            arcs.push(e);
            if !directed {
                arcs.push(Edge::new(e.head, e.tail, e.weight));
            }
        }
        Ok(Self::from_arcs(vertex_count, arcs, directed))
    }

    /// Convenience constructor for a directed graph from `(tail, head, weight)` triples.
    pub fn directed(
        vertex_count: usize,
        edges: &[(VertexId, VertexId, Weight)],
    ) -> Result<Self, GraphError> {
        Self::new(
            vertex_count,
            edges.iter().map(|&(u, v, w)| Edge::new(u, v, w)),
            true,
        )
    }

    /// Convenience constructor for an undirected graph from `(u, v, weight)` triples.
    pub fn undirected(
        vertex_count: usize,
        edges: &[(VertexId, VertexId, Weight)],
    ) -> Result<Self, GraphError> {
        Self::new(
            vertex_count,
            edges.iter().map(|&(u, v, w)| Edge::new(u, v, w)),
            false,
        )
    }

    // Arcs must already be range- and weight-checked and loop-free.
    fn from_arcs(vertex_count: usize, mut arcs: Vec<Edge>, directed: bool) -> Self {
        arcs.sort_unstable();
        arcs.dedup_by(|later, earlier| later.tail == earlier.tail && later.head == earlier.head);

        let mut out_offsets = vec![0; vertex_count + 1];
        for e in &arcs {
            out_offsets[e.tail + 1] += 1;
        }
        for v in 0..vertex_count {
            out_offsets[v + 1] += out_offsets[v];
        }

        let mut in_offsets = vec![0; vertex_count + 1];
        for e in &arcs {
            in_offsets[e.head + 1] += 1;
        }
        for v in 0..vertex_count {
            in_offsets[v + 1] += in_offsets[v];
        }
        let mut fill = in_offsets.clone();
        let mut in_edges = vec![0; arcs.len()];
        // Arcs are sorted by tail, so each head group ends up sorted by tail.
        for (i, e) in arcs.iter().enumerate() {
            in_edges[fill[e.head]] = i;
            fill[e.head] += 1;
        }

        Graph {
            vertex_count,
            directed,
            edges: arcs,
            out_offsets,
            in_edges,
            in_offsets,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of stored arcs (an undirected edge counts twice).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Whether the graph was built from undirected input. Storage is always
    /// arcs; the flag is kept for reporting and serialization.
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: VertexId) -> &[Edge] {
        &self.edges[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.in_edges[self.in_offsets[v]..self.in_offsets[v + 1]]
            .iter()
            .map(move |&i| &self.edges[i])
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn edge_weight(&self, tail: VertexId, head: VertexId) -> Option<Weight> {
        if tail >= self.vertex_count {
            return None;
        }
        let out = self.out_edges(tail);
        out.binary_search_by_key(&head, |e| e.head)
            .ok()
            .map(|i| out[i].weight)
    }

    pub fn has_edge(&self, tail: VertexId, head: VertexId) -> bool {
        self.edge_weight(tail, head).is_some()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex {
                vertex: v,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Same vertex set, keeping only the arcs accepted by `keep`.
    pub fn filter_edges<F>(&self, mut keep: F) -> Graph
    where
        F: FnMut(&Edge) -> bool,
    {
        let arcs = self.edges.iter().copied().filter(|e| keep(e)).collect();
        Self::from_arcs(self.vertex_count, arcs, self.directed)
    }

    /// Same arcs with weights rewritten by `f`.
    pub fn map_weights<F>(&self, mut f: F) -> Result<Graph, GraphError>
    where
        F: FnMut(&Edge) -> Weight,
    {
        let arcs = self
            .edges
            .iter()
            .map(|e| Edge::new(e.tail, e.head, f(e)))
            .collect::<Vec<_>>();
        if let Some(e) = arcs.iter().find(|e| e.weight > MAX_WEIGHT) {
            return Err(GraphError::WeightTooLarge {
                tail: e.tail,
                head: e.head,
                weight: e.weight,
            });
        }
        Ok(Self::from_arcs(self.vertex_count, arcs, self.directed))
    }

    pub fn with_directed_flag(&self, directed: bool) -> Graph {
        let mut g = self.clone();
        g.directed = directed;
        g
    }

    /// True when the stored arcs are closed under reversal with equal weights,
    /// i.e. the graph is a faithful expansion of an undirected graph.
    pub fn is_symmetric(&self) -> bool {
        self.edges
            .iter()
            .all(|e| self.edge_weight(e.head, e.tail) == Some(e.weight))
    }
}

/// Per-vertex distance from a source; `None` marks an unreachable vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    dist: Vec<Option<u64>>,
}

impl Distances {
    pub fn from_vec(dist: Vec<Option<u64>>) -> Self {
        Distances { dist }
    }

    pub fn get(&self, v: VertexId) -> Option<u64> {
        self.dist[v]
    }

    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.dist[v].is_some()
    }

    pub fn as_slice(&self) -> &[Option<u64>] {
        &self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn reachable(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.dist
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.map(|_| v))
    }

    /// Largest finite distance among `vertices`; `None` if any of them is unreachable.
    pub fn max_over<I>(&self, vertices: I) -> Option<u64>
    where
        I: IntoIterator<Item = VertexId>,
    {
        let mut best = 0;
        for v in vertices {
            best = best.max(self.dist[v]?);
        }
        Some(best)
    }
}

pub fn dijkstra(g: &Graph, s: VertexId) -> Distances {
    let mut dist: Vec<Option<u64>> = vec![None; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(0);
    heap.push(Reverse((0u64, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        for e in g.out_edges(u) {
            let nd = d + e.weight;
            if dist[e.head].is_none_or(|old| nd < old) {
                dist[e.head] = Some(nd);
                heap.push(Reverse((nd, e.head)));
            }
        }
    }
    Distances { dist }
}

/// Label-correcting shortest paths. Kept as an independent route to the same
/// distances Dijkstra computes, for verification.
pub fn bellman_ford(g: &Graph, s: VertexId) -> Distances {
    let mut dist: Vec<Option<u64>> = vec![None; g.vertex_count()];
    dist[s] = Some(0);
    for _ in 0..g.vertex_count() {
        let mut changed = false;
        for e in g.edges() {
            if let Some(du) = dist[e.tail] {
                let nd = du + e.weight;
                if dist[e.head].is_none_or(|old| nd < old) {
                    dist[e.head] = Some(nd);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Distances { dist }
}

/// Minimum number of arcs from `s` to each vertex, ignoring weights.
pub fn bfs_hops(g: &Graph, s: VertexId) -> Distances {
    let (dist, _) = bfs_with_parents(g, s, |_| true);
    Distances { dist }
}

pub(crate) type BfsParents = (Vec<Option<u64>>, Vec<Option<(VertexId, Weight)>>);

// BFS restricted to vertices accepted by `allowed` (the source is always
// allowed). Returns hop distances and the discovering parent of each vertex.
pub(crate) fn bfs_with_parents<F>(
    g: &Graph,
    s: VertexId,
    allowed: F,
) -> BfsParents
where
    F: Fn(VertexId) -> bool,
{
    let n = g.vertex_count();
    let mut dist = vec![None; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    dist[s] = Some(0);
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for e in g.out_edges(u) {
            if dist[e.head].is_none() && allowed(e.head) {
                dist[e.head] = Some(du + 1);
                parent[e.head] = Some((u, e.weight));
                queue.push_back(e.head);
            }
        }
    }
    (dist, parent)
}

/// Minimum-hop arborescence from `s` spanning `targets`, pruned so every
/// leaf is a target. Neighbours are expanded in ascending id order, so among
/// equal-hop parents the first discovered (lowest-id route) wins.
pub fn bfs_tree(g: &Graph, s: VertexId, targets: &[VertexId]) -> Result<Arborescence, GraphError> {
    bfs_tree_within(g, s, targets, |_| true)
}

pub(crate) fn bfs_tree_within<F>(
    g: &Graph,
    s: VertexId,
    targets: &[VertexId],
    allowed: F,
) -> Result<Arborescence, GraphError>
where
    F: Fn(VertexId) -> bool,
{
    let (dist, parent) = bfs_with_parents(g, s, allowed);
    for &t in targets {
        if dist[t].is_none() {
            return Err(GraphError::UnreachableTarget(t));
        }
    }
    Ok(Arborescence::from_parent_paths(s, targets, |v| parent[v]))
}

/// Forward reachability from `s`.
pub fn reachable_from(g: &Graph, s: VertexId) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(u) = stack.pop() {
        for e in g.out_edges(u) {
            if !seen[e.head] {
                seen[e.head] = true;
                stack.push(e.head);
            }
        }
    }
    seen
}

/// Vertices from which some vertex of `targets` can be reached.
pub fn co_reachable(g: &Graph, targets: &[VertexId]) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &t in targets {
        if !seen[t] {
            seen[t] = true;
            queue.push_back(t);
        }
    }
    while let Some(v) = queue.pop_front() {
        for e in g.in_edges(v) {
            if !seen[e.tail] {
                seen[e.tail] = true;
                queue.push_back(e.tail);
            }
        }
    }
    seen
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    /// Component index of every vertex. Components are numbered in Tarjan
    /// completion order, which is a reverse topological order.
    pub component_of: Vec<usize>,
    /// Members of each component, ascending.
    pub components: Vec<Vec<VertexId>>,
    /// Component indices in topological order of the condensation.
    pub condensation_order: Vec<usize>,
}

impl SccPartition {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Components with no arc entering them from another component.
    pub fn source_components(&self, g: &Graph) -> Vec<bool> {
        let mut is_source = vec![true; self.components.len()];
        for e in g.edges() {
            let (cu, cv) = (self.component_of[e.tail], self.component_of[e.head]);
            if cu != cv {
                is_source[cv] = false;
            }
        }
        is_source
    }
}

pub fn tarjan_scc(g: &Graph) -> SccPartition {
    const UNVISITED: usize = usize::MAX;
    let n = g.vertex_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut call: Vec<(VertexId, usize)> = Vec::new();
    let mut counter = 0;
    let mut component_of = vec![UNVISITED; n];
    let mut components: Vec<Vec<VertexId>> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));

        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            let out = g.out_edges(v);
            if frame.1 < out.len() {
                let w = out[frame.1].head;
                frame.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(p, _)) = call.last() {
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let id = components.len();
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = id;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                components.push(members);
            }
        }
    }

    let condensation_order = (0..components.len()).rev().collect();
    SccPartition {
        component_of,
        components,
        condensation_order,
    }
}

/// Bijection between the kept vertices of a graph and `[0, kept)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMap {
    pub to_old: Vec<VertexId>,
    pub to_new: Vec<Option<VertexId>>,
}

/// Subgraph induced by `keep`, relabelled densely in ascending id order.
pub fn induced_subgraph(g: &Graph, keep: &[VertexId]) -> (Graph, VertexMap) {
    let mut to_old: Vec<VertexId> = keep.to_vec();
    to_old.sort_unstable();
    to_old.dedup();
    let mut to_new = vec![None; g.vertex_count()];
    for (i, &v) in to_old.iter().enumerate() {
        to_new[v] = Some(i);
    }
    let arcs = g
        .edges()
        .iter()
        .filter_map(|e| match (to_new[e.tail], to_new[e.head]) {
            (Some(a), Some(b)) => Some(Edge::new(a, b, e.weight)),
            _ => None,
        })
        .collect();
    let sub = Graph::from_arcs(to_old.len(), arcs, g.is_directed());
    (sub, VertexMap { to_old, to_new })
}
