//! Set-cover based approximation for the minimum non-terminal directed
//! Steiner tree (uniform and vertex-weighted), and the shortest path tree
//! pipelines that run it on the pruned shortest path subgraph.
//!
//! The algorithm:
//!
//! 1. Decompose the terminal-induced subgraph `G[X]` into strongly connected
//!    components and keep the *source components* (no arc enters them from
//!    another component). Every non-terminal `v` with arcs into source
//!    components owns the subset `N(v)` of components it hits directly.
//! 2. Cover the source components greedily with those subsets; the owners of
//!    the chosen subsets are the cover vertices.
//! 3. For each source component pick one arc from a cover vertex into it.
//! 4. Grow a minimum-hop tree (minimum vertex-weight tree in the weighted
//!    variant) from the source to the cover vertices.
//! 5. Attach the step 3 arcs whose terminals are still missing.
//! 6. Spread through `G[X]` from one spanned terminal per source component.
//!
//! Steps 5 and 6 only add terminals, so the non-terminal count is that of the
//! tree built in step 4, at most `R` per cover vertex on an `R`-shallow graph.
//! The cover optimum bounds the tree optimum from below, which yields the
//! `R * H(|S|)` certificate carried in every [`SolutionReport`].
//!
//! The source itself may own a subset (when it has arcs straight into source
//! components); it is given weight zero since it is never counted.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::graph::{bfs_hops, bfs_tree, dijkstra, induced_subgraph, reachable_from, tarjan_scc, GraphError, VertexId, Weight};
use crate::instance::Instance;
use crate::set_cover::{greedy_cover, harmonic, CoverSubset, SetCoverInstance};
use crate::sps::{build_sps, SpsError};
use crate::tree::{Arborescence, StructureDefect};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("terminal {0} is not reachable from the source")]
    TerminalUnreachable(VertexId),
    #[error("the derived set cover instance has no cover")]
    InfeasibleCover,
    #[error("no terminal of the source component {0:?} is spanned by the tree")]
    PreconditionViolated(Vec<VertexId>),
    #[error("the weighted variant needs vertex weights")]
    MissingVertexWeights,
}

impl From<SpsError> for SolveError {
    fn from(e: SpsError) -> Self {
        match e {
            SpsError::TerminalUnreachable(v) | SpsError::UnreachableTarget(v) => {
                SolveError::TerminalUnreachable(v)
            }
            SpsError::InvalidVertex { vertex, .. } => SolveError::TerminalUnreachable(vertex),
        }
    }
}

impl From<GraphError> for SolveError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnreachableTarget(v) => SolveError::TerminalUnreachable(v),
            other => unreachable!("graph error during solve: {other}"),
        }
    }
}

/// Strongly connected components of `G[X]`, which of them are sources, and
/// the non-terminals hitting the sources directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceComponents {
    /// Every component of `G[X]`, members ascending, in original ids.
    pub components: Vec<Vec<VertexId>>,
    /// Source components ordered by smallest member; their positions form the
    /// set cover universe.
    pub sources: Vec<Vec<VertexId>>,
    /// `(v, N(v))` for every vertex reachable from the source that has an arc
    /// into a source component, ascending by `v`. `N(v)` holds positions in
    /// `sources`.
    pub pre_s: Vec<(VertexId, Vec<usize>)>,
    source_of: Vec<Option<usize>>,
}

impl SourceComponents {
    /// Position in `sources` of the component holding terminal `t`.
    pub fn source_index(&self, t: VertexId) -> Option<usize> {
        self.source_of.get(t).copied().flatten()
    }
}

pub fn source_components(inst: &Instance) -> SourceComponents {
    let g = inst.graph();
    let (gx, map) = induced_subgraph(g, inst.terminals());
    let scc = tarjan_scc(&gx);
    let is_source = scc.source_components(&gx);

    let components: Vec<Vec<VertexId>> = scc
        .condensation_order
        .iter()
        .map(|&c| scc.components[c].iter().map(|&v| map.to_old[v]).collect())
        .collect();
    let mut sources: Vec<Vec<VertexId>> = (0..scc.component_count())
        .filter(|&c| is_source[c])
        .map(|c| scc.components[c].iter().map(|&v| map.to_old[v]).collect())
        .collect();
    sources.sort();

    let mut source_of = vec![None; g.vertex_count()];
    for (i, comp) in sources.iter().enumerate() {
        for &t in comp {
            source_of[t] = Some(i);
        }
    }

    let reach = reachable_from(g, inst.source());
    let mut pre_s = Vec::new();
    for (v, &reached) in reach.iter().enumerate() {
        if inst.is_terminal(v) || !reached {
            continue;
        }
        let mut hits: Vec<usize> = g
            .out_edges(v)
            .iter()
            .filter_map(|e| source_of[e.head])
            .collect();
        if hits.is_empty() {
            continue;
        }
        hits.sort_unstable();
        hits.dedup();
        pre_s.push((v, hits));
    }

    SourceComponents {
        components,
        sources,
        pre_s,
        source_of,
    }
}

/// One subset `N(v)` per owner `v`, weighted by `W(v)`; the source weighs 0.
pub fn build_cover_instance(inst: &Instance, sc: &SourceComponents) -> SetCoverInstance {
    let subsets = sc
        .pre_s
        .iter()
        .map(|(v, hits)| CoverSubset {
            owner: *v,
            members: hits.clone(),
            weight: if *v == inst.source() { 0 } else { inst.weight(*v) },
        })
        .collect();
    SetCoverInstance::new(sc.sources.len(), subsets).expect("source indices are in range")
}

/// Quantities behind the approximation guarantee of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCertificate {
    /// Hop radius from the source over every reachable vertex of the graph
    /// the algorithm ran on.
    pub radius: u64,
    /// Hop radius restricted to the cover vertices.
    pub radius_cover: u64,
    /// Per-cover-vertex cost factor: the hop radius in the uniform case, the
    /// largest `D(v) / W(v)` over cover vertices in the weighted case. `None`
    /// when a zero-weight cover vertex makes the ratio unbounded.
    pub stretch: Option<BigRational>,
    /// `H(|S|)` for the number of source components.
    pub harmonic: BigRational,
    pub source_components: usize,
    /// Cover vertices other than the source.
    pub cover_size: usize,
    /// Weight of the greedy cover.
    pub cover_weight: u64,
}

impl BoundCertificate {
    /// `stretch * H(|S|)`: the output objective is at most this times the optimum.
    pub fn factor(&self) -> Option<BigRational> {
        self.stretch.as_ref().map(|s| s * &self.harmonic)
    }

    /// `stretch * cover_weight`, an upper bound on the output objective.
    pub fn objective_bound(&self) -> Option<BigRational> {
        self.stretch
            .as_ref()
            .map(|s| s * BigRational::from_integer(BigInt::from(self.cover_weight)))
    }
}

/// Intermediate objects of a run, kept for inspection and testing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineTrace {
    /// Owners of the greedy cover, in pick order.
    pub cover_vertices: Vec<VertexId>,
    /// One `(v, t)` arc per source component, in component order.
    pub cover_edges: Vec<(VertexId, VertexId)>,
    /// Tree from the source to the cover vertices (step 4).
    pub path_tree: Arborescence,
    /// Path tree plus the missing cover arcs (step 5).
    pub cover_tree: Arborescence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionReport {
    pub tree: Arborescence,
    pub nt_count: usize,
    pub nt_weight: u64,
    pub certificate: Option<BoundCertificate>,
    pub trace: Option<PipelineTrace>,
    pub warnings: Vec<String>,
}

impl SolutionReport {
    pub(crate) fn from_tree(inst: &Instance, tree: Arborescence) -> Self {
        SolutionReport {
            nt_count: inst.nt_count(&tree),
            nt_weight: inst.nt_weight(&tree),
            tree,
            certificate: None,
            trace: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PathTree {
    MinHop,
    MinVertexWeight,
}

/// Uniform variant: every non-terminal counts 1, the path tree is a BFS tree.
pub fn approx_uvdst(inst: &Instance) -> Result<SolutionReport, SolveError> {
    run(inst, PathTree::MinHop)
}

/// Weighted variant: greedy cover by vertex weight, path tree of minimum
/// vertex-weight paths.
pub fn approx_vdst(inst: &Instance) -> Result<SolutionReport, SolveError> {
    if !inst.is_weighted() {
        return Err(SolveError::MissingVertexWeights);
    }
    run(inst, PathTree::MinVertexWeight)
}

fn run(inst: &Instance, mode: PathTree) -> Result<SolutionReport, SolveError> {
    let g = inst.graph();
    let s = inst.source();
    let reach = reachable_from(g, s);
    if let Some(&t) = inst.terminals().iter().find(|&&t| !reach[t]) {
        return Err(SolveError::TerminalUnreachable(t));
    }
    let hops = bfs_hops(g, s);
    let radius = hops.max_over(hops.reachable()).unwrap_or(0);

    if inst.terminals().is_empty() {
        let mut report = SolutionReport::from_tree(inst, Arborescence::new(s));
        report.certificate = Some(BoundCertificate {
            radius,
            radius_cover: 0,
            stretch: Some(BigRational::from_integer(BigInt::from(radius))),
            harmonic: harmonic(0),
            source_components: 0,
            cover_size: 0,
            cover_weight: 0,
        });
        report
            .warnings
            .push("empty terminal set: returning the source alone".to_string());
        return Ok(report);
    }

    // Steps 1-2.
    let sc = source_components(inst);
    let cover_inst = build_cover_instance(inst, &sc);
    let cover = greedy_cover(&cover_inst);
    if !cover.covered {
        return Err(SolveError::InfeasibleCover);
    }
    let cover_vertices: Vec<VertexId> = cover
        .chosen
        .iter()
        .map(|&i| cover_inst.subsets()[i].owner)
        .collect();
    let mut in_cover = vec![false; g.vertex_count()];
    for &v in &cover_vertices {
        in_cover[v] = true;
    }

    // Step 3: lowest (v, t) per component.
    let mut cover_edge_of: Vec<Option<(VertexId, VertexId, Weight)>> = vec![None; sc.sources.len()];
    for v in (0..g.vertex_count()).filter(|&v| in_cover[v]) {
        for e in g.out_edges(v) {
            if let Some(c) = sc.source_index(e.head) {
                cover_edge_of[c].get_or_insert((v, e.head, e.weight));
            }
        }
    }
    let cover_edges: Vec<(VertexId, VertexId, Weight)> = cover_edge_of
        .into_iter()
        .map(|e| e.expect("every source component is covered"))
        .collect();

    // Step 4.
    let (path_tree, stretch) = match mode {
        PathTree::MinHop => (
            bfs_tree(g, s, &cover_vertices)?,
            Some(BigRational::from_integer(BigInt::from(radius))),
        ),
        PathTree::MinVertexWeight => {
            let (tree, cost) = min_vertex_weight_tree(inst, &cover_vertices)?;
            let stretch = weighted_stretch(inst, &cover_vertices, &cost);
            (tree, stretch)
        }
    };

    // Step 5.
    let mut cover_tree = path_tree.clone();
    for &(v, t, w) in &cover_edges {
        if !cover_tree.contains(t) {
            cover_tree.attach(v, t, w);
        }
    }

    // Step 6.
    let tree = expand_to_all_terminals(inst, &sc, &cover_tree)?;

    let nt_path = inst.nt_count(&path_tree);
    assert_eq!(inst.nt_count(&cover_tree), nt_path, "cover arcs added a non-terminal");
    assert_eq!(inst.nt_count(&tree), nt_path, "expansion changed the non-terminal count");

    let radius_cover = hops.max_over(cover_vertices.iter().copied()).unwrap_or(0);
    let certificate = BoundCertificate {
        radius,
        radius_cover,
        stretch,
        harmonic: harmonic(sc.sources.len()),
        source_components: sc.sources.len(),
        cover_size: cover_vertices.iter().filter(|&&v| v != s).count(),
        cover_weight: cover.total_weight,
    };
    let mut report = SolutionReport::from_tree(inst, tree);
    report.certificate = Some(certificate);
    report.trace = Some(PipelineTrace {
        cover_vertices,
        cover_edges: cover_edges.iter().map(|&(v, t, _)| (v, t)).collect(),
        path_tree,
        cover_tree,
    });
    Ok(report)
}

/// Extends a tree that spans at least one terminal of every source component
/// to one spanning all terminals, using only arcs of `G[X]`. The set of
/// non-terminals is unchanged.
pub fn expand_to_all_terminals(
    inst: &Instance,
    sc: &SourceComponents,
    tree: &Arborescence,
) -> Result<Arborescence, SolveError> {
    let g = inst.graph();
    let mut roots = Vec::with_capacity(sc.sources.len());
    for comp in &sc.sources {
        match comp.iter().find(|&&t| tree.contains(t)) {
            Some(&t) => roots.push(t),
            None => return Err(SolveError::PreconditionViolated(comp.clone())),
        }
    }

    let mut out = tree.clone();
    let mut visited = vec![false; g.vertex_count()];
    let mut stack: Vec<(VertexId, usize)> = Vec::new();
    for r in roots {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        stack.push((r, 0));
        while let Some(frame) = stack.last_mut() {
            let u = frame.0;
            let out_edges = g.out_edges(u);
            let Some(e) = out_edges.get(frame.1) else {
                stack.pop();
                continue;
            };
            frame.1 += 1;
            if !inst.is_terminal(e.head) || visited[e.head] {
                continue;
            }
            visited[e.head] = true;
            // Terminals already in the tree are traversed but keep their parent.
            out.attach(u, e.head, e.weight);
            stack.push((e.head, 0));
        }
    }
    debug_assert!(inst.terminals().iter().all(|&t| out.contains(t)));
    Ok(out)
}

// Minimum vertex-weight paths from the source to `targets`. A path costs the
// sum of W over its vertices, source included. Ties prefer fewer hops, then
// the lower predecessor id. Returns the pruned tree and the cost labels.
fn min_vertex_weight_tree(
    inst: &Instance,
    targets: &[VertexId],
) -> Result<(Arborescence, Vec<Option<u64>>), SolveError> {
    let g = inst.graph();
    let n = g.vertex_count();
    let s = inst.source();
    let mut label: Vec<Option<(u64, u64)>> = vec![None; n];
    let mut pred: Vec<Option<(VertexId, Weight)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    label[s] = Some((inst.weight(s), 0));
    heap.push(Reverse((inst.weight(s), 0u64, s)));
    while let Some(Reverse((c, h, u))) = heap.pop() {
        if done[u] || label[u] != Some((c, h)) {
            continue;
        }
        done[u] = true;
        for e in g.out_edges(u) {
            let v = e.head;
            if done[v] {
                continue;
            }
            let cand = (c + inst.weight(v), h + 1);
            match label[v] {
                Some(cur) if cand > cur => {}
                Some(cur) if cand == cur => {
                    if pred[v].is_none_or(|(p, _)| u < p) {
                        pred[v] = Some((u, e.weight));
                    }
                }
                _ => {
                    label[v] = Some(cand);
                    pred[v] = Some((u, e.weight));
                    heap.push(Reverse((cand.0, cand.1, v)));
                }
            }
        }
    }
    for &t in targets {
        if label[t].is_none() {
            return Err(SolveError::TerminalUnreachable(t));
        }
    }
    let tree = Arborescence::from_parent_paths(s, targets, |v| pred[v]);
    Ok((tree, label.into_iter().map(|l| l.map(|(c, _)| c)).collect()))
}

// max over cover vertices v != s of (D(v) - W(s)) / W(v).
fn weighted_stretch(inst: &Instance, cover: &[VertexId], cost: &[Option<u64>]) -> Option<BigRational> {
    let s = inst.source();
    let base = inst.weight(s);
    let mut best = BigRational::from_integer(BigInt::from(0));
    for &v in cover.iter().filter(|&&v| v != s) {
        let d = cost[v].expect("cover vertex reachable") - base;
        let w = inst.weight(v);
        if w == 0 {
            if d > 0 {
                return None;
            }
            continue;
        }
        let r = BigRational::new(BigInt::from(d), BigInt::from(w));
        if r > best {
            best = r;
        }
    }
    Some(best)
}

/// Which subgraph the shortest path tree pipelines hand to the approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubgraphChoice {
    /// `G~(s, X)`: only arcs on shortest paths to terminals.
    #[default]
    Pruned,
    /// `G~(s)`: all shortest path arcs.
    Full,
}

/// The subgraph instance the SSPT pipelines run on: same ids, source,
/// terminals and weights, with the graph replaced by `G~(s, X)` or `G~(s)`.
pub fn shortest_path_instance(inst: &Instance, choice: SubgraphChoice) -> Result<Instance, SolveError> {
    let sps = build_sps(inst.graph(), inst.source());
    let sps = match choice {
        SubgraphChoice::Pruned => sps.prune_to_terminals(inst.terminals())?,
        SubgraphChoice::Full => {
            if let Some(&t) = inst.terminals().iter().find(|&&t| !sps.contains(t)) {
                return Err(SolveError::TerminalUnreachable(t));
            }
            sps
        }
    };
    let (graph, _) = sps.into_parts();
    Ok(inst.with_graph(graph))
}

pub fn solve_sspt(inst: &Instance) -> Result<SolutionReport, SolveError> {
    solve_sspt_with(inst, SubgraphChoice::Pruned)
}

/// Steiner shortest path tree: the uniform approximation run on the
/// shortest path subgraph, so every root path of the result is shortest.
pub fn solve_sspt_with(inst: &Instance, choice: SubgraphChoice) -> Result<SolutionReport, SolveError> {
    approx_uvdst(&shortest_path_instance(inst, choice)?)
}

pub fn solve_weighted_sspt(inst: &Instance) -> Result<SolutionReport, SolveError> {
    solve_weighted_sspt_with(inst, SubgraphChoice::Pruned)
}

pub fn solve_weighted_sspt_with(inst: &Instance, choice: SubgraphChoice) -> Result<SolutionReport, SolveError> {
    if !inst.is_weighted() {
        return Err(SolveError::MissingVertexWeights);
    }
    approx_vdst(&shortest_path_instance(inst, choice)?)
}

/// A reason `verify_solution` rejected a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionIssue {
    WrongRoot { expected: VertexId, found: VertexId },
    Structure(StructureDefect),
    VertexOutOfRange(VertexId),
    MissingEdge { tail: VertexId, head: VertexId },
    WeightMismatch { tail: VertexId, head: VertexId, recorded: Weight, actual: Weight },
    MissingTerminal(VertexId),
    NotShortest { vertex: VertexId, tree_distance: u64, shortest: Option<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionVerification {
    pub issues: Vec<SolutionIssue>,
}

impl SolutionVerification {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks that `tree` is an arborescence of the instance graph rooted at
/// the source and spanning every terminal; with `require_shortest`, also that
/// each root path is a shortest path.
pub fn verify_solution(inst: &Instance, tree: &Arborescence, require_shortest: bool) -> SolutionVerification {
    let g = inst.graph();
    let mut issues = Vec::new();
    if tree.root() != inst.source() {
        issues.push(SolutionIssue::WrongRoot {
            expected: inst.source(),
            found: tree.root(),
        });
    }
    if let Some(&v) = tree.vertices().collect::<Vec<_>>().iter().find(|&&v| v >= g.vertex_count()) {
        issues.push(SolutionIssue::VertexOutOfRange(v));
        return SolutionVerification { issues };
    }
    if let Some(defect) = tree.structure_defect() {
        issues.push(SolutionIssue::Structure(defect));
        return SolutionVerification { issues };
    }
    for (p, c, w) in tree.edges() {
        match g.edge_weight(p, c) {
            None => issues.push(SolutionIssue::MissingEdge { tail: p, head: c }),
            Some(actual) if actual != w => issues.push(SolutionIssue::WeightMismatch {
                tail: p,
                head: c,
                recorded: w,
                actual,
            }),
            Some(_) => {}
        }
    }
    for &t in inst.terminals() {
        if !tree.contains(t) {
            issues.push(SolutionIssue::MissingTerminal(t));
        }
    }
    if require_shortest && issues.is_empty() {
        let dist = dijkstra(g, inst.source());
        for v in tree.vertices() {
            let along = tree.path_weight(v).expect("structure checked");
            if dist.get(v) != Some(along) {
                issues.push(SolutionIssue::NotShortest {
                    vertex: v,
                    tree_distance: along,
                    shortest: dist.get(v),
                });
            }
        }
    }
    SolutionVerification { issues }
}
