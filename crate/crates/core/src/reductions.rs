//! Instance transformations between problem variants, each paired with what
//! is needed to carry solutions across.

use thiserror::Error;

use crate::graph::{tarjan_scc, reachable_from, Edge, Graph, VertexId};
use crate::instance::Instance;
use crate::set_cover::{CoverSolution, SetCoverInstance};
use crate::tree::Arborescence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("the graph has a directed cycle through vertex {0}")]
    NotAcyclic(VertexId),
    #[error("vertex {0} is not reachable from the source")]
    Unreachable(VertexId),
    #[error("tree is not feasible for the gadget: {0}")]
    InfeasibleTree(String),
    #[error("the chosen subsets do not cover element {0}")]
    NotACover(usize),
}

/// Where the pieces of a set cover instance sit in its gadget graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetMap {
    pub source: VertexId,
    pub set_vertex_of: Vec<VertexId>,
    pub element_vertex_of: Vec<VertexId>,
}

impl GadgetMap {
    /// Subset index of a vertex on the subset side.
    pub fn subset_at(&self, v: VertexId) -> Option<usize> {
        let first = *self.set_vertex_of.first()?;
        (v >= first && v < first + self.set_vertex_of.len()).then(|| v - first)
    }

    pub fn element_at(&self, v: VertexId) -> Option<usize> {
        let first = *self.element_vertex_of.first()?;
        (v >= first && v < first + self.element_vertex_of.len()).then(|| v - first)
    }
}

/// Bipartite subset/element graph plus a source joined to every subset; all
/// edges undirected with weight 1, terminals are the elements. Vertex 0 is
/// the source, then the subsets in order, then the elements.
pub fn gadget_from_set_cover(sc: &SetCoverInstance) -> (Instance, GadgetMap) {
    let m = sc.subsets().len();
    let u = sc.universe_size();
    let set_vertex_of: Vec<VertexId> = (1..=m).collect();
    let element_vertex_of: Vec<VertexId> = (m + 1..=m + u).collect();
    let mut edges = Vec::new();
    for (i, s) in sc.subsets().iter().enumerate() {
        edges.push(Edge::new(0, set_vertex_of[i], 1));
        for &x in &s.members {
            edges.push(Edge::new(set_vertex_of[i], element_vertex_of[x], 1));
        }
    }
    let graph = Graph::new(1 + m + u, edges, false).expect("gadget edges are in range");
    let inst = Instance::new(graph, 0, element_vertex_of.clone(), None).expect("gadget instance is valid");
    (
        inst,
        GadgetMap {
            source: 0,
            set_vertex_of,
            element_vertex_of,
        },
    )
}

/// Reads a cover off a feasible gadget tree: the subsets whose vertices the
/// tree uses. Its size equals the tree's non-terminal count.
pub fn map_tree_to_cover(tree: &Arborescence, map: &GadgetMap) -> Result<CoverSolution, ReductionError> {
    if tree.root() != map.source {
        return Err(ReductionError::InfeasibleTree(format!(
            "rooted at {} instead of {}",
            tree.root(),
            map.source
        )));
    }
    for (x, &v) in map.element_vertex_of.iter().enumerate() {
        match tree.parent(v) {
            None => {
                return Err(ReductionError::InfeasibleTree(format!(
                    "element {x} (vertex {v}) is not spanned"
                )))
            }
            Some(p) if map.subset_at(p).is_none() => {
                return Err(ReductionError::InfeasibleTree(format!(
                    "element {x} hangs off vertex {p}, not a subset"
                )))
            }
            Some(_) => {}
        }
    }
    let chosen: Vec<usize> = tree.vertices().filter_map(|v| map.subset_at(v)).collect();
    Ok(CoverSolution {
        total_weight: chosen.len() as u64,
        chosen,
        covered: true,
    })
}

/// The gadget tree of a cover: the source feeds every chosen subset and each
/// element hangs off the first chosen subset containing it.
pub fn lift_cover_to_tree(
    sc: &SetCoverInstance,
    chosen: &[usize],
    map: &GadgetMap,
) -> Result<Arborescence, ReductionError> {
    let mut tree = Arborescence::new(map.source);
    let mut sorted = chosen.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &i in &sorted {
        tree.attach(map.source, map.set_vertex_of[i], 1);
    }
    for x in 0..sc.universe_size() {
        let owner = sorted
            .iter()
            .find(|&&i| sc.subsets()[i].members.binary_search(&x).is_ok())
            .ok_or(ReductionError::NotACover(x))?;
        tree.attach(map.set_vertex_of[*owner], map.element_vertex_of[x], 1);
    }
    Ok(tree)
}

/// Zeroes every edge weight, turning each arborescence into a shortest path
/// tree. Solutions carry over unchanged.
pub fn uvdst_to_dsspt(inst: &Instance) -> Instance {
    let graph = inst
        .graph()
        .map_weights(|_| 0)
        .expect("zero is a valid weight")
        .with_directed_flag(true);
    inst.with_graph(graph)
}

/// For an acyclic instance with every vertex reachable from the source:
/// with `D(x)` the most arcs on any path from the source to `x`, gives each
/// arc `(u, v)` the weight `D(v) - D(u) >= 1` and forgets directions. Every
/// directed path of the input becomes a shortest path of the output, and no
/// backward traversal is ever shortest, so the shortest path subgraph of the
/// output is the input graph again.
pub fn acyclic_uvdst_to_usspt(inst: &Instance) -> Result<Instance, ReductionError> {
    let g = inst.graph();
    let reach = reachable_from(g, inst.source());
    if let Some(v) = reach.iter().position(|&r| !r) {
        return Err(ReductionError::Unreachable(v));
    }
    let scc = tarjan_scc(g);
    if let Some(c) = scc.components.iter().find(|c| c.len() > 1) {
        return Err(ReductionError::NotAcyclic(c[0]));
    }
    let mut longest: Vec<Option<u64>> = vec![None; g.vertex_count()];
    longest[inst.source()] = Some(0);
    for &c in &scc.condensation_order {
        let u = scc.components[c][0];
        let Some(du) = longest[u] else { continue };
        for e in g.out_edges(u) {
            let cand = du + 1;
            if longest[e.head].is_none_or(|d| cand > d) {
                longest[e.head] = Some(cand);
            }
        }
    }
    let edges = g.edges().iter().map(|e| {
        let (du, dv) = (longest[e.tail].unwrap(), longest[e.head].unwrap());
        Edge::new(e.tail, e.head, dv - du)
    });
    let graph = Graph::new(g.vertex_count(), edges, false).expect("longest-path weights are small");
    Ok(inst.with_graph(graph))
}

/// Marks an undirected instance as directed. Storage already holds both
/// orientations of every edge, so only the flag changes.
pub fn usspt_to_dsspt(inst: &Instance) -> Instance {
    inst.with_graph(inst.graph().with_directed_flag(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_sspt, exact_uvdst, OracleBudget};
    use crate::set_cover::exact_cover;
    use crate::sps::build_sps;

    fn abc() -> SetCoverInstance {
        SetCoverInstance::unweighted(3, vec![vec![0, 1], vec![1, 2], vec![2]]).unwrap()
    }

    #[test]
    fn gadget_sizes() {
        let one = SetCoverInstance::unweighted(2, vec![vec![0, 1]]).unwrap();
        let (inst, map) = gadget_from_set_cover(&one);
        assert_eq!(inst.graph().vertex_count(), 4);
        assert_eq!(inst.graph().edge_count(), 6); // 3 undirected edges
        assert_eq!(inst.terminals(), &[2, 3]);
        assert_eq!(map.set_vertex_of, vec![1]);

        let empty = SetCoverInstance::unweighted(0, vec![vec![], vec![]]).unwrap();
        let (inst, _) = gadget_from_set_cover(&empty);
        assert_eq!(inst.graph().vertex_count(), 3);
        assert!(inst.terminals().is_empty());

        let (inst, _) = gadget_from_set_cover(&abc());
        assert_eq!(inst.graph().vertex_count(), 7);
        assert_eq!(exact_sspt(&inst, &OracleBudget::default()).unwrap().nt_count, 2);
    }

    #[test]
    fn optimal_tree_maps_to_optimal_cover() {
        let (inst, map) = gadget_from_set_cover(&abc());
        let tree = exact_sspt(&inst, &OracleBudget::default()).unwrap().tree;
        let cover = map_tree_to_cover(&tree, &map).unwrap();
        assert!(abc().covers(&cover.chosen));
        assert_eq!(cover.total_weight, exact_cover(&abc()).unwrap().total_weight);
    }

    #[test]
    fn lifting_every_subset() {
        let (_, map) = gadget_from_set_cover(&abc());
        let tree = lift_cover_to_tree(&abc(), &[0, 1, 2], &map).unwrap();
        let cover = map_tree_to_cover(&tree, &map).unwrap();
        assert_eq!(cover.chosen, vec![0, 1, 2]);
        assert_eq!(
            lift_cover_to_tree(&abc(), &[0], &map),
            Err(ReductionError::NotACover(2))
        );
    }

    #[test]
    fn infeasible_tree_is_rejected() {
        let (_, map) = gadget_from_set_cover(&abc());
        let mut t = Arborescence::new(0);
        t.attach(0, 1, 1);
        assert!(matches!(map_tree_to_cover(&t, &map), Err(ReductionError::InfeasibleTree(_))));
    }

    #[test]
    fn zero_weight_copy() {
        let g = Graph::directed(3, &[(0, 1, 4), (1, 2, 7), (2, 1, 2)]).unwrap();
        let inst = Instance::new(g, 0, vec![2], None).unwrap();
        let out = uvdst_to_dsspt(&inst);
        assert!(out.graph().edges().iter().all(|e| e.weight == 0));
        assert_eq!(out.graph().edge_count(), 3);
        let sps = build_sps(out.graph(), 0);
        assert_eq!(sps.graph().edge_count(), 3);
        assert_eq!(
            exact_sspt(&out, &OracleBudget::default()).unwrap().nt_count,
            exact_uvdst(&inst, &OracleBudget::default()).unwrap().nt_count
        );
    }

    #[test]
    fn longest_path_weights() {
        let path = Graph::directed(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let out = acyclic_uvdst_to_usspt(&Instance::new(path, 0, vec![2], None).unwrap()).unwrap();
        assert_eq!(out.graph().edge_weight(0, 1), Some(1));
        assert_eq!(out.graph().edge_weight(2, 1), Some(1));
        assert!(!out.graph().is_directed());

        // s=0, a=1, t=2: s->a, a->t, s->t
        let diamond = Graph::directed(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let out = acyclic_uvdst_to_usspt(&Instance::new(diamond, 0, vec![2], None).unwrap()).unwrap();
        assert_eq!(out.graph().edge_weight(0, 1), Some(1));
        assert_eq!(out.graph().edge_weight(1, 2), Some(1));
        assert_eq!(out.graph().edge_weight(0, 2), Some(2));
    }

    #[test]
    fn cyclic_or_unreachable_inputs_are_rejected() {
        let cyc = Graph::directed(3, &[(0, 1, 1), (1, 2, 1), (2, 1, 1)]).unwrap();
        assert_eq!(
            acyclic_uvdst_to_usspt(&Instance::new(cyc, 0, vec![2], None).unwrap()),
            Err(ReductionError::NotAcyclic(1))
        );
        let stray = Graph::directed(3, &[(0, 1, 1), (2, 1, 1)]).unwrap();
        assert_eq!(
            acyclic_uvdst_to_usspt(&Instance::new(stray, 0, vec![1], None).unwrap()),
            Err(ReductionError::Unreachable(2))
        );
    }

    #[test]
    fn undirected_to_directed_keeps_arcs() {
        let g = Graph::undirected(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        let inst = Instance::new(g, 0, vec![2], None).unwrap();
        let out = usspt_to_dsspt(&inst);
        assert!(out.graph().is_directed());
        assert_eq!(out.graph().edge_count(), 8);
        assert_eq!(out.graph().edges(), inst.graph().edges());
        let again = usspt_to_dsspt(&out);
        assert_eq!(again, out);
    }
}
