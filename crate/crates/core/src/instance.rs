use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::tree::Arborescence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex {vertex} is outside [0, {vertex_count})")]
    InvalidVertex { vertex: VertexId, vertex_count: usize },
    #[error("source {0} is listed as a terminal")]
    SourceIsTerminal(VertexId),
    #[error("{found} vertex weights given for {expected} vertices")]
    WeightCount { expected: usize, found: usize },
}

/// A graph with a source and a terminal set, optionally carrying
/// non-terminal vertex weights. SSPT, UVDST and VDST instances all share it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    source: VertexId,
    terminals: Vec<VertexId>,
    terminal_mask: Vec<bool>,
    vertex_weights: Option<Vec<u64>>,
}

impl Instance {
    /// Terminals are deduplicated and sorted. Terminal weights are forced to 0.
    pub fn new(
        graph: Graph,
        source: VertexId,
        terminals: Vec<VertexId>,
        vertex_weights: Option<Vec<u64>>,
    ) -> Result<Self, InstanceError> {
        let n = graph.vertex_count();
        let check = |v: VertexId| {
            if v < n {
                Ok(())
            } else {
                Err(InstanceError::InvalidVertex {
                    vertex: v,
                    vertex_count: n,
                })
            }
        };
        check(source)?;
        let mut terminals = terminals;
        terminals.sort_unstable();
        terminals.dedup();
        let mut terminal_mask = vec![false; n];
        for &t in &terminals {
            check(t)?;
            if t == source {
                return Err(InstanceError::SourceIsTerminal(t));
            }
            terminal_mask[t] = true;
        }
        let vertex_weights = match vertex_weights {
            Some(mut w) => {
                if w.len() != n {
                    return Err(InstanceError::WeightCount {
                        expected: n,
                        found: w.len(),
                    });
                }
                for &t in &terminals {
                    w[t] = 0;
                }
                Some(w)
            }
            None => None,
        };
        Ok(Instance {
            graph,
            source,
            terminals,
            terminal_mask,
            vertex_weights,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminal_mask[v]
    }

    pub fn vertex_weights(&self) -> Option<&[u64]> {
        self.vertex_weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.vertex_weights.is_some()
    }

    /// Vertex weight; without explicit weights every non-terminal weighs 1.
    pub fn weight(&self, v: VertexId) -> u64 {
        match &self.vertex_weights {
            Some(w) => w[v],
            None if self.terminal_mask[v] => 0,
            None => 1,
        }
    }

    /// Same source, terminals and weights on another graph over the same ids.
    pub fn with_graph(&self, graph: Graph) -> Instance {
        assert_eq!(graph.vertex_count(), self.graph.vertex_count());
        Instance {
            graph,
            ..self.clone()
        }
    }

    pub fn with_vertex_weights(&self, weights: Option<Vec<u64>>) -> Result<Instance, InstanceError> {
        Instance::new(
            self.graph.clone(),
            self.source,
            self.terminals.clone(),
            weights,
        )
    }

    /// Number of tree vertices outside the terminals and the source.
    pub fn nt_count(&self, tree: &Arborescence) -> usize {
        tree.nt_count(|v| self.is_terminal(v))
    }

    /// Total weight of the tree vertices outside the terminals and the source.
    pub fn nt_weight(&self, tree: &Arborescence) -> u64 {
        tree.non_terminals(|v| self.is_terminal(v))
            .map(|v| self.weight(v))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Graph {
        Graph::directed(3, &[(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    #[test]
    fn terminals_are_sorted_and_deduplicated() {
        let inst = Instance::new(path(), 0, vec![2, 1, 2], None).unwrap();
        assert_eq!(inst.terminals(), &[1, 2]);
        assert!(inst.is_terminal(1) && !inst.is_terminal(0));
    }

    #[test]
    fn source_may_not_be_terminal() {
        assert_eq!(
            Instance::new(path(), 0, vec![0, 2], None),
            Err(InstanceError::SourceIsTerminal(0))
        );
    }

    #[test]
    fn terminal_weights_are_forced_to_zero() {
        let inst = Instance::new(path(), 0, vec![2], Some(vec![3, 4, 5])).unwrap();
        assert_eq!(inst.vertex_weights(), Some(&[3, 4, 0][..]));
    }

    #[test]
    fn uniform_weights_by_default() {
        let inst = Instance::new(path(), 0, vec![2], None).unwrap();
        assert_eq!((inst.weight(1), inst.weight(2)), (1, 0));
    }

    #[test]
    fn bad_vertices_and_weight_lengths_are_rejected() {
        assert!(matches!(
            Instance::new(path(), 5, vec![], None),
            Err(InstanceError::InvalidVertex { vertex: 5, .. })
        ));
        assert!(matches!(
            Instance::new(path(), 0, vec![1], Some(vec![1])),
            Err(InstanceError::WeightCount { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn tree_objectives_skip_source_and_terminals() {
        let inst = Instance::new(path(), 0, vec![2], Some(vec![9, 4, 0])).unwrap();
        let mut t = Arborescence::new(0);
        t.attach(0, 1, 1);
        t.attach(1, 2, 1);
        assert_eq!(inst.nt_count(&t), 1);
        assert_eq!(inst.nt_weight(&t), 4);
    }
}
