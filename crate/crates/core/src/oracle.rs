//! Exhaustive solvers for small instances. They enumerate sets of Steiner
//! vertices and test each by one BFS, so they are exact but exponential in
//! the number of candidate vertices.
//!
//! Only non-terminals that are reachable from the source *and* reach some
//! terminal are candidates; no other vertex can appear in a pruned feasible
//! tree, so restricting to them leaves the optimum unchanged.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{bfs_tree_within, bfs_with_parents, co_reachable, reachable_from, VertexId};
use crate::instance::Instance;
use crate::par::{self, Execution};
use crate::steiner::{shortest_path_instance, verify_solution, SolutionReport, SolveError, SubgraphChoice};
use crate::subsets::{indices, masks_of_size, LexMask};

pub const DEFAULT_MAX_CANDIDATES: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Most candidate Steiner vertices the enumeration will accept.
    pub max_candidates: usize,
    pub time_limit: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_candidates: DEFAULT_MAX_CANDIDATES,
            time_limit: None,
        }
    }
}

impl OracleBudget {
    pub fn with_max_candidates(max_candidates: usize) -> Self {
        OracleBudget {
            max_candidates,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{candidates} candidate Steiner vertices exceed the budget of {limit}")]
    TooLarge { candidates: usize, limit: usize },
    #[error("time limit of {0:?} exceeded")]
    TimeLimit(Duration),
    #[error("terminal {0} is unreachable even through every non-terminal")]
    TerminalUnreachable(VertexId),
    #[error("the weighted oracle needs vertex weights")]
    MissingVertexWeights,
}

impl From<SolveError> for OracleError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::TerminalUnreachable(v) => OracleError::TerminalUnreachable(v),
            SolveError::MissingVertexWeights => OracleError::MissingVertexWeights,
            other => unreachable!("subgraph construction failed: {other}"),
        }
    }
}

/// Exhaustive solver with a budget and an execution mode. Each cardinality
/// level (or the whole weighted search space) is scanned in parallel when
/// allowed; the answer is the same either way, ties going to the
/// lexicographically smallest vertex set.
#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle {
    pub budget: OracleBudget,
    pub execution: Execution,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective {
    Count,
    Weight,
}

impl Oracle {
    pub fn new(budget: OracleBudget) -> Self {
        Oracle {
            budget,
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Minimum number of non-terminals over all trees spanning the terminals.
    pub fn uvdst(&self, inst: &Instance) -> Result<SolutionReport, OracleError> {
        self.solve(inst, Objective::Count)
    }

    /// Minimum total vertex weight over all trees spanning the terminals.
    pub fn vdst(&self, inst: &Instance) -> Result<SolutionReport, OracleError> {
        if !inst.is_weighted() {
            return Err(OracleError::MissingVertexWeights);
        }
        self.solve(inst, Objective::Weight)
    }

    /// Minimum non-terminal shortest path tree: the uniform search on `G~(s, X)`.
    pub fn sspt(&self, inst: &Instance) -> Result<SolutionReport, OracleError> {
        let sub = shortest_path_instance(inst, SubgraphChoice::Pruned)?;
        let report = self.uvdst(&sub)?;
        debug_assert!(verify_solution(inst, &report.tree, true).passed());
        Ok(report)
    }

    pub fn weighted_sspt(&self, inst: &Instance) -> Result<SolutionReport, OracleError> {
        if !inst.is_weighted() {
            return Err(OracleError::MissingVertexWeights);
        }
        let sub = shortest_path_instance(inst, SubgraphChoice::Pruned)?;
        let report = self.vdst(&sub)?;
        debug_assert!(verify_solution(inst, &report.tree, true).passed());
        Ok(report)
    }

    fn solve(&self, inst: &Instance, objective: Objective) -> Result<SolutionReport, OracleError> {
        let g = inst.graph();
        let s = inst.source();
        let reach = reachable_from(g, s);
        if let Some(&t) = inst.terminals().iter().find(|&&t| !reach[t]) {
            return Err(OracleError::TerminalUnreachable(t));
        }
        let co = co_reachable(g, inst.terminals());
        let candidates: Vec<VertexId> = (0..g.vertex_count())
            .filter(|&v| v != s && !inst.is_terminal(v) && reach[v] && co[v])
            .collect();
        let m = candidates.len();
        if m > self.budget.max_candidates || m >= 63 {
            return Err(OracleError::TooLarge {
                candidates: m,
                limit: self.budget.max_candidates,
            });
        }

        let start = Instant::now();
        let expired = AtomicBool::new(false);
        let feasible = |mask: u64| -> bool {
            if let Some(limit) = self.budget.time_limit {
                if expired.load(Ordering::Relaxed) || start.elapsed() > limit {
                    expired.store(true, Ordering::Relaxed);
                    return false;
                }
            }
            let allowed = allowed_set(inst, &candidates, mask);
            let (dist, _) = bfs_with_parents(g, s, |v| allowed[v]);
            inst.terminals().iter().all(|&t| dist[t].is_some())
        };
        let check_time = || match self.budget.time_limit {
            Some(limit) if expired.load(Ordering::Relaxed) => Err(OracleError::TimeLimit(limit)),
            _ => Ok(()),
        };

        let best = match objective {
            Objective::Count => {
                let mut found = None;
                for k in 0..=m {
                    let level = masks_of_size(m, k);
                    let hit = par::min_over_slice(self.execution, &level, |&mask| {
                        feasible(mask).then_some(LexMask(mask))
                    });
                    check_time()?;
                    if let Some(LexMask(mask)) = hit {
                        found = Some(mask);
                        break;
                    }
                }
                found
            }
            Objective::Weight => {
                let weight_of = |mask: u64| -> u64 {
                    indices(mask).into_iter().map(|i| inst.weight(candidates[i])).sum()
                };
                let hit = par::min_over_range(self.execution, 0..1u64 << m, |mask| {
                    feasible(mask).then(|| (weight_of(mask), LexMask(mask)))
                });
                check_time()?;
                hit.map(|(_, LexMask(mask))| mask)
            }
        };
        // The full candidate set is feasible once every terminal is reachable.
        let mask = best.expect("all candidates together span the terminals");

        let allowed = allowed_set(inst, &candidates, mask);
        let tree = bfs_tree_within(g, s, inst.terminals(), |v| allowed[v])
            .expect("optimal set spans the terminals");
        let report = SolutionReport::from_tree(inst, tree);
        match objective {
            Objective::Count => assert_eq!(report.nt_count, mask.count_ones() as usize),
            Objective::Weight => {
                let w: u64 = indices(mask).into_iter().map(|i| inst.weight(candidates[i])).sum();
                assert_eq!(report.nt_weight, w);
            }
        }
        Ok(report)
    }
}

fn allowed_set(inst: &Instance, candidates: &[VertexId], mask: u64) -> Vec<bool> {
    let mut allowed: Vec<bool> = (0..inst.graph().vertex_count())
        .map(|v| inst.is_terminal(v))
        .collect();
    allowed[inst.source()] = true;
    for i in indices(mask) {
        allowed[candidates[i]] = true;
    }
    allowed
}

pub fn exact_uvdst(inst: &Instance, budget: &OracleBudget) -> Result<SolutionReport, OracleError> {
    Oracle::new(*budget).uvdst(inst)
}

pub fn exact_vdst(inst: &Instance, budget: &OracleBudget) -> Result<SolutionReport, OracleError> {
    Oracle::new(*budget).vdst(inst)
}

pub fn exact_sspt(inst: &Instance, budget: &OracleBudget) -> Result<SolutionReport, OracleError> {
    Oracle::new(*budget).sspt(inst)
}

pub fn exact_weighted_sspt(inst: &Instance, budget: &OracleBudget) -> Result<SolutionReport, OracleError> {
    Oracle::new(*budget).weighted_sspt(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn inst(n: usize, edges: &[(usize, usize, u64)], terminals: &[usize]) -> Instance {
        Instance::new(Graph::directed(n, edges).unwrap(), 0, terminals.to_vec(), None).unwrap()
    }

    #[test]
    fn adjacent_terminals_need_nothing() {
        let i = inst(3, &[(0, 1, 1), (0, 2, 1)], &[1, 2]);
        assert_eq!(exact_uvdst(&i, &OracleBudget::default()).unwrap().nt_count, 0);
    }

    #[test]
    fn star_needs_its_hub() {
        let i = inst(4, &[(0, 1, 1), (1, 2, 1), (1, 3, 1)], &[2, 3]);
        let r = exact_uvdst(&i, &OracleBudget::default()).unwrap();
        assert_eq!(r.nt_count, 1);
        assert!(verify_solution(&i, &r.tree, false).passed());
    }

    #[test]
    fn ties_go_to_the_smallest_vertex_set() {
        // Two relays 1 and 2 both reach the terminal 3.
        let i = inst(4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)], &[3]);
        let r = exact_uvdst(&i, &OracleBudget::default()).unwrap();
        assert_eq!(r.tree.parent(3), Some(1));
    }

    #[test]
    fn budget_is_enforced() {
        let i = inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], &[3]);
        assert_eq!(
            exact_uvdst(&i, &OracleBudget::with_max_candidates(1)),
            Err(OracleError::TooLarge { candidates: 2, limit: 1 })
        );
    }

    #[test]
    fn useless_vertices_are_not_candidates() {
        // 2 is a dead end, 3 is unreachable.
        let i = inst(5, &[(0, 1, 1), (1, 4, 1), (0, 2, 1), (3, 4, 1)], &[4]);
        let r = exact_uvdst(&i, &OracleBudget::with_max_candidates(1)).unwrap();
        assert_eq!(r.nt_count, 1);
    }

    #[test]
    fn unreachable_terminal_is_reported() {
        let i = inst(3, &[(0, 1, 1)], &[2]);
        assert_eq!(
            exact_uvdst(&i, &OracleBudget::default()),
            Err(OracleError::TerminalUnreachable(2))
        );
    }

    #[test]
    fn zero_time_limit_expires() {
        let i = inst(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], &[3]);
        let budget = OracleBudget {
            max_candidates: 22,
            time_limit: Some(Duration::ZERO),
        };
        assert_eq!(exact_uvdst(&i, &budget), Err(OracleError::TimeLimit(Duration::ZERO)));
    }

    #[test]
    fn weighted_oracle_minimizes_weight_not_count() {
        // 0 -> 1 (W 5) -> 4;  0 -> 2 (W 1) -> 3 (W 1) -> 4
        let g = Graph::directed(5, &[(0, 1, 1), (1, 4, 1), (0, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        let i = Instance::new(g, 0, vec![4], Some(vec![0, 5, 1, 1, 0])).unwrap();
        let r = exact_vdst(&i, &OracleBudget::default()).unwrap();
        assert_eq!((r.nt_weight, r.nt_count), (2, 2));
        assert_eq!(exact_uvdst(&i, &OracleBudget::default()).unwrap().nt_count, 1);
        assert_eq!(exact_vdst(&inst(2, &[(0, 1, 1)], &[1]), &OracleBudget::default()), Err(OracleError::MissingVertexWeights));
    }

    #[test]
    fn four_cycle_sspt_optimum_is_one() {
        let g = Graph::undirected(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        let i = Instance::new(g, 0, vec![2], None).unwrap();
        let r = exact_sspt(&i, &OracleBudget::default()).unwrap();
        assert_eq!(r.nt_count, 1);
        assert!(verify_solution(&i, &r.tree, true).passed());
    }

    #[test]
    fn sspt_oracle_respects_shortest_paths() {
        // Unconstrained, the terminal 2 hangs off 0 directly (weight 9); on
        // shortest paths only the relay 1 works.
        let i = inst(3, &[(0, 2, 9), (0, 1, 1), (1, 2, 1)], &[2]);
        assert_eq!(exact_uvdst(&i, &OracleBudget::default()).unwrap().nt_count, 0);
        assert_eq!(exact_sspt(&i, &OracleBudget::default()).unwrap().nt_count, 1);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let i = inst(
            7,
            &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 4, 1), (2, 5, 1), (3, 6, 1), (4, 6, 1)],
            &[5, 6],
        );
        let seq = Oracle::default().with_execution(Execution::Sequential).uvdst(&i).unwrap();
        let par = Oracle::default().with_execution(Execution::Parallel).uvdst(&i).unwrap();
        assert_eq!(seq, par);
    }
}
