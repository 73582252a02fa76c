#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use sspt_core::generate::{generate, Family, GeneratorSpec};
use sspt_core::graph::{bellman_ford, bfs_tree, dijkstra, reachable_from, tarjan_scc, Edge};
use sspt_core::io::{parse_instance, serialize_instance};
use sspt_core::oracle::{exact_sspt, exact_uvdst, OracleBudget};
use sspt_core::reductions::{acyclic_uvdst_to_usspt, gadget_from_set_cover, lift_cover_to_tree, map_tree_to_cover, usspt_to_dsspt};
use sspt_core::set_cover::{exact_cover, greedy_cover, CoverSubset, SetCoverInstance};
use sspt_core::sps::{shallowness, RelevantSet};
use sspt_core::steiner::{approx_uvdst, solve_sspt, verify_solution};
use sspt_core::{build_sps, Graph, Instance};

type RawEdges = Vec<(usize, usize, u64)>;

fn raw_graph(max_n: usize, max_w: u64) -> impl Strategy<Value = (usize, RawEdges)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n, 0..=max_w), 0..=3 * n)))
}

fn directed((n, edges): &(usize, RawEdges)) -> Graph {
    Graph::directed(*n, edges).unwrap()
}

fn instance(max_n: usize, max_w: u64) -> impl Strategy<Value = Instance> {
    (raw_graph(max_n, max_w), any::<bool>(), prop::collection::vec(any::<bool>(), max_n)).prop_map(
        |((n, edges), dir, pick)| {
            let g = if dir {
                Graph::directed(n, &edges).unwrap()
            } else {
                Graph::undirected(n, &edges).unwrap()
            };
            let reach = reachable_from(&g, 0);
            let mut terminals: Vec<usize> = (1..n).filter(|&v| reach[v] && pick[v]).collect();
            if terminals.is_empty() {
                terminals.extend((1..n).find(|&v| reach[v]));
            }
            Instance::new(g, 0, terminals, None).unwrap()
        },
    )
}

// Every simple path from `s`, as vertex sequences.
fn simple_paths(g: &Graph, s: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        let u = *path.last().unwrap();
        for e in g.out_edges(u) {
            if !path.contains(&e.head) {
                path.push(e.head);
                walk(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, &mut vec![s], &mut out);
    out
}

fn path_weight(g: &Graph, p: &[usize]) -> u64 {
    p.windows(2).map(|w| g.edge_weight(w[0], w[1]).unwrap()).sum()
}

fn reach_matrix(g: &Graph) -> Vec<Vec<bool>> {
    (0..g.vertex_count()).map(|v| reachable_from(g, v)).collect()
}

fn harmonic(n: usize) -> BigRational {
    (1..=n).fold(BigRational::from_integer(BigInt::from(0)), |acc, k| {
        acc + BigRational::new(BigInt::from(1), BigInt::from(k))
    })
}

// Minimum non-terminal count over all arborescences, by choosing a parent
// (or absence) for every vertex.
fn arborescence_oracle(inst: &Instance) -> Option<usize> {
    let g = inst.graph();
    let n = g.vertex_count();
    let s = inst.source();
    let options: Vec<Vec<Option<usize>>> = (0..n)
        .map(|v| {
            if v == s {
                vec![None]
            } else {
                let mut o = vec![None];
                o.extend(g.in_edges(v).map(|e| Some(e.tail)));
                o
            }
        })
        .collect();
    let mut choice = vec![0usize; n];
    let mut best: Option<usize> = None;
    loop {
        let parent: Vec<Option<usize>> = (0..n).map(|v| options[v][choice[v]]).collect();
        // v is in the tree iff following parents reaches s without repeating.
        let in_tree = |v: usize| {
            let mut cur = v;
            for _ in 0..=n {
                if cur == s {
                    return true;
                }
                match parent[cur] {
                    Some(p) => cur = p,
                    None => return false,
                }
            }
            false
        };
        let members: Vec<bool> = (0..n).map(in_tree).collect();
        let tidy = (0..n).all(|v| v == s || members[v] == parent[v].is_some());
        if tidy && inst.terminals().iter().all(|&t| members[t]) {
            let nt = (0..n).filter(|&v| members[v] && v != s && !inst.is_terminal(v)).count();
            best = Some(best.map_or(nt, |b| b.min(nt)));
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn search_space(inst: &Instance) -> usize {
    let g = inst.graph();
    (0..g.vertex_count()).map(|v| g.in_edges(v).count() + 1).product()
}

fn random_cover() -> impl Strategy<Value = SetCoverInstance> {
    (1usize..=8, 1usize..=10).prop_flat_map(|(m, u)| {
        prop::collection::vec((prop::collection::vec(0..u, 0..=u), 1u64..=5), m).prop_map(move |sets| {
            let subsets = sets
                .into_iter()
                .enumerate()
                .map(|(owner, (members, weight))| CoverSubset { owner, members, weight })
                .collect();
            SetCoverInstance::new(u, subsets).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dijkstra_matches_path_enumeration(raw in raw_graph(8, 5)) {
        let g = directed(&raw);
        let d = dijkstra(&g, 0);
        for e in g.edges() {
            if let Some(du) = d.get(e.tail) {
                prop_assert!(d.get(e.head).unwrap() <= du + e.weight);
            }
        }
        let mut best = vec![None; g.vertex_count()];
        for p in simple_paths(&g, 0) {
            let w = path_weight(&g, &p);
            let b: &mut Option<u64> = &mut best[*p.last().unwrap()];
            *b = Some(b.map_or(w, |x| x.min(w)));
        }
        prop_assert_eq!(d.as_slice(), &best[..]);
        prop_assert_eq!(bellman_ford(&g, 0), d);
    }

    #[test]
    fn bfs_tree_is_a_valid_arborescence(raw in raw_graph(10, 3), pick in prop::collection::vec(any::<bool>(), 10)) {
        let g = directed(&raw);
        let reach = reachable_from(&g, 0);
        let targets: Vec<usize> = (0..g.vertex_count()).filter(|&v| reach[v] && pick[v]).collect();
        let t = bfs_tree(&g, 0, &targets).unwrap();
        prop_assert!(t.structure_defect().is_none());
        prop_assert_eq!(t.root(), 0);
        for (p, c, w) in t.edges() {
            prop_assert_eq!(g.edge_weight(p, c), Some(w));
        }
        let parents: BTreeSet<usize> = t.edges().map(|(p, _, _)| p).collect();
        for v in t.vertices() {
            prop_assert!(v == 0 || parents.contains(&v) || targets.contains(&v), "leaf {} is not a target", v);
        }
        for &x in &targets {
            prop_assert!(t.contains(x));
        }
    }

    #[test]
    fn tarjan_matches_mutual_reachability(raw in raw_graph(10, 1)) {
        let g = directed(&raw);
        let scc = tarjan_scc(&g);
        let r = reach_matrix(&g);
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                let same = scc.component_of[u] == scc.component_of[v];
                prop_assert_eq!(same, r[u][v] && r[v][u]);
            }
        }
    }

    #[test]
    fn sps_is_the_set_of_tight_arcs(raw in raw_graph(12, 6)) {
        let g = directed(&raw);
        let d = bellman_ford(&g, 0);
        let sps = build_sps(&g, 0);
        for e in g.edges() {
            let tight = matches!((d.get(e.tail), d.get(e.head)), (Some(a), Some(b)) if a + e.weight == b);
            prop_assert_eq!(sps.graph().has_edge(e.tail, e.head), tight);
        }
    }

    #[test]
    fn shortest_paths_are_exactly_the_subgraph_paths(raw in raw_graph(7, 3)) {
        let g = directed(&raw);
        let d = dijkstra(&g, 0);
        let sps = build_sps(&g, 0);
        for p in simple_paths(&g, 0) {
            let shortest = Some(path_weight(&g, &p)) == d.get(*p.last().unwrap());
            let inside = p.windows(2).all(|w| sps.graph().has_edge(w[0], w[1]));
            prop_assert_eq!(shortest, inside, "path {:?}", p);
        }
    }

    #[test]
    fn subgraph_cycles_have_zero_weight(raw in raw_graph(10, 3)) {
        let g = directed(&raw);
        let sps = build_sps(&g, 0);
        for e in sps.cyclic_edges() {
            prop_assert_eq!(e.weight, 0);
        }
        if g.edges().iter().all(|e| e.weight > 0) {
            prop_assert!(sps.is_acyclic());
        }
    }

    #[test]
    fn pruning_keeps_exactly_the_terminal_paths(inst in instance(10, 4)) {
        let sps = build_sps(inst.graph(), 0);
        let pruned = sps.prune_to_terminals(inst.terminals()).unwrap();
        let r = reach_matrix(sps.graph());
        // The source always stays, even with no terminal.
        let on_path = |v: usize| v == 0 || (sps.contains(v) && r[0][v] && inst.terminals().iter().any(|&t| r[v][t]));
        for v in 0..inst.graph().vertex_count() {
            prop_assert_eq!(pruned.contains(v), on_path(v), "vertex {}", v);
        }
        for e in sps.graph().edges() {
            prop_assert_eq!(pruned.graph().has_edge(e.tail, e.head), on_path(e.tail) && on_path(e.head));
        }
    }

    #[test]
    fn greedy_is_within_harmonic_factor(sc in random_cover()) {
        let g = greedy_cover(&sc);
        let all: Vec<usize> = (0..sc.subsets().len()).collect();
        prop_assert_eq!(g.covered, sc.covers(&all));
        prop_assert_eq!(g.clone(), greedy_cover(&sc));
        if g.covered {
            prop_assert!(sc.covers(&g.chosen));
            let opt = exact_cover(&sc).unwrap();
            prop_assert!(sc.covers(&opt.chosen));
            let lhs = BigRational::from_integer(BigInt::from(g.total_weight));
            let rhs = harmonic(sc.universe_size()) * BigRational::from_integer(BigInt::from(opt.total_weight));
            prop_assert!(lhs <= rhs);
        }
    }

    #[test]
    fn approximations_are_feasible_and_deterministic(inst in instance(12, 4)) {
        let a = approx_uvdst(&inst).unwrap();
        prop_assert!(verify_solution(&inst, &a.tree, false).passed());
        prop_assert_eq!(&a, &approx_uvdst(&inst).unwrap());
        let s = solve_sspt(&inst).unwrap();
        prop_assert!(verify_solution(&inst, &s.tree, true).passed());
        prop_assert_eq!(s, solve_sspt(&inst).unwrap());
    }

    #[test]
    fn oracle_matches_arborescence_enumeration(inst in instance(7, 2)) {
        prop_assume!(search_space(&inst) <= 50_000);
        let rep = exact_uvdst(&inst, &OracleBudget::default()).unwrap();
        prop_assert!(verify_solution(&inst, &rep.tree, false).passed());
        prop_assert_eq!(rep.nt_count, inst.nt_count(&rep.tree));
        prop_assert_eq!(Some(rep.nt_count), arborescence_oracle(&inst));
    }

    #[test]
    fn extra_edges_never_increase_opt(inst in instance(10, 3), extra in (0usize..10, 0usize..10, 0u64..=3)) {
        let g = inst.graph();
        let (u, v, w) = (extra.0 % g.vertex_count(), extra.1 % g.vertex_count(), extra.2);
        let mut edges: Vec<Edge> = g.edges().to_vec();
        edges.push(Edge::new(u, v, w));
        let bigger = inst.with_graph(Graph::new(g.vertex_count(), edges, true).unwrap());
        let budget = OracleBudget::default();
        let before = exact_uvdst(&inst, &budget).unwrap().nt_count;
        let after = exact_uvdst(&bigger, &budget).unwrap().nt_count;
        prop_assert!(after <= before);
    }

    #[test]
    fn gadget_trees_and_covers_correspond(sc in random_cover(), pick in prop::collection::vec(any::<bool>(), 8)) {
        prop_assume!(sc.is_feasible());
        let (inst, map) = gadget_from_set_cover(&sc);
        let rep = exact_sspt(&inst, &OracleBudget::default()).unwrap();
        let cover = map_tree_to_cover(&rep.tree, &map).unwrap();
        prop_assert!(sc.covers(&cover.chosen));
        prop_assert_eq!(cover.chosen.len(), rep.nt_count);
        prop_assert_eq!(rep.nt_count, exact_cover(&SetCoverInstance::unweighted(
            sc.universe_size(),
            sc.subsets().iter().map(|s| s.members.clone()).collect(),
        ).unwrap()).unwrap().chosen.len());

        let chosen: Vec<usize> = (0..sc.subsets().len()).filter(|&i| pick[i]).collect();
        if sc.covers(&chosen) {
            let tree = lift_cover_to_tree(&sc, &chosen, &map).unwrap();
            prop_assert!(verify_solution(&inst, &tree, true).passed());
            prop_assert_eq!(inst.nt_count(&tree), chosen.len());
        } else {
            prop_assert!(lift_cover_to_tree(&sc, &chosen, &map).is_err());
        }
    }

    #[test]
    fn undirected_reduction_preserves_opt(inst in instance(9, 3)) {
        prop_assume!(!inst.graph().is_directed());
        let budget = OracleBudget::default();
        let red = usspt_to_dsspt(&inst);
        prop_assert!(red.graph().is_directed());
        prop_assert_eq!(exact_sspt(&inst, &budget).unwrap().nt_count, exact_sspt(&red, &budget).unwrap().nt_count);
    }

    #[test]
    fn acyclic_reduction_makes_every_arc_tight(n in 2usize..10, seed in any::<u64>()) {
        // Forward arcs only, each vertex fed by an earlier one.
        let mut edges = Vec::new();
        let mut x = seed;
        let mut next = |m: usize| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 33) as usize % m
        };
        for v in 1..n {
            edges.push((next(v), v, 1));
            for u in 0..v {
                if next(4) == 0 {
                    edges.push((u, v, 1));
                }
            }
        }
        let inst = Instance::new(Graph::directed(n, &edges).unwrap(), 0, vec![n - 1], None).unwrap();
        let red = acyclic_uvdst_to_usspt(&inst).unwrap();
        let d = bellman_ford(red.graph(), 0);
        for e in inst.graph().edges() {
            let w = red.graph().edge_weight(e.tail, e.head).unwrap();
            prop_assert_eq!(d.get(e.tail).unwrap() + w, d.get(e.head).unwrap());
        }
    }

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>(), n in 1usize..25, radius in 1usize..5) {
        let families = [
            Family::ShallowRandom { n, radius, chord_prob: 0.1, max_weight: 9 },
            Family::RandomGnp { n, p: 0.2, directed: seed % 2 == 0, max_weight: 9 },
            Family::Gadget { subsets: n % 6 + 1, universe: n % 7 + 1, density: 0.3 },
            Family::Grid { rows: n % 4 + 1, cols: radius, max_weight: 3 },
        ];
        for family in families {
            let shallow_radius = match family {
                Family::ShallowRandom { radius, .. } => Some(radius as u64),
                _ => None,
            };
            let mut spec = GeneratorSpec::new(family, seed);
            spec.max_vertex_weight = (seed % 3 == 0).then_some(4);
            let inst = generate(&spec).unwrap().instance;
            let text = serialize_instance(&inst);
            prop_assert_eq!(&parse_instance(&text).unwrap(), &inst);
            prop_assert_eq!(serialize_instance(&generate(&spec).unwrap().instance), text);
            if let Some(r) = shallow_radius {
                let rep = shallowness(inst.graph(), 0, &RelevantSet::AllReachable).unwrap();
                prop_assert!(rep.radius_hops <= r);
            }
        }
    }
}
