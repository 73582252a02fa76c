//! Seeded instance generators.
//!
//! All randomness comes from a `ChaCha8Rng` seeded with `GeneratorSpec::seed`,
//! so a spec always yields the same instance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{reachable_from, Edge, Graph, VertexId, Weight, MAX_WEIGHT};
use crate::instance::Instance;
use crate::reductions::{gadget_from_set_cover, GadgetMap};
use crate::set_cover::{CoverSubset, SetCoverInstance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, GenerateError> {
    Err(GenerateError::InvalidSpec(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Directed layers; the first layer must hold only the source. Each arc
    /// between consecutive layers appears with probability `edge_prob`, and
    /// every vertex gets at least one arc from the previous layer.
    Layered {
        widths: Vec<usize>,
        edge_prob: f64,
        max_weight: Weight,
    },
    /// Erdős–Rényi graph with weights in `0..=max_weight`.
    RandomGnp {
        n: usize,
        p: f64,
        directed: bool,
        max_weight: Weight,
    },
    /// Directed graph whose every vertex is within `radius` hops of the source.
    ShallowRandom {
        n: usize,
        radius: usize,
        chord_prob: f64,
        max_weight: Weight,
    },
    /// Set cover gadget over a random feasible set cover instance.
    Gadget {
        subsets: usize,
        universe: usize,
        density: f64,
    },
    /// Undirected grid, source in the corner.
    Grid {
        rows: usize,
        cols: usize,
        max_weight: Weight,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    /// Fraction of eligible vertices made terminals (at least one if any).
    /// Ignored by `Gadget`, whose terminals are the elements.
    pub terminal_fraction: f64,
    /// When set, non-terminal vertex weights are drawn from `1..=max`.
    pub max_vertex_weight: Option<u64>,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec {
            family,
            seed,
            terminal_fraction: 0.3,
            max_vertex_weight: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    /// Present for the gadget family.
    pub gadget: Option<(SetCoverInstance, GadgetMap)>,
}

fn check_prob(name: &str, p: f64) -> Result<(), GenerateError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        invalid(format!("{name} must lie in [0, 1], got {p}"))
    }
}

fn check_weight(max: Weight) -> Result<(), GenerateError> {
    if max > MAX_WEIGHT {
        invalid(format!("max weight {max} exceeds {MAX_WEIGHT}"))
    } else {
        Ok(())
    }
}

fn positive_weight(rng: &mut ChaCha8Rng, max: Weight) -> Weight {
    rng.gen_range(1..=max.max(1))
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated, GenerateError> {
    check_prob("terminal fraction", spec.terminal_fraction)?;
    if spec.max_vertex_weight == Some(0) {
        return invalid("max vertex weight must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (graph, gadget) = match &spec.family {
        Family::Layered {
            widths,
            edge_prob,
            max_weight,
        } => (layered(&mut rng, widths, *edge_prob, *max_weight)?, None),
        Family::RandomGnp {
            n,
            p,
            directed,
            max_weight,
        } => (gnp(&mut rng, *n, *p, *directed, *max_weight)?, None),
        Family::ShallowRandom {
            n,
            radius,
            chord_prob,
            max_weight,
        } => (shallow(&mut rng, *n, *radius, *chord_prob, *max_weight)?, None),
        Family::Grid {
            rows,
            cols,
            max_weight,
        } => (grid(&mut rng, *rows, *cols, *max_weight)?, None),
        Family::Gadget {
            subsets,
            universe,
            density,
        } => {
            let sc = random_set_cover(&mut rng, *subsets, *universe, *density)?;
            let (inst, map) = gadget_from_set_cover(&sc);
            (inst.graph().clone(), Some((sc, map, inst.terminals().to_vec())))
        }
    };

    let terminals = match &gadget {
        Some((_, _, ts)) => ts.clone(),
        None => pick_terminals(&mut rng, &graph, spec.terminal_fraction),
    };
    let weights = spec.max_vertex_weight.map(|max| {
        (0..graph.vertex_count())
            .map(|_| rng.gen_range(1..=max))
            .collect::<Vec<u64>>()
    });
    let instance = Instance::new(graph, 0, terminals, weights)
        .map_err(|e| GenerateError::InvalidSpec(e.to_string()))?;
    Ok(Generated {
        instance,
        gadget: gadget.map(|(sc, map, _)| (sc, map)),
    })
}

// Terminals are drawn among vertices reachable from the source 0.
fn pick_terminals(rng: &mut ChaCha8Rng, g: &Graph, fraction: f64) -> Vec<VertexId> {
    if g.vertex_count() == 0 {
        return Vec::new();
    }
    let reach = reachable_from(g, 0);
    let mut eligible: Vec<VertexId> = (1..g.vertex_count()).filter(|&v| reach[v]).collect();
    if eligible.is_empty() {
        return Vec::new();
    }
    let k = ((fraction * eligible.len() as f64).round() as usize).clamp(1, eligible.len());
    eligible.shuffle(rng);
    eligible.truncate(k);
    eligible.sort_unstable();
    eligible
}

fn layered(
    rng: &mut ChaCha8Rng,
    widths: &[usize],
    edge_prob: f64,
    max_weight: Weight,
) -> Result<Graph, GenerateError> {
    check_prob("edge probability", edge_prob)?;
    check_weight(max_weight)?;
    if widths.first() != Some(&1) {
        return invalid("the first layer must contain only the source");
    }
    if widths.contains(&0) {
        return invalid("layers must be non-empty");
    }
    let mut start = vec![0usize];
    for w in widths {
        start.push(start.last().unwrap() + w);
    }
    let mut edges = Vec::new();
    for i in 1..widths.len() {
        let prev = start[i - 1]..start[i];
        for v in start[i]..start[i + 1] {
            let before = edges.len();
            for u in prev.clone() {
                if rng.gen_bool(edge_prob) {
                    edges.push(Edge::new(u, v, positive_weight(rng, max_weight)));
                }
            }
            if edges.len() == before {
                let u = rng.gen_range(prev.clone());
                edges.push(Edge::new(u, v, positive_weight(rng, max_weight)));
            }
        }
    }
    Graph::new(start[widths.len()], edges, true).map_err(|e| GenerateError::InvalidSpec(e.to_string()))
}

fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64, directed: bool, max_weight: Weight) -> Result<Graph, GenerateError> {
    check_prob("edge probability", p)?;
    check_weight(max_weight)?;
    if n == 0 {
        return invalid("a graph needs at least the source");
    }
    let mut edges = Vec::new();
    for u in 0..n {
        let first = if directed { 0 } else { u + 1 };
        for v in first..n {
            if u != v && rng.gen_bool(p) {
                edges.push(Edge::new(u, v, rng.gen_range(0..=max_weight)));
            }
        }
    }
    Graph::new(n, edges, directed).map_err(|e| GenerateError::InvalidSpec(e.to_string()))
}

fn shallow(
    rng: &mut ChaCha8Rng,
    n: usize,
    radius: usize,
    chord_prob: f64,
    max_weight: Weight,
) -> Result<Graph, GenerateError> {
    check_prob("chord probability", chord_prob)?;
    check_weight(max_weight)?;
    if n == 0 {
        return invalid("a graph needs at least the source");
    }
    if radius == 0 && n > 1 {
        return invalid("radius 0 only admits the single-vertex graph");
    }
    let mut layer = vec![0usize; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let parents: Vec<VertexId> = (0..v).filter(|&u| layer[u] < radius).collect();
        let p = *parents.choose(rng).expect("the source is always eligible");
        layer[v] = layer[p] + 1;
        edges.push(Edge::new(p, v, positive_weight(rng, max_weight)));
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(chord_prob) {
                edges.push(Edge::new(u, v, positive_weight(rng, max_weight)));
            }
        }
    }
    Graph::new(n, edges, true).map_err(|e| GenerateError::InvalidSpec(e.to_string()))
}

fn grid(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max_weight: Weight) -> Result<Graph, GenerateError> {
    check_weight(max_weight)?;
    if rows == 0 || cols == 0 {
        return invalid("grid dimensions must be positive");
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push(Edge::new(id(r, c), id(r, c + 1), positive_weight(rng, max_weight)));
            }
            if r + 1 < rows {
                edges.push(Edge::new(id(r, c), id(r + 1, c), positive_weight(rng, max_weight)));
            }
        }
    }
    Graph::new(rows * cols, edges, false).map_err(|e| GenerateError::InvalidSpec(e.to_string()))
}

/// Random unit-weight set cover instance in which every element lies in some subset.
pub fn random_set_cover<R: Rng>(
    rng: &mut R,
    subsets: usize,
    universe: usize,
    density: f64,
) -> Result<SetCoverInstance, GenerateError> {
    check_prob("density", density)?;
    if subsets == 0 && universe > 0 {
        return invalid("a non-empty universe needs at least one subset");
    }
    let mut members = vec![Vec::new(); subsets];
    for e in 0..universe {
        let mut hit = false;
        for m in members.iter_mut() {
            if rng.gen_bool(density) {
                m.push(e);
                hit = true;
            }
        }
        if !hit {
            let i = rng.gen_range(0..subsets);
            members[i].push(e);
        }
    }
    let subsets = members
        .into_iter()
        .enumerate()
        .map(|(owner, members)| CoverSubset {
            owner,
            members,
            weight: 1,
        })
        .collect();
    SetCoverInstance::new(universe, subsets).map_err(|e| GenerateError::InvalidSpec(e.to_string()))
}
