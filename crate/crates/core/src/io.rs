//! Line-oriented text formats for instances, solutions and set cover inputs.
//!
//! Every format starts with a `<kind> <version>` header line. Blank lines and
//! lines starting with `#` are ignored by the parsers; the serializers emit
//! the canonical form (fixed line order, sorted terminals and edges, no
//! comments) so `serialize(parse(text)) == text` for canonical text. The
//! grammar is spelled out in `docs/formats.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;

use crate::graph::{Edge, Graph, VertexId, Weight};
use crate::instance::Instance;
use crate::set_cover::{CoverSubset, SetCoverInstance};
use crate::steiner::{BoundCertificate, SolutionReport};
use crate::tree::Arborescence;

pub const INSTANCE_HEADER: &str = "sspt-instance";
pub const SOLUTION_HEADER: &str = "sspt-solution";
pub const SET_COVER_HEADER: &str = "set-cover";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid instance: {0}")]
    InvariantViolation(String),
}

fn parse_err(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        reason: reason.into(),
    }
}

// Meaningful lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number<T: FromStr>(line: usize, field: &str, token: Option<&str>) -> Result<T, FormatError> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {field}")))?;
    token
        .parse()
        .map_err(|_| parse_err(line, format!("{field}: `{token}` is not a valid number")))
}

fn check_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    kind: &str,
) -> Result<(), FormatError> {
    let (no, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut tok = first.split_whitespace();
    if tok.next() != Some(kind) {
        return Err(parse_err(no, format!("expected header `{kind} {FORMAT_VERSION}`")));
    }
    let version: u32 = number(no, "format version", tok.next())?;
    if version != FORMAT_VERSION {
        return Err(parse_err(no, format!("unsupported format version {version}")));
    }
    if tok.next().is_some() {
        return Err(parse_err(no, "trailing tokens after header"));
    }
    Ok(())
}

fn once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<(), FormatError> {
    if slot.is_some() {
        return Err(parse_err(line, format!("duplicate `{key}` line")));
    }
    *slot = Some(value);
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut lines = content_lines(text);
    check_header(&mut lines, INSTANCE_HEADER)?;

    let mut directed = None;
    let mut vertices: Option<usize> = None;
    let mut source: Option<VertexId> = None;
    let mut terminals: Option<Vec<VertexId>> = None;
    let mut weights: Option<Vec<u64>> = None;
    let mut edges = Vec::new();

    for (no, line) in lines {
        let mut tok = line.split_whitespace();
        let key = tok.next().unwrap_or_default();
        match key {
            "directed" => {
                let v = match tok.next() {
                    Some("true") => true,
                    Some("false") => false,
                    _ => return Err(parse_err(no, "directed: expected `true` or `false`")),
                };
                once(&mut directed, v, no, key)?;
            }
            "vertices" => once(&mut vertices, number(no, "vertex count", tok.next())?, no, key)?,
            "source" => once(&mut source, number(no, "source", tok.next())?, no, key)?,
            "terminals" => {
                let ts = tok
                    .by_ref()
                    .map(|t| number(no, "terminal", Some(t)))
                    .collect::<Result<Vec<VertexId>, _>>()?;
                once(&mut terminals, ts, no, key)?;
            }
            "edge" => {
                let u = number(no, "edge tail", tok.next())?;
                let v = number(no, "edge head", tok.next())?;
                let w: Weight = number(no, "edge weight", tok.next())?;
                edges.push((no, Edge::new(u, v, w)));
            }
            "vertex-weights" => {
                let ws = tok
                    .by_ref()
                    .map(|t| number(no, "vertex weight", Some(t)))
                    .collect::<Result<Vec<u64>, _>>()?;
                once(&mut weights, ws, no, key)?;
            }
            other => return Err(parse_err(no, format!("unknown key `{other}`"))),
        }
        if tok.next().is_some() {
            return Err(parse_err(no, format!("trailing tokens on `{key}` line")));
        }
    }

    let missing = |k: &str| parse_err(0, format!("missing `{k}` line"));
    let directed = directed.ok_or_else(|| missing("directed"))?;
    let n = vertices.ok_or_else(|| missing("vertices"))?;
    let source = source.ok_or_else(|| missing("source"))?;
    let terminals = terminals.ok_or_else(|| missing("terminals"))?;

    for &(no, e) in &edges {
        if e.tail >= n || e.head >= n {
            return Err(parse_err(no, format!("edge ({}, {}) outside [0, {n})", e.tail, e.head)));
        }
    }
    if let Some(w) = &weights {
        if let Some(&t) = terminals.iter().find(|&&t| t < w.len() && w[t] != 0) {
            return Err(FormatError::InvariantViolation(format!(
                "terminal {t} has nonzero vertex weight {}",
                w[t]
            )));
        }
    }
    let graph = Graph::new(n, edges.into_iter().map(|(_, e)| e), directed)
        .map_err(|e| FormatError::InvariantViolation(e.to_string()))?;
    Instance::new(graph, source, terminals, weights).map_err(|e| FormatError::InvariantViolation(e.to_string()))
}

pub fn serialize_instance(inst: &Instance) -> String {
    let g = inst.graph();
    let mut out = String::new();
    let _ = writeln!(out, "{INSTANCE_HEADER} {FORMAT_VERSION}");
    let _ = writeln!(out, "directed {}", g.is_directed());
    let _ = writeln!(out, "vertices {}", g.vertex_count());
    let _ = writeln!(out, "source {}", inst.source());
    out.push_str("terminals");
    for t in inst.terminals() {
        let _ = write!(out, " {t}");
    }
    out.push('\n');
    for e in g.edges() {
        // Undirected graphs store both orientations; write each edge once.
        if g.is_directed() || e.tail < e.head {
            let _ = writeln!(out, "edge {} {} {}", e.tail, e.head, e.weight);
        }
    }
    if let Some(w) = inst.vertex_weights() {
        out.push_str("vertex-weights");
        for x in w {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}

/// Contents of a solution file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile {
    pub tree: Arborescence,
    pub nt_count: usize,
    pub nt_weight: u64,
    pub certificate: Option<BoundCertificate>,
}

impl From<&SolutionReport> for SolutionFile {
    fn from(r: &SolutionReport) -> Self {
        SolutionFile {
            tree: r.tree.clone(),
            nt_count: r.nt_count,
            nt_weight: r.nt_weight,
            certificate: r.certificate.clone(),
        }
    }
}

pub fn serialize_solution(sol: &SolutionFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SOLUTION_HEADER} {FORMAT_VERSION}");
    let _ = writeln!(out, "root {}", sol.tree.root());
    for (p, c, w) in sol.tree.edges() {
        let _ = writeln!(out, "parent {c} {p} {w}");
    }
    let _ = writeln!(out, "nt-count {}", sol.nt_count);
    let _ = writeln!(out, "nt-weight {}", sol.nt_weight);
    if let Some(c) = &sol.certificate {
        let stretch = c
            .stretch
            .as_ref()
            .map_or_else(|| "unbounded".to_string(), |s| s.to_string());
        let _ = writeln!(
            out,
            "certificate radius={} radius-cover={} stretch={} harmonic={} components={} cover-size={} cover-weight={}",
            c.radius, c.radius_cover, stretch, c.harmonic, c.source_components, c.cover_size, c.cover_weight
        );
    }
    out
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, FormatError> {
    let mut lines = content_lines(text);
    check_header(&mut lines, SOLUTION_HEADER)?;
    let mut root: Option<VertexId> = None;
    let mut parents = BTreeMap::new();
    let mut nt_count = None;
    let mut nt_weight = None;
    let mut certificate = None;
    for (no, line) in lines {
        let mut tok = line.split_whitespace();
        let key = tok.next().unwrap_or_default();
        match key {
            "root" => once(&mut root, number(no, "root", tok.next())?, no, key)?,
            "parent" => {
                let c: VertexId = number(no, "child", tok.next())?;
                let p: VertexId = number(no, "parent", tok.next())?;
                let w: Weight = number(no, "weight", tok.next())?;
                if parents.insert(c, (p, w)).is_some() {
                    return Err(parse_err(no, format!("vertex {c} has two parents")));
                }
            }
            "nt-count" => once(&mut nt_count, number(no, "nt-count", tok.next())?, no, key)?,
            "nt-weight" => once(&mut nt_weight, number(no, "nt-weight", tok.next())?, no, key)?,
            "certificate" => {
                let cert = parse_certificate(no, tok.by_ref())?;
                once(&mut certificate, cert, no, key)?;
            }
            other => return Err(parse_err(no, format!("unknown key `{other}`"))),
        }
        if tok.next().is_some() {
            return Err(parse_err(no, format!("trailing tokens on `{key}` line")));
        }
    }
    let root = root.ok_or_else(|| parse_err(0, "missing `root` line"))?;
    Ok(SolutionFile {
        tree: Arborescence::from_parent_map(root, parents),
        nt_count: nt_count.ok_or_else(|| parse_err(0, "missing `nt-count` line"))?,
        nt_weight: nt_weight.ok_or_else(|| parse_err(0, "missing `nt-weight` line"))?,
        certificate,
    })
}

fn parse_certificate<'a>(
    no: usize,
    tokens: impl Iterator<Item = &'a str>,
) -> Result<BoundCertificate, FormatError> {
    let mut fields = BTreeMap::new();
    for t in tokens {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| parse_err(no, format!("certificate field `{t}` is not key=value")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| parse_err(no, format!("certificate lacks `{k}`")))
    };
    let rational = |k: &str, v: &str| {
        BigRational::from_str(v).map_err(|_| parse_err(no, format!("{k}: `{v}` is not a fraction")))
    };
    let stretch = match get("stretch")? {
        "unbounded" => None,
        v => Some(rational("stretch", v)?),
    };
    Ok(BoundCertificate {
        radius: number(no, "radius", Some(get("radius")?))?,
        radius_cover: number(no, "radius-cover", Some(get("radius-cover")?))?,
        stretch,
        harmonic: rational("harmonic", get("harmonic")?)?,
        source_components: number(no, "components", Some(get("components")?))?,
        cover_size: number(no, "cover-size", Some(get("cover-size")?))?,
        cover_weight: number(no, "cover-weight", Some(get("cover-weight")?))?,
    })
}

pub fn parse_set_cover(text: &str) -> Result<SetCoverInstance, FormatError> {
    let mut lines = content_lines(text);
    check_header(&mut lines, SET_COVER_HEADER)?;
    let mut universe: Option<usize> = None;
    let mut subsets = Vec::new();
    for (no, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next().unwrap_or_default() {
            "universe" => {
                once(&mut universe, number(no, "universe size", tok.next())?, no, "universe")?;
                if tok.next().is_some() {
                    return Err(parse_err(no, "trailing tokens on `universe` line"));
                }
            }
            "subset" => {
                let weight = number(no, "subset weight", tok.next())?;
                let members = tok
                    .map(|t| number(no, "member", Some(t)))
                    .collect::<Result<Vec<usize>, _>>()?;
                subsets.push(CoverSubset {
                    owner: subsets.len(),
                    members,
                    weight,
                });
            }
            other => return Err(parse_err(no, format!("unknown key `{other}`"))),
        }
    }
    let universe = universe.ok_or_else(|| parse_err(0, "missing `universe` line"))?;
    SetCoverInstance::new(universe, subsets).map_err(|e| FormatError::InvariantViolation(e.to_string()))
}

pub fn serialize_set_cover(sc: &SetCoverInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SET_COVER_HEADER} {FORMAT_VERSION}");
    let _ = writeln!(out, "universe {}", sc.universe_size());
    for s in sc.subsets() {
        let _ = write!(out, "subset {}", s.weight);
        for m in &s.members {
            let _ = write!(out, " {m}");
        }
        out.push('\n');
    }
    out
}
