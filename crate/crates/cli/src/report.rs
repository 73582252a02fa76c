use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use serde::Serialize;
use sha2::{Digest, Sha256};
use sspt_core::io::serialize_instance;
use sspt_core::steiner::SolutionVerification;
use sspt_core::{Instance, SolutionReport};

/// Machine-readable record of one command run.
#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance_digest: Option<String>,
    pub timings_ms: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgraph: Option<SubgraphSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SubgraphSummary {
    pub pruned: bool,
    pub vertices: usize,
    pub edges: usize,
    pub acyclic: bool,
    pub radius_hops: u64,
    pub sp_radius_hops: u64,
}

#[derive(Debug, Serialize)]
pub struct SolutionSummary {
    pub vertices: usize,
    pub nt_count: usize,
    pub nt_weight: u64,
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub issues: Vec<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct Certificate {
    /// nt_count, or nt_weight for weighted modes.
    pub objective: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_cover: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stretch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_components: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover_size: Option<usize>,
    /// Approximation factor (R or stretch) * H(|S|).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms
            .insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

pub fn digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(serialize_instance(inst).as_bytes()))
}

pub fn summarize(report: &SolutionReport) -> SolutionSummary {
    SolutionSummary {
        vertices: report.tree.len(),
        nt_count: report.nt_count,
        nt_weight: report.nt_weight,
    }
}

pub fn verdict(v: &SolutionVerification) -> Verdict {
    Verdict {
        passed: v.passed(),
        issues: v.issues.iter().map(|i| format!("{i:?}")).collect(),
    }
}

/// `approx / opt` as an exact fraction; `0/0` counts as ratio 1.
pub fn ratio(approx: u64, opt: u64) -> Option<BigRational> {
    match (approx, opt) {
        (0, 0) => Some(BigRational::from_integer(1.into())),
        (_, 0) => None,
        (a, o) => Some(BigRational::new(a.into(), o.into())),
    }
}

pub fn certificate(report: &SolutionReport, objective: u64, opt: Option<u64>) -> Certificate {
    let mut c = Certificate {
        objective,
        opt,
        ratio: opt.map(|o| ratio(objective, o).map_or_else(|| "inf".to_string(), |r| r.to_string())),
        ..Default::default()
    };
    if let Some(b) = &report.certificate {
        c.radius = Some(b.radius);
        c.radius_cover = Some(b.radius_cover);
        c.stretch = Some(b.stretch.as_ref().map_or_else(|| "unbounded".into(), |s| s.to_string()));
        c.harmonic = Some(b.harmonic.to_string());
        c.source_components = Some(b.source_components);
        c.cover_size = Some(b.cover_size);
        c.bound = Some(b.factor().map_or_else(|| "unbounded".into(), |f| f.to_string()));
    }
    c
}

pub fn print_human(r: &RunReport) {
    println!("command: {}", r.command);
    if let Some(m) = &r.mode {
        println!("mode: {m}");
    }
    if let Some(d) = &r.instance_digest {
        println!("instance sha256: {d}");
    }
    if let Some(s) = &r.subgraph {
        println!(
            "subgraph{}: {} vertices, {} edges, acyclic={}",
            if s.pruned { " (pruned to terminals)" } else { "" },
            s.vertices,
            s.edges,
            s.acyclic
        );
        println!("hop radius: {} (along shortest paths: {})", s.radius_hops, s.sp_radius_hops);
    }
    if let Some(s) = &r.solution {
        println!(
            "tree: {} vertices, nt_count {}, nt_weight {}",
            s.vertices, s.nt_count, s.nt_weight
        );
    }
    if let Some(c) = &r.certificate {
        print!("objective {}", c.objective);
        if let Some(o) = c.opt {
            print!(", OPT {o}");
        }
        if let Some(x) = &c.ratio {
            print!(", ratio {x}");
        }
        println!();
        if let (Some(r), Some(h), Some(b)) = (c.radius, &c.harmonic, &c.bound) {
            println!("R {r}, H(|S|) {h}, bound {b}");
        }
    }
    if let Some(v) = &r.verification {
        println!("verification: {}", if v.passed { "PASS" } else { "FAIL" });
        for i in &v.issues {
            println!("  {i}");
        }
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
    for (stage, ms) in &r.timings_ms {
        println!("time {stage}: {ms:.3} ms");
    }
}
