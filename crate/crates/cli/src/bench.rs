use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sspt_core::io::{serialize_solution, SolutionFile};
use sspt_core::oracle::{OracleError, DEFAULT_MAX_CANDIDATES};
use sspt_core::par;
use sspt_core::{verify_solution, Execution, Oracle, OracleBudget};

use crate::report::ratio;
use crate::{load_instance, Failure, Mode, EXIT_USAGE, EXIT_VERIFY};

#[derive(clap::Args)]
pub struct BenchArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, env = "SSPT_ORACLE_BUDGET", default_value_t = DEFAULT_MAX_CANDIDATES)]
    budget: usize,
    /// Leave out wall times so two runs print identical tables.
    #[arg(long)]
    no_timings: bool,
    /// Print CSV instead of an aligned table.
    #[arg(long)]
    csv: bool,
    /// Write each approximate solution to DIR/<name>.sol.
    #[arg(long, value_name = "DIR")]
    solutions: Option<PathBuf>,
    /// Solve the corpus on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub instance: String,
    pub mode: &'static str,
    pub vertices: usize,
    pub terminals: usize,
    pub nt: Option<u64>,
    pub opt: Option<u64>,
    pub ratio: Option<String>,
    pub radius: Option<u64>,
    pub harmonic: Option<String>,
    pub bound: Option<String>,
    pub verified: bool,
    pub within_bound: bool,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
    #[serde(skip)]
    solution: Option<String>,
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "sspt"))
        .collect();
    files.sort();
    Ok(files)
}

fn bench_one(path: &Path, oracle: &Oracle) -> Row {
    let start = Instant::now();
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = Row {
        instance: name,
        mode: "",
        vertices: 0,
        terminals: 0,
        nt: None,
        opt: None,
        ratio: None,
        radius: None,
        harmonic: None,
        bound: None,
        verified: false,
        within_bound: true,
        status: String::new(),
        time_ms: None,
        solution: None,
    };
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(f) => {
            row.status = f.message;
            return row;
        }
    };
    let mode = Mode::pick(false, inst.is_weighted());
    row.mode = mode.name();
    row.vertices = inst.graph().vertex_count();
    row.terminals = inst.terminals().len();
    let sol = match mode.approx(&inst) {
        Ok(s) => s,
        Err(e) => {
            row.status = format!("infeasible: {e}");
            return row;
        }
    };
    let nt = mode.objective(&sol);
    row.nt = Some(nt);
    row.verified = verify_solution(&inst, &sol.tree, mode.needs_shortest()).passed();
    let factor = sol.certificate.as_ref().and_then(|c| c.factor());
    if let Some(c) = &sol.certificate {
        row.radius = Some(c.radius);
        row.harmonic = Some(c.harmonic.to_string());
        row.bound = Some(factor.as_ref().map_or_else(|| "unbounded".into(), |f| f.to_string()));
    }
    row.status = match mode.exact(&inst, oracle) {
        Ok(opt) => {
            let o = mode.objective(&opt);
            row.opt = Some(o);
            let r = ratio(nt, o);
            row.within_bound = match (&r, &factor) {
                (Some(r), Some(f)) => r <= f,
                (None, _) => false,
                (Some(_), None) => true,
            };
            row.ratio = Some(r.map_or_else(|| "inf".into(), |r| r.to_string()));
            "ok".into()
        }
        Err(e @ (OracleError::TooLarge { .. } | OracleError::TimeLimit(_))) => format!("no-opt: {e}"),
        Err(e) => format!("oracle: {e}"),
    };
    if !row.verified {
        row.status = "verification failed".into();
    }
    row.solution = Some(serialize_solution(&SolutionFile::from(&sol)));
    row.time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    row
}

const HEADERS: [&str; 12] = [
    "instance", "mode", "n", "|X|", "nt", "opt", "ratio", "R", "H(|S|)", "bound", "status", "time_ms",
];

fn cells(r: &Row, timings: bool) -> Vec<String> {
    let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
    let num = |v: Option<u64>| v.map_or_else(|| "-".into(), |x| x.to_string());
    let mut c = vec![
        r.instance.clone(),
        r.mode.to_string(),
        r.vertices.to_string(),
        r.terminals.to_string(),
        num(r.nt),
        num(r.opt),
        opt(&r.ratio),
        num(r.radius),
        opt(&r.harmonic),
        opt(&r.bound),
        r.status.clone(),
    ];
    if timings {
        c.push(r.time_ms.map_or_else(|| "-".into(), |t| format!("{t:.3}")));
    }
    c
}

pub fn render_table(rows: &[Row], timings: bool, csv: bool) -> String {
    let cols = if timings { HEADERS.len() } else { HEADERS.len() - 1 };
    let mut lines: Vec<Vec<String>> = vec![HEADERS[..cols].iter().map(|h| h.to_string()).collect()];
    lines.extend(rows.iter().map(|r| cells(r, timings)));
    let mut out = String::new();
    if csv {
        for l in &lines {
            let quoted: Vec<String> = l
                .iter()
                .map(|c| if c.contains([',', '"']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
                .collect();
            let _ = writeln!(out, "{}", quoted.join(","));
        }
        return out;
    }
    let widths: Vec<usize> = (0..cols)
        .map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
        .collect();
    for l in &lines {
        let padded: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    }
    out
}

pub fn run(json: bool, args: BenchArgs) -> Result<u8, Failure> {
    let files = corpus_files(&args.corpus)?;
    // Instances run concurrently; each one is solved on a single thread.
    let oracle = Oracle::new(OracleBudget::with_max_candidates(args.budget)).with_execution(Execution::Sequential);
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    let mut rows = par::map(exec, &files, |p| bench_one(p, &oracle));
    if args.no_timings {
        for r in &mut rows {
            r.time_ms = None;
        }
    }
    if let Some(dir) = &args.solutions {
        fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
        for r in &rows {
            if let Some(text) = &r.solution {
                let path = dir.join(format!("{}.sol", r.instance));
                fs::write(&path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            }
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
    } else {
        print!("{}", render_table(&rows, !args.no_timings, args.csv));
    }
    let ok = rows.iter().all(|r| r.within_bound && (r.nt.is_none() || r.verified));
    Ok(if ok { 0 } else { EXIT_VERIFY })
}
