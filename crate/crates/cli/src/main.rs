mod bench;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sspt_core::generate::{generate, Family, GeneratorSpec};
use sspt_core::io::{parse_instance, parse_set_cover, parse_solution, serialize_instance, serialize_solution, SolutionFile};
use sspt_core::oracle::DEFAULT_MAX_CANDIDATES;
use sspt_core::reductions::{acyclic_uvdst_to_usspt, gadget_from_set_cover, uvdst_to_dsspt, ReductionError};
use sspt_core::sps::{build_sps, shallowness, RelevantSet};
use sspt_core::steiner::solve_weighted_sspt;
use sspt_core::steiner::SolutionVerification;
use sspt_core::{
    approx_uvdst, approx_vdst, solve_sspt, verify_solution, Instance, Oracle, OracleBudget, OracleError, SolutionReport,
    SolveError,
};

use report::{certificate, digest, print_human, summarize, verdict, RunReport, SubgraphSummary};

#[derive(Parser)]
#[command(name = "sspt", version, about = "Steiner shortest path tree solver")]
struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Build the shortest path subgraph and report its shape.
    Sps {
        file: PathBuf,
        /// Prune to the vertices on shortest paths to terminals.
        #[arg(short = 'x')]
        prune: bool,
    },
    /// Run the approximation and write a solution file.
    Approx {
        file: PathBuf,
        /// Minimize the total vertex weight instead of the count.
        #[arg(long)]
        weighted: bool,
        /// Treat the file as a directed Steiner instance (no shortest path constraint).
        #[arg(long)]
        uvdst: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve exactly by enumeration. Weighted iff the file carries vertex weights.
    Exact {
        file: PathBuf,
        /// Largest number of candidate Steiner vertices to enumerate over.
        #[arg(long, env = "SSPT_ORACLE_BUDGET", default_value_t = DEFAULT_MAX_CANDIDATES)]
        budget: usize,
        #[arg(long)]
        uvdst: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Verify {
        file: PathBuf,
        solution: PathBuf,
        /// Also require every tree path to be a shortest path.
        #[arg(long)]
        shortest: bool,
    },
    /// Transform an instance.
    Reduce {
        file: PathBuf,
        #[arg(long = "to", value_enum)]
        target: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Approximate (and solve exactly when within budget) every `*.sspt` file of a directory.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Dsspt,
    Usspt,
    GadgetFromCover,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Layered,
    RandomGnp,
    ShallowRandom,
    Gadget,
    Grid,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    /// Layer widths for `layered`, first must be 1.
    #[arg(long, value_delimiter = ',', default_value = "1,4,4,4")]
    widths: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    radius: usize,
    #[arg(long, default_value_t = 0.05)]
    chord_prob: f64,
    #[arg(long, default_value_t = 10)]
    max_weight: u64,
    /// Directed `random-gnp` graph.
    #[arg(long)]
    directed: bool,
    #[arg(long, default_value_t = 6)]
    subsets: usize,
    #[arg(long, default_value_t = 8)]
    universe: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    #[arg(long, default_value_t = 0.3)]
    terminal_fraction: f64,
    /// Draw non-terminal vertex weights from 1..=MAX.
    #[arg(long, value_name = "MAX")]
    vertex_weights: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

pub(crate) const EXIT_VERIFY: u8 = 1;
pub(crate) const EXIT_USAGE: u8 = 2;
pub(crate) const EXIT_INFEASIBLE: u8 = 3;
pub(crate) const EXIT_BUDGET: u8 = 4;

#[derive(Debug)]
pub(crate) struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::MissingVertexWeights => EXIT_USAGE,
            _ => EXIT_INFEASIBLE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::TooLarge { .. } | OracleError::TimeLimit(_) => EXIT_BUDGET,
            OracleError::TerminalUnreachable(_) => EXIT_INFEASIBLE,
            OracleError::MissingVertexWeights => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        Failure::new(EXIT_INFEASIBLE, e.to_string())
    }
}

pub(crate) fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

pub(crate) fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Which problem a solve addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Sspt,
    WeightedSspt,
    Uvdst,
    Vdst,
}

impl Mode {
    pub fn pick(uvdst: bool, weighted: bool) -> Mode {
        match (uvdst, weighted) {
            (false, false) => Mode::Sspt,
            (false, true) => Mode::WeightedSspt,
            (true, false) => Mode::Uvdst,
            (true, true) => Mode::Vdst,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sspt => "sspt",
            Mode::WeightedSspt => "weighted-sspt",
            Mode::Uvdst => "uvdst",
            Mode::Vdst => "vdst",
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, Mode::WeightedSspt | Mode::Vdst)
    }

    pub fn needs_shortest(self) -> bool {
        matches!(self, Mode::Sspt | Mode::WeightedSspt)
    }

    pub fn approx(self, inst: &Instance) -> Result<SolutionReport, SolveError> {
        match self {
            Mode::Sspt => solve_sspt(inst),
            Mode::WeightedSspt => solve_weighted_sspt(inst),
            Mode::Uvdst => approx_uvdst(inst),
            Mode::Vdst => approx_vdst(inst),
        }
    }

    pub fn exact(self, inst: &Instance, oracle: &Oracle) -> Result<SolutionReport, OracleError> {
        match self {
            Mode::Sspt => oracle.sspt(inst),
            Mode::WeightedSspt => oracle.weighted_sspt(inst),
            Mode::Uvdst => oracle.uvdst(inst),
            Mode::Vdst => oracle.vdst(inst),
        }
    }

    pub fn objective(self, r: &SolutionReport) -> u64 {
        if self.is_weighted() {
            r.nt_weight
        } else {
            r.nt_count as u64
        }
    }
}

fn emit(json: bool, report: &RunReport) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    } else {
        print_human(report);
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let json = cli.json;
    match cli.command {
        Command::Gen(args) => gen(json, args),
        Command::Sps { file, prune } => {
            let mut rep = RunReport::new("sps");
            let inst = rep.time("parse", || load_instance(&file))?;
            rep.instance_digest = Some(digest(&inst));
            let g = inst.graph();
            let full = rep.time("build", || build_sps(g, inst.source()));
            let sps = if prune {
                rep.time("prune", || full.prune_to_terminals(inst.terminals()))
                    .map_err(|e| Failure::new(EXIT_INFEASIBLE, e.to_string()))?
            } else {
                full
            };
            let relevant = if prune {
                RelevantSet::Vertices(inst.terminals().to_vec())
            } else {
                RelevantSet::AllReachable
            };
            let shallow = shallowness(g, inst.source(), &relevant)
                .map_err(|e| Failure::new(EXIT_INFEASIBLE, e.to_string()))?;
            rep.subgraph = Some(SubgraphSummary {
                pruned: prune,
                vertices: sps.vertex_count(),
                edges: sps.edge_count(),
                acyclic: sps.is_acyclic(),
                radius_hops: shallow.radius_hops,
                sp_radius_hops: shallow.sp_radius_hops,
            });
            emit(json, &rep);
            Ok(0)
        }
        Command::Approx {
            file,
            weighted,
            uvdst,
            output,
        } => {
            let mode = Mode::pick(uvdst, weighted);
            let mut rep = RunReport::new("approx");
            rep.mode = Some(mode.name().into());
            let inst = rep.time("parse", || load_instance(&file))?;
            rep.instance_digest = Some(digest(&inst));
            let sol = rep.time("solve", || mode.approx(&inst))?;
            let check = rep.time("verify", || verify_solution(&inst, &sol.tree, mode.needs_shortest()));
            finish_solve(json, rep, mode, &sol, check, output)
        }
        Command::Exact {
            file,
            budget,
            uvdst,
            output,
        } => {
            let mut rep = RunReport::new("exact");
            let inst = rep.time("parse", || load_instance(&file))?;
            let mode = Mode::pick(uvdst, inst.is_weighted());
            rep.mode = Some(mode.name().into());
            rep.instance_digest = Some(digest(&inst));
            let oracle = Oracle::new(OracleBudget::with_max_candidates(budget));
            let approx = rep.time("solve", || mode.approx(&inst))?;
            let opt = rep.time("oracle", || mode.exact(&inst, &oracle))?;
            let check = rep.time("verify", || verify_solution(&inst, &opt.tree, mode.needs_shortest()));
            let opt_value = mode.objective(&opt);
            rep.certificate = Some(certificate(&approx, mode.objective(&approx), Some(opt_value)));
            rep.solution = Some(summarize(&opt));
            let passed = check.passed();
            rep.verification = Some(verdict(&check));
            if let Some(path) = &output {
                write(path, &serialize_solution(&SolutionFile::from(&opt)))?;
            }
            emit(json, &rep);
            Ok(if passed { 0 } else { EXIT_VERIFY })
        }
        Command::Verify {
            file,
            solution,
            shortest,
        } => {
            let mut rep = RunReport::new("verify");
            let inst = load_instance(&file)?;
            rep.instance_digest = Some(digest(&inst));
            let sol = parse_solution(&read(&solution)?)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", solution.display())))?;
            let check = rep.time("verify", || verify_solution(&inst, &sol.tree, shortest));
            let mut v = verdict(&check);
            let nt = inst.nt_count(&sol.tree);
            let ntw = inst.nt_weight(&sol.tree);
            if nt != sol.nt_count {
                v.passed = false;
                v.issues.push(format!("declared nt-count {} but the tree has {nt}", sol.nt_count));
            }
            if ntw != sol.nt_weight {
                v.passed = false;
                v.issues.push(format!("declared nt-weight {} but the tree has {ntw}", sol.nt_weight));
            }
            let passed = v.passed;
            rep.solution = Some(report::SolutionSummary {
                vertices: sol.tree.len(),
                nt_count: nt,
                nt_weight: ntw,
            });
            rep.verification = Some(v);
            emit(json, &rep);
            Ok(if passed { 0 } else { EXIT_VERIFY })
        }
        Command::Reduce { file, target, output } => {
            let text = match target {
                Target::GadgetFromCover => {
                    let sc = parse_set_cover(&read(&file)?)
                        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", file.display())))?;
                    serialize_instance(&gadget_from_set_cover(&sc).0)
                }
                Target::Dsspt => serialize_instance(&uvdst_to_dsspt(&load_instance(&file)?)),
                Target::Usspt => serialize_instance(&acyclic_uvdst_to_usspt(&load_instance(&file)?)?),
            };
            match output {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Bench(args) => bench::run(json, args),
    }
}

fn finish_solve(
    json: bool,
    mut rep: RunReport,
    mode: Mode,
    sol: &SolutionReport,
    check: SolutionVerification,
    output: Option<PathBuf>,
) -> Result<u8, Failure> {
    rep.solution = Some(summarize(sol));
    rep.certificate = Some(certificate(sol, mode.objective(sol), None));
    rep.warnings = sol.warnings.clone();
    let passed = check.passed();
    rep.verification = Some(verdict(&check));
    let text = serialize_solution(&SolutionFile::from(sol));
    match &output {
        Some(path) => {
            write(path, &text)?;
            emit(json, &rep);
        }
        None if json => emit(json, &rep),
        None => print!("{text}"),
    }
    Ok(if passed { 0 } else { EXIT_VERIFY })
}

fn gen(json: bool, a: GenArgs) -> Result<u8, Failure> {
    let family = match a.family {
        FamilyName::Layered => Family::Layered {
            widths: a.widths,
            edge_prob: a.p,
            max_weight: a.max_weight,
        },
        FamilyName::RandomGnp => Family::RandomGnp {
            n: a.n,
            p: a.p,
            directed: a.directed,
            max_weight: a.max_weight,
        },
        FamilyName::ShallowRandom => Family::ShallowRandom {
            n: a.n,
            radius: a.radius,
            chord_prob: a.chord_prob,
            max_weight: a.max_weight,
        },
        FamilyName::Gadget => Family::Gadget {
            subsets: a.subsets,
            universe: a.universe,
            density: a.density,
        },
        FamilyName::Grid => Family::Grid {
            rows: a.rows,
            cols: a.cols,
            max_weight: a.max_weight,
        },
    };
    let spec = GeneratorSpec {
        family,
        seed: a.seed,
        terminal_fraction: a.terminal_fraction,
        max_vertex_weight: a.vertex_weights,
    };
    let inst = generate(&spec)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?
        .instance;
    let text = serialize_instance(&inst);
    match &a.output {
        Some(path) => {
            write(path, &text)?;
            let mut rep = RunReport::new("gen");
            rep.instance_digest = Some(digest(&inst));
            emit(json, &rep);
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
