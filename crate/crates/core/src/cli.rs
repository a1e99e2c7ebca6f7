//! Command-line front end.
//!
//! Every subcommand prints one pretty-printed JSON document on standard
//! output; wall-clock timings go to standard error so the output stays
//! byte-for-byte reproducible. Row numbers and colors in domain answers are
//! one-based.
//!
//! Exit codes: 0 success (an infeasible program included), 1 oracle
//! disagreement, 2 unreadable or invalid input, 3 size limit, 4 overflow.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::apps::{
    self, coloring::EquitableColoringInstance, lobbying::LobbyingInstance, strings::parse_strings_file,
    MultiStringsInstance,
};
use crate::audit::{audit_solution, AuditReport};
use crate::dag::{self, SolveOptions, SolveStats};
use crate::error::{Error, Result};
use crate::model::{InstanceParts, NFoldInstance, Outcome};
use crate::oracle;
use crate::reduction::{reduce_to_equality, solve_program};

/// Environment variable overriding the oracle's candidate budget.
pub const BUDGET_ENV: &str = "NFOLD_ENUM_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SIZE: i32 = 3;
pub const EXIT_OVERFLOW: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nfold", version, about = "Solve combinatorial n-fold integer programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance file with the layered solver.
    Solve(SolveArgs),
    /// Solve an instance file by exhaustive enumeration.
    Oracle(SolveArgs),
    /// Solve an instance file and audit the witness.
    Audit(SolverArgs),
    /// Decide Lobbying for a binary matrix file.
    Lobbying {
        path: PathBuf,
        /// Number of rows that may be flipped.
        #[arg(long)]
        k: u64,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Closest String under Hamming distance for a strings file.
    ClosestString {
        path: PathBuf,
        /// Largest allowed distance to every input string.
        #[arg(long)]
        d: i64,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// δ-Multi Strings for a strings file with bound lines.
    Multistrings {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Equitable coloring of an edge-list file.
    Eqcolor {
        path: PathBuf,
        /// Number of colors.
        #[arg(long)]
        colors: usize,
        /// Comma-separated vertex cover; a minimum cover is searched otherwise.
        #[arg(long, value_delimiter = ',')]
        cover: Option<Vec<String>>,
        #[command(flatten)]
        solver: SolverFlags,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    path: PathBuf,
    /// Cross-check against exhaustive enumeration.
    #[arg(long)]
    oracle: bool,
    /// Include solver statistics.
    #[arg(long)]
    stats: bool,
    /// Audit the witness.
    #[arg(long)]
    audit: bool,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct SolverArgs {
    path: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args, Clone, Copy)]
struct SolverFlags {
    /// Expand layers on a single thread.
    #[arg(long)]
    sequential: bool,
}

impl SolverFlags {
    fn options(self) -> SolveOptions {
        if self.sequential {
            SolveOptions::sequential()
        } else {
            SolveOptions::default()
        }
    }
}

/// Runs the binary against the process arguments and returns the exit code.
pub fn main_exit() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let started = std::time::Instant::now();
    let result = dispatch(cli.command, err);
    let _ = writeln!(err, "wall time: {:.3?}", started.elapsed());
    match result {
        Ok((doc, code)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("documents serialise"));
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeLimit { .. } => EXIT_SIZE,
        Error::Overflow => EXIT_OVERFLOW,
        _ => EXIT_INPUT,
    }
}

fn dispatch(cmd: Command, err: &mut dyn Write) -> Result<(Value, i32)> {
    match cmd {
        Command::Solve(args) => cmd_solve(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Audit(args) => cmd_audit(&read_instance(&args.path)?, &args.solver.options()).map(|v| (v, EXIT_OK)),
        Command::Lobbying { path, k, solver } => cmd_lobbying(&path, k, solver),
        Command::ClosestString { path, d, solver } => {
            let inst = parse_strings_file(&read(&path)?)?.closest_string(d)?;
            cmd_strings(&inst, solver)
        }
        Command::Multistrings { path, solver } => {
            let inst = parse_strings_file(&read(&path)?)?.multistrings()?;
            cmd_strings(&inst, solver)
        }
        Command::Eqcolor {
            path,
            colors,
            cover,
            solver,
        } => cmd_eqcolor(&path, colors, cover, solver, err),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads and validates a JSON instance file.
pub fn read_instance(path: &Path) -> Result<NFoldInstance> {
    parse_instance(&read(path)?)
}

pub fn parse_instance(text: &str) -> Result<NFoldInstance> {
    let parts: InstanceParts = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let inst = NFoldInstance::from_parts(parts)?;
    let report = inst.validate();
    if !report.is_ok() {
        return Err(Error::Invalid(report));
    }
    Ok(inst)
}

fn oracle_budget() -> Result<u128> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{BUDGET_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(oracle::DEFAULT_BUDGET),
    }
}

fn outcome_doc(outcome: &Outcome) -> Value {
    match outcome {
        Outcome::Optimal(sol) => json!({
            "status": "optimal",
            "objective": sol.objective,
            "x": sol.bricks,
        }),
        Outcome::Infeasible => json!({
            "status": "infeasible",
            "objective": null,
            "x": null,
        }),
    }
}

fn stats_doc(stats: &SolveStats) -> Value {
    json!({
        "layers": stats.layers,
        "vertices": stats.vertices,
        "relaxations": stats.relaxations,
    })
}

fn insert(doc: &mut Value, key: &str, value: impl Serialize) {
    doc.as_object_mut()
        .expect("documents are objects")
        .insert(key.to_owned(), serde_json::to_value(value).expect("values serialise"));
}

fn cmd_solve(args: &SolveArgs) -> Result<(Value, i32)> {
    let inst = read_instance(&args.path)?;
    let opts = args.solver.options();
    let (outcome, stats) = solve_program(&inst, &opts)?;
    let mut doc = outcome_doc(&outcome);
    let mut code = EXIT_OK;
    if args.stats {
        insert(&mut doc, "stats", stats_doc(&stats));
    }
    if args.audit {
        insert(&mut doc, "audit", cmd_audit(&inst, &opts)?);
    }
    if args.oracle {
        let expected = oracle::brute_force_solve_p2_with_budget(&inst, oracle_budget()?)?;
        let agrees = expected.objective() == outcome.objective();
        if !agrees {
            code = EXIT_DISAGREE;
        }
        insert(
            &mut doc,
            "oracle",
            json!({ "agrees": agrees, "objective": expected.objective() }),
        );
    }
    Ok((doc, code))
}

fn cmd_oracle(args: &SolveArgs) -> Result<(Value, i32)> {
    let inst = read_instance(&args.path)?;
    let budget = oracle_budget()?;
    let outcome = oracle::brute_force_solve_p2_with_budget(&inst, budget)?;
    let mut doc = outcome_doc(&outcome);
    let mut code = EXIT_OK;
    if args.stats {
        insert(
            &mut doc,
            "stats",
            json!({ "candidates": oracle::enumeration_size(&inst).to_string() }),
        );
    }
    if args.audit {
        if let Some(sol) = outcome.solution().filter(|_| inst.is_equality_form()) {
            insert(&mut doc, "audit", audit_solution(&inst, sol)?);
        }
    }
    if args.oracle {
        let (got, _) = solve_program(&inst, &args.solver.options())?;
        let agrees = got.objective() == outcome.objective();
        if !agrees {
            code = EXIT_DISAGREE;
        }
        insert(&mut doc, "solver", json!({ "agrees": agrees, "objective": got.objective() }));
    }
    Ok((doc, code))
}

/// Audits the witness of the equality form actually handed to the layered
/// solver: the instance itself, or its reduction.
fn cmd_audit(inst: &NFoldInstance, opts: &SolveOptions) -> Result<Value> {
    let (program, reduced) = if inst.is_equality_form() {
        (inst.clone(), false)
    } else {
        (reduce_to_equality(inst)?.0, true)
    };
    let (outcome, _) = dag::solve_with_options(&program, opts)?;
    let report: Option<AuditReport> = outcome.solution().map(|sol| audit_solution(&program, sol)).transpose()?;
    Ok(json!({
        "program": if reduced { "reduced" } else { "original" },
        "passed": report.as_ref().map(AuditReport::passed),
        "report": report,
    }))
}

fn cmd_lobbying(path: &Path, k: u64, solver: SolverFlags) -> Result<(Value, i32)> {
    let mut matrix = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::Parse(format!("line {}: {c:?} is not 0 or 1", i + 1))),
            })
            .collect::<Result<Vec<u8>>>()?;
        matrix.push(row);
    }
    let inst = LobbyingInstance::new(matrix, 0, k)?;
    let ans = with_options(solver, || apps::lobbying_solve(&inst))?;
    let types: Vec<Value> = inst
        .row_types()
        .iter()
        .zip(&ans.flips_per_type)
        .map(|((row, count), flips)| {
            json!({
                "row": row.iter().map(|v| char::from(b'0' + v)).collect::<String>(),
                "count": count,
                "flips": flips,
            })
        })
        .collect();
    Ok((
        json!({
            "answer": if ans.yes { "yes" } else { "no" },
            "k": k,
            "objective": ans.optimum,
            "row_types": types,
            "flipped_rows": ans.flipped_rows.iter().map(|r| r + 1).collect::<Vec<_>>(),
        }),
        EXIT_OK,
    ))
}

fn cmd_strings(inst: &MultiStringsInstance, solver: SolverFlags) -> Result<(Value, i32)> {
    let ans = with_options(solver, || apps::multistrings_solve(inst))?;
    Ok((
        json!({
            "status": if ans.output.is_some() { "optimal" } else { "infeasible" },
            "output": ans.output,
            "objective": ans.objective,
            "distances": ans.distances,
        }),
        EXIT_OK,
    ))
}

fn cmd_eqcolor(
    path: &Path,
    colors: usize,
    cover: Option<Vec<String>>,
    solver: SolverFlags,
    err: &mut dyn Write,
) -> Result<(Value, i32)> {
    let (names, edges) = parse_edge_list(&read(path)?)?;
    let index = |name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Precondition(format!("cover vertex {name:?} is not in the graph")))
    };
    let cover = match cover {
        Some(list) => list.iter().map(|n| index(n.trim())).collect::<Result<Vec<_>>>()?,
        None => {
            let found = apps::minimum_vertex_cover(names.len(), &edges)?;
            let _ = writeln!(err, "using a minimum vertex cover of size {}", found.len());
            found
        }
    };
    let inst = EquitableColoringInstance::new(names.len(), edges, colors, cover)?;
    let ans = with_options(solver, || apps::equitable_coloring_solve(&inst))?;
    let coloring = ans.coloring.as_ref().map(|c| {
        names
            .iter()
            .zip(c)
            .map(|(name, &color)| json!({ "vertex": name, "color": color + 1 }))
            .collect::<Vec<_>>()
    });
    Ok((
        json!({
            "answer": if ans.yes { "yes" } else { "no" },
            "colors": colors,
            "cover": inst.cover().iter().map(|&w| &names[w]).collect::<Vec<_>>(),
            "objective": if ans.yes { Some(0) } else { None },
            "coloring": coloring,
        }),
        EXIT_OK,
    ))
}

/// Vertex names in numbering order and edges between their indices.
pub type EdgeList = (Vec<String>, Vec<(usize, usize)>);

/// Edge-list format: each line holds two vertex names (an edge) or one (a
/// vertex without edges). Vertices are numbered by first appearance.
pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let id = |name: &str, names: &mut Vec<String>| match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_owned());
            names.len() - 1
        }
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            [v] => {
                id(v, &mut names);
            }
            [u, v] => {
                let e = (id(u, &mut names), id(v, &mut names));
                edges.push(e);
            }
            _ => return Err(Error::Parse(format!("line {}: expected one or two vertex names", i + 1))),
        }
    }
    Ok((names, edges))
}

/// The application front ends use the default solver options; a sequential
/// request runs them inside a one-thread pool instead.
fn with_options<R: Send>(solver: SolverFlags, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if solver.sequential {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(1).build() {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = solver;
    f()
}
