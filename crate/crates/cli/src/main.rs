use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use wsp_core::bench::{loglog_slope, run_cell, BenchRow};
use wsp_core::error::{Error, OracleError, ParseError, TdError};
use wsp_core::format::{parse_instance, serialize_instance};
use wsp_core::model::WorkflowInstance;
use wsp_core::oracle::{
    brute_force_psi, brute_force_solve, brute_force_subtdag, gen_random_instance, gen_random_psi,
    parse_psi, parse_subtdag, reduce_psi_to_subtdag, reduce_subtdag_to_wsp, write_psi,
    write_subtdag, GenParams, PsiParams, DEFAULT_BUDGET,
};
use wsp_core::pipeline::{solve_instance, OracleCheck, SolveOptions, Verdict};
use wsp_core::preprocess::{contract_equalities, Contraction};
use wsp_core::treedecomp::{
    decompose, hasse_edges, parse_td, to_nice, validate_decomposition, validate_nice, write_td,
    Strategy,
};

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DISAGREE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wsp",
    version,
    about = "Workflow satisfiability with =, != and < constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    MinDegree,
    MinFill,
    Exact,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::MinDegree => Strategy::MinDegree,
            StrategyArg::MinFill => Strategy::MinFill,
            StrategyArg::Exact => Strategy::ExactSmall,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceFrom {
    Psi,
    Std,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReduceTo {
    Std,
    Wsp,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance; exit 0 on Sat, 1 on Unsat.
    Solve {
        instance: PathBuf,
        /// Tree decomposition of the user hierarchy to use.
        #[arg(long)]
        td: Option<PathBuf>,
        /// Decomposition heuristic; defaults to exact search on at most 20
        /// users and min-fill otherwise.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Cross-check against brute force; exit 3 on disagreement.
        #[arg(long)]
        oracle: bool,
        /// Node budget for the brute-force search.
        #[arg(long, env = "WSP_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
        /// Print solver statistics as key=value lines.
        #[arg(long)]
        stats: bool,
    },
    /// Validate a tree decomposition of an instance's user hierarchy.
    CheckTd {
        instance: PathBuf,
        td: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print a tree decomposition of an instance's user hierarchy.
    Decompose {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "min-fill")]
        strategy: StrategyArg,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        users: usize,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 0.3)]
        arc_density: f64,
        #[arg(long, default_value_t = 0.7)]
        auth_density: f64,
        #[arg(long, default_value_t = 1)]
        eq: usize,
        #[arg(long, default_value_t = 2)]
        neq: usize,
        #[arg(long, default_value_t = 2)]
        lt: usize,
    },
    /// Generate a random partitioned subgraph isomorphism instance.
    GenPsi {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        pattern: usize,
        #[arg(long, default_value_t = 0.5)]
        pattern_density: f64,
        #[arg(long, default_value_t = 8)]
        host: usize,
        #[arg(long, default_value_t = 0.3)]
        host_density: f64,
        /// Plant a solution.
        #[arg(long)]
        plant: bool,
    },
    /// Run the reduction chain PSI -> SubTDAG -> WSP.
    Reduce {
        #[arg(value_enum)]
        from: ReduceFrom,
        input: PathBuf,
        #[arg(long, value_enum, default_value = "wsp")]
        to: ReduceTo,
        /// Solve every stage by brute force and compare; exit 3 on
        /// disagreement.
        #[arg(long)]
        check: bool,
        #[arg(long, env = "WSP_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Time the solver over growing hierarchies; CSV on stdout.
    Bench {
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 400])]
        users: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
    /// Print the constraint graph on supersteps in DOT syntax.
    Graph { instance: PathBuf },
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<WorkflowInstance> {
    parse_instance(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn yes_no(found: bool) -> &'static str {
    if found {
        "yes"
    } else {
        "no"
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            instance,
            td,
            strategy,
            oracle,
            budget,
            json,
            stats,
        } => {
            let inst = load(&instance)?;
            let td = match td {
                Some(p) => Some(
                    parse_td(&read(&p)?, &inst.user_names)
                        .with_context(|| format!("{}", p.display()))?,
                ),
                None => None,
            };
            let opts = SolveOptions {
                strategy: strategy.map(Strategy::from),
                td,
                oracle,
                budget,
            };
            let report = solve_instance(&inst, &opts)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                match &report.plan {
                    Some(plan) => {
                        println!("Sat");
                        for e in plan {
                            println!("{} -> {}", e.step, e.user);
                        }
                    }
                    None => println!("Unsat"),
                }
                for a in &report.advisories {
                    eprintln!("note: {a}");
                }
                if let Some(check) = &report.oracle {
                    eprintln!(
                        "oracle: {}",
                        match check {
                            OracleCheck::Agree => "agree",
                            OracleCheck::Disagree => "DISAGREE",
                            OracleCheck::Skipped => "skipped (budget exceeded)",
                        }
                    );
                }
                if stats {
                    if let Some(w) = report.width {
                        println!("width={w}");
                    }
                    println!("supersteps={}", report.supersteps);
                    println!("{}", report.stats);
                }
            }
            Ok(match (report.oracle, report.verdict) {
                (Some(OracleCheck::Disagree), _) => EXIT_DISAGREE,
                (_, Verdict::Sat) => EXIT_SAT,
                (_, Verdict::Unsat) => EXIT_UNSAT,
            })
        }
        Command::CheckTd { instance, td, json } => {
            let inst = load(&instance)?;
            let td = parse_td(&read(&td)?, &inst.user_names)?;
            let edges = hasse_edges(&inst.users);
            let mut problems: Vec<String> = validate_decomposition(inst.num_users(), &edges, &td)
                .iter()
                .map(ToString::to_string)
                .collect();
            let mut nice_nodes = None;
            if problems.is_empty() {
                let nice = to_nice(&td)?;
                problems.extend(validate_nice(inst.num_users(), &edges, &nice));
                nice_nodes = Some(nice.len());
            }
            let width = td.width().ok();
            if json {
                let v = serde_json::json!({
                    "valid": problems.is_empty(),
                    "width": width,
                    "bags": td.bags.len(),
                    "nice_nodes": nice_nodes,
                    "problems": problems,
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else if problems.is_empty() {
                println!("valid width={} bags={}", width.unwrap_or(0), td.bags.len());
            } else {
                println!("invalid");
                for p in &problems {
                    println!("  {p}");
                }
            }
            Ok(if problems.is_empty() { 0 } else { 1 })
        }
        Command::Decompose { instance, strategy } => {
            let inst = load(&instance)?;
            let td = decompose(inst.num_users(), &hasse_edges(&inst.users), strategy.into())?;
            print!("{}", write_td(&td, &inst.user_names));
            Ok(0)
        }
        Command::Gen {
            seed,
            users,
            steps,
            arc_density,
            auth_density,
            eq,
            neq,
            lt,
        } => {
            let params = GenParams {
                n: users,
                k: steps,
                arc_density,
                auth_density,
                eq,
                neq,
                lt,
            };
            print!(
                "{}",
                serialize_instance(&gen_random_instance(&params, seed)?)
            );
            Ok(0)
        }
        Command::GenPsi {
            seed,
            pattern,
            pattern_density,
            host,
            host_density,
            plant,
        } => {
            let params = PsiParams {
                pattern_vertices: pattern,
                pattern_density,
                host_vertices: host,
                host_density,
                plant,
            };
            print!("{}", write_psi(&gen_random_psi(&params, seed)?));
            Ok(0)
        }
        Command::Reduce {
            from,
            input,
            to,
            check,
            budget,
        } => {
            let text = read(&input)?;
            let mut answers = Vec::new();
            let st = match from {
                ReduceFrom::Psi => {
                    let psi = parse_psi(&text)?;
                    if check {
                        answers.push(("psi", brute_force_psi(&psi, budget)?.is_some()));
                    }
                    reduce_psi_to_subtdag(&psi)?
                }
                ReduceFrom::Std => {
                    if to == ReduceTo::Std {
                        return Err(Usage("input is already a SubTDAG instance".into()).into());
                    }
                    parse_subtdag(&text)?
                }
            };
            if check {
                answers.push(("subtdag", brute_force_subtdag(&st, budget)?.is_some()));
            }
            if to == ReduceTo::Std {
                print!("{}", write_subtdag(&st));
            } else {
                let wsp = reduce_subtdag_to_wsp(&st)?;
                if check {
                    answers.push(("wsp", brute_force_solve(&wsp, budget)?.is_some()));
                }
                print!("{}", serialize_instance(&wsp));
            }
            if check {
                for (stage, found) in &answers {
                    eprintln!("{stage}: {}", yes_no(*found));
                }
                if answers.iter().any(|a| a.1 != answers[0].1) {
                    eprintln!("stages DISAGREE");
                    return Ok(EXIT_DISAGREE);
                }
            }
            Ok(0)
        }
        Command::Bench {
            steps,
            users,
            seed,
            reps,
        } => {
            println!("{}", BenchRow::CSV_HEADER);
            let mut points = Vec::new();
            for &n in &users {
                let row = run_cell(steps, n, seed, reps)?;
                println!("{}", row.csv());
                points.push((n as f64, row.dp_ms.max(1e-6)));
            }
            if points.len() >= 2 {
                eprintln!("loglog_slope={:.3}", loglog_slope(&points));
            }
            Ok(0)
        }
        Command::Graph { instance } => {
            let inst = load(&instance)?;
            match contract_equalities(&inst) {
                Contraction::Graph(cg) => print!("{}", cg.to_dot(&inst)),
                Contraction::NoInstance(why) => {
                    eprintln!("{why}");
                    return Ok(EXIT_UNSAT);
                }
            }
            Ok(0)
        }
    }
}

/// Bad input (unreadable or malformed files, invalid decompositions,
/// rejected parameters) is a usage error; anything else is internal.
fn exit_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() || cause.is::<ParseError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<TdError>() {
            return if matches!(
                e,
                TdError::Invalid(_) | TdError::Parse(_) | TdError::ExactTooLarge { .. }
            ) {
                EXIT_USAGE
            } else {
                EXIT_INTERNAL
            };
        }
        if let Some(e) = cause.downcast_ref::<OracleError>() {
            return match e {
                OracleError::BudgetExceeded(_) => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            };
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse(_) | Error::Order(_) => EXIT_USAGE,
                Error::Td(
                    TdError::Invalid(_) | TdError::Parse(_) | TdError::ExactTooLarge { .. },
                ) => EXIT_USAGE,
                Error::Oracle(
                    OracleError::InvalidParams(_)
                    | OracleError::InvalidInput(_)
                    | OracleError::Parse(_),
                ) => EXIT_USAGE,
                _ => EXIT_INTERNAL,
            };
        }
    }
    EXIT_INTERNAL
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_for(&e))
        }
    }
}
