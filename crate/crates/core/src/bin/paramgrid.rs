use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use paramgrid::engine::{approximate, approximate_with_family, EngineOptions};
use paramgrid::grid::DEFAULT_GRID_CAP;
use paramgrid::io::{load_instance, load_set, RunReport};
use paramgrid::model::{Encoding, ParameterVector, ProblemInstance, SolutionRecord};
use paramgrid::oracle::gadgets::{run_fixture, FixtureParams, GadgetKind};
use paramgrid::oracle::{sample_tagged, verify_queries, verify_set};
use paramgrid::rational::{parse_q, serde_q, Q};
use paramgrid::solvers::{BuiltinOracle, KnapsackFptas};
use paramgrid::{ApproximationSet, Error};

/// Exit code for a verification that ran but did not pass.
const EXIT_VERIFICATION_FAILED: u8 = 6;

#[derive(Parser)]
#[command(name = "paramgrid", version, about = "Approximation sets for linear multi-parametric optimization problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an approximation set by calling the instance's solver on the grid.
    Approximate(ApproximateArgs),
    /// Look up the stored solution for a parameter vector.
    Query(QueryArgs),
    /// Check an approximation set against brute force, or check a fixture.
    Verify(VerifyArgs),
    /// Built-in hard instances.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand)]
enum FixturesAction {
    /// Print the fixture names.
    List,
}

fn rational(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct ApproximateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Accuracy in (0, 1), as a decimal or `p/q`.
    #[arg(long, value_parser = rational)]
    epsilon: Q,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Where to write the approximation set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the run report (standard output by default).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Use the knapsack profit-scaling FPTAS family instead of the exact solver.
    #[arg(long)]
    fptas: bool,
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    grid_cap: u64,
    /// Leave wall-clock time out of the report, for byte-stable output.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    /// Parameter coordinates, one flag per coordinate or comma separated.
    #[arg(long, required = true, allow_negative_numbers = true, value_delimiter = ',', value_parser = rational)]
    lambda: Vec<Q>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "fixture")]
    instance: Option<PathBuf>,
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    set: Option<PathBuf>,
    /// One of `section3`, `appendix-example`, `appendix-proof`.
    #[arg(long)]
    fixture: Option<String>,
    /// Target ratio; defaults to the set's guarantee, or 2 for fixtures.
    #[arg(long, value_parser = rational)]
    beta: Option<Q>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the solution each query returns rather than the best in the set.
    #[arg(long)]
    queries: bool,
    /// Number of parameters of the `section3` fixture.
    #[arg(long = "K", default_value_t = 1)]
    k: usize,
    #[arg(long, value_parser = rational, default_value = "5")]
    z0: Q,
    /// Number of copies in the `appendix-proof` fixture.
    #[arg(long = "L", default_value_t = 4)]
    l: usize,
    #[arg(long)]
    omit_timing: bool,
}

fn emit(value: &impl Serialize, path: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn elapsed_ms(start: Instant, omit: bool) -> Option<u64> {
    (!omit).then(|| start.elapsed().as_millis() as u64)
}

fn cmd_approximate(args: ApproximateArgs) -> anyhow::Result<u8> {
    let start = Instant::now();
    let instance = load_instance(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let options = EngineOptions { threads: args.threads.max(1), grid_cap: args.grid_cap };
    let set = if args.fptas {
        approximate_with_family(&instance, &args.epsilon, &KnapsackFptas::new(&instance)?, &options)?
    } else {
        approximate(&instance, &args.epsilon, &BuiltinOracle::new(&instance), &options)?
    };
    if let Some(out) = &args.out {
        emit(&set, Some(out))?;
    }
    let report = RunReport::new(&instance, &set, elapsed_ms(start, args.omit_timing));
    emit(&report, args.report.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct QueryOutput<'a> {
    lambda: ParameterVector,
    grid_index: Vec<i64>,
    id: String,
    encoding: &'a Encoding,
    #[serde(rename = "F", with = "paramgrid::rational::serde_q_vec")]
    f: &'a [Q],
    #[serde(with = "serde_q")]
    value: Q,
    #[serde(with = "serde_q")]
    guarantee: Q,
}

fn cmd_query(args: QueryArgs) -> anyhow::Result<u8> {
    let instance = load_instance(&args.instance)?;
    let set = load_set(&args.set)?;
    let lambda = ParameterVector(args.lambda);
    let trace = set.locate(&instance, &lambda)?;
    let record = &set.solutions()[trace.solution];
    let value = instance.evaluate(record, &lambda)?;
    let out = QueryOutput {
        lambda,
        grid_index: trace.index.0,
        id: record.id(),
        encoding: &record.encoding,
        f: &record.f,
        value,
        guarantee: set.guarantee(),
    };
    emit(&out, None)?;
    Ok(0)
}

/// The set's solutions, re-derived from the instance so that a set built
/// for another instance is rejected.
fn checked_solutions(instance: &ProblemInstance, set: &ApproximationSet) -> anyhow::Result<Vec<SolutionRecord>> {
    set.solutions()
        .iter()
        .map(|r| {
            let fresh = instance.record(r.encoding.clone())?;
            if fresh.f != r.f {
                return Err(Error::Schema(format!("solution {} does not match the instance", r.id())).into());
            }
            Ok(fresh)
        })
        .collect()
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<u8> {
    let start = Instant::now();
    if let Some(name) = &args.fixture {
        let kind: GadgetKind = name.parse()?;
        let params = FixtureParams { beta: args.beta.unwrap_or_else(|| Q::from_integer(2.into())), k: args.k, z0: args.z0, l: args.l };
        let report = run_fixture(kind, &params, args.samples, args.seed)?;
        emit(&report, None)?;
        return Ok(if report.passed { 0 } else { EXIT_VERIFICATION_FAILED });
    }
    let instance_path = args.instance.as_ref().ok_or_else(|| anyhow!("--instance is required"))?;
    let set_path = args.set.as_ref().ok_or_else(|| anyhow!("--set is required"))?;
    let instance = load_instance(instance_path)?;
    let set = load_set(set_path)?;
    let beta = args.beta.unwrap_or_else(|| set.guarantee());
    let samples = sample_tagged(set.spec(), args.samples, args.seed);
    let verification = if args.queries {
        verify_queries(&instance, &set, &beta, &samples)?
    } else {
        verify_set(&instance, &checked_solutions(&instance, &set)?, &beta, &samples)?
    };
    let passed = verification.passed;
    let mut report = RunReport::new(&instance, &set, elapsed_ms(start, args.omit_timing));
    report.verification = Some(verification);
    emit(&report, None)?;
    Ok(if passed { 0 } else { EXIT_VERIFICATION_FAILED })
}

fn cmd_fixtures(action: FixturesAction) -> anyhow::Result<u8> {
    match action {
        FixturesAction::List => {
            for kind in GadgetKind::ALL {
                println!("{:<18} {}", kind.name(), kind.summary());
            }
        }
    }
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map_or(1, |e| e.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Approximate(a) => cmd_approximate(a),
        Command::Query(a) => cmd_query(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Fixtures { action } => cmd_fixtures(action),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
