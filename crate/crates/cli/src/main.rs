//! `linfactor`: factor a polynomial given by an expression, circuit file or
//! sparse file into linear forms and print a JSON report.

mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use linfactor::oracle::{parse_expression, Circuit};
use linfactor::random::DEFAULT_SAMPLE_BOUND;
use linfactor::verify::SparsePoly;
use linfactor::{PolyOracle, RandomSource};

use pipeline::{Algorithm, Outcome, RunReport, Settings, Status};

#[derive(Parser, Debug)]
#[command(
    name = "linfactor",
    version,
    about = "Factor a black-box polynomial into linear forms over the rationals"
)]
#[command(group(ArgGroup::new("input").required(true).args(["expr", "circuit", "sparse"])))]
struct Args {
    /// Polynomial expression in x1, x2, ... (e.g. "x1^2 - x2^2").
    #[arg(long)]
    expr: Option<String>,
    /// Circuit file (`vars`, `input`, `const`, `add`, `sub`, `mul`, `output` lines).
    #[arg(long, value_name = "FILE")]
    circuit: Option<PathBuf>,
    /// Sparse file, one `coeff e1 ... en` term per line.
    #[arg(long, value_name = "FILE")]
    sparse: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
    algorithm: Algorithm,
    /// Stop the Lie pipeline after the algebraic checks.
    #[arg(long)]
    decide_only: bool,
    /// Decide co-hyperplane membership with k - 1 evaluations.
    #[arg(long)]
    deterministic_line_test: bool,
    /// Known total degree; skips degree estimation.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Size of the integer set random points are drawn from.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_BOUND, value_parser = clap::value_parser!(u64).range(2..=i64::MAX as u64))]
    sample_bound: u64,
    /// Restrict to the essential variables before factoring.
    #[arg(long)]
    reduce_essential: bool,
    /// JSON output (the only format).
    #[arg(long, default_value_t = true)]
    json: bool,
}

fn load(args: &Args) -> Result<PolyOracle, String> {
    let read =
        |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let oracle = if let Some(text) = &args.expr {
        PolyOracle::from_circuit(parse_expression(text).map_err(|e| e.to_string())?)
    } else if let Some(path) = &args.circuit {
        PolyOracle::from_circuit(Circuit::from_text(&read(path)?).map_err(|e| e.to_string())?)
    } else if let Some(path) = &args.sparse {
        PolyOracle::from_sparse(SparsePoly::from_text(&read(path)?).map_err(|e| e.to_string())?)
    } else {
        unreachable!("clap enforces one input")
    };
    Ok(match args.degree {
        Some(d) => oracle.with_degree(d),
        None => oracle,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut report = RunReport {
        status: Status::Error,
        factorization: None,
        blackbox_calls: 0,
        algorithm: args.algorithm,
        seed: args.seed,
    };
    match load(&args) {
        Err(msg) => eprintln!("linfactor: {msg}"),
        Ok(oracle) => {
            let settings = Settings {
                algorithm: args.algorithm,
                decide_only: args.decide_only,
                deterministic_line_test: args.deterministic_line_test,
                reduce_essential: args.reduce_essential,
            };
            let mut rng = RandomSource::with_bound(args.seed, args.sample_bound);
            match pipeline::run(&oracle, &mut rng, &settings) {
                Ok(Outcome::Factored(f)) => {
                    report.status = Status::Factored;
                    report.factorization = Some(f);
                }
                Ok(Outcome::ExistsOverClosure) => report.status = Status::ExistsOverClosure,
                Ok(Outcome::NotProduct(why)) => {
                    eprintln!("linfactor: not a product of linear forms: {why}");
                    report.status = Status::NotProduct;
                }
                Err(e) => eprintln!("linfactor: {e}"),
            }
            report.blackbox_calls = oracle.calls();
        }
    }
    println!("{}", report.to_json());
    ExitCode::from(report.status.exit_code() as u8)
}
