//! Algorithm dispatch and the JSON report.

use std::fmt;

use linfactor::bivproj::factor_general;
use linfactor::hyper::{factor_hyperplane_with, HyperOptions};
use linfactor::lieform::{
    decide_orbit_membership, essential_variables_reduce, factor_independent_forms, FactorOutcome,
    OrbitDecision,
};
use linfactor::oracle::{check_homogeneous, resolve_degree};
use linfactor::verify::format_rational;
use linfactor::{Error, Factorization, PolyOracle, RandomSource, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    Lie,
    Bivariate,
    Hyperplane,
    Auto,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Lie => "lie",
            Algorithm::Bivariate => "bivariate",
            Algorithm::Hyperplane => "hyperplane",
            Algorithm::Auto => "auto",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Factored,
    ExistsOverClosure,
    NotProduct,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Factored | Status::ExistsOverClosure => 0,
            Status::NotProduct => 1,
            Status::Error => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Factored => "factored",
            Status::ExistsOverClosure => "exists-over-closure",
            Status::NotProduct => "not-product",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub algorithm: Algorithm,
    pub decide_only: bool,
    pub deterministic_line_test: bool,
    pub reduce_essential: bool,
}

/// What a pipeline concluded, before telemetry is attached.
#[derive(Debug)]
pub enum Outcome {
    Factored(Factorization),
    ExistsOverClosure,
    NotProduct(String),
}

#[derive(Serialize)]
struct FactorJson {
    coeffs: Vec<String>,
    exponent: usize,
}

#[derive(Serialize)]
struct ReportJson {
    status: &'static str,
    lambda: Option<String>,
    factors: Vec<FactorJson>,
    blackbox_calls: u64,
    algorithm: String,
    seed: u64,
}

pub struct RunReport {
    pub status: Status,
    pub factorization: Option<Factorization>,
    pub blackbox_calls: u64,
    pub algorithm: Algorithm,
    pub seed: u64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let (lambda, factors) = match &self.factorization {
            Some(f) => (
                Some(format_rational(f.lambda())),
                f.factors()
                    .iter()
                    .map(|(l, e)| FactorJson {
                        coeffs: l.coeffs().iter().map(format_rational).collect(),
                        exponent: *e,
                    })
                    .collect(),
            ),
            None => (None, Vec::new()),
        };
        let report = ReportJson {
            status: self.status.as_str(),
            lambda,
            factors,
            blackbox_calls: self.blackbox_calls,
            algorithm: self.algorithm.to_string(),
            seed: self.seed,
        };
        serde_json::to_string(&report).expect("report serializes")
    }
}

/// Failures that say something about the input polynomial rather than about
/// the invocation.
fn is_negative_answer(e: &Error) -> bool {
    matches!(
        e,
        Error::ZeroPolynomial
            | Error::NotDiagonalizable
            | Error::IrrationalEigenvalues(_)
            | Error::RetriesExhausted(_)
            | Error::NonIntegralExponents(_)
            | Error::SystemNotUnique(_)
            | Error::NotAffineProduct
            | Error::InconsistentProjections(_)
            | Error::VerificationFailed
            | Error::NotSplitOverQ
            | Error::InconsistentProbes
            | Error::GroupingFailed(_)
            | Error::RootFormMismatch(_)
    )
}

fn soften(r: Result<Outcome>) -> Result<Outcome> {
    match r {
        Err(e) if is_negative_answer(&e) => Ok(Outcome::NotProduct(e.to_string())),
        other => other,
    }
}

fn run_lie(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<Outcome> {
    soften(factor_independent_forms(oracle, rng).map(|o| match o {
        FactorOutcome::FactoredOverQ(f) => Outcome::Factored(f),
        FactorOutcome::ExistsOverClosure(_) => Outcome::ExistsOverClosure,
        FactorOutcome::NotProduct(r) => Outcome::NotProduct(r.to_string()),
    }))
}

fn run_hyperplane(
    oracle: &PolyOracle,
    rng: &mut RandomSource,
    settings: &Settings,
) -> Result<Outcome> {
    let options = HyperOptions {
        deterministic_line_test: settings.deterministic_line_test,
    };
    soften(factor_hyperplane_with(oracle, rng, &options).map(Outcome::Factored))
}

fn run_bivariate(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<Outcome> {
    soften(factor_general(oracle, rng).map(Outcome::Factored))
}

fn run_auto(oracle: &PolyOracle, rng: &mut RandomSource, settings: &Settings) -> Result<Outcome> {
    let d = resolve_degree(oracle, rng)?;
    if !check_homogeneous(oracle, d, rng)? {
        return Ok(Outcome::NotProduct("not homogeneous".into()));
    }
    // Lie only applies to n independent forms; any other negative answer
    // leaves the dependent case open.
    match run_lie(oracle, rng)? {
        Outcome::NotProduct(_) => {}
        done => return Ok(done),
    }
    match factor_hyperplane_with(
        oracle,
        rng,
        &HyperOptions {
            deterministic_line_test: settings.deterministic_line_test,
        },
    ) {
        Ok(f) => return Ok(Outcome::Factored(f)),
        Err(Error::NotSplitOverQ) => {
            return Ok(Outcome::NotProduct(Error::NotSplitOverQ.to_string()))
        }
        Err(e) if is_negative_answer(&e) => {}
        Err(e) => return Err(e),
    }
    run_bivariate(oracle, rng)
}

fn decide(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<Outcome> {
    soften(
        decide_orbit_membership(oracle, false, rng).map(|d| match d {
            OrbitDecision::Yes => Outcome::ExistsOverClosure,
            OrbitDecision::No(r) => Outcome::NotProduct(r.to_string()),
        }),
    )
}

fn dispatch(oracle: &PolyOracle, rng: &mut RandomSource, settings: &Settings) -> Result<Outcome> {
    if settings.decide_only {
        return decide(oracle, rng);
    }
    match settings.algorithm {
        Algorithm::Lie => run_lie(oracle, rng),
        Algorithm::Hyperplane => run_hyperplane(oracle, rng, settings),
        Algorithm::Bivariate => run_bivariate(oracle, rng),
        Algorithm::Auto => run_auto(oracle, rng, settings),
    }
}

/// Run the selected pipeline; with `reduce_essential` the oracle is first
/// restricted to its essential variables and the result lifted back.
pub fn run(oracle: &PolyOracle, rng: &mut RandomSource, settings: &Settings) -> Result<Outcome> {
    if !settings.reduce_essential {
        return dispatch(oracle, rng, settings);
    }
    let reduction = match essential_variables_reduce(oracle, rng) {
        Ok(r) => r,
        Err(e) if is_negative_answer(&e) => return Ok(Outcome::NotProduct(e.to_string())),
        Err(e) => return Err(e),
    };
    match dispatch(&reduction.reduced, rng, settings)? {
        Outcome::Factored(f) => Ok(Outcome::Factored(reduction.lift(&f)?)),
        other => Ok(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use linfactor::oracle::parse_expression;

    fn settings(algorithm: Algorithm) -> Settings {
        Settings {
            algorithm,
            decide_only: false,
            deterministic_line_test: false,
            reduce_essential: false,
        }
    }

    fn outcome(expr: &str, s: &Settings) -> Outcome {
        let oracle = PolyOracle::from_circuit(parse_expression(expr).unwrap());
        run(&oracle, &mut RandomSource::new(7), s).unwrap()
    }

    #[test]
    fn auto_falls_through_to_dependent_forms() {
        match outcome("x1*x2*(x1+x2)", &settings(Algorithm::Auto)) {
            Outcome::Factored(f) => assert_eq!(f.factors().len(), 3),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn auto_rejects_inhomogeneous() {
        assert!(matches!(
            outcome("x1^2 + x2", &settings(Algorithm::Auto)),
            Outcome::NotProduct(_)
        ));
    }

    #[test]
    fn decide_only_stops_before_eigenvalues() {
        let s = Settings {
            decide_only: true,
            ..settings(Algorithm::Lie)
        };
        assert!(matches!(
            outcome("x1^2 + x2^2", &s),
            Outcome::ExistsOverClosure
        ));
        assert!(matches!(
            outcome("x1^2 - x2^2", &s),
            Outcome::ExistsOverClosure
        ));
        assert!(matches!(
            outcome("x1^3 + x2^3 + x3^3", &s),
            Outcome::NotProduct(_)
        ));
    }

    #[test]
    fn reduction_lifts_back() {
        let s = Settings {
            reduce_essential: true,
            ..settings(Algorithm::Lie)
        };
        match outcome("(x1+x2)^2*(x1-x2+x3)", &s) {
            Outcome::Factored(f) => assert_eq!(f.degree(), 3),
            o => panic!("{o:?}"),
        }
    }
}
