//! Evaluation access to a hidden polynomial.

mod circuit;
mod parse;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Pow, Zero};

pub use circuit::{Circuit, CircuitBuilder, Gate};
pub use parse::{parse_expression, parse_expression_with_arity};

use crate::error::{Error, Result};
use crate::exactmath::{RatMatrix, UniPoly};
use crate::factorization::Factorization;
use crate::par;
use crate::random::RandomSource;
use crate::verify::SparsePoly;
use crate::Rational;

#[derive(Clone, Debug)]
enum Backend {
    Sparse(Arc<SparsePoly>),
    Product(Arc<IntegerProduct>),
    Circuit(Arc<Circuit>),
    /// `inner(map * x + offset)`.
    Affine {
        inner: Arc<Backend>,
        map: RatMatrix,
        offset: Option<Vec<Rational>>,
    },
}

/// A factorization with each form rescaled to a primitive integer vector
/// and the scale folded into the constant, so integer points evaluate
/// without rational arithmetic.
#[derive(Debug)]
struct IntegerProduct {
    factorization: Factorization,
    lambda: Rational,
    forms: Vec<(Vec<BigInt>, usize)>,
}

impl IntegerProduct {
    fn new(f: Factorization) -> Self {
        let mut lambda = f.lambda().clone();
        let forms = f
            .factors()
            .iter()
            .map(|(l, e)| {
                let (ints, scale) = l.integer_scaled();
                lambda *= Pow::pow(scale, *e);
                (ints, *e)
            })
            .collect();
        Self { factorization: f, lambda, forms }
    }

    fn eval(&self, point: &[Rational]) -> Rational {
        if !point.iter().all(Rational::is_integer) {
            return self.factorization.eval(point);
        }
        let mut acc = BigInt::one();
        for (l, e) in &self.forms {
            let v: BigInt = l
                .iter()
                .zip(point)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, x)| c * x.numer())
                .sum();
            acc *= Pow::pow(v, *e);
        }
        &self.lambda * Rational::from_integer(acc)
    }
}

impl Backend {
    fn eval(&self, point: &[Rational]) -> Rational {
        match self {
            Backend::Sparse(p) => p.eval(point),
            Backend::Product(f) => f.eval(point),
            Backend::Circuit(c) => c.eval(point).expect("arity checked by the oracle"),
            Backend::Affine { inner, map, offset } => {
                let mut y = map.mul_vec(point);
                if let Some(c) = offset {
                    y.iter_mut().zip(c).for_each(|(a, b)| *a += b);
                }
                inner.eval(&y)
            }
        }
    }

    fn gradient(&self, point: &[Rational]) -> Option<Vec<Rational>> {
        match self {
            Backend::Circuit(c) => Some(c.gradient(point).expect("arity checked by the oracle")),
            Backend::Affine { inner, map, offset } => {
                let mut y = map.mul_vec(point);
                if let Some(c) = offset {
                    y.iter_mut().zip(c).for_each(|(a, b)| *a += b);
                }
                let g = inner.gradient(&y)?;
                Some(map.vec_mul(&g))
            }
            _ => None,
        }
    }

    fn has_gradient(&self) -> bool {
        match self {
            Backend::Circuit(_) => true,
            Backend::Affine { inner, .. } => inner.has_gradient(),
            _ => false,
        }
    }

    fn circuit(&self) -> Option<&Circuit> {
        match self {
            Backend::Circuit(c) => Some(c),
            _ => None,
        }
    }
}

/// Black-box access to an `n`-variate polynomial of degree at most
/// `degree_bound`, counting every evaluation.
///
/// Clones and derived oracles (substitutions, restrictions) share one call
/// counter, so the count always reflects evaluations of the underlying
/// polynomial.
#[derive(Clone, Debug)]
pub struct PolyOracle {
    n_vars: usize,
    degree_bound: usize,
    degree_exact: bool,
    black_box_only: bool,
    backend: Backend,
    calls: Arc<AtomicU64>,
}

impl PolyOracle {
    fn with_backend(
        n_vars: usize,
        degree_bound: usize,
        degree_exact: bool,
        backend: Backend,
    ) -> Self {
        Self {
            n_vars,
            degree_bound,
            degree_exact,
            black_box_only: false,
            backend,
            calls: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn from_sparse(p: SparsePoly) -> Self {
        let d = p.total_degree().unwrap_or(0);
        Self::with_backend(p.n_vars(), d, true, Backend::Sparse(Arc::new(p)))
    }

    pub fn from_factorization(f: Factorization) -> Self {
        Self::with_backend(f.n_vars(), f.degree(), true, Backend::Product(Arc::new(IntegerProduct::new(f))))
    }

    /// The degree bound is the circuit's formal degree, which may overshoot.
    pub fn from_circuit(c: Circuit) -> Self {
        Self::with_backend(
            c.n_vars(),
            c.formal_degree(),
            false,
            Backend::Circuit(Arc::new(c)),
        )
    }

    /// Declare the exact total degree.
    pub fn with_degree(mut self, d: usize) -> Self {
        self.degree_bound = d;
        self.degree_exact = true;
        self
    }

    /// Hide the white-box structure so derivatives go through interpolation.
    pub fn black_box_only(mut self) -> Self {
        self.black_box_only = true;
        self
    }

    /// Same polynomial with a fresh call counter.
    pub fn detached(&self) -> Self {
        Self {
            calls: Arc::new(AtomicU64::new(0)),
            ..self.clone()
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Whether `degree_bound` is known to equal the total degree.
    pub fn degree_is_exact(&self) -> bool {
        self.degree_exact
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn is_white_box(&self) -> bool {
        !self.black_box_only && self.backend.has_gradient()
    }

    /// The circuit, for a white-box circuit oracle.
    pub fn circuit(&self) -> Option<&Circuit> {
        if self.black_box_only {
            return None;
        }
        self.backend.circuit()
    }

    fn check_arity(&self, point: &[Rational]) -> Result<()> {
        if point.len() != self.n_vars {
            return Err(Error::ArityMismatch {
                expected: self.n_vars,
                found: point.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        self.check_arity(point)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(self.backend.eval(point))
    }

    /// Evaluate at many points, in parallel when enabled.
    pub fn evaluate_many(&self, points: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        par::try_map(points, |p| self.evaluate(p))
    }

    /// Reverse-mode gradient without any black-box call, when the backend
    /// exposes a circuit (possibly behind a linear substitution).
    pub fn white_box_gradient(&self, point: &[Rational]) -> Option<Result<Vec<Rational>>> {
        if self.black_box_only {
            return None;
        }
        if let Err(e) = self.check_arity(point) {
            return Some(Err(e));
        }
        self.backend.gradient(point).map(Ok)
    }

    /// `g(x) = f(M x)` for an `n_vars x m` matrix `M`; `g` has `m` variables.
    pub fn substitute(&self, map: &RatMatrix) -> Result<PolyOracle> {
        self.affine(map, None)
    }

    /// `g(x) = f(M x + c)`.
    pub fn affine(&self, map: &RatMatrix, offset: Option<&[Rational]>) -> Result<PolyOracle> {
        if map.rows() != self.n_vars {
            return Err(Error::DimensionMismatch(format!(
                "substitution has {} rows for a polynomial in {} variables",
                map.rows(),
                self.n_vars
            )));
        }
        if let Some(c) = offset {
            if c.len() != self.n_vars {
                return Err(Error::ArityMismatch {
                    expected: self.n_vars,
                    found: c.len(),
                });
            }
        }
        let exact = self.degree_exact && offset.is_none() && map.is_square() && map.is_invertible();
        Ok(PolyOracle {
            n_vars: map.cols(),
            degree_bound: self.degree_bound,
            degree_exact: exact,
            black_box_only: self.black_box_only,
            backend: Backend::Affine {
                inner: Arc::new(self.backend.clone()),
                map: map.clone(),
                offset: offset.map(<[Rational]>::to_vec),
            },
            calls: Arc::clone(&self.calls),
        })
    }

    /// `f(a + t v)` as a univariate polynomial, from `d + 1` calls at
    /// `t = 0, ..., d`.
    pub fn restrict_to_line(&self, a: &[Rational], v: &[Rational], d: usize) -> Result<UniPoly> {
        self.restrict_to_line_from(a, v, d, None)
    }

    /// As [`restrict_to_line`](Self::restrict_to_line), reusing a known value
    /// `f(a)` for the node `t = 0` (then only `d` calls are made).
    pub fn restrict_to_line_from(
        &self,
        a: &[Rational],
        v: &[Rational],
        d: usize,
        f_a: Option<Rational>,
    ) -> Result<UniPoly> {
        self.check_arity(a)?;
        self.check_arity(v)?;
        let values = self.line_values(a, v, d, f_a)?;
        Ok(UniPoly::interpolate_integer_nodes(&values))
    }

    fn line_values(
        &self,
        a: &[Rational],
        v: &[Rational],
        d: usize,
        f_a: Option<Rational>,
    ) -> Result<Vec<Rational>> {
        let first = usize::from(f_a.is_some());
        let points: Vec<Vec<Rational>> = (first..=d)
            .map(|t| line_point(a, v, &Rational::from_integer(t.into())))
            .collect();
        let mut values = Vec::with_capacity(d + 1);
        values.extend(f_a);
        values.extend(self.evaluate_many(&points)?);
        Ok(values)
    }
}

/// `a + t v`.
pub fn line_point(a: &[Rational], v: &[Rational], t: &Rational) -> Vec<Rational> {
    a.iter().zip(v).map(|(x, y)| x + t * y).collect()
}

/// Weights `w_t` with `g'(0) = sum_t w_t g(t)` for `deg g <= d`.
fn derivative_weights(d: usize) -> Vec<Rational> {
    let mut w = Vec::with_capacity(d + 1);
    let harmonic: Rational = (1..=d)
        .map(|k| Rational::new(BigInt::one(), BigInt::from(k)))
        .sum();
    w.push(-harmonic);
    for t in 1..=d {
        let c = Rational::new(binomial(BigInt::from(d), BigInt::from(t)), BigInt::from(t));
        w.push(if t % 2 == 1 { c } else { -c });
    }
    w
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); n];
    e[i] = Rational::one();
    e
}

/// `(df/dx_i)(a)` from `degree_bound + 1` evaluations along `a + t e_i`.
pub fn partial_derivative_at(oracle: &PolyOracle, i: usize, a: &[Rational]) -> Result<Rational> {
    partial_derivative_with_degree(oracle, i, a, oracle.degree_bound())
}

/// As [`partial_derivative_at`] with an explicit degree bound `d`
/// (exactly `d + 1` calls).
pub fn partial_derivative_with_degree(
    oracle: &PolyOracle,
    i: usize,
    a: &[Rational],
    d: usize,
) -> Result<Rational> {
    if i >= oracle.n_vars() {
        return Err(Error::Precondition(format!(
            "variable index {i} out of range"
        )));
    }
    let values = oracle.line_values(a, &unit(oracle.n_vars(), i), d, None)?;
    Ok(dot(&derivative_weights(d), &values))
}

fn dot(w: &[Rational], v: &[Rational]) -> Rational {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// All partial derivatives at `a` from the black box, sharing the node
/// `f(a)`: `n d + 1` calls.
pub fn gradient_by_interpolation(
    oracle: &PolyOracle,
    a: &[Rational],
    d: usize,
) -> Result<Vec<Rational>> {
    let n = oracle.n_vars();
    oracle.check_arity(a)?;
    let f_a = oracle.evaluate(a)?;
    let w = derivative_weights(d);
    (0..n)
        .map(|i| {
            let values = oracle.line_values(a, &unit(n, i), d, Some(f_a.clone()))?;
            Ok(dot(&w, &values))
        })
        .collect()
}

/// Gradient of a circuit by reverse-mode accumulation.
pub fn circuit_gradient(circuit: &Circuit, a: &[Rational]) -> Result<Vec<Rational>> {
    circuit.gradient(a)
}

/// Gradient at `a`, white-box when possible and by interpolation otherwise.
pub fn gradient_at(oracle: &PolyOracle, a: &[Rational], d: usize) -> Result<Vec<Rational>> {
    match oracle.white_box_gradient(a) {
        Some(g) => g,
        None => gradient_by_interpolation(oracle, a, d),
    }
}

const DEGREE_LINES: usize = 3;

/// Degree of `f` from its restrictions to random lines.
///
/// A restriction never has larger degree than `f`, so the maximum over the
/// lines is taken; it is wrong only if every line hits the zero set of the
/// top-degree part.
pub fn estimate_degree(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<usize> {
    let n = oracle.n_vars();
    let bound = oracle.degree_bound();
    let mut best: Option<usize> = None;
    for _ in 0..DEGREE_LINES {
        let a = rng.point(n);
        let v = rng.point(n);
        let g = oracle.restrict_to_line(&a, &v, bound)?;
        best = best.max(g.degree());
    }
    best.ok_or(Error::ZeroPolynomial)
}

/// Exact degree if the oracle declares it, otherwise an estimate.
pub fn resolve_degree(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<usize> {
    if oracle.degree_is_exact() {
        Ok(oracle.degree_bound())
    } else {
        estimate_degree(oracle, rng)
    }
}

/// Tests `f(s a) = s^d f(a)` at one random point and scalar (two calls).
pub fn check_homogeneous(oracle: &PolyOracle, d: usize, rng: &mut RandomSource) -> Result<bool> {
    let a = rng.point(oracle.n_vars());
    let s = rng.sample_avoiding(&[0, 1, -1]);
    let sa: Vec<Rational> = a.iter().map(|x| x * &s).collect();
    let vals = oracle.evaluate_many(&[a, sa])?;
    Ok(vals[1] == &vals[0] * Pow::pow(&s, d))
}
