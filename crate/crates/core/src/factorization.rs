//! Linear forms and canonical factorizations `lambda * prod l_i^{alpha_i}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::exactmath::primitive_integer_vector;
use crate::Rational;

/// A nonzero linear form `sum c_i x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    coeffs: Vec<Rational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::Precondition(
                "linear form with all coefficients zero".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    /// The coordinate form `x_i` in `n` variables.
    pub fn variable(n: usize, i: usize) -> Self {
        let mut c = vec![Rational::zero(); n];
        c[i] = Rational::one();
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn n_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().zip(point).map(|(c, x)| c * x).sum()
    }

    /// `(p, s)` with `p` a primitive integer vector and `self = s * p`.
    pub fn integer_scaled(&self) -> (Vec<BigInt>, Rational) {
        let ints = primitive_integer_vector(&self.coeffs);
        let j = ints.iter().position(|c| !c.is_zero()).expect("forms are nonzero");
        let scale = &self.coeffs[j] / Rational::from_integer(ints[j].clone());
        (ints, scale)
    }

    /// The first nonzero coefficient.
    pub fn leading(&self) -> &Rational {
        self.coeffs
            .iter()
            .find(|c| !c.is_zero())
            .expect("nonzero form")
    }

    /// `(canonical, s)` with `self = s * canonical` and the canonical form's
    /// first nonzero coefficient equal to 1.
    pub fn canonical(&self) -> (LinearForm, Rational) {
        let s = self.leading().clone();
        let inv = s.recip();
        (
            LinearForm {
                coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
            },
            s,
        )
    }

    pub fn is_canonical(&self) -> bool {
        self.leading().is_one()
    }

    pub fn is_proportional_to(&self, other: &LinearForm) -> bool {
        self.canonical().0 == other.canonical().0
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c } else { c.clone() };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "x{}", i + 1)?;
        }
        Ok(())
    }
}

/// `lambda * prod l_i^{m_i}` in canonical form: every form scaled so its first
/// nonzero coefficient is 1, pairwise non-proportional, sorted by coefficient
/// vector and then by multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    n_vars: usize,
    lambda: Rational,
    factors: Vec<(LinearForm, usize)>,
}

impl Factorization {
    /// Canonicalizes the input: rescales forms into `lambda`, merges
    /// proportional forms and drops zero multiplicities.
    pub fn new(n_vars: usize, lambda: Rational, factors: Vec<(LinearForm, usize)>) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut lambda = lambda;
        let mut merged: Vec<(LinearForm, usize)> = Vec::with_capacity(factors.len());
        for (form, mult) in factors {
            if form.n_vars() != n_vars {
                return Err(Error::DimensionMismatch(format!(
                    "form in {} variables inside a factorization in {n_vars}",
                    form.n_vars()
                )));
            }
            if mult == 0 {
                continue;
            }
            let (canon, s) = form.canonical();
            lambda *= Pow::pow(&s, mult);
            match merged.iter_mut().find(|(f, _)| *f == canon) {
                Some((_, m)) => *m += mult,
                None => merged.push((canon, mult)),
            }
        }
        merged.sort_by(cmp_factor);
        Ok(Self {
            n_vars,
            lambda,
            factors: merged,
        })
    }

    /// The constant polynomial `lambda`.
    pub fn constant(n_vars: usize, lambda: Rational) -> Result<Self> {
        Self::new(n_vars, lambda, Vec::new())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn factors(&self) -> &[(LinearForm, usize)] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    /// Sorted multiset of multiplicities.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.factors.iter().map(|(_, m)| *m).collect();
        m.sort_unstable();
        m
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.factors
            .iter()
            .fold(self.lambda.clone(), |acc, (l, m)| {
                acc * Pow::pow(l.eval(point), *m)
            })
    }

    /// Multiply the constant by `c`.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        Self::new(self.n_vars, &self.lambda * c, self.factors.clone())
    }
}

fn cmp_factor(a: &(LinearForm, usize), b: &(LinearForm, usize)) -> Ordering {
    a.0.coeffs.cmp(&b.0.coeffs).then(a.1.cmp(&b.1))
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lambda)?;
        for (l, m) in &self.factors {
            write!(f, " * ({l})")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}
