use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographically with `x1` most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    n_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl SparsePoly {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(vec![0; n_vars], c);
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Build from `(coefficient, exponents)` pairs; like terms are combined.
    pub fn from_terms(
        n_vars: usize,
        terms: impl IntoIterator<Item = (Rational, Vec<u32>)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n_vars);
        for (c, e) in terms {
            if e.len() != n_vars {
                return Err(Error::ArityMismatch {
                    expected: n_vars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        debug_assert_eq!(exps.len(), self.n_vars);
        if c.is_zero() {
            return;
        }
        let key = Monomial(exps);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree() as usize).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= Pow::pow(x, e);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.n_vars);
        }
        Self {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e: Vec<u32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut acc = Self::constant(self.n_vars, Rational::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(exps, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// One term per line, `coeff e1 ... en`, in decreasing graded-lex order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in self.terms.iter().rev() {
            write!(s, "{}", format_rational(c)).unwrap();
            for e in &m.0 {
                write!(s, " {e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Parse the text serialization. Blank lines and `#` comments are
    /// ignored; the arity is taken from the first term.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::parse_text(text, None)
    }

    pub fn from_text_with_arity(text: &str, n_vars: usize) -> Result<Self> {
        Self::parse_text(text, Some(n_vars))
    }

    fn parse_text(text: &str, arity: Option<usize>) -> Result<Self> {
        let mut n_vars = arity;
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let coeff = parse_rational(fields.next().unwrap())
                .ok_or_else(|| Error::Format(format!("line {}: bad coefficient", lineno + 1)))?;
            let exps: Vec<u32> = fields
                .map(|f| f.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Format(format!("line {}: bad exponent", lineno + 1)))?;
            match n_vars {
                None => n_vars = Some(exps.len()),
                Some(n) if n != exps.len() => {
                    return Err(Error::Format(format!(
                        "line {}: {} exponents, expected {n}",
                        lineno + 1,
                        exps.len()
                    )))
                }
                _ => {}
            }
            terms.push((coeff, exps));
        }
        let n = n_vars.ok_or_else(|| Error::Format("no terms and no arity given".into()))?;
        Self::from_terms(n, terms)
    }
}

/// `p/q` with `q >= 1`, or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
    }
}

/// Always `p/q`, including integers (`3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn difference_of_squares() {
        let x1 = SparsePoly::var(2, 0);
        let x2 = SparsePoly::var(2, 1);
        let p = x1.add(&x2).mul(&x1.sub(&x2));
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[2, 0]), q(1));
        assert_eq!(p.coeff(&[0, 2]), q(-1));
        assert!(p.is_homogeneous());
        assert_eq!(p.eval(&[q(1), q(2)]), q(-3));
    }

    #[test]
    fn text_round_trip_and_order() {
        let p = SparsePoly::from_terms(
            2,
            vec![
                (q(1), vec![0, 1]),
                (Rational::new(3.into(), 4.into()), vec![2, 0]),
                (q(-2), vec![1, 1]),
            ],
        )
        .unwrap();
        let text = p.to_text();
        assert_eq!(text, "3/4 2 0\n-2/1 1 1\n1/1 0 1\n");
        assert_eq!(SparsePoly::from_text(&text).unwrap(), p);
    }

    #[test]
    fn text_errors() {
        assert!(SparsePoly::from_text("1 2 3\n1 2\n").is_err());
        assert!(SparsePoly::from_text("1/0 1\n").is_err());
        assert!(SparsePoly::from_text("").is_err());
        assert!(SparsePoly::from_text_with_arity("# nothing\n", 3)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn partial_derivative() {
        // x1^2 x2 -> d/dx2 = x1^2
        let p = SparsePoly::from_terms(2, vec![(q(1), vec![2, 1])]).unwrap();
        assert_eq!(
            p.partial(1),
            SparsePoly::from_terms(2, vec![(q(1), vec![2, 0])]).unwrap()
        );
        assert_eq!(p.partial(1).eval(&[q(2), q(7)]), q(4));
    }
}
