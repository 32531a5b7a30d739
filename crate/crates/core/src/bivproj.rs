//! Factorization from bivariate projections.
//!
//! After a random change of variables every form has distinct nonzero `x1`
//! coefficients and a nonzero `x_n` coefficient, scaled to 1. Each projection
//! `g_j(x1, xj) = f(x1, 0, .., xj, .., 0, 1)` then factors into affine forms
//! `a x1 + b xj + 1` whose `a` values identify the forms across projections.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{rational_root_split, RatMatrix, UniPoly};
use crate::factorization::{Factorization, LinearForm};
use crate::oracle::{resolve_degree, PolyOracle};
use crate::random::RandomSource;
use crate::Rational;

/// Attempts with a fresh random change of variables.
pub const BIVARIATE_RETRIES: usize = 4;

/// Lines tried by [`factor_bivariate_affine`] before giving up.
const AFFINE_ATTEMPTS: usize = 4;
const AFFINE_SEED: u64 = 0x6c69_6e65;

/// Dense bivariate polynomial; `coeff(a, b)` multiplies `x^a y^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePoly {
    size: usize,
    coeffs: Vec<Rational>,
}

impl BivariatePoly {
    /// `(d + 1) x (d + 1)` grid of zeros.
    pub fn zero(d: usize) -> Self {
        Self {
            size: d + 1,
            coeffs: vec![Rational::zero(); (d + 1) * (d + 1)],
        }
    }

    /// From rows `grid[a][b]`; the grid must be square.
    pub fn from_grid(grid: Vec<Vec<Rational>>) -> Result<Self> {
        let size = grid.len();
        if grid.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch(
                "bivariate grid must be square".into(),
            ));
        }
        if size == 0 {
            return Ok(Self::zero(0));
        }
        Ok(Self {
            size,
            coeffs: grid.concat(),
        })
    }

    /// Degree bound `d` of the grid.
    pub fn bound(&self) -> usize {
        self.size - 1
    }

    pub fn coeff(&self, a: usize, b: usize) -> &Rational {
        &self.coeffs[a * self.size + b]
    }

    fn coeff_mut(&mut self, a: usize, b: usize) -> &mut Rational {
        &mut self.coeffs[a * self.size + b]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn total_degree(&self) -> Option<usize> {
        (0..self.size)
            .flat_map(|a| (0..self.size).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.coeff(a, b).is_zero())
            .map(|(a, b)| a + b)
            .max()
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for a in (0..self.size).rev() {
            let mut row = Rational::zero();
            for b in (0..self.size).rev() {
                row = row * y + self.coeff(a, b);
            }
            acc = acc * x + row;
        }
        acc
    }

    /// `g(p + t u)` as a polynomial in `t`.
    pub fn restrict(&self, p: &[Rational; 2], u: &[Rational; 2]) -> UniPoly {
        let lx = UniPoly::new(vec![p[0].clone(), u[0].clone()]);
        let ly = UniPoly::new(vec![p[1].clone(), u[1].clone()]);
        let px: Vec<UniPoly> = (0..self.size).map(|e| lx.pow(e as u32)).collect();
        let py: Vec<UniPoly> = (0..self.size).map(|e| ly.pow(e as u32)).collect();
        let mut acc = UniPoly::zero();
        for (a, pa) in px.iter().enumerate() {
            for (b, pb) in py.iter().enumerate() {
                let c = self.coeff(a, b);
                if !c.is_zero() {
                    acc = &acc + &(pa * pb).scale(c);
                }
            }
        }
        acc
    }

    fn mul_affine(&self, a: &Rational, b: &Rational) -> Self {
        let mut out = Self::zero(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let c = self.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                *out.coeff_mut(i, j) += c;
                *out.coeff_mut(i + 1, j) += a * c;
                *out.coeff_mut(i, j + 1) += b * c;
            }
        }
        out
    }

    /// Same polynomial on a grid of degree bound `d`; `None` if a nonzero
    /// coefficient would be cut off.
    fn resized(&self, d: usize) -> Option<Self> {
        let mut out = Self::zero(d);
        for a in 0..self.size {
            for b in 0..self.size {
                let c = self.coeff(a, b);
                if c.is_zero() {
                    continue;
                }
                if a > d || b > d {
                    return None;
                }
                *out.coeff_mut(a, b) = c.clone();
            }
        }
        Some(out)
    }
}

/// `lambda * prod (a x + b y + 1)^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFactorization {
    pub lambda: Rational,
    /// `(a, b, e)`, sorted by `a` then `b`.
    pub factors: Vec<(Rational, Rational, usize)>,
}

impl AffineFactorization {
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.2).sum()
    }

    pub fn expand(&self) -> BivariatePoly {
        let d = self.degree();
        let mut p = BivariatePoly::zero(d);
        *p.coeff_mut(0, 0) = self.lambda.clone();
        for (a, b, e) in &self.factors {
            for _ in 0..*e {
                p = p
                    .mul_affine(a, b)
                    .resized(d)
                    .expect("degree bounded by the exponent sum");
            }
        }
        p
    }
}

/// `g_j(x1, xj) = f(x1, 0, .., xj, .., 0, 1)` (0-based `j` with
/// `1 <= j <= n - 2`) by interpolation on the grid `{0..d}^2`; exactly
/// `(d + 1)^2` calls.
pub fn project_bivariate(oracle: &PolyOracle, j: usize, d: usize) -> Result<BivariatePoly> {
    let n = oracle.n_vars();
    if n < 3 || j == 0 || j >= n - 1 {
        return Err(Error::Precondition(format!(
            "projection index {j} needs 1 <= j <= n - 2 with n = {n}"
        )));
    }
    let mut points = Vec::with_capacity((d + 1) * (d + 1));
    for x in 0..=d {
        for y in 0..=d {
            let mut p = vec![Rational::zero(); n];
            p[0] = Rational::from_integer(x.into());
            p[j] = Rational::from_integer(y.into());
            p[n - 1] = Rational::one();
            points.push(p);
        }
    }
    let values = oracle.evaluate_many(&points)?;
    // Interpolate in y along each row, then in x along each column.
    let rows: Vec<Vec<Rational>> = values
        .chunks(d + 1)
        .map(|r| padded(UniPoly::interpolate_integer_nodes(r), d + 1))
        .collect();
    let mut grid = vec![vec![Rational::zero(); d + 1]; d + 1];
    for b in 0..=d {
        let column: Vec<Rational> = rows.iter().map(|r| r[b].clone()).collect();
        for (a, c) in padded(UniPoly::interpolate_integer_nodes(&column), d + 1)
            .into_iter()
            .enumerate()
        {
            grid[a][b] = c;
        }
    }
    BivariatePoly::from_grid(grid)
}

fn padded(p: UniPoly, len: usize) -> Vec<Rational> {
    let mut v = p.coeffs().to_vec();
    v.resize(len, Rational::zero());
    v
}

/// Factor `g` with `g(0, 0) != 0` into affine forms `a x + b y + 1`.
///
/// Two random lines meet every component once; a point on the first line and
/// a point on the second lie on the same component when `g` vanishes at their
/// midpoint. The pairing fixes each component, the root multiplicities give
/// the exponents, and the result is checked by exact expansion.
pub fn factor_bivariate_affine(g: &BivariatePoly) -> Result<AffineFactorization> {
    let lambda = g.coeff(0, 0).clone();
    if lambda.is_zero() {
        return Err(Error::Precondition(
            "affine factorization needs g(0, 0) != 0".into(),
        ));
    }
    let deg = g.total_degree().unwrap_or(0);
    if deg == 0 {
        return Ok(AffineFactorization {
            lambda,
            factors: Vec::new(),
        });
    }
    let mut rng = RandomSource::new(AFFINE_SEED);
    for _ in 0..AFFINE_ATTEMPTS {
        match affine_attempt(g, deg, &lambda, &mut rng) {
            Ok(Some(f)) => return Ok(f),
            Ok(None) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotAffineProduct)
}

type Line = ([Rational; 2], [Rational; 2]);

fn random_line(rng: &mut RandomSource) -> Line {
    ([rng.sample(), rng.sample()], [rng.sample(), rng.sample()])
}

type LinePoints = Vec<([Rational; 2], usize)>;

/// Distinct intersection points of `g` with a line, with multiplicities;
/// `Ok(None)` for a degenerate line.
fn line_roots(
    g: &BivariatePoly,
    line: &Line,
    deg: usize,
) -> Result<Option<LinePoints>> {
    let h = g.restrict(&line.0, &line.1);
    if h.degree() != Some(deg) {
        return Ok(None);
    }
    let split = rational_root_split(&h)?;
    if !split.splits() {
        return Err(Error::NotAffineProduct);
    }
    let (p, u) = line;
    Ok(Some(
        split
            .roots
            .into_iter()
            .map(|(t, m)| ([&p[0] + &t * &u[0], &p[1] + &t * &u[1]], m))
            .collect(),
    ))
}

fn affine_attempt(
    g: &BivariatePoly,
    deg: usize,
    lambda: &Rational,
    rng: &mut RandomSource,
) -> Result<Option<AffineFactorization>> {
    let (l1, l2) = (random_line(rng), random_line(rng));
    let (Some(r1), Some(r2)) = (line_roots(g, &l1, deg)?, line_roots(g, &l2, deg)?) else {
        return Ok(None);
    };
    if r1.len() != r2.len() {
        return Ok(None);
    }
    let two = Rational::from_integer(2.into());
    let mut used = vec![false; r2.len()];
    let mut factors = Vec::with_capacity(r1.len());
    for (p, m) in &r1 {
        let mut partner = None;
        for (idx, (q, mq)) in r2.iter().enumerate() {
            if used[idx] || mq != m || p == q {
                continue;
            }
            let mid = [(&p[0] + &q[0]) / &two, (&p[1] + &q[1]) / &two];
            if g.eval(&mid[0], &mid[1]).is_zero() {
                if partner.is_some() {
                    return Ok(None);
                }
                partner = Some(idx);
            }
        }
        let Some(idx) = partner else {
            return Ok(None);
        };
        used[idx] = true;
        let q = &r2[idx].0;
        // a x + b y = -1 through p and q
        let det = &p[0] * &q[1] - &p[1] * &q[0];
        if det.is_zero() {
            return Ok(None);
        }
        let a = (&p[1] - &q[1]) / &det;
        let b = (&q[0] - &p[0]) / &det;
        factors.push((a, b, *m));
    }
    factors.sort();
    let candidate = AffineFactorization {
        lambda: lambda.clone(),
        factors,
    };
    if candidate.degree() != deg {
        return Ok(None);
    }
    match candidate.expand().resized(g.bound()) {
        Some(e) if e == *g => Ok(Some(candidate)),
        _ => Ok(None),
    }
}

/// Combine the factorizations of `g_1, ..., g_{n-2}` (in order) into a
/// factorization of `f` whose forms have `x_n` coefficient 1.
pub fn merge_projections(projections: &[AffineFactorization]) -> Result<Factorization> {
    let Some(first) = projections.first() else {
        return Err(Error::Precondition("no projections to merge".into()));
    };
    let n = projections.len() + 2;
    let sorted: Vec<Vec<&(Rational, Rational, usize)>> = projections
        .iter()
        .map(|p| {
            let mut f: Vec<_> = p.factors.iter().collect();
            f.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
            f
        })
        .collect();
    let a_tuple: Vec<&Rational> = sorted[0].iter().map(|f| &f.0).collect();
    let e_tuple: Vec<usize> = sorted[0].iter().map(|f| f.2).collect();
    if projections.len() > 1
        && (a_tuple.iter().any(|a| a.is_zero()) || a_tuple.windows(2).any(|w| w[0] == w[1]))
    {
        return Err(Error::InconsistentProjections(
            "x1 coefficients are not distinct and nonzero".into(),
        ));
    }
    for (j, (p, s)) in projections.iter().zip(&sorted).enumerate().skip(1) {
        if p.lambda != first.lambda {
            return Err(Error::InconsistentProjections(format!(
                "projection {} has a different constant",
                j + 1
            )));
        }
        let a: Vec<&Rational> = s.iter().map(|f| &f.0).collect();
        let e: Vec<usize> = s.iter().map(|f| f.2).collect();
        if a != a_tuple || e != e_tuple {
            return Err(Error::InconsistentProjections(format!(
                "projection {} has a different factor pattern",
                j + 1
            )));
        }
    }
    let factors = (0..a_tuple.len())
        .map(|i| {
            let mut c = Vec::with_capacity(n);
            c.push(a_tuple[i].clone());
            c.extend(sorted.iter().map(|s| s[i].1.clone()));
            c.push(Rational::one());
            Ok((LinearForm::new(c)?, e_tuple[i]))
        })
        .collect::<Result<Vec<_>>>()?;
    Factorization::new(n, first.lambda.clone(), factors)
}

/// Factor a homogeneous `f` into linear forms through bivariate projections
/// of `f(A x)` for a random `A`; verified at one random point.
pub fn factor_general(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<Factorization> {
    let n = oracle.n_vars();
    if n == 0 {
        return Err(Error::Precondition("polynomial in zero variables".into()));
    }
    let d = resolve_degree(oracle, rng)?;
    if d == 0 || n <= 2 {
        let f = factor_small(oracle, n, d)?;
        return verified(oracle, f, rng);
    }
    let mut last = Error::RetriesExhausted(BIVARIATE_RETRIES);
    for _ in 0..BIVARIATE_RETRIES {
        match projection_attempt(oracle, n, d, rng) {
            Ok(f) => return Ok(f),
            Err(
                e @ (Error::NotAffineProduct
                | Error::InconsistentProjections(_)
                | Error::VerificationFailed),
            ) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn verified(
    oracle: &PolyOracle,
    f: Factorization,
    rng: &mut RandomSource,
) -> Result<Factorization> {
    let p = rng.point(oracle.n_vars());
    if oracle.evaluate(&p)? != f.eval(&p) {
        return Err(Error::VerificationFailed);
    }
    Ok(f)
}

/// Constants, one variable, and two variables through `u(t) = f(t, 1)`.
fn factor_small(oracle: &PolyOracle, n: usize, d: usize) -> Result<Factorization> {
    if d == 0 {
        return Factorization::constant(n, oracle.evaluate(&vec![Rational::zero(); n])?);
    }
    if n == 1 {
        let c = oracle.evaluate(&[Rational::one()])?;
        return Factorization::new(1, c, vec![(LinearForm::variable(1, 0), d)]);
    }
    let u = oracle.restrict_to_line(
        &[Rational::zero(), Rational::one()],
        &[Rational::one(), Rational::zero()],
        d,
    )?;
    let Some(du) = u.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    let split = rational_root_split(&u)?;
    if !split.splits() {
        return Err(Error::NotAffineProduct);
    }
    let mut factors: Vec<(LinearForm, usize)> = split
        .roots
        .iter()
        .map(|(r, m)| Ok((LinearForm::new(vec![Rational::one(), -r])?, *m)))
        .collect::<Result<_>>()?;
    if d > du {
        factors.push((LinearForm::variable(2, 1), d - du));
    }
    Factorization::new(2, u.leading().expect("nonzero").clone(), factors)
}

fn projection_attempt(
    oracle: &PolyOracle,
    n: usize,
    d: usize,
    rng: &mut RandomSource,
) -> Result<Factorization> {
    let a = loop {
        let m = RatMatrix::from_rows((0..n).map(|_| rng.point(n)).collect());
        if m.is_invertible() {
            break m;
        }
    };
    let g = oracle.substitute(&a)?;
    let mut parts = Vec::with_capacity(n - 2);
    let mut reinserted = 0;
    for j in 1..n - 1 {
        let p = project_bivariate(&g, j, d)?;
        if p.coeff(0, 0).is_zero() {
            return Err(Error::NotAffineProduct);
        }
        let deg = p.total_degree().unwrap_or(0);
        if deg < d {
            if n > 3 {
                return Err(Error::InconsistentProjections(format!(
                    "projection {} lost degree",
                    j + 1
                )));
            }
            reinserted = d - deg;
        }
        parts.push(factor_bivariate_affine(&p)?);
    }
    let merged = merge_projections(&parts)?;
    let mut factors = merged.factors().to_vec();
    if reinserted > 0 {
        factors.push((LinearForm::variable(n, n - 1), reinserted));
    }
    let inv = a.inverse().expect("invertible");
    let pulled = factors
        .into_iter()
        .map(|(l, m)| Ok((LinearForm::new(inv.vec_mul(l.coeffs()))?, m)))
        .collect::<Result<Vec<_>>>()?;
    let f = Factorization::new(n, merged.lambda().clone(), pulled)?;
    verified(oracle, f, rng)
}
