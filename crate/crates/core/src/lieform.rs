//! Factorization into products of linearly independent forms through the Lie
//! algebra of `f`.
//!
//! If `f(x) = lambda * m(C x)` for a monomial `m`, the Lie algebra of `f` is
//! `C^-1 g_m C` and `g_m` is a hyperplane of diagonal matrices. Steps 1 to 3
//! below decide membership in such an orbit over the algebraic closure; the
//! remaining steps recover `C`, the exponents and `lambda` over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{
    commute_family, commuting_family_diagonalizable, rational_root_split,
    rational_roots_with_multiplicity, simultaneous_diagonalize, RatMatrix, UniPoly,
};
use crate::factorization::{Factorization, LinearForm};
use crate::lie::{lie_algebra_basis, LieBasis};
use crate::oracle::{check_homogeneous, gradient_at, resolve_degree, PolyOracle};
use crate::random::RandomSource;
use crate::Rational;

/// Which necessary condition failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    Homogeneity,
    /// The degree is not a multiple of `n` (equal exponents only).
    Degree {
        degree: usize,
        n: usize,
    },
    Dimension {
        expected: usize,
        found: usize,
    },
    Commutation,
    Diagonalizability,
    Trace,
    /// The candidate factorization disagreed with `f` at a random point.
    Verification,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::Homogeneity => write!(f, "not homogeneous"),
            Reason::Degree { degree, n } => write!(f, "degree {degree} is not a multiple of {n}"),
            Reason::Dimension { expected, found } => {
                write!(f, "Lie algebra has dimension {found}, expected {expected}")
            }
            Reason::Commutation => write!(f, "Lie algebra is not commutative"),
            Reason::Diagonalizability => write!(f, "a basis matrix is not diagonalizable"),
            Reason::Trace => write!(f, "a basis matrix has nonzero trace"),
            Reason::Verification => write!(f, "candidate failed verification"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitDecision {
    /// A factorization exists over the algebraic closure.
    Yes,
    No(Reason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorOutcome {
    FactoredOverQ(Factorization),
    /// A factorization exists over the algebraic closure but the forms are
    /// not rational; carries a monic factor without rational roots that
    /// blocks diagonalization over the rationals.
    ExistsOverClosure(UniPoly),
    NotProduct(Reason),
}

struct Checked {
    n: usize,
    d: usize,
    basis: LieBasis,
}

/// Steps 1 to 3: Lie algebra, dimension, commutation, diagonalizability and,
/// for equal exponents, trace zero.
fn decide_steps(
    oracle: &PolyOracle,
    equal_exponents: bool,
    rng: &mut RandomSource,
) -> Result<Result<Checked, Reason>> {
    let n = oracle.n_vars();
    if n == 0 {
        return Err(Error::Precondition("polynomial in zero variables".into()));
    }
    let d = resolve_degree(oracle, rng)?;
    if equal_exponents && d % n != 0 {
        return Ok(Err(Reason::Degree { degree: d, n }));
    }
    if !check_homogeneous(oracle, d, rng)? {
        return Ok(Err(Reason::Homogeneity));
    }
    let basis = lie_algebra_basis(oracle, rng)?;
    if basis.dim() != n - 1 {
        return Ok(Err(Reason::Dimension {
            expected: n - 1,
            found: basis.dim(),
        }));
    }
    if !commute_family(basis.matrices())? {
        return Ok(Err(Reason::Commutation));
    }
    if !commuting_family_diagonalizable(basis.matrices(), rng)? {
        return Ok(Err(Reason::Diagonalizability));
    }
    if equal_exponents && basis.matrices().iter().any(|b| !b.trace().is_zero()) {
        return Ok(Err(Reason::Trace));
    }
    Ok(Ok(Checked { n, d, basis }))
}

/// Decide whether `f` is a product of `n` independent forms over the
/// algebraic closure, without computing eigenvalues. With `equal_exponents`
/// the exponents must all be `d / n`.
pub fn decide_orbit_membership(
    oracle: &PolyOracle,
    equal_exponents: bool,
    rng: &mut RandomSource,
) -> Result<OrbitDecision> {
    Ok(match decide_steps(oracle, equal_exponents, rng)? {
        Ok(_) => OrbitDecision::Yes,
        Err(r) => OrbitDecision::No(r),
    })
}

/// `f = lambda * (l_1 ... l_n)^(d/n)` with independent forms.
pub fn factor_equal_exponents(
    oracle: &PolyOracle,
    rng: &mut RandomSource,
) -> Result<FactorOutcome> {
    factor(oracle, true, rng)
}

/// `f = lambda * l_1^a_1 ... l_n^a_n` with independent forms and unknown
/// positive exponents.
pub fn factor_independent_forms(
    oracle: &PolyOracle,
    rng: &mut RandomSource,
) -> Result<FactorOutcome> {
    factor(oracle, false, rng)
}

fn factor(
    oracle: &PolyOracle,
    equal_exponents: bool,
    rng: &mut RandomSource,
) -> Result<FactorOutcome> {
    let Checked { n, d, basis } = match decide_steps(oracle, equal_exponents, rng)? {
        Ok(c) => c,
        Err(r) => return Ok(FactorOutcome::NotProduct(r)),
    };
    let t = match simultaneous_diagonalize(basis.matrices(), n, rng) {
        Ok(t) => t,
        Err(Error::IrrationalEigenvalues(w)) => {
            return Ok(FactorOutcome::ExistsOverClosure(witness(&basis, w)?))
        }
        Err(e) => return Err(e),
    };
    let c = t.inverse().expect("transition matrices are invertible");
    let diagonals: Vec<Vec<Rational>> = basis
        .matrices()
        .iter()
        .map(|b| (&(&c * b) * &t).diagonal())
        .collect();
    let alpha = exponents_from_diagonals(&diagonals, n, d)?;
    let forms: Vec<LinearForm> = (0..n)
        .map(|i| {
            LinearForm::new(c.row(i).to_vec()).expect("rows of an invertible matrix are nonzero")
        })
        .collect();
    let lambda = lambda_at_nonvanishing_point(oracle, &forms, &alpha, rng)?;
    let f = Factorization::new(n, lambda, forms.into_iter().zip(alpha).collect())?;
    let p = rng.point(n);
    if oracle.evaluate(&p)? != f.eval(&p) {
        return Ok(FactorOutcome::NotProduct(Reason::Verification));
    }
    Ok(FactorOutcome::FactoredOverQ(f))
}

/// The first basis matrix whose eigenvalues are not all rational gives a
/// witness independent of the random combination.
fn witness(basis: &LieBasis, fallback: UniPoly) -> Result<UniPoly> {
    for b in basis.matrices() {
        let split = rational_root_split(&b.char_poly()?.squarefree_part()?)?;
        if !split.splits() {
            return Ok(split.cofactor.monic());
        }
    }
    Ok(fallback)
}

/// Orthogonal of the diagonalized Lie algebra, scaled to sum to `d`.
fn exponents_from_diagonals(diagonals: &[Vec<Rational>], n: usize, d: usize) -> Result<Vec<usize>> {
    let m = if diagonals.is_empty() {
        RatMatrix::zeros(0, n)
    } else {
        RatMatrix::from_rows(diagonals.to_vec())
    };
    let null = m.nullspace();
    if null.len() != 1 {
        return Err(Error::SystemNotUnique(null.len()));
    }
    let v = &null[0];
    let s: Rational = v.iter().sum();
    if s.is_zero() {
        return Err(Error::NonIntegralExponents(v.clone()));
    }
    let scale = Rational::from_integer(BigInt::from(d)) / s;
    let alpha: Vec<Rational> = v.iter().map(|x| x * &scale).collect();
    positive_integers(&alpha).ok_or(Error::NonIntegralExponents(alpha))
}

fn positive_integers(v: &[Rational]) -> Option<Vec<usize>> {
    v.iter()
        .map(|x| {
            if x.is_integer() && x.is_positive() {
                usize::try_from(x.to_integer()).ok()
            } else {
                None
            }
        })
        .collect()
}

/// `lambda = f(p) / prod l_i(p)^a_i` at the all-ones point, or at random
/// points if some form vanishes there.
fn lambda_at_nonvanishing_point(
    oracle: &PolyOracle,
    forms: &[LinearForm],
    alpha: &[usize],
    rng: &mut RandomSource,
) -> Result<Rational> {
    let n = oracle.n_vars();
    let mut p = vec![Rational::one(); n];
    while forms.iter().any(|l| l.eval(&p).is_zero()) {
        p = rng.point(n);
    }
    let denom = forms
        .iter()
        .zip(alpha)
        .fold(Rational::one(), |acc, (l, &a)| {
            acc * Pow::pow(l.eval(&p), a)
        });
    let value = oracle.evaluate(&p)?;
    if value.is_zero() {
        return Err(Error::VerificationFailed);
    }
    Ok(value / denom)
}

/// Exponents as the eigenvalues of the unique `H` in the centralizer of the
/// Lie algebra with `Tr H = d` and `Tr(H B) = 0` for every basis member.
/// Returned sorted, with repetitions.
pub fn exponents_via_centralizer(basis: &LieBasis, d: usize) -> Result<Vec<Rational>> {
    let h = centralizer_matrix(basis, d)?;
    let mut out = Vec::with_capacity(basis.n());
    let roots = rational_roots_with_multiplicity(&h.char_poly()?)?;
    let total: usize = roots.iter().map(|(_, m)| m).sum();
    if total != basis.n() {
        let split = rational_root_split(&h.char_poly()?)?;
        return Err(Error::IrrationalEigenvalues(split.cofactor.monic()));
    }
    for (r, m) in roots {
        out.extend(std::iter::repeat_n(r, m));
    }
    Ok(out)
}

/// Solve for `H`; unknowns are its entries row-major plus a homogenizing
/// coordinate for the right-hand side.
pub fn centralizer_matrix(basis: &LieBasis, d: usize) -> Result<RatMatrix> {
    let n = basis.n();
    let nn = n * n;
    let idx = |a: usize, b: usize| a * n + b;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    // Tr H - d = 0
    let mut tr = vec![Rational::zero(); nn + 1];
    for i in 0..n {
        tr[idx(i, i)] = Rational::one();
    }
    tr[nn] = -Rational::from_integer(BigInt::from(d));
    rows.push(tr);
    for b in basis.matrices() {
        // Tr(H B) = sum_ij H_ij B_ji
        let mut row = vec![Rational::zero(); nn + 1];
        for i in 0..n {
            for j in 0..n {
                row[idx(i, j)] = b.get(j, i).clone();
            }
        }
        rows.push(row);
        // (H B - B H)_kl = sum_m H_km B_ml - B_km H_ml
        for k in 0..n {
            for l in 0..n {
                let mut row = vec![Rational::zero(); nn + 1];
                for m in 0..n {
                    row[idx(k, m)] += b.get(m, l);
                    row[idx(m, l)] -= b.get(k, m);
                }
                rows.push(row);
            }
        }
    }
    let null = RatMatrix::from_rows(rows).nullspace();
    let solutions: Vec<&Vec<Rational>> = null.iter().filter(|v| !v[nn].is_zero()).collect();
    if null.len() != 1 || solutions.len() != 1 {
        return Err(Error::SystemNotUnique(null.len()));
    }
    let v = solutions[0];
    let s = v[nn].recip();
    RatMatrix::new(n, n, v[..nn].iter().map(|x| x * &s).collect())
}

/// Result of [`essential_variables_reduce`].
#[derive(Clone, Debug)]
pub struct Reduction {
    /// Invertible `A`; `f(A^-1 y)` depends only on `y_1, ..., y_r`.
    pub a: RatMatrix,
    pub r: usize,
    /// `z -> f(A^-1 (z, 0))`, an oracle in `r` variables.
    pub reduced: PolyOracle,
}

impl Reduction {
    /// Pull a factorization of the reduced polynomial back to `f`:
    /// `l(z)` becomes `l(W x)` where `W` is the first `r` rows of `A`.
    pub fn lift(&self, f: &Factorization) -> Result<Factorization> {
        let n = self.a.rows();
        let w = RatMatrix::from_rows(
            (0..self.r)
                .map(|i| self.a.row(i).to_vec())
                .collect::<Vec<_>>(),
        );
        let factors = f
            .factors()
            .iter()
            .map(|(l, m)| {
                Ok((
                    LinearForm::new(if self.r == 0 {
                        vec![Rational::zero(); n]
                    } else {
                        w.vec_mul(l.coeffs())
                    })?,
                    *m,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Factorization::new(n, f.lambda().clone(), factors)
    }
}

const EXTRA_GRADIENTS: usize = 2;

/// Change of variables exposing the essential variables of `f`: `r` is the
/// rank of gradients at random points, and the first `r` rows of `A` span
/// them.
pub fn essential_variables_reduce(
    oracle: &PolyOracle,
    rng: &mut RandomSource,
) -> Result<Reduction> {
    let n = oracle.n_vars();
    let d = if oracle.is_white_box() {
        0
    } else {
        resolve_degree(oracle, rng)?
    };
    let mut grads: Vec<Vec<Rational>> = Vec::new();
    let mut rank = 0;
    let mut stale = 0;
    while stale < EXTRA_GRADIENTS && grads.len() < n + EXTRA_GRADIENTS {
        grads.push(gradient_at(oracle, &rng.point(n), d)?);
        let new_rank = RatMatrix::from_rows(grads.clone()).rank();
        if new_rank > rank {
            rank = new_rank;
            stale = 0;
        } else {
            stale += 1;
        }
    }
    if rank == 0 {
        let p = rng.point(n);
        if oracle.evaluate(&p)?.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
    }
    // Row basis of the gradient span (orthogonal of the kernel), completed
    // greedily with unit vectors.
    let kernel = RatMatrix::from_rows(grads).nullspace();
    let mut rows = if kernel.is_empty() {
        Vec::new()
    } else {
        RatMatrix::from_rows(kernel).nullspace()
    };
    if rows.is_empty() && rank > 0 {
        rows = identity_rows(n);
    }
    for j in 0..n {
        if rows.len() == n {
            break;
        }
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        rows.push(e);
        if RatMatrix::from_rows(rows.clone()).rank() < rows.len() {
            rows.pop();
        }
    }
    let a = RatMatrix::from_rows(rows);
    let inv = a.inverse().expect("completed basis is invertible");
    let sub = RatMatrix::from_columns(&(0..rank).map(|j| inv.column(j)).collect::<Vec<_>>());
    let sub = if rank == 0 {
        RatMatrix::zeros(n, 0)
    } else {
        sub
    };
    let reduced = oracle.substitute(&sub)?;
    // f(A^-1 (z, w)) must not depend on w.
    if rank < n {
        let y = rng.point(n);
        let z: Vec<Rational> = y[..rank].to_vec();
        if oracle.evaluate(&inv.mul_vec(&y))? != reduced.evaluate(&z)? {
            return Err(Error::VerificationFailed);
        }
    }
    Ok(Reduction {
        a,
        r: rank,
        reduced,
    })
}

fn identity_rows(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// [`factor_independent_forms`] after reducing to the essential variables,
/// so factorizations with fewer than `n` distinct forms are found too.
pub fn factor_with_reduction(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<FactorOutcome> {
    let red = essential_variables_reduce(oracle, rng)?;
    if red.r == 0 {
        let p = vec![Rational::zero(); oracle.n_vars()];
        return Ok(FactorOutcome::FactoredOverQ(Factorization::constant(
            oracle.n_vars(),
            oracle.evaluate(&p)?,
        )?));
    }
    Ok(match factor_independent_forms(&red.reduced, rng)? {
        FactorOutcome::FactoredOverQ(f) => FactorOutcome::FactoredOverQ(red.lift(&f)?),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::parse_expression;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn expr(s: &str) -> PolyOracle {
        let c = parse_expression(s).unwrap();
        PolyOracle::from_circuit(c).black_box_only()
    }

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::from_i64(c).unwrap()
    }

    fn factored(o: FactorOutcome) -> Factorization {
        match o {
            FactorOutcome::FactoredOverQ(f) => f,
            other => panic!("expected a factorization, got {other:?}"),
        }
    }

    #[test]
    fn decisions() {
        let mut rng = RandomSource::new(1);
        assert_eq!(
            decide_orbit_membership(&expr("x1^2 - x2^2"), true, &mut rng).unwrap(),
            OrbitDecision::Yes
        );
        assert_eq!(
            decide_orbit_membership(&expr("x1^2 + x2^2"), true, &mut rng).unwrap(),
            OrbitDecision::Yes
        );
        assert_eq!(
            decide_orbit_membership(&expr("x1^3 + x2^3 + x3^3"), true, &mut rng).unwrap(),
            OrbitDecision::No(Reason::Dimension {
                expected: 2,
                found: 0
            })
        );
        assert_eq!(
            decide_orbit_membership(&expr("x1^2*x2"), true, &mut rng).unwrap(),
            OrbitDecision::No(Reason::Degree { degree: 3, n: 2 })
        );
        assert_eq!(
            decide_orbit_membership(&expr("x1^2 + x2"), false, &mut rng).unwrap(),
            OrbitDecision::No(Reason::Homogeneity)
        );
    }

    #[test]
    fn equal_exponent_examples() {
        let mut rng = RandomSource::new(2);
        let f = factored(factor_equal_exponents(&expr("x1^2 - x2^2"), &mut rng).unwrap());
        let want =
            Factorization::new(2, q(1), vec![(form(&[1, 1]), 1), (form(&[1, -1]), 1)]).unwrap();
        assert_eq!(f, want);
        let f = factored(factor_equal_exponents(&expr("x1*x2"), &mut rng).unwrap());
        assert_eq!(
            f,
            Factorization::new(2, q(1), vec![(form(&[1, 0]), 1), (form(&[0, 1]), 1)]).unwrap()
        );
        let f = factored(factor_equal_exponents(&expr("(2*x1)^2*(2*x2)^2"), &mut rng).unwrap());
        assert_eq!(
            f,
            Factorization::new(2, q(16), vec![(form(&[1, 0]), 2), (form(&[0, 1]), 2)]).unwrap()
        );
    }

    #[test]
    fn general_examples() {
        let mut rng = RandomSource::new(3);
        let f = factored(factor_independent_forms(&expr("x1^2*x2"), &mut rng).unwrap());
        assert_eq!(
            f,
            Factorization::new(2, q(1), vec![(form(&[1, 0]), 2), (form(&[0, 1]), 1)]).unwrap()
        );
        let f = factored(factor_independent_forms(&expr("(x1+x2)^2*(x1-x2)"), &mut rng).unwrap());
        assert_eq!(
            f,
            Factorization::new(2, q(1), vec![(form(&[1, 1]), 2), (form(&[1, -1]), 1)]).unwrap()
        );
        assert_eq!(
            factor_independent_forms(&expr("x1^2 + x2^2"), &mut rng).unwrap(),
            FactorOutcome::ExistsOverClosure(UniPoly::from_i64(&[1, 0, 1]))
        );
    }

    #[test]
    fn single_variable() {
        let mut rng = RandomSource::new(4);
        let f = factored(factor_independent_forms(&expr("3*x1^4"), &mut rng).unwrap());
        assert_eq!(
            f,
            Factorization::new(1, q(3), vec![(form(&[1]), 4)]).unwrap()
        );
    }

    #[test]
    fn centralizer_examples() {
        let b = LieBasis::new(2, vec![RatMatrix::diag(&[q(1), q(-2)])]).unwrap();
        assert_eq!(
            centralizer_matrix(&b, 3).unwrap(),
            RatMatrix::diag(&[q(2), q(1)])
        );
        assert_eq!(exponents_via_centralizer(&b, 3).unwrap(), vec![q(1), q(2)]);
        let b = LieBasis::new(
            3,
            vec![
                RatMatrix::diag(&[q(1), q(-1), q(0)]),
                RatMatrix::diag(&[q(0), q(1), q(-1)]),
            ],
        )
        .unwrap();
        assert_eq!(centralizer_matrix(&b, 3).unwrap(), RatMatrix::identity(3));
        let mut rng = RandomSource::new(5);
        let basis = lie_algebra_basis(&expr("(x1+x2)^2*(x1-x2)"), &mut rng).unwrap();
        assert_eq!(
            exponents_via_centralizer(&basis, 3).unwrap(),
            vec![q(1), q(2)]
        );
    }

    #[test]
    fn centralizer_not_unique() {
        let b = LieBasis::new(2, vec![]).unwrap();
        assert!(matches!(
            centralizer_matrix(&b, 2),
            Err(Error::SystemNotUnique(_))
        ));
    }

    #[test]
    fn essential_variables() {
        let mut rng = RandomSource::new(6);
        let red = essential_variables_reduce(&expr("(x1+x2)^2"), &mut rng).unwrap();
        assert_eq!(red.r, 1);
        let y = vec![q(3)];
        let v = red.reduced.evaluate(&y).unwrap();
        assert_eq!(red.reduced.evaluate(&[q(1)]).unwrap() * q(9), v);
        assert_eq!(
            essential_variables_reduce(&expr("x1*x2"), &mut rng)
                .unwrap()
                .r,
            2
        );
        assert_eq!(
            essential_variables_reduce(&expr("(x1+x3)*(x2+x3)"), &mut rng)
                .unwrap()
                .r,
            2
        );
    }

    #[test]
    fn reduction_then_factor() {
        let mut rng = RandomSource::new(7);
        let f = factored(factor_with_reduction(&expr("(x1+x2-x3)^2*(x1-x3)"), &mut rng).unwrap());
        let want = Factorization::new(
            3,
            q(1),
            vec![(form(&[1, 1, -1]), 2), (form(&[1, 0, -1]), 1)],
        )
        .unwrap();
        assert_eq!(f, want);
    }
}
