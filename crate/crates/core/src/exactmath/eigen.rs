use num_traits::Zero;

use super::{rational_root_split, RatMatrix, UniPoly};
use crate::error::{Error, Result};
use crate::random::RandomSource;
use crate::Rational;

/// Attempts made by [`simultaneous_diagonalize`] before giving up.
pub const SIMULTANEOUS_RETRIES: usize = 8;

/// `T^-1 M T = D` with rational eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenDecomposition {
    /// Distinct eigenvalues in increasing order with their multiplicities.
    pub eigenvalues: Vec<(Rational, usize)>,
    pub transition: RatMatrix,
    pub diagonal: RatMatrix,
}

/// `M` is diagonalizable over the algebraic closure iff the squarefree part
/// of its characteristic polynomial annihilates it.
pub fn is_diagonalizable_over_closure(m: &RatMatrix) -> Result<bool> {
    let chi = m.char_poly()?;
    let sqf = chi.squarefree_part()?;
    Ok(sqf.eval_matrix(m)?.is_zero())
}

pub fn eigen_decomposition(m: &RatMatrix) -> Result<EigenDecomposition> {
    let chi = m.char_poly()?;
    let sqf = chi.squarefree_part()?;
    // Distinct eigenvalues already force diagonalizability.
    if sqf.degree() != chi.degree() && !sqf.eval_matrix(m)?.is_zero() {
        return Err(Error::NotDiagonalizable);
    }
    let split = rational_root_split(&sqf)?;
    if !split.splits() {
        return Err(Error::IrrationalEigenvalues(split.cofactor.monic()));
    }
    let n = m.rows();
    let mut columns = Vec::with_capacity(n);
    let mut eigenvalues = Vec::with_capacity(split.roots.len());
    let mut diag = Vec::with_capacity(n);
    for (lambda, _) in &split.roots {
        let shifted = m - &RatMatrix::identity(n).scale(lambda);
        let kernel = shifted.nullspace();
        eigenvalues.push((lambda.clone(), kernel.len()));
        for v in kernel {
            diag.push(lambda.clone());
            columns.push(normalize_leading(v));
        }
    }
    let transition = RatMatrix::from_columns(&columns);
    let diagonal = RatMatrix::diag(&diag);
    let inv = transition.inverse().ok_or(Error::NotDiagonalizable)?;
    if &(&inv * m) * &transition != diagonal {
        return Err(Error::NotDiagonalizable);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        transition,
        diagonal,
    })
}

/// Scale so the first nonzero entry is 1.
pub(crate) fn normalize_leading(mut v: Vec<Rational>) -> Vec<Rational> {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        let inv = lead.recip();
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
    }
    v
}

/// True iff every pair in the family commutes.
pub fn commute_family(family: &[RatMatrix]) -> Result<bool> {
    check_family_shape(family)?;
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if !a.commutes_with(b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_family_shape(family: &[RatMatrix]) -> Result<Option<usize>> {
    let Some(first) = family.first() else {
        return Ok(None);
    };
    if !first.is_square() {
        return Err(Error::NotSquare {
            rows: first.rows(),
            cols: first.cols(),
        });
    }
    let n = first.rows();
    for m in family {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "family mixes {n}x{n} and {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(Some(n))
}

/// Whether every member of a commuting family is diagonalizable over the
/// algebraic closure.
///
/// If some combination of the members has distinct eigenvalues, every member
/// commutes with it and is therefore a polynomial in it, hence diagonalizable.
/// A few random combinations are tried before falling back to testing the
/// members one by one, so the answer is exact either way. The caller must
/// ensure the family commutes.
pub fn commuting_family_diagonalizable(
    family: &[RatMatrix],
    rng: &mut RandomSource,
) -> Result<bool> {
    let Some(size) = check_family_shape(family)? else {
        return Ok(true);
    };
    for _ in 0..COMBINATION_ATTEMPTS {
        let chi = random_combination(family, size, rng).char_poly()?;
        if chi.squarefree_part()?.degree() == chi.degree() {
            return Ok(true);
        }
    }
    for m in family {
        if !is_diagonalizable_over_closure(m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

const COMBINATION_ATTEMPTS: usize = 3;

/// `sum c_i B_i` with small nonzero integer `c_i`. Small coefficients keep
/// entry sizes down; a bad draw only costs a retry.
fn random_combination(family: &[RatMatrix], size: usize, rng: &mut RandomSource) -> RatMatrix {
    let bound = (4 * size * size).max(16) as i64;
    let mut combo = RatMatrix::zeros(size, size);
    for b in family {
        let c = loop {
            let c = rng.range_i64(-bound, bound);
            if c != 0 {
                break c;
            }
        };
        combo = &combo + &b.scale(&Rational::from_integer(c.into()));
    }
    combo
}

/// One transition matrix `T` with `T^-1 B T` diagonal for every `B` in the
/// family, found by diagonalizing a random combination of the members.
///
/// `n` is needed only for the empty family, which is diagonalized by the identity.
pub fn simultaneous_diagonalize(
    family: &[RatMatrix],
    n: usize,
    rng: &mut RandomSource,
) -> Result<RatMatrix> {
    let Some(size) = check_family_shape(family)? else {
        return Ok(RatMatrix::identity(n));
    };
    for _ in 0..SIMULTANEOUS_RETRIES {
        let combo = random_combination(family, size, rng);
        let eig = eigen_decomposition(&combo)?;
        let t = &eig.transition;
        let inv = t.inverse().expect("transition matrices are invertible");
        if family.iter().all(|b| (&(&inv * b) * t).is_diagonal()) {
            return Ok(eig.transition);
        }
    }
    Err(Error::RetriesExhausted(SIMULTANEOUS_RETRIES))
}

/// Characteristic polynomial, re-exported as a free function for symmetry with the other kernels.
pub fn char_poly(m: &RatMatrix) -> Result<UniPoly> {
    m.char_poly()
}

/// Squarefree part of a univariate polynomial.
pub fn squarefree_part(p: &UniPoly) -> Result<UniPoly> {
    p.squarefree_part()
}

/// Nullspace basis in reduced echelon form.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<Rational>> {
    m.nullspace()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn diagonalizability_examples() {
        assert!(
            !is_diagonalizable_over_closure(&RatMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]))
                .unwrap()
        );
        assert!(
            is_diagonalizable_over_closure(&RatMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]]))
                .unwrap()
        );
        assert!(is_diagonalizable_over_closure(&RatMatrix::diag(&[q(3), q(3), q(-1)])).unwrap());
    }

    #[test]
    fn eigen_of_diagonal_is_permutation() {
        let e = eigen_decomposition(&RatMatrix::diag(&[q(2), q(1)])).unwrap();
        assert_eq!(e.eigenvalues, vec![(q(1), 1), (q(2), 1)]);
        assert_eq!(e.transition, RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]));
        assert_eq!(e.diagonal, RatMatrix::diag(&[q(1), q(2)]));
    }

    #[test]
    fn eigen_of_swap() {
        let e = eigen_decomposition(&RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(e.eigenvalues, vec![(q(-1), 1), (q(1), 1)]);
        // columns (1,-1) for -1 and (1,1) for +1
        assert_eq!(e.transition, RatMatrix::from_i64_rows(&[&[1, 1], &[-1, 1]]));
    }

    #[test]
    fn eigen_of_rotation_is_irrational() {
        let err = eigen_decomposition(&RatMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]])).unwrap_err();
        assert_eq!(
            err,
            Error::IrrationalEigenvalues(UniPoly::from_i64(&[1, 0, 1]))
        );
        let err = eigen_decomposition(&RatMatrix::from_i64_rows(&[&[0, 1], &[0, 0]])).unwrap_err();
        assert_eq!(err, Error::NotDiagonalizable);
    }

    #[test]
    fn commuting_families() {
        let a = RatMatrix::diag(&[q(1), q(2)]);
        let b = RatMatrix::diag(&[q(3), q(4)]);
        assert!(commute_family(&[a, b]).unwrap());
        let e12 = RatMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        let e21 = RatMatrix::from_i64_rows(&[&[0, 0], &[1, 0]]);
        assert!(!commute_family(&[e12, e21]).unwrap());
        let swap = RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert!(commute_family(&[swap, RatMatrix::identity(2)]).unwrap());
        assert!(commute_family(&[RatMatrix::identity(2), RatMatrix::identity(3)]).is_err());
    }

    #[test]
    fn simultaneous_examples() {
        let mut rng = RandomSource::new(1);
        let t = simultaneous_diagonalize(&[RatMatrix::diag(&[q(1), q(-1)])], 2, &mut rng).unwrap();
        assert!(t.is_diagonal() || (&t * &t).is_diagonal());
        let swap = RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let t = simultaneous_diagonalize(std::slice::from_ref(&swap), 2, &mut rng).unwrap();
        let inv = t.inverse().unwrap();
        assert!((&(&inv * &swap) * &t).is_diagonal());
        let fam = [
            RatMatrix::diag(&[q(1), q(1), q(-2)]),
            RatMatrix::diag(&[q(1), q(-2), q(1)]),
        ];
        let t = simultaneous_diagonalize(&fam, 3, &mut rng).unwrap();
        // permutation with unit scaling
        for j in 0..3 {
            let col = t.column(j);
            assert_eq!(col.iter().filter(|x| !x.is_zero()).count(), 1);
        }
        assert_eq!(
            simultaneous_diagonalize(&[], 4, &mut rng).unwrap(),
            RatMatrix::identity(4)
        );
    }
}
