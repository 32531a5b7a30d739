//! Lie algebra of a polynomial: matrices `B` with `sum_ij B_ij x_j df/dx_i = 0`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactmath::RatMatrix;
use crate::oracle::{gradient_at, resolve_degree, PolyOracle};
use crate::par;
use crate::random::RandomSource;
use crate::verify::SparsePoly;
use crate::Rational;

/// Basis of the Lie algebra of `f`, as `n x n` matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBasis {
    n: usize,
    matrices: Vec<RatMatrix>,
}

impl LieBasis {
    pub fn new(n: usize, matrices: Vec<RatMatrix>) -> Result<Self> {
        if let Some(m) = matrices.iter().find(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix in a basis of {n}x{n}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self { n, matrices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.matrices
    }

    fn stacked(&self, extra: &[RatMatrix]) -> RatMatrix {
        RatMatrix::from_rows(
            self.matrices
                .iter()
                .chain(extra)
                .map(|m| m.entries().to_vec())
                .collect(),
        )
    }

    /// Whether `m` lies in the span.
    pub fn contains(&self, m: &RatMatrix) -> bool {
        if m.rows() != self.n || m.cols() != self.n {
            return false;
        }
        if self.matrices.is_empty() {
            return m.is_zero();
        }
        self.stacked(std::slice::from_ref(m)).rank() == self.stacked(&[]).rank()
    }

    pub fn same_span(&self, other: &LieBasis) -> bool {
        self.n == other.n
            && self.dim() == other.dim()
            && other.matrices.iter().all(|m| self.contains(m))
    }

    /// `{A^-1 B A}`: the Lie algebra of `f(A x)` when `self` is that of `f`.
    pub fn conjugated(&self, a: &RatMatrix) -> Result<LieBasis> {
        let inv = a
            .inverse()
            .ok_or_else(|| Error::Precondition("singular change of variables".into()))?;
        let ms = self.matrices.iter().map(|b| &(&inv * b) * a).collect();
        LieBasis::new(self.n, ms)
    }
}

fn basis_from_nullspace(n: usize, null: Vec<Vec<Rational>>) -> LieBasis {
    let ms = null
        .into_iter()
        .map(|v| RatMatrix::new(n, n, v).expect("n^2 entries"))
        .collect();
    LieBasis { n, matrices: ms }
}

/// Lie algebra from `n^2` random points. Column `(i, j)` of row `p` holds
/// `x_j(a_p) * df/dx_i(a_p)`; the nullspace, reshaped row-major, is the basis.
///
/// Derivatives come from the circuit when the oracle is white-box and from
/// interpolation otherwise; the points are drawn first so both routes see the
/// same matrix.
pub fn lie_algebra_basis(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<LieBasis> {
    let n = oracle.n_vars();
    let points: Vec<Vec<Rational>> = (0..n * n).map(|_| rng.point(n)).collect();
    let d = if oracle.is_white_box() {
        0
    } else {
        resolve_degree(oracle, rng)?
    };
    let grads = par::try_map(&points, |a| gradient_at(oracle, a, d))?;
    let mut rows = Vec::with_capacity(n * n);
    for (a, g) in points.iter().zip(&grads) {
        let mut row = Vec::with_capacity(n * n);
        for gi in g {
            for xj in a {
                row.push(gi * xj);
            }
        }
        rows.push(row);
    }
    if n > 0 && rows.iter().flatten().all(Zero::is_zero) && oracle.evaluate(&points[0])?.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = RatMatrix::new(n * n, n * n, rows.concat())?;
    Ok(basis_from_nullspace(n, m.nullspace()))
}

/// Deterministic Lie algebra of an explicit polynomial, from the coefficients
/// of `x_j df/dx_i`.
pub fn lie_algebra_symbolic(f: &SparsePoly) -> Result<LieBasis> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = f.n_vars();
    let mut cols: Vec<SparsePoly> = Vec::with_capacity(n * n);
    for i in 0..n {
        let di = f.partial(i);
        for j in 0..n {
            cols.push(di.mul(&SparsePoly::var(n, j)));
        }
    }
    let mut monos: Vec<_> = cols
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    monos.sort();
    monos.dedup();
    let data: Vec<Rational> = monos
        .iter()
        .flat_map(|m| cols.iter().map(move |p| p.coeff(&m.0)))
        .collect();
    let m = RatMatrix::new(monos.len(), n * n, data)?;
    Ok(basis_from_nullspace(n, m.nullspace()))
}

/// Tests `sum_ij B_ij x_j df/dx_i = 0` at `trials` random points.
pub fn verify_lie_member(
    oracle: &PolyOracle,
    b: &RatMatrix,
    rng: &mut RandomSource,
    trials: usize,
) -> Result<bool> {
    let n = oracle.n_vars();
    if b.rows() != n || b.cols() != n {
        return Err(Error::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    let d = if oracle.is_white_box() {
        0
    } else {
        resolve_degree(oracle, rng)?
    };
    for _ in 0..trials {
        let a = rng.point(n);
        let g = gradient_at(oracle, &a, d)?;
        let bx = b.mul_vec(&a);
        let s: Rational = bx.iter().zip(&g).map(|(u, v)| u * v).sum();
        if !s.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::parse_expression;

    fn expr(s: &str) -> PolyOracle {
        let c = parse_expression(s).unwrap();
        let d = c.formal_degree();
        PolyOracle::from_circuit(c).with_degree(d)
    }

    #[test]
    fn monomial_x1x2() {
        let mut rng = RandomSource::new(1);
        let b = lie_algebra_basis(&expr("x1*x2"), &mut rng).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(b.contains(&RatMatrix::from_i64_rows(&[&[1, 0], &[0, -1]])));
    }

    #[test]
    fn difference_of_squares() {
        let mut rng = RandomSource::new(2);
        let b = lie_algebra_basis(&expr("x1^2 - x2^2").black_box_only(), &mut rng).unwrap();
        assert_eq!(
            b.matrices(),
            &[RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]])]
        );
    }

    #[test]
    fn sum_of_cubes_is_trivial() {
        let mut rng = RandomSource::new(3);
        let b = lie_algebra_basis(&expr("x1^3 + x2^3 + x3^3"), &mut rng).unwrap();
        assert_eq!(b.dim(), 0);
    }

    #[test]
    fn zero_polynomial_rejected() {
        let mut rng = RandomSource::new(4);
        assert_eq!(
            lie_algebra_basis(&expr("x1 - x1 + x2 - x2").with_degree(1), &mut rng),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn membership() {
        let mut rng = RandomSource::new(5);
        let f = expr("x1*x2");
        assert!(verify_lie_member(
            &f,
            &RatMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]),
            &mut rng,
            5
        )
        .unwrap());
        assert!(!verify_lie_member(&f, &RatMatrix::identity(2), &mut rng, 5).unwrap());
        let g = expr("x1^2 - x2^2").black_box_only();
        assert!(verify_lie_member(
            &g,
            &RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]),
            &mut rng,
            5
        )
        .unwrap());
    }

    #[test]
    fn symbolic_matches_random() {
        let f = SparsePoly::from_text("1 2 1\n-1 0 3\n").unwrap(); // x1^2 x2 - x2^3
        let o = PolyOracle::from_sparse(f.clone());
        let mut rng = RandomSource::new(6);
        assert_eq!(
            lie_algebra_symbolic(&f).unwrap(),
            lie_algebra_basis(&o, &mut rng).unwrap()
        );
    }

    #[test]
    fn white_and_black_box_identical() {
        let c = parse_expression("(x1 + 2*x2)^2 * (x1 - x3) * x2").unwrap();
        let white = PolyOracle::from_circuit(c).with_degree(4);
        let black = white.clone().black_box_only();
        let bw = lie_algebra_basis(&white, &mut RandomSource::new(7)).unwrap();
        let bb = lie_algebra_basis(&black, &mut RandomSource::new(7)).unwrap();
        assert_eq!(bw, bb);
        assert_eq!(white.calls(), 9 * (3 * 4 + 1));
    }
}
