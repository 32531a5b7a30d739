use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::UniPoly;
use crate::error::{Error, Result};
use crate::Rational;

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|&v| Rational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rational>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m.data[i * c + j] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v^T * self`.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.rows, "vector length");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * self.get(i, j)).sum())
            .collect()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        // Integer product over common denominators; one reduction per entry.
        let (a, da) = self.integerized();
        let (b, db) = rhs.integerized();
        let den = da * db;
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        let mut acc = vec![BigInt::zero(); rhs.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| x.set_zero());
            for k in 0..self.cols {
                let x = &a[i * self.cols + k];
                if x.is_zero() {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    let y = &b[k * rhs.cols + j];
                    if !y.is_zero() {
                        *slot += x * y;
                    }
                }
            }
            data.extend(acc.iter().map(|x| Rational::new(x.clone(), den.clone())));
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// Entries times the lcm `D` of their denominators, and `D`.
    fn integerized(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints = self
            .data
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        (ints, den)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self * other == other * self
    }

    /// Rows scaled to primitive integer vectors; the row space is unchanged.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| primitive_integer_vector(self.row(i)))
            .collect()
    }

    /// Fraction-free (Bareiss) row echelon form of the integerized matrix.
    /// Returns the echelon rows that carry pivots and the pivot columns.
    fn bareiss_echelon(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut a = self.integer_rows();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (head, tail) = a.split_at_mut(r + 1);
            let pivot_row = &head[r];
            let piv = &pivot_row[c];
            for row in tail.iter_mut() {
                let factor = std::mem::take(&mut row[c]);
                if factor.is_zero() {
                    for x in row[c + 1..cols].iter_mut() {
                        if !x.is_zero() {
                            *x = (&*x * piv) / &prev;
                        }
                    }
                } else {
                    for j in c + 1..cols {
                        let v = &row[j] * piv - &factor * &pivot_row[j];
                        row[j] = v / &prev;
                    }
                }
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss_echelon().1.len()
    }

    /// Basis of `{v : M v = 0}` in reduced echelon form: one vector per free
    /// column, carrying a 1 there and 0 in every other free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        if self.rows * self.cols >= MODULAR_THRESHOLD {
            if let Some(basis) =
                super::modular::nullspace_multimodular(&self.integer_rows(), self.cols)
            {
                return basis;
            }
        }
        self.nullspace_bareiss()
    }

    /// [`nullspace`](Self::nullspace) by fraction-free elimination only.
    pub fn nullspace_bareiss(&self) -> Vec<Vec<Rational>> {
        let (ech, pivots) = self.bareiss_echelon();
        let cols = self.cols;
        let mut is_pivot = vec![false; cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..cols).filter(|&c| !is_pivot[c]) {
            let mut x = vec![Rational::zero(); cols];
            x[free] = Rational::one();
            for (row, &pc) in ech.iter().zip(&pivots).rev() {
                let mut acc = BigInt::zero();
                let mut acc_q = Rational::zero();
                for j in pc + 1..cols {
                    if row[j].is_zero() || x[j].is_zero() {
                        continue;
                    }
                    if x[j].is_integer() {
                        acc += &row[j] * x[j].numer();
                    } else {
                        acc_q += Rational::from_integer(row[j].clone()) * &x[j];
                    }
                }
                let total = acc_q + Rational::from_integer(acc);
                x[pc] = -total / Rational::from_integer(row[pc].clone());
            }
            basis.push(x);
        }
        basis
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| !a.get(i, c).is_zero())?;
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let piv = a.get(c, c).recip();
            a.scale_row(c, &piv);
            inv.scale_row(c, &piv);
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                a.axpy_row(i, c, &f);
                inv.axpy_row(i, c, &f);
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: &Rational) {
        for j in 0..self.cols {
            let v = &self.data[i * self.cols + j] * s;
            self.data[i * self.cols + j] = v;
        }
    }

    /// row[i] -= f * row[src]
    fn axpy_row(&mut self, i: usize, src: usize, f: &Rational) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let v = &self.data[i * self.cols + j] - f * s;
            self.data[i * self.cols + j] = v;
        }
    }

    /// Characteristic polynomial `det(M - t I)`. Leading coefficient is `(-1)^n`.
    ///
    /// Runs the Faddeev-LeVerrier recurrence on the integer matrix `N = D M`,
    /// where every division by `k` is exact, then rescales:
    /// `det(t I - M) = D^-n det(D t I - N)`.
    pub fn char_poly(&self) -> Result<UniPoly> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let (nm, den) = self.integerized();
        // c[k] is the coefficient of t^k in det(t I - N).
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        let mut mk = vec![BigInt::zero(); n * n];
        for k in 1..=n {
            for i in 0..n {
                mk[i * n + i] += &c[n - k + 1];
            }
            let mut next = vec![BigInt::zero(); n * n];
            for i in 0..n {
                for l in 0..n {
                    let x = &nm[i * n + l];
                    if x.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let y = &mk[l * n + j];
                        if !y.is_zero() {
                            next[i * n + j] += x * y;
                        }
                    }
                }
            }
            mk = next;
            let trace: BigInt = (0..n).map(|i| &mk[i * n + i]).sum();
            let (quo, rem) = trace.div_rem(&BigInt::from(k));
            debug_assert!(rem.is_zero());
            c[n - k] = -quo;
        }
        // coefficient of t^k in det(t I - M) is c[k] / D^(n - k)
        let mut scale = BigInt::one();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for k in (0..=n).rev() {
            coeffs[k] = Rational::new(c[k].clone(), scale.clone());
            scale *= &den;
        }
        let p = UniPoly::new(coeffs);
        Ok(if n % 2 == 1 { -&p } else { p })
    }
}

/// Matrices with at least this many entries try the multimodular nullspace.
const MODULAR_THRESHOLD: usize = 64;

/// Scale a rational vector to coprime integers (sign preserved).
pub(crate) fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x /= &g;
        }
    }
    ints
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    /// Panics on mismatched shapes; see [`RatMatrix::checked_mul`].
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix shape mismatch"
        );
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix shape mismatch"
        );
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
