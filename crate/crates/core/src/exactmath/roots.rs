//! Rational roots of univariate polynomials.
//!
//! Roots of the squarefree part are located modulo a small prime that keeps
//! the polynomial squarefree, lifted p-adically, and recovered by rational
//! reconstruction. Every candidate is confirmed by exact evaluation, so the
//! result never contains a spurious root, and the numerator and denominator
//! bounds from the rational root theorem guarantee no root is missed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::UniPoly;
use crate::error::{Error, Result};
use crate::Rational;

/// Rational roots of a polynomial with their multiplicities, plus whatever is
/// left after dividing them out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSplit {
    /// Sorted by root value.
    pub roots: Vec<(Rational, usize)>,
    /// `p / prod (t - r)^m`; free of rational roots.
    pub cofactor: UniPoly,
}

impl RootSplit {
    /// True iff the polynomial is a constant times a product of rational linear factors.
    pub fn splits(&self) -> bool {
        self.cofactor.degree() == Some(0)
    }

    pub fn root_count(&self) -> usize {
        self.roots.iter().map(|(_, m)| m).sum()
    }
}

/// Every rational root with its exact multiplicity, sorted by value.
pub fn rational_roots_with_multiplicity(p: &UniPoly) -> Result<Vec<(Rational, usize)>> {
    Ok(rational_root_split(p)?.roots)
}

pub fn rational_root_split(p: &UniPoly) -> Result<RootSplit> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sqf = p.squarefree_part()?;
    let mut distinct = distinct_rational_roots(&sqf);
    distinct.sort();
    let mut rest = p.clone();
    let mut roots = Vec::with_capacity(distinct.len());
    for r in distinct {
        let lin = UniPoly::linear_root(&r);
        let mut mult = 0;
        loop {
            let (q, rem) = rest.div_rem(&lin)?;
            if !rem.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        debug_assert!(mult > 0);
        roots.push((r, mult));
    }
    Ok(RootSplit {
        roots,
        cofactor: rest,
    })
}

/// Distinct rational roots of a squarefree polynomial, in no particular order.
fn distinct_rational_roots(p: &UniPoly) -> Vec<Rational> {
    let mut roots = Vec::new();
    let mut coeffs = p.coeffs().to_vec();
    if coeffs.first().is_some_and(Zero::is_zero) {
        roots.push(Rational::zero());
        coeffs.remove(0);
    }
    let reduced = UniPoly::new(coeffs);
    let ints = reduced.integer_primitive();
    let deg = ints.len().saturating_sub(1);
    match deg {
        0 => return roots,
        1 => {
            roots.push(Rational::new(-&ints[0], ints[1].clone()));
            return roots;
        }
        _ => {}
    }

    let num_bound = ints[0].abs();
    let den_bound = ints[deg].abs();
    let target = BigInt::from(2) * &num_bound * &den_bound + 1;

    let prime = good_prime(&ints);
    let p_big = BigInt::from(prime);
    let residues = roots_mod_prime(&ints, prime);
    for r in residues {
        let Some((x, modulus)) = hensel_lift(&ints, BigInt::from(r), &p_big, &target) else {
            continue;
        };
        if let Some(cand) = reconstruct(&x, &modulus, &num_bound, &den_bound) {
            if is_root(&ints, &cand) {
                roots.push(cand);
            }
        }
    }
    roots
}

fn is_root(ints: &[BigInt], r: &Rational) -> bool {
    // sum a_i num^i den^(deg - i) == 0
    let deg = ints.len() - 1;
    let (num, den) = (r.numer(), r.denom());
    let mut acc = BigInt::zero();
    let mut num_pow = BigInt::one();
    let den_pows: Vec<BigInt> = {
        let mut v = vec![BigInt::one(); deg + 1];
        for i in 1..=deg {
            v[i] = &v[i - 1] * den;
        }
        v
    };
    for (i, a) in ints.iter().enumerate() {
        if !a.is_zero() {
            acc += a * &num_pow * &den_pows[deg - i];
        }
        num_pow *= num;
    }
    acc.is_zero()
}

/// A prime not dividing the leading coefficient, above the degree, modulo
/// which the polynomial stays squarefree.
fn good_prime(ints: &[BigInt]) -> u64 {
    let deg = ints.len() - 1;
    let mut p = next_prime(1009.max(deg as u64 + 1));
    loop {
        let f = reduce_mod(ints, p);
        if f.len() == ints.len() {
            let df = derivative_mod(&f, p);
            let g = gcd_mod(f, df, p);
            if g.len() == 1 {
                return p;
            }
        }
        p = next_prime(p + 1);
    }
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        if is_prime(n) {
            return n;
        }
        n += 1;
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn reduce_mod(ints: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = ints
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits"))
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn derivative_mod(f: &[u64], p: u64) -> Vec<u64> {
    let mut v: Vec<u64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| (c * (i as u64 % p)) % p)
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Monic-agnostic gcd over F_p; result has no trailing zeros.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let lc_inv = inv_mod(*b.last().unwrap(), p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let q = a.last().unwrap() * lc_inv % p;
            for (j, c) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + p - q * c % p) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn roots_mod_prime(ints: &[BigInt], p: u64) -> Vec<u64> {
    let f = reduce_mod(ints, p);
    (0..p)
        .filter(|&x| f.iter().rev().fold(0u64, |acc, c| (acc * x + c) % p) == 0)
        .collect()
}

fn eval_mod(ints: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    ints.iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m))
}

fn deriv_eval_mod(ints: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    ints.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(BigInt::zero(), |acc, (i, c)| {
            (acc * x + c * BigInt::from(i)).mod_floor(m)
        })
}

/// Quadratic Newton-Hensel lifting of a simple root until the modulus exceeds `target`.
fn hensel_lift(
    ints: &[BigInt],
    mut x: BigInt,
    p: &BigInt,
    target: &BigInt,
) -> Option<(BigInt, BigInt)> {
    let mut m = p.clone();
    while &m <= target {
        let m2 = &m * &m;
        let fx = eval_mod(ints, &x, &m2);
        let dfx = deriv_eval_mod(ints, &x, &m2);
        let g = dfx.extended_gcd(&m2);
        if !g.gcd.is_one() {
            return None;
        }
        x = (&x - fx * g.x).mod_floor(&m2);
        m = m2;
    }
    Some((x, m))
}

/// Find `n/d` with `|n| <= num_bound`, `0 < d <= den_bound` and `n = d x (mod m)`.
fn reconstruct(x: &BigInt, m: &BigInt, num_bound: &BigInt, den_bound: &BigInt) -> Option<Rational> {
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > num_bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &t1.abs() > den_bound {
        return None;
    }
    Some(Rational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn simple_roots() {
        let p = UniPoly::from_i64(&[2, -3, 1]);
        assert_eq!(
            rational_roots_with_multiplicity(&p).unwrap(),
            vec![(q(1, 1), 1), (q(2, 1), 1)]
        );
    }

    #[test]
    fn repeated_fractional_root() {
        // (t - 1/2)^2 (t + 3) = t^3 + 2t^2 - 11/4 t + 3/4
        let p = UniPoly::new(vec![q(3, 4), q(-11, 4), q(2, 1), q(1, 1)]);
        assert_eq!(
            rational_roots_with_multiplicity(&p).unwrap(),
            vec![(q(-3, 1), 1), (q(1, 2), 2)]
        );
    }

    #[test]
    fn no_rational_roots() {
        let split = rational_root_split(&UniPoly::from_i64(&[1, 0, 1])).unwrap();
        assert!(split.roots.is_empty());
        assert!(!split.splits());
        // t^2 - 2 has irrational roots
        assert!(
            rational_roots_with_multiplicity(&UniPoly::from_i64(&[-2, 0, 1]))
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn zero_root_and_cofactor() {
        // t^2 (t - 5) (t^2 + t + 1)
        let p = &(&UniPoly::from_i64(&[0, 0, 1]) * &UniPoly::from_i64(&[-5, 1]))
            * &UniPoly::from_i64(&[1, 1, 1]);
        let split = rational_root_split(&p).unwrap();
        assert_eq!(split.roots, vec![(q(0, 1), 2), (q(5, 1), 1)]);
        assert_eq!(split.cofactor, UniPoly::from_i64(&[1, 1, 1]));
    }

    #[test]
    fn huge_coefficients() {
        // roots of size ~2^40 with large denominators
        let r1 = Rational::new(
            BigInt::from(1_099_511_627_791i64),
            BigInt::from(987_654_323i64),
        );
        let r2 = Rational::new(BigInt::from(-77_777_777_777i64), BigInt::from(3));
        let p = &(&UniPoly::linear_root(&r1).pow(3) * &UniPoly::linear_root(&r2))
            * &UniPoly::from_i64(&[3, 0, 1]);
        let split = rational_root_split(&p).unwrap();
        let mut expected = vec![(r1, 3), (r2, 1)];
        expected.sort();
        assert_eq!(split.roots, expected);
        assert_eq!(split.cofactor.monic(), UniPoly::from_i64(&[3, 0, 1]));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(
            rational_roots_with_multiplicity(&UniPoly::zero()),
            Err(Error::ZeroPolynomial)
        );
    }
}
