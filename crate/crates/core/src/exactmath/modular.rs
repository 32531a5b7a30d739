//! Nullspace by elimination modulo word-size primes, Chinese remaindering and
//! rational reconstruction. Every result is checked exactly; `None` means the
//! caller should fall back to fraction-free elimination.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

const MAX_PRIMES: usize = 256;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes descending from 2^62.
fn primes() -> impl Iterator<Item = u64> {
    let mut c = 1u64 << 62;
    std::iter::from_fn(move || loop {
        c -= 1;
        if is_prime_u64(c) {
            return Some(c);
        }
    })
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

/// Reduced row echelon form mod `p`; returns pivot columns and, for each free
/// column, the values of the nullspace basis vector at the pivot columns.
fn nullspace_mod(rows: &[Vec<BigInt>], cols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| reduce(x, p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(k) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, k);
        let inv = pow_mod(a[r][c], p - 2, p);
        for x in a[r][c..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - mul_mod(f, pivot_row[j], p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let vectors = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|f| (0..pivots.len()).map(|k| (p - a[k][f]) % p).collect())
        .collect();
    (pivots, vectors)
}

/// `a/b` with `|a|, b <= sqrt(m/2)` and `a = u b (mod m)`.
fn reconstruct(u: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

fn better(a: &[usize], b: &[usize]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

/// Reduced-echelon nullspace basis of the integer matrix `rows`.
pub(crate) fn nullspace_multimodular(
    rows: &[Vec<BigInt>],
    cols: usize,
) -> Option<Vec<Vec<Rational>>> {
    let mut pivots: Option<Vec<usize>> = None;
    let mut modulus = BigInt::one();
    let mut acc: Vec<Vec<BigInt>> = Vec::new();
    for p in primes().take(MAX_PRIMES) {
        let (piv, vecs) = nullspace_mod(rows, cols, p);
        match &pivots {
            Some(best) if better(best, &piv) => continue,
            Some(best) if *best == piv => {
                let pb = BigInt::from(p);
                let inv = BigInt::from(pow_mod(reduce(&modulus, p), p - 2, p));
                for (av, pv) in acc.iter_mut().zip(&vecs) {
                    for (x, &r) in av.iter_mut().zip(pv) {
                        // x + M * ((r - x) / M mod p)
                        let delta = (BigInt::from(r) - reduce(x, p)).mod_floor(&pb) * &inv % &pb;
                        *x += &modulus * delta;
                    }
                }
                modulus *= &pb;
            }
            _ => {
                pivots = Some(piv);
                modulus = BigInt::from(p);
                acc = vecs
                    .iter()
                    .map(|v| v.iter().map(|&r| BigInt::from(r)).collect())
                    .collect();
            }
        }
        let piv = pivots.as_ref().unwrap();
        if let Some(basis) = try_basis(&acc, &modulus, piv, cols) {
            if verify(rows, &basis) {
                return Some(basis);
            }
        }
    }
    None
}

fn try_basis(
    acc: &[Vec<BigInt>],
    m: &BigInt,
    pivots: &[usize],
    cols: usize,
) -> Option<Vec<Vec<Rational>>> {
    let mut is_pivot = vec![false; cols];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let free = (0..cols).filter(|&c| !is_pivot[c]);
    free.zip(acc)
        .map(|(f, vals)| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (&pc, u) in pivots.iter().zip(vals) {
                x[pc] = reconstruct(u, m)?;
            }
            Some(x)
        })
        .collect()
}

fn verify(rows: &[Vec<BigInt>], basis: &[Vec<Rational>]) -> bool {
    basis.iter().all(|x| {
        let v = super::primitive_integer_vector(x);
        rows.iter().all(|row| {
            let s: BigInt = row
                .iter()
                .zip(&v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .map(|(a, b)| a * b)
                .sum();
            s.sign() == Sign::NoSign
        })
    })
}
