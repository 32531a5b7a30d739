//! Rational roots against divisor enumeration.

use linfactor::exactmath::{rational_root_split, rational_roots_with_multiplicity, UniPoly};
use linfactor::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = BigInt::from(1);
    while &i * &i <= n {
        if n.is_multiple_of(&i) {
            out.push(i.clone());
            out.push(&n / &i);
        }
        i += 1;
    }
    out
}

/// Candidates p/q with p | a_0 and q | a_n after clearing denominators and
/// dividing out powers of t; multiplicities by repeated exact division.
fn roots_by_enumeration(p: &UniPoly) -> Vec<(Rational, usize)> {
    let mut ints = p.integer_primitive();
    let mut out = Vec::new();
    let zero_mult = ints.iter().take_while(|c| c.is_zero()).count();
    if zero_mult > 0 {
        out.push((q(0, 1), zero_mult));
        ints.drain(..zero_mult);
    }
    let (a0, an) = (ints[0].clone(), ints.last().unwrap().clone());
    let mut rest = UniPoly::new(
        ints.iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect(),
    );
    let mut cands: Vec<Rational> = Vec::new();
    for num in divisors(&a0) {
        for den in divisors(&an) {
            for s in [num.clone(), -num.clone()] {
                let r = Rational::new(s, den.clone());
                if !cands.contains(&r) {
                    cands.push(r);
                }
            }
        }
    }
    for r in cands {
        let lin = UniPoly::linear_root(&r);
        let mut m = 0;
        loop {
            let (quo, rem) = rest.div_rem(&lin).unwrap();
            if !rem.is_zero() {
                break;
            }
            rest = quo;
            m += 1;
        }
        if m > 0 {
            out.push((r, m));
        }
    }
    out.sort();
    out
}

fn product(roots: &[(i64, i64, usize)], extra: &UniPoly, lead: i64) -> UniPoly {
    let mut p = extra.scale(&q(lead, 1));
    for &(n, d, m) in roots {
        for _ in 0..m {
            p = &p * &UniPoly::linear_root(&q(n, d));
        }
    }
    p
}

#[test]
fn known_polynomials() {
    let p = product(
        &[(1, 2, 2), (-3, 1, 1), (0, 1, 3)],
        &UniPoly::from_i64(&[1, 0, 1]),
        6,
    );
    let want = vec![(q(-3, 1), 1), (q(0, 1), 3), (q(1, 2), 2)];
    assert_eq!(rational_roots_with_multiplicity(&p).unwrap(), want);
    assert_eq!(roots_by_enumeration(&p), want);
    let split = rational_root_split(&p).unwrap();
    assert!(!split.splits());
    assert_eq!(split.root_count(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_enumeration(
        roots in prop::collection::vec((-6i64..=6, 1i64..=4, 1usize..=3), 0..4),
        extra in prop::sample::select(vec![vec![1i64], vec![1, 0, 1], vec![-2, 0, 1], vec![1, 1, 1]]),
        lead in prop::sample::select(vec![1i64, -1, 3, 10]),
    ) {
        let p = product(&roots, &UniPoly::from_i64(&extra), lead);
        prop_assert_eq!(rational_roots_with_multiplicity(&p).unwrap(), roots_by_enumeration(&p));
        let split = rational_root_split(&p).unwrap();
        let total: usize = split.roots.iter().map(|r| r.1).sum();
        prop_assert!(total <= p.degree().unwrap());
        prop_assert!(roots_by_enumeration(&split.cofactor).is_empty());
    }
}
