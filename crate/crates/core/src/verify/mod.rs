//! Ground truth for tests: exact expansion, canonical comparison, random
//! identity testing and instance generation.

mod sparse;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

pub use sparse::{format_rational, parse_rational, Monomial, SparsePoly};

use crate::exactmath::RatMatrix;
use crate::factorization::{Factorization, LinearForm};
use crate::oracle::PolyOracle;
use crate::random::RandomSource;
use crate::Rational;

/// `lambda * prod l_i^{m_i}` multiplied out.
///
/// Forms are expanded as primitive integer vectors with the scale folded
/// into the constant, so only the final coefficients are rational.
pub fn expand_product(f: &Factorization) -> SparsePoly {
    let n = f.n_vars();
    let mut lambda = f.lambda().clone();
    let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::from([(vec![0; n], BigInt::one())]);
    for (l, m) in f.factors() {
        let (ints, scale) = l.integer_scaled();
        lambda *= Pow::pow(scale, *m);
        let support: Vec<(usize, BigInt)> =
            ints.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for _ in 0..*m {
            let mut next: HashMap<Vec<u32>, BigInt> = HashMap::with_capacity(acc.len() * 2);
            for (e, c) in &acc {
                for (i, a) in &support {
                    let mut e2 = e.clone();
                    e2[*i] += 1;
                    *next.entry(e2).or_default() += c * a;
                }
            }
            acc = next;
        }
    }
    SparsePoly::from_terms(
        n,
        acc.into_iter().map(|(e, c)| (&lambda * Rational::from_integer(c), e)),
    )
    .expect("exponent vectors have n entries")
}

/// Equal after canonical scaling and sorting.
pub fn factorizations_equivalent(a: &Factorization, b: &Factorization) -> bool {
    let canon = |f: &Factorization| {
        Factorization::new(f.n_vars(), f.lambda().clone(), f.factors().to_vec())
    };
    match (canon(a), canon(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Agreement at `trials` random points. Distinct polynomials of degree `d`
/// pass with probability at most `(d/|S|)^trials`.
pub fn oracle_equal(a: &PolyOracle, b: &PolyOracle, trials: usize, rng: &mut RandomSource) -> bool {
    if a.n_vars() != b.n_vars() {
        return false;
    }
    (0..trials).all(|_| {
        let p = rng.point(a.n_vars());
        matches!((a.evaluate(&p), b.evaluate(&p)), (Ok(x), Ok(y)) if x == y)
    })
}

/// Parameters for [`generate_instance`].
#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub n: usize,
    /// Number of distinct forms.
    pub k: usize,
    /// Exponents are drawn from `1..=exponent_bound`.
    pub exponent_bound: usize,
    /// Coefficients are drawn from `-coeff_bound..=coeff_bound`.
    pub coeff_bound: i64,
    /// Require `k = n` forms with invertible coefficient matrix.
    pub independent: bool,
    /// Cap on the total degree; exponents are lowered to fit.
    pub max_degree: Option<usize>,
}

impl InstanceSpec {
    pub fn independent(n: usize) -> Self {
        Self {
            n,
            k: n,
            exponent_bound: 3,
            coeff_bound: 5,
            independent: true,
            max_degree: Some(12),
        }
    }

    pub fn dependent(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            exponent_bound: 2,
            coeff_bound: 5,
            independent: false,
            max_degree: Some(12),
        }
    }
}

/// Random product of linear forms with integer coefficients and a nonzero
/// integer constant, as canonical ground truth plus a product oracle.
///
/// Panics if the instance shape is unsatisfiable (`independent` with `k != n`, or
/// `max_degree < k`).
pub fn generate_instance(
    spec: &InstanceSpec,
    rng: &mut RandomSource,
) -> (Factorization, PolyOracle) {
    assert!(
        !spec.independent || spec.k == spec.n,
        "independent instances need k = n"
    );
    assert!(
        spec.max_degree.is_none_or(|d| d >= spec.k),
        "degree cap below the number of forms"
    );
    assert!(spec.exponent_bound >= 1 && spec.coeff_bound >= 1);
    // every form in one variable is proportional to x1
    assert!(
        spec.n >= 2 || spec.k <= 1,
        "one variable admits a single form up to scaling"
    );
    let b = spec.coeff_bound;
    let forms = loop {
        let mut forms: Vec<LinearForm> = Vec::with_capacity(spec.k);
        while forms.len() < spec.k {
            let c: Vec<Rational> = (0..spec.n)
                .map(|_| Rational::from_integer(rng.range_i64(-b, b).into()))
                .collect();
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            let l = LinearForm::new(c).expect("nonzero");
            if forms.iter().all(|g| !g.is_proportional_to(&l)) {
                forms.push(l);
            }
        }
        if !spec.independent
            || RatMatrix::from_rows(forms.iter().map(|l| l.coeffs().to_vec()).collect())
                .is_invertible()
        {
            break forms;
        }
    };
    let mut exps: Vec<usize> = (0..spec.k)
        .map(|_| rng.range_usize(1, spec.exponent_bound))
        .collect();
    if let Some(cap) = spec.max_degree {
        while exps.iter().sum::<usize>() > cap {
            let i = (0..exps.len()).max_by_key(|&i| (exps[i], i)).unwrap();
            exps[i] -= 1;
        }
    }
    let mut lambda = 0;
    while lambda == 0 {
        lambda = rng.range_i64(-b, b);
    }
    let f = Factorization::new(
        spec.n,
        Rational::from_integer(lambda.into()),
        forms.into_iter().zip(exps).collect(),
    )
    .expect("valid instance");
    let oracle = PolyOracle::from_factorization(f.clone());
    (f, oracle)
}

/// Check `f` against a candidate factorization at one random point.
pub fn check_at_random_point(
    oracle: &PolyOracle,
    f: &Factorization,
    rng: &mut RandomSource,
) -> crate::Result<bool> {
    let p = rng.point(oracle.n_vars());
    Ok(oracle.evaluate(&p)? == f.eval(&p))
}
