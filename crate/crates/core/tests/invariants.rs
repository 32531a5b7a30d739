use linfactor::bivproj::factor_general;
use linfactor::exactmath::RatMatrix;
use linfactor::hyper::factor_hyperplane;
use linfactor::lieform::{factor_independent_forms, FactorOutcome};
use linfactor::oracle::Circuit;
use linfactor::verify::{factorizations_equivalent, generate_instance, oracle_equal, InstanceSpec};
use linfactor::{Factorization, LinearForm, PolyOracle, RandomSource, Rational};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn permutation_matrix(perm: &[usize]) -> RatMatrix {
    let n = perm.len();
    let mut m = RatMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m.set(i, j, q(1));
    }
    m
}

/// `f(P x)` where `(P x)_i = x_{perm[i]}` sends the form `l` to `l P`.
fn permuted(f: &Factorization, perm: &[usize]) -> Factorization {
    let p = permutation_matrix(perm);
    let factors = f
        .factors()
        .iter()
        .map(|(l, e)| (LinearForm::new(p.vec_mul(l.coeffs())).unwrap(), *e))
        .collect();
    Factorization::new(f.n_vars(), f.lambda().clone(), factors).unwrap()
}

fn shuffled(n: usize, rng: &mut RandomSource) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.range_usize(0, i));
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn modular_nullspace_matches_bareiss(
        rows in 8usize..14,
        cols in 8usize..14,
        rank_cut in 0usize..6,
        seed in any::<u64>(),
    ) {
        let mut rng = RandomSource::new(seed);
        // Low rank by construction: product of rows x r and r x cols.
        let r = (rows.min(cols)).saturating_sub(rank_cut).max(1);
        let a = RatMatrix::from_rows((0..rows).map(|_| (0..r).map(|_| q(rng.range_i64(-9, 9))).collect()).collect());
        let b = RatMatrix::from_rows((0..r).map(|_| (0..cols).map(|_| q(rng.range_i64(-9, 9))).collect()).collect());
        let m = &a * &b;
        let fast = m.nullspace();
        prop_assert_eq!(&fast, &m.nullspace_bareiss());
        for v in &fast {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == q(0)));
        }
        prop_assert_eq!(fast.len() + m.rank(), cols);
    }

    #[test]
    fn circuit_and_product_backends_agree(n in 2usize..6, k in 1usize..6, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let (f, product) = generate_instance(&InstanceSpec::dependent(n, k), &mut rng);
        let circuit = PolyOracle::from_circuit(Circuit::from_factorization(&f));
        prop_assert!(oracle_equal(&product, &circuit, 5, &mut rng));
        let text = Circuit::from_factorization(&f).to_text();
        let reparsed = PolyOracle::from_circuit(Circuit::from_text(&text).unwrap());
        prop_assert!(oracle_equal(&product, &reparsed, 5, &mut rng));
    }

    #[test]
    fn lie_is_scaling_and_permutation_invariant(n in 2usize..6, seed in any::<u64>(), c in prop::sample::select(vec![-3i64, 2, 7])) {
        let mut rng = RandomSource::new(seed);
        let (f, _) = generate_instance(&InstanceSpec::independent(n), &mut rng);
        let scaled = f.scaled(&q(c)).unwrap();
        let got = factor_independent_forms(&PolyOracle::from_factorization(scaled.clone()), &mut rng).unwrap();
        prop_assert_eq!(got, FactorOutcome::FactoredOverQ(scaled));
        let perm = shuffled(n, &mut rng);
        let g = PolyOracle::from_factorization(f.clone()).substitute(&permutation_matrix(&perm)).unwrap();
        let got = factor_independent_forms(&g, &mut rng).unwrap();
        prop_assert_eq!(got, FactorOutcome::FactoredOverQ(permuted(&f, &perm)));
    }

    #[test]
    fn dependent_pipelines_are_permutation_invariant(n in 2usize..5, k in 1usize..7, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let (f, _) = generate_instance(&InstanceSpec::dependent(n, k), &mut rng);
        let perm = shuffled(n, &mut rng);
        let g = PolyOracle::from_factorization(f.clone()).substitute(&permutation_matrix(&perm)).unwrap();
        let want = permuted(&f, &perm);
        prop_assert!(factorizations_equivalent(&factor_hyperplane(&g, &mut rng).unwrap(), &want));
        prop_assert!(factorizations_equivalent(&factor_general(&g, &mut rng).unwrap(), &want));
    }
}

#[test]
fn all_three_agree_on_independent_instances() {
    for seed in 0..20 {
        let mut rng = RandomSource::new(seed);
        let (f, oracle) =
            generate_instance(&InstanceSpec::independent(2 + seed as usize % 4), &mut rng);
        let FactorOutcome::FactoredOverQ(lie) =
            factor_independent_forms(&oracle, &mut rng).unwrap()
        else {
            panic!("seed {seed}: not factored");
        };
        assert_eq!(lie, f);
        assert_eq!(factor_hyperplane(&oracle, &mut rng).unwrap(), f);
        assert_eq!(factor_general(&oracle, &mut rng).unwrap(), f);
    }
}
