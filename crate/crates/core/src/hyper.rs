//! Factorization by locating the hyperplanes of the zero set.
//!
//! Lines through a common base point `a` meet each hyperplane `l_i = 0` once;
//! grouping the intersection points by hyperplane recovers the forms, and the
//! root multiplicities along one line give the exponents.

use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{rational_root_split, RatMatrix, UniPoly};
use crate::factorization::{Factorization, LinearForm};
use crate::oracle::{line_point, resolve_degree, PolyOracle};
use crate::par;
use crate::random::RandomSource;
use crate::Rational;

/// Attempts with fresh randomness before a retriable failure is reported.
pub const HYPER_RETRIES: usize = 4;

/// Draws of the base point before concluding that `f` vanishes identically.
const BASE_POINT_DRAWS: usize = 16;

/// Restriction of `f` to the line `base + t * direction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineProbe {
    pub base: Vec<Rational>,
    pub direction: Vec<Rational>,
    pub restriction: UniPoly,
    /// Distinct roots in increasing order with multiplicities.
    pub roots: Vec<(Rational, usize)>,
    /// `base + t * direction` for each root `t`, in the same order.
    pub points: Vec<Vec<Rational>>,
}

impl LineProbe {
    /// `f(base)`, the constant term of the restriction.
    pub fn base_value(&self) -> Rational {
        self.restriction.coeff(0)
    }

    fn multiplicity_pattern(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.roots.iter().map(|(_, m)| *m).collect();
        m.sort_unstable();
        m
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HyperOptions {
    /// Decide co-hyperplane membership with `k - 1` evaluations instead of
    /// one evaluation at a random point.
    pub deterministic_line_test: bool,
}

/// Probes along `n - 1` random lines through a common base point `a` with
/// `f(a) != 0`. Costs one call for `f(a)` per base-point draw plus `d` per
/// line.
pub fn collect_intersection_points(
    oracle: &PolyOracle,
    rng: &mut RandomSource,
) -> Result<Vec<LineProbe>> {
    let d = resolve_degree(oracle, rng)?;
    collect_with_degree(oracle, d, rng)
}

fn collect_with_degree(
    oracle: &PolyOracle,
    d: usize,
    rng: &mut RandomSource,
) -> Result<Vec<LineProbe>> {
    let n = oracle.n_vars();
    if n < 2 {
        return Err(Error::Precondition(
            "line probes need at least two variables".into(),
        ));
    }
    let (a, fa) = base_point(oracle, rng)?;
    let directions = loop {
        let vs: Vec<Vec<Rational>> = (0..n - 1).map(|_| rng.point(n)).collect();
        let mut rows = vs.clone();
        rows.push(a.clone());
        if RatMatrix::from_rows(rows).rank() == n {
            break vs;
        }
    };
    let probes = par::try_map(&directions, |v| probe(oracle, &a, v, d, &fa))?;
    let k = probes[0].roots.len();
    let pattern = probes[0].multiplicity_pattern();
    if probes
        .iter()
        .any(|p| p.roots.len() != k || p.multiplicity_pattern() != pattern)
    {
        return Err(Error::InconsistentProbes);
    }
    Ok(probes)
}

fn base_point(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<(Vec<Rational>, Rational)> {
    for _ in 0..BASE_POINT_DRAWS {
        let a = rng.point(oracle.n_vars());
        let fa = oracle.evaluate(&a)?;
        if !fa.is_zero() {
            return Ok((a, fa));
        }
    }
    Err(Error::ZeroPolynomial)
}

fn probe(
    oracle: &PolyOracle,
    a: &[Rational],
    v: &[Rational],
    d: usize,
    fa: &Rational,
) -> Result<LineProbe> {
    let g = oracle.restrict_to_line_from(a, v, d, Some(fa.clone()))?;
    if g.degree() != Some(d) {
        // The direction lies in one of the hyperplanes.
        return Err(Error::InconsistentProbes);
    }
    let split = rational_root_split(&g)?;
    if !split.splits() {
        return Err(Error::NotSplitOverQ);
    }
    let points = split
        .roots
        .iter()
        .map(|(t, _)| line_point(a, v, t))
        .collect();
    Ok(LineProbe {
        base: a.to_vec(),
        direction: v.to_vec(),
        restriction: g,
        roots: split.roots,
        points,
    })
}

/// Whether the line through `p` and `q` lies in the zero set of `f`.
fn on_common_hyperplane(
    oracle: &PolyOracle,
    p: &[Rational],
    q: &[Rational],
    k: usize,
    options: &HyperOptions,
    rng: &mut RandomSource,
) -> Result<bool> {
    let at = |t: &Rational| -> Vec<Rational> {
        let s = Rational::one() - t;
        p.iter().zip(q).map(|(x, y)| t * x + &s * y).collect()
    };
    if options.deterministic_line_test {
        // f restricted to the line has at most k distinct roots unless it
        // vanishes identically; 0 and 1 are already roots.
        for t in 2..=k.max(1) {
            if !oracle
                .evaluate(&at(&Rational::from_integer(t.into())))?
                .is_zero()
            {
                return Ok(false);
            }
        }
        Ok(true)
    } else {
        let t = rng.sample_avoiding(&[0, 1]);
        Ok(oracle.evaluate(&at(&t))?.is_zero())
    }
}

/// Group the intersection points by hyperplane, one point per probe, and
/// return the form vanishing on each group.
pub fn identify_hyperplanes(
    probes: &[LineProbe],
    oracle: &PolyOracle,
    rng: &mut RandomSource,
    options: &HyperOptions,
) -> Result<Vec<LinearForm>> {
    let n = oracle.n_vars();
    let Some(first) = probes.first() else {
        return Ok(Vec::new());
    };
    let k = first.points.len();
    let mut remaining: Vec<Vec<usize>> = probes
        .iter()
        .map(|p| (0..p.points.len()).collect())
        .collect();
    let mut forms = Vec::with_capacity(k);
    while let Some(&i0) = remaining[0].first() {
        remaining[0].remove(0);
        let anchor = &first.points[i0];
        let mut group = vec![anchor.clone()];
        for (j, probe) in probes.iter().enumerate().skip(1) {
            let mut hits = Vec::new();
            for (pos, &idx) in remaining[j].iter().enumerate() {
                if on_common_hyperplane(oracle, anchor, &probe.points[idx], k, options, rng)? {
                    hits.push(pos);
                }
            }
            if hits.len() != 1 {
                return Err(Error::GroupingFailed(format!(
                    "{} points of line {} share a hyperplane with the anchor",
                    hits.len(),
                    j + 1
                )));
            }
            let idx = remaining[j].remove(hits[0]);
            group.push(probe.points[idx].clone());
        }
        forms.push(form_through(&group, n)?);
    }
    if remaining.iter().any(|r| !r.is_empty()) {
        return Err(Error::GroupingFailed(
            "unmatched intersection points".into(),
        ));
    }
    Ok(forms)
}

/// The form vanishing on `n - 1` points spanning a hyperplane.
fn form_through(points: &[Vec<Rational>], n: usize) -> Result<LinearForm> {
    let m = RatMatrix::from_rows(points.to_vec());
    let null = m.nullspace();
    if points.len() != n - 1 || null.len() != 1 {
        return Err(Error::GroupingFailed(format!(
            "group of {} points has rank {}",
            points.len(),
            n - null.len()
        )));
    }
    Ok(LinearForm::new(null.into_iter().next().unwrap())?
        .canonical()
        .0)
}

/// Exponents from the root multiplicities along `probe1`, matched to forms
/// by which form vanishes at each root; `lambda` from `f(a)` on the same
/// probe, so no evaluation is needed unless some form vanishes at `a`.
pub fn multiplicities_and_lambda(
    oracle: &PolyOracle,
    probe1: &LineProbe,
    forms: &[LinearForm],
    rng: &mut RandomSource,
) -> Result<Factorization> {
    let n = oracle.n_vars();
    let mut mult = vec![None; forms.len()];
    for (idx, ((_, m), p)) in probe1.roots.iter().zip(&probe1.points).enumerate() {
        let vanishing: Vec<usize> = (0..forms.len())
            .filter(|&i| forms[i].eval(p).is_zero())
            .collect();
        match vanishing.as_slice() {
            [i] if mult[*i].is_none() => mult[*i] = Some(*m),
            _ => return Err(Error::RootFormMismatch(idx)),
        }
    }
    let exps: Vec<usize> = mult
        .iter()
        .enumerate()
        .map(|(i, m)| m.ok_or(Error::RootFormMismatch(i)))
        .collect::<Result<_>>()?;
    let denom_at = |p: &[Rational]| -> Rational {
        forms
            .iter()
            .zip(&exps)
            .fold(Rational::one(), |acc, (l, &a)| acc * Pow::pow(l.eval(p), a))
    };
    let mut p = probe1.base.clone();
    let mut value = probe1.base_value();
    let mut denom = denom_at(&p);
    while denom.is_zero() || value.is_zero() {
        p = rng.point(n);
        value = oracle.evaluate(&p)?;
        denom = denom_at(&p);
    }
    Factorization::new(n, value / denom, forms.iter().cloned().zip(exps).collect())
}

/// Factor `f` into linear forms (possibly dependent) over the rationals.
pub fn factor_hyperplane(oracle: &PolyOracle, rng: &mut RandomSource) -> Result<Factorization> {
    factor_hyperplane_with(oracle, rng, &HyperOptions::default())
}

pub fn factor_hyperplane_with(
    oracle: &PolyOracle,
    rng: &mut RandomSource,
    options: &HyperOptions,
) -> Result<Factorization> {
    let n = oracle.n_vars();
    if n == 0 {
        return Err(Error::Precondition("polynomial in zero variables".into()));
    }
    let d = resolve_degree(oracle, rng)?;
    let mut last = Error::RetriesExhausted(HYPER_RETRIES);
    for _ in 0..HYPER_RETRIES {
        match attempt(oracle, d, rng, options) {
            Ok(f) => return Ok(f),
            Err(e) if retriable(&e) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn retriable(e: &Error) -> bool {
    matches!(
        e,
        Error::InconsistentProbes
            | Error::GroupingFailed(_)
            | Error::RootFormMismatch(_)
            | Error::VerificationFailed
    )
}

fn attempt(
    oracle: &PolyOracle,
    d: usize,
    rng: &mut RandomSource,
    options: &HyperOptions,
) -> Result<Factorization> {
    let n = oracle.n_vars();
    let f = if d == 0 || n == 1 {
        // f = lambda * x1^d: no hyperplanes to separate.
        let (a, fa) = base_point(oracle, rng)?;
        let forms = if d == 0 {
            vec![]
        } else {
            vec![(LinearForm::variable(1, 0), d)]
        };
        let denom: Rational = if d == 0 {
            Rational::one()
        } else {
            Pow::pow(&a[0], d)
        };
        if n > 1 {
            Factorization::constant(n, fa)?
        } else {
            Factorization::new(1, fa / denom, forms)?
        }
    } else {
        let probes = collect_with_degree(oracle, d, rng)?;
        let forms = identify_hyperplanes(&probes, oracle, rng, options)?;
        multiplicities_and_lambda(oracle, &probes[0], &forms, rng)?
    };
    let p = rng.point(n);
    if oracle.evaluate(&p)? != f.eval(&p) {
        return Err(Error::VerificationFailed);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::parse_expression;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn expr(s: &str) -> PolyOracle {
        let c = parse_expression(s).unwrap();
        let d = c.formal_degree();
        PolyOracle::from_circuit(c).with_degree(d)
    }

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::from_i64(c).unwrap()
    }

    #[test]
    fn probe_examples() {
        let f = expr("x1*x2*(x1+x2)");
        let a = qs(&[1, 2]);
        let fa = f.evaluate(&a).unwrap();
        let p = probe(&f, &a, &qs(&[1, 1]), 3, &fa).unwrap();
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(p.roots, vec![(q(-2), 1), (r(-3, 2), 1), (q(-1), 1)]);
        assert_eq!(
            p.points,
            vec![qs(&[-1, 0]), vec![r(-1, 2), r(1, 2)], qs(&[0, 1])]
        );

        let g = expr("x1*x2");
        let a = qs(&[1, 1]);
        let p = probe(&g, &a, &qs(&[1, 2]), 2, &q(1)).unwrap();
        assert_eq!(p.roots, vec![(q(-1), 1), (r(-1, 2), 1)]);
    }

    #[test]
    fn not_split() {
        let mut rng = RandomSource::new(1);
        assert_eq!(
            collect_intersection_points(&expr("x1^2 + x2^2"), &mut rng),
            Err(Error::NotSplitOverQ)
        );
        assert_eq!(
            factor_hyperplane(&expr("x1^2 + x2^2"), &mut rng),
            Err(Error::NotSplitOverQ)
        );
    }

    #[test]
    fn two_variable_groups() {
        let mut rng = RandomSource::new(2);
        let f = expr("x1*x2*(x1+x2)");
        let probes = collect_intersection_points(&f, &mut rng).unwrap();
        let mut forms =
            identify_hyperplanes(&probes, &f, &mut rng, &HyperOptions::default()).unwrap();
        forms.sort();
        assert_eq!(forms, vec![form(&[0, 1]), form(&[1, 0]), form(&[1, 1])]);
    }

    #[test]
    fn three_coordinate_planes() {
        let f = expr("x1*x2*x3");
        let a = qs(&[1, 1, 1]);
        let probes: Vec<LineProbe> = [qs(&[1, 2, 3]), qs(&[3, -1, 2])]
            .iter()
            .map(|v| probe(&f, &a, v, 3, &q(1)).unwrap())
            .collect();
        let mut rng = RandomSource::new(3);
        let mut forms =
            identify_hyperplanes(&probes, &f, &mut rng, &HyperOptions::default()).unwrap();
        forms.sort();
        assert_eq!(
            forms,
            vec![form(&[0, 0, 1]), form(&[0, 1, 0]), form(&[1, 0, 0])]
        );
    }

    #[test]
    fn wrong_group_detected() {
        // (0,1,2) on x1 = 0 and (0,2,4) proportional to it: rank 1, not 2
        let points = vec![qs(&[0, 1, 2]), qs(&[0, 2, 4])];
        assert!(matches!(
            form_through(&points, 3),
            Err(Error::GroupingFailed(_))
        ));
    }

    #[test]
    fn multiplicity_examples() {
        let mut rng = RandomSource::new(4);
        let f = factor_hyperplane(&expr("x1*x2*(x1+x2)"), &mut rng).unwrap();
        assert_eq!(
            f,
            Factorization::new(
                2,
                q(1),
                vec![(form(&[1, 0]), 1), (form(&[0, 1]), 1), (form(&[1, 1]), 1)]
            )
            .unwrap()
        );
        let f = factor_hyperplane(&expr("x1^2*x2"), &mut rng).unwrap();
        assert_eq!(
            f,
            Factorization::new(2, q(1), vec![(form(&[1, 0]), 2), (form(&[0, 1]), 1)]).unwrap()
        );
        let f = factor_hyperplane(&expr("5*(x1+x2)^3"), &mut rng).unwrap();
        assert_eq!(
            f,
            Factorization::new(2, q(5), vec![(form(&[1, 1]), 3)]).unwrap()
        );
    }

    #[test]
    fn deterministic_line_test() {
        let mut rng = RandomSource::new(5);
        let opts = HyperOptions {
            deterministic_line_test: true,
        };
        let f =
            factor_hyperplane_with(&expr("x1*x2*(x1+x2-x3)*(x3-2*x1)"), &mut rng, &opts).unwrap();
        assert_eq!(f.factors().len(), 4);
    }

    #[test]
    fn degenerate_shapes() {
        let mut rng = RandomSource::new(6);
        let f = factor_hyperplane(&expr("3*x1^4"), &mut rng).unwrap();
        assert_eq!(
            f,
            Factorization::new(1, q(3), vec![(form(&[1]), 4)]).unwrap()
        );
        let f = factor_hyperplane(&expr("7 + 0*x2").with_degree(0), &mut rng).unwrap();
        assert_eq!(f, Factorization::constant(2, q(7)).unwrap());
    }
}
