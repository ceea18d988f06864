//! Non-crossing linked partitions.
//!
//! Enumeration goes through Motzkin paths and their admissible card
//! arrangements (see [`cards`]); the generating polynomial of the joint
//! statistics (dc, sc, sg) is available by brute force, by the continued
//! fraction of the step weights, and by the closed-form root of its quadratic
//! equation.

pub mod cards;
pub mod partition;
pub mod weights;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{pow, Rational};
use crate::series::PowerSeries;
use crate::transforms::TCoefficients;

pub use cards::{arrangements, motzkin_paths, CardArrangement, CardKind, MotzkinPath, Rule, Step};
pub use partition::{validate_ncl, LinkType, LinkedPartition, NclStatistics};
pub use weights::{WeightSequence, WeightedMotzkinScheme};

/// Largest ground set enumerated exhaustively (|NCL(12)| = 5 293 446).
pub const MAX_EXHAUSTIVE_N: usize = 12;

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::MalformedInput("ground set must be nonempty".into()));
    }
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::SizeLimitExceeded { n, limit: MAX_EXHAUSTIVE_N });
    }
    Ok(())
}

/// Folds over every partition produced by the arrangement rule, one Motzkin
/// path per task, and merges the per-path accumulators.
fn fold_partitions<T, F, M>(n: usize, rule: Rule, fold: F, merge: M) -> T
where
    T: Default + Send,
    F: Fn(&mut T, LinkedPartition) + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    motzkin_paths(n)
        .par_iter()
        .map(|path| {
            let mut acc = T::default();
            cards::for_each_arrangement(path, rule, |a| fold(&mut acc, a.to_partition()));
            acc
        })
        .reduce(T::default, &merge)
}

fn merge_counts<K: Ord>(mut a: BTreeMap<K, u64>, b: BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// All non-crossing linked partitions of `[n]` in canonical order.
pub fn enumerate_ncl(n: usize) -> Result<Vec<LinkedPartition>> {
    check_size(n)?;
    let mut all: Vec<LinkedPartition> = fold_partitions(
        n,
        Rule::Linked,
        |v: &mut Vec<_>, p| v.push(p),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    all.sort();
    Ok(all)
}

/// All ordinary non-crossing partitions of `[n]` in canonical order.
pub fn enumerate_nc(n: usize) -> Result<Vec<LinkedPartition>> {
    check_size(n)?;
    let mut all: Vec<LinkedPartition> = fold_partitions(
        n,
        Rule::NonCrossing,
        |v: &mut Vec<_>, p| v.push(p),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    all.sort();
    Ok(all)
}

/// How many partitions carry each (dc, sc, sg), computed from the partitions themselves.
pub fn statistics_counts(n: usize) -> Result<BTreeMap<NclStatistics, u64>> {
    check_size(n)?;
    Ok(fold_partitions(
        n,
        Rule::Linked,
        |m: &mut BTreeMap<_, u64>, p| {
            let s = p.statistics().expect("card arrangements yield valid partitions");
            *m.entry(s).or_insert(0) += 1;
        },
        merge_counts,
    ))
}

/// How many partitions have each multiset of block sizes (sorted descending).
pub fn block_size_counts(n: usize, rule: Rule) -> Result<BTreeMap<Vec<usize>, u64>> {
    check_size(n)?;
    Ok(fold_partitions(
        n,
        rule,
        |m: &mut BTreeMap<_, u64>, p| {
            let mut sizes: Vec<usize> = p.block_sizes().collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            *m.entry(sizes).or_insert(0) += 1;
        },
        merge_counts,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaRoute {
    /// Sum of alpha^dc beta^sc gamma^sg over the enumerated partitions.
    Brute,
    /// Expansion of the weighted Motzkin continued fraction.
    ContinuedFraction,
    /// Series expansion of the closed-form root of the quadratic equation.
    Closed,
}

fn monomial_sum(counts: &BTreeMap<NclStatistics, u64>, x_dc: &Rational, x_sc: &Rational, x_sg: &Rational) -> Rational {
    counts.iter().map(|(s, &c)| Rational::from_integer(c.into()) * pow(x_dc, s.dc) * pow(x_sc, s.sc) * pow(x_sg, s.sg)).sum()
}

/// Coefficient of `z^n` in the generating function of (dc, sc, sg) over NCL(n).
pub fn gamma_poly(n: usize, alpha: &Rational, beta: &Rational, gamma: &Rational, route: GammaRoute) -> Result<Rational> {
    match route {
        GammaRoute::Brute => {
            if n == 0 {
                return Ok(Rational::one());
            }
            Ok(monomial_sum(&statistics_counts(n)?, alpha, beta, gamma))
        }
        GammaRoute::ContinuedFraction => {
            let scheme = WeightedMotzkinScheme::linked_partitions(alpha, beta, gamma);
            Ok(scheme.moment_series(n).coeff(n).clone())
        }
        GammaRoute::Closed => {
            let series = gamma_closed_series(n, alpha, beta, gamma)?;
            let residual = gamma_quadratic_residual(&series, alpha, beta, gamma);
            assert!(residual.is_zero(), "closed form violates its quadratic: {residual}");
            Ok(series.coeff(n).clone())
        }
    }
}

/// Coefficients `(A, B, C)` of `A Γ² − B Γ + C = 0`, as series of the given order.
fn gamma_quadratic(order: usize, alpha: &Rational, beta: &Rational, gamma: &Rational) -> (PowerSeries, PowerSeries, Rational) {
    let one = Rational::one();
    let left = PowerSeries::from_coeffs(vec![one.clone(), beta - gamma], order);
    let right = PowerSeries::from_coeffs(vec![alpha.clone(), beta - alpha * gamma], order);
    let two = &one + &one;
    let b0 = &two * alpha + beta;
    let b1 = beta * (&one + alpha + gamma) - &two * (alpha + beta) * gamma;
    (&left * &right, PowerSeries::from_coeffs(vec![b0, b1], order), alpha + beta)
}

/// Expands the explicit root
/// `[B(z) − β sqrt((1 − (1+α+γ)z)² − 4(α+β)z²)] / (2 A(z))` to order `order`.
pub fn gamma_closed_series(order: usize, alpha: &Rational, beta: &Rational, gamma: &Rational) -> Result<PowerSeries> {
    let one = Rational::one();
    let work = order + 1;
    let (a, b, _) = gamma_quadratic(work, alpha, beta, gamma);
    let denom = a.scale(&(&one + &one));
    let Some(v) = denom.valuation() else {
        // alpha = beta = 0: only singletons survive and the quadratic degenerates.
        return Ok(PowerSeries::geometric(gamma, order));
    };
    let lin = PowerSeries::from_coeffs(vec![one.clone(), -(&one + alpha + gamma)], work);
    let disc = (&lin * &lin).try_sub(&PowerSeries::monomial(Rational::from_integer(4.into()) * (alpha + beta), 2, work));
    let numer = b.try_sub(&disc.sqrt()?.scale(beta));
    let numer = numer.shift_down(v)?;
    let denom = denom.shift_down(v)?;
    Ok(numer.try_div(&denom)?.truncate(order))
}

/// `A Γ² − B Γ + C` for a candidate series `Γ`.
pub fn gamma_quadratic_residual(series: &PowerSeries, alpha: &Rational, beta: &Rational, gamma: &Rational) -> PowerSeries {
    let (a, b, c) = gamma_quadratic(series.order(), alpha, beta, gamma);
    let mut r = (&(&a * series) * series).try_sub(&(&b * series));
    r = r.try_add(&PowerSeries::constant(c, series.order()));
    r
}

/// Moment `m_n` from T-transform coefficients:
/// sum over NCL(n) of `alpha_0^(n − |π|) · prod_B alpha_(|B| − 1)`.
pub fn moment_via_ncl(alphas: &TCoefficients, n: usize) -> Result<Rational> {
    if n == 0 {
        return Ok(Rational::one());
    }
    let a = alphas.alphas();
    if a.len() < n {
        return Err(Error::InsufficientOrder { got: a.len().saturating_sub(1), need: n - 1 });
    }
    let counts = block_size_counts(n, Rule::Linked)?;
    Ok(counts
        .iter()
        .map(|(sizes, &c)| {
            let mut term = Rational::from_integer(c.into()) * pow(&a[0], n - sizes.len());
            for &s in sizes {
                term *= &a[s - 1];
            }
            term
        })
        .sum())
}

/// `(s, t, u) = (a/(b−1), (a+b−1)/(b−1), 1/(b−1))`.
pub fn fbp_stu(a: &Rational, b: &Rational) -> Result<(Rational, Rational, Rational)> {
    let one = Rational::one();
    if a <= &Rational::zero() || b <= &one {
        return Err(Error::InvalidParameters(format!("free beta prime needs a > 0 and b > 1, got a = {a}, b = {b}")));
    }
    let bm1 = b - &one;
    Ok((a / &bm1, (a + &bm1) / &bm1, one / &bm1))
}

/// Moment of the free beta prime law from the (dc, sc, sg) statistics:
/// `(su)^n Σ (t/s)^dc (t/(su))^sc (1/u)^sg`.
pub fn fbp_moment(a: &Rational, b: &Rational, n: usize) -> Result<Rational> {
    let (s, t, u) = fbp_stu(a, b)?;
    if n == 0 {
        return Ok(Rational::one());
    }
    let su = &s * &u;
    let counts = statistics_counts(n)?;
    Ok(pow(&su, n) * monomial_sum(&counts, &(&t / &s), &(&t / &su), &u.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn counts_are_large_schroeder_numbers() {
        let counts: Vec<usize> = (1..=8).map(|n| enumerate_ncl(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 6, 22, 90, 394, 1806, 8558]);
        let nc: Vec<usize> = (1..=6).map(|n| enumerate_nc(n).unwrap().len()).collect();
        assert_eq!(nc, vec![1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn n3_listing() {
        let got: Vec<String> = enumerate_ncl(3).unwrap().iter().map(|p| p.to_string()).collect();
        let mut expected = vec!["{{1},{2},{3}}", "{{1,2},{3}}", "{{1},{2,3}}", "{{1,3},{2}}", "{{1,2,3}}", "{{1,2},{2,3}}"];
        expected.sort();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        assert_eq!(got_sorted, expected);
    }

    #[test]
    fn size_guard() {
        assert!(matches!(enumerate_ncl(13), Err(Error::SizeLimitExceeded { n: 13, limit: 12 })));
        assert!(enumerate_ncl(0).is_err());
        assert!(gamma_poly(20, &int(1), &int(1), &int(1), GammaRoute::ContinuedFraction).is_ok());
        assert!(gamma_poly(13, &int(1), &int(1), &int(1), GammaRoute::Brute).is_err());
    }

    #[test]
    fn gamma_at_n3() {
        let (a, b, g) = (rat(2, 3), rat(-5, 2), int(7));
        let expected = &g * &g * &g + int(3) * &b * &g + &b + &a * &b;
        for route in [GammaRoute::Brute, GammaRoute::ContinuedFraction, GammaRoute::Closed] {
            assert_eq!(gamma_poly(3, &a, &b, &g, route).unwrap(), expected, "{route:?}");
        }
        assert_eq!(gamma_poly(3, &int(1), &int(1), &int(1), GammaRoute::Brute).unwrap(), int(6));
        assert_eq!(gamma_poly(3, &int(0), &int(1), &int(1), GammaRoute::Closed).unwrap(), int(5));
    }

    #[test]
    fn gamma_counts_reduce_to_schroeder() {
        let one = int(1);
        for (n, c) in [(1, 1), (2, 2), (3, 6), (4, 22), (5, 90)] {
            for route in [GammaRoute::Brute, GammaRoute::ContinuedFraction, GammaRoute::Closed] {
                assert_eq!(gamma_poly(n, &one, &one, &one, route).unwrap(), int(c));
            }
        }
    }

    #[test]
    fn closed_form_degenerate_markers() {
        // beta = alpha = 0 keeps only the all-singleton partition.
        let g = rat(3, 2);
        for n in 0..6 {
            assert_eq!(gamma_poly(n, &int(0), &int(0), &g, GammaRoute::Closed).unwrap(), pow(&g, n));
        }
        // alpha = 0 needs the common factor z cancelled.
        for n in 1..7 {
            let cf = gamma_poly(n, &int(0), &rat(1, 3), &int(2), GammaRoute::ContinuedFraction).unwrap();
            assert_eq!(gamma_poly(n, &int(0), &rat(1, 3), &int(2), GammaRoute::Closed).unwrap(), cf);
        }
    }

    #[test]
    fn moment_via_ncl_examples() {
        let ones = TCoefficients::new(vec![int(1); 3]).unwrap();
        assert_eq!(moment_via_ncl(&ones, 3).unwrap(), int(6));
        let c = rat(3, 2);
        let point = TCoefficients::new(vec![c.clone(), int(0), int(0)]).unwrap();
        assert_eq!(moment_via_ncl(&point, 3).unwrap(), pow(&c, 3));
        let constant = TCoefficients::new(vec![c.clone(); 4]).unwrap();
        assert_eq!(moment_via_ncl(&constant, 4).unwrap(), pow(&c, 4) * int(22));
        let short = TCoefficients::new(vec![int(1); 2]).unwrap();
        assert!(moment_via_ncl(&short, 3).is_err());
    }

    #[test]
    fn fbp_moment_examples() {
        let (a, b) = (int(2), int(3));
        assert_eq!(fbp_moment(&a, &b, 1).unwrap(), int(1));
        assert_eq!(fbp_moment(&a, &b, 2).unwrap(), int(2));
        assert_eq!(fbp_moment(&a, &b, 3).unwrap(), rat(11, 2));
        assert!(fbp_moment(&int(0), &b, 2).is_err());
        assert!(fbp_moment(&a, &int(1), 2).is_err());
    }

    #[test]
    fn fbp_moment_matches_t_coefficient_sum() {
        for (a, b) in [(int(2), int(3)), (rat(1, 2), int(2)), (int(3), rat(3, 2))] {
            let (s, t, u) = fbp_stu(&a, &b).unwrap();
            let mut alphas = vec![s];
            for k in 1..8 {
                alphas.push(&t * pow(&u, k));
            }
            let tc = TCoefficients::new(alphas).unwrap();
            for n in 1..=7 {
                assert_eq!(fbp_moment(&a, &b, n).unwrap(), moment_via_ncl(&tc, n).unwrap());
            }
        }
    }
}
