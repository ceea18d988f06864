//! The numbered acceptance checks, runnable one at a time or as a suite.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::analysis::{atom_masses, hilbert_score, potential_derivative, quadrature_moment, t_density_limits, EpsilonLadder};
use crate::distributions::{
    cauchy_eval, classify_meixner, exact_moments, fbp_closed_form_moments, measure_of, standardize_to_meixner, Family,
    MeixnerClass,
};
use crate::error::Result;
use crate::fock::{fbp_operator, vacuum_moments};
use crate::ncl::cards::{arrangements, MotzkinPath, Rule};
use crate::ncl::partition::LinkedPartition;
use crate::ncl::{enumerate_ncl, fbp_moment, gamma_closed_series, gamma_poly, gamma_quadratic_residual, GammaRoute};
use crate::randmat::{ks_distance, sample_fisher_spectrum, FisherSampleConfig};
use crate::rational::{format_rational, int, pow, rat, to_f64, Rational};
use crate::transforms::{free_add_convolve, free_mult_convolve, MomentSequence};

pub const FBP_PARAMS: [(i64, i64, i64, i64); 3] = [(2, 1, 3, 1), (1, 2, 2, 1), (3, 1, 3, 2)];
pub const SCHROEDER: [usize; 8] = [1, 2, 6, 22, 90, 394, 1806, 8558];

/// Result of one check: `detail` names the worst quantity observed.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:>2}] {}: {} ({:.2?})", self.id, self.name, self.detail, self.elapsed)
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CHECKS: [(usize, &str, Check); 12] = [
    (1, "triple-route moments", triple_route_moments),
    (2, "multiplicative reconstruction", multiplicative_reconstruction),
    (3, "gamma generating function", gamma_generating_function),
    (4, "linked partition counts", linked_partition_counts),
    (5, "statistics invariants", statistics_invariants),
    (6, "score identities", score_identities),
    (7, "measure sanity", measure_sanity),
    (8, "free T limits", free_t_limits),
    (9, "symmetric square", symmetric_square),
    (10, "Meixner classification", meixner_classification),
    (11, "Monte Carlo Fisher spectrum", monte_carlo_fisher),
    (12, "free Poisson semigroup", free_poisson_semigroup),
];

pub fn run_check(id: usize) -> Option<CheckOutcome> {
    let &(id, name, check) = CHECKS.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CheckOutcome { id, name, passed, detail, elapsed: start.elapsed() })
}

/// Runs the checks in order; with `fail_fast` it stops after the first failure.
pub fn run_all(fail_fast: bool) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &(id, ..) in CHECKS.iter() {
        let o = run_check(id).expect("known id");
        let failed = !o.passed;
        out.push(o);
        if failed && fail_fast {
            break;
        }
    }
    out
}

pub fn fbp_params() -> Vec<(Rational, Rational)> {
    FBP_PARAMS.iter().map(|&(an, ad, bn, bd)| (rat(an, ad), rat(bn, bd))).collect()
}

fn triple_route_moments() -> Result<(bool, String)> {
    let start = Instant::now();
    for (a, b) in fbp_params() {
        let closed = fbp_closed_form_moments(&a, &b, 8)?;
        let fock = vacuum_moments(&fbp_operator(&a, &b, 8)?, 8)?;
        for n in 1..=8 {
            let ncl = fbp_moment(&a, &b, n)?;
            if &ncl != closed.get(n) || ncl != fock[n] {
                return Ok((false, format!("a={a}, b={b}, n={n}: ncl {ncl}, closed {}, fock {}", closed.get(n), fock[n])));
            }
        }
        let one = Rational::one();
        let m1 = &a / (&b - &one);
        let m2 = &m1 * &m1 + &a * (&a + &b - &one) / pow(&(&b - &one), 3);
        if closed.get(1) != &m1 || closed.get(2) != &m2 {
            return Ok((false, format!("a={a}, b={b}: spot values differ")));
        }
    }
    let t = start.elapsed();
    Ok((t < Duration::from_secs(30), format!("3 parameter pairs, n = 1..8 identical, {t:.2?}")))
}

fn multiplicative_reconstruction() -> Result<(bool, String)> {
    for (a, b) in fbp_params() {
        let pa = exact_moments(&Family::free_poisson(a.clone())?, 8)?;
        let pb = exact_moments(&Family::inverse_free_poisson(b.clone())?, 8)?;
        let prod = free_mult_convolve(&pa, &pb)?;
        for n in 1..=8 {
            let m = fbp_moment(&a, &b, n)?;
            if prod.get(n) != &m {
                return Ok((false, format!("a={a}, b={b}, n={n}: {} vs {m}", prod.get(n))));
            }
        }
    }
    Ok((true, "product moments equal free beta prime moments for n <= 8".into()))
}

/// Deterministic parameter triples with small numerators and denominators.
pub fn random_gamma_params(count: usize, seed: u64) -> Vec<(Rational, Rational, Rational)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut draw = || rat(rng.random_range(0..=6), rng.random_range(1..=5));
    (0..count).map(|_| (draw(), draw(), draw())).collect()
}

fn gamma_generating_function() -> Result<(bool, String)> {
    for (al, be, ga) in random_gamma_params(10, 2024) {
        for n in 1..=8 {
            let brute = gamma_poly(n, &al, &be, &ga, GammaRoute::Brute)?;
            let cf = gamma_poly(n, &al, &be, &ga, GammaRoute::ContinuedFraction)?;
            let closed = gamma_poly(n, &al, &be, &ga, GammaRoute::Closed)?;
            if brute != cf || brute != closed {
                return Ok((false, format!("({al}, {be}, {ga}) n={n}: {brute}, {cf}, {closed}")));
            }
        }
        let residual = gamma_quadratic_residual(&gamma_closed_series(8, &al, &be, &ga)?, &al, &be, &ga);
        if !residual.is_zero() {
            return Ok((false, format!("({al}, {be}, {ga}): nonzero residual")));
        }
    }
    Ok((true, "10 triples, three routes identical to order 8, residual 0".into()))
}

fn linked_partition_counts() -> Result<(bool, String)> {
    let counts: Vec<usize> = (1..=8).map(|n| enumerate_ncl(n).map(|v| v.len())).collect::<Result<_>>()?;
    let path = MotzkinPath::parse("uutdd")?;
    let cards = arrangements(&path, Rule::Linked).len();
    Ok((counts == SCHROEDER && cards == 6, format!("counts {counts:?}, arrangements of uutdd: {cards}")))
}

/// Six blocks on ten points with three doubly covered elements.
pub fn reference_partition() -> Result<LinkedPartition> {
    LinkedPartition::new(10, vec![vec![1, 2, 7], vec![2, 4], vec![3], vec![5, 6], vec![7, 8, 9], vec![9, 10]])
}

fn statistics_invariants() -> Result<(bool, String)> {
    let mut total = 0usize;
    for n in 1..=8 {
        for p in enumerate_ncl(n)? {
            let s = p.statistics()?;
            let sizes: usize = p.block_sizes().sum();
            if s.dc + s.sc + s.sg != p.num_blocks() || sizes != n + s.dc {
                return Ok((false, format!("{p:?}: {s:?}")));
            }
            total += 1;
        }
    }
    let s = reference_partition()?.statistics()?;
    let ok = (s.dc, s.sc, s.sg) == (3, 2, 1);
    Ok((ok, format!("{total} partitions checked, reference statistics ({}, {}, {})", s.dc, s.sc, s.sg)))
}

pub fn score_families() -> Result<Vec<Family>> {
    Ok(vec![
        Family::free_beta_prime(int(2), int(3))?,
        Family::free_beta_prime(rat(1, 2), int(2))?,
        Family::free_t(int(2))?,
        Family::free_t(int(10))?,
        Family::free_beta(int(2), int(2))?,
        Family::free_beta(rat(1, 2), rat(3, 4))?,
    ])
}

/// `sup |2Hf − V′|` over 20 evenly spaced interior points.
pub fn score_residual(f: &Family) -> Result<f64> {
    let ladder = EpsilonLadder::default();
    let (lo, hi) = f.support();
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        let x = lo + (hi - lo) * k as f64 / 21.0;
        worst = worst.max((hilbert_score(f, x, &ladder)? - potential_derivative(f, x)?).abs());
    }
    Ok(worst)
}

fn score_identities() -> Result<(bool, String)> {
    let mut worst: (f64, String) = (0.0, String::new());
    for f in score_families()? {
        let r = score_residual(&f)?;
        if r > worst.0 || worst.1.is_empty() {
            worst = (r, f.to_string());
        }
    }
    Ok((worst.0 <= 1e-6, format!("worst residual {:.3e} for {}", worst.0, worst.1)))
}

pub fn sanity_families() -> Result<Vec<Family>> {
    Ok(vec![
        Family::free_poisson(rat(1, 2))?,
        Family::free_poisson(int(3))?,
        Family::inverse_free_poisson(int(3))?,
        Family::free_beta_prime(int(2), int(3))?,
        Family::free_beta_prime(rat(1, 2), int(2))?,
        Family::free_f(int(2), int(3))?,
        Family::free_t(int(3))?,
        Family::free_beta(int(2), int(2))?,
        Family::free_beta(rat(1, 2), rat(3, 4))?,
    ])
}

/// Atom masses predicted from the parameters alone.
pub fn expected_atoms(f: &Family) -> Vec<(f64, f64)> {
    let deficit = |p: &Rational| (1.0 - to_f64(p)).max(0.0);
    let keep = |v: Vec<(f64, f64)>| v.into_iter().filter(|a| a.1 > 0.0).collect();
    match f {
        Family::FreePoisson { lambda } => keep(vec![(0.0, deficit(lambda))]),
        Family::FreeBetaPrime { a, .. } | Family::FreeF { a, .. } => keep(vec![(0.0, deficit(a))]),
        Family::FreeBeta { a, b } => keep(vec![(0.0, deficit(a)), (1.0, deficit(b))]),
        _ => Vec::new(),
    }
}

fn measure_sanity() -> Result<(bool, String)> {
    let ladder = EpsilonLadder::default();
    let (mut mass_err, mut mom_err, mut atom_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for f in sanity_families()? {
        let spec = measure_of(&f)?;
        mass_err = mass_err.max((quadrature_moment(&spec, 0)? - 1.0).abs());
        let exact = exact_moments(&f, 6)?;
        for n in 1..=6 {
            let e = to_f64(exact.get(n));
            let q = quadrature_moment(&spec, n)?;
            mom_err = mom_err.max(if e == 0.0 { q.abs() } else { ((q - e) / e).abs() });
        }
        let found = atom_masses(&f, &ladder)?;
        let want = expected_atoms(&f);
        if found.len() != want.len() {
            return Ok((false, format!("{f}: atoms {found:?}, expected {want:?}")));
        }
        for ((x, m), (y, w)) in found.iter().zip(&want) {
            if x != y {
                return Ok((false, format!("{f}: atom at {x}, expected {y}")));
            }
            atom_err = atom_err.max((m - w).abs());
        }
    }
    let ok = mass_err <= 1e-8 && mom_err <= 1e-6 && atom_err <= 1e-6;
    Ok((ok, format!("mass {mass_err:.2e}, moments (rel) {mom_err:.2e}, atoms {atom_err:.2e}")))
}

fn free_t_limits() -> Result<(bool, String)> {
    let grid: Vec<f64> = (0..=380).map(|k| -1.9 + 0.01 * k as f64).collect();
    let r = t_density_limits(&grid)?;
    let ok = r.semicircle_distance <= 2e-4 && r.cauchy_distance <= 1e-4;
    Ok((ok, format!("semicircle {:.3e}, Cauchy {:.3e}", r.semicircle_distance, r.cauchy_distance)))
}

/// Points in the upper half plane, away from both axes.
pub fn random_upper_half_plane(count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            Complex64::new(sign * rng.random_range(0.1..3.0), rng.random_range(0.1..3.0))
        })
        .collect()
}

fn symmetric_square() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for m in [int(2), int(10)] {
        let t = Family::free_t(m.clone())?;
        let f = Family::free_f(int(1), m)?;
        for z in random_upper_half_plane(20, 7) {
            worst = worst.max((cauchy_eval(&t, z)? - z * cauchy_eval(&f, z * z)?).norm());
        }
    }
    Ok((worst <= 1e-12, format!("worst |difference| {worst:.3e}")))
}

pub fn meixner_grid() -> Vec<(Rational, Rational)> {
    let a_vals = [rat(1, 3), rat(1, 2), int(1), int(2), rat(7, 2)];
    let b_vals = [rat(5, 4), rat(3, 2), int(2), int(3), int(5)];
    a_vals.iter().flat_map(|a| b_vals.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

fn meixner_classification() -> Result<(bool, String)> {
    for (a, b) in meixner_grid() {
        let p = standardize_to_meixner(&a, &b)?;
        let one = Rational::one();
        let expected = (&b - &one) / (&a * (&a + &b - &one));
        let class = classify_meixner(p.theta, p.tau)?;
        if p.discriminant != expected || class != MeixnerClass::FreeNegativeBinomial {
            return Ok((false, format!("a={a}, b={b}: discriminant {}, class {class}", format_rational(&p.discriminant))));
        }
    }
    Ok((true, "25 parameter pairs, free negative binomial".into()))
}

fn monte_carlo_fisher() -> Result<(bool, String)> {
    let start = Instant::now();
    let cfg = FisherSampleConfig::new(500, 2.0, 3.0, 42)?;
    let eigs = sample_fisher_spectrum(&cfg)?;
    let ks = ks_distance(&eigs, &Family::free_f(int(2), int(3))?)?;
    let t = start.elapsed();
    Ok((ks < 0.08 && t < Duration::from_secs(60), format!("KS {ks:.4} at p = 500, seed 42, {t:.2?}")))
}

fn free_poisson_semigroup() -> Result<(bool, String)> {
    let pairs = [(rat(1, 2), rat(3, 2)), (int(2), int(3)), (rat(1, 3), rat(1, 4))];
    for (a, b) in pairs {
        let ma = exact_moments(&Family::free_poisson(a.clone())?, 8)?;
        let mb = exact_moments(&Family::free_poisson(b.clone())?, 8)?;
        let sum = exact_moments(&Family::free_poisson(&a + &b)?, 8)?;
        if free_add_convolve(&ma, &mb)? != sum {
            return Ok((false, format!("free Poisson {a} + {b}")));
        }
        if free_mult_convolve(&ma, &MomentSequence::dirac(&Rational::one(), 8))? != ma {
            return Ok((false, format!("multiplicative identity fails for {a}")));
        }
        if free_add_convolve(&ma, &MomentSequence::dirac(&Rational::zero(), 8))? != ma {
            return Ok((false, format!("additive identity fails for {a}")));
        }
    }
    Ok((true, "3 pairs exact to order 8".into()))
}
