//! Closed-form parametric families: Cauchy transforms, densities with atoms,
//! S/T-transforms and the free Meixner standardization.
//!
//! Every Cauchy transform is evaluated in the rationalized form
//! `K / (P(z) + c·sqrt(z − r₋)·sqrt(z − r₊))`, where the product of the two
//! principal square roots is analytic off `[r₋, r₊]` and behaves like `z` at
//! infinity. This picks the branch with `G(z) ~ 1/z` everywhere off the
//! support, including the real axis, without a sign fix-up.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ncl::fbp_stu;
use crate::rational::{int, pow, to_f64, Rational};
use crate::series::PowerSeries;
use crate::transforms::{r_to_moments, s_to_moments, CumulantRoute, FreeCumulants, MomentSequence, TCoefficients};

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    FreePoisson { lambda: Rational },
    InverseFreePoisson { b: Rational },
    FreeBetaPrime { a: Rational, b: Rational },
    FreeF { a: Rational, b: Rational },
    FreeT { m: Rational },
    FreeBeta { a: Rational, b: Rational },
    FreeMeixnerStd { theta: f64, tau: f64 },
}

impl Family {
    pub fn free_poisson(lambda: Rational) -> Result<Self> {
        Self::checked(Family::FreePoisson { lambda })
    }

    pub fn inverse_free_poisson(b: Rational) -> Result<Self> {
        Self::checked(Family::InverseFreePoisson { b })
    }

    pub fn free_beta_prime(a: Rational, b: Rational) -> Result<Self> {
        Self::checked(Family::FreeBetaPrime { a, b })
    }

    pub fn free_f(a: Rational, b: Rational) -> Result<Self> {
        Self::checked(Family::FreeF { a, b })
    }

    pub fn free_t(m: Rational) -> Result<Self> {
        Self::checked(Family::FreeT { m })
    }

    pub fn free_beta(a: Rational, b: Rational) -> Result<Self> {
        Self::checked(Family::FreeBeta { a, b })
    }

    pub fn free_meixner(theta: f64, tau: f64) -> Result<Self> {
        Self::checked(Family::FreeMeixnerStd { theta, tau })
    }

    fn checked(f: Self) -> Result<Self> {
        f.validate()?;
        Ok(f)
    }

    /// Rejects parameters outside the family's range.
    pub fn validate(&self) -> Result<()> {
        let zero = Rational::zero();
        let one = Rational::one();
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        match self {
            Family::FreePoisson { lambda } if *lambda <= zero => bad(format!("free Poisson needs lambda > 0, got {lambda}")),
            Family::InverseFreePoisson { b } if *b <= one => bad(format!("inverse free Poisson needs b > 1, got {b}")),
            Family::FreeBetaPrime { a, b } | Family::FreeF { a, b } if *a <= zero || *b <= one => {
                bad(format!("needs a > 0 and b > 1, got a = {a}, b = {b}"))
            }
            Family::FreeT { m } if *m <= one => bad(format!("free T needs m > 1, got {m}")),
            Family::FreeBeta { a, b } if *a <= zero || *b <= zero || a + b <= one => {
                bad(format!("free beta needs a, b > 0 and a + b > 1, got a = {a}, b = {b}"))
            }
            Family::FreeMeixnerStd { theta, tau } if !theta.is_finite() || !tau.is_finite() => {
                bad("free Meixner parameters must be finite".into())
            }
            Family::FreeMeixnerStd { tau, .. } if *tau < -1.0 => Err(Error::InvalidTau(*tau)),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::FreePoisson { .. } => "free-poisson",
            Family::InverseFreePoisson { .. } => "inverse-free-poisson",
            Family::FreeBetaPrime { .. } => "fbp",
            Family::FreeF { .. } => "free-f",
            Family::FreeT { .. } => "free-t",
            Family::FreeBeta { .. } => "free-beta",
            Family::FreeMeixnerStd { .. } => "meixner",
        }
    }

    /// Closed support interval of the continuous part.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Family::FreePoisson { lambda } => {
                let s = to_f64(lambda).sqrt();
                ((1.0 - s).powi(2), (1.0 + s).powi(2))
            }
            Family::InverseFreePoisson { b } => {
                let s = to_f64(b).sqrt();
                (1.0 / (1.0 + s).powi(2), 1.0 / (1.0 - s).powi(2))
            }
            Family::FreeBetaPrime { a, b } => fbp_support(to_f64(a), to_f64(b)),
            Family::FreeF { a, b } => {
                let (lo, hi) = fbp_support(to_f64(a), to_f64(b));
                let c = to_f64(&(b / a));
                (c * lo, c * hi)
            }
            Family::FreeT { m } => {
                let m = to_f64(m);
                let r = 2.0 * m / (m - 1.0);
                (-r, r)
            }
            Family::FreeBeta { a, b } => {
                let (a, b) = (to_f64(a), to_f64(b));
                let (p, q) = ((a * (a + b - 1.0)).sqrt(), b.sqrt());
                (((p - q) / (a + b)).powi(2), ((p + q) / (a + b)).powi(2))
            }
            Family::FreeMeixnerStd { theta, tau } => {
                let w = 2.0 * (1.0 + tau).max(0.0).sqrt();
                (theta - w, theta + w)
            }
        }
    }

    /// Atoms as (location, mass), from the closed-form residues.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let one = Rational::one();
        let deficit = |p: &Rational| if *p < one { Some(to_f64(&(&one - p))) } else { None };
        match self {
            Family::FreePoisson { lambda } => deficit(lambda).map(|m| vec![(0.0, m)]).unwrap_or_default(),
            Family::FreeBetaPrime { a, .. } | Family::FreeF { a, .. } => deficit(a).map(|m| vec![(0.0, m)]).unwrap_or_default(),
            Family::FreeBeta { a, b } => {
                let mut out = Vec::new();
                if let Some(m) = deficit(a) {
                    out.push((0.0, m));
                }
                if let Some(m) = deficit(b) {
                    out.push((1.0, m));
                }
                out
            }
            Family::InverseFreePoisson { .. } | Family::FreeT { .. } => Vec::new(),
            Family::FreeMeixnerStd { theta, tau } => meixner_atoms(*theta, *tau),
        }
    }

    /// Density of the continuous part (zero off the support).
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(lo..=hi).contains(&x) {
            return 0.0;
        }
        let pi = std::f64::consts::PI;
        let bump = ((x - lo) * (hi - x)).max(0.0).sqrt();
        if bump == 0.0 {
            return 0.0;
        }
        match self {
            Family::FreePoisson { .. } => bump / (2.0 * pi * x),
            Family::InverseFreePoisson { b } => {
                let p = Family::FreePoisson { lambda: b.clone() };
                p.density(1.0 / x) / (x * x)
            }
            Family::FreeBetaPrime { b, .. } => (to_f64(b) - 1.0) * bump / (2.0 * pi * x * (1.0 + x)),
            Family::FreeF { a, b } => (to_f64(b) - 1.0) * bump / (2.0 * pi * x * (to_f64(&(b / a)) + x)),
            Family::FreeT { m } => {
                let m = to_f64(m);
                let q = (m - 1.0) / m;
                (4.0 - q * q * x * x).max(0.0).sqrt() / (2.0 * pi * (1.0 + x * x / m))
            }
            Family::FreeBeta { a, b } => to_f64(&(a + b)) * bump / (2.0 * pi * x * (1.0 - x)),
            Family::FreeMeixnerStd { theta, tau } => {
                if *tau <= -1.0 {
                    0.0
                } else {
                    bump / (2.0 * pi * (tau * x * x + theta * x + 1.0))
                }
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::FreePoisson { lambda } => write!(f, "FreePoisson({lambda})"),
            Family::InverseFreePoisson { b } => write!(f, "InverseFreePoisson({b})"),
            Family::FreeBetaPrime { a, b } => write!(f, "FreeBetaPrime({a}, {b})"),
            Family::FreeF { a, b } => write!(f, "FreeF({a}, {b})"),
            Family::FreeT { m } => write!(f, "FreeT({m})"),
            Family::FreeBeta { a, b } => write!(f, "FreeBeta({a}, {b})"),
            Family::FreeMeixnerStd { theta, tau } => write!(f, "FreeMeixnerStd({theta}, {tau})"),
        }
    }
}

fn fbp_support(a: f64, b: f64) -> (f64, f64) {
    let (p, q) = ((a * b).sqrt(), (a + b - 1.0).sqrt());
    (((p - q) / (b - 1.0)).powi(2), ((p + q) / (b - 1.0)).powi(2))
}

/// `sqrt(z − lo)·sqrt(z − hi)` with principal roots.
fn root_product(z: Complex64, lo: f64, hi: f64) -> Complex64 {
    (z - lo).sqrt() * (z - hi).sqrt()
}

pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Continuous density on `[lo, hi]` plus finitely many atoms.
#[derive(Clone)]
pub struct MeasureSpec {
    pub density: Density,
    pub support: (f64, f64),
    pub atoms: Vec<(f64, f64)>,
}

impl MeasureSpec {
    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }
}

impl fmt::Debug for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpec").field("support", &self.support).field("atoms", &self.atoms).finish_non_exhaustive()
    }
}

pub fn measure_of(f: &Family) -> Result<MeasureSpec> {
    f.validate()?;
    let family = f.clone();
    Ok(MeasureSpec { density: Arc::new(move |x| family.density(x)), support: f.support(), atoms: f.atoms() })
}

/// Cauchy transform `G(z) = ∫ dμ(x) / (z − x)`.
pub fn cauchy_eval(f: &Family, z: Complex64) -> Result<Complex64> {
    f.validate()?;
    if z.im == 0.0 {
        let (lo, hi) = f.support();
        let on_support = lo < hi && (lo..=hi).contains(&z.re);
        if on_support || f.atoms().iter().any(|&(x, _)| x == z.re) {
            return Err(Error::OnSupportError(format!("{} at x = {}", f, z.re)));
        }
    }
    Ok(cauchy_unchecked(f, z))
}

fn cauchy_unchecked(f: &Family, z: Complex64) -> Complex64 {
    let (lo, hi) = f.support();
    match f {
        Family::FreePoisson { lambda } => {
            let l = to_f64(lambda);
            2.0 / (z + 1.0 - l + root_product(z, lo, hi))
        }
        Family::InverseFreePoisson { b } => {
            if z == Complex64::zero() {
                return Complex64::from(-to_f64(b));
            }
            let p = Family::FreePoisson { lambda: b.clone() };
            let w = z.inv();
            w - cauchy_unchecked(&p, w) * w * w
        }
        Family::FreeBetaPrime { a, b } => {
            let (a, b) = (to_f64(a), to_f64(b));
            2.0 * b / ((b + 1.0) * z + 1.0 - a + (b - 1.0) * root_product(z, lo, hi))
        }
        Family::FreeF { a, b } => {
            let c = to_f64(&(a / b));
            let base = Family::FreeBetaPrime { a: a.clone(), b: b.clone() };
            c * cauchy_unchecked(&base, c * z)
        }
        Family::FreeT { m } => {
            let m = to_f64(m);
            2.0 * m / ((m + 1.0) * z + (m - 1.0) * root_product(z, lo, hi))
        }
        Family::FreeBeta { a, b } => {
            let (a, b) = (to_f64(a), to_f64(b));
            2.0 * (a + b - 1.0) / ((a + b - 2.0) * z + 1.0 - a + (a + b) * root_product(z, lo, hi))
        }
        Family::FreeMeixnerStd { theta, tau } => {
            if *tau <= -1.0 {
                (z - theta) / (z * z - theta * z - 1.0)
            } else {
                2.0 * (1.0 + tau) / ((1.0 + 2.0 * tau) * z + theta + root_product(z, lo, hi))
            }
        }
    }
}

/// Atoms of a standardized free Meixner law: zeros of `P + sqrt(D)` among the
/// real roots of `τx² + θx + 1`, with masses given by the residues.
fn meixner_atoms(theta: f64, tau: f64) -> Vec<(f64, f64)> {
    if tau <= -1.0 {
        let d = (theta * theta + 4.0).sqrt();
        return [(theta - d) / 2.0, (theta + d) / 2.0].into_iter().map(|r| (r, (r - theta) / (2.0 * r - theta))).collect();
    }
    let roots: Vec<f64> = if tau == 0.0 {
        if theta == 0.0 {
            vec![]
        } else {
            vec![-1.0 / theta]
        }
    } else {
        let disc = theta * theta - 4.0 * tau;
        if disc < 0.0 {
            vec![]
        } else {
            let s = disc.sqrt();
            vec![(-theta - s) / (2.0 * tau), (-theta + s) / (2.0 * tau)]
        }
    };
    let w = 2.0 * (1.0 + tau).sqrt();
    let (lo, hi) = (theta - w, theta + w);
    roots
        .into_iter()
        .filter(|&x| x < lo || x > hi)
        .filter_map(|x| {
            let z = Complex64::from(x);
            let sq = root_product(z, lo, hi).re;
            let h = (1.0 + 2.0 * tau) * x + theta + sq;
            let scale = 1.0 + x.abs() * (1.0 + 2.0 * tau.abs()) + theta.abs();
            if h.abs() > 1e-9 * scale {
                return None;
            }
            let dh = 1.0 + 2.0 * tau + (x - theta) / sq;
            let mass = 2.0 * (1.0 + tau) / dh;
            (mass > 0.0).then_some((x, mass))
        })
        .collect()
}

/// Exact moments `m_0..m_order` from the closed-form transforms.
pub fn exact_moments(f: &Family, order: usize) -> Result<MomentSequence> {
    f.validate()?;
    match f {
        Family::FreePoisson { lambda } => {
            if order == 0 {
                return MomentSequence::new(vec![Rational::one()]);
            }
            r_to_moments(&FreeCumulants::new(vec![lambda.clone(); order])?, CumulantRoute::Series)
        }
        Family::InverseFreePoisson { .. } => s_to_moments(&s_transform_of(f, order.max(1))?, order),
        Family::FreeBetaPrime { a, b } => fbp_closed_form_moments(a, b, order),
        Family::FreeF { a, b } => {
            let c = b / a;
            let m = fbp_closed_form_moments(a, b, order)?;
            Ok(MomentSequence::from_fn(order, |n| m.get(n) * pow(&c, n)))
        }
        Family::FreeT { m } => {
            let sq = exact_moments(&Family::FreeF { a: Rational::one(), b: m.clone() }, order / 2)?;
            Ok(MomentSequence::from_fn(order, |n| if n % 2 == 1 { Rational::zero() } else { sq.get(n / 2).clone() }))
        }
        Family::FreeBeta { a, b } => free_beta_closed_form_moments(a, b, order),
        Family::FreeMeixnerStd { .. } => Err(Error::UnsupportedFamily("free Meixner moments are not exact rationals".into())),
    }
}

fn linear(c0: Rational, c1: Rational, order: usize) -> PowerSeries {
    PowerSeries::from_coeffs(vec![c0, c1], order)
}

/// Expands `M(w) = [(b+1) + (1−a)w − sqrt(((b−1) − (1+a)w)² − 4aw(w+1))] / (2(1+w))`.
pub fn fbp_closed_form_moments(a: &Rational, b: &Rational, order: usize) -> Result<MomentSequence> {
    fbp_stu(a, b)?;
    let one = Rational::one();
    let lin = linear(b - &one, -(&one + a), order);
    let quad = PowerSeries::from_coeffs(vec![Rational::zero(), int(4) * a, int(4) * a], order);
    let root = (&lin * &lin).try_sub(&quad).sqrt()?;
    let numer = linear(b + &one, &one - a, order).try_sub(&root);
    let denom = linear(int(2), int(2), order);
    MomentSequence::new(numer.try_div(&denom)?.into_coeffs())
}

/// Expands `M(w) = [(a+b−2) + (1−a)w − sqrt((a+b)² − 2(ab+a²−a+b)w + (a−1)²w²)] / (2(w−1))`.
pub fn free_beta_closed_form_moments(a: &Rational, b: &Rational, order: usize) -> Result<MomentSequence> {
    let one = Rational::one();
    let s = a + b;
    let q = PowerSeries::from_coeffs(vec![&s * &s, int(-2) * (a * b + a * a - a + b), (a - &one) * (a - &one)], order);
    let numer = linear(&s - int(2), &one - a, order).try_sub(&q.sqrt()?);
    let denom = linear(int(-2), int(2), order);
    MomentSequence::new(numer.try_div(&denom)?.into_coeffs())
}

/// S-transform as a series, for the families on `[0, ∞)` with nonzero mean.
pub fn s_transform_of(f: &Family, order: usize) -> Result<PowerSeries> {
    f.validate()?;
    let one = Rational::one();
    match f {
        Family::FreePoisson { lambda } => linear(lambda.clone(), one, order).recip(),
        Family::InverseFreePoisson { b } => Ok(linear(b - &one, -one, order)),
        Family::FreeBetaPrime { a, b } => linear(b - &one, -one.clone(), order).try_div(&linear(a.clone(), one, order)),
        Family::FreeF { a, b } => {
            let base = s_transform_of(&Family::FreeBetaPrime { a: a.clone(), b: b.clone() }, order)?;
            Ok(base.scale(&(a / b)))
        }
        other => Err(Error::UnsupportedFamily(format!("no S-transform for {other}"))),
    }
}

/// `α_0 = a/(b−1)`, `α_k = (a+b−1)/(b−1)^(k+1)`.
pub fn t_coeffs_of(a: &Rational, b: &Rational, order: usize) -> Result<TCoefficients> {
    let (s, t, u) = fbp_stu(a, b)?;
    let mut alphas = vec![s];
    alphas.extend((1..=order).map(|k| &t * pow(&u, k)));
    TCoefficients::new(alphas)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeixnerParams {
    pub theta: f64,
    pub tau: f64,
    /// `θ²` exactly.
    pub theta_squared: Rational,
    /// `τ` exactly.
    pub tau_exact: Rational,
    /// `θ² − 4τ` exactly.
    pub discriminant: Rational,
}

/// Standardizes the free beta prime law to mean 0 and variance 1 and reads off
/// the free Meixner parameters.
pub fn standardize_to_meixner(a: &Rational, b: &Rational) -> Result<MeixnerParams> {
    fbp_stu(a, b)?;
    let one = Rational::one();
    let bm1 = b - &one;
    let c = a * (a + &bm1);
    let theta_squared = pow(&(int(2) * a + &bm1), 2) / (&c * &bm1);
    let tau_exact = bm1.recip();
    let discriminant = &theta_squared - int(4) * &tau_exact;
    debug_assert_eq!(discriminant, &bm1 / &c);
    let theta = (to_f64(&(int(2) * a + &bm1))) / (to_f64(&c) * to_f64(&bm1)).sqrt();
    Ok(MeixnerParams { theta, tau: to_f64(&tau_exact), theta_squared, tau_exact, discriminant })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeixnerClass {
    Semicircle,
    FreePoisson,
    FreeNegativeBinomial,
    FreeGamma,
    PureFreeMeixner,
    FreeBinomial,
}

impl MeixnerClass {
    pub fn label(self) -> &'static str {
        match self {
            MeixnerClass::Semicircle => "semicircle",
            MeixnerClass::FreePoisson => "free Poisson",
            MeixnerClass::FreeNegativeBinomial => "free negative binomial",
            MeixnerClass::FreeGamma => "free gamma",
            MeixnerClass::PureFreeMeixner => "pure free Meixner",
            MeixnerClass::FreeBinomial => "free binomial",
        }
    }

    /// Freely infinitely divisible classes.
    pub fn is_freely_infinitely_divisible(self) -> bool {
        !matches!(self, MeixnerClass::FreeBinomial)
    }
}

impl fmt::Display for MeixnerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify_meixner(theta: f64, tau: f64) -> Result<MeixnerClass> {
    if !(tau >= -1.0) || !theta.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidTau(tau));
    }
    if tau < 0.0 {
        return Ok(MeixnerClass::FreeBinomial);
    }
    if tau == 0.0 {
        return Ok(if theta == 0.0 { MeixnerClass::Semicircle } else { MeixnerClass::FreePoisson });
    }
    let d = theta * theta - 4.0 * tau;
    let tol = 64.0 * f64::EPSILON * (theta * theta).max(4.0 * tau);
    Ok(if d.abs() <= tol {
        MeixnerClass::FreeGamma
    } else if d > 0.0 {
        MeixnerClass::FreeNegativeBinomial
    } else {
        MeixnerClass::PureFreeMeixner
    })
}
