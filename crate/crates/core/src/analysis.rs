//! Numerical measure-level checks: Stieltjes inversion, free score functions,
//! atom recovery, quadrature moments and the free T density limits.

use num_complex::Complex64;

use crate::distributions::{cauchy_eval, Family, MeasureSpec};
use crate::error::{Error, Result};
use crate::rational::{int, rat, to_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extrapolation {
    None,
    Richardson,
}

/// Decreasing offsets used to approach the real axis.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonLadder {
    values: Vec<f64>,
    extrapolation: Extrapolation,
}

impl Default for EpsilonLadder {
    fn default() -> Self {
        Self { values: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6], extrapolation: Extrapolation::Richardson }
    }
}

impl EpsilonLadder {
    pub fn new(values: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidLadder("empty ladder".into()));
        }
        if values.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidLadder("offsets must be positive and finite".into()));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidLadder("offsets must be strictly decreasing".into()));
        }
        Ok(Self { values, extrapolation })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    /// Limit as the offset goes to zero of `g(ε)`, using only offsets below
    /// `radius / 4` when at least two of them remain.
    pub fn limit(&self, radius: f64, g: impl Fn(f64) -> Complex64) -> Complex64 {
        let mut eps: Vec<f64> = self.values.iter().copied().filter(|&e| e < radius / 4.0).collect();
        if eps.len() < 2 {
            eps = self.values[self.values.len().saturating_sub(2)..].to_vec();
        }
        let vals: Vec<Complex64> = eps.iter().map(|&e| g(e)).collect();
        match self.extrapolation {
            Extrapolation::None => *vals.last().unwrap(),
            Extrapolation::Richardson => neville_at_zero(&eps, &vals),
        }
    }
}

/// Value at 0 of the interpolating polynomial through `(x_i, y_i)`.
fn neville_at_zero(x: &[f64], y: &[Complex64]) -> Complex64 {
    let mut p = y.to_vec();
    let n = x.len();
    for k in 1..n {
        for i in 0..n - k {
            let j = i + k;
            p[i] = (p[i + 1] * x[i] - p[i] * x[j]) / (x[i] - x[j]);
        }
    }
    p[0]
}

/// Distance from `x` to the nearest support endpoint or atom.
fn singular_distance(f: &Family, x: f64) -> f64 {
    let (lo, hi) = f.support();
    f.atoms().iter().map(|&(a, _)| (x - a).abs()).fold((x - lo).min(hi - x), f64::min)
}

fn interior(f: &Family, x: f64) -> Result<()> {
    let (lo, hi) = f.support();
    if x > lo && x < hi {
        Ok(())
    } else {
        Err(Error::OutsideSupport(x))
    }
}

fn boundary_value(f: &Family, x: f64, ladder: &EpsilonLadder) -> Result<Complex64> {
    interior(f, x)?;
    f.validate()?;
    Ok(ladder.limit(singular_distance(f, x), |e| cauchy_eval(f, Complex64::new(x, e)).expect("off the real axis")))
}

/// `−(1/π) lim Im G(x + iε)`.
pub fn stieltjes_density(f: &Family, x: f64, ladder: &EpsilonLadder) -> Result<f64> {
    Ok(-boundary_value(f, x, ladder)?.im / std::f64::consts::PI)
}

/// Free score function `2 lim Re G(x + iε)`.
pub fn hilbert_score(f: &Family, x: f64, ladder: &EpsilonLadder) -> Result<f64> {
    Ok(2.0 * boundary_value(f, x, ladder)?.re)
}

/// Derivative of the classical potential whose free counterpart is `f`.
pub fn potential_derivative(f: &Family, x: f64) -> Result<f64> {
    f.validate()?;
    match f {
        Family::FreeBetaPrime { a, b } => {
            if !(x > 0.0) {
                return Err(Error::OutsideDomain(x));
            }
            let (a, b) = (to_f64(a), to_f64(b));
            Ok(((b + 1.0) * x + 1.0 - a) / (x * (1.0 + x)))
        }
        Family::FreeT { m } => {
            if !x.is_finite() {
                return Err(Error::OutsideDomain(x));
            }
            let m = to_f64(m);
            Ok((m + 1.0) * x / (m + x * x))
        }
        Family::FreeBeta { a, b } => {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::OutsideDomain(x));
            }
            let (a, b) = (to_f64(a), to_f64(b));
            Ok(((a + b - 2.0) * x + 1.0 - a) / (x * (1.0 - x)))
        }
        other => Err(Error::UnsupportedFamily(format!("no classical potential for {other}"))),
    }
}

/// Numerically recovered atoms: `lim y·|G(x₀ + iy)|` at the candidate poles
/// 0, 1, −1 and the closed-form atom locations, outside the support.
pub fn atom_masses(f: &Family, ladder: &EpsilonLadder) -> Result<Vec<(f64, f64)>> {
    f.validate()?;
    let (lo, hi) = f.support();
    let mut candidates = vec![-1.0, 0.0, 1.0];
    candidates.extend(f.atoms().iter().map(|&(x, _)| x));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut out = Vec::new();
    for x0 in candidates {
        if lo < hi && (lo..=hi).contains(&x0) {
            continue;
        }
        let radius = if lo < hi { (x0 - lo).abs().min((x0 - hi).abs()) } else { 1.0 };
        let mass =
            ladder.limit(radius, |y| Complex64::from(y * cauchy_eval(f, Complex64::new(x0, y)).expect("off axis").norm())).re;
        if mass > 1e-8 {
            out.push((x0, mass));
        }
    }
    Ok(out)
}

/// Adaptive Gauss–Kronrod settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_depth: 40 }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive G7K15 integration of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: QuadConfig) -> Result<f64> {
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        let tol = cfg.abs_tol.max(1e-14 * val.abs());
        if err <= tol {
            total += val;
            continue;
        }
        if depth >= cfg.max_depth || !err.is_finite() {
            worst = worst.max(err);
            total += val;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, depth + 1));
        stack.push((mid, hi, depth + 1));
    }
    if worst > 0.0 || !total.is_finite() {
        return Err(Error::QuadratureFailure { tol: cfg.abs_tol, err: worst });
    }
    Ok(total)
}

/// `∫_lo^x g(t) density(t) dt` with `t = lo + (hi − lo) sin²θ`.
fn edge_integral(spec: &MeasureSpec, g: impl Fn(f64) -> f64, x: f64, cfg: QuadConfig) -> Result<f64> {
    let (lo, hi) = spec.support;
    if !(hi > lo) || x <= lo {
        return Ok(0.0);
    }
    let w = hi - lo;
    let top = ((x.min(hi) - lo) / w).sqrt().asin();
    let d = &spec.density;
    integrate(
        |th| {
            let s = th.sin();
            let t = lo + w * s * s;
            g(t) * d(t) * w * (2.0 * th).sin()
        },
        0.0,
        top,
        cfg,
    )
}

/// `∫ xⁿ dμ` over the continuous part plus the atoms.
pub fn quadrature_moment(spec: &MeasureSpec, n: usize) -> Result<f64> {
    quadrature_moment_with(spec, n, QuadConfig::default())
}

pub fn quadrature_moment_with(spec: &MeasureSpec, n: usize, cfg: QuadConfig) -> Result<f64> {
    if n > 10 {
        return Err(Error::SizeLimitExceeded { n, limit: 10 });
    }
    let k = n as i32;
    let cont = edge_integral(spec, |t| t.powi(k), spec.support.1, cfg)?;
    Ok(cont + spec.atoms.iter().map(|&(x, m)| m * x.powi(k)).sum::<f64>())
}

/// Distribution function `μ((−∞, x])`.
pub fn cdf(spec: &MeasureSpec, x: f64) -> Result<f64> {
    let cont = edge_integral(spec, |_| 1.0, x, QuadConfig::default())?;
    Ok(cont + spec.atoms.iter().filter(|&&(a, _)| a <= x).map(|&(_, m)| m).sum::<f64>())
}

/// `cdf` at every point of a non-decreasing slice, integrating only between
/// consecutive points.
pub fn cdf_sorted(spec: &MeasureSpec, xs: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = spec.support;
    let w = hi - lo;
    let d = &spec.density;
    let theta = |x: f64| {
        if !(w > 0.0) || x <= lo {
            0.0
        } else {
            ((x.min(hi) - lo) / w).sqrt().asin()
        }
    };
    let mut out = Vec::with_capacity(xs.len());
    let (mut prev, mut cont) = (0.0, 0.0);
    for &x in xs {
        let th = theta(x);
        if th > prev {
            cont += integrate(
                |t| {
                    let s = t.sin();
                    d(lo + w * s * s) * w * (2.0 * t).sin()
                },
                prev,
                th,
                QuadConfig::default(),
            )?;
            prev = th;
        }
        out.push(cont + spec.atoms.iter().filter(|&&(a, _)| a <= x).map(|&(_, m)| m).sum::<f64>());
    }
    Ok(out)
}

/// Sup-norm distances of the free T density from its two limits.
#[derive(Clone, Debug, PartialEq)]
pub struct TLimitReport {
    pub m_large: f64,
    pub semicircle_distance: f64,
    pub m_near_one: f64,
    pub cauchy_distance: f64,
}

pub fn semicircle_density(x: f64) -> f64 {
    (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
}

pub fn cauchy_density(x: f64) -> f64 {
    1.0 / (std::f64::consts::PI * (1.0 + x * x))
}

pub fn t_density_limits(x_grid: &[f64]) -> Result<TLimitReport> {
    let large = int(10_000);
    let near_one = int(1) + rat(1, 1_000_000);
    let t_large = Family::free_t(large.clone())?;
    let t_near = Family::free_t(near_one.clone())?;
    let sup = |f: &dyn Fn(f64) -> f64| x_grid.iter().map(|&x| f(x)).fold(0.0, f64::max);
    Ok(TLimitReport {
        m_large: to_f64(&large),
        semicircle_distance: sup(&|x| (t_large.density(x) - semicircle_density(x)).abs()),
        m_near_one: to_f64(&near_one),
        cauchy_distance: sup(&|x| (t_near.density(x) - cauchy_density(x)).abs()),
    })
}
