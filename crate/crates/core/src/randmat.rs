//! Random Fisher matrices `S₁ S₂⁻¹` and comparison of their spectra with the
//! free F law.
//!
//! Entries are standard Gaussians drawn from a ChaCha20 stream seeded by
//! `seed`; a singular `S₂` is retried on streams 1 and 2 of the same seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analysis::cdf_sorted;
use crate::distributions::{measure_of, Family};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherSampleConfig {
    pub p: usize,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
}

impl FisherSampleConfig {
    pub fn new(p: usize, a: f64, b: f64, seed: u64) -> Result<Self> {
        let cfg = Self { p, a, b, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sample size of the numerator, `round(a·p)`.
    pub fn n1(&self) -> usize {
        (self.a * self.p as f64).round() as usize
    }

    /// Sample size of the denominator, `round(b·p)`.
    pub fn n2(&self) -> usize {
        (self.b * self.p as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if !(self.a > 0.0) || !(self.b > 1.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidConfig(format!("need a > 0 and b > 1, got a = {}, b = {}", self.a, self.b)));
        }
        if self.n1() == 0 || self.n2() <= self.p {
            return Err(Error::InvalidConfig(format!(
                "sample sizes n1 = {}, n2 = {} too small for p = {}",
                self.n1(),
                self.n2(),
                self.p
            )));
        }
        Ok(())
    }
}

/// Dense row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "expected {n}x{n} entries");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}

/// `(1/n) X Xᵀ` for a `p × n` row-major data matrix.
fn sample_covariance(x: &[f64], p: usize, n: usize) -> SquareMatrix {
    let mut s = SquareMatrix::zeros(p);
    s.data.par_chunks_mut(p).enumerate().for_each(|(i, out)| {
        let xi = &x[i * n..(i + 1) * n];
        for (j, o) in out.iter_mut().enumerate().take(i + 1) {
            let xj = &x[j * n..(j + 1) * n];
            *o = xi.iter().zip(xj).map(|(u, v)| u * v).sum::<f64>() / n as f64;
        }
    });
    for i in 0..p {
        for j in 0..i {
            let v = s.get(i, j);
            s.set(j, i, v);
        }
    }
    s
}

/// Lower-triangular `L` with `L Lᵀ = a`, or `None` when `a` is not positive definite.
pub fn cholesky(a: &SquareMatrix) -> Option<SquareMatrix> {
    let n = a.n;
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l.set(j, j, d);
        for i in j + 1..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / d);
        }
    }
    Some(l)
}

/// `L⁻¹ B` by forward substitution, column by column.
fn forward_solve(l: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    let n = l.n;
    let mut y = b.clone();
    for i in 0..n {
        let (done, rest) = y.data.split_at_mut(i * n);
        let yi = &mut rest[..n];
        for k in 0..i {
            let lik = l.get(i, k);
            if lik != 0.0 {
                let yk = &done[k * n..(k + 1) * n];
                for (a, b) in yi.iter_mut().zip(yk) {
                    *a -= lik * b;
                }
            }
        }
        let d = l.get(i, i);
        for a in yi.iter_mut() {
            *a /= d;
        }
    }
    y
}

/// Eigenvalues of a symmetric matrix (lower triangle is read), ascending.
/// Householder reduction to tridiagonal form followed by implicit QL.
pub fn symmetric_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let n = m.n;
    if n == 0 {
        return Vec::new();
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, &mut d, &mut e);
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(f64::total_cmp);
    d
}

fn tridiagonalize(a: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = a.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = a[i][..=l].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j][k] * a[i][k];
                    }
                    for k in j + 1..=l {
                        g += a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i][j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] -= f * e[k] + g * a[i][k];
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i][i];
    }
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

fn gaussian_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> Vec<f64> {
    (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Eigenvalues of `S₁ S₂⁻¹`, ascending, computed as those of `L⁻¹ S₁ L⁻ᵀ`
/// with `S₂ = L Lᵀ`.
pub fn sample_fisher_spectrum(cfg: &FisherSampleConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let (p, n1, n2) = (cfg.p, cfg.n1(), cfg.n2());
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    for attempt in 0..MAX_ATTEMPTS {
        rng.set_stream(attempt);
        rng.set_word_pos(0);
        let x1 = gaussian_matrix(&mut rng, p, n1);
        let x2 = gaussian_matrix(&mut rng, p, n2);
        let s1 = sample_covariance(&x1, p, n1);
        let s2 = sample_covariance(&x2, p, n2);
        let Some(l) = cholesky(&s2) else { continue };
        let y = forward_solve(&l, &s1);
        let c = forward_solve(&l, &y.transpose());
        let mut sym = SquareMatrix::zeros(p);
        for i in 0..p {
            for j in 0..p {
                sym.set(i, j, 0.5 * (c.get(i, j) + c.get(j, i)));
            }
        }
        return Ok(symmetric_eigenvalues(&sym));
    }
    Err(Error::SingularCovariance(MAX_ATTEMPTS as usize))
}

/// Spectrum rescaled by `n₁/n₂`, which approximates the free beta prime law.
pub fn sample_fbp_spectrum(cfg: &FisherSampleConfig) -> Result<Vec<f64>> {
    let ratio = cfg.n1() as f64 / cfg.n2() as f64;
    Ok(sample_fisher_spectrum(cfg)?.into_iter().map(|x| x * ratio).collect())
}

/// Independent samples in parallel, in the order of `cfgs`.
pub fn sample_many(cfgs: &[FisherSampleConfig]) -> Vec<Result<Vec<f64>>> {
    cfgs.par_iter().map(sample_fisher_spectrum).collect()
}

/// Kolmogorov–Smirnov distance between the empirical distribution of `eigs`
/// and the law `f` (continuous part plus atoms).
pub fn ks_distance(eigs: &[f64], f: &Family) -> Result<f64> {
    if eigs.is_empty() {
        return Err(Error::EmptySample);
    }
    let spec = measure_of(f)?;
    let mut xs = eigs.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut distinct: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        match distinct.last_mut() {
            Some((v, _, hi)) if *v == x => *hi = i + 1,
            _ => distinct.push((x, i, i + 1)),
        }
    }
    let points: Vec<f64> = distinct.iter().map(|d| d.0).collect();
    let cdf = cdf_sorted(&spec, &points)?;
    let mut worst: f64 = 0.0;
    for ((x, before, upto), fx) in distinct.into_iter().zip(cdf) {
        let jump: f64 = spec.atoms.iter().filter(|&&(a, _)| a == x).map(|&(_, m)| m).sum();
        worst = worst.max((fx - upto as f64 / n).abs()).max((fx - jump - before as f64 / n).abs());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub empirical_density: f64,
    /// Mass the law assigns to the bin divided by its width (atoms included).
    pub theoretical_density: f64,
}

/// Equal-width histogram of `eigs` over the hull of the sample and the support of `f`.
pub fn histogram(eigs: &[f64], f: &Family, bins: usize) -> Result<Vec<HistogramBin>> {
    if eigs.is_empty() {
        return Err(Error::EmptySample);
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("need at least one bin".into()));
    }
    let spec = measure_of(f)?;
    let lo = eigs.iter().copied().fold(spec.support.0, f64::min);
    let hi = eigs.iter().copied().fold(spec.support.1, f64::max);
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| if k == bins { hi } else { lo + width * k as f64 }).collect();
    let cdf = cdf_sorted(&spec, &edges)?;
    let mut counts = vec![0usize; bins];
    for &x in eigs {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = eigs.len() as f64;
    Ok((0..bins)
        .map(|k| {
            let below = if k == 0 { 0.0 } else { cdf[k] };
            HistogramBin {
                left: edges[k],
                right: edges[k + 1],
                empirical_density: counts[k] as f64 / (n * width),
                theoretical_density: (cdf[k + 1] - below) / width,
            }
        })
        .collect())
}

/// [`histogram`] as CSV with columns
/// `bin_left,bin_right,empirical_density,theoretical_density`.
pub fn histogram_csv(eigs: &[f64], f: &Family, bins: usize) -> Result<String> {
    let mut out = String::from("bin_left,bin_right,empirical_density,theoretical_density\n");
    for b in histogram(eigs, f, bins)? {
        out.push_str(&format!("{},{},{},{}\n", b.left, b.right, b.empirical_density, b.theoretical_density));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::cdf;
    use crate::rational::int;
    use nalgebra::DMatrix;

    fn random_symmetric(n: usize, seed: u64) -> SquareMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let g = gaussian_matrix(&mut rng, n, n);
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, g[i * n + j] + g[j * n + i]);
            }
        }
        m
    }

    #[test]
    fn eigenvalues_match_nalgebra() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (40, 4), (120, 5)] {
            let m = random_symmetric(n, seed);
            let ours = symmetric_eigenvalues(&m);
            let na = DMatrix::from_row_slice(n, n, &m.data);
            let mut theirs: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()), "n = {n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn eigenvalues_with_repeats_and_diagonal() {
        let m = SquareMatrix::from_rows(3, vec![2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(symmetric_eigenvalues(&m), vec![-1.0, 2.0, 2.0]);
        assert!(symmetric_eigenvalues(&SquareMatrix::zeros(0)).is_empty());
    }

    #[test]
    fn cholesky_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let x = gaussian_matrix(&mut rng, 6, 30);
        let s = sample_covariance(&x, 6, 30);
        let l = cholesky(&s).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let v: f64 = (0..6).map(|k| l.get(i, k) * l.get(j, k)).sum();
                assert!((v - s.get(i, j)).abs() < 1e-12);
            }
        }
        let na = DMatrix::from_row_slice(6, 6, &s.data).cholesky().unwrap();
        assert!((na.l()[(5, 3)] - l.get(5, 3)).abs() < 1e-12);
        let singular = SquareMatrix::from_rows(2, vec![1.0, 1.0, 1.0, 1.0]);
        assert!(cholesky(&singular).is_none());
    }

    #[test]
    fn generalized_problem_matches_nalgebra() {
        let cfg = FisherSampleConfig::new(30, 2.0, 3.0, 5).unwrap();
        let ours = sample_fisher_spectrum(&cfg).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        rng.set_stream(0);
        let x1 = gaussian_matrix(&mut rng, 30, 60);
        let x2 = gaussian_matrix(&mut rng, 30, 90);
        let s1 = DMatrix::from_row_slice(30, 30, &sample_covariance(&x1, 30, 60).data);
        let s2 = DMatrix::from_row_slice(30, 30, &sample_covariance(&x2, 30, 90).data);
        let f = s1 * s2.try_inverse().unwrap();
        let mut theirs: Vec<f64> = f.complex_eigenvalues().iter().map(|z| z.re).collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-8 * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(FisherSampleConfig::new(0, 2.0, 3.0, 1).is_err());
        assert!(FisherSampleConfig::new(10, 2.0, 1.0, 1).is_err());
        assert!(FisherSampleConfig::new(10, -1.0, 3.0, 1).is_err());
        let cfg = FisherSampleConfig::new(500, 2.0, 3.0, 42).unwrap();
        assert_eq!((cfg.n1(), cfg.n2()), (1000, 1500));
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = FisherSampleConfig::new(40, 2.0, 3.0, 17).unwrap();
        let a = sample_fisher_spectrum(&cfg).unwrap();
        let b = sample_fisher_spectrum(&cfg).unwrap();
        assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        let c = sample_fisher_spectrum(&FisherSampleConfig { seed: 18, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn law_of_large_numbers_in_two_dimensions() {
        let cfg = FisherSampleConfig::new(2, 500_000.0, 500_000.0, 3).unwrap();
        assert_eq!(cfg.n1(), 1_000_000);
        for x in sample_fisher_spectrum(&cfg).unwrap() {
            assert!((x - 1.0).abs() < 0.02, "{x}");
        }
    }

    #[test]
    fn one_dimensional_classical_f() {
        let cfgs: Vec<FisherSampleConfig> = (0..4000).map(|s| FisherSampleConfig::new(1, 20.0, 20.0, s).unwrap()).collect();
        let mean = sample_many(&cfgs).into_iter().map(|r| r.unwrap()[0]).sum::<f64>() / 4000.0;
        assert!((mean - 20.0 / 18.0).abs() < 0.04, "{mean}");
    }

    #[test]
    fn spectrum_within_support_and_close_in_ks() {
        let f = Family::free_f(int(2), int(3)).unwrap();
        let (lo, hi) = f.support();
        let cfg = FisherSampleConfig::new(500, 2.0, 3.0, 42).unwrap();
        let eigs = sample_fisher_spectrum(&cfg).unwrap();
        assert_eq!(eigs.len(), 500);
        assert!(eigs.iter().all(|&x| x >= lo - 0.3 && x <= hi + 0.3));
        assert!(ks_distance(&eigs, &f).unwrap() < 0.08);
        let mean = eigs.iter().sum::<f64>() / 500.0;
        assert!((mean - 1.5).abs() < 0.05);
        let fbp = sample_fbp_spectrum(&cfg).unwrap();
        assert!((fbp.iter().sum::<f64>() / 500.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn ks_of_inverse_sample_is_small() {
        let f = Family::free_beta_prime(int(2), int(3)).unwrap();
        let spec = measure_of(&f).unwrap();
        let (lo, hi) = spec.support;
        let grid: Vec<f64> = (0..=4000).map(|k| lo + (hi - lo) * (k as f64 / 4000.0)).collect();
        let table = cdf_sorted(&spec, &grid).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let sample: Vec<f64> = (0..10_000)
            .map(|_| {
                let u: f64 = rng.random();
                let k = table.partition_point(|&c| c < u).clamp(1, grid.len() - 1);
                let t = (u - table[k - 1]) / (table[k] - table[k - 1]);
                grid[k - 1] + t * (grid[k] - grid[k - 1])
            })
            .collect();
        let d = ks_distance(&sample, &f).unwrap();
        assert!(d < 0.02, "{d}");
        assert!(matches!(ks_distance(&[], &f), Err(Error::EmptySample)));
    }

    #[test]
    fn ks_handles_atoms_and_ties() {
        let f = Family::free_beta_prime(crate::rational::rat(1, 2), int(2)).unwrap();
        let spec = measure_of(&f).unwrap();
        let zeros = vec![0.0; 10];
        // All mass of the sample sits on the atom of size 1/2.
        let d = ks_distance(&zeros, &f).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!((cdf(&spec, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn histogram_layout() {
        let f = Family::free_f(int(2), int(3)).unwrap();
        let cfg = FisherSampleConfig::new(100, 2.0, 3.0, 1).unwrap();
        let eigs = sample_fisher_spectrum(&cfg).unwrap();
        let csv = histogram_csv(&eigs, &f, 20).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "bin_left,bin_right,empirical_density,theoretical_density");
        assert_eq!(lines.len(), 21);
        let mass: f64 = lines[1..]
            .iter()
            .map(|l| {
                let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
                (v[1] - v[0]) * v[3]
            })
            .sum();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ks_trend_in_dimension() {
        let f = Family::free_f(int(2), int(3)).unwrap();
        let median_ks = |p: usize| {
            let cfgs: Vec<_> = (0..5).map(|s| FisherSampleConfig::new(p, 2.0, 3.0, 1000 + s).unwrap()).collect();
            let mut ks: Vec<f64> = sample_many(&cfgs).into_iter().map(|e| ks_distance(&e.unwrap(), &f).unwrap()).collect();
            ks.sort_by(f64::total_cmp);
            ks[2]
        };
        let (k100, k250, k500) = (median_ks(100), median_ks(250), median_ks(500));
        assert!(k100 >= k250 && k250 >= k500, "{k100} {k250} {k500}");
    }
}
