//! Truncated full Fock space models: tridiagonal operators on
//! `span{Ω, ξ, ξ⊗², …, ξ⊗N}` and their vacuum moments.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ncl::{fbp_stu, WeightedMotzkinScheme};
use crate::rational::{int, pow, rational_sqrt, Rational};

/// `X e_k = raise[k] e_(k+1) + diag[k] e_k + lower[k−1] e_(k−1)`, truncated at level `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedFockOperator {
    raise: Vec<Rational>,
    diag: Vec<Rational>,
    lower: Vec<Rational>,
}

impl TruncatedFockOperator {
    /// Operator whose matrix entries are the step weights of `scheme`:
    /// `(k+1, k) = μ_k`, `(k, k) = κ_k`, `(k−1, k) = λ_k`.
    pub fn from_scheme(scheme: &WeightedMotzkinScheme, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("truncation level must be at least 1".into()));
        }
        Ok(Self {
            raise: (0..n).map(|k| scheme.mu(k).clone()).collect(),
            diag: (0..=n).map(|k| scheme.kappa(k).clone()).collect(),
            lower: (1..=n).map(|k| scheme.lambda(k).clone()).collect(),
        })
    }

    /// Truncation level `N`; the dimension is `N + 1`.
    pub fn level(&self) -> usize {
        self.raise.len()
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Matrix entry `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> Rational {
        if row == col + 1 {
            self.raise[col].clone()
        } else if row == col {
            self.diag[row].clone()
        } else if row + 1 == col {
            self.lower[row].clone()
        } else {
            Rational::zero()
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let s = |v: &[Rational]| v.iter().map(|x| x * c).collect();
        Self { raise: s(&self.raise), diag: s(&self.diag), lower: s(&self.lower) }
    }

    fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = &self.diag[i] * &v[i];
                if i > 0 {
                    acc += &self.raise[i - 1] * &v[i - 1];
                }
                if i + 1 < n {
                    acc += &self.lower[i] * &v[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Operator `γ1 + βℓ + ℓ* + (1+α)ℓℓ* + αℓ²ℓ*`, truncated at level `n`.
pub fn build_operator(alpha: &Rational, beta: &Rational, gamma: &Rational, n: usize) -> Result<TruncatedFockOperator> {
    TruncatedFockOperator::from_scheme(&WeightedMotzkinScheme::linked_partitions(alpha, beta, gamma), n)
}

/// `⟨X^k Ω, Ω⟩` for `k = 0..=n_max`, by repeated application to the vacuum.
pub fn vacuum_moments(op: &TruncatedFockOperator, n_max: usize) -> Result<Vec<Rational>> {
    if n_max > op.level() {
        return Err(Error::TruncationTooSmall { n_max, dim_n: op.level() });
    }
    let mut v = vec![Rational::zero(); op.dim()];
    v[0] = Rational::one();
    let mut out = vec![Rational::one()];
    for _ in 0..n_max {
        v = op.apply(&v);
        out.push(v[0].clone());
    }
    Ok(out)
}

/// Free beta prime operator as the dilation by `su` of the general operator
/// at `(α, β, γ) = (t/s, t/(su), 1/u)`.
pub fn fbp_operator(a: &Rational, b: &Rational, n: usize) -> Result<TruncatedFockOperator> {
    let (s, t, u) = fbp_stu(a, b)?;
    let su = &s * &u;
    Ok(build_operator(&(&t / &s), &(&t / &su), &u.recip(), n)?.scaled(&su))
}

/// Free beta prime operator assembled directly from its coefficients
/// `(a/(b−1))1 + ((a+b−1)/(b−1))ℓ + (a/(b−1)²)ℓ* + ((2a+b−1)/(b−1)²)ℓℓ* + ((a+b−1)/(b−1)²)ℓ²ℓ*`.
pub fn fbp_operator_direct(a: &Rational, b: &Rational, n: usize) -> Result<TruncatedFockOperator> {
    fbp_stu(a, b)?;
    if n == 0 {
        return Err(Error::InvalidParameters("truncation level must be at least 1".into()));
    }
    let bm1 = b - Rational::one();
    let c_one = a / &bm1;
    let c_l = (a + &bm1) / &bm1;
    let c_ls = a / pow(&bm1, 2);
    let c_lls = (int(2) * a + &bm1) / pow(&bm1, 2);
    let c_llls = (a + &bm1) / pow(&bm1, 2);
    // ℓℓ* and ℓ²ℓ* vanish on the vacuum.
    let raise = (0..n).map(|k| if k == 0 { c_l.clone() } else { &c_l + &c_llls }).collect();
    let diag = (0..=n).map(|k| if k == 0 { c_one.clone() } else { &c_one + &c_lls }).collect();
    let lower = vec![c_ls; n];
    Ok(TruncatedFockOperator { raise, diag, lower })
}

/// The decomposition `γ1 + √β(ℓ + ℓ*) + ℓℓ* + α(1 + ℓ)ℓℓ*`, available when
/// `β` is the square of a rational.
pub fn decomposed_operator(alpha: &Rational, beta: &Rational, gamma: &Rational, n: usize) -> Result<TruncatedFockOperator> {
    let r = rational_sqrt(beta).ok_or_else(|| Error::NoRationalSquareRoot(format!("beta = {beta} is not a rational square")))?;
    if n == 0 {
        return Err(Error::InvalidParameters("truncation level must be at least 1".into()));
    }
    let one = Rational::one();
    let raise = (0..n).map(|k| if k == 0 { r.clone() } else { &r + alpha }).collect();
    let diag = (0..=n).map(|k| if k == 0 { gamma.clone() } else { &one + alpha + gamma }).collect();
    Ok(TruncatedFockOperator { raise, diag, lower: vec![r; n] })
}
