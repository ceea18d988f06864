//! Moment sequences and their transforms as truncated series.
//!
//! Conventions: `M(z) = Σ m_n z^n`, `Φ(z) = M(z) − 1`, the R-series
//! `𝓡(z) = Σ_{n≥1} r_n z^n` (so `M(z) = 1 + 𝓡(z M(z))`), `S(z)` with
//! `Φ(z S(z)/(1+z)) = z`, and `T = 1/S`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ncl::{block_size_counts, Rule};
use crate::rational::Rational;
use crate::series::PowerSeries;

/// Moments `m_0 = 1, m_1, …, m_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSequence {
    moments: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(moments: Vec<Rational>) -> Result<Self> {
        match moments.first() {
            Some(m0) if m0.is_one() => Ok(Self { moments }),
            _ => Err(Error::InvalidMomentSequence),
        }
    }

    /// Builds `1, f(1), …, f(order)`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize) -> Rational) -> Self {
        let mut moments = vec![Rational::one()];
        moments.extend((1..=order).map(&mut f));
        Self { moments }
    }

    /// Point mass at `c`.
    pub fn dirac(c: &Rational, order: usize) -> Self {
        Self { moments: PowerSeries::geometric(c, order).into_coeffs() }
    }

    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[Rational] {
        &self.moments
    }

    pub fn get(&self, n: usize) -> &Rational {
        &self.moments[n]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { moments: self.moments[..=order.min(self.order())].to_vec() }
    }

    /// `M(z)` as a series of the same order.
    pub fn to_series(&self) -> PowerSeries {
        PowerSeries::new(self.moments.clone())
    }

    fn from_series(m: PowerSeries) -> Result<Self> {
        Self::new(m.into_coeffs())
    }
}

/// Free cumulants: slot `k` holds `r_(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCumulants {
    cumulants: Vec<Rational>,
}

impl FreeCumulants {
    pub fn new(cumulants: Vec<Rational>) -> Result<Self> {
        if cumulants.is_empty() {
            return Err(Error::InsufficientOrder { got: 0, need: 1 });
        }
        Ok(Self { cumulants })
    }

    pub fn order(&self) -> usize {
        self.cumulants.len() - 1
    }

    pub fn cumulants(&self) -> &[Rational] {
        &self.cumulants
    }

    /// `r_n` for `n ≥ 1`.
    pub fn r(&self, n: usize) -> &Rational {
        &self.cumulants[n - 1]
    }

    /// `𝓡(z) = Σ r_n z^n`, of order equal to the number of cumulants.
    fn r_series(&self) -> PowerSeries {
        let mut c = vec![Rational::zero()];
        c.extend(self.cumulants.iter().cloned());
        PowerSeries::new(c)
    }
}

/// Coefficients of `T(z) = Σ α_k z^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TCoefficients {
    alphas: Vec<Rational>,
}

impl TCoefficients {
    pub fn new(alphas: Vec<Rational>) -> Result<Self> {
        match alphas.first() {
            Some(a0) if !a0.is_zero() => Ok(Self { alphas }),
            _ => Err(Error::InvalidParameters("T-coefficients need a nonzero constant term".into())),
        }
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    pub fn order(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn to_series(&self) -> PowerSeries {
        PowerSeries::new(self.alphas.clone())
    }

    /// `S = 1/T`.
    pub fn to_s(&self) -> PowerSeries {
        self.to_series().recip().expect("constant term checked at construction")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CumulantRoute {
    /// Reversion of `y / (1 + 𝓡(y))`.
    Series,
    /// Moment–cumulant formula summed over enumerated non-crossing partitions.
    NcSum,
}

/// `Φ(z) = Σ_{n≥1} m_n z^n`.
pub fn moments_to_phi(m: &MomentSequence) -> PowerSeries {
    let mut c = m.moments.clone();
    c[0] = Rational::zero();
    PowerSeries::new(c)
}

pub fn moments_to_r(m: &MomentSequence) -> Result<FreeCumulants> {
    let n = m.order();
    if n < 1 {
        return Err(Error::InsufficientOrder { got: n, need: 1 });
    }
    // f = z M(z); its inverse is y / (1 + 𝓡(y)).
    let f = m.to_series().shift_up(1);
    let h = f.reversion()?.shift_down(1)?;
    let r = h.recip()?;
    FreeCumulants::new(r.coeffs()[1..].to_vec())
}

pub fn r_to_moments(r: &FreeCumulants, route: CumulantRoute) -> Result<MomentSequence> {
    let order = r.cumulants.len();
    match route {
        CumulantRoute::Series => {
            let one_plus = r.r_series().try_add(&PowerSeries::one(order));
            let q = one_plus.recip()?.shift_up(1);
            MomentSequence::from_series(q.reversion()?.shift_down(1)?)
        }
        CumulantRoute::NcSum => {
            let mut moments = vec![Rational::one()];
            for n in 1..=order {
                let counts = block_size_counts(n, Rule::NonCrossing)?;
                let m: Rational = counts
                    .iter()
                    .map(|(sizes, &c)| sizes.iter().fold(Rational::from_integer(c.into()), |acc, &s| acc * r.r(s)))
                    .sum();
                moments.push(m);
            }
            MomentSequence::new(moments)
        }
    }
}

/// `S(z) = ((1+z)/z) Φ^{⟨−1⟩}(z)`, of order one less than the moments.
pub fn moments_to_s(m: &MomentSequence) -> Result<PowerSeries> {
    let n = m.order();
    if n < 1 {
        return Err(Error::InsufficientOrder { got: n, need: 1 });
    }
    if m.get(1).is_zero() {
        return Err(Error::ZeroMeanError);
    }
    let inv = moments_to_phi(m).reversion()?.shift_down(1)?;
    let one_plus_z = PowerSeries::from_coeffs(vec![Rational::one(), Rational::one()], inv.order());
    Ok(&one_plus_z * &inv)
}

/// Moments up to `order` from `S`, which must have order at least `order − 1`.
pub fn s_to_moments(s: &PowerSeries, order: usize) -> Result<MomentSequence> {
    if s.coeff(0).is_zero() {
        return Err(Error::ZeroConstantS);
    }
    if order == 0 {
        return MomentSequence::new(vec![Rational::one()]);
    }
    if s.order() + 1 < order {
        return Err(Error::InsufficientOrder { got: s.order() + 1, need: order });
    }
    let s = s.truncate(order - 1);
    let one_plus_z = PowerSeries::from_coeffs(vec![Rational::one(), Rational::one()], order);
    let phi_inv = s.shift_up(1).try_div(&one_plus_z)?;
    let mut phi = phi_inv.reversion()?.into_coeffs();
    phi[0] = Rational::one();
    MomentSequence::new(phi)
}

pub fn s_to_t(s: &PowerSeries) -> Result<TCoefficients> {
    if s.coeff(0).is_zero() {
        return Err(Error::ZeroConstantS);
    }
    TCoefficients::new(s.recip()?.into_coeffs())
}

pub fn free_add_convolve(ma: &MomentSequence, mb: &MomentSequence) -> Result<MomentSequence> {
    if ma.order() != mb.order() {
        return Err(Error::OrderMismatch(ma.order(), mb.order()));
    }
    if ma.order() == 0 {
        return Ok(ma.clone());
    }
    let (ra, rb) = (moments_to_r(ma)?, moments_to_r(mb)?);
    let sum = ra.cumulants.iter().zip(&rb.cumulants).map(|(x, y)| x + y).collect();
    r_to_moments(&FreeCumulants::new(sum)?, CumulantRoute::Series)
}

pub fn free_mult_convolve(ma: &MomentSequence, mb: &MomentSequence) -> Result<MomentSequence> {
    if ma.order() != mb.order() {
        return Err(Error::OrderMismatch(ma.order(), mb.order()));
    }
    if ma.order() == 0 {
        return Ok(ma.clone());
    }
    let s = &moments_to_s(ma)? * &moments_to_s(mb)?;
    s_to_moments(&s, ma.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pow, rat};
    use proptest::prelude::*;

    fn free_poisson(lambda: &Rational, order: usize) -> MomentSequence {
        let r = FreeCumulants::new(vec![lambda.clone(); order]).unwrap();
        r_to_moments(&r, CumulantRoute::Series).unwrap()
    }

    #[test]
    fn phi_examples() {
        let phi = moments_to_phi(&MomentSequence::dirac(&int(1), 4));
        assert_eq!(phi.coeffs(), &[int(0), int(1), int(1), int(1), int(1)]);
        let phi = moments_to_phi(&free_poisson(&int(1), 4));
        assert_eq!(phi.coeffs(), &[int(0), int(1), int(2), int(5), int(14)]);
        assert!(moments_to_phi(&MomentSequence::dirac(&int(0), 4)).is_zero());
    }

    #[test]
    fn cumulant_examples() {
        let semi = FreeCumulants::new(vec![int(0), int(1), int(0), int(0), int(0), int(0)]).unwrap();
        for route in [CumulantRoute::Series, CumulantRoute::NcSum] {
            let m = r_to_moments(&semi, route).unwrap();
            assert_eq!(m.moments(), &[int(1), int(0), int(1), int(0), int(2), int(0), int(5)]);
        }
        let l = rat(3, 7);
        let m = free_poisson(&l, 2);
        assert_eq!(m.get(1), &l);
        assert_eq!(m.get(2), &(&l * &l + &l));
        let c = rat(-2, 5);
        let mut r = vec![int(0); 5];
        r[0] = c.clone();
        let m = r_to_moments(&FreeCumulants::new(r).unwrap(), CumulantRoute::NcSum).unwrap();
        assert_eq!(m, MomentSequence::dirac(&c, 5));
        assert!(moments_to_r(&MomentSequence::dirac(&c, 0)).is_err());
    }

    #[test]
    fn s_examples() {
        let l = rat(5, 3);
        let s = moments_to_s(&free_poisson(&l, 6)).unwrap();
        for k in 0..=5 {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(s.coeff(k), &(sign / pow(&l, k + 1)));
        }
        let c = rat(7, 2);
        let s = moments_to_s(&MomentSequence::dirac(&c, 5)).unwrap();
        assert_eq!(s, PowerSeries::constant(c.recip(), 4));
        assert_eq!(moments_to_s(&MomentSequence::dirac(&int(0), 3)), Err(Error::ZeroMeanError));
    }

    #[test]
    fn inverse_free_poisson_s_transform() {
        let b = int(3);
        let s = PowerSeries::from_coeffs(vec![&b - int(1), int(-1)], 6);
        let m = s_to_moments(&s, 7).unwrap();
        assert_eq!(m.get(1), &rat(1, 2));
        // E[P^-2] = b / (b − 1)^3 for the free Poisson P with parameter b.
        assert_eq!(m.get(2), &(&b / pow(&(&b - int(1)), 3)));
        assert_eq!(moments_to_s(&m).unwrap(), s);
    }

    #[test]
    fn t_examples() {
        let l = rat(2, 9);
        let s = PowerSeries::from_coeffs(vec![l.clone(), int(1)], 5).recip().unwrap();
        assert_eq!(s_to_t(&s).unwrap().alphas(), &[l, int(1), int(0), int(0), int(0), int(0)]);
        let c = rat(4, 3);
        assert_eq!(s_to_t(&PowerSeries::constant(c.recip(), 2)).unwrap().alphas(), &[c, int(0), int(0)]);
        assert_eq!(s_to_t(&PowerSeries::identity(3)), Err(Error::ZeroConstantS));
    }

    #[test]
    fn convolution_examples() {
        let (a, b) = (rat(1, 2), rat(5, 3));
        let sum = free_add_convolve(&free_poisson(&a, 8), &free_poisson(&b, 8)).unwrap();
        assert_eq!(sum, free_poisson(&(&a + &b), 8));
        assert_eq!(sum.get(1), &(&a + &b));
        assert_eq!(sum.get(2), &((&a + &b) * (&a + &b) + &a + &b));
        let m = free_poisson(&a, 6);
        assert_eq!(free_add_convolve(&m, &MomentSequence::dirac(&int(0), 6)).unwrap(), m);
        assert_eq!(free_mult_convolve(&m, &MomentSequence::dirac(&int(1), 6)).unwrap(), m);
        let (c, d) = (rat(-3, 2), rat(2, 7));
        let cd = free_add_convolve(&MomentSequence::dirac(&c, 5), &MomentSequence::dirac(&d, 5)).unwrap();
        assert_eq!(cd, MomentSequence::dirac(&(&c + &d), 5));
        let cd = free_mult_convolve(&MomentSequence::dirac(&c, 5), &MomentSequence::dirac(&d, 5)).unwrap();
        assert_eq!(cd, MomentSequence::dirac(&(&c * &d), 5));
        assert_eq!(
            free_add_convolve(&MomentSequence::dirac(&c, 5), &MomentSequence::dirac(&c, 4)),
            Err(Error::OrderMismatch(5, 4))
        );
    }

    #[test]
    fn nc_route_matches_series_route() {
        let r = FreeCumulants::new((1..=8).map(|k| rat(k * k - 3, k + 1)).collect()).unwrap();
        assert_eq!(r_to_moments(&r, CumulantRoute::Series), r_to_moments(&r, CumulantRoute::NcSum));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q))
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(p, q, neg)| rat(if neg { -p } else { p }, q))
    }

    fn moments_with_mean(order: usize) -> impl Strategy<Value = MomentSequence> {
        (nonzero_rational(), prop::collection::vec(small_rational(), order - 1)).prop_map(|(m1, rest)| {
            let mut m = vec![int(1), m1];
            m.extend(rest);
            MomentSequence::new(m).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn r_round_trip(m in moments_with_mean(6)) {
            let r = moments_to_r(&m).unwrap();
            prop_assert_eq!(&r_to_moments(&r, CumulantRoute::Series).unwrap(), &m);
            prop_assert_eq!(&r_to_moments(&r, CumulantRoute::NcSum).unwrap(), &m);
        }

        #[test]
        fn s_round_trip(m in moments_with_mean(6)) {
            let s = moments_to_s(&m).unwrap();
            prop_assert_eq!(s_to_moments(&s, 6).unwrap(), m);
            let t = s_to_t(&s).unwrap();
            prop_assert_eq!(t.to_s(), s);
        }

        #[test]
        fn additive_convolution_laws(a in moments_with_mean(6), b in moments_with_mean(6), c in moments_with_mean(6)) {
            let ab = free_add_convolve(&a, &b).unwrap();
            prop_assert_eq!(&ab, &free_add_convolve(&b, &a).unwrap());
            let left = free_add_convolve(&ab, &c).unwrap();
            let right = free_add_convolve(&a, &free_add_convolve(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn multiplicative_convolution_laws(a in moments_with_mean(6), b in moments_with_mean(6), c in moments_with_mean(6)) {
            let ab = free_mult_convolve(&a, &b).unwrap();
            prop_assert_eq!(&ab, &free_mult_convolve(&b, &a).unwrap());
            let left = free_mult_convolve(&ab, &c).unwrap();
            let right = free_mult_convolve(&a, &free_mult_convolve(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
