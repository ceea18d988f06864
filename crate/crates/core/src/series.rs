//! Truncated formal power series with exact rational coefficients.
//!
//! A series of order `N` carries the coefficients of `z^0 .. z^N`; everything
//! beyond is unknown. Binary operations truncate to the smaller order of their
//! operands, so a result never claims more precision than its inputs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, rational_sqrt, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Series from explicit coefficients; the order is `coeffs.len() - 1`.
    ///
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        Self { coeffs }
    }

    /// Series from explicit coefficients, padded with zeros (or cut) to `order`.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// The series `z` (requires `order >= 1` to be meaningful).
    pub fn identity(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    pub fn monomial(c: Rational, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// `1 / (1 - c z)` to the given order.
    pub fn geometric(c: &Rational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut p = Rational::one();
        for _ in 0..=order {
            coeffs.push(p.clone());
            p *= c;
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `z^k`; zero beyond the order is *not* implied, so this panics there.
    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Drops coefficients above `order`. Never extends.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        Self { coeffs: self.coeffs[..keep].to_vec() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplies by `z^k`; the order grows by `k` because the shifted-in
    /// low coefficients are exactly zero.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Divides by `z^k`; the leading `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::DivisionByZeroSeries);
        }
        Ok(Self { coeffs: self.coeffs[k..].to_vec() })
    }

    /// `f(c z)`.
    pub fn dilate(&self, c: &Rational) -> Self {
        let mut p = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|x| {
                let v = x * &p;
                p *= c;
                v
            })
            .collect();
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * Rational::from_integer(k.into())).collect();
        Self { coeffs }
    }

    pub fn try_add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self { coeffs: (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn try_sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self { coeffs: (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    pub fn try_mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::DivisionByZeroSeries);
        }
        let inv0 = c0.recip();
        let n = self.order();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out[k - j];
            }
            out.push(-acc * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let n = self.order().min(other.order());
        Ok(self.truncate(n).try_mul(&other.truncate(n).recip()?))
    }

    /// Square root with the constant term's nonnegative rational root.
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let r0 = rational_sqrt(c0).filter(|r| !r.is_zero()).ok_or_else(|| Error::NoRationalSquareRoot(format_rational(c0)))?;
        let n = self.order();
        let two_r0 = &r0 + &r0;
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        out.push(r0);
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc -= &out[j] * &out[k - j];
            }
            out.push(acc / &two_r0);
        }
        Ok(Self { coeffs: out })
    }

    /// `outer(inner(z))`, truncated to the smaller of the two orders.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantInner);
        }
        let n = outer.order().min(inner.order());
        let inner = inner.truncate(n);
        // Horner from the top coefficient.
        let mut acc = Self::constant(outer.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = acc.try_mul(&inner);
            acc.coeffs[0] += &outer.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse by Lagrange inversion:
    /// `[z^n] g = (1/n) [w^(n-1)] (w / f(w))^n`.
    pub fn reversion(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(Error::NotInvertibleSeries);
        }
        // f(w) = w h(w); w / f(w) = 1 / h(w), known to order n - 1.
        let h = self.shift_down(1)?;
        let q = h.recip()?;
        let mut out = vec![Rational::zero(); n + 1];
        let mut power = PowerSeries::one(n - 1);
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            power = power.try_mul(&q);
            *slot = power.coeffs[k - 1].clone() / Rational::from_integer(k.into());
        }
        Ok(Self { coeffs: out })
    }

    /// Compositional inverse by Newton iteration `g <- g - (f(g) - z) / f'(g)`,
    /// doubling the number of correct coefficients per step.
    pub fn reversion_newton(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(Error::NotInvertibleSeries);
        }
        let z = Self::identity(n);
        let fprime = self.derivative();
        let mut g = Self::monomial(self.coeffs[1].recip(), 1, n);
        loop {
            let residual = Self::compose(self, &g)?.try_sub(&z);
            let Some(v) = residual.valuation() else {
                return Ok(g);
            };
            // residual = z^v r(z), so f'(g) is only needed to order n - v.
            let r = residual.shift_down(v)?;
            let slope = Self::compose(&fprime.truncate(n - v), &g.truncate(n - v))?;
            let step = r.try_div(&slope)?.shift_up(v);
            g = g.try_sub(&step);
        }
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: Self) -> PowerSeries {
        self.try_add(rhs)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: Self) -> PowerSeries {
        self.try_sub(rhs)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: Self) -> PowerSeries {
        self.try_mul(rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn ps_arith(a: &PowerSeries, b: &PowerSeries, op: ArithOp) -> Result<PowerSeries> {
    match op {
        ArithOp::Add => Ok(a.try_add(b)),
        ArithOp::Sub => Ok(a.try_sub(b)),
        ArithOp::Mul => Ok(a.try_mul(b)),
        ArithOp::Div => a.try_div(b),
    }
}

/// Finite Jacobi-type continued fraction
/// `1 / (1 - d0 z - p0 z^2 / (1 - d1 z - p1 z^2 / ...))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFractionSpec {
    pub diagonal: Vec<Rational>,
    pub subdiagonal_products: Vec<Rational>,
    pub depth: usize,
}

impl ContinuedFractionSpec {
    /// Smallest depth accepted for a given expansion order.
    pub fn required_depth(order: usize) -> usize {
        order.div_ceil(2) + 1
    }
}

/// Expands the continued fraction bottom-up, with the tail beyond `depth` taken as 1.
pub fn cf_expand(spec: &ContinuedFractionSpec, order: usize) -> Result<PowerSeries> {
    let needed = ContinuedFractionSpec::required_depth(order);
    let depth = spec.depth;
    if depth < needed || spec.diagonal.len() < depth || spec.subdiagonal_products.len() < depth {
        return Err(Error::InsufficientDepth { depth, order, needed });
    }
    let mut tail = PowerSeries::one(order);
    for level in (0..depth).rev() {
        let z2 = PowerSeries::monomial(spec.subdiagonal_products[level].clone(), 2, order);
        let mut denom = &PowerSeries::one(order) - &z2.try_div(&tail)?;
        denom.coeffs[1] -= &spec.diagonal[level];
        tail = denom;
    }
    tail.recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn series(v: &[i64]) -> PowerSeries {
        PowerSeries::new(ints(v))
    }

    /// Weighted Motzkin path sum over all words in {u, t, d}^n.
    fn brute_path_sum(n: usize, diag: impl Fn(usize) -> i64, prod: impl Fn(usize) -> i64) -> i64 {
        let mut total = 0;
        for word in 0..3usize.pow(n as u32) {
            let mut w = word;
            let mut h: i64 = 0;
            let mut weight = 1;
            let mut ok = true;
            for _ in 0..n {
                match w % 3 {
                    0 => {
                        // Up step carries the product weight, down step weight 1.
                        weight *= prod(h as usize);
                        h += 1;
                    }
                    1 => weight *= diag(h as usize),
                    _ => {
                        h -= 1;
                        if h < 0 {
                            ok = false;
                            break;
                        }
                    }
                }
                w /= 3;
            }
            if ok && h == 0 {
                total += weight;
            }
        }
        total
    }

    #[test]
    fn arithmetic_examples() {
        let a = series(&[1, 1, 0]);
        let b = series(&[1, -1, 0]);
        assert_eq!(ps_arith(&a, &b, ArithOp::Mul).unwrap(), series(&[1, 0, -1]));
        let one = series(&[1, 0, 0, 0]);
        let g = series(&[1, -1, 0, 0]);
        assert_eq!(ps_arith(&one, &g, ArithOp::Div).unwrap(), series(&[1, 1, 1, 1]));
        let sq = series(&[1, 2, 1, 0]);
        let f = series(&[1, 1, 0, 0]);
        assert_eq!(ps_arith(&sq, &f, ArithOp::Div).unwrap(), series(&[1, 1, 0, 0]));
    }

    #[test]
    fn division_by_zero_constant_fails() {
        let a = series(&[1, 1]);
        let b = series(&[0, 1]);
        assert_eq!(ps_arith(&a, &b, ArithOp::Div), Err(Error::DivisionByZeroSeries));
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = series(&[1, 2, 3, 4]);
        let b = series(&[1, 1]);
        assert_eq!((&a + &b).order(), 1);
        assert_eq!((&a * &b).order(), 1);
    }

    #[test]
    fn composition_examples() {
        let outer = series(&[0, 1, 1]);
        let inner = series(&[0, 2, 0]);
        assert_eq!(PowerSeries::compose(&outer, &inner).unwrap(), series(&[0, 2, 4]));

        let anything = series(&[3, -1, 7, 2]);
        let z = PowerSeries::identity(3);
        assert_eq!(PowerSeries::compose(&anything, &z).unwrap(), anything);

        let geo = series(&[1, 1, 1, 1, 1]);
        let z2 = series(&[0, 0, 1, 0, 0]);
        assert_eq!(PowerSeries::compose(&geo, &z2).unwrap(), series(&[1, 0, 1, 0, 1]));

        assert_eq!(PowerSeries::compose(&geo, &series(&[1, 1, 0, 0, 0])), Err(Error::NonzeroConstantInner));
    }

    #[test]
    fn reversion_examples() {
        let z = PowerSeries::identity(5);
        assert_eq!(z.reversion().unwrap(), z);

        // z / (1 - z) reverses to z / (1 + z).
        let f = series(&[0, 1, 1, 1, 1, 1]);
        assert_eq!(f.reversion().unwrap(), series(&[0, 1, -1, 1, -1, 1]));

        // z - z^2: the expected values are checked by composing back below.
        let f = series(&[0, 1, -1, 0, 0]);
        let g = f.reversion().unwrap();
        assert_eq!(g, series(&[0, 1, 1, 2, 5]));
        assert_eq!(PowerSeries::compose(&f, &g).unwrap(), PowerSeries::identity(4));
    }

    #[test]
    fn reversion_rejects_degenerate_input() {
        assert_eq!(series(&[1, 1, 0]).reversion(), Err(Error::NotInvertibleSeries));
        assert_eq!(series(&[0, 0, 1]).reversion(), Err(Error::NotInvertibleSeries));
        assert_eq!(series(&[0, 0, 1]).reversion_newton(), Err(Error::NotInvertibleSeries));
    }

    #[test]
    fn sqrt_squares_back() {
        let f = PowerSeries::new(vec![rat(9, 4), int(1), rat(-2, 3), int(5), int(0)]);
        let r = f.sqrt().unwrap();
        assert_eq!(&r * &r, f);
        assert!(series(&[2, 1]).sqrt().is_err());
    }

    #[test]
    fn cf_catalan_and_motzkin() {
        let order = 8;
        let depth = ContinuedFractionSpec::required_depth(order);
        let dyck = ContinuedFractionSpec { diagonal: vec![int(0); depth], subdiagonal_products: vec![int(1); depth], depth };
        let expected: Vec<i64> = (0..=order).map(|n| brute_path_sum(n, |_| 0, |_| 1)).collect();
        assert_eq!(expected, vec![1, 0, 1, 0, 2, 0, 5, 0, 14]);
        assert_eq!(cf_expand(&dyck, order).unwrap(), series(&expected));

        let motzkin = ContinuedFractionSpec { diagonal: vec![int(1); depth], subdiagonal_products: vec![int(1); depth], depth };
        let expected: Vec<i64> = (0..=order).map(|n| brute_path_sum(n, |_| 1, |_| 1)).collect();
        assert_eq!(&expected[..6], &[1, 1, 2, 4, 9, 21]);
        assert_eq!(cf_expand(&motzkin, order).unwrap(), series(&expected));
    }

    #[test]
    fn cf_linked_partition_weights_at_order_three() {
        // (alpha, beta, gamma) = (2, 3, 5): gamma^3 + 3 beta gamma + beta + alpha beta = 125 + 45 + 3 + 6.
        let (alpha, beta, gamma) = (2, 3, 5);
        let depth = 4;
        let diag = |i: usize| if i == 0 { gamma } else { 1 + alpha + gamma };
        let prod = |i: usize| if i == 0 { beta } else { alpha + beta };
        let spec = ContinuedFractionSpec {
            diagonal: (0..depth).map(|i| int(diag(i))).collect(),
            subdiagonal_products: (0..depth).map(|i| int(prod(i))).collect(),
            depth,
        };
        let m = cf_expand(&spec, 6).unwrap();
        assert_eq!(m.coeff(3), &int(179));
        for n in 0..=6 {
            assert_eq!(m.coeff(n), &int(brute_path_sum(n, diag, prod)));
        }
    }

    #[test]
    fn cf_rejects_shallow_depth() {
        let spec = ContinuedFractionSpec { diagonal: vec![int(1); 3], subdiagonal_products: vec![int(1); 3], depth: 3 };
        assert!(matches!(cf_expand(&spec, 6), Err(Error::InsufficientDepth { needed: 4, .. })));
        assert!(cf_expand(&spec, 4).is_ok());
    }

    fn arb_invertible(order: usize) -> impl Strategy<Value = PowerSeries> {
        (prop::collection::vec((-9i64..=9, 1i64..=5), order - 1), (1i64..=9, 1i64..=5, any::<bool>())).prop_map(
            move |(rest, (n1, d1, neg))| {
                let mut c = vec![int(0), rat(if neg { -n1 } else { n1 }, d1)];
                c.extend(rest.into_iter().map(|(n, d)| rat(n, d)));
                PowerSeries::new(c)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reversion_round_trips(f in arb_invertible(7)) {
            let g = f.reversion().unwrap();
            prop_assert_eq!(g.reversion().unwrap(), f.clone());
            prop_assert_eq!(PowerSeries::compose(&f, &g).unwrap(), PowerSeries::identity(7));
        }

        #[test]
        fn lagrange_and_newton_agree(f in arb_invertible(8)) {
            prop_assert_eq!(f.reversion().unwrap(), f.reversion_newton().unwrap());
        }
    }
}
