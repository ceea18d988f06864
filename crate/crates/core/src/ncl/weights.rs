use num_traits::{One, Zero};

use crate::rational::Rational;
use crate::series::{ContinuedFractionSpec, PowerSeries};

use super::cards::{motzkin_paths, MotzkinPath, Step};

/// An infinite weight sequence given by an explicit head and a constant tail.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    pub head: Vec<Rational>,
    pub tail: Rational,
}

impl WeightSequence {
    pub fn constant(c: Rational) -> Self {
        Self { head: Vec::new(), tail: c }
    }

    pub fn at(&self, i: usize) -> &Rational {
        self.head.get(i).unwrap_or(&self.tail)
    }
}

/// Step weights of a weighted Motzkin path: `up.at(i)` is the weight of an up
/// step leaving height `i`, `down.at(i - 1)` the weight of a down step leaving
/// height `i >= 1`, and `flat.at(i)` the weight of a flat step at height `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMotzkinScheme {
    pub up: WeightSequence,
    pub down: WeightSequence,
    pub flat: WeightSequence,
}

impl WeightedMotzkinScheme {
    /// Weights counting linked partitions by (dc, sc, sg) with markers
    /// (alpha, beta, gamma):
    /// up: beta at ground, alpha + beta above; flat: gamma at ground,
    /// 1 + alpha + gamma above; down: 1.
    pub fn linked_partitions(alpha: &Rational, beta: &Rational, gamma: &Rational) -> Self {
        Self {
            up: WeightSequence { head: vec![beta.clone()], tail: alpha + beta },
            down: WeightSequence::constant(Rational::one()),
            flat: WeightSequence { head: vec![gamma.clone()], tail: Rational::one() + alpha + gamma },
        }
    }

    /// `mu_i`
    pub fn mu(&self, i: usize) -> &Rational {
        self.up.at(i)
    }

    /// `lambda_i` for `i >= 1`.
    pub fn lambda(&self, i: usize) -> &Rational {
        assert!(i >= 1, "down steps leave heights >= 1");
        self.down.at(i - 1)
    }

    /// `kappa_i`
    pub fn kappa(&self, i: usize) -> &Rational {
        self.flat.at(i)
    }

    pub fn path_weight(&self, path: &MotzkinPath) -> Rational {
        let mut w = Rational::one();
        for (s, h) in path.steps().iter().zip(path.heights()) {
            match s {
                Step::Up => w *= self.mu(h),
                Step::Down => w *= self.lambda(h),
                Step::Flat => w *= self.kappa(h),
            }
            if w.is_zero() {
                break;
            }
        }
        w
    }

    /// Sum of path weights over all Motzkin paths of length `n`.
    pub fn path_sum(&self, n: usize) -> Rational {
        motzkin_paths(n).iter().map(|p| self.path_weight(p)).sum()
    }

    /// Continued fraction with diagonal `kappa_i` and products `mu_i lambda_(i+1)`,
    /// deep enough to be exact through `order`.
    pub fn continued_fraction(&self, order: usize) -> ContinuedFractionSpec {
        let depth = ContinuedFractionSpec::required_depth(order);
        ContinuedFractionSpec {
            diagonal: (0..depth).map(|i| self.kappa(i).clone()).collect(),
            subdiagonal_products: (0..depth).map(|i| self.mu(i) * self.lambda(i + 1)).collect(),
            depth,
        }
    }

    pub fn moment_series(&self, order: usize) -> PowerSeries {
        crate::series::cf_expand(&self.continued_fraction(order), order).expect("depth chosen by required_depth")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn path_weight_factorises() {
        let (a, b, g) = (rat(2, 3), int(5), rat(-1, 7));
        let scheme = WeightedMotzkinScheme::linked_partitions(&a, &b, &g);
        let path = MotzkinPath::parse("uutdd").unwrap();
        let expected = &b * (&a + &b) * (int(1) + &a + &g);
        assert_eq!(scheme.path_weight(&path), expected);
    }

    #[test]
    fn path_sums_match_continued_fraction() {
        let scheme = WeightedMotzkinScheme::linked_partitions(&rat(1, 2), &rat(3, 4), &int(-2));
        let series = scheme.moment_series(9);
        for n in 0..=9 {
            assert_eq!(series.coeff(n), &scheme.path_sum(n), "n = {n}");
        }
    }
}
