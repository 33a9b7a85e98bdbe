use num_traits::{One, Zero};

use super::rational::{self, Rational};

/// Power series in one variable, truncated after `z^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    order: usize,
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn new(order: usize, mut coeffs: Vec<Rational>) -> Self {
        coeffs.resize(order + 1, rational::zero());
        TruncSeries { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        TruncSeries::new(order, vec![rational::one()])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order.min(other.order);
        TruncSeries::new(order, (0..=order).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect())
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries::new(self.order, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        TruncSeries::new(self.order, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order.min(other.order);
        let mut out = vec![rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncSeries::new(order, out)
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> TruncSeries {
        let c0 = &self.coeffs[0];
        assert!(!c0.is_zero(), "series with zero constant term is not invertible");
        let mut out = vec![rational::zero(); self.order + 1];
        out[0] = c0.recip();
        for n in 1..=self.order {
            let mut s = rational::zero();
            for k in 1..=n {
                s += &self.coeffs[k] * &out[n - k];
            }
            out[n] = -s / c0;
        }
        TruncSeries::new(self.order, out)
    }

    /// `exp` of a series with zero constant term.
    pub fn exp(&self) -> TruncSeries {
        assert!(self.coeffs[0].is_zero(), "exp needs a zero constant term");
        // f' = a' f  =>  n f_n = sum_k k a_k f_{n-k}
        let mut out = vec![rational::zero(); self.order + 1];
        out[0] = Rational::one();
        for n in 1..=self.order {
            let mut s = rational::zero();
            for k in 1..=n {
                s += rational::int(k as i64) * &self.coeffs[k] * &out[n - k];
            }
            out[n] = s / rational::int(n as i64);
        }
        TruncSeries::new(self.order, out)
    }

    /// `log` of a series with constant term one.
    pub fn log(&self) -> TruncSeries {
        assert!(self.coeffs[0].is_one(), "log needs constant term one");
        // l' = f'/f
        let inv = self.inverse();
        let deriv: Vec<Rational> = (1..=self.order)
            .map(|k| rational::int(k as i64) * &self.coeffs[k])
            .collect();
        let q = TruncSeries::new(self.order, deriv).mul(&inv);
        let mut out = vec![rational::zero()];
        for k in 1..=self.order {
            out.push(q.coeffs[k - 1].clone() / rational::int(k as i64));
        }
        TruncSeries::new(self.order, out)
    }

    /// `f(c z)`.
    pub fn rescale(&self, c: &Rational) -> TruncSeries {
        let mut p = rational::one();
        let mut out = Vec::with_capacity(self.order + 1);
        for a in &self.coeffs {
            out.push(a * &p);
            p *= c;
        }
        TruncSeries::new(self.order, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn exp_of_z() {
        let e = TruncSeries::new(4, vec![int(0), int(1)]).exp();
        assert_eq!(e.coeffs(), &[int(1), int(1), rat(1, 2), rat(1, 6), rat(1, 24)]);
    }

    #[test]
    fn inverse_of_geometric() {
        let s = TruncSeries::new(3, vec![int(1), int(-1)]).inverse();
        assert_eq!(s.coeffs(), &[int(1), int(1), int(1), int(1)]);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..9).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #[test]
        fn exp_log_inverse(cs in proptest::collection::vec(small_rational(), 5)) {
            let mut v = vec![int(0)];
            v.extend(cs);
            let a = TruncSeries::new(5, v);
            prop_assert_eq!(a.exp().log(), a.clone());
            let mut w = a.coeffs().to_vec();
            w[0] = int(1);
            let f = TruncSeries::new(5, w);
            prop_assert_eq!(f.log().exp(), f);
        }
    }
}
