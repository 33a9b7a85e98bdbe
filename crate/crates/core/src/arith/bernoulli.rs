use once_cell::sync::Lazy;
use parking_lot::Mutex;

use super::poly::UniPoly;
use super::rational::{self, Rational};
use super::series::TruncSeries;

static MEMO: Lazy<Mutex<Vec<UniPoly>>> = Lazy::new(|| Mutex::new(Vec::new()));

/// Bernoulli numbers `B_0..=B_m` (with `B_1 = -1/2`) from `t / (e^t - 1)`.
fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    // (e^t - 1)/t = sum t^k/(k+1)!
    let denom: Vec<Rational> = (0..=m).map(|k| rational::factorial(k as u32 + 1).recip()).collect();
    let inv = TruncSeries::new(m, denom).inverse();
    (0..=m).map(|k| inv.coeff(k) * rational::factorial(k as u32)).collect()
}

/// Bernoulli polynomial `B_m(x)`, memoized.
pub fn bernoulli_polynomial(m: usize) -> UniPoly {
    let mut memo = MEMO.lock();
    if memo.len() <= m {
        // coefficient of t^m/m! in (t/(e^t-1)) e^{xt}
        let nums = bernoulli_numbers(m);
        memo.clear();
        for deg in 0..=m {
            let coeffs = (0..=deg)
                .map(|j| rational::binomial(deg as u32, j as u32) * &nums[deg - j])
                .collect();
            memo.push(UniPoly::new("x", coeffs));
        }
    }
    memo[m].clone()
}

pub fn bernoulli_at(m: usize, x: &Rational) -> Rational {
    bernoulli_polynomial(m).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn low_degree_values() {
        assert_eq!(bernoulli_polynomial(0), UniPoly::new("x", vec![int(1)]));
        assert_eq!(
            bernoulli_polynomial(2),
            UniPoly::new("x", vec![rat(1, 6), int(-1), int(1)])
        );
        assert_eq!(
            bernoulli_polynomial(3),
            UniPoly::new("x", vec![int(0), rat(1, 2), rat(-3, 2), int(1)])
        );
        assert_eq!(bernoulli_at(1, &int(0)), rat(-1, 2));
    }

    #[test]
    fn numbers_at_zero_and_one_agree() {
        for m in 2..=20 {
            assert_eq!(bernoulli_at(m, &int(0)), bernoulli_at(m, &int(1)), "m = {m}");
        }
        assert_eq!(bernoulli_at(12, &int(0)), rat(-691, 2730));
    }

    proptest! {
        #[test]
        fn reflection(m in 0usize..=20, p in -50i64..50, q in 1i64..30) {
            let x = rat(p, q);
            let lhs = bernoulli_at(m, &(int(1) - &x));
            let rhs = bernoulli_at(m, &x) * int(if m % 2 == 0 { 1 } else { -1 });
            prop_assert_eq!(lhs, rhs);
        }
    }
}
