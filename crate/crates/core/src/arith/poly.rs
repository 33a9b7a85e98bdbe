use std::fmt;

use num_traits::Zero;

use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Univariate polynomial with exact coefficients, `coeffs[i]` multiplying `var^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    var: String,
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(var: &str, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly {
            var: var.to_string(),
            coeffs,
        }
    }

    pub fn zero(var: &str) -> Self {
        UniPoly::new(var, Vec::new())
    }

    pub fn constant(var: &str, c: Rational) -> Self {
        UniPoly::new(var, vec![c])
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(rational::zero)
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(&self.var, (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(&self.var);
        }
        let mut out = vec![rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(&self.var, out)
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        UniPoly::new(&self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divide by `var^k`, failing if any of the low coefficients is nonzero.
    pub fn div_by_power(&self, k: usize) -> Option<UniPoly> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return None;
        }
        Some(UniPoly::new(&self.var, self.coeffs.iter().skip(k).cloned().collect()))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*{}", self.var),
                _ => format!("({c})*{}^{i}", self.var),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// The unique polynomial of degree at most `degree_bound` through the first
/// `degree_bound + 1` samples. Every further sample must lie on it.
pub fn interpolate(var: &str, samples: &[(Rational, Rational)], degree_bound: usize) -> Result<UniPoly> {
    let needed = degree_bound + 1;
    if samples.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    let (fit, surplus) = samples.split_at(needed);
    for (i, (xi, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::InvalidInput(format!("repeated abscissa {xi}")));
        }
    }

    // Newton divided differences.
    let xs: Vec<&Rational> = fit.iter().map(|(x, _)| x).collect();
    let mut dd: Vec<Rational> = fit.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..needed {
        for i in (level..needed).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut poly = UniPoly::constant(var, dd[needed - 1].clone());
    for i in (0..needed - 1).rev() {
        let factor = UniPoly::new(var, vec![-xs[i].clone(), rational::one()]);
        poly = poly.mul(&factor).add(&UniPoly::constant(var, dd[i].clone()));
    }

    for (x, y) in surplus {
        if &poly.eval(x) != y {
            return Err(Error::InconsistentSamples {
                x: x.to_string(),
                degree: degree_bound,
            });
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn pts(v: &[(i64, i64)]) -> Vec<(Rational, Rational)> {
        v.iter().map(|&(x, y)| (int(x), int(y))).collect()
    }

    #[test]
    fn exact_quadratic() {
        let p = interpolate("x", &pts(&[(1, 1), (2, 4), (3, 9), (4, 16)]), 2).unwrap();
        assert_eq!(p, UniPoly::new("x", vec![int(0), int(0), int(1)]));
    }

    #[test]
    fn constant_fit() {
        let c = rat(-7, 3);
        let s: Vec<_> = (5..8).map(|x| (int(x), c.clone())).collect();
        let p = interpolate("r", &s, 0).unwrap();
        assert_eq!(p.degree(), 0);
        assert_eq!(p.coeff(0), c);
    }

    #[test]
    fn surplus_deviation_is_reported() {
        let err = interpolate("x", &pts(&[(1, 1), (2, 4), (3, 9), (4, 17)]), 2).unwrap_err();
        assert!(matches!(err, Error::InconsistentSamples { .. }));
        assert!(matches!(
            interpolate("x", &pts(&[(1, 1)]), 2),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn zero_polynomial_degree_sentinel() {
        assert_eq!(UniPoly::zero("x").degree(), -1);
        assert_eq!(UniPoly::new("x", vec![int(0), int(0)]).degree(), -1);
    }

    #[test]
    fn divide_by_power() {
        let p = UniPoly::new("r", vec![int(0), int(0), int(3)]);
        assert_eq!(p.div_by_power(2).unwrap().coeff(0), int(3));
        assert!(p.div_by_power(3).is_none());
    }
}
