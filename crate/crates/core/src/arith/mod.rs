//! Exact scalars, polynomials, truncated series and Bernoulli polynomials.

pub mod bernoulli;
pub mod poly;
pub mod rational;
pub mod series;

pub use bernoulli::{bernoulli_at, bernoulli_polynomial};
pub use poly::{interpolate, UniPoly};
pub use rational::Rational;
pub use series::TruncSeries;
