//! The coefficient ring: exact rationals and truncated multivariate power
//! series in evenly graded parameters.

mod rational;
mod series;

pub use rational::{factorial, Rational};
pub use series::{monomial_degree, Exponents, MultiSeries, ParamId, Parameter, ParameterContext, MAX_PARAMS};
