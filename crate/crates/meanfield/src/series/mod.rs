//! Extended-precision scalars, truncated power series and the real factorial.

pub mod gamma;
pub mod jet;
pub mod real;

pub use gamma::{abs_factorial, factorial_int, factorial_real, ln_abs_factorial, ln_factorial_of_abs};
pub use jet::{jet_div, jet_eval, jet_exp, jet_mul, Jet};
pub use real::{binomial, ExtReal, DEFAULT_PREC, MIN_PREC};
