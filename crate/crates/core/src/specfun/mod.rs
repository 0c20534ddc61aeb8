//! Special functions: Γ, generalized binomials, Legendre polynomials.

pub mod binomial;
pub mod gamma;
pub mod legendre;

pub use binomial::{generalized_binomial, generalized_binomial_value, SignedLogValue};
pub use gamma::{gamma, log_gamma};
pub use legendre::{gauss_legendre, legendre_eval, LegendreBasis};
