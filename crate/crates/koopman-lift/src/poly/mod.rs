//! Exact symbolic arithmetic: monomials with dense exponent vectors,
//! linear forms over named parameters, and polynomials whose coefficients
//! are such forms.
//!
//! Everything in this module is exact. Floating point enters only through
//! [`ParamAssignment`] when a symbolic object is evaluated.

mod monomial;
mod param;
mod polynomial;

pub use monomial::Monomial;
pub use param::{ParamAssignment, ParamId, ParamLinForm, ParamNames, Rational, UnboundParam};
pub use polynomial::ParamPolynomial;
