//! Exact finite-dimensional linear embeddings of triangular polynomial
//! systems.
//!
//! A system `dx_i/dt = a_i x_i + f_i(x_1..x_{i-1})` with polynomial `f_i`
//! admits a finite set of monomial observables that is closed under time
//! differentiation. On those coordinates the dynamics are linear — exactly,
//! not approximately. This crate computes the closure, assembles the lifted
//! system matrix symbolically with parameters kept as symbols, extends the
//! embedding to systems with inputs, and cross-checks the construction by
//! simulation and algebraic residuals.
//!
//! Start with [`SystemSpec`] to describe a system, [`compute_lifting`] to
//! close the observable set, and [`KoopmanModel::build`] for the matrices.

pub mod cli;
pub mod expm;
pub mod expr;
pub mod io;
pub mod lifting;
pub mod model;
pub mod poly;
pub mod sim;
pub mod system;

pub use expm::expm;
pub use expr::{ExprError, InputExpr};
pub use lifting::{compute_lifting, lie_derivative, LiftError, LiftingSet, DEFAULT_CAP};
pub use model::{KoopmanModel, ModelError, NumericModel, SweepConfig, SweepReport};
pub use poly::{
    Monomial, ParamAssignment, ParamId, ParamLinForm, ParamNames, ParamPolynomial, Rational,
    UnboundParam,
};
pub use sim::{
    compare, expm_propagate, integrate_lifted, integrate_nonlinear, ErrorReport, InputSignal,
    SimError, Trajectory,
};
pub use system::{
    NumericSystem, StructureReport, StructureViolation, SystemBuilder, SystemSpec, ViolationKind,
};
