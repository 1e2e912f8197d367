//! Finite-difference side of the laboratory: circulant difference operators
//! and the conservative implicit-midpoint schemes built from them.

pub mod operators;
pub mod stepper;

pub use operators::{FdOperator, OperatorKind};
pub use stepper::{
    empirical_growth_factor, semi_discrete_l3_derivative, FdSchemeConfig, FdSolver,
    GrowthFactorReport, Nonlinearity, StepInfo,
};
