//! Solver laboratory for the focusing modified Korteweg-de Vries equation
//!
//! ```text
//!     u_t + u_xxx + 2 (u^3)_x = 0,     x in [-L, L) periodic.
//! ```
//!
//! The crate provides:
//!
//! * closed-form soliton, breather and double-pole (soliton/antisoliton)
//!   solutions with analytic derivatives ([`exact`]);
//! * an implicit-midpoint pseudospectral solver ([`spectral`]) and two
//!   implicit-midpoint finite-difference solvers ([`fd`]) that preserve,
//!   respectively, the L2 norm and the mass/energy invariants of the discrete
//!   flow;
//! * discrete and continuum invariant evaluation with drift reports
//!   ([`invariants`]);
//! * long-time diagnostics: extrema tracking, hump-separation growth fits,
//!   envelope velocity and qualitative regime classification ([`diagnostics`]);
//! * a config-file driven experiment runner with CSV output and parameter
//!   sweeps ([`experiment`]), also exposed through the `mkdv-lab` binary.
//!
//! Runnable walkthroughs live in `examples/`; start with
//! `cargo run --release --example exact_profiles`.

pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod fd;
pub mod grid;
pub mod invariants;
pub mod spectral;

pub use error::Error;
pub use exact::{ExactSolutionSpec, SolutionFamily};
pub use grid::PeriodicGrid;

/// Solution samples at the grid nodes at one time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub time: f64,
    pub values: Vec<f64>,
}

impl FieldState {
    pub fn new(time: f64, values: Vec<f64>) -> Self {
        Self { time, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
