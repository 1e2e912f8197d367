//! C-stability in practice: two trajectories that start a small perturbation
//! apart may separate per step by at most sqrt((1 + mu dt/2)/(1 - 3 mu dt/2))
//! with mu = max u^2, provided 3 mu dt / 2 < 1. This runs the soliton and a
//! perturbed copy side by side and compares the worst measured per-step
//! growth against that bound as dt coarsens toward the regime edge.
//!
//!     cargo run --release --example growth_factor

use mkdv::exact::ExactSolutionSpec;
use mkdv::fd::{empirical_growth_factor, FdSchemeConfig, Nonlinearity};
use mkdv::grid::PeriodicGrid;

const PERTURBATION: f64 = 1e-6;
const STEPS: usize = 100;

fn main() {
    let grid = PeriodicGrid::new(40.0, 800).unwrap();
    let u0 = ExactSolutionSpec::soliton(1.0).unwrap().sample(&grid, 0.0);
    // soliton peak is 1, so mu ~ 1 and the regime edge sits near dt = 2/3
    println!("soliton, N = 800, perturbation {PERTURBATION:.0e}, {STEPS} steps\n");
    println!("  scheme            dt     max ratio   bound(mu)   ratio/bound");
    for nl in [Nonlinearity::CubicGradient, Nonlinearity::TripleProduct] {
        for dt in [0.01, 0.1, 0.3, 0.6] {
            let config = FdSchemeConfig::new(nl, dt);
            let report = empirical_growth_factor(&grid, config, &u0, STEPS, PERTURBATION, 0)
                .unwrap();
            let bound = (1.0f64 + 0.5 * report.mu_max * dt) / (1.0 - 1.5 * report.mu_max * dt);
            println!(
                "  {:16} {dt:5}   {:9.5}   {:9.5}   {:.5}{}",
                nl.label(),
                report.max_step_ratio,
                bound.sqrt(),
                report.worst_ratio_to_bound,
                if report.nonconverged_steps > 0 {
                    format!("  ({} nonconverged steps)", report.nonconverged_steps)
                } else {
                    String::new()
                }
            );
        }
    }
    println!("\nthe measured ratio stays under the bound everywhere inside the regime;");
    println!("past dt = 2/(3 mu) the bound itself ceases to exist and the fixed-point");
    println!("iteration starts failing, which the run reports as cstability warnings");
}
