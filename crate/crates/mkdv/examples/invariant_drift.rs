//! Which invariant does each scheme actually protect? Evolve the same
//! double-pole state under all three solvers and print the relative drift of
//! L1 (mean), L2 (squared norm) and L3 (energy). The cubic-gradient scheme
//! (fd1) pins L1 to rounding, the triple-product scheme (fd2) pins L2, and
//! the spectral midpoint pins L2; everything else drifts at the scheme's
//! truncation order.
//!
//!     cargo run --release --example invariant_drift

use mkdv::experiment::{parse_config, run_experiment};

fn main() {
    println!("double pole, beta = 1, L = 40, dt = 0.01, T = 20 (2000 steps)\n");
    println!("  scheme    N      L1 drift    L2 drift    L3 drift   protected");
    for (kind, n, protected) in [
        ("fd1", 800, "L1 (and L3 semi-discretely)"),
        ("fd2", 800, "L2"),
        ("spectral", 1024, "L2 (midpoint + quadratic invariant)"),
    ] {
        let text = format!(
            r#"
[solution]
family = "double_pole"
beta = 1.0

[grid]
L = 40.0
N = {n}

[scheme]
kind = "{kind}"
dt = 0.01

[run]
T = 20.0
sample_stride = 10
"#
        );
        let report = run_experiment(&parse_config(&text).unwrap()).unwrap();
        let [d1, d2, d3] = report.drift.max_drift;
        println!("  {kind:8} {n:4}   {d1:9.2e}   {d2:9.2e}   {d3:9.2e}   {protected}");
    }
    println!("\nthe protected column drifts at rounding level while the others carry");
    println!("O(dt^2) truncation wobble; over 1e4+ steps that contrast spans 5+ decades");
}
