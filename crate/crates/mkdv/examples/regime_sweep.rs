//! Time-step phase diagram of the double pole under the two FD schemes.
//! Numerical perturbation can kick the marginal soliton/antisoliton pair
//! onto a qualitatively different orbit: two free unit solitons, or a bound
//! oscillating pair (a low-frequency breather). Which branch wins depends on
//! the scheme and dt, not on resolution alone.
//!
//!     cargo run --release --example regime_sweep

use mkdv::experiment::{parse_sweep, run_sweep};

fn main() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/fd_regimes_sweep.toml"
    );
    let text = std::fs::read_to_string(path).expect("bundled sweep config exists");
    let entries = parse_sweep(&text).unwrap();
    println!("running {} configurations on 4 worker threads...\n", entries.len());
    let outcomes = run_sweep(entries, 4);

    println!("  id            scheme  dt      regime        L3 event   note");
    for outcome in &outcomes {
        let config = outcome.config.as_ref().expect("bundled configs are valid");
        match &outcome.result {
            Ok(report) => {
                let event = report
                    .l3_event_time()
                    .map_or("-".to_string(), |t| format!("t={t:.1}"));
                let note = report
                    .regime
                    .evidence
                    .notes
                    .first()
                    .cloned()
                    .unwrap_or_default();
                println!(
                    "  {:13} {:7} {:<7} {:13} {event:10} {note}",
                    outcome.id,
                    config.scheme.label(),
                    config.dt,
                    report.regime.regime.label(),
                );
            }
            Err(err) => println!("  {:13} failed: {err}", outcome.id),
        }
    }
    println!("\nreading the table: fd1 sheds the pair into TWO_SOLITONS at every dt;");
    println!("fd2 keeps DOUBLE_POLE near dt = 0.02 and captures onto a BREATHER at 0.04");
}
