//! The experiment layer: reproducible configured runs and sweeps.
//!
//! A run is described by a flat TOML config, executed with one of the three
//! schemes, sampled on a fixed stride, and written as a CSV whose header
//! echoes the resolved configuration. Identical configs and seeds produce
//! byte-identical output.

mod config;
mod output;
mod runner;
mod sweep;

pub use config::{parse_config, FamilyChoice, ResolvedConfig, SchemeKind};
pub use output::{
    read_invariant_series, run_csv_string, write_run_csv, StoredRun, RUN_CSV_COLUMNS,
};
pub use runner::{initial_state, run_experiment, RunReport, RunStatus, SampleRow};
pub use sweep::{
    parse_sweep, run_sweep, sweep_summary_string, write_sweep_summary, SweepEntry, SweepOutcome,
    SWEEP_CSV_COLUMNS,
};

/// Shortest round-trip decimal; exponent form outside the range where plain
/// notation stays compact. `Display` alone would expand 1e-12 to sixteen
/// zeros. Parsing the result as `f64` recovers the exact input bits.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if (1e-4..1e16).contains(&magnitude) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
