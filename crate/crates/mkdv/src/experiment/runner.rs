//! Drives one configured run end to end: initial profile, optional seeded
//! perturbation, time stepping, per-stride diagnostics, and the final drift
//! and regime verdicts.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{classify_regime, ClassifierConfig, DiagnosticsRecord, RegimeLabel};
use crate::error::Error;
use crate::experiment::config::{FamilyChoice, ResolvedConfig, SchemeKind};
use crate::fd::{FdSchemeConfig, FdSolver, Nonlinearity};
use crate::grid::PeriodicGrid;
use crate::invariants::{drift_report, DriftReport, InvariantTriple};
use crate::spectral::{SpectralSchemeConfig, SpectralSolver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The fixed-point iteration failed at this step; every sample before it
    /// is still valid.
    NonConvergence { step: u64, time: f64 },
}

impl RunStatus {
    pub fn label(&self) -> String {
        match self {
            RunStatus::Completed => "completed".to_string(),
            RunStatus::NonConvergence { step, time } => {
                format!("nonconvergence at step {step} (t = {time})")
            }
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// One output row: the diagnostics of a sampled state plus solver health
/// accumulated since the previous sample.
#[derive(Debug, Clone)]
pub struct SampleRow {
    pub record: DiagnosticsRecord,
    pub fp_iters_max: u32,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ResolvedConfig,
    pub rows: Vec<SampleRow>,
    pub status: RunStatus,
    pub drift: DriftReport,
    pub regime: RegimeLabel,
}

impl RunReport {
    /// Row count a clean run must produce: one per full stride plus the
    /// initial state.
    pub fn expected_rows(&self) -> u64 {
        self.config.step_count() / self.config.sample_stride + 1
    }

    pub fn l3_event_time(&self) -> Option<f64> {
        self.drift
            .l3_jump_index
            .map(|k| self.rows[k].record.t)
    }

    pub fn invariant_series(&self) -> Vec<InvariantTriple> {
        self.rows.iter().map(|r| r.record.invariants).collect()
    }
}

/// Initial profile for a config: the closed form at `t = 0` (or the zero
/// field) plus uniform noise of the configured amplitude, drawn from a
/// counter-based generator so the same seed always produces the same field.
pub fn initial_state(config: &ResolvedConfig, grid: &PeriodicGrid) -> Result<Vec<f64>, Error> {
    let mut u0 = match config.solution_spec()? {
        Some(spec) => spec.sample(grid, 0.0),
        None => vec![0.0; grid.node_count()],
    };
    if config.perturbation_amplitude > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for v in u0.iter_mut() {
            *v += config.perturbation_amplitude * (2.0 * rng.gen::<f64>() - 1.0);
        }
    }
    Ok(u0)
}

/// Extremum threshold for this run: the configured fraction of the initial
/// peak. A zero initial field falls back to the fraction itself so the
/// threshold stays positive.
fn absolute_prominence(config: &ResolvedConfig, u0: &[f64]) -> f64 {
    let peak = u0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        config.prominence * peak
    } else {
        config.prominence
    }
}

struct EngineStep {
    fp_iters: u32,
    converged: bool,
    cstability_ok: bool,
}

enum Engine {
    Spectral {
        solver: SpectralSolver,
        coeffs: Vec<Complex<f64>>,
    },
    Fd {
        solver: FdSolver,
        state: Vec<f64>,
    },
}

impl Engine {
    fn new(config: &ResolvedConfig, grid: &PeriodicGrid, u0: &[f64]) -> Result<Self, Error> {
        match config.scheme {
            SchemeKind::Spectral => {
                let mut scheme = SpectralSchemeConfig::new(config.dt);
                scheme.fp_tol = config.fp_tol;
                scheme.fp_max_iter = config.fp_max_iter;
                let solver = SpectralSolver::new(grid, scheme)?;
                let coeffs = solver.initial_coefficients(u0);
                Ok(Engine::Spectral { solver, coeffs })
            }
            SchemeKind::Fd1 | SchemeKind::Fd2 => {
                let nonlinearity = match config.scheme {
                    SchemeKind::Fd1 => Nonlinearity::CubicGradient,
                    _ => Nonlinearity::TripleProduct,
                };
                let mut scheme = FdSchemeConfig::new(nonlinearity, config.dt);
                scheme.fp_tol = config.fp_tol;
                scheme.fp_max_iter = config.fp_max_iter;
                let solver = FdSolver::new(grid, scheme)?;
                Ok(Engine::Fd {
                    solver,
                    state: u0.to_vec(),
                })
            }
        }
    }

    fn advance(&mut self) -> EngineStep {
        match self {
            Engine::Spectral { solver, coeffs } => {
                let (next, info) = solver.step(coeffs);
                *coeffs = next;
                EngineStep {
                    fp_iters: info.fp_iters,
                    converged: info.converged,
                    cstability_ok: true,
                }
            }
            Engine::Fd { solver, state } => {
                let (next, info) = solver.step(state);
                *state = next;
                EngineStep {
                    fp_iters: info.fp_iters,
                    converged: info.converged,
                    cstability_ok: info.cstability_ok,
                }
            }
        }
    }

    fn snapshot(&self) -> Vec<f64> {
        match self {
            Engine::Spectral { solver, coeffs } => solver.physical_state(coeffs),
            Engine::Fd { state, .. } => state.clone(),
        }
    }
}

pub fn run_experiment(config: &ResolvedConfig) -> Result<RunReport, Error> {
    let grid = config.grid()?;
    let u0 = initial_state(config, &grid)?;
    let prominence = absolute_prominence(config, &u0);
    let window = config.envelope_window();

    let mut engine = Engine::new(config, &grid, &u0)?;
    let n_steps = config.step_count();
    let stride = config.sample_stride;

    let mut rows = Vec::with_capacity((n_steps / stride + 2) as usize);
    rows.push(SampleRow {
        record: DiagnosticsRecord::from_state(0.0, &u0, &grid, prominence, window)?,
        fp_iters_max: 0,
        warnings: Vec::new(),
    });

    let mut status = RunStatus::Completed;
    let mut fp_band_max = 0u32;
    let mut cstability_flag = false;
    for step in 1..=n_steps {
        let info = engine.advance();
        fp_band_max = fp_band_max.max(info.fp_iters);
        if !info.cstability_ok {
            cstability_flag = true;
        }
        if !info.converged {
            status = RunStatus::NonConvergence {
                step,
                time: step as f64 * config.dt,
            };
            break;
        }
        if step % stride == 0 {
            let u = engine.snapshot();
            let t = step as f64 * config.dt;
            let mut warnings = Vec::new();
            if cstability_flag {
                warnings.push("cstability".to_string());
            }
            rows.push(SampleRow {
                record: DiagnosticsRecord::from_state(t, &u, &grid, prominence, window)?,
                fp_iters_max: fp_band_max,
                warnings,
            });
            fp_band_max = 0;
            cstability_flag = false;
        }
    }

    let triples: Vec<InvariantTriple> = rows.iter().map(|r| r.record.invariants).collect();
    let drift = drift_report(&triples, Some(config.l3_jump_threshold));

    let records: Vec<DiagnosticsRecord> = rows.iter().map(|r| r.record).collect();
    let beta_hint = match config.family {
        FamilyChoice::Zero => 1.0,
        _ => config.beta,
    };
    let mut classifier = ClassifierConfig::new(config.half_length, beta_hint);
    classifier.l3_jump_threshold = Some(config.l3_jump_threshold);
    let regime = classify_regime(&records, &classifier);

    Ok(RunReport {
        config: config.clone(),
        rows,
        status,
        drift,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Regime;
    use crate::experiment::config::parse_config;

    fn config(text: &str) -> ResolvedConfig {
        parse_config(text).unwrap()
    }

    const ZERO_RUN: &str = r#"
seed = 7

[solution]
family = "zero"

[grid]
L = 10.0
N = 64

[scheme]
kind = "fd1"
dt = 0.01

[run]
T = 1.0
sample_stride = 10
"#;

    #[test]
    fn zero_field_run_produces_zero_rows_and_no_label() {
        let report = run_experiment(&config(ZERO_RUN)).unwrap();
        assert!(report.status.is_completed());
        assert_eq!(report.rows.len() as u64, report.expected_rows());
        assert_eq!(report.rows.len(), 11, "floor(T / (dt stride)) + 1 samples");
        for row in &report.rows {
            assert_eq!(row.record.invariants.as_array(), [0.0, 0.0, 0.0]);
            assert_eq!(row.record.n_extrema, 0);
            assert!(row.record.separation.is_none());
            assert!(row.warnings.is_empty());
        }
        assert_eq!(report.regime.regime, Regime::Undetermined);
        assert_eq!(report.drift.max_drift, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn timestamps_increase_and_follow_the_stride() {
        let report = run_experiment(&config(ZERO_RUN)).unwrap();
        for (k, row) in report.rows.iter().enumerate() {
            let expected = k as f64 * 0.01 * 10.0;
            assert!(
                (row.record.t - expected).abs() < 1e-12,
                "row {k} at t = {}",
                row.record.t
            );
        }
    }

    #[test]
    fn soliton_run_keeps_its_invariants() {
        let text = ZERO_RUN
            .replace("family = \"zero\"", "family = \"soliton\"\nbeta = 1.0")
            .replace("L = 10.0", "L = 20.0")
            .replace("N = 64", "N = 256")
            .replace("kind = \"fd1\"", "kind = \"spectral\"");
        let report = run_experiment(&config(&text)).unwrap();
        assert!(report.status.is_completed());
        let first = report.rows[0].record.invariants;
        let last = report.rows.last().unwrap().record.invariants;
        assert!(
            (last.l2 - first.l2).abs() < 1e-10,
            "spectral midpoint conserves the squared sum, drift {}",
            (last.l2 - first.l2).abs()
        );
        // Row 0 is the initial state; no steps precede it.
        assert_eq!(report.rows[0].fp_iters_max, 0);
        assert!(report.rows[1..].iter().all(|r| r.fp_iters_max >= 1));
    }

    #[test]
    fn perturbation_is_seed_deterministic() {
        let grid = PeriodicGrid::new(10.0, 64).unwrap();
        let mut cfg = config(ZERO_RUN);
        cfg.perturbation_amplitude = 1e-3;
        let a = initial_state(&cfg, &grid).unwrap();
        let b = initial_state(&cfg, &grid).unwrap();
        assert_eq!(a, b, "same seed, same field");
        cfg.seed = 8;
        let c = initial_state(&cfg, &grid).unwrap();
        assert_ne!(a, c, "different seed, different field");
        let peak = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak > 0.0 && peak <= 1e-3);
    }

    #[test]
    fn nonconvergence_aborts_with_partial_rows() {
        // One fixed-point sweep cannot reach a 1e-12 tolerance on a soliton,
        // so the very first step reports failure.
        let text = ZERO_RUN
            .replace("family = \"zero\"", "family = \"soliton\"\nbeta = 1.0")
            .replace("dt = 0.01", "dt = 0.01\nfp_max_iter = 1");
        let report = run_experiment(&config(&text)).unwrap();
        match report.status {
            RunStatus::NonConvergence { step, .. } => assert_eq!(step, 1),
            RunStatus::Completed => panic!("expected an early abort"),
        }
        assert_eq!(report.rows.len(), 1, "only the initial sample survives");
        assert_eq!(report.regime.regime, Regime::Undetermined);
    }

    #[test]
    fn cstability_violation_is_flagged_in_the_row_warnings() {
        // dt = 1 with a unit-amplitude profile sits far outside the
        // C-stability band.
        let text = ZERO_RUN
            .replace("family = \"zero\"", "family = \"soliton\"\nbeta = 1.0")
            .replace("dt = 0.01", "dt = 1.0\nfp_max_iter = 400\nfp_tol = 1e-6")
            .replace("T = 1.0", "T = 2.0")
            .replace("sample_stride = 10", "sample_stride = 1");
        let report = run_experiment(&config(&text)).unwrap();
        let flagged = report
            .rows
            .iter()
            .any(|r| r.warnings.iter().any(|w| w == "cstability"));
        assert!(flagged, "expected a cstability warning in some row");
    }
}
