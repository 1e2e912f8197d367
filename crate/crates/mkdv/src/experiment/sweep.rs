//! Parameter sweeps: a `[base]` table carrying the shared configuration and
//! one `[[run]]` table per variation. Each run is the base with the run's
//! keys merged on top; a failing run never blocks the others, and results
//! always come back in input order.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::Error;
use crate::experiment::config::{resolve_value, ResolvedConfig};
use crate::experiment::runner::{run_experiment, RunReport};

/// One sweep entry after parsing; the config carries its own failure so a
/// bad variation surfaces in the summary instead of aborting the sweep.
#[derive(Debug)]
pub struct SweepEntry {
    pub id: String,
    pub config: Result<ResolvedConfig, Error>,
}

/// Result of one executed entry, in input order.
#[derive(Debug)]
pub struct SweepOutcome {
    pub id: String,
    /// Present whenever the entry resolved, even if the run later failed.
    pub config: Option<ResolvedConfig>,
    pub result: Result<RunReport, Error>,
}

fn merge_toml(base: &toml::Value, overlay: toml::Value) -> toml::Value {
    match (base, overlay) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            let mut merged = b.clone();
            for (key, value) in o {
                let entry = match merged.remove(&key) {
                    Some(existing) => merge_toml(&existing, value),
                    None => value,
                };
                merged.insert(key, entry);
            }
            toml::Value::Table(merged)
        }
        (_, overlay) => overlay,
    }
}

fn valid_run_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Parses a sweep document. Each `[[run]]` table may carry an optional
/// `name` (used for ids and output file names, default `run_NNN`); every
/// other key overrides the same key of `[base]`.
pub fn parse_sweep(text: &str) -> Result<Vec<SweepEntry>, Error> {
    let doc: toml::Value = toml::from_str(text)
        .map_err(|e| Error::Config(format!("sweep file rejected: {e}")))?;
    let table = match doc {
        toml::Value::Table(t) => t,
        _ => return Err(Error::Config("sweep file must be a TOML table".into())),
    };
    for key in table.keys() {
        if key != "base" && key != "run" {
            return Err(Error::Config(format!(
                "sweep file has unknown top-level key \"{key}\"; expected base and run"
            )));
        }
    }
    let base = table
        .get("base")
        .cloned()
        .unwrap_or_else(|| toml::Value::Table(toml::map::Map::new()));
    if !base.is_table() {
        return Err(Error::Config("base must be a table".into()));
    }
    let runs = match table.get("run") {
        None => Vec::new(),
        Some(toml::Value::Array(a)) => a.clone(),
        Some(_) => return Err(Error::Config("run must be an array of tables".into())),
    };

    let mut entries = Vec::with_capacity(runs.len());
    for (index, run) in runs.into_iter().enumerate() {
        let default_id = format!("run_{:03}", index + 1);
        let mut run_table = match run {
            toml::Value::Table(t) => t,
            _ => {
                entries.push(SweepEntry {
                    id: default_id,
                    config: Err(Error::Config(format!(
                        "run {} must be a table",
                        index + 1
                    ))),
                });
                continue;
            }
        };
        let id = match run_table.remove("name") {
            None => default_id,
            Some(toml::Value::String(name)) if valid_run_name(&name) => name,
            Some(other) => {
                entries.push(SweepEntry {
                    id: default_id,
                    config: Err(Error::Config(format!(
                        "run {} has an invalid name {other:?}; use letters, digits, _, -, .",
                        index + 1
                    ))),
                });
                continue;
            }
        };
        let merged = merge_toml(&base, toml::Value::Table(run_table));
        entries.push(SweepEntry {
            id,
            config: resolve_value(merged),
        });
    }

    let mut seen = std::collections::HashSet::new();
    for entry in &entries {
        if !seen.insert(entry.id.as_str()) {
            return Err(Error::Config(format!(
                "duplicate run name \"{}\" in sweep file",
                entry.id
            )));
        }
    }
    Ok(entries)
}

/// Executes every resolvable entry, with at most `parallel` runs in flight.
/// Outcomes keep the input order regardless of completion order.
pub fn run_sweep(entries: Vec<SweepEntry>, parallel: usize) -> Vec<SweepOutcome> {
    let mut slots: Vec<Option<SweepOutcome>> = Vec::new();
    let mut jobs: Vec<(usize, String, ResolvedConfig)> = Vec::new();
    for (index, entry) in entries.into_iter().enumerate() {
        match entry.config {
            Ok(config) => {
                slots.push(None);
                jobs.push((index, entry.id, config));
            }
            Err(err) => slots.push(Some(SweepOutcome {
                id: entry.id,
                config: None,
                result: Err(err),
            })),
        }
    }

    let workers = parallel.max(1).min(jobs.len().max(1));
    if workers <= 1 {
        for (index, id, config) in jobs {
            slots[index] = Some(SweepOutcome {
                id,
                config: Some(config.clone()),
                result: run_experiment(&config),
            });
        }
    } else {
        let next = AtomicUsize::new(0);
        let results = Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    if k >= jobs.len() {
                        break;
                    }
                    let (index, id, config) = &jobs[k];
                    let outcome = SweepOutcome {
                        id: id.clone(),
                        config: Some(config.clone()),
                        result: run_experiment(config),
                    };
                    results.lock().expect("no panics hold this lock")[*index] = Some(outcome);
                });
            }
        });
    }

    slots
        .into_iter()
        .map(|slot| slot.expect("every entry produces an outcome"))
        .collect()
}

pub const SWEEP_CSV_COLUMNS: &str =
    "id,family,scheme,dt,N,T,seed,status,regime,l3_event_time,l1_drift,l2_drift,l3_drift";

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => crate::experiment::fmt_float(x),
        None => "NaN".to_string(),
    }
}

fn quoted(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One summary line per entry: identity, headline regime, breakdown time and
/// the invariant drift triple. Failed entries carry the error text in the
/// status column.
pub fn write_sweep_summary<W: Write>(outcomes: &[SweepOutcome], out: &mut W) -> io::Result<()> {
    writeln!(out, "# mkdv-lab sweep summary")?;
    writeln!(out, "{SWEEP_CSV_COLUMNS}")?;
    for outcome in outcomes {
        let (family, scheme, dt, n, t, seed) = match &outcome.config {
            Some(c) => (
                c.family.label().to_string(),
                c.scheme.label().to_string(),
                crate::experiment::fmt_float(c.dt),
                format!("{}", c.node_count),
                crate::experiment::fmt_float(c.t_final),
                format!("{}", c.seed),
            ),
            None => Default::default(),
        };
        match &outcome.result {
            Ok(report) => {
                let [d1, d2, d3] = report.drift.max_drift;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    quoted(&outcome.id),
                    family,
                    scheme,
                    dt,
                    n,
                    t,
                    seed,
                    quoted(&report.status.label()),
                    report.regime.regime.label(),
                    fmt_opt(report.l3_event_time()),
                    crate::experiment::fmt_float(d1),
                    crate::experiment::fmt_float(d2),
                    crate::experiment::fmt_float(d3),
                )?;
            }
            Err(err) => {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},,NaN,NaN,NaN,NaN",
                    quoted(&outcome.id),
                    family,
                    scheme,
                    dt,
                    n,
                    t,
                    seed,
                    quoted(&format!("error: {err}")),
                )?;
            }
        }
    }
    Ok(())
}

pub fn sweep_summary_string(outcomes: &[SweepOutcome]) -> String {
    let mut buf = Vec::new();
    write_sweep_summary(outcomes, &mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("summary output is ascii")
}
