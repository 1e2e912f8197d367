//! CSV serialization of run reports, and the reader used to re-check
//! invariant series from stored output.
//!
//! Writing is byte-deterministic: floats use the shortest round-trip
//! representation, the column order is fixed, and the header comment block
//! echoes the resolved configuration in schema order.

use std::io::{self, Write};

use crate::error::Error;
use crate::experiment::runner::{RunReport, SampleRow};
use crate::invariants::InvariantTriple;

pub const RUN_CSV_COLUMNS: &str =
    "t,L1,L2,L3,separation,n_extrema,env_position,fp_iters_max_since_last_sample,warnings";

use crate::experiment::fmt_float as fmt_f64;

/// Quotes a field only when the CSV grammar requires it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn row_line(row: &SampleRow) -> String {
    let r = &row.record;
    let separation = r.separation.unwrap_or(f64::NAN);
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt_f64(r.t),
        fmt_f64(r.invariants.l1),
        fmt_f64(r.invariants.l2),
        fmt_f64(r.invariants.l3),
        fmt_f64(separation),
        r.n_extrema,
        fmt_f64(r.env_position),
        row.fp_iters_max,
        csv_field(&row.warnings.join(";")),
    )
}

pub fn write_run_csv<W: Write>(report: &RunReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "# mkdv-lab run output")?;
    for line in report.config.echo_lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{RUN_CSV_COLUMNS}")?;
    for row in &report.rows {
        writeln!(out, "{}", row_line(row))?;
    }
    writeln!(out, "# status = {}", report.status.label())?;
    writeln!(out, "# regime = {}", report.regime.regime.label())?;
    for note in &report.regime.evidence.notes {
        writeln!(out, "# regime.note = {note}")?;
    }
    let [d1, d2, d3] = report.drift.max_drift;
    writeln!(out, "# drift.l1 = {}", fmt_f64(d1))?;
    writeln!(out, "# drift.l2 = {}", fmt_f64(d2))?;
    writeln!(out, "# drift.l3 = {}", fmt_f64(d3))?;
    writeln!(
        out,
        "# l3.jump_threshold = {}",
        fmt_f64(report.drift.l3_jump_threshold)
    )?;
    match report.l3_event_time() {
        Some(t) => writeln!(out, "# l3.event_time = {}", fmt_f64(t))?,
        None => writeln!(out, "# l3.event_time = none")?,
    }
    Ok(())
}

pub fn run_csv_string(report: &RunReport) -> String {
    let mut buf = Vec::new();
    write_run_csv(report, &mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

/// Invariant columns recovered from a stored run file.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub times: Vec<f64>,
    pub invariants: Vec<InvariantTriple>,
}

/// Reads the `t`, `L1`, `L2`, `L3` columns back from a run CSV, skipping the
/// comment header and footer. Columns are located by name, so extra columns
/// or reordering are harmless.
pub fn read_invariant_series<R: io::Read>(reader: R) -> Result<StoredRun, Error> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| Error::Data(format!("run file has no readable header: {e}")))?
        .clone();
    let index_of = |name: &str| -> Result<usize, Error> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("run file is missing the {name} column")))
    };
    let (it, i1, i2, i3) = (
        index_of("t")?,
        index_of("L1")?,
        index_of("L2")?,
        index_of("L3")?,
    );

    let mut times = Vec::new();
    let mut invariants = Vec::new();
    for (row_number, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("run file row {row_number}: {e}")))?;
        let field = |i: usize| -> Result<f64, Error> {
            record
                .get(i)
                .ok_or_else(|| Error::Data(format!("run file row {row_number} is short")))?
                .parse::<f64>()
                .map_err(|e| Error::Data(format!("run file row {row_number}: {e}")))
        };
        times.push(field(it)?);
        invariants.push(InvariantTriple {
            l1: field(i1)?,
            l2: field(i2)?,
            l3: field(i3)?,
        });
    }
    Ok(StoredRun { times, invariants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::parse_config;
    use crate::experiment::runner::run_experiment;

    const SMALL_RUN: &str = r#"
seed = 3

[solution]
family = "soliton"
beta = 1.0

[grid]
L = 20.0
N = 128

[scheme]
kind = "fd2"
dt = 0.01

[run]
T = 0.5
sample_stride = 5

[perturbation]
amplitude = 1e-4
"#;

    #[test]
    fn output_is_byte_deterministic_for_a_fixed_seed() {
        let config = parse_config(SMALL_RUN).unwrap();
        let a = run_csv_string(&run_experiment(&config).unwrap());
        let b = run_csv_string(&run_experiment(&config).unwrap());
        assert_eq!(a, b, "same config and seed must reproduce exact bytes");
    }

    #[test]
    fn different_seed_changes_the_bytes() {
        let config = parse_config(SMALL_RUN).unwrap();
        let mut other = config.clone();
        other.seed = 4;
        let a = run_csv_string(&run_experiment(&config).unwrap());
        let b = run_csv_string(&run_experiment(&other).unwrap());
        assert_ne!(a, b, "the perturbation must depend on the seed");
    }

    #[test]
    fn header_echoes_the_resolved_config() {
        let config = parse_config(SMALL_RUN).unwrap();
        let text = run_csv_string(&run_experiment(&config).unwrap());
        assert!(text.starts_with("# mkdv-lab run output\n"));
        for needle in [
            "# solution.family = soliton",
            "# scheme.kind = fd2",
            "# scheme.fp_tol = 1e-12",
            "# run.sample_stride = 5",
            "# seed = 3",
            RUN_CSV_COLUMNS,
            "# status = completed",
            "# regime = ",
        ] {
            assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
        }
    }

    #[test]
    fn row_count_matches_the_contract() {
        let config = parse_config(SMALL_RUN).unwrap();
        let report = run_experiment(&config).unwrap();
        let text = run_csv_string(&report);
        let data_rows = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("t,"))
            .count();
        assert_eq!(data_rows as u64, report.expected_rows());
        assert_eq!(data_rows, 11, "floor(0.5 / 0.05) + 1");
    }

    #[test]
    fn stored_invariants_round_trip() {
        let config = parse_config(SMALL_RUN).unwrap();
        let report = run_experiment(&config).unwrap();
        let text = run_csv_string(&report);
        let stored = read_invariant_series(text.as_bytes()).unwrap();
        assert_eq!(stored.times.len(), report.rows.len());
        for (row, (t, inv)) in report
            .rows
            .iter()
            .zip(stored.times.iter().zip(stored.invariants.iter()))
        {
            assert_eq!(row.record.t, *t, "shortest round-trip form is exact");
            assert_eq!(row.record.invariants.l1, inv.l1);
            assert_eq!(row.record.invariants.l2, inv.l2);
            assert_eq!(row.record.invariants.l3, inv.l3);
        }
    }

    #[test]
    fn missing_columns_are_reported_by_name() {
        let text = "a,b\n1,2\n";
        let err = read_invariant_series(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("missing the t column"), "{err}");
    }

    #[test]
    fn nan_separation_parses_back() {
        let text = format!("{RUN_CSV_COLUMNS}\n0,1,2,3,NaN,0,0,0,\n");
        let stored = read_invariant_series(text.as_bytes()).unwrap();
        assert_eq!(stored.invariants[0].l3, 3.0);
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
