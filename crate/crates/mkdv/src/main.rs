//! Command-line front end: configured runs and sweeps, closed-form profile
//! dumps, and invariant re-checks of stored output. All numerical work lives
//! in the library; this file only parses arguments and moves bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mkdv::error::Error;
use mkdv::exact::ExactSolutionSpec;
use mkdv::experiment::{
    fmt_float, parse_config, parse_sweep, read_invariant_series, run_csv_string, run_experiment,
    run_sweep, sweep_summary_string,
};
use mkdv::grid::PeriodicGrid;
use mkdv::invariants::{continuum_invariants, drift_report};

#[derive(Parser)]
#[command(
    name = "mkdv-lab",
    version,
    about = "Invariant-preserving solvers and long-time diagnostics for the \
             focusing modified KdV equation on a periodic interval"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one configured run and write its diagnostics CSV.
    Run {
        /// TOML config file (see configs/ for annotated examples).
        config: PathBuf,
        /// Output directory (created if missing, default current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed key of the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Execute every run of a sweep file and write per-run CSVs plus a
    /// summary table.
    Sweep {
        /// TOML sweep file: a [base] table plus one [[run]] override each.
        config: PathBuf,
        /// Output directory (created if missing, default current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Max runs in flight at once.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Overrides the seed of every run in the sweep.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample a closed-form solution on a grid and print x,u rows.
    Exact {
        /// soliton, breather, double_pole or approx_breather.
        #[arg(long)]
        family: String,
        /// Carrier parameter; required for the breather families.
        #[arg(long)]
        alpha: Option<f64>,
        /// Width parameter.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Domain half length.
        #[arg(long, default_value_t = 40.0)]
        l: f64,
        /// Node count.
        #[arg(long, default_value_t = 512)]
        n: usize,
        /// Evaluation time.
        #[arg(long, default_value_t = 0.0)]
        time: f64,
        /// Periodization images per side; 0 samples the whole-line form.
        #[arg(long, default_value_t = 0)]
        images: u32,
        /// Write <family>.csv into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-scan a stored run CSV for invariant drift and breakdown events.
    /// Exits nonzero when a jump in the third invariant is detected.
    CheckInvariants {
        /// Run CSV produced by the run or sweep subcommands.
        run_output: PathBuf,
        /// Relative step in L3 flagged as an event (default 0.05).
        #[arg(long)]
        l3_jump_threshold: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Run { config, out, seed } => cmd_run(&config, out.as_deref(), seed),
        Command::Sweep {
            config,
            out,
            parallel,
            seed,
        } => cmd_sweep(&config, out.as_deref(), parallel, seed),
        Command::Exact {
            family,
            alpha,
            beta,
            l,
            n,
            time,
            images,
            out,
        } => cmd_exact(&family, alpha, beta, l, n, time, images, out.as_deref()),
        Command::CheckInvariants {
            run_output,
            l3_jump_threshold,
        } => cmd_check_invariants(&run_output, l3_jump_threshold),
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string())
}

fn output_dir(out: Option<&Path>) -> Result<PathBuf, Error> {
    let dir = out.unwrap_or_else(|| Path::new(".")).to_path_buf();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn cmd_run(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(config_path)?;
    let mut config = parse_config(&text)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let report = run_experiment(&config)?;
    let dir = output_dir(out)?;
    let path = dir.join(format!("{}.csv", file_stem(config_path)));
    fs::write(&path, run_csv_string(&report))?;
    println!(
        "{}: {} rows, status {}, regime {}, wrote {}",
        file_stem(config_path),
        report.rows.len(),
        report.status.label(),
        report.regime.regime.label(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    config_path: &Path,
    out: Option<&Path>,
    parallel: usize,
    seed: Option<u64>,
) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(config_path)?;
    let mut entries = parse_sweep(&text)?;
    if let Some(s) = seed {
        for entry in entries.iter_mut() {
            if let Ok(config) = entry.config.as_mut() {
                config.seed = s;
            }
        }
    }
    let outcomes = run_sweep(entries, parallel);

    let dir = output_dir(out)?;
    let stem = file_stem(config_path);
    let mut failures = 0usize;
    for outcome in &outcomes {
        match &outcome.result {
            Ok(report) => {
                let path = dir.join(format!("{}_{}.csv", stem, outcome.id));
                fs::write(&path, run_csv_string(report))?;
                println!(
                    "{}: status {}, regime {}, wrote {}",
                    outcome.id,
                    report.status.label(),
                    report.regime.regime.label(),
                    path.display()
                );
            }
            Err(err) => {
                failures += 1;
                eprintln!("{}: failed: {err}", outcome.id);
            }
        }
    }
    let summary_path = dir.join(format!("{stem}_summary.csv"));
    fs::write(&summary_path, sweep_summary_string(&outcomes))?;
    println!(
        "summary for {} runs ({} failed) in {}",
        outcomes.len(),
        failures,
        summary_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_exact(
    family: &str,
    alpha: Option<f64>,
    beta: f64,
    l: f64,
    n: usize,
    time: f64,
    images: u32,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let need_alpha = || {
        alpha.ok_or_else(|| Error::Config(format!("--alpha is required for family {family}")))
    };
    let spec = match family {
        "soliton" => ExactSolutionSpec::soliton(beta)?,
        "breather" => ExactSolutionSpec::breather(need_alpha()?, beta)?,
        "double_pole" => ExactSolutionSpec::double_pole(beta)?,
        "approx_breather" => ExactSolutionSpec::approx_breather(need_alpha()?, beta)?,
        other => {
            return Err(Error::Config(format!(
                "--family must be one of soliton, breather, double_pole, approx_breather; \
                 got \"{other}\""
            )))
        }
    };
    let grid = PeriodicGrid::new(l, n)?;
    let values = if images == 0 {
        spec.sample(&grid, time)
    } else {
        spec.sample_periodized(&grid, time, images)
    };

    let mut text = String::new();
    text.push_str(&format!(
        "# family = {}\n# alpha = {}\n# beta = {}\n# t = {}\n# L = {}\n# N = {}\n# images = {}\n",
        spec.family().name(),
        spec.alpha(),
        spec.beta(),
        time,
        l,
        n,
        images
    ));
    let reference = continuum_invariants(&spec, time, 1 << 16, l)?;
    let inv = reference.values;
    text.push_str(&format!(
        "# continuum invariants: L1 = {}, L2 = {}, L3 = {}\n",
        fmt_float(inv.l1),
        fmt_float(inv.l2),
        fmt_float(inv.l3)
    ));
    if reference.domain_truncation_suspect() {
        text.push_str("# warning: solution does not vanish at the domain edge at this time\n");
    }
    text.push_str("x,u\n");
    for (x, u) in grid.nodes().iter().zip(values.iter()) {
        text.push_str(&format!("{},{}\n", fmt_float(*x), fmt_float(*u)));
    }

    match out {
        Some(dir) => {
            let dir = output_dir(Some(dir))?;
            let path = dir.join(format!("{}.csv", spec.family().name()));
            fs::write(&path, text)?;
            println!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_invariants(
    run_output: &Path,
    l3_jump_threshold: Option<f64>,
) -> Result<ExitCode, Error> {
    let file = fs::File::open(run_output)?;
    let stored = read_invariant_series(file)?;
    if stored.times.is_empty() {
        return Err(Error::Data(format!(
            "{} holds no samples",
            run_output.display()
        )));
    }
    let report = drift_report(&stored.invariants, l3_jump_threshold);
    println!(
        "samples: {} (t = {} .. {})",
        stored.times.len(),
        stored.times.first().unwrap(),
        stored.times.last().unwrap()
    );
    let [d1, d2, d3] = report.max_drift;
    println!("max drift: L1 {d1:e}, L2 {d2:e}, L3 {d3:e}");
    match report.l3_jump_index {
        Some(k) => {
            println!(
                "L3 jump at sample {k} (t = {}), step threshold {:e}",
                stored.times[k], report.l3_jump_threshold
            );
            Ok(ExitCode::from(2))
        }
        None => {
            println!(
                "no L3 jump (step threshold {:e})",
                report.l3_jump_threshold
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
