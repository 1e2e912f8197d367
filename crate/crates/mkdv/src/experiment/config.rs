//! Run configuration: a flat TOML document with dotted keys
//! (`solution.family`, `grid.L`, `scheme.dt`, ...). Unknown keys are
//! rejected, defaults are filled during resolution, and the resolved values
//! are echoed verbatim into every output file so a run is reproducible from
//! its own artifact.
//!
//! TOML note: the top-level `seed` key must appear before the first section
//! header.

use serde::Deserialize;

use crate::error::Error;
use crate::exact::ExactSolutionSpec;
use crate::grid::PeriodicGrid;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    solution: SolutionSection,
    grid: GridSection,
    scheme: SchemeSection,
    run: RunSection,
    #[serde(default)]
    diagnostics: DiagnosticsSection,
    #[serde(default)]
    perturbation: PerturbationSection,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionSection {
    family: String,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    beta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSection {
    kind: String,
    dt: f64,
    #[serde(default)]
    fp_tol: Option<f64>,
    #[serde(default)]
    fp_max_iter: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    #[serde(rename = "T")]
    t_final: f64,
    #[serde(default)]
    sample_stride: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagnosticsSection {
    #[serde(default)]
    prominence: Option<f64>,
    #[serde(default)]
    l3_jump_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbationSection {
    #[serde(default)]
    amplitude: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyChoice {
    Zero,
    Soliton,
    Breather,
    DoublePole,
    ApproxBreather,
}

impl FamilyChoice {
    pub fn label(&self) -> &'static str {
        match self {
            FamilyChoice::Zero => "zero",
            FamilyChoice::Soliton => "soliton",
            FamilyChoice::Breather => "breather",
            FamilyChoice::DoublePole => "double_pole",
            FamilyChoice::ApproxBreather => "approx_breather",
        }
    }

    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "zero" => Ok(FamilyChoice::Zero),
            "soliton" => Ok(FamilyChoice::Soliton),
            "breather" => Ok(FamilyChoice::Breather),
            "double_pole" => Ok(FamilyChoice::DoublePole),
            "approx_breather" => Ok(FamilyChoice::ApproxBreather),
            other => Err(Error::Config(format!(
                "solution.family must be one of zero, soliton, breather, double_pole, \
                 approx_breather; got \"{other}\""
            ))),
        }
    }

    fn needs_alpha(&self) -> bool {
        matches!(self, FamilyChoice::Breather | FamilyChoice::ApproxBreather)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Spectral,
    Fd1,
    Fd2,
}

impl SchemeKind {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Spectral => "spectral",
            SchemeKind::Fd1 => "fd1",
            SchemeKind::Fd2 => "fd2",
        }
    }

    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "spectral" => Ok(SchemeKind::Spectral),
            "fd1" => Ok(SchemeKind::Fd1),
            "fd2" => Ok(SchemeKind::Fd2),
            other => Err(Error::Config(format!(
                "scheme.kind must be one of spectral, fd1, fd2; got \"{other}\""
            ))),
        }
    }
}

/// A fully validated configuration with every default filled in; the only
/// state a run depends on.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub family: FamilyChoice,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub half_length: f64,
    pub node_count: usize,
    pub scheme: SchemeKind,
    pub dt: f64,
    pub fp_tol: f64,
    pub fp_max_iter: u32,
    pub t_final: f64,
    pub sample_stride: u64,
    /// Extremum threshold as a fraction of the initial max amplitude.
    pub prominence: f64,
    /// Relative step in `l3` flagged as a breakdown event.
    pub l3_jump_threshold: f64,
    pub perturbation_amplitude: f64,
    pub seed: u64,
}

pub fn parse_config(text: &str) -> Result<ResolvedConfig, Error> {
    let file: ConfigFile = toml::from_str(text)
        .map_err(|e| Error::Config(format!("configuration rejected: {e}")))?;
    resolve(file)
}

/// Resolves an already parsed TOML value, used by sweep files after merging
/// per-run overrides onto the base table.
pub(crate) fn resolve_value(value: toml::Value) -> Result<ResolvedConfig, Error> {
    let file: ConfigFile = value
        .try_into()
        .map_err(|e| Error::Config(format!("configuration rejected: {e}")))?;
    resolve(file)
}

fn resolve(file: ConfigFile) -> Result<ResolvedConfig, Error> {
    let family = FamilyChoice::parse(&file.solution.family)?;
    let alpha = file.solution.alpha;
    if family.needs_alpha() {
        match alpha {
            Some(a) if a.is_finite() && a > 0.0 => {}
            Some(a) => {
                return Err(Error::Config(format!(
                    "solution.alpha must be positive and finite, got {a}"
                )))
            }
            None => {
                return Err(Error::Config(format!(
                    "solution.alpha is required for family \"{}\"",
                    family.label()
                )))
            }
        }
    } else if alpha.is_some() {
        return Err(Error::Config(format!(
            "solution.alpha is not used by family \"{}\"",
            family.label()
        )));
    }
    let beta = file.solution.beta.unwrap_or(1.0);
    if family != FamilyChoice::Zero && !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Config(format!(
            "solution.beta must be positive and finite, got {beta}"
        )));
    }

    if !(file.grid.l.is_finite() && file.grid.l > 0.0) {
        return Err(Error::Config(format!(
            "grid.L must be positive and finite, got {}",
            file.grid.l
        )));
    }
    if file.grid.n < 4 || file.grid.n % 2 != 0 {
        return Err(Error::Config(format!(
            "grid.N must be an even number of at least 4, got {}",
            file.grid.n
        )));
    }

    let scheme = SchemeKind::parse(&file.scheme.kind)?;
    if scheme == SchemeKind::Spectral && !file.grid.n.is_power_of_two() {
        return Err(Error::Config(format!(
            "grid.N must be a power of two for the spectral scheme, got {}",
            file.grid.n
        )));
    }
    if !(file.scheme.dt.is_finite() && file.scheme.dt > 0.0) {
        return Err(Error::Config(format!(
            "scheme.dt must be positive, got {}",
            file.scheme.dt
        )));
    }
    let fp_tol = file.scheme.fp_tol.unwrap_or(1e-12);
    if !(fp_tol.is_finite() && fp_tol > 0.0) {
        return Err(Error::Config(format!(
            "scheme.fp_tol must be positive, got {fp_tol}"
        )));
    }
    let fp_max_iter = file.scheme.fp_max_iter.unwrap_or(100);
    if fp_max_iter == 0 {
        return Err(Error::Config("scheme.fp_max_iter must be at least 1".into()));
    }

    if !(file.run.t_final.is_finite() && file.run.t_final > 0.0) {
        return Err(Error::Config(format!(
            "run.T must be positive, got {}",
            file.run.t_final
        )));
    }
    let sample_stride = file.run.sample_stride.unwrap_or(1);
    if sample_stride == 0 {
        return Err(Error::Config("run.sample_stride must be at least 1".into()));
    }

    let prominence = file.diagnostics.prominence.unwrap_or(0.05);
    if !(prominence.is_finite() && prominence > 0.0) {
        return Err(Error::Config(format!(
            "diagnostics.prominence must be positive, got {prominence}"
        )));
    }
    let l3_jump_threshold = file.diagnostics.l3_jump_threshold.unwrap_or(0.05);
    if !(l3_jump_threshold.is_finite() && l3_jump_threshold > 0.0) {
        return Err(Error::Config(format!(
            "diagnostics.l3_jump_threshold must be positive, got {l3_jump_threshold}"
        )));
    }
    let perturbation_amplitude = file.perturbation.amplitude.unwrap_or(0.0);
    if !(perturbation_amplitude.is_finite() && perturbation_amplitude >= 0.0) {
        return Err(Error::Config(format!(
            "perturbation.amplitude must be nonnegative, got {perturbation_amplitude}"
        )));
    }

    Ok(ResolvedConfig {
        family,
        alpha,
        beta,
        half_length: file.grid.l,
        node_count: file.grid.n,
        scheme,
        dt: file.scheme.dt,
        fp_tol,
        fp_max_iter,
        t_final: file.run.t_final,
        sample_stride,
        prominence,
        l3_jump_threshold,
        perturbation_amplitude,
        seed: file.seed.unwrap_or(0),
    })
}

impl ResolvedConfig {
    pub fn grid(&self) -> Result<PeriodicGrid, Error> {
        PeriodicGrid::new(self.half_length, self.node_count)
    }

    /// Closed-form initial profile; `None` for the zero field.
    pub fn solution_spec(&self) -> Result<Option<ExactSolutionSpec>, Error> {
        let spec = match self.family {
            FamilyChoice::Zero => None,
            FamilyChoice::Soliton => Some(ExactSolutionSpec::soliton(self.beta)?),
            FamilyChoice::Breather => Some(ExactSolutionSpec::breather(
                self.alpha.expect("validated"),
                self.beta,
            )?),
            FamilyChoice::DoublePole => Some(ExactSolutionSpec::double_pole(self.beta)?),
            FamilyChoice::ApproxBreather => Some(ExactSolutionSpec::approx_breather(
                self.alpha.expect("validated"),
                self.beta,
            )?),
        };
        Ok(spec)
    }

    /// Envelope-smoothing window: one carrier wavelength for oscillating
    /// families, two width scales otherwise.
    pub fn envelope_window(&self) -> f64 {
        match (self.family, self.alpha) {
            (FamilyChoice::Breather | FamilyChoice::ApproxBreather, Some(a)) => {
                2.0 * std::f64::consts::PI / a
            }
            (FamilyChoice::Zero, _) => 1.0,
            _ => 2.0 / self.beta,
        }
    }

    /// Resolved key-value lines in schema order, used verbatim in output
    /// headers. Identical configs produce identical lines.
    pub fn echo_lines(&self) -> Vec<String> {
        let f = crate::experiment::fmt_float;
        let mut lines = vec![format!("solution.family = {}", self.family.label())];
        if let Some(a) = self.alpha {
            lines.push(format!("solution.alpha = {}", f(a)));
        }
        lines.push(format!("solution.beta = {}", f(self.beta)));
        lines.push(format!("grid.L = {}", f(self.half_length)));
        lines.push(format!("grid.N = {}", self.node_count));
        lines.push(format!("scheme.kind = {}", self.scheme.label()));
        lines.push(format!("scheme.dt = {}", f(self.dt)));
        lines.push(format!("scheme.fp_tol = {}", f(self.fp_tol)));
        lines.push(format!("scheme.fp_max_iter = {}", self.fp_max_iter));
        lines.push(format!("run.T = {}", f(self.t_final)));
        lines.push(format!("run.sample_stride = {}", self.sample_stride));
        lines.push(format!("diagnostics.prominence = {}", f(self.prominence)));
        lines.push(format!(
            "diagnostics.l3_jump_threshold = {}",
            f(self.l3_jump_threshold)
        ));
        lines.push(format!(
            "perturbation.amplitude = {}",
            f(self.perturbation_amplitude)
        ));
        lines.push(format!("seed = {}", self.seed));
        lines
    }

    /// Number of time steps a clean run executes. The relative nudge absorbs
    /// rounding in `T / dt` when the quotient is meant to be integral.
    pub fn step_count(&self) -> u64 {
        ((self.t_final / self.dt) * (1.0 + 1e-9)).floor() as u64
    }
}
