//! Experiment configuration: the versioned TOML schema, command-line
//! overrides, and validation. Flags always win over the file, the file over
//! built-in defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use jurygate::population::{Scenario, DEFAULT_EPSILON, DEFAULT_KAPPA};
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NAgents,
    HorizonT,
    Tau,
}

impl SweepAxis {
    /// Name used in the `axis` CSV column and in `--sweep` values.
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::NAgents => "N",
            SweepAxis::HorizonT => "T",
            SweepAxis::Tau => "tau",
        }
    }

    /// Built-in grid reconstructions; sweeps over T have no obvious default
    /// and must be given explicitly.
    pub fn default_grid(&self) -> Option<Vec<f64>> {
        match self {
            SweepAxis::NAgents => Some((1..=10).map(|i| (i * 10) as f64).collect()),
            SweepAxis::Tau => Some((0..20).map(|i| i as f64 / 20.0).collect()),
            SweepAxis::HorizonT => None,
        }
    }
}

impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" => Ok(SweepAxis::NAgents),
            "t" => Ok(SweepAxis::HorizonT),
            "tau" => Ok(SweepAxis::Tau),
            other => Err(CliError::Config(format!(
                "unknown sweep axis `{other}` (expected N, T, or tau)"
            ))),
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenarios: Vec<Scenario>,
    /// Explicit sweep, if one was configured; commands that need a sweep fall
    /// back to the default N grid.
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
    pub n_agents: usize,
    pub horizon_t: u32,
    pub tau: f64,
    pub p_critical: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub runs: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenarios: Scenario::ALL.to_vec(),
            sweep: None,
            n_agents: 50,
            horizon_t: 20,
            tau: 0.5,
            p_critical: 0.5,
            kappa: DEFAULT_KAPPA,
            epsilon: DEFAULT_EPSILON,
            runs: 2000,
            seed: 42,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// The sweep a table command runs: the configured one, or the default
    /// N-grid reconstruction.
    pub fn resolved_sweep(&self) -> Result<(SweepAxis, Vec<f64>), CliError> {
        match &self.sweep {
            Some((axis, grid)) => Ok((*axis, grid.clone())),
            None => Ok((
                SweepAxis::NAgents,
                SweepAxis::NAgents
                    .default_grid()
                    .expect("N grid has a default"),
            )),
        }
    }
}

/// On-disk schema. Every key is optional except `schema_version`; unknown
/// keys are rejected so typos surface as parse errors.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: Option<u32>,
    pub scenarios: Option<Vec<String>>,
    pub sweep_axis: Option<String>,
    pub sweep_grid: Option<Vec<f64>>,
    pub n_agents: Option<usize>,
    pub horizon_t: Option<u32>,
    pub tau: Option<f64>,
    pub p_critical: Option<f64>,
    pub kappa: Option<f64>,
    pub epsilon: Option<f64>,
    pub runs: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<String>,
}

pub fn load_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: ConfigFile =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match file.schema_version {
        Some(SCHEMA_VERSION) => Ok(file),
        Some(v) => Err(CliError::Config(format!(
            "{}: unsupported schema_version {v} (this build reads version {SCHEMA_VERSION})",
            path.display()
        ))),
        None => Err(CliError::Config(format!(
            "{}: missing required field `schema_version`",
            path.display()
        ))),
    }
}

/// Command-line values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub scenarios: Option<Vec<String>>,
    pub sweep: Option<String>,
    pub n_agents: Option<usize>,
    pub horizon_t: Option<u32>,
    pub tau: Option<f64>,
    pub p_critical: Option<f64>,
    pub kappa: Option<f64>,
    pub epsilon: Option<f64>,
    pub runs: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Parse a `--sweep` value: `axis` alone or `axis=v1,v2,...`.
fn parse_sweep_flag(s: &str) -> Result<(SweepAxis, Option<Vec<f64>>), CliError> {
    let (axis_str, grid_str) = match s.split_once('=') {
        Some((a, g)) => (a, Some(g)),
        None => (s, None),
    };
    let axis: SweepAxis = axis_str.parse()?;
    let grid = grid_str
        .map(|g| {
            g.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::Config(format!("sweep grid value `{v}` is not a number"))
                    })
                })
                .collect::<Result<Vec<f64>, CliError>>()
        })
        .transpose()?;
    Ok((axis, grid))
}

fn parse_scenarios(tags: &[String]) -> Result<Vec<Scenario>, CliError> {
    if tags.is_empty() {
        return Err(CliError::Config("field `scenarios`: list is empty".into()));
    }
    let mut scenarios = Vec::with_capacity(tags.len());
    for tag in tags {
        let scenario: Scenario = tag
            .parse()
            .map_err(|e: jurygate::Error| CliError::Config(format!("field `scenarios`: {e}")))?;
        if scenarios.contains(&scenario) {
            return Err(CliError::Config(format!(
                "field `scenarios`: duplicate entry `{tag}`"
            )));
        }
        scenarios.push(scenario);
    }
    Ok(scenarios)
}

fn validate_grid(axis: SweepAxis, grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Config("field `sweep_grid`: grid is empty".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config(
            "field `sweep_grid`: grid values must be finite".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(
            "field `sweep_grid`: grid must be strictly increasing".into(),
        ));
    }
    for &v in grid {
        match axis {
            SweepAxis::NAgents => {
                if v.fract() != 0.0 || !(1.0..=1e9).contains(&v) {
                    return Err(CliError::Config(format!(
                        "field `sweep_grid`: N value {v} must be an integer >= 1"
                    )));
                }
            }
            SweepAxis::HorizonT => {
                if v.fract() != 0.0 || !(2.0..=1e9).contains(&v) {
                    return Err(CliError::Config(format!(
                        "field `sweep_grid`: T value {v} must be an integer >= 2"
                    )));
                }
            }
            SweepAxis::Tau => {
                if !(0.0..1.0).contains(&v) {
                    return Err(CliError::Config(format!(
                        "field `sweep_grid`: tau value {v} must lie in [0, 1)"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Merge defaults, file, and flags into a validated config.
pub fn resolve(file: Option<&ConfigFile>, flags: &Overrides) -> Result<ExperimentConfig, CliError> {
    let defaults = ExperimentConfig::default();
    let file = file.cloned().unwrap_or_default();

    let scenarios = match (&flags.scenarios, &file.scenarios) {
        (Some(tags), _) => parse_scenarios(tags)?,
        (None, Some(tags)) => parse_scenarios(tags)?,
        (None, None) => defaults.scenarios,
    };

    let sweep = if let Some(raw) = &flags.sweep {
        let (axis, grid) = parse_sweep_flag(raw)?;
        let grid = match grid {
            Some(g) => g,
            // `--sweep tau` alone selects the axis; grid from file or default.
            None => match (&file.sweep_grid, axis.default_grid()) {
                (Some(g), _) => g.clone(),
                (None, Some(g)) => g,
                (None, None) => {
                    return Err(CliError::Config(format!(
                        "sweep over {} needs an explicit grid",
                        axis.name()
                    )))
                }
            },
        };
        Some((axis, grid))
    } else {
        match (&file.sweep_axis, &file.sweep_grid) {
            (Some(axis_str), grid) => {
                let axis: SweepAxis = axis_str.parse()?;
                let grid = match (grid, axis.default_grid()) {
                    (Some(g), _) => g.clone(),
                    (None, Some(g)) => g,
                    (None, None) => {
                        return Err(CliError::Config(format!(
                            "field `sweep_axis`: sweep over {} needs `sweep_grid`",
                            axis.name()
                        )))
                    }
                };
                Some((axis, grid))
            }
            (None, Some(_)) => {
                return Err(CliError::Config(
                    "field `sweep_grid`: given without `sweep_axis`".into(),
                ))
            }
            (None, None) => None,
        }
    };
    if let Some((axis, grid)) = &sweep {
        validate_grid(*axis, grid)?;
    }

    let config = ExperimentConfig {
        scenarios,
        sweep,
        n_agents: flags
            .n_agents
            .or(file.n_agents)
            .unwrap_or(defaults.n_agents),
        horizon_t: flags
            .horizon_t
            .or(file.horizon_t)
            .unwrap_or(defaults.horizon_t),
        tau: flags.tau.or(file.tau).unwrap_or(defaults.tau),
        p_critical: flags
            .p_critical
            .or(file.p_critical)
            .unwrap_or(defaults.p_critical),
        kappa: flags.kappa.or(file.kappa).unwrap_or(defaults.kappa),
        epsilon: flags.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
        runs: flags.runs.or(file.runs).unwrap_or(defaults.runs),
        seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
        out: flags
            .out
            .clone()
            .or_else(|| file.out.as_ref().map(PathBuf::from)),
    };

    if config.n_agents == 0 {
        return Err(CliError::Config("field `n_agents`: must be >= 1".into()));
    }
    if config.horizon_t < 2 {
        return Err(CliError::Config("field `horizon_t`: must be >= 2".into()));
    }
    if !config.tau.is_finite() || !(0.0..1.0).contains(&config.tau) {
        return Err(CliError::Config(format!(
            "field `tau`: {} must lie in [0, 1)",
            config.tau
        )));
    }
    if !config.p_critical.is_finite() || config.p_critical <= 0.0 || config.p_critical >= 1.0 {
        return Err(CliError::Config(format!(
            "field `p_critical`: {} must lie in (0, 1)",
            config.p_critical
        )));
    }
    if !config.kappa.is_finite() || config.kappa <= 0.0 {
        return Err(CliError::Config(format!(
            "field `kappa`: {} must be > 0",
            config.kappa
        )));
    }
    if !config.epsilon.is_finite() || config.epsilon <= 0.0 {
        return Err(CliError::Config(format!(
            "field `epsilon`: {} must be > 0",
            config.epsilon
        )));
    }
    if config.runs == 0 {
        return Err(CliError::Config("field `runs`: must be >= 1".into()));
    }
    Ok(config)
}
