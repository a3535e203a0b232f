use std::path::{Path, PathBuf};

use magkernel::analysis::{decade_times, log_times, DecayModel};
use magkernel::assembly::OperatorTag;
use magkernel::field::{flux_profile, make_bump_field, FluxProfile, RadialField, Shape};
use magkernel::radial::{GridPolicy, MIN_NODES};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MAX_TIMES: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Points per decade when a time range gives no count.
pub const DEFAULT_PER_DECADE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Kernel,
    Ab,
    Groundstate,
    Decay,
    Verify,
    Mazya,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Field-specification document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Shape(ShapeSpec),
    Piecewise(PiecewiseSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub shape: Shape,
    pub alpha: f64,
    #[serde(rename = "R")]
    pub support_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    pub piecewise: Vec<[f64; 2]>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<RadialField, CliError> {
        let field = match self {
            FieldSpec::Shape(s) => make_bump_field(s.alpha, s.support_radius, s.shape),
            FieldSpec::Piecewise(p) => {
                let nodes: Vec<(f64, f64)> = p.piecewise.iter().map(|n| (n[0], n[1])).collect();
                RadialField::piecewise(&nodes)
            }
        };
        field.map_err(|e| CliError::Usage(format!("invalid field: {e}")))
    }
}

/// Field given inline or as a path to a field-specification file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSource {
    Inline(FieldSpec),
    Path(PathBuf),
}

impl FieldSource {
    /// A command-line argument: inline JSON if it looks like an object, a path otherwise.
    pub fn from_arg(arg: &str) -> Result<Self, CliError> {
        if arg.trim_start().starts_with('{') {
            Ok(FieldSource::Inline(parse_field_spec(arg.as_bytes())?))
        } else {
            Ok(FieldSource::Path(PathBuf::from(arg)))
        }
    }

    pub fn resolve(&self, base: Option<&Path>) -> Result<FieldSpec, CliError> {
        match self {
            FieldSource::Inline(s) => Ok(s.clone()),
            FieldSource::Path(p) => {
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                let bytes = std::fs::read(&p).map_err(|e| CliError::Usage(format!("cannot read field file {}: {e}", p.display())))?;
                parse_field_spec(&bytes)
            }
        }
    }
}

pub fn parse_field_spec(data: &[u8]) -> Result<FieldSpec, CliError> {
    let spec: FieldSpec = serde_json::from_slice(data).map_err(|e| CliError::Usage(format!("bad field specification: {e}")))?;
    spec.build()?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    List(Vec<f64>),
    Range(TimeRange),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeRange {
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default)]
    pub count: Option<usize>,
}

impl TimeSpec {
    /// The validated, strictly ascending list of times.
    pub fn expand(&self) -> Result<Vec<f64>, CliError> {
        let times = match self {
            TimeSpec::List(v) => v.clone(),
            TimeSpec::Range(r) => {
                if !(r.t_min > 0.0 && r.t_min.is_finite() && r.t_max.is_finite() && r.t_max >= r.t_min) {
                    return Err(usage(format!("time range needs 0 < t_min <= t_max, got [{}, {}]", r.t_min, r.t_max)));
                }
                match r.count {
                    Some(0) => return Err(usage("time count must be at least 1")),
                    Some(n) if n > MAX_TIMES => return Err(usage(format!("time count {n} exceeds {MAX_TIMES}"))),
                    Some(1) => vec![r.t_min],
                    Some(n) => log_times(r.t_min, r.t_max, n),
                    None if r.t_max == r.t_min => vec![r.t_min],
                    None => {
                        let decades = (r.t_max / r.t_min).log10();
                        if decades * DEFAULT_PER_DECADE as f64 >= MAX_TIMES as f64 {
                            return Err(usage(format!("time range spans too many decades ({decades:.1})")));
                        }
                        decade_times(r.t_min, r.t_max, DEFAULT_PER_DECADE)
                    }
                }
            }
        };
        if times.is_empty() {
            return Err(usage("no times given"));
        }
        if times.len() > MAX_TIMES {
            return Err(usage(format!("{} times exceed the limit of {MAX_TIMES}", times.len())));
        }
        if times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(usage("times must be positive and finite"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(usage("times must be strictly ascending"));
        }
        Ok(times)
    }
}

/// Comma-separated list of times, e.g. `0.1,1,1e2`.
pub fn parse_time_list(s: &str) -> Result<Vec<f64>, CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| usage(format!("bad time list '{s}': {e}")))?;
    TimeSpec::List(v).expand()
}

/// A time grid given either as JSON (list or range object) or as a comma-separated list.
pub fn parse_time_grid(data: &[u8]) -> Result<Vec<f64>, CliError> {
    let s = std::str::from_utf8(data).map_err(|_| usage("time grid is not UTF-8"))?;
    let trimmed = s.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let spec: TimeSpec = serde_json::from_str(s).map_err(|e| usage(format!("bad time grid: {e}")))?;
        spec.expand()
    } else {
        parse_time_list(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub r: f64,
    pub r_prime: f64,
    #[serde(default)]
    pub dtheta: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub n: usize,
    pub r_max: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// One invocation: command, inputs, tolerance and output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub field: Option<FieldSource>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub times: Option<TimeSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub grid_overrides: Option<GridOverrides>,
    /// AB flux for `ab`
    #[serde(default)]
    pub alpha: Option<f64>,
    /// operator for `kernel` (default magnetic)
    #[serde(default)]
    pub operator: Option<OperatorTag>,
    /// decay model for `decay`; defaults by total flux
    #[serde(default)]
    pub model: Option<DecayModel>,
    /// outer radius of the ground-state integration
    #[serde(default)]
    pub r_fit_max: Option<f64>,
    /// criteria for `verify` (all when empty)
    #[serde(default)]
    pub criteria: Vec<u32>,
    /// angular mode, exponents and radii for `mazya`
    #[serde(default)]
    pub mode: i64,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub radii: Option<TimeSpec>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            field: None,
            points: Vec::new(),
            times: None,
            tol: DEFAULT_TOL,
            output: OutputSpec::default(),
            grid_overrides: None,
            alpha: None,
            operator: None,
            model: None,
            r_fit_max: None,
            criteria: Vec::new(),
            mode: 0,
            p: None,
            q: None,
            radii: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(usage(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(g) = self.grid_overrides {
            if g.n < MIN_NODES || !(g.r_max > 0.0 && g.r_max.is_finite()) {
                return Err(usage(format!("grid override needs n >= {MIN_NODES} and r_max > 0")));
            }
        }
        for p in &self.points {
            if !(p.r >= 0.0 && p.r.is_finite() && p.r_prime >= 0.0 && p.r_prime.is_finite() && p.dtheta.is_finite()) {
                return Err(usage(format!("point ({}, {}, {}) needs finite nonnegative radii", p.r, p.r_prime, p.dtheta)));
            }
        }
        if let Some(t) = &self.times {
            t.expand()?;
        }
        let need_field = matches!(self.command, Command::Kernel | Command::Groundstate | Command::Decay | Command::Mazya);
        if need_field && self.field.is_none() {
            return Err(usage("this command needs a field"));
        }
        match self.command {
            Command::Kernel | Command::Ab => {
                if self.points.is_empty() {
                    return Err(usage("no points given"));
                }
                if self.times.is_none() {
                    return Err(usage("no times given"));
                }
                if self.command == Command::Ab {
                    match self.alpha {
                        Some(a) if a.is_finite() => {}
                        _ => return Err(usage("ab needs a finite alpha")),
                    }
                }
            }
            Command::Decay => {
                if self.points.len() != 1 {
                    return Err(usage("decay needs exactly one point"));
                }
                if self.times.is_none() {
                    return Err(usage("decay needs a time range"));
                }
            }
            Command::Groundstate => {
                if let Some(r) = self.r_fit_max {
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(usage("r_fit_max must be positive"));
                    }
                }
            }
            Command::Mazya => {
                if let Some(r) = &self.radii {
                    r.expand()?;
                }
            }
            Command::Verify => {
                if let Some(id) = self.criteria.iter().find(|&&id| !(1..=14).contains(&id)) {
                    return Err(usage(format!("unknown criterion {id}")));
                }
            }
        }
        Ok(())
    }

    pub fn policy(&self) -> GridPolicy {
        match self.grid_overrides {
            Some(g) => GridPolicy::fixed(g.n, g.r_max),
            None => GridPolicy::default(),
        }
    }

    pub fn flux(&self, base: Option<&Path>) -> Result<FluxProfile, CliError> {
        let src = self.field.as_ref().ok_or_else(|| usage("this command needs a field"))?;
        Ok(flux_profile(&src.resolve(base)?.build()?))
    }
}

pub fn parse_run_config(data: &[u8]) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_slice(data).map_err(|e| usage(format!("bad run configuration: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
