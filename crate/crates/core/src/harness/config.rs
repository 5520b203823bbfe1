//! Run configuration: a JSON document naming the model, the task, the
//! evaluation grids, the Monte-Carlo controls and the output.

use std::path::PathBuf;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::error::{invalid, Error, Result};
use crate::levy::{LevyBlock, ScalarLaw};
use crate::regime::{RegimeModel, Variant, VariantKind};

pub const DEFAULT_PATHS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_HORIZON: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Transform,
    LimitDensity,
    Expfun,
    Simulate,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Transform => "transform",
            Task::LimitDensity => "limit-density",
            Task::Expfun => "expfun",
            Task::Simulate => "simulate",
            Task::Verify => "verify",
        }
    }
}

/// Named check suites of `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Renewal regime with Brownian blocks: transform and limit law.
    Fig1,
    /// Jump telegraph with `0 < c1 < c0`: transform and compact exponential functional.
    Fig2,
    /// Jump telegraph with opposite drifts: beta-prime exponential functional.
    Fig3,
    /// Classical-telegraph reduction and ODE / integral-equation residuals.
    Telegraph,
    /// Oscillating telegraph with an a.s. infinite exponential functional.
    Infinite,
    /// Stable-subordinator finiteness table.
    Stable,
    /// Generic checks on the configured model.
    Model,
    /// Every built-in suite, plus `model` when a model is configured.
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Fig1 => "fig1",
            Suite::Fig2 => "fig2",
            Suite::Fig3 => "fig3",
            Suite::Telegraph => "telegraph",
            Suite::Infinite => "infinite",
            Suite::Stable => "stable",
            Suite::Model => "model",
            Suite::All => "all",
        }
    }

    pub const BUILT_IN: [Suite; 6] = [
        Suite::Fig1,
        Suite::Fig2,
        Suite::Fig3,
        Suite::Telegraph,
        Suite::Infinite,
        Suite::Stable,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `points` equally spaced values from `from` to `to` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AxisDoc")]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisDoc {
    from: f64,
    to: f64,
    points: usize,
}

impl TryFrom<AxisDoc> for Axis {
    type Error = Error;

    fn try_from(d: AxisDoc) -> Result<Self> {
        if d.points == 0 {
            return Err(invalid("grid axis must have points >= 1"));
        }
        if !(d.from.is_finite() && d.to.is_finite()) {
            return Err(invalid("grid bounds must be finite"));
        }
        if d.points > 1 && d.from > d.to {
            return Err(invalid("grid axis needs from <= to"));
        }
        Ok(Self {
            from: d.from,
            to: d.to,
            points: d.points,
        })
    }
}

impl Axis {
    pub fn new(from: f64, to: f64, points: usize) -> Result<Self> {
        Self::try_from(AxisDoc { from, to, points })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.to
                } else {
                    self.from + step * k as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Axis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "McDoc")]
pub struct McControls {
    pub paths: usize,
    pub seed: u64,
    pub rel_tol: f64,
    pub max_horizon: f64,
    /// Worker threads; `None` uses every available core. Results do not
    /// depend on it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for McControls {
    fn default() -> Self {
        Self {
            paths: DEFAULT_PATHS,
            seed: DEFAULT_SEED,
            rel_tol: DEFAULT_REL_TOL,
            max_horizon: DEFAULT_MAX_HORIZON,
            workers: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct McDoc {
    #[serde(default = "default_paths")]
    paths: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_rel_tol")]
    rel_tol: f64,
    #[serde(default = "default_max_horizon")]
    max_horizon: f64,
    #[serde(default)]
    workers: Option<usize>,
}

fn default_paths() -> usize {
    DEFAULT_PATHS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_rel_tol() -> f64 {
    DEFAULT_REL_TOL
}
fn default_max_horizon() -> f64 {
    DEFAULT_MAX_HORIZON
}

impl TryFrom<McDoc> for McControls {
    type Error = Error;

    fn try_from(d: McDoc) -> Result<Self> {
        let mc = Self {
            paths: d.paths,
            seed: d.seed,
            rel_tol: d.rel_tol,
            max_horizon: d.max_horizon,
            workers: d.workers,
        };
        mc.validate()?;
        Ok(mc)
    }
}

impl McControls {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(invalid("paths must be >= 1"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(invalid("rel_tol must lie in (0, 1)"));
        }
        if !(self.max_horizon > 0.0 && self.max_horizon.is_finite()) {
            return Err(invalid("max_horizon must be finite and > 0"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(
        default,
        deserialize_with = "checked_model",
        skip_serializing_if = "Option::is_none"
    )]
    pub model: Option<RegimeModel>,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, deserialize_with = "checked_regime")]
    pub start_regime: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub mc: McControls,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    /// A verify config for `suite` with default controls.
    pub fn verify(suite: Suite) -> Self {
        Self {
            model: None,
            task: Task::Verify,
            suite: Some(suite),
            start_regime: 0,
            grid: GridSpec::default(),
            mc: McControls::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

// Model fields are checked one by one while deserializing, so that a
// violated invariant is reported at the position of the offending value.

#[derive(Deserialize)]
#[serde(try_from = "LevyBlock")]
struct CheckedBlock(LevyBlock);

impl TryFrom<LevyBlock> for CheckedBlock {
    type Error = Error;

    fn try_from(b: LevyBlock) -> Result<Self> {
        b.validate()?;
        Ok(Self(b))
    }
}

#[derive(Deserialize)]
#[serde(try_from = "ScalarLaw")]
struct CheckedLaw(ScalarLaw);

impl TryFrom<ScalarLaw> for CheckedLaw {
    type Error = Error;

    fn try_from(l: ScalarLaw) -> Result<Self> {
        l.validate()?;
        Ok(Self(l))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    variant: VariantKind,
    #[serde(deserialize_with = "checked_rates")]
    lambda: [f64; 2],
    blocks: [CheckedBlock; 2],
    laws: [CheckedLaw; 2],
}

fn checked_rates<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<[f64; 2], D::Error> {
    let rates = <[f64; 2]>::deserialize(de)?;
    for (i, r) in rates.iter().enumerate() {
        if !(r.is_finite() && *r > 0.0) {
            return Err(D::Error::custom(invalid(format!("lambda{i} must be > 0"))));
        }
    }
    Ok(rates)
}

fn checked_model<'de, D: Deserializer<'de>>(
    de: D,
) -> std::result::Result<Option<RegimeModel>, D::Error> {
    let Some(doc) = Option::<ModelDoc>::deserialize(de)? else {
        return Ok(None);
    };
    let [CheckedLaw(l0), CheckedLaw(l1)] = doc.laws;
    let variant = match doc.variant {
        VariantKind::Renewal => Variant::Renewal { g0: l0, g1: l1 },
        VariantKind::Jump => Variant::Jump { h0: l0, h1: l1 },
    };
    RegimeModel::new(
        doc.lambda[0],
        doc.lambda[1],
        doc.blocks[0].0,
        doc.blocks[1].0,
        variant,
    )
    .map(Some)
    .map_err(D::Error::custom)
}

fn checked_regime<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<usize, D::Error> {
    let r = usize::deserialize(de)?;
    if r > 1 {
        return Err(D::Error::custom(invalid("start_regime must be 0 or 1")));
    }
    Ok(r)
}

/// Failure to turn a document into a [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    /// Malformed JSON, a wrong type, a missing field or an unknown key.
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed document whose values violate an invariant. The position
    /// is absent for cross-field requirements.
    #[error("validation error at {path}{}: {message}", position(*.line, *.column))]
    Validation {
        path: String,
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },
}

fn position(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        _ => String::new(),
    }
}

impl ConfigError {
    pub fn message(&self) -> &str {
        match self {
            ConfigError::Parse { message, .. } | ConfigError::Validation { message, .. } => message,
        }
    }

    fn requirement(path: &str, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            path: path.into(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

const VALIDATION_PREFIX: &str = "invalid parameters: ";

fn classify(err: serde_path_to_error::Error<serde_json::Error>) -> ConfigError {
    let path = match err.path().to_string() {
        p if p == "." => "$".to_string(),
        p => p,
    };
    let inner = err.into_inner();
    let (line, column) = (inner.line(), inner.column());
    let text = inner.to_string();
    let bare = match text.rfind(" at line ") {
        Some(k) => &text[..k],
        None => &text[..],
    };
    match bare.strip_prefix(VALIDATION_PREFIX) {
        Some(message) => ConfigError::Validation {
            path,
            line: Some(line),
            column: Some(column),
            message: message.to_string(),
        },
        None => ConfigError::Parse {
            path,
            line,
            column,
            message: bare.to_string(),
        },
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(classify)?;
    de.end().map_err(|e| ConfigError::Parse {
        path: "$".into(),
        line: e.line(),
        column: e.column(),
        message: "trailing characters after the document".into(),
    })?;
    check_requirements(&cfg)?;
    Ok(cfg)
}

/// Cross-field requirements of each task.
pub fn check_requirements(cfg: &RunConfig) -> std::result::Result<(), ConfigError> {
    cfg.mc
        .validate()
        .map_err(|e| ConfigError::requirement("mc", strip(&e)))?;
    let task = cfg.task.name();
    let need_model = |kind: Option<VariantKind>| -> std::result::Result<&RegimeModel, ConfigError> {
        let m = cfg.model.as_ref().ok_or_else(|| {
            ConfigError::requirement("model", format!("task {task} requires a model"))
        })?;
        match kind {
            Some(k) if m.kind() != k => Err(ConfigError::requirement(
                "model.variant",
                format!("task {task} requires a {} model", variant_name(k)),
            )),
            _ => Ok(m),
        }
    };
    let need_axis = |axis: &Option<Axis>, name: &str| {
        if axis.is_none() {
            Err(ConfigError::requirement(
                &format!("grid.{name}"),
                format!("task {task} requires grid.{name}"),
            ))
        } else {
            Ok(())
        }
    };
    let g = &cfg.grid;
    match cfg.task {
        Task::Transform => {
            let m = need_model(None)?;
            need_axis(&g.t, "t")?;
            match m.kind() {
                VariantKind::Renewal => need_axis(&g.theta, "theta")?,
                VariantKind::Jump => need_axis(&g.xi, "xi")?,
            }
        }
        Task::LimitDensity => {
            need_model(Some(VariantKind::Renewal))?;
            need_axis(&g.x, "x")?;
        }
        Task::Expfun => {
            need_model(Some(VariantKind::Jump))?;
            need_axis(&g.x, "x")?;
        }
        Task::Simulate => {
            need_model(None)?;
            need_axis(&g.t, "t")?;
        }
        Task::Verify => match cfg.suite {
            None => {
                return Err(ConfigError::requirement(
                    "suite",
                    "task verify requires a suite",
                ))
            }
            Some(Suite::Model) => {
                need_model(None)?;
            }
            Some(_) => {}
        },
    }
    Ok(())
}

fn variant_name(k: VariantKind) -> &'static str {
    match k {
        VariantKind::Renewal => "renewal",
        VariantKind::Jump => "jump",
    }
}

fn strip(e: &Error) -> String {
    let s = e.to_string();
    match s.strip_prefix(VALIDATION_PREFIX) {
        Some(m) => m.to_string(),
        None => s,
    }
}
