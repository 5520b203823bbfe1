//! Check records and suite reports.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::Suite;
use crate::stats::MeanSe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|estimate − analytic| / se`.
    ZScore,
    /// Kolmogorov–Smirnov distance.
    Ks,
    RelativeError,
    AbsoluteError,
    /// Number of violations.
    Count,
    /// 0 when the computed verdict equals the expected one, else 1.
    Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub kind: CheckKind,
    #[serde(with = "lossless_opt")]
    pub analytic: Option<f64>,
    #[serde(with = "lossless_opt")]
    pub estimate: Option<f64>,
    #[serde(with = "lossless_opt")]
    pub se: Option<f64>,
    pub samples: Option<usize>,
    #[serde(with = "lossless")]
    pub statistic: f64,
    #[serde(with = "lossless")]
    pub threshold: f64,
    pub pass: bool,
    pub skipped: bool,
    pub detail: Option<String>,
}

impl CheckRecord {
    fn base(name: impl Into<String>, kind: CheckKind, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            kind,
            analytic: None,
            estimate: None,
            se: None,
            samples: None,
            statistic,
            threshold,
            pass: statistic <= threshold,
            skipped: false,
            detail: None,
        }
    }

    pub fn z_score(
        name: impl Into<String>,
        analytic: f64,
        mc: MeanSe,
        samples: usize,
        threshold: f64,
    ) -> Self {
        Self {
            analytic: Some(analytic),
            estimate: Some(mc.mean),
            se: Some(mc.se),
            samples: Some(samples),
            ..Self::base(name, CheckKind::ZScore, mc.z_score(analytic), threshold)
        }
    }

    pub fn ks(name: impl Into<String>, distance: f64, samples: usize, threshold: f64) -> Self {
        Self {
            samples: Some(samples),
            ..Self::base(name, CheckKind::Ks, distance, threshold)
        }
    }

    /// Relative error `|estimate − reference| / |reference|`.
    pub fn relative(name: impl Into<String>, reference: f64, estimate: f64, tol: f64) -> Self {
        let err = (estimate - reference).abs() / reference.abs();
        Self {
            analytic: Some(reference),
            estimate: Some(estimate),
            ..Self::base(name, CheckKind::RelativeError, err, tol)
        }
    }

    /// Largest error over a set of comparisons, already reduced by the caller.
    pub fn max_error(
        name: impl Into<String>,
        kind: CheckKind,
        error: f64,
        tol: f64,
        samples: usize,
    ) -> Self {
        Self {
            samples: Some(samples),
            ..Self::base(name, kind, error, tol)
        }
    }

    pub fn count(name: impl Into<String>, violations: usize, samples: usize) -> Self {
        Self {
            samples: Some(samples),
            ..Self::base(name, CheckKind::Count, violations as f64, 0.0)
        }
    }

    pub fn verdict(name: impl Into<String>, expected: &str, got: &str) -> Self {
        let mismatch = if expected == got { 0.0 } else { 1.0 };
        Self {
            detail: Some(format!("expected {expected}, got {got}")),
            ..Self::base(name, CheckKind::Verdict, mismatch, 0.0)
        }
    }

    /// A check that does not apply; it passes by vacuity.
    pub fn skipped(name: impl Into<String>, kind: CheckKind, reason: impl Into<String>) -> Self {
        Self {
            skipped: true,
            detail: Some(reason.into()),
            ..Self::base(name, kind, 0.0, 0.0)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Numbers, or the strings `"inf"`, `"-inf"` and `"nan"` for values JSON
/// cannot hold.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonFloat {
    Number(f64),
    Text(String),
}

impl From<f64> for JsonFloat {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            JsonFloat::Number(v)
        } else if v.is_nan() {
            JsonFloat::Text("nan".into())
        } else if v > 0.0 {
            JsonFloat::Text("inf".into())
        } else {
            JsonFloat::Text("-inf".into())
        }
    }
}

impl JsonFloat {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            JsonFloat::Number(v) => Ok(v),
            JsonFloat::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!(
                    "expected a number, \"inf\", \"-inf\" or \"nan\", got {other:?}"
                ))),
            },
        }
    }
}

mod lossless {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        JsonFloat::from(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        JsonFloat::deserialize(d)?.value()
    }
}

mod lossless_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(JsonFloat::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<JsonFloat>::deserialize(d)?
            .map(JsonFloat::value)
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub pass: bool,
}

/// Outcome of a verify run. Contains nothing that depends on timing or on
/// the number of workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub suite: Suite,
    pub seed: u64,
    pub paths: usize,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl McReport {
    pub fn new(suite: Suite, seed: u64, paths: usize, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let skipped = checks.iter().filter(|c| c.skipped).count();
        let summary = Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
            skipped,
            pass: passed == checks.len(),
        };
        Self {
            suite,
            seed,
            paths,
            checks,
            summary,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks whose name starts with `prefix`.
    pub fn checks_with_prefix<'a>(
        &'a self,
        prefix: &'a str,
    ) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.checks
            .iter()
            .filter(move |c| c.name.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
