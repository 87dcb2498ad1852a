//! Verification reports and their json / csv / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Acceptance rule for an observed value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Threshold {
    AtMost { value: f64 },
    AtLeast { value: f64 },
    Within { lo: f64, hi: f64 },
    /// Boolean check; observed is 1 when it holds.
    Holds,
}

impl Threshold {
    pub fn accepts(&self, observed: f64) -> bool {
        match *self {
            Threshold::AtMost { value } => observed <= value,
            Threshold::AtLeast { value } => observed >= value,
            Threshold::Within { lo, hi } => observed >= lo && observed <= hi,
            Threshold::Holds => observed == 1.0,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Threshold::AtMost { value } => format!("<= {value:e}"),
            Threshold::AtLeast { value } => format!(">= {value}"),
            Threshold::Within { lo, hi } => format!("in [{lo}, {hi}]"),
            Threshold::Holds => "holds".to_string(),
        }
    }
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    #[serde(with = "float")]
    pub error: f64,
    /// `log2(e_prev / e) / log2(h_prev / h)`; absent for the first row.
    #[serde(with = "float::option")]
    pub observed_order: Option<f64>,
}

/// Builds a convergence table from step sizes and errors.
pub fn convergence_table(hs: &[f64], errors: &[f64]) -> Vec<ConvergenceRow> {
    hs.iter()
        .zip(errors)
        .enumerate()
        .map(|(i, (&h, &e))| ConvergenceRow {
            h,
            error: e,
            observed_order: (i > 0).then(|| (errors[i - 1] / e).ln() / (hs[i - 1] / h).ln()),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    /// The identity or property the check exercises.
    pub anchor: String,
    #[serde(with = "float")]
    pub observed: f64,
    pub threshold: Threshold,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergenceRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(suite: &str, name: impl Into<String>, anchor: &str, observed: f64, threshold: Threshold) -> Self {
        Self {
            suite: suite.to_string(),
            name: name.into(),
            anchor: anchor.to_string(),
            observed,
            threshold,
            pass: threshold.accepts(observed),
            convergence: Vec::new(),
            detail: None,
        }
    }

    pub fn flag(suite: &str, name: impl Into<String>, anchor: &str, holds: bool) -> Self {
        Self::new(suite, name, anchor, if holds { 1.0 } else { 0.0 }, Threshold::Holds)
    }

    /// A check that could not run because of a numerical error.
    pub fn failure(suite: &str, name: impl Into<String>, anchor: &str, error: &crate::Error) -> Self {
        let mut c = Self::new(suite, name, anchor, f64::NAN, Threshold::Holds);
        c.pass = false;
        c.detail = Some(error.to_string());
        c
    }

    pub fn with_convergence(mut self, rows: Vec<ConvergenceRow>) -> Self {
        self.convergence = rows;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Non-deterministic metadata, kept apart from the check content.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub generated_at_unix: u64,
    pub tool: String,
    /// Wall-clock milliseconds per suite.
    pub suite_runtime_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub overall_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub header: ReportHeader,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

/// The deterministic part of a report, serialized in field order.
#[derive(Serialize)]
struct ReportBody<'a> {
    config: &'a serde_json::Value,
    checks: &'a [CheckRecord],
    summary: &'a Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl Default for VerificationReport {
    fn default() -> Self {
        Self::new(serde_json::Value::Null)
    }
}

impl VerificationReport {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            header: ReportHeader {
                generated_at_unix: std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                tool: format!("lpfiber {}", env!("CARGO_PKG_VERSION")),
                suite_runtime_ms: BTreeMap::new(),
            },
            config,
            checks: Vec::new(),
            summary: Summary { total: 0, passed: 0, failed: 0, overall_pass: true },
        }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.checks.push(check);
        self.refresh_summary();
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckRecord>) {
        self.checks.extend(checks);
        self.refresh_summary();
    }

    fn refresh_summary(&mut self) {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        self.summary = Summary {
            total: self.checks.len(),
            passed,
            failed: self.checks.len() - passed,
            overall_pass: passed == self.checks.len(),
        };
    }

    pub fn overall_pass(&self) -> bool {
        self.summary.overall_pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn suite_checks<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.checks.iter().filter(move |c| c.suite == suite)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Json of everything except the header; byte-stable for a fixed config and seed.
    pub fn deterministic_json(&self) -> Result<String> {
        let body = ReportBody { config: &self.config, checks: &self.checks, summary: &self.summary };
        Ok(serde_json::to_string_pretty(&body)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "kind", "suite", "check", "anchor", "observed", "threshold", "pass", "h", "error",
            "observed_order",
        ])?;
        for c in &self.checks {
            w.write_record([
                "check",
                &c.suite,
                &c.name,
                &c.anchor,
                &format!("{:e}", c.observed),
                &c.threshold.describe(),
                if c.pass { "true" } else { "false" },
                "",
                "",
                "",
            ])?;
            for row in &c.convergence {
                w.write_record([
                    "convergence",
                    &c.suite,
                    &c.name,
                    &c.anchor,
                    "",
                    "",
                    "",
                    &format!("{:e}", row.h),
                    &format!("{:e}", row.error),
                    &row.observed_order.map(|o| format!("{o:.4}")).unwrap_or_default(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} checks: {} passed, {} failed -> {}",
            s.total,
            s.passed,
            s.failed,
            if s.overall_pass { "PASS" } else { "FAIL" }
        );
        let mut suite = "";
        for c in &self.checks {
            if c.suite != suite {
                suite = &c.suite;
                let _ = writeln!(out, "\n[{suite}]");
            }
            let _ = writeln!(
                out,
                "  {:4} {:<44} observed {:<12.4e} {}",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.observed,
                c.threshold.describe()
            );
            if let Some(d) = &c.detail {
                let _ = writeln!(out, "       {d}");
            }
            if !c.convergence.is_empty() {
                let _ = writeln!(out, "       {:>12} {:>14} {:>8}", "h", "error", "order");
                for r in &c.convergence {
                    let order = r.observed_order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
                    let _ = writeln!(out, "       {:>12.4e} {:>14.6e} {:>8}", r.h, r.error, order);
                }
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Text => Ok(self.to_text()),
        }
    }
}

/// Writes a report to `path` in the given format.
pub fn emit_report(report: &VerificationReport, format: ReportFormat, path: &std::path::Path) -> Result<()> {
    let text = report.render(format)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Floats that may be NaN or infinite, written as the strings `"NaN"`,
/// `"inf"` and `"-inf"` so json keeps them.
mod float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            ser.serialize_f64(*x)
        } else if x.is_nan() {
            ser.serialize_str("NaN")
        } else if *x > 0.0 {
            ser.serialize_str("inf")
        } else {
            ser.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("expected a number, got `{other}`"))),
            },
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(x: &Option<f64>, ser: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => super::serialize(x, ser),
                None => ser.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<f64>, D::Error> {
            #[derive(Deserialize)]
            struct Wrap(#[serde(with = "super")] f64);
            Ok(Option::<Wrap>::deserialize(de)?.map(|w| w.0))
        }
    }
}
