//! Scenario configuration files and the driver that runs verification suites.
//!
//! Scenarios are TOML. Every table rejects unknown keys, and schema errors
//! carry the dotted path of the offending key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bundle::{build_bundle_with, BundleOptions, FamilySpec, FiberBundle, Profile, StabilityType};
use crate::error::{Error, Result};
use crate::evolution::{EvolutionFamily, EvolutionSemigroup, TimeFamily};
use crate::grid::GridMeasure;
use crate::numerics::{Matrix, Vector, C64};
use crate::report::{ReportFormat, VerificationReport};
use crate::space::FiberFunction;
use crate::suites;

/// Tolerance key read by the `identify` subcommand.
pub const IDENTIFY_TOLERANCE: &str = "identify";

fn default_p() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub bundle: BundleConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    /// Per-suite override of every upper-bound tolerance in that suite.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    Interval { a: f64, b: f64, nodes: usize },
    Circle { length: f64, nodes: usize },
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::Interval { a: 0.0, b: 1.0, nodes: 33 }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<GridMeasure> {
        match *self {
            GridConfig::Interval { a, b, nodes } => GridMeasure::uniform_interval(a, b, nodes),
            GridConfig::Circle { length, nodes } => GridMeasure::circle(length, nodes),
        }
    }
}

/// Real rows, or `{ re = [...], im = [...] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixConfig {
    Real(Vec<Vec<f64>>),
    Complex { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

impl MatrixConfig {
    pub fn to_matrix(&self) -> std::result::Result<Matrix, String> {
        let (re, im) = match self {
            MatrixConfig::Real(re) => (re, None),
            MatrixConfig::Complex { re, im } => (re, Some(im)),
        };
        let d = re.len();
        if d == 0 {
            return Err("matrix must have at least one row".into());
        }
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            if re[i].len() != d || im.is_some_and(|im| im.len() != d || im[i].len() != d) {
                return Err(format!("matrix must be square ({d}×{d})"));
            }
            for j in 0..d {
                data.push(C64::new(re[i][j], im.map_or(0.0, |im| im[i][j])));
            }
        }
        Matrix::from_row_major(d, data).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BundleConfig {
    Constant {
        matrix: MatrixConfig,
        #[serde(default)]
        stability: Option<StabilityType>,
    },
    ScalarProfile {
        profile: Profile,
        #[serde(default)]
        stability: Option<StabilityType>,
    },
    MatrixProfile {
        coefficients: Vec<MatrixConfig>,
        #[serde(default)]
        stability: Option<StabilityType>,
    },
    Tabulated {
        path: PathBuf,
        #[serde(default)]
        stability: Option<StabilityType>,
    },
}

impl Default for BundleConfig {
    fn default() -> Self {
        BundleConfig::Constant { matrix: MatrixConfig::Real(vec![vec![-1.0]]), stability: None }
    }
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.to_string(), message: message.into() }
}

impl BundleConfig {
    pub fn stability(&self) -> Option<StabilityType> {
        match self {
            BundleConfig::Constant { stability, .. }
            | BundleConfig::ScalarProfile { stability, .. }
            | BundleConfig::MatrixProfile { stability, .. }
            | BundleConfig::Tabulated { stability, .. } => *stability,
        }
    }

    pub fn family_spec(&self, grid: &GridMeasure, base_dir: &Path) -> Result<FamilySpec> {
        Ok(match self {
            BundleConfig::Constant { matrix, .. } => {
                FamilySpec::Constant(matrix.to_matrix().map_err(|m| config_error("bundle.matrix", m))?)
            }
            BundleConfig::ScalarProfile { profile, .. } => FamilySpec::ScalarProfile(profile.clone()),
            BundleConfig::MatrixProfile { coefficients, .. } => {
                let mats = coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.to_matrix().map_err(|m| config_error(&format!("bundle.coefficients[{i}]"), m)))
                    .collect::<Result<Vec<_>>>()?;
                if mats.is_empty() || mats.iter().any(|m| m.dim() != mats[0].dim()) {
                    return Err(config_error("bundle.coefficients", "need ≥ 1 coefficient, all of one size"));
                }
                FamilySpec::MatrixProfile(mats)
            }
            BundleConfig::Tabulated { path, .. } => FamilySpec::load_tabulated_csv(&base_dir.join(path), grid)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeFamilyConfig {
    Constant { matrix: MatrixConfig },
    Scalar { profile: Profile },
    Commuting { profile: Profile, base: MatrixConfig },
    Tabulated { times: Vec<f64>, matrices: Vec<MatrixConfig> },
}

impl TimeFamilyConfig {
    pub fn build(&self) -> Result<TimeFamily> {
        let m = |c: &MatrixConfig, path: &str| c.to_matrix().map_err(|e| config_error(path, e));
        Ok(match self {
            TimeFamilyConfig::Constant { matrix } => TimeFamily::Constant(m(matrix, "evolution.family.matrix")?),
            TimeFamilyConfig::Scalar { profile } => TimeFamily::Scalar(profile.clone()),
            TimeFamilyConfig::Commuting { profile, base } => {
                TimeFamily::Commuting { profile: profile.clone(), base: m(base, "evolution.family.base")? }
            }
            TimeFamilyConfig::Tabulated { times, matrices } => {
                if times.len() != matrices.len() || times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(config_error(
                        "evolution.family.times",
                        "need increasing times, one matrix per time",
                    ));
                }
                let matrices = matrices
                    .iter()
                    .enumerate()
                    .map(|(i, c)| m(c, &format!("evolution.family.matrices[{i}]")))
                    .collect::<Result<_>>()?;
                TimeFamily::Tabulated { times: times.clone(), matrices }
            }
        })
    }
}

/// Initial datum for the evolution semigroup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `sin(2π s / L) x₀`
    Sine { x0: Vec<f64> },
    Constant { x0: Vec<f64> },
    /// Fiber-function CSV on the circle grid.
    Csv { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub family: TimeFamilyConfig,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_evolution_nodes")]
    pub nodes: usize,
    /// Substep length; defaults to the grid spacing.
    #[serde(default)]
    pub step: Option<f64>,
    pub initial: InitialConfig,
    /// Trajectory length for `evolve`, in grid spacings per frame and frames.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_frames")]
    pub frames: usize,
}

fn default_length() -> f64 {
    1.0
}
fn default_evolution_nodes() -> usize {
    64
}
fn default_stride() -> usize {
    1
}
fn default_frames() -> usize {
    16
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            family: TimeFamilyConfig::Constant { matrix: MatrixConfig::Real(vec![vec![-1.0]]) },
            length: default_length(),
            nodes: default_evolution_nodes(),
            step: None,
            initial: InitialConfig::Sine { x0: vec![1.0] },
            stride: default_stride(),
            frames: default_frames(),
        }
    }
}

impl EvolutionConfig {
    pub fn grid(&self) -> Result<Arc<GridMeasure>> {
        Ok(Arc::new(GridMeasure::circle(self.length, self.nodes)?))
    }

    pub fn semigroup(&self) -> Result<EvolutionSemigroup> {
        let grid = self.grid()?;
        let step = self.step.unwrap_or(self.length / self.nodes as f64);
        let ev = EvolutionFamily::new(self.family.build()?, step)?;
        EvolutionSemigroup::new(ev, grid)
    }

    pub fn initial_function(&self, p: f64, base_dir: &Path) -> Result<FiberFunction> {
        let grid = self.grid()?;
        let length = self.length;
        match &self.initial {
            InitialConfig::Sine { x0 } | InitialConfig::Constant { x0 } if x0.is_empty() => {
                Err(config_error("evolution.initial.x0", "x0 must be non-empty"))
            }
            InitialConfig::Sine { x0 } => {
                let x0 = Vector::from_real(x0);
                FiberFunction::from_fn(grid, p, |s| x0.scale_real((2.0 * std::f64::consts::PI * s / length).sin()))
            }
            InitialConfig::Constant { x0 } => FiberFunction::constant(grid, Vector::from_real(x0), p),
            InitialConfig::Csv { path } => {
                let file = std::fs::File::open(base_dir.join(path))?;
                FiberFunction::read_csv(file, grid, crate::bundle::NormMode::Base, p)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<ReportFormat>,
}

impl ScenarioConfig {
    /// Parses and validates a TOML scenario.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Config { path, message: inner.message().to_string() }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(&path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(config_error("p", "exponent must satisfy 1 ≤ p < ∞"));
        }
        for (i, name) in self.suites.iter().enumerate() {
            if !suites::ALL.contains(&name.as_str()) {
                return Err(config_error(
                    &format!("suites[{i}]"),
                    format!("unknown suite `{name}`; known suites: {}", suites::ALL.join(", ")),
                ));
            }
        }
        for (name, &tol) in &self.tolerances {
            if !suites::ALL.contains(&name.as_str()) && name != IDENTIFY_TOLERANCE {
                return Err(config_error(&format!("tolerances.{name}"), "unknown suite"));
            }
            if !(tol > 0.0) {
                return Err(config_error(&format!("tolerances.{name}"), "tolerance must be positive"));
            }
        }
        Ok(())
    }
}

/// Everything a suite needs, built once from the config.
pub struct ScenarioContext {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
    pub grid: Arc<GridMeasure>,
    pub family: FamilySpec,
    pub bundle: Arc<FiberBundle>,
}

impl ScenarioContext {
    pub fn new(config: ScenarioConfig, base_dir: &Path) -> Result<Self> {
        let grid = Arc::new(config.grid.build().map_err(|e| config_error("grid", e.to_string()))?);
        let family = config.bundle.family_spec(&grid, base_dir)?;
        let opts = BundleOptions { stability: config.bundle.stability(), ..BundleOptions::default() };
        let bundle = Arc::new(build_bundle_with(&family, grid.clone(), &opts).map_err(|e| config_error("bundle", e.to_string()))?);
        Ok(Self { config, base_dir: base_dir.to_path_buf(), grid, family, bundle })
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn p(&self) -> f64 {
        self.config.p
    }

    /// Upper-bound tolerance for a suite, honoring config overrides.
    pub fn tolerance(&self, suite: &str, default: f64) -> f64 {
        self.config.tolerances.get(suite).copied().unwrap_or(default)
    }
}

/// Runs the selected suites (all of them when the list is empty is *not*
/// implied: an empty list runs nothing) and assembles the report in suite
/// name order.
pub fn run_scenario(config: &ScenarioConfig, base_dir: &Path) -> Result<VerificationReport> {
    config.validate()?;
    let echo = serde_json::to_value(config)?;
    let ctx = ScenarioContext::new(config.clone(), base_dir)?;

    let mut names: Vec<&str> = config.suites.iter().map(String::as_str).collect();
    names.sort_unstable();
    names.dedup();

    let results: Vec<(&str, Vec<crate::report::CheckRecord>, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| {
                let ctx = &ctx;
                scope.spawn(move || {
                    let start = Instant::now();
                    let checks = suites::run(name, ctx);
                    (name, checks, start.elapsed().as_secs_f64() * 1e3)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });

    let mut report = VerificationReport::new(echo);
    for (name, checks, ms) in results {
        report.header.suite_runtime_ms.insert(name.to_string(), ms);
        report.extend(checks);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = ScenarioConfig::from_toml_str("suites = [\"semigroup-law\"]\n").unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.p, 2.0);
        assert_eq!(c.grid, GridConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioConfig::from_toml_str("fibre_dim = 3\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("fibre_dim"), "{text}");
        let err = ScenarioConfig::from_toml_str("[grid]\ntopology = \"interval\"\na = 0.0\nb = 1.0\nnodes = 3\nfibre_dim = 2\n")
            .unwrap_err();
        assert!(err.to_string().contains("fibre_dim"), "{err}");
    }

    #[test]
    fn unknown_suite_rejected_with_index() {
        match ScenarioConfig::from_toml_str("suites = [\"semigroup-law\", \"nope\"]\n") {
            Err(Error::Config { path, .. }) => assert_eq!(path, "suites[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(ScenarioConfig::from_toml_str("[tolerances]\nfd-generator = 0.0\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[tolerances]\nidentify = 1e-8\n").is_ok());
    }

    #[test]
    fn bundle_variants_build() {
        let text = r#"
            [grid]
            topology = "interval"
            a = 0.0
            b = 1.0
            nodes = 9

            [bundle]
            kind = "matrix_profile"
            coefficients = [ [[-1.0, 0.0], [0.0, -2.0]], [[0.0, 1.0], [0.0, 0.0]] ]
            stability = { m = 1.0, omega = -0.5 }
        "#;
        let c = ScenarioConfig::from_toml_str(text).unwrap();
        let ctx = ScenarioContext::new(c, Path::new(".")).unwrap();
        assert_eq!(ctx.bundle.dim(), 2);
        assert_eq!(ctx.bundle.stability().omega, -0.5);

        let complex = r#"
            [bundle]
            kind = "constant"
            matrix = { re = [[-1.0]], im = [[2.0]] }
        "#;
        let c = ScenarioConfig::from_toml_str(complex).unwrap();
        let ctx = ScenarioContext::new(c, Path::new(".")).unwrap();
        assert_eq!(ctx.bundle.operators()[0][(0, 0)], C64::new(-1.0, 2.0));
    }
}
