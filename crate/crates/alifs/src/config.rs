//! TOML run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use alifs_core::sim::{BurnIn, CouplingConfig, SimConfig};
use alifs_core::{ModelSpec, MomentMethod};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Failure to read or parse a configuration file.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    /// The file could not be read.
    #[error("cannot read {path}: {source}")]
    Io {
        /// File path.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// TOML syntax or schema error.
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        /// File path (or `<string>`).
        path: String,
        /// 1-based line.
        line: usize,
        /// 1-based column.
        column: usize,
        /// Parser message, naming the offending field.
        message: String,
    },
    /// Parsed but semantically invalid.
    #[error("{field}: {message}")]
    Invalid {
        /// Dotted field path.
        field: String,
        /// What is wrong.
        message: String,
    },
}

/// `lo:hi:n` grid of `θ` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    /// First point.
    pub lo: f64,
    /// Last point.
    pub hi: f64,
    /// Number of points.
    pub n: usize,
}

impl ThetaGrid {
    /// The grid points, evenly spaced.
    pub fn points(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: 4.0,
            n: 81,
        }
    }
}

impl fmt::Display for ThetaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.lo, self.hi, self.n)
    }
}

impl FromStr for ThetaGrid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:n, got {s:?}"));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|e| format!("hi: {e}"))?;
        let n: usize = parts[2].trim().parse().map_err(|e| format!("n: {e}"))?;
        if !(lo >= 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
            return Err(format!("need 0 ≤ lo ≤ hi, got {lo}:{hi}"));
        }
        Ok(Self { lo, hi, n })
    }
}

impl Serialize for ThetaGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ThetaGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Burn-in setting: `"auto"` or a step count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BurnInSetting {
    /// Coupled burn-in.
    #[default]
    Auto,
    /// Fixed number of steps.
    Fixed(u64),
}

impl From<BurnInSetting> for BurnIn {
    fn from(b: BurnInSetting) -> Self {
        match b {
            BurnInSetting::Auto => BurnIn::Auto,
            BurnInSetting::Fixed(n) => BurnIn::Fixed(n),
        }
    }
}

impl FromStr for BurnInSetting {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("expected \"auto\" or a step count, got {s:?}"))
    }
}

impl Serialize for BurnInSetting {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Fixed(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for BurnInSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Count(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) => w.parse().map_err(serde::de::Error::custom),
            Raw::Count(n) => Ok(Self::Fixed(n)),
        }
    }
}

/// Options of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeOptions {
    /// Grid for `ρ(θ)` and the degeneracy scan.
    pub theta_grid: ThetaGrid,
    /// Root-finding tolerance.
    pub tolerance: f64,
    /// How Cramér entries are evaluated.
    pub moment_method: MomentMethod,
    /// Function draws for shape frequencies.
    pub shape_samples: usize,
    /// Function draws for the AL bound check.
    pub bound_samples: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            theta_grid: ThetaGrid::default(),
            tolerance: 1e-12,
            moment_method: MomentMethod::Auto,
            shape_samples: 10_000,
            bound_samples: 200,
        }
    }
}

/// Options of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    /// Stationary samples.
    pub samples: usize,
    /// Burn-in policy.
    pub burn_in: BurnInSetting,
    /// Thinning stride.
    pub stride: usize,
    /// Independent shards; fixes the result regardless of thread count.
    pub shards: usize,
    /// Coupling parameters.
    pub coupling: CouplingConfig,
    /// Hill order statistics; default from the sample size.
    pub hill_k: Option<usize>,
    /// Thresholds of the tail curve.
    pub tail_points: usize,
    /// Also write `samples.csv`.
    pub samples_csv: bool,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            burn_in: BurnInSetting::Auto,
            stride: 1,
            shards: 16,
            coupling: CouplingConfig::default(),
            hill_k: None,
            tail_points: 40,
            samples_csv: false,
        }
    }
}

impl SimulateOptions {
    /// Core simulation parameters.
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            burn_in: self.burn_in.into(),
            stride: self.stride,
            coupling: self.coupling,
        }
    }
}

/// Known values to check against in `verify`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Expectations {
    /// Expected `κ`.
    pub kappa: Option<f64>,
    /// Expected `κ₋`.
    pub kappa_minus: Option<f64>,
    /// Expected `κ₊`.
    pub kappa_plus: Option<f64>,
    /// Absolute tolerance on the exponents.
    pub tolerance: Option<f64>,
}

/// Options of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    /// Paths for the martingale and Gelfand checks.
    pub paths: usize,
    /// Horizon of the martingale check.
    pub martingale_horizon: usize,
    /// Horizon of the Gelfand check.
    pub gelfand_horizon: usize,
    /// `θ` values of the Gelfand check.
    pub gelfand_thetas: Vec<f64>,
    /// Relative tolerance of the Gelfand check.
    pub gelfand_tolerance: f64,
    /// Draws of the comparison-bound check.
    pub bound_draws: usize,
    /// Maximal depth of the comparison-bound check.
    pub bound_depth: usize,
    /// Allowed `max/min` ratio of a tail curve over its window.
    pub flatness_factor: f64,
    /// Known values.
    pub expect: Expectations,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            paths: 20_000,
            martingale_horizon: 5,
            gelfand_horizon: 30,
            gelfand_thetas: vec![0.5, 1.0],
            gelfand_tolerance: 0.05,
            bound_draws: 2_000,
            bound_depth: 50,
            flatness_factor: 2.0,
            expect: Expectations::default(),
        }
    }
}

/// Whole run configuration. `threads` and `out` affect where and how fast a
/// run happens but not its results, so reports leave them out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; `None` uses all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Fail `verify` on advisory checks too.
    #[serde(default)]
    pub strict: bool,
    /// The model.
    pub model: ModelSpec,
    /// `analyze` options.
    #[serde(default)]
    pub analyze: AnalyzeOptions,
    /// `simulate` options.
    #[serde(default)]
    pub simulate: SimulateOptions,
    /// `verify` options.
    #[serde(default)]
    pub verify: VerifyOptions,
}

impl RunConfig {
    /// Configuration with defaults around a model.
    pub fn new(model: ModelSpec) -> Self {
        Self {
            seed: None,
            threads: None,
            out: None,
            strict: false,
            model,
            analyze: AnalyzeOptions::default(),
            simulate: SimulateOptions::default(),
            verify: VerifyOptions::default(),
        }
    }

    /// Parses TOML text; `origin` names the source in diagnostics.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            ConfigError::Parse {
                path: origin.to_string(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses a file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Serializes to TOML; parsing the result gives back an equal value.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field: &str, message: String| ConfigError::Invalid {
            field: field.to_string(),
            message,
        };
        self.model
            .validate()
            .map_err(|e| invalid("model", e.to_string()))?;
        if self.threads == Some(0) {
            return Err(invalid("threads", "must be at least 1".into()));
        }
        if self.simulate.shards == 0 {
            return Err(invalid("simulate.shards", "must be at least 1".into()));
        }
        if self.simulate.stride == 0 {
            return Err(invalid("simulate.stride", "must be at least 1".into()));
        }
        if !(self.analyze.tolerance > 0.0) {
            return Err(invalid("analyze.tolerance", "must be positive".into()));
        }
        if self.verify.martingale_horizon == 0
            || self.verify.gelfand_horizon == 0
            || self.verify.bound_depth == 0
        {
            return Err(invalid(
                "verify",
                "horizons and depths must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// The seed, required by `simulate` and `verify`.
    pub fn require_seed(&self) -> Result<u64, ConfigError> {
        self.seed.ok_or_else(|| ConfigError::Invalid {
            field: "seed".into(),
            message: "a seed is required (set `seed` or pass --seed)".into(),
        })
    }

    /// The configuration as echoed in reports: everything that determines
    /// the results, with defaults filled in.
    pub fn echo(&self) -> RunConfig {
        RunConfig {
            threads: None,
            out: None,
            ..self.clone()
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alifs_core::ScalarDist;

    const ARCH: &str = r#"
seed = 7

[model]
family = "arch1"
beta = 1.0
lambda = 1.0
z = { dist = "gaussian", mean = 0.0, sd = 1.0 }

[simulate]
samples = 1000
burn_in = "auto"
"#;

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::from_toml_str(ARCH, "arch.toml").unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.simulate.samples, 1000);
        assert_eq!(c.simulate.shards, 16);
        assert_eq!(c.analyze.theta_grid, ThetaGrid::default());
        assert!(matches!(c.model, ModelSpec::Arch1 { .. }));
    }

    #[test]
    fn round_trip_is_lossless() {
        let mut c = RunConfig::from_toml_str(ARCH, "arch.toml").unwrap();
        c.simulate.burn_in = BurnInSetting::Fixed(500);
        c.simulate.hill_k = Some(123);
        c.analyze.theta_grid = ThetaGrid {
            lo: 0.1,
            hi: 0.30000000000000004,
            n: 7,
        };
        c.analyze.moment_method = MomentMethod::MonteCarlo {
            samples: 10,
            seed: 3,
        };
        c.verify.expect.kappa = Some(0.6942419136306173);
        c.out = Some("runs/a".into());
        let text = c.to_toml_string();
        let back = RunConfig::from_toml_str(&text, "echo").unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml_string(), text);
    }

    #[test]
    fn custom_model_round_trip() {
        let text = r#"
[model]
family = "custom_two_slope"
perturbation = { rule = "signed_shift" }
b = { dist = "point_mass", value = 1.0 }
slopes = { coupling = "independent", minus = { dist = "two_point", v1 = -0.5, p1 = 0.5, v2 = 1.2 }, plus = { dist = "two_point", v1 = 2.0, p1 = 0.5, v2 = 0.1 } }
"#;
        let c = RunConfig::from_toml_str(text, "c").unwrap();
        let back = RunConfig::from_toml_str(&c.to_toml_string(), "c").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let bad = "seed = 1\n[model]\nfamily = \"affine\"\na = { dist = \"point_mass\", value = 0.5 }\nb = { dist = \"point_mass\", valu = 1.0 }\n";
        match RunConfig::from_toml_str(bad, "bad.toml") {
            Err(ConfigError::Parse { line, message, .. }) => {
                // Tagged model tables are buffered by serde: the span is the table's.
                assert_eq!(line, 2, "{message}");
                assert!(message.contains("value"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let bad = "[simulate]\nsampels = 3\n[model]\nfamily = \"affine\"\na = { dist = \"point_mass\", value = 0.5 }\nb = { dist = \"point_mass\", value = 1.0 }\n";
        match RunConfig::from_toml_str(bad, "bad.toml") {
            Err(ConfigError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("sampels"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let invalid = RunConfig {
            simulate: SimulateOptions {
                shards: 0,
                ..Default::default()
            },
            ..RunConfig::new(ModelSpec::Affine {
                a: ScalarDist::PointMass { value: 0.5 },
                b: ScalarDist::PointMass { value: 1.0 },
            })
        };
        assert!(matches!(
            invalid.validate(),
            Err(ConfigError::Invalid { .. })
        ));
    }

    #[test]
    fn grid_and_burn_in_syntax() {
        let g: ThetaGrid = "0.5:2:4".parse().unwrap();
        assert_eq!(g.points(), [0.5, 1.0, 1.5, 2.0]);
        assert!("1:0:3".parse::<ThetaGrid>().is_err());
        assert!("1:2".parse::<ThetaGrid>().is_err());
        assert_eq!("auto".parse::<BurnInSetting>(), Ok(BurnInSetting::Auto));
        assert_eq!(
            "250".parse::<BurnInSetting>(),
            Ok(BurnInSetting::Fixed(250))
        );
        assert!("soon".parse::<BurnInSetting>().is_err());
    }
}
