//! Experiment configuration.
//!
//! A configuration is assembled from up to three layers of
//! [`PartialConfig`], later layers winning: built-in defaults, a JSON file
//! (or preset), then command-line flags. [`PartialConfig::resolve`]
//! validates every field before anything runs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::entropy::{MultiplicityPolicy, MultiplicityVector, K_NATURAL, K_SI};
use crate::model::{Axis, AxisLabel, AxisTriple, PopulationTable};
use crate::reservoir::ReservoirMode;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_SPACING_DEG: f64 = 60.0;
pub const DEFAULT_ENSEMBLE: u64 = 100;

/// Preset configurations shipped with the binary.
pub const PRESETS: [(&str, &str); 4] = [
    ("wigner-uniform", include_str!("../../presets/wigner-uniform.json")),
    ("marble-bag", include_str!("../../presets/marble-bag.json")),
    ("quantum-60", include_str!("../../presets/quantum-60.json")),
    (
        "multiplicity-counterexample",
        include_str!("../../presets/multiplicity-counterexample.json"),
    ),
];

#[derive(Debug, thiserror::Error)]
#[error("unknown value `{0}`")]
pub struct ParseEnumError(String);

macro_rules! string_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = ParseEnumError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(ParseEnumError(other.to_string())),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Exact,
    Simulate,
    Drain,
    Quantum,
    Entropy,
    Counterexample,
}

string_enum!(Command {
    "exact" => Command::Exact,
    "simulate" => Command::Simulate,
    "drain" => Command::Drain,
    "quantum" => Command::Quantum,
    "entropy" => Command::Entropy,
    "counterexample" => Command::Counterexample,
});

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        write!(f, "{}", s.as_ref().and_then(|v| v.as_str()).unwrap_or("?"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

string_enum!(Format {
    "json" => Format::Json,
    "csv" => Format::Csv,
});

/// Value of Boltzmann's constant used for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

impl Units {
    pub fn k(self) -> f64 {
        match self {
            Units::Natural => K_NATURAL,
            Units::Si => K_SI,
        }
    }
}

string_enum!(Units {
    "natural" => Units::Natural,
    "si" => Units::Si,
});

string_enum!(MultiplicityPolicy {
    "equal" => MultiplicityPolicy::Equal,
    "proportional" => MultiplicityPolicy::Proportional,
    "proportional-to-counts" => MultiplicityPolicy::Proportional,
});

string_enum!(ReservoirMode {
    "infinite" => ReservoirMode::Infinite,
    "finite" => ReservoirMode::Finite,
});

/// Measurement axes: a coplanar spacing or three explicit unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxesSpec {
    Spacing { spacing_deg: f64 },
    Vectors { a: [f64; 3], b: [f64; 3], c: [f64; 3] },
}

impl AxesSpec {
    pub fn triple(&self) -> crate::Result<AxisTriple> {
        match *self {
            AxesSpec::Spacing { spacing_deg } => Ok(AxisTriple::coplanar(spacing_deg.to_radians())),
            AxesSpec::Vectors { a, b, c } => AxisTriple::new(
                Axis::new(AxisLabel::A, a)?,
                Axis::new(AxisLabel::B, b)?,
                Axis::new(AxisLabel::C, c)?,
            ),
        }
    }
}

/// One configuration layer; unset fields fall through to lower layers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub axes: Option<AxesSpec>,
    pub table: Option<Vec<i64>>,
    pub omegas: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub policy: Option<MultiplicityPolicy>,
    pub epsilon: Option<f64>,
    pub mode: Option<ReservoirMode>,
    pub steps: Option<u32>,
    pub ensemble: Option<u64>,
    pub units: Option<Units>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),+) => {
        PartialConfig { $($field: $top.$field.or($base.$field)),+ }
    };
}

impl PartialConfig {
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Validation(format!("config: {e}")))
    }

    pub fn preset(name: &str) -> Result<Self, ReportError> {
        let (_, text) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| ReportError::Validation(format!("unknown preset `{name}`")))?;
        PartialConfig::from_json(text)
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: PartialConfig) -> PartialConfig {
        let base = self;
        overlay!(base, top; command, axes, table, omegas, samples, seed, policy, epsilon, mode, steps, ensemble, units, format, out)
    }

    pub fn resolve(self) -> Result<ExperimentConfig, ReportError> {
        let invalid = |msg: String| Err(ReportError::Validation(msg));

        let Some(command) = self.command else {
            return invalid("no command given".into());
        };

        let table = match self.table {
            None => PopulationTable::uniform(1),
            Some(v) => {
                if v.len() != 8 {
                    return invalid(format!("table needs 8 counts, got {}", v.len()));
                }
                if let Some(n) = v.iter().find(|&&n| n < 0) {
                    return invalid(format!("negative count {n} in table"));
                }
                let counts: [u64; 8] = std::array::from_fn(|i| v[i] as u64);
                PopulationTable::new(counts)
            }
        };
        let total = table.total()?;

        let omegas = match self.omegas {
            None => None,
            Some(v) => {
                let arr: [f64; 8] = v.try_into().map_err(|v: Vec<f64>| {
                    ReportError::Validation(format!("omegas needs 8 values, got {}", v.len()))
                })?;
                Some(MultiplicityVector::new(arr)?)
            }
        };

        let axes = self.axes.unwrap_or(AxesSpec::Spacing {
            spacing_deg: DEFAULT_SPACING_DEG,
        });
        if let AxesSpec::Spacing { spacing_deg } = axes {
            if !spacing_deg.is_finite() {
                return invalid(format!("axes spacing {spacing_deg} is not finite"));
            }
        }
        axes.triple()?;

        let samples = self.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return invalid("samples must be at least 1".into());
        }
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return invalid(format!("epsilon {epsilon} must be finite and nonnegative"));
        }
        let steps = self.steps.unwrap_or(1);
        if steps == 0 {
            return invalid("steps must be at least 1".into());
        }
        let ensemble = self.ensemble.unwrap_or(DEFAULT_ENSEMBLE);
        if ensemble == 0 {
            return invalid("ensemble must be at least 1".into());
        }
        let mode = self.mode.unwrap_or(ReservoirMode::Infinite);
        let policy = self.policy.unwrap_or_default();

        match command {
            Command::Exact | Command::Simulate | Command::Drain if total == 0 => {
                return invalid("table total must be positive".into());
            }
            Command::Simulate if mode == ReservoirMode::Finite && samples > total => {
                return invalid(format!("cannot draw {samples} pairs from a bag of {total}"));
            }
            Command::Quantum => {
                if let AxesSpec::Spacing { spacing_deg } = axes {
                    let last = spacing_deg * steps as f64;
                    if !(spacing_deg > 0.0 && last < 180.0) {
                        return invalid(format!(
                            "scan angles {spacing_deg}..{last} degrees must lie strictly between 0 and 180"
                        ));
                    }
                }
            }
            Command::Entropy if omegas.is_none() => {
                MultiplicityVector::from_table(&table, policy)?;
            }
            _ => {}
        }

        Ok(ExperimentConfig {
            command,
            axes,
            table,
            omegas,
            samples,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            policy,
            epsilon,
            mode,
            steps,
            ensemble,
            units: self.units.unwrap_or_default(),
            format: self.format.unwrap_or_default(),
            out: self.out,
        })
    }
}

/// A fully validated configuration, echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub axes: AxesSpec,
    /// Population counts (or bag contents); uniform ones when not given.
    pub table: PopulationTable,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omegas: Option<MultiplicityVector>,
    pub samples: u64,
    pub seed: u64,
    pub policy: MultiplicityPolicy,
    pub epsilon: f64,
    pub mode: ReservoirMode,
    /// Number of points in a quantum scan.
    pub steps: u32,
    /// Number of seeds in drain ensembles.
    pub ensemble: u64,
    pub units: Units,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        PartialConfig {
            command: Some(command),
            ..Default::default()
        }
        .resolve()
        .expect("defaults are valid")
    }
}
