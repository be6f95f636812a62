//! TOML run configuration.
//!
//! Every section and key is optional; missing values take the defaults below.
//! Unknown keys are rejected so that a typo never silently falls back to a
//! default. The resolved configuration (defaults plus overrides) is written
//! next to the outputs of each run and reproduces it exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::process::{ProcessParams, RadiusLaw};
use crate::proxy::{AffineDatum, HomogenizationSettings, ProxyProblem, Source};
use crate::sweep::DEFAULT_POINT_CAP;

pub const SCHEMA_VERSION: u32 = 1;
pub const RESOLVED_FILE: &str = "resolved_config.toml";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub process: ProcessConfig,
    pub domain: DomainConfig,
    pub perforation: PerforationConfig,
    pub cutoff: CutoffConfig,
    pub slln: SllnConfig,
    pub proxy: ProxyConfig,
    pub checks: ChecksConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            process: ProcessConfig::default(),
            domain: DomainConfig::default(),
            perforation: PerforationConfig::default(),
            cutoff: CutoffConfig::default(),
            slln: SllnConfig::default(),
            proxy: ProxyConfig::default(),
            checks: ChecksConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProcessConfig {
    pub intensity: f64,
    /// Base seed; trial `k` of a sweep uses stream `k` of this seed.
    pub seed: u64,
    pub seeds: usize,
    pub point_cap: f64,
    pub radius: RadiusConfig,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig { intensity: 1.0, seed: 0, seeds: 20, point_cap: DEFAULT_POINT_CAP, radius: RadiusConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Constant,
    Uniform,
    Pareto,
}

/// `law = "constant"` uses `value`, `"uniform"` uses `low` and `high`,
/// `"pareto"` uses `shape` (unit scale).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadiusConfig {
    pub law: LawKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    /// Constant radius, 1 when absent.
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        RadiusConfig { law: LawKind::Constant, value: None, low: None, high: None, shape: None }
    }
}

impl RadiusConfig {
    pub fn law(&self) -> Result<RadiusLaw> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("process.radius.{key} is required for law = {:?}", self.law)))
        };
        let law = match self.law {
            LawKind::Constant => RadiusLaw::Constant(self.value.unwrap_or(1.0)),
            LawKind::Uniform => RadiusLaw::Uniform { low: need(self.low, "low")?, high: need(self.high, "high")? },
            LawKind::Pareto => RadiusLaw::Pareto { shape: need(self.shape, "shape")? },
        };
        law.validate()?;
        Ok(law)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Ball,
    Box,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainConfig {
    pub shape: ShapeKind,
    /// Ball radius, 1 when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Box half-widths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_widths: Option<[f64; 3]>,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig { shape: ShapeKind::Ball, radius: None, half_widths: None }
    }
}

impl DomainConfig {
    pub fn spec(&self) -> Result<DomainSpec> {
        let d = match self.shape {
            ShapeKind::Ball => DomainSpec::Ball { radius: self.radius.unwrap_or(1.0) },
            ShapeKind::Box => DomainSpec::Box {
                half_widths: self
                    .half_widths
                    .ok_or_else(|| Error::Config("domain.half_widths is required for a box".into()))?,
            },
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerforationConfig {
    pub alpha: f64,
    pub eps: Vec<f64>,
    pub tau: f64,
    pub kappa: f64,
    /// Highest finite radius moment `m_r` assumed by the separation check.
    /// Absent means all moments are finite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_exponent: Option<f64>,
    /// Cross-check the spatial hash against all pairs up to this many holes.
    pub oracle_max_holes: usize,
}

impl Default for PerforationConfig {
    fn default() -> Self {
        PerforationConfig {
            alpha: 4.0,
            eps: vec![0.1, 0.07, 0.05, 0.035, 0.025],
            tau: 2.0,
            kappa: 1.5,
            moment_exponent: None,
            oracle_max_holes: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutoffConfig {
    pub q: f64,
}

impl Default for CutoffConfig {
    fn default() -> Self {
        CutoffConfig { q: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SllnConfig {
    /// Moment exponents; one CSV per entry.
    pub moments: Vec<f64>,
    /// Count over the filtered centers instead of all centers in `S/eps`.
    pub filtered: bool,
}

impl Default for SllnConfig {
    fn default() -> Self {
        SllnConfig { moments: vec![0.0, 2.0, 3.0], filtered: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProxyConfig {
    pub conductivity: f64,
    pub robin: f64,
    /// Constant Robin datum `θ₀`.
    pub datum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_temperature: Option<f64>,
    pub source: f64,
    pub m_theta: f64,
    /// Trace norm exponent `p` for the `trace` subcommand.
    pub trace_exponent: f64,
    pub eps: Vec<f64>,
    pub seeds: usize,
    pub cells_per_radius: f64,
    pub trace_cells_per_radius: f64,
    pub base_spacing: f64,
    pub max_cells: usize,
    pub tolerance: f64,
}

impl Default for ProxyConfig {
    fn default() -> Self {
        let s = HomogenizationSettings::default();
        let p = ProxyProblem::default();
        ProxyConfig {
            conductivity: p.conductivity,
            robin: p.robin,
            datum: 1.0,
            min_temperature: p.min_temperature,
            source: 1.0,
            m_theta: p.m_theta,
            trace_exponent: 6.0,
            eps: vec![0.35, 0.3, 0.25, 0.2],
            seeds: 1,
            cells_per_radius: s.cells_per_radius,
            trace_cells_per_radius: s.trace_cells_per_radius,
            base_spacing: s.base_spacing,
            max_cells: s.max_cells,
            tolerance: p.tolerance,
        }
    }
}

impl ProxyConfig {
    pub fn problem(&self) -> ProxyProblem {
        ProxyProblem {
            conductivity: self.conductivity,
            robin: self.robin,
            datum: AffineDatum::constant(self.datum),
            min_temperature: self.min_temperature,
            source: Source::Uniform(self.source),
            m_theta: self.m_theta,
            tolerance: self.tolerance,
            ..ProxyProblem::default()
        }
    }

    pub fn settings(&self, trace: bool, point_cap: f64) -> HomogenizationSettings {
        HomogenizationSettings {
            cells_per_radius: if trace { self.cells_per_radius.max(self.trace_cells_per_radius) } else { self.cells_per_radius },
            base_spacing: self.base_spacing,
            max_cells: self.max_cells,
            trace_exponent: trace.then_some(self.trace_exponent),
            trace_cells_per_radius: self.trace_cells_per_radius,
            point_cap,
        }
    }
}

/// Tolerances of the pass/fail checks. `--tol` overrides every slope tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChecksConfig {
    /// Strong-law means must lie within this many standard errors.
    pub standard_errors: f64,
    pub volume_slope_tol: f64,
    pub count_slope_tol: f64,
    pub min_r_squared: f64,
    pub cutoff_slope_tol: f64,
    /// Allowed excess of the trace growth over its bound exponent.
    pub trace_slope_margin: f64,
    pub fit_tol: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            standard_errors: 4.0,
            volume_slope_tol: 0.3,
            count_slope_tol: 0.2,
            min_r_squared: 0.99,
            cutoff_slope_tol: 0.1,
            trace_slope_margin: 0.2,
            fit_tol: 0.1,
        }
    }
}

impl ChecksConfig {
    pub fn set_slope_tol(&mut self, tol: f64) {
        self.volume_slope_tol = tol;
        self.count_slope_tol = tol;
        self.cutoff_slope_tol = tol;
        self.trace_slope_margin = tol;
        self.fit_tol = tol;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    /// Parses a config, rejecting unknown keys and foreign schema versions.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let mut unknown = Vec::new();
        let cfg: RunConfig = serde_ignored::deserialize(de, |path| unknown.push(path.to_string()))
            .map_err(|e| Error::Config(e.to_string()))?;
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
        }
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Serializes with the effective constant radius and ball radius written out.
    pub fn to_toml_string(&self) -> Result<String> {
        let mut c = self.clone();
        if c.process.radius.law == LawKind::Constant {
            c.process.radius.value.get_or_insert(1.0);
        }
        if c.domain.shape == ShapeKind::Ball {
            c.domain.radius.get_or_insert(1.0);
        }
        toml::to_string(&c).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn process_params(&self) -> Result<ProcessParams> {
        ProcessParams::new(self.process.intensity, self.process.radius.law()?, self.process.seed)
    }

    /// Checks everything that does not depend on the subcommand.
    pub fn validate(&self) -> Result<()> {
        self.process_params()?;
        self.domain.spec()?;
        if self.process.seeds == 0 {
            return Err(Error::Config("process.seeds must be at least 1".into()));
        }
        if !(self.process.point_cap > 0.0) {
            return Err(Error::Config("process.point_cap must be positive".into()));
        }
        if self.proxy.seeds == 0 {
            return Err(Error::Config("proxy.seeds must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_listed() {
        let err = RunConfig::from_toml_str("bogus = 1\n[process]\nintensty = 2.0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("process.intensty"), "{msg}");
    }

    #[test]
    fn wrong_schema_rejected() {
        assert!(RunConfig::from_toml_str("schema_version = 2").is_err());
    }

    #[test]
    fn resolved_round_trip() {
        let mut c = RunConfig::default();
        c.process.radius = RadiusConfig { law: LawKind::Pareto, shape: Some(1.5), ..RadiusConfig::default() };
        c.process.radius.value = None;
        c.domain = DomainConfig { shape: ShapeKind::Box, radius: None, half_widths: Some([1.0, 0.5, 0.25]) };
        c.perforation.moment_exponent = Some(1.4);
        let text = c.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn radius_law_requires_its_keys() {
        let c = RunConfig::from_toml_str("[process.radius]\nlaw = \"uniform\"\nlow = 0.5\n").unwrap();
        assert!(c.process_params().is_err());
        let c = RunConfig::from_toml_str("[process.radius]\nlaw = \"uniform\"\nlow = 0.5\nhigh = 1.5\n").unwrap();
        assert_eq!(c.process_params().unwrap().radius_law, RadiusLaw::Uniform { low: 0.5, high: 1.5 });
    }
}
