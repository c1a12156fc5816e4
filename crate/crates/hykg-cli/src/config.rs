//! Run configuration: a TOML file with `[potential]`, `[grid]`, `[run]` and
//! `[sweep]` sections. Unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use hykg::oracle::RadialGrid;
use hykg::{Engine, HylleraasParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: HylleraasParams,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub r_max: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub engines: BTreeSet<Engine>,
    pub n_max: u32,
    pub formats: BTreeSet<Format>,
    /// Relative paths resolve against the config file's directory.
    pub out: Option<PathBuf>,
    /// Engine whose level energies feed `wavefunction`.
    pub wf_engine: Engine,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            engines: Engine::ALL.into_iter().collect(),
            n_max: 3,
            formats: [Format::Csv].into_iter().collect(),
            out: None,
            wf_engine: Engine::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// A `[potential]` key, e.g. `omega` or `D_e`.
    pub param: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let k = self.count;
        (0..k)
            .map(|i| {
                // Endpoints exactly as written, not through exp(ln(x)).
                if i == 0 {
                    return self.start;
                }
                if i + 1 == k {
                    return self.stop;
                }
                let t = i as f64 / (k - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        set_param(&mut HylleraasParams::default(), &self.param, 0.0)?;
        if self.count == 0 {
            return Err(CliError::Config("sweep.count must be at least 1".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Config("sweep bounds must be finite".into()));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err(CliError::Config("log sweep needs positive bounds".into()));
        }
        Ok(())
    }
}

/// Sets one potential field by its config key.
pub fn set_param(p: &mut HylleraasParams, name: &str, value: f64) -> Result<(), CliError> {
    let slot = match name {
        "K" => &mut p.shape,
        "k1" => &mut p.k1,
        "k2" => &mut p.k2,
        "omega" => &mut p.omega,
        "D_e" => &mut p.dissociation,
        "M" => &mut p.mass,
        "mu" => &mut p.mu,
        _ => return Err(CliError::Config(format!("sweep.param `{name}` is not a potential key"))),
    };
    *slot = value;
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = RunConfig::parse(&text)?;
        if let Some(out) = &config.run.out {
            if out.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.run.out = Some(base.join(out));
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.potential.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.run.engines.is_empty() {
            return Err(CliError::Config("run.engines is empty".into()));
        }
        if self.run.formats.is_empty() {
            return Err(CliError::Config("run.formats is empty".into()));
        }
        if self.run.n_max > 10 {
            return Err(CliError::Config(format!("run.n_max = {} exceeds 10", self.run.n_max)));
        }
        self.grid_for(&self.potential)?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }

    /// Oracle grid: the parameter default with any overrides applied.
    pub fn grid_for(&self, params: &HylleraasParams) -> Result<RadialGrid, CliError> {
        let base = RadialGrid::for_params(params).map_err(|e| CliError::Config(e.to_string()))?;
        let r_max = self.grid.r_max.unwrap_or(base.r_max);
        let n = self.grid.n.unwrap_or(base.n);
        if n < RadialGrid::MIN_POINTS {
            return Err(CliError::Config(format!("grid.N = {n} is below {}", RadialGrid::MIN_POINTS)));
        }
        RadialGrid::half_line(r_max, n).map_err(|e| CliError::Config(e.to_string()))
    }

    /// One parameter set per sweep point, or just the base set.
    pub fn points(&self) -> Result<Vec<(Option<f64>, HylleraasParams)>, CliError> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(None, self.potential)]);
        };
        sweep
            .values()
            .into_iter()
            .map(|v| {
                let mut p = self.potential;
                set_param(&mut p, &sweep.param, v)?;
                p.validate().map_err(|e| CliError::Config(format!("sweep point {v}: {e}")))?;
                self.grid_for(&p)?;
                Ok((Some(v), p))
            })
            .collect()
    }
}
