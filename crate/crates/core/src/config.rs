//! Run configuration, read from JSON and validated before any compute.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::auditor::{AuditSpec, Calibration};
use crate::datagen::{make_angular_ic, make_velocity_ic, IcRecipe};
use crate::error::{Error, Result};
use crate::integrator::StepPolicy;
use crate::rhs::SystemParams;
use crate::spectral::snapshot::read_snapshot;
use crate::spectral::{GridSpec, VectorField};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Where an initial field comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum IcSource {
    Recipe(IcRecipe),
    /// Snapshot file holding the three components; relative paths are
    /// resolved against the configuration file's directory.
    Snapshot(PathBuf),
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_audits() -> Vec<AuditSpec> {
    AuditSpec::all_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub params: SystemParams,
    pub step: StepPolicy,
    pub ic_u: IcSource,
    pub ic_w: IcSource,
    #[serde(default = "default_audits")]
    pub audits: Vec<AuditSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub c1: f64,
    #[serde(default)]
    pub eps0: Option<f64>,
    #[serde(default)]
    pub te_half: Option<f64>,
    /// Directory of the file this was read from.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Every problem is reported as [`Error::Config`].
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.grid.validate().map_err(cfg)?;
        self.params.validate().map_err(cfg)?;
        self.step.validate().map_err(cfg)?;
        if self.params.tau < 0.5 {
            return Err(Error::Config(format!(
                "tau = {} is below 1/2, where no existence time is available",
                self.params.tau
            )));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::Config(format!("c1 must be positive, got {}", self.c1)));
        }
        for (name, v) in [("eps0", self.eps0), ("te_half", self.te_half)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if (self.params.tau - 0.5).abs() <= 1e-12 && (self.eps0.is_none() || self.te_half.is_none()) {
            return Err(Error::Config("tau = 1/2 needs eps0 and te_half".into()));
        }
        for src in [&self.ic_u, &self.ic_w] {
            if let IcSource::Recipe(r) = src {
                r.validate().map_err(cfg)?;
            }
        }
        let mut seen = std::collections::HashSet::new();
        for a in &self.audits {
            if !seen.insert(a.name) {
                return Err(Error::Config(format!("audit {} listed twice", a.name.as_str())));
            }
            if let Some(t) = a.tolerance {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Config(format!(
                        "tolerance of {} must be non-negative",
                        a.name.as_str()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn calibration(&self) -> Calibration {
        Calibration {
            c1: self.c1,
            eps0: self.eps0,
            te_half: self.te_half,
        }
    }

    /// Replace the seed of every recipe.
    pub fn override_seed(&mut self, seed: u64) {
        for src in [&mut self.ic_u, &mut self.ic_w] {
            if let IcSource::Recipe(r) = src {
                r.seed = seed;
            }
        }
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn load_field(&self, src: &IcSource, velocity: bool) -> Result<VectorField> {
        match src {
            IcSource::Recipe(r) => {
                if velocity {
                    make_velocity_ic(r, &self.grid)
                } else {
                    make_angular_ic(r, &self.grid)
                }
            }
            IcSource::Snapshot(p) => {
                let path = self.resolve(p);
                let snap = read_snapshot(&path, self.grid.dealias_fraction)?;
                if snap.n != self.grid.n || snap.box_length != self.grid.box_length {
                    return Err(Error::Config(format!(
                        "snapshot {} is on n = {}, L = {}, config wants n = {}, L = {}",
                        path.display(),
                        snap.n,
                        snap.box_length,
                        self.grid.n,
                        self.grid.box_length
                    )));
                }
                let [x, y, z]: [_; 3] = snap.fields.try_into().map_err(|f: Vec<_>| {
                    Error::Config(format!(
                        "snapshot {} holds {} fields, expected 3",
                        path.display(),
                        f.len()
                    ))
                })?;
                VectorField::new(x, y, z)
            }
        }
    }

    /// Initial `(u0, ω0)` before projection and mollification.
    pub fn initial_fields(&self) -> Result<(VectorField, VectorField)> {
        Ok((self.load_field(&self.ic_u, true)?, self.load_field(&self.ic_w, false)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
        "schema_version": 1,
        "grid": {"n": 8},
        "params": {"nu": 1.0, "mu": 1.0, "eps": 0.0, "tau": 1.0, "sigma": 0.2},
        "step": {"dt": 0.01, "t_end": 0.05},
        "ic_u": {"recipe": {"kind": "zero", "target_index": {"s": 1.0, "kind": "inhomogeneous"}}},
        "ic_w": {"recipe": {"kind": "zero", "target_index": {"s": 0.2, "kind": "inhomogeneous"}}},
        "c1": 1.0
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.audits.len(), crate::auditor::AuditName::ALL.len());
        assert_eq!(c.output_dir, PathBuf::from("out"));
        assert_eq!(c.step.cfl_safety, 0.5);
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown_keys_and_low_tau() {
        let extra = MINIMAL.replace("\"c1\": 1.0", "\"c1\": 1.0, \"colour\": 3");
        assert!(matches!(RunConfig::from_json(&extra), Err(Error::Config(_))));
        let low = MINIMAL.replace("\"tau\": 1.0", "\"tau\": 0.4");
        assert!(matches!(RunConfig::from_json(&low), Err(Error::Config(_))));
        let half = MINIMAL.replace("\"tau\": 1.0", "\"tau\": 0.5");
        assert!(matches!(RunConfig::from_json(&half), Err(Error::Config(_))));
        let nested = MINIMAL.replace("{\"n\": 8}", "{\"n\": 8, \"m\": 2}");
        assert!(matches!(RunConfig::from_json(&nested), Err(Error::Config(_))));
        let dup = MINIMAL.replace(
            "\"c1\": 1.0",
            "\"c1\": 1.0, \"audits\": [{\"name\": \"divergence\"}, {\"name\": \"divergence\"}]",
        );
        assert!(matches!(RunConfig::from_json(&dup), Err(Error::Config(_))));
        let bad_grid = MINIMAL.replace("{\"n\": 8}", "{\"n\": 7}");
        assert!(matches!(RunConfig::from_json(&bad_grid), Err(Error::Config(_))));
    }
}
