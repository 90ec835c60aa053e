//! Flat key-value run configuration with typed accessors.
//!
//! A config file is plain text: one `key = value` pair per line, `#` starts
//! a comment, blank lines ignored. Command-line `--set key=value` pairs and
//! the dedicated `--seed/--workers/--out` flags override file entries. The
//! full schema is documented in `docs/config.md`.

use crate::ensemble::EnsembleSpec;
use crate::estimate::ZGrid;
use crate::measure::LevyMeasure;
use crate::rde::{RdeConfig, RdeVariant};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// Ordered key-value map; ordering makes the config echo deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn new() -> Self {
        ConfigMap::default()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut map = ConfigMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            map.set(key.trim(), value.trim());
        }
        Ok(map)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Applies a `key=value` override string.
    pub fn apply_override(&mut self, pair: &str) -> Result<()> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{pair}` is not `key=value`")))?;
        self.set(key.trim(), value.trim());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required config key `{key}`")))
    }

    pub fn f64_of(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number")))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_of(key)?.unwrap_or(default))
    }

    pub fn u64_of(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not an integer")))
            })
            .transpose()
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.u64_of(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    /// Sorted `(key, value)` pairs for manifests and echo files.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.entries
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

/// Builds the ensemble named by `ensemble` plus its parameters.
pub fn ensemble_from(cfg: &ConfigMap) -> Result<EnsembleSpec> {
    let spec = match cfg.require("ensemble")? {
        "erdos_renyi" => EnsembleSpec::ErdosRenyi {
            lambda: cfg.f64_of("lambda")?.ok_or_else(|| {
                Error::Config("erdos_renyi needs `lambda`".into())
            })?,
        },
        "sparse_gaussian" => EnsembleSpec::SparseGaussian {
            lambda: cfg.f64_of("lambda")?.ok_or_else(|| {
                Error::Config("sparse_gaussian needs `lambda`".into())
            })?,
        },
        "levy_pareto" => EnsembleSpec::LevyPareto {
            alpha: cfg
                .f64_of("alpha")?
                .ok_or_else(|| Error::Config("levy_pareto needs `alpha`".into()))?,
            theta: cfg.f64_or("theta", 0.5)?,
        },
        other => {
            return Err(Error::Config(format!(
                "unknown ensemble `{other}` (erdos_renyi, sparse_gaussian, levy_pareto)"
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Builds the Levy measure named by `measure` plus its parameters.
pub fn measure_from(cfg: &ConfigMap) -> Result<LevyMeasure> {
    match cfg.require("measure")? {
        "point_mass" => LevyMeasure::point_mass(
            cfg.f64_of("lambda")?
                .ok_or_else(|| Error::Config("point_mass needs `lambda`".into()))?,
        ),
        "scaled_gaussian" => LevyMeasure::scaled_gaussian(
            cfg.f64_of("lambda")?
                .ok_or_else(|| Error::Config("scaled_gaussian needs `lambda`".into()))?,
        ),
        "alpha_stable" => LevyMeasure::alpha_stable(
            cfg.f64_of("alpha")?
                .ok_or_else(|| Error::Config("alpha_stable needs `alpha`".into()))?,
            cfg.f64_or("theta", 0.5)?,
        ),
        "finite_discrete" => {
            let spec = cfg.require("atoms")?;
            let mut atoms = Vec::new();
            for part in spec.split(',') {
                let (x, w) = part.split_once(':').ok_or_else(|| {
                    Error::Config(format!("atom `{part}` is not `position:mass`"))
                })?;
                let x: f64 = x.trim().parse().map_err(|_| {
                    Error::Config(format!("atom position `{x}` is not a number"))
                })?;
                let w: f64 = w.trim().parse().map_err(|_| {
                    Error::Config(format!("atom mass `{w}` is not a number"))
                })?;
                atoms.push((x, w));
            }
            LevyMeasure::finite_discrete(atoms)
        }
        other => Err(Error::Config(format!(
            "unknown measure `{other}` (point_mass, scaled_gaussian, alpha_stable, finite_discrete)"
        ))),
    }
}

/// Evaluation grid from `grid_re_min/max/step` and the comma-separated
/// `grid_im` list; defaults to the standard grid.
pub fn grid_from(cfg: &ConfigMap) -> Result<ZGrid> {
    let re_min = cfg.f64_or("grid_re_min", -8.0)?;
    let re_max = cfg.f64_or("grid_re_max", 4.0)?;
    let re_step = cfg.f64_or("grid_re_step", 0.25)?;
    let ims: Vec<f64> = match cfg.get("grid_im") {
        None => vec![0.5, 1.0],
        Some(spec) => spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("grid_im entry `{s}` is not a number")))
            })
            .collect::<Result<_>>()?,
    };
    ZGrid::new(re_min, re_max, re_step, ims)
}

/// Population-dynamics parameters; the cutoff and cap defaults depend on
/// whether the measure has finite mass.
pub fn rde_config_from(cfg: &ConfigMap, m: &LevyMeasure) -> Result<RdeConfig> {
    let infinite_mass = !m.total_mass().is_finite();
    let variant = match cfg.str_or("variant", "dependent") {
        "dependent" => RdeVariant::Dependent,
        "independent" => RdeVariant::Independent,
        other => {
            return Err(Error::Config(format!(
                "unknown variant `{other}` (dependent, independent)"
            )))
        }
    };
    let rde = RdeConfig {
        n_pop: cfg.usize_or("n_pop", 10_000)?,
        iterations: cfg.usize_or("iterations", 200)?,
        burn_in: cfg.usize_or("burn_in", 100)?,
        damping: cfg.f64_or("damping", 0.0)?,
        delta: cfg.f64_or("delta", if infinite_mass { 1e-3 } else { 0.0 })?,
        max_points: cfg.usize_or("max_points", if infinite_mass { 256 } else { 64 })?,
        variant,
    };
    rde.validate()?;
    Ok(rde)
}
