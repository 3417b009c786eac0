//! Run configuration: flat `key = value` text.
//!
//! ```text
//! # photon at the maximal wavelength, scattered backwards
//! seed = 42
//! compton.wavelength_m = 4.8e-12
//! compton.phi_deg = 180
//! sweep.phi_steps = 9
//! ```
//!
//! `#` starts a comment anywhere on a line. Keys carry SI units in their
//! names; angles may be given with an `_rad` or `_deg` suffix but not both.
//! Lists are comma separated. Unknown keys are rejected. Overrides given as
//! `key=value` are applied after the file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::compton::{self, ComptonConfig, CrossoverModel};
use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::mirror::{self, MirrorExperimentConfig};
use crate::packets::DEFAULT_SEPARATION_K;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Mirror,
    Compton,
    Sweep,
    Ensemble,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Mirror => "mirror",
            Experiment::Compton => "compton",
            Experiment::Sweep => "sweep",
            Experiment::Ensemble => "ensemble",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown output format `{other}` (csv or jsonl)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnsembleSource {
    #[default]
    Compton,
    Mirror,
}

const KNOWN_KEYS: &[&str] = &[
    "seed",
    "output.path",
    "output.format",
    "ssb.k",
    "mirror.photon_momentum_kgms",
    "mirror.photon_wavelength_m",
    "mirror.momentum_transfer_kgms",
    "mirror.a_re",
    "mirror.a_im",
    "mirror.b_re",
    "mirror.b_im",
    "mirror.mass_kg",
    "mirror.sigma_x_m",
    "mirror.temperature_k",
    "mirror.interaction_time_s",
    "mirror.dp_grid_kgms",
    "compton.wavelength_m",
    "compton.phi_rad",
    "compton.phi_deg",
    "compton.alpha_re",
    "compton.alpha_im",
    "compton.beta_re",
    "compton.beta_im",
    "compton.electron_sigma_x_m",
    "compton.ratio_threshold",
    "compton.broken_threshold",
    "compton.crossover_model",
    "sweep.phi_grid_rad",
    "sweep.phi_grid_deg",
    "sweep.phi_start_rad",
    "sweep.phi_start_deg",
    "sweep.phi_stop_rad",
    "sweep.phi_stop_deg",
    "sweep.phi_steps",
    "sweep.n_ensemble",
    "ensemble.source",
    "ensemble.trials",
];

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("--set override"),
        }
    }
}

/// Raw key-value pairs, later entries replacing earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Entries {
    values: BTreeMap<String, (String, Origin)>,
}

impl Entries {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Entries::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", idx + 1))
            })?;
            entries.insert(key.trim(), value.trim(), Origin::Line(idx + 1))?;
        }
        Ok(entries)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not `key=value`")))?;
        self.insert(key.trim(), value.trim(), Origin::Override)
    }

    fn insert(&mut self, key: &str, value: &str, origin: Origin) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("{origin}: unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::Config(format!("{origin}: key `{key}` has no value")));
        }
        self.values.insert(key.to_string(), (value.to_string(), origin));
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&(String, Origin)> {
        self.values.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, origin)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{origin}: key `{key}`: cannot parse `{v}`"))),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((v, origin)) = self.raw(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|item| {
                item.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("{origin}: key `{key}`: cannot parse list item `{}`", item.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Angle under `<stem>_rad` or `<stem>_deg`, in radians.
    fn angle(&self, stem: &str) -> Result<Option<f64>> {
        let rad_key = format!("{stem}_rad");
        let deg_key = format!("{stem}_deg");
        match (self.get::<f64>(&rad_key)?, self.get::<f64>(&deg_key)?) {
            (Some(_), Some(_)) => Err(Error::Config(format!("both `{rad_key}` and `{deg_key}` are set"))),
            (Some(r), None) => Ok(Some(r)),
            (None, Some(d)) => Ok(Some(degrees(d))),
            (None, None) => Ok(None),
        }
    }

    fn angle_list(&self, stem: &str) -> Result<Option<Vec<f64>>> {
        let rad_key = format!("{stem}_rad");
        let deg_key = format!("{stem}_deg");
        match (self.list(&rad_key)?, self.list(&deg_key)?) {
            (Some(_), Some(_)) => Err(Error::Config(format!("both `{rad_key}` and `{deg_key}` are set"))),
            (Some(r), None) => Ok(Some(r)),
            (None, Some(d)) => Ok(Some(d.into_iter().map(degrees).collect())),
            (None, None) => Ok(None),
        }
    }
}

/// Degrees to radians, with 180° landing exactly on π.
fn degrees(d: f64) -> f64 {
    d / 180.0 * PI
}

/// Inclusive, evenly spaced grid whose last point is exactly `stop`.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    /// Separation parameter of the weak-interference test.
    pub k: f64,
    pub mirror: MirrorExperimentConfig,
    /// Momentum-transfer grid of the mirror scan; the configured transfer
    /// alone when absent.
    pub dp_grid: Option<Vec<f64>>,
    pub compton: ComptonConfig,
    pub phi_grid: Vec<f64>,
    pub n_ensemble: u64,
    pub ensemble_source: EnsembleSource,
    pub trials: u64,
}

impl RunConfig {
    /// Reads every known key, applying defaults. Type errors are config
    /// errors; physical invariants are checked by [`RunConfig::validate`].
    pub fn from_entries(experiment: Experiment, e: &Entries) -> Result<Self> {
        let consts = Constants::SI;
        let h = 0.5f64.sqrt();

        let photon_momentum = match (
            e.get::<f64>("mirror.photon_momentum_kgms")?,
            e.get::<f64>("mirror.photon_wavelength_m")?,
        ) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "both `mirror.photon_momentum_kgms` and `mirror.photon_wavelength_m` are set".into(),
                ))
            }
            (Some(p), None) => p,
            (None, Some(l)) => consts.planck / l,
            (None, None) => consts.planck / 500e-9,
        };
        let mass = e.f64_or("mirror.mass_kg", 1e-3)?;
        let sigma = match e.get::<f64>("mirror.sigma_x_m")? {
            Some(s) => s,
            None => {
                let t = e.f64_or("mirror.temperature_k", 300.0)?;
                mirror::thermal_sigma(mass, t, &consts).unwrap_or(f64::NAN)
            }
        };
        let mirror = MirrorExperimentConfig {
            photon_momentum,
            momentum_transfer: e.f64_or("mirror.momentum_transfer_kgms", 2.0 * photon_momentum)?,
            a: Complex64::new(e.f64_or("mirror.a_re", h)?, e.f64_or("mirror.a_im", 0.0)?),
            b: Complex64::new(e.f64_or("mirror.b_re", h)?, e.f64_or("mirror.b_im", 0.0)?),
            mirror_mass: mass,
            mirror_sigma_x: sigma,
            interaction_time: e.f64_or("mirror.interaction_time_s", 0.0)?,
            constants: consts,
        };

        let mut compton = ComptonConfig::new(
            e.f64_or("compton.wavelength_m", 2.0 * consts.compton_wavelength)?,
            e.angle("compton.phi")?.unwrap_or(0.0),
        );
        compton.alpha = Complex64::new(e.f64_or("compton.alpha_re", h)?, e.f64_or("compton.alpha_im", 0.0)?);
        compton.beta = Complex64::new(e.f64_or("compton.beta_re", h)?, e.f64_or("compton.beta_im", 0.0)?);
        compton.electron_sigma_x = e.f64_or("compton.electron_sigma_x_m", compton::DEFAULT_ELECTRON_SIGMA)?;
        compton.ratio_threshold = e.f64_or("compton.ratio_threshold", compton::DEFAULT_RATIO_THRESHOLD)?;
        compton.broken_threshold = e.f64_or("compton.broken_threshold", compton::DEFAULT_BROKEN_THRESHOLD)?;
        if let Some(m) = e.get::<String>("compton.crossover_model")? {
            compton.crossover_model = m.parse::<CrossoverModel>().map_err(|_| {
                Error::Config(format!("key `compton.crossover_model`: `{m}` is not sharp or linear"))
            })?;
        }

        let explicit = e.angle_list("sweep.phi_grid")?;
        let start = e.angle("sweep.phi_start")?;
        let stop = e.angle("sweep.phi_stop")?;
        let steps = e.get::<usize>("sweep.phi_steps")?;
        let phi_grid = match explicit {
            Some(grid) => {
                if start.is_some() || stop.is_some() || steps.is_some() {
                    return Err(Error::Config(
                        "`sweep.phi_grid_*` cannot be combined with start/stop/steps".into(),
                    ));
                }
                grid
            }
            None => linspace(start.unwrap_or(0.0), stop.unwrap_or(PI), steps.unwrap_or(9)),
        };

        let ensemble_source = match e.get::<String>("ensemble.source")?.as_deref() {
            None | Some("compton") => EnsembleSource::Compton,
            Some("mirror") => EnsembleSource::Mirror,
            Some(other) => {
                return Err(Error::Config(format!(
                    "key `ensemble.source`: `{other}` is not compton or mirror"
                )))
            }
        };

        Ok(RunConfig {
            experiment,
            seed: e.get("seed")?.unwrap_or(0),
            output_path: e.get::<String>("output.path")?.map(PathBuf::from),
            output_format: e.get::<String>("output.format")?.map(|s| s.parse()).transpose()?.unwrap_or_default(),
            k: e.f64_or("ssb.k", DEFAULT_SEPARATION_K)?,
            mirror,
            dp_grid: e.list("mirror.dp_grid_kgms")?,
            compton,
            phi_grid,
            n_ensemble: e.get("sweep.n_ensemble")?.unwrap_or(10_000),
            ensemble_source,
            trials: e.get("ensemble.trials")?.unwrap_or(100_000),
        })
    }

    /// Checks the physical invariants of the parts the experiment uses.
    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(crate::error::param("ssb.k", format!("must be finite and > 0, got {}", self.k)));
        }
        let uses_mirror = matches!(self.experiment, Experiment::Mirror)
            || (self.experiment == Experiment::Ensemble && self.ensemble_source == EnsembleSource::Mirror);
        if uses_mirror {
            self.mirror.validate()?;
            if let Some(grid) = &self.dp_grid {
                if grid.is_empty() || grid.iter().any(|&dp| !(dp.is_finite() && dp >= 0.0)) {
                    return Err(Error::Range("momentum-transfer grid must be non-empty and >= 0".into()));
                }
            }
        } else {
            self.compton.validate()?;
        }
        match self.experiment {
            Experiment::Sweep => {
                if self.phi_grid.is_empty() {
                    return Err(Error::Range("angle grid is empty".into()));
                }
                for &phi in &self.phi_grid {
                    self.compton.with_angle(phi).validate()?;
                }
            }
            Experiment::Ensemble if self.trials == 0 => {
                return Err(Error::Range("ensemble.trials must be at least 1".into()));
            }
            _ => {}
        }
        Ok(())
    }
}
