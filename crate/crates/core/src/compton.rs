//! Compton scattering as a photon which-path measurement.
//!
//! A photon split by a fixed half-silvered mirror either passes unscattered
//! (amplitude α) or Compton scatters at angle φ off an electron at rest
//! (amplitude β, after an angular filter). The electron is the pointer: at
//! rest in the first branch, recoiling with |Δp(φ)| in the second.
//!
//! The relative wavelength shift Δλ(φ)/λ decides the regime:
//!
//! | ratio                          | regime        |
//! |--------------------------------|---------------|
//! | ≤ `ratio_threshold` (0.01)     | superposition |
//! | ≥ `broken_threshold` (0.5)     | broken        |
//! | in between                     | intermediate  |
//!
//! Inside the intermediate band a [`CrossoverModel`] decides which fraction
//! of detected photons belongs to the mixture sub-ensemble. Both models are
//! extrapolations: only the two limiting regimes are physically pinned down.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::Constants;
use crate::error::{param, Error, Result};
use crate::packets::{self, GaussianPacket};
use crate::qcore::{Amplitude, Branch, BranchIndex, TwoBranchState, NORM_TOL};
use crate::ssb::{derive_seed, draw_branch, stream, CriterionKind, Regime, RegimeVerdict};

pub const UNSCATTERED: &str = "transmitted";
pub const SCATTERED: &str = "scattered";

pub const DEFAULT_ELECTRON_SIGMA: f64 = 1e-10;
pub const DEFAULT_RATIO_THRESHOLD: f64 = 0.01;
pub const DEFAULT_BROKEN_THRESHOLD: f64 = 0.5;

/// Relative slack on the regime band edges, so that e.g. λ = 100·λ_max at
/// φ = π lands on the superposition side despite rounding.
const BAND_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverModel {
    /// All-or-nothing switch at the middle of the intermediate band.
    #[default]
    Sharp,
    /// clamp((ratio - lo) / (hi - lo), 0, 1)
    Linear,
}

impl CrossoverModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CrossoverModel::Sharp => "sharp",
            CrossoverModel::Linear => "linear",
        }
    }

    /// Fraction of the detected ensemble in the mixture sub-ensemble, for a
    /// wavelength ratio inside or outside the band [lo, hi].
    pub fn mixture_fraction(&self, ratio: f64, lo: f64, hi: f64) -> f64 {
        if ratio <= lo * (1.0 + BAND_RTOL) {
            return 0.0;
        }
        if ratio >= hi * (1.0 - BAND_RTOL) {
            return 1.0;
        }
        match self {
            CrossoverModel::Sharp => {
                if ratio >= 0.5 * (lo + hi) {
                    1.0
                } else {
                    0.0
                }
            }
            CrossoverModel::Linear => ((ratio - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }
}

impl std::str::FromStr for CrossoverModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(CrossoverModel::Sharp),
            "linear" => Ok(CrossoverModel::Linear),
            other => Err(Error::Range(format!("unknown crossover model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComptonConfig {
    /// Incoming photon wavelength λ (m).
    pub wavelength: f64,
    /// Scattering angle φ (rad), in [0, π].
    pub angle_phi: f64,
    /// Post-filter amplitude of the unscattered path.
    pub alpha: Amplitude,
    /// Post-filter amplitude of the scattered path.
    pub beta: Amplitude,
    /// Position spread of the electron pointer packet (m).
    pub electron_sigma_x: f64,
    /// Largest Δλ/λ still counted as superposition.
    pub ratio_threshold: f64,
    /// Smallest Δλ/λ counted as broken.
    pub broken_threshold: f64,
    pub crossover_model: CrossoverModel,
    pub constants: Constants,
}

impl ComptonConfig {
    /// Equal-weight amplitudes and default thresholds.
    pub fn new(wavelength: f64, angle_phi: f64) -> Self {
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        ComptonConfig {
            wavelength,
            angle_phi,
            alpha: h,
            beta: h,
            electron_sigma_x: DEFAULT_ELECTRON_SIGMA,
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            broken_threshold: DEFAULT_BROKEN_THRESHOLD,
            crossover_model: CrossoverModel::Sharp,
            constants: Constants::SI,
        }
    }

    pub fn with_angle(&self, phi: f64) -> Self {
        ComptonConfig { angle_phi: phi, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        check_wavelength(self.wavelength)?;
        check_angle(self.angle_phi)?;
        if !(self.electron_sigma_x.is_finite() && self.electron_sigma_x > 0.0) {
            return Err(param(
                "electron_sigma_x",
                format!("must be finite and > 0, got {}", self.electron_sigma_x),
            ));
        }
        check_threshold(self.ratio_threshold)?;
        if !(self.broken_threshold > self.ratio_threshold && self.broken_threshold < 1.0) {
            return Err(param(
                "broken_threshold",
                format!(
                    "must lie in (ratio_threshold, 1), got {} with ratio_threshold {}",
                    self.broken_threshold, self.ratio_threshold
                ),
            ));
        }
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(param("alpha, beta", format!("|alpha|^2 + |beta|^2 = {norm}, expected 1")));
        }
        Ok(())
    }
}

fn check_angle(phi: f64) -> Result<()> {
    if (0.0..=PI).contains(&phi) {
        Ok(())
    } else {
        Err(Error::Range(format!("scattering angle {phi} rad is outside [0, pi]")))
    }
}

fn check_wavelength(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(param("wavelength", format!("must be finite and > 0, got {lambda}")))
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(param("ratio_threshold", format!("must lie in (0, 1), got {t}")))
    }
}

/// Δλ(φ) = 2λ_ce sin²(φ/2). Does not depend on the incoming wavelength.
pub fn compton_shift(wavelength: f64, phi: f64, consts: &Constants) -> Result<f64> {
    check_wavelength(wavelength)?;
    check_angle(phi)?;
    let s = (0.5 * phi).sin();
    Ok(2.0 * consts.compton_wavelength * s * s)
}

/// Angle at which the shift equals `delta_lambda`: 2·asin(√(Δλ / 2λ_ce)).
pub fn angle_for_shift(delta_lambda: f64, consts: &Constants) -> Result<f64> {
    let max = 2.0 * consts.compton_wavelength;
    if !(0.0..=max).contains(&delta_lambda) {
        return Err(Error::Range(format!(
            "shift {delta_lambda} m is outside [0, {max}] m"
        )));
    }
    Ok(2.0 * (delta_lambda / max).sqrt().asin())
}

/// p = h/λ
pub fn debroglie_momentum(wavelength: f64, consts: &Constants) -> Result<f64> {
    check_wavelength(wavelength)?;
    Ok(consts.planck / wavelength)
}

/// |p - p'| for the incoming and scattered photon momenta at angle φ.
pub fn recoil_momentum(wavelength: f64, phi: f64, consts: &Constants) -> Result<f64> {
    let shift = compton_shift(wavelength, phi, consts)?;
    let p = consts.planck / wavelength;
    let p_out = consts.planck / (wavelength + shift);
    // p² + p'² - 2pp'cos φ rewritten to avoid cancellation at small angles.
    let s = (0.5 * phi).sin();
    Ok(((p - p_out).powi(2) + 4.0 * p * p_out * s * s).sqrt())
}

/// Δλ(φ)/λ
pub fn wavelength_ratio(wavelength: f64, phi: f64, consts: &Constants) -> Result<f64> {
    Ok(compton_shift(wavelength, phi, consts)? / wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicsRecord {
    pub p_in: f64,
    pub delta_lambda: f64,
    pub lambda_out: f64,
    pub p_out: f64,
    pub recoil_dp: f64,
    pub ratio: f64,
    /// Δλ·|Δp|
    pub uncertainty_product: f64,
}

pub fn kinematics(wavelength: f64, phi: f64, consts: &Constants) -> Result<KinematicsRecord> {
    let delta_lambda = compton_shift(wavelength, phi, consts)?;
    let lambda_out = wavelength + delta_lambda;
    let recoil_dp = recoil_momentum(wavelength, phi, consts)?;
    Ok(KinematicsRecord {
        p_in: consts.planck / wavelength,
        delta_lambda,
        lambda_out,
        p_out: consts.planck / lambda_out,
        recoil_dp,
        ratio: delta_lambda / wavelength,
        uncertainty_product: delta_lambda * recoil_dp,
    })
}

fn regime_for_ratio(ratio: f64, cfg: &ComptonConfig) -> Regime {
    if ratio <= cfg.ratio_threshold * (1.0 + BAND_RTOL) {
        Regime::Superposition
    } else if ratio >= cfg.broken_threshold * (1.0 - BAND_RTOL) {
        Regime::Broken
    } else {
        Regime::Intermediate
    }
}

/// Regime from the relative wavelength shift.
pub fn classify_regime(cfg: &ComptonConfig) -> Result<RegimeVerdict> {
    cfg.validate()?;
    let ratio = wavelength_ratio(cfg.wavelength, cfg.angle_phi, &cfg.constants)?;
    Ok(RegimeVerdict {
        regime: regime_for_ratio(ratio, cfg),
        criterion_value: ratio,
        criterion_kind: CriterionKind::WavelengthRatio,
    })
}

/// Photon-electron state after scattering and filtering.
pub fn build_entangled_state(cfg: &ComptonConfig) -> Result<TwoBranchState> {
    cfg.validate()?;
    let consts = &cfg.constants;
    let recoil = recoil_momentum(cfg.wavelength, cfg.angle_phi, consts)?;
    let sigma = cfg.electron_sigma_x;
    let m = consts.electron_mass;
    TwoBranchState::new(
        Branch::new(cfg.alpha, UNSCATTERED, GaussianPacket::new(0.0, 0.0, sigma, m)?),
        Branch::new(cfg.beta, SCATTERED, GaussianPacket::new(0.0, recoil, sigma, m)?),
    )
}

/// |⟨e at rest | e with Δp(φ)⟩|
pub fn pointer_overlap(cfg: &ComptonConfig) -> Result<f64> {
    let state = build_entangled_state(cfg)?;
    Ok(packets::overlap(&state.first().pointer, &state.second().pointer, &cfg.constants)?.norm())
}

/// Fringe visibility at the downstream detector: 2|αβ|·|⟨e 0|e Δp(φ)⟩|.
pub fn detector_visibility(cfg: &ComptonConfig) -> Result<f64> {
    Ok(fringe_visibility(cfg, pointer_overlap(cfg)?))
}

fn fringe_visibility(cfg: &ComptonConfig, overlap: f64) -> f64 {
    // 2|αβ| exceeds one by an ulp for α = β = 1/√2
    (2.0 * (cfg.alpha * cfg.beta).norm() * overlap).min(1.0)
}

/// Δλ(φ)·|Δp(φ)|, of order h once Δλ/λ is of order one.
pub fn uncertainty_product(cfg: &ComptonConfig) -> Result<f64> {
    cfg.validate()?;
    let k = kinematics(cfg.wavelength, cfg.angle_phi, &cfg.constants)?;
    if k.delta_lambda <= 0.0 {
        return Err(Error::Undefined(
            "uncertainty product needs a nonzero wavelength shift (phi > 0)".into(),
        ));
    }
    Ok(k.uncertainty_product)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxParameters {
    /// Largest wavelength for which Δλ/λ can reach one: 2λ_ce.
    pub lambda_max: f64,
    /// Largest shift still counted as superposition at λ_max.
    pub delta_lambda_max: f64,
    /// Scattering angle producing `delta_lambda_max`.
    pub phi_max: f64,
}

pub fn solve_max_parameters(ratio_threshold: f64, consts: &Constants) -> Result<MaxParameters> {
    check_threshold(ratio_threshold)?;
    let lambda_max = 2.0 * consts.compton_wavelength;
    let delta_lambda_max = ratio_threshold * lambda_max;
    Ok(MaxParameters {
        lambda_max,
        delta_lambda_max,
        phi_max: angle_for_shift(delta_lambda_max, consts)?,
    })
}

/// One grid point of an angle sweep. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub phi_rad: f64,
    pub delta_lambda_m: f64,
    pub ratio: f64,
    pub recoil_dp: f64,
    pub pointer_overlap: f64,
    pub regime: Regime,
    pub visibility: f64,
    pub f_mix: f64,
    /// Mixture sub-ensemble members found in the unscattered branch.
    pub n_branch1: u64,
    /// Mixture sub-ensemble members found in the scattered branch.
    pub n_branch2: u64,
    pub seed: u64,
}

impl SweepRecord {
    pub fn validate(&self) -> Result<()> {
        check_angle(self.phi_rad)?;
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0 + NORM_TOL).contains(&v) {
                Ok(())
            } else {
                Err(Error::Range(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("pointer_overlap", self.pointer_overlap)?;
        unit("visibility", self.visibility)?;
        unit("f_mix", self.f_mix)?;
        if !(self.delta_lambda_m >= 0.0 && self.ratio >= 0.0 && self.recoil_dp >= 0.0) {
            return Err(Error::Range("negative kinematic quantity".into()));
        }
        match self.regime {
            Regime::Superposition if self.f_mix != 0.0 => {
                Err(Error::RegimeViolation("mixture fraction nonzero in superposition regime".into()))
            }
            Regime::Broken if self.f_mix != 1.0 => {
                Err(Error::RegimeViolation("mixture fraction below one in broken regime".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Sweeps φ over `phi_grid` with the rest of `template` fixed.
///
/// Each grid cell runs `n_ensemble` detected photons keyed with
/// `derive_seed(seed, cell)`. Trial `i` reads stream `i`: the first draw puts
/// the photon in the mixture sub-ensemble with probability `f_mix`, the
/// second picks its branch with Born weights |α|², |β|². Photons in the
/// superposition sub-ensemble are not tallied by branch.
pub fn sweep(template: &ComptonConfig, phi_grid: &[f64], n_ensemble: u64, seed: u64) -> Result<Vec<SweepRecord>> {
    for &phi in phi_grid {
        check_angle(phi)?;
    }
    template.with_angle(phi_grid.first().copied().unwrap_or(0.0)).validate()?;
    let p1 = template.alpha.norm_sqr() / (template.alpha.norm_sqr() + template.beta.norm_sqr());

    phi_grid
        .iter()
        .enumerate()
        .map(|(cell, &phi)| {
            let cfg = template.with_angle(phi);
            let consts = &cfg.constants;
            let k = kinematics(cfg.wavelength, phi, consts)?;
            let regime = regime_for_ratio(k.ratio, &cfg);
            let f_mix = cfg
                .crossover_model
                .mixture_fraction(k.ratio, cfg.ratio_threshold, cfg.broken_threshold);
            let overlap = pointer_overlap(&cfg)?;

            let base = ChaCha8Rng::seed_from_u64(derive_seed(seed, cell as u64));
            let (n_branch1, n_branch2) = (0..n_ensemble)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(&base, i);
                    if rng.random::<f64>() < f_mix {
                        match draw_branch(&mut rng, p1) {
                            BranchIndex::First => (1, 0),
                            BranchIndex::Second => (0, 1),
                        }
                    } else {
                        (0, 0)
                    }
                })
                .reduce(|| (0u64, 0u64), |a, b| (a.0 + b.0, a.1 + b.1));

            let record = SweepRecord {
                phi_rad: phi,
                delta_lambda_m: k.delta_lambda,
                ratio: k.ratio,
                recoil_dp: k.recoil_dp,
                pointer_overlap: overlap,
                regime,
                visibility: fringe_visibility(&cfg, overlap),
                f_mix,
                n_branch1,
                n_branch2,
                seed,
            };
            record.validate()?;
            Ok(record)
        })
        .collect()
}
