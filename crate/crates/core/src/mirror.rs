//! Photon and movable half-silvered mirror.
//!
//! Before the interaction the photon and mirror are in a product state with
//! the mirror at rest. The interaction is instantaneous at t = 0 and leaves
//!
//! ```text
//! a |transmitted, p⟩|mirror at rest⟩ + b |reflected, p - Δp⟩|mirror with Δp⟩
//! ```
//!
//! after which both mirror packets evolve freely to the interaction time τ.
//! The mirror pointer only separates in momentum, so measurement needs
//! Δp·σ/ħ of order one; a macroscopic mirror never gets there.

use serde::Serialize;

use crate::constants::Constants;
use crate::error::{param, Error, Result};
use crate::packets::{self, evolve_free, GaussianPacket};
use crate::qcore::{self, Amplitude, Branch, ReducedDensityMatrix2, TwoBranchState, NORM_TOL};
use crate::ssb::{self, Regime};

pub const TRANSMITTED: &str = "transmitted";
pub const REFLECTED: &str = "reflected";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorExperimentConfig {
    /// Incoming photon momentum (kg·m/s).
    pub photon_momentum: f64,
    /// Momentum handed to the mirror on reflection (kg·m/s).
    pub momentum_transfer: f64,
    pub a: Amplitude,
    pub b: Amplitude,
    pub mirror_mass: f64,
    /// Position spread of the mirror packet at the interaction (m).
    pub mirror_sigma_x: f64,
    /// τ (s)
    pub interaction_time: f64,
    pub constants: Constants,
}

impl MirrorExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        let non_negative = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(param(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        positive("photon_momentum", self.photon_momentum)?;
        non_negative("momentum_transfer", self.momentum_transfer)?;
        positive("mirror_mass", self.mirror_mass)?;
        positive("mirror_sigma_x", self.mirror_sigma_x)?;
        non_negative("interaction_time", self.interaction_time)?;
        let norm = self.a.norm_sqr() + self.b.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(param("a, b", format!("|a|^2 + |b|^2 = {norm}, expected 1")));
        }
        Ok(())
    }

    pub fn with_momentum_transfer(&self, dp: f64) -> Self {
        MirrorExperimentConfig {
            momentum_transfer: dp,
            ..*self
        }
    }
}

/// Spread of a minimum-uncertainty packet whose momentum spread is the
/// thermal value √(m k_B T): σ = ħ / (2√(m k_B T)).
pub fn thermal_sigma(mass: f64, temperature: f64, consts: &Constants) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(param("mass", format!("must be finite and > 0, got {mass}")));
    }
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(param("temperature", format!("must be finite and > 0, got {temperature}")));
    }
    Ok(consts.hbar / (2.0 * (mass * consts.boltzmann * temperature).sqrt()))
}

/// Entangled photon-mirror state at τ.
pub fn evolve_interaction(cfg: &MirrorExperimentConfig) -> Result<TwoBranchState> {
    cfg.validate()?;
    let consts = &cfg.constants;
    let at_rest = GaussianPacket::new(0.0, 0.0, cfg.mirror_sigma_x, cfg.mirror_mass)?;
    let kicked = GaussianPacket::new(0.0, cfg.momentum_transfer, cfg.mirror_sigma_x, cfg.mirror_mass)?;
    TwoBranchState::new(
        Branch::new(cfg.a, TRANSMITTED, evolve_free(&at_rest, cfg.interaction_time, consts)?),
        Branch::new(cfg.b, REFLECTED, evolve_free(&kicked, cfg.interaction_time, consts)?),
    )
}

/// Effective photon mixture diag(|a|², |b|²), available only once the mirror
/// packets are weakly interfering at separation parameter `k`.
///
/// The returned matrix is the exact partial trace; its coherence is bounded
/// by the (sub-threshold) pointer overlap.
pub fn photon_mixture(state: &TwoBranchState, k: f64, consts: &Constants) -> Result<ReducedDensityMatrix2> {
    let report = packets::interference_report(&state.first().pointer, &state.second().pointer, k, consts)?;
    if !report.weak() {
        return Err(Error::RegimeViolation(format!(
            "mirror packets still interfere strongly (|overlap| = {})",
            report.overlap_magnitude
        )));
    }
    qcore::reduce(state, consts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub dp_kgms: f64,
    pub pointer_overlap: f64,
    pub regime: Regime,
    /// Photon fringe visibility 2|ab|·|overlap|.
    pub visibility: f64,
}

impl ScanPoint {
    pub fn validate(&self) -> Result<()> {
        if !(self.dp_kgms.is_finite() && self.dp_kgms >= 0.0) {
            return Err(Error::Range(format!("momentum transfer {}", self.dp_kgms)));
        }
        if !(0.0..=1.0 + NORM_TOL).contains(&self.pointer_overlap) {
            return Err(Error::InvalidOverlap(self.pointer_overlap));
        }
        if !(0.0..=1.0 + NORM_TOL).contains(&self.visibility) {
            return Err(Error::Range(format!("visibility {}", self.visibility)));
        }
        Ok(())
    }
}

/// Classifies each momentum transfer in `dp_grid` with the rest of `cfg`
/// held fixed.
pub fn regime_scan(cfg: &MirrorExperimentConfig, dp_grid: &[f64], k: f64) -> Result<Vec<ScanPoint>> {
    if dp_grid.is_empty() {
        return Err(Error::Range("momentum-transfer grid is empty".into()));
    }
    dp_grid
        .iter()
        .map(|&dp| {
            let cfg = cfg.with_momentum_transfer(dp);
            let state = evolve_interaction(&cfg)?;
            let verdict = ssb::classify(&state, k, &cfg.constants)?;
            let rho = qcore::reduce(&state, &cfg.constants)?;
            Ok(ScanPoint {
                dp_kgms: dp,
                pointer_overlap: verdict.criterion_value,
                regime: verdict.regime,
                visibility: rho.visibility(),
            })
        })
        .collect()
}
