//! Physical constants.
//!
//! Every operation that needs a constant takes a [`Constants`] value so that
//! tests can switch to natural units (`ħ = m = 1`) without touching the
//! formulas.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Planck constant h in J·s (exact, 2019 SI).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant ħ = h/2π in J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Electron rest mass in kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Electron Compton wavelength in m, rounded to two significant figures.
///
/// The kinematics of the scattering scheme are stated against this rounded
/// value (maximal shift 2λ_ce = 4.8e-12 m). The CODATA value
/// h/(m_e c) ≈ 2.4263e-12 m is available as [`Constants::codata`].
pub const COMPTON_WAVELENGTH: f64 = 2.4e-12;
/// Boltzmann constant in J/K (exact, 2019 SI).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in vacuum in m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub planck: f64,
    pub hbar: f64,
    pub electron_mass: f64,
    pub compton_wavelength: f64,
    pub boltzmann: f64,
    pub speed_of_light: f64,
}

impl Constants {
    /// SI values with the rounded electron Compton wavelength.
    pub const SI: Constants = Constants {
        planck: PLANCK,
        hbar: HBAR,
        electron_mass: ELECTRON_MASS,
        compton_wavelength: COMPTON_WAVELENGTH,
        boltzmann: BOLTZMANN,
        speed_of_light: SPEED_OF_LIGHT,
    };

    /// SI values with λ_ce = h/(m_e c) computed from the other constants.
    pub fn codata() -> Self {
        Constants {
            compton_wavelength: PLANCK / (ELECTRON_MASS * SPEED_OF_LIGHT),
            ..Self::SI
        }
    }

    /// ħ = m_e = c = k_B = 1, so h = 2π and λ_ce = 2π.
    pub fn natural() -> Self {
        Constants {
            planck: 2.0 * PI,
            hbar: 1.0,
            electron_mass: 1.0,
            compton_wavelength: 2.0 * PI,
            boltzmann: 1.0,
            speed_of_light: 1.0,
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::SI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_is_h_over_two_pi() {
        assert!((HBAR * 2.0 * PI / PLANCK - 1.0).abs() < 1e-15);
    }

    #[test]
    fn codata_compton_wavelength_close_to_rounded() {
        let c = Constants::codata();
        assert!((c.compton_wavelength - 2.426_310_2e-12).abs() < 1e-18);
        assert!((c.compton_wavelength / COMPTON_WAVELENGTH - 1.0).abs() < 0.011);
    }
}
