//! Minimum-uncertainty Gaussian pointer packets in one dimension.
//!
//! A packet created with [`GaussianPacket::new`] sits at its waist: the
//! wavefunction is
//!
//! ```text
//! ψ(x) = (2πσ²)^(-1/4) · exp(-(x - x₀)² / 4σ² + i p₀ (x - x₀) / ħ)
//! ```
//!
//! with σ the standard deviation of |ψ|². The plane-wave phase is referenced
//! to the packet centre, which fixes the phase of [`overlap`]. Free evolution
//! keeps track of the waist width and the elapsed time so that overlaps and
//! moments of evolved packets stay exact.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::constants::Constants;
use crate::error::{param, Error, Result};
use crate::qcore::Amplitude;

/// Default ratio R for the "centre much larger than spread" test.
pub const DEFAULT_DOMINANCE_RATIO: f64 = 10.0;
/// Default k for the weak-interference predicate: one standard deviation.
pub const DEFAULT_SEPARATION_K: f64 = 1.0;

const PAIR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    x_center: f64,
    p_center: f64,
    sigma_x: f64,
    mass: f64,
    time: f64,
    waist: f64,
}

impl GaussianPacket {
    /// A packet at its minimum-uncertainty waist, with `time = 0`.
    pub fn new(x_center: f64, p_center: f64, sigma_x: f64, mass: f64) -> Result<Self> {
        if !x_center.is_finite() {
            return Err(param("x_center", format!("must be finite, got {x_center}")));
        }
        if !p_center.is_finite() {
            return Err(param("p_center", format!("must be finite, got {p_center}")));
        }
        if !(sigma_x.is_finite() && sigma_x > 0.0) {
            return Err(param("sigma_x", format!("must be finite and > 0, got {sigma_x}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(param("mass", format!("must be finite and > 0, got {mass}")));
        }
        Ok(GaussianPacket {
            x_center,
            p_center,
            sigma_x,
            mass,
            time: 0.0,
            waist: sigma_x,
        })
    }

    pub fn x_center(&self) -> f64 {
        self.x_center
    }

    pub fn p_center(&self) -> f64 {
        self.p_center
    }

    /// Current position spread.
    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Time elapsed since the packet was at its waist.
    pub fn time(&self) -> f64 {
        self.time
    }

    /// Position spread at the waist.
    pub fn waist_sigma(&self) -> f64 {
        self.waist
    }

    /// Momentum spread ħ/(2σ₀); constant under free evolution.
    pub fn sigma_p(&self, consts: &Constants) -> f64 {
        consts.hbar / (2.0 * self.waist)
    }

    /// Position centre propagated back to the waist.
    fn waist_center(&self) -> f64 {
        self.x_center - self.p_center * self.time / self.mass
    }

    /// Value of the wavefunction at `x` (units of m^-1/2 in SI).
    pub fn wavefunction(&self, x: f64, consts: &Constants) -> Complex64 {
        let hbar = consts.hbar;
        let alpha = 1.0 / (4.0 * self.waist * self.waist);
        let spread = Complex64::new(1.0, 2.0 * alpha * hbar * self.time / self.mass);
        let a = alpha / spread;
        let u = x - self.x_center;
        let k = self.p_center / hbar;
        let omega_t = self.p_center * self.p_center * self.time / (2.0 * self.mass * hbar);
        let norm = (2.0 * PI * self.waist * self.waist).powf(-0.25);
        let exponent = -a * u * u + Complex64::i() * (k * (x - self.waist_center()) - omega_t);
        norm * exponent.exp() / spread.sqrt()
    }

    /// Gaussian exponent coefficients in the scaled coordinate
    /// ξ = (x - origin)/scale, normalized with respect to dξ.
    fn form(&self, origin: f64, scale: f64, consts: &Constants) -> GaussForm {
        let i = Complex64::i();
        let w = self.waist / scale;
        let alpha = 1.0 / (4.0 * w * w);
        let beta = consts.hbar * self.time / (2.0 * self.mass * self.waist * self.waist);
        let spread = Complex64::new(1.0, beta);
        let a = alpha / spread;
        let center = (self.x_center - origin) / scale;
        let x0 = (self.waist_center() - origin) / scale;
        let k = self.p_center * scale / consts.hbar;
        let omega_t =
            self.p_center * self.p_center * self.time / (2.0 * self.mass * consts.hbar);
        let b = 2.0 * a * center + i * k;
        let c = -a * center * center - i * (k * x0 + omega_t)
            + Complex64::from(-0.25 * (2.0 * PI * w * w).ln())
            - 0.5 * spread.ln();
        GaussForm { a, b, c }
    }
}

/// exp(-a ξ² + b ξ + c) with Re(a) > 0.
#[derive(Debug, Clone, Copy)]
struct GaussForm {
    a: Complex64,
    b: Complex64,
    c: Complex64,
}

impl GaussForm {
    /// (⟨f|g⟩, ⟨f|ξ|g⟩, ⟨f|ξ²|g⟩).
    fn moments(&self, other: &GaussForm) -> [Complex64; 3] {
        let a = self.a.conj() + other.a;
        let b = self.b.conj() + other.b;
        let c = self.c.conj() + other.c;
        let i0 = (Complex64::from(PI) / a).sqrt() * (b * b / (4.0 * a) + c).exp();
        let shift = b / (2.0 * a);
        [i0, i0 * shift, i0 * (1.0 / (2.0 * a) + shift * shift)]
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= PAIR_RTOL * a.abs().max(b.abs())
}

fn check_pair(g1: &GaussianPacket, g2: &GaussianPacket) -> Result<()> {
    if !close(g1.waist, g2.waist) {
        return Err(Error::UnsupportedPair(format!(
            "waist widths differ ({} vs {})",
            g1.waist, g2.waist
        )));
    }
    if !close(g1.mass, g2.mass) {
        return Err(Error::UnsupportedPair(format!(
            "masses differ ({} vs {})",
            g1.mass, g2.mass
        )));
    }
    if !close(g1.time, g2.time) {
        return Err(Error::UnsupportedPair(format!(
            "packet times differ ({} vs {})",
            g1.time, g2.time
        )));
    }
    Ok(())
}

/// Inner product ⟨g1|g2⟩ of two packets sharing width, mass and time.
///
/// At the waist the magnitude is exp(-Δx²/8σ² - Δp²σ²/2ħ²) and the phase is
/// (x₁ - x₂)(p₁ + p₂)/2ħ. Evolved packets are compared at their waist, where
/// the inner product is the same because free evolution is unitary.
pub fn overlap(g1: &GaussianPacket, g2: &GaussianPacket, consts: &Constants) -> Result<Amplitude> {
    check_pair(g1, g2)?;
    let hbar = consts.hbar;
    let sigma = g1.waist;
    let dx = g1.waist_center() - g2.waist_center();
    let dp = g1.p_center - g2.p_center;
    let log_mag = -dx * dx / (8.0 * sigma * sigma) - dp * dp * sigma * sigma / (2.0 * hbar * hbar);
    let phase = dx * (g1.p_center + g2.p_center) / (2.0 * hbar);
    Ok(Complex64::from_polar(log_mag.exp(), phase))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionMoments {
    pub mean_x: f64,
    pub std_x: f64,
    /// |mean_x| / std_x
    pub stability_ratio: f64,
}

/// Exact ⟨x⟩ and Δx of the normalized single-particle superposition
/// c1·|g1⟩ + c2·|g2⟩, cross terms included.
///
/// The packets may differ in every parameter; the norm is the full Gram norm
/// |c1|² + |c2|² + 2 Re(c1* c2 ⟨g1|g2⟩).
pub fn superposition_moments(
    c1: Amplitude,
    g1: &GaussianPacket,
    c2: Amplitude,
    g2: &GaussianPacket,
    consts: &Constants,
) -> Result<SuperpositionMoments> {
    if !(c1.re.is_finite() && c1.im.is_finite() && c2.re.is_finite() && c2.im.is_finite()) {
        return Err(Error::InvalidState("non-finite amplitude".into()));
    }
    // Work around the midpoint in units of the first packet's spread to keep
    // the exponent arithmetic well conditioned.
    let origin = 0.5 * (g1.x_center + g2.x_center);
    let scale = g1.sigma_x;
    let f1 = g1.form(origin, scale, consts);
    let f2 = g2.form(origin, scale, consts);

    // Self terms have closed forms; only the cross term needs the integral.
    let u1 = (g1.x_center - origin) / scale;
    let u2 = (g2.x_center - origin) / scale;
    let s1 = g1.sigma_x / scale;
    let s2 = g2.sigma_x / scale;
    let w1 = c1.norm_sqr();
    let w2 = c2.norm_sqr();
    let cross = f1.moments(&f2);
    let weight = c1.conj() * c2;

    let norm = w1 + w2 + 2.0 * (weight * cross[0]).re;
    if !(norm.is_finite() && norm > 1e-12) {
        return Err(Error::InvalidState(format!("degenerate superposition norm {norm}")));
    }
    let first = w1 * u1 + w2 * u2 + 2.0 * (weight * cross[1]).re;
    let second = w1 * (u1 * u1 + s1 * s1) + w2 * (u2 * u2 + s2 * s2) + 2.0 * (weight * cross[2]).re;
    let mean = first / norm;
    let var = (second / norm - mean * mean).max(0.0);

    let mean_x = origin + scale * mean;
    let std_x = scale * var.sqrt();
    if std_x.is_nan() || std_x <= 0.0 {
        return Err(Error::InvalidState("superposition has zero spread".into()));
    }
    Ok(SuperpositionMoments {
        mean_x,
        std_x,
        stability_ratio: mean_x.abs() / std_x,
    })
}

/// Outcome of the weak-interference test, with both sub-criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceReport {
    /// |Δx| > k·σ
    pub position_split: bool,
    /// |⟨g1|g2⟩| < exp(-k²/8)
    pub overlap_split: bool,
    pub overlap_magnitude: f64,
    pub threshold: f64,
}

impl InterferenceReport {
    pub fn weak(&self) -> bool {
        self.position_split || self.overlap_split
    }
}

/// Overlap threshold exp(-k²/8): the overlap of two packets displaced by k·σ.
pub fn overlap_threshold(k: f64) -> f64 {
    (-k * k / 8.0).exp()
}

pub fn interference_report(
    g1: &GaussianPacket,
    g2: &GaussianPacket,
    k: f64,
    consts: &Constants,
) -> Result<InterferenceReport> {
    if !(k.is_finite() && k > 0.0) {
        return Err(param("k", format!("must be finite and > 0, got {k}")));
    }
    let magnitude = overlap(g1, g2, consts)?.norm();
    let threshold = overlap_threshold(k);
    Ok(InterferenceReport {
        position_split: (g1.x_center - g2.x_center).abs() > k * g1.sigma_x,
        overlap_split: magnitude < threshold,
        overlap_magnitude: magnitude,
        threshold,
    })
}

/// True when the packets are weakly interfering: separated by more than
/// k standard deviations in position, or with an overlap below exp(-k²/8).
pub fn weakly_interfering(
    g1: &GaussianPacket,
    g2: &GaussianPacket,
    k: f64,
    consts: &Constants,
) -> Result<bool> {
    interference_report(g1, g2, k, consts).map(|r| r.weak())
}

/// |x_center| ≥ R·σ, boundary inclusive.
pub fn packet_stable(g: &GaussianPacket, dominance_ratio: f64) -> bool {
    g.x_center.abs() >= dominance_ratio * g.sigma_x
}

/// Free spreading over `dt`: the centre drifts with p/m and the width grows
/// as σ₀·√(1 + (ħt / 2mσ₀²)²), t measured from the waist.
pub fn evolve_free(g: &GaussianPacket, dt: f64, consts: &Constants) -> Result<GaussianPacket> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(param("dt", format!("must be finite and >= 0, got {dt}")));
    }
    let time = g.time + dt;
    let spread = consts.hbar * time / (2.0 * g.mass * g.waist * g.waist);
    Ok(GaussianPacket {
        x_center: g.x_center + g.p_center / g.mass * dt,
        sigma_x: g.waist * (1.0 + spread * spread).sqrt(),
        time,
        ..*g
    })
}
