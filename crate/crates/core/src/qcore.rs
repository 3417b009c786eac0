//! Two-branch bipartite states and their reduced 2×2 density matrices.
//!
//! A [`TwoBranchState`] is c₁|s₁⟩|g₁⟩ + c₂|s₂⟩|g₂⟩ with orthogonal system
//! labels s₁, s₂ and Gaussian pointer packets g₁, g₂. Tracing out the
//! pointer leaves a [`ReducedDensityMatrix2`] whose coherence carries the
//! pointer overlap.

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::packets::{self, GaussianPacket};

pub type Amplitude = Complex64;

/// Slack on |c₁|² + |c₂|² = 1 and on the trace.
pub const NORM_TOL: f64 = 1e-9;
/// Slack on ρ₁₁ρ₂₂ - |ρ₁₂|² ≥ 0.
pub const PSD_TOL: f64 = 1e-12;

/// Selects one of the two branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchIndex {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub amplitude: Amplitude,
    pub label: String,
    pub pointer: GaussianPacket,
}

impl Branch {
    pub fn new(amplitude: Amplitude, label: impl Into<String>, pointer: GaussianPacket) -> Self {
        Branch {
            amplitude,
            label: label.into(),
            pointer,
        }
    }
}

fn finite(z: Amplitude) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBranchState {
    branches: [Branch; 2],
}

impl TwoBranchState {
    /// Builds the state. Amplitudes must be finite and not both zero, and the
    /// labels must differ. The state need not be normalized.
    pub fn new(first: Branch, second: Branch) -> Result<Self> {
        if !finite(first.amplitude) || !finite(second.amplitude) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        if first.label == second.label {
            return Err(Error::InvalidState(format!(
                "branch labels must be distinct, both are `{}`",
                first.label
            )));
        }
        let state = TwoBranchState {
            branches: [first, second],
        };
        if state.norm_sqr() == 0.0 {
            return Err(Error::InvalidState("both amplitudes vanish".into()));
        }
        Ok(state)
    }

    pub fn branch(&self, which: BranchIndex) -> &Branch {
        match which {
            BranchIndex::First => &self.branches[0],
            BranchIndex::Second => &self.branches[1],
        }
    }

    pub fn first(&self) -> &Branch {
        &self.branches[0]
    }

    pub fn second(&self) -> &Branch {
        &self.branches[1]
    }

    /// |c₁|² + |c₂|². The labels are orthogonal, so the pointer overlap
    /// does not enter the bipartite norm.
    pub fn norm_sqr(&self) -> f64 {
        self.branches[0].amplitude.norm_sqr() + self.branches[1].amplitude.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        let mut out = self.clone();
        for b in &mut out.branches {
            b.amplitude /= n;
        }
        out
    }

    /// ⟨g₁|g₂⟩ of the two pointer packets.
    pub fn pointer_overlap(&self, consts: &Constants) -> Result<Amplitude> {
        packets::overlap(&self.branches[0].pointer, &self.branches[1].pointer, consts)
    }

    /// Same state with the branches in the opposite order.
    pub fn swapped(&self) -> Self {
        let [a, b] = self.branches.clone();
        TwoBranchState { branches: [b, a] }
    }
}

/// 2×2 density matrix over the system labels of a two-branch state.
/// ρ₂₁ = conj(ρ₁₂) is implied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedDensityMatrix2 {
    rho11: f64,
    rho22: f64,
    rho12: Amplitude,
    basis: [String; 2],
}

impl ReducedDensityMatrix2 {
    pub fn new(rho11: f64, rho22: f64, rho12: Amplitude, basis: [String; 2]) -> Result<Self> {
        let m = ReducedDensityMatrix2 {
            rho11,
            rho22,
            rho12,
            basis,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDensityMatrix(msg));
        if !(self.rho11.is_finite() && self.rho22.is_finite() && finite(self.rho12)) {
            return bad("non-finite entry".into());
        }
        if self.rho11 < -PSD_TOL || self.rho22 < -PSD_TOL {
            return bad(format!("negative population ({}, {})", self.rho11, self.rho22));
        }
        let trace = self.rho11 + self.rho22;
        if (trace - 1.0).abs() > NORM_TOL {
            return bad(format!("trace {trace} != 1"));
        }
        let det = self.rho11 * self.rho22 - self.rho12.norm_sqr();
        if det < -PSD_TOL {
            return bad(format!("not positive semidefinite (det = {det})"));
        }
        Ok(())
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho22(&self) -> f64 {
        self.rho22
    }

    pub fn rho12(&self) -> Amplitude {
        self.rho12
    }

    pub fn basis(&self) -> &[String; 2] {
        &self.basis
    }

    /// Tr(ρ²) = ρ₁₁² + ρ₂₂² + 2|ρ₁₂|².
    pub fn purity(&self) -> f64 {
        self.rho11 * self.rho11 + self.rho22 * self.rho22 + 2.0 * self.rho12.norm_sqr()
    }

    /// Fringe visibility 2|ρ₁₂|.
    pub fn visibility(&self) -> f64 {
        2.0 * self.rho12.norm()
    }
}

/// Traces the pointer out of `state`, given ⟨g₁|g₂⟩.
///
/// ρ₁₁ = |c₁|², ρ₂₂ = |c₂|², ρ₁₂ = c₁ c₂* conj(overlap), divided by the norm.
pub fn reduce_pointer(state: &TwoBranchState, pointer_overlap: Amplitude) -> Result<ReducedDensityMatrix2> {
    if !finite(pointer_overlap) {
        return Err(Error::InvalidOverlap(f64::NAN));
    }
    let mag = pointer_overlap.norm();
    if mag > 1.0 + NORM_TOL {
        return Err(Error::InvalidOverlap(mag));
    }
    let c1 = state.first().amplitude;
    let c2 = state.second().amplitude;
    let n = state.norm_sqr();
    ReducedDensityMatrix2::new(
        c1.norm_sqr() / n,
        c2.norm_sqr() / n,
        c1 * c2.conj() * pointer_overlap.conj() / n,
        [state.first().label.clone(), state.second().label.clone()],
    )
}

/// [`reduce_pointer`] with the overlap computed from the packets.
pub fn reduce(state: &TwoBranchState, consts: &Constants) -> Result<ReducedDensityMatrix2> {
    reduce_pointer(state, state.pointer_overlap(consts)?)
}

pub fn purity(rho: &ReducedDensityMatrix2) -> f64 {
    rho.purity()
}

pub fn visibility(rho: &ReducedDensityMatrix2) -> f64 {
    rho.visibility()
}

/// (|c₁|², |c₂|²) of a normalized state.
pub fn born_probabilities(state: &TwoBranchState) -> Result<(f64, f64)> {
    if !state.is_normalized() {
        return Err(Error::Unnormalized(state.norm_sqr()));
    }
    Ok((state.first().amplitude.norm_sqr(), state.second().amplitude.norm_sqr()))
}
