//! Spontaneous superposition breaking: the regime decision for a two-branch
//! pointer superposition and Born-rule actualization over ensembles.
//!
//! States are never modified. Actualization returns which branch turned out,
//! and there is deliberately no operation that maps an outcome back to the
//! superposed state.
//!
//! # Random numbers
//!
//! Every draw comes from ChaCha8 ([`rand_chacha::ChaCha8Rng`]) keyed with
//! `seed_from_u64(seed)`. Trial `i` of an ensemble reads stream `i` from word
//! position 0, so trial outcomes do not depend on how trials are scheduled
//! across threads, and trial 0 is exactly [`actualize`] with the same seed.
//! Independent sub-runs (grid cells of a sweep) use the key
//! [`derive_seed`]`(seed, cell)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::packets;
use crate::qcore::{born_probabilities, BranchIndex, TwoBranchState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Superposition,
    Intermediate,
    Broken,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Superposition => "superposition",
            Regime::Intermediate => "intermediate",
            Regime::Broken => "broken",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "superposition" => Ok(Regime::Superposition),
            "intermediate" => Ok(Regime::Intermediate),
            "broken" => Ok(Regime::Broken),
            other => Err(Error::Range(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    PointerOverlap,
    WavelengthRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub criterion_value: f64,
    pub criterion_kind: CriterionKind,
}

/// Outcome tallies of an ensemble. `fraction1` is `None` when no collapse
/// took place (`n_total = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_total: u64,
    pub n_branch1: u64,
    pub n_branch2: u64,
    pub fraction1: Option<f64>,
    pub seed: u64,
    pub regime: Regime,
}

impl EnsembleStats {
    pub fn validate(&self) -> Result<()> {
        if self.n_branch1 + self.n_branch2 != self.n_total {
            return Err(Error::InvalidState(format!(
                "tallies {} + {} do not add up to {}",
                self.n_branch1, self.n_branch2, self.n_total
            )));
        }
        let expected = (self.n_total > 0).then(|| self.n_branch1 as f64 / self.n_total as f64);
        if self.fraction1 != expected {
            return Err(Error::InvalidState("fraction1 does not match tallies".into()));
        }
        if self.regime != Regime::Broken && self.n_total != 0 {
            return Err(Error::RegimeViolation(format!(
                "{} collapses recorded in the {} regime",
                self.n_total, self.regime
            )));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key for independent sub-run `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index))
}

/// Generator for trial `index` of a run keyed with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    stream(&ChaCha8Rng::seed_from_u64(seed), index)
}

/// `base` must be unused (word position 0).
pub(crate) fn stream(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng
}

/// Draws a branch with probability `p1` for the first one.
pub(crate) fn draw_branch<R: Rng>(rng: &mut R, p1: f64) -> BranchIndex {
    // random::<f64>() lies in [0, 1), so p1 = 0 never selects the first
    // branch and p1 = 1 always does.
    if rng.random::<f64>() < p1 {
        BranchIndex::First
    } else {
        BranchIndex::Second
    }
}

/// Regime of the pointer superposition: broken when the pointers are weakly
/// interfering at separation parameter `k`.
pub fn classify(state: &TwoBranchState, k: f64, consts: &Constants) -> Result<RegimeVerdict> {
    let report = packets::interference_report(&state.first().pointer, &state.second().pointer, k, consts)?;
    Ok(RegimeVerdict {
        regime: if report.weak() {
            Regime::Broken
        } else {
            Regime::Superposition
        },
        criterion_value: report.overlap_magnitude,
        criterion_kind: CriterionKind::PointerOverlap,
    })
}

/// Picks the branch that turns out, with Born probabilities.
pub fn actualize(state: &TwoBranchState, verdict: &RegimeVerdict, rng_seed: u64) -> Result<BranchIndex> {
    if verdict.regime != Regime::Broken {
        return Err(Error::RegimeViolation(format!(
            "collapse requested in the {} regime",
            verdict.regime
        )));
    }
    let (p1, _) = born_probabilities(state)?;
    Ok(draw_branch(&mut trial_rng(rng_seed, 0), p1))
}

/// Counts how many of `n` trials land in the first branch; trial `i` draws
/// from stream `i`.
pub(crate) fn tally(seed: u64, n: u64, p1: f64) -> u64 {
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .into_par_iter()
        .filter(|&i| draw_branch(&mut stream(&base, i), p1) == BranchIndex::First)
        .count() as u64
}

/// `n` independent actualizations. In the superposition regime nothing
/// collapses and the stats come back empty with the regime recorded.
pub fn run_ensemble(
    state: &TwoBranchState,
    n: u64,
    k: f64,
    rng_seed: u64,
    consts: &Constants,
) -> Result<EnsembleStats> {
    if n == 0 {
        return Err(Error::Range("ensemble size must be at least 1".into()));
    }
    let verdict = classify(state, k, consts)?;
    if verdict.regime != Regime::Broken {
        return Ok(EnsembleStats {
            n_total: 0,
            n_branch1: 0,
            n_branch2: 0,
            fraction1: None,
            seed: rng_seed,
            regime: verdict.regime,
        });
    }
    let (p1, _) = born_probabilities(state)?;
    let n1 = tally(rng_seed, n, p1);
    Ok(EnsembleStats {
        n_total: n,
        n_branch1: n1,
        n_branch2: n - n1,
        fraction1: Some(n1 as f64 / n as f64),
        seed: rng_seed,
        regime: Regime::Broken,
    })
}
