//! Measurement as spontaneous superposition breaking, simulated on two-branch
//! pointer states.
//!
//! - [`qcore`]: two-branch bipartite states, reduced density matrices, Born weights
//! - [`packets`]: Gaussian pointer packets, overlaps, moments, spreading
//! - [`ssb`]: regime decision and seeded collapse ensembles
//! - [`mirror`]: photon + movable half-silvered mirror
//! - [`compton`]: Compton scattering with the electron as pointer
//! - [`config`], [`output`], [`cli`]: the `pointer-lab` command-line harness

pub mod cli;
pub mod compton;
pub mod config;
pub mod constants;
pub mod error;
pub mod mirror;
pub mod output;
pub mod packets;
pub mod qcore;
pub mod ssb;

pub use constants::Constants;
pub use error::{Error, Result};
