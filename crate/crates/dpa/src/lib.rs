//! Modeling and analysis toolkit for kinetic-inductance degenerate parametric
//! amplifiers (DPAs).
//!
//! The library maps physical device and drive parameters onto an effective
//! parametric-amplifier model and evaluates its predictions:
//!
//! - [`circuit`]: device/drive descriptions and the derived model parameters
//!   (detunings, three-wave-mixing strength, Kerr constant).
//! - [`iotheory`]: reflection gain spectra, phase-sensitive gain, self-oscillation
//!   threshold, and gain-bandwidth extraction.
//! - [`squeezing`]: quadrature transformation matrices, coherent-state ellipses
//!   with parasitic reflections, and vacuum squeezing levels.
//! - [`noisechain`]: thermal occupations, detection-chain aggregation, amplifier
//!   excess noise, and input-referred noise budgets.
//! - [`fitting`]: parameter recovery from measured or synthetic traces, built on
//!   an in-repo Levenberg-Marquardt minimizer.
//!
//! Conventions: every rate and frequency inside the library is angular (rad/s);
//! Hz, dB, and dBm appear only at the boundaries through [`units`].

pub mod circuit;
pub mod error;
pub mod fitting;
pub mod iotheory;
pub mod noisechain;
pub mod squeezing;
pub mod units;

pub use error::{Error, Result};
