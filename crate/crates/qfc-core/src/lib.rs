//! Design and simulation engine for spectrally purifying single photons
//! during difference-frequency conversion in a periodically poled waveguide.
//!
//! The crate models the dispersion of the poled crystal, builds the joint
//! spectral distribution of the conversion process, decomposes it into
//! Schmidt modes, applies the resulting two-color beam-splitter to mixed
//! photon states, and drives parameter sweeps over pump power, pulse
//! duration, injected noise, propagation geometry and grating order.

pub mod constants;
pub mod conversion;
pub mod dispersion;
pub mod error;
pub mod fields;
pub mod grid;
pub mod jsd;
mod linalg;
pub mod optimize;
pub mod scenario;
pub mod schmidt;

pub use error::{Error, Result};
