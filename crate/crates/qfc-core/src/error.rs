//! Crate-wide error type.

/// Errors produced by the conversion engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("wavelength {wavelength_m:.4e} m outside valid range [{min_m:.4e}, {max_m:.4e}] m")]
    WavelengthOutOfRange {
        wavelength_m: f64,
        min_m: f64,
        max_m: f64,
    },

    #[error("input frequency must exceed output frequency for difference-frequency generation (omega_i = {omega_i:.6e} rad/s, omega_o = {omega_o:.6e} rad/s)")]
    FrequencyOrdering { omega_i: f64, omega_o: f64 },

    #[error("no solution bracketed in [{lo:.6e}, {hi:.6e}]: {context}")]
    Bracket { lo: f64, hi: f64, context: String },

    #[error("grid truncates the signal ({what}: edge fraction {fraction:.3e} exceeds {limit:.1e}); {suggestion}")]
    Truncation {
        what: String,
        fraction: f64,
        limit: f64,
        suggestion: String,
    },

    #[error("insufficient Schmidt modes: truncation weight {weight:.3e} exceeds {limit:.2e}")]
    InsufficientModes { weight: f64, limit: f64 },

    #[error("conversion transmission {transmission:.3e} below {min:.1e}; normalized output state undefined")]
    NoConversion { transmission: f64, min: f64 },

    #[error("configuration infeasible: {0}")]
    Infeasible(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
