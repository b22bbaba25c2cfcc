//! Uniform frequency axes and the two-dimensional spectral grid.

use crate::error::{Error, Result};

/// Uniform one-dimensional axis of angular frequencies (rad/s). Quadrature on
/// the axis uses the plain step weight, which converges superalgebraically
/// for the smooth, decaying integrands handled here.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAxis {
    center: f64,
    step: f64,
    len: usize,
}

impl FrequencyAxis {
    /// Axis of `len` points spanning `center +- half_span`.
    pub fn from_span(center: f64, half_span: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::Config("axis needs at least two points".into()));
        }
        if !(half_span > 0.0 && half_span.is_finite()) {
            return Err(Error::Config("axis half-span must be positive".into()));
        }
        Ok(Self {
            center,
            step: 2.0 * half_span / (len - 1) as f64,
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Quadrature weight (= grid step), rad/s.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn start(&self) -> f64 {
        self.center - 0.5 * self.step * (self.len - 1) as f64
    }

    pub fn end(&self) -> f64 {
        self.start() + self.step * (self.len - 1) as f64
    }

    pub fn value(&self, index: usize) -> f64 {
        self.start() + self.step * index as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    /// Detuning of point `index` from the axis center.
    pub fn detuning(&self, index: usize) -> f64 {
        self.value(index) - self.center
    }
}

/// Anisotropic two-dimensional grid over (input, output) angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub input: FrequencyAxis,
    pub output: FrequencyAxis,
}

impl SpectralGrid {
    pub fn new(input: FrequencyAxis, output: FrequencyAxis) -> Result<Self> {
        for (name, axis) in [("input", &input), ("output", &output)] {
            if axis.len() < 64 {
                return Err(Error::Config(format!(
                    "{name} axis needs at least 64 points, got {}",
                    axis.len()
                )));
            }
        }
        Ok(Self { input, output })
    }

    /// Product of the per-axis quadrature weights.
    pub fn cell_weight(&self) -> f64 {
        self.input.step() * self.output.step()
    }
}
