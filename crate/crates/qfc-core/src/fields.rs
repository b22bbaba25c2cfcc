//! Spectral and temporal descriptions of the pump pulse and the single
//! photon, including the spectro-temporal jitter model that mixes the photon
//! state.

use faer::{c64, Mat};

use crate::constants::{FWHM_PER_SIGMA, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::grid::FrequencyAxis;
use crate::linalg;

/// Transform-limited Gaussian pump pulse.
///
/// Amplitude conventions: `duration_fwhm` is the intensity FWHM of |a(t)|^2;
/// the spectral amplitude is the L2-normalized Gaussian
/// `(2 pi s^2)^(-1/4) exp(-(w - w0)^2 / (4 s^2))` whose intensity standard
/// deviation `s` satisfies FWHM_omega x FWHM_t = 4 ln 2.
#[derive(Debug, Clone)]
pub struct PumpPulse {
    /// Carrier wavelength, metres.
    pub center_wavelength: f64,
    /// Intensity FWHM of the pulse, seconds.
    pub duration_fwhm: f64,
    /// Peak power, watts.
    pub peak_power: f64,
    /// Pulse repetition rate, hertz.
    pub repetition_rate: f64,
}

impl PumpPulse {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_wavelength > 0.0
            && self.duration_fwhm > 0.0
            && self.peak_power >= 0.0
            && self.repetition_rate > 0.0)
        {
            return Err(Error::Config(
                "pump wavelength, duration and repetition rate must be positive".into(),
            ));
        }
        if self.duration_fwhm * self.repetition_rate >= 1.0 {
            return Err(Error::Config(
                "pump duty cycle must be below one (duration x repetition rate < 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn center_omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.center_wavelength
    }

    /// Intensity standard deviation of the spectrum, rad/s.
    pub fn spectral_sigma(&self) -> f64 {
        // FWHM_omega = 4 ln 2 / duration, divided down to a sigma.
        4.0 * std::f64::consts::LN_2 / self.duration_fwhm / FWHM_PER_SIGMA
    }

    /// Intensity FWHM of the spectrum, Hz.
    pub fn spectral_fwhm_hz(&self) -> f64 {
        FWHM_PER_SIGMA * self.spectral_sigma() / (2.0 * std::f64::consts::PI)
    }

    /// L2-normalized spectral amplitude at absolute frequency `omega_p`.
    pub fn envelope(&self, omega_p: f64) -> c64 {
        let sigma = self.spectral_sigma();
        let nu = omega_p - self.center_omega();
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        c64::new(norm * (-nu * nu / (4.0 * sigma * sigma)).exp(), 0.0)
    }

    /// |integral of the envelope over frequency|^2, rad/s (enters the
    /// coupling-constant energy-density term).
    pub fn envelope_integral_sq(&self) -> f64 {
        let sigma = self.spectral_sigma();
        // integral of the normalized Gaussian amplitude = (2 pi s^2)^(-1/4) * 2 s sqrt(pi)
        let integral = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25)
            * 2.0
            * sigma
            * std::f64::consts::PI.sqrt();
        integral * integral
    }

    /// Cycle-averaged power at the configured repetition rate, watts
    /// (square-pulse-equivalent convention: peak x duration x rate).
    pub fn average_power(&self) -> f64 {
        self.peak_power * self.duration_fwhm * self.repetition_rate
    }
}

/// Gaussian model of the emitted single photon, with deterministic
/// spectro-temporal offsets.
#[derive(Debug, Clone)]
pub struct QdPhotonSpec {
    /// Carrier wavelength, metres.
    pub center_wavelength: f64,
    /// Transform-limited intensity FWHM of the line, hertz.
    pub linewidth_fwhm: f64,
    /// Emission-time offset t0, seconds (enters as a spectral phase ramp).
    pub emission_time_offset: f64,
    /// Center-frequency offset w0, rad/s.
    pub frequency_offset: f64,
}

impl QdPhotonSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_wavelength > 0.0 && self.linewidth_fwhm > 0.0) {
            return Err(Error::Config(
                "photon wavelength and linewidth must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn center_omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.center_wavelength
    }

    /// Intensity standard deviation of the line, rad/s.
    pub fn sigma_omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.linewidth_fwhm / FWHM_PER_SIGMA
    }

    /// L2-normalized spectral amplitude at absolute frequency `omega`,
    /// centered at the carrier plus `frequency_offset` and carrying the
    /// `exp(i omega t0)` phase ramp of a delayed emission.
    pub fn amplitude(&self, omega: f64) -> c64 {
        let sigma = self.sigma_omega();
        let nu = omega - self.center_omega() - self.frequency_offset;
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        let magnitude = norm * (-nu * nu / (4.0 * sigma * sigma)).exp();
        let phase = omega * self.emission_time_offset;
        c64::new(magnitude * phase.cos(), magnitude * phase.sin())
    }
}

/// Gaussian spectro-temporal jitter: standard deviations of the random
/// center-frequency and emission-time shifts. `(0, 0)` leaves the photon pure.
#[derive(Debug, Clone, Copy)]
pub struct JitterModel {
    /// Std of the frequency shift, rad/s.
    pub sigma_frequency: f64,
    /// Std of the emission-time shift, seconds.
    pub sigma_time: f64,
}

impl JitterModel {
    pub const NONE: JitterModel = JitterModel {
        sigma_frequency: 0.0,
        sigma_time: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        if self.sigma_frequency < 0.0 || self.sigma_time < 0.0 {
            return Err(Error::Config("jitter sigmas must be non-negative".into()));
        }
        Ok(())
    }
}

/// Discretized single-photon spectral density matrix with unit trace under
/// the axis quadrature.
#[derive(Debug, Clone)]
pub struct PhotonState {
    pub axis: FrequencyAxis,
    pub rho: Mat<c64>,
}

impl PhotonState {
    /// Pure state from a spectral amplitude sampled on `axis`.
    pub fn pure(axis: FrequencyAxis, amplitude: impl Fn(f64) -> c64) -> Self {
        let n = axis.len();
        let psi: Vec<c64> = axis.values().iter().map(|&w| amplitude(w)).collect();
        let mut rho = Mat::<c64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                rho[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        let mut state = Self { axis, rho };
        state.renormalize();
        state
    }

    pub fn trace(&self) -> f64 {
        let n = self.axis.len();
        let w = self.axis.step();
        (0..n).map(|i| self.rho[(i, i)].re * w).sum()
    }

    fn renormalize(&mut self) {
        let tr = self.trace();
        let n = self.axis.len();
        for j in 0..n {
            for i in 0..n {
                self.rho[(i, j)] *= c64::new(1.0 / tr, 0.0);
            }
        }
    }

    /// Tr(rho^2) under the axis quadrature; 1 for a pure state.
    pub fn purity(&self) -> f64 {
        let n = self.axis.len();
        let w2 = self.axis.step() * self.axis.step();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += self.rho[(i, j)].norm_sqr() * w2;
            }
        }
        acc
    }

    /// Spectral probability density along the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.axis.len()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// Cheap structural checks: hermiticity and unit trace.
    pub fn validate(&self) -> Result<()> {
        let n = self.axis.len();
        let mut max_abs = 0.0f64;
        let mut max_asym = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                let a = self.rho[(i, j)];
                let b = self.rho[(j, i)].conj();
                max_abs = max_abs.max(a.norm());
                max_asym = max_asym.max((a - b).norm());
            }
        }
        if max_asym > 1e-12 * max_abs {
            return Err(Error::Contract(format!(
                "density matrix not hermitian: asymmetry {max_asym:.3e} vs scale {max_abs:.3e}"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!("trace {tr} deviates from one")));
        }
        Ok(())
    }

    /// Eigenvalues of the weighted density matrix (a probability
    /// distribution for a valid state), ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.axis.len();
        let w = self.axis.step();
        let mut scaled = Mat::<c64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] = self.rho[(i, j)] * c64::new(w, 0.0);
            }
        }
        linalg::hermitian_eigenvalues(&scaled)
    }
}

/// Nodes and weights of the n-point Gauss-Hermite rule in the physicists'
/// convention: integral f(x) exp(-x^2) dx = sum w_i f(x_i).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be at least one");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut derivative = 0.0;
        for _ in 0..200 {
            // Orthonormal Hermite recurrence evaluated at z.
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            derivative = (2.0 * nf).sqrt() * p2;
            let dz = p1 / derivative;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (derivative * derivative);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

const EDGE_DENSITY_LIMIT: f64 = 1e-4;

/// Build the mixed photon state of a jittered emitter on `axis`.
///
/// The frequency-jitter average is evaluated by Gauss-Hermite quadrature of
/// the stated order; the emission-time average has a closed form (each matrix
/// element only acquires the Gaussian characteristic function
/// `exp(-sigma_t^2 (w - w')^2 / 2)`), which equals the quadrature limit and
/// is applied exactly.
pub fn build_mixed_state(
    spec: &QdPhotonSpec,
    jitter: &JitterModel,
    axis: FrequencyAxis,
    quadrature_order: usize,
) -> Result<PhotonState> {
    spec.validate()?;
    jitter.validate()?;
    if quadrature_order < 7 {
        return Err(Error::Config(
            "frequency-jitter quadrature order must be at least 7".into(),
        ));
    }
    let sigma_combined = (spec.sigma_omega().powi(2) + jitter.sigma_frequency.powi(2)).sqrt();
    let center = spec.center_omega() + spec.frequency_offset;
    let needed = 5.0 * sigma_combined;
    if axis.start() > center - needed || axis.end() < center + needed {
        return Err(Error::Truncation {
            what: "photon-state axis".into(),
            fraction: 1.0,
            limit: EDGE_DENSITY_LIMIT,
            suggestion: format!(
                "span at least +-{:.3e} rad/s around the (offset) carrier",
                needed
            ),
        });
    }

    // Time jitter suppresses coherence on the scale 1/sigma_t in (w - w');
    // the axis must sample that ridge or the purity quadrature degrades.
    if jitter.sigma_time > 0.0 && axis.step() > 0.9 / jitter.sigma_time {
        return Err(Error::Truncation {
            what: "photon-state axis step versus time-jitter coherence width".into(),
            fraction: axis.step() * jitter.sigma_time,
            limit: 0.9,
            suggestion: "increase the state point count".into(),
        });
    }

    let n = axis.len();
    let (nodes, weights) = if jitter.sigma_frequency > 0.0 {
        gauss_hermite(quadrature_order)
    } else {
        (vec![0.0], vec![std::f64::consts::PI.sqrt()])
    };
    let inv_sqrt_pi = std::f64::consts::PI.sqrt().recip();

    // Columns hold sqrt(weight) x displaced amplitudes; rho = A A^H.
    let mut displaced = Mat::<c64>::zeros(n, nodes.len());
    for (k, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
        let shift = std::f64::consts::SQRT_2 * jitter.sigma_frequency * x;
        let shifted = QdPhotonSpec {
            frequency_offset: spec.frequency_offset + shift,
            ..spec.clone()
        };
        let scale = (w * inv_sqrt_pi).sqrt();
        for (i, &omega) in axis.values().iter().enumerate() {
            displaced[(i, k)] = shifted.amplitude(omega) * c64::new(scale, 0.0);
        }
    }
    let mut rho = linalg::matmul(&displaced, &displaced.adjoint().to_owned());

    if jitter.sigma_time > 0.0 {
        let st2 = jitter.sigma_time * jitter.sigma_time;
        for j in 0..n {
            for i in 0..n {
                let d = axis.value(i) - axis.value(j);
                let damp = (-0.5 * st2 * d * d).exp();
                rho[(i, j)] *= c64::new(damp, 0.0);
            }
        }
    }

    let mut state = PhotonState { axis, rho };
    state.renormalize();

    let diag = state.diagonal();
    let peak = diag.iter().cloned().fold(0.0f64, f64::max);
    let edge = diag[0].max(diag[n - 1]);
    if edge > EDGE_DENSITY_LIMIT * peak {
        return Err(Error::Truncation {
            what: "photon-state axis".into(),
            fraction: edge / peak,
            limit: EDGE_DENSITY_LIMIT,
            suggestion: "widen the state axis span".into(),
        });
    }
    Ok(state)
}

/// Axis sized for a jittered photon: `factor` combined widths either side of
/// the carrier.
pub fn state_axis(
    spec: &QdPhotonSpec,
    jitter: &JitterModel,
    len: usize,
    factor: f64,
) -> Result<FrequencyAxis> {
    let sigma_combined = (spec.sigma_omega().powi(2) + jitter.sigma_frequency.powi(2)).sqrt();
    FrequencyAxis::from_span(
        spec.center_omega() + spec.frequency_offset,
        factor * sigma_combined,
        len,
    )
}
