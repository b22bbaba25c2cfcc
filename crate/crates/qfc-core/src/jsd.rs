//! Construction of the joint spectral distribution F(w_i, w_o): the product
//! of the pump envelope (energy conservation) and the sinc phase-matching
//! function (momentum conservation), L2-normalized on an anisotropic grid.

use faer::{c64, Mat};
use rayon::prelude::*;

use crate::constants::{SINC_SQ_HWHM, SPEED_OF_LIGHT};
use crate::dispersion::{CrystalConfig, Geometry};
use crate::error::{Error, Result};
use crate::fields::PumpPulse;
use crate::grid::{FrequencyAxis, SpectralGrid};

/// Normalized sinc, sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Phase-matching amplitude sinc(dk L / 2) for one frequency pair.
pub fn phase_matching_amplitude(config: &CrystalConfig, omega_i: f64, omega_o: f64) -> Result<f64> {
    let dk = config.phase_mismatch(omega_i, omega_o)?;
    Ok(sinc(0.5 * dk * config.length))
}

/// Characteristic widths (intensity FWHM, rad/s) of the two JSD factors
/// along each grid axis, from the linearized mismatch slopes.
#[derive(Debug, Clone, Copy)]
pub struct SupportWidths {
    pub pump_fwhm: f64,
    pub pmf_fwhm_input: f64,
    pub pmf_fwhm_output: f64,
}

/// Estimate the JSD support from group velocities at the band centers.
pub fn support_widths(
    config: &CrystalConfig,
    pump: &PumpPulse,
    lambda_i: f64,
    lambda_o: f64,
) -> Result<SupportWidths> {
    let two_pi_c = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT;
    let omega_i = two_pi_c / lambda_i;
    let omega_o = two_pi_c / lambda_o;
    let omega_p = omega_i - omega_o;
    if !(omega_p > 0.0) {
        return Err(Error::FrequencyOrdering { omega_i, omega_o });
    }
    let v_i = config.material.group_velocity(omega_i)?;
    let v_o = config.material.group_velocity(omega_o)?;
    let v_p = config.material.group_velocity(omega_p)?;
    let slope_i = (1.0 / v_i - 1.0 / v_p).abs();
    let slope_o = match config.geometry {
        Geometry::CounterPropagating => (1.0 / v_p + 1.0 / v_o).abs(),
        Geometry::CoPropagating => (1.0 / v_p - 1.0 / v_o).abs(),
    };
    let fwhm = |slope: f64| {
        if slope * config.length > 0.0 {
            4.0 * SINC_SQ_HWHM / (slope * config.length)
        } else {
            f64::INFINITY
        }
    };
    Ok(SupportWidths {
        pump_fwhm: 4.0 * std::f64::consts::LN_2 / pump.duration_fwhm,
        pmf_fwhm_input: fwhm(slope_i),
        pmf_fwhm_output: fwhm(slope_o),
    })
}

/// Auto-sized anisotropic grid: along each axis the JSD support is the
/// narrower of the two factors (the pump envelope confines the axis the
/// phase-matching function leaves open, and vice versa), and the axis spans
/// `span_factor` times that width. Explicit spans in the scenario override
/// this sizing.
pub fn auto_grid(
    config: &CrystalConfig,
    pump: &PumpPulse,
    lambda_i: f64,
    lambda_o: f64,
    points: (usize, usize),
    span_factor: (f64, f64),
) -> Result<SpectralGrid> {
    let widths = support_widths(config, pump, lambda_i, lambda_o)?;
    let two_pi_c = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT;
    let support_i = widths.pump_fwhm.min(widths.pmf_fwhm_input);
    let support_o = widths.pump_fwhm.min(widths.pmf_fwhm_output);
    let input = FrequencyAxis::from_span(
        two_pi_c / lambda_i,
        0.5 * span_factor.0 * support_i,
        points.0,
    )?;
    let output = FrequencyAxis::from_span(
        two_pi_c / lambda_o,
        0.5 * span_factor.1 * support_o,
        points.1,
    )?;
    SpectralGrid::new(input, output)
}

/// Joint spectral distribution on its grid. `amplitude[(i, o)]` indexes the
/// input axis by row and the output axis by column; the stored distribution
/// satisfies sum |F|^2 dw_i dw_o = 1 and `normalization` records the L2 norm
/// of the raw pump x phase-matching product that was divided out.
#[derive(Debug, Clone)]
pub struct Jsd {
    pub grid: SpectralGrid,
    pub amplitude: Mat<c64>,
    pub normalization: f64,
}

impl Jsd {
    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.grid.cell_weight();
        let mut acc = 0.0;
        for o in 0..self.grid.output.len() {
            for i in 0..self.grid.input.len() {
                acc += self.amplitude[(i, o)].norm_sqr() * w;
            }
        }
        acc
    }

    /// Export the dense amplitude matrix as delimited text for external
    /// plotting.
    ///
    /// Layout: `#`-prefixed header lines carry the two axes as
    /// `center step len` (rad/s); then one line per input-axis point
    /// (row-major over the input frequency), holding tab-separated
    /// `re` and `im` pairs for each output-axis point.
    pub fn write_delimited(&self, path: &std::path::Path) -> Result<()> {
        use std::fmt::Write as _;
        let mut text = String::new();
        let _ = writeln!(
            text,
            "# input_axis_radps {:.16e} {:.16e} {}",
            self.grid.input.center(),
            self.grid.input.step(),
            self.grid.input.len()
        );
        let _ = writeln!(
            text,
            "# output_axis_radps {:.16e} {:.16e} {}",
            self.grid.output.center(),
            self.grid.output.step(),
            self.grid.output.len()
        );
        let _ = writeln!(text, "# normalization {:.16e}", self.normalization);
        for i in 0..self.grid.input.len() {
            for o in 0..self.grid.output.len() {
                if o > 0 {
                    text.push('\t');
                }
                let z = self.amplitude[(i, o)];
                let _ = write!(text, "{:.9e}\t{:.9e}", z.re, z.im);
            }
            text.push('\n');
        }
        std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }
}

/// Fraction of L2 mass allowed in the outermost two-pixel frame of the grid.
/// The sinc side lobes deposit up to about 1e-3 there even on healthy
/// factor-five windows, so the gate watches for a clipped ridge (percent-level
/// frame mass) rather than demanding a vanishing edge amplitude.
const FRAME_MASS_LIMIT: f64 = 2e-3;

/// Build the JSD from an arbitrary mismatch function (test seam; production
/// code uses [`build_jsd`]).
pub fn build_jsd_with<F>(mismatch: F, pump: &PumpPulse, grid: SpectralGrid) -> Result<Jsd>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    pump.validate()?;
    let center_gap = grid.input.center() - grid.output.center();
    let sigma = pump.spectral_sigma();
    if (pump.center_omega() - center_gap).abs() > 1e-6 * sigma {
        return Err(Error::Config(format!(
            "pump carrier {:.6e} rad/s must equal the grid center difference {:.6e} rad/s",
            pump.center_omega(),
            center_gap
        )));
    }

    let (n_i, n_o) = (grid.input.len(), grid.output.len());
    let omega_i: Vec<f64> = grid.input.values();
    let omega_o: Vec<f64> = grid.output.values();

    // The mismatch closure returns dk * L, so the sinc argument is half of it.
    let columns: Vec<Result<Vec<c64>>> = omega_o
        .par_iter()
        .map(|&wo| {
            let mut col = Vec::with_capacity(n_i);
            for &wi in &omega_i {
                let dk = mismatch(wi, wo)?;
                let phi = sinc(0.5 * dk);
                let alpha = pump.envelope(wi - wo);
                col.push(alpha * c64::new(phi, 0.0));
            }
            Ok(col)
        })
        .collect();

    let mut raw = Mat::<c64>::zeros(n_i, n_o);
    for (o, col) in columns.into_iter().enumerate() {
        let col = col?;
        for (i, v) in col.into_iter().enumerate() {
            raw[(i, o)] = v;
        }
    }

    // Deterministic norm: per-column sums combined in index order.
    let w = grid.cell_weight();
    let mut total = 0.0;
    for o in 0..n_o {
        let mut col_sum = 0.0;
        for i in 0..n_i {
            col_sum += raw[(i, o)].norm_sqr();
        }
        total += col_sum;
    }
    let norm_sq = total * w;
    if !(norm_sq > 0.0) {
        return Err(Error::Infeasible(
            "joint spectral distribution vanishes on the grid".into(),
        ));
    }

    // Clipped-ridge gate: mass in the outer two-pixel frame.
    let mut frame = 0.0;
    for o in 0..n_o {
        for i in 0..n_i {
            if i < 2 || i >= n_i - 2 || o < 2 || o >= n_o - 2 {
                frame += raw[(i, o)].norm_sqr();
            }
        }
    }
    let frame_fraction = frame / total;
    if frame_fraction > FRAME_MASS_LIMIT {
        return Err(Error::Truncation {
            what: "joint spectral distribution grid".into(),
            fraction: frame_fraction,
            limit: FRAME_MASS_LIMIT,
            suggestion: "increase the per-axis span factors".into(),
        });
    }

    let normalization = norm_sq.sqrt();
    let scale = c64::new(1.0 / normalization, 0.0);
    let mut amplitude = raw;
    for o in 0..n_o {
        for i in 0..n_i {
            amplitude[(i, o)] *= scale;
        }
    }
    Ok(Jsd {
        grid,
        amplitude,
        normalization,
    })
}

/// Build the JSD for a crystal configuration and pump on the given grid.
pub fn build_jsd(config: &CrystalConfig, pump: &PumpPulse, grid: SpectralGrid) -> Result<Jsd> {
    config.validate()?;
    let length = config.length;
    build_jsd_with(
        |wi, wo| Ok(config.phase_mismatch(wi, wo)? * length),
        pump,
        grid,
    )
}

/// Intensity FWHM of the output (column-axis) marginal.
#[derive(Debug, Clone, Copy)]
pub struct BandwidthReport {
    /// Width between the outermost half-maximum crossings, Hz.
    pub fwhm_hz: f64,
    /// More than two half-maximum crossings were found.
    pub multimodal: bool,
}

/// Marginal |F|^2 bandwidth along the output axis, by linear interpolation at
/// half maximum. Multi-peaked marginals are flagged and reported with the
/// widest crossing pair.
pub fn output_marginal_bandwidth(jsd: &Jsd) -> Result<BandwidthReport> {
    let n_i = jsd.grid.input.len();
    let n_o = jsd.grid.output.len();
    let wi = jsd.grid.input.step();
    let marginal: Vec<f64> = (0..n_o)
        .map(|o| {
            (0..n_i)
                .map(|i| jsd.amplitude[(i, o)].norm_sqr() * wi)
                .sum()
        })
        .collect();
    let peak = marginal.iter().cloned().fold(0.0f64, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Contract("empty marginal".into()));
    }
    let half = 0.5 * peak;
    let step = jsd.grid.output.step();
    let mut crossings = Vec::new();
    for o in 0..n_o - 1 {
        let (a, b) = (marginal[o] - half, marginal[o + 1] - half);
        if a == 0.0 {
            crossings.push(jsd.grid.output.value(o));
        } else if a * b < 0.0 {
            let t = a / (a - b);
            crossings.push(jsd.grid.output.value(o) + t * step);
        }
    }
    if crossings.len() < 2 {
        return Err(Error::Truncation {
            what: "output marginal half-maximum".into(),
            fraction: 1.0,
            limit: 0.5,
            suggestion: "widen the output axis".into(),
        });
    }
    let fwhm = crossings.last().unwrap() - crossings.first().unwrap();
    Ok(BandwidthReport {
        fwhm_hz: fwhm / (2.0 * std::f64::consts::PI),
        multimodal: crossings.len() > 2,
    })
}
