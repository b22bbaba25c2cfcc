//! Parameter search and sweep drivers: optimal pump duration per waveguide
//! length, power for unit zeroth-mode efficiency, purity-versus-noise
//! surfaces, and the geometry / grating-order comparisons.

use rayon::prelude::*;

use crate::constants::SPEED_OF_LIGHT;
use crate::conversion::{
    build_transfer_operator, convert_state, coupling_constant, ConversionReport, CouplingBudget,
};
use crate::dispersion::{solve_poling_period, CrystalConfig, Geometry};
use crate::error::{Error, Result};
use crate::fields::{build_mixed_state, state_axis, JitterModel, PhotonState, PumpPulse, QdPhotonSpec};
use crate::grid::{FrequencyAxis, SpectralGrid};
use crate::jsd::{auto_grid, build_jsd, output_marginal_bandwidth, Jsd};
use crate::linalg;
use crate::schmidt::{decompose, SchmidtData};

/// One fully specified operating point of the conversion interface.
#[derive(Debug, Clone)]
pub struct Design {
    pub crystal: CrystalConfig,
    pub pump: PumpPulse,
    pub photon: QdPhotonSpec,
    pub jitter: JitterModel,
    /// Output carrier wavelength, metres.
    pub output_wavelength: f64,
    /// Grid points per (input, output) axis.
    pub grid_points: (usize, usize),
    /// Auto-sizing span factors per axis.
    pub span_factors: (f64, f64),
    /// Explicit half-spans (rad/s) overriding the auto sizing.
    pub explicit_half_spans: (Option<f64>, Option<f64>),
    pub state_points: usize,
    pub state_span_factor: f64,
    pub quadrature_order: usize,
    pub max_modes: usize,
}

impl Design {
    pub fn input_wavelength(&self) -> f64 {
        self.photon.center_wavelength
    }

    /// Pump wavelength required by energy conservation for an input/output
    /// wavelength pair.
    pub fn pump_wavelength_for(lambda_i: f64, lambda_o: f64) -> f64 {
        1.0 / (1.0 / lambda_i - 1.0 / lambda_o)
    }

    pub fn validate(&self) -> Result<()> {
        self.crystal.validate()?;
        self.pump.validate()?;
        self.photon.validate()?;
        self.jitter.validate()?;
        let expected = Self::pump_wavelength_for(self.input_wavelength(), self.output_wavelength);
        if ((self.pump.center_wavelength - expected) / expected).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "pump wavelength {:.6e} m violates energy conservation (expected {:.6e} m)",
                self.pump.center_wavelength, expected
            )));
        }
        Ok(())
    }

    pub fn with_duration(&self, duration: f64) -> Design {
        let mut d = self.clone();
        d.pump.duration_fwhm = duration;
        d
    }

    pub fn with_power(&self, power: f64) -> Design {
        let mut d = self.clone();
        d.pump.peak_power = power;
        d
    }

    pub fn with_length(&self, length: f64) -> Design {
        let mut d = self.clone();
        d.crystal.length = length;
        d
    }

    pub fn with_jitter(&self, jitter: JitterModel) -> Design {
        let mut d = self.clone();
        d.jitter = jitter;
        d
    }

    /// The spectral grid for this operating point: auto-sized unless explicit
    /// half-spans are configured.
    pub fn grid(&self) -> Result<SpectralGrid> {
        let auto = auto_grid(
            &self.crystal,
            &self.pump,
            self.input_wavelength(),
            self.output_wavelength,
            self.grid_points,
            self.span_factors,
        )?;
        let two_pi_c = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT;
        let input = match self.explicit_half_spans.0 {
            Some(half) => FrequencyAxis::from_span(
                two_pi_c / self.input_wavelength(),
                half,
                self.grid_points.0,
            )?,
            None => auto.input,
        };
        let output = match self.explicit_half_spans.1 {
            Some(half) => FrequencyAxis::from_span(
                two_pi_c / self.output_wavelength,
                half,
                self.grid_points.1,
            )?,
            None => auto.output,
        };
        SpectralGrid::new(input, output)
    }

    pub fn jsd(&self) -> Result<Jsd> {
        build_jsd(&self.crystal, &self.pump, self.grid()?)
    }

    /// Schmidt number only, via the values-only decomposition path.
    pub fn schmidt_number(&self) -> Result<f64> {
        let jsd = self.jsd()?;
        let scale = faer::c64::new(jsd.grid.cell_weight().sqrt(), 0.0);
        let n_i = jsd.grid.input.len();
        let n_o = jsd.grid.output.len();
        let mut scaled = faer::Mat::<faer::c64>::zeros(n_i, n_o);
        for o in 0..n_o {
            for i in 0..n_i {
                scaled[(i, o)] = jsd.amplitude[(i, o)] * scale;
            }
        }
        let s = linalg::singular_values(&scaled)?;
        Ok(1.0 / s.iter().map(|x| x.powi(4)).sum::<f64>())
    }

    /// Decomposed distribution plus its recorded normalization.
    pub fn modes(&self) -> Result<(SchmidtData, f64)> {
        let jsd = self.jsd()?;
        let normalization = jsd.normalization;
        Ok((decompose(&jsd, self.max_modes)?, normalization))
    }

    pub fn input_state(&self) -> Result<PhotonState> {
        let axis = state_axis(
            &self.photon,
            &self.jitter,
            self.state_points,
            self.state_span_factor,
        )?;
        build_mixed_state(&self.photon, &self.jitter, axis, self.quadrature_order)
    }

    pub fn budget(
        &self,
        normalization: f64,
        coefficients: &[f64],
        power: f64,
    ) -> Result<CouplingBudget> {
        let two_pi_c = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT;
        let pump = PumpPulse {
            peak_power: power,
            ..self.pump.clone()
        };
        coupling_constant(
            &self.crystal,
            &pump,
            normalization,
            two_pi_c / self.input_wavelength(),
            two_pi_c / self.output_wavelength,
            coefficients,
        )
    }

    /// Run the full pipeline at the configured pump power.
    pub fn evaluate(&self) -> Result<PointReport> {
        self.validate()?;
        let jsd = self.jsd()?;
        let bandwidth = output_marginal_bandwidth(&jsd)?;
        let normalization = jsd.normalization;
        let modes = decompose(&jsd, self.max_modes)?;
        let budget = self.budget(normalization, &modes.coefficients, self.pump.peak_power)?;
        let transfer = build_transfer_operator(&modes, &budget);
        let input = self.input_state()?;
        let report = convert_state(&input, &transfer)?;
        Ok(PointReport {
            k_jsd: modes.schmidt_number,
            normalization,
            theta: budget.theta,
            coefficients: modes.coefficients.clone(),
            eta: report.eta_unnormalized.clone(),
            eta0_normalized: report.eta0_normalized,
            input_purity: input.purity(),
            output_purity: report.output_purity,
            transmission: report.transmission,
            output_bandwidth_hz: bandwidth.fwhm_hz,
            conversion: report,
        })
    }
}

/// Full-pipeline metrics at one operating point.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub k_jsd: f64,
    pub normalization: f64,
    pub theta: f64,
    pub coefficients: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta0_normalized: f64,
    pub input_purity: f64,
    pub output_purity: f64,
    pub transmission: f64,
    pub output_bandwidth_hz: f64,
    pub conversion: ConversionReport,
}

/// Golden-section minimization over a bracket, to a relative tolerance on the
/// argument. The bracket must contain an interior minimum.
pub fn golden_section_min<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) {
        return Err(Error::Config("bracket must be ordered".into()));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    // Probe for an interior point below both ends.
    let probes = 7;
    let mut interior = false;
    for i in 1..=probes {
        let x = a + (b - a) * i as f64 / (probes + 1) as f64;
        if f(x)? < fa.min(fb) {
            interior = true;
            break;
        }
    }
    if !interior {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            context: "no interior minimum found in bracket".into(),
        });
    }

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (hi - lo) > rel_tol * hi.abs().max(lo.abs()) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    if f1 < f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// Bisection root of a bracketed sign change, to a relative tolerance on the
/// bracket width.
pub fn bisect_root<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = a;
    let mut hi = b;
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            context: "no sign change over bracket".into(),
        });
    }
    let width = hi - lo;
    while (hi - lo) > rel_tol * width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pump duration minimizing the Schmidt number, to 1% on the duration.
pub fn optimal_pulse_duration(design: &Design, bracket: (f64, f64)) -> Result<(f64, f64)> {
    golden_section_min(
        |duration| design.with_duration(duration).schmidt_number(),
        bracket.0,
        bracket.1,
        0.01,
    )
}

/// Peak power at which the zeroth-mode coupling reaches pi/2: bisection to
/// 0.1% of the bracket, then one projection along the exact sqrt(P) scaling
/// of the coupling so the returned power reproduces unit efficiency to
/// machine precision.
pub fn power_for_unit_eta0(design: &Design, bracket: (f64, f64)) -> Result<f64> {
    let (modes, normalization) = design.modes()?;
    let d0_sqrt = modes.coefficients[0];
    let target = std::f64::consts::FRAC_PI_2;
    let coarse = bisect_root(
        |power| {
            let budget = design.budget(normalization, &modes.coefficients, power)?;
            Ok(d0_sqrt * budget.theta - target)
        },
        bracket.0.max(1e-9),
        bracket.1,
        1e-3,
    )?;
    let theta = design
        .budget(normalization, &modes.coefficients, coarse)?
        .theta;
    Ok(coarse * (target / (d0_sqrt * theta)).powi(2))
}

/// Sweep variables understood by the drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    PeakPower,
    PulseDuration,
    SigmaFrequency,
    SigmaTime,
    Length,
    QpmOrder,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::PeakPower => "peak_power",
            SweepVariable::PulseDuration => "pulse_duration",
            SweepVariable::SigmaFrequency => "sigma_frequency",
            SweepVariable::SigmaTime => "sigma_time",
            SweepVariable::Length => "length",
            SweepVariable::QpmOrder => "qpm_order",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

/// Range specification for one sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) {
            return Err(Error::Config("sweep range must satisfy min < max".into()));
        }
        if self.points < 2 {
            return Err(Error::Config("sweep needs at least two points".into()));
        }
        if self.scale == SweepScale::Log && self.min <= 0.0 {
            return Err(Error::Config("log sweeps need a positive minimum".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    SweepScale::Linear => self.min + t * (self.max - self.min),
                    SweepScale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// One row of a sweep result. Rows that could not be evaluated (for example a
/// state grid truncated at extreme noise) carry NaN metrics and a flag.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub k_jsd: f64,
    pub eta0_normalized: f64,
    pub eta_unnormalized: [f64; 5],
    pub input_purity: f64,
    pub output_purity: f64,
    pub transmission: f64,
    pub output_bandwidth_hz: f64,
    pub flag: Option<String>,
}

impl SweepRow {
    fn flagged(value: f64, reason: String) -> Self {
        SweepRow {
            value,
            k_jsd: f64::NAN,
            eta0_normalized: f64::NAN,
            eta_unnormalized: [f64::NAN; 5],
            input_purity: f64::NAN,
            output_purity: f64::NAN,
            transmission: f64::NAN,
            output_bandwidth_hz: f64::NAN,
            flag: Some(reason),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

fn first_five(eta: &[f64]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (slot, value) in out.iter_mut().zip(eta.iter()) {
        *slot = *value;
    }
    out
}

/// Modes, input state and scalar summaries shared by the power-like sweeps.
struct FixedModes {
    modes: SchmidtData,
    normalization: f64,
    k_jsd: f64,
    bandwidth_hz: f64,
    input: PhotonState,
    input_purity: f64,
}

fn fixed_modes(design: &Design) -> Result<FixedModes> {
    design.validate()?;
    let jsd = design.jsd()?;
    let bandwidth = output_marginal_bandwidth(&jsd)?;
    let normalization = jsd.normalization;
    let modes = decompose(&jsd, design.max_modes)?;
    let input = design.input_state()?;
    let input_purity = input.purity();
    Ok(FixedModes {
        k_jsd: modes.schmidt_number,
        bandwidth_hz: bandwidth.fwhm_hz,
        modes,
        normalization,
        input,
        input_purity,
    })
}

/// Efficiency / purity trade-off against pump peak power. The JSD and the
/// input state do not depend on power, so they are built once and the sweep
/// points run in parallel.
pub fn efficiency_purity_tradeoff(design: &Design, spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    if spec.variable != SweepVariable::PeakPower {
        return Err(Error::Config(
            "trade-off sweep expects a peak-power range".into(),
        ));
    }
    let fixed = fixed_modes(design)?;
    let rows: Vec<SweepRow> = spec
        .values()
        .par_iter()
        .map(|&power| -> Result<SweepRow> {
            let budget = design.budget(fixed.normalization, &fixed.modes.coefficients, power)?;
            let transfer = build_transfer_operator(&fixed.modes, &budget);
            match convert_state(&fixed.input, &transfer) {
                Ok(report) => Ok(SweepRow {
                    value: power,
                    k_jsd: fixed.k_jsd,
                    eta0_normalized: report.eta0_normalized,
                    eta_unnormalized: first_five(&report.eta_unnormalized),
                    input_purity: fixed.input_purity,
                    output_purity: report.output_purity,
                    transmission: report.transmission,
                    output_bandwidth_hz: fixed.bandwidth_hz,
                    flag: None,
                }),
                Err(Error::NoConversion { .. }) => {
                    let mut row = SweepRow::flagged(power, "no conversion at this power".into());
                    row.k_jsd = fixed.k_jsd;
                    row.input_purity = fixed.input_purity;
                    row.eta_unnormalized = [0.0; 5];
                    row.transmission = 0.0;
                    Ok(row)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        variable: SweepVariable::PeakPower,
        rows,
    })
}

/// Purity against injected noise, one result per pump duration. Every
/// (noise, duration) point converts at that duration's unit-efficiency power.
pub fn purity_noise_sweep(
    design: &Design,
    spec: &SweepSpec,
    durations: &[f64],
    power_bracket: (f64, f64),
) -> Result<Vec<SweepResult>> {
    spec.validate()?;
    if !matches!(
        spec.variable,
        SweepVariable::SigmaFrequency | SweepVariable::SigmaTime
    ) {
        return Err(Error::Config(
            "noise sweep expects a sigma_frequency or sigma_time range".into(),
        ));
    }
    durations
        .iter()
        .map(|&duration| {
            let tuned = design.with_duration(duration);
            let power = power_for_unit_eta0(&tuned, power_bracket)?;
            let tuned = tuned.with_power(power);
            let fixed = fixed_modes(&tuned)?;
            let budget = tuned.budget(fixed.normalization, &fixed.modes.coefficients, power)?;
            let transfer = build_transfer_operator(&fixed.modes, &budget);
            let rows: Vec<SweepRow> = spec
                .values()
                .par_iter()
                .map(|&noise| -> Result<SweepRow> {
                    let jitter = match spec.variable {
                        SweepVariable::SigmaFrequency => JitterModel {
                            sigma_frequency: noise,
                            ..tuned.jitter
                        },
                        _ => JitterModel {
                            sigma_time: noise,
                            ..tuned.jitter
                        },
                    };
                    let noisy = tuned.with_jitter(jitter);
                    let input = match noisy.input_state() {
                        Ok(state) => state,
                        Err(Error::Truncation { what, .. }) => {
                            return Ok(SweepRow::flagged(
                                noise,
                                format!("state grid truncated: {what}"),
                            ));
                        }
                        Err(e) => return Err(e),
                    };
                    let report = convert_state(&input, &transfer)?;
                    Ok(SweepRow {
                        value: noise,
                        k_jsd: fixed.k_jsd,
                        eta0_normalized: report.eta0_normalized,
                        eta_unnormalized: first_five(&report.eta_unnormalized),
                        input_purity: input.purity(),
                        output_purity: report.output_purity,
                        transmission: report.transmission,
                        output_bandwidth_hz: fixed.bandwidth_hz,
                        flag: None,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(SweepResult {
                variable: spec.variable,
                rows,
            })
        })
        .collect()
}

/// Schmidt-number-versus-duration curve for one waveguide length.
#[derive(Debug, Clone)]
pub struct DurationCurve {
    pub length: f64,
    /// (pump duration, Schmidt number) rows.
    pub rows: Vec<(f64, f64)>,
    pub optimal_duration: f64,
    pub k_min: f64,
}

/// K(duration) curves for a family of waveguide lengths, all evaluated inside
/// the reference design's output window so the curves are comparable (the
/// captured side-lobe weight, and with it the attainable K floor, depends on
/// the absolute analysis window).
pub fn schmidt_duration_curves(
    design: &Design,
    spec: &SweepSpec,
    lengths: &[f64],
    bracket: (f64, f64),
) -> Result<Vec<DurationCurve>> {
    spec.validate()?;
    if spec.variable != SweepVariable::PulseDuration {
        return Err(Error::Config(
            "duration curves expect a pulse-duration range".into(),
        ));
    }
    let reference = design.grid()?;
    let shared_half_span = reference.output.end() - reference.output.center();
    lengths
        .iter()
        .map(|&length| {
            let mut tuned = design.with_length(length);
            tuned.explicit_half_spans.1 = Some(shared_half_span);
            let rows: Vec<(f64, f64)> = spec
                .values()
                .par_iter()
                .map(|&duration| -> Result<(f64, f64)> {
                    Ok((duration, tuned.with_duration(duration).schmidt_number()?))
                })
                .collect::<Result<_>>()?;
            let (optimal_duration, k_min) = optimal_pulse_duration(&tuned, bracket)?;
            Ok(DurationCurve {
                length,
                rows,
                optimal_duration,
                k_min,
            })
        })
        .collect()
}

/// Outcome of matching the co-propagating arrangement to the
/// counter-propagating Schmidt number.
#[derive(Debug, Clone)]
pub struct GeometryComparison {
    pub duration_counter: f64,
    pub k_counter: f64,
    pub bandwidth_counter_hz: f64,
    pub duration_co: f64,
    pub k_co: f64,
    pub bandwidth_co_hz: f64,
    /// False when the co-propagating bracket cannot reach the target K; the
    /// reported values are then the best found.
    pub matched: bool,
}

/// Compare output bandwidths of the two geometries at matched mode purity.
///
/// The counter-propagating design is optimized over `counter_bracket`; the
/// co-propagating arrangement re-solves its own poling period and tunes its
/// duration until the Schmidt numbers agree.
pub fn geometry_comparison(
    design: &Design,
    counter_bracket: (f64, f64),
    co_bracket: (f64, f64),
) -> Result<GeometryComparison> {
    if design.crystal.geometry != Geometry::CounterPropagating {
        return Err(Error::Config(
            "geometry comparison starts from a counter-propagating design".into(),
        ));
    }
    let (duration_counter, k_counter) = optimal_pulse_duration(design, counter_bracket)?;
    let counter = design.with_duration(duration_counter);
    let bandwidth_counter_hz = output_marginal_bandwidth(&counter.jsd()?)?.fwhm_hz;

    let mut co = design.clone();
    co.crystal.geometry = Geometry::CoPropagating;
    co.crystal.poling_period = solve_poling_period(
        &co.crystal.material,
        Geometry::CoPropagating,
        co.crystal.qpm_order,
        co.input_wavelength(),
        co.output_wavelength,
    )?;
    // The co-propagating support is pump-limited on both axes; any widened
    // analysis window configured for the counter-propagating sinc tails would
    // only stretch the grid past the dispersion model's validity.
    co.span_factors = (5.0, 5.0);
    co.explicit_half_spans = (None, None);

    // K grows with duration once the pump is narrower than the
    // phase-matching acceptance; look for the crossing of the target.
    let k_at = |duration: f64| co.with_duration(duration).schmidt_number();
    let k_lo = k_at(co_bracket.0)?;
    let k_hi = k_at(co_bracket.1)?;
    let (duration_co, k_co, matched) = if (k_lo - k_counter) * (k_hi - k_counter) < 0.0 {
        let duration = bisect_root(
            |d| Ok(k_at(d)? - k_counter),
            co_bracket.0,
            co_bracket.1,
            1e-3,
        )?;
        (duration, k_at(duration)?, true)
    } else if (k_lo - k_counter).abs() < (k_hi - k_counter).abs() {
        (co_bracket.0, k_lo, false)
    } else {
        (co_bracket.1, k_hi, false)
    };
    let bandwidth_co_hz = output_marginal_bandwidth(&co.with_duration(duration_co).jsd()?)?.fwhm_hz;

    Ok(GeometryComparison {
        duration_counter,
        k_counter,
        bandwidth_counter_hz,
        duration_co,
        k_co,
        bandwidth_co_hz,
        matched,
    })
}

/// One row of the grating-order trade-off.
#[derive(Debug, Clone)]
pub struct QpmOrderRow {
    pub order: u32,
    pub poling_period: f64,
    pub eta0_at_reference: f64,
    pub output_purity: f64,
    pub transmission: f64,
}

/// Trade conversion efficiency against poling-period feasibility at fixed
/// pump power: the order-m grating drives the same Schmidt modes through its
/// m-th harmonic, scaling every conversion amplitude by 1/m (so efficiencies
/// fall as 1/m^2 from the first-order operating point while the normalized
/// output state, and hence its purity, is unchanged).
pub fn qpm_order_tradeoff(design: &Design, orders: &[u32]) -> Result<Vec<QpmOrderRow>> {
    if orders.iter().any(|&m| m < 1) {
        return Err(Error::Config("grating orders must be >= 1".into()));
    }
    let fixed = fixed_modes(design)?;
    let budget = design.budget(
        fixed.normalization,
        &fixed.modes.coefficients,
        design.pump.peak_power,
    )?;
    let transfer = build_transfer_operator(&fixed.modes, &budget);
    orders
        .iter()
        .map(|&m| {
            let poling_period = solve_poling_period(
                &design.crystal.material,
                design.crystal.geometry,
                m,
                design.input_wavelength(),
                design.output_wavelength,
            )?;
            let scaled = transfer.scaled(1.0 / m as f64);
            let report = convert_state(&fixed.input, &scaled)?;
            Ok(QpmOrderRow {
                order: m,
                poling_period,
                eta0_at_reference: scaled.efficiencies()[0],
                output_purity: report.output_purity,
                transmission: report.transmission,
            })
        })
        .collect()
}
