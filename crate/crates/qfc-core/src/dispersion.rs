//! Refractive index, wavevector, group velocity and poling-period solvers for
//! the periodically poled waveguide, using bulk-crystal Sellmeier dispersion.

use serde::Deserialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Coefficients of the temperature-dependent Sellmeier expansion
///
/// ```text
/// n^2 = a1 + b1 f + (a2 + b2 f)/(l^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(l^2 - a5^2) - a6 l^2
/// ```
///
/// with `l` the wavelength in micrometres and `f = (T - 24.5)(T + 570.82)`,
/// `T` in degrees Celsius.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierTable {
    pub a: [f64; 6],
    pub b: [f64; 4],
    /// Inclusive validity range of the expansion, micrometres.
    pub valid_wavelength_um: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    extraordinary: SellmeierTable,
    ordinary: SellmeierTable,
}

/// Polarization axis selecting one Sellmeier table of the material file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationAxis {
    Extraordinary,
    Ordinary,
}

/// Dispersion model of the nonlinear crystal at a fixed temperature.
#[derive(Debug, Clone)]
pub struct MaterialModel {
    table: SellmeierTable,
    /// Operating temperature, kelvin.
    pub temperature_k: f64,
}

/// Coefficient table bundled with the crate (5%-MgO-doped congruent lithium
/// niobate), so the engine runs without external files.
pub const BUILTIN_MATERIAL_TOML: &str = include_str!("../data/mgo_cln.toml");

impl MaterialModel {
    /// Parse a coefficient file (see `data/mgo_cln.toml` for the schema) and
    /// select one polarization axis.
    pub fn from_toml_str(text: &str, axis: PolarizationAxis, temperature_k: f64) -> Result<Self> {
        let file: MaterialFile = toml::from_str(text)
            .map_err(|e| Error::Config(format!("material file: {e}")))?;
        let table = match axis {
            PolarizationAxis::Extraordinary => file.extraordinary,
            PolarizationAxis::Ordinary => file.ordinary,
        };
        if !(table.valid_wavelength_um[0] > 0.0
            && table.valid_wavelength_um[1] > table.valid_wavelength_um[0])
        {
            return Err(Error::Config("material validity range must be ordered and positive".into()));
        }
        if !(temperature_k > 0.0) {
            return Err(Error::Config("temperature must be positive".into()));
        }
        Ok(Self { table, temperature_k })
    }

    /// Built-in extraordinary-axis model at the given temperature.
    pub fn builtin(temperature_k: f64) -> Self {
        Self::from_toml_str(BUILTIN_MATERIAL_TOML, PolarizationAxis::Extraordinary, temperature_k)
            .expect("bundled coefficient table is valid")
    }

    /// Validity range in metres (inclusive).
    pub fn valid_range_m(&self) -> (f64, f64) {
        (
            self.table.valid_wavelength_um[0] * 1e-6,
            self.table.valid_wavelength_um[1] * 1e-6,
        )
    }

    fn check_wavelength(&self, wavelength_m: f64) -> Result<()> {
        let (min, max) = self.valid_range_m();
        if !(wavelength_m.is_finite() && wavelength_m >= min && wavelength_m <= max) {
            return Err(Error::WavelengthOutOfRange {
                wavelength_m,
                min_m: min,
                max_m: max,
            });
        }
        Ok(())
    }

    fn temperature_term(&self) -> f64 {
        let t_c = self.temperature_k - 273.15;
        (t_c - 24.5) * (t_c + 570.82)
    }

    /// Refractive index at `wavelength_m` (metres) for the configured axis and
    /// temperature.
    pub fn refractive_index(&self, wavelength_m: f64) -> Result<f64> {
        self.check_wavelength(wavelength_m)?;
        let f = self.temperature_term();
        let l2 = (wavelength_m * 1e6).powi(2);
        let [a1, a2, a3, a4, a5, a6] = self.table.a;
        let [b1, b2, b3, b4] = self.table.b;
        let n2 = a1 + b1 * f + (a2 + b2 * f) / (l2 - (a3 + b3 * f).powi(2))
            + (a4 + b4 * f) / (l2 - a5 * a5)
            - a6 * l2;
        if !(n2 > 1.0) {
            return Err(Error::Infeasible(format!(
                "Sellmeier expansion gives n^2 = {n2:.4} at {wavelength_m:.4e} m"
            )));
        }
        Ok(n2.sqrt())
    }

    /// Wavevector magnitude k(omega) = n(omega) omega / c, rad/m.
    pub fn wavevector(&self, angular_frequency: f64) -> Result<f64> {
        if !(angular_frequency > 0.0) {
            let (min, max) = self.valid_range_m();
            return Err(Error::WavelengthOutOfRange {
                wavelength_m: f64::INFINITY,
                min_m: min,
                max_m: max,
            });
        }
        let wavelength = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / angular_frequency;
        let n = self.refractive_index(wavelength)?;
        Ok(n * angular_frequency / SPEED_OF_LIGHT)
    }

    /// Group velocity (dk/domega)^-1 by central finite difference with the
    /// default step of 2 pi x 1 GHz.
    pub fn group_velocity(&self, angular_frequency: f64) -> Result<f64> {
        self.group_velocity_with_step(angular_frequency, DEFAULT_GROUP_VELOCITY_STEP)
    }

    /// Group velocity with an explicit finite-difference step (rad/s). The
    /// stencil points `omega +- step` must stay inside the valid range.
    pub fn group_velocity_with_step(&self, angular_frequency: f64, step: f64) -> Result<f64> {
        if !(step > 0.0) {
            return Err(Error::Config("finite-difference step must be positive".into()));
        }
        let k_plus = self.wavevector(angular_frequency + step)?;
        let k_minus = self.wavevector(angular_frequency - step)?;
        Ok(2.0 * step / (k_plus - k_minus))
    }
}

/// Default central-difference step for group velocities: 2 pi x 1 GHz.
pub const DEFAULT_GROUP_VELOCITY_STEP: f64 = 2.0 * std::f64::consts::PI * 1.0e9;

/// Propagation arrangement of the three fields in the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Input, pump and output all travel in the same direction.
    CoPropagating,
    /// The output field travels against the pump and the input.
    CounterPropagating,
}

/// Poled-waveguide configuration.
#[derive(Debug, Clone)]
pub struct CrystalConfig {
    pub material: MaterialModel,
    /// Interaction length, metres.
    pub length: f64,
    /// Poling period, metres.
    pub poling_period: f64,
    /// Quasi-phase-matching order (>= 1).
    pub qpm_order: u32,
    pub geometry: Geometry,
    /// Effective nonlinear coefficient, m/V (includes the grating harmonic
    /// factor, see [`qpm_effective_nonlinearity`]).
    pub d_eff: f64,
    /// Effective interaction cross-section, m^2.
    pub effective_area: f64,
    /// Dimensionless scale applied to the coupling constant; absorbs the
    /// overall prefactor of the coupling model after the one-time power
    /// calibration recorded in the scenario files.
    pub theta_scale: f64,
}

/// Effective nonlinearity of an order-`m` square-wave grating built on the
/// tensor coefficient `d33`: the m-th Fourier harmonic carries `2/(m pi)`.
pub fn qpm_effective_nonlinearity(d33: f64, qpm_order: u32) -> f64 {
    2.0 * d33 / (qpm_order as f64 * std::f64::consts::PI)
}

impl CrystalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::Config("crystal length must be positive".into()));
        }
        if !(self.poling_period > 0.0) {
            return Err(Error::Config("poling period must be positive".into()));
        }
        if self.qpm_order < 1 {
            return Err(Error::Config("QPM order must be >= 1".into()));
        }
        if !(self.effective_area > 0.0) {
            return Err(Error::Config("effective area must be positive".into()));
        }
        Ok(())
    }

    /// Grating vector contribution 2 m pi / Lambda, rad/m.
    pub fn grating_vector(&self) -> f64 {
        2.0 * self.qpm_order as f64 * std::f64::consts::PI / self.poling_period
    }

    /// Residual phase mismatch for a DFG pair (omega_i -> omega_o, pump at
    /// omega_i - omega_o), rad/m. The sign of the output wavevector follows
    /// the propagation geometry.
    pub fn phase_mismatch(&self, omega_i: f64, omega_o: f64) -> Result<f64> {
        let omega_p = omega_i - omega_o;
        if !(omega_p > 0.0) {
            return Err(Error::FrequencyOrdering { omega_i, omega_o });
        }
        let k_i = self.material.wavevector(omega_i)?;
        let k_p = self.material.wavevector(omega_p)?;
        let k_o = self.material.wavevector(omega_o)?;
        let signed_k_o = match self.geometry {
            Geometry::CoPropagating => -k_o,
            Geometry::CounterPropagating => k_o,
        };
        Ok(k_i - k_p + signed_k_o - self.grating_vector())
    }
}

/// Solve for the poling period that phase-matches the given band centers at
/// order `qpm_order` in the given geometry. Bracketed bisection on the period.
pub fn solve_poling_period(
    material: &MaterialModel,
    geometry: Geometry,
    qpm_order: u32,
    lambda_i: f64,
    lambda_o: f64,
) -> Result<f64> {
    if !(lambda_i < lambda_o) {
        return Err(Error::Config(
            "input wavelength must be shorter than output wavelength".into(),
        ));
    }
    let two_pi_c = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT;
    let omega_i = two_pi_c / lambda_i;
    let omega_o = two_pi_c / lambda_o;
    let omega_p = omega_i - omega_o;
    let k_i = material.wavevector(omega_i)?;
    let k_p = material.wavevector(omega_p)?;
    let k_o = material.wavevector(omega_o)?;
    let signed_k_o = match geometry {
        Geometry::CoPropagating => -k_o,
        Geometry::CounterPropagating => k_o,
    };
    let residual = k_i - k_p + signed_k_o;
    let grating = 2.0 * qpm_order as f64 * std::f64::consts::PI;

    // Delta k(period) = residual - grating/period is monotone in the period;
    // bisect over a generous bracket covering sub-micron through millimetre
    // poling features.
    let mismatch = |period: f64| residual - grating / period;
    let (mut lo, mut hi) = (1.0e-8, 1.0e-2);
    if !(mismatch(lo) < 0.0 && mismatch(hi) > 0.0) {
        return Err(Error::Bracket {
            lo,
            hi,
            context: format!(
                "poling period for {:?} order {} (wavevector residual {:.4e} rad/m)",
                geometry, qpm_order, residual
            ),
        });
    }
    // 1e-6 relative tolerance on the period.
    while (hi - lo) / hi > 1.0e-12 {
        let mid = 0.5 * (lo + hi);
        if mismatch(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PI_C: f64 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT;
    const T25: f64 = 298.15;

    fn material() -> MaterialModel {
        MaterialModel::builtin(T25)
    }

    /// Straight-line re-evaluation of the bundled expansion, kept independent
    /// of the library implementation.
    fn n_by_hand(lambda_um: f64, t_c: f64) -> f64 {
        let f = (t_c - 24.5) * (t_c + 570.82);
        let l2 = lambda_um * lambda_um;
        let n2 = 5.756 + 2.860e-6 * f + (0.0983 + 4.700e-8 * f) / (l2 - (0.2020 + 6.113e-8 * f).powi(2))
            + (189.32 + 1.516e-4 * f) / (l2 - 12.52 * 12.52)
            - 1.32e-2 * l2;
        n2.sqrt()
    }

    /// Analytic wavelength derivative of n^2 for the bundled expansion.
    fn dn2_dlambda_by_hand(lambda_um: f64, t_c: f64) -> f64 {
        let f = (t_c - 24.5) * (t_c + 570.82);
        let l2 = lambda_um * lambda_um;
        let c3 = 0.2020 + 6.113e-8 * f;
        -2.0 * lambda_um * (0.0983 + 4.700e-8 * f) / (l2 - c3 * c3).powi(2)
            - 2.0 * lambda_um * (189.32 + 1.516e-4 * f) / (l2 - 12.52 * 12.52).powi(2)
            - 2.0 * 1.32e-2 * lambda_um
    }

    /// Analytic group index n - lambda dn/dlambda.
    fn group_index_by_hand(lambda_um: f64, t_c: f64) -> f64 {
        let n = n_by_hand(lambda_um, t_c);
        let dn = dn2_dlambda_by_hand(lambda_um, t_c) / (2.0 * n);
        n - lambda_um * dn
    }

    #[test]
    fn index_matches_hand_evaluation_at_1550() {
        let n = material().refractive_index(1.55e-6).unwrap();
        let by_hand = n_by_hand(1.55, 25.0);
        assert!((n - by_hand).abs() < 1e-12, "{n} vs {by_hand}");
        // Plausibility window for the extraordinary index of MgO:LN.
        assert!(n > 2.0 && n < 2.3, "n = {n}");
    }

    #[test]
    fn range_edges_inclusive_and_out_of_range_rejected() {
        let m = material();
        let (min, max) = m.valid_range_m();
        assert!(m.refractive_index(min).unwrap().is_finite());
        assert!(m.refractive_index(max).unwrap().is_finite());
        assert!(matches!(
            m.refractive_index(0.1e-6),
            Err(Error::WavelengthOutOfRange { .. })
        ));
    }

    #[test]
    fn wavevector_rejects_zero_frequency() {
        assert!(matches!(
            material().wavevector(0.0),
            Err(Error::WavelengthOutOfRange { .. })
        ));
    }

    #[test]
    fn wavevector_monotone_over_band() {
        // Scan ascending in frequency (descending in wavelength).
        let m = material();
        let mut last = 0.0;
        for step in 0..=200 {
            let lambda = 2500.0e-9 - (2500.0 - 900.0) * 1e-9 * step as f64 / 200.0;
            let k = m.wavevector(TWO_PI_C / lambda).unwrap();
            assert!(k > last, "k not increasing at {lambda:.3e} m");
            last = k;
        }
        let k_942 = m.wavevector(TWO_PI_C / 942e-9).unwrap();
        let k_1550 = m.wavevector(TWO_PI_C / 1550e-9).unwrap();
        assert!(k_942 > k_1550);
    }

    #[test]
    fn group_velocity_below_c_and_step_converged() {
        let m = material();
        for lambda in [0.942e-6, 1.55e-6, 2.4e-6] {
            let omega = TWO_PI_C / lambda;
            let vg = m.group_velocity(omega).unwrap();
            assert!(vg < SPEED_OF_LIGHT && vg > 0.0);
            let vg_half = m
                .group_velocity_with_step(omega, 0.5 * DEFAULT_GROUP_VELOCITY_STEP)
                .unwrap();
            assert!(((vg - vg_half) / vg).abs() < 1e-6);
        }
    }

    #[test]
    fn pump_and_output_group_velocities_nearly_match() {
        let m = material();
        let vg_out = m.group_velocity(TWO_PI_C / 1550e-9).unwrap();
        let vg_pump = m.group_velocity(TWO_PI_C / 2400e-9).unwrap();
        assert!(((vg_out - vg_pump) / vg_out).abs() < 1e-2);
    }

    #[test]
    fn group_velocity_matches_analytic_derivative() {
        let m = material();
        for step in 0..50 {
            let lambda_um = 0.9 + (2.5 - 0.9) * step as f64 / 49.0;
            let omega = TWO_PI_C / (lambda_um * 1e-6);
            let vg = m.group_velocity(omega).unwrap();
            let analytic = SPEED_OF_LIGHT / group_index_by_hand(lambda_um, 25.0);
            assert!(
                ((vg - analytic) / analytic).abs() < 1e-5,
                "lambda {lambda_um} um: {vg} vs {analytic}"
            );
        }
    }

    fn config(geometry: Geometry, qpm_order: u32) -> CrystalConfig {
        let material = material();
        let poling_period =
            solve_poling_period(&material, geometry, qpm_order, 942e-9, 1550e-9).unwrap();
        CrystalConfig {
            material,
            length: 15e-3,
            poling_period,
            qpm_order,
            geometry,
            d_eff: qpm_effective_nonlinearity(25e-12, qpm_order),
            effective_area: 13e-6 * 13.4e-6,
            theta_scale: 1.0,
        }
    }

    #[test]
    fn solved_period_zeroes_mismatch_at_band_centers() {
        for geometry in [Geometry::CounterPropagating, Geometry::CoPropagating] {
            let cfg = config(geometry, 1);
            let mismatch = cfg
                .phase_mismatch(TWO_PI_C / 942e-9, TWO_PI_C / 1550e-9)
                .unwrap();
            assert!(
                mismatch.abs() < 1e-6 * cfg.grating_vector(),
                "{geometry:?}: {mismatch:.3e}"
            );
        }
    }

    #[test]
    fn counter_propagating_period_near_360nm_and_order_scaling() {
        let m = material();
        let p1 =
            solve_poling_period(&m, Geometry::CounterPropagating, 1, 942e-9, 1550e-9).unwrap();
        assert!(
            (p1 - 360e-9).abs() < 0.15 * 360e-9,
            "first-order period {p1:.4e} m"
        );
        let p3 =
            solve_poling_period(&m, Geometry::CounterPropagating, 3, 942e-9, 1550e-9).unwrap();
        assert!(((p3 - 3.0 * p1) / (3.0 * p1)).abs() < 1e-9);
        assert!((p3 - 1e-6).abs() < 0.2e-6, "third-order period {p3:.4e} m");
    }

    #[test]
    fn co_propagating_period_is_distinct() {
        let m = material();
        let counter =
            solve_poling_period(&m, Geometry::CounterPropagating, 1, 942e-9, 1550e-9).unwrap();
        let co = solve_poling_period(&m, Geometry::CoPropagating, 1, 942e-9, 1550e-9).unwrap();
        assert!(co > 10.0 * counter, "co {co:.3e} vs counter {counter:.3e}");
    }

    #[test]
    fn output_detuning_runs_off_the_counter_propagating_acceptance() {
        let cfg = config(Geometry::CounterPropagating, 1);
        let omega_i = TWO_PI_C / 942e-9;
        let omega_o = TWO_PI_C / 1550e-9 + 2.0 * std::f64::consts::PI * 10e9;
        let mismatch = cfg.phase_mismatch(omega_i, omega_o).unwrap();
        assert!((mismatch * cfg.length / 2.0).abs() > std::f64::consts::PI);
    }

    #[test]
    fn geometry_swap_shifts_mismatch_by_twice_the_output_wavevector() {
        let counter = config(Geometry::CounterPropagating, 1);
        let mut co = counter.clone();
        co.geometry = Geometry::CoPropagating;
        for detune in [-30e9, 0.0, 17e9] {
            let omega_i = TWO_PI_C / 942e-9 + 2.0 * std::f64::consts::PI * detune;
            let omega_o = TWO_PI_C / 1550e-9;
            let k_o = counter.material.wavevector(omega_o).unwrap();
            let d_counter = counter.phase_mismatch(omega_i, omega_o).unwrap();
            let d_co = co.phase_mismatch(omega_i, omega_o).unwrap();
            assert!(((d_co - d_counter) + 2.0 * k_o).abs() < 1e-9 * k_o);
        }
    }

    #[test]
    fn dfg_requires_positive_pump_frequency() {
        let cfg = config(Geometry::CounterPropagating, 1);
        let omega = TWO_PI_C / 1550e-9;
        assert!(matches!(
            cfg.phase_mismatch(omega, omega + 1.0),
            Err(Error::FrequencyOrdering { .. })
        ));
    }
}
