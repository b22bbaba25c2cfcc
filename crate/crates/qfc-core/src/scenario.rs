//! Scenario files: strict, unit-suffixed TOML describing one conversion
//! design plus the sweep ranges used by the figure commands. Unknown keys are
//! rejected so unit mistakes cannot pass silently.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dispersion::{
    qpm_effective_nonlinearity, solve_poling_period, CrystalConfig, Geometry, MaterialModel,
    PolarizationAxis,
};
use crate::error::{Error, Result};
use crate::fields::{JitterModel, PumpPulse, QdPhotonSpec};
use crate::optimize::{Design, SweepScale, SweepSpec, SweepVariable};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    /// "builtin" or a path to a coefficient file (relative to the scenario).
    #[serde(default = "default_material_source")]
    pub source: String,
    #[serde(default = "default_axis")]
    pub axis: PolarizationAxis,
    #[serde(default = "default_temperature_c")]
    pub temperature_c: f64,
}

fn default_material_source() -> String {
    "builtin".into()
}
fn default_axis() -> PolarizationAxis {
    PolarizationAxis::Extraordinary
}
fn default_temperature_c() -> f64 {
    25.0
}

impl Default for MaterialSection {
    fn default() -> Self {
        MaterialSection {
            source: default_material_source(),
            axis: default_axis(),
            temperature_c: default_temperature_c(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub length_mm: f64,
    #[serde(default = "default_qpm_order")]
    pub qpm_order: u32,
    pub geometry: Geometry,
    /// Poling period; solved at the band centers when omitted.
    #[serde(default)]
    pub poling_period_nm: Option<f64>,
    #[serde(default = "default_d33")]
    pub d33_pm_per_v: f64,
    pub effective_area_um2: f64,
    /// Dimensionless coupling-model scale from the one-time power
    /// calibration.
    #[serde(default = "default_theta_scale")]
    pub theta_scale: f64,
}

fn default_qpm_order() -> u32 {
    1
}
fn default_d33() -> f64 {
    25.0
}
fn default_theta_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub duration_ps: f64,
    pub peak_power_w: f64,
    pub repetition_rate_mhz: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonSection {
    pub input_wavelength_nm: f64,
    pub output_wavelength_nm: f64,
    /// Transform-limited intensity FWHM of the line, GHz.
    pub linewidth_ghz: f64,
    #[serde(default)]
    pub emission_time_offset_ps: f64,
    #[serde(default)]
    pub frequency_offset_ghz: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct JitterSection {
    /// Standard deviation of the center-frequency jitter, GHz.
    #[serde(default)]
    pub sigma_frequency_ghz: f64,
    /// Standard deviation of the emission-time jitter, ps.
    #[serde(default)]
    pub sigma_time_ps: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_points")]
    pub input_points: usize,
    #[serde(default = "default_points")]
    pub output_points: usize,
    #[serde(default = "default_span_factor")]
    pub input_span_factor: f64,
    #[serde(default = "default_span_factor")]
    pub output_span_factor: f64,
    /// Explicit half-spans (GHz) overriding the auto sizing.
    #[serde(default)]
    pub input_half_span_ghz: Option<f64>,
    #[serde(default)]
    pub output_half_span_ghz: Option<f64>,
    #[serde(default = "default_state_points")]
    pub state_points: usize,
    #[serde(default = "default_state_span_factor")]
    pub state_span_factor: f64,
    #[serde(default = "default_quadrature_order")]
    pub quadrature_order: usize,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

fn default_points() -> usize {
    512
}
fn default_span_factor() -> f64 {
    5.0
}
fn default_state_points() -> usize {
    1024
}
fn default_state_span_factor() -> f64 {
    6.0
}
fn default_quadrature_order() -> usize {
    21
}
fn default_max_modes() -> usize {
    64
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            input_points: default_points(),
            output_points: default_points(),
            input_span_factor: default_span_factor(),
            output_span_factor: default_span_factor(),
            input_half_span_ghz: None,
            output_half_span_ghz: None,
            state_points: default_state_points(),
            state_span_factor: default_state_span_factor(),
            quadrature_order: default_quadrature_order(),
            max_modes: default_max_modes(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: SweepScale,
}

fn default_scale() -> SweepScale {
    SweepScale::Linear
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepsSection {
    /// Peak-power range (W) for the trade-off figure.
    #[serde(default = "default_power_range")]
    pub power_w: RangeSection,
    /// Pulse-duration range (ps) for the K(duration) curves.
    #[serde(default = "default_duration_range")]
    pub duration_ps: RangeSection,
    /// Waveguide lengths (mm) for the per-length families.
    #[serde(default = "default_lengths")]
    pub lengths_mm: Vec<f64>,
    /// Frequency-noise range (GHz std) for the purity figure.
    #[serde(default = "default_noise_freq_range")]
    pub noise_frequency_ghz: RangeSection,
    /// Time-noise range (ps std) for the purity figure.
    #[serde(default = "default_noise_time_range")]
    pub noise_time_ps: RangeSection,
    /// Pump durations (ps) compared in the noise figures.
    #[serde(default = "default_noise_durations")]
    pub noise_durations_ps: Vec<f64>,
    /// Frequency-noise levels (GHz std) for the mode-population figure.
    #[serde(default = "default_modes_noise")]
    pub modes_noise_ghz: Vec<f64>,
    /// Grating orders compared in the order trade-off.
    #[serde(default = "default_orders")]
    pub qpm_orders: Vec<u32>,
    /// Duration bracket (ps) for the optimal-duration search.
    #[serde(default = "default_duration_bracket")]
    pub duration_bracket_ps: [f64; 2],
    /// Duration bracket (ps) for the co-propagating match.
    #[serde(default = "default_co_duration_bracket")]
    pub co_duration_bracket_ps: [f64; 2],
    /// Power bracket (W) for the unit-efficiency search.
    #[serde(default = "default_power_bracket")]
    pub power_bracket_w: [f64; 2],
}

fn default_power_range() -> RangeSection {
    RangeSection {
        min: 0.5,
        max: 120.0,
        points: 40,
        scale: SweepScale::Linear,
    }
}
fn default_duration_range() -> RangeSection {
    RangeSection {
        min: 4.0,
        max: 40.0,
        points: 19,
        scale: SweepScale::Linear,
    }
}
fn default_lengths() -> Vec<f64> {
    vec![10.0, 15.0, 20.0, 25.0]
}
fn default_noise_freq_range() -> RangeSection {
    RangeSection {
        min: 0.0,
        max: 50.0,
        points: 11,
        scale: SweepScale::Linear,
    }
}
fn default_noise_time_range() -> RangeSection {
    RangeSection {
        min: 0.0,
        max: 3.0,
        points: 11,
        scale: SweepScale::Linear,
    }
}
fn default_noise_durations() -> Vec<f64> {
    vec![8.0, 13.0, 20.0]
}
fn default_modes_noise() -> Vec<f64> {
    vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0]
}
fn default_orders() -> Vec<u32> {
    vec![1, 2, 3, 4, 5]
}
fn default_duration_bracket() -> [f64; 2] {
    [1.0, 50.0]
}
fn default_co_duration_bracket() -> [f64; 2] {
    [0.05, 2.0]
}
fn default_power_bracket() -> [f64; 2] {
    [0.0, 500.0]
}

impl Default for SweepsSection {
    fn default() -> Self {
        toml::from_str("").expect("empty sweeps section has defaults")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    /// Intensity FWHM of the benchmark filter, GHz; defaults to the photon
    /// linewidth (matched-bandwidth comparison).
    #[serde(default)]
    pub fwhm_ghz: Option<f64>,
    #[serde(default = "default_filter_shape")]
    pub shape: FilterShapeConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FilterShapeConfig {
    Lorentzian,
    Gaussian,
}

fn default_filter_shape() -> FilterShapeConfig {
    FilterShapeConfig::Gaussian
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection {
            fwhm_ghz: None,
            shape: default_filter_shape(),
        }
    }
}

/// A parsed scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub material: MaterialSection,
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub photon: PhotonSection,
    #[serde(default)]
    pub jitter: JitterSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sweeps: SweepsSection,
    #[serde(default)]
    pub filter: FilterSection,
    /// Directory the scenario was loaded from; resolves relative material
    /// paths.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut scenario = Self::from_toml_str(&text)?;
        scenario.base_dir = path.parent().map(Path::to_path_buf);
        Ok(scenario)
    }

    pub fn material_model(&self) -> Result<MaterialModel> {
        let temperature_k = self.material.temperature_c + 273.15;
        if self.material.source == "builtin" {
            return MaterialModel::from_toml_str(
                crate::dispersion::BUILTIN_MATERIAL_TOML,
                self.material.axis,
                temperature_k,
            );
        }
        let mut path = PathBuf::from(&self.material.source);
        if path.is_relative() {
            if let Some(base) = &self.base_dir {
                path = base.join(path);
            }
        }
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        MaterialModel::from_toml_str(&text, self.material.axis, temperature_k)
    }

    /// Assemble the operating point described by the file, solving the poling
    /// period when it is not pinned.
    pub fn to_design(&self) -> Result<Design> {
        let material = self.material_model()?;
        let lambda_i = self.photon.input_wavelength_nm * 1e-9;
        let lambda_o = self.photon.output_wavelength_nm * 1e-9;
        let poling_period = match self.crystal.poling_period_nm {
            Some(nm) => nm * 1e-9,
            None => solve_poling_period(
                &material,
                self.crystal.geometry,
                self.crystal.qpm_order,
                lambda_i,
                lambda_o,
            )?,
        };
        let crystal = CrystalConfig {
            material,
            length: self.crystal.length_mm * 1e-3,
            poling_period,
            qpm_order: self.crystal.qpm_order,
            geometry: self.crystal.geometry,
            d_eff: qpm_effective_nonlinearity(
                self.crystal.d33_pm_per_v * 1e-12,
                self.crystal.qpm_order,
            ),
            effective_area: self.crystal.effective_area_um2 * 1e-12,
            theta_scale: self.crystal.theta_scale,
        };
        let pump = PumpPulse {
            center_wavelength: Design::pump_wavelength_for(lambda_i, lambda_o),
            duration_fwhm: self.pump.duration_ps * 1e-12,
            peak_power: self.pump.peak_power_w,
            repetition_rate: self.pump.repetition_rate_mhz * 1e6,
        };
        let photon = QdPhotonSpec {
            center_wavelength: lambda_i,
            linewidth_fwhm: self.photon.linewidth_ghz * 1e9,
            emission_time_offset: self.photon.emission_time_offset_ps * 1e-12,
            frequency_offset: TWO_PI * self.photon.frequency_offset_ghz * 1e9,
        };
        let jitter = JitterModel {
            sigma_frequency: TWO_PI * self.jitter.sigma_frequency_ghz * 1e9,
            sigma_time: self.jitter.sigma_time_ps * 1e-12,
        };
        let design = Design {
            crystal,
            pump,
            photon,
            jitter,
            output_wavelength: lambda_o,
            grid_points: (self.grid.input_points, self.grid.output_points),
            span_factors: (self.grid.input_span_factor, self.grid.output_span_factor),
            explicit_half_spans: (
                self.grid.input_half_span_ghz.map(|g| TWO_PI * g * 1e9),
                self.grid.output_half_span_ghz.map(|g| TWO_PI * g * 1e9),
            ),
            state_points: self.grid.state_points,
            state_span_factor: self.grid.state_span_factor,
            quadrature_order: self.grid.quadrature_order,
            max_modes: self.grid.max_modes,
        };
        design.validate()?;
        Ok(design)
    }

    pub fn power_sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::PeakPower,
            min: self.sweeps.power_w.min,
            max: self.sweeps.power_w.max,
            points: self.sweeps.power_w.points,
            scale: self.sweeps.power_w.scale,
        }
    }

    pub fn duration_sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::PulseDuration,
            min: self.sweeps.duration_ps.min * 1e-12,
            max: self.sweeps.duration_ps.max * 1e-12,
            points: self.sweeps.duration_ps.points,
            scale: self.sweeps.duration_ps.scale,
        }
    }

    pub fn noise_frequency_spec(&self) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::SigmaFrequency,
            min: TWO_PI * self.sweeps.noise_frequency_ghz.min * 1e9,
            max: TWO_PI * self.sweeps.noise_frequency_ghz.max * 1e9,
            points: self.sweeps.noise_frequency_ghz.points,
            scale: self.sweeps.noise_frequency_ghz.scale,
        }
    }

    pub fn noise_time_spec(&self) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::SigmaTime,
            min: self.sweeps.noise_time_ps.min * 1e-12,
            max: self.sweeps.noise_time_ps.max * 1e-12,
            points: self.sweeps.noise_time_ps.points,
            scale: self.sweeps.noise_time_ps.scale,
        }
    }

    pub fn noise_durations(&self) -> Vec<f64> {
        self.sweeps
            .noise_durations_ps
            .iter()
            .map(|d| d * 1e-12)
            .collect()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.sweeps.lengths_mm.iter().map(|l| l * 1e-3).collect()
    }

    pub fn duration_bracket(&self) -> (f64, f64) {
        (
            self.sweeps.duration_bracket_ps[0] * 1e-12,
            self.sweeps.duration_bracket_ps[1] * 1e-12,
        )
    }

    pub fn co_duration_bracket(&self) -> (f64, f64) {
        (
            self.sweeps.co_duration_bracket_ps[0] * 1e-12,
            self.sweeps.co_duration_bracket_ps[1] * 1e-12,
        )
    }

    pub fn power_bracket(&self) -> (f64, f64) {
        (
            self.sweeps.power_bracket_w[0],
            self.sweeps.power_bracket_w[1],
        )
    }

    pub fn modes_noise_levels(&self) -> Vec<f64> {
        self.sweeps
            .modes_noise_ghz
            .iter()
            .map(|g| TWO_PI * g * 1e9)
            .collect()
    }

    pub fn filter_fwhm_hz(&self) -> f64 {
        self.filter
            .fwhm_ghz
            .map(|g| g * 1e9)
            .unwrap_or(self.photon.linewidth_ghz * 1e9)
    }
}
