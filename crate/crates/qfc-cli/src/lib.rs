//! Implementation of the `qfc` subcommands: scenario ingestion, figure-data
//! emission and result persistence. Everything is written as delimited text
//! plus a run manifest so any output can be regenerated from its directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qfc_core::conversion::{
    build_transfer_operator, convert_state, passive_filter_benchmark, FilterShape,
};
use qfc_core::error::{Error, Result};
use qfc_core::fields::JitterModel;
use qfc_core::jsd::output_marginal_bandwidth;
use qfc_core::optimize::{
    efficiency_purity_tradeoff, geometry_comparison, power_for_unit_eta0, purity_noise_sweep,
    qpm_order_tradeoff, schmidt_duration_curves, Design, SweepResult,
};
use qfc_core::scenario::{FilterShapeConfig, Scenario};
use qfc_core::schmidt::mode_overlap_matrix;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Figure families the CLI can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    /// Mode populations before/after conversion for a set of noise levels.
    Modes,
    /// Zeroth-mode efficiency versus peak power per waveguide length.
    Power,
    /// Schmidt number versus pump duration per waveguide length.
    Duration,
    /// Purity versus injected frequency noise per pump duration.
    NoiseFreq,
    /// Purity versus injected time noise per pump duration.
    NoiseTime,
    /// Efficiency/purity trade-off versus peak power.
    Tradeoff,
    /// Output bandwidths of the two geometries at matched Schmidt number.
    Geometry,
    /// Grating-order trade-off at the reference power.
    Qpm,
}

impl FigureId {
    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Modes => "modes",
            FigureId::Power => "power",
            FigureId::Duration => "duration",
            FigureId::NoiseFreq => "noise_freq",
            FigureId::NoiseTime => "noise_time",
            FigureId::Tradeoff => "tradeoff",
            FigureId::Geometry => "geometry",
            FigureId::Qpm => "qpm",
        }
    }
}

/// Fixed-width scientific formatting keeps outputs bit-identical across
/// platforms and thread counts.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.12e}")
    }
}

fn write_tsv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join("\t"));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join("\t"));
        text.push('\n');
    }
    std::fs::write(path, text)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// Parse a delimited-text result file back into header and rows (round-trip
/// checks and downstream tooling).
pub fn read_tsv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split('\t')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<String> = line.split('\t').map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(Error::Config(format!(
                "{}: row width {} does not match header width {}",
                path.display(),
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn sweep_header(variable: &str) -> Vec<String> {
    vec![
        variable.to_string(),
        "k_jsd".into(),
        "eta0_normalized".into(),
        "eta0_unnormalized".into(),
        "eta1_unnormalized".into(),
        "eta2_unnormalized".into(),
        "eta3_unnormalized".into(),
        "eta4_unnormalized".into(),
        "input_purity".into(),
        "output_purity".into(),
        "transmission".into(),
        "output_bandwidth_hz".into(),
        "flag".into(),
    ]
}

fn sweep_rows(result: &SweepResult) -> Vec<Vec<String>> {
    result
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![
                format_float(row.value),
                format_float(row.k_jsd),
                format_float(row.eta0_normalized),
            ];
            for eta in row.eta_unnormalized {
                cells.push(format_float(eta));
            }
            cells.push(format_float(row.input_purity));
            cells.push(format_float(row.output_purity));
            cells.push(format_float(row.transmission));
            cells.push(format_float(row.output_bandwidth_hz));
            cells.push(row.flag.clone().unwrap_or_default());
            cells
        })
        .collect()
}

/// Context shared by all commands: parsed scenario, resolved design, output
/// directory.
pub struct RunContext {
    pub scenario: Scenario,
    pub scenario_path: PathBuf,
    pub design: Design,
    pub out_dir: PathBuf,
}

impl RunContext {
    pub fn load(scenario_path: &Path, out_dir: &Path) -> Result<Self> {
        let scenario = Scenario::from_path(scenario_path)?;
        let design = scenario.to_design()?;
        std::fs::create_dir_all(out_dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(RunContext {
            scenario,
            scenario_path: scenario_path.to_path_buf(),
            design,
            out_dir: out_dir.to_path_buf(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Copy the scenario next to the results and record the resolved
    /// configuration; the pair regenerates any output of this run.
    fn write_manifest(&self, command: &str, extra: &[(String, String)]) -> Result<()> {
        std::fs::copy(&self.scenario_path, self.path("scenario.toml"))
            .map_err(|e| Error::Config(format!("cannot copy scenario: {e}")))?;
        let d = &self.design;
        let mut text = String::new();
        let _ = writeln!(text, "[run]");
        let _ = writeln!(text, "tool_version = \"{TOOL_VERSION}\"");
        let _ = writeln!(text, "command = \"{command}\"");
        let _ = writeln!(text, "scenario = \"scenario.toml\"");
        for (key, value) in extra {
            let _ = writeln!(text, "{key} = {value}");
        }
        let _ = writeln!(text);
        let _ = writeln!(text, "[resolved]");
        let _ = writeln!(text, "poling_period_m = {:.16e}", d.crystal.poling_period);
        let _ = writeln!(text, "length_m = {:.16e}", d.crystal.length);
        let _ = writeln!(text, "qpm_order = {}", d.crystal.qpm_order);
        let _ = writeln!(text, "d_eff_m_per_v = {:.16e}", d.crystal.d_eff);
        let _ = writeln!(text, "effective_area_m2 = {:.16e}", d.crystal.effective_area);
        let _ = writeln!(text, "theta_scale = {:.16e}", d.crystal.theta_scale);
        let _ = writeln!(
            text,
            "pump_center_wavelength_m = {:.16e}",
            d.pump.center_wavelength
        );
        let _ = writeln!(text, "pump_duration_s = {:.16e}", d.pump.duration_fwhm);
        let _ = writeln!(text, "pump_peak_power_w = {:.16e}", d.pump.peak_power);
        let _ = writeln!(text, "photon_linewidth_hz = {:.16e}", d.photon.linewidth_fwhm);
        let _ = writeln!(
            text,
            "jitter_sigma_frequency_radps = {:.16e}",
            d.jitter.sigma_frequency
        );
        let _ = writeln!(text, "jitter_sigma_time_s = {:.16e}", d.jitter.sigma_time);
        if let Ok(grid) = d.grid() {
            let _ = writeln!(
                text,
                "grid_input_half_span_radps = {:.16e}",
                grid.input.end() - grid.input.center()
            );
            let _ = writeln!(
                text,
                "grid_output_half_span_radps = {:.16e}",
                grid.output.end() - grid.output.center()
            );
            let _ = writeln!(text, "grid_points = [{}, {}]", grid.input.len(), grid.output.len());
        }
        std::fs::write(self.path("manifest.toml"), text)
            .map_err(|e| Error::Config(format!("cannot write manifest: {e}")))
    }

    /// Figure runs refuse to proceed when halving the grid resolution moves
    /// the Schmidt number, so every emitted dataset is grid-converged.
    fn convergence_gate(&self) -> Result<(f64, f64)> {
        let k_reference = self.design.schmidt_number()?;
        let mut halved = self.design.clone();
        halved.grid_points = (self.design.grid_points.0 / 2, self.design.grid_points.1 / 2);
        let k_halved = halved.schmidt_number()?;
        if ((k_reference - k_halved) / k_reference).abs() > 1e-4 {
            return Err(Error::Infeasible(format!(
                "grid convergence gate failed: K = {k_reference:.6} at {:?} points but {k_halved:.6} at half resolution; increase grid points",
                self.design.grid_points
            )));
        }
        Ok((k_reference, k_halved))
    }
}

/// `qfc poling`: solve and report the poling period of the configured
/// arrangement.
pub fn run_poling(ctx: &RunContext) -> Result<()> {
    let period = qfc_core::dispersion::solve_poling_period(
        &ctx.design.crystal.material,
        ctx.design.crystal.geometry,
        ctx.design.crystal.qpm_order,
        ctx.design.input_wavelength(),
        ctx.design.output_wavelength,
    )?;
    println!(
        "poling period: {:.4} nm ({:?}, order {})",
        period * 1e9,
        ctx.design.crystal.geometry,
        ctx.design.crystal.qpm_order
    );
    write_tsv(
        &ctx.path("poling.tsv"),
        &[
            "geometry".into(),
            "qpm_order".into(),
            "input_wavelength_m".into(),
            "output_wavelength_m".into(),
            "poling_period_m".into(),
        ],
        &[vec![
            format!("{:?}", ctx.design.crystal.geometry),
            ctx.design.crystal.qpm_order.to_string(),
            format_float(ctx.design.input_wavelength()),
            format_float(ctx.design.output_wavelength),
            format_float(period),
        ]],
    )?;
    ctx.write_manifest("poling", &[])
}

/// `qfc purify`: run the full pipeline once at the configured operating
/// point; optionally append the passive-filter comparison and dump the
/// joint spectral distribution.
pub fn run_purify(ctx: &RunContext, with_filter: bool, export_jsd: bool) -> Result<()> {
    if export_jsd {
        ctx.design.jsd()?.write_delimited(&ctx.path("jsd.tsv"))?;
    }
    let report = ctx.design.evaluate()?;
    let mut rows: Vec<Vec<String>> = vec![
        vec!["k_jsd".into(), format_float(report.k_jsd)],
        vec!["theta_rad".into(), format_float(report.theta)],
        vec!["peak_power_w".into(), format_float(ctx.design.pump.peak_power)],
        vec![
            "average_power_w".into(),
            format_float(ctx.design.pump.average_power()),
        ],
        vec!["input_purity".into(), format_float(report.input_purity)],
        vec!["eta0_normalized".into(), format_float(report.eta0_normalized)],
        vec!["output_purity".into(), format_float(report.output_purity)],
        vec!["transmission".into(), format_float(report.transmission)],
        vec![
            "output_bandwidth_hz".into(),
            format_float(report.output_bandwidth_hz),
        ],
    ];
    for (j, eta) in report.eta.iter().take(5).enumerate() {
        rows.push(vec![format!("eta{j}_unnormalized"), format_float(*eta)]);
    }
    if with_filter {
        let input = ctx.design.input_state()?;
        let shape = match ctx.scenario.filter.shape {
            FilterShapeConfig::Lorentzian => FilterShape::Lorentzian,
            FilterShapeConfig::Gaussian => FilterShape::Gaussian,
        };
        let filter = passive_filter_benchmark(
            &input,
            ctx.design.photon.center_omega(),
            ctx.scenario.filter_fwhm_hz(),
            shape,
        )?;
        rows.push(vec![
            "filter_fwhm_hz".into(),
            format_float(ctx.scenario.filter_fwhm_hz()),
        ]);
        rows.push(vec![
            "filter_transmission".into(),
            format_float(filter.transmission),
        ]);
        rows.push(vec![
            "filter_output_purity".into(),
            format_float(filter.output_purity),
        ]);
    }
    println!(
        "eta0_normalized = {:.4}, output purity = {:.4}, transmission = {:.4}",
        report.eta0_normalized, report.output_purity, report.transmission
    );
    write_tsv(
        &ctx.path("purify.tsv"),
        &["quantity".into(), "value".into()],
        &rows,
    )?;
    ctx.write_manifest("purify", &[("filter".into(), with_filter.to_string())])
}

/// `qfc figure --figure ID`: emit the data files of one figure family.
pub fn run_figure(ctx: &RunContext, figure: FigureId) -> Result<()> {
    let (k_reference, k_halved) = ctx.convergence_gate()?;
    match figure {
        FigureId::Modes => figure_modes(ctx)?,
        FigureId::Power => figure_power(ctx)?,
        FigureId::Duration => figure_duration(ctx)?,
        FigureId::NoiseFreq => figure_noise(ctx, true)?,
        FigureId::NoiseTime => figure_noise(ctx, false)?,
        FigureId::Tradeoff => figure_tradeoff(ctx)?,
        FigureId::Geometry => figure_geometry(ctx)?,
        FigureId::Qpm => figure_qpm(ctx)?,
    }
    ctx.write_manifest(
        &format!("figure {}", figure.name()),
        &[
            ("convergence_k".into(), format!("{k_reference:.10e}")),
            ("convergence_k_half_resolution".into(), format!("{k_halved:.10e}")),
        ],
    )
}

const REPORTED_MODES: usize = 10;

/// First few mode functions and the coefficient spectrum, for bar- and
/// mode-shape plots.
fn write_mode_functions(ctx: &RunContext, modes: &qfc_core::schmidt::SchmidtData) -> Result<()> {
    let coefficient_rows: Vec<Vec<String>> = modes
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, c)| vec![j.to_string(), format_float(*c), format_float(c * c)])
        .collect();
    write_tsv(
        &ctx.path("schmidt_coefficients.tsv"),
        &[
            "mode_index".into(),
            "coefficient_sqrt_d".into(),
            "weight_d".into(),
        ],
        &coefficient_rows,
    )?;

    let shown = modes.mode_count().min(6);
    for (name, axis, functions) in [
        ("schmidt_modes_input.tsv", &modes.input_axis, &modes.input_modes),
        ("schmidt_modes_output.tsv", &modes.output_axis, &modes.output_modes),
    ] {
        let mut header = vec!["omega_radps".to_string()];
        for j in 0..shown {
            header.push(format!("mode{j}_re"));
            header.push(format!("mode{j}_im"));
        }
        let rows: Vec<Vec<String>> = (0..axis.len())
            .map(|i| {
                let mut cells = vec![format_float(axis.value(i))];
                for j in 0..shown {
                    cells.push(format_float(functions[(i, j)].re));
                    cells.push(format_float(functions[(i, j)].im));
                }
                cells
            })
            .collect();
        write_tsv(&ctx.path(name), &header, &rows)?;
    }
    Ok(())
}

fn figure_modes(ctx: &RunContext) -> Result<()> {
    let design = &ctx.design;
    let (modes, normalization) = design.modes()?;
    write_mode_functions(ctx, &modes)?;
    let power = power_for_unit_eta0(design, ctx.scenario.power_bracket())?;
    let budget = design.budget(normalization, &modes.coefficients, power)?;
    let transfer = build_transfer_operator(&modes, &budget);

    let mut rows = Vec::new();
    for (index, &sigma) in ctx.scenario.modes_noise_levels().iter().enumerate() {
        let noisy = design.with_jitter(JitterModel {
            sigma_frequency: sigma,
            ..design.jitter
        });
        let input = noisy.input_state()?;
        let before = mode_overlap_matrix(&input, &modes)?;
        let report = convert_state(&input, &transfer)?;
        let mut cells = vec![
            index.to_string(),
            format_float(sigma / (2.0 * std::f64::consts::PI) / 1e9),
            format_float(input.purity()),
            format_float(report.output_purity),
            format_float(before.truncation_weight),
        ];
        let populations = before.populations();
        for j in 0..REPORTED_MODES {
            cells.push(format_float(populations.get(j).copied().unwrap_or(0.0)));
        }
        for j in 0..REPORTED_MODES {
            cells.push(format_float(
                report.output_mode_populations.get(j).copied().unwrap_or(0.0),
            ));
        }
        rows.push(cells);
    }
    let mut header = vec![
        "state_index".into(),
        "noise_sigma_ghz".into(),
        "input_purity".into(),
        "output_purity".into(),
        "uncaptured_weight".into(),
    ];
    for j in 0..REPORTED_MODES {
        header.push(format!("input_population_{j}"));
    }
    for j in 0..REPORTED_MODES {
        header.push(format!("output_population_{j}"));
    }
    write_tsv(&ctx.path("modes.tsv"), &header, &rows)
}

fn figure_power(ctx: &RunContext) -> Result<()> {
    let design = &ctx.design;
    let spec = ctx.scenario.power_sweep_spec();
    spec.validate()?;
    let lengths = ctx.scenario.lengths();
    let powers = spec.values();

    let mut eta_columns = Vec::new();
    let mut unit_rows = Vec::new();
    for &length in &lengths {
        let tuned = design.with_length(length);
        let (modes, normalization) = tuned.modes()?;
        let d0_sqrt = modes.coefficients[0];
        let column: Vec<f64> = powers
            .iter()
            .map(|&p| {
                let budget = tuned.budget(normalization, &modes.coefficients, p)?;
                Ok((d0_sqrt * budget.theta).sin().powi(2))
            })
            .collect::<Result<_>>()?;
        eta_columns.push(column);
        let unit = power_for_unit_eta0(&tuned, ctx.scenario.power_bracket())?;
        unit_rows.push(vec![
            format_float(length * 1e3),
            format_float(unit),
        ]);
    }

    let mut header = vec!["peak_power_w".to_string()];
    for &length in &lengths {
        header.push(format!("eta0_unnormalized_l{:.1}mm", length * 1e3));
    }
    let rows: Vec<Vec<String>> = powers
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut cells = vec![format_float(p)];
            for column in &eta_columns {
                cells.push(format_float(column[i]));
            }
            cells
        })
        .collect();
    write_tsv(&ctx.path("power_eta0.tsv"), &header, &rows)?;
    write_tsv(
        &ctx.path("power_unit.tsv"),
        &["length_mm".into(), "unit_efficiency_power_w".into()],
        &unit_rows,
    )
}

fn figure_duration(ctx: &RunContext) -> Result<()> {
    let design = &ctx.design;
    let spec = ctx.scenario.duration_sweep_spec();
    let lengths = ctx.scenario.lengths();
    let curves = schmidt_duration_curves(design, &spec, &lengths, ctx.scenario.duration_bracket())?;

    let mut header = vec!["pulse_duration_s".to_string()];
    for curve in &curves {
        header.push(format!("k_jsd_l{:.1}mm", curve.length * 1e3));
    }
    let count = curves[0].rows.len();
    let rows: Vec<Vec<String>> = (0..count)
        .map(|i| {
            let mut cells = vec![format_float(curves[0].rows[i].0)];
            for curve in &curves {
                cells.push(format_float(curve.rows[i].1));
            }
            cells
        })
        .collect();
    write_tsv(&ctx.path("duration_k.tsv"), &header, &rows)?;

    let optimum_rows: Vec<Vec<String>> = curves
        .iter()
        .map(|curve| {
            vec![
                format_float(curve.length * 1e3),
                format_float(curve.optimal_duration),
                format_float(curve.k_min),
            ]
        })
        .collect();
    write_tsv(
        &ctx.path("duration_optimum.tsv"),
        &[
            "length_mm".into(),
            "optimal_duration_s".into(),
            "k_min".into(),
        ],
        &optimum_rows,
    )
}

fn figure_noise(ctx: &RunContext, frequency: bool) -> Result<()> {
    let design = &ctx.design;
    let spec = if frequency {
        ctx.scenario.noise_frequency_spec()
    } else {
        ctx.scenario.noise_time_spec()
    };
    let durations = ctx.scenario.noise_durations();
    let results = purity_noise_sweep(design, &spec, &durations, ctx.scenario.power_bracket())?;
    for (duration, result) in durations.iter().zip(&results) {
        let name = format!(
            "{}_{:.1}ps.tsv",
            if frequency { "noise_freq" } else { "noise_time" },
            duration * 1e12
        );
        let variable = if frequency {
            "noise_sigma_frequency_radps"
        } else {
            "noise_sigma_time_s"
        };
        write_tsv(&ctx.path(&name), &sweep_header(variable), &sweep_rows(result))?;
    }
    Ok(())
}

fn figure_tradeoff(ctx: &RunContext) -> Result<()> {
    let result = efficiency_purity_tradeoff(&ctx.design, &ctx.scenario.power_sweep_spec())?;
    write_tsv(
        &ctx.path("tradeoff.tsv"),
        &sweep_header("peak_power_w"),
        &sweep_rows(&result),
    )
}

fn figure_geometry(ctx: &RunContext) -> Result<()> {
    let comparison = geometry_comparison(
        &ctx.design,
        ctx.scenario.duration_bracket(),
        ctx.scenario.co_duration_bracket(),
    )?;
    write_tsv(
        &ctx.path("geometry.tsv"),
        &[
            "duration_counter_s".into(),
            "k_counter".into(),
            "bandwidth_counter_hz".into(),
            "duration_co_s".into(),
            "k_co".into(),
            "bandwidth_co_hz".into(),
            "bandwidth_ratio".into(),
            "matched".into(),
        ],
        &[vec![
            format_float(comparison.duration_counter),
            format_float(comparison.k_counter),
            format_float(comparison.bandwidth_counter_hz),
            format_float(comparison.duration_co),
            format_float(comparison.k_co),
            format_float(comparison.bandwidth_co_hz),
            format_float(comparison.bandwidth_co_hz / comparison.bandwidth_counter_hz),
            comparison.matched.to_string(),
        ]],
    )
}

fn figure_qpm(ctx: &RunContext) -> Result<()> {
    let orders = &ctx.scenario.sweeps.qpm_orders;
    let rows = qpm_order_tradeoff(&ctx.design, orders)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                row.order.to_string(),
                format_float(row.poling_period),
                format_float(row.eta0_at_reference),
                format_float(row.output_purity),
                format_float(row.transmission),
            ]
        })
        .collect();
    write_tsv(
        &ctx.path("qpm.tsv"),
        &[
            "qpm_order".into(),
            "poling_period_m".into(),
            "eta0_at_reference_power".into(),
            "output_purity".into(),
            "transmission".into(),
        ],
        &table,
    )
}

/// Output bandwidth of the configured design (exposed for tests).
pub fn design_bandwidth_hz(design: &Design) -> Result<f64> {
    Ok(output_marginal_bandwidth(&design.jsd()?)?.fwhm_hz)
}
