//! One-time calibration procedure behind the constants recorded in the
//! bundled scenario files.
//!
//! Prints, for the reference design (942 nm -> 1550 nm, 15 mm
//! counter-propagating waveguide, 13 ps pump):
//!   1. the solved poling periods,
//!   2. the Schmidt number as a function of the output analysis window
//!      (fixing `grid.output_span_factor`),
//!   3. the raw coupling at 60 W and the implied `crystal.theta_scale`
//!      that pins unit zeroth-mode efficiency there,
//!   4. the jitter level that reproduces a 0.76-purity input
//!      (`jitter.sigma_frequency = 0.85516 x` the line's intensity std),
//!   5. the resulting operating-point metrics.
//!
//! Run with `cargo run --release -p qfc-core --example calibrate`.

use std::path::Path;

use qfc_core::dispersion::{solve_poling_period, Geometry};
use qfc_core::optimize::power_for_unit_eta0;
use qfc_core::scenario::Scenario;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/reference.toml");
    let scenario = Scenario::from_path(&path).expect("bundled scenario parses");
    let design = scenario.to_design().expect("bundled scenario builds");

    println!("== poling periods ==");
    for (geometry, order) in [
        (Geometry::CounterPropagating, 1),
        (Geometry::CounterPropagating, 3),
        (Geometry::CoPropagating, 1),
    ] {
        let period = solve_poling_period(
            &design.crystal.material,
            geometry,
            order,
            design.input_wavelength(),
            design.output_wavelength,
        )
        .unwrap();
        println!("  {geometry:?} m={order}: {:.4} um", period * 1e6);
    }

    println!("== Schmidt number versus output analysis window (13 ps pump) ==");
    for factor in [5.0, 8.0, 12.0, 16.0, 20.0, 24.0] {
        let mut d = design.clone();
        d.span_factors = (5.0, factor);
        println!(
            "  output span factor {factor:4.1}: K = {:.5}",
            d.schmidt_number().unwrap()
        );
    }

    println!("== coupling calibration at the configured window ==");
    let (modes, normalization) = design.modes().unwrap();
    let mut raw = design.clone();
    raw.crystal.theta_scale = 1.0;
    let raw_budget = raw.budget(normalization, &modes.coefficients, 60.0).unwrap();
    let needed = std::f64::consts::FRAC_PI_2 / modes.coefficients[0];
    println!(
        "  raw theta(60 W) = {:.5} rad, needed {:.5} rad -> theta_scale = {:.10e}",
        raw_budget.theta,
        needed,
        needed / raw_budget.theta
    );
    println!(
        "  configured theta_scale = {:.10e}",
        design.crystal.theta_scale
    );

    println!("== operating point with the configured calibration ==");
    let power = power_for_unit_eta0(&design, scenario.power_bracket()).unwrap();
    let report = design.with_power(power).evaluate().unwrap();
    println!(
        "  unit-efficiency power {power:.4} W, average {:.3} mW",
        power * design.pump.duration_fwhm * design.pump.repetition_rate * 1e3
    );
    println!(
        "  K = {:.5}, input purity {:.4}, eta0_normalized {:.4}, output purity {:.4}, transmission {:.4}",
        report.k_jsd,
        report.input_purity,
        report.eta0_normalized,
        report.output_purity,
        report.transmission
    );
}
