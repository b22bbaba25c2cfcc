//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured values at the stated tolerances.
//!
//! Two assertions are knowingly red and documented as such: the headline
//! purification point (criterion 4) and the three-orders-of-magnitude
//! bandwidth ratio (part of criterion 6). Both targets are unreachable under
//! the implemented dispersion model — the engine purifies *better* than the
//! target operating point, and the honest counter-propagating bandwidth of a
//! 15 mm device is about 4 GHz, putting the measured ratio near 450. The
//! remaining assertions of those criteria are exercised all the same.

use std::path::Path;
use std::time::Instant;

use faer::{c64, Mat};
use qfc_core::conversion::{
    build_transfer_operator, convert_state, mode_efficiencies, passive_filter_benchmark,
    CouplingBudget, FilterShape,
};
use qfc_core::dispersion::{solve_poling_period, Geometry};
use qfc_core::fields::JitterModel;
use qfc_core::grid::{FrequencyAxis, SpectralGrid};
use qfc_core::jsd::Jsd;
use qfc_core::optimize::{
    efficiency_purity_tradeoff, geometry_comparison, power_for_unit_eta0, purity_noise_sweep,
    qpm_order_tradeoff, schmidt_duration_curves, Design, SweepScale, SweepSpec, SweepVariable,
};
use qfc_core::scenario::Scenario;
use qfc_core::schmidt::decompose;

fn scenario(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}"));
    Scenario::from_path(&path).unwrap()
}

fn reference() -> (Scenario, Design) {
    let s = scenario("reference.toml");
    let d = s.to_design().unwrap();
    (s, d)
}

fn check(criterion: &str, pass: bool, detail: String) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn acceptance_01_poling_period() {
    let started = Instant::now();
    let (_, design) = reference();
    let material = &design.crystal.material;
    let first = solve_poling_period(material, Geometry::CounterPropagating, 1, 942e-9, 1550e-9)
        .unwrap();
    let third = solve_poling_period(material, Geometry::CounterPropagating, 3, 942e-9, 1550e-9)
        .unwrap();
    let elapsed = started.elapsed();
    let in_band = (first - 360e-9).abs() <= 0.15 * 360e-9;
    let scaling = ((third - 3.0 * first) / (3.0 * first)).abs() < 1e-9;
    let fast = elapsed.as_secs_f64() < 1.0;
    check(
        "1 (poling period)",
        in_band && scaling && fast,
        format!(
            "first order {:.2} nm (360 nm +-15%), third order {:.4} um = 3x first to {:.1e}, {:.3} s",
            first * 1e9,
            third * 1e6,
            ((third - 3.0 * first) / (3.0 * first)).abs(),
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn acceptance_02_mode_engineering() {
    let started = Instant::now();
    let s = scenario("mode_engineering.toml");
    let design = s.to_design().unwrap();
    let curves = schmidt_duration_curves(
        &design,
        &s.duration_sweep_spec(),
        &s.lengths(),
        s.duration_bracket(),
    )
    .unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    let l15 = curves
        .iter()
        .find(|c| (c.length - 15e-3).abs() < 1e-9)
        .expect("15 mm in the length family");
    let duration_ok = l15.optimal_duration >= 10.5e-12 && l15.optimal_duration <= 15.5e-12;
    let k_ok = l15.k_min >= 1.00 && l15.k_min <= 1.07;
    let durations_monotone = curves
        .windows(2)
        .all(|w| w[1].optimal_duration > w[0].optimal_duration);
    let k_monotone = curves.windows(2).all(|w| w[1].k_min > w[0].k_min);
    let fast = elapsed < 120.0;
    let summary: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "L={:.0}mm: {:.2}ps K={:.4}",
                c.length * 1e3,
                c.optimal_duration * 1e12,
                c.k_min
            )
        })
        .collect();
    check(
        "2 (mode engineering)",
        duration_ok && k_ok && durations_monotone && k_monotone && fast,
        format!("{} in {elapsed:.1} s", summary.join(", ")),
    );
}

#[test]
fn acceptance_03_efficiency_law_and_schmidt_oracles() {
    // Closed-form efficiency law across theta in [0, 2 pi].
    let coefficients = [0.9f64.sqrt(), 0.08f64.sqrt(), 0.02f64.sqrt()];
    let mut law_err = 0.0f64;
    for step in 0..=400 {
        let theta = 2.0 * std::f64::consts::PI * step as f64 / 400.0;
        let budget = CouplingBudget {
            theta,
            per_mode_theta: coefficients.iter().map(|c| c * theta).collect(),
            peak_power: 1.0,
            d_eff: 1e-11,
            effective_area: 1e-10,
            length: 15e-3,
            n_pump: 2.1,
            n_input: 2.2,
            n_output: 2.1,
            pump_energy_density: 1e11,
        };
        for (eta, c) in mode_efficiencies(&budget).iter().zip(&coefficients) {
            law_err = law_err.max((eta - (c * theta).sin().powi(2)).abs());
        }
    }

    // Completeness of the decomposed reference distribution.
    let (_, design) = reference();
    let jsd = design.jsd().unwrap();
    let data = decompose(&jsd, design.max_modes).unwrap();
    let completeness: f64 =
        data.coefficients.iter().map(|c| c * c).sum::<f64>() + data.truncated_weight;
    let completeness_err = (completeness - 1.0).abs();

    // Separable Gaussian: K = 1.
    let n = 128;
    let input = FrequencyAxis::from_span(2e15, 4e11, n).unwrap();
    let output = FrequencyAxis::from_span(1e15, 3e10, n).unwrap();
    let grid = SpectralGrid::new(input.clone(), output.clone()).unwrap();
    let mut amplitude = Mat::<c64>::zeros(n, n);
    for o in 0..n {
        for i in 0..n {
            let x = input.detuning(i) / 9e10;
            let y = output.detuning(o) / 7e9;
            amplitude[(i, o)] = c64::new((-0.25 * (x * x + y * y)).exp(), 0.0);
        }
    }
    let mut separable = Jsd {
        grid,
        amplitude,
        normalization: 1.0,
    };
    let norm = separable.l2_norm_sq().sqrt();
    for o in 0..n {
        for i in 0..n {
            separable.amplitude[(i, o)] *= c64::new(1.0 / norm, 0.0);
        }
    }
    let k_separable = decompose(&separable, 8).unwrap().schmidt_number;

    // Correlated Gaussian against the closed-form Hermite spectrum:
    // exp(-A(x^2+y^2)+Bxy) has coefficients sqrt(1-t^2) t^n.
    let t: f64 = 0.6;
    let m = 256;
    let axis = FrequencyAxis::from_span(0.0, 10.0, m).unwrap();
    let grid = SpectralGrid::new(axis.clone(), axis.clone()).unwrap();
    let a = (1.0 + t * t) / (2.0 * (1.0 - t * t));
    let b = 2.0 * t / (1.0 - t * t);
    let mut amplitude = Mat::<c64>::zeros(m, m);
    for o in 0..m {
        for i in 0..m {
            let x = axis.value(i);
            let y = axis.value(o);
            amplitude[(i, o)] = c64::new((-a * (x * x + y * y) + b * x * y).exp(), 0.0);
        }
    }
    let mut mehler = Jsd {
        grid,
        amplitude,
        normalization: 1.0,
    };
    let norm = mehler.l2_norm_sq().sqrt();
    for o in 0..m {
        for i in 0..m {
            mehler.amplitude[(i, o)] *= c64::new(1.0 / norm, 0.0);
        }
    }
    let data = decompose(&mehler, 16).unwrap();
    let mut mehler_err = 0.0f64;
    for j in 0..12 {
        let expected = (1.0 - t * t).sqrt() * t.powi(j as i32);
        mehler_err = mehler_err.max((data.coefficients[j] - expected).abs());
    }

    check(
        "3 (efficiency law and Schmidt oracles)",
        law_err < 1e-12
            && completeness_err < 1e-9
            && (k_separable - 1.0).abs() < 1e-6
            && mehler_err < 1e-5,
        format!(
            "law err {law_err:.1e}, completeness err {completeness_err:.1e}, separable K - 1 = {:.1e}, correlated-Gaussian coefficient err {mehler_err:.1e}",
            (k_separable - 1.0).abs()
        ),
    );
}

#[test]
fn acceptance_04_headline_purification_point() {
    let (s, design) = reference();
    let power = power_for_unit_eta0(&design, s.power_bracket()).unwrap();
    let report = design.with_power(power).evaluate().unwrap();
    let input_ok = (report.input_purity - 0.76).abs() <= 0.02;
    assert!(
        input_ok,
        "calibrated input purity off: {}",
        report.input_purity
    );
    let eta_ok = (report.eta0_normalized - 0.96).abs() <= 0.03;
    let purity_ok = (report.output_purity - 0.918).abs() <= 0.03;
    check(
        "4 (headline purification point)",
        eta_ok && purity_ok,
        format!(
            "input purity {:.4}; eta0_normalized {:.4} (target 0.96 +- 0.03), output purity {:.4} (target 0.918 +- 0.03); the implemented dispersion model leaks less into higher modes than the target operating point, so the converter over-purifies (see the suite header)",
            report.input_purity, report.eta0_normalized, report.output_purity
        ),
    );
}

#[test]
fn acceptance_05_power_calibration() {
    let (s, design) = reference();
    let power = power_for_unit_eta0(&design, s.power_bracket()).unwrap();
    // Bisection resolves 0.1% of the bracket (0.5 W here).
    let power_ok = (power - 60.0).abs() <= 0.5;
    let average = power * design.pump.duration_fwhm * design.pump.repetition_rate;
    let average_ok = (average - 62.4e-3).abs() <= 0.05 * 62.4e-3;
    let report = design.with_power(power).evaluate().unwrap();
    let eta_ok = report.eta[0] >= 1.0 - 1e-6;
    check(
        "5 (power calibration)",
        power_ok && average_ok && eta_ok,
        format!(
            "unit-efficiency power {power:.3} W (60 W +- bisection step), average power {:.3} mW (62.4 +- 5%), eta0 = {:.8}",
            average * 1e3,
            report.eta[0]
        ),
    );
}

#[test]
fn acceptance_06_geometry_comparison() {
    let (s, design) = reference();
    let comparison =
        geometry_comparison(&design, s.duration_bracket(), s.co_duration_bracket()).unwrap();
    let matched_ok = comparison.matched && (comparison.k_co - comparison.k_counter).abs() < 0.01;
    let bandwidth_ok = (comparison.bandwidth_co_hz - 1.61e12).abs() <= 0.2 * 1.61e12;
    let ratio = comparison.bandwidth_co_hz / comparison.bandwidth_counter_hz;
    let ratio_ok = ratio >= 1e3;
    check(
        "6 (geometry comparison)",
        matched_ok && bandwidth_ok && ratio_ok,
        format!(
            "K matched {:.4}/{:.4} at {:.3} ps, co bandwidth {:.2} THz (1.61 +- 20%), counter bandwidth {:.2} GHz, ratio {ratio:.0} (target >= 1000; a 15 mm counter-propagating device honestly gives about 4 GHz, so the ratio sits near 450 — see the suite header)",
            comparison.k_counter,
            comparison.k_co,
            comparison.duration_co * 1e12,
            comparison.bandwidth_co_hz / 1e12,
            comparison.bandwidth_counter_hz / 1e9
        ),
    );
}

#[test]
fn acceptance_07_qpm_order_tradeoff() {
    let (_, design) = reference();
    let rows = qpm_order_tradeoff(&design, &[1, 3]).unwrap();
    let baseline = &rows[0];
    let third = &rows[1];
    let eta_baseline_ok = (baseline.eta0_at_reference - 1.0).abs() < 1e-9;
    let eta_third_ok = (third.eta0_at_reference - 0.10).abs() <= 0.03;
    let purity_ok = (third.output_purity - baseline.output_purity).abs() < 1e-3;
    let period_ok = ((third.poling_period - 3.0 * baseline.poling_period)
        / (3.0 * baseline.poling_period))
        .abs()
        < 1e-9;
    check(
        "7 (grating-order trade-off)",
        eta_baseline_ok && eta_third_ok && purity_ok && period_ok,
        format!(
            "eta0(m=1) = {:.6}, eta0(m=3) = {:.4} (0.10 +- 0.03), |purity difference| = {:.1e}, period {:.3} um = 3x {:.1} nm",
            baseline.eta0_at_reference,
            third.eta0_at_reference,
            (third.output_purity - baseline.output_purity).abs(),
            third.poling_period * 1e6,
            baseline.poling_period * 1e9
        ),
    );
}

#[test]
fn acceptance_08_filter_benchmark() {
    let (s, design) = reference();

    // Temporal-jitter-only input: a (non-truncating) passive filter cannot
    // change its purity, while conversion strictly raises it.
    let temporal = design.with_jitter(JitterModel {
        sigma_frequency: 0.0,
        sigma_time: 5e-12,
    });
    let input = temporal.input_state().unwrap();
    let input_purity = input.purity();
    let wide = passive_filter_benchmark(
        &input,
        design.photon.center_omega(),
        1000.0 * design.photon.linewidth_fwhm,
        FilterShape::Gaussian,
    )
    .unwrap();
    let filter_invariant = (wide.output_purity - input_purity).abs() < 1e-6;

    let (modes, normalization) = temporal.modes().unwrap();
    let power = power_for_unit_eta0(&temporal, s.power_bracket()).unwrap();
    let budget = temporal
        .budget(normalization, &modes.coefficients, power)
        .unwrap();
    let transfer = build_transfer_operator(&modes, &budget);
    let converted = convert_state(&input, &transfer).unwrap();
    let conversion_purifies = converted.output_purity > input_purity + 1e-3;

    // Frequency-jitter reference input: the conversion's mode-0 selectivity
    // against a matched-bandwidth intensity filter.
    let reference = design.input_state().unwrap();
    let matched = passive_filter_benchmark(
        &reference,
        design.photon.center_omega(),
        s.filter_fwhm_hz(),
        FilterShape::Gaussian,
    )
    .unwrap();
    let filter_in_band = (matched.transmission - 0.70).abs() <= 0.15;
    let unit = power_for_unit_eta0(&design, s.power_bracket()).unwrap();
    let headline = design.with_power(unit).evaluate().unwrap();
    let conversion_beats_filter = headline.eta0_normalized > matched.transmission;

    check(
        "8 (filter benchmark)",
        filter_invariant && conversion_purifies && filter_in_band && conversion_beats_filter,
        format!(
            "time-jitter purity {input_purity:.4}: filter {:+.1e}, conversion -> {:.4}; matched-filter transmission {:.3} (0.70 +- 0.15) < conversion selectivity {:.4}",
            wide.output_purity - input_purity,
            converted.output_purity,
            matched.transmission,
            headline.eta0_normalized
        ),
    );
}

#[test]
fn acceptance_09_numerical_hygiene() {
    let (_, design) = reference();
    let reference = design.evaluate().unwrap();

    let mut doubled = design.clone();
    doubled.grid_points = (design.grid_points.0 * 2, design.grid_points.1 * 2);
    doubled.state_points = design.state_points * 2;
    let refined = doubled.evaluate().unwrap();

    let dk = (refined.k_jsd - reference.k_jsd).abs();
    let de = (refined.eta0_normalized - reference.eta0_normalized).abs();
    let dp = (refined.output_purity - reference.output_purity).abs();
    let converged = dk < 1e-4 && de < 1e-4 && dp < 1e-4;

    // Bit-identical results across thread counts.
    let spec = SweepSpec {
        variable: SweepVariable::PeakPower,
        min: 10.0,
        max: 100.0,
        points: 6,
        scale: SweepScale::Linear,
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| efficiency_purity_tradeoff(&design, &spec).unwrap())
    };
    let single = run(1);
    let multi = run(3);
    let identical = single.rows.iter().zip(&multi.rows).all(|(a, b)| {
        a.eta0_normalized.to_bits() == b.eta0_normalized.to_bits()
            && a.output_purity.to_bits() == b.output_purity.to_bits()
            && a.transmission.to_bits() == b.transmission.to_bits()
    });

    check(
        "9 (numerical hygiene)",
        converged && identical,
        format!(
            "grid doubling: |dK| = {dk:.1e}, |d eta0_normalized| = {de:.1e}, |d purity| = {dp:.1e} (all < 1e-4); sweeps bit-identical across thread counts: {identical}"
        ),
    );
}

#[test]
fn acceptance_noise_sweep_properties() {
    // Figure-level ordering properties standing in for digitized curves:
    // purification at every sampled noise point for every duration, with the
    // near-optimal duration dominating.
    let s = scenario("mode_engineering.toml");
    let design = s.to_design().unwrap();
    let spec = SweepSpec {
        variable: SweepVariable::SigmaFrequency,
        min: 0.0,
        max: 2.0 * std::f64::consts::PI * 50e9,
        points: 6,
        scale: SweepScale::Linear,
    };
    let durations = s.noise_durations();
    let results = purity_noise_sweep(&design, &spec, &durations, s.power_bracket()).unwrap();

    let mut purify_ok = true;
    for result in &results {
        for row in &result.rows {
            assert!(row.flag.is_none(), "unexpected flag: {:?}", row.flag);
            if row.value > 0.0 {
                purify_ok &= row.output_purity > row.input_purity + 1e-6;
            } else {
                purify_ok &= (row.output_purity - row.input_purity).abs() < 1e-6;
            }
        }
    }

    // durations = [8, 13, 20] ps; 13 ps sits nearest the optimum.
    let optimal = &results[1];
    let mut dominance_ok = true;
    for (other_index, other) in results.iter().enumerate() {
        if other_index == 1 {
            continue;
        }
        for (a, b) in optimal.rows.iter().zip(&other.rows) {
            if a.value > 0.0 {
                dominance_ok &= a.output_purity >= b.output_purity - 1e-9;
            }
        }
    }

    check(
        "figure properties (noise sweeps)",
        purify_ok && dominance_ok,
        format!(
            "output purity exceeds input purity at every sampled point: {purify_ok}; near-optimal duration dominates: {dominance_ok}"
        ),
    );
}
