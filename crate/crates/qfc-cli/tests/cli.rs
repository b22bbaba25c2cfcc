//! End-to-end checks of the `qfc` binary: exit codes, emitted files, manifest
//! round-trips and thread-count independence.

use std::path::{Path, PathBuf};
use std::process::Command;

use qfc_cli::read_tsv;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_qfc")
}

fn workspace_scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(tag);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Reference scenario shrunk to test-friendly grids and sweep sizes.
fn reduced_scenario(dir: &Path) -> PathBuf {
    let text = std::fs::read_to_string(workspace_scenario("reference.toml")).unwrap();
    let text = text
        .replace("input_points = 512", "input_points = 256")
        .replace("output_points = 512", "output_points = 256")
        .replace("state_points = 1024", "state_points = 512")
        .replace("max_modes = 64", "max_modes = 32")
        .replace(
            "power_w = { min = 0.5, max = 120.0, points = 40 }",
            "power_w = { min = 5.0, max = 90.0, points = 6 }",
        );
    let path = dir.join("reduced.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn poling_reports_the_solved_period() {
    let dir = temp_dir("poling");
    let scenario = workspace_scenario("reference.toml");
    let out = run(&[
        "poling",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("poling period"), "{stdout}");

    let (header, rows) = read_tsv(&dir.join("poling.tsv")).unwrap();
    assert_eq!(header.last().unwrap(), "poling_period_m");
    let period: f64 = rows[0].last().unwrap().parse().unwrap();
    assert!((period - 360e-9).abs() < 0.15 * 360e-9, "{period}");
    assert!(dir.join("manifest.toml").exists());
    assert!(dir.join("scenario.toml").exists());
}

#[test]
fn purify_emits_a_parseable_report() {
    let dir = temp_dir("purify");
    let scenario = reduced_scenario(&dir);
    let out = run(&[
        "purify",
        "--filter",
        "--export-jsd",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // The exported distribution has one row per input point and re/im pairs
    // per output point, after the axis header lines.
    let jsd_text = std::fs::read_to_string(dir.join("jsd.tsv")).unwrap();
    let header_lines: Vec<&str> = jsd_text.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(header_lines.len(), 3);
    assert!(header_lines[0].starts_with("# input_axis_radps"));
    let data_rows: Vec<&str> = jsd_text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data_rows.len(), 256);
    assert_eq!(data_rows[0].split('\t').count(), 2 * 256);

    let (header, rows) = read_tsv(&dir.join("purify.tsv")).unwrap();
    assert_eq!(header, vec!["quantity".to_string(), "value".to_string()]);
    let quantities: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    for expected in [
        "k_jsd",
        "eta0_normalized",
        "output_purity",
        "transmission",
        "filter_transmission",
        "filter_output_purity",
    ] {
        assert!(quantities.contains(&expected), "missing {expected}");
    }
    // Every numeric value parses back.
    for row in &rows {
        row[1].parse::<f64>().unwrap();
    }
}

#[test]
fn figure_tradeoff_round_trips_and_is_thread_independent() {
    let dir_a = temp_dir("tradeoff-a");
    let scenario = reduced_scenario(&dir_a);
    let out = run(&[
        "figure",
        "--figure",
        "tradeoff",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir_a.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let dir_b = temp_dir("tradeoff-b");
    let out = run(&[
        "figure",
        "--figure",
        "tradeoff",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        dir_b.to_str().unwrap(),
        "--threads",
        "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let bytes_a = std::fs::read(dir_a.join("tradeoff.tsv")).unwrap();
    let bytes_b = std::fs::read(dir_b.join("tradeoff.tsv")).unwrap();
    assert_eq!(bytes_a, bytes_b, "results depend on thread count");

    let (header, rows) = read_tsv(&dir_a.join("tradeoff.tsv")).unwrap();
    assert_eq!(header[0], "peak_power_w");
    assert_eq!(rows.len(), 6);
    for row in &rows {
        for cell in &row[..row.len() - 1] {
            cell.parse::<f64>().unwrap();
        }
    }

    // The manifest records the tool version and the convergence gate.
    let manifest = std::fs::read_to_string(dir_a.join("manifest.toml")).unwrap();
    assert!(manifest.contains("tool_version"));
    assert!(manifest.contains("convergence_k"));
    assert!(manifest.contains("[resolved]"));
}

/// Exercise every figure family once on a strongly reduced scenario so the
/// writers and file layouts stay covered.
#[test]
fn every_figure_family_emits_its_files() {
    let dir = temp_dir("figures-all");
    let text = std::fs::read_to_string(workspace_scenario("reference.toml")).unwrap();
    let text = text
        .replace("input_points = 512", "input_points = 256")
        .replace("output_points = 512", "output_points = 256")
        .replace("state_points = 1024", "state_points = 512")
        .replace("max_modes = 64", "max_modes = 32")
        .replace(
            "power_w = { min = 0.5, max = 120.0, points = 40 }",
            "power_w = { min = 5.0, max = 90.0, points = 5 }",
        )
        .replace(
            "noise_frequency_ghz = { min = 0.0, max = 50.0, points = 11 }",
            "noise_frequency_ghz = { min = 0.0, max = 50.0, points = 4 }",
        )
        .replace(
            "noise_time_ps = { min = 0.0, max = 15.0, points = 11 }",
            "noise_time_ps = { min = 0.0, max = 15.0, points = 4 }",
        )
        .replace(
            "noise_durations_ps = [8.0, 13.0, 20.0]",
            "noise_durations_ps = [13.0]",
        )
        .replace(
            "modes_noise_ghz = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0]",
            "modes_noise_ghz = [0.0, 25.0, 50.0]",
        )
        .replace("qpm_orders = [1, 2, 3, 4, 5]", "qpm_orders = [1, 3]")
        .replace(
            "co_duration_bracket_ps = [0.1, 1.0]",
            "co_duration_bracket_ps = [0.1, 1.0]\nduration_ps = { min = 6.0, max = 20.0, points = 5 }\nlengths_mm = [10.0, 15.0]",
        );
    let scenario_path = dir.join("tiny.toml");
    std::fs::write(&scenario_path, text).unwrap();

    let expectations = [
        ("modes", vec!["modes.tsv"]),
        ("power", vec!["power_eta0.tsv", "power_unit.tsv"]),
        ("duration", vec!["duration_k.tsv", "duration_optimum.tsv"]),
        ("noise-freq", vec!["noise_freq_13.0ps.tsv"]),
        ("noise-time", vec!["noise_time_13.0ps.tsv"]),
        ("geometry", vec!["geometry.tsv"]),
        ("qpm", vec!["qpm.tsv"]),
    ];
    for (figure, files) in expectations {
        let out = run(&[
            "figure",
            "--figure",
            figure,
            "--scenario",
            scenario_path.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "figure {figure}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        for file in files {
            let (header, rows) = read_tsv(&dir.join(file)).unwrap();
            assert!(!header.is_empty() && !rows.is_empty(), "{file} is empty");
        }
    }
}

#[test]
fn empty_sweep_range_is_a_usage_error() {
    let dir = temp_dir("empty-sweep");
    let scenario_path = dir.join("empty.toml");
    let text = std::fs::read_to_string(workspace_scenario("reference.toml"))
        .unwrap()
        .replace(
            "power_w = { min = 0.5, max = 120.0, points = 40 }",
            "power_w = { min = 60.0, max = 60.0, points = 5 }",
        );
    std::fs::write(&scenario_path, text).unwrap();
    let out = run(&[
        "figure",
        "--figure",
        "tradeoff",
        "--scenario",
        scenario_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_scenario_keys_are_a_usage_error() {
    let dir = temp_dir("unknown-key");
    let scenario_path = dir.join("bad.toml");
    let text = std::fs::read_to_string(workspace_scenario("reference.toml"))
        .unwrap()
        .replace("length_mm = 15.0", "length_mm = 15.0\nlenght_um = 2.0");
    std::fs::write(&scenario_path, text).unwrap();
    let out = run(&[
        "poling",
        "--scenario",
        scenario_path.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lenght_um"));
}

#[test]
fn missing_scenario_is_a_usage_error() {
    let dir = temp_dir("missing");
    let out = run(&[
        "poling",
        "--scenario",
        dir.join("nope.toml").to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_figure_id_is_rejected_by_the_parser() {
    let out = run(&["figure", "--figure", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}
