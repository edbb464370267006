//! End-to-end contract tests for the `fst` binary: exit codes, determinism,
//! and the documented file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fst_cli::io::{read_fmap, read_input, write_fmap, write_png};
use fst_core::metrics::{ssim, SsimConfig};
use fst_core::spectral::{dft, spectral_gram};
use fst_core::synth::{demo_content_image, demo_style_image, rng_from_seed};
use fst_core::tensor::FeatureMap;

fn fst() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fst"))
}

fn run(args: &[&str]) -> Output {
    fst().args(args).output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn max_abs_diff(a: &FeatureMap, b: &FeatureMap) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn demo_inputs(dir: &Path) -> (PathBuf, PathBuf) {
    let mut rng = rng_from_seed(1000);
    let content = demo_content_image(24, 24, &mut rng);
    let style = demo_style_image(24, 24, &mut rng);
    let c = dir.join("content.fmap");
    let s = dir.join("style.fmap");
    write_fmap(&content, &c).unwrap();
    write_fmap(&style, &s).unwrap();
    (c, s)
}

#[test]
fn stylize_with_identical_inputs_returns_the_content() {
    let dir = tempfile::tempdir().unwrap();
    let (content_path, _) = demo_inputs(dir.path());
    let out = dir.path().join("out.fmap");
    for method in ["adain", "wct", "optimal", "gram-opt"] {
        let output = run(&[
            "stylize",
            content_path.to_str().unwrap(),
            content_path.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
            "--method",
            method,
        ]);
        assert_eq!(code(&output), 0, "{method}: {output:?}");
        let result = read_fmap(&out).unwrap();
        let content = read_fmap(&content_path).unwrap();
        assert!(
            max_abs_diff(&result, &content) < 1e-6,
            "{method} changed the content"
        );
    }
}

#[test]
fn spatial_and_frequency_domains_agree_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let (content, style) = demo_inputs(dir.path());
    let out_s = dir.path().join("spatial.fmap");
    let out_f = dir.path().join("frequency.fmap");
    for (domain, path) in [("spatial", &out_s), ("frequency", &out_f)] {
        let output = run(&[
            "stylize",
            content.to_str().unwrap(),
            style.to_str().unwrap(),
            "-o",
            path.to_str().unwrap(),
            "--method",
            "adain",
            "--domain",
            domain,
        ]);
        assert_eq!(code(&output), 0);
    }
    let a = read_fmap(&out_s).unwrap();
    let b = read_fmap(&out_f).unwrap();
    assert!(max_abs_diff(&a, &b) < 1e-6);
}

#[test]
fn stylize_report_is_written_and_schema_valid() {
    let dir = tempfile::tempdir().unwrap();
    let (content, style) = demo_inputs(dir.path());
    let out = dir.path().join("out.png");
    let report = dir.path().join("report.json");
    let output = run(&[
        "stylize",
        content.to_str().unwrap(),
        style.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--phase-replace",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["version"], 1);
    assert!(value["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "domain_equivalence_wct" && c["passed"] == true));
    // stylize reports carry stage timings
    assert!(value["timings"]["apply_frequency"].is_number());
}

#[test]
fn verify_default_passes_and_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    let o1 = run(&["verify", "--report", r1.to_str().unwrap()]);
    let o2 = run(&["verify", "--report", r2.to_str().unwrap()]);
    assert_eq!(code(&o1), 0, "{o1:?}");
    assert_eq!(code(&o2), 0);
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "verify reports are not byte-identical");

    // schema: version/seed/checks/timings with the documented check fields
    let value: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(value["version"], 1);
    assert_eq!(value["seed"], 42);
    let checks = value["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 16);
    for c in checks {
        assert!(c["name"].is_string());
        assert!(c["residual"].is_number());
        assert!(c["tolerance"].is_number());
        assert!(c["passed"].is_boolean());
        assert!(c["detail"].is_string());
    }
    assert!(value["timings"].as_object().unwrap().is_empty());

    // stdout carries one line per check
    let stdout = String::from_utf8(o1.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.contains("PASS")).count(), 16);
}

#[test]
fn verify_seed_changes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    assert_eq!(code(&run(&["verify", "--report", r1.to_str().unwrap()])), 0);
    assert_eq!(
        code(&run(&[
            "verify",
            "--seed",
            "7",
            "--report",
            r2.to_str().unwrap()
        ])),
        0
    );
    assert_ne!(
        std::fs::read(&r1).unwrap(),
        std::fs::read(&r2).unwrap(),
        "different seeds should measure different instances"
    );
}

#[test]
fn verify_fault_injection_exits_one_and_names_the_failure() {
    let output = run(&["verify", "--inject-fault"]);
    assert_eq!(code(&output), 1);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn verify_on_user_images_works() {
    let dir = tempfile::tempdir().unwrap();
    let (content, style) = demo_inputs(dir.path());
    let output = run(&[
        "verify",
        "--content",
        content.to_str().unwrap(),
        "--style",
        style.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    // big enough that the channel-parallel transform path actually engages
    let mut rng = rng_from_seed(1004);
    let content_map = demo_content_image(80, 80, &mut rng);
    let style_map = demo_style_image(80, 80, &mut rng);
    let content = dir.path().join("content80.fmap");
    let style = dir.path().join("style80.fmap");
    write_fmap(&content_map, &content).unwrap();
    write_fmap(&style_map, &style).unwrap();
    let out1 = dir.path().join("t1.fmap");
    let out4 = dir.path().join("t4.fmap");
    for (threads, path) in [("1", &out1), ("4", &out4)] {
        let output = fst()
            .env("FST_THREADS", threads)
            .args([
                "stylize",
                content.to_str().unwrap(),
                style.to_str().unwrap(),
                "-o",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(code(&output), 0);
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out4).unwrap(),
        "outputs must be identical across thread counts"
    );
}

#[test]
fn malformed_thread_cap_is_rejected() {
    let output = fst()
        .env("FST_THREADS", "many")
        .args(["verify"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 2);
}

#[test]
fn io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.fmap");
    // missing input
    let output = run(&[
        "stylize",
        dir.path().join("nope.fmap").to_str().unwrap(),
        dir.path().join("nope.fmap").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 2);

    // corrupt magic
    let bad = dir.path().join("bad.fmap");
    std::fs::write(&bad, b"FMAQ0000000000000000").unwrap();
    let output = run(&[
        "stylize",
        bad.to_str().unwrap(),
        bad.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 2);
}

#[test]
fn numerical_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // constant content: AdaIN cannot normalize a zero-variance channel
    let flat = FeatureMap::constant(3, 16, 16, 128.0).unwrap();
    let flat_path = dir.path().join("flat.fmap");
    write_fmap(&flat, &flat_path).unwrap();
    let (_, style) = demo_inputs(dir.path());
    let output = run(&[
        "stylize",
        flat_path.to_str().unwrap(),
        style.to_str().unwrap(),
        "-o",
        dir.path().join("out.fmap").to_str().unwrap(),
        "--method",
        "adain",
    ]);
    assert_eq!(code(&output), 3, "{output:?}");
}

#[test]
fn conflicting_stylization_knobs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (content, style) = demo_inputs(dir.path());
    let output = run(&[
        "stylize",
        content.to_str().unwrap(),
        style.to_str().unwrap(),
        "-o",
        dir.path().join("out.fmap").to_str().unwrap(),
        "--fc-sigma",
        "0.05",
        "--blend-alpha",
        "0.5",
    ]);
    assert_eq!(code(&output), 2);
}

#[test]
fn png_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(1001);
    let content = demo_content_image(20, 20, &mut rng);
    let style = demo_style_image(20, 20, &mut rng);
    let c_png = dir.path().join("content.png");
    let s_png = dir.path().join("style.png");
    write_png(&content, &c_png).unwrap();
    write_png(&style, &s_png).unwrap();
    // demo images are integer-valued only after quantization; reading back
    // what was written must reproduce the quantized tensor exactly
    let reread = read_input(&c_png).unwrap();
    assert_eq!(reread.shape(), content.shape());
    for (a, b) in reread.data().iter().zip(content.data()) {
        assert!((a - b.clamp(0.0, 255.0).round_ties_even()).abs() == 0.0);
    }

    let out = dir.path().join("out.png");
    let output = run(&[
        "stylize",
        c_png.to_str().unwrap(),
        s_png.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--phase-replace",
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    let stylized = read_input(&out).unwrap();
    assert_eq!(stylized.shape(), (3, 20, 20));
}

#[test]
fn spectrum_swap_phase_follows_the_phase_donor() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(1002);
    let a = demo_content_image(32, 32, &mut rng);
    let b = demo_content_image(32, 32, &mut rng);
    let a_path = dir.path().join("a.fmap");
    let b_path = dir.path().join("b.fmap");
    write_fmap(&a, &a_path).unwrap();
    write_fmap(&b, &b_path).unwrap();

    let out = dir.path().join("swapped.fmap");
    let output = run(&[
        "spectrum",
        a_path.to_str().unwrap(),
        "--donor",
        b_path.to_str().unwrap(),
        "--swap",
        "phase",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    let swapped = read_fmap(&out).unwrap();

    // the result shares spatial structure with the phase donor (b), not with
    // the amplitude donor (a)
    let cfg = SsimConfig::for_8bit();
    let with_phase_donor = ssim(&swapped, &b, &cfg).unwrap();
    let with_amplitude_donor = ssim(&swapped, &a, &cfg).unwrap();
    assert!(
        with_phase_donor > with_amplitude_donor,
        "phase {with_phase_donor} vs amplitude {with_amplitude_donor}"
    );
}

#[test]
fn spectrum_swap_amplitude_keeps_the_donor_gram_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(1003);
    let a = demo_content_image(24, 24, &mut rng);
    let b = demo_style_image(24, 24, &mut rng);
    let a_path = dir.path().join("a.fmap");
    let b_path = dir.path().join("b.fmap");
    write_fmap(&a, &a_path).unwrap();
    write_fmap(&b, &b_path).unwrap();

    let out = dir.path().join("swapped.fmap");
    let output = run(&[
        "spectrum",
        a_path.to_str().unwrap(),
        "--donor",
        b_path.to_str().unwrap(),
        "--swap",
        "amplitude",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0);
    let swapped = read_fmap(&out).unwrap();
    let g_out = spectral_gram(&dft(&swapped)).unwrap();
    let g_donor = spectral_gram(&dft(&b)).unwrap();
    for k in 0..3 {
        let rel = (g_out.get(k, k) - g_donor.get(k, k)).abs() / g_donor.get(k, k);
        assert!(rel < 1e-6, "channel {k}: {rel}");
    }
}

#[test]
fn spectrum_visualization_of_constant_input_is_a_single_bright_pixel() {
    let dir = tempfile::tempdir().unwrap();
    let flat = FeatureMap::constant(1, 16, 16, 200.0).unwrap();
    let flat_path = dir.path().join("flat.fmap");
    write_fmap(&flat, &flat_path).unwrap();
    let prefix = dir.path().join("viz");
    let output = run(&[
        "spectrum",
        flat_path.to_str().unwrap(),
        "--out-prefix",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    let amp = read_input(&dir.path().join("viz-amplitude.png")).unwrap();
    assert_eq!(amp.shape(), (1, 16, 16));
    // zero frequency sits at (8, 8) after centering
    assert_eq!(amp.get(0, 8, 8), 255.0);
    let bright: usize = amp.data().iter().filter(|&&v| v > 0.0).count();
    assert_eq!(bright, 1, "only the DC bin should light up");
    assert!(dir.path().join("viz-phase.png").exists());
}
