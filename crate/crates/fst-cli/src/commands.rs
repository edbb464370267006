//! Subcommand implementations and the exit-code contract:
//! 0 success (verify: all checks passed), 1 failed verification checks,
//! 2 i/o or usage errors, 3 numerical failures.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cli::{SpectrumArgs, StylizeArgs, VerifyArgs};
use crate::io::{read_input, write_output, write_png, IoError};
use crate::pipeline::{run_stylize, spectrum_swap, spectrum_visualizations, FcSettings, StylizeOptions};
use crate::report::report_to_json;
use fst_core::metrics::{run_verification_suite_with_fault, timing_probe, VerificationReport};
use fst_core::synth::{demo_content_image, demo_style_image, rng_from_seed};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] IoError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] fst_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub fn cmd_stylize(args: &StylizeArgs) -> Result<(), CliError> {
    if let Some(alpha) = args.blend_alpha {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CliError::Usage(format!(
                "--blend-alpha must be in [0, 1], got {alpha}"
            )));
        }
    }
    if let Some(sigma) = args.fc_sigma {
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(CliError::Usage(format!(
                "--fc-sigma must be positive, got {sigma}"
            )));
        }
    }

    let content = read_input(&args.content)?;
    let style = read_input(&args.style)?;

    if matches!(args.method, crate::cli::MethodArg::Optimal) {
        let stats = fst_core::tensor::channel_stats(&content);
        let rank = fst_core::linalg::psd_rank(&stats.covariance, args.eig_cutoff)?;
        if rank < content.channels() {
            eprintln!(
                "fst: warning: content covariance is rank-deficient ({rank}/{}); \
                 whitening falls back to the truncated pseudo-inverse",
                content.channels()
            );
        }
    }

    let opts = StylizeOptions {
        method: args.method.into(),
        domain: args.domain.into(),
        phase_replace: args.phase_replace,
        fc: args.fc_sigma.map(|sigma| FcSettings {
            sigma,
            raw_index: args.fc_raw_index,
        }),
        blend_alpha: args.blend_alpha,
        eig_cutoff: args.eig_cutoff,
    };

    let outcome = run_stylize(&content, &style, &opts, args.report.is_some())?;
    write_output(&outcome.output, &args.output)?;

    if let (Some(path), Some(report)) = (&args.report, &outcome.report) {
        fs::write(path, report_to_json(report, args.seed, true)).map_err(IoError::from)?;
    }
    Ok(())
}

/// Returns whether every check passed.
pub fn cmd_verify(args: &VerifyArgs) -> Result<bool, CliError> {
    let (content, style) = match (&args.content, &args.style) {
        (Some(c), Some(s)) => (read_input(c)?, read_input(s)?),
        _ => {
            // default demo pair: seeded raw-pixel images
            let mut rng = rng_from_seed(args.seed);
            let content = demo_content_image(24, 24, &mut rng);
            let style = demo_style_image(24, 24, &mut rng);
            (content, style)
        }
    };
    if content.channels() != style.channels() {
        return Err(CliError::Usage(format!(
            "content has {} channels but style has {}",
            content.channels(),
            style.channels()
        )));
    }

    let mut timed = VerificationReport::new();
    let report = timing_probe(&mut timed, "verification_suite", || {
        run_verification_suite_with_fault(&content, &style, args.seed, args.inject_fault)
    });

    for entry in report.entries() {
        println!(
            "{:<42} {}  residual {:.3e} (tolerance {:.1e})",
            entry.name,
            if entry.passed { "PASS" } else { "FAIL" },
            entry.residual,
            entry.tolerance,
        );
        if !entry.passed {
            println!("{:<42}       {}", "", entry.detail);
        }
    }

    if let Some(path) = &args.report {
        // merge the suite timing into the emitted report
        let mut merged = report.clone();
        if args.timings {
            for t in timed.timings() {
                merged.push_timing(&t.stage, t.seconds);
            }
        }
        let json = report_to_json(&merged, args.seed, args.timings);
        fs::write(path, json).map_err(IoError::from)?;
    }

    Ok(report.all_passed())
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let input = read_input(&args.input)?;

    if let (Some(donor_path), Some(kind)) = (&args.donor, args.swap) {
        let output = args.output.clone().ok_or_else(|| {
            CliError::Usage("--swap needs --output for the recombined result".into())
        })?;
        let donor = read_input(donor_path)?;
        let swapped = spectrum_swap(&input, &donor, kind.into())?;
        write_output(&swapped, &output)?;
        return Ok(());
    }

    let prefix: PathBuf = args
        .out_prefix
        .clone()
        .unwrap_or_else(|| args.input.with_extension(""));
    let (amplitude, phase) = spectrum_visualizations(&input)?;
    let amp_path = sibling(&prefix, "amplitude");
    let phase_path = sibling(&prefix, "phase");
    write_png(&amplitude, &amp_path)?;
    write_png(&phase, &phase_path)?;
    Ok(())
}

fn sibling(prefix: &Path, tag: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spectrum".to_string());
    name.push('-');
    name.push_str(tag);
    name.push_str(".png");
    prefix.with_file_name(name)
}
