//! SSIM, verification reporting and the identity-check suite.
//!
//! [`run_verification_suite`] executes every invariant the library is built
//! on as a named check against a user-supplied pair plus seeded synthetic
//! tensors, and returns a structured [`VerificationReport`]. Check names are
//! listed in [`SUITE_CHECKS`]; the suite is deterministic for a fixed seed.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::psd_rank;
use crate::matrix::Matrix;
use crate::spectral::{
    center_shift, dft, idft, spectral_content_loss, spectral_gram, Spectrum,
};
use crate::stylize::{
    apply_frequency, apply_spatial, build_adain, build_gram_opt, build_optimal_wct, build_wct,
    frequency_combine, phase_replace, verify_phase_preservation, FrequencyWeight, Method,
    StyleTransform,
};
use crate::synth::{duplicate_channel, rng_from_seed, structured_pair};
use crate::tensor::{channel_stats, content_loss, gram_matrix, ChannelStats, FeatureMap};
use crate::util::KahanSum;
use crate::DEFAULT_EIG_CUTOFF;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;

/// SSIM configuration. The 11x11 Gaussian window (sigma 1.5) and the
/// stabilizing constants k1 = 0.01, k2 = 0.03 are the standard defaults;
/// `dynamic_range` is 255 for 8-bit images or max - min for raw tensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimConfig {
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
    /// Convert 3-channel inputs to BT.601 luma before comparison. When false,
    /// the score is the mean of per-channel SSIMs instead.
    pub use_luma: bool,
}

impl SsimConfig {
    pub fn for_8bit() -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 255.0,
            use_luma: true,
        }
    }

    pub fn for_range(dynamic_range: f64) -> Self {
        Self {
            dynamic_range,
            ..Self::for_8bit()
        }
    }
}

/// Normalized 11x11 Gaussian window; weights sum to 1.
pub fn ssim_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as isize;
    let mut w = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    let mut total = 0.0;
    for y in -half..=half {
        for x in -half..=half {
            let g = (-((y * y + x * x) as f64) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
            w.push(g);
            total += g;
        }
    }
    for v in &mut w {
        *v /= total;
    }
    w
}

fn luma_plane(f: &FeatureMap) -> Vec<f64> {
    let plane = f.plane_len();
    let (r, g, b) = (f.channel(0), f.channel(1), f.channel(2));
    (0..plane)
        .map(|i| 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i])
        .collect()
}

fn ssim_plane(a: &[f64], b: &[f64], height: usize, width: usize, cfg: &SsimConfig) -> f64 {
    let window = ssim_window();
    let c1 = (cfg.k1 * cfg.dynamic_range).powi(2);
    let c2 = (cfg.k2 * cfg.dynamic_range).powi(2);
    let mut acc = KahanSum::new();
    let mut positions = 0usize;
    for y0 in 0..=(height - SSIM_WINDOW) {
        for x0 in 0..=(width - SSIM_WINDOW) {
            let mut mu_a = 0.0;
            let mut mu_b = 0.0;
            let mut aa = 0.0;
            let mut bb = 0.0;
            let mut ab = 0.0;
            let mut wi = 0;
            for dy in 0..SSIM_WINDOW {
                let row = (y0 + dy) * width + x0;
                for dx in 0..SSIM_WINDOW {
                    let w = window[wi];
                    wi += 1;
                    let va = a[row + dx];
                    let vb = b[row + dx];
                    mu_a += w * va;
                    mu_b += w * vb;
                    aa += w * va * va;
                    bb += w * vb * vb;
                    ab += w * va * vb;
                }
            }
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            let value = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            acc.add(value);
            positions += 1;
        }
    }
    acc.value() / positions as f64
}

/// Mean local SSIM over all valid window positions (no padding).
///
/// Inputs must share an identical shape with 1 or 3 channels; 3-channel
/// inputs are compared on luma (or per channel, see [`SsimConfig`]).
pub fn ssim(a: &FeatureMap, b: &FeatureMap, cfg: &SsimConfig) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "ssim requires identical shapes, got {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (c, h, w) = a.shape();
    if c != 1 && c != 3 {
        return Err(Error::ShapeMismatch(format!(
            "ssim supports 1 or 3 channels, got {c}"
        )));
    }
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::TooSmall(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {h}x{w}"
        )));
    }
    if c == 1 {
        return Ok(ssim_plane(a.channel(0), b.channel(0), h, w, cfg));
    }
    if cfg.use_luma {
        let la = luma_plane(a);
        let lb = luma_plane(b);
        Ok(ssim_plane(&la, &lb, h, w, cfg))
    } else {
        let mut total = 0.0;
        for k in 0..c {
            total += ssim_plane(a.channel(k), b.channel(k), h, w, cfg);
        }
        Ok(total / c as f64)
    }
}

/// One named identity check: passed if and only if `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

/// Wall-clock measurement of one pipeline stage.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingEntry {
    pub stage: String,
    pub seconds: f64,
}

/// Structured record of identity checks and stage timings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    entries: Vec<CheckEntry>,
    timings: Vec<TimingEntry>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_check(
        &mut self,
        name: &'static str,
        residual: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) {
        self.entries.push(CheckEntry {
            name,
            residual,
            tolerance,
            passed: residual <= tolerance,
            detail: detail.into(),
        });
    }

    /// Records an already-measured stage duration.
    pub fn push_timing(&mut self, stage: impl Into<String>, seconds: f64) {
        self.timings.push(TimingEntry {
            stage: stage.into(),
            seconds,
        });
    }

    pub fn entries(&self) -> &[CheckEntry] {
        &self.entries
    }

    pub fn timings(&self) -> &[TimingEntry] {
        &self.timings
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failed(&self) -> Vec<&CheckEntry> {
        self.entries.iter().filter(|e| !e.passed).collect()
    }
}

/// Runs `thunk`, recording its wall-clock duration in the report. Repeated
/// probes accumulate as separate entries.
pub fn timing_probe<T>(
    report: &mut VerificationReport,
    stage: &str,
    thunk: impl FnOnce() -> T,
) -> T {
    let start = Instant::now();
    let result = thunk();
    report.push_timing(stage, start.elapsed().as_secs_f64());
    result
}

/// Every check the suite emits, in emission order. Each name corresponds to
/// one invariant of the library's construction.
pub const SUITE_CHECKS: [&str; 16] = [
    "parseval",
    "domain_equivalence_adain",
    "domain_equivalence_wct",
    "domain_equivalence_optimal_wct",
    "domain_equivalence_gram_opt",
    "spectral_content_loss_identity",
    "spectral_gram_identity",
    "adain_phase_preservation",
    "wct_phase_disturbance",
    "phase_replacement_loss_reduction",
    "phase_replacement_amplitude_preservation",
    "mean_alignment",
    "covariance_alignment_wct",
    "covariance_alignment_optimal_wct",
    "optimal_wct_content_loss_dominance",
    "frequency_combination_endpoints",
];

const TINY: f64 = 1e-300;

struct Prepared {
    label: String,
    content: FeatureMap,
    stats_c: ChannelStats,
    stats_s: ChannelStats,
    full_rank: bool,
    rank: usize,
    spec_c: Spectrum,
    spec_s: Spectrum,
    /// Built transforms per method; `Err` detail kept for skip notes.
    transforms: Vec<(Method, std::result::Result<StyleTransform, String>)>,
}

fn prepare(
    label: String,
    content: FeatureMap,
    style: FeatureMap,
    inject_fault: bool,
) -> Prepared {
    let stats_c = channel_stats(&content);
    let stats_s = channel_stats(&style);
    let channels = content.channels();
    let rank = psd_rank(&stats_c.covariance, DEFAULT_EIG_CUTOFF).unwrap_or(0);
    let spec_c = dft(&content);
    let spec_s = dft(&style);

    let mut transforms = Vec::new();
    for method in Method::ALL {
        let built = match method {
            Method::AdaIn => build_adain(&stats_c, &stats_s),
            Method::Wct => build_wct(&stats_c, &stats_s),
            Method::OptimalWct => build_optimal_wct(&stats_c, &stats_s),
            Method::GramOpt => {
                build_gram_opt(&content, &style, 2000, 1e-10).map(|r| r.transform)
            }
        };
        let built = built.map(|xf| {
            if inject_fault {
                perturb_transform(&xf)
            } else {
                xf
            }
        });
        transforms.push((method, built.map_err(|e| e.to_string())));
    }

    Prepared {
        label,
        content,
        stats_c,
        stats_s,
        full_rank: rank == channels,
        rank,
        spec_c,
        spec_s,
        transforms,
    }
}

/// Fault-injection hook for harness self-tests: nudges one transform entry so
/// semantic checks must fail.
fn perturb_transform(xf: &StyleTransform) -> StyleTransform {
    let c = xf.channels();
    let mut t = xf.matrix().clone();
    t.set(0, c - 1, t.get(0, c - 1) + 0.05);
    StyleTransform::from_parts(t, xf.mu_c().to_vec(), xf.mu_s().to_vec(), xf.method())
}

fn transform_of(
    p: &Prepared,
    method: Method,
) -> std::result::Result<&StyleTransform, &str> {
    p.transforms
        .iter()
        .find(|(m, _)| *m == method)
        .map(|(_, r)| r.as_ref().map_err(|e| e.as_str()))
        .expect("all methods prepared")
}

/// Tracks the worst residual across instances plus a human-readable trail.
struct Worst {
    residual: f64,
    worst_at: String,
    notes: Vec<String>,
    measured: bool,
}

impl Worst {
    fn new() -> Self {
        Self {
            residual: 0.0,
            worst_at: String::new(),
            notes: Vec::new(),
            measured: false,
        }
    }

    fn update(&mut self, residual: f64, label: &str, note: &str) {
        if !self.measured || residual > self.residual {
            self.residual = residual;
            self.worst_at = if note.is_empty() {
                format!("worst at {label}")
            } else {
                format!("worst at {label}: {note}")
            };
        }
        self.measured = true;
    }

    /// Annotation that survives regardless of which instance was worst.
    fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    fn skip(&mut self, label: &str, why: &str) {
        self.notes.push(format!("skipped {label}: {why}"));
    }

    fn push(self, report: &mut VerificationReport, name: &'static str, tolerance: f64) {
        let residual = if self.measured {
            self.residual
        } else {
            f64::INFINITY
        };
        let mut detail = if self.measured {
            self.worst_at
        } else {
            "no instance could be measured".to_string()
        };
        for note in self.notes {
            detail.push_str("; ");
            detail.push_str(&note);
        }
        report.push_check(name, residual, tolerance, detail);
    }
}

fn relative_diff(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(TINY)
}

fn max_abs_diff(a: &FeatureMap, b: &FeatureMap) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn channel_means(f: &FeatureMap) -> Vec<f64> {
    let n = f.plane_len() as f64;
    (0..f.channels())
        .map(|k| {
            let mut acc = KahanSum::new();
            for &v in f.channel(k) {
                acc.add(v);
            }
            acc.value() / n
        })
        .collect()
}

/// Runs every identity check on the given pair plus seeded synthetic tensors.
/// Failures are report entries, never exceptions; output is deterministic for
/// a fixed seed.
pub fn run_verification_suite(
    f_c: &FeatureMap,
    f_s: &FeatureMap,
    seed: u64,
) -> VerificationReport {
    run_verification_suite_with_fault(f_c, f_s, seed, false)
}

/// Same as [`run_verification_suite`] with an optional injected transform
/// fault, used to self-test the harness (a healthy suite must go red).
pub fn run_verification_suite_with_fault(
    f_c: &FeatureMap,
    f_s: &FeatureMap,
    seed: u64,
    inject_fault: bool,
) -> VerificationReport {
    let mut rng = rng_from_seed(seed);
    let mut instances: Vec<Prepared> = Vec::new();

    if f_c.channels() == f_s.channels() {
        instances.push(prepare(
            "input".to_string(),
            f_c.clone(),
            f_s.clone(),
            inject_fault,
        ));
    }
    for &(c, h, w) in &[(1usize, 12usize, 16usize), (2, 16, 16), (3, 16, 12), (3, 8, 8), (8, 9, 7)] {
        let (content, style) = structured_pair(c, h, w, &mut rng);
        instances.push(prepare(
            format!("synthetic-c{c}-{h}x{w}"),
            content,
            style,
            inject_fault,
        ));
    }
    // Rank-deficient content: duplicated channel.
    {
        let (content, style) = structured_pair(3, 16, 16, &mut rng);
        instances.push(prepare(
            "synthetic-degenerate-c3-16x16".to_string(),
            duplicate_channel(&content, 1),
            style,
            inject_fault,
        ));
    }

    let mut report = VerificationReport::new();

    check_parseval(&instances, &mut report);
    for method in Method::ALL {
        check_domain_equivalence(&instances, method, &mut report);
    }
    check_spectral_content_loss_identity(&instances, &mut report);
    check_spectral_gram_identity(&instances, &mut report);
    check_adain_phase_preservation(&instances, &mut report);
    check_wct_phase_disturbance(&instances, &mut report);
    check_phase_replacement(&instances, &mut report);
    check_mean_alignment(&instances, &mut report);
    check_covariance_alignment(&instances, Method::Wct, &mut report);
    check_covariance_alignment(&instances, Method::OptimalWct, &mut report);
    check_dominance(&instances, &mut report);
    check_fc_endpoints(&instances, &mut report);

    report
}

fn check_parseval(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        let spatial: f64 = {
            let mut acc = KahanSum::new();
            for &v in p.content.data() {
                acc.add(v * v);
            }
            acc.value()
        };
        let spectral: f64 = {
            let mut acc = KahanSum::new();
            for z in p.spec_c.data() {
                acc.add(z.norm_sqr());
            }
            acc.value() / p.spec_c.plane_len() as f64
        };
        worst.update(
            relative_diff(spectral, spatial),
            &p.label,
            &format!("energy {spatial:.6e}"),
        );
    }
    worst.push(report, "parseval", 1e-9);
}

fn check_domain_equivalence(
    instances: &[Prepared],
    method: Method,
    report: &mut VerificationReport,
) {
    let name: &'static str = match method {
        Method::AdaIn => "domain_equivalence_adain",
        Method::Wct => "domain_equivalence_wct",
        Method::OptimalWct => "domain_equivalence_optimal_wct",
        Method::GramOpt => "domain_equivalence_gram_opt",
    };
    let mut worst = Worst::new();
    for p in instances {
        let xf = match transform_of(p, method) {
            Ok(xf) => xf,
            Err(e) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let spatial = match apply_spatial(&p.content, xf) {
            Ok(f) => f,
            Err(e) => {
                worst.update(f64::INFINITY, &p.label, &e.to_string());
                continue;
            }
        };
        let freq = apply_frequency(&p.spec_c, &p.spec_s, xf).and_then(|s| idft(&s));
        match freq {
            Ok(f) => worst.update(max_abs_diff(&spatial, &f), &p.label, ""),
            Err(e) => worst.update(f64::INFINITY, &p.label, &e.to_string()),
        }
    }
    worst.push(report, name, 1e-6);
}

fn check_spectral_content_loss_identity(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        let xf = match transform_of(p, Method::Wct) {
            Ok(xf) => xf,
            Err(e) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let stylized = match apply_spatial(&p.content, xf) {
            Ok(f) => f,
            Err(e) => {
                worst.update(f64::INFINITY, &p.label, &e.to_string());
                continue;
            }
        };
        let spatial = content_loss(&stylized, &p.content).expect("shapes match");
        let spectral =
            spectral_content_loss(&dft(&stylized), &p.spec_c).expect("shapes match");
        worst.update(
            relative_diff(spectral, spatial),
            &p.label,
            &format!("loss {spatial:.6e}"),
        );
    }
    worst.push(report, "spectral_content_loss_identity", 1e-6);
}

fn check_spectral_gram_identity(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        let spatial = gram_matrix(&p.content);
        let spectral = spectral_gram(&p.spec_c).expect("natural layout");
        let diff = spectral.sub(&spatial).frobenius_norm();
        worst.update(
            diff / spatial.frobenius_norm().max(TINY),
            &p.label,
            "",
        );
    }
    worst.push(report, "spectral_gram_identity", 1e-6);
}

fn check_adain_phase_preservation(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        let xf = match transform_of(p, Method::AdaIn) {
            Ok(xf) => xf,
            Err(e) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let dev = verify_phase_preservation(xf, &p.spec_c);
        worst.update(
            dev.max,
            &p.label,
            &format!("{} components", dev.measured_components),
        );
    }
    worst.push(report, "adain_phase_preservation", 1e-9);
}

fn check_wct_phase_disturbance(instances: &[Prepared], report: &mut VerificationReport) {
    // Generic channel-mixing transforms must disturb phases; the residual is
    // the shortfall below the expected minimum disturbance.
    const EXPECTED_MIN: f64 = 1e-3;
    let mut worst = Worst::new();
    for p in instances {
        if p.content.channels() < 2 {
            continue; // scalar transforms legitimately preserve phase
        }
        let xf = match transform_of(p, Method::Wct) {
            Ok(xf) => xf,
            Err(e) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let dev = verify_phase_preservation(xf, &p.spec_c);
        worst.update(
            (EXPECTED_MIN - dev.max).max(0.0),
            &p.label,
            &format!("measured max deviation {:.6e}", dev.max),
        );
    }
    worst.push(report, "wct_phase_disturbance", 0.0);
}

fn check_phase_replacement(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst_loss = Worst::new();
    let mut worst_amp = Worst::new();
    for p in instances {
        let xf = match transform_of(p, Method::Wct) {
            Ok(xf) => xf,
            Err(e) => {
                worst_loss.skip(&p.label, e);
                worst_amp.skip(&p.label, e);
                continue;
            }
        };
        let spec_cs = match apply_frequency(&p.spec_c, &p.spec_s, xf) {
            Ok(s) => s,
            Err(e) => {
                worst_loss.update(f64::INFINITY, &p.label, &e.to_string());
                worst_amp.update(f64::INFINITY, &p.label, &e.to_string());
                continue;
            }
        };
        let replaced = phase_replace(&spec_cs, &p.spec_c).expect("same shape and layout");

        let loss_before = spectral_content_loss(&spec_cs, &p.spec_c).expect("same shape");
        let loss_after = spectral_content_loss(&replaced, &p.spec_c).expect("same shape");
        let violation = (loss_after - loss_before) / loss_before.abs().max(TINY);
        worst_loss.update(
            violation.max(0.0),
            &p.label,
            &format!("loss {loss_before:.6e} -> {loss_after:.6e}"),
        );

        let g_before = spectral_gram(&spec_cs).expect("natural layout");
        let g_after = spectral_gram(&replaced).expect("natural layout");
        let mut diag = 0.0f64;
        for k in 0..g_before.rows() {
            diag = diag.max(relative_diff(g_after.get(k, k), g_before.get(k, k)));
        }
        worst_amp.update(diag, &p.label, "");
    }
    worst_loss.push(report, "phase_replacement_loss_reduction", 1e-9);
    worst_amp.push(report, "phase_replacement_amplitude_preservation", 1e-9);
}

fn check_mean_alignment(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        for method in Method::ALL {
            let xf = match transform_of(p, method) {
                Ok(xf) => xf,
                Err(e) => {
                    worst.skip(&p.label, e);
                    continue;
                }
            };
            let out = match apply_spatial(&p.content, xf) {
                Ok(f) => f,
                Err(e) => {
                    worst.update(f64::INFINITY, &p.label, &e.to_string());
                    continue;
                }
            };
            let means = channel_means(&out);
            let mut residual = 0.0f64;
            for (m, target) in means.iter().zip(xf.mu_s()) {
                residual = residual.max((m - target).abs());
            }
            worst.update(residual, &p.label, method.name());
        }
    }
    worst.push(report, "mean_alignment", 1e-9);
}

fn check_covariance_alignment(
    instances: &[Prepared],
    method: Method,
    report: &mut VerificationReport,
) {
    let name: &'static str = match method {
        Method::Wct => "covariance_alignment_wct",
        Method::OptimalWct => "covariance_alignment_optimal_wct",
        _ => unreachable!("covariance alignment applies to the WCT family"),
    };
    let mut worst = Worst::new();
    for p in instances {
        let xf = match transform_of(p, method) {
            Ok(xf) => xf,
            Err(e) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let out = match apply_spatial(&p.content, xf) {
            Ok(f) => f,
            Err(e) => {
                worst.update(f64::INFINITY, &p.label, &e.to_string());
                continue;
            }
        };
        let measured = channel_stats(&out).covariance.as_matrix();
        let target: Matrix = if p.full_rank {
            p.stats_s.covariance.as_matrix()
        } else {
            // Exact style alignment is unattainable after eigenvalue
            // truncation; compare against the achievable covariance instead.
            worst.note(format!(
                "truncated-rank ({}/{}) at {}: projector-space comparison",
                p.rank,
                p.content.channels(),
                p.label
            ));
            let t = xf.matrix();
            t.mul(&p.stats_c.covariance.as_matrix()).mul(&t.transpose())
        };
        let residual =
            target.sub(&measured).frobenius_norm() / target.frobenius_norm().max(TINY);
        worst.update(residual, &p.label, "");
    }
    worst.push(report, name, 1e-6);
}

fn check_dominance(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        if !p.full_rank {
            continue; // the closed-form optimality argument needs full rank
        }
        let (wct, optimal) = match (
            transform_of(p, Method::Wct),
            transform_of(p, Method::OptimalWct),
        ) {
            (Ok(w), Ok(o)) => (w, o),
            (Err(e), _) | (_, Err(e)) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let loss_of = |xf: &StyleTransform| -> f64 {
            apply_spatial(&p.content, xf)
                .and_then(|out| content_loss(&out, &p.content))
                .unwrap_or(f64::INFINITY)
        };
        let l_wct = loss_of(wct);
        let l_opt = loss_of(optimal);
        worst.update(
            (l_opt - l_wct).max(0.0),
            &p.label,
            &format!("optimal {l_opt:.6e} vs wct {l_wct:.6e}"),
        );
    }
    worst.push(report, "optimal_wct_content_loss_dominance", 1e-9);
}

fn check_fc_endpoints(instances: &[Prepared], report: &mut VerificationReport) {
    let mut worst = Worst::new();
    for p in instances {
        let xf = match transform_of(p, Method::Wct) {
            Ok(xf) => xf,
            Err(e) => {
                worst.skip(&p.label, e);
                continue;
            }
        };
        let spec_cs = match apply_frequency(&p.spec_c, &p.spec_s, xf) {
            Ok(s) => s,
            Err(e) => {
                worst.update(f64::INFINITY, &p.label, &e.to_string());
                continue;
            }
        };
        let cs = center_shift(&spec_cs).expect("natural layout");
        let c = center_shift(&p.spec_c).expect("natural layout");
        let cases = [
            (FrequencyWeight::constant(1.0).unwrap(), &cs),
            (FrequencyWeight::constant(0.0).unwrap(), &c),
            (FrequencyWeight::gaussian(1e9).unwrap(), &cs),
        ];
        // normalized by the peak amplitude so the check is scale invariant
        let peak = cs
            .data()
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut residual = 0.0f64;
        for (w, expected) in cases {
            let out = frequency_combine(&cs, &c, &w).expect("same shape");
            for (a, b) in out.data().iter().zip(expected.data()) {
                residual = residual.max((a - b).norm() / peak);
            }
        }
        worst.update(residual, &p.label, "relative to peak amplitude");
    }
    worst.push(report, "frequency_combination_endpoints", 1e-6);
}
