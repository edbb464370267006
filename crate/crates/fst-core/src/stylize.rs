//! Style-transform construction and application in both domains.
//!
//! Every method here produces the same object: a `C x C` matrix `T` plus the
//! two mean vectors, applied to a content map as `T * (pixel - mu_c) + mu_s`.
//! The frequency-domain form multiplies every non-zero frequency component by
//! the same `T` and replaces the zero-frequency component with the re-scaled
//! zero-frequency component of the style spectrum, which is exactly
//! `Hc*Wc * mu_s`. The two routes agree to floating-point accuracy and the
//! verification suite checks that they do.
//!
//! On top of the transforms sit two spectral manipulations: phase replacement
//! (keep stylized amplitudes, take content phases) and frequency combination
//! (a per-frequency convex blend with a Gaussian radial weight).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inv_sqrt_psd, sqrt_psd, SymmetricMatrix, DEFAULT_EIG_CUTOFF};
use crate::matrix::Matrix;
use crate::spectral::{component_phase, Spectrum, PHASE_FREE_AMPLITUDE};
use crate::tensor::{channel_stats, ChannelStats, FeatureMap};
use crate::util::wrapped_angle_distance;

/// Content channel variances at or below this cannot be normalized against.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Components with amplitude below this are excluded from phase measurements.
pub const PHASE_MEASUREMENT_FLOOR: f64 = 1e-9;

/// Which construction produced a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AdaIn,
    Wct,
    OptimalWct,
    GramOpt,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::AdaIn,
        Method::Wct,
        Method::OptimalWct,
        Method::GramOpt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::AdaIn => "adain",
            Method::Wct => "wct",
            Method::OptimalWct => "optimal_wct",
            Method::GramOpt => "gram_opt",
        }
    }
}

/// A `C x C` transform matrix plus the content and style mean vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleTransform {
    t: Matrix,
    mu_c: Vec<f64>,
    mu_s: Vec<f64>,
    method: Method,
}

impl StyleTransform {
    pub(crate) fn from_parts(t: Matrix, mu_c: Vec<f64>, mu_s: Vec<f64>, method: Method) -> Self {
        debug_assert!(t.is_square() && t.rows() == mu_c.len() && mu_c.len() == mu_s.len());
        Self {
            t,
            mu_c,
            mu_s,
            method,
        }
    }

    pub fn channels(&self) -> usize {
        self.mu_c.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    pub fn mu_c(&self) -> &[f64] {
        &self.mu_c
    }

    pub fn mu_s(&self) -> &[f64] {
        &self.mu_s
    }

    pub fn method(&self) -> Method {
        self.method
    }
}

fn check_channel_agreement(stats_c: &ChannelStats, stats_s: &ChannelStats) -> Result<usize> {
    if stats_c.channels() != stats_s.channels() {
        return Err(Error::ChannelMismatch {
            expected: stats_c.channels(),
            got: stats_s.channels(),
        });
    }
    Ok(stats_c.channels())
}

/// Per-channel mean/variance alignment: `T = diag(sqrt(var_s / var_c))`.
///
/// The diagonal uses the standard-deviation ratio, which is what makes the
/// output channel variances equal the style variances.
pub fn build_adain(stats_c: &ChannelStats, stats_s: &ChannelStats) -> Result<StyleTransform> {
    let c = check_channel_agreement(stats_c, stats_s)?;
    let mut diag = Vec::with_capacity(c);
    for k in 0..c {
        let var_c = stats_c.covariance.get(k, k);
        if var_c <= VARIANCE_FLOOR {
            return Err(Error::DegenerateChannel {
                channel: k,
                variance: var_c,
            });
        }
        let var_s = stats_s.covariance.get(k, k).max(0.0);
        diag.push((var_s / var_c).sqrt());
    }
    Ok(StyleTransform::from_parts(
        Matrix::from_diagonal(&diag),
        stats_c.mean.clone(),
        stats_s.mean.clone(),
        Method::AdaIn,
    ))
}

/// Whitening/coloring: `T = (Sigma_s)^{1/2} (Sigma_c)^{-1/2}`.
pub fn build_wct(stats_c: &ChannelStats, stats_s: &ChannelStats) -> Result<StyleTransform> {
    build_wct_with_cutoff(stats_c, stats_s, DEFAULT_EIG_CUTOFF)
}

pub fn build_wct_with_cutoff(
    stats_c: &ChannelStats,
    stats_s: &ChannelStats,
    rel_cutoff: f64,
) -> Result<StyleTransform> {
    check_channel_agreement(stats_c, stats_s)?;
    let color = sqrt_psd(&stats_s.covariance)?;
    let whiten = inv_sqrt_psd(&stats_c.covariance, rel_cutoff)?;
    let t = color.as_matrix().mul(&whiten.as_matrix());
    Ok(StyleTransform::from_parts(
        t,
        stats_c.mean.clone(),
        stats_s.mean.clone(),
        Method::Wct,
    ))
}

/// The closed-form covariance-aligning transform that also minimizes the
/// content loss:
///
/// ```text
/// T = Sigma_c^{-1/2} (Sigma_c^{1/2} Sigma_s Sigma_c^{1/2})^{1/2} Sigma_c^{-1/2}
/// ```
///
/// `T` is symmetric PSD, which is what distinguishes it from the WCT root.
pub fn build_optimal_wct(stats_c: &ChannelStats, stats_s: &ChannelStats) -> Result<StyleTransform> {
    build_optimal_wct_with_cutoff(stats_c, stats_s, DEFAULT_EIG_CUTOFF)
}

pub fn build_optimal_wct_with_cutoff(
    stats_c: &ChannelStats,
    stats_s: &ChannelStats,
    rel_cutoff: f64,
) -> Result<StyleTransform> {
    check_channel_agreement(stats_c, stats_s)?;
    let root_c = sqrt_psd(&stats_c.covariance)?.as_matrix();
    let inv_root_c = inv_sqrt_psd(&stats_c.covariance, rel_cutoff)?.as_matrix();
    let inner = SymmetricMatrix::from_matrix(
        &root_c.mul(&stats_s.covariance.as_matrix()).mul(&root_c),
    )?;
    let mid = sqrt_psd(&inner)?.as_matrix();
    let t = SymmetricMatrix::from_matrix(&inv_root_c.mul(&mid).mul(&inv_root_c))?;
    Ok(StyleTransform::from_parts(
        t.as_matrix(),
        stats_c.mean.clone(),
        stats_s.mean.clone(),
        Method::OptimalWct,
    ))
}

/// Outcome of the Gram-loss optimizer, carrying the final objective value.
#[derive(Debug, Clone)]
pub struct GramOptResult {
    pub transform: StyleTransform,
    /// Final value of `||T Sigma_c T^T - Sigma_s||_F^2`.
    pub objective: f64,
    pub iterations: usize,
    /// True when the line search stalled before reaching the tolerance;
    /// the transform is the best iterate found.
    pub stalled: bool,
}

const GRAM_OPT_STEP_FACTOR: f64 = 1e-2;
const GRAM_OPT_ARMIJO: f64 = 1e-4;
const GRAM_OPT_MAX_HALVINGS: usize = 60;

/// Finds `T` minimizing `||T Sigma_c T^T - Sigma_s||_F^2` by gradient descent
/// from `T = I` with a backtracking line search.
///
/// Terminates when the objective drops below `tol * ||Sigma_s||_F^2` or after
/// `max_iters` iterations. A stalled line search is not an error: the best
/// iterate comes back with the `stalled` flag set.
pub fn build_gram_opt(
    f_c: &FeatureMap,
    f_s: &FeatureMap,
    max_iters: usize,
    tol: f64,
) -> Result<GramOptResult> {
    if f_c.channels() != f_s.channels() {
        return Err(Error::ChannelMismatch {
            expected: f_c.channels(),
            got: f_s.channels(),
        });
    }
    let stats_c = channel_stats(f_c);
    let stats_s = channel_stats(f_s);
    let sigma_c = stats_c.covariance.as_matrix();
    let sigma_s = stats_s.covariance.as_matrix();
    let style_norm = sigma_s.frobenius_norm();
    let target = tol * style_norm * style_norm;

    let objective = |t: &Matrix| -> f64 {
        let r = t.mul(&sigma_c).mul(&t.transpose()).sub(&sigma_s);
        let n = r.frobenius_norm();
        n * n
    };

    let mut t = Matrix::identity(f_c.channels());
    let mut g = objective(&t);
    let mut iterations = 0;
    let mut stalled = false;

    while g > target && iterations < max_iters {
        let t_sigma = t.mul(&sigma_c);
        let r = t_sigma.mul(&t.transpose()).sub(&sigma_s);
        let grad = r.mul(&t_sigma).scaled(4.0);
        let grad_norm = grad.frobenius_norm();
        if grad_norm == 0.0 {
            break; // stationary point
        }
        let mut step = GRAM_OPT_STEP_FACTOR * style_norm.max(f64::MIN_POSITIVE) / grad_norm;
        let mut accepted = false;
        for _ in 0..=GRAM_OPT_MAX_HALVINGS {
            let candidate = t.sub(&grad.scaled(step));
            let g_candidate = objective(&candidate);
            if g_candidate <= g - GRAM_OPT_ARMIJO * step * grad_norm * grad_norm {
                t = candidate;
                g = g_candidate;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted {
            stalled = true;
            break;
        }
    }

    Ok(GramOptResult {
        transform: StyleTransform::from_parts(
            t,
            stats_c.mean,
            stats_s.mean,
            Method::GramOpt,
        ),
        objective: g,
        iterations,
        stalled,
    })
}

/// Applies a transform pixel-wise: `out = T * (pixel - mu_c) + mu_s`.
pub fn apply_spatial(f_c: &FeatureMap, xf: &StyleTransform) -> Result<FeatureMap> {
    if f_c.channels() != xf.channels() {
        return Err(Error::ChannelMismatch {
            expected: xf.channels(),
            got: f_c.channels(),
        });
    }
    let (c, h, w) = f_c.shape();
    let plane = h * w;
    let mut out = vec![0.0; c * plane];
    for k_out in 0..c {
        let dst = &mut out[k_out * plane..(k_out + 1) * plane];
        dst.fill(xf.mu_s[k_out]);
        for k_in in 0..c {
            let coeff = xf.t.get(k_out, k_in);
            if coeff == 0.0 {
                continue;
            }
            let mu = xf.mu_c[k_in];
            for (d, &s) in dst.iter_mut().zip(f_c.channel(k_in)) {
                *d += coeff * (s - mu);
            }
        }
    }
    FeatureMap::new(c, h, w, out)
}

/// Applies a transform in the frequency domain.
///
/// Every component except (0,0) is multiplied by `T`; the zero-frequency
/// component becomes `(Hc*Wc / Hs*Ws) * S_s[0,0]`, i.e. `Hc*Wc * mu_s`.
/// Both spectra must be in natural layout.
pub fn apply_frequency(
    spec_c: &Spectrum,
    spec_s: &Spectrum,
    xf: &StyleTransform,
) -> Result<Spectrum> {
    if spec_c.layout_centered() || spec_s.layout_centered() {
        return Err(Error::LayoutMismatch(
            "apply_frequency expects natural layout".into(),
        ));
    }
    if spec_c.channels() != xf.channels() {
        return Err(Error::ChannelMismatch {
            expected: xf.channels(),
            got: spec_c.channels(),
        });
    }
    if spec_s.channels() != spec_c.channels() {
        return Err(Error::ChannelMismatch {
            expected: spec_c.channels(),
            got: spec_s.channels(),
        });
    }

    let (c, h, w) = spec_c.shape();
    let plane = h * w;
    let mut out = vec![Complex64::new(0.0, 0.0); c * plane];
    for k_out in 0..c {
        let dst = &mut out[k_out * plane..(k_out + 1) * plane];
        for k_in in 0..c {
            let coeff = xf.t.get(k_out, k_in);
            if coeff == 0.0 {
                continue;
            }
            for (d, &s) in dst.iter_mut().zip(spec_c.channel(k_in)) {
                *d += s * coeff;
            }
        }
    }
    let ratio = (h * w) as f64 / (spec_s.height() * spec_s.width()) as f64;
    for k in 0..c {
        out[k * plane] = spec_s.at(k, 0, 0) * ratio;
    }
    Spectrum::new(c, h, w, false, out)
}

/// Rebuilds a spectrum from the amplitudes of `target` and the phases of
/// `phase_source`. Components whose target amplitude is phase-free stay real.
pub fn phase_replace(target: &Spectrum, phase_source: &Spectrum) -> Result<Spectrum> {
    if target.shape() != phase_source.shape() {
        return Err(Error::ShapeMismatch(format!(
            "phase_replace shapes differ: {:?} vs {:?}",
            target.shape(),
            phase_source.shape()
        )));
    }
    if target.layout_centered() != phase_source.layout_centered() {
        return Err(Error::LayoutMismatch(
            "phase_replace operands use different layouts".into(),
        ));
    }
    let (c, h, w) = target.shape();
    let data = target
        .data()
        .iter()
        .zip(phase_source.data())
        .map(|(&t, &src)| {
            let amplitude = t.norm();
            if amplitude <= PHASE_FREE_AMPLITUDE {
                Complex64::new(amplitude, 0.0)
            } else {
                let phase = component_phase(src);
                Complex64::new(amplitude * phase.cos(), amplitude * phase.sin())
            }
        })
        .collect();
    Spectrum::new(c, h, w, target.layout_centered(), data)
}

/// Frequency-dependent stylization weight `alpha(u, v)` in [0, 1].
///
/// In Gaussian mode the weight is `exp(-(du^2 + dv^2) / sigma)` around the
/// centered zero frequency; offsets are normalized to `[-0.5, 0.5]` per axis
/// so `sigma` is resolution-independent, with a raw-index mode available for
/// fidelity experiments. A constant weight reproduces the plain linear blend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyWeight {
    kind: WeightKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum WeightKind {
    Constant(f64),
    Gaussian { sigma: f64, raw_index: bool },
}

impl FrequencyWeight {
    /// Constant weight; the degenerate mode equal to a spatial linear blend.
    pub fn constant(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "blend alpha must be in [0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            kind: WeightKind::Constant(alpha),
        })
    }

    /// Gaussian radial weight over normalized centered offsets.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::gaussian_mode(sigma, false)
    }

    /// Gaussian weight over raw index offsets.
    pub fn gaussian_raw_index(sigma: f64) -> Result<Self> {
        Self::gaussian_mode(sigma, true)
    }

    fn gaussian_mode(sigma: f64, raw_index: bool) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            kind: WeightKind::Gaussian { sigma, raw_index },
        })
    }

    /// Weight at centered frequency index (u, v) of an H x W grid.
    pub fn alpha(&self, u: usize, v: usize, height: usize, width: usize) -> f64 {
        match self.kind {
            WeightKind::Constant(a) => a,
            WeightKind::Gaussian { sigma, raw_index } => {
                let mut du = u as f64 - (height / 2) as f64;
                let mut dv = v as f64 - (width / 2) as f64;
                if !raw_index {
                    du /= height as f64;
                    dv /= width as f64;
                }
                (-(du * du + dv * dv) / sigma).exp()
            }
        }
    }
}

/// Convex per-frequency blend `alpha * stylized + (1 - alpha) * content`.
/// Both spectra must be in centered layout.
pub fn frequency_combine(
    spec_cs: &Spectrum,
    spec_c: &Spectrum,
    weight: &FrequencyWeight,
) -> Result<Spectrum> {
    if spec_cs.shape() != spec_c.shape() {
        return Err(Error::ShapeMismatch(format!(
            "frequency_combine shapes differ: {:?} vs {:?}",
            spec_cs.shape(),
            spec_c.shape()
        )));
    }
    if !spec_cs.layout_centered() || !spec_c.layout_centered() {
        return Err(Error::LayoutMismatch(
            "frequency_combine expects centered layout".into(),
        ));
    }
    let (c, h, w) = spec_cs.shape();
    let mut data = Vec::with_capacity(c * h * w);
    for k in 0..c {
        for u in 0..h {
            for v in 0..w {
                let a = weight.alpha(u, v, h, w);
                data.push(spec_cs.at(k, u, v) * a + spec_c.at(k, u, v) * (1.0 - a));
            }
        }
    }
    Spectrum::new(c, h, w, true, data)
}

/// Measured phase deviation of a transform on non-zero frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDeviation {
    /// Largest wrapped angular distance, radians.
    pub max: f64,
    /// Mean wrapped angular distance over measured components.
    pub mean: f64,
    /// Number of components with amplitude above the measurement floor.
    pub measured_components: usize,
}

/// Measures how much applying `T` disturbs per-channel phases.
///
/// Diagonal-positive transforms (AdaIN; any scalar positive `T`) preserve
/// phase exactly up to rounding; channel-mixing transforms generally do not.
/// Components at (0,0) or with amplitude at or below
/// [`PHASE_MEASUREMENT_FLOOR`] on either side are excluded.
pub fn verify_phase_preservation(xf: &StyleTransform, spec_c: &Spectrum) -> PhaseDeviation {
    let c = spec_c.channels().min(xf.channels());
    let (_, h, w) = spec_c.shape();
    let zero_frequency = if spec_c.layout_centered() {
        (h / 2, w / 2)
    } else {
        (0, 0)
    };
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for k_out in 0..c {
        for u in 0..h {
            for v in 0..w {
                if (u, v) == zero_frequency {
                    continue;
                }
                let original = spec_c.at(k_out, u, v);
                let mut transformed = Complex64::new(0.0, 0.0);
                for k_in in 0..c {
                    transformed += spec_c.at(k_in, u, v) * xf.t.get(k_out, k_in);
                }
                if original.norm() <= PHASE_MEASUREMENT_FLOOR
                    || transformed.norm() <= PHASE_MEASUREMENT_FLOOR
                {
                    continue;
                }
                let d = wrapped_angle_distance(
                    component_phase(transformed),
                    component_phase(original),
                );
                if d > max {
                    max = d;
                }
                sum += d;
                count += 1;
            }
        }
    }
    PhaseDeviation {
        max,
        mean: if count > 0 { sum / count as f64 } else { 0.0 },
        measured_components: count,
    }
}
