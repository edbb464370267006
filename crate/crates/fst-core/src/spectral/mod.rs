//! Per-channel 2-D DFT, amplitude/phase decomposition and spectral identities.
//!
//! The transform convention is the plain unnormalized forward DFT
//!
//! ```text
//! S[k,u,v] = sum_{h,w} f[k,h,w] * exp(-j*2*pi*(u*h/H + v*w/W))
//! ```
//!
//! so `S[k,0,0] = H*W * mean_k`. The inverse divides by `H*W` once. Arbitrary
//! H and W are supported: power-of-two lengths use the radix-2 path, all
//! others Bluestein; a naive direct-summation DFT exists only as a test
//! oracle behind the `oracle` feature.
//!
//! Phases live in the half-open interval [-pi, pi) and a component with
//! amplitude below `PHASE_FREE_AMPLITUDE` is treated as phase-free (phase 0):
//! `atan2(0, 0)` has no meaning, so the canonical value keeps decomposition
//! total. Tests compare phases through wrapped angular distance, never raw
//! subtraction.

mod fft;

pub use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::parallel::for_each_channel;
use crate::tensor::FeatureMap;
use crate::util::KahanSum;

use fft::{Direction, Fft1d};

/// Inverse transforms whose imaginary residue exceeds this are rejected.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-9;

/// Components with amplitude below this carry no meaningful phase.
pub const PHASE_FREE_AMPLITUDE: f64 = 1e-12;

/// Complex C x H x W spectrum, channel-major then row-major.
///
/// `layout_centered` is false for natural DFT order (zero frequency at
/// (0,0)) and true after [`center_shift`] moved it to (H/2, W/2).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    channels: usize,
    height: usize,
    width: usize,
    layout_centered: bool,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(
        channels: usize,
        height: usize,
        width: usize,
        layout_centered: bool,
        data: Vec<Complex64>,
    ) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::ShapeMismatch(format!(
                "dimensions must be >= 1, got {channels}x{height}x{width}"
            )));
        }
        if data.len() != channels * height * width {
            return Err(Error::ShapeMismatch(format!(
                "spectrum data length {} != {channels}x{height}x{width}",
                data.len()
            )));
        }
        if let Some(idx) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self {
            channels,
            height,
            width,
            layout_centered,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn layout_centered(&self) -> bool {
        self.layout_centered
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn channel(&self, k: usize) -> &[Complex64] {
        let plane = self.plane_len();
        &self.data[k * plane..(k + 1) * plane]
    }

    #[inline]
    pub fn at(&self, k: usize, u: usize, v: usize) -> Complex64 {
        self.data[(k * self.height + u) * self.width + v]
    }

    fn same_shape(&self, other: &Spectrum) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "spectrum shapes differ: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    fn same_layout(&self, other: &Spectrum) -> Result<()> {
        if self.layout_centered != other.layout_centered {
            return Err(Error::LayoutMismatch(
                "operands use different spectrum layouts".into(),
            ));
        }
        Ok(())
    }
}

/// Amplitude/phase form of a spectrum. Amplitude is non-negative everywhere;
/// phase is in [-pi, pi) and zero wherever the amplitude is phase-free.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSpectrum {
    channels: usize,
    height: usize,
    width: usize,
    layout_centered: bool,
    amplitude: Vec<f64>,
    phase: Vec<f64>,
}

impl PolarSpectrum {
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn layout_centered(&self) -> bool {
        self.layout_centered
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    /// Amplitudes as a real tensor (useful for visualization).
    pub fn amplitude_tensor(&self) -> FeatureMap {
        FeatureMap::new(
            self.channels,
            self.height,
            self.width,
            self.amplitude.clone(),
        )
        .expect("amplitudes are finite")
    }

    /// Phases as a real tensor.
    pub fn phase_tensor(&self) -> FeatureMap {
        FeatureMap::new(self.channels, self.height, self.width, self.phase.clone())
            .expect("phases are finite")
    }
}

fn transpose_plane(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Row FFTs, then column FFTs via transpose, per channel.
fn transform_planes(data: &mut [Complex64], height: usize, width: usize, direction: Direction) {
    let row_plan = Fft1d::new(width, direction);
    let col_plan = Fft1d::new(height, direction);
    let plane = height * width;
    for_each_channel(data, plane, |_k, chan| {
        for row in chan.chunks_mut(width) {
            row_plan.process(row);
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); plane];
        transpose_plane(chan, height, width, &mut scratch);
        for col in scratch.chunks_mut(height) {
            col_plan.process(col);
        }
        transpose_plane(&scratch, width, height, chan);
    });
}

/// Per-channel 2-D DFT of a real tensor, in natural layout.
pub fn dft(f: &FeatureMap) -> Spectrum {
    let (c, h, w) = f.shape();
    let mut data: Vec<Complex64> = f.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_planes(&mut data, h, w, Direction::Forward);
    Spectrum {
        channels: c,
        height: h,
        width: w,
        layout_centered: false,
        data,
    }
}

/// Exact inverse of [`dft`]. The imaginary residue of the inverse must stay
/// below [`IMAG_RESIDUE_LIMIT`]; it is discarded. A larger residue means the
/// spectrum did not come from a real tensor and is an error.
pub fn idft(s: &Spectrum) -> Result<FeatureMap> {
    if s.layout_centered {
        return Err(Error::CenteredLayout);
    }
    let (c, h, w) = s.shape();
    let mut data = s.data.clone();
    transform_planes(&mut data, h, w, Direction::Inverse);
    let scale = 1.0 / (h * w) as f64;
    let mut residue: f64 = 0.0;
    let mut out = Vec::with_capacity(data.len());
    for z in &data {
        let im = (z.im * scale).abs();
        if im > residue {
            residue = im;
        }
        out.push(z.re * scale);
    }
    if residue > IMAG_RESIDUE_LIMIT {
        return Err(Error::NonRealResult {
            residue,
            limit: IMAG_RESIDUE_LIMIT,
        });
    }
    FeatureMap::new(c, h, w, out)
}

/// Phase of one complex component under the library conventions.
#[inline]
pub fn component_phase(z: Complex64) -> f64 {
    let amplitude = z.norm();
    if amplitude < PHASE_FREE_AMPLITUDE {
        return 0.0;
    }
    let mut phase = z.im.atan2(z.re);
    if phase >= PI {
        // atan2 returns (-pi, pi]; the canonical range here is [-pi, pi).
        phase = -PI;
    }
    phase
}

/// Splits a spectrum into amplitude and phase.
pub fn decompose(s: &Spectrum) -> PolarSpectrum {
    let mut amplitude = Vec::with_capacity(s.data.len());
    let mut phase = Vec::with_capacity(s.data.len());
    for &z in &s.data {
        amplitude.push(z.norm());
        phase.push(component_phase(z));
    }
    PolarSpectrum {
        channels: s.channels,
        height: s.height,
        width: s.width,
        layout_centered: s.layout_centered,
        amplitude,
        phase,
    }
}

/// Rebuilds a spectrum as `amp * cos(phase) + j * amp * sin(phase)`.
pub fn recompose(p: &PolarSpectrum) -> Spectrum {
    let data = p
        .amplitude
        .iter()
        .zip(&p.phase)
        .map(|(&a, &ph)| Complex64::new(a * ph.cos(), a * ph.sin()))
        .collect();
    Spectrum {
        channels: p.channels,
        height: p.height,
        width: p.width,
        layout_centered: p.layout_centered,
        data,
    }
}

/// Circularly shifts one plane so index (0,0) moves to (dh, dw).
fn shift_plane(src: &[Complex64], height: usize, width: usize, dh: usize, dw: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    for u in 0..height {
        let tu = (u + dh) % height;
        for v in 0..width {
            let tv = (v + dw) % width;
            dst[tu * width + tv] = src[u * width + v];
        }
    }
    dst
}

fn shift_spectrum(s: &Spectrum, dh: usize, dw: usize, centered_after: bool) -> Spectrum {
    let plane = s.plane_len();
    let mut data = Vec::with_capacity(s.data.len());
    for k in 0..s.channels {
        data.extend(shift_plane(
            &s.data[k * plane..(k + 1) * plane],
            s.height,
            s.width,
            dh,
            dw,
        ));
    }
    Spectrum {
        channels: s.channels,
        height: s.height,
        width: s.width,
        layout_centered: centered_after,
        data,
    }
}

/// Rearranges a natural-order spectrum so the zero-frequency component sits
/// at the center (H/2, W/2).
pub fn center_shift(s: &Spectrum) -> Result<Spectrum> {
    if s.layout_centered {
        return Err(Error::LayoutMismatch(
            "center_shift expects natural layout".into(),
        ));
    }
    Ok(shift_spectrum(s, s.height / 2, s.width / 2, true))
}

/// Undoes [`center_shift`].
pub fn inverse_shift(s: &Spectrum) -> Result<Spectrum> {
    if !s.layout_centered {
        return Err(Error::LayoutMismatch(
            "inverse_shift expects centered layout".into(),
        ));
    }
    let dh = (s.height - s.height / 2) % s.height;
    let dw = (s.width - s.width / 2) % s.width;
    Ok(shift_spectrum(s, dh, dw, false))
}

/// Content loss evaluated in the frequency domain:
///
/// ```text
/// (1/HW) * sum |A|^2 + |B|^2 - 2|A||B|cos(phase_A - phase_B)
/// ```
///
/// which equals `(1/HW) * sum |A - B|^2` and, for spectra of real tensors,
/// the spatial squared Frobenius distance.
pub fn spectral_content_loss(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    a.same_shape(b)?;
    a.same_layout(b)?;
    let mut acc = KahanSum::new();
    for (&x, &y) in a.data.iter().zip(&b.data) {
        let aa = x.norm();
        let bb = y.norm();
        let pa = component_phase(x);
        let pb = component_phase(y);
        acc.add(aa * aa + bb * bb - 2.0 * aa * bb * (pa - pb).cos());
    }
    Ok(acc.value() / a.plane_len() as f64)
}

/// Gram matrix evaluated in the frequency domain:
///
/// ```text
/// G[c1,c2] = (1/HW) * sum |S_c1||S_c2| cos(phase_c1 - phase_c2)
/// ```
///
/// The diagonal is `(1/HW) * sum |S_c|^2`, i.e. it depends on amplitude only.
pub fn spectral_gram(s: &Spectrum) -> Result<Matrix> {
    if s.layout_centered {
        return Err(Error::CenteredLayout);
    }
    let c = s.channels;
    let plane = s.plane_len();
    let polar = decompose(s);
    let mut g = Matrix::zeros(c, c);
    for k1 in 0..c {
        let a_amp = &polar.amplitude[k1 * plane..(k1 + 1) * plane];
        let a_ph = &polar.phase[k1 * plane..(k1 + 1) * plane];
        for k2 in k1..c {
            let b_amp = &polar.amplitude[k2 * plane..(k2 + 1) * plane];
            let b_ph = &polar.phase[k2 * plane..(k2 + 1) * plane];
            let mut acc = KahanSum::new();
            for i in 0..plane {
                acc.add(a_amp[i] * b_amp[i] * (a_ph[i] - b_ph[i]).cos());
            }
            let value = acc.value() / plane as f64;
            g.set(k1, k2, value);
            g.set(k2, k1, value);
        }
    }
    Ok(g)
}
