//! Seeded synthetic tensors and the bundled demo image corpus.
//!
//! Everything here is driven by `ChaCha8`, so a seed fully determines the
//! output on every platform. The generators are shared by the verification
//! suite, the CLI's synthetic verify mode and the test suites.

pub use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::tensor::FeatureMap;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1).
#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in [lo, hi).
#[inline]
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// Tensor with iid uniform entries in [lo, hi).
pub fn uniform_map(
    channels: usize,
    height: usize,
    width: usize,
    lo: f64,
    hi: f64,
    rng: &mut ChaCha8Rng,
) -> FeatureMap {
    let data = (0..channels * height * width)
        .map(|_| uniform(rng, lo, hi))
        .collect();
    FeatureMap::new(channels, height, width, data).expect("generated data is finite")
}

/// One smooth base field: a few random sinusoids plus a linear ramp.
fn base_field(height: usize, width: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                uniform(rng, 0.5, 4.0),  // cycles along h
                uniform(rng, 0.5, 4.0),  // cycles along w
                uniform(rng, 0.0, std::f64::consts::TAU),
                uniform(rng, 0.3, 1.0), // amplitude
            )
        })
        .collect();
    let (gh, gw) = (uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
    let mut data = Vec::with_capacity(height * width);
    for h in 0..height {
        let y = h as f64 / height as f64;
        for w in 0..width {
            let x = w as f64 / width as f64;
            let mut v = gh * y + gw * x;
            for &(fh, fw, phase, amp) in &waves {
                v += amp * (std::f64::consts::TAU * (fh * y + fw * x) + phase).sin();
            }
            data.push(v);
        }
    }
    data
}

/// A tensor whose channels are random mixtures of independent structured
/// fields plus a little noise: the empirical channel covariance is full rank
/// and moderately conditioned, which is what the whitening paths want.
pub fn structured_map(
    channels: usize,
    height: usize,
    width: usize,
    rng: &mut ChaCha8Rng,
) -> FeatureMap {
    let plane = height * width;
    let bases: Vec<Vec<f64>> = (0..channels).map(|_| base_field(height, width, rng)).collect();
    let offsets: Vec<f64> = (0..channels).map(|_| uniform(rng, -1.0, 1.0)).collect();
    // mixing matrix close to the identity keeps the covariance well conditioned
    let mut mix = vec![0.0; channels * channels];
    for k in 0..channels {
        for j in 0..channels {
            mix[k * channels + j] =
                if k == j { 1.0 } else { 0.0 } + uniform(rng, -0.35, 0.35);
        }
    }
    let mut data = vec![0.0; channels * plane];
    for k in 0..channels {
        let dst = &mut data[k * plane..(k + 1) * plane];
        dst.fill(offsets[k]);
        for j in 0..channels {
            let coeff = mix[k * channels + j];
            for (d, &b) in dst.iter_mut().zip(&bases[j]) {
                *d += coeff * b;
            }
        }
        for d in dst.iter_mut() {
            *d += uniform(rng, -0.05, 0.05);
        }
    }
    FeatureMap::new(channels, height, width, data).expect("generated data is finite")
}

/// A pair of independent structured tensors of the same shape.
pub fn structured_pair(
    channels: usize,
    height: usize,
    width: usize,
    rng: &mut ChaCha8Rng,
) -> (FeatureMap, FeatureMap) {
    let a = structured_map(channels, height, width, rng);
    let b = structured_map(channels, height, width, rng);
    (a, b)
}

/// A pair whose channel covariances are deliberately well conditioned:
/// independent per-channel fields with comparable variances, a whisper of
/// cross-channel mixing to stay generic, and enough noise to keep the
/// smallest eigenvalue honest. Iterative optimizers converge fast on these.
pub fn well_conditioned_pair(
    channels: usize,
    height: usize,
    width: usize,
    rng: &mut ChaCha8Rng,
) -> (FeatureMap, FeatureMap) {
    let gen = |rng: &mut ChaCha8Rng| {
        let plane = height * width;
        let mut data = vec![0.0; channels * plane];
        let fields: Vec<Vec<f64>> = (0..channels)
            .map(|_| base_field(height, width, rng))
            .collect();
        for k in 0..channels {
            let offset = uniform(rng, -0.5, 0.5);
            let dst = &mut data[k * plane..(k + 1) * plane];
            for (i, d) in dst.iter_mut().enumerate() {
                let mut v = offset + fields[k][i];
                if channels > 1 {
                    v += 0.05 * fields[(k + 1) % channels][i];
                }
                *d = v + uniform(rng, -0.4, 0.4);
            }
        }
        FeatureMap::new(channels, height, width, data).expect("generated data is finite")
    };
    let a = gen(rng);
    let b = gen(rng);
    (a, b)
}

/// Copies channel 0 over channel `dup`, producing a rank-deficient channel
/// covariance.
pub fn duplicate_channel(f: &FeatureMap, dup: usize) -> FeatureMap {
    let (c, h, w) = f.shape();
    assert!(dup < c && c >= 2);
    let plane = f.plane_len();
    let mut data = f.data().to_vec();
    let src: Vec<f64> = f.channel(0).to_vec();
    data[dup * plane..(dup + 1) * plane].copy_from_slice(&src);
    FeatureMap::new(c, h, w, data).expect("copy keeps data finite")
}

fn clamp_255(v: f64) -> f64 {
    v.clamp(0.0, 255.0)
}

/// A structured RGB "photograph" with the channel statistics of real photos:
/// a shared luminance field (gradient background, solid shapes, texture)
/// rendered through a two-color map, plus weak per-channel tints and noise.
/// Channels end up strongly correlated, which is what makes whitening-based
/// transfer disturb the structure of raw-pixel inputs. Values in [0, 255].
pub fn demo_content_image(height: usize, width: usize, rng: &mut ChaCha8Rng) -> FeatureMap {
    let plane = height * width;
    let horizontal = unit(rng) < 0.5;

    // shared luminance field in [0, 1]
    let mut luminance = vec![0.0; plane];
    for h in 0..height {
        for w in 0..width {
            let t = if horizontal {
                w as f64 / (width - 1).max(1) as f64
            } else {
                h as f64 / (height - 1).max(1) as f64
            };
            luminance[h * width + w] = 0.15 + 0.7 * t;
        }
    }

    // solid shapes give the field sharp, phase-heavy structure
    let shapes = 3 + (rng.next_u64() % 3) as usize;
    for _ in 0..shapes {
        let level = uniform(rng, 0.0, 1.0);
        let ch = uniform(rng, 0.15, 0.85) * height as f64;
        let cw = uniform(rng, 0.15, 0.85) * width as f64;
        let radius = uniform(rng, 0.08, 0.22) * height.min(width) as f64;
        let disk = unit(rng) < 0.5;
        for h in 0..height {
            for w in 0..width {
                let dh = h as f64 - ch;
                let dw = w as f64 - cw;
                let inside = if disk {
                    dh * dh + dw * dw <= radius * radius
                } else {
                    dh.abs() <= radius && dw.abs() <= radius
                };
                if inside {
                    luminance[h * width + w] = level;
                }
            }
        }
    }

    // texture rides on the shared field
    let (fh, fw) = (uniform(rng, 2.0, 6.0), uniform(rng, 2.0, 6.0));
    let phase = uniform(rng, 0.0, std::f64::consts::TAU);
    for h in 0..height {
        for w in 0..width {
            let y = h as f64 / height as f64;
            let x = w as f64 / width as f64;
            luminance[h * width + w] +=
                0.04 * (std::f64::consts::TAU * (fh * y + fw * x) + phase).sin();
        }
    }

    // two-color map plus weak independent tint and noise per channel
    let dark: Vec<f64> = (0..3).map(|_| uniform(rng, 0.0, 70.0)).collect();
    let light: Vec<f64> = (0..3).map(|_| uniform(rng, 180.0, 255.0)).collect();
    let mut data = vec![0.0; 3 * plane];
    for k in 0..3 {
        let (th, tw) = (uniform(rng, 1.0, 5.0), uniform(rng, 1.0, 5.0));
        let tphase = uniform(rng, 0.0, std::f64::consts::TAU);
        for h in 0..height {
            for w in 0..width {
                let i = h * width + w;
                let y = h as f64 / height as f64;
                let x = w as f64 / width as f64;
                let tint =
                    5.0 * (std::f64::consts::TAU * (th * y + tw * x) + tphase).sin();
                let noise = uniform(rng, -3.0, 3.0);
                let base = dark[k] + (light[k] - dark[k]) * luminance[i];
                data[k * plane + i] = clamp_255(base + tint + noise);
            }
        }
    }

    FeatureMap::new(3, height, width, data).expect("generated data is finite")
}

/// A style reference: stripes or checker with a strong palette, texture and
/// noise, values in [0, 255].
pub fn demo_style_image(height: usize, width: usize, rng: &mut ChaCha8Rng) -> FeatureMap {
    let plane = height * width;
    let palette: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..3).map(|_| uniform(rng, 0.0, 255.0)).collect())
        .collect();
    let period = uniform(rng, 0.12, 0.35) * height.min(width) as f64;
    let checker = unit(rng) < 0.5;
    let angle = uniform(rng, 0.0, std::f64::consts::PI);
    let (dir_h, dir_w) = (angle.sin(), angle.cos());

    let mut data = vec![0.0; 3 * plane];
    for h in 0..height {
        for w in 0..width {
            let band = if checker {
                ((h as f64 / period).floor() + (w as f64 / period).floor()) as i64
            } else {
                ((h as f64 * dir_h + w as f64 * dir_w) / period).floor() as i64
            };
            let color = &palette[(band.rem_euclid(3)) as usize];
            for k in 0..3 {
                data[k * plane + h * width + w] = color[k];
            }
        }
    }
    for k in 0..3 {
        for v in &mut data[k * plane..(k + 1) * plane] {
            *v = clamp_255(*v + uniform(rng, -6.0, 6.0));
        }
    }
    FeatureMap::new(3, height, width, data).expect("generated data is finite")
}

/// The bundled content/style corpus: `count` deterministic raw-pixel pairs.
pub fn demo_pairs(
    count: usize,
    height: usize,
    width: usize,
    seed: u64,
) -> Vec<(FeatureMap, FeatureMap)> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let content = demo_content_image(height, width, &mut rng);
            let style = demo_style_image(height, width, &mut rng);
            (content, style)
        })
        .collect()
}
