//! Dense real feature tensors, per-channel statistics and spatial losses.
//!
//! A [`FeatureMap`] is the universal carrier for both raw images and deep
//! features: a real C x H x W tensor stored channel-major, then row-major.
//! Statistics use population normalization (divide by H*W) so that the
//! zero-frequency bookkeeping of the spectral module stays exact.

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::matrix::Matrix;
use crate::util::KahanSum;

/// Real-valued C x H x W tensor. Immutable after construction; all public
/// operations producing one guarantee finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    /// Builds a tensor from channel-major, row-major data.
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::ShapeMismatch(format!(
                "dimensions must be >= 1, got {channels}x{height}x{width}"
            )));
        }
        let expected = channels
            .checked_mul(height)
            .and_then(|n| n.checked_mul(width))
            .ok_or_else(|| Error::ShapeMismatch("tensor size overflows".into()))?;
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "data length {} != {channels}x{height}x{width}",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    /// Tensor filled with a single value.
    pub fn constant(channels: usize, height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(
            channels,
            height,
            width,
            vec![value; channels * height * width],
        )
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

    /// Number of pixels per channel (H * W).
    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// One channel as a row-major H*W slice.
    pub fn channel(&self, k: usize) -> &[f64] {
        let plane = self.plane_len();
        &self.data[k * plane..(k + 1) * plane]
    }

    #[inline]
    pub fn get(&self, k: usize, h: usize, w: usize) -> f64 {
        self.data[(k * self.height + h) * self.width + w]
    }
}

/// First- and second-order channel statistics of a feature map.
///
/// `covariance` is population-normalized (divisor H*W) and exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub mean: Vec<f64>,
    pub covariance: SymmetricMatrix,
}

impl ChannelStats {
    pub fn channels(&self) -> usize {
        self.mean.len()
    }
}

/// Per-channel means and the C x C population covariance matrix.
pub fn channel_stats(f: &FeatureMap) -> ChannelStats {
    let c = f.channels();
    let n = f.plane_len() as f64;

    let mut mean = Vec::with_capacity(c);
    for k in 0..c {
        let mut acc = KahanSum::new();
        for &v in f.channel(k) {
            acc.add(v);
        }
        mean.push(acc.value() / n);
    }

    let mut cov = vec![0.0; c * c];
    for k1 in 0..c {
        let a = f.channel(k1);
        let m1 = mean[k1];
        for k2 in k1..c {
            let b = f.channel(k2);
            let m2 = mean[k2];
            let mut acc = KahanSum::new();
            for (&x, &y) in a.iter().zip(b) {
                acc.add((x - m1) * (y - m2));
            }
            let value = acc.value() / n;
            cov[k1 * c + k2] = value;
            cov[k2 * c + k1] = value;
        }
    }

    ChannelStats {
        mean,
        covariance: SymmetricMatrix::new(c, cov).expect("covariance is square and finite"),
    }
}

/// Uncentered, un-normalized Gram matrix G[k1,k2] = sum_{h,w} f[k1]*f[k2].
pub fn gram_matrix(f: &FeatureMap) -> Matrix {
    let c = f.channels();
    let mut g = Matrix::zeros(c, c);
    for k1 in 0..c {
        let a = f.channel(k1);
        for k2 in k1..c {
            let b = f.channel(k2);
            let mut acc = KahanSum::new();
            for (&x, &y) in a.iter().zip(b) {
                acc.add(x * y);
            }
            let value = acc.value();
            g.set(k1, k2, value);
            g.set(k2, k1, value);
        }
    }
    g
}

/// Squared Frobenius distance between two feature maps of identical shape.
pub fn content_loss(a: &FeatureMap, b: &FeatureMap) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "content_loss requires identical shapes, got {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut acc = KahanSum::new();
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let d = x - y;
        acc.add(d * d);
    }
    Ok(acc.value())
}

/// Squared Frobenius distance between the Gram matrices of two maps.
///
/// Spatial sizes may differ; only the channel counts must agree.
pub fn gram_loss(a: &FeatureMap, b: &FeatureMap) -> Result<f64> {
    if a.channels() != b.channels() {
        return Err(Error::ChannelMismatch {
            expected: a.channels(),
            got: b.channels(),
        });
    }
    let d = gram_matrix(a).sub(&gram_matrix(b));
    let n = d.frobenius_norm();
    Ok(n * n)
}
