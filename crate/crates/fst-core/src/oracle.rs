//! Reference implementations used as independent test oracles.
//!
//! Everything here is direct summation, O((HW)^2) per channel, kept entirely
//! separate from the production transform paths. Only compiled for tests and
//! for downstream test suites that enable the `oracle` feature.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::spectral::Spectrum;
use crate::tensor::FeatureMap;

/// Direct-summation 2-D DFT.
///
/// Twiddle factors are looked up from per-axis tables indexed by
/// `(u*h) mod H`, keeping every trigonometric argument below 2*pi; the
/// naive formula with raw `u*h` arguments loses digits that matter at the
/// comparison tolerances used against the fast path.
pub fn naive_dft(f: &FeatureMap) -> Spectrum {
    let (c, h, w) = f.shape();
    let tw_h = twiddle_table(h);
    let tw_w = twiddle_table(w);
    let mut data = Vec::with_capacity(c * h * w);
    for k in 0..c {
        let chan = f.channel(k);
        for u in 0..h {
            for v in 0..w {
                let mut acc = Complex64::new(0.0, 0.0);
                for hh in 0..h {
                    let wh = tw_h[(u * hh) % h];
                    for ww in 0..w {
                        acc += chan[hh * w + ww] * wh * tw_w[(v * ww) % w];
                    }
                }
                data.push(acc);
            }
        }
    }
    Spectrum::new(c, h, w, false, data).expect("naive DFT output is well-formed")
}

fn twiddle_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|t| {
            let angle = -2.0 * PI * t as f64 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect()
}
