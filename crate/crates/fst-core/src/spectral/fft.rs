//! One-dimensional complex FFT engine.
//!
//! Power-of-two lengths take an iterative radix-2 path; every other length
//! goes through Bluestein's chirp-z reformulation, whose internal convolution
//! runs on the radix-2 path. Twiddle and chirp angles are computed from
//! integer-reduced arguments so accuracy does not degrade with index products.

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// A transform plan for one length and direction. Plans are immutable and
/// safe to share across threads; `process` allocates its own scratch.
pub(crate) struct Fft1d {
    len: usize,
    kind: Kind,
}

enum Kind {
    Trivial,
    Radix2(Radix2),
    Bluestein(Bluestein),
}

struct Radix2 {
    /// exp(sign * 2*pi*i * k / n) for k in 0..n/2.
    twiddles: Vec<Complex64>,
}

struct Bluestein {
    /// exp(sign * pi*i * k^2 / n) for k in 0..n.
    chirp: Vec<Complex64>,
    /// Forward FFT (length m) of the wrapped conjugate-chirp kernel.
    kernel_fft: Vec<Complex64>,
    forward: Box<Fft1d>,
    backward: Box<Fft1d>,
    padded_len: usize,
}

impl Fft1d {
    pub fn new(len: usize, direction: Direction) -> Self {
        let kind = if len <= 1 {
            Kind::Trivial
        } else if len.is_power_of_two() {
            Kind::Radix2(Radix2::new(len, direction))
        } else {
            Kind::Bluestein(Bluestein::new(len, direction))
        };
        Self { len, kind }
    }

    /// In-place transform without normalization (inverse transforms are not
    /// divided by the length; callers scale once).
    pub fn process(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2(r) => r.process(buf),
            Kind::Bluestein(b) => b.process(buf),
        }
    }
}

impl Radix2 {
    fn new(n: usize, direction: Direction) -> Self {
        let sign = direction.sign();
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = sign * 2.0 * PI * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Self { twiddles }
    }

    fn process(&self, buf: &mut [Complex64]) {
        let n = buf.len();
        // Bit-reversal permutation.
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            for base in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let t = w * buf[base + half + k];
                    let u = buf[base + k];
                    buf[base + k] = u + t;
                    buf[base + half + k] = u - t;
                }
            }
            size *= 2;
        }
    }
}

impl Bluestein {
    fn new(n: usize, direction: Direction) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let sign = direction.sign();
        // Quadratic chirp with the exponent reduced mod 2n to keep the angle
        // small; k^2 mod 2n gives the same complex value exactly.
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let r = (k as u64 * k as u64) % (2 * n as u64);
                let angle = sign * PI * r as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();

        let forward = Box::new(Fft1d::new(m, Direction::Forward));
        let backward = Box::new(Fft1d::new(m, Direction::Inverse));

        // Kernel b[j] = conj(chirp[j]) wrapped circularly into length m.
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for j in 1..n {
            let c = chirp[j].conj();
            kernel[j] = c;
            kernel[m - j] = c;
        }
        forward.process(&mut kernel);

        Self {
            chirp,
            kernel_fft: kernel,
            forward,
            backward,
            padded_len: m,
        }
    }

    fn process(&self, buf: &mut [Complex64]) {
        let n = buf.len();
        let m = self.padded_len;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..n {
            work[j] = buf[j] * self.chirp[j];
        }
        self.forward.process(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel_fft) {
            *w *= k;
        }
        self.backward.process(&mut work);
        let scale = 1.0 / m as f64;
        for k in 0..n {
            buf[k] = work[k] * self.chirp[k] * scale;
        }
    }
}
