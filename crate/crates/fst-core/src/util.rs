//! Small numeric helpers.

/// Kahan compensated accumulator.
///
/// Reductions over feature maps follow a fixed row-major order per channel so
/// results are reproducible; compensation keeps the rounding error of long
/// sums independent of their length.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Wrapped absolute angular distance, in [0, pi].
pub fn wrapped_angle_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kahan_matches_exact_small_sum() {
        let mut k = KahanSum::new();
        for _ in 0..10 {
            k.add(0.1);
        }
        assert!((k.value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angle_distance_wraps() {
        assert!(wrapped_angle_distance(PI - 1e-3, -PI + 1e-3) < 2.1e-3);
        assert!((wrapped_angle_distance(0.0, PI) - PI).abs() < 1e-12);
        assert_eq!(wrapped_angle_distance(1.25, 1.25), 0.0);
    }
}
