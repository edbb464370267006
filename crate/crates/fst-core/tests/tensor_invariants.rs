//! Property tests for tensor statistics and spatial losses.

use fst_core::synth::{rng_from_seed, structured_map, uniform};
use fst_core::tensor::{channel_stats, content_loss, gram_matrix, FeatureMap};
use proptest::prelude::*;

fn small_map() -> impl Strategy<Value = FeatureMap> {
    (1usize..4, 1usize..9, 1usize..9).prop_flat_map(|(c, h, w)| {
        proptest::collection::vec(-100.0f64..100.0, c * h * w)
            .prop_map(move |data| FeatureMap::new(c, h, w, data).unwrap())
    })
}

proptest! {
    #[test]
    fn content_loss_is_positive_iff_maps_differ(f in small_map(), delta in -5.0f64..5.0, idx in any::<prop::sample::Index>()) {
        prop_assert_eq!(content_loss(&f, &f).unwrap(), 0.0);
        if delta != 0.0 {
            let (c, h, w) = f.shape();
            let mut data = f.data().to_vec();
            let i = idx.index(data.len());
            data[i] += delta;
            let g = FeatureMap::new(c, h, w, data).unwrap();
            prop_assert!(content_loss(&f, &g).unwrap() > 0.0);
        }
    }

    #[test]
    fn mean_shift_moves_mean_not_covariance(f in small_map(), shift in -50.0f64..50.0) {
        let (c, h, w) = f.shape();
        let shifted = FeatureMap::new(
            c, h, w,
            f.data().iter().map(|v| v + shift).collect(),
        ).unwrap();
        let a = channel_stats(&f);
        let b = channel_stats(&shifted);
        for k in 0..c {
            prop_assert!((b.mean[k] - (a.mean[k] + shift)).abs() < 1e-9 * (1.0 + shift.abs()));
        }
        let scale = a.covariance.frobenius_norm().max(1.0);
        for i in 0..c {
            for j in 0..c {
                prop_assert!((a.covariance.get(i, j) - b.covariance.get(i, j)).abs() < 1e-9 * scale);
            }
        }
    }
}

#[test]
fn gram_equals_scaled_covariance_plus_mean_outer_product() {
    let mut rng = rng_from_seed(17);
    for &(c, h, w) in &[(1usize, 4usize, 4usize), (3, 8, 8), (8, 32, 32), (4, 31, 17)] {
        let f = structured_map(c, h, w, &mut rng);
        let stats = channel_stats(&f);
        let g = gram_matrix(&f);
        let n = (h * w) as f64;
        for i in 0..c {
            for j in 0..c {
                let expected =
                    n * (stats.covariance.get(i, j) + stats.mean[i] * stats.mean[j]);
                let rel = (g.get(i, j) - expected).abs() / expected.abs().max(1e-9);
                assert!(rel < 1e-9, "({i},{j}): {} vs {expected}", g.get(i, j));
            }
        }
    }
}

#[test]
fn operations_are_bit_reproducible() {
    let mut rng = rng_from_seed(23);
    let f = structured_map(3, 16, 16, &mut rng);
    let g = structured_map(3, 16, 16, &mut rng);
    assert_eq!(channel_stats(&f), channel_stats(&f));
    assert_eq!(gram_matrix(&f).data(), gram_matrix(&f).data());
    assert_eq!(
        content_loss(&f, &g).unwrap().to_bits(),
        content_loss(&f, &g).unwrap().to_bits()
    );
}

#[test]
fn covariance_is_psd_for_random_tensors() {
    let mut rng = rng_from_seed(31);
    for _ in 0..20 {
        let c = 1 + (uniform(&mut rng, 0.0, 6.0) as usize);
        let f = structured_map(c, 9, 13, &mut rng);
        let stats = channel_stats(&f);
        let eig = fst_core::linalg::eig_sym(&stats.covariance).unwrap();
        let max = eig.eigenvalues[0];
        let min = *eig.eigenvalues.last().unwrap();
        assert!(min >= -1e-9 * max.abs(), "min {min} max {max}");
    }
}
