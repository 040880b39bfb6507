//! Similarity-weighted fusion of several estimates of the same signal.

use super::wavelet::CoeffSet;
use crate::error::{Error, Result};

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len().max(1) as f64
}

/// Weights `w_j ∝ Σ_i exp(−MSE(θ_i, θ_j) / bandwidth²)`, summing to one.
/// A zero bandwidth only counts exact matches.
pub fn fusion_weights(estimates: &[CoeffSet], bandwidth: f64) -> Result<Vec<f64>> {
    let first = estimates
        .first()
        .ok_or_else(|| Error::invalid("fusion needs at least one estimate"))?;
    for e in &estimates[1..] {
        first.same_shape(e)?;
    }
    if !(bandwidth >= 0.0) || !bandwidth.is_finite() {
        return Err(Error::invalid(format!("bandwidth must be finite and >= 0, got {bandwidth}")));
    }
    let c = estimates.len();
    let mut sim = vec![0.0; c * c];
    for i in 0..c {
        sim[i * c + i] = 1.0;
        for j in i + 1..c {
            let d = mse(&estimates[i].coeffs, &estimates[j].coeffs);
            let s = if bandwidth > 0.0 {
                (-d / (bandwidth * bandwidth)).exp()
            } else if d == 0.0 {
                1.0
            } else {
                0.0
            };
            sim[i * c + j] = s;
            sim[j * c + i] = s;
        }
    }
    let raw: Vec<f64> = (0..c).map(|j| (0..c).map(|i| sim[i * c + j]).sum()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Fused coefficients `Σ_j w_j θ_j`; activities are fused the same way.
pub fn collaborative_fuse(estimates: &[CoeffSet], bandwidth: f64) -> Result<CoeffSet> {
    let weights = fusion_weights(estimates, bandwidth)?;
    Ok(fuse_with(estimates, &weights))
}

pub(crate) fn fuse_with(estimates: &[CoeffSet], weights: &[f64]) -> CoeffSet {
    let base = &estimates[0];
    let mut out = base.clone();
    // offsets from the first estimate, so identical inputs come back bit-exact
    for (e, &w) in estimates.iter().zip(weights).skip(1) {
        for (k, (o, v)) in out.coeffs.iter_mut().zip(&e.coeffs).enumerate() {
            *o += w * (v - base.coeffs[k]);
        }
        for (k, (o, v)) in out.activity.iter_mut().zip(&e.activity).enumerate() {
            *o += w * (v - base.activity[k]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{add_awgn, NoiseSpec};
    use crate::denoise::image::ImageBuffer;
    use crate::denoise::wavelet::{forward_transform, inverse_transform};
    use proptest::prelude::*;

    fn clean() -> ImageBuffer {
        ImageBuffer::from_fn(64, 64, |x, y| 100.0 + 50.0 * ((x as f64 / 9.0).sin() * (y as f64 / 7.0).cos())).unwrap()
    }

    fn noisy_sets(n: usize, sigma: f64) -> Vec<CoeffSet> {
        (0..n)
            .map(|k| {
                let y = add_awgn(&clean(), &NoiseSpec { sigma, seed: 100 + k as u64 }).unwrap();
                forward_transform(&y, 2).unwrap()
            })
            .collect()
    }

    #[test]
    fn single_estimate_unchanged() {
        let sets = noisy_sets(1, 10.0);
        let fused = collaborative_fuse(&sets, 10.0).unwrap();
        assert_eq!(fused, sets[0]);
    }

    #[test]
    fn identical_estimates_return_exactly() {
        let one = noisy_sets(1, 10.0).remove(0);
        let sets = vec![one.clone(), one.clone(), one.clone()];
        assert_eq!(collaborative_fuse(&sets, 5.0).unwrap(), one);
        assert_eq!(collaborative_fuse(&sets, 0.0).unwrap(), one);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = forward_transform(&ImageBuffer::filled(16, 16, 1.0).unwrap(), 2).unwrap();
        let b = forward_transform(&ImageBuffer::filled(32, 16, 1.0).unwrap(), 2).unwrap();
        assert!(collaborative_fuse(&[a.clone(), b], 1.0).is_err());
        assert!(collaborative_fuse(&[], 1.0).is_err());
        assert!(collaborative_fuse(&[a], -1.0).is_err());
    }

    #[test]
    fn fusing_copies_reduces_noise() {
        let sigma = 20.0;
        let sets = noisy_sets(3, sigma);
        let w = fusion_weights(&sets, sigma).unwrap();
        let fused = inverse_transform(&fuse_with(&sets, &w)).unwrap();
        let residual_var = |img: &ImageBuffer| -> f64 {
            img.data().iter().zip(clean().data()).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / img.data().len() as f64
        };
        let fused_var = residual_var(&fused);
        for s in &sets {
            assert!(fused_var < residual_var(&inverse_transform(s).unwrap()));
        }
        // near-uniform weights leave about a third of the noise power
        assert!((fused_var / (sigma * sigma) - 1.0 / 3.0).abs() < 0.03, "{fused_var}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn weights_are_a_permutation_equivariant_simplex(bw in 0.5f64..50.0, rot in 0usize..4) {
            let sets = noisy_sets(4, 15.0);
            let w = fusion_weights(&sets, bw).unwrap();
            prop_assert!(w.iter().all(|&x| x >= 0.0));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mut rotated = sets.clone();
            rotated.rotate_left(rot);
            let wr = fusion_weights(&rotated, bw).unwrap();
            for j in 0..4 {
                prop_assert!((wr[j] - w[(j + rot) % 4]).abs() < 1e-12);
            }
        }
    }
}
