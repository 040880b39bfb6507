//! Activity-weighted shrinkage of wavelet detail coefficients.
//!
//! Each detail band is modelled as a two-state mixture: a coefficient is
//! either noise only, `N(0, σ²)`, or signal plus noise, `N(0, v + σ²)`.
//! The active fraction `π` and the signal variance `v` are fitted per band
//! by expectation-maximisation, so no support or sparsity level is assumed
//! up front. The posterior activity `p` of each coefficient then scales its
//! Wiener estimate: `ĉ = p · c · v / (v + σ²)`.

use super::wavelet::{BandKind, CoeffSet};
use crate::error::{Error, Result};

pub const EM_ITERATIONS: usize = 30;
const MIN_ACTIVE_FRACTION: f64 = 1e-4;

/// Median absolute deviation scale for Gaussian data.
const MAD_TO_SIGMA: f64 = 0.6745;

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Fitted mixture parameters of one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandModel {
    pub active_fraction: f64,
    pub signal_variance: f64,
}

impl BandModel {
    /// Posterior probability that `c` carries signal.
    pub fn activity(&self, c: f64, noise_var: f64) -> f64 {
        let total = self.signal_variance + noise_var;
        let pi = self.active_fraction;
        let log_odds = (pi / (1.0 - pi)).ln()
            + 0.5 * (noise_var / total).ln()
            + 0.5 * c * c * (1.0 / noise_var - 1.0 / total);
        logistic(log_odds)
    }

    pub fn gain(&self, noise_var: f64) -> f64 {
        self.signal_variance / (self.signal_variance + noise_var)
    }
}

/// EM fit of the two-state model to `coeffs`.
pub fn fit_band(coeffs: &[f64], sigma: f64) -> BandModel {
    let s2 = sigma * sigma;
    let n = coeffs.len().max(1) as f64;
    let mean_sq = coeffs.iter().map(|c| c * c).sum::<f64>() / n;
    let mut model = BandModel {
        active_fraction: 0.5,
        signal_variance: (mean_sq - s2).max(s2),
    };
    for _ in 0..EM_ITERATIONS {
        let mut p_sum = 0.0;
        let mut pc2_sum = 0.0;
        for &c in coeffs {
            let p = model.activity(c, s2);
            p_sum += p;
            pc2_sum += p * c * c;
        }
        model.active_fraction = (p_sum / n).clamp(MIN_ACTIVE_FRACTION, 1.0 - MIN_ACTIVE_FRACTION);
        model.signal_variance = if p_sum > 0.0 {
            (pc2_sum / p_sum - s2).max(1e-6 * s2)
        } else {
            1e-6 * s2
        };
    }
    model
}

/// Shrinks one band in place and fills its activity probabilities.
/// With `sigma == 0` the band is left untouched and marked fully active.
pub fn shrink_band(coeffs: &mut [f64], activity: &mut [f64], sigma: f64) {
    if sigma == 0.0 {
        activity.iter_mut().for_each(|a| *a = 1.0);
        return;
    }
    let s2 = sigma * sigma;
    let model = fit_band(coeffs, sigma);
    let gain = model.gain(s2);
    for (c, a) in coeffs.iter_mut().zip(activity.iter_mut()) {
        let p = model.activity(*c, s2);
        *a = p;
        *c *= p * gain;
    }
}

/// Shrinks every detail band of `set`; the approximation band is kept.
pub fn shrink(set: &CoeffSet, sigma: f64) -> Result<CoeffSet> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::invalid(format!("noise sigma must be finite and >= 0, got {sigma}")));
    }
    let mut out = set.clone();
    out.sigma = Some(sigma);
    for band in set.bands() {
        let idx: Vec<usize> = set.band_indices(&band).collect();
        let mut c: Vec<f64> = idx.iter().map(|&i| set.coeffs[i]).collect();
        let mut a = vec![0.0; c.len()];
        shrink_band(&mut c, &mut a, sigma);
        for (k, &i) in idx.iter().enumerate() {
            out.coeffs[i] = c[k];
            out.activity[i] = a[k];
        }
    }
    Ok(out)
}

/// Noise level from the finest diagonal band: `median(|HH₁|) / 0.6745`.
pub fn estimate_sigma(set: &CoeffSet) -> Result<f64> {
    let band = set
        .bands()
        .into_iter()
        .find(|b| b.level == 1 && b.kind == BandKind::Hh)
        .ok_or_else(|| Error::invalid("coefficient set has no detail band"))?;
    let mut mags: Vec<f64> = set.band_values(&band).iter().map(|c| c.abs()).collect();
    if mags.is_empty() {
        return Err(Error::invalid("finest detail band is empty"));
    }
    mags.sort_by(f64::total_cmp);
    let n = mags.len();
    let median = if n % 2 == 1 {
        mags[n / 2]
    } else {
        0.5 * (mags[n / 2 - 1] + mags[n / 2])
    };
    Ok(median / MAD_TO_SIGMA)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::image::ImageBuffer;
    use crate::denoise::wavelet::forward_transform;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn zero_coefficient_maps_to_zero() {
        let mut c = vec![0.0, 40.0, -3.0, 1.0];
        let mut a = vec![0.0; 4];
        shrink_band(&mut c, &mut a, 2.0);
        assert_eq!(c[0], 0.0);
        assert!(a.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn zero_sigma_is_identity() {
        let mut c = vec![5.0, -2.0, 0.25];
        let mut a = vec![0.0; 3];
        shrink_band(&mut c, &mut a, 0.0);
        assert_eq!(c, vec![5.0, -2.0, 0.25]);
        assert_eq!(a, vec![1.0; 3]);
    }

    #[test]
    fn planted_support_is_recovered() {
        let sigma = 1.0;
        let n = 4096;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let noise = Normal::new(0.0, sigma).unwrap();
        let mut truth = vec![false; n];
        for k in 0..10 {
            truth[(k * 397 + 11) % n] = true;
        }
        for seed_round in 0..5 {
            let mut c: Vec<f64> = (0..n)
                .map(|i| {
                    let spike = if truth[i] { if i % 2 == 0 { 50.0 } else { -50.0 } } else { 0.0 };
                    spike * sigma + noise.sample(&mut rng)
                })
                .collect();
            let mut a = vec![0.0; n];
            shrink_band(&mut c, &mut a, sigma);
            let (mut tp, mut fp, mut fneg) = (0, 0, 0);
            for i in 0..n {
                match (a[i] > 0.5, truth[i]) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fneg += 1,
                    _ => {}
                }
            }
            let f1 = 2.0 * tp as f64 / (2 * tp + fp + fneg) as f64;
            assert!(f1 >= 0.95, "round {seed_round}: F1 {f1} (tp {tp} fp {fp} fn {fneg})");
        }
    }

    #[test]
    fn approximation_band_untouched() {
        let img = ImageBuffer::from_fn(32, 32, |x, y| ((x * 7 + y * 13) % 50) as f64).unwrap();
        let set = forward_transform(&img, 2).unwrap();
        let out = shrink(&set, 10.0).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(out.coeffs[y * 32 + x], set.coeffs[y * 32 + x]);
            }
        }
        assert_eq!(out.sigma, Some(10.0));
        assert!(shrink(&set, -1.0).is_err());
        assert!(shrink(&set, f64::NAN).is_err());
    }

    #[test]
    fn sigma_estimate_on_pure_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let noise = Normal::new(0.0, 25.0).unwrap();
        let img = ImageBuffer::from_fn(256, 256, |_, _| noise.sample(&mut rng)).unwrap();
        let est = estimate_sigma(&forward_transform(&img, 3).unwrap()).unwrap();
        assert!((est - 25.0).abs() < 0.05 * 25.0, "{est}");
        let zero = ImageBuffer::filled(16, 16, 0.0).unwrap();
        assert_eq!(estimate_sigma(&forward_transform(&zero, 1).unwrap()).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn never_expands(values in proptest::collection::vec(-500.0f64..500.0, 1..200), sigma in 0.0f64..60.0) {
            let mut c = values.clone();
            let mut a = vec![0.0; c.len()];
            shrink_band(&mut c, &mut a, sigma);
            for (out, inp) in c.iter().zip(&values) {
                prop_assert!(out.abs() <= inp.abs());
                prop_assert!(out * inp >= 0.0);
            }
            prop_assert!(a.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}
