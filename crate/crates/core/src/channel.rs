//! Additive white Gaussian noise on transmitted samples, and a statistical
//! check that a linear mix of independent Gaussians stays Gaussian with
//! variance `ρ² + δ²`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::denoise::image::ImageBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation in intensity units.
    pub sigma: f64,
    pub seed: u64,
}

/// `y = x + n` with i.i.d. `n ~ N(0, σ²)`. The result is not clamped.
pub fn add_awgn(clean: &ImageBuffer, spec: &NoiseSpec) -> Result<ImageBuffer> {
    if !spec.sigma.is_finite() || spec.sigma < 0.0 {
        return Err(Error::invalid(format!("noise sigma must be finite and >= 0, got {}", spec.sigma)));
    }
    if spec.sigma == 0.0 {
        return Ok(clean.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data = clean
        .data()
        .iter()
        .map(|&x| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x + spec.sigma * z
        })
        .collect();
    ImageBuffer::new(clean.width(), clean.height(), data)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixInput {
    pub rho: f64,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub rho: f64,
    pub delta: f64,
    pub samples: usize,
    pub expected_variance: f64,
    pub variance: f64,
    /// 99% interval for the sample variance around the expected value.
    pub ci_low: f64,
    pub ci_high: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub variance_ok: bool,
    pub normality_ok: bool,
    pub pass: bool,
}

pub const LEMMA1_MIN_SAMPLES: usize = 10_000;
pub const SIGNIFICANCE: f64 = 0.01;

/// Draws `Z = ρP + δQ` for independent standard normals `P`, `Q`.
pub fn mix_samples(input: &GaussianMixInput) -> Result<Vec<f64>> {
    if !(input.rho > 0.0 && input.delta > 0.0) || !input.rho.is_finite() || !input.delta.is_finite() {
        return Err(Error::invalid(format!(
            "mixing coefficients must be positive, got rho={} delta={}",
            input.rho, input.delta
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    Ok((0..input.samples)
        .map(|_| {
            let p: f64 = StandardNormal.sample(&mut rng);
            let q: f64 = StandardNormal.sample(&mut rng);
            input.rho * p + input.delta * q
        })
        .collect())
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{j−1} e^{−2j²λ²}`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test of `xs` against `N(0, variance)`; returns the
/// statistic and its p-value.
pub fn ks_normal(xs: &[f64], variance: f64) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::invalid("KS test needs samples"));
    }
    let dist = Normal::new(0.0, variance.sqrt())
        .map_err(|e| Error::invalid(format!("bad reference normal: {e}")))?;
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = dist.cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok((d, kolmogorov_survival(lambda)))
}

pub fn verify_lemma1(input: &GaussianMixInput) -> Result<Lemma1Report> {
    if input.samples < LEMMA1_MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {LEMMA1_MIN_SAMPLES} samples, got {}",
            input.samples
        )));
    }
    let z = mix_samples(input)?;
    let expected = input.rho * input.rho + input.delta * input.delta;
    let variance = sample_variance(&z);
    let quantile = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - SIGNIFICANCE / 2.0);
    // sample variance of n normals has standard error σ²·sqrt(2/(n−1))
    let half_width = quantile * expected * (2.0 / (input.samples as f64 - 1.0)).sqrt();
    let (ci_low, ci_high) = (expected - half_width, expected + half_width);
    let (ks_statistic, ks_p_value) = ks_normal(&z, expected)?;
    let variance_ok = (ci_low..=ci_high).contains(&variance);
    let normality_ok = ks_p_value >= SIGNIFICANCE;
    Ok(Lemma1Report {
        rho: input.rho,
        delta: input.delta,
        samples: input.samples,
        expected_variance: expected,
        variance,
        ci_low,
        ci_high,
        ks_statistic,
        ks_p_value,
        variance_ok,
        normality_ok,
        pass: variance_ok && normality_ok,
    })
}
