//! Image fidelity metrics on real-valued images with 8-bit peak.

use super::image::ImageBuffer;
use crate::error::Result;

pub const PEAK: f64 = 255.0;
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
const C2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

pub fn mse(reference: &ImageBuffer, test: &ImageBuffer) -> Result<f64> {
    reference.same_shape(test)?;
    let n = reference.data().len() as f64;
    Ok(reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
}

/// `10·log10(255² / MSE)` in dB; `+∞` for identical images.
pub fn psnr(reference: &ImageBuffer, test: &ImageBuffer) -> Result<f64> {
    let e = mse(reference, test)?;
    Ok(if e == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / e).log10()
    })
}

fn gaussian_window() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let mut w = Vec::with_capacity(SSIM_WINDOW * SSIM_WINDOW);
    for y in 0..SSIM_WINDOW {
        for x in 0..SSIM_WINDOW {
            let dx = x as f64 - r;
            let dy = y as f64 - r;
            w.push((-(dx * dx + dy * dy) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp());
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Mean SSIM over all fully-contained 11×11 Gaussian windows (σ = 1.5).
/// Images smaller than the window are treated as a single window.
pub fn ssim(reference: &ImageBuffer, test: &ImageBuffer) -> Result<f64> {
    reference.same_shape(test)?;
    let (w, h) = reference.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Ok(ssim_window(reference.data(), test.data(), None));
    }
    let kernel = gaussian_window();
    let a = reference.data();
    let b = test.data();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut pa = vec![0.0; SSIM_WINDOW * SSIM_WINDOW];
    let mut pb = vec![0.0; SSIM_WINDOW * SSIM_WINDOW];
    for y in 0..=h - SSIM_WINDOW {
        for x in 0..=w - SSIM_WINDOW {
            for wy in 0..SSIM_WINDOW {
                let row = (y + wy) * w + x;
                pa[wy * SSIM_WINDOW..(wy + 1) * SSIM_WINDOW].copy_from_slice(&a[row..row + SSIM_WINDOW]);
                pb[wy * SSIM_WINDOW..(wy + 1) * SSIM_WINDOW].copy_from_slice(&b[row..row + SSIM_WINDOW]);
            }
            total += ssim_window(&pa, &pb, Some(&kernel));
            count += 1;
        }
    }
    Ok(total / count as f64)
}

fn ssim_window(a: &[f64], b: &[f64], weights: Option<&[f64]>) -> f64 {
    let uniform = 1.0 / a.len() as f64;
    let wt = |i: usize| weights.map_or(uniform, |w| w[i]);
    let (mut ma, mut mb) = (0.0, 0.0);
    for i in 0..a.len() {
        ma += wt(i) * a[i];
        mb += wt(i) * b[i];
    }
    let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        let da = a[i] - ma;
        let db = b[i] - mb;
        va += wt(i) * da * da;
        vb += wt(i) * db * db;
        cov += wt(i) * da * db;
    }
    ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) / ((ma * ma + mb * mb + C1) * (va + vb + C2))
}
