//! Non-local patch averaging.
//!
//! Each output pixel is a weighted mean of the pixels in a search window
//! around it, weighted by how closely the patch around each candidate
//! matches the patch around the target. Patches near the border are read
//! through symmetric reflection; the search window is clipped to the image.

use rayon::prelude::*;

use super::image::{reflect, ImageBuffer};
use crate::error::{Error, Result};

pub const DEFAULT_PATCH: usize = 7;
pub const DEFAULT_WINDOW: usize = 21;

/// Weights are `exp(−patch_mse / h_sim²)`. A non-positive `h_sim` returns
/// the input unchanged, the limit where only the self-match has weight.
pub fn patch_average(image: &ImageBuffer, patch: usize, window: usize, h_sim: f64) -> Result<ImageBuffer> {
    let (w, h) = image.dims();
    if patch % 2 == 0 || window % 2 == 0 {
        return Err(Error::invalid("patch and window sizes must be odd"));
    }
    if patch >= window {
        return Err(Error::invalid(format!("patch {patch} must be smaller than window {window}")));
    }
    if patch > w.min(h) {
        return Err(Error::invalid(format!("patch {patch} larger than the {w}x{h} image")));
    }
    if !(h_sim > 0.0) {
        return Ok(image.clone());
    }

    let pr = patch / 2;
    let sr = (window / 2) as isize;
    let pw = w + 2 * pr;
    let padded: Vec<f64> = (0..h + 2 * pr)
        .flat_map(|y| {
            let sy = reflect(y as isize - pr as isize, h);
            (0..pw).map(move |x| image.get(reflect(x as isize - pr as isize, w), sy))
        })
        .collect();
    let norm = 1.0 / (patch * patch) as f64;
    let inv_h2 = 1.0 / (h_sim * h_sim);
    let src = image.data();

    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let y0 = (y as isize - sr).max(0) as usize;
        let y1 = ((y as isize + sr) as usize).min(h - 1);
        for (x, slot) in row.iter_mut().enumerate() {
            let x0 = (x as isize - sr).max(0) as usize;
            let x1 = ((x as isize + sr) as usize).min(w - 1);
            let mut num = 0.0;
            let mut den = 0.0;
            for qy in y0..=y1 {
                for qx in x0..=x1 {
                    let mut d = 0.0;
                    for oy in 0..patch {
                        let a = &padded[(y + oy) * pw + x..(y + oy) * pw + x + patch];
                        let b = &padded[(qy + oy) * pw + qx..(qy + oy) * pw + qx + patch];
                        for (p, q) in a.iter().zip(b) {
                            let t = p - q;
                            d += t * t;
                        }
                    }
                    let wt = (-(d * norm) * inv_h2).exp();
                    num += wt * src[qy * w + qx];
                    den += wt;
                }
            }
            *slot = num / den;
        }
    });
    ImageBuffer::new(w, h, out)
}
