//! Separable orthonormal 2-D wavelet transform with periodic boundaries.
//!
//! Uses the 8-tap Daubechies filter (four vanishing moments). Coefficients
//! are stored in the usual pyramid layout: after `depth` levels the top-left
//! `W/2^depth × H/2^depth` block is the approximation band, and each level
//! `j` contributes three detail bands of size `W/2^j × H/2^j`.

use super::image::ImageBuffer;
use crate::error::{Error, Result};

/// Daubechies lowpass analysis filter, 8 taps.
pub const DB4_LOWPASS: [f64; 8] = [
    0.230_377_813_308_896_4,
    0.714_846_570_552_915_4,
    0.630_880_767_929_858_7,
    -0.027_983_769_416_859_9,
    -0.187_034_811_719_093_1,
    0.030_841_381_835_560_7,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_0,
];

pub const DEFAULT_DEPTH: usize = 3;

fn highpass() -> [f64; 8] {
    let h = DB4_LOWPASS;
    let mut g = [0.0; 8];
    for (k, gk) in g.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *gk = sign * h[h.len() - 1 - k];
    }
    g
}

/// One analysis step on `x` (even length): lowpass half then highpass half.
fn analyze(x: &[f64], out: &mut [f64], g: &[f64; 8]) {
    let n = x.len();
    let half = n / 2;
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for t in 0..8 {
            let v = x[(2 * k + t) % n];
            a += DB4_LOWPASS[t] * v;
            d += g[t] * v;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

/// Transpose of [`analyze`].
fn synthesize(c: &[f64], out: &mut [f64], g: &[f64; 8]) {
    let n = c.len();
    let half = n / 2;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..half {
        let a = c[k];
        let d = c[half + k];
        for t in 0..8 {
            out[(2 * k + t) % n] += DB4_LOWPASS[t] * a + g[t] * d;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    /// Horizontal highpass, vertical lowpass.
    Hl,
    /// Horizontal lowpass, vertical highpass.
    Lh,
    Hh,
}

/// A detail band's rectangle within the coefficient array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    /// 1 is the finest level.
    pub level: usize,
    pub kind: BandKind,
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

/// Multilevel coefficients plus per-coefficient activity probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSet {
    /// Transform-domain size (the padded image size).
    pub width: usize,
    pub height: usize,
    /// Size of the image before padding; the inverse crops back to it.
    pub source_width: usize,
    pub source_height: usize,
    pub depth: usize,
    pub coeffs: Vec<f64>,
    /// Probability that each coefficient carries signal; 1 for the
    /// approximation band.
    pub activity: Vec<f64>,
    pub sigma: Option<f64>,
}

impl CoeffSet {
    pub fn same_shape(&self, other: &CoeffSet) -> Result<()> {
        if (self.width, self.height, self.depth) != (other.width, other.height, other.depth)
            || (self.source_width, self.source_height) != (other.source_width, other.source_height)
        {
            return Err(Error::ShapeMismatch {
                expected: (self.width, self.height),
                actual: (other.width, other.height),
            });
        }
        Ok(())
    }

    /// Detail bands, finest level first.
    pub fn bands(&self) -> Vec<Band> {
        let mut out = Vec::with_capacity(3 * self.depth);
        for level in 1..=self.depth {
            let w = self.width >> level;
            let h = self.height >> level;
            for (kind, x0, y0) in [(BandKind::Hl, w, 0), (BandKind::Lh, 0, h), (BandKind::Hh, w, h)] {
                out.push(Band {
                    level,
                    kind,
                    x0,
                    y0,
                    width: w,
                    height: h,
                });
            }
        }
        out
    }

    pub fn band_values(&self, band: &Band) -> Vec<f64> {
        let mut v = Vec::with_capacity(band.width * band.height);
        for y in band.y0..band.y0 + band.height {
            let row = y * self.width;
            v.extend_from_slice(&self.coeffs[row + band.x0..row + band.x0 + band.width]);
        }
        v
    }

    pub(crate) fn band_indices(&self, band: &Band) -> impl Iterator<Item = usize> + '_ {
        let band = *band;
        (band.y0..band.y0 + band.height)
            .flat_map(move |y| (band.x0..band.x0 + band.width).map(move |x| y * self.width + x))
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Forward transform of `image` to `depth` levels. Dimensions that are not
/// multiples of `2^depth` are padded by symmetric extension first.
pub fn forward_transform(image: &ImageBuffer, depth: usize) -> Result<CoeffSet> {
    if depth == 0 {
        return Err(Error::invalid("transform depth must be at least 1"));
    }
    let block = 1usize
        .checked_shl(depth as u32)
        .ok_or_else(|| Error::invalid("transform depth too large"))?;
    let (w0, h0) = image.dims();
    let w = w0.div_ceil(block) * block;
    let h = h0.div_ceil(block) * block;
    let padded;
    let src = if (w, h) == (w0, h0) {
        image
    } else {
        padded = image.pad_symmetric(w, h);
        &padded
    };

    let g = highpass();
    let mut c = src.data().to_vec();
    let mut line = Vec::new();
    let mut tmp = Vec::new();
    let (mut cw, mut ch) = (w, h);
    for _ in 0..depth {
        line.resize(cw, 0.0);
        tmp.resize(cw, 0.0);
        for y in 0..ch {
            line.copy_from_slice(&c[y * w..y * w + cw]);
            analyze(&line, &mut tmp, &g);
            c[y * w..y * w + cw].copy_from_slice(&tmp);
        }
        line.resize(ch, 0.0);
        tmp.resize(ch, 0.0);
        for x in 0..cw {
            for y in 0..ch {
                line[y] = c[y * w + x];
            }
            analyze(&line, &mut tmp, &g);
            for y in 0..ch {
                c[y * w + x] = tmp[y];
            }
        }
        cw /= 2;
        ch /= 2;
    }
    Ok(CoeffSet {
        width: w,
        height: h,
        source_width: w0,
        source_height: h0,
        depth,
        activity: vec![1.0; c.len()],
        coeffs: c,
        sigma: None,
    })
}

/// Inverse of [`forward_transform`], cropped back to the source size.
pub fn inverse_transform(set: &CoeffSet) -> Result<ImageBuffer> {
    let (w, h) = (set.width, set.height);
    if set.coeffs.len() != w * h {
        return Err(Error::invalid("coefficient count does not match dimensions"));
    }
    let g = highpass();
    let mut c = set.coeffs.clone();
    let mut line = Vec::new();
    let mut tmp = Vec::new();
    for level in (0..set.depth).rev() {
        let cw = w >> level;
        let ch = h >> level;
        line.resize(ch, 0.0);
        tmp.resize(ch, 0.0);
        for x in 0..cw {
            for y in 0..ch {
                line[y] = c[y * w + x];
            }
            synthesize(&line, &mut tmp, &g);
            for y in 0..ch {
                c[y * w + x] = tmp[y];
            }
        }
        line.resize(cw, 0.0);
        tmp.resize(cw, 0.0);
        for y in 0..ch {
            line.copy_from_slice(&c[y * w..y * w + cw]);
            synthesize(&line, &mut tmp, &g);
            c[y * w..y * w + cw].copy_from_slice(&tmp);
        }
    }
    let full = ImageBuffer::new(w, h, c)?;
    Ok(if (w, h) == (set.source_width, set.source_height) {
        full
    } else {
        full.crop(set.source_width, set.source_height)
    })
}
