//! Denoise a PGM image from three noisy copies.
//!
//!     cargo run --release --example denoise_image [image.pgm] [sigma]
//!
//! Without an image a synthetic test pattern is used. Writes `noisy.pgm`
//! and `denoised.pgm` to the working directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use corona_sim::channel::{add_awgn, NoiseSpec};
use corona_sim::denoise::{denoise_pipeline, psnr, read_pgm, ssim, write_pgm, DenoiseParams, ImageBuffer};

fn main() -> corona_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let clean = match args.next() {
        Some(path) => read_pgm(Path::new(&path))?,
        None => ImageBuffer::from_fn(128, 128, |x, y| {
            let ring = ((x as f64 - 64.0).hypot(y as f64 - 64.0) / 6.0).sin() * 60.0;
            128.0 + ring + if x < 40 { -50.0 } else { 0.0 }
        })?,
    };
    let sigma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(25.0);

    let copies = (0..3)
        .map(|k| add_awgn(&clean, &NoiseSpec { sigma, seed: 100 + k }))
        .collect::<corona_sim::Result<Vec<_>>>()?;
    let out = denoise_pipeline(&copies, Some(sigma), &DenoiseParams::default())?;

    println!("fusion weights: {:?}", out.fusion_weights);
    println!("noisy:     PSNR {:6.2} dB  SSIM {:.4}", psnr(&clean, &copies[0])?, ssim(&clean, &copies[0])?);
    println!("partial:   PSNR {:6.2} dB  SSIM {:.4}", psnr(&clean, &out.partial)?, ssim(&clean, &out.partial)?);
    println!("denoised:  PSNR {:6.2} dB  SSIM {:.4}", psnr(&clean, &out.denoised)?, ssim(&clean, &out.denoised)?);

    write_pgm(&mut BufWriter::new(File::create("noisy.pgm")?), &copies[0])?;
    write_pgm(&mut BufWriter::new(File::create("denoised.pgm")?), &out.denoised)?;
    Ok(())
}
