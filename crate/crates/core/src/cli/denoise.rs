use std::fmt::Write as _;

use rayon::prelude::*;

use super::output::Artifacts;
use super::ExperimentSpec;
use crate::channel::{add_awgn, NoiseSpec};
use crate::denoise::{decode_pgm, denoise_pipeline, encode_pgm, psnr, ssim, DenoiseParams, ImageBuffer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Row {
    image: String,
    sigma: f64,
    psnr_noisy: f64,
    ssim_noisy: f64,
    psnr_denoised: f64,
    ssim_denoised: f64,
}

/// FNV-1a over the cell identity, so each copy of each cell gets its own
/// noise stream regardless of which other cells run.
fn noise_seed(base: u64, image: &str, sigma: f64, copy: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed(&base.to_le_bytes());
    feed(image.as_bytes());
    feed(&sigma.to_bits().to_le_bytes());
    feed(&(copy as u64).to_le_bytes());
    h
}

fn sigma_label(sigma: f64) -> String {
    format!("{sigma}").replace('.', "p")
}

fn run_cell(spec: &ExperimentSpec, out: &Artifacts, name: &str, clean: &ImageBuffer, sigma: f64) -> Result<Row> {
    let base = spec.seeds[0];
    let copies = (0..spec.copies)
        .map(|k| {
            add_awgn(
                clean,
                &NoiseSpec {
                    sigma,
                    seed: noise_seed(base, name, sigma, k),
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let result = denoise_pipeline(&copies, Some(sigma), &DenoiseParams::default())?;
    let noisy = &copies[0];
    let row = Row {
        image: name.to_string(),
        sigma,
        psnr_noisy: psnr(clean, noisy)?,
        ssim_noisy: ssim(clean, noisy)?,
        psnr_denoised: psnr(clean, &result.denoised)?,
        ssim_denoised: ssim(clean, &result.denoised)?,
    };
    let dir = spec.out.join("denoise");
    let stem = format!("{name}_s{}", sigma_label(sigma));
    out.write(&dir.join(format!("{stem}_noisy.pgm")), &encode_pgm(noisy))?;
    out.write(&dir.join(format!("{stem}_partial.pgm")), &encode_pgm(&result.partial))?;
    out.write(&dir.join(format!("{stem}_denoised.pgm")), &encode_pgm(&result.denoised))?;
    log::info!(
        "{name} sigma={sigma}: {:.2} dB -> {:.2} dB, ssim {:.3} -> {:.3}",
        row.psnr_noisy,
        row.psnr_denoised,
        row.ssim_noisy,
        row.ssim_denoised
    );
    Ok(row)
}

fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from("image,sigma,psnr_noisy,ssim_noisy,psnr_denoised,ssim_denoised\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.4},{:.4},{:.4},{:.4}",
            r.image, r.sigma, r.psnr_noisy, r.ssim_noisy, r.psnr_denoised, r.ssim_denoised
        );
    }
    s
}

fn render_table(rows: &[Row]) -> String {
    let mut s = format!(
        "{:<12} {:>6} {:>11} {:>11} {:>11} {:>11}\n",
        "image", "sigma", "noisy PSNR", "noisy SSIM", "ours PSNR", "ours SSIM"
    );
    let mut last = "";
    for r in rows {
        if !last.is_empty() && last != r.image {
            s.push('\n');
        }
        last = &r.image;
        let _ = writeln!(
            s,
            "{:<12} {:>6} {:>11.2} {:>11.4} {:>11.2} {:>11.4}",
            r.image, r.sigma, r.psnr_noisy, r.ssim_noisy, r.psnr_denoised, r.ssim_denoised
        );
    }
    s
}

pub(super) fn run_denoise(spec: &ExperimentSpec, out: &Artifacts) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    let mut found = Vec::new();
    for name in &spec.images {
        let path = spec.image_dir.join(format!("{name}.pgm"));
        match std::fs::read(&path) {
            Ok(bytes) => found.push((name.as_str(), decode_pgm(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                log::warn!("skipping {name}: {} not found", path.display());
                failures.push(format!("missing image {}", path.display()));
            }
            Err(e) => return Err(Error::file(&path, e)),
        }
    }
    let cells: Vec<(usize, f64)> = (0..found.len())
        .flat_map(|i| spec.sigmas.iter().map(move |&s| (i, s)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(i, sigma)| run_cell(spec, out, found[i].0, &found[i].1, sigma))
        .collect::<Result<Vec<_>>>()?;
    out.write_str(&spec.out.join("denoise").join("results.csv"), &render_csv(&rows))?;
    out.write_str(&spec.out.join("denoise").join("table.txt"), &render_table(&rows))?;
    Ok(failures)
}
