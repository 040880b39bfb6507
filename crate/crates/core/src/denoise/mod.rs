//! Collaborative transform-domain denoising of images received over a
//! noisy channel, plus the PSNR and SSIM fidelity metrics.

pub mod fuse;
pub mod image;
pub mod metrics;
pub mod patch;
pub mod pgm;
pub mod pipeline;
pub mod shrink;
pub mod wavelet;

pub use fuse::{collaborative_fuse, fusion_weights};
pub use image::ImageBuffer;
pub use metrics::{psnr, ssim};
pub use patch::patch_average;
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};
pub use pipeline::{denoise_pipeline, DenoiseOutput, DenoiseParams};
pub use shrink::{estimate_sigma, shrink};
pub use wavelet::{forward_transform, inverse_transform, CoeffSet};
