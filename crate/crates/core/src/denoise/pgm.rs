//! Binary 8-bit PGM (`P5`) reading and writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::image::ImageBuffer;
use crate::error::{Error, Result};

struct Header {
    width: usize,
    height: usize,
    maxval: usize,
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::Pgm("missing P5 magic".into()));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments before each header number
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Pgm(format!("expected a number at byte {start}")));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pgm("header number out of range".into()))?;
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Pgm("no whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    Ok(Header {
        width,
        height,
        maxval,
        data_start: pos,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<ImageBuffer> {
    let h = parse_header(bytes)?;
    if h.width == 0 || h.height == 0 {
        return Err(Error::Pgm("zero image dimension".into()));
    }
    if h.maxval == 0 || h.maxval > 255 {
        return Err(Error::Pgm(format!("only 8-bit PGM is supported, maxval {}", h.maxval)));
    }
    let n = h.width * h.height;
    let raster = &bytes[h.data_start..];
    if raster.len() < n {
        return Err(Error::Pgm(format!("raster truncated: {} of {n} bytes", raster.len())));
    }
    ImageBuffer::from_u8(h.width, h.height, &raster[..n])
}

pub fn encode_pgm(image: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.to_u8());
    out
}

pub fn read_pgm(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    decode_pgm(&bytes).map_err(|e| match e {
        Error::Pgm(msg) => Error::Pgm(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_pgm<W: Write>(out: &mut W, image: &ImageBuffer) -> Result<()> {
    out.write_all(&encode_pgm(image))?;
    Ok(())
}
