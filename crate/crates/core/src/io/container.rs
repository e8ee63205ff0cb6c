//! `LDI1` binary container, little-endian:
//!
//! ```text
//! magic "LDI1" | width u32 | height u32 | total samples u32
//! per-pixel sample counts, u16 each, row-major
//! samples: rgba 4 x u8 | depth f32 (metres) | source layer u16
//! ```

use std::path::Path;

use super::{io_err, require};
use crate::error::{Error, Result};
use crate::ldi::{Ldi, LdiSample};
use crate::scalar::Real;

pub const LDI_MAGIC: &[u8; 4] = b"LDI1";
pub const LDI_HEADER_LEN: usize = 16;
pub const LDI_SAMPLE_LEN: usize = 10;

pub fn encode_ldi<T: Real>(ldi: &Ldi<T>) -> Result<Vec<u8>> {
    let (w, h) = ldi.dims();
    let total = ldi.total_samples();
    let mut out = Vec::with_capacity(LDI_HEADER_LEN + 2 * w * h + LDI_SAMPLE_LEN * total);
    out.extend_from_slice(LDI_MAGIC);
    for v in [w, h, total] {
        let v = u32::try_from(v).map_err(|_| Error::Config(format!("{v} exceeds u32")))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    for c in ldi.counts() {
        let c = u16::try_from(c).map_err(|_| Error::Config(format!("{c} samples at one pixel")))?;
        out.extend_from_slice(&c.to_le_bytes());
    }
    for s in ldi.samples() {
        for c in s.rgba {
            out.push((c.to64().clamp(0.0, 1.0) * 255.0).round() as u8);
        }
        out.extend_from_slice(&(s.depth.to64() as f32).to_le_bytes());
        out.extend_from_slice(&s.layer.to_le_bytes());
    }
    Ok(out)
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, n: usize, what: &str) -> Result<&'a [u8]> {
    let end = *pos + n;
    if end > bytes.len() {
        return Err(Error::Truncated(format!("file ends inside {what}")));
    }
    let s = &bytes[*pos..end];
    *pos = end;
    Ok(s)
}

pub fn decode_ldi<T: Real>(bytes: &[u8]) -> Result<Ldi<T>> {
    if bytes.len() < 4 || &bytes[..4] != LDI_MAGIC {
        return Err(Error::BadMagic);
    }
    let mut pos = 4;
    let mut u32_at = |what| -> Result<usize> {
        let b = take(bytes, &mut pos, 4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    };
    let (w, h, total) = (u32_at("header")?, u32_at("header")?, u32_at("header")?);
    let counts_raw = take(bytes, &mut pos, 2 * w * h, "sample counts")?;
    let counts: Vec<usize> = counts_raw
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]) as usize)
        .collect();
    let sum: usize = counts.iter().sum();
    if sum != total {
        return Err(Error::Truncated(format!(
            "counts sum to {sum} but header declares {total} samples"
        )));
    }
    let body = take(bytes, &mut pos, LDI_SAMPLE_LEN * total, "sample array")?;
    if pos != bytes.len() {
        return Err(Error::Truncated(format!("{} trailing bytes", bytes.len() - pos)));
    }
    let samples = body
        .chunks_exact(LDI_SAMPLE_LEN)
        .map(|b| LdiSample {
            rgba: [b[0], b[1], b[2], b[3]].map(|v| T::of(v as f64) / T::of(255.0)),
            depth: T::of(f32::from_le_bytes([b[4], b[5], b[6], b[7]]) as f64),
            layer: u16::from_le_bytes([b[8], b[9]]),
        })
        .collect();
    Ldi::from_counts(w, h, &counts, samples)
}

pub fn save_ldi<T: Real>(ldi: &Ldi<T>, path: &Path) -> Result<()> {
    let bytes = encode_ldi(ldi)?;
    std::fs::write(path, bytes).map_err(io_err(path))
}

pub fn load_ldi<T: Real>(path: &Path) -> Result<Ldi<T>> {
    require(path)?;
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    decode_ldi(&bytes)
}
