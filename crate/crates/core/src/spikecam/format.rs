//! `.spks` spike stream files.
//!
//! Little-endian header, 32 bytes:
//!
//! | offset | size | field                                        |
//! |--------|------|----------------------------------------------|
//! | 0      | 4    | magic `SPKS`                                  |
//! | 4      | 2    | version (1)                                   |
//! | 6      | 4    | height                                        |
//! | 10     | 4    | width                                         |
//! | 14     | 4    | T                                             |
//! | 18     | 1    | pattern (0 none, 1 RGGB, 2 BGGR, 3 GRBG, 4 GBRG) |
//! | 19     | 1    | reset mode (0 reset-to-zero, 1 subtract)      |
//! | 20     | 4    | threshold (f32)                               |
//! | 24     | 4    | sigma_g (f32)                                 |
//! | 28     | 4    | sigma_p (f32)                                 |
//!
//! followed by `ceil(H*W*T / 8)` payload bytes in `(t, y, x)` order, MSB first.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::bayer::BayerPattern;
use super::stream::{payload_len, ResetMode, SpikeStream, StreamMeta};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SPKS";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

fn dim_u32(v: usize, name: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::format("spike stream", format!("{name} {v} exceeds u32")))
}

pub fn encode_header(stream: &SpikeStream) -> Result<[u8; HEADER_LEN]> {
    let (h, w, t) = stream.dims();
    let m = &stream.meta;
    let mut out = [0u8; HEADER_LEN];
    out[0..4].copy_from_slice(MAGIC);
    out[4..6].copy_from_slice(&VERSION.to_le_bytes());
    out[6..10].copy_from_slice(&dim_u32(h, "height")?.to_le_bytes());
    out[10..14].copy_from_slice(&dim_u32(w, "width")?.to_le_bytes());
    out[14..18].copy_from_slice(&dim_u32(t, "T")?.to_le_bytes());
    out[18] = m.pattern.map_or(0, BayerPattern::code);
    out[19] = m.reset_mode.code();
    out[20..24].copy_from_slice(&m.threshold.to_le_bytes());
    out[24..28].copy_from_slice(&m.sigma_g.to_le_bytes());
    out[28..32].copy_from_slice(&m.sigma_p.to_le_bytes());
    Ok(out)
}

pub fn write_stream<W: Write>(stream: &SpikeStream, mut out: W) -> Result<()> {
    out.write_all(&encode_header(stream)?)?;
    out.write_all(stream.packed())?;
    out.flush()?;
    Ok(())
}

pub fn read_stream<R: Read>(mut input: R) -> Result<SpikeStream> {
    let mut hdr = [0u8; HEADER_LEN];
    input
        .read_exact(&mut hdr)
        .map_err(|e| Error::format("spike stream", format!("truncated header: {e}")))?;
    if &hdr[0..4] != MAGIC {
        return Err(Error::format("spike stream", "bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(hdr[o..o + 4].try_into().unwrap());
    let f32_at = |o: usize| f32::from_le_bytes(hdr[o..o + 4].try_into().unwrap());
    let version = u16::from_le_bytes([hdr[4], hdr[5]]);
    if version != VERSION {
        return Err(Error::format("spike stream", format!("unsupported version {version}")));
    }
    let (h, w, t) = (u32_at(6) as usize, u32_at(10) as usize, u32_at(14) as usize);
    let meta = StreamMeta {
        pattern: BayerPattern::from_code(hdr[18])?,
        reset_mode: ResetMode::from_code(hdr[19])?,
        threshold: f32_at(20),
        sigma_g: f32_at(24),
        sigma_p: f32_at(28),
    };
    let len = h
        .checked_mul(w)
        .and_then(|v| v.checked_mul(t))
        .ok_or_else(|| Error::format("spike stream", "dimensions overflow"))?;
    let mut bits = vec![0u8; len.div_ceil(8)];
    input
        .read_exact(&mut bits)
        .map_err(|e| Error::format("spike stream", format!("truncated payload: {e}")))?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::format("spike stream", "trailing bytes after payload"));
    }
    debug_assert_eq!(bits.len(), payload_len(h, w, t));
    SpikeStream::from_packed((h, w, t), bits, meta)
}

pub fn save_stream(stream: &SpikeStream, path: impl AsRef<Path>) -> Result<()> {
    write_stream(stream, BufWriter::new(File::create(path)?))
}

pub fn load_stream(path: impl AsRef<Path>) -> Result<SpikeStream> {
    read_stream(BufReader::new(File::open(path)?))
}
