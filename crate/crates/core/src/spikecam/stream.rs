//! Bit-packed binary spike streams.
//!
//! Bits are stored in `(t, y, x)` lexicographic order, most significant bit
//! first within each byte, so the in-memory buffer is exactly the on-disk
//! payload.

use serde::{Deserialize, Serialize};

use super::bayer::BayerPattern;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetMode {
    ResetToZero,
    #[default]
    SubtractThreshold,
}

impl ResetMode {
    pub fn code(self) -> u8 {
        match self {
            ResetMode::ResetToZero => 0,
            ResetMode::SubtractThreshold => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(ResetMode::ResetToZero),
            1 => Ok(ResetMode::SubtractThreshold),
            other => Err(Error::format("spike stream", format!("unknown reset mode {other}"))),
        }
    }
}

/// Camera settings recorded alongside a stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamMeta {
    pub pattern: Option<BayerPattern>,
    pub reset_mode: ResetMode,
    pub threshold: f32,
    pub sigma_g: f32,
    pub sigma_p: f32,
}

impl Default for StreamMeta {
    fn default() -> Self {
        Self {
            pattern: None,
            reset_mode: ResetMode::SubtractThreshold,
            threshold: 1.0,
            sigma_g: 0.0,
            sigma_p: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeStream {
    height: usize,
    width: usize,
    timesteps: usize,
    bits: Vec<u8>,
    pub meta: StreamMeta,
}

#[inline]
pub fn payload_len(height: usize, width: usize, timesteps: usize) -> usize {
    (height * width * timesteps).div_ceil(8)
}

impl SpikeStream {
    pub fn zeros(dims: (usize, usize, usize), meta: StreamMeta) -> Self {
        let (h, w, t) = dims;
        Self {
            height: h,
            width: w,
            timesteps: t,
            bits: vec![0; payload_len(h, w, t)],
            meta,
        }
    }

    /// Wraps an already packed payload. Padding bits must be zero.
    pub fn from_packed(dims: (usize, usize, usize), bits: Vec<u8>, meta: StreamMeta) -> Result<Self> {
        let (h, w, t) = dims;
        let need = payload_len(h, w, t);
        if bits.len() != need {
            return Err(Error::format(
                "spike stream",
                format!("payload is {} bytes, expected {need}", bits.len()),
            ));
        }
        let used = h * w * t;
        if used % 8 != 0 {
            let pad_mask = 0xffu8 >> (used % 8);
            if bits[need - 1] & pad_mask != 0 {
                return Err(Error::format("spike stream", "nonzero padding bits"));
            }
        }
        Ok(Self {
            height: h,
            width: w,
            timesteps: t,
            bits,
            meta,
        })
    }

    /// Packs a `(t, y, x)`-ordered 0/1 buffer.
    pub fn pack(dims: (usize, usize, usize), values: &[u8], meta: StreamMeta) -> Result<Self> {
        let (h, w, t) = dims;
        if values.len() != h * w * t {
            return Err(Error::dims(h * w * t, values.len()));
        }
        let mut s = Self::zeros(dims, meta);
        for (i, &v) in values.iter().enumerate() {
            if v != 0 {
                s.bits[i >> 3] |= 0x80 >> (i & 7);
            }
        }
        Ok(s)
    }

    /// Expands to a `(t, y, x)`-ordered 0/1 buffer.
    pub fn unpack(&self) -> Vec<u8> {
        (0..self.bit_len())
            .map(|i| (self.bits[i >> 3] >> (7 - (i & 7))) & 1)
            .collect()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.timesteps)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn timesteps(&self) -> usize {
        self.timesteps
    }

    pub fn bit_len(&self) -> usize {
        self.height * self.width * self.timesteps
    }

    pub fn packed(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    fn index(&self, t: usize, y: usize, x: usize) -> usize {
        debug_assert!(t < self.timesteps && y < self.height && x < self.width);
        (t * self.height + y) * self.width + x
    }

    #[inline]
    pub fn get(&self, t: usize, y: usize, x: usize) -> bool {
        let i = self.index(t, y, x);
        (self.bits[i >> 3] >> (7 - (i & 7))) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, t: usize, y: usize, x: usize, on: bool) {
        let i = self.index(t, y, x);
        let m = 0x80u8 >> (i & 7);
        if on {
            self.bits[i >> 3] |= m;
        } else {
            self.bits[i >> 3] &= !m;
        }
    }

    pub fn total_spikes(&self) -> u64 {
        self.bits.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// Per-pixel spike counts over `t0..t1`, row-major.
    ///
    /// Scans the packed bytes of each frame, skipping empty bytes and
    /// locating set bits with `leading_zeros`.
    pub fn window_counts(&self, t0: usize, t1: usize) -> Vec<u32> {
        let hw = self.height * self.width;
        let mut counts = vec![0u32; hw];
        let t1 = t1.min(self.timesteps);
        if hw == 0 {
            return counts;
        }
        for t in t0..t1 {
            let start = t * hw;
            let end = start + hw;
            let (b0, b1) = (start >> 3, (end - 1) >> 3);
            for b in b0..=b1 {
                let mut byte = self.bits[b];
                if b == b0 {
                    byte &= 0xff >> (start & 7);
                }
                if b == b1 && end & 7 != 0 {
                    byte &= !(0xffu8 >> (end & 7));
                }
                while byte != 0 {
                    let lz = byte.leading_zeros() as usize;
                    counts[b * 8 + lz - start] += 1;
                    byte &= !(0x80u8 >> lz);
                }
            }
        }
        counts
    }

    /// Spike times of one pixel in increasing order.
    pub fn spike_times(&self, y: usize, x: usize) -> Vec<usize> {
        (0..self.timesteps).filter(|&t| self.get(t, y, x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamStats {
    /// Row-major spike count of every pixel over the whole stream.
    pub per_pixel_counts: Vec<u64>,
    pub total_spikes: u64,
    /// Mean spikes per pixel per timestep.
    pub firing_rate: f64,
    /// Fraction of `(pixel, timestep)` cells holding a spike.
    pub sparsity: f64,
}

pub fn stream_stats(stream: &SpikeStream) -> StreamStats {
    let per_pixel_counts: Vec<u64> = stream
        .window_counts(0, stream.timesteps())
        .into_iter()
        .map(u64::from)
        .collect();
    let total = stream.total_spikes();
    let cells = stream.bit_len();
    let frac = if cells == 0 { 0.0 } else { total as f64 / cells as f64 };
    StreamStats {
        per_pixel_counts,
        total_spikes: total,
        firing_rate: frac,
        sparsity: frac,
    }
}
