//! Thresholded uniform noise: the seed points of raindrop highlights.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseMap {
    height: usize,
    width: usize,
    values: Vec<u8>,
}

impl NoiseMap {
    pub fn from_vec(height: usize, width: usize, values: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyImage);
        }
        if values.len() != height * width {
            return Err(Error::dims(height * width, values.len()));
        }
        Ok(Self { height, width, values })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> u8 {
        self.values[y * self.width + x]
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    /// Keeps samples `>= 255 - noise_level` and zeroes the rest.
    pub fn thresholded(&self, noise_level: u8) -> NoiseMap {
        let cut = 255 - noise_level;
        NoiseMap {
            height: self.height,
            width: self.width,
            values: self.values.iter().map(|&v| if v >= cut { v } else { 0 }).collect(),
        }
    }
}

/// Raw uniform samples on `[0, 255]`, row-major, one ChaCha8 word per pixel
/// (the top byte of `next_u32`).
pub fn uniform_noise(dims: (usize, usize), seed: u64) -> Result<NoiseMap> {
    let (h, w) = dims;
    if h == 0 || w == 0 {
        return Err(Error::EmptyImage);
    }
    let mut rng = rng_from_seed(seed);
    let values = (0..h * w).map(|_| (rng.next_u32() >> 24) as u8).collect();
    NoiseMap::from_vec(h, w, values)
}

pub fn generate_noise_map(dims: (usize, usize), noise_level: u8, seed: u64) -> Result<NoiseMap> {
    Ok(uniform_noise(dims, seed)?.thresholded(noise_level))
}
