use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Red = 0,
    Green = 1,
    Blue = 2,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Red, Channel::Green, Channel::Blue];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// 2x2 color filter tiling, named by its top-left, top-right, bottom-left,
/// bottom-right cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BayerPattern {
    Rggb,
    Bggr,
    Grbg,
    Gbrg,
}

impl BayerPattern {
    pub const ALL: [BayerPattern; 4] = [
        BayerPattern::Rggb,
        BayerPattern::Bggr,
        BayerPattern::Grbg,
        BayerPattern::Gbrg,
    ];

    fn tile(self) -> [[Channel; 2]; 2] {
        use Channel::*;
        match self {
            BayerPattern::Rggb => [[Red, Green], [Green, Blue]],
            BayerPattern::Bggr => [[Blue, Green], [Green, Red]],
            BayerPattern::Grbg => [[Green, Red], [Blue, Green]],
            BayerPattern::Gbrg => [[Green, Blue], [Red, Green]],
        }
    }

    #[inline]
    pub fn channel_at(self, y: usize, x: usize) -> Channel {
        self.tile()[y & 1][x & 1]
    }

    /// Header code used by the spike stream file format.
    pub fn code(self) -> u8 {
        match self {
            BayerPattern::Rggb => 1,
            BayerPattern::Bggr => 2,
            BayerPattern::Grbg => 3,
            BayerPattern::Gbrg => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Option<Self>> {
        Ok(match code {
            0 => None,
            1 => Some(BayerPattern::Rggb),
            2 => Some(BayerPattern::Bggr),
            3 => Some(BayerPattern::Grbg),
            4 => Some(BayerPattern::Gbrg),
            other => return Err(Error::format("spike stream", format!("unknown pattern code {other}"))),
        })
    }
}

impl std::str::FromStr for BayerPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rggb" => Ok(BayerPattern::Rggb),
            "bggr" => Ok(BayerPattern::Bggr),
            "grbg" => Ok(BayerPattern::Grbg),
            "gbrg" => Ok(BayerPattern::Gbrg),
            _ => Err(Error::InvalidParam(format!("unknown Bayer pattern {s:?}"))),
        }
    }
}

/// Per-channel binary masks of a Bayer tiling over a fixed image size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BayerMask {
    pattern: BayerPattern,
    height: usize,
    width: usize,
    masks: [Vec<u8>; 3],
}

pub fn make_bayer_mask(dims: (usize, usize), pattern: BayerPattern) -> Result<BayerMask> {
    let (h, w) = dims;
    if h == 0 || w == 0 {
        return Err(Error::EmptyImage);
    }
    let mut masks = [vec![0u8; h * w], vec![0u8; h * w], vec![0u8; h * w]];
    for y in 0..h {
        for x in 0..w {
            masks[pattern.channel_at(y, x).index()][y * w + x] = 1;
        }
    }
    Ok(BayerMask {
        pattern,
        height: h,
        width: w,
        masks,
    })
}

impl BayerMask {
    pub fn pattern(&self) -> BayerPattern {
        self.pattern
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Row-major 0/1 mask for one channel.
    pub fn mask(&self, c: Channel) -> &[u8] {
        &self.masks[c.index()]
    }

    #[inline]
    pub fn channel_at(&self, y: usize, x: usize) -> Channel {
        self.pattern.channel_at(y, x)
    }

    pub fn count(&self, c: Channel) -> usize {
        self.masks[c.index()].iter().filter(|&&m| m == 1).count()
    }
}
