use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::scalar::Real;

/// Normalized light intensity, every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityFrame<S> {
    values: Plane<S>,
}

impl<S: Real> IntensityFrame<S> {
    pub fn new(values: Plane<S>) -> Result<Self> {
        if let Some(bad) = values
            .as_slice()
            .iter()
            .find(|v| !(**v >= S::zero() && **v <= S::one()))
        {
            return Err(Error::InvalidParam(format!("intensity {bad} outside [0,1]")));
        }
        Ok(Self { values })
    }

    /// Clamps every value into `[0, 1]`; NaN becomes 0.
    pub fn clamped(values: Plane<S>) -> Self {
        Self {
            values: values.map(|v| {
                if v.is_nan() {
                    S::zero()
                } else {
                    v.max(S::zero()).min(S::one())
                }
            }),
        }
    }

    pub fn constant(height: usize, width: usize, value: S) -> Result<Self> {
        Self::new(Plane::filled(height, width, value))
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            values: Plane::zeros(height, width),
        }
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> S {
        self.values.get(y, x)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    pub fn plane(&self) -> &Plane<S> {
        &self.values
    }

    pub fn into_plane(self) -> Plane<S> {
        self.values
    }

    /// Scales to 8 bits with rounding.
    pub fn to_u8(&self) -> Vec<u8> {
        self.values
            .as_slice()
            .iter()
            .map(|v| (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}
