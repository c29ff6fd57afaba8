use crate::error::{Error, Result};
use crate::frame::IntensityFrame;
use crate::plane::Plane;
use crate::scalar::Real;
use crate::spikecam::SpikeStream;

/// Clipped window `[center - window/2, center - window/2 + window) ∩ [0, T)`.
pub fn tfp_window(timesteps: usize, center_t: usize, window: usize) -> (usize, usize) {
    let start = center_t as i64 - (window / 2) as i64;
    let end = start + window as i64;
    let clip = |v: i64| v.clamp(0, timesteps as i64) as usize;
    (clip(start), clip(end))
}

/// Spike-count estimate `threshold * upsample * count / len` over the
/// clipped window, clamped to `[0, 1]`.
pub fn tfp_scaled<S: Real>(
    stream: &SpikeStream,
    center_t: usize,
    window: usize,
    threshold: S,
    upsample: u32,
) -> Result<IntensityFrame<S>> {
    if window == 0 {
        return Err(Error::InvalidParam("window must be at least 1".into()));
    }
    let (h, w, t) = stream.dims();
    if center_t >= t {
        return Err(Error::InvalidParam(format!(
            "center {center_t} outside stream of length {t}"
        )));
    }
    let (t0, t1) = tfp_window(t, center_t, window);
    let len = S::of_usize(t1 - t0);
    let gain = threshold * S::of(upsample as f64);
    let counts = stream.window_counts(t0, t1);
    let plane = Plane::from_vec(h, w, counts.into_iter().map(|c| gain * S::of(c as f64) / len).collect())?;
    Ok(IntensityFrame::clamped(plane))
}

/// TFP using the threshold stored in the stream header.
pub fn tfp<S: Real>(stream: &SpikeStream, center_t: usize, window: usize) -> Result<IntensityFrame<S>> {
    tfp_scaled(stream, center_t, window, S::of(stream.meta.threshold as f64), 1)
}

/// Interval bracketing `t`: the last spike at or before `t` and the one after
/// it. Falls back to the first two spikes when none precede `t`, and to the
/// last two when none follow.
fn bracketing_interval(times: &[usize], t: usize) -> Option<usize> {
    if times.len() < 2 {
        return None;
    }
    let after = times.partition_point(|&s| s <= t);
    let i = match after {
        0 => 0,
        n if n == times.len() => n - 2,
        n => n - 1,
    };
    Some(times[i + 1] - times[i])
}

pub fn tfi_scaled<S: Real>(stream: &SpikeStream, t: usize, threshold: S, upsample: u32) -> Result<IntensityFrame<S>> {
    let (h, w, len) = stream.dims();
    if t >= len {
        return Err(Error::InvalidParam(format!("time {t} outside stream of length {len}")));
    }
    let gain = threshold * S::of(upsample as f64);
    let plane = Plane::from_fn(h, w, |y, x| match bracketing_interval(&stream.spike_times(y, x), t) {
        Some(d) => gain / S::of_usize(d),
        None => S::zero(),
    });
    Ok(IntensityFrame::clamped(plane))
}

pub fn tfi<S: Real>(stream: &SpikeStream, t: usize) -> Result<IntensityFrame<S>> {
    tfi_scaled(stream, t, S::of(stream.meta.threshold as f64), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spikecam::{integrate_and_fire, CameraConfig, StreamMeta};

    fn constant_stream(v: f64, steps: usize) -> SpikeStream {
        let frames: Vec<_> = (0..steps).map(|_| IntensityFrame::constant(3, 2, v).unwrap()).collect();
        integrate_and_fire(&frames, &CameraConfig::default()).unwrap()
    }

    #[test]
    fn window_clipping() {
        assert_eq!(tfp_window(100, 50, 10), (45, 55));
        assert_eq!(tfp_window(100, 2, 10), (0, 7));
        assert_eq!(tfp_window(100, 98, 10), (93, 100));
        assert_eq!(tfp_window(100, 50, 100), (0, 100));
        assert_eq!(tfp_window(100, 50, 9), (46, 55));
    }

    #[test]
    fn tfp_cases() {
        let zero = SpikeStream::zeros((2, 2, 50), StreamMeta::default());
        assert_eq!(tfp::<f64>(&zero, 25, 10).unwrap().plane().max_value(), 0.0);
        let ones = SpikeStream::pack((2, 2, 50), &[1; 200], StreamMeta::default()).unwrap();
        assert_eq!(tfp::<f64>(&ones, 25, 10).unwrap().plane().min_value(), 1.0);
        let half = constant_stream(0.5, 400);
        let f = tfp::<f64>(&half, 200, 100).unwrap();
        assert!(f.plane().as_slice().iter().all(|v| (v - 0.5).abs() <= 0.01));
        assert!(tfp::<f64>(&half, 200, 0).is_err());
        assert!(tfp::<f64>(&half, 400, 10).is_err());
    }

    #[test]
    fn tfi_cases() {
        let mut s = SpikeStream::zeros((1, 1, 40), StreamMeta::default());
        s.set(10, 0, 0, true);
        s.set(20, 0, 0, true);
        assert!((tfi::<f64>(&s, 15).unwrap().get(0, 0) - 0.1).abs() < 1e-15);
        // Before the first spike and after the last one, the only interval is used.
        assert!((tfi::<f64>(&s, 3).unwrap().get(0, 0) - 0.1).abs() < 1e-15);
        assert!((tfi::<f64>(&s, 35).unwrap().get(0, 0) - 0.1).abs() < 1e-15);

        let ones = SpikeStream::pack((2, 2, 8), &[1; 32], StreamMeta::default()).unwrap();
        assert_eq!(tfi::<f64>(&ones, 4).unwrap().plane().min_value(), 1.0);

        let quarter = constant_stream(0.25, 200);
        let f = tfi::<f64>(&quarter, 101).unwrap();
        assert!(f.plane().as_slice().iter().all(|&v| v == 0.25));

        let mut single = SpikeStream::zeros((1, 2, 10), StreamMeta::default());
        single.set(3, 0, 0, true);
        let f = tfi::<f64>(&single, 5).unwrap();
        assert_eq!((f.get(0, 0), f.get(0, 1)), (0.0, 0.0));
    }
}
