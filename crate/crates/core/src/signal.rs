//! Windowing, resampling onto a common grid, and moving-average smoothing.

use crate::datamodel::{Device, SensorKind, SensorStream};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }
}

/// One uniformly sampled axis of one sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSignal {
    pub device: Device,
    pub sensor: SensorKind,
    pub axis: Axis,
    pub rate_hz: f64,
    pub values: Vec<f64>,
}

/// Parameters of the per-stream preprocessing chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    pub target_hz: f64,
    pub sma_window: usize,
    pub window_start_s: f64,
    pub window_end_s: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            target_hz: 50.0,
            sma_window: 5,
            window_start_s: 6.0,
            window_end_s: 14.0,
        }
    }
}

impl SignalConfig {
    pub fn n_samples(&self) -> usize {
        grid_len(self.target_hz, self.window_start_s, self.window_end_s)
    }
}

fn grid_len(target_hz: f64, start_s: f64, end_s: f64) -> usize {
    (target_hz * (end_s - start_s)).round().max(0.0) as usize
}

fn seconds_to_ns(s: f64) -> i64 {
    (s * 1e9).round() as i64
}

/// Keeps the samples with `start_s <= t < end_s`.
pub fn extract_window(stream: &SensorStream, start_s: f64, end_s: f64) -> Result<SensorStream> {
    let (lo, hi) = window_bounds(stream, start_s, end_s)?;
    SensorStream::new(stream.device(), stream.sensor(), stream.samples()[lo..hi].to_vec())
}

fn window_bounds(stream: &SensorStream, start_s: f64, end_s: f64) -> Result<(usize, usize)> {
    let (start, end) = (seconds_to_ns(start_s), seconds_to_ns(end_s));
    let samples = stream.samples();
    let lo = samples.partition_point(|s| s.t_ns < start);
    let hi = samples.partition_point(|s| s.t_ns < end);
    if hi < lo + 2 {
        return Err(Error::WindowEmpty { start_s, end_s });
    }
    Ok((lo, hi))
}

/// Centered moving average. Near the edges the window is truncated to the
/// samples that exist, so the output keeps the input length.
pub fn sma_filter(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::EvenWindow(window));
    }
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let half = window / 2;
    let n = signal.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let center = signal[i];
            // deviations from the centre keep constant runs bit-exact
            let dev: f64 = signal[lo..=hi].iter().map(|v| v - center).sum();
            center + dev / (hi - lo + 1) as f64
        })
        .collect())
}

/// Linear interpolation onto `start_s + k / target_hz`. Neighbouring samples
/// just outside the window are used for bracketing; grid points beyond the
/// stream's extent take the nearest sample value.
pub fn resample(stream: &SensorStream, target_hz: f64, start_s: f64, end_s: f64) -> Result<[AxisSignal; 3]> {
    if !(target_hz > 0.0 && target_hz.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    window_bounds(stream, start_s, end_s)?;
    let samples = stream.samples();
    let n = grid_len(target_hz, start_s, end_s);
    let step_ns = 1e9 / target_hz;
    let start_ns = start_s * 1e9;

    let mut axes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut j = 0usize;
    for k in 0..n {
        let t = start_ns + k as f64 * step_ns;
        while j + 1 < samples.len() && (samples[j + 1].t_ns as f64) <= t {
            j += 1;
        }
        let a = &samples[j];
        let vals = if (a.t_ns as f64) >= t || j + 1 == samples.len() {
            [a.x, a.y, a.z]
        } else {
            let b = &samples[j + 1];
            let frac = (t - a.t_ns as f64) / (b.t_ns - a.t_ns) as f64;
            [
                a.x + frac * (b.x - a.x),
                a.y + frac * (b.y - a.y),
                a.z + frac * (b.z - a.z),
            ]
        };
        for (axis, v) in axes.iter_mut().zip(vals) {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput);
            }
            axis.push(v);
        }
    }
    let [x, y, z] = axes;
    let make = |axis, values| AxisSignal {
        device: stream.device(),
        sensor: stream.sensor(),
        axis,
        rate_hz: target_hz,
        values,
    };
    Ok([make(Axis::X, x), make(Axis::Y, y), make(Axis::Z, z)])
}

/// window → resample → SMA, applied per axis.
pub fn preprocess(stream: &SensorStream, cfg: &SignalConfig) -> Result<[AxisSignal; 3]> {
    let mut axes = resample(stream, cfg.target_hz, cfg.window_start_s, cfg.window_end_s)?;
    for a in &mut axes {
        a.values = sma_filter(&a.values, cfg.sma_window)?;
    }
    Ok(axes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::Sample;
    use proptest::prelude::*;

    fn uniform_stream(rate: f64, seconds: f64, f: impl Fn(f64) -> f64) -> SensorStream {
        let n = (rate * seconds).round() as i64;
        let samples = (0..n)
            .map(|k| {
                let t_ns = (k as f64 * 1e9 / rate).round() as i64;
                let t = t_ns as f64 * 1e-9;
                Sample::new(t_ns, f(t), 0.5 * f(t), 1.0)
            })
            .collect();
        SensorStream::new(Device::Band, SensorKind::Accelerometer, samples).unwrap()
    }

    #[test]
    fn window_at_100hz() {
        let s = uniform_stream(100.0, 16.0, |t| t);
        let w = extract_window(&s, 6.0, 14.0).unwrap();
        assert_eq!(w.samples().len(), 800);
        assert_eq!(w.samples()[0].t_ns, 6_000_000_000);

        let short = uniform_stream(100.0, 5.0, |t| t);
        assert!(matches!(extract_window(&short, 6.0, 14.0), Err(Error::WindowEmpty { .. })));

        let full = extract_window(&s, 0.0, 16.0).unwrap();
        assert_eq!(full.samples(), s.samples());
    }

    #[test]
    fn sma_examples() {
        assert_eq!(sma_filter(&[0.0, 3.0, 0.0], 3).unwrap(), vec![1.5, 1.0, 1.5]);
        let x = [0.3, -1.0, 2.5, 7.0];
        assert_eq!(sma_filter(&x, 1).unwrap(), x.to_vec());
        assert_eq!(sma_filter(&[0.1; 9], 5).unwrap(), vec![0.1; 9]);
        assert!(matches!(sma_filter(&x, 4), Err(Error::EvenWindow(4))));
        assert!(matches!(sma_filter(&x, 0), Err(Error::EvenWindow(0))));
        assert!(matches!(sma_filter(&[], 3), Err(Error::EmptySignal)));
    }

    #[test]
    fn resample_constant_and_ramp() {
        let c = uniform_stream(62.0, 16.0, |_| 9.8);
        let [x, _, z] = resample(&c, 50.0, 6.0, 14.0).unwrap();
        assert_eq!(x.values.len(), 400);
        assert!(x.values.iter().all(|&v| v == 9.8));
        assert!(z.values.iter().all(|&v| v == 1.0));

        let ramp = uniform_stream(180.0, 16.0, |t| t);
        let [x, ..] = resample(&ramp, 50.0, 6.0, 14.0).unwrap();
        for (k, v) in x.values.iter().enumerate() {
            let t = 6.0 + k as f64 / 50.0;
            assert!((v - t).abs() < 1e-12, "k={k} v={v} t={t}");
        }
    }

    #[test]
    fn resample_sinusoid_from_62hz() {
        let f = |t: f64| (2.0 * std::f64::consts::PI * 2.0 * t).sin();
        let s = uniform_stream(62.0, 16.0, f);
        let [x, ..] = resample(&s, 50.0, 6.0, 14.0).unwrap();
        let max_err = x
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| (v - f(6.0 + k as f64 / 50.0)).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 0.01, "max error {max_err}");
    }

    #[test]
    fn resample_is_idempotent_on_uniform_grid() {
        let f = |t: f64| (3.1 * t).sin() * 4.0 + 0.2 * t;
        let s = uniform_stream(50.0, 16.0, f);
        let [x, ..] = resample(&s, 50.0, 6.0, 14.0).unwrap();
        let w = extract_window(&s, 6.0, 14.0).unwrap();
        for (v, p) in x.values.iter().zip(w.samples()) {
            assert!((v - p.x).abs() <= 1e-12 * p.x.abs().max(1.0));
        }
    }

    #[test]
    fn resample_rejects_uncovered_window() {
        let s = uniform_stream(50.0, 5.0, |t| t);
        assert!(matches!(resample(&s, 50.0, 6.0, 14.0), Err(Error::WindowEmpty { .. })));
    }

    proptest! {
        #[test]
        fn sma_preserves_length_and_bounds(
            xs in prop::collection::vec(-1e3f64..1e3, 1..80),
            half in 0usize..6,
        ) {
            let w = 2 * half + 1;
            let out = sma_filter(&xs, w).unwrap();
            prop_assert_eq!(out.len(), xs.len());
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
            for v in out {
                prop_assert!(v >= lo - tol && v <= hi + tol);
            }
        }

        #[test]
        fn sma_keeps_constants(c in -1e6f64..1e6, n in 1usize..50, half in 0usize..5) {
            let out = sma_filter(&vec![c; n], 2 * half + 1).unwrap();
            prop_assert!(out.iter().all(|&v| v == c));
        }
    }
}
