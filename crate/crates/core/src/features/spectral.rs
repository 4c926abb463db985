use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const FFT_NAMES: [&str; 6] = ["energy", "top_freq_1", "top_freq_2", "top_freq_3", "top_freq_4", "max_bin"];

const MIN_LEN: usize = 8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Squared magnitudes of the DFT of `x`, all `N` bins.
pub fn power_spectrum(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(x.len()));
    fft.process(&mut buf);
    buf.iter().map(|c| c.norm_sqr()).collect()
}

/// One-sided non-DC bins `1..=N/2` ordered by descending magnitude, ties
/// toward the lower bin.
fn ranked_bins(power: &[f64]) -> Vec<usize> {
    let mut bins: Vec<usize> = (1..=power.len() / 2).collect();
    bins.sort_by(|&a, &b| power[b].total_cmp(&power[a]).then(a.cmp(&b)));
    bins
}

/// Frequency in Hz of the strongest non-DC bin.
pub fn dominant_frequency(x: &[f64], rate_hz: f64) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let power = power_spectrum(x);
    Ok(ranked_bins(&power)[0] as f64 * rate_hz / x.len() as f64)
}

/// Energy `Σ|X_k|²/N` of the raw signal, the four strongest non-DC
/// frequencies in Hz, and the index of the strongest non-DC bin. The mean
/// only affects the DC bin, so one transform of the raw signal serves both.
pub fn fft_features(x: &[f64], rate_hz: f64) -> Result<[f64; 6]> {
    if x.len() < MIN_LEN {
        return Err(Error::TooShort {
            needed: MIN_LEN,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let power = power_spectrum(x);
    let energy = power.iter().sum::<f64>() / n;
    let bins = ranked_bins(&power);
    let hz = |k: usize| k as f64 * rate_hz / n;
    Ok([energy, hz(bins[0]), hz(bins[1]), hz(bins[2]), hz(bins[3]), bins[0] as f64])
}
