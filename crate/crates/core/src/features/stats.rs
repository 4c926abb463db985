use crate::error::{Error, Result};

pub const STAT_NAMES: [&str; 11] = [
    "mean", "variance", "std", "skewness", "min", "max", "median", "range", "rms", "zcr", "mcr",
];

pub const COVARIANCE_NAMES: [&str; 3] = ["cov_xy", "cov_xz", "cov_yz"];

/// Shifted mean: exact for constant input.
pub(crate) fn mean(x: &[f64]) -> f64 {
    let x0 = x[0];
    x0 + x.iter().map(|v| v - x0).sum::<f64>() / x.len() as f64
}

fn crossing_rate(x: &[f64], level: f64) -> f64 {
    let changes = x
        .windows(2)
        .filter(|w| (w[0] - level < 0.0) != (w[1] - level < 0.0))
        .count();
    changes as f64 / (x.len() - 1) as f64
}

/// Per-axis statistics in [`STAT_NAMES`] order. Variance is the
/// population variance; skewness is the population third standardized
/// moment and is 0 for a flat signal.
pub fn stat_features(x: &[f64]) -> Result<[f64; 11]> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mu = mean(x);
    let (m2, m3) = x.iter().fold((0.0, 0.0), |(a, b), v| {
        let d = v - mu;
        (a + d * d, b + d * d * d)
    });
    let var = m2 / n;
    let std = var.sqrt();
    let skew = if std > 0.0 { (m3 / n) / (std * std * std) } else { 0.0 };

    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();

    Ok([
        mu,
        var,
        std,
        skew,
        min,
        max,
        median,
        max - min,
        rms,
        crossing_rate(x, 0.0),
        crossing_rate(x, mu),
    ])
}

/// Population covariances between the three axes of one sensor.
pub fn axis_covariances(x: &[f64], y: &[f64], z: &[f64]) -> Result<[f64; 3]> {
    if x.len() != y.len() || x.len() != z.len() {
        return Err(Error::LengthMismatch(x.len(), y.len().max(z.len())));
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let (mx, my, mz) = (mean(x), mean(y), mean(z));
    let cov = |a: &[f64], ma: f64, b: &[f64], mb: f64| {
        a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum::<f64>() / a.len() as f64
    };
    Ok([cov(x, mx, y, my), cov(x, mx, z, mz), cov(y, my, z, mz)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn get(f: &[f64; 11], name: &str) -> f64 {
        f[STAT_NAMES.iter().position(|n| *n == name).unwrap()]
    }

    #[test]
    fn constant_signal() {
        let f = stat_features(&[2.0; 4]).unwrap();
        assert_eq!(get(&f, "mean"), 2.0);
        assert_eq!(get(&f, "variance"), 0.0);
        assert_eq!(get(&f, "skewness"), 0.0);
        assert_eq!(get(&f, "range"), 0.0);
        assert_eq!(get(&f, "rms"), 2.0);
        assert_eq!(get(&f, "zcr"), 0.0);
        assert_eq!(get(&f, "mcr"), 0.0);
    }

    #[test]
    fn alternating_signal() {
        let f = stat_features(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        assert_eq!(get(&f, "mean"), 0.0);
        assert_eq!(get(&f, "zcr"), 1.0);
        assert_eq!(get(&f, "rms"), 1.0);
        assert_eq!(get(&f, "range"), 2.0);
    }

    #[test]
    fn ramp_signal() {
        let f = stat_features(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(get(&f, "mean"), 1.5);
        assert_eq!(get(&f, "variance"), 1.25);
        assert_eq!(get(&f, "median"), 1.5);
        assert!((get(&f, "mcr") - 1.0 / 3.0).abs() < 1e-15);
        assert!(get(&f, "skewness").abs() < 1e-15);
    }

    #[test]
    fn too_short() {
        assert!(matches!(stat_features(&[1.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn covariance_of_scaled_axes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        let z = [4.0, 3.0, 2.0, 1.0];
        let c = axis_covariances(&x, &y, &z).unwrap();
        assert_eq!(c, [2.5, -1.25, -2.5]);
    }

    proptest! {
        #[test]
        fn symmetric_signal_has_zero_skew(
            half in prop::collection::vec(-50.0f64..50.0, 1..40),
            center in -10.0f64..10.0,
        ) {
            let mut x: Vec<f64> = half.iter().map(|d| center + d).collect();
            x.extend(half.iter().map(|d| center - d));
            let f = stat_features(&x).unwrap();
            prop_assert!(get(&f, "skewness").abs() < 1e-9);
        }
    }
}
