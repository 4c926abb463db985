//! Device-level gait descriptors computed from the 3-axis accelerometer and
//! gyroscope of one device.
//!
//! Gravity direction is the normalized mean acceleration; the heading
//! direction is the principal axis of the acceleration left over after
//! removing its gravity component. Velocities and rotation angles come from
//! trapezoidal integration at the signal rate.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::spectral::{dominant_frequency, power_spectrum};
use super::stats::mean;
use crate::error::{Error, Result};

pub const GAIT_NAMES: [&str; 13] = [
    "movement_intensity",
    "nsma",
    "eigenvalue_1",
    "eigenvalue_2",
    "eigenvalue_3",
    "corr_gravity_heading",
    "velocity_heading",
    "velocity_gravity",
    "dominant_freq",
    "energy",
    "accel_energy",
    "rotation_angle_gravity",
    "rotation_energy",
];

/// Index in [`GAIT_NAMES`] of the first gyroscope-derived feature.
pub(crate) const GYRO_FEATURES_START: usize = 11;

fn to_vectors(axes: [&[f64]; 3]) -> Result<Vec<Vector3<f64>>> {
    let n = axes[0].len();
    if axes.iter().any(|a| a.len() != n) {
        return Err(Error::LengthMismatch(n, axes[1].len().max(axes[2].len())));
    }
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    Ok((0..n)
        .map(|i| Vector3::new(axes[0][i], axes[1][i], axes[2][i]))
        .collect())
}

fn covariance(v: &[Vector3<f64>], center: &Vector3<f64>) -> Matrix3<f64> {
    let mut c = Matrix3::zeros();
    for p in v {
        let d = p - center;
        c += d * d.transpose();
    }
    c / v.len() as f64
}

/// Eigen-decomposition with eigenvalues descending and each eigenvector's
/// largest-magnitude component made positive.
fn sorted_eigen(c: Matrix3<f64>) -> ([f64; 3], [Vector3<f64>; 3]) {
    let eig = SymmetricEigen::new(c);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let vals = idx.map(|i| eig.eigenvalues[i]);
    let vecs = idx.map(|i| {
        let v: Vector3<f64> = eig.eigenvectors.column(i).into();
        let k = v.iamax();
        if v[k] < 0.0 {
            -v
        } else {
            v
        }
    });
    (vals, vecs)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa > 0.0 && sbb > 0.0 {
        sab / (saa * sbb).sqrt()
    } else {
        0.0
    }
}

/// Mean of the running trapezoidal integral of `x` (starting at 0).
fn mean_integral(x: &[f64], dt: f64) -> f64 {
    let mut acc = 0.0;
    let mut total = 0.0;
    for w in x.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dt;
        total += acc;
    }
    total / x.len() as f64
}

fn mean_removed(x: Vec<f64>) -> Vec<f64> {
    let m = mean(&x);
    x.into_iter().map(|v| v - m).collect()
}

/// Gait features in [`GAIT_NAMES`] order. The rotation features need the
/// gyroscope; without it this fails with `MissingSensor`.
pub fn gait_features(accel: [&[f64]; 3], gyro: Option<[&[f64]; 3]>, rate_hz: f64) -> Result<[f64; 13]> {
    let gyro = gyro.ok_or_else(|| Error::MissingSensor("gyroscope required for rotation features".into()))?;
    let a = to_vectors(accel)?;
    let w = to_vectors(gyro)?;
    if w.len() != a.len() {
        return Err(Error::LengthMismatch(a.len(), w.len()));
    }
    let n = a.len() as f64;
    let dt = 1.0 / rate_hz;

    let magnitude: Vec<f64> = a.iter().map(|v| v.norm()).collect();
    let movement_intensity = mean(&magnitude);
    let nsma = a.iter().map(|v| v.x.abs() + v.y.abs() + v.z.abs()).sum::<f64>() / n;

    let center = a[0] + a.iter().fold(Vector3::zeros(), |s, v| s + (v - a[0])) / n;
    let (eigenvalues, _) = sorted_eigen(covariance(&a, &center));

    let gravity_dir = if center.norm() > 0.0 {
        center.normalize()
    } else {
        Vector3::z()
    };
    let residual: Vec<Vector3<f64>> = a
        .iter()
        .map(|v| {
            let d = v - center;
            d - gravity_dir * d.dot(&gravity_dir)
        })
        .collect();
    let (_, res_vecs) = sorted_eigen(covariance(&residual, &Vector3::zeros()));
    let heading_dir = res_vecs[0];

    let along_gravity: Vec<f64> = a.iter().map(|v| v.dot(&gravity_dir)).collect();
    let along_heading: Vec<f64> = a.iter().map(|v| v.dot(&heading_dir)).collect();
    let corr = pearson(&along_gravity, &along_heading);
    let velocity_heading = mean_integral(&mean_removed(along_heading), dt);
    let velocity_gravity = mean_integral(&mean_removed(along_gravity), dt);

    let dominant = dominant_frequency(&magnitude, rate_hz)?;
    let energy = power_spectrum(&magnitude).iter().sum::<f64>() / n;
    let accel_energy = magnitude.iter().map(|m| m * m).sum::<f64>() / n;

    let spin: Vec<f64> = w.iter().map(|v| v.dot(&gravity_dir)).collect();
    let rotation_angle = mean_integral(&spin, dt);
    let rotation_energy = w.iter().map(|v| v.norm_squared()).sum::<f64>() / n;

    Ok([
        movement_intensity,
        nsma,
        eigenvalues[0],
        eigenvalues[1],
        eigenvalues[2],
        corr,
        velocity_heading,
        velocity_gravity,
        dominant,
        energy,
        accel_energy,
        rotation_angle,
        rotation_energy,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn get(f: &[f64; 13], name: &str) -> f64 {
        f[GAIT_NAMES.iter().position(|n| *n == name).unwrap()]
    }

    #[test]
    fn stationary_device() {
        let n = 400;
        let (x, y, z) = (vec![0.0; n], vec![0.0; n], vec![9.8; n]);
        let zero = vec![0.0; n];
        let f = gait_features([&x, &y, &z], Some([&zero, &zero, &zero]), 50.0).unwrap();
        assert!((get(&f, "movement_intensity") - 9.8).abs() < 1e-12);
        for e in ["eigenvalue_1", "eigenvalue_2", "eigenvalue_3"] {
            assert_eq!(get(&f, e), 0.0);
        }
        assert_eq!(get(&f, "velocity_heading"), 0.0);
        assert_eq!(get(&f, "velocity_gravity"), 0.0);
        assert_eq!(get(&f, "rotation_energy"), 0.0);
        assert_eq!(get(&f, "rotation_angle_gravity"), 0.0);
        assert!((get(&f, "nsma") - 9.8).abs() < 1e-12);
    }

    #[test]
    fn vertical_bounce_dominant_frequency() {
        let n = 400;
        let t = |k: usize| k as f64 / 50.0;
        let x: Vec<f64> = (0..n).map(|k| 0.3 * (2.0 * PI * 0.5 * t(k)).sin()).collect();
        let y = vec![0.0; n];
        let z: Vec<f64> = (0..n).map(|k| 9.8 + 2.0 * (2.0 * PI * 2.0 * t(k)).sin()).collect();
        let zero = vec![0.0; n];
        let f = gait_features([&x, &y, &z], Some([&zero, &zero, &zero]), 50.0).unwrap();
        assert_eq!(get(&f, "dominant_freq"), 2.0);
        let eig = [get(&f, "eigenvalue_1"), get(&f, "eigenvalue_2"), get(&f, "eigenvalue_3")];
        assert!(eig[0] >= eig[1] && eig[1] >= eig[2] && eig[2] >= -1e-12);
        // variance of a 2 m/s² sinusoid is 2
        assert!((eig[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_needs_gyroscope() {
        let x = vec![1.0; 16];
        assert!(matches!(gait_features([&x, &x, &x], None, 50.0), Err(Error::MissingSensor(_))));
    }

    #[test]
    fn constant_spin_about_gravity() {
        let n = 100;
        let (x, y, z) = (vec![0.0; n], vec![0.0; n], vec![9.8; n]);
        let zero = vec![0.0; n];
        let spin = vec![1.0; n];
        let f = gait_features([&x, &y, &z], Some([&zero, &zero, &spin]), 50.0).unwrap();
        // running integral of 1 rad/s over k/50 s, averaged over k = 0..n-1
        let expected = (0..n).map(|k| k as f64 / 50.0).sum::<f64>() / n as f64;
        assert!((get(&f, "rotation_angle_gravity") - expected).abs() < 1e-12);
        assert_eq!(get(&f, "rotation_energy"), 1.0);
    }
}
