//! Lasso by cyclic coordinate descent on standardized features.
//!
//! Minimizes `(1/2N)·‖y - Xw - b‖² + α·‖w‖₁` where `X` is standardized to
//! zero mean and unit population variance. Constant columns keep a zero
//! weight. Weights are mapped back to the original feature scale at the end.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoParams {
    pub alpha: f64,
    /// Stop when the largest coordinate change in a sweep falls below this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            tol: 1e-4,
            max_sweeps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Weights on the original feature scale.
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// False when `max_sweeps` ran out first; the last iterate is returned.
    pub converged: bool,
    pub sweeps: usize,
    /// Objective value before the first sweep and after each sweep.
    pub objective: Vec<f64>,
}

pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

pub fn train_lasso(x: &[Vec<f64>], y: &[f64], params: LassoParams) -> Result<LassoFit> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyData);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    let p = x[0].len();
    if x.iter().any(|r| r.len() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: x.iter().map(Vec::len).find(|&l| l != p).unwrap_or(0),
        });
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let nf = n as f64;

    // column-major standardized copy
    let mut means = vec![0.0; p];
    let mut scales = vec![0.0; p];
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(p);
    for j in 0..p {
        let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
        let m = col.iter().sum::<f64>() / nf;
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / nf;
        let sd = var.sqrt();
        means[j] = m;
        if sd > 1e-12 * m.abs().max(1.0) {
            scales[j] = sd;
            z.push(col.iter().map(|v| (v - m) / sd).collect());
        } else {
            z.push(Vec::new());
        }
    }
    let y_mean = y.iter().sum::<f64>() / nf;
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut w = vec![0.0; p];

    let objective = |resid: &[f64], w: &[f64]| {
        resid.iter().map(|r| r * r).sum::<f64>() / (2.0 * nf) + params.alpha * w.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut trace = vec![objective(&resid, &w)];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < params.max_sweeps {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            let col = &z[j];
            if col.is_empty() {
                continue;
            }
            let old = w[j];
            // columns have unit mean square, so the coordinate minimizer is
            // S(ρ, α) with ρ = <z_j, r + z_j w_j> / N
            let rho = col.iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf + old;
            let new = soft_threshold(rho, params.alpha);
            let delta = new - old;
            if delta != 0.0 {
                for (r, a) in resid.iter_mut().zip(col) {
                    *r -= delta * a;
                }
                w[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        trace.push(objective(&resid, &w));
        if max_change < params.tol {
            converged = true;
            break;
        }
    }

    let weights: Vec<f64> = w
        .iter()
        .zip(&scales)
        .map(|(&wj, &s)| if s > 0.0 { wj / s } else { 0.0 })
        .collect();
    let intercept = y_mean - weights.iter().zip(&means).map(|(a, m)| a * m).sum::<f64>();
    Ok(LassoFit {
        weights,
        intercept,
        converged,
        sweeps,
        objective: trace,
    })
}
