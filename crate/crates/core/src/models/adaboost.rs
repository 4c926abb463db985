//! Discrete AdaBoost over decision stumps, and AdaBoost.R2 with linear loss.

use super::tree::{check_binary, fit_tree, Presorted, TreeNode, TreeParams};
use super::Task;
use crate::error::{Error, Result};

/// Floor on the weighted stump error, keeping stage weights finite on
/// separable data.
pub const ERROR_FLOOR: f64 = 1e-10;

pub struct BoostFit {
    pub trees: Vec<TreeNode>,
    pub stage_weights: Vec<f64>,
    /// Weighted training error of each kept stage.
    pub stage_errors: Vec<f64>,
}

/// `½·ln((1-ε)/ε)` with ε floored at [`ERROR_FLOOR`].
pub fn stage_weight(error: f64) -> f64 {
    let e = error.clamp(ERROR_FLOOR, 1.0 - ERROR_FLOOR);
    0.5 * ((1.0 - e) / e).ln()
}

fn normalize(w: &mut [f64]) -> Result<()> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateWeights);
    }
    w.iter_mut().for_each(|v| *v /= total);
    Ok(())
}

/// Labels are 0/1; stumps output ±1 and the ensemble margin is
/// `Σ α_m h_m(x)`.
pub fn train_adaboost_classifier(
    x: &[Vec<f64>],
    y: &[f64],
    n_estimators: usize,
    learning_rate: f64,
    max_depth: usize,
) -> Result<BoostFit> {
    if x.is_empty() {
        return Err(Error::EmptyData);
    }
    check_binary(y)?;
    let data = Presorted::new(x)?;
    let sign: Vec<f64> = y.iter().map(|&v| if v == 1.0 { 1.0 } else { -1.0 }).collect();
    let mut w = vec![1.0 / y.len() as f64; y.len()];
    let params = TreeParams {
        max_depth: Some(max_depth),
        min_samples_split: 2,
    };

    let mut fit = BoostFit {
        trees: Vec::new(),
        stage_weights: Vec::new(),
        stage_errors: Vec::new(),
    };
    for _ in 0..n_estimators {
        let mut tree = fit_tree(&data, y, &w, Task::Classify, params);
        tree.map_leaves(&mut |p| if p >= 0.5 { 1.0 } else { -1.0 });
        let h: Vec<f64> = x.iter().map(|r| tree.predict(r)).collect();
        let error: f64 = w.iter().zip(&h).zip(&sign).filter(|((_, h), s)| h != s).map(|((w, _), _)| w).sum();
        if error >= 0.5 {
            // no better than chance: keep it only if nothing else exists
            if fit.trees.is_empty() {
                fit.trees.push(tree);
                fit.stage_weights.push(0.0);
                fit.stage_errors.push(error);
            }
            break;
        }
        let alpha = learning_rate * stage_weight(error);
        fit.trees.push(tree);
        fit.stage_weights.push(alpha);
        fit.stage_errors.push(error);
        if error <= ERROR_FLOOR {
            break;
        }
        for ((wi, hi), si) in w.iter_mut().zip(&h).zip(&sign) {
            *wi *= (-alpha * si * hi).exp();
        }
        normalize(&mut w)?;
    }
    Ok(fit)
}

pub fn adaboost_margin(trees: &[TreeNode], alphas: &[f64], x: &[f64]) -> f64 {
    trees.iter().zip(alphas).map(|(t, a)| a * t.predict(x)).sum()
}

/// AdaBoost.R2: weighted regression trees, linear loss `|e|/max|e|`,
/// stage weight `lr·ln(1/β)` with `β = L̄/(1-L̄)`.
pub fn train_adaboost_regressor(
    x: &[Vec<f64>],
    y: &[f64],
    n_estimators: usize,
    learning_rate: f64,
    params: TreeParams,
) -> Result<BoostFit> {
    if x.is_empty() {
        return Err(Error::EmptyData);
    }
    let data = Presorted::new(x)?;
    let mut w = vec![1.0 / y.len() as f64; y.len()];
    let mut fit = BoostFit {
        trees: Vec::new(),
        stage_weights: Vec::new(),
        stage_errors: Vec::new(),
    };
    for _ in 0..n_estimators {
        let tree = fit_tree(&data, y, &w, Task::Regress, params);
        let err: Vec<f64> = x.iter().zip(y).map(|(r, t)| (tree.predict(r) - t).abs()).collect();
        let max_err = err.iter().cloned().fold(0.0, f64::max);
        if max_err == 0.0 {
            fit.trees.push(tree);
            fit.stage_weights.push(1.0);
            fit.stage_errors.push(0.0);
            break;
        }
        let loss: Vec<f64> = err.iter().map(|e| e / max_err).collect();
        let avg: f64 = loss.iter().zip(&w).map(|(l, w)| l * w).sum();
        if avg >= 0.5 {
            if fit.trees.is_empty() {
                fit.trees.push(tree);
                fit.stage_weights.push(1.0);
                fit.stage_errors.push(avg);
            }
            break;
        }
        let beta = (avg / (1.0 - avg)).max(ERROR_FLOOR);
        fit.trees.push(tree);
        fit.stage_weights.push(learning_rate * (1.0 / beta).ln());
        fit.stage_errors.push(avg);
        for (wi, l) in w.iter_mut().zip(&loss) {
            *wi *= beta.powf(learning_rate * (1.0 - l));
        }
        normalize(&mut w)?;
    }
    Ok(fit)
}

/// Weighted median of the stage predictions: the smallest prediction whose
/// cumulative stage weight reaches half the total.
pub fn weighted_median(trees: &[TreeNode], weights: &[f64], x: &[f64]) -> f64 {
    let mut preds: Vec<(f64, f64)> = trees.iter().zip(weights).map(|(t, &w)| (t.predict(x), w)).collect();
    preds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &(p, w) in &preds {
        acc += w;
        if acc >= 0.5 * total {
            return p;
        }
    }
    preds.last().map_or(0.0, |p| p.0)
}
