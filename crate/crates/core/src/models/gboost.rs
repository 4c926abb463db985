//! Gradient boosting with regression-tree base learners.
//!
//! Regression boosts squared error from `mean(y)`. Classification boosts
//! binomial deviance from the log-odds of the positive class; each stage
//! tree is grown on the residuals `y - p` and its leaves are replaced by the
//! Newton step `Σ(y - p) / Σ p(1 - p)` over the rows they hold.

use super::tree::{check_binary, fit_tree, Presorted, TreeNode, TreeParams};
use super::Task;
use crate::error::{Error, Result};

pub struct GradientFit {
    pub init: f64,
    pub trees: Vec<TreeNode>,
    /// Training loss before any stage, then after each stage (MSE for
    /// regression, mean deviance for classification).
    pub train_loss: Vec<f64>,
}

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn mse(y: &[f64], f: &[f64]) -> f64 {
    y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

fn deviance(y: &[f64], f: &[f64]) -> f64 {
    // log(1 + e^f) - y f, computed stably
    y.iter()
        .zip(f)
        .map(|(&t, &z)| z.max(0.0) + (-z.abs()).exp().ln_1p() - t * z)
        .sum::<f64>()
        / y.len() as f64
}

pub fn train_gb_regressor(
    x: &[Vec<f64>],
    y: &[f64],
    n_estimators: usize,
    learning_rate: f64,
    params: TreeParams,
) -> Result<GradientFit> {
    if x.is_empty() {
        return Err(Error::EmptyData);
    }
    let data = Presorted::new(x)?;
    let init = y.iter().sum::<f64>() / y.len() as f64;
    let mut f = vec![init; y.len()];
    let w = vec![1.0; y.len()];
    let mut trees = Vec::with_capacity(n_estimators);
    let mut train_loss = vec![mse(y, &f)];
    for _ in 0..n_estimators {
        let residual: Vec<f64> = y.iter().zip(&f).map(|(t, p)| t - p).collect();
        let tree = fit_tree(&data, &residual, &w, Task::Regress, params);
        for (fi, r) in f.iter_mut().zip(x) {
            *fi += learning_rate * tree.predict(r);
        }
        trees.push(tree);
        train_loss.push(mse(y, &f));
    }
    Ok(GradientFit { init, trees, train_loss })
}

pub fn train_gb_classifier(
    x: &[Vec<f64>],
    y: &[f64],
    n_estimators: usize,
    learning_rate: f64,
    params: TreeParams,
) -> Result<GradientFit> {
    if x.is_empty() {
        return Err(Error::EmptyData);
    }
    check_binary(y)?;
    let pos = y.iter().sum::<f64>();
    if pos == 0.0 || pos == y.len() as f64 {
        return Err(Error::SingleClass);
    }
    let data = Presorted::new(x)?;
    let prior = pos / y.len() as f64;
    let init = (prior / (1.0 - prior)).ln();
    let mut f = vec![init; y.len()];
    let w = vec![1.0; y.len()];
    let mut trees = Vec::with_capacity(n_estimators);
    let mut train_loss = vec![deviance(y, &f)];
    for _ in 0..n_estimators {
        let p: Vec<f64> = f.iter().map(|&z| logistic(z)).collect();
        let residual: Vec<f64> = y.iter().zip(&p).map(|(t, q)| t - q).collect();
        let mut tree = fit_tree(&data, &residual, &w, Task::Regress, params);
        newton_leaves(&mut tree, x, &residual, &p);
        for (fi, r) in f.iter_mut().zip(x) {
            *fi += learning_rate * tree.predict(r);
        }
        trees.push(tree);
        train_loss.push(deviance(y, &f));
    }
    Ok(GradientFit { init, trees, train_loss })
}

/// Rewrites each leaf with the Newton step of the rows routed to it.
fn newton_leaves(tree: &mut TreeNode, x: &[Vec<f64>], residual: &[f64], p: &[f64]) {
    let n_leaves = tree.n_leaves();
    let mut num = vec![0.0; n_leaves];
    let mut den = vec![0.0; n_leaves];
    for ((row, r), q) in x.iter().zip(residual).zip(p) {
        let leaf = tree.leaf_index(row);
        num[leaf] += r;
        den[leaf] += q * (1.0 - q);
    }
    let mut i = 0;
    tree.map_leaves(&mut |_| {
        let v = if den[i] > 1e-12 { num[i] / den[i] } else { 0.0 };
        i += 1;
        v
    });
}

pub fn gb_predict(init: f64, trees: &[TreeNode], learning_rate: f64, x: &[f64]) -> f64 {
    init + learning_rate * trees.iter().map(|t| t.predict(x)).sum::<f64>()
}
