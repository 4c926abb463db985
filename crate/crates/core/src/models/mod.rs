//! Supervised learners: CART, AdaBoost, gradient boosting and Lasso, all
//! behind one [`Ensemble`] type with a common `predict`.

mod adaboost;
mod gboost;
mod io;
mod lasso;
mod tree;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use adaboost::{
    adaboost_margin, stage_weight, train_adaboost_classifier, train_adaboost_regressor, weighted_median, BoostFit,
    ERROR_FLOOR,
};
pub use gboost::{gb_predict, logistic, train_gb_classifier, train_gb_regressor, GradientFit};
pub use io::{load_model, model_from_str, model_to_string, save_model, MODEL_MAGIC};
pub use lasso::{soft_threshold, train_lasso, LassoFit, LassoParams};
pub use tree::{train_cart, TreeNode, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Classify,
    Regress,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Regress => "regress",
        }
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "classify" => Ok(Task::Classify),
            "regress" => Ok(Task::Regress),
            other => Err(format!("unknown task '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Single classification tree.
    Dt,
    /// Single regression tree.
    Rt,
    AdaBoostClf,
    AdaBoostReg,
    GbClf,
    GbReg,
    Lasso,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Dt,
        ModelKind::Rt,
        ModelKind::AdaBoostClf,
        ModelKind::AdaBoostReg,
        ModelKind::GbClf,
        ModelKind::GbReg,
        ModelKind::Lasso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dt => "dt",
            ModelKind::Rt => "rt",
            ModelKind::AdaBoostClf => "adaboost",
            ModelKind::AdaBoostReg => "abr",
            ModelKind::GbClf => "gbc",
            ModelKind::GbReg => "gbr",
            ModelKind::Lasso => "lasso",
        }
    }

    pub fn task(self) -> Task {
        match self {
            ModelKind::Dt | ModelKind::AdaBoostClf | ModelKind::GbClf => Task::Classify,
            _ => Task::Regress,
        }
    }

    /// The same algorithm family for another task; `None` for Lasso
    /// classification.
    pub fn for_task(self, task: Task) -> Option<ModelKind> {
        use ModelKind::*;
        Some(match (self, task) {
            (Dt | Rt, Task::Classify) => Dt,
            (Dt | Rt, Task::Regress) => Rt,
            (AdaBoostClf | AdaBoostReg, Task::Classify) => AdaBoostClf,
            (AdaBoostClf | AdaBoostReg, Task::Regress) => AdaBoostReg,
            (GbClf | GbReg, Task::Classify) => GbClf,
            (GbClf | GbReg, Task::Regress) => GbReg,
            (Lasso, Task::Regress) => Lasso,
            (Lasso, Task::Classify) => return None,
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown model '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub alpha: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Recorded for reproducibility; every learner here is deterministic.
    pub random_seed: u64,
}

impl HyperParams {
    pub fn defaults_for(kind: ModelKind) -> Self {
        let base = Self {
            n_estimators: 1,
            learning_rate: 1.0,
            max_depth: None,
            min_samples_split: 2,
            alpha: 1.0,
            tol: 1e-4,
            max_sweeps: 1000,
            random_seed: 42,
        };
        match kind {
            ModelKind::Dt | ModelKind::Rt | ModelKind::Lasso => base,
            ModelKind::AdaBoostClf => Self {
                n_estimators: 50,
                max_depth: Some(1),
                ..base
            },
            ModelKind::AdaBoostReg => Self {
                n_estimators: 50,
                max_depth: Some(3),
                ..base
            },
            ModelKind::GbClf | ModelKind::GbReg => Self {
                n_estimators: 100,
                learning_rate: 0.1,
                max_depth: Some(3),
                ..base
            },
        }
    }

    fn tree(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
        }
    }

    fn lasso(&self) -> LassoParams {
        LassoParams {
            alpha: self.alpha,
            tol: self.tol,
            max_sweeps: self.max_sweeps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub converged: bool,
}

/// A trained model of any kind. Tree models keep one tree per stage with
/// its stage weight; Lasso keeps a linear model instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub kind: ModelKind,
    pub params: HyperParams,
    pub n_features: usize,
    pub fingerprint: String,
    pub init_value: f64,
    pub trees: Vec<TreeNode>,
    pub stage_weights: Vec<f64>,
    pub linear: Option<LinearModel>,
}

impl Ensemble {
    fn trees_only(kind: ModelKind, params: HyperParams, n_features: usize, fingerprint: &str) -> Self {
        Self {
            kind,
            params,
            n_features,
            fingerprint: fingerprint.to_string(),
            init_value: 0.0,
            trees: Vec::new(),
            stage_weights: Vec::new(),
            linear: None,
        }
    }

    pub fn task(&self) -> Task {
        self.kind.task()
    }

    /// Classification: score in [0, 1], higher means more likely drunk.
    /// Regression: BrAC estimate.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(match self.kind {
            ModelKind::Dt | ModelKind::Rt => self.trees[0].predict(x),
            ModelKind::AdaBoostClf => logistic(adaboost_margin(&self.trees, &self.stage_weights, x)),
            ModelKind::AdaBoostReg => weighted_median(&self.trees, &self.stage_weights, x),
            ModelKind::GbClf => logistic(gb_predict(self.init_value, &self.trees, self.params.learning_rate, x)),
            ModelKind::GbReg => gb_predict(self.init_value, &self.trees, self.params.learning_rate, x),
            ModelKind::Lasso => {
                let lin = self
                    .linear
                    .as_ref()
                    .ok_or_else(|| Error::InvalidModel("lasso model without weights".into()))?;
                lin.intercept + lin.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            }
        })
    }
}

/// Trains `kind` on rows `x`. Classification targets are 0/1 with 1 = drunk;
/// regression targets are BrAC values.
pub fn fit(kind: ModelKind, x: &[Vec<f64>], y: &[f64], params: &HyperParams, fingerprint: &str) -> Result<Ensemble> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyData);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n_features = x[0].len();
    let mut model = Ensemble::trees_only(kind, *params, n_features, fingerprint);
    match kind {
        ModelKind::Dt | ModelKind::Rt => {
            model.trees.push(train_cart(x, y, kind.task(), params.tree())?);
            model.stage_weights.push(1.0);
        }
        ModelKind::AdaBoostClf => {
            let depth = params.max_depth.unwrap_or(1);
            let f = train_adaboost_classifier(x, y, params.n_estimators, params.learning_rate, depth)?;
            model.trees = f.trees;
            model.stage_weights = f.stage_weights;
        }
        ModelKind::AdaBoostReg => {
            let f = train_adaboost_regressor(x, y, params.n_estimators, params.learning_rate, params.tree())?;
            model.trees = f.trees;
            model.stage_weights = f.stage_weights;
        }
        ModelKind::GbClf | ModelKind::GbReg => {
            let f = if kind == ModelKind::GbClf {
                train_gb_classifier(x, y, params.n_estimators, params.learning_rate, params.tree())?
            } else {
                train_gb_regressor(x, y, params.n_estimators, params.learning_rate, params.tree())?
            };
            model.init_value = f.init;
            model.stage_weights = vec![params.learning_rate; f.trees.len()];
            model.trees = f.trees;
        }
        ModelKind::Lasso => {
            let f = train_lasso(x, y, params.lasso())?;
            model.init_value = f.intercept;
            model.linear = Some(LinearModel {
                weights: f.weights,
                intercept: f.intercept,
                converged: f.converged,
            });
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_names() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
            if let Some(other) = k.for_task(k.task()) {
                assert_eq!(other, k);
            }
        }
        assert_eq!(ModelKind::Dt.for_task(Task::Regress), Some(ModelKind::Rt));
        assert_eq!(ModelKind::Lasso.for_task(Task::Classify), None);
    }

    #[test]
    fn leaf_only_tree_predicts_constant() {
        let m = fit(ModelKind::Rt, &[vec![1.0], vec![2.0]], &[3.0, 3.0], &HyperParams::defaults_for(ModelKind::Rt), "fp").unwrap();
        assert_eq!(m.trees[0], TreeNode::Leaf(3.0));
        assert_eq!(m.predict(&[100.0]).unwrap(), 3.0);
    }

    #[test]
    fn gb_with_zero_stages_predicts_mean() {
        let params = HyperParams {
            n_estimators: 0,
            ..HyperParams::defaults_for(ModelKind::GbReg)
        };
        let m = fit(ModelKind::GbReg, &[vec![0.0], vec![1.0], vec![2.0]], &[1.0, 2.0, 6.0], &params, "fp").unwrap();
        assert_eq!(m.predict(&[5.0]).unwrap(), 3.0);
    }

    #[test]
    fn dimension_is_checked() {
        let m = fit(ModelKind::Dt, &[vec![1.0, 2.0], vec![2.0, 1.0]], &[0.0, 1.0], &HyperParams::defaults_for(ModelKind::Dt), "fp").unwrap();
        assert!(matches!(m.predict(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn adaboost_scores_follow_labels_on_separable_data() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, ((i * 5) % 7) as f64]).collect();
        let y: Vec<f64> = (0..12).map(|i| f64::from(i >= 5)).collect();
        let m = fit(ModelKind::AdaBoostClf, &x, &y, &HyperParams::defaults_for(ModelKind::AdaBoostClf), "fp").unwrap();
        for (r, t) in x.iter().zip(&y) {
            let s = m.predict(r).unwrap();
            assert!((0.0..=1.0).contains(&s));
            assert_eq!(s >= 0.5, *t == 1.0);
        }
    }
}
