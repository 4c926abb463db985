//! Leave-one-subject-out evaluation, ROC/AUC and regression metrics, and the
//! feature-family and device ablations.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::datamodel::{label_class, BracThreshold, Class, Device, SubjectPair};
use crate::error::{Error, Result};
use crate::features::{catalog_fingerprint, labeled_instances, Family, FeatureMatrix, LabeledInstance};
use crate::models::{fit, HyperParams, ModelKind, Task};
use crate::par_map;
use crate::signal::SignalConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Score cutoff; rows with `score >= threshold` are called drunk.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn class_counts(labels: &[bool]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch(a, b));
    }
    Ok(())
}

/// Mann-Whitney AUC: share of (drunk, sober) pairs ranked correctly, ties
/// counting one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check_lengths(scores.len(), labels.len())?;
    let (pos, neg) = class_counts(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the number of won pairs, so ties stay integral
    let mut doubled: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group_pos = order[i..j].iter().filter(|&&k| labels[k]).count() as u64;
        let group_neg = (j - i) as u64 - group_pos;
        doubled += group_pos * (2 * neg_below + group_neg);
        neg_below += group_neg;
        i = j;
    }
    Ok(doubled as f64 / (2 * pos * neg) as f64)
}

/// Step ROC over the distinct scores in descending order, from (0,0) at an
/// infinite cutoff to (1,1) at the lowest score.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<RocPoint>> {
    check_lengths(scores.len(), labels.len())?;
    let (pos, neg) = class_counts(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut roc = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let cut = scores[order[i]];
        while i < order.len() && scores[order[i]] == cut {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        roc.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: cut,
        });
    }
    Ok(roc)
}

pub fn trapezoid_area(roc: &[RocPoint]) -> f64 {
    roc.windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// Smallest FPR over the cutoffs whose TPR reaches `tpr_target`.
pub fn fpr_at_fixed_tpr(scores: &[f64], labels: &[bool], tpr_target: f64) -> Result<f64> {
    let roc = roc_curve(scores, labels)?;
    Ok(roc
        .iter()
        .filter(|p| p.tpr >= tpr_target)
        .map(|p| p.fpr)
        .fold(f64::INFINITY, f64::min))
}

pub fn confusion_matrix(scores: &[f64], labels: &[bool], cutoff: f64) -> Result<Confusion> {
    check_lengths(scores.len(), labels.len())?;
    let mut c = Confusion::default();
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= cutoff, l) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// `(mae, rmse)`.
pub fn regression_metrics(estimates: &[f64], labels: &[f64]) -> Result<(f64, f64)> {
    check_lengths(estimates.len(), labels.len())?;
    if estimates.is_empty() {
        return Err(Error::EmptyData);
    }
    let n = estimates.len() as f64;
    let abs: f64 = estimates.iter().zip(labels).map(|(e, l)| (e - l).abs()).sum();
    let sq: f64 = estimates.iter().zip(labels).map(|(e, l)| (e - l) * (e - l)).sum();
    Ok((abs / n, (sq / n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub kind: ModelKind,
    pub params: HyperParams,
    /// Required for classification.
    pub threshold: Option<BracThreshold>,
    pub cutoff: f64,
}

impl EvalConfig {
    pub fn new(kind: ModelKind, threshold: Option<BracThreshold>) -> Self {
        Self {
            kind,
            params: HyperParams::defaults_for(kind),
            threshold,
            cutoff: 0.5,
        }
    }

    fn echo(&self, m: &FeatureMatrix) -> Vec<(String, String)> {
        let p = &self.params;
        let mut v = vec![
            ("model".to_string(), self.kind.to_string()),
            ("task".to_string(), self.kind.task().name().to_string()),
        ];
        if let Some(t) = self.threshold {
            v.push(("threshold".into(), t.to_string()));
        }
        v.extend([
            ("cutoff".into(), self.cutoff.to_string()),
            ("n_subjects".into(), m.n_rows().to_string()),
            ("n_features".into(), m.n_features().to_string()),
            ("catalog_fingerprint".into(), catalog_fingerprint(&m.catalog)),
            ("n_estimators".into(), p.n_estimators.to_string()),
            ("learning_rate".into(), p.learning_rate.to_string()),
            ("max_depth".into(), p.max_depth.map_or_else(|| "none".into(), |d| d.to_string())),
            ("min_samples_split".into(), p.min_samples_split.to_string()),
            ("alpha".into(), p.alpha.to_string()),
            ("tol".into(), p.tol.to_string()),
            ("max_sweeps".into(), p.max_sweeps.to_string()),
            ("random_seed".into(), p.random_seed.to_string()),
        ]);
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub subject_id: String,
    /// Drunk score for classification, BrAC estimate for regression.
    pub score: f64,
    pub brac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Metrics {
    Classification {
        auc: f64,
        fpr_at_tpr1: f64,
        confusion: Confusion,
        roc: Vec<RocPoint>,
    },
    Regression {
        mae: f64,
        rmse: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// One held-out prediction per subject, ordered by subject id.
    pub predictions: Vec<Prediction>,
    pub metrics: Metrics,
    pub config_echo: Vec<(String, String)>,
}

impl EvalReport {
    pub fn auc(&self) -> Option<f64> {
        match self.metrics {
            Metrics::Classification { auc, .. } => Some(auc),
            Metrics::Regression { .. } => None,
        }
    }

    pub fn fpr_at_tpr1(&self) -> Option<f64> {
        match self.metrics {
            Metrics::Classification { fpr_at_tpr1, .. } => Some(fpr_at_tpr1),
            Metrics::Regression { .. } => None,
        }
    }

    pub fn mae(&self) -> Option<f64> {
        match self.metrics {
            Metrics::Regression { mae, .. } => Some(mae),
            Metrics::Classification { .. } => None,
        }
    }

    /// `metric,value` rows.
    pub fn report_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        match &self.metrics {
            Metrics::Classification {
                auc,
                fpr_at_tpr1,
                confusion: c,
                ..
            } => {
                writeln!(out, "auc,{auc}").unwrap();
                writeln!(out, "fpr_at_tpr1,{fpr_at_tpr1}").unwrap();
                writeln!(out, "tp,{}", c.tp).unwrap();
                writeln!(out, "fp,{}", c.fp).unwrap();
                writeln!(out, "fn,{}", c.fn_).unwrap();
                writeln!(out, "tn,{}", c.tn).unwrap();
            }
            Metrics::Regression { mae, rmse } => {
                writeln!(out, "mae,{mae}").unwrap();
                writeln!(out, "rmse,{rmse}").unwrap();
            }
        }
        out
    }

    /// `fpr,tpr,threshold` rows; empty apart from the header for regression.
    pub fn roc_csv(&self) -> String {
        let mut out = String::from("fpr,tpr,threshold\n");
        if let Metrics::Classification { roc, .. } = &self.metrics {
            for p in roc {
                writeln!(out, "{},{},{}", p.fpr, p.tpr, p.threshold).unwrap();
            }
        }
        out
    }

    pub fn predictions_csv(&self) -> String {
        let mut out = String::from("subject,score,brac\n");
        for p in &self.predictions {
            writeln!(out, "{},{},{}", p.subject_id, p.score, p.brac).unwrap();
        }
        out
    }

    pub fn config_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in &self.config_echo {
            writeln!(out, "{k},{v}").unwrap();
        }
        out
    }

    /// Writes report.csv, roc.csv, predictions.csv and config.csv into `dir`.
    pub fn write_files(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.csv", self.report_csv()),
            ("roc.csv", self.roc_csv()),
            ("predictions.csv", self.predictions_csv()),
            ("config.csv", self.config_csv()),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn targets(m: &FeatureMatrix, cfg: &EvalConfig) -> Result<Vec<f64>> {
    match cfg.kind.task() {
        Task::Regress => Ok(m.brac.clone()),
        Task::Classify => {
            let t = cfg
                .threshold
                .ok_or_else(|| Error::InvalidModel("classification needs a BrAC threshold".into()))?;
            let y: Vec<f64> = m
                .brac
                .iter()
                .map(|&b| f64::from(label_class(b, t) == Class::Drunk))
                .collect();
            let pos = y.iter().filter(|&&v| v == 1.0).count();
            if pos == 0 || pos == y.len() {
                return Err(Error::SingleClassAtThreshold(t.value()));
            }
            Ok(y)
        }
    }
}

/// Leave-one-subject-out: each subject is scored by a model trained on all
/// the others, and metrics are computed on the pooled held-out scores.
/// Rows with missing cells are dropped first.
pub fn loso(matrix: &FeatureMatrix, cfg: &EvalConfig) -> Result<EvalReport> {
    let m = matrix.complete_rows();
    if m.n_rows() < 3 {
        return Err(Error::TooFewSubjects(m.n_rows()));
    }
    let y = targets(&m, cfg)?;
    let fingerprint = catalog_fingerprint(&m.catalog);
    let folds: Vec<usize> = (0..m.n_rows()).collect();
    let scores = par_map(&folds, |&held| -> Result<f64> {
        let train_x: Vec<Vec<f64>> = (0..m.n_rows()).filter(|&r| r != held).map(|r| m.rows[r].clone()).collect();
        let train_y: Vec<f64> = (0..m.n_rows()).filter(|&r| r != held).map(|r| y[r]).collect();
        if cfg.kind.task() == Task::Classify {
            // the held-out subject may have been the only one of its class
            let first = train_y[0];
            if train_y.iter().all(|&v| v == first) {
                return Ok(first);
            }
        }
        fit(cfg.kind, &train_x, &train_y, &cfg.params, &fingerprint)?.predict(&m.rows[held])
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    let mut order: Vec<usize> = (0..m.n_rows()).collect();
    order.sort_by(|&a, &b| m.subject_ids[a].cmp(&m.subject_ids[b]));
    let predictions: Vec<Prediction> = order
        .iter()
        .map(|&r| Prediction {
            subject_id: m.subject_ids[r].clone(),
            score: scores[r],
            brac: m.brac[r],
        })
        .collect();
    let s: Vec<f64> = predictions.iter().map(|p| p.score).collect();
    let metrics = match cfg.kind.task() {
        Task::Classify => {
            let labels: Vec<bool> = order.iter().map(|&r| y[r] == 1.0).collect();
            Metrics::Classification {
                auc: auc(&s, &labels)?,
                fpr_at_tpr1: fpr_at_fixed_tpr(&s, &labels, 1.0)?,
                confusion: confusion_matrix(&s, &labels, cfg.cutoff)?,
                roc: roc_curve(&s, &labels)?,
            }
        }
        Task::Regress => {
            let b: Vec<f64> = predictions.iter().map(|p| p.brac).collect();
            let (mae, rmse) = regression_metrics(&s, &b)?;
            Metrics::Regression { mae, rmse }
        }
    };
    Ok(EvalReport {
        predictions,
        metrics,
        config_echo: cfg.echo(&m),
    })
}

pub fn loso_instances(instances: &[LabeledInstance], cfg: &EvalConfig) -> Result<EvalReport> {
    loso(&FeatureMatrix::from_instances(instances)?, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyAblation {
    pub family: Family,
    pub auc_only: f64,
    pub auc_without: f64,
}

/// LOSO AUC on each family alone and on everything but that family.
pub fn ablate_feature_sets(matrix: &FeatureMatrix, cfg: &EvalConfig) -> Result<Vec<FamilyAblation>> {
    if cfg.kind.task() != Task::Classify {
        return Err(Error::InvalidModel("feature ablation reports AUC and needs a classifier".into()));
    }
    let m = matrix.complete_rows();
    let run = |cols: &[usize]| -> Result<f64> {
        let r = loso(&m.select_columns(cols), cfg)?;
        Ok(r.auc().unwrap_or(f64::NAN))
    };
    Family::ABLATION_ORDER
        .iter()
        .map(|&family| {
            let only = m.columns_of_family(family);
            let without: Vec<usize> = (0..m.n_features()).filter(|c| !only.contains(c)).collect();
            Ok(FamilyAblation {
                family,
                auc_only: run(&only)?,
                auc_without: run(&without)?,
            })
        })
        .collect()
}

pub fn feature_ablation_csv(rows: &[FamilyAblation]) -> String {
    let mut out = String::from("family,auc_only,auc_without\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.family.label(), r.auc_only, r.auc_without).unwrap();
    }
    out
}

/// The six device combinations, labelled.
pub fn device_masks() -> Vec<(String, BTreeSet<Device>)> {
    use Device::*;
    let sets: [&[Device]; 6] = [&Device::ALL, &[Phone], &[Watch], &[Glass], &[Phone, Watch], &[Phone, Glass]];
    let labels = ["All", "Phone", "Watch", "Glass", "Phone+Watch", "Phone+Glass"];
    labels
        .iter()
        .zip(sets)
        .map(|(l, s)| (l.to_string(), s.iter().copied().collect()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceAblation {
    pub label: String,
    pub mask: BTreeSet<Device>,
    pub report: EvalReport,
}

/// Re-extracts features per mask from the raw pairs; subjects missing a
/// masked device sit out that mask.
pub fn ablate_devices(pairs: &[SubjectPair], cfg: &EvalConfig, signal: &SignalConfig) -> Result<Vec<DeviceAblation>> {
    device_masks()
        .into_iter()
        .map(|(label, mask)| {
            let inst = labeled_instances(pairs, &mask, signal)?;
            Ok(DeviceAblation {
                report: loso_instances(&inst, cfg)?,
                label,
                mask,
            })
        })
        .collect()
}

/// Same masks, sliced from an already extracted matrix.
pub fn ablate_devices_matrix(matrix: &FeatureMatrix, cfg: &EvalConfig) -> Result<Vec<DeviceAblation>> {
    device_masks()
        .into_iter()
        .map(|(label, mask)| {
            let sliced = matrix.select_columns(&matrix.columns_of_devices(&mask));
            Ok(DeviceAblation {
                report: loso(&sliced, cfg)?,
                label,
                mask,
            })
        })
        .collect()
}

pub fn device_ablation_csv(rows: &[DeviceAblation]) -> String {
    let regress = rows.first().is_some_and(|r| r.report.auc().is_none());
    let mut out = String::from(if regress {
        "mask,n_subjects,mae,rmse\n"
    } else {
        "mask,n_subjects,auc,fpr_at_tpr1\n"
    });
    for r in rows {
        let n = r.report.predictions.len();
        match r.report.metrics {
            Metrics::Classification { auc, fpr_at_tpr1, .. } => {
                writeln!(out, "{},{n},{auc},{fpr_at_tpr1}", r.label).unwrap()
            }
            Metrics::Regression { mae, rmse } => writeln!(out, "{},{n},{mae},{rmse}", r.label).unwrap(),
        }
    }
    out
}
