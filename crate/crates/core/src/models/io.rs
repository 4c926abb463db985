//! Line-oriented text format for trained models.
//!
//! ```text
//! gaitbrac-model 1
//! kind gbc
//! n_features 4261
//! fingerprint <sha256 hex>
//! params 100 0.1 3 2 1 0.0001 1000 42
//! init -0.6931471805599453
//! stages 2
//! stage 0.1
//! S 17 0.25
//! L -1.5
//! L 2
//! stage 0.1
//! L 0
//! linear none
//! end
//! ```
//!
//! Trees are written in preorder, `S <feature> <threshold>` for splits and
//! `L <value>` for leaves. Params are n_estimators, learning_rate,
//! max_depth (`none` when unbounded), min_samples_split, alpha, tol,
//! max_sweeps, random_seed. A Lasso model writes `linear <converged>
//! <intercept> <n>` followed by `n` weight lines.

use std::fmt::Write as _;
use std::path::Path;

use super::{Ensemble, HyperParams, LinearModel, ModelKind, TreeNode};
use crate::datamodel::read_file;
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "gaitbrac-model 1";

pub fn model_to_string(model: &Ensemble) -> String {
    let mut out = String::new();
    let p = &model.params;
    let depth = p.max_depth.map_or_else(|| "none".to_string(), |d| d.to_string());
    writeln!(out, "{MODEL_MAGIC}").unwrap();
    writeln!(out, "kind {}", model.kind).unwrap();
    writeln!(out, "n_features {}", model.n_features).unwrap();
    writeln!(out, "fingerprint {}", model.fingerprint).unwrap();
    writeln!(
        out,
        "params {} {} {} {} {} {} {} {}",
        p.n_estimators, p.learning_rate, depth, p.min_samples_split, p.alpha, p.tol, p.max_sweeps, p.random_seed
    )
    .unwrap();
    writeln!(out, "init {}", model.init_value).unwrap();
    writeln!(out, "stages {}", model.trees.len()).unwrap();
    for (tree, w) in model.trees.iter().zip(&model.stage_weights) {
        writeln!(out, "stage {w}").unwrap();
        write_tree(&mut out, tree);
    }
    match &model.linear {
        None => out.push_str("linear none\n"),
        Some(lin) => {
            writeln!(out, "linear {} {} {}", u8::from(lin.converged), lin.intercept, lin.weights.len()).unwrap();
            for w in &lin.weights {
                writeln!(out, "{w}").unwrap();
            }
        }
    }
    out.push_str("end\n");
    out
}

fn write_tree(out: &mut String, node: &TreeNode) {
    match node {
        TreeNode::Leaf(v) => writeln!(out, "L {v}").unwrap(),
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            writeln!(out, "S {feature} {threshold}").unwrap();
            write_tree(out, left);
            write_tree(out, right);
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::MalformedModelFile {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => {
                self.line += 1;
                Err(self.err("unexpected end of file"))
            }
        }
    }

    /// Next line, which must start with `key `; returns the fields after it.
    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let l = self.next()?;
        let mut parts = l.split(' ');
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected '{key}'")));
        }
        Ok(parts.collect())
    }

    fn single<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let f = self.keyed(key)?;
        if f.len() != 1 {
            return Err(self.err(format!("'{key}' takes one value")));
        }
        self.parse(f[0])
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad value '{s}'")))
    }
}

pub fn model_from_str(text: &str) -> Result<Ensemble> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next()? != MODEL_MAGIC {
        return Err(lines.err("missing version line"));
    }
    let kind_s: String = lines.single("kind")?;
    let kind: ModelKind = kind_s.parse().map_err(|e: String| lines.err(e))?;
    let n_features: usize = lines.single("n_features")?;
    let fingerprint: String = lines.single("fingerprint")?;

    let f = lines.keyed("params")?;
    if f.len() != 8 {
        return Err(lines.err("params takes 8 values"));
    }
    let params = HyperParams {
        n_estimators: lines.parse(f[0])?,
        learning_rate: lines.parse(f[1])?,
        max_depth: if f[2] == "none" { None } else { Some(lines.parse(f[2])?) },
        min_samples_split: lines.parse(f[3])?,
        alpha: lines.parse(f[4])?,
        tol: lines.parse(f[5])?,
        max_sweeps: lines.parse(f[6])?,
        random_seed: lines.parse(f[7])?,
    };
    let init_value: f64 = lines.single("init")?;
    let n_stages: usize = lines.single("stages")?;
    let mut trees = Vec::new();
    let mut stage_weights = Vec::new();
    for _ in 0..n_stages {
        let w: f64 = lines.single("stage")?;
        if !w.is_finite() {
            return Err(lines.err("non-finite stage weight"));
        }
        stage_weights.push(w);
        trees.push(read_tree(&mut lines, n_features, 0)?);
    }

    let f = lines.keyed("linear")?;
    let linear = match f.as_slice() {
        ["none"] => None,
        [conv, intercept, n] => {
            let converged = match *conv {
                "0" => false,
                "1" => true,
                other => return Err(lines.err(format!("bad flag '{other}'"))),
            };
            let intercept: f64 = lines.parse(intercept)?;
            let n: usize = lines.parse(n)?;
            if n != n_features {
                return Err(lines.err("weight count differs from n_features"));
            }
            let mut weights = Vec::with_capacity(n);
            for _ in 0..n {
                let l = lines.next()?;
                weights.push(lines.parse(l)?);
            }
            Some(LinearModel {
                weights,
                intercept,
                converged,
            })
        }
        _ => return Err(lines.err("bad linear line")),
    };
    if lines.next()? != "end" {
        return Err(lines.err("expected 'end'"));
    }

    let model = Ensemble {
        kind,
        params,
        n_features,
        fingerprint,
        init_value,
        trees,
        stage_weights,
        linear,
    };
    let shape_ok = match kind {
        ModelKind::Lasso => model.linear.is_some() && model.trees.is_empty(),
        ModelKind::Dt | ModelKind::Rt => model.linear.is_none() && model.trees.len() == 1,
        ModelKind::AdaBoostClf | ModelKind::AdaBoostReg => model.linear.is_none() && !model.trees.is_empty(),
        ModelKind::GbClf | ModelKind::GbReg => model.linear.is_none(),
    };
    if !shape_ok {
        return Err(Error::MalformedModelFile {
            line: lines.line,
            reason: format!("stage layout does not fit a {kind} model"),
        });
    }
    Ok(model)
}

const MAX_TREE_DEPTH: usize = 10_000;

fn read_tree(lines: &mut Lines<'_>, n_features: usize, depth: usize) -> Result<TreeNode> {
    if depth > MAX_TREE_DEPTH {
        return Err(lines.err("tree too deep"));
    }
    let l = lines.next()?;
    let f: Vec<&str> = l.split(' ').collect();
    match f.as_slice() {
        ["L", v] => Ok(TreeNode::Leaf(lines.parse(v)?)),
        ["S", feat, thr] => {
            let feature: usize = lines.parse(feat)?;
            if feature >= n_features {
                return Err(lines.err("split feature out of range"));
            }
            let threshold: f64 = lines.parse(thr)?;
            let left = read_tree(lines, n_features, depth + 1)?;
            let right = read_tree(lines, n_features, depth + 1)?;
            Ok(TreeNode::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
        _ => Err(lines.err("expected tree node")),
    }
}

pub fn save_model(model: &Ensemble, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

/// Loads a model and checks it was trained on the catalog whose fingerprint
/// is `expected_fingerprint`.
pub fn load_model(path: impl AsRef<Path>, expected_fingerprint: Option<&str>) -> Result<Ensemble> {
    let model = model_from_str(&read_file(path.as_ref())?)?;
    if let Some(fp) = expected_fingerprint {
        if fp != model.fingerprint {
            return Err(Error::CatalogFingerprintMismatch {
                model: model.fingerprint,
                data: fp.to_string(),
            });
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::super::fit;
    use super::*;

    fn sample_rows() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i * i % 11) as f64 / 3.0, 1e-7 * i as f64])
            .collect();
        let y: Vec<f64> = (0..20).map(|i| f64::from(i % 3 != 0)).collect();
        (x, y)
    }

    #[test]
    fn round_trip_is_lossless_for_every_kind() {
        let (x, y) = sample_rows();
        let reg: Vec<f64> = x.iter().map(|r| 100.0 * r[0] + r[1]).collect();
        for kind in ModelKind::ALL {
            let target = if kind.task() == super::super::Task::Classify { &y } else { &reg };
            let mut params = HyperParams::defaults_for(kind);
            params.alpha = 0.5;
            let m = fit(kind, &x, target, &params, "abc123").unwrap();
            let text = model_to_string(&m);
            let back = model_from_str(&text).unwrap();
            assert_eq!(back, m, "{kind}");
            assert_eq!(model_to_string(&back), text);
            for r in &x {
                assert_eq!(back.predict(r).unwrap().to_bits(), m.predict(r).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let (x, y) = sample_rows();
        let m = fit(ModelKind::GbClf, &x, &y, &HyperParams::defaults_for(ModelKind::GbClf), "fp").unwrap();
        let text = model_to_string(&m);
        let lines: Vec<&str> = text.lines().collect();
        for cut in [1, 5, lines.len() / 2, lines.len() - 1] {
            let truncated = lines[..cut].join("\n");
            assert!(matches!(model_from_str(&truncated), Err(Error::MalformedModelFile { .. })), "cut {cut}");
        }
    }

    #[test]
    fn fingerprint_is_checked_on_load() {
        let (x, y) = sample_rows();
        let m = fit(ModelKind::Dt, &x, &y, &HyperParams::defaults_for(ModelKind::Dt), "aaaa").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        save_model(&m, &path).unwrap();
        assert_eq!(load_model(&path, Some("aaaa")).unwrap(), m);
        assert!(matches!(
            load_model(&path, Some("bbbb")),
            Err(Error::CatalogFingerprintMismatch { .. })
        ));
    }
}
