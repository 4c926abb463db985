//! CART with sample weights. Classification splits maximize entropy
//! information gain (bits), regression splits maximize the reduction in
//! weighted squared error. Candidate thresholds are midpoints between
//! consecutive distinct feature values; ties go to the lower feature index,
//! then the lower threshold.

use crate::error::{Error, Result};

use super::Task;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf(v) => return *v,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    /// Preorder position of the leaf that `x` lands in.
    pub(crate) fn leaf_index(&self, x: &[f64]) -> usize {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.leaf_index(x)
                } else {
                    left.n_leaves() + right.leaf_index(x)
                }
            }
        }
    }

    /// Visits leaves in preorder.
    pub(crate) fn map_leaves(&mut self, f: &mut impl FnMut(f64) -> f64) {
        match self {
            TreeNode::Leaf(v) => *v = f(*v),
            TreeNode::Split { left, right, .. } => {
                left.map_leaves(f);
                right.map_leaves(f);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

/// Column-major copy of the matrix with per-feature row orderings, built
/// once and reused by every tree fitted on the same rows.
pub(crate) struct Presorted {
    n_rows: usize,
    cols: Vec<Vec<f64>>,
    /// Feature `f` occupies `order[f*n_rows..(f+1)*n_rows]`.
    order: Vec<u32>,
}

impl Presorted {
    pub(crate) fn new(x: &[Vec<f64>]) -> Result<Self> {
        let n_features = x.first().map_or(0, Vec::len);
        if x.iter().any(|r| r.len() != n_features) {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                got: x.iter().map(Vec::len).find(|&l| l != n_features).unwrap_or(0),
            });
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let cols: Vec<Vec<f64>> = (0..n_features).map(|f| x.iter().map(|r| r[f]).collect()).collect();
        let mut order = Vec::with_capacity(n_features * x.len());
        for col in &cols {
            let mut idx: Vec<u32> = (0..x.len() as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            order.extend(idx);
        }
        Ok(Self {
            n_rows: x.len(),
            cols,
            order,
        })
    }

    pub(crate) fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_features(&self) -> usize {
        self.cols.len()
    }
}

fn entropy(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Fitter<'a> {
    data: &'a Presorted,
    y: &'a [f64],
    w: &'a [f64],
    task: Task,
    params: TreeParams,
}

/// Working state of one tree: the orderings restricted to each node live in
/// the same contiguous slots `lo..hi` of every feature's segment.
struct Work {
    order: Vec<u32>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
}

impl Fitter<'_> {
    fn leaf_value(&self, rows: &[u32]) -> f64 {
        let (mut sw, mut swy) = (0.0, 0.0);
        for &r in rows {
            let r = r as usize;
            sw += self.w[r];
            swy += self.w[r] * self.y[r];
        }
        if sw > 0.0 {
            swy / sw
        } else {
            rows.iter().map(|&r| self.y[r as usize]).sum::<f64>() / rows.len() as f64
        }
    }

    fn segment<'w>(&self, order: &'w [u32], f: usize, lo: usize, hi: usize) -> &'w [u32] {
        let base = f * self.data.n_rows;
        &order[base + lo..base + hi]
    }

    fn best_split(&self, order: &[u32], lo: usize, hi: usize) -> Option<Split> {
        let rows = self.segment(order, 0, lo, hi);
        let n = rows.len();
        let w_total: f64 = rows.iter().map(|&r| self.w[r as usize]).sum();
        // regression works on targets centred at the node mean
        let center = self.leaf_value(rows);
        let (pos_total, sy_total, syy_total) = rows.iter().fold((0.0, 0.0, 0.0), |(p, s, q), &r| {
            let (w, y) = (self.w[r as usize], self.y[r as usize]);
            let c = y - center;
            (p + w * y, s + w * c, q + w * c * c)
        });
        let sse = |sw: f64, sy: f64, syy: f64| if sw > 0.0 { syy - sy * sy / sw } else { 0.0 };
        let parent = match self.task {
            Task::Classify => entropy(pos_total, w_total),
            Task::Regress => sse(w_total, sy_total, syy_total),
        };
        let tol = 1e-12 * parent.abs().max(1e-300);

        let mut best: Option<Split> = None;
        for f in 0..self.data.n_features() {
            let sorted = self.segment(order, f, lo, hi);
            let col = &self.data.cols[f];
            let (mut wl, mut pl, mut syl, mut syyl) = (0.0, 0.0, 0.0, 0.0);
            for i in 0..n - 1 {
                let r = sorted[i] as usize;
                let (w, y) = (self.w[r], self.y[r]);
                let c = y - center;
                wl += w;
                pl += w * y;
                syl += w * c;
                syyl += w * c * c;
                let v = col[r];
                let next = col[sorted[i + 1] as usize];
                if next <= v {
                    continue;
                }
                let gain = match self.task {
                    Task::Classify => {
                        let wr = w_total - wl;
                        if w_total <= 0.0 {
                            0.0
                        } else {
                            parent
                                - (wl / w_total) * entropy(pl, wl)
                                - (wr / w_total) * entropy(pos_total - pl, wr)
                        }
                    }
                    Task::Regress => {
                        parent - sse(wl, syl, syyl) - sse(w_total - wl, sy_total - syl, syy_total - syyl)
                    }
                };
                if best.as_ref().is_none_or(|b| gain > b.gain + tol) {
                    best = Some(Split {
                        feature: f,
                        threshold: v + 0.5 * (next - v),
                        gain,
                    });
                }
            }
        }
        best
    }

    fn is_pure(&self, rows: &[u32]) -> bool {
        let first = self.y[rows[0] as usize];
        rows.iter().all(|&r| self.y[r as usize] == first)
    }

    fn grow(&self, work: &mut Work, lo: usize, hi: usize, depth: usize) -> TreeNode {
        let rows = self.segment(&work.order, 0, lo, hi);
        let at_limit = self.params.max_depth.is_some_and(|d| depth >= d);
        if at_limit || rows.len() < self.params.min_samples_split.max(2) || self.is_pure(rows) {
            return TreeNode::Leaf(self.leaf_value(rows));
        }
        let Some(split) = self.best_split(&work.order, lo, hi) else {
            return TreeNode::Leaf(self.leaf_value(rows));
        };
        let col = &self.data.cols[split.feature];
        let mut n_left = 0;
        for &r in rows {
            let left = col[r as usize] <= split.threshold;
            work.goes_left[r as usize] = left;
            n_left += usize::from(left);
        }
        // stable in-place partition of every feature segment
        for f in 0..self.data.n_features() {
            let base = f * self.data.n_rows;
            let seg = &mut work.order[base + lo..base + hi];
            work.scratch.clear();
            let mut k = 0;
            for i in 0..seg.len() {
                let r = seg[i];
                if work.goes_left[r as usize] {
                    seg[k] = r;
                    k += 1;
                } else {
                    work.scratch.push(r);
                }
            }
            seg[k..].copy_from_slice(&work.scratch);
        }
        let mid = lo + n_left;
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow(work, lo, mid, depth + 1)),
            right: Box::new(self.grow(work, mid, hi, depth + 1)),
        }
    }
}

/// Weighted tree on presorted data. Classification leaves hold the weighted
/// fraction of positives; regression leaves hold the weighted mean.
pub(crate) fn fit_tree(data: &Presorted, y: &[f64], w: &[f64], task: Task, params: TreeParams) -> TreeNode {
    let fitter = Fitter {
        data,
        y,
        w,
        task,
        params,
    };
    if data.n_features() == 0 {
        // no features: constant model
        let all: Vec<u32> = (0..data.n_rows() as u32).collect();
        return TreeNode::Leaf(fitter.leaf_value(&all));
    }
    let mut work = Work {
        order: data.order.clone(),
        goes_left: vec![false; data.n_rows],
        scratch: Vec::with_capacity(data.n_rows),
    };
    fitter.grow(&mut work, 0, data.n_rows, 0)
}

pub(crate) fn check_binary(y: &[f64]) -> Result<()> {
    if y.iter().all(|&v| v == 0.0 || v == 1.0) {
        Ok(())
    } else {
        Err(Error::NonBinaryLabels)
    }
}

/// Single CART tree. Classification expects 0/1 labels.
pub fn train_cart(x: &[Vec<f64>], y: &[f64], task: Task, params: TreeParams) -> Result<TreeNode> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyData);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if task == Task::Classify {
        check_binary(y)?;
    }
    let data = Presorted::new(x)?;
    Ok(fit_tree(&data, y, &vec![1.0; y.len()], task, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn separable_single_split() {
        let tree = train_cart(&col(&[1.0, 2.0, 8.0, 9.0]), &[0.0, 0.0, 1.0, 1.0], Task::Classify, TreeParams::default()).unwrap();
        match &tree {
            TreeNode::Split { feature, threshold, left, right } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 5.0);
                assert_eq!(**left, TreeNode::Leaf(0.0));
                assert_eq!(**right, TreeNode::Leaf(1.0));
            }
            leaf => panic!("expected a split, got {leaf:?}"),
        }
    }

    #[test]
    fn pure_labels_give_leaf() {
        let tree = train_cart(&col(&[1.0, 2.0, 3.0]), &[1.0; 3], Task::Classify, TreeParams::default()).unwrap();
        assert_eq!(tree, TreeNode::Leaf(1.0));
    }

    #[test]
    fn balanced_entropy_is_one_bit() {
        assert_eq!(entropy(2.0, 4.0), 1.0);
        assert_eq!(entropy(0.0, 4.0), 0.0);
    }

    #[test]
    fn ties_prefer_lower_feature_then_lower_threshold() {
        // both features separate equally well
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let tree = train_cart(&x, &[0.0, 0.0, 1.0, 1.0], Task::Classify, TreeParams::default()).unwrap();
        assert!(matches!(tree, TreeNode::Split { feature: 0, threshold, .. } if threshold == 1.5));
        // regression on y = [0, 1, 1, 0]: the first two thresholds tie
        let tree = train_cart(&col(&[0.0, 1.0, 2.0, 3.0]), &[0.0, 5.0, 5.0, 0.0], Task::Regress, TreeParams { max_depth: Some(1), min_samples_split: 2 }).unwrap();
        assert!(matches!(tree, TreeNode::Split { threshold, .. } if threshold == 0.5));
    }

    #[test]
    fn xor_grows_to_purity() {
        let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let y = [0.0, 1.0, 1.0, 0.0];
        let tree = train_cart(&x, &y, Task::Classify, TreeParams::default()).unwrap();
        for (r, t) in x.iter().zip(y) {
            assert_eq!(tree.predict(r), t);
        }
    }

    #[test]
    fn depth_and_min_split_limits() {
        let x = col(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let t = train_cart(&x, &y, Task::Classify, TreeParams { max_depth: Some(2), min_samples_split: 2 }).unwrap();
        assert!(t.depth() <= 2);
        let t = train_cart(&x, &y, Task::Classify, TreeParams { max_depth: None, min_samples_split: 9 }).unwrap();
        assert_eq!(t, TreeNode::Leaf(0.5));
    }

    #[test]
    fn errors() {
        assert!(matches!(train_cart(&[], &[], Task::Regress, TreeParams::default()), Err(Error::EmptyData)));
        assert!(matches!(
            train_cart(&col(&[1.0, 2.0]), &[0.0, 2.0], Task::Classify, TreeParams::default()),
            Err(Error::NonBinaryLabels)
        ));
    }

    #[test]
    fn weighted_leaf_values() {
        let x = col(&[1.0, 1.0, 1.0]);
        let data = Presorted::new(&x).unwrap();
        let t = fit_tree(&data, &[0.0, 1.0, 1.0], &[2.0, 1.0, 1.0], Task::Classify, TreeParams::default());
        assert_eq!(t, TreeNode::Leaf(0.5));
    }
}
