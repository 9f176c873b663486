//! Classical reference models and the exact Wilcoxon signed-rank test.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complexity::{ols_fit, LinearModel};
use crate::{par, rng, Error, Result};

fn check_xy(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("{} rows but {} targets", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::InvalidState("empty training set".into()));
    }
    let d = x[0].len();
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("ragged design matrix"));
    }
    Ok(d)
}

/// Ordinary least squares with intercept.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OlsRegressor {
    pub model: LinearModel,
}

impl OlsRegressor {
    pub fn fit(x: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        check_xy(x, y)?;
        Ok(Self { model: ols_fit(x, y)? })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.model.predict(x)
    }

    pub fn param_count(&self) -> usize {
        self.model.coefficients.len() + 1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KnnRegressor {
    k: usize,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl KnnRegressor {
    pub fn fit(k: usize, x: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        check_xy(x, y)?;
        if k == 0 || k > x.len() {
            return Err(Error::invalid(format!("k = {k} with {} training rows", x.len())));
        }
        Ok(Self { k, x: x.to_vec(), y: y.to_vec() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Indices of the k nearest rows, closest first; ties by lower index.
    pub fn neighbors(&self, q: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, cmp);
            d.truncate(self.k);
        }
        d.sort_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict(&self, q: &[f64]) -> f64 {
        self.neighbors(q).iter().map(|&i| self.y[i]).sum::<f64>() / self.k as f64
    }

    pub fn param_count(&self) -> usize {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { max_depth: None, min_samples_split: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node<V> {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf(V),
}

fn sorted_by_feature(x: &[Vec<f64>], idx: &[usize], feature: usize) -> Vec<usize> {
    let mut s = idx.to_vec();
    s.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]).then(a.cmp(&b)));
    s
}

fn walk<V: Copy>(nodes: &[Node<V>], q: &[f64]) -> V {
    let mut at = 0;
    loop {
        match &nodes[at] {
            Node::Leaf(v) => return *v,
            Node::Split { feature, threshold, left, right } => {
                at = if q[*feature] <= *threshold { *left } else { *right };
            }
        }
    }
}

/// CART regression tree with squared-error splits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeRegressor {
    nodes: Vec<Node<f64>>,
    config: TreeConfig,
}

impl TreeRegressor {
    pub fn fit(x: &[Vec<f64>], y: &[f64], config: TreeConfig) -> Result<Self> {
        let d = check_xy(x, y)?;
        let mut nodes = Vec::new();
        let idx: Vec<usize> = (0..x.len()).collect();
        grow_regression(x, y, d, idx, 0, &config, &mut nodes);
        Ok(Self { nodes, config })
    }

    pub fn predict(&self, q: &[f64]) -> f64 {
        walk(&self.nodes, q)
    }

    pub fn nodes(&self) -> &[Node<f64>] {
        &self.nodes
    }

    pub fn config(&self) -> TreeConfig {
        self.config
    }

    pub fn param_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node<f64>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}

fn grow_regression(
    x: &[Vec<f64>],
    y: &[f64],
    d: usize,
    idx: Vec<usize>,
    depth: usize,
    cfg: &TreeConfig,
    nodes: &mut Vec<Node<f64>>,
) -> usize {
    let me = nodes.len();
    let n = idx.len() as f64;
    let sum: f64 = idx.iter().map(|&i| y[i]).sum();
    let mean = sum / n;
    nodes.push(Node::Leaf(mean));
    let pure = idx.iter().all(|&i| y[i] == y[idx[0]]);
    if pure || idx.len() < cfg.min_samples_split || cfg.max_depth.is_some_and(|m| depth >= m) {
        return me;
    }
    let sq: f64 = idx.iter().map(|&i| y[i] * y[i]).sum();
    let parent_sse = sq - sum * sum / n;
    // (sse, feature, threshold)
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..d {
        let s = sorted_by_feature(x, &idx, f);
        let (mut ls, mut lq) = (0.0, 0.0);
        for k in 0..s.len() - 1 {
            let v = y[s[k]];
            ls += v;
            lq += v * v;
            let (a, b) = (x[s[k]][f], x[s[k + 1]][f]);
            if a == b {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = n - nl;
            let (rs, rq) = (sum - ls, sq - lq);
            let sse = (lq - ls * ls / nl) + (rq - rs * rs / nr);
            if best.map_or(true, |(b0, _, _)| sse < b0) {
                best = Some((sse, f, 0.5 * (a + b)));
            }
        }
    }
    let Some((sse, feature, threshold)) = best else {
        return me;
    };
    if sse >= parent_sse {
        return me;
    }
    let (li, ri): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| x[i][feature] <= threshold);
    let left = grow_regression(x, y, d, li, depth + 1, cfg, nodes);
    let right = grow_regression(x, y, d, ri, depth + 1, cfg, nodes);
    nodes[me] = Node::Split { feature, threshold, left, right };
    me
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &k) in counts.iter().enumerate() {
        if k > counts[best] {
            best = c;
        }
    }
    best
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Gini classification tree with per-split feature subsampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTree {
    nodes: Vec<Node<usize>>,
}

impl ClassificationTree {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        max_features: usize,
        rng: &mut rng::Rng,
    ) -> Self {
        let mut nodes = Vec::new();
        let idx: Vec<usize> = (0..x.len()).collect();
        grow_classification(x, y, n_classes, max_features, idx, rng, &mut nodes);
        Self { nodes }
    }

    pub fn predict(&self, q: &[f64]) -> usize {
        walk(&self.nodes, q)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

fn grow_classification(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    max_features: usize,
    idx: Vec<usize>,
    rng: &mut rng::Rng,
    nodes: &mut Vec<Node<usize>>,
) -> usize {
    let me = nodes.len();
    let mut counts = vec![0; n_classes];
    for &i in &idx {
        counts[y[i]] += 1;
    }
    nodes.push(Node::Leaf(majority(&counts)));
    if idx.len() < 2 || counts.iter().filter(|&&c| c > 0).count() < 2 {
        return me;
    }
    let d = x[0].len();
    let varying: Vec<usize> = (0..d)
        .filter(|&f| idx.iter().any(|&i| x[i][f] != x[idx[0]][f]))
        .collect();
    if varying.is_empty() {
        return me;
    }
    let m = max_features.min(varying.len());
    let mut chosen: Vec<usize> = sample(rng, varying.len(), m).into_iter().map(|k| varying[k]).collect();
    chosen.sort_unstable();

    let n = idx.len();
    let mut best: Option<(f64, usize, f64)> = None;
    for &f in &chosen {
        let s = sorted_by_feature(x, &idx, f);
        let mut left = vec![0; n_classes];
        for k in 0..n - 1 {
            left[y[s[k]]] += 1;
            let (a, b) = (x[s[k]][f], x[s[k + 1]][f]);
            if a == b {
                continue;
            }
            let right: Vec<usize> = counts.iter().zip(&left).map(|(t, l)| t - l).collect();
            let nl = k + 1;
            let score = nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl);
            if best.map_or(true, |(b0, _, _)| score < b0) {
                best = Some((score, f, 0.5 * (a + b)));
            }
        }
    }
    let Some((_, feature, threshold)) = best else {
        return me;
    };
    let (li, ri): (Vec<usize>, Vec<usize>) = idx.into_iter().partition(|&i| x[i][feature] <= threshold);
    let left = grow_classification(x, y, n_classes, max_features, li, rng, nodes);
    let right = grow_classification(x, y, n_classes, max_features, ri, rng, nodes);
    nodes[me] = Node::Split { feature, threshold, left, right };
    me
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { n_trees: 100, seed: 0 }
    }
}

/// Bagged Gini trees with ⌈√d⌉ candidate features per split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestClassifier {
    config: ForestConfig,
    trees: Vec<ClassificationTree>,
}

impl ForestClassifier {
    pub fn new(config: ForestConfig) -> Self {
        Self { config, trees: Vec::new() }
    }

    pub fn fit(&mut self, x: &[Vec<f64>], y: &[usize]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::invalid(format!("{} rows but {} labels", x.len(), y.len())));
        }
        if x.is_empty() {
            return Err(Error::invalid("empty training set"));
        }
        if self.config.n_trees == 0 {
            return Err(Error::invalid("a forest needs at least one tree"));
        }
        let d = x[0].len();
        if x.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("ragged design matrix"));
        }
        let n_classes = y.iter().max().unwrap() + 1;
        let max_features = ((d as f64).sqrt().ceil() as usize).max(1);
        let n = x.len();
        let seed = self.config.seed;
        self.trees = par::map_range(self.config.n_trees, |t| {
            let mut r = rng::rng(rng::derive(seed, &[t as u64]));
            let boot: Vec<usize> = (0..n).map(|_| r.gen_range(0..n)).collect();
            let bx: Vec<Vec<f64>> = boot.iter().map(|&i| x[i].clone()).collect();
            let by: Vec<usize> = boot.iter().map(|&i| y[i]).collect();
            ClassificationTree::fit(&bx, &by, n_classes, max_features, &mut r)
        });
        Ok(())
    }

    pub fn is_fitted(&self) -> bool {
        !self.trees.is_empty()
    }

    pub fn trees(&self) -> &[ClassificationTree] {
        &self.trees
    }

    /// Majority vote; ties go to the lowest label.
    pub fn predict(&self, q: &[f64]) -> Result<usize> {
        if !self.is_fitted() {
            return Err(Error::InvalidState("forest has not been fitted".into()));
        }
        let votes: Vec<usize> = self.trees.iter().map(|t| t.predict(q)).collect();
        let mut counts = vec![0; votes.iter().max().unwrap() + 1];
        for v in votes {
            counts[v] += 1;
        }
        Ok(majority(&counts))
    }
}

/// Exact two-sided Wilcoxon signed-rank p-value. Zero differences are
/// dropped; tied magnitudes get averaged ranks.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("length mismatch {} vs {}", a.len(), b.len())));
    }
    if !(5..=25).contains(&a.len()) {
        return Err(Error::invalid(format!("exact test needs 5..=25 pairs, got {}", a.len())));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(Error::DegeneratePair);
    }
    let mags: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    // averaged ranks are multiples of 1/2, so doubling makes them integers
    let r2: Vec<usize> = crate::complexity::ranks(&mags)
        .iter()
        .map(|r| (2.0 * r).round() as usize)
        .collect();
    let total: usize = r2.iter().sum();
    let w: usize = r2.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let mut dist = vec![0f64; total + 1];
    dist[0] = 1.0;
    for &r in &r2 {
        for s in (r..=total).rev() {
            dist[s] += dist[s - r];
        }
    }
    let all = 2f64.powi(r2.len() as i32);
    let lower: f64 = dist[..=w].iter().sum::<f64>() / all;
    let upper: f64 = dist[w..].iter().sum::<f64>() / all;
    Ok((2.0 * lower.min(upper)).min(1.0))
}
