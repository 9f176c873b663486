//! Meta-learning over complexity profiles: scenario labels, majority
//! baselines, forest LOOCV and exhaustive feature-subset search.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::baselines::{ForestClassifier, ForestConfig};
use crate::complexity::{ComplexityProfile, MEASURE_NAMES};
use crate::runner::{ModelSpec, RunRecord};
use crate::{par, rng, Error, Result};

pub const FEATURE_NAMES: [&str; 12] = MEASURE_NAMES;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaRow {
    pub function_id: String,
    pub features: [f64; 12],
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaDataset {
    pub scenario: Option<u8>,
    pub rows: Vec<MetaRow>,
}

impl MetaDataset {
    pub fn new(scenario: Option<u8>, rows: Vec<MetaRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("meta-dataset has no rows"));
        }
        let ids: BTreeSet<&str> = rows.iter().map(|r| r.function_id.as_str()).collect();
        if ids.len() != rows.len() {
            return Err(Error::invalid("meta-dataset repeats a function id"));
        }
        Ok(Self { scenario, rows })
    }

    /// Join profiles with labels on function id; functions without a label
    /// are dropped.
    pub fn from_profiles(
        scenario: Option<u8>,
        profiles: &[(String, ComplexityProfile)],
        labels: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let rows = profiles
            .iter()
            .filter_map(|(id, p)| {
                labels.get(id).map(|l| MetaRow {
                    function_id: id.clone(),
                    features: p.to_array(),
                    label: l.clone(),
                })
            })
            .collect();
        Self::new(scenario, rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.label.as_str()).collect()
    }

    /// Sorted distinct labels and each row's index into them.
    pub fn encoded_labels(&self) -> (Vec<String>, Vec<usize>) {
        let classes: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let y = self
            .rows
            .iter()
            .map(|r| classes.binary_search(&r.label).unwrap())
            .collect();
        (classes, y)
    }

    pub fn class_distribution(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rows {
            *m.entry(r.label.clone()).or_insert(0) += 1;
        }
        m
    }

    /// CSV with columns `function_id, c1..t2, label`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["function_id"];
        header.extend(FEATURE_NAMES);
        header.push("label");
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.function_id.clone()];
            rec.extend(r.features.iter().map(|v| v.to_string()));
            rec.push(r.label.clone());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, scenario: Option<u8>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::invalid(format!("meta CSV lacks column `{name}`")))
        };
        let id_col = col("function_id")?;
        let label_col = col("label")?;
        let feat_cols: Vec<usize> = FEATURE_NAMES.iter().map(|n| col(n)).collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut features = [0.0; 12];
            for (f, &c) in features.iter_mut().zip(&feat_cols) {
                *f = rec[c]
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad number `{}`", &rec[c])))?;
            }
            rows.push(MetaRow {
                function_id: rec[id_col].to_string(),
                features,
                label: rec[label_col].to_string(),
            });
        }
        Self::new(scenario, rows)
    }
}

/// Largest class frequency over the number of labels.
pub fn majority_baseline<S: AsRef<str>>(labels: &[S]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::invalid("no labels"));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_ref()).or_insert(0) += 1;
    }
    Ok(*counts.values().max().unwrap() as f64 / labels.len() as f64)
}

/// Parse feature names (`c1`, `s4`, ...) into sorted column indices.
pub fn subset_indices<S: AsRef<str>>(names: &[S]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = names
        .iter()
        .map(|n| {
            FEATURE_NAMES
                .iter()
                .position(|f| *f == n.as_ref())
                .ok_or_else(|| Error::invalid(format!("unknown meta-feature `{}`", n.as_ref())))
        })
        .collect::<Result<_>>()?;
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

pub fn subset_names(subset: &[usize]) -> Vec<String> {
    subset.iter().map(|&i| FEATURE_NAMES[i].to_string()).collect()
}

fn check_subset(subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::invalid("feature subset is empty"));
    }
    if subset.iter().any(|&i| i >= FEATURE_NAMES.len()) {
        return Err(Error::invalid("feature index out of range"));
    }
    Ok(())
}

fn fold_seed(seed: u64, subset: &[usize], fold: usize) -> u64 {
    let tag: Vec<u64> = subset.iter().map(|&i| i as u64).collect();
    rng::derive(seed, &[rng::hash_slice(&tag), fold as u64])
}

/// Leave-one-out accuracy of a fresh forest per fold, restricted to `subset`.
pub fn loocv_accuracy(meta: &MetaDataset, subset: &[usize], n_trees: usize, seed: u64) -> Result<f64> {
    check_subset(subset)?;
    let n = meta.len();
    if n < 2 {
        return Err(Error::invalid("LOOCV needs at least two rows"));
    }
    let (_, y) = meta.encoded_labels();
    let x: Vec<Vec<f64>> = meta
        .rows
        .iter()
        .map(|r| subset.iter().map(|&j| r.features[j]).collect())
        .collect();
    let mut correct = 0;
    for fold in 0..n {
        let tx: Vec<Vec<f64>> = (0..n).filter(|&i| i != fold).map(|i| x[i].clone()).collect();
        let ty: Vec<usize> = (0..n).filter(|&i| i != fold).map(|i| y[i]).collect();
        let pred = if ty.iter().all(|&c| c == ty[0]) {
            ty[0]
        } else {
            let mut f = ForestClassifier::new(ForestConfig {
                n_trees,
                seed: fold_seed(seed, subset, fold),
            });
            f.fit(&tx, &ty)?;
            f.predict(&x[fold])?
        };
        if pred == y[fold] {
            correct += 1;
        }
    }
    Ok(correct as f64 / n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSearchResult {
    pub subset: Vec<String>,
    pub k: usize,
    pub loocv_accuracy: f64,
    pub baseline: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSearch {
    /// Sorted by accuracy descending, then subset in feature order.
    pub results: Vec<SubsetSearchResult>,
    /// Accuracies per subset size.
    pub by_size: BTreeMap<usize, Vec<f64>>,
    pub baseline: f64,
}

impl SubsetSearch {
    pub fn best(&self) -> Option<&SubsetSearchResult> {
        self.results.first()
    }

    /// Results CSV: `subset, k, accuracy, baseline`; subset names joined by `+`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["subset", "k", "accuracy", "baseline"])?;
        for r in &self.results {
            out.write_record([
                r.subset.join("+"),
                r.k.to_string(),
                r.loocv_accuracy.to_string(),
                r.baseline.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// All subsets of `0..12` with size in `k_min..=k_max`, in lexicographic order.
pub fn enumerate_subsets(k_min: usize, k_max: usize) -> Vec<Vec<usize>> {
    let n = FEATURE_NAMES.len();
    let mut out = Vec::new();
    for k in k_min..=k_max.min(n) {
        let mut c: Vec<usize> = (0..k).collect();
        loop {
            out.push(c.clone());
            let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else {
                break;
            };
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
        }
    }
    out
}

pub fn subset_search(meta: &MetaDataset, k_min: usize, k_max: usize, n_trees: usize, seed: u64) -> Result<SubsetSearch> {
    if !(1 <= k_min && k_min <= k_max && k_max <= FEATURE_NAMES.len()) {
        return Err(Error::invalid(format!("need 1 <= k_min <= k_max <= 12, got {k_min}..{k_max}")));
    }
    let baseline = majority_baseline(&meta.labels())?;
    let subsets = enumerate_subsets(k_min, k_max);
    let acc = par::try_map(&subsets, |s| loocv_accuracy(meta, s, n_trees, seed))?;
    let mut scored: Vec<(Vec<usize>, f64)> = subsets.into_iter().zip(acc).collect();
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (s, a) in &scored {
        by_size.entry(s.len()).or_default().push(*a);
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let results = scored
        .into_iter()
        .map(|(s, a)| SubsetSearchResult {
            k: s.len(),
            subset: subset_names(&s),
            loocv_accuracy: a,
            baseline,
        })
        .collect();
    Ok(SubsetSearch { results, by_size, baseline })
}

pub const SCENARIOS: [u8; 5] = [1, 2, 3, 4, 5];

/// The RRQNN configurations compared in scenario 2.
pub const SCENARIO2_MODELS: [&str; 4] = ["RRQNN-120-2q", "RRQNN-120-1q", "RRQNN-20-2q", "RRQNN-40-1q"];

pub fn scenario_description(scenario: u8) -> &'static str {
    match scenario {
        1 => "StronglyEntanglingLayers vs SimplifiedTwoDesign family",
        2 => "best of four RRQNN operator/qubit budgets",
        3 => "one vs two qubit RRQNN",
        4 => "best quantum model and depth",
        5 => "best quantum family, depths collapsed",
        _ => "unknown scenario",
    }
}

/// Which models compete in a scenario and what label a winner gets.
fn scenario_label(scenario: u8, model: &ModelSpec) -> Option<String> {
    use crate::circuit::AnsatzKind::*;
    match (scenario, model) {
        (1, ModelSpec::Ansatz { kind: k @ (StronglyEntangling | SimplifiedTwoDesign), .. }) => {
            Some(k.name().to_string())
        }
        (2, m @ ModelSpec::Rrqnn { .. }) => {
            let name = m.to_string();
            SCENARIO2_MODELS.contains(&name.as_str()).then_some(name)
        }
        (3, ModelSpec::Rrqnn { qubits, .. }) => Some(format!("{qubits}q")),
        (4, m) if m.is_quantum() => Some(m.to_string()),
        (5, ModelSpec::Ansatz { kind, .. }) => Some(kind.name().to_string()),
        (5, m @ ModelSpec::Rrqnn { .. }) => Some(m.to_string()),
        _ => None,
    }
}

/// Per-function winner labels: the eligible model with the highest mean
/// full-data R² over seeds (ties to the lower model name).
pub fn scenario_labels(scenario: u8, records: &[RunRecord]) -> Result<BTreeMap<String, String>> {
    if !SCENARIOS.contains(&scenario) {
        return Err(Error::invalid(format!("scenario {scenario} outside 1..=5")));
    }
    let mut sums: BTreeMap<(String, String), (f64, usize, String)> = BTreeMap::new();
    for r in records {
        let model: ModelSpec = r.model.parse()?;
        if let Some(label) = scenario_label(scenario, &model) {
            let e = sums
                .entry((r.function_id.clone(), model.to_string()))
                .or_insert((0.0, 0, label));
            e.0 += r.metrics.full_r2;
            e.1 += 1;
        }
    }
    let mut best: BTreeMap<String, (f64, String)> = BTreeMap::new();
    for ((fid, _), (sum, n, label)) in sums {
        let mean = sum / n as f64;
        match best.get(&fid) {
            Some((m, _)) if *m >= mean => {}
            _ => {
                best.insert(fid, (mean, label));
            }
        }
    }
    Ok(best.into_iter().map(|(f, (_, l))| (f, l)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable(n: usize) -> MetaDataset {
        let rows = (0..n)
            .map(|i| {
                let label = i % 2;
                let mut features = [0.5; 12];
                features[3] = label as f64 * 3.0;
                features[7] = (i * 7 % 5) as f64;
                MetaRow {
                    function_id: format!("f{}", i + 1),
                    features,
                    label: format!("class{label}"),
                }
            })
            .collect();
        MetaDataset::new(Some(1), rows).unwrap()
    }

    #[test]
    fn baselines_from_distributions() {
        let mut l = vec!["a"; 17];
        l.extend(["b"; 5]);
        assert!((majority_baseline(&l).unwrap() - 17.0 / 22.0).abs() < 1e-15);
        assert_eq!(majority_baseline(&["x", "x"]).unwrap(), 1.0);
        assert!(majority_baseline::<&str>(&[]).is_err());
    }

    #[test]
    fn subset_counts() {
        assert_eq!(enumerate_subsets(12, 12).len(), 1);
        assert_eq!(enumerate_subsets(1, 12).len(), 4095);
        assert_eq!(enumerate_subsets(2, 2)[..2], [vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn separable_loocv() {
        let m = separable(12);
        assert_eq!(loocv_accuracy(&m, &[3], 10, 0).unwrap(), 1.0);
        assert!(loocv_accuracy(&m, &[], 10, 0).is_err());
    }

    #[test]
    fn single_class_is_perfect() {
        let mut m = separable(8);
        for r in &mut m.rows {
            r.label = "only".into();
        }
        assert_eq!(loocv_accuracy(&m, &[0, 1], 5, 1).unwrap(), 1.0);
    }

    #[test]
    fn search_finds_separating_feature() {
        let m = separable(10);
        let s = subset_search(&m, 1, 2, 5, 3).unwrap();
        assert_eq!(s.results.len(), 12 + 66);
        assert_eq!(s.best().unwrap().loocv_accuracy, 1.0);
        assert_eq!(s.by_size[&1].len(), 12);
        let again = subset_search(&m, 1, 2, 5, 3).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn csv_round_trip() {
        let m = separable(4);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(MetaDataset::read_csv(&buf[..], Some(1)).unwrap(), m);
    }

    #[test]
    fn subset_name_parsing() {
        assert_eq!(subset_indices(&["s4", "c1", "t2"]).unwrap(), vec![0, 10, 11]);
        assert!(subset_indices(&["c9"]).is_err());
    }
}
