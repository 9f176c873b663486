//! Experiment orchestration: model descriptors, suite configs, JSON-lines
//! run records and report emission.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{KnnRegressor, OlsRegressor, TreeConfig, TreeRegressor};
use crate::benchmarks::{generate_dataset, FunctionId, RegressionDataset};
use crate::circuit::{AnsatzFamily, AnsatzKind};
use crate::ga::{run_ga, GAConfig};
use crate::train::{metrics, train, Metrics, TrainConfig};
use crate::{par, rng, Error, Result};

/// R² means below this render as `-inf` in tables.
pub const R2_SENTINEL: f64 = -100.0;

/// A model in the experiment grid, written as in the result tables:
/// `StronglyEntanglingLayers-10`, `RRQNN-120-2q`, `knn3`, `DT`, `OLS`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelSpec {
    Ansatz { kind: AnsatzKind, layers: usize, qubits: usize },
    Rrqnn { gates: usize, qubits: usize },
    Knn { k: usize },
    Tree,
    Ols,
}

const DEFAULT_ANSATZ_QUBITS: usize = 2;

impl ModelSpec {
    pub fn is_quantum(&self) -> bool {
        matches!(self, ModelSpec::Ansatz { .. } | ModelSpec::Rrqnn { .. })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Ansatz { kind, layers, qubits } => {
                write!(f, "{}-{layers}", kind.name())?;
                if *qubits != DEFAULT_ANSATZ_QUBITS {
                    write!(f, "-{qubits}q")?;
                }
                Ok(())
            }
            ModelSpec::Rrqnn { gates, qubits } => write!(f, "RRQNN-{gates}-{qubits}q"),
            ModelSpec::Knn { k } => write!(f, "knn{k}"),
            ModelSpec::Tree => write!(f, "DT"),
            ModelSpec::Ols => write!(f, "OLS"),
        }
    }
}

fn parse_qubits(s: &str) -> Option<usize> {
    s.strip_suffix('q')?.parse().ok().filter(|&q| q > 0)
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unrecognised model `{s}`"));
        let s = s.trim();
        match s {
            "DT" => return Ok(ModelSpec::Tree),
            "OLS" | "LR" => return Ok(ModelSpec::Ols),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("knn") {
            let k: usize = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            return Ok(ModelSpec::Knn { k });
        }
        let parts: Vec<&str> = s.split('-').collect();
        if parts[0] == "RRQNN" {
            let [_, g, q] = parts[..] else { return Err(bad()) };
            let gates: usize = g.parse().map_err(|_| bad())?;
            let qubits = parse_qubits(q).ok_or_else(bad)?;
            if gates == 0 {
                return Err(bad());
            }
            return Ok(ModelSpec::Rrqnn { gates, qubits });
        }
        let (kind, layers, qubits) = match parts[..] {
            [k, l] => (k, l, DEFAULT_ANSATZ_QUBITS),
            [k, l, q] => (k, l, parse_qubits(q).ok_or_else(bad)?),
            _ => return Err(bad()),
        };
        let kind: AnsatzKind = kind.parse().map_err(|_| bad())?;
        let layers: usize = layers.parse().map_err(|_| bad())?;
        AnsatzFamily::new(kind, layers, qubits)?;
        Ok(ModelSpec::Ansatz { kind, layers, qubits })
    }
}

impl TryFrom<String> for ModelSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelSpec> for String {
    fn from(m: ModelSpec) -> String {
        m.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordMetrics {
    pub train_r2: f64,
    pub train_rmse: f64,
    pub full_r2: f64,
    pub full_rmse: f64,
}

impl RecordMetrics {
    fn new(train: Metrics, full: Metrics) -> Self {
        Self {
            train_r2: train.r2,
            train_rmse: train.rmse,
            full_r2: full.r2,
            full_rmse: full.rmse,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub command: String,
    pub config: serde_json::Value,
    pub function_id: String,
    pub model: String,
    pub seed: u64,
    pub metrics: RecordMetrics,
    pub param_count: usize,
    pub wall_time_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chromosome: Option<Vec<u32>>,
}

pub fn run_id(function: FunctionId, model: &ModelSpec, seed: u64) -> String {
    format!("{function}/{model}/{seed}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetaConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub n_trees: usize,
    pub seed: u64,
    pub scenarios: Vec<u8>,
}

impl Default for MetaConfig {
    fn default() -> Self {
        Self {
            k_min: 1,
            k_max: 12,
            n_trees: 100,
            seed: 0,
            scenarios: crate::metalearn::SCENARIOS.to_vec(),
        }
    }
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_min == 0 {
            return Err(Error::config("k_min", "must be at least 1"));
        }
        if self.k_max > 12 || self.k_max < self.k_min {
            return Err(Error::config("k_max", "must satisfy k_min <= k_max <= 12"));
        }
        if self.n_trees == 0 {
            return Err(Error::config("n_trees", "must be at least 1"));
        }
        if let Some(i) = self.scenarios.iter().position(|s| !(1..=5).contains(s)) {
            return Err(Error::config(format!("scenarios[{i}]"), "scenario must be 1..=5"));
        }
        Ok(())
    }
}

/// Cross-product experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub functions: Vec<FunctionId>,
    pub models: Vec<ModelSpec>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub ga: GAConfig,
    #[serde(default)]
    pub meta: MetaConfig,
}

fn default_samples() -> usize {
    900
}

fn nest(section: &str, e: Error) -> Error {
    match e {
        Error::Config { path, msg } => Error::config(format!("{section}.{path}"), msg),
        other => other,
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() {
            return Err(Error::config("functions", "must list at least one function"));
        }
        if self.models.is_empty() {
            return Err(Error::config("models", "must list at least one model"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must list at least one seed"));
        }
        if self.n_samples < 10 {
            return Err(Error::config("n_samples", "must be at least 10"));
        }
        self.train.validate().map_err(|e| nest("train", e))?;
        self.ga.validate().map_err(|e| nest("ga", e))?;
        self.meta.validate().map_err(|e| nest("meta", e))?;
        Ok(())
    }

    /// Parse JSON, reporting the path of the offending field on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SuiteConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    /// Every (function, model, seed) triple, functions outermost.
    pub fn planned_runs(&self) -> Vec<(FunctionId, ModelSpec, u64)> {
        let mut v = Vec::with_capacity(self.planned_count());
        for &f in &self.functions {
            for m in &self.models {
                for &s in &self.seeds {
                    v.push((f, m.clone(), s));
                }
            }
        }
        v
    }

    pub fn planned_count(&self) -> usize {
        self.functions.len() * self.models.len() * self.seeds.len()
    }
}

fn split_rows(data: &RegressionDataset) -> (Vec<Vec<f64>>, Vec<f64>) {
    data.train_split()
}

fn fit_metrics(data: &RegressionDataset, predict: impl Fn(&[f64]) -> f64 + Sync) -> Result<RecordMetrics> {
    let preds = par::map(data.x(), |r| predict(r));
    let train_y: Vec<f64> = data.train_idx().iter().map(|&i| data.y()[i]).collect();
    let train_p: Vec<f64> = data.train_idx().iter().map(|&i| preds[i]).collect();
    Ok(RecordMetrics::new(metrics(&train_y, &train_p)?, metrics(data.y(), &preds)?))
}

/// Train and score one model on one seeded dataset.
pub fn run_one(function: FunctionId, model: &ModelSpec, seed: u64, config: &SuiteConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let data = generate_dataset(function, config.n_samples, seed)?;
    let model_seed = rng::derive(seed, &[rng::hash_str(&model.to_string())]);
    let mut snapshot = serde_json::json!({ "n_samples": config.n_samples });
    let mut chromosome = None;
    let (metrics, param_count) = match model {
        ModelSpec::Ansatz { kind, layers, qubits } => {
            let circuit = AnsatzFamily::new(*kind, *layers, *qubits)?.build(data.dim())?;
            let tc = TrainConfig { seed: model_seed, ..config.train.clone() };
            snapshot["train"] = serde_json::to_value(&tc)?;
            let res = train(&circuit, &data, &tc)?;
            (RecordMetrics::new(res.train_metrics, res.full_metrics), circuit.n_trainable())
        }
        ModelSpec::Rrqnn { gates, qubits } => {
            let gc = GAConfig {
                n_gates: *gates,
                n_qubits: *qubits,
                seed: model_seed,
                ..config.ga.clone()
            };
            snapshot["train"] = serde_json::to_value(&config.train)?;
            snapshot["ga"] = serde_json::to_value(&gc)?;
            let res = run_ga(&gc, &data, &config.train)?;
            let params = res.best_chromosome.decode()?.n_trainable();
            chromosome = Some(res.best_chromosome.genes().to_vec());
            (RecordMetrics::new(res.final_train_metrics, res.final_metrics), params)
        }
        ModelSpec::Knn { k } => {
            let (x, y) = split_rows(&data);
            let m = KnnRegressor::fit(*k, &x, &y)?;
            (fit_metrics(&data, |r| m.predict(r))?, m.param_count())
        }
        ModelSpec::Tree => {
            let (x, y) = split_rows(&data);
            let m = TreeRegressor::fit(&x, &y, TreeConfig::default())?;
            (fit_metrics(&data, |r| m.predict(r))?, m.param_count())
        }
        ModelSpec::Ols => {
            let (x, y) = split_rows(&data);
            let m = OlsRegressor::fit(&x, &y)?;
            (fit_metrics(&data, |r| m.predict(r))?, m.param_count())
        }
    };
    Ok(RunRecord {
        run_id: run_id(function, model, seed),
        command: "bench".into(),
        config: snapshot,
        function_id: function.to_string(),
        model: model.to_string(),
        seed,
        metrics,
        param_count,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        chromosome,
    })
}

/// Read a JSON-lines record file; a missing file reads as empty.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunRecord = serde_json::from_str(&line)
            .map_err(|e| Error::invalid(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Append-only record sink shared by concurrent runs.
pub struct RecordSink {
    out: Mutex<BufWriter<File>>,
}

impl RecordSink {
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let f = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { out: Mutex::new(BufWriter::new(f)) })
    }

    pub fn append(&self, rec: &RunRecord) -> Result<()> {
        let line = serde_json::to_string(rec)?;
        let mut w = self.out.lock().unwrap_or_else(|p| p.into_inner());
        writeln!(w, "{line}")?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub planned: usize,
    pub skipped: usize,
    /// Records produced by this invocation, in plan order.
    pub records: Vec<RunRecord>,
}

/// Execute every planned run not already present in `records_path`.
pub fn run_suite(config: &SuiteConfig, records_path: &Path) -> Result<SuiteOutcome> {
    config.validate()?;
    let done: BTreeSet<String> = read_records(records_path)?.into_iter().map(|r| r.run_id).collect();
    let plan = config.planned_runs();
    let planned = plan.len();
    let todo: Vec<_> = plan
        .into_iter()
        .filter(|(f, m, s)| !done.contains(&run_id(*f, m, *s)))
        .collect();
    let skipped = planned - todo.len();
    let sink = RecordSink::open(records_path)?;
    let records = par::try_map(&todo, |(f, m, s)| {
        let rec = run_one(*f, m, *s, config)?;
        sink.append(&rec)?;
        Ok::<_, Error>(rec)
    })?;
    Ok(SuiteOutcome { planned, skipped, records })
}

pub fn run_suite_file(config_path: &Path, records_path: &Path) -> Result<SuiteOutcome> {
    run_suite(&SuiteConfig::load(config_path)?, records_path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Table,
    LayersCurve,
    ViolinData,
}

impl FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportKind::Table),
            "layers_curve" | "layers-curve" => Ok(ReportKind::LayersCurve),
            "violin_data" | "violin-data" => Ok(ReportKind::ViolinData),
            _ => Err(Error::invalid(format!("unknown report kind `{s}`"))),
        }
    }
}

/// Mean and population standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn fmt_r2(mean: f64) -> String {
    if mean < R2_SENTINEL {
        "-inf".into()
    } else {
        format!("{mean:.4}")
    }
}

fn function_order(id: &str) -> (Option<FunctionId>, String) {
    (id.parse().ok(), id.to_string())
}

struct Group {
    r2: Vec<f64>,
    rmse: Vec<f64>,
    params: Vec<f64>,
}

fn group_records(records: &[RunRecord]) -> BTreeMap<(Option<FunctionId>, String), BTreeMap<String, Group>> {
    let mut g: BTreeMap<_, BTreeMap<String, Group>> = BTreeMap::new();
    for r in records {
        let e = g
            .entry(function_order(&r.function_id))
            .or_default()
            .entry(r.model.clone())
            .or_insert(Group { r2: vec![], rmse: vec![], params: vec![] });
        e.r2.push(r.metrics.full_r2);
        e.rmse.push(r.metrics.full_rmse);
        e.params.push(r.param_count as f64);
    }
    g
}

/// Per-function tables of mean ± std for full-data R², RMSE and parameter
/// count, best model first.
pub fn table_csv(records: &[RunRecord]) -> Result<BTreeMap<String, String>> {
    if records.is_empty() {
        return Err(Error::EmptyReport("no run records".into()));
    }
    let mut out = BTreeMap::new();
    for ((_, fid), models) in group_records(records) {
        let mut rows: Vec<(String, f64, f64, f64, f64, f64, f64, usize)> = models
            .into_iter()
            .map(|(m, g)| {
                let (r2, r2s) = mean_std(&g.r2);
                let (e, es) = mean_std(&g.rmse);
                let (p, ps) = mean_std(&g.params);
                (m, r2, r2s, e, es, p, ps, g.r2.len())
            })
            .collect();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model", "r2_mean", "r2_std", "rmse_mean", "rmse_std", "params_mean", "params_std", "runs"])?;
        for (m, r2, r2s, e, es, p, ps, n) in rows {
            w.write_record([
                m,
                fmt_r2(r2),
                format!("{r2s:.4}"),
                format!("{e:.4}"),
                format!("{es:.4}"),
                format!("{p:.1}"),
                format!("{ps:.2}"),
                n.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.insert(fid, String::from_utf8(bytes).expect("csv output is utf-8"));
    }
    Ok(out)
}

/// Rows of (function, family, layers, mean R², std R², runs) for fixed ansätze.
pub fn layers_curve_rows(records: &[RunRecord]) -> Vec<(String, String, usize, f64, f64, usize)> {
    let mut g: BTreeMap<(Option<FunctionId>, String, String, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Ok(ModelSpec::Ansatz { kind, layers, .. }) = r.model.parse() {
            let (fo, fid) = function_order(&r.function_id);
            g.entry((fo, fid, kind.name().to_string(), layers))
                .or_default()
                .push(r.metrics.full_r2);
        }
    }
    g.into_iter()
        .map(|((_, f, fam, l), v)| {
            let (m, s) = mean_std(&v);
            (f, fam, l, m, s, v.len())
        })
        .collect()
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Line chart of mean R² against depth, one polyline per family.
pub fn layers_curve_svg(function: &str, rows: &[(String, String, usize, f64, f64, usize)]) -> String {
    let rows: Vec<_> = rows.iter().filter(|r| r.0 == function).collect();
    let depths: Vec<usize> = rows.iter().map(|r| r.2).collect::<BTreeSet<_>>().into_iter().collect();
    let lo = rows.iter().map(|r| r.3.max(-1.0)).fold(0.0f64, f64::min);
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let xs = |l: usize| {
        let i = depths.iter().position(|&d| d == l).unwrap() as f64;
        pad + i * (w - 2.0 * pad) / (depths.len().max(2) - 1) as f64
    };
    let ys = |v: f64| h - pad - (v.max(-1.0) - lo) / (1.0 - lo) * (h - 2.0 * pad);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{function}: mean R² by depth</text>\n\
         <line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>\n",
        w / 2.0,
        h - pad,
        w - pad,
        h - pad,
        h - pad
    );
    for &d in &depths {
        s += &format!("<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{d}</text>\n", xs(d), h - pad + 15.0);
    }
    for v in [lo, (lo + 1.0) / 2.0, 1.0] {
        s += &format!("<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v:.2}</text>\n", pad - 5.0, ys(v) + 4.0);
    }
    let families: Vec<&String> = rows.iter().map(|r| &r.1).collect::<BTreeSet<_>>().into_iter().collect();
    for (i, fam) in families.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| &r.1 == *fam)
            .map(|r| format!("{:.1},{:.1}", xs(r.2), ys(r.3)))
            .collect();
        s += &format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" fill=\"{color}\">{fam}</text>\n",
            pts.join(" "),
            w - pad - 150.0,
            pad + 15.0 * i as f64
        );
    }
    s += "</svg>\n";
    s
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Per-size accuracy summary from a subset-search results CSV.
pub fn violin_csv(results_csv: &str) -> Result<String> {
    let mut rdr = csv::Reader::from_reader(results_csv.as_bytes());
    let mut by_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut baseline = None;
    for rec in rdr.records() {
        let rec = rec?;
        let k: usize = rec[1].parse().map_err(|_| Error::invalid("bad k column"))?;
        let a: f64 = rec[2].parse().map_err(|_| Error::invalid("bad accuracy column"))?;
        baseline = rec.get(3).and_then(|b| b.parse::<f64>().ok()).or(baseline);
        by_k.entry(k).or_default().push(a);
    }
    if by_k.is_empty() {
        return Err(Error::EmptyReport("no subset results".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n_subsets", "min", "q1", "median", "q3", "max", "mean", "baseline"])?;
    for (k, mut v) in by_k {
        v.sort_by(f64::total_cmp);
        let (mean, _) = mean_std(&v);
        w.write_record([
            k.to_string(),
            v.len().to_string(),
            format!("{:.4}", v[0]),
            format!("{:.4}", quantile(&v, 0.25)),
            format!("{:.4}", quantile(&v, 0.5)),
            format!("{:.4}", quantile(&v, 0.75)),
            format!("{:.4}", v[v.len() - 1]),
            format!("{mean:.4}"),
            baseline.map_or(String::new(), |b| format!("{b:.4}")),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn safe_name(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Write a report into `out_dir`. `input` is a record file for `table` and
/// `layers_curve`, and a subset-search results CSV for `violin_data`.
pub fn emit_report(input: &Path, kind: ReportKind, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> Result<()> {
        let p = out_dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    match kind {
        ReportKind::Table => {
            for (fid, body) in table_csv(&read_records(input)?)? {
                put(format!("table_{}.csv", safe_name(&fid)), &body)?;
            }
        }
        ReportKind::LayersCurve => {
            let rows = layers_curve_rows(&read_records(input)?);
            if rows.is_empty() {
                return Err(Error::EmptyReport("no fixed-ansatz records".into()));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["function", "family", "layers", "mean_r2", "std_r2", "runs"])?;
            for (f, fam, l, m, s, n) in &rows {
                w.write_record([f.clone(), fam.clone(), l.to_string(), format!("{m:.4}"), format!("{s:.4}"), n.to_string()])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            put("layers_curve.csv".into(), &String::from_utf8(bytes).expect("utf-8"))?;
            let functions: Vec<String> = rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>();
            let mut seen = BTreeSet::new();
            for f in functions {
                if seen.insert(f.clone()) {
                    put(format!("layers_curve_{}.svg", safe_name(&f)), &layers_curve_svg(&f, &rows))?;
                }
            }
        }
        ReportKind::ViolinData => {
            let text = fs::read_to_string(input)?;
            put("violin_data.csv".into(), &violin_csv(&text)?)?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_strings() {
        for s in ["StronglyEntanglingLayers-10", "SimplifiedTwoDesign-60", "BasicEntanglerLayers-3-4q", "RRQNN-120-2q", "knn3", "DT", "OLS"] {
            assert_eq!(s.parse::<ModelSpec>().unwrap().to_string(), s);
        }
        assert_eq!(
            "SEL-10".parse::<ModelSpec>().unwrap().to_string(),
            "StronglyEntanglingLayers-10"
        );
        for bad in ["RRQNN-0-1q", "knn0", "Foo-3", "StronglyEntanglingLayers-0", "RRQNN-5"] {
            assert!(bad.parse::<ModelSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_errors_carry_paths() {
        let e = SuiteConfig::from_json(r#"{"functions":["f1"],"models":["knn3","nope"],"seeds":[0]}"#).unwrap_err();
        match e {
            Error::Config { path, .. } => assert_eq!(path, "models[1]"),
            other => panic!("{other:?}"),
        }
        let e = SuiteConfig::from_json(
            r#"{"functions":["f1"],"models":["knn3"],"seeds":[0],"train":{"learning_rate":-1}}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "train.learning_rate"), "{e}");
        let e = SuiteConfig::from_json(r#"{"functions":[],"models":["knn3"],"seeds":[0]}"#).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "functions"));
    }

    #[test]
    fn sentinel_and_std() {
        assert_eq!(fmt_r2(-150.0), "-inf");
        assert_eq!(fmt_r2(0.12345), "0.1235");
        assert_eq!(mean_std(&[2.0; 10]), (2.0, 0.0));
        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, 1.0));
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }
}
