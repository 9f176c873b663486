use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qreg_core::benchmarks::{generate_dataset, FunctionId};
use qreg_core::circuit::{AnsatzFamily, CircuitSpec, Chromosome};
use qreg_core::complexity::{compute_profile, read_profiles_csv, write_profiles_csv};
use qreg_core::ga::{run_ga, GAConfig};
use qreg_core::metalearn::{majority_baseline, scenario_labels, subset_search, MetaDataset};
use qreg_core::runner::{
    emit_report, read_records, run_one, run_suite, MetaConfig, ModelSpec, ReportKind, SuiteConfig,
};
use qreg_core::sim::Tape;
use qreg_core::train::{initial_params, TrainConfig};
use qreg_core::{par, Error};

#[derive(Parser)]
#[command(name = "qreg", version, about = "Quantum regression workbench")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file or directory (command dependent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config with sections {functions, models, seeds, train, ga, meta}.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one circuit and print ⟨Z⟩.
    Simulate(SimulateArgs),
    /// Train one model on one benchmark dataset.
    Train(TrainArgs),
    /// Genetic architecture search for a reduced regressor.
    Ga(GaArgs),
    /// Run the experiment grid from --config, appending JSON-lines records.
    Bench,
    /// Complexity profiles of benchmark datasets as CSV.
    Complexity(ComplexityArgs),
    /// Scenario labels plus exhaustive meta-feature subset search.
    Meta(MetaArgs),
    /// Emit tables, depth curves or violin data.
    Report(ReportArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Circuit JSON ({n_qubits, gates}).
    #[arg(long, conflicts_with_all = ["model", "genes"])]
    circuit: Option<PathBuf>,
    /// Fixed ansatz, e.g. StronglyEntanglingLayers-2.
    #[arg(long)]
    model: Option<String>,
    /// Chromosome genes, comma separated (with --qubits).
    #[arg(long, value_delimiter = ',')]
    genes: Option<Vec<u32>>,
    #[arg(long, default_value_t = 1)]
    qubits: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    features: Vec<f64>,
    /// Parameters; drawn from --seed when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    wire: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value = "f1")]
    function: String,
    #[arg(long, default_value = "StronglyEntanglingLayers-10")]
    model: String,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, default_value_t = 900)]
    n_samples: usize,
}

#[derive(Args)]
struct GaArgs {
    #[arg(long, default_value = "1d-f1")]
    function: String,
    #[arg(long)]
    gates: Option<usize>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    elites: Option<usize>,
    #[arg(long)]
    mutation_fraction: Option<f64>,
    #[arg(long)]
    mutation_prob: Option<f64>,
    #[arg(long)]
    fitness_epochs: Option<usize>,
    /// Epochs for the final retrain of the best chromosome.
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long, default_value_t = 900)]
    n_samples: usize,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Function ids; all 22 suite functions when omitted.
    #[arg(long, value_delimiter = ',')]
    functions: Vec<String>,
    #[arg(long, default_value_t = 900)]
    n_samples: usize,
}

#[derive(Args)]
struct MetaArgs {
    /// Profiles CSV; computed from the suite when omitted.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Run records used to derive scenario labels.
    #[arg(long, required_unless_present = "labels")]
    records: Option<PathBuf>,
    /// CSV of function_id,label to use instead of derived labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Scenarios to run (default: the config's, else all five).
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<u8>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    n_trees: Option<usize>,
    #[arg(long, default_value_t = 900)]
    n_samples: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Records file (table, layers_curve) or subset-search CSV (violin_data).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "table")]
    kind: String,
}

fn load_config(common: &Common) -> Result<Option<SuiteConfig>> {
    common
        .config
        .as_deref()
        .map(SuiteConfig::load)
        .transpose()
        .map_err(Into::into)
}

fn write_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => {
            create_parent(p)?;
            fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn create_parent(p: &Path) -> Result<()> {
    if let Some(d) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(d)?;
    }
    Ok(())
}

fn parse_function(s: &str) -> Result<FunctionId> {
    s.parse::<FunctionId>()
        .map_err(|e| Error::Config { path: "function".into(), msg: e.to_string() }.into())
}

fn simulate(common: &Common, a: &SimulateArgs) -> Result<()> {
    let circuit: CircuitSpec = if let Some(p) = &a.circuit {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        serde_json::from_str(&text).map_err(|e| Error::Config { path: "circuit".into(), msg: e.to_string() })?
    } else if let Some(m) = &a.model {
        let Ok(ModelSpec::Ansatz { kind, layers, qubits }) = m.parse() else {
            return Err(Error::Config { path: "model".into(), msg: format!("`{m}` is not a fixed ansatz") }.into());
        };
        AnsatzFamily::new(kind, layers, qubits)?.build(a.features.len().max(1))?
    } else if let Some(g) = &a.genes {
        let n = g.len() / 3;
        Chromosome::new(n, a.qubits, g.clone())?.decode()?
    } else {
        bail!(Error::Config { path: "circuit".into(), msg: "give --circuit, --model or --genes".into() });
    };
    let tape = Tape::compile(&circuit);
    let params = match &a.params {
        Some(p) => p.clone(),
        None => initial_params(tape.n_params(), &TrainConfig { seed: common.seed, ..Default::default() }),
    };
    let value = tape.expectation(&params, &a.features, a.wire)?;
    write_json(
        common.out.as_deref(),
        &serde_json::json!({
            "expectation": value,
            "n_qubits": circuit.n_qubits(),
            "n_params": params.len(),
            "params": params,
            "circuit": circuit.describe(),
        }),
    )
}

fn base_suite(common: &Common, function: FunctionId, model: ModelSpec, n_samples: usize) -> Result<SuiteConfig> {
    let mut cfg = load_config(common)?.unwrap_or(SuiteConfig {
        functions: vec![],
        models: vec![],
        seeds: vec![],
        n_samples,
        train: TrainConfig::default(),
        ga: GAConfig::default(),
        meta: MetaConfig::default(),
    });
    cfg.functions = vec![function];
    cfg.models = vec![model];
    cfg.seeds = vec![common.seed];
    cfg.n_samples = n_samples;
    Ok(cfg)
}

fn train_cmd(common: &Common, a: &TrainArgs) -> Result<()> {
    let f = parse_function(&a.function)?;
    let m: ModelSpec = a
        .model
        .parse()
        .map_err(|e: Error| Error::Config { path: "model".into(), msg: e.to_string() })?;
    let mut cfg = base_suite(common, f, m.clone(), a.n_samples)?;
    if let Some(e) = a.epochs {
        cfg.train.epochs = e;
    }
    if let Some(lr) = a.lr {
        cfg.train.learning_rate = lr;
    }
    cfg.validate()?;
    let mut rec = run_one(f, &m, common.seed, &cfg)?;
    rec.command = "train".into();
    write_json(common.out.as_deref(), &serde_json::to_value(rec)?)
}

fn ga_cmd(common: &Common, a: &GaArgs) -> Result<()> {
    let f = parse_function(&a.function)?;
    let cfg = load_config(common)?;
    let mut ga = cfg.as_ref().map(|c| c.ga.clone()).unwrap_or_default();
    let mut tc = cfg.map(|c| c.train).unwrap_or_default();
    ga.seed = common.seed;
    macro_rules! set {
        ($($field:ident <- $arg:expr),*) => { $(if let Some(v) = $arg { ga.$field = v; })* };
    }
    set!(n_gates <- a.gates, n_qubits <- a.qubits, population <- a.population,
         generations <- a.generations, elites <- a.elites,
         mutation_genome_fraction <- a.mutation_fraction,
         mutation_individual_prob <- a.mutation_prob, fitness_epochs <- a.fitness_epochs);
    if let Some(e) = a.epochs {
        tc.epochs = e;
    }
    let data = generate_dataset(f, a.n_samples, common.seed)?;
    let res = run_ga(&ga, &data, &tc)?;
    let circuit = res.best_chromosome.decode()?;
    let mut v = serde_json::to_value(&res)?;
    v["function_id"] = f.to_string().into();
    v["config"] = serde_json::to_value(&ga)?;
    v["circuit"] = circuit.describe().into();
    v["param_count"] = circuit.n_trainable().into();
    write_json(common.out.as_deref(), &v)
}

fn bench_cmd(common: &Common) -> Result<()> {
    let Some(cfg) = load_config(common)? else {
        bail!(Error::Config { path: "--config".into(), msg: "bench needs a config file".into() });
    };
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("records.jsonl"));
    eprintln!("planned runs: {}", cfg.planned_count());
    let outcome = run_suite(&cfg, &out)?;
    println!(
        "planned {} skipped {} new {} -> {}",
        outcome.planned,
        outcome.skipped,
        outcome.records.len(),
        out.display()
    );
    Ok(())
}

fn profiles_for(functions: &[FunctionId], n: usize, seed: u64) -> Result<Vec<(String, qreg_core::complexity::ComplexityProfile)>> {
    let rows = par::try_map(functions, |&f| {
        let data = generate_dataset(f, n, seed)?;
        Ok::<_, Error>((f.to_string(), compute_profile(&data, seed)?))
    })?;
    Ok(rows)
}

fn complexity_cmd(common: &Common, a: &ComplexityArgs) -> Result<()> {
    let functions: Vec<FunctionId> = if a.functions.is_empty() {
        FunctionId::suite().collect()
    } else {
        a.functions.iter().map(|s| parse_function(s)).collect::<Result<_>>()?
    };
    let rows = profiles_for(&functions, a.n_samples, common.seed)?;
    match &common.out {
        Some(p) => {
            create_parent(p)?;
            write_profiles_csv(BufWriter::new(File::create(p)?), &rows)?;
        }
        None => write_profiles_csv(std::io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn read_labels(p: &Path) -> Result<std::collections::BTreeMap<String, String>> {
    let mut rdr = csv::Reader::from_path(p).with_context(|| format!("reading {}", p.display()))?;
    let mut m = std::collections::BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 2 {
            bail!(Error::Config { path: "labels".into(), msg: "expected function_id,label rows".into() });
        }
        m.insert(rec[0].to_string(), rec[1].to_string());
    }
    Ok(m)
}

fn meta_cmd(common: &Common, a: &MetaArgs) -> Result<()> {
    let cfg = load_config(common)?;
    let mut mc = cfg.as_ref().map(|c| c.meta.clone()).unwrap_or_default();
    if let Some(k) = a.k_min {
        mc.k_min = k;
    }
    if let Some(k) = a.k_max {
        mc.k_max = k;
    }
    if let Some(n) = a.n_trees {
        mc.n_trees = n;
    }
    if !a.scenario.is_empty() {
        mc.scenarios = a.scenario.clone();
    }
    mc.validate().map_err(|e| match e {
        Error::Config { path, msg } => Error::Config { path: format!("meta.{path}"), msg },
        e => e,
    })?;
    let seed = common.seed ^ mc.seed;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("meta"));
    fs::create_dir_all(&out)?;

    let profiles = match &a.profiles {
        Some(p) => read_profiles_csv(File::open(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => {
            let fs_: Vec<FunctionId> = match &cfg {
                Some(c) => c.functions.clone(),
                None => FunctionId::suite().collect(),
            };
            profiles_for(&fs_, a.n_samples, common.seed)?
        }
    };
    let records = match &a.records {
        Some(p) => read_records(p)?,
        None => vec![],
    };
    let fixed = a.labels.as_deref().map(read_labels).transpose()?;
    let scenarios = if fixed.is_some() { vec![0] } else { mc.scenarios.clone() };
    let mut summary = Vec::new();
    for s in scenarios {
        let labels = match &fixed {
            Some(l) => l.clone(),
            None => scenario_labels(s, &records)?,
        };
        let tag = if s == 0 { "custom".to_string() } else { format!("s{s}") };
        let meta = match MetaDataset::from_profiles((s > 0).then_some(s), &profiles, &labels) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("scenario {tag}: skipped ({e})");
                continue;
            }
        };
        meta.write_csv(File::create(out.join(format!("meta_{tag}.csv")))?)?;
        let search = subset_search(&meta, mc.k_min, mc.k_max, mc.n_trees, seed)?;
        search.write_csv(File::create(out.join(format!("results_{tag}.csv")))?)?;
        let best = search.best().expect("at least one subset");
        let baseline = majority_baseline(&meta.labels())?;
        println!(
            "scenario {tag}: rows {} baseline {:.4} best {:.4} ({})",
            meta.len(),
            baseline,
            best.loocv_accuracy,
            best.subset.join(",")
        );
        summary.push(serde_json::json!({
            "scenario": tag,
            "rows": meta.len(),
            "distribution": meta.class_distribution(),
            "baseline": baseline,
            "best_accuracy": best.loocv_accuracy,
            "best_subset": best.subset,
            "subsets_evaluated": search.results.len(),
        }));
    }
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(())
}

fn report_cmd(common: &Common, a: &ReportArgs) -> Result<()> {
    let kind: ReportKind = a
        .kind
        .parse()
        .map_err(|e: Error| Error::Config { path: "kind".into(), msg: e.to_string() })?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("report"));
    for p in emit_report(&a.input, kind, &out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(j) = cli.common.jobs {
        par::configure_threads(j).map_err(|e| Error::Config { path: "--jobs".into(), msg: e.to_string() })?;
    }
    match &cli.command {
        Command::Simulate(a) => simulate(&cli.common, a),
        Command::Train(a) => train_cmd(&cli.common, a),
        Command::Ga(a) => ga_cmd(&cli.common, a),
        Command::Bench => bench_cmd(&cli.common),
        Command::Complexity(a) => complexity_cmd(&cli.common, a),
        Command::Meta(a) => meta_cmd(&cli.common, a),
        Command::Report(a) => report_cmd(&cli.common, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<Error>().is_some_and(Error::is_config);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
