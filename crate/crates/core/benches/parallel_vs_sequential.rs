//! Same workloads on a one-thread pool and on the default pool. Built without
//! the `parallel` feature only the sequential variant exists.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qreg_core::benchmarks::{generate_dataset, FunctionId, RegressionDataset};
use qreg_core::circuit::{AnsatzFamily, AnsatzKind};
use qreg_core::complexity::compute_profile;
use qreg_core::ga::{run_ga, GAConfig};
use qreg_core::metalearn::{loocv_accuracy, MetaDataset, MetaRow};
use qreg_core::train::{train, TrainConfig};

#[cfg(feature = "parallel")]
fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", one), ("parallel", all)]
}

fn compare(c: &mut Criterion, group: &str, work: impl Fn() + Sync) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    #[cfg(feature = "parallel")]
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| pool.install(&work)));
    }
    #[cfg(not(feature = "parallel"))]
    g.bench_function(BenchmarkId::from_parameter("sequential"), |b| b.iter(&work));
    g.finish();
}

fn dataset(id: u8, n: usize) -> RegressionDataset {
    generate_dataset(FunctionId::Suite(id), n, 0).unwrap()
}

fn batch_gradient(c: &mut Criterion) {
    let data = dataset(1, 900);
    let circuit = AnsatzFamily::new(AnsatzKind::StronglyEntangling, 10, 2).unwrap().build(2).unwrap();
    let cfg = TrainConfig { epochs: 5, ..Default::default() };
    compare(c, "train_sel10_5_epochs", || {
        black_box(train(&circuit, &data, &cfg).unwrap());
    });
}

fn complexity(c: &mut Criterion) {
    let data = dataset(9, 900);
    compare(c, "complexity_profile_n900", || {
        black_box(compute_profile(&data, 0).unwrap());
    });
}

fn meta_loocv(c: &mut Criterion) {
    let rows = (0..22)
        .map(|i| MetaRow {
            function_id: format!("f{}", i + 1),
            features: std::array::from_fn(|j| ((i * 7 + j * 3) % 11) as f64),
            label: if i % 3 == 0 { "a" } else { "b" }.into(),
        })
        .collect();
    let meta = MetaDataset::new(None, rows).unwrap();
    compare(c, "loocv_22_rows_100_trees", || {
        black_box(loocv_accuracy(&meta, &[0, 2, 5, 7], 100, 0).unwrap());
    });
}

fn ga_fitness(c: &mut Criterion) {
    let data = generate_dataset(FunctionId::OneD(1), 300, 0).unwrap();
    let cfg = GAConfig { population: 12, generations: 1, n_gates: 10, fitness_epochs: 20, ..Default::default() };
    let tc = TrainConfig { epochs: 20, ..Default::default() };
    compare(c, "ga_one_generation", || {
        black_box(run_ga(&cfg, &data, &tc).unwrap());
    });
}

criterion_group!(benches, batch_gradient, complexity, meta_loocv, ga_fitness);
criterion_main!(benches);
