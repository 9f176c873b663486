//! Benchmark functions, seeded dataset generation, scaling and splitting.

mod dataset;
mod functions;

pub use dataset::{generate_dataset, FunctionId, RegressionDataset, Scaling, TRAIN_FRACTION};
pub use functions::{
    all_benchmarks, benchmark, eval_1d_function, eval_function, BenchmarkFn, ONE_D_DOMAIN,
    SUITE_DIM, SUITE_SIZE,
};

