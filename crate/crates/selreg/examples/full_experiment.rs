//! The full benchmark grid: three selector ensembles x four regressors on
//! the bundled sleep-style CSV, exactly what `selreg run` does.
//!
//! Run: cargo run --release --example full_experiment

use std::path::PathBuf;

use selreg::config::ExperimentConfig;
use selreg::experiment::run_experiment;

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let mut config = ExperimentConfig::load(&root.join("configs/sleep-benchmark.json")).unwrap();
    config.dataset.csv = Some(root.join("data/sleep-synthetic.csv"));

    let out = PathBuf::from("target/full-experiment");
    let started = std::time::Instant::now();
    let file = run_experiment(&config, &out).unwrap();
    println!(
        "ran {} cells in {:?} (seed {}, config digest {})\n",
        file.results.len(),
        started.elapsed(),
        file.metadata.seed,
        &file.metadata.config_digest[..12]
    );

    println!("{}", std::fs::read_to_string(out.join("table.md")).unwrap());
    println!("artifacts in {}:", out.display());
    let mut entries: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    entries.sort();
    for entry in entries {
        println!("  {entry}");
    }
}
