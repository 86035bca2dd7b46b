//! Random forest regression on the sleep-style data, with impurity feature
//! importances rendered to an SVG bar chart.
//!
//! Run: cargo run --release --example random_forest

use selreg::data::{generate_sleep_like, train_test_split};
use selreg::eval::MetricReport;
use selreg::regress::{fit_forest, ForestParams};
use selreg::report::write_importance_chart;

fn main() {
    let ds = generate_sleep_like(630, 42);
    let (train, test) = train_test_split(&ds, 0.2, 42).unwrap();

    let params = ForestParams {
        n_trees: 100,
        seed: 42,
        ..ForestParams::default()
    };
    let model = fit_forest(train.features(), train.target(), &params).unwrap();

    let preds = model.predict(test.features()).unwrap();
    let report = MetricReport::compute(test.target(), &preds).unwrap();
    println!(
        "forest of {} trees: test RMSE {:.4} (raw 0-4 stress units), R^2 {:.4}\n",
        params.n_trees, report.rmse, report.r_squared
    );

    let mut named: Vec<(String, f64)> = ds
        .feature_names()
        .iter()
        .cloned()
        .zip(model.importances().iter().copied())
        .collect();
    named.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    println!("impurity importances (sum = 1):");
    for (name, value) in &named {
        let bar = "#".repeat((value * 120.0).round() as usize);
        println!("  {name:<24} {value:.3}  {bar}");
    }

    let out = std::path::Path::new("target/importances.svg");
    write_importance_chart(&named, out).unwrap();
    println!("\nwrote {}", out.display());
}
