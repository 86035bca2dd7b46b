//! Leakage-safe k-fold cross-validation of the four regressors on the
//! sleep-style data, with the target min-max scaled to [0, 1].
//!
//! Every fold refits the whole pipeline (standardizer, target scaler,
//! selector, regressor) on its own training rows.
//!
//! Run: cargo run --release --example cross_validation

use selreg::data::{generate_sleep_like, train_test_split};
use selreg::eval::{
    cross_validate, fit_pipeline, format_cv, EnsembleSpec, PipelineConfig, RegressorSpec,
    SelectorTechnique,
};
use selreg::regress::ForestParams;
use selreg::selection::EnsembleStrategy;

fn main() {
    let ds = generate_sleep_like(630, 42);
    let (train, test) = train_test_split(&ds, 0.2, 42).unwrap();
    println!(
        "{} training rows, {} test rows, {} features\n",
        train.n(),
        test.n(),
        train.d()
    );

    let selector = EnsembleSpec {
        label: "kbest-f".into(),
        techniques: vec![SelectorTechnique::FRegressionKBest { k: 6 }],
        strategy: EnsembleStrategy::Chain,
        vote_k: 6,
    };
    let regressors = [
        ("LinearRegression", RegressorSpec::Linear),
        ("Ridge", RegressorSpec::Ridge { lambda: 0.0016 }),
        (
            "Lasso",
            RegressorSpec::Lasso {
                lambda: 0.065,
                tol: 1e-8,
                max_iter: 10_000,
            },
        ),
        (
            "RandomForestRegressor",
            RegressorSpec::Forest(ForestParams {
                n_trees: 100,
                seed: 42,
                ..ForestParams::default()
            }),
        ),
    ];

    println!(
        "{:<24} {:>16} {:>10} {:>8}",
        "regressor", "CV RMSE", "test RMSE", "R^2"
    );
    println!("{}", "-".repeat(62));
    for (name, regressor) in regressors {
        let cfg = PipelineConfig {
            selector: selector.clone(),
            regressor,
            target_scaling: true,
            seed: 42,
        };
        let summary = cross_validate(&train, &cfg, 5, 42).unwrap();
        let pipeline = fit_pipeline(&train, &cfg).unwrap();
        let report = pipeline.evaluate(&test).unwrap();
        println!(
            "{name:<24} {:>16} {:>10.4} {:>8.4}",
            format_cv(&summary),
            report.rmse,
            report.r_squared
        );
    }
    println!("\nselected features (final fit): top-6 by F score, per fold refitted");
}
