//! The experiment driver: runs every (selector ensemble, regressor) cell of
//! a configured grid and writes the results artifacts, plus the standalone
//! scoring used by the `score` subcommand.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::data::{train_test_split, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    cross_validate, fit_pipeline, fit_selection, EnsembleSpec, PipelineConfig, RegressorSpec,
};
use crate::report::{
    render_table, write_atomic, write_importance_chart, write_results_json, ExperimentResult,
    ResultsFile, RunMetadata, TableFormat,
};
use crate::rng;
use crate::selection::{EnsembleStrategy, SelectorModel};

/// Runs the full grid described by `config` and writes `results.json`,
/// `table.md` and one `importances-<regressor>.svg` per forest regressor
/// into `out_dir` (created if needed). Every file is written atomically;
/// a failed run leaves no partial artifacts behind.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ResultsFile> {
    config.validate_shallow()?;
    let ds = config.load_dataset()?;
    let (ensembles, regressors) = config.lower(ds.d())?;

    let (train, test) = train_test_split(&ds, config.test_fraction, config.seed)?;
    if config.cv_folds > train.n() {
        return Err(Error::Config(format!(
            "cv_folds = {} exceeds the {} training rows",
            config.cv_folds,
            train.n()
        )));
    }

    let mut results = Vec::with_capacity(ensembles.len() * regressors.len());
    // Last forest importances per regressor label; drives the charts.
    let mut charts: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();

    for (ei, ensemble) in ensembles.iter().enumerate() {
        // The global (leaky) protocol selects once on the whole training
        // split and cross-validates only the regressor on reduced columns.
        let reduced = if config.global_selection {
            let seed = cell_seed(config.seed, ei, usize::MAX);
            let selection = fit_selection(&train, ensemble, config.target_scaling, seed)?;
            Some((selection.reduce(&train)?, selection.reduce(&test)?))
        } else {
            None
        };

        for (ri, regressor) in regressors.iter().enumerate() {
            let seed = cell_seed(config.seed, ei, ri);
            let regressor = with_forest_seed(regressor, seed);
            let (cv_train, fit_train, fit_test, selector_spec) = match &reduced {
                Some((reduced_train, reduced_test)) => (
                    reduced_train,
                    reduced_train,
                    reduced_test,
                    identity_spec(&ensemble.label, reduced_train.d()),
                ),
                None => (&train, &train, &test, ensemble.clone()),
            };
            let cfg = PipelineConfig {
                selector: selector_spec,
                regressor,
                target_scaling: config.target_scaling,
                seed,
            };

            let cv = cross_validate(cv_train, &cfg, config.cv_folds, config.seed)?;
            let pipeline = fit_pipeline(fit_train, &cfg)?;
            let report = pipeline.evaluate(fit_test)?;

            let importances = pipeline.regressor().importances().map(|values| {
                pipeline
                    .selected_names()
                    .iter()
                    .cloned()
                    .zip(values.iter().copied())
                    .collect::<BTreeMap<String, f64>>()
            });
            if let Some(map) = &importances {
                charts.insert(
                    cfg.regressor.label().to_string(),
                    map.iter().map(|(k, v)| (k.clone(), *v)).collect(),
                );
            }

            results.push(ExperimentResult::new(
                ensemble.label.clone(),
                cfg.regressor.label(),
                &cv,
                report,
                pipeline.selected_names().to_vec(),
                importances,
            )?);
        }
    }

    std::fs::create_dir_all(out_dir)?;
    let metadata = RunMetadata {
        seed: config.seed,
        config_digest: config.digest(),
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    };
    write_results_json(&results, &metadata, &out_dir.join("results.json"))?;
    let table = render_table(&results, TableFormat::Markdown)?;
    write_atomic(&out_dir.join("table.md"), table.as_bytes())?;
    for (label, importances) in &charts {
        let name = format!("importances-{}.svg", label.to_lowercase());
        write_importance_chart(importances, &out_dir.join(name))?;
    }

    Ok(ResultsFile { metadata, results })
}

fn identity_spec(label: &str, d: usize) -> EnsembleSpec {
    EnsembleSpec {
        label: label.to_string(),
        techniques: vec![],
        strategy: EnsembleStrategy::Chain,
        vote_k: d,
    }
}

fn with_forest_seed(spec: &RegressorSpec, seed: u64) -> RegressorSpec {
    match spec {
        RegressorSpec::Forest(params) => {
            let mut params = *params;
            params.seed = seed;
            RegressorSpec::Forest(params)
        }
        other => other.clone(),
    }
}

fn cell_seed(seed: u64, ensemble_idx: usize, regressor_idx: usize) -> u64 {
    rng::substream(
        seed,
        (ensemble_idx as u64).wrapping_mul(0x1_0001).wrapping_add(regressor_idx as u64),
    )
    .gen()
}

/// What the `score` subcommand computes.
#[derive(Debug, Clone)]
pub enum ScoreRequest {
    FRegression,
    MutualInfo { bins: Option<usize> },
    ChiSquared { bins: Option<usize> },
    /// Elimination rank per feature: 0 for the first feature dropped,
    /// counting up; survivors share the top rank.
    Rfe { n_select: usize },
    /// Variance explained (percent) per principal component.
    Pca,
}

impl ScoreRequest {
    pub fn parse(method: &str, bins: Option<usize>, k: Option<usize>) -> Result<ScoreRequest> {
        match method {
            "f-regression" => Ok(ScoreRequest::FRegression),
            "mutual-info" => Ok(ScoreRequest::MutualInfo { bins }),
            "chi2" => Ok(ScoreRequest::ChiSquared { bins }),
            "rfe" => Ok(ScoreRequest::Rfe {
                n_select: k.unwrap_or(1),
            }),
            "pca" => Ok(ScoreRequest::Pca),
            other => Err(Error::Param(format!(
                "unknown method '{other}' (expected f-regression, mutual-info, chi2, rfe or pca)"
            ))),
        }
    }
}

/// Scores every feature of `ds` and returns (name, score) pairs sorted by
/// descending score (ties by feature order).
pub fn score_features(
    ds: &Dataset,
    request: &ScoreRequest,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    use crate::selection::{
        chi_squared_scores, f_regression_scores, mutual_info_scores, pca_fit, rfe_fit,
        BinningStrategy, MutualInfoConfig,
    };

    let named = |scores: Vec<f64>| -> Vec<(String, f64)> {
        let mut pairs: Vec<(String, f64)> = ds
            .feature_names()
            .iter()
            .cloned()
            .zip(scores)
            .collect();
        pairs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        pairs
    };

    match request {
        ScoreRequest::FRegression => Ok(named(f_regression_scores(ds)?.scores)),
        ScoreRequest::MutualInfo { bins } => {
            let cfg = match bins {
                Some(b) => MutualInfoConfig {
                    bins: *b,
                    strategy: BinningStrategy::EqualFrequency,
                },
                None => MutualInfoConfig::for_samples(ds.n()),
            };
            Ok(named(mutual_info_scores(ds, &cfg)?.scores))
        }
        ScoreRequest::ChiSquared { bins } => {
            let bins = bins.unwrap_or(5);
            Ok(named(chi_squared_scores(ds, bins, bins)?.scores))
        }
        ScoreRequest::Rfe { n_select } => {
            // Standardize so the linear scorer treats columns comparably.
            let (standardized, _) = crate::data::standardize(ds)?;
            let model = rfe_fit(&standardized, *n_select, 3, seed, |x, y, folds| {
                crate::eval::linear_cv_rmse(x, y, folds)
            })?;
            let SelectorModel::Rfe {
                kept, eliminated, ..
            } = &model
            else {
                unreachable!("rfe_fit returns an Rfe model");
            };
            let mut scores = vec![0.0; ds.d()];
            for (round, &feature) in eliminated.iter().enumerate() {
                scores[feature] = round as f64;
            }
            for &feature in kept {
                scores[feature] = eliminated.len() as f64;
            }
            Ok(named(scores))
        }
        ScoreRequest::Pca => {
            let model = pca_fit(ds, ds.d())?;
            let SelectorModel::Pca(p) = &model else {
                unreachable!("pca_fit returns a Pca model");
            };
            Ok(p.variance_explained()
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("pc{}", i + 1), *v))
                .collect())
        }
    }
}
