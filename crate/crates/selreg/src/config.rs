//! Declarative experiment configuration: a single JSON document describing
//! the dataset, the selector ensembles, the regressors, and the protocol
//! knobs. Validation resolves every default and range-checks every parameter
//! against the dataset's dimensions before any fitting starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{generate_synthetic, load_csv, Dataset, SyntheticSpec};
use crate::error::{Error, Result};
use crate::eval::{EnsembleSpec, RegressorSpec, RfeEstimator, SelectorTechnique};
use crate::regress::ForestParams;
use crate::selection::EnsembleStrategy;

fn default_true() -> bool {
    true
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_cv_folds() -> usize {
    5
}
fn default_seed() -> u64 {
    42
}

/// Top-level experiment description (see the bundled `configs/` examples).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    /// Min-max scale the target to [0, 1] from the training range.
    #[serde(default = "default_true")]
    pub target_scaling: bool,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_cv_folds")]
    pub cv_folds: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub selector_ensembles: Vec<EnsembleConfig>,
    pub regressors: Vec<RegressorConfig>,
    /// Fit each selector once on the full training split instead of per
    /// fold. Leaks selection statistics across folds; off by default.
    #[serde(default)]
    pub global_selection: bool,
}

/// Either a CSV file or a synthetic recipe; exactly one must be given.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n: usize,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub noise_sd: f64,
    /// Defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub label: String,
    #[serde(default)]
    pub strategy: StrategyConfig,
    /// Kept-feature budget for majority-vote truncation; default ceil(d/2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Empty list means no selection (identity).
    #[serde(default)]
    pub techniques: Vec<TechniqueConfig>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyConfig {
    #[default]
    Chain,
    MajorityVote,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TechniqueConfig {
    /// SelectKBest with the F statistic; `k` defaults to ceil(width/2).
    KbestF {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    /// SelectKBest with mutual information.
    KbestMi {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bins: Option<usize>,
    },
    /// SelectKBest with chi-squared scores (5 bins by default).
    Chi2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target_bins: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        feature_bins: Option<usize>,
    },
    /// Projection onto the top-k principal components; `k` is required.
    Pca { k: usize },
    /// Recursive feature elimination; estimator defaults to `linear`.
    Rfe {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_select: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        estimator: Option<RfeEstimatorConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner_folds: Option<usize>,
    },
    /// SelectKBest over |Lasso coefficients| (lambda defaults to 0.1).
    LassoImportance {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    /// SelectKBest over forest impurity importances.
    ForestImportance {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_trees: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RfeEstimatorConfig {
    Linear,
    Forest {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_trees: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegressorConfig {
    Linear,
    Ridge {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    Lasso {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_iter: Option<usize>,
    },
    Forest {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_trees: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_depth: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_samples_leaf: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        features_per_split: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bootstrap: Option<bool>,
    },
}

impl ExperimentConfig {
    /// Parses a config file; parse errors carry `path:line:column`.
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
            Error::Config(format!(
                "{}:{}:{}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        config.validate_shallow()?;
        Ok(config)
    }

    /// Structure checks that need no dataset: non-empty grids, one dataset
    /// source, fractions in range.
    pub fn validate_shallow(&self) -> Result<()> {
        match (&self.dataset.csv, &self.dataset.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "dataset: give either csv or synthetic, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "dataset: one of csv or synthetic is required".into(),
                ))
            }
            (Some(_), None) if self.dataset.target.is_none() => {
                return Err(Error::Config("dataset: csv requires a target column".into()))
            }
            _ => {}
        }
        if self.selector_ensembles.is_empty() {
            return Err(Error::Config("need at least one selector ensemble".into()));
        }
        if self.regressors.is_empty() {
            return Err(Error::Config("need at least one regressor".into()));
        }
        for ensemble in &self.selector_ensembles {
            if ensemble.label.trim().is_empty() {
                return Err(Error::Config("ensemble labels must be non-empty".into()));
            }
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config(format!(
                "cv_folds must be >= 2, got {}",
                self.cv_folds
            )));
        }
        Ok(())
    }

    /// Loads the configured dataset (CSV or synthetic).
    pub fn load_dataset(&self) -> Result<Dataset> {
        if let Some(path) = &self.dataset.csv {
            let target = self.dataset.target.as_deref().ok_or_else(|| {
                Error::Config("dataset: csv requires a target column".into())
            })?;
            if !path.exists() {
                return Err(Error::Config(format!(
                    "dataset file not found: {}",
                    path.display()
                )));
            }
            return load_csv(path, target);
        }
        let synth = self.dataset.synthetic.as_ref().expect("validated");
        let (ds, _) = generate_synthetic(&SyntheticSpec {
            n: synth.n,
            true_coefficients: synth.coefficients.clone(),
            noise_sd: synth.noise_sd,
            seed: synth.seed.unwrap_or(self.seed),
        })?;
        Ok(ds)
    }

    /// Resolves defaults and range-checks every parameter against a dataset
    /// of width `d`, simulating chain widths stage by stage.
    pub fn lower(&self, d: usize) -> Result<(Vec<EnsembleSpec>, Vec<RegressorSpec>)> {
        let mut ensembles = Vec::with_capacity(self.selector_ensembles.len());
        for cfg in &self.selector_ensembles {
            ensembles.push(lower_ensemble(cfg, d)?);
        }
        let mut regressors = Vec::with_capacity(self.regressors.len());
        for cfg in &self.regressors {
            regressors.push(lower_regressor(cfg)?);
        }
        Ok((ensembles, regressors))
    }

    /// Hex SHA-256 of the canonical JSON serialization; whitespace and key
    /// formatting in the source file do not affect it.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn half_up(width: usize) -> usize {
    width.div_ceil(2)
}

fn lower_ensemble(cfg: &EnsembleConfig, d: usize) -> Result<EnsembleSpec> {
    let strategy = match cfg.strategy {
        StrategyConfig::Chain => EnsembleStrategy::Chain,
        StrategyConfig::MajorityVote => EnsembleStrategy::MajorityVote,
    };
    let label = &cfg.label;
    let mut techniques = Vec::with_capacity(cfg.techniques.len());
    // Chains narrow the width stage by stage; vote members all see d.
    let mut width = d;
    for technique in &cfg.techniques {
        let (lowered, out_width) = lower_technique(technique, width, label)?;
        if matches!(lowered, SelectorTechnique::Pca { .. })
            && strategy == EnsembleStrategy::MajorityVote
        {
            return Err(Error::Config(format!(
                "ensemble '{label}': pca cannot join a majority vote"
            )));
        }
        techniques.push(lowered);
        if strategy == EnsembleStrategy::Chain {
            width = out_width;
        }
    }
    let vote_k = cfg.k.unwrap_or_else(|| half_up(d));
    if vote_k < 1 || vote_k > d {
        return Err(Error::Config(format!(
            "ensemble '{label}': k must lie in [1, {d}], got {vote_k}"
        )));
    }
    Ok(EnsembleSpec {
        label: cfg.label.clone(),
        techniques,
        strategy,
        vote_k,
    })
}

/// Returns the lowered technique and its output width.
fn lower_technique(
    cfg: &TechniqueConfig,
    width: usize,
    label: &str,
) -> Result<(SelectorTechnique, usize)> {
    let check_k = |k: usize, what: &str| -> Result<usize> {
        if k < 1 || k > width {
            Err(Error::Config(format!(
                "ensemble '{label}': {what} must lie in [1, {width}], got {k}"
            )))
        } else {
            Ok(k)
        }
    };
    match cfg {
        TechniqueConfig::KbestF { k } => {
            let k = check_k(k.unwrap_or_else(|| half_up(width)), "kbest-f k")?;
            Ok((SelectorTechnique::FRegressionKBest { k }, k))
        }
        TechniqueConfig::KbestMi { k, bins } => {
            let k = check_k(k.unwrap_or_else(|| half_up(width)), "kbest-mi k")?;
            if let Some(b) = bins {
                if *b < 2 {
                    return Err(Error::Config(format!(
                        "ensemble '{label}': kbest-mi bins must be >= 2, got {b}"
                    )));
                }
            }
            Ok((SelectorTechnique::MutualInfoKBest { k, bins: *bins }, k))
        }
        TechniqueConfig::Chi2 {
            k,
            target_bins,
            feature_bins,
        } => {
            let k = check_k(k.unwrap_or_else(|| half_up(width)), "chi2 k")?;
            let target_bins = target_bins.unwrap_or(5);
            let feature_bins = feature_bins.unwrap_or(5);
            if target_bins < 2 || feature_bins < 2 {
                return Err(Error::Config(format!(
                    "ensemble '{label}': chi2 bin counts must be >= 2"
                )));
            }
            Ok((
                SelectorTechnique::ChiSquaredKBest {
                    k,
                    target_bins,
                    feature_bins,
                },
                k,
            ))
        }
        TechniqueConfig::Pca { k } => {
            let k = check_k(*k, "pca k")?;
            Ok((SelectorTechnique::Pca { k }, k))
        }
        TechniqueConfig::Rfe {
            n_select,
            estimator,
            inner_folds,
        } => {
            if width < 2 {
                return Err(Error::Config(format!(
                    "ensemble '{label}': rfe needs at least 2 features, chain width is {width}"
                )));
            }
            let n_select = n_select.unwrap_or_else(|| half_up(width));
            if n_select < 1 || n_select >= width {
                return Err(Error::Config(format!(
                    "ensemble '{label}': rfe n_select must lie in [1, {}], got {n_select}",
                    width - 1
                )));
            }
            let inner_folds = inner_folds.unwrap_or(3);
            if inner_folds < 2 {
                return Err(Error::Config(format!(
                    "ensemble '{label}': rfe inner_folds must be >= 2, got {inner_folds}"
                )));
            }
            let estimator = match estimator {
                None | Some(RfeEstimatorConfig::Linear) => RfeEstimator::Linear,
                Some(RfeEstimatorConfig::Forest { n_trees }) => RfeEstimator::Forest {
                    n_trees: n_trees.unwrap_or(20),
                },
            };
            Ok((
                SelectorTechnique::Rfe {
                    n_select,
                    estimator,
                    inner_folds,
                },
                n_select,
            ))
        }
        TechniqueConfig::LassoImportance { k, lambda } => {
            let k = check_k(k.unwrap_or_else(|| half_up(width)), "lasso-importance k")?;
            let lambda = lambda.unwrap_or(0.1);
            if lambda <= 0.0 {
                return Err(Error::Config(format!(
                    "ensemble '{label}': lasso-importance lambda must be > 0, got {lambda}"
                )));
            }
            Ok((SelectorTechnique::LassoImportance { k, lambda }, k))
        }
        TechniqueConfig::ForestImportance { k, n_trees } => {
            let k = check_k(k.unwrap_or_else(|| half_up(width)), "forest-importance k")?;
            let n_trees = n_trees.unwrap_or(100);
            if n_trees < 1 {
                return Err(Error::Config(format!(
                    "ensemble '{label}': forest-importance n_trees must be >= 1"
                )));
            }
            Ok((SelectorTechnique::ForestImportance { k, n_trees }, k))
        }
    }
}

fn lower_regressor(cfg: &RegressorConfig) -> Result<RegressorSpec> {
    match cfg {
        RegressorConfig::Linear => Ok(RegressorSpec::Linear),
        RegressorConfig::Ridge { lambda } => {
            let lambda = lambda.unwrap_or(1.0);
            if lambda < 0.0 {
                return Err(Error::Config(format!(
                    "ridge lambda must be >= 0, got {lambda}"
                )));
            }
            Ok(RegressorSpec::Ridge { lambda })
        }
        RegressorConfig::Lasso {
            lambda,
            tol,
            max_iter,
        } => {
            let lambda = lambda.unwrap_or(0.1);
            let tol = tol.unwrap_or(1e-8);
            let max_iter = max_iter.unwrap_or(10_000);
            if lambda <= 0.0 || tol <= 0.0 || max_iter == 0 {
                return Err(Error::Config(
                    "lasso needs lambda > 0, tol > 0 and max_iter >= 1".into(),
                ));
            }
            Ok(RegressorSpec::Lasso {
                lambda,
                tol,
                max_iter,
            })
        }
        RegressorConfig::Forest {
            n_trees,
            max_depth,
            min_samples_leaf,
            features_per_split,
            bootstrap,
        } => {
            let params = ForestParams {
                n_trees: n_trees.unwrap_or(100),
                max_depth: *max_depth,
                min_samples_leaf: min_samples_leaf.unwrap_or(1),
                features_per_split: *features_per_split,
                bootstrap: bootstrap.unwrap_or(true),
                seed: 0, // set per cell by the driver
            };
            if params.n_trees < 1 || params.min_samples_leaf < 1 {
                return Err(Error::Config(
                    "forest needs n_trees >= 1 and min_samples_leaf >= 1".into(),
                ));
            }
            Ok(RegressorSpec::Forest(params))
        }
    }
}
