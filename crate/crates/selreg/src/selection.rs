//! Feature selection: univariate scoring (F statistic, mutual information,
//! chi-squared), SelectKBest, PCA, recursive feature elimination, and
//! ensemble combination of fitted selectors.

use crate::data::{Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::linalg::{covariance, eig_symmetric, Matrix};

/// Which scoring function produced a set of feature scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMethod {
    FRegression,
    MutualInfo,
    ChiSquared,
}

/// Per-feature relevance scores; higher means more relevant.
#[derive(Debug, Clone)]
pub struct FeatureScores {
    pub scores: Vec<f64>,
    pub method: ScoreMethod,
}

/// Univariate F statistic of each feature against the target:
/// `F = r^2 / (1 - r^2) * (n - 2)` with `r` the Pearson correlation.
///
/// Constant features score 0. A perfectly correlated feature gets a large
/// finite score (the denominator is floored at machine epsilon).
pub fn f_regression_scores(ds: &Dataset) -> Result<FeatureScores> {
    let n = ds.n();
    if n < 3 {
        return Err(Error::InsufficientRows { got: n, required: 3 });
    }
    let y = ds.target();
    let my = mean(y);
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if syy == 0.0 {
        return Err(Error::DegenerateTarget(
            "cannot score features against a constant target".into(),
        ));
    }
    let x = ds.features();
    let means = x.column_means();
    let mut scores = Vec::with_capacity(ds.d());
    for c in 0..ds.d() {
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        for r in 0..n {
            let dx = x.get(r, c) - means[c];
            sxy += dx * (y[r] - my);
            sxx += dx * dx;
        }
        if sxx == 0.0 {
            scores.push(0.0);
            continue;
        }
        let r2 = ((sxy * sxy) / (sxx * syy)).min(1.0);
        scores.push(r2 / (1.0 - r2).max(f64::EPSILON) * (n - 2) as f64);
    }
    Ok(FeatureScores {
        scores,
        method: ScoreMethod::FRegression,
    })
}

/// How continuous values are discretized for the information-theoretic scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinningStrategy {
    #[default]
    EqualFrequency,
}

/// Binning configuration for [`mutual_info_scores`].
#[derive(Debug, Clone, Copy)]
pub struct MutualInfoConfig {
    pub bins: usize,
    pub strategy: BinningStrategy,
}

impl MutualInfoConfig {
    /// Default binning for `n` samples: `min(10, floor(sqrt(n)))`, at least 2.
    pub fn for_samples(n: usize) -> Self {
        MutualInfoConfig {
            bins: ((n as f64).sqrt().floor() as usize).clamp(2, 10),
            strategy: BinningStrategy::EqualFrequency,
        }
    }
}

/// Mutual information of each feature with the target, estimated from the
/// joint histogram after equal-frequency binning: `I = H(X) + H(Y) - H(X,Y)`
/// in nats, clamped at zero.
pub fn mutual_info_scores(ds: &Dataset, cfg: &MutualInfoConfig) -> Result<FeatureScores> {
    if cfg.bins < 2 {
        return Err(Error::Param(format!("bins must be >= 2, got {}", cfg.bins)));
    }
    let n = ds.n();
    if n < 2 * cfg.bins {
        return Err(Error::InsufficientSamples {
            got: n,
            required: 2 * cfg.bins,
        });
    }
    let BinningStrategy::EqualFrequency = cfg.strategy;
    let (target_bins, target_count) = equal_frequency_bins(ds.target(), cfg.bins);
    let mut scores = Vec::with_capacity(ds.d());
    for c in 0..ds.d() {
        let (feature_bins, feature_count) = equal_frequency_bins(&ds.features().column(c), cfg.bins);
        scores.push(binned_mutual_info(
            &feature_bins,
            feature_count,
            &target_bins,
            target_count,
        ));
    }
    Ok(FeatureScores {
        scores,
        method: ScoreMethod::MutualInfo,
    })
}

/// MI in nats between two discrete assignments, clamped at zero.
fn binned_mutual_info(a: &[usize], a_count: usize, b: &[usize], b_count: usize) -> f64 {
    let n = a.len() as f64;
    let mut joint = vec![0.0; a_count * b_count];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * b_count + j] += 1.0;
    }
    let mut a_marginal = vec![0.0; a_count];
    let mut b_marginal = vec![0.0; b_count];
    for i in 0..a_count {
        for j in 0..b_count {
            a_marginal[i] += joint[i * b_count + j];
            b_marginal[j] += joint[i * b_count + j];
        }
    }
    let h = |counts: &[f64]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0.0)
            .map(|&c| {
                let p = c / n;
                -p * p.ln()
            })
            .sum()
    };
    (h(&a_marginal) + h(&b_marginal) - h(&joint)).max(0.0)
}

/// The chi-squared statistic `sum (O - E)^2 / E` over paired observed and
/// expected counts; cells with zero expectation contribute nothing.
pub fn chi_squared_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o - e) * (o - e) / e)
        .sum()
}

/// Chi-squared independence score of each feature against the target.
///
/// Features are discretized by equal frequency into `feature_bins` (empty
/// bins merged). The target's distinct values serve as classes directly when
/// they are all integral; otherwise the target is binned into `target_bins`.
pub fn chi_squared_scores(
    ds: &Dataset,
    target_bins: usize,
    feature_bins: usize,
) -> Result<FeatureScores> {
    if target_bins < 2 || feature_bins < 2 {
        return Err(Error::Param("bin counts must be >= 2".into()));
    }
    let n = ds.n();
    let (target_ids, class_count) = target_classes(ds.target(), target_bins)?;
    let mut scores = Vec::with_capacity(ds.d());
    for c in 0..ds.d() {
        let (ids, bin_count) = equal_frequency_bins(&ds.features().column(c), feature_bins);
        let mut observed = vec![0.0; bin_count * class_count];
        for (&b, &t) in ids.iter().zip(&target_ids) {
            observed[b * class_count + t] += 1.0;
        }
        let mut row_totals = vec![0.0; bin_count];
        let mut col_totals = vec![0.0; class_count];
        for b in 0..bin_count {
            for t in 0..class_count {
                row_totals[b] += observed[b * class_count + t];
                col_totals[t] += observed[b * class_count + t];
            }
        }
        let expected: Vec<f64> = (0..bin_count * class_count)
            .map(|i| row_totals[i / class_count] * col_totals[i % class_count] / n as f64)
            .collect();
        scores.push(chi_squared_statistic(&observed, &expected));
    }
    Ok(FeatureScores {
        scores,
        method: ScoreMethod::ChiSquared,
    })
}

fn target_classes(target: &[f64], target_bins: usize) -> Result<(Vec<usize>, usize)> {
    let mut distinct: Vec<f64> = target.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::DegenerateTarget(
            "chi-squared needs at least 2 distinct target values".into(),
        ));
    }
    if target.iter().all(|v| v.fract() == 0.0) {
        let ids = target
            .iter()
            .map(|v| distinct.binary_search_by(|d| d.partial_cmp(v).unwrap()).unwrap())
            .collect();
        Ok((ids, distinct.len()))
    } else {
        Ok(equal_frequency_bins(target, target_bins))
    }
}

/// Equal-frequency bin ids for `values`: cut points sit at the empirical
/// quantiles, ties share a bin (assignment is by value, so the result is
/// invariant under row permutation), and empty bins are merged away. Returns
/// the ids and the number of occupied bins.
fn equal_frequency_bins(values: &[f64], bins: usize) -> (Vec<usize>, usize) {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut edges: Vec<f64> = (1..bins).map(|i| sorted[i * n / bins]).collect();
    edges.dedup();
    let raw: Vec<usize> = values
        .iter()
        .map(|v| edges.iter().take_while(|e| **e <= *v).count())
        .collect();
    let mut occupied = raw.clone();
    occupied.sort_unstable();
    occupied.dedup();
    let ids = raw
        .into_iter()
        .map(|r| occupied.binary_search(&r).unwrap())
        .collect();
    (ids, occupied.len())
}

/// A fitted PCA transform: centering means and the top-k eigenvector columns
/// of the feature covariance.
#[derive(Debug, Clone)]
pub struct PcaModel {
    /// d x k matrix; column j is the j-th principal direction.
    components: Matrix,
    means: Vec<f64>,
    /// Percentage of total variance carried by each kept component.
    variance_explained: Vec<f64>,
}

impl PcaModel {
    pub fn components(&self) -> &Matrix {
        &self.components
    }

    pub fn variance_explained(&self) -> &[f64] {
        &self.variance_explained
    }

    /// Maps projected coordinates back to the original feature space.
    pub fn inverse_transform(&self, projected: &Matrix) -> Result<Matrix> {
        if projected.cols() != self.components.cols() {
            return Err(Error::Shape(format!(
                "expected {} projected columns, got {}",
                self.components.cols(),
                projected.cols()
            )));
        }
        let mut back = projected.matmul(&self.components.transpose());
        for r in 0..back.rows() {
            for c in 0..back.cols() {
                let v = back.get(r, c) + self.means[c];
                back.set(r, c, v);
            }
        }
        Ok(back)
    }
}

/// How an ensemble of selectors is combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleStrategy {
    /// Apply members one after another; each must have been fitted on the
    /// previous member's output.
    Chain,
    /// Keep features chosen by at least half the members, truncated to the
    /// best k by mean position across the members' kept lists.
    MajorityVote,
}

/// A fitted feature-selection transform.
#[derive(Debug, Clone)]
pub enum SelectorModel {
    KBest { kept: Vec<usize>, input_dim: usize },
    Rfe {
        kept: Vec<usize>,
        input_dim: usize,
        /// Features in the order they were eliminated.
        eliminated: Vec<usize>,
    },
    Pca(PcaModel),
    Ensemble(EnsembleModel),
}

/// Combination of fitted selectors; see [`EnsembleStrategy`].
#[derive(Debug, Clone)]
pub struct EnsembleModel {
    strategy: EnsembleStrategy,
    members: Vec<SelectorModel>,
    /// For MajorityVote, and for chains of purely index-based members: the
    /// kept indices in the original feature space.
    kept: Option<Vec<usize>>,
}

impl EnsembleModel {
    pub fn strategy(&self) -> EnsembleStrategy {
        self.strategy
    }

    pub fn members(&self) -> &[SelectorModel] {
        &self.members
    }
}

impl SelectorModel {
    /// Number of input columns the model was fitted on.
    pub fn input_dim(&self) -> usize {
        match self {
            SelectorModel::KBest { input_dim, .. } | SelectorModel::Rfe { input_dim, .. } => {
                *input_dim
            }
            SelectorModel::Pca(p) => p.means.len(),
            SelectorModel::Ensemble(e) => match e.strategy {
                EnsembleStrategy::Chain => e.members[0].input_dim(),
                EnsembleStrategy::MajorityVote => e.members[0].input_dim(),
            },
        }
    }

    /// Number of columns produced by [`SelectorModel::transform`].
    pub fn output_dim(&self) -> usize {
        match self {
            SelectorModel::KBest { kept, .. } | SelectorModel::Rfe { kept, .. } => kept.len(),
            SelectorModel::Pca(p) => p.components.cols(),
            SelectorModel::Ensemble(e) => match e.strategy {
                EnsembleStrategy::Chain => e.members.last().unwrap().output_dim(),
                EnsembleStrategy::MajorityVote => e.kept.as_ref().unwrap().len(),
            },
        }
    }

    /// Kept original-feature indices, when the transform is a column subset.
    /// PCA (and chains ending in PCA) project instead of subsetting: `None`.
    pub fn kept_indices(&self) -> Option<&[usize]> {
        match self {
            SelectorModel::KBest { kept, .. } | SelectorModel::Rfe { kept, .. } => Some(kept),
            SelectorModel::Pca(_) => None,
            SelectorModel::Ensemble(e) => e.kept.as_deref(),
        }
    }

    /// Names of the produced columns, given the input column names.
    pub fn output_names(&self, input_names: &[String]) -> Vec<String> {
        match self {
            SelectorModel::KBest { kept, .. } | SelectorModel::Rfe { kept, .. } => {
                kept.iter().map(|&i| input_names[i].clone()).collect()
            }
            SelectorModel::Pca(p) => (1..=p.components.cols()).map(|i| format!("pc{i}")).collect(),
            SelectorModel::Ensemble(e) => match e.strategy {
                EnsembleStrategy::MajorityVote => e
                    .kept
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|&i| input_names[i].clone())
                    .collect(),
                EnsembleStrategy::Chain => {
                    let mut names = input_names.to_vec();
                    for member in &e.members {
                        names = member.output_names(&names);
                    }
                    names
                }
            },
        }
    }

    /// Applies the fitted transform: column subsetting for index-based kinds,
    /// centered projection for PCA, sequential composition for chains.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "selector fitted on {} columns, got {}",
                self.input_dim(),
                x.cols()
            )));
        }
        match self {
            SelectorModel::KBest { kept, .. } | SelectorModel::Rfe { kept, .. } => {
                Ok(x.select_columns(kept))
            }
            SelectorModel::Pca(p) => {
                let mut centered = x.clone();
                for r in 0..x.rows() {
                    for c in 0..x.cols() {
                        centered.set(r, c, x.get(r, c) - p.means[c]);
                    }
                }
                Ok(centered.matmul(&p.components))
            }
            SelectorModel::Ensemble(e) => match e.strategy {
                EnsembleStrategy::MajorityVote => Ok(x.select_columns(e.kept.as_ref().unwrap())),
                EnsembleStrategy::Chain => {
                    let mut current = x.clone();
                    for member in &e.members {
                        current = member.transform(&current)?;
                    }
                    Ok(current)
                }
            },
        }
    }
}

/// Keeps the `k` highest-scoring features; ties go to the lower index.
pub fn select_k_best(scores: &FeatureScores, k: usize) -> Result<SelectorModel> {
    let d = scores.scores.len();
    if k < 1 || k > d {
        return Err(Error::Param(format!("k must lie in [1, {d}], got {k}")));
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        scores.scores[j]
            .partial_cmp(&scores.scores[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut kept: Vec<usize> = order.into_iter().take(k).collect();
    kept.sort_unstable();
    Ok(SelectorModel::KBest { kept, input_dim: d })
}

/// Fits a PCA projection onto the top `k` principal directions of the
/// feature covariance, recording the percentage of variance each explains.
pub fn pca_fit(ds: &Dataset, k: usize) -> Result<SelectorModel> {
    let d = ds.d();
    if k < 1 || k > d {
        return Err(Error::Param(format!("k must lie in [1, {d}], got {k}")));
    }
    let cov = covariance(ds.features())?;
    let eig = eig_symmetric(&cov)?;
    // Tiny negative eigenvalues are rounding noise on rank-deficient inputs.
    let clamped: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let variance_explained = clamped
        .iter()
        .take(k)
        .map(|l| if total > 0.0 { l / total * 100.0 } else { 0.0 })
        .collect();
    let mut components = Matrix::zeros(d, k);
    for c in 0..k {
        for r in 0..d {
            components.set(r, c, eig.eigenvectors.get(r, c));
        }
    }
    Ok(SelectorModel::Pca(PcaModel {
        components,
        means: ds.features().column_means(),
        variance_explained,
    }))
}

/// Recursive feature elimination.
///
/// Each round scores every candidate subset `X \ {i}` with `scorer` (lower is
/// better, e.g. inner-CV RMSE) and eliminates the feature whose removal hurts
/// least; ties eliminate the higher index. Repeats until `n_select` features
/// remain. The fold plan handed to `scorer` is built once from `seed`.
pub fn rfe_fit<F>(
    ds: &Dataset,
    n_select: usize,
    inner_folds: usize,
    seed: u64,
    scorer: F,
) -> Result<SelectorModel>
where
    F: Fn(&Matrix, &[f64], &FoldPlan) -> Result<f64>,
{
    let d = ds.d();
    if n_select < 1 || n_select >= d {
        return Err(Error::Param(format!(
            "n_select must lie in [1, {}], got {n_select}",
            d - 1
        )));
    }
    if inner_folds < 2 {
        return Err(Error::Param(format!(
            "inner_folds must be >= 2, got {inner_folds}"
        )));
    }
    let folds = crate::data::kfold(ds.n(), inner_folds, seed)?;
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut eliminated = Vec::with_capacity(d - n_select);
    while remaining.len() > n_select {
        let mut eliminate: Option<(usize, f64)> = None;
        for (pos, &candidate) in remaining.iter().enumerate() {
            let subset: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| i != candidate)
                .collect();
            let score = scorer(&ds.features().select_columns(&subset), ds.target(), &folds)?;
            let better = match eliminate {
                None => true,
                // Strict improvement, or an equal score at a higher index.
                Some((_, best)) => score < best || (score == best && pos > 0),
            };
            if better {
                eliminate = Some((candidate, score));
            }
        }
        let (victim, _) = eliminate.expect("at least two candidates per round");
        remaining.retain(|&i| i != victim);
        eliminated.push(victim);
    }
    Ok(SelectorModel::Rfe {
        kept: remaining,
        input_dim: d,
        eliminated,
    })
}

/// Combines fitted selectors into one model.
///
/// `Chain` composes transforms in order; members must telescope (each fitted
/// on the previous member's output width) with index-based members first and
/// at most one trailing PCA. `MajorityVote` keeps original features chosen by
/// at least `ceil(m/2)` of the m members, truncated to the `k` best by mean
/// position across the members' kept lists (absent features count as rank d).
pub fn ensemble_combine(
    members: Vec<SelectorModel>,
    strategy: EnsembleStrategy,
    k: usize,
) -> Result<SelectorModel> {
    if members.is_empty() {
        return Err(Error::Param("ensemble needs at least one member".into()));
    }
    match strategy {
        EnsembleStrategy::Chain => {
            for (i, member) in members.iter().enumerate() {
                if matches!(member, SelectorModel::Ensemble(_)) {
                    return Err(Error::Strategy("nested ensembles are not supported".into()));
                }
                if matches!(member, SelectorModel::Pca(_)) && i + 1 != members.len() {
                    return Err(Error::Strategy(
                        "PCA may only appear as the final chain member".into(),
                    ));
                }
                if i > 0 && member.input_dim() != members[i - 1].output_dim() {
                    return Err(Error::Strategy(format!(
                        "chain member {i} expects {} columns but receives {}",
                        member.input_dim(),
                        members[i - 1].output_dim()
                    )));
                }
            }
            // Original-space kept indices exist only for an all-index chain.
            let mut kept: Option<Vec<usize>> = Some((0..members[0].input_dim()).collect());
            for member in &members {
                kept = match (kept, member.kept_indices()) {
                    (Some(current), Some(local)) => {
                        Some(local.iter().map(|&j| current[j]).collect())
                    }
                    _ => None,
                };
            }
            Ok(SelectorModel::Ensemble(EnsembleModel {
                strategy,
                members,
                kept,
            }))
        }
        EnsembleStrategy::MajorityVote => {
            let d = members[0].input_dim();
            let mut vote_lists = Vec::with_capacity(members.len());
            for member in &members {
                if member.input_dim() != d {
                    return Err(Error::Strategy(
                        "majority vote members must share the input dimension".into(),
                    ));
                }
                match member.kept_indices() {
                    Some(kept) => vote_lists.push(kept.to_vec()),
                    None => {
                        return Err(Error::Strategy(
                            "PCA has no per-feature vote; use a chain instead".into(),
                        ))
                    }
                }
            }
            if k < 1 || k > d {
                return Err(Error::Param(format!("k must lie in [1, {d}], got {k}")));
            }
            let m = vote_lists.len();
            let threshold = m.div_ceil(2);
            let mut votes = vec![0usize; d];
            let mut rank_sum = vec![0.0; d];
            for kept in &vote_lists {
                for (feature, sum) in rank_sum.iter_mut().enumerate() {
                    match kept.iter().position(|&i| i == feature) {
                        Some(pos) => {
                            votes[feature] += 1;
                            *sum += pos as f64;
                        }
                        None => *sum += d as f64,
                    }
                }
            }
            let mut majority: Vec<usize> = (0..d).filter(|&i| votes[i] >= threshold).collect();
            majority.sort_by(|&a, &b| {
                votes[b]
                    .cmp(&votes[a])
                    .then(rank_sum[a].partial_cmp(&rank_sum[b]).unwrap())
                    .then(a.cmp(&b))
            });
            let mut kept: Vec<usize> = majority.into_iter().take(k).collect();
            kept.sort_unstable();
            if kept.is_empty() {
                return Err(Error::Strategy(
                    "no feature reached the majority threshold".into(),
                ));
            }
            Ok(SelectorModel::Ensemble(EnsembleModel {
                strategy,
                members,
                kept: Some(kept),
            }))
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
