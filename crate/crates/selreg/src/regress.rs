//! Regressors: ordinary least squares, Ridge, Lasso via cyclic coordinate
//! descent, and a variance-reduction CART forest with impurity importances.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, lstsq, Matrix};
use crate::rng;

/// Regularization attached to a fitted linear model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    None,
    L2(f64),
    L1(f64),
}

/// A fitted linear predictor `y = intercept + X * coefficients`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub penalty: Penalty,
}

impl LinearModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.coefficients.len() {
            return Err(Error::Shape(format!(
                "model has {} coefficients, input has {} columns",
                self.coefficients.len(),
                x.cols()
            )));
        }
        Ok((0..x.rows())
            .map(|r| self.intercept + dot(x.row(r), &self.coefficients))
            .collect())
    }
}

/// Ordinary least squares with an intercept.
pub fn fit_ols(x: &Matrix, y: &[f64]) -> Result<LinearModel> {
    let n = x.rows();
    let d = x.cols();
    if n <= d {
        return Err(Error::InsufficientRows {
            got: n,
            required: d + 1,
        });
    }
    let mut data = Vec::with_capacity(n * (d + 1));
    for r in 0..n {
        data.push(1.0);
        data.extend_from_slice(x.row(r));
    }
    let beta = lstsq(&Matrix::new(n, d + 1, data), y)?;
    Ok(LinearModel {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        penalty: Penalty::None,
    })
}

/// Solves the raw ridge system `(X'X + alpha I) b = X'y` — no centering, no
/// intercept — by least squares on the matrix stacked with `sqrt(alpha) I`.
pub fn ridge_solve(x: &Matrix, y: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if alpha < 0.0 {
        return Err(Error::Param(format!("alpha must be >= 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return lstsq(x, y);
    }
    let n = x.rows();
    let d = x.cols();
    let root = alpha.sqrt();
    let mut data = Vec::with_capacity((n + d) * d);
    for r in 0..n {
        data.extend_from_slice(x.row(r));
    }
    for j in 0..d {
        for c in 0..d {
            data.push(if c == j { root } else { 0.0 });
        }
    }
    let mut rhs = y.to_vec();
    rhs.resize(n + d, 0.0);
    lstsq(&Matrix::new(n + d, d, data), &rhs)
}

/// Ridge regression: `b = (Xc'Xc + n*lambda I)^-1 Xc'yc` on centered data,
/// with an unpenalized intercept recovered as `mean(y) - means(X) . b`.
///
/// The `n * lambda` scaling makes `lambda` sample-size invariant. At
/// `lambda = 0` this reduces to [`fit_ols`] (and inherits its rank demands).
pub fn fit_ridge(x: &Matrix, y: &[f64], lambda: f64) -> Result<LinearModel> {
    if lambda < 0.0 {
        return Err(Error::Param(format!("lambda must be >= 0, got {lambda}")));
    }
    let n = x.rows();
    if y.len() != n {
        return Err(Error::Shape(format!(
            "target length {} does not match {} rows",
            y.len(),
            n
        )));
    }
    let (xc, yc, x_means, y_mean) = center(x, y);
    let beta = ridge_solve(&xc, &yc, n as f64 * lambda)?;
    Ok(LinearModel {
        intercept: y_mean - dot(&x_means, &beta),
        coefficients: beta,
        penalty: Penalty::L2(lambda),
    })
}

/// The smallest penalty at which the Lasso solution is identically zero:
/// `max_j |(1/n) X_j' (y - mean(y))|`.
///
/// Computed on centered columns with the same arithmetic as [`fit_lasso`]'s
/// first sweep, so fitting at exactly this penalty yields exact zeros.
pub fn lasso_lambda_max(x: &Matrix, y: &[f64]) -> f64 {
    let (xc, yc, _, _) = center(x, y);
    let n = x.rows() as f64;
    (0..x.cols())
        .map(|j| dot(&xc.column(j), &yc).abs() / n)
        .fold(0.0, f64::max)
}

/// Lasso via cyclic coordinate descent with soft thresholding.
///
/// Minimizes `(1/2n) ||y - b0 - X b||^2 + lambda sum |b_j|` with an
/// unpenalized intercept. Converged when no coefficient moves more than
/// `tol` in a full sweep; otherwise fails after `max_iter` sweeps. Callers
/// should standardize features first so the penalty is comparable across
/// columns.
pub fn fit_lasso(
    x: &Matrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LinearModel> {
    if lambda <= 0.0 {
        return Err(Error::Param(format!("lambda must be > 0, got {lambda}")));
    }
    if tol <= 0.0 || max_iter == 0 {
        return Err(Error::Param("tol must be > 0 and max_iter >= 1".into()));
    }
    let n = x.rows();
    if y.len() != n {
        return Err(Error::Shape(format!(
            "target length {} does not match {} rows",
            y.len(),
            n
        )));
    }
    let (xc, yc, x_means, y_mean) = center(x, y);
    let d = x.cols();
    let nf = n as f64;
    let columns: Vec<Vec<f64>> = (0..d).map(|j| xc.column(j)).collect();
    // (1/n) ||X_j||^2 per column; zero for constant columns, which stay at 0.
    let norms: Vec<f64> = columns.iter().map(|c| dot(c, c) / nf).collect();

    let mut beta = vec![0.0; d];
    let mut residual = yc.clone();
    let mut converged = false;
    for _sweep in 0..max_iter {
        let mut max_delta: f64 = 0.0;
        for j in 0..d {
            if norms[j] == 0.0 {
                continue;
            }
            let old = beta[j];
            // Partial residual correlation with coordinate j restored.
            let z = dot(&columns[j], &residual) / nf + norms[j] * old;
            let new = soft_threshold(z, lambda) / norms[j];
            if new != old {
                let delta = new - old;
                for (r, c) in residual.iter_mut().zip(&columns[j]) {
                    *r -= delta * c;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: max_iter,
        });
    }
    Ok(LinearModel {
        intercept: y_mean - dot(&x_means, &beta),
        coefficients: beta,
        penalty: Penalty::L1(lambda),
    })
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    z.signum() * (z.abs() - lambda).max(0.0)
}

fn center(x: &Matrix, y: &[f64]) -> (Matrix, Vec<f64>, Vec<f64>, f64) {
    let n = x.rows();
    let x_means = x.column_means();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut xc = x.clone();
    for r in 0..n {
        for c in 0..x.cols() {
            xc.set(r, c, x.get(r, c) - x_means[c]);
        }
    }
    let yc = y.iter().map(|v| v - y_mean).collect();
    (xc, yc, x_means, y_mean)
}

/// Regression tree node: an axis-aligned split or a mean-prediction leaf.
#[derive(Debug, Clone)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
        /// Absolute reduction in sum of squared errors achieved by the split.
        impurity_decrease: f64,
        samples: usize,
    },
    Leaf {
        prediction: f64,
        samples: usize,
    },
}

impl TreeNode {
    fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { prediction, .. } => *prediction,
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                if row[*feature] <= *threshold {
                    left.predict_row(row)
                } else {
                    right.predict_row(row)
                }
            }
        }
    }

    fn accumulate_importances(&self, into: &mut [f64]) {
        if let TreeNode::Internal {
            feature,
            left,
            right,
            impurity_decrease,
            ..
        } = self
        {
            into[*feature] += impurity_decrease;
            left.accumulate_importances(into);
            right.accumulate_importances(into);
        }
    }
}

/// Forest hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Candidate features scanned per node; `None` means `max(1, d/3)`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

/// A fitted random forest with normalized impurity importances.
#[derive(Debug, Clone)]
pub struct ForestModel {
    trees: Vec<TreeNode>,
    importances: Vec<f64>,
    params: ForestParams,
    input_dim: usize,
}

impl ForestModel {
    /// Per-feature share of the total impurity decrease; sums to 1, or is
    /// all zeros when no split ever occurred (constant target).
    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    /// Mean of the per-tree leaf predictions.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.input_dim {
            return Err(Error::Shape(format!(
                "forest fitted on {} columns, input has {}",
                self.input_dim,
                x.cols()
            )));
        }
        Ok((0..x.rows())
            .map(|r| {
                let row = x.row(r);
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                sum / self.trees.len() as f64
            })
            .collect())
    }
}

/// Trains `params.n_trees` CART regression trees, each on its own bootstrap
/// resample and RNG stream derived from `(seed, tree index)`, so the model
/// is identical however the trees are scheduled.
pub fn fit_forest(x: &Matrix, y: &[f64], params: &ForestParams) -> Result<ForestModel> {
    let n = x.rows();
    let d = x.cols();
    if n < 2 {
        return Err(Error::InsufficientRows { got: n, required: 2 });
    }
    if y.len() != n {
        return Err(Error::Shape(format!(
            "target length {} does not match {} rows",
            y.len(),
            n
        )));
    }
    if params.n_trees < 1 || params.min_samples_leaf < 1 {
        return Err(Error::Param(
            "n_trees and min_samples_leaf must be >= 1".into(),
        ));
    }
    let features_per_split = params.features_per_split.unwrap_or_else(|| (d / 3).max(1));
    if features_per_split < 1 || features_per_split > d {
        return Err(Error::Param(format!(
            "features_per_split must lie in [1, {d}]"
        )));
    }

    let builder = TreeBuilder {
        x,
        y,
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        features_per_split,
    };
    let trees: Vec<TreeNode> = (0..params.n_trees)
        .map(|t| {
            let mut stream = rng::substream(params.seed, t as u64);
            let indices: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| stream.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            builder.build(indices, 0, &mut stream)
        })
        .collect();

    let mut importances = vec![0.0; d];
    for tree in &trees {
        tree.accumulate_importances(&mut importances);
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        for v in &mut importances {
            *v /= total;
        }
    }

    Ok(ForestModel {
        trees,
        importances,
        params: *params,
        input_dim: d,
    })
}

struct TreeBuilder<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    max_depth: Option<usize>,
    min_samples_leaf: usize,
    features_per_split: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    decrease: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl TreeBuilder<'_> {
    fn build(&self, indices: Vec<usize>, depth: usize, stream: &mut impl Rng) -> TreeNode {
        let m = indices.len();
        let sum: f64 = indices.iter().map(|&i| self.y[i]).sum();
        let mean = sum / m as f64;
        let sse: f64 = indices
            .iter()
            .map(|&i| (self.y[i] - mean) * (self.y[i] - mean))
            .sum();

        let depth_reached = self.max_depth.is_some_and(|d| depth >= d);
        if m < 2 * self.min_samples_leaf || depth_reached || sse == 0.0 {
            return TreeNode::Leaf {
                prediction: mean,
                samples: m,
            };
        }

        // Candidate features for this node, drawn without replacement and
        // scanned in index order so evaluation order is deterministic.
        let mut candidates =
            rand::seq::index::sample(stream, self.x.cols(), self.features_per_split).into_vec();
        candidates.sort_unstable();

        let split = candidates
            .into_iter()
            .filter_map(|feature| self.best_split(&indices, feature, sse))
            // Strictly-greater keeps the earlier (lower feature index,
            // lower threshold) winner on exact ties.
            .fold(None::<Split>, |best, cand| match best {
                Some(b) if b.decrease >= cand.decrease => Some(b),
                _ => Some(cand),
            });

        match split {
            None => TreeNode::Leaf {
                prediction: mean,
                samples: m,
            },
            Some(split) => TreeNode::Internal {
                feature: split.feature,
                threshold: split.threshold,
                impurity_decrease: split.decrease,
                samples: m,
                left: Box::new(self.build(split.left, depth + 1, stream)),
                right: Box::new(self.build(split.right, depth + 1, stream)),
            },
        }
    }

    /// Best threshold for one feature, scanning midpoints between consecutive
    /// distinct sorted values with prefix sums. Returns `None` when no split
    /// satisfies the leaf-size floor or reduces the error.
    fn best_split(&self, indices: &[usize], feature: usize, parent_sse: f64) -> Option<Split> {
        let m = indices.len();
        let mut order: Vec<usize> = indices.to_vec();
        order.sort_by(|&a, &b| {
            self.x
                .get(a, feature)
                .partial_cmp(&self.x.get(b, feature))
                .unwrap()
        });

        let total: f64 = order.iter().map(|&i| self.y[i]).sum();
        let total_sq: f64 = order.iter().map(|&i| self.y[i] * self.y[i]).sum();

        let mut best: Option<(f64, usize)> = None; // (decrease, left count)
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for pos in 0..m - 1 {
            let yi = self.y[order[pos]];
            left_sum += yi;
            left_sq += yi * yi;
            let here = self.x.get(order[pos], feature);
            let next = self.x.get(order[pos + 1], feature);
            if here == next {
                continue;
            }
            let left_n = pos + 1;
            let right_n = m - left_n;
            if left_n < self.min_samples_leaf || right_n < self.min_samples_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let right_sq = total_sq - left_sq;
            let left_sse = left_sq - left_sum * left_sum / left_n as f64;
            let right_sse = right_sq - right_sum * right_sum / right_n as f64;
            let decrease = parent_sse - left_sse - right_sse;
            if decrease > 0.0 && best.is_none_or(|(d, _)| decrease > d) {
                best = Some((decrease, left_n));
            }
        }

        best.map(|(decrease, left_n)| {
            let threshold =
                0.5 * (self.x.get(order[left_n - 1], feature) + self.x.get(order[left_n], feature));
            Split {
                feature,
                threshold,
                decrease,
                left: order[..left_n].to_vec(),
                right: order[left_n..].to_vec(),
            }
        })
    }
}
