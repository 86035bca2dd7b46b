//! Dataset representation, CSV ingestion, standardization, splitting, and
//! synthetic data generation.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

/// A feature matrix with its target vector and column names.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Matrix,
    target: Vec<f64>,
    feature_names: Vec<String>,
    target_name: String,
}

impl Dataset {
    /// Validates the row-count and name invariants before construction.
    pub fn new(
        features: Matrix,
        target: Vec<f64>,
        feature_names: Vec<String>,
        target_name: String,
    ) -> Result<Self> {
        if features.rows() != target.len() {
            return Err(Error::Shape(format!(
                "{} feature rows vs {} target values",
                features.rows(),
                target.len()
            )));
        }
        if feature_names.len() != features.cols() {
            return Err(Error::Schema(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.cols()
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if name.is_empty() {
                return Err(Error::Schema("empty feature name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name '{name}'")));
            }
        }
        if target_name.is_empty() || seen.contains(target_name.as_str()) {
            return Err(Error::Schema(format!(
                "target name '{target_name}' is empty or collides with a feature"
            )));
        }
        Ok(Dataset {
            features,
            target,
            feature_names,
            target_name,
        })
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    /// Sub-dataset with the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            target: indices.iter().map(|&i| self.target[i]).collect(),
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
        }
    }

    /// Same rows with a replaced feature matrix (after a transform).
    pub fn with_features(&self, features: Matrix, feature_names: Vec<String>) -> Result<Dataset> {
        Dataset::new(
            features,
            self.target.clone(),
            feature_names,
            self.target_name.clone(),
        )
    }
}

/// Loads a comma-separated file: UTF-8, header row first, every cell a finite
/// number. All non-target columns become features in header order.
///
/// Error rows/locations refer to 1-based file lines (the header is line 1).
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_csv(&text, target_column)
}

pub(crate) fn parse_csv(text: &str, target_column: &str) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Schema("empty file".into()))?;
    let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut seen = HashSet::new();
    for name in &names {
        if name.is_empty() {
            return Err(Error::Schema("empty header name".into()));
        }
        if !seen.insert(name.clone()) {
            return Err(Error::Schema(format!("duplicate column name '{name}'")));
        }
    }
    let target_idx = names
        .iter()
        .position(|n| n == target_column)
        .ok_or_else(|| Error::Schema(format!("target column '{target_column}' not in header")))?;

    let mut feature_rows: Vec<Vec<f64>> = Vec::new();
    let mut target = Vec::new();
    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != names.len() {
            return Err(Error::Parse {
                row: line_no,
                column: format!("(field count {})", cells.len()),
                message: format!("expected {} fields", names.len()),
            });
        }
        let mut row = Vec::with_capacity(names.len() - 1);
        for (i, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row: line_no,
                column: names[i].clone(),
                message: format!("'{}' is not a number", cell.trim()),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row: line_no,
                    column: names[i].clone(),
                    message: "value is not finite".into(),
                });
            }
            if i == target_idx {
                target.push(value);
            } else {
                row.push(value);
            }
        }
        feature_rows.push(row);
    }
    if feature_rows.is_empty() {
        return Err(Error::Schema("no data rows".into()));
    }
    if names.len() < 2 {
        return Err(Error::Schema("need at least one feature column".into()));
    }

    let feature_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, n)| n.clone())
        .collect();
    Dataset::new(
        Matrix::from_rows(&feature_rows),
        target,
        feature_names,
        names[target_idx].clone(),
    )
}

/// The fitted column transform produced by [`standardize`]; applies the
/// identical shift/scale to held-out data.
#[derive(Debug, Clone)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Columns with zero variance in the fit data; these map to all-zeros.
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.means.len() {
            return Err(Error::Shape(format!(
                "standardizer fitted on {} columns, got {}",
                self.means.len(),
                x.cols()
            )));
        }
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                let v = if self.constant[c] {
                    0.0
                } else {
                    (x.get(r, c) - self.means[c]) / self.scales[c]
                };
                out.set(r, c, v);
            }
        }
        Ok(out)
    }
}

/// Centers each feature column to mean 0 and scales population standard
/// deviation to 1. Constant columns become all-zeros and are flagged rather
/// than treated as an error; stuck sensor channels are a fact of life.
pub fn standardize(ds: &Dataset) -> Result<(Dataset, Standardizer)> {
    let n = ds.n();
    if n < 2 {
        return Err(Error::InsufficientRows { got: n, required: 2 });
    }
    let x = ds.features();
    let means = x.column_means();
    let mut scales = vec![1.0; ds.d()];
    let mut constant = vec![false; ds.d()];
    for c in 0..ds.d() {
        let mut ss = 0.0;
        for r in 0..n {
            let d = x.get(r, c) - means[c];
            ss += d * d;
        }
        let sd = (ss / n as f64).sqrt();
        if sd == 0.0 {
            constant[c] = true;
        } else {
            scales[c] = sd;
        }
    }
    let transform = Standardizer {
        means,
        scales,
        constant,
    };
    let standardized = ds.with_features(transform.apply(x)?, ds.feature_names().to_vec())?;
    Ok((standardized, transform))
}

/// Splits rows into disjoint train/test sets after a seeded shuffle.
///
/// The test size is `round(n * test_fraction)` clamped to `[1, n-1]`.
pub fn train_test_split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = ds.n();
    if n < 2 {
        return Err(Error::Split(format!("cannot split {n} rows")));
    }
    let test_n = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);

    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng::stream(seed));
    let (test_idx, train_idx) = indices.split_at(test_n);
    let mut train_idx = train_idx.to_vec();
    let mut test_idx = test_idx.to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((ds.select_rows(&train_idx), ds.select_rows(&test_idx)))
}

/// A k-fold assignment of rows; fold sizes differ by at most one.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Rows held out in fold `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rows trained on in fold `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Seeded shuffled k-fold plan over `n` rows.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::Fold(format!("k must lie in [2, n={n}], got {k}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed));
    let mut assignments = vec![0usize; n];
    // First n % k folds take the extra row.
    let base = n / k;
    let extra = n % k;
    let mut cursor = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for _ in 0..size {
            assignments[order[cursor]] = fold;
            cursor += 1;
        }
    }
    Ok(FoldPlan { k, assignments })
}

/// Recipe for a synthetic regression dataset with known relevant features.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n: usize,
    /// Zero entries mark irrelevant features; length gives the feature count.
    pub true_coefficients: Vec<f64>,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.true_coefficients.is_empty() {
            return Err(Error::Param("need at least one coefficient".into()));
        }
        if self.true_coefficients.iter().all(|&c| c == 0.0) {
            return Err(Error::Param("need at least one nonzero coefficient".into()));
        }
        if self.noise_sd.is_nan() || self.noise_sd < 0.0 {
            return Err(Error::Param(format!(
                "noise standard deviation must be >= 0, got {}",
                self.noise_sd
            )));
        }
        if self.n == 0 {
            return Err(Error::Param("need at least one sample".into()));
        }
        Ok(())
    }
}

/// Draws i.i.d. standard normal features and a linear target with Gaussian
/// noise. Returns the dataset and the indices of the truly relevant features.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Dataset, Vec<usize>)> {
    spec.validate()?;
    let d = spec.true_coefficients.len();
    let mut r = rng::stream(spec.seed);
    let mut data = Vec::with_capacity(spec.n * d);
    let mut target = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let start = data.len();
        for _ in 0..d {
            data.push(r.sample::<f64, _>(StandardNormal));
        }
        let mut y = 0.0;
        for (j, &c) in spec.true_coefficients.iter().enumerate() {
            y += c * data[start + j];
        }
        if spec.noise_sd > 0.0 {
            y += spec.noise_sd * r.sample::<f64, _>(StandardNormal);
        }
        target.push(y);
    }
    let support: Vec<usize> = spec
        .true_coefficients
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(i, _)| i)
        .collect();
    let names = (1..=d).map(|i| format!("x{i}")).collect();
    let ds = Dataset::new(Matrix::new(spec.n, d, data), target, names, "y".into())?;
    Ok((ds, support))
}

/// One physiological channel in [`generate_sleep_like`]:
/// value = `base + slope * stress + arousal_loading * arousal
///          + Uniform(-jitter, jitter)`.
struct SleepChannel {
    name: &'static str,
    base: f64,
    slope: f64,
    /// How strongly the shared per-row arousal state moves this channel.
    arousal_loading: f64,
    jitter: f64,
}

// Jitter-to-slope ratios grade the channels so hours slept, blood oxygen and
// respiration rate carry the cleanest stress signal, in that order, with
// body temperature noisiest. The arousal confounder moves every channel at
// once; recovering stress accurately requires combining channels.
const SLEEP_CHANNELS: [SleepChannel; 8] = [
    SleepChannel { name: "snoring_range", base: 45.0, slope: 11.0, arousal_loading: 14.0, jitter: 8.0 },
    SleepChannel { name: "respiration_rate", base: 16.0, slope: 3.5, arousal_loading: 4.0, jitter: 1.05 },
    SleepChannel { name: "body_temperature", base: 98.5, slope: -1.5, arousal_loading: 4.0, jitter: 0.6 },
    SleepChannel { name: "limb_movement_rate", base: 4.0, slope: 4.0, arousal_loading: 8.0, jitter: 3.2 },
    SleepChannel { name: "blood_oxygen_levels", base: 97.0, slope: -2.5, arousal_loading: 2.8, jitter: 0.65 },
    SleepChannel { name: "eye_movement", base: 60.0, slope: 25.0, arousal_loading: 28.0, jitter: 25.0 },
    SleepChannel { name: "number_of_hours_slept", base: 9.0, slope: -2.0, arousal_loading: 2.2, jitter: 0.44 },
    SleepChannel { name: "heart_rate", base: 55.0, slope: 7.5, arousal_loading: 9.0, jitter: 6.0 },
];

/// Synthetic stand-in for a smartphone sleep-tracking export: eight
/// physiological channels, each a noisy monotone function of a continuous
/// stress score drawn uniformly from [0, 4], all additionally moved by a
/// shared per-row arousal state.
pub fn generate_sleep_like(n: usize, seed: u64) -> Dataset {
    assert!(n >= 1);
    let mut r = rng::stream(seed);
    let scores: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..=4.0)).collect();

    let mut data = Vec::with_capacity(n * SLEEP_CHANNELS.len());
    for &score in &scores {
        let arousal = r.gen_range(-1.0..=1.0);
        for ch in &SLEEP_CHANNELS {
            let jitter = r.gen_range(-ch.jitter..=ch.jitter);
            data.push(ch.base + ch.slope * score + ch.arousal_loading * arousal + jitter);
        }
    }
    let names = SLEEP_CHANNELS.iter().map(|c| c.name.to_string()).collect();
    Dataset::new(
        Matrix::new(n, SLEEP_CHANNELS.len(), data),
        scores,
        names,
        "stress_level".into(),
    )
    .expect("static channel names are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const THREE_ROWS: &str = "x1,x2,stress_level\n1,2,0\n3,4,1\n5,6,2\n";

    #[test]
    fn load_csv_parses_features_in_header_order() {
        let ds = parse_csv(THREE_ROWS, "stress_level").unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.d(), 2);
        assert_eq!(ds.feature_names(), ["x1", "x2"]);
        assert_eq!(ds.target(), [0.0, 1.0, 2.0]);
        assert_eq!(ds.features().row(1), [3.0, 4.0]);
    }

    #[test]
    fn load_csv_missing_target_is_schema_error() {
        assert!(matches!(
            parse_csv(THREE_ROWS, "missing"),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn load_csv_rejects_bad_cells_and_duplicates() {
        let bad = "a,b\n1,oops\n";
        match parse_csv(bad, "b") {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let nan = "a,b\n1,NaN\n";
        assert!(matches!(parse_csv(nan, "b"), Err(Error::Parse { .. })));
        let dup = "a,a\n1,2\n";
        assert!(matches!(parse_csv(dup, "a"), Err(Error::Schema(_))));
    }

    #[test]
    fn load_csv_eight_column_sleep_export() {
        let ds = generate_sleep_like(10, 9);
        let text = crate::report::csv_string(&ds);
        let back = parse_csv(&text, "stress_level").unwrap();
        assert_eq!(back.d(), 8);
    }

    #[test]
    fn load_csv_missing_file_is_io_error() {
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "y"),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn standardize_hand_computed_column() {
        // Column [1,2,3]: mean 2, population sd sqrt(2/3).
        let ds = Dataset::new(
            Matrix::new(3, 1, vec![1.0, 2.0, 3.0]),
            vec![0.0; 3],
            vec!["x".into()],
            "y".into(),
        )
        .unwrap();
        let (out, transform) = standardize(&ds).unwrap();
        let expected = (3.0f64 / 2.0).sqrt();
        assert!((out.features().get(0, 0) + expected).abs() < 1e-12);
        assert!((out.features().get(1, 0)).abs() < 1e-12);
        assert!((out.features().get(2, 0) - expected).abs() < 1e-12);
        assert!((expected - 1.224_744_871_391_589).abs() < 1e-12);
        assert!(!transform.constant[0]);
    }

    #[test]
    fn standardize_flags_constant_columns() {
        let ds = Dataset::new(
            Matrix::new(3, 1, vec![5.0, 5.0, 5.0]),
            vec![0.0; 3],
            vec!["x".into()],
            "y".into(),
        )
        .unwrap();
        let (out, transform) = standardize(&ds).unwrap();
        assert!(transform.constant[0]);
        assert_eq!(out.features().column(0), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn standardize_is_idempotent_and_reapplicable() {
        let (ds, _) = generate_synthetic(&SyntheticSpec {
            n: 40,
            true_coefficients: vec![1.0, 0.0, 2.0],
            noise_sd: 0.3,
            seed: 5,
        })
        .unwrap();
        let (once, transform) = standardize(&ds).unwrap();
        // Applying the stored transform to the same data reproduces it.
        let reapplied = transform.apply(ds.features()).unwrap();
        for r in 0..ds.n() {
            for c in 0..ds.d() {
                assert!((reapplied.get(r, c) - once.features().get(r, c)).abs() < 1e-12);
            }
        }
        // Standardizing already-standardized data changes nothing.
        let (twice, _) = standardize(&once).unwrap();
        for r in 0..ds.n() {
            for c in 0..ds.d() {
                assert!((twice.features().get(r, c) - once.features().get(r, c)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = generate_sleep_like(10, 3);
        let (train, test) = train_test_split(&ds, 0.2, 11).unwrap();
        assert_eq!(train.n(), 8);
        assert_eq!(test.n(), 2);
        let (train2, test2) = train_test_split(&ds, 0.2, 11).unwrap();
        assert_eq!(train.target(), train2.target());
        assert_eq!(test.target(), test2.target());
        // 0.99 of 10 rows rounds to 10, clamped to 9 test rows.
        let (train3, test3) = train_test_split(&ds, 0.99, 11).unwrap();
        assert_eq!(train3.n(), 1);
        assert_eq!(test3.n(), 9);
        assert!(train_test_split(&ds, 0.0, 1).is_err());
        assert!(train_test_split(&ds, 1.0, 1).is_err());
    }

    #[test]
    fn kfold_sizes_and_contract() {
        let plan = kfold(10, 5, 1).unwrap();
        for fold in 0..5 {
            assert_eq!(plan.test_indices(fold).len(), 2);
        }
        let plan = kfold(7, 3, 1).unwrap();
        let mut sizes: Vec<usize> = (0..3).map(|f| plan.test_indices(f).len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 3]);
        assert!(matches!(kfold(10, 1, 1), Err(Error::Fold(_))));
        assert!(matches!(kfold(3, 4, 1), Err(Error::Fold(_))));
    }

    proptest! {
        #[test]
        fn kfold_test_folds_partition_rows(n in 2usize..60, k in 2usize..10, seed in 0u64..50) {
            prop_assume!(k <= n);
            let plan = kfold(n, k, seed).unwrap();
            let mut all: Vec<usize> = (0..k).flat_map(|f| plan.test_indices(f)).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            for fold in 0..k {
                let size = plan.test_indices(fold).len();
                prop_assert!(size == n / k || size == n / k + 1);
                prop_assert!(size > 0);
            }
        }
    }

    #[test]
    fn synthetic_noiseless_target_is_exact() {
        let (ds, support) = generate_synthetic(&SyntheticSpec {
            n: 50,
            true_coefficients: vec![2.0, 0.0],
            noise_sd: 0.0,
            seed: 3,
        })
        .unwrap();
        assert_eq!(support, vec![0]);
        for i in 0..ds.n() {
            assert!((ds.target()[i] - 2.0 * ds.features().get(i, 0)).abs() < 1e-12);
        }
    }

    #[test]
    fn synthetic_same_seed_identical() {
        let spec = SyntheticSpec {
            n: 30,
            true_coefficients: vec![1.0, -1.0, 0.0],
            noise_sd: 0.5,
            seed: 8,
        };
        let (a, _) = generate_synthetic(&spec).unwrap();
        let (b, _) = generate_synthetic(&spec).unwrap();
        assert_eq!(a.target(), b.target());
        assert_eq!(a.features().row(7), b.features().row(7));
    }

    #[test]
    fn synthetic_relevant_feature_strongly_correlated() {
        // With coefficient 1 and noise sd 0.1 the theoretical correlation is
        // 1/sqrt(1.01) ~= 0.995.
        let (ds, _) = generate_synthetic(&SyntheticSpec {
            n: 500,
            true_coefficients: vec![1.0, 0.0, 0.0],
            noise_sd: 0.1,
            seed: 42,
        })
        .unwrap();
        let x = ds.features().column(0);
        let y = ds.target();
        let mx = x.iter().sum::<f64>() / x.len() as f64;
        let my = y.iter().sum::<f64>() / y.len() as f64;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for i in 0..x.len() {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!(corr.abs() > 0.9, "corr = {corr}");
    }

    #[test]
    fn synthetic_rejects_invalid_specs() {
        let all_zero = SyntheticSpec {
            n: 10,
            true_coefficients: vec![0.0, 0.0],
            noise_sd: 1.0,
            seed: 0,
        };
        assert!(matches!(generate_synthetic(&all_zero), Err(Error::Param(_))));
        let negative_noise = SyntheticSpec {
            n: 10,
            true_coefficients: vec![1.0],
            noise_sd: -1.0,
            seed: 0,
        };
        assert!(matches!(
            generate_synthetic(&negative_noise),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn sleep_like_shape_and_determinism() {
        let a = generate_sleep_like(630, 42);
        assert_eq!(a.n(), 630);
        assert_eq!(a.d(), 8);
        assert_eq!(a.target_name(), "stress_level");
        let b = generate_sleep_like(630, 42);
        assert_eq!(a.target(), b.target());
        assert!(a.target().iter().all(|&l| (0.0..=4.0).contains(&l)));
    }
}
