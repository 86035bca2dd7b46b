//! Minimal dense linear algebra: matrix arithmetic, Householder least
//! squares, and a cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Everything here is sized for design matrices with a handful of columns;
//! there is no blocking, no sparsity, and no attempt to scale past that.

use crate::error::{Error, Result};

/// Symmetry check tolerance for [`eig_symmetric`] inputs.
const SYMMETRY_TOL: f64 = 1e-9;
/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this.
const JACOBI_OFF_TOL: f64 = 1e-10;
/// Hard cap on Jacobi sweeps.
const JACOBI_MAX_SWEEPS: usize = 100;
/// A pivot |R[j,j]| below this fraction of the largest pivot is treated as rank deficiency.
const RANK_TOL: f64 = 1e-12;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Panics if `data.len() != rows * cols`
    /// or either dimension is zero; shapes are a programming contract, not input.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        assert_eq!(data.len(), rows * cols, "data length must be rows * cols");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from equal-length rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "need at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    /// Row `r` as a contiguous slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Column `c` copied out (row-major storage makes columns strided).
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "vector length must match cols");
        self.data
            .chunks_exact(self.cols)
            .map(|row| dot(row, v))
            .collect()
    }

    /// New matrix keeping only `indices` columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        assert!(!indices.is_empty(), "need at least one column");
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for r in 0..self.rows {
            for &c in indices {
                data.push(self.get(r, c));
            }
        }
        Matrix::new(self.rows, indices.len(), data)
    }

    /// New matrix keeping only `indices` rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        assert!(!indices.is_empty(), "need at least one row");
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &r in indices {
            data.extend_from_slice(self.row(r));
        }
        Matrix::new(indices.len(), self.cols, data)
    }

    /// Per-column means.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for row in self.data.chunks_exact(self.cols) {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= self.rows as f64;
        }
        means
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Covariance matrix of the columns of `x`, normalized by `1/n`.
///
/// Note the population normalization: with `n` rows the divisor is `n`,
/// not `n - 1`, so variances line up with the rest of the crate.
pub fn covariance(x: &Matrix) -> Result<Matrix> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::InsufficientRows { got: n, required: 2 });
    }
    let d = x.cols();
    let means = x.column_means();
    let mut cov = Matrix::zeros(d, d);
    for r in 0..n {
        let row = x.row(r);
        for i in 0..d {
            let di = row[i] - means[i];
            for j in i..d {
                let v = cov.get(i, j) + di * (row[j] - means[j]);
                cov.set(i, j, v);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov.get(i, j) / n as f64;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok(cov)
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted non-increasing (ties keep their pre-sort order)
/// and column `j` of `eigenvectors` pairs with `eigenvalues[j]`. Each
/// eigenvector is signed so that its largest-magnitude entry is non-negative,
/// which keeps downstream reports byte-stable.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm falls below 1e-10; gives up
/// after 100 sweeps. Input must be square and symmetric within 1e-9.
pub fn eig_symmetric(a: &Matrix) -> Result<EigenResult> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = (a.get(i, j) - a.get(j, i)).abs();
            if delta > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { row: i, col: j, delta });
            }
        }
    }

    let mut m = a.clone();
    // Work on the exactly symmetric average so rotations stay consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let mut vectors = Matrix::identity(n);

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle zeroing (p,q); the stable tangent formula.
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = vectors.get(k, p);
                    let vkq = vectors.get(k, q);
                    vectors.set(k, p, c * vkp - s * vkq);
                    vectors.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m) >= JACOBI_OFF_TOL {
        return Err(Error::NoConvergence {
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    // Sort descending; stable so equal eigenvalues keep index order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).partial_cmp(&m.get(i, i)).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut column: Vec<f64> = (0..n).map(|r| vectors.get(r, old_col)).collect();
        let pivot = column
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if column[pivot] < 0.0 {
            for v in &mut column {
                *v = -*v;
            }
        }
        for (r, v) in column.into_iter().enumerate() {
            eigenvectors.set(r, new_col, v);
        }
    }

    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m.get(i, j) * m.get(i, j);
            }
        }
    }
    sum.sqrt()
}

/// Least-squares solution of `x * beta ~= y` via Householder QR.
///
/// Requires at least as many rows as columns. Reports [`Error::RankDeficient`]
/// when a pivot of `R` drops below 1e-12 of the largest pivot.
pub fn lstsq(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    let n = x.rows();
    let p = x.cols();
    if n < p {
        return Err(Error::Shape(format!(
            "least squares needs rows >= cols, got {n}x{p}"
        )));
    }
    if y.len() != n {
        return Err(Error::Shape(format!(
            "target length {} does not match {} rows",
            y.len(),
            n
        )));
    }

    let mut r = x.clone();
    let mut rhs = y.to_vec();

    // Householder triangularization, applying each reflector to rhs as we go.
    for k in 0..p {
        let mut norm = 0.0;
        for i in k..n {
            norm += r.get(i, k) * r.get(i, k);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue; // column already zero below the diagonal; pivot check catches it
        }
        let alpha = if r.get(k, k) >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| r.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 == 0.0 {
            continue;
        }

        for j in k..p {
            let mut proj = 0.0;
            for (idx, i) in (k..n).enumerate() {
                proj += v[idx] * r.get(i, j);
            }
            let scale = 2.0 * proj / vnorm2;
            for (idx, i) in (k..n).enumerate() {
                let val = r.get(i, j) - scale * v[idx];
                r.set(i, j, val);
            }
        }
        let mut proj = 0.0;
        for (idx, i) in (k..n).enumerate() {
            proj += v[idx] * rhs[i];
        }
        let scale = 2.0 * proj / vnorm2;
        for (idx, i) in (k..n).enumerate() {
            rhs[i] -= scale * v[idx];
        }
    }

    let max_pivot = (0..p).map(|j| r.get(j, j).abs()).fold(0.0, f64::max);
    for j in 0..p {
        if r.get(j, j).abs() < RANK_TOL * max_pivot || max_pivot == 0.0 {
            return Err(Error::RankDeficient { column: j });
        }
    }

    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let mut acc = rhs[j];
        for k in (j + 1)..p {
            acc -= r.get(j, k) * beta[k];
        }
        beta[j] = acc / r.get(j, j);
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    /// Independent normal-equations path: solve (XᵀX) b = Xᵀy by Gauss-Jordan.
    fn normal_equations(x: &Matrix, y: &[f64]) -> Vec<f64> {
        let p = x.cols();
        let xt = x.transpose();
        let xtx = xt.matmul(x);
        let xty = xt.mul_vec(y);
        let mut aug: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                let mut row: Vec<f64> = (0..p).map(|j| xtx.get(i, j)).collect();
                row.push(xty[i]);
                row
            })
            .collect();
        for col in 0..p {
            let pivot = (col..p)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot);
            let pv = aug[col][col];
            assert!(pv.abs() > 1e-12, "oracle hit a singular system");
            for j in col..=p {
                aug[col][j] /= pv;
            }
            for row in 0..p {
                if row != col {
                    let f = aug[row][col];
                    for j in col..=p {
                        aug[row][j] -= f * aug[col][j];
                    }
                }
            }
        }
        aug.into_iter().map(|row| row[p]).collect()
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(-3.0..3.0)).collect();
        Matrix::new(rows, cols, data)
    }

    #[test]
    fn covariance_of_zero_matrix_is_zero() {
        let x = Matrix::new(2, 2, vec![0.0; 4]);
        let cov = covariance(&x).unwrap();
        assert_eq!(cov, Matrix::zeros(2, 2));
    }

    #[test]
    fn covariance_hand_expansion() {
        // Columns [1,-1] and [-1,1]; means are zero, n = 2, so
        // cov = (1/2) Xᵀ X = [[1,-1],[-1,1]].
        let x = Matrix::new(2, 2, vec![1.0, -1.0, -1.0, 1.0]);
        let cov = covariance(&x).unwrap();
        let expected = Matrix::new(2, 2, vec![1.0, -1.0, -1.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                assert!((cov.get(i, j) - expected.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn covariance_rejects_single_row() {
        let x = Matrix::new(1, 3, vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            covariance(&x),
            Err(Error::InsufficientRows { got: 1, .. })
        ));
    }

    #[test]
    fn covariance_is_symmetric() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        for _ in 0..10 {
            let x = random_matrix(&mut rng, 9, 5);
            let cov = covariance(&x).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(cov.get(i, j), cov.get(j, i));
                }
            }
        }
    }

    #[test]
    fn eig_diagonal_matrix() {
        let a = Matrix::new(2, 2, vec![2.0, 0.0, 0.0, 1.0]);
        let e = eig_symmetric(&a).unwrap();
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!((e.eigenvectors.get(0, 0) - 1.0).abs() < 1e-12);
        assert!((e.eigenvectors.get(1, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rank_one_ones_matrix() {
        // Characteristic polynomial is λ² - 2λ, so eigenvalues are 2 and 0.
        let a = Matrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]);
        let e = eig_symmetric(&a).unwrap();
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-10);
        assert!(e.eigenvalues[1].abs() < 1e-10);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.eigenvectors.get(0, 0) - inv_sqrt2).abs() < 1e-8);
        assert!((e.eigenvectors.get(1, 0) - inv_sqrt2).abs() < 1e-8);
    }

    #[test]
    fn eig_identity_has_unit_eigenvalues() {
        let e = eig_symmetric(&Matrix::identity(3)).unwrap();
        for v in &e.eigenvalues {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_rejects_non_square_and_asymmetric() {
        let rect = Matrix::new(2, 3, vec![0.0; 6]);
        assert!(matches!(eig_symmetric(&rect), Err(Error::Shape(_))));
        let asym = Matrix::new(2, 2, vec![1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            eig_symmetric(&asym),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eig_sign_convention_and_sorted_order() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(21);
        for _ in 0..20 {
            let raw = random_matrix(&mut rng, 6, 6);
            let a = symmetrize(&raw);
            let e = eig_symmetric(&a).unwrap();
            for j in 1..6 {
                assert!(e.eigenvalues[j - 1] >= e.eigenvalues[j] - 1e-12);
            }
            for j in 0..6 {
                let col = e.eigenvectors.column(j);
                let max = col.iter().cloned().fold(f64::NEG_INFINITY, |a, b| a.max(b.abs()));
                assert!(col.iter().any(|v| (v.abs() - max).abs() < 1e-14 && *v >= 0.0));
            }
        }
    }

    fn symmetrize(m: &Matrix) -> Matrix {
        let n = m.rows();
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, 0.5 * (m.get(i, j) + m.get(j, i)));
            }
        }
        a
    }

    proptest! {
        #[test]
        fn eig_reconstructs_input(seed in 0u64..500, n in 1usize..=8) {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let a = symmetrize(&random_matrix(&mut rng, n, n));
            let e = eig_symmetric(&a).unwrap();

            // V diag(λ) Vᵀ == A entrywise.
            let mut scaled = e.eigenvectors.clone();
            for c in 0..n {
                for r in 0..n {
                    scaled.set(r, c, scaled.get(r, c) * e.eigenvalues[c]);
                }
            }
            let recon = scaled.matmul(&e.eigenvectors.transpose());
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((recon.get(i, j) - a.get(i, j)).abs() < 1e-7);
                }
            }

            // Columns orthonormal.
            for i in 0..n {
                for j in 0..n {
                    let d = dot(&e.eigenvectors.column(i), &e.eigenvectors.column(j));
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((d - expect).abs() < 1e-8);
                }
            }

            // Trace is preserved.
            let trace: f64 = (0..n).map(|i| a.get(i, i)).sum();
            let sum: f64 = e.eigenvalues.iter().sum();
            prop_assert!((trace - sum).abs() < 1e-8);

            // A v_j = λ_j v_j per entry.
            for j in 0..n {
                let v = e.eigenvectors.column(j);
                let av = a.mul_vec(&v);
                for i in 0..n {
                    prop_assert!((av[i] - e.eigenvalues[j] * v[i]).abs() < 1e-7);
                }
            }
        }

        #[test]
        fn lstsq_residual_orthogonal_to_columns(seed in 0u64..500) {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let n = rng.gen_range(5..30);
            let p = rng.gen_range(1..=4.min(n - 1));
            let x = random_matrix(&mut rng, n, p);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let beta = match lstsq(&x, &y) {
                Ok(b) => b,
                Err(Error::RankDeficient { .. }) => return Ok(()),
                Err(e) => panic!("unexpected error: {e}"),
            };
            let fitted = x.mul_vec(&beta);
            let residual: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
            for j in 0..p {
                prop_assert!(dot(&x.column(j), &residual).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn lstsq_exact_fit_and_mean() {
        let x = Matrix::new(2, 1, vec![1.0, 2.0]);
        let beta = lstsq(&x, &[2.0, 4.0]).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-12);

        let ones = Matrix::new(2, 1, vec![1.0, 1.0]);
        let beta = lstsq(&ones, &[1.0, 3.0]).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_detects_duplicated_direction() {
        let x = Matrix::new(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert!(matches!(
            lstsq(&x, &[1.0, 2.0, 3.0]),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn lstsq_matches_normal_equations_oracle() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
        for _ in 0..50 {
            let n = rng.gen_range(6..40);
            let p = rng.gen_range(1..=5);
            let x = random_matrix(&mut rng, n, p);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let beta = lstsq(&x, &y).unwrap();
            let oracle = normal_equations(&x, &y);
            for (a, b) in beta.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "lstsq {a} vs oracle {b}");
            }
        }
    }
}
