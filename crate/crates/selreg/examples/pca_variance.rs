//! PCA on the bundled sleep-style data: variance explained per component,
//! projection, and full-rank reconstruction.
//!
//! Run: cargo run --release --example pca_variance

use selreg::data::generate_sleep_like;
use selreg::linalg::{covariance, eig_symmetric};
use selreg::selection::{pca_fit, SelectorModel};

fn main() {
    let ds = generate_sleep_like(630, 42);

    // The covariance spectrum behind the projection.
    let cov = covariance(ds.features()).unwrap();
    let eig = eig_symmetric(&cov).unwrap();
    println!("covariance eigenvalues (descending):");
    for (i, value) in eig.eigenvalues.iter().enumerate() {
        println!("  lambda_{} = {value:>12.4}", i + 1);
    }

    let model = pca_fit(&ds, ds.d()).unwrap();
    let SelectorModel::Pca(pca) = &model else {
        unreachable!()
    };
    println!("\nvariance explained:");
    let mut cumulative = 0.0;
    for (i, pct) in pca.variance_explained().iter().enumerate() {
        cumulative += pct;
        println!("  pc{:<2} {pct:>7.3}%   cumulative {cumulative:>8.3}%", i + 1);
    }

    // Project and reconstruct with the full basis.
    let projected = model.transform(ds.features()).unwrap();
    let back = pca.inverse_transform(&projected).unwrap();
    let mut max_err: f64 = 0.0;
    for r in 0..ds.n() {
        for c in 0..ds.d() {
            max_err = max_err.max((back.get(r, c) - ds.features().get(r, c)).abs());
        }
    }
    println!("\nfull-rank round trip: max |reconstruction error| = {max_err:.2e}");

    // A 2-component projection for comparison.
    let reduced = pca_fit(&ds, 2).unwrap();
    let coords = reduced.transform(ds.features()).unwrap();
    let SelectorModel::Pca(p2) = &reduced else {
        unreachable!()
    };
    println!(
        "k=2 keeps {:.2}% of the variance; projected shape {}x{}",
        p2.variance_explained().iter().sum::<f64>(),
        coords.rows(),
        coords.cols()
    );
}
