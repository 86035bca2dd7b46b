//! Lasso regularization path: coefficients shrink and zero out as the
//! penalty grows toward lambda_max.
//!
//! Run: cargo run --release --example lasso_path

use selreg::data::{generate_synthetic, standardize, SyntheticSpec};
use selreg::regress::{fit_lasso, fit_ols, lasso_lambda_max};

fn main() {
    let (raw, _) = generate_synthetic(&SyntheticSpec {
        n: 300,
        true_coefficients: vec![2.0, -1.2, 0.6, 0.0, 0.0],
        noise_sd: 0.4,
        seed: 23,
    })
    .unwrap();
    let (ds, _) = standardize(&raw).unwrap();
    let x = ds.features();
    let y = ds.target();

    let lambda_max = lasso_lambda_max(x, y);
    let ols = fit_ols(x, y).unwrap();
    println!("lambda_max = {lambda_max:.4}");
    println!(
        "OLS coefficients: {:?}\n",
        ols.coefficients.iter().map(|c| format!("{c:+.3}")).collect::<Vec<_>>()
    );

    println!(
        "{:>10}  {:>8} {:>8} {:>8} {:>8} {:>8}  {:>7}",
        "lambda", "x1", "x2", "x3", "x4", "x5", "nonzero"
    );
    println!("{}", "-".repeat(66));
    // Descending path from lambda_max to lambda_max/1000.
    for step in 0..=10 {
        let lambda = lambda_max * 0.5f64.powi(step);
        let model = fit_lasso(x, y, lambda, 1e-10, 100_000).unwrap();
        let nonzero = model.coefficients.iter().filter(|&&c| c != 0.0).count();
        print!("{lambda:>10.5} ");
        for c in &model.coefficients {
            print!(" {c:>+8.4}");
        }
        println!("  {nonzero:>7}");
    }

    println!("\nAt lambda_max every coefficient is exactly zero; as lambda");
    println!("shrinks the solution approaches the OLS fit and the weakest");
    println!("predictors enter last.");
}
