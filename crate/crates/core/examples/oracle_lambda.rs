//! Compares the Monte Carlo oracle coefficient with the average estimate for
//! a few covariance spectra and sample sizes.
//!
//! ```bash
//! cargo run --release -p kshrink --example oracle_lambda
//! ```

use kshrink::feature::{oracle_lambda, CovMatrix, GaussianSampler, SyntheticModel};

fn main() -> kshrink::Result<()> {
    let spectra: [(&str, Vec<f64>); 3] = [
        ("identity(5)", vec![1.0; 5]),
        ("diag(1..5)", (1..=5).map(f64::from).collect()),
        ("diag(1,10)", vec![1.0, 10.0]),
    ];
    println!("{:<12} {:>3}  {:>9} {:>9} {:>9}", "sigma", "n", "oracle", "+-se", "mean est");
    for (name, diag) in &spectra {
        let sampler = GaussianSampler::new(SyntheticModel::new(CovMatrix::diagonal(diag)?)?);
        for n in [5, 10, 40] {
            let o = oracle_lambda(&sampler, n, 4000, 3)?;
            println!(
                "{name:<12} {n:>3}  {:>9.4} {:>9.4} {:>9.4}",
                o.estimate, o.std_error, o.mean_lambda_hat
            );
        }
    }
    Ok(())
}
