//! Computes the shrinkage coefficient from a centered linear kernel and checks
//! it against the explicit feature-space computation on the same data.
//!
//! ```bash
//! cargo run -p kshrink --example shrinkage_coefficient
//! ```

use kshrink::feature::{lambda_hat_direct, FeatureMatrix};
use kshrink::kernel::{center_gram, gram_matrix, sym_eigendecompose, DataMatrix, KernelSpec};
use kshrink::shrinkage::{lambda_hat, regularize_kernel, FeatureDim};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> kshrink::Result<()> {
    let (n, q) = (6, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Anisotropic cloud: coordinate j has standard deviation 1 + j/4.
    let values: Vec<f64> = (0..n * q)
        .map(|i| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * (1.0 + (i % q) as f64 / 4.0)
        })
        .collect();
    let data = DataMatrix::from_row_major(n, q, values)?;

    let k = center_gram(&gram_matrix(&data, &KernelSpec::Linear)?)?;
    let est = lambda_hat(&k, FeatureDim::Finite(q))?;
    let direct = lambda_hat_direct(&FeatureMatrix::linear(&data)?)?;

    println!("n = {n}, p = {q}");
    println!("V(S) estimate  = {:.6}", est.v_s);
    println!("V(T) estimate  = {:.6}", est.v_t);
    println!("|T - S|^2      = {:.6}", est.dist_ts);
    println!("lambda (kernel)  = {:.12}", est.lambda_hat);
    println!("lambda (feature) = {:.12}", direct);

    let reg = regularize_kernel(&k, est.lambda_hat, FeatureDim::Finite(q))?;
    let before = sym_eigendecompose(k.values())?.min_eigenvalue();
    let after = sym_eigendecompose(reg.values())?.min_eigenvalue();
    println!("min eigenvalue: {before:.3e} -> {after:.6} (shift {:.6})", reg.shift);
    Ok(())
}
