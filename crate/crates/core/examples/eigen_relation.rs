//! With fewer observations than features, the centered kernel and the sample
//! covariance share their nonzero spectrum up to the factor n - 1.
//!
//! ```bash
//! cargo run -p kshrink --example eigen_relation
//! ```

use kshrink::feature::FeatureMatrix;
use kshrink::shrinkage::eigen_relation_check;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> kshrink::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (p, n) = (30, 6);
    let phi = FeatureMatrix::new(DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut rng)))?;
    let r = eigen_relation_check(&phi)?;

    println!("  i   kappa_i     (n-1) delta_i");
    for (i, (k, d)) in r.kappa.iter().zip(&r.delta).enumerate() {
        println!("{:3}   {k:<10.6}  {:<10.6}", i + 1, (n - 1) as f64 * d);
    }
    println!("max relative error {:.2e}, |kappa_n| = {:.2e}, holds: {}", r.max_relative_error, r.trailing_kappa, r.holds);
    Ok(())
}
