//! Trains fixed-ridge and shrinkage kernel Fisher discriminants on one small
//! training set and evaluates them on a large test set.
//!
//! ```bash
//! cargo run --release -p kshrink --example kfda_two_class -- [n_g] [seed]
//! ```

use kshrink::experiments::generate_two_class;
use kshrink::kfda::{misclassification_rate, train, RegularizerSpec};
use kshrink::{FeatureDim, KernelSpec};

fn main() -> kshrink::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_g: usize = args.next().map(|s| s.parse().expect("n_g must be an integer")).unwrap_or(5);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(1);

    let train_set = generate_two_class(n_g, seed)?;
    let test_set = generate_two_class(500, seed.wrapping_add(1))?;
    let kernel = KernelSpec::rbf(0.1)?;

    let fixed = train(&train_set, kernel, RegularizerSpec::fixed_ridge(1e-3)?)?;
    let shrink = train(
        &train_set,
        kernel,
        RegularizerSpec::Shrinkage { p: FeatureDim::Observations },
    )?;

    println!("training points: {} (class 1: {}, class 2: {})", train_set.data().n(), train_set.counts().0, train_set.counts().1);
    for (name, m) in [("fixed ridge", &fixed), ("shrinkage", &shrink)] {
        println!(
            "{name:<12} lambda = {:<10.6} train error = {:.4}  test error = {:.4}{}",
            m.lambda_used,
            misclassification_rate(m, &train_set)?,
            misclassification_rate(m, &test_set)?,
            if m.pseudo_solve { "  (pseudo-solve)" } else { "" }
        );
    }
    if let Some(est) = &shrink.shrinkage {
        println!("shrinkage ingredients: V(S) = {:.4e}, V(T) = {:.4e}, |T-S|^2 = {:.4e}", est.v_s, est.v_t, est.dist_ts);
    }
    Ok(())
}
