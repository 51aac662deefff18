//! Paired two-sided t-test on per-trial error rates.
//!
//! ```bash
//! cargo run -p kshrink --example paired_ttest
//! ```

use kshrink::experiments::{paired_t_test, run_trial, ExperimentConfig};

fn main() -> kshrink::Result<()> {
    let cfg = ExperimentConfig {
        test_points_per_component: 200,
        ..Default::default()
    };
    let n_g = 4;
    let outcomes = (0..30)
        .map(|rep| run_trial(n_g, &cfg, cfg.trial_seed(n_g, rep)))
        .collect::<kshrink::Result<Vec<_>>>()?;
    let fixed: Vec<f64> = outcomes.iter().map(|o| o.rate_fixed).collect();
    let shrink: Vec<f64> = outcomes.iter().map(|o| o.rate_shrinkage).collect();

    let r = paired_t_test(&fixed, &shrink)?;
    println!("n_g = {n_g}, {} paired trials", fixed.len());
    println!("mean(fixed - shrinkage) = {:+.5}", r.mean_difference);
    println!("t = {:.4} on {} dof, two-sided p = {:.4e}", r.t_statistic, r.degrees_of_freedom, r.p_value);
    println!("reject equal means at 99%: {}", r.reject_at_99);

    let textbook = paired_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5])?;
    println!("d = 1..5: t = {:.4}, p = {:.4}", textbook.t_statistic, textbook.p_value);
    Ok(())
}
