//! Full fixed-ridge vs shrinkage sweep over n_g = 3..=30 with 100 repetitions.
//!
//! ```bash
//! cargo run --release -p kshrink --example benchmark_sweep -- [seed] [out_dir]
//! ```

use std::path::PathBuf;

use kshrink::experiments::{run_sweep, ExperimentConfig};

fn main() -> kshrink::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(2016);
    let cfg = ExperimentConfig {
        seed,
        ..Default::default()
    };
    let report = run_sweep(&cfg)?;

    println!(" n_g   fixed    shrink   lambda   p-value");
    for s in &report.per_ng {
        println!(
            "{:4}  {:.4}   {:.4}   {:.4}   {:.2e}",
            s.n_g, s.mean_rate_fixed, s.mean_rate_shrinkage, s.mean_lambda_hat, s.ttest.p_value
        );
    }
    println!(
        "shrinkage not worse at {} of {} n_g values; pooled t = {:.3}, p = {:.3e}",
        report.shrinkage_not_worse_count,
        report.per_ng.len(),
        report.pooled_ttest.t_statistic,
        report.pooled_ttest.p_value
    );

    if let Some(dir) = args.next().map(PathBuf::from) {
        report.write_to_dir(&dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
