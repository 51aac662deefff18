//! Exports decision-function grids for both discriminants as CSV files that
//! any plotting tool can contour at `score = threshold`.
//!
//! ```bash
//! cargo run --release -p kshrink --example decision_boundary -- [out_dir]
//! ```

use std::path::PathBuf;

use kshrink::experiments::{export_boundary_grid, train_pair, Bounds, ExperimentConfig};
use kshrink::kfda::Class;

fn main() -> kshrink::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let cfg = ExperimentConfig::default();
    let pair = train_pair(5, &cfg, 42)?;

    for (name, model) in [("fixed", &pair.fixed), ("shrinkage", &pair.shrinkage)] {
        let path = out.join(format!("boundary_{name}.csv"));
        let grid = export_boundary_grid(model, Bounds::default(), 200, 200, &path)?;
        let class_two = grid.points.iter().filter(|p| p.label == 2).count();
        println!(
            "{name:<10} threshold {:+.5}  class-2 cells {:5}  class-2 regions {}  -> {}",
            model.threshold,
            class_two,
            grid.count_regions(Class::Two),
            path.display()
        );
    }
    Ok(())
}
