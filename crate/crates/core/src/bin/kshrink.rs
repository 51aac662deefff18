//! Command-line front end for the synthetic two-class experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kshrink::experiments::{
    export_boundary_grid, paired_t_test, run_sweep, run_trial, train_pair, Bounds,
    ExperimentConfig,
};
use kshrink::kfda::Class;
use kshrink::{Error, FeatureDim, Result};

#[derive(Parser)]
#[command(name = "kshrink", version, about = "Shrinkage-regularized kernel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated trials over a range of n_g and write the report.
    Sweep {
        #[arg(long, default_value_t = 3)]
        ng_min: usize,
        #[arg(long, default_value_t = 30)]
        ng_max: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Master seed; required so that every sweep is reproducible.
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run a single trial and print its outcome as JSON.
    Trial {
        #[arg(long)]
        ng: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Train both discriminants once and export their decision grids.
    Boundary {
        #[arg(long, default_value_t = 5)]
        ng: usize,
        #[arg(long)]
        seed: u64,
        /// `N` or `NXxNY`.
        #[arg(long, default_value = "200")]
        grid_res: String,
        /// `x_min,x_max,y_min,y_max`
        #[arg(long, default_value = "-1,1,-1,1", allow_hyphen_values = true)]
        bounds: String,
        #[arg(long, default_value = "boundary-out")]
        out: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Paired t-test on two columns of a CSV file with a header row.
    Ttest {
        input: PathBuf,
        /// Column for sample a (default: first column).
        #[arg(long)]
        a_col: Option<String>,
        /// Column for sample b (default: second column).
        #[arg(long)]
        b_col: Option<String>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 0.1)]
    sigma2: f64,
    #[arg(long, default_value_t = 1e-3)]
    fixed_lambda: f64,
    /// Feature dimension for the shrinkage formulas.
    #[arg(long, conflicts_with = "p_policy")]
    p: Option<usize>,
    /// `n`: use the number of training observations as p.
    #[arg(long, value_parser = ["n"])]
    p_policy: Option<String>,
    #[arg(long, default_value_t = 500)]
    test_per_component: usize,
}

impl ModelArgs {
    fn config(&self, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            sigma2: self.sigma2,
            fixed_lambda: self.fixed_lambda,
            test_points_per_component: self.test_per_component,
            seed,
            p_policy: match self.p {
                Some(p) => FeatureDim::Finite(p),
                None => FeatureDim::Observations,
            },
            ..Default::default()
        }
    }
}

fn parse_grid_res(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidConfig(format!("grid resolution {s:?} is not N or NXxNY"));
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

fn read_columns(path: &Path, a: Option<&str>, b: Option<&str>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: Option<&str>, default: usize| -> Result<usize> {
        match name {
            Some(n) => headers
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| Error::InvalidConfig(format!("no column {n:?} in {}", path.display()))),
            None if default < headers.len() => Ok(default),
            None => Err(Error::InvalidConfig(format!(
                "{} needs at least two columns",
                path.display()
            ))),
        }
    };
    let (ia, ib) = (find(a, 0)?, find(b, 1)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for record in reader.records() {
        let record = record?;
        let get = |i: usize| -> Result<f64> {
            record
                .get(i)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("non-numeric value in {record:?}")))
        };
        xs.push(get(ia)?);
        ys.push(get(ib)?);
    }
    Ok((xs, ys))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            ng_min,
            ng_max,
            reps,
            seed,
            out,
            model,
        } => {
            let cfg = ExperimentConfig {
                ng_min,
                ng_max,
                repetitions: reps,
                output_dir: Some(out.clone()),
                ..model.config(seed)
            };
            let report = run_sweep(&cfg)?;
            report.write_to_dir(&out)?;
            println!("n_g,mean_rate_fixed,mean_rate_shrinkage,mean_lambda_hat,p_value");
            for s in &report.per_ng {
                println!(
                    "{},{:.5},{:.5},{:.5},{:.3e}",
                    s.n_g, s.mean_rate_fixed, s.mean_rate_shrinkage, s.mean_lambda_hat, s.ttest.p_value
                );
            }
            println!(
                "# shrinkage not worse at {}/{} n_g; pooled t = {:.4}, p = {:.3e}, reject at 99%: {}",
                report.shrinkage_not_worse_count,
                report.per_ng.len(),
                report.pooled_ttest.t_statistic,
                report.pooled_ttest.p_value,
                report.pooled_ttest.reject_at_99
            );
            println!("# wrote {}", out.display());
        }
        Command::Trial { ng, seed, model } => {
            let cfg = model.config(seed);
            cfg.kernel()?;
            let outcome = run_trial(ng, &cfg, seed)?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
        }
        Command::Boundary {
            ng,
            seed,
            grid_res,
            bounds,
            out,
            model,
        } => {
            let (nx, ny) = parse_grid_res(&grid_res)?;
            let bounds: Bounds = bounds.parse()?;
            let cfg = model.config(seed);
            let pair = train_pair(ng, &cfg, seed)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            let train_path = out.join("train.csv");
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_path(&train_path)?;
            w.write_record(["x", "y", "label"])?;
            for (row, label) in pair.fixed.train_data.rows().zip(&pair.fixed.labels) {
                w.write_record([
                    row[0].to_string(),
                    row[1].to_string(),
                    label.as_u8().to_string(),
                ])?;
            }
            w.flush().map_err(|e| Error::Io {
                path: train_path.clone(),
                source: e,
            })?;
            for (name, m) in [("fixed", &pair.fixed), ("shrinkage", &pair.shrinkage)] {
                let path = out.join(format!("boundary_{name}.csv"));
                let grid = export_boundary_grid(m, bounds, nx, ny, &path)?;
                println!(
                    "{name}: lambda = {:.6}, class-2 regions = {}, wrote {}",
                    m.lambda_used,
                    grid.count_regions(Class::Two),
                    path.display()
                );
            }
        }
        Command::Ttest { input, a_col, b_col } => {
            let (a, b) = read_columns(&input, a_col.as_deref(), b_col.as_deref())?;
            let result = paired_t_test(&a, &b)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
