use std::path::PathBuf;

use clap::Args;
use slog_core::bench::cross_validate;

use crate::{io, CliError, DataArgs};

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Sparsity levels to score.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,0.9,1")]
    pub s: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value = "cv.csv")]
    pub out: PathBuf,
}

pub fn run(args: &CvArgs, seed: u64) -> Result<(), CliError> {
    let problem = args.data.load()?;
    if args.folds < 2 || args.folds > problem.n() {
        return Err(CliError::Usage(format!("--folds must be between 2 and n = {}", problem.n())));
    }
    let points = cross_validate(&problem, &args.s, args.folds, seed)?;
    let mut rows = Vec::new();
    for pt in &points {
        for (f, mse) in pt.fold_mse.iter().enumerate() {
            rows.push(format!("{},{f},{mse}", pt.s));
        }
    }
    for pt in &points {
        rows.push(format!("{},mean,{}", pt.s, pt.mean_mse));
    }
    io::write_lines(&args.out, "s,fold,mse", &rows)?;
    if let Some(best) = points.iter().min_by(|a, b| a.mean_mse.total_cmp(&b.mean_mse)) {
        println!("best s = {} (mean mse {:.6e}); wrote {}", best.s, best.mean_mse, args.out.display());
    }
    Ok(())
}
