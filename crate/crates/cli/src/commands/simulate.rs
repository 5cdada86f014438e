use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use slog_core::simdata::{generate, SimulationSpec};

use crate::{io, parse_rule, CliError};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Pairwise correlation of the predictors, in [0, 1).
    #[arg(long)]
    pub rho: f64,
    /// alternating | constant:<v> | subset:<fraction>:<value> | uniform:<low>:<high>
    #[arg(long, default_value = "alternating")]
    pub rule: String,
    #[arg(long, default_value_t = 3.0)]
    pub snr: f64,
    /// Output prefix; files are <prefix>_X.csv, _y.csv, _beta.csv and _meta.json.
    #[arg(long, default_value = "sim")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Meta<'a> {
    schema: u32,
    n: usize,
    p: usize,
    rho: f64,
    rule: &'a str,
    snr: f64,
    seed: u64,
    noise_scale: f64,
}

pub fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn run(args: &SimulateArgs, seed: u64) -> Result<(), CliError> {
    let spec = SimulationSpec {
        n: args.n,
        p: args.p,
        rho: args.rho,
        rule: parse_rule(&args.rule)?,
        snr: args.snr,
        seed,
    };
    let data = generate(&spec)?;
    io::write_matrix(&with_suffix(&args.out, "_X.csv"), "x", &data.raw_design)?;
    io::write_vector(&with_suffix(&args.out, "_y.csv"), "y", &data.raw_response)?;
    io::write_vector(&with_suffix(&args.out, "_beta.csv"), "beta", &data.beta)?;
    let meta = Meta {
        schema: 1,
        n: args.n,
        p: args.p,
        rho: args.rho,
        rule: &args.rule,
        snr: args.snr,
        seed,
        noise_scale: data.noise_scale,
    };
    io::write_json(&with_suffix(&args.out, "_meta.json"), &meta)?;
    println!("wrote {}x{} dataset to {}_*.csv (seed {seed})", args.n, args.p, args.out.display());
    Ok(())
}
