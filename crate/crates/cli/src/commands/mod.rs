pub mod bench;
pub mod compare;
pub mod cv;
pub mod path;
pub mod simulate;
pub mod solve;

use crate::{Cli, CliError, Command};

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => simulate::run(&a, cli.seed),
        Command::Solve(a) => solve::run(&a, cli.seed),
        Command::Path(a) => path::run(&a, cli.seed),
        Command::Bench(a) => bench::run(&a, cli.seed),
        Command::Cv(a) => cv::run(&a, cli.seed),
        Command::Compare(a) => compare::run(&a, cli.seed),
    }
}
