//! `pnmf` — non-negative matrix factorization with permutation-based score
//! stabilization, elastic-distance clustering, volume-based rank estimation
//! and a ground-truth synthetic data generator.
//!
//! Exit codes: 0 on success, 1 on input or argument errors, 2 on numeric
//! degeneracy.

mod commands;
mod io;
mod manifest;
mod svg;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{cluster, factorize, rank_scan, synth};

#[derive(Parser)]
#[command(
    name = "pnmf",
    version,
    about = "Permuted non-negative matrix factorization toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a non-negative factorization and write factors, clusters and a
    /// run report.
    Factorize(factorize::FactorizeArgs),
    /// Fit every rank in a range and write the volume scree.
    RankScan(rank_scan::RankScanArgs),
    /// Cluster the samples of an existing score matrix.
    Cluster(cluster::ClusterArgs),
    /// Generate separable synthetic data with known ground truth.
    Synth(synth::SynthArgs),
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Factorize(args) => factorize::run(args),
        Command::RankScan(args) => rank_scan::run(args),
        Command::Cluster(args) => cluster::run(args),
        Command::Synth(args) => synth::run(args),
    }
}

/// Degenerate numerics exit with 2; everything else is an input error.
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<pnmf_core::Error>() {
            if matches!(core, pnmf_core::Error::DegenerateComponent { .. }) {
                return 2;
            }
        }
    }
    1
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(&cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn degenerate_components_exit_with_code_two() {
        let err = anyhow::Error::new(pnmf_core::Error::DegenerateComponent { index: 1 })
            .context("while scanning rank 3");
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn other_errors_exit_with_code_one() {
        let err = anyhow::Error::new(pnmf_core::Error::InvalidArgument("rank 0".into()));
        assert_eq!(exit_code(&err), 1);
        let plain = anyhow::anyhow!("cannot open file");
        assert_eq!(exit_code(&plain), 1);
    }
}
