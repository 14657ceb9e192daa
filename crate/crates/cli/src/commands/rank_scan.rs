use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use pnmf_core::permute::PermuteConfig;
use pnmf_core::rank_scan::{scan_with_options, ScanOptions};
use pnmf_core::solver::SolverConfig;

use crate::io;
use crate::manifest::{self, TOOL_VERSION};
use crate::svg;

#[derive(Debug, clap::Args)]
pub struct RankScanArgs {
    /// Input data CSV: header row with column names, sample ids in the
    /// first column, non-negative numeric cells.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "rank-min")]
    pub rank_min: usize,
    #[arg(long = "rank-max")]
    pub rank_max: usize,
    /// Apply the score permutation step inside each fit.
    #[arg(long)]
    pub permute: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory for volumes.csv, scree.svg and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct RankScanReport {
    command: &'static str,
    tool_version: &'static str,
    input_digest: String,
    seed: u64,
    rank_min: usize,
    rank_max: usize,
    permute: bool,
    max_iter: usize,
    tol: f64,
    init: &'static str,
    algorithm: &'static str,
    restarts: usize,
    error_slack: f64,
    drop_threshold: f64,
    ranks: Vec<usize>,
    volumes: Vec<f64>,
    drop_ratios: Vec<f64>,
    suggested_rank: usize,
}

pub fn run(args: &RankScanArgs) -> Result<()> {
    let loaded = io::load_csv(&args.input)?;
    let input_digest = manifest::file_digest(&args.input)?;

    let solver_config = SolverConfig {
        seed: args.seed,
        ..SolverConfig::default()
    };
    let permute_config = PermuteConfig::default();
    let options = ScanOptions::default();

    let report = scan_with_options(
        &loaded.matrix,
        args.rank_min,
        args.rank_max,
        &solver_config,
        args.permute.then_some(&permute_config),
        &options,
    )?;

    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(["rank", "volume", "drop_ratio"])?;
        for (i, rank) in report.ranks.iter().enumerate() {
            let ratio = if i == 0 {
                String::new()
            } else {
                format!("{}", report.drop_ratios[i - 1])
            };
            writer.write_record([
                rank.to_string(),
                format!("{}", report.volumes[i]),
                ratio,
            ])?;
        }
        writer.flush()?;
    }
    io::write_atomic(&args.out.join("volumes.csv"), &buffer)?;

    let plot = svg::scree_plot(&report.ranks, &report.volumes);
    io::write_atomic(&args.out.join("scree.svg"), plot.as_bytes())?;

    let json = RankScanReport {
        command: "rank-scan",
        tool_version: TOOL_VERSION,
        input_digest,
        seed: args.seed,
        rank_min: args.rank_min,
        rank_max: args.rank_max,
        permute: args.permute,
        max_iter: solver_config.max_outer_iterations,
        tol: solver_config.tolerance,
        init: "random-uniform",
        algorithm: "multiplicative-updates",
        restarts: options.restarts,
        error_slack: options.error_slack,
        drop_threshold: options.drop_threshold,
        ranks: report.ranks,
        volumes: report.volumes,
        drop_ratios: report.drop_ratios,
        suggested_rank: report.suggested_rank,
    };
    io::write_atomic(&args.out.join("report.json"), &manifest::to_json_bytes(&json)?)?;
    Ok(())
}
