use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use pnmf_core::elastic::{cluster, ClusterRule};
use pnmf_core::permute::{permuted_fit, PermuteConfig};
use pnmf_core::solver::{fit, SolverConfig};

use super::ScalingArg;
use crate::io::{self, numbered};
use crate::manifest::{self, TOOL_VERSION};

#[derive(Debug, clap::Args)]
pub struct FactorizeArgs {
    /// Input data CSV: header row with column names, sample ids in the
    /// first column, non-negative numeric cells.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of archetypes to fit.
    #[arg(long)]
    pub rank: usize,
    /// Reconcile weight and elastic-distance rankings by permuting the
    /// score matrix after each solver iteration.
    #[arg(long)]
    pub permute: bool,
    /// Scaling convention of the returned factors.
    #[arg(long, value_enum, default_value_t = ScalingArg::Max)]
    pub scaling: ScalingArg,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "max-iter", default_value_t = 500)]
    pub max_iter: usize,
    /// Relative residual change below which the fit stops.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Output directory for W.csv, H.csv, clusters.csv and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct FactorizeReport {
    command: &'static str,
    tool_version: &'static str,
    input_digest: String,
    seed: u64,
    rank: usize,
    permute: bool,
    scaling: &'static str,
    max_iter: usize,
    tol: f64,
    init: &'static str,
    algorithm: &'static str,
    permute_max_sweeps: usize,
    iterations_run: usize,
    converged: bool,
    final_error: f64,
    error_trace: Vec<f64>,
}

pub fn run(args: &FactorizeArgs) -> Result<()> {
    let loaded = io::load_csv(&args.input)?;
    let input_digest = manifest::file_digest(&args.input)?;

    let solver_config = SolverConfig {
        max_outer_iterations: args.max_iter,
        tolerance: args.tol,
        seed: args.seed,
        ..SolverConfig::default()
    };
    let permute_config = PermuteConfig::default();

    let report = if args.permute {
        permuted_fit(&loaded.matrix, args.rank, &solver_config, &permute_config)?
    } else {
        fit(&loaded.matrix, args.rank, &solver_config)?
    };
    let model = report.model.rescale(args.scaling.scheme());

    let archetype_names = numbered("a", args.rank);
    io::save_csv(
        &args.out.join("W.csv"),
        model.w(),
        "sample",
        &loaded.row_ids,
        &archetype_names,
    )?;
    io::save_csv(
        &args.out.join("H.csv"),
        model.h(),
        "archetype",
        &archetype_names,
        &loaded.col_names,
    )?;

    let by_weight = cluster(model.w(), ClusterRule::ArgmaxWeight).labels;
    let by_elastic = cluster(model.w(), ClusterRule::MinElastic).labels;
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(["sample", "argmax_weight", "min_elastic"])?;
        for (i, id) in loaded.row_ids.iter().enumerate() {
            writer.write_record([
                id.as_str(),
                &by_weight[i].to_string(),
                &by_elastic[i].to_string(),
            ])?;
        }
        writer.flush()?;
    }
    io::write_atomic(&args.out.join("clusters.csv"), &buffer)?;

    let json = FactorizeReport {
        command: "factorize",
        tool_version: TOOL_VERSION,
        input_digest,
        seed: args.seed,
        rank: args.rank,
        permute: args.permute,
        scaling: args.scaling.name(),
        max_iter: args.max_iter,
        tol: args.tol,
        init: "random-uniform",
        algorithm: "multiplicative-updates",
        permute_max_sweeps: permute_config.max_sweeps,
        iterations_run: report.iterations_run,
        converged: report.converged,
        final_error: *report.error_trace.last().unwrap_or(&f64::NAN),
        error_trace: report.error_trace.clone(),
    };
    io::write_atomic(&args.out.join("report.json"), &manifest::to_json_bytes(&json)?)?;
    Ok(())
}
