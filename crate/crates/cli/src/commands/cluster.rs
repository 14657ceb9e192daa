use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use pnmf_core::elastic::cluster;

use super::RuleArg;
use crate::io;
use crate::manifest::{self, TOOL_VERSION};

#[derive(Debug, clap::Args)]
pub struct ClusterArgs {
    /// Score matrix CSV, e.g. the W.csv written by `factorize`.
    #[arg(long)]
    pub w: PathBuf,
    /// Clustering rule: smallest elastic distance or largest weight.
    #[arg(long, value_enum)]
    pub rule: RuleArg,
    /// Output directory for clusters.csv and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ClusterReport {
    command: &'static str,
    tool_version: &'static str,
    input_digest: String,
    rule: &'static str,
    samples: usize,
    components: usize,
}

pub fn run(args: &ClusterArgs) -> Result<()> {
    let loaded = io::load_csv(&args.w)?;
    let input_digest = manifest::file_digest(&args.w)?;

    let assignment = cluster(&loaded.matrix, args.rule.rule());

    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(["sample", "label"])?;
        for (id, label) in loaded.row_ids.iter().zip(&assignment.labels) {
            writer.write_record([id.as_str(), &label.to_string()])?;
        }
        writer.flush()?;
    }
    io::write_atomic(&args.out.join("clusters.csv"), &buffer)?;

    let json = ClusterReport {
        command: "cluster",
        tool_version: TOOL_VERSION,
        input_digest,
        rule: args.rule.name(),
        samples: loaded.matrix.rows(),
        components: loaded.matrix.cols(),
    };
    io::write_atomic(&args.out.join("report.json"), &manifest::to_json_bytes(&json)?)?;
    Ok(())
}
