use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use pnmf_core::synth::{generate, SynthSpec};

use crate::io::{self, numbered};
use crate::manifest::{self, TOOL_VERSION};

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// Generator parameters as JSON (see the README for the schema).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory for X.csv, truth.csv, spec.json and report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct SynthReport {
    command: &'static str,
    tool_version: &'static str,
    input_digest: String,
    seed: u64,
    archetypes: usize,
    samples: usize,
    variables: usize,
    noise_sigma: f64,
}

pub fn run(args: &SynthArgs) -> Result<()> {
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("cannot read {}", args.spec.display()))?;
    let spec: SynthSpec = serde_json::from_str(&text)
        .with_context(|| format!("{}: invalid generator spec", args.spec.display()))?;
    let input_digest = manifest::file_digest(&args.spec)?;

    let data = generate(&spec)?;
    let n = data.x.rows();
    let p = data.x.cols();
    let sample_ids = numbered("s", n);

    io::save_csv(
        &args.out.join("X.csv"),
        &data.x,
        "sample",
        &sample_ids,
        &numbered("v", p),
    )?;

    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(["sample", "label"])?;
        for (id, label) in sample_ids.iter().zip(&data.true_labels) {
            writer.write_record([id.as_str(), &label.to_string()])?;
        }
        writer.flush()?;
    }
    io::write_atomic(&args.out.join("truth.csv"), &buffer)?;

    // Echo of the parsed spec with every default materialized.
    let mut echo = serde_json::to_vec_pretty(&spec)?;
    echo.push(b'\n');
    io::write_atomic(&args.out.join("spec.json"), &echo)?;

    let json = SynthReport {
        command: "synth",
        tool_version: TOOL_VERSION,
        input_digest,
        seed: spec.seed,
        archetypes: spec.rank(),
        samples: n,
        variables: p,
        noise_sigma: spec.noise_sigma,
    };
    io::write_atomic(&args.out.join("report.json"), &manifest::to_json_bytes(&json)?)?;
    Ok(())
}
