pub mod cluster;
pub mod factorize;
pub mod rank_scan;
pub mod synth;

use pnmf_core::{ClusterRule, ScalingScheme};

/// `--scaling max|l2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScalingArg {
    Max,
    L2,
}

impl ScalingArg {
    pub fn scheme(self) -> ScalingScheme {
        match self {
            ScalingArg::Max => ScalingScheme::MaxWeight,
            ScalingArg::L2 => ScalingScheme::SumOfSquares,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalingArg::Max => "max",
            ScalingArg::L2 => "l2",
        }
    }
}

/// `--rule elastic|weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RuleArg {
    Elastic,
    Weight,
}

impl RuleArg {
    pub fn rule(self) -> ClusterRule {
        match self {
            RuleArg::Elastic => ClusterRule::MinElastic,
            RuleArg::Weight => ClusterRule::ArgmaxWeight,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleArg::Elastic => "elastic",
            RuleArg::Weight => "weight",
        }
    }
}
