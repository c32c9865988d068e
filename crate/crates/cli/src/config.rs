//! Experiment configuration, parsed from the command line.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Slide attack against a planted key. Reads --d.
    Slide,
    /// One-round distinguisher, cipher vs random permutation of G².
    Feistel1,
    /// Two-round distinguisher.
    Feistel2,
    /// Three-round chosen-ciphertext distinguisher.
    Feistel3,
    /// Three-round distinguisher against Ψ vs random. Reads --qc --qf --qg.
    PsiAdvantage,
    /// Slide-relation distinguisher against Even-Mansour vs random. Reads --d --s --t.
    EmAdvantage,
    /// Existential forgery through the slide attack. Reads --d --s --t.
    Efp,
    /// Cracking a challenge through the slide attack. Reads --d --s --t.
    Cp,
    /// Exhaustive X/X′ and R/R′ comparison over all scripts of length 1 and 2.
    GameEquivalence,
    /// Monte Carlo rates of BadG and Bad. Reads --qc --qf --qg.
    BadEventRate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// One experiment run. The report echoes this with defaults filled in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Parser)]
#[command(name = "grouplab", version, about = "Finite-group cipher experiments")]
pub struct ExperimentConfig {
    /// zmod:<n>, xor:<n>, sym:<m>, dihedral:<m> or prod:(<spec>,<spec>)
    #[arg(long)]
    pub group: String,
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// Trials or samples; for game-equivalence, the number of scripts.
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub qc: Option<u64>,
    #[arg(long)]
    pub qf: Option<u64>,
    #[arg(long)]
    pub qg: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl ExperimentConfig {
    /// Minimal config; every optional flag unset.
    pub fn new(group: &str, experiment: Experiment, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            group: group.to_string(),
            experiment,
            trials,
            seed,
            qc: None,
            qf: None,
            qg: None,
            s: None,
            t: None,
            d: None,
            out: None,
            format: Format::Json,
        }
    }

    pub fn group(&self) -> Result<grouplab::Group, CliError> {
        grouplab::Group::parse(&self.group).map_err(|e| CliError::config("group", e.to_string()))
    }
}
