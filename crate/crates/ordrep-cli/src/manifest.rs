use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Orbit,
    Analyze,
    Words,
    Construct,
    Thicken,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Check {
    GoldenGap,
    OmegaPower,
    MorphismD,
    BigOrdinal,
}

/// Run description; fields a command does not use are ignored by it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: Option<Command>,
    #[serde(default)]
    pub format: Format,
    pub output: Option<PathBuf>,

    pub x: Option<String>,
    #[serde(default)]
    pub xs: Vec<String>,
    pub set: Option<String>,
    pub limit: Option<u64>,
    pub tail_threshold: Option<usize>,

    pub word: Option<String>,
    #[serde(default)]
    pub words: Vec<String>,
    pub max_n: Option<usize>,
    pub prefix_len: Option<usize>,
    pub tail_start: Option<usize>,
    pub dump: Option<u64>,
    pub shifts: Option<u64>,
    pub fuel: Option<u64>,
    pub blocks: Option<usize>,
    pub base: Option<u32>,
    pub pairs: Option<usize>,
    pub seed: Option<u64>,

    #[serde(default)]
    pub targets: Vec<String>,
    pub thin: Option<String>,
    pub count: Option<usize>,
    pub bound: Option<u64>,
    pub theta: Option<String>,
    pub stages: Option<usize>,

    pub check: Option<Check>,
    pub h: Option<usize>,
    pub cap: Option<u64>,
    pub n_min: Option<u64>,
    pub n_max: Option<u64>,

    pub epsilon: Option<String>,
    pub min_mass: Option<usize>,
    pub merge_radius: Option<String>,
    pub precision_ceiling: Option<u32>,
}

impl RunManifest {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(format!("manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command.ok_or_else(|| CliError::Parse("no command given".into()))
    }

    /// Fields set here replace those of `self`.
    pub fn overlay(mut self, other: RunManifest) -> RunManifest {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            command, output, x, set, limit, tail_threshold, word, max_n, prefix_len, tail_start, dump, shifts, fuel,
            blocks, base, pairs, seed, thin, count, bound, theta, stages, check, h, cap, n_min, n_max, epsilon, min_mass,
            merge_radius, precision_ceiling
        );
        if other.format != Format::Json {
            self.format = other.format;
        }
        for (mine, theirs) in [(&mut self.xs, other.xs), (&mut self.words, other.words), (&mut self.targets, other.targets)] {
            if !theirs.is_empty() {
                *mine = theirs;
            }
        }
        self
    }
}
