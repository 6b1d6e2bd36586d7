use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use mubqct::ratemodel::{BoundsSource, DetectorProfile};
use serde::Serialize;

/// Key distribution with mutually unbiased bases: construction,
/// verification, security bounds, Monte Carlo runs and rate sweeps.
#[derive(Debug, Parser)]
#[command(name = "mubqct", version, propagate_version = true)]
pub struct Cli {
    /// Flat `key = value` file of option defaults; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the family for d = 2^k (or read one) and check it.
    #[command(args_override_self = true)]
    MubVerify(VerifyArgs),
    /// Write the family for d = 2^k in the text matrix format.
    #[command(args_override_self = true)]
    MubExport(ExportArgs),
    /// Bounds on the eavesdropper's guessing probability, as JSON.
    #[command(args_override_self = true)]
    Bounds(BoundsArgs),
    /// Key rate versus distance over a grid, as CSV.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Monte Carlo run of the protocol with one receiver.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Monte Carlo run with the copies split among several receivers.
    #[command(args_override_self = true)]
    Multiparty(MultipartyArgs),
    /// Exact reference values for small d.
    #[command(args_override_self = true)]
    Oracle(OracleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::MubVerify(_) => "mub-verify",
            Command::MubExport(_) => "mub-export",
            Command::Bounds(_) => "bounds",
            Command::Sweep(_) => "sweep",
            Command::Simulate(_) => "simulate",
            Command::Multiparty(_) => "multiparty",
            Command::Oracle(_) => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Profile {
    SnspdLab,
    IngaasField,
}

impl From<Profile> for DetectorProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::SnspdLab => DetectorProfile::SnspdLab,
            Profile::IngaasField => DetectorProfile::IngaasField,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bounds {
    Paper,
    Certified,
}

impl From<Bounds> for BoundsSource {
    fn from(b: Bounds) -> Self {
        match b {
            Bounds::Paper => BoundsSource::Paper,
            Bounds::Certified => BoundsSource::Certified,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// d = 2^k, 1 ≤ k ≤ 8.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8), required_unless_present = "input")]
    pub k: Option<u32>,
    /// Largest tolerated deviation.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Verify a family from a file written by `mub-export` instead.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
    pub k: u32,
    /// Output file; stdout if absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub d: u64,
    /// Copies per round.
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    /// Use the exact eigenvalue and Helstrom oracles (d ≤ 16).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true, action = ArgAction::Set)]
    pub d: Vec<u64>,
    /// Distance grid in km: `start:stop:step` (inclusive) or one value.
    #[arg(long = "L", value_parser = parse_grid, value_name = "A:B:STEP")]
    #[serde(rename = "L")]
    pub lengths: Grid,
    /// Comma-separated detector profiles.
    #[arg(long, value_enum, value_delimiter = ',', action = ArgAction::Set, default_value = "snspd_lab")]
    pub profile: Vec<Profile>,
    #[arg(long, value_enum, default_value = "paper")]
    pub bounds: Bounds,
    /// Fibre loss in dB/km.
    #[arg(long, default_value_t = mubqct::ratemodel::DEFAULT_ATTENUATION_DB_PER_KM)]
    pub attenuation: f64,
    /// Worker threads; all cores if absent. Output does not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=1), default_value_t = 1)]
    pub format_version: u32,
    /// Output file; stdout if absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// An inclusive arithmetic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.step == 0.0 {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl Serialize for Grid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}:{}:{}", self.start, self.stop, self.step))
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let nums: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    let g = match nums[..] {
        [x] => Grid { start: x, stop: x, step: 0.0 },
        [a, b, step] => Grid { start: a, stop: b, step },
        _ => return Err("expected `start:stop:step` or a single value".into()),
    };
    if !(g.start >= 0.0 && g.start.is_finite() && g.stop.is_finite()) {
        return Err("distances must be finite and ≥ 0".into());
    }
    if nums.len() == 3 && !(g.step > 0.0 && g.stop >= g.start) {
        return Err("need step > 0 and stop ≥ start".into());
    }
    Ok(g)
}

/// Parameters shared by `simulate`, `multiparty` and the oracle's
/// detection run.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub d: u64,
    /// Copies per round (default 1).
    #[arg(long)]
    pub m: Option<u64>,
    /// Poisson mean photon number per round, instead of `--m`.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Fibre length in km.
    #[arg(long = "L", default_value_t = 0.0)]
    #[serde(rename = "L")]
    pub length_km: f64,
    #[arg(long, default_value_t = mubqct::ratemodel::DEFAULT_ATTENUATION_DB_PER_KM)]
    pub attenuation: f64,
    #[arg(long, default_value_t = 100_000)]
    pub rounds: usize,
    #[arg(long, env = "MUBQCT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "snspd_lab")]
    pub profile: Profile,
    /// Override the profile's detector efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Override the profile's visibility.
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Override the profile's dark-count probability.
    #[arg(long)]
    pub dark_count: Option<f64>,
    /// Skip the μ + 4√μ ≤ √d check for coherent sources.
    #[arg(long)]
    pub allow_unsafe_mu: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Per-round CSV.
    #[arg(long, value_name = "FILE")]
    pub transcript: Option<PathBuf>,
    /// Summary JSON file; stdout if absent.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MultipartyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
    /// Number of receivers, at most ⌊√d⌋.
    #[arg(long)]
    pub parties: usize,
    /// Summary JSON file; stdout if absent.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    /// Dimension, at most 16.
    #[arg(long)]
    pub d: u64,
    /// Trials for the random-basis eavesdropper.
    #[arg(long, default_value_t = 200_000)]
    pub trials: u64,
    /// Rounds for the detection Monte Carlo.
    #[arg(long, default_value_t = 100_000)]
    pub rounds: usize,
    /// Copies per round in the detection Monte Carlo.
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    /// Fibre length in km for the detection Monte Carlo.
    #[arg(long = "L", default_value_t = 0.0)]
    #[serde(rename = "L")]
    pub length_km: f64,
    #[arg(long, value_enum, default_value = "snspd_lab")]
    pub profile: Profile,
    #[arg(long, env = "MUBQCT_SEED", default_value_t = 0)]
    pub seed: u64,
}
