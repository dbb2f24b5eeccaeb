use std::path::PathBuf;

use adpr_core::attest::DEFAULT_BACKEND;
use adpr_core::pipeline::DEFAULT_BATCH_SIZE;
use adpr_core::{FixedQ, NormBounds, Seed};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "adpr", version, about = "Attested differentially private linear regression")]
pub struct Cli {
    /// Output directory. Every run writes `<subcommand>.config.json` here.
    #[arg(long, global = true, env = "ADPR_OUT_DIR", default_value = "adpr-out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic CSV dataset to `<out>/data.csv`.
    GenData(GenDataArgs),
    /// Normalize a CSV and pack it to `<out>/data.blob`.
    PackData(PackDataArgs),
    /// Prove every batch, writing blobs, receipts and `progression.csv`.
    Prove(ProveArgs),
    /// Print `accept` or `reject(<reason>)`.
    Verify(VerifyArgs),
    /// Verify a prove output directory and average its batch models.
    Aggregate(AggregateArgs),
    /// OLS against the private fit over many seeds; writes `accuracy.csv`.
    Compare(CompareArgs),
    /// Prover and verifier timings over dataset sizes; writes `timing.csv`.
    Bench(BenchArgs),
}

/// `xmin,xmax,ymin,ymax` in raw units.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(into = "[f64; 4]")]
pub struct Bounds {
    pub raw: [f64; 4],
    #[serde(skip)]
    pub norm: NormBounds,
}

impl From<Bounds> for [f64; 4] {
    fn from(b: Bounds) -> Self {
        b.raw
    }
}

impl Bounds {
    pub fn from_norm(norm: NormBounds) -> Self {
        let raw = [norm.x_min.to_f64(), norm.x_max.to_f64(), norm.y_min.to_f64(), norm.y_max.to_f64()];
        Bounds { raw, norm }
    }
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [x_min, x_max, y_min, y_max] = v[..] else {
        return Err("expected four comma-separated numbers xmin,xmax,ymin,ymax".into());
    };
    let norm = NormBounds::from_f64(x_min, x_max, y_min, y_max).map_err(|e| e.to_string())?;
    Ok(Bounds { raw: [x_min, x_max, y_min, y_max], norm })
}

fn parse_eps(s: &str) -> Result<FixedQ, String> {
    let v: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    let q = FixedQ::from_f64(v).map_err(|e| e.to_string())?;
    if q.is_positive() {
        Ok(q)
    } else {
        Err("epsilon must be positive".into())
    }
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    if s.len() != 64 {
        return Err(format!("expected 64 hex characters, got {}", s.len()));
    }
    s.parse::<Seed>().map_err(|e| e.to_string())
}

fn parse_backend(s: &str) -> Result<String, String> {
    adpr_core::attest::backend(s).map(|b| b.id().to_owned()).map_err(|e| {
        let known: Vec<_> = adpr_core::attest::registered_backends().iter().map(|b| b.id()).collect();
        format!("{e}; registered: {}", known.join(", "))
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Sizes(pub Vec<u64>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let v: Vec<u64> = s
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() || v.contains(&0) {
        return Err("sizes must be positive".into());
    }
    Ok(Sizes(v))
}

fn parse_positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn eps_as_f64<S: serde::Serializer>(eps: &FixedQ, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(eps.to_f64())
}

const ZERO_SEED: &str = "0000000000000000000000000000000000000000000000000000000000000000";

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// A CSV file (needs --bounds) or a packed blob.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "age")]
    pub x_col: String,
    #[arg(long, default_value = "cost")]
    pub y_col: String,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Option<Bounds>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PrivacyArgs {
    #[arg(long, default_value = "2", value_parser = parse_eps, allow_hyphen_values = true)]
    #[serde(serialize_with = "eps_as_f64")]
    pub eps: FixedQ,
    /// Root noise seed, 64 hex characters.
    #[arg(long, default_value = ZERO_SEED, value_parser = parse_seed)]
    pub seed: Seed,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenDataArgs {
    #[arg(long, default_value_t = 50_000, value_parser = parse_positive)]
    pub n: u64,
    /// Generator RNG seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Defaults to the age/cost generator's values.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub intercept: Option<f64>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Option<Bounds>,
    #[arg(long, default_value = "age")]
    pub x_col: String,
    #[arg(long, default_value = "cost")]
    pub y_col: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PackDataArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, default_value = "age")]
    pub x_col: String,
    #[arg(long, default_value = "cost")]
    pub y_col: String,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Bounds,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub privacy: PrivacyArgs,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE, value_parser = parse_positive)]
    pub batch_size: u64,
    #[arg(long, default_value = DEFAULT_BACKEND, value_parser = parse_backend)]
    pub backend: String,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub receipt: PathBuf,
    /// The commissioned blob the receipt claims to cover.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = DEFAULT_BACKEND, value_parser = parse_backend)]
    pub backend: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AggregateArgs {
    /// Directory holding `batch-XXXX.blob` and `batch-XXXX.receipt.json` pairs.
    #[arg(long)]
    pub receipts: PathBuf,
    #[arg(long, default_value = DEFAULT_BACKEND, value_parser = parse_backend)]
    pub backend: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// Input dataset; omit to generate `--n` age/cost samples.
    #[arg(long, conflicts_with = "n")]
    pub data: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive)]
    pub n: Option<u64>,
    #[arg(long, default_value = "age")]
    pub x_col: String,
    #[arg(long, default_value = "cost")]
    pub y_col: String,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Option<Bounds>,
    #[command(flatten)]
    #[serde(flatten)]
    pub privacy: PrivacyArgs,
    #[arg(long, default_value_t = 20, value_parser = parse_positive)]
    pub seeds: u64,
    /// Generator RNG seed for `--n`.
    #[arg(long, default_value_t = 1)]
    pub data_seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value = "5000,10000,15000,20000,25000,30000,35000,40000,45000,50000", value_parser = parse_sizes)]
    pub sizes: Sizes,
    #[command(flatten)]
    #[serde(flatten)]
    pub privacy: PrivacyArgs,
    /// Omit to prove each size as one guest run.
    #[arg(long, value_parser = parse_positive)]
    pub batch_size: Option<u64>,
    #[arg(long, default_value = DEFAULT_BACKEND, value_parser = parse_backend)]
    pub backend: String,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub data_seed: u64,
}
