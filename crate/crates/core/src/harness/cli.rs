//! Command-line interface.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, ArgGroup, Args, Parser, Subcommand};

use super::config::{FileConfig, RunConfig, CONFIG_ENV};
use crate::taxonomy::ValidationMode;

#[derive(Debug, Parser)]
#[command(
    name = "percept-eval",
    version,
    about = "Perceptual assessment evaluation: structure-texture scoring, correlation and \
             accuracy reports, reward and GRPO simulation, data curation, leaderboards"
)]
pub struct Cli {
    /// TOML config file; CLI flags override its values.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Worker threads for per-record work (0 = one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score structure-texture annotations.
    IstaScore(IstaScoreArgs),
    /// SRCC / PLCC of predictions against ground truth.
    EvalVr(EvalVrArgs),
    /// Question-answering accuracy by domain, category and template.
    EvalVqa(EvalVqaArgs),
    /// Rating rewards for prediction / ground-truth pairs.
    Reward(RewardArgs),
    /// Evaluate the GRPO objective on recorded rollout groups.
    GrpoSim(GrpoSimArgs),
    /// Judge candidate questions and keep those passing every aspect.
    Curate(CurateArgs),
    /// Tabulate reports with best and second-best marks.
    Leaderboard(LeaderboardArgs),
}

#[derive(Debug, Args)]
pub struct IstaScoreArgs {
    /// Annotations as JSONL or a JSON array.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Lexicon override (.toml or .json).
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<ValidationMode>,
}

#[derive(Debug, Args)]
pub struct EvalVrArgs {
    /// JSONL of {id, score}.
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,
    /// JSONL of {id, score}.
    #[arg(long, value_name = "PATH")]
    pub gt: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Model label (default: prediction file stem).
    #[arg(long)]
    pub model: Option<String>,
    /// Dataset label (default: ground-truth file stem).
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalVqaArgs {
    /// JSONL of {id, domain, category, template, predicted, gold}.
    #[arg(long, value_name = "PATH")]
    pub records: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Answer matcher: canonical or exact.
    #[arg(long)]
    pub matcher: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Args)]
pub struct RewardArgs {
    /// JSONL of {id?, pred, gt}.
    #[arg(long, value_name = "PATH")]
    pub pairs: PathBuf,
    /// gaussian or threshold.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Native rating range LO,HI mapped onto 0-100.
    #[arg(long, value_parser = parse_range, value_name = "LO,HI")]
    pub range: Option<(f64, f64)>,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GrpoSimArgs {
    /// JSONL of {id?, rewards, logp_new, logp_old}.
    #[arg(long, value_name = "PATH")]
    pub groups: PathBuf,
    #[arg(long)]
    pub clip_epsilon: Option<f64>,
    #[arg(long)]
    pub kl_beta: Option<f64>,
    /// Scale each rollout's term by its reward.
    #[arg(long, action = ArgAction::Set, value_name = "BOOL")]
    pub reward_weight: Option<bool>,
    /// Compare the analytic gradient with finite differences.
    #[arg(long)]
    pub grad_check: bool,
    #[arg(long)]
    pub grad_step: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(
    ArgGroup::new("source")
        .required(true)
        .args(["scores", "judger_url", "judger_mock"])
))]
pub struct CurateArgs {
    /// JSONL of candidate questions.
    #[arg(long, value_name = "PATH")]
    pub candidates: PathBuf,
    /// Precomputed judge scores.
    #[arg(long, value_name = "PATH")]
    pub scores: Option<PathBuf>,
    /// HTTP judging endpoint.
    #[arg(long, value_name = "URL")]
    pub judger_url: Option<String>,
    /// Seeded mock judge.
    #[arg(long, value_name = "SEED")]
    pub judger_mock: Option<u64>,
    #[arg(long)]
    pub threshold: Option<u8>,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub retries: Option<u32>,
    #[arg(long)]
    pub max_in_flight: Option<usize>,
    #[arg(long)]
    pub timeout_secs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LeaderboardArgs {
    /// Report files from eval-vr or eval-vqa.
    #[arg(long, num_args = 1.., required = true, value_name = "PATH")]
    pub reports: Vec<PathBuf>,
    /// text, markdown or csv.
    #[arg(long)]
    pub format: Option<String>,
    /// srcc, plcc, combined or accuracy.
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

fn parse_mode(s: &str) -> Result<ValidationMode, String> {
    s.parse()
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got '{s}'"))?;
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| format!("'{v}': {e}"))
    };
    Ok((num(lo)?, num(hi)?))
}

/// Parses arguments, runs, and reports. Returns the process exit code:
/// 0 on success, 1 on a run error, 2 on a usage error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = FileConfig::discover(cli.config.as_deref())
        .and_then(|file| RunConfig::resolve(&cli, &file))
        .and_then(|cfg| super::run(&cfg));
    match result {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            1
        }
    }
}
