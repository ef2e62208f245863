//! Run configuration: an optional TOML file merged under CLI flags.
//!
//! Precedence is CLI flag, then config file, then built-in default. The
//! file comes from `--config` or the `PERCEPT_EVAL_CONFIG` variable.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use super::cli::{Cli, Command};
use super::leaderboard::renderers;
use super::HarnessError;
use crate::curation::DEFAULT_GOOD_THRESHOLD;
use crate::grpo::GrpoConfig;
use crate::rewards::{answer_matchers, rating_rewards, RewardConfig};
use crate::taxonomy::ValidationMode;

pub const CONFIG_ENV: &str = "PERCEPT_EVAL_CONFIG";

pub const METRICS: [&str; 4] = ["srcc", "plcc", "combined", "accuracy"];

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub ista: IstaSection,
    pub reward: RewardSection,
    pub grpo: GrpoSection,
    pub curation: CurationSection,
    pub vqa: VqaSection,
    pub leaderboard: LeaderboardSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IstaSection {
    /// Relative paths resolve against the config file's directory.
    pub lexicon: Option<PathBuf>,
    pub mode: Option<ValidationMode>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardSection {
    pub mode: Option<String>,
    pub sigma0: Option<f64>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrpoSection {
    pub clip_epsilon: Option<f64>,
    pub kl_beta: Option<f64>,
    pub std_floor: Option<f64>,
    pub reward_weight: Option<bool>,
    pub grad_check: Option<bool>,
    pub grad_step: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurationSection {
    pub threshold: Option<u8>,
    pub retries: Option<u32>,
    pub max_in_flight: Option<usize>,
    pub timeout_secs: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqaSection {
    pub matcher: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeaderboardSection {
    pub format: Option<String>,
    pub metric: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, HarnessError> {
        let text = super::io::read_text(path)?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| HarnessError::Parse {
            path: path.to_path_buf(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        if let (Some(lex), Some(dir)) = (&cfg.ista.lexicon, path.parent()) {
            if lex.is_relative() {
                cfg.ista.lexicon = Some(dir.join(lex));
            }
        }
        Ok(cfg)
    }

    /// The explicit path if given, else `$PERCEPT_EVAL_CONFIG`, else defaults.
    pub fn discover(explicit: Option<&Path>) -> Result<FileConfig, HarnessError> {
        if let Some(p) = explicit {
            return FileConfig::load(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => FileConfig::load(Path::new(&p)),
            _ => Ok(FileConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Worker threads for record-level fan-out; 0 picks one per core.
    pub workers: usize,
    pub command: CommandConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandConfig {
    IstaScore(IstaScoreConfig),
    EvalVr(EvalVrConfig),
    EvalVqa(EvalVqaConfig),
    Reward(RewardRunConfig),
    GrpoSim(GrpoSimConfig),
    Curate(CurateConfig),
    Leaderboard(LeaderboardConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IstaScoreConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub mode: ValidationMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalVrConfig {
    pub pred: PathBuf,
    pub gt: PathBuf,
    pub output: PathBuf,
    pub model: Option<String>,
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalVqaConfig {
    pub records: PathBuf,
    pub output: PathBuf,
    pub matcher: String,
    pub model: Option<String>,
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardRunConfig {
    pub pairs: PathBuf,
    pub output: PathBuf,
    pub mode: String,
    pub reward: RewardConfig,
    /// Native rating scale, mapped onto 0-100 before scoring.
    pub range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrpoSimConfig {
    pub groups: PathBuf,
    pub output: PathBuf,
    pub grpo: GrpoConfig,
    pub grad_check: bool,
    pub grad_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScoreSource {
    File(PathBuf),
    Url(String),
    Mock(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurateConfig {
    pub candidates: PathBuf,
    pub source: ScoreSource,
    pub threshold: u8,
    pub out_dir: PathBuf,
    pub retries: u32,
    pub max_in_flight: usize,
    pub timeout: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardConfig {
    pub reports: Vec<PathBuf>,
    pub output: PathBuf,
    pub format: String,
    pub metric: String,
}

fn require_file(path: &Path, what: &str) -> Result<(), HarnessError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(HarnessError::Config(format!(
            "{what} '{}' does not exist or is not a file",
            path.display()
        )))
    }
}

fn require_parent(path: &Path) -> Result<(), HarnessError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(HarnessError::Config(format!(
                "output directory '{}' does not exist",
                dir.display()
            )))
        }
        _ => Ok(()),
    }
}

fn config_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(e.to_string())
}

impl RunConfig {
    /// Merges parsed CLI arguments over a config file.
    pub fn resolve(cli: &Cli, file: &FileConfig) -> Result<RunConfig, HarnessError> {
        let workers = cli.workers.or(file.workers).unwrap_or(0);
        let command = match &cli.command {
            Command::IstaScore(a) => CommandConfig::IstaScore(IstaScoreConfig {
                input: a.input.clone(),
                output: a.out.clone(),
                lexicon: a.lexicon.clone().or_else(|| file.ista.lexicon.clone()),
                mode: a.mode.or(file.ista.mode).unwrap_or_default(),
            }),
            Command::EvalVr(a) => CommandConfig::EvalVr(EvalVrConfig {
                pred: a.pred.clone(),
                gt: a.gt.clone(),
                output: a.out.clone(),
                model: a.model.clone(),
                dataset: a.dataset.clone(),
            }),
            Command::EvalVqa(a) => CommandConfig::EvalVqa(EvalVqaConfig {
                records: a.records.clone(),
                output: a.out.clone(),
                matcher: a
                    .matcher
                    .clone()
                    .or_else(|| file.vqa.matcher.clone())
                    .unwrap_or_else(|| "canonical".into()),
                model: a.model.clone(),
                dataset: a.dataset.clone(),
            }),
            Command::Reward(a) => {
                let d = RewardConfig::default();
                let f = &file.reward;
                CommandConfig::Reward(RewardRunConfig {
                    pairs: a.pairs.clone(),
                    output: a.out.clone(),
                    mode: a
                        .mode
                        .clone()
                        .or_else(|| f.mode.clone())
                        .unwrap_or_else(|| "gaussian".into()),
                    reward: RewardConfig {
                        sigma0: a.sigma0.or(f.sigma0).unwrap_or(d.sigma0),
                        alpha: a.alpha.or(f.alpha).unwrap_or(d.alpha),
                        epsilon_threshold: a.epsilon.or(f.epsilon).unwrap_or(d.epsilon_threshold),
                    },
                    range: a.range.or(f.range.map(|[lo, hi]| (lo, hi))),
                })
            }
            Command::GrpoSim(a) => {
                let d = GrpoConfig::default();
                let f = &file.grpo;
                CommandConfig::GrpoSim(GrpoSimConfig {
                    groups: a.groups.clone(),
                    output: a.out.clone(),
                    grpo: GrpoConfig {
                        clip_epsilon: a.clip_epsilon.or(f.clip_epsilon).unwrap_or(d.clip_epsilon),
                        kl_beta: a.kl_beta.or(f.kl_beta).unwrap_or(d.kl_beta),
                        advantage_std_floor: f.std_floor.unwrap_or(d.advantage_std_floor),
                        apply_reward_weight: a
                            .reward_weight
                            .or(f.reward_weight)
                            .unwrap_or(d.apply_reward_weight),
                    },
                    grad_check: a.grad_check || f.grad_check.unwrap_or(false),
                    grad_step: a.grad_step.or(f.grad_step).unwrap_or(1e-6),
                })
            }
            Command::Curate(a) => {
                let f = &file.curation;
                let source = if let Some(p) = &a.scores {
                    ScoreSource::File(p.clone())
                } else if let Some(u) = &a.judger_url {
                    ScoreSource::Url(u.clone())
                } else if let Some(seed) = a.judger_mock {
                    ScoreSource::Mock(seed)
                } else {
                    return Err(config_err(
                        "one of --scores, --judger-url or --judger-mock is required",
                    ));
                };
                let timeout = a.timeout_secs.or(f.timeout_secs).unwrap_or(30.0);
                CommandConfig::Curate(CurateConfig {
                    candidates: a.candidates.clone(),
                    source,
                    threshold: a
                        .threshold
                        .or(f.threshold)
                        .unwrap_or(DEFAULT_GOOD_THRESHOLD),
                    out_dir: a.out_dir.clone(),
                    retries: a.retries.or(f.retries).unwrap_or(3),
                    max_in_flight: a.max_in_flight.or(f.max_in_flight).unwrap_or(4),
                    timeout: Duration::try_from_secs_f64(timeout).map_err(|_| {
                        config_err(format!("timeout must be a positive number of seconds, got {timeout}"))
                    })?,
                })
            }
            Command::Leaderboard(a) => {
                let f = &file.leaderboard;
                CommandConfig::Leaderboard(LeaderboardConfig {
                    reports: a.reports.clone(),
                    output: a.out.clone(),
                    format: a
                        .format
                        .clone()
                        .or_else(|| f.format.clone())
                        .unwrap_or_else(|| "text".into()),
                    metric: a
                        .metric
                        .clone()
                        .or_else(|| f.metric.clone())
                        .unwrap_or_else(|| "combined".into()),
                })
            }
        };
        Ok(RunConfig { workers, command })
    }

    /// Input paths exist, output directories exist, numeric parameters meet
    /// their module preconditions and strategy names are registered.
    pub fn validate(&self) -> Result<(), HarnessError> {
        match &self.command {
            CommandConfig::IstaScore(c) => {
                require_file(&c.input, "input")?;
                if let Some(lex) = &c.lexicon {
                    require_file(lex, "lexicon")?;
                }
                require_parent(&c.output)
            }
            CommandConfig::EvalVr(c) => {
                require_file(&c.pred, "prediction file")?;
                require_file(&c.gt, "ground-truth file")?;
                require_parent(&c.output)
            }
            CommandConfig::EvalVqa(c) => {
                require_file(&c.records, "records file")?;
                answer_matchers().build(&c.matcher, &())?;
                require_parent(&c.output)
            }
            CommandConfig::Reward(c) => {
                require_file(&c.pairs, "pairs file")?;
                c.reward.validate().map_err(config_err)?;
                rating_rewards().build(&c.mode, &c.reward)?;
                if let Some((lo, hi)) = c.range {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(config_err(format!("invalid range {lo},{hi}")));
                    }
                }
                require_parent(&c.output)
            }
            CommandConfig::GrpoSim(c) => {
                require_file(&c.groups, "groups file")?;
                c.grpo.validate().map_err(config_err)?;
                if !(c.grad_step > 0.0 && c.grad_step.is_finite()) {
                    return Err(config_err(format!(
                        "grad step must be positive, got {}",
                        c.grad_step
                    )));
                }
                require_parent(&c.output)
            }
            CommandConfig::Curate(c) => {
                require_file(&c.candidates, "candidates file")?;
                if let ScoreSource::File(p) = &c.source {
                    require_file(p, "scores file")?;
                }
                if !(1..=5).contains(&c.threshold) {
                    return Err(config_err(format!(
                        "threshold {} outside 1..=5",
                        c.threshold
                    )));
                }
                if c.max_in_flight == 0 {
                    return Err(config_err("max-in-flight must be at least 1"));
                }
                Ok(())
            }
            CommandConfig::Leaderboard(c) => {
                if c.reports.is_empty() {
                    return Err(config_err("at least one report is required"));
                }
                for r in &c.reports {
                    require_file(r, "report")?;
                }
                renderers().build(&c.format, &())?;
                if !METRICS.contains(&c.metric.as_str()) {
                    return Err(config_err(format!(
                        "unknown metric '{}' (available: {})",
                        c.metric,
                        METRICS.join(", ")
                    )));
                }
                require_parent(&c.output)
            }
        }
    }
}
