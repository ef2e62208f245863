//! Batch tool tying the modules together: input loading, subcommand
//! dispatch, atomic report writing and leaderboard rendering.

pub mod cli;
pub mod config;
pub mod io;
pub mod leaderboard;

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::annotation::{parse_annotation, validate_annotation, AnnotationError};
use crate::curation::{
    judge_all, judgers, reject_sample, CandidateQA, CurationError, JudgerParams, JudgerScores,
    RawJudgment,
};
use crate::grpo::{evaluate, gradient_check, GrpoError, Rollout, RolloutGroup};
use crate::ista_score::{score_image, IstaScore, ScoreError};
use crate::metrics::{
    accuracy_breakdown, combined_vr, format_percent, plcc, srcc, EvalRecord, MetricsError, Tally,
    VrSeries,
};
use crate::registry::RegistryError;
use crate::rewards::{answer_matchers, map_to_score_range, rating_rewards, RatingPair, RewardError};
use crate::taxonomy::{default_lexicon, Lexicon, TaxonomyError};

use config::{
    CurateConfig, EvalVqaConfig, EvalVrConfig, GrpoSimConfig, IstaScoreConfig, LeaderboardConfig,
    RewardRunConfig, RunConfig, ScoreSource,
};
use io::{fixed, format_significant, significant6, write_atomic, write_atomic_all, Line};
use leaderboard::{render_leaderboard, CellFormat, LeaderboardTable};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: {source}", path.display())]
    Annotation {
        path: PathBuf,
        line: usize,
        source: AnnotationError,
    },
    #[error("{}:{line} ({id}): {source}", path.display())]
    Score {
        path: PathBuf,
        line: usize,
        id: String,
        source: ScoreError,
    },
    #[error("{context}: {source}")]
    Metrics {
        context: String,
        source: MetricsError,
    },
    #[error("{}:{line}: {source}", path.display())]
    Reward {
        path: PathBuf,
        line: usize,
        source: RewardError,
    },
    #[error("{}:{line} ({id}): {source}", path.display())]
    Grpo {
        path: PathBuf,
        line: usize,
        id: String,
        source: GrpoError,
    },
    #[error(transparent)]
    Curation(#[from] CurationError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}:{line} ({id}): {}", path.display(), findings.join("; "))]
    Validation {
        path: PathBuf,
        line: usize,
        id: String,
        findings: Vec<String>,
    },
}

fn variant_name<E: Debug>(e: &E) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or_default()
        .to_string()
}

impl HarnessError {
    /// Short machine-readable error class, e.g. `ZeroVariance` or `Parse`.
    pub fn kind(&self) -> String {
        match self {
            HarnessError::Io { .. } => "Io".into(),
            HarnessError::Parse { .. } => "Parse".into(),
            HarnessError::Annotation { source, .. } => variant_name(source),
            HarnessError::Score { source, .. } => variant_name(source),
            HarnessError::Metrics { source, .. } => variant_name(source),
            HarnessError::Reward { source, .. } => variant_name(source),
            HarnessError::Grpo { source, .. } => variant_name(source),
            HarnessError::Curation(e) => variant_name(e),
            HarnessError::Registry(e) => variant_name(e),
            HarnessError::Taxonomy(e) => variant_name(e),
            HarnessError::Config(_) => "Config".into(),
            HarnessError::Validation { .. } => "Validation".into(),
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            HarnessError::Annotation { .. } | HarnessError::Validation { .. } => "annotation",
            HarnessError::Score { .. } => "ista_score",
            HarnessError::Metrics { .. } => "metrics",
            HarnessError::Reward { .. } => "rewards",
            HarnessError::Grpo { .. } => "grpo",
            HarnessError::Curation(_) => "curation",
            HarnessError::Taxonomy(_) => "taxonomy",
            HarnessError::Io { .. }
            | HarnessError::Parse { .. }
            | HarnessError::Registry(_)
            | HarnessError::Config(_) => "harness",
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "status": "error",
            "kind": self.kind(),
            "module": self.module(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

/// Runs a configured subcommand and returns its summary.
pub fn run(cfg: &RunConfig) -> Result<Value, HarnessError> {
    cfg.validate()?;
    let workers = cfg.workers;
    match &cfg.command {
        config::CommandConfig::IstaScore(c) => ista_score(c, workers),
        config::CommandConfig::EvalVr(c) => eval_vr(c),
        config::CommandConfig::EvalVqa(c) => eval_vqa(c),
        config::CommandConfig::Reward(c) => reward(c, workers),
        config::CommandConfig::GrpoSim(c) => grpo_sim(c, workers),
        config::CommandConfig::Curate(c) => curate(c),
        config::CommandConfig::Leaderboard(c) => leaderboard_cmd(c),
    }
}

/// Maps `f` over `items` on `workers` threads (0 = rayon default),
/// preserving input order.
fn par_map<T, R, F>(workers: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(f).collect())
}

fn to_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report values serialize");
    s.push('\n');
    s
}

fn to_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s.into_bytes()
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("formatted numbers are valid JSON")
}

/// A formatted number as a summary value.
fn num(text: &RawValue) -> Value {
    serde_json::from_str(text.get()).unwrap_or(Value::Null)
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// ista-score

#[derive(Serialize)]
struct IstaRecord {
    id: String,
    #[serde(flatten)]
    score: IstaScore,
}

struct ScoredDoc {
    record: IstaRecord,
    warnings: Vec<String>,
    notes: Vec<String>,
}

fn ista_score(cfg: &IstaScoreConfig, workers: usize) -> Result<Value, HarnessError> {
    let lexicon = match &cfg.lexicon {
        Some(p) => Lexicon::from_file(p)?,
        None => default_lexicon(),
    };
    let text = io::read_text(&cfg.input)?;
    let docs = io::split_documents(&text, &cfg.input)?;
    let path = &cfg.input;

    let results = par_map(workers, &docs, |(line, doc)| {
        let line = *line;
        let ann = parse_annotation(doc.as_bytes()).map_err(|source| HarnessError::Annotation {
            path: path.clone(),
            line,
            source,
        })?;
        let id = ann
            .id()
            .map(str::to_string)
            .unwrap_or_else(|| format!("line-{line}"));
        let report = validate_annotation(&ann, &lexicon, cfg.mode);
        if !report.errors.is_empty() {
            return Err(HarnessError::Validation {
                path: path.clone(),
                line,
                id,
                findings: report.errors,
            });
        }
        let score = score_image(&ann, &lexicon).map_err(|source| HarnessError::Score {
            path: path.clone(),
            line,
            id: id.clone(),
            source,
        })?;
        Ok(ScoredDoc {
            record: IstaRecord { id, score },
            warnings: report.warnings,
            notes: report.notes,
        })
    });

    let mut out = String::new();
    let mut warnings = 0;
    for ((line, _), result) in docs.iter().zip(results) {
        let doc = result?;
        for w in &doc.warnings {
            log::warn!("{}:{line} ({}): {w}", path.display(), doc.record.id);
        }
        for n in &doc.notes {
            log::info!("{}:{line} ({}): {n}", path.display(), doc.record.id);
        }
        warnings += doc.warnings.len();
        out.push_str(&to_line(&doc.record));
    }
    write_atomic(&cfg.output, out.as_bytes())?;
    Ok(json!({
        "status": "ok",
        "command": "ista-score",
        "records": docs.len(),
        "warnings": warnings,
        "output": path_str(&cfg.output),
    }))
}

// ---------------------------------------------------------------------------
// eval-vr

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreRecord {
    id: String,
    #[serde(alias = "pred", alias = "mos", alias = "gt")]
    score: f64,
}

fn load_scores(path: &Path) -> Result<Vec<Line<ScoreRecord>>, HarnessError> {
    let rows: Vec<Line<ScoreRecord>> = io::load_jsonl(path)?;
    let mut seen = HashSet::new();
    for row in &rows {
        if !seen.insert(row.value.id.as_str()) {
            return Err(parse_err(
                path,
                row.line,
                format!("duplicate id '{}'", row.value.id),
            ));
        }
        if !row.value.score.is_finite() {
            return Err(parse_err(path, row.line, "score is not finite"));
        }
    }
    Ok(rows)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Serialize)]
struct VrReport {
    model: String,
    dataset: String,
    n: usize,
    srcc: Box<RawValue>,
    plcc: Box<RawValue>,
    combined: Box<RawValue>,
}

fn eval_vr(cfg: &EvalVrConfig) -> Result<Value, HarnessError> {
    let preds = load_scores(&cfg.pred)?;
    let gts = load_scores(&cfg.gt)?;
    let gt_by_id: HashMap<&str, f64> = gts
        .iter()
        .map(|r| (r.value.id.as_str(), r.value.score))
        .collect();
    let pred_ids: HashSet<&str> = preds.iter().map(|r| r.value.id.as_str()).collect();
    if let Some(orphan) = gts.iter().find(|r| !pred_ids.contains(r.value.id.as_str())) {
        return Err(parse_err(
            &cfg.gt,
            orphan.line,
            format!("no prediction for id '{}'", orphan.value.id),
        ));
    }
    let mut p = Vec::with_capacity(preds.len());
    let mut g = Vec::with_capacity(preds.len());
    for row in &preds {
        let gt = gt_by_id.get(row.value.id.as_str()).ok_or_else(|| {
            parse_err(
                &cfg.pred,
                row.line,
                format!("no ground truth for id '{}'", row.value.id),
            )
        })?;
        p.push(row.value.score);
        g.push(*gt);
    }
    let context = format!("{} vs {}", cfg.pred.display(), cfg.gt.display());
    let metrics_err = |source| HarnessError::Metrics {
        context: context.clone(),
        source,
    };
    let series = VrSeries::new(p, g).map_err(metrics_err)?;
    let s = srcc(&series).map_err(metrics_err)?;
    let l = plcc(&series).map_err(metrics_err)?;
    let report = VrReport {
        model: cfg.model.clone().unwrap_or_else(|| file_stem(&cfg.pred)),
        dataset: cfg.dataset.clone().unwrap_or_else(|| file_stem(&cfg.gt)),
        n: series.len(),
        srcc: fixed(s, 4),
        plcc: fixed(l, 4),
        combined: fixed(combined_vr(s, l), 4),
    };
    write_atomic(&cfg.output, &to_pretty(&report))?;
    Ok(json!({
        "status": "ok",
        "command": "eval-vr",
        "model": report.model,
        "dataset": report.dataset,
        "n": report.n,
        "srcc": num(&report.srcc),
        "plcc": num(&report.plcc),
        "combined": num(&report.combined),
        "output": path_str(&cfg.output),
    }))
}

// ---------------------------------------------------------------------------
// eval-vqa

fn tally_json(t: &Tally) -> Value {
    json!({
        "correct": t.correct,
        "total": t.total,
        "accuracy": format_percent(t.percent()),
    })
}

fn tallies_json(map: &std::collections::BTreeMap<String, Tally>) -> Value {
    Value::Object(
        map.iter()
            .map(|(k, t)| (k.clone(), tally_json(t)))
            .collect::<Map<String, Value>>(),
    )
}

fn eval_vqa(cfg: &EvalVqaConfig) -> Result<Value, HarnessError> {
    let rows: Vec<Line<EvalRecord>> = io::load_jsonl(&cfg.records)?;
    let records: Vec<EvalRecord> = rows.into_iter().map(|l| l.value).collect();
    let matcher = answer_matchers().build(&cfg.matcher, &())?;
    let report = accuracy_breakdown(&records, matcher.as_ref()).map_err(|source| {
        HarnessError::Metrics {
            context: path_str(&cfg.records),
            source,
        }
    })?;
    let doc = json!({
        "model": cfg.model.clone().unwrap_or_else(|| file_stem(&cfg.records)),
        "dataset": cfg.dataset.clone().unwrap_or_default(),
        "matcher": cfg.matcher,
        "n": report.overall.total,
        "overall": tally_json(&report.overall),
        "per_domain": tallies_json(&report.per_domain),
        "per_category": tallies_json(&report.per_category),
        "per_template": tallies_json(&report.per_template),
    });
    write_atomic(&cfg.output, &to_pretty(&doc))?;
    Ok(json!({
        "status": "ok",
        "command": "eval-vqa",
        "n": report.overall.total,
        "accuracy": format_percent(report.overall.percent()),
        "output": path_str(&cfg.output),
    }))
}

// ---------------------------------------------------------------------------
// reward

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRecord {
    #[serde(default)]
    id: Option<String>,
    pred: f64,
    gt: f64,
}

#[derive(Serialize)]
struct RewardRecord {
    id: String,
    reward: Box<RawValue>,
}

fn reward(cfg: &RewardRunConfig, workers: usize) -> Result<Value, HarnessError> {
    let rows: Vec<Line<PairRecord>> = io::load_jsonl(&cfg.pairs)?;
    let strategy = rating_rewards().build(&cfg.mode, &cfg.reward)?;
    let path = &cfg.pairs;
    let results = par_map(workers, &rows, |row| {
        let reward_err = |source| HarnessError::Reward {
            path: path.clone(),
            line: row.line,
            source,
        };
        let (p, g) = match cfg.range {
            Some((lo, hi)) => (
                map_to_score_range(row.value.pred, lo, hi).map_err(reward_err)?,
                map_to_score_range(row.value.gt, lo, hi).map_err(reward_err)?,
            ),
            None => (row.value.pred, row.value.gt),
        };
        let pair = RatingPair::new(p, g).map_err(reward_err)?;
        Ok::<f64, HarnessError>(strategy.reward(&pair))
    });
    let mut out = String::new();
    let mut total = 0.0;
    for (row, r) in rows.iter().zip(results) {
        let r = r?;
        total += r;
        out.push_str(&to_line(&RewardRecord {
            id: row
                .value
                .id
                .clone()
                .unwrap_or_else(|| format!("line-{}", row.line)),
            reward: significant6(r),
        }));
    }
    write_atomic(&cfg.output, out.as_bytes())?;
    let mean = if rows.is_empty() {
        f64::NAN
    } else {
        total / rows.len() as f64
    };
    Ok(json!({
        "status": "ok",
        "command": "reward",
        "mode": cfg.mode,
        "records": rows.len(),
        "mean_reward": num(&significant6(mean)),
        "output": path_str(&cfg.output),
    }))
}

// ---------------------------------------------------------------------------
// grpo-sim

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupRecord {
    #[serde(default)]
    id: Option<String>,
    rewards: Vec<f64>,
    logp_new: Vec<Vec<f64>>,
    logp_old: Vec<Vec<f64>>,
}

const GRPO_DIGITS: usize = 10;

fn sig(value: f64) -> Box<RawValue> {
    raw(format_significant(value, GRPO_DIGITS))
}

fn sig_list(values: &[f64]) -> Box<RawValue> {
    let items: Vec<String> = values
        .iter()
        .map(|v| format_significant(*v, GRPO_DIGITS))
        .collect();
    raw(format!("[{}]", items.join(",")))
}

#[derive(Serialize)]
struct GradCheckRecord {
    max_relative_error: Box<RawValue>,
    max_abs_error: Box<RawValue>,
    tokens_checked: usize,
}

#[derive(Serialize)]
struct GrpoRecord {
    id: String,
    objective: Box<RawValue>,
    advantages: Box<RawValue>,
    mean_kl: Box<RawValue>,
    saturated_ratios: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    grad_check: Option<GradCheckRecord>,
}

fn grpo_sim(cfg: &GrpoSimConfig, workers: usize) -> Result<Value, HarnessError> {
    let rows: Vec<Line<GroupRecord>> = io::load_jsonl(&cfg.groups)?;
    let path = &cfg.groups;
    let results = par_map(workers, &rows, |row| {
        let g = &row.value;
        let id = g.id.clone().unwrap_or_else(|| format!("line-{}", row.line));
        if g.logp_new.len() != g.rewards.len() || g.logp_old.len() != g.rewards.len() {
            return Err(parse_err(
                path,
                row.line,
                format!(
                    "group '{id}': {} rewards, {} logp_new rows, {} logp_old rows",
                    g.rewards.len(),
                    g.logp_new.len(),
                    g.logp_old.len()
                ),
            ));
        }
        let grpo_err = |source| HarnessError::Grpo {
            path: path.clone(),
            line: row.line,
            id: id.clone(),
            source,
        };
        let rollouts = g
            .rewards
            .iter()
            .zip(&g.logp_new)
            .zip(&g.logp_old)
            .map(|((&r, new), old)| Rollout::new(new.clone(), old.clone(), r))
            .collect();
        let group = RolloutGroup::new(rollouts).map_err(grpo_err)?;
        let eval = evaluate(&group, &cfg.grpo).map_err(grpo_err)?;
        let grad_check = if cfg.grad_check {
            let check = gradient_check(&group, &cfg.grpo, cfg.grad_step).map_err(grpo_err)?;
            Some(GradCheckRecord {
                max_relative_error: sig(check.max_relative_error),
                max_abs_error: sig(check.max_abs_error),
                tokens_checked: check.tokens_checked,
            })
        } else {
            None
        };
        Ok(GrpoRecord {
            id: id.clone(),
            objective: sig(eval.objective),
            advantages: sig_list(&eval.advantages),
            mean_kl: sig(eval.mean_kl),
            saturated_ratios: eval.saturated_ratios,
            grad_check,
        })
    });
    let mut out = String::new();
    for r in results {
        out.push_str(&to_line(&r?));
    }
    write_atomic(&cfg.output, out.as_bytes())?;
    Ok(json!({
        "status": "ok",
        "command": "grpo-sim",
        "groups": rows.len(),
        "output": path_str(&cfg.output),
    }))
}

// ---------------------------------------------------------------------------
// curate

#[derive(Deserialize)]
struct ScoreLine {
    id: String,
    #[serde(flatten)]
    scores: RawJudgment,
}

fn checked_scores(id: &str, raw: RawJudgment) -> Result<JudgerScores, HarnessError> {
    let r = raw;
    JudgerScores::new([
        r.question_validity,
        r.answer_validity,
        r.reasoning_validity,
        r.criterion_relevance,
    ])
    .map_err(|message| {
        HarnessError::Curation(CurationError::MalformedJudgment {
            id: id.to_string(),
            message,
        })
    })
}

/// Scores from JSONL `{id, <four aspects>}` lines or one JSON object keyed by id.
fn load_score_file(path: &Path) -> Result<HashMap<String, JudgerScores>, HarnessError> {
    let text = io::read_text(path)?;
    let mut scores = HashMap::new();
    let looks_like_map = text.trim_start().starts_with('{')
        && serde_json::from_str::<HashMap<String, RawJudgment>>(&text).is_ok();
    if looks_like_map {
        let map: HashMap<String, RawJudgment> =
            serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
        for (id, raw) in map {
            let s = checked_scores(&id, raw)?;
            scores.insert(id, s);
        }
    } else {
        for row in io::parse_jsonl::<ScoreLine>(&text, path)? {
            let s = checked_scores(&row.value.id, row.value.scores)?;
            if scores.insert(row.value.id.clone(), s).is_some() {
                return Err(parse_err(
                    path,
                    row.line,
                    format!("duplicate id '{}'", row.value.id),
                ));
            }
        }
    }
    Ok(scores)
}

#[derive(Serialize)]
struct ScoreOut<'a> {
    id: &'a str,
    #[serde(flatten)]
    scores: RawJudgment,
}

fn curate(cfg: &CurateConfig) -> Result<Value, HarnessError> {
    let rows: Vec<Line<CandidateQA>> = io::load_jsonl(&cfg.candidates)?;
    let mut seen = HashSet::new();
    for row in &rows {
        row.value.validate()?;
        if !seen.insert(row.value.id.as_str()) {
            return Err(parse_err(
                &cfg.candidates,
                row.line,
                format!("duplicate id '{}'", row.value.id),
            ));
        }
    }
    let candidates: Vec<CandidateQA> = rows.into_iter().map(|l| l.value).collect();

    let judged_with = |name: &str, params: JudgerParams| {
        let judger = judgers().build(name, &params)?;
        let judged = judge_all(&candidates, judger.as_ref(), cfg.retries, cfg.max_in_flight);
        let mut scores = HashMap::new();
        for (c, r) in candidates.iter().zip(judged) {
            scores.insert(c.id.clone(), r?);
        }
        Ok::<_, HarnessError>(scores)
    };
    let scores: HashMap<String, JudgerScores> = match &cfg.source {
        ScoreSource::File(path) => load_score_file(path)?,
        ScoreSource::Url(url) => judged_with(
            "http",
            JudgerParams {
                url: Some(url.clone()),
                timeout: cfg.timeout,
                ..JudgerParams::default()
            },
        )?,
        ScoreSource::Mock(seed) => judged_with(
            "seeded",
            JudgerParams {
                seed: *seed,
                ..JudgerParams::default()
            },
        )?,
    };

    let partition = reject_sample(&candidates, &scores, cfg.threshold)?;
    let jsonl = |items: &[CandidateQA]| -> Vec<u8> {
        items.iter().map(to_line).collect::<String>().into_bytes()
    };
    let score_lines: String = candidates
        .iter()
        .map(|c| {
            to_line(&ScoreOut {
                id: &c.id,
                scores: scores[&c.id].into(),
            })
        })
        .collect();
    let total = candidates.len();
    let summary = json!({
        "total": total,
        "retained": partition.retained.len(),
        "rejected": partition.rejected.len(),
        "retained_fraction": num(&fixed(partition.retained_fraction(), 4)),
        "threshold": cfg.threshold,
    });
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| HarnessError::Io {
        path: cfg.out_dir.clone(),
        source,
    })?;
    write_atomic_all(&[
        (cfg.out_dir.join("retained.jsonl"), jsonl(&partition.retained)),
        (cfg.out_dir.join("rejected.jsonl"), jsonl(&partition.rejected)),
        (cfg.out_dir.join("scores.jsonl"), score_lines.into_bytes()),
        (cfg.out_dir.join("summary.json"), to_pretty(&summary)),
    ])?;
    let mut out = json!({"status": "ok", "command": "curate"});
    if let (Value::Object(o), Value::Object(s)) = (&mut out, summary) {
        o.extend(s);
        o.insert("out_dir".into(), Value::String(path_str(&cfg.out_dir)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// leaderboard

/// Report objects from a file holding one object, an array, or JSONL.
fn load_reports(path: &Path) -> Result<Vec<Line<Value>>, HarnessError> {
    let text = io::read_text(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let items: Vec<Value> =
            serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))?;
        return Ok(items
            .into_iter()
            .enumerate()
            .map(|(i, value)| Line { line: i + 1, value })
            .collect());
    }
    if let Ok(value) = serde_json::from_str::<Value>(&text) {
        return Ok(vec![Line { line: 1, value }]);
    }
    io::parse_jsonl(&text, path)
}

/// Reads the metric cell; `None` for failed reports or missing values.
fn metric_value(report: &Value, metric: &str) -> Option<f64> {
    if report.get("status").and_then(Value::as_str) == Some("failed") {
        return None;
    }
    let v = if metric == "accuracy" {
        report.get("overall").and_then(|o| o.get("accuracy"))
    } else {
        report.get(metric)
    }?;
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().trim_end_matches('%').trim().parse().ok(),
        _ => None,
    }
}

pub fn build_leaderboard(
    reports: &[PathBuf],
    metric: &str,
) -> Result<LeaderboardTable, HarnessError> {
    let mut rows: Vec<String> = Vec::new();
    let mut columns: Vec<String> = Vec::new();
    let mut cells: Vec<(usize, usize, Option<f64>)> = Vec::new();
    let mut seen = HashSet::new();
    for path in reports {
        for entry in load_reports(path)? {
            let field = |name: &str| {
                entry
                    .value
                    .get(name)
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| parse_err(path, entry.line, format!("report lacks '{name}'")))
            };
            let model = field("model")?;
            let dataset = field("dataset")?;
            if !seen.insert((model.clone(), dataset.clone())) {
                return Err(parse_err(
                    path,
                    entry.line,
                    format!("duplicate result for model '{model}' on '{dataset}'"),
                ));
            }
            let r = rows.iter().position(|m| *m == model).unwrap_or_else(|| {
                rows.push(model);
                rows.len() - 1
            });
            let c = columns
                .iter()
                .position(|d| *d == dataset)
                .unwrap_or_else(|| {
                    columns.push(dataset);
                    columns.len() - 1
                });
            cells.push((r, c, metric_value(&entry.value, metric)));
        }
    }
    let format = if metric == "accuracy" {
        CellFormat::Percent
    } else {
        CellFormat::Decimal(4)
    };
    let mut table = LeaderboardTable::new("Model", rows, columns, format);
    for (r, c, v) in cells {
        table.set(r, c, v);
    }
    Ok(table)
}

fn leaderboard_cmd(cfg: &LeaderboardConfig) -> Result<Value, HarnessError> {
    let table = build_leaderboard(&cfg.reports, &cfg.metric)?;
    let bytes = render_leaderboard(&table, &cfg.format)?;
    write_atomic(&cfg.output, &bytes)?;
    Ok(json!({
        "status": "ok",
        "command": "leaderboard",
        "models": table.rows.len(),
        "datasets": table.columns.len(),
        "format": cfg.format,
        "output": path_str(&cfg.output),
    }))
}
