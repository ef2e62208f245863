//! Task rewards: binary answer correctness for question answering and
//! rating rewards (adaptive Gaussian, fixed threshold) for score prediction,
//! plus expected-score extraction from level-token probabilities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::Registry;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewardError {
    #[error("invalid reward config: {0}")]
    InvalidConfig(String),
    #[error("score {value} outside [0, 100] ({which})")]
    OutOfRange { which: &'static str, value: f64 },
    #[error("{probabilities} probabilities but {anchors} anchors")]
    LengthMismatch { probabilities: usize, anchors: usize },
    #[error("need at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("probability {0} at level {1} is negative or not finite")]
    InvalidProbability(f64, usize),
    #[error("all level probabilities are zero")]
    AllZeroProbabilities,
    #[error("degenerate range: hi ({hi}) must exceed lo ({lo})")]
    DegenerateRange { lo: f64, hi: f64 },
}

/// Parameters of the rating rewards.
///
/// `sigma0` and `epsilon_threshold` are in score units on the [0, 100]
/// scale. The default `sigma0 = 0.8` makes the Gaussian reward nearly
/// binary: a 10-point miss already scores around 1e-28. `alpha` has no
/// published value; 1.0 is a placeholder and should be tuned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub sigma0: f64,
    pub alpha: f64,
    pub epsilon_threshold: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            sigma0: 0.8,
            alpha: 1.0,
            epsilon_threshold: 0.8,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(RewardError::InvalidConfig(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(RewardError::InvalidConfig(format!(
                "alpha must be non-negative, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon_threshold > 0.0 && self.epsilon_threshold.is_finite()) {
            return Err(RewardError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon_threshold
            )));
        }
        Ok(())
    }
}

/// A predicted and a ground-truth score, both on [0, 100].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingPair {
    prediction: f64,
    ground_truth: f64,
}

impl RatingPair {
    pub fn new(prediction: f64, ground_truth: f64) -> Result<Self, RewardError> {
        for (which, value) in [("prediction", prediction), ("ground_truth", ground_truth)] {
            if !(0.0..=100.0).contains(&value) {
                return Err(RewardError::OutOfRange { which, value });
            }
        }
        Ok(RatingPair {
            prediction,
            ground_truth,
        })
    }

    pub fn prediction(&self) -> f64 {
        self.prediction
    }

    pub fn ground_truth(&self) -> f64 {
        self.ground_truth
    }

    pub fn abs_error(&self) -> f64 {
        (self.prediction - self.ground_truth).abs()
    }
}

/// Natural log of the adaptive Gaussian reward, `-d² / (2 σ_dyn²)`.
///
/// Unlike the reward itself this never underflows, so it stays strictly
/// decreasing in `d` over the whole score range.
pub fn log_gaussian_soft_reward(pair: &RatingPair, cfg: &RewardConfig) -> Result<f64, RewardError> {
    cfg.validate()?;
    let d = pair.abs_error();
    let sigma_dyn = cfg.sigma0 * (1.0 + cfg.alpha * d / 100.0);
    let z = d / sigma_dyn;
    Ok(-0.5 * z * z)
}

/// Adaptive Gaussian soft reward: `exp(-d² / (2 σ_dyn²))` with
/// `σ_dyn = σ0 (1 + α d / 100)` and `d = |p - g|`. Exactly 1 at `d = 0`.
pub fn gaussian_soft_reward(pair: &RatingPair, cfg: &RewardConfig) -> Result<f64, RewardError> {
    log_gaussian_soft_reward(pair, cfg).map(f64::exp)
}

/// 1 when `|p - g| < epsilon` (strict), else 0.
pub fn threshold_reward(pair: &RatingPair, epsilon: f64) -> u8 {
    u8::from(pair.abs_error() < epsilon)
}

/// Expected anchor value under the renormalized level distribution.
pub fn token_as_score(level_probabilities: &[f64], anchors: &[f64]) -> Result<f64, RewardError> {
    if level_probabilities.len() != anchors.len() {
        return Err(RewardError::LengthMismatch {
            probabilities: level_probabilities.len(),
            anchors: anchors.len(),
        });
    }
    if anchors.len() < 2 {
        return Err(RewardError::TooFewLevels(anchors.len()));
    }
    if let Some((i, &p)) = level_probabilities
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
    {
        return Err(RewardError::InvalidProbability(p, i));
    }
    let total: f64 = level_probabilities.iter().sum();
    if total <= 0.0 {
        return Err(RewardError::AllZeroProbabilities);
    }
    let weighted: f64 = level_probabilities
        .iter()
        .zip(anchors)
        .map(|(p, a)| p * a)
        .sum();
    // keep the result inside the anchor hull despite rounding
    let lo = anchors.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = anchors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((weighted / total).clamp(lo, hi))
}

/// Five evenly spaced anchors for the usual bad/poor/fair/good/excellent levels.
pub const DEFAULT_ANCHORS: [f64; 5] = [0.0, 25.0, 50.0, 75.0, 100.0];

/// Affine map of `[lo, hi]` onto `[0, 100]`, clamped.
pub fn map_to_score_range(raw: f64, lo: f64, hi: f64) -> Result<f64, RewardError> {
    if !(hi > lo) {
        return Err(RewardError::DegenerateRange { lo, hi });
    }
    Ok((100.0 * (raw - lo) / (hi - lo)).clamp(0.0, 100.0))
}

/// A reward for score prediction, selectable by name.
pub trait RatingReward: Send + Sync {
    fn name(&self) -> &'static str;
    fn reward(&self, pair: &RatingPair) -> f64;
}

pub struct GaussianSoft {
    cfg: RewardConfig,
}

impl GaussianSoft {
    pub fn new(cfg: RewardConfig) -> Result<Self, RewardError> {
        cfg.validate()?;
        Ok(GaussianSoft { cfg })
    }
}

impl RatingReward for GaussianSoft {
    fn name(&self) -> &'static str {
        "gaussian"
    }

    fn reward(&self, pair: &RatingPair) -> f64 {
        gaussian_soft_reward(pair, &self.cfg).expect("config validated at construction")
    }
}

pub struct Threshold {
    epsilon: f64,
}

impl Threshold {
    pub fn new(epsilon: f64) -> Result<Self, RewardError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(RewardError::InvalidConfig(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Threshold { epsilon })
    }
}

impl RatingReward for Threshold {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn reward(&self, pair: &RatingPair) -> f64 {
        f64::from(threshold_reward(pair, self.epsilon))
    }
}

pub fn rating_rewards() -> Registry<RewardConfig, dyn RatingReward> {
    Registry::new("reward mode")
        .with(
            "gaussian",
            "adaptive Gaussian soft reward (sigma0, alpha)",
            |cfg: &RewardConfig| {
                GaussianSoft::new(*cfg)
                    .map(|r| Box::new(r) as Box<dyn RatingReward>)
                    .map_err(|e| e.to_string())
            },
        )
        .with(
            "threshold",
            "binary reward, 1 iff |p - g| < epsilon",
            |cfg: &RewardConfig| {
                Threshold::new(cfg.epsilon_threshold)
                    .map(|r| Box::new(r) as Box<dyn RatingReward>)
                    .map_err(|e| e.to_string())
            },
        )
}

// ---------------------------------------------------------------------------
// Question answering

const ANSWER_PREFIXES: [&str; 5] = ["the answer is", "answer is", "answer", "option", "choice"];

fn strip_leading_punct(s: &str) -> &str {
    s.trim_start_matches(|c: char| !c.is_alphanumeric())
}

/// Canonical form of an answer: a single lower-case option letter when one
/// can be read off (`"B"`, `"(b) the sky"`, `"Answer: B."`), otherwise the
/// lower-cased text with punctuation folded to single spaces.
pub fn canonicalize_answer(answer: &str) -> String {
    let lowered = answer.trim().to_lowercase();
    if let Some(letter) = option_letter(&lowered) {
        return letter.to_string();
    }
    normalize_text(&lowered)
}

fn option_letter(lowered: &str) -> Option<char> {
    let mut rest = strip_leading_punct(lowered);
    'prefixes: loop {
        for prefix in ANSWER_PREFIXES {
            if let Some(after) = rest.strip_prefix(prefix) {
                let boundary = after.chars().next().is_none_or(|c| !c.is_alphanumeric());
                if boundary {
                    rest = strip_leading_punct(after);
                    continue 'prefixes;
                }
            }
        }
        break;
    }

    let mut chars = rest.chars();
    let first = chars.next()?;
    if !first.is_ascii_lowercase() {
        return None;
    }
    match chars.next() {
        None => Some(first),
        Some(')' | '.' | ':' | ']') => Some(first),
        Some(_) => {
            let core = rest.trim_end_matches(|c: char| !c.is_alphanumeric());
            (core.len() == 1).then_some(first)
        }
    }
}

fn normalize_text(s: &str) -> String {
    let mapped: String = s
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Binary question-answering reward on canonical forms.
pub fn vqa_reward(predicted: &str, gold: &str) -> u8 {
    u8::from(canonicalize_answer(predicted) == canonicalize_answer(gold))
}

/// Like [`vqa_reward`], but option texts are resolved to their letters so a
/// full option text matches its letter and vice versa. Options may carry
/// their own letter prefix (`"A. Blurry"`) or not; letters follow list order.
pub fn vqa_reward_with_options(predicted: &str, gold: &str, options: &[String]) -> u8 {
    let resolve = |answer: &str| -> String {
        let canon = canonicalize_answer(answer);
        if canon.chars().count() == 1 {
            return canon;
        }
        options
            .iter()
            .enumerate()
            .find(|(i, opt)| {
                let own = option_text(opt);
                own == canon || (*i < 26 && canonicalize_answer(opt) == canon)
            })
            .and_then(|(i, _)| char::from_u32('a' as u32 + i as u32))
            .map(|c| c.to_string())
            .unwrap_or(canon)
    };
    u8::from(resolve(predicted) == resolve(gold))
}

fn option_text(option: &str) -> String {
    let lowered = option.trim().to_lowercase();
    let body = match option_letter(&lowered) {
        Some(_) => {
            let rest = strip_leading_punct(&lowered);
            rest.get(1..).map(strip_leading_punct).unwrap_or("")
        }
        None => lowered.as_str(),
    };
    normalize_text(body)
}

/// Decides whether a predicted answer counts as correct.
pub trait AnswerMatcher: Send + Sync {
    fn name(&self) -> &'static str;
    fn is_correct(&self, predicted: &str, gold: &str) -> bool;
}

pub struct CanonicalMatcher;

impl AnswerMatcher for CanonicalMatcher {
    fn name(&self) -> &'static str {
        "canonical"
    }

    fn is_correct(&self, predicted: &str, gold: &str) -> bool {
        vqa_reward(predicted, gold) == 1
    }
}

pub struct ExactMatcher;

impl AnswerMatcher for ExactMatcher {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn is_correct(&self, predicted: &str, gold: &str) -> bool {
        predicted.trim() == gold.trim()
    }
}

pub fn answer_matchers() -> Registry<(), dyn AnswerMatcher> {
    Registry::new("answer matcher")
        .with(
            "canonical",
            "case-folded, punctuation-insensitive, option letter aware",
            |_: &()| Ok(Box::new(CanonicalMatcher) as Box<dyn AnswerMatcher>),
        )
        .with("exact", "trimmed string equality", |_: &()| {
            Ok(Box::new(ExactMatcher) as Box<dyn AnswerMatcher>)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(p: f64, g: f64) -> RatingPair {
        RatingPair::new(p, g).unwrap()
    }

    #[test]
    fn gaussian_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(gaussian_soft_reward(&pair(50.0, 50.0), &cfg).unwrap(), 1.0);

        let fixed = RewardConfig {
            alpha: 0.0,
            ..cfg
        };
        let r = gaussian_soft_reward(&pair(50.8, 50.0), &fixed).unwrap();
        assert!((r - (-0.5f64).exp()).abs() < 1e-12, "{r}");

        // sigma_dyn = 0.88, exponent -100 / 1.5488
        let r = gaussian_soft_reward(&pair(60.0, 50.0), &cfg).unwrap();
        assert!((r / 9.105257503679799e-29 - 1.0).abs() < 1e-9, "{r:e}");
    }

    #[test]
    fn invalid_configs() {
        let bad = RewardConfig {
            sigma0: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            gaussian_soft_reward(&pair(1.0, 2.0), &bad),
            Err(RewardError::InvalidConfig(_))
        ));
        assert!(RewardConfig {
            alpha: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(RatingPair::new(101.0, 0.0).is_err());
        assert!(RatingPair::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_reward(&pair(50.0, 50.5), 1.0), 1);
        assert_eq!(threshold_reward(&pair(50.0, 51.0), 1.0), 0);
    }

    #[test]
    fn token_as_score_examples() {
        let a = DEFAULT_ANCHORS;
        assert_eq!(token_as_score(&[0.0, 0.0, 0.0, 0.0, 1.0], &a).unwrap(), 100.0);
        assert_eq!(token_as_score(&[0.2; 5], &a).unwrap(), 50.0);
        let v = token_as_score(&[0.1, 0.2, 0.4, 0.2, 0.1], &a).unwrap();
        assert!((v - 50.0).abs() < 1e-12);
        assert!(matches!(
            token_as_score(&[0.5, 0.5], &a),
            Err(RewardError::LengthMismatch { .. })
        ));
        assert!(matches!(
            token_as_score(&[0.0; 5], &a),
            Err(RewardError::AllZeroProbabilities)
        ));
        assert!(token_as_score(&[1.0], &[3.0]).is_err());
    }

    #[test]
    fn score_range_mapping() {
        assert_eq!(map_to_score_range(5.0, 0.0, 10.0).unwrap(), 50.0);
        assert_eq!(map_to_score_range(0.0, 0.0, 10.0).unwrap(), 0.0);
        assert_eq!(map_to_score_range(12.0, 0.0, 10.0).unwrap(), 100.0);
        assert!(map_to_score_range(1.0, 3.0, 3.0).is_err());
    }

    #[test]
    fn canonical_answers() {
        assert_eq!(vqa_reward("B", "B"), 1);
        assert_eq!(vqa_reward("(b) the sky region", "B"), 1);
        assert_eq!(vqa_reward("A", "B"), 0);
        let fixtures = [
            ("Answer: B.", "b"),
            ("b)", "b"),
            ("[C] Blurry", "c"),
            ("  d  ", "d"),
            ("option a", "a"),
            ("a cat", "a cat"),
            ("Yes-No", "yes no"),
            ("Slight!", "slight"),
            ("answerb", "answerb"),
        ];
        for (input, want) in fixtures {
            assert_eq!(canonicalize_answer(input), want, "{input}");
        }
    }

    #[test]
    fn option_text_resolution() {
        let options: Vec<String> = ["A. Blurry", "B. Sharp", "C. Noisy"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(vqa_reward_with_options("sharp", "B", &options), 1);
        assert_eq!(vqa_reward_with_options("B", "Sharp", &options), 1);
        assert_eq!(vqa_reward_with_options("noisy", "B", &options), 0);
        let bare: Vec<String> = vec!["Blurry".into(), "Sharp".into()];
        assert_eq!(vqa_reward_with_options("blurry", "a", &bare), 1);
    }

    #[test]
    fn registries() {
        let cfg = RewardConfig::default();
        let reg = rating_rewards();
        assert_eq!(reg.names(), vec!["gaussian", "threshold"]);
        let thr = reg.build("threshold", &cfg).unwrap();
        assert_eq!(thr.reward(&pair(10.0, 10.5)), 1.0);
        assert!(reg
            .build("gaussian", &RewardConfig { sigma0: -1.0, ..cfg })
            .is_err());
        let m = answer_matchers().build("exact", &()).unwrap();
        assert!(!m.is_correct("b", "B"));
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(s in "\\PC{0,24}") {
            let once = canonicalize_answer(&s);
            prop_assert_eq!(canonicalize_answer(&once), once.clone());
        }

        #[test]
        fn canonicalize_idempotent_on_answer_like(s in "[ (\\[]{0,2}(answer|option|the answer is)?[ :\\-]{0,2}[A-Da-d][).:\\] ]{0,2}[a-z ]{0,8}") {
            let once = canonicalize_answer(&s);
            prop_assert_eq!(canonicalize_answer(&once), once.clone());
        }

        #[test]
        fn reduces_to_fixed_sigma_when_alpha_zero(p in 0.0f64..=100.0, g in 0.0f64..=100.0, s in 0.1f64..50.0) {
            let cfg = RewardConfig { sigma0: s, alpha: 0.0, epsilon_threshold: 1.0 };
            let d: f64 = (p - g).abs();
            let direct = (-(d * d) / (2.0 * s * s)).exp();
            let got = gaussian_soft_reward(&pair(p, g), &cfg).unwrap();
            prop_assert!((got - direct).abs() <= 1e-12 * direct.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn threshold_implies_gaussian_above_half(p in 0.0f64..=100.0, g in 0.0f64..=100.0, eps in 0.01f64..20.0) {
            let pr = pair(p, g);
            if threshold_reward(&pr, eps) == 1 {
                let cfg = RewardConfig {
                    sigma0: eps / (2.0 * std::f64::consts::LN_2).sqrt(),
                    alpha: 0.0,
                    epsilon_threshold: eps,
                };
                prop_assert!(gaussian_soft_reward(&pr, &cfg).unwrap() > 0.5);
            }
        }

        #[test]
        fn token_as_score_scale_invariant(
            probs in proptest::collection::vec(0.0f64..1.0, 5),
            k in 0.01f64..100.0,
        ) {
            prop_assume!(probs.iter().sum::<f64>() > 1e-6);
            let scaled: Vec<f64> = probs.iter().map(|p| p * k).collect();
            let a = token_as_score(&probs, &DEFAULT_ANCHORS).unwrap();
            let b = token_as_score(&scaled, &DEFAULT_ANCHORS).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
