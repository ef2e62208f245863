//! Clipped group-relative policy objective and its analytic gradient.
//!
//! The objective for one group of `G` rollouts is
//!
//! ```text
//! J = 1/Σ|oᵢ| · Σᵢ Σₜ wᵢ · min(ρₜⁱ Âᵢ, clip(ρₜⁱ, 1-ε, 1+ε) Âᵢ)  −  β · mean KL
//! ```
//!
//! where `ρ = exp(logp_new - logp_old)`, `Âᵢ` is the group-normalized reward
//! and `wᵢ = rᵢ` when `apply_reward_weight` is on (1 otherwise). The KL term
//! uses the per-token estimator `exp(Δ) - Δ - 1` with `Δ = logp_old - logp_new`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrpoError {
    #[error("group has {0} rollouts, need at least 2")]
    GroupTooSmall(usize),
    #[error("rollout {rollout}: {new} new log-probs but {old} old log-probs")]
    LengthMismatch {
        rollout: usize,
        new: usize,
        old: usize,
    },
    #[error("rollout {0} has no tokens")]
    EmptyRollout(usize),
    #[error("rollout {rollout} token {token}: log-prob {value} must be finite and <= 0")]
    InvalidLogProb {
        rollout: usize,
        token: usize,
        value: f64,
    },
    #[error("rollout {rollout}: reward {value} is not finite")]
    InvalidReward { rollout: usize, value: f64 },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub token_logprob_new: Vec<f64>,
    pub token_logprob_old: Vec<f64>,
    pub reward: f64,
}

impl Rollout {
    pub fn new(new: Vec<f64>, old: Vec<f64>, reward: f64) -> Self {
        Rollout {
            token_logprob_new: new,
            token_logprob_old: old,
            reward,
        }
    }

    pub fn len(&self) -> usize {
        self.token_logprob_new.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_logprob_new.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub rollouts: Vec<Rollout>,
}

impl RolloutGroup {
    /// Builds a group after checking every structural invariant.
    pub fn new(rollouts: Vec<Rollout>) -> Result<Self, GrpoError> {
        let group = RolloutGroup { rollouts };
        group.validate()?;
        Ok(group)
    }

    pub fn validate(&self) -> Result<(), GrpoError> {
        if self.rollouts.len() < 2 {
            return Err(GrpoError::GroupTooSmall(self.rollouts.len()));
        }
        for (i, r) in self.rollouts.iter().enumerate() {
            if r.token_logprob_new.len() != r.token_logprob_old.len() {
                return Err(GrpoError::LengthMismatch {
                    rollout: i,
                    new: r.token_logprob_new.len(),
                    old: r.token_logprob_old.len(),
                });
            }
            if r.is_empty() {
                return Err(GrpoError::EmptyRollout(i));
            }
            if !r.reward.is_finite() {
                return Err(GrpoError::InvalidReward {
                    rollout: i,
                    value: r.reward,
                });
            }
            let all = r.token_logprob_new.iter().chain(&r.token_logprob_old);
            for (t, &lp) in all.enumerate() {
                if !(lp.is_finite() && lp <= 0.0) {
                    return Err(GrpoError::InvalidLogProb {
                        rollout: i,
                        token: t % r.len(),
                        value: lp,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.rollouts.iter().map(|r| r.reward).collect()
    }

    pub fn total_tokens(&self) -> usize {
        self.rollouts.iter().map(Rollout::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrpoConfig {
    pub clip_epsilon: f64,
    pub kl_beta: f64,
    pub advantage_std_floor: f64,
    pub apply_reward_weight: bool,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        GrpoConfig {
            clip_epsilon: 0.2,
            kl_beta: 0.0,
            advantage_std_floor: 1e-8,
            apply_reward_weight: true,
        }
    }
}

impl GrpoConfig {
    pub fn validate(&self) -> Result<(), GrpoError> {
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return Err(GrpoError::InvalidConfig(format!(
                "clip_epsilon must lie in (0, 1), got {}",
                self.clip_epsilon
            )));
        }
        if !(self.kl_beta >= 0.0 && self.kl_beta.is_finite()) {
            return Err(GrpoError::InvalidConfig(format!(
                "kl_beta must be non-negative, got {}",
                self.kl_beta
            )));
        }
        if !(self.advantage_std_floor > 0.0 && self.advantage_std_floor.is_finite()) {
            return Err(GrpoError::InvalidConfig(format!(
                "advantage_std_floor must be positive, got {}",
                self.advantage_std_floor
            )));
        }
        Ok(())
    }
}

/// `(r - mean) / max(std, floor)` with the population standard deviation.
/// A group of identical rewards gets exactly zero advantages.
pub fn group_advantages_with_floor(rewards: &[f64], floor: f64) -> Result<Vec<f64>, GrpoError> {
    if rewards.len() < 2 {
        return Err(GrpoError::GroupTooSmall(rewards.len()));
    }
    if rewards.iter().all(|&r| r == rewards[0]) {
        return Ok(vec![0.0; rewards.len()]);
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let scale = var.sqrt().max(floor);
    Ok(rewards.iter().map(|r| (r - mean) / scale).collect())
}

pub fn group_advantages(rewards: &[f64]) -> Result<Vec<f64>, GrpoError> {
    group_advantages_with_floor(rewards, GrpoConfig::default().advantage_std_floor)
}

/// `exp(logp_new - logp_old)`; saturates to `+inf` on overflow.
pub fn policy_ratio(logp_new: f64, logp_old: f64) -> f64 {
    (logp_new - logp_old).exp()
}

fn clip_ratio(ratio: f64, clip_epsilon: f64) -> f64 {
    ratio.clamp(1.0 - clip_epsilon, 1.0 + clip_epsilon)
}

/// `min(ρ·A, clip(ρ, 1-ε, 1+ε)·A)`.
pub fn clipped_term(ratio: f64, advantage: f64, clip_epsilon: f64) -> f64 {
    let unclipped = ratio * advantage;
    let clipped = clip_ratio(ratio, clip_epsilon) * advantage;
    unclipped.min(clipped)
}

fn kl_estimate(logp_new: f64, logp_old: f64) -> f64 {
    let delta = logp_old - logp_new;
    delta.exp() - delta - 1.0
}

/// Objective value plus the intermediate quantities worth reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrpoEvaluation {
    pub objective: f64,
    pub advantages: Vec<f64>,
    pub mean_kl: f64,
    /// Tokens whose ratio overflowed to infinity.
    pub saturated_ratios: usize,
}

pub fn evaluate(group: &RolloutGroup, cfg: &GrpoConfig) -> Result<GrpoEvaluation, GrpoError> {
    cfg.validate()?;
    group.validate()?;
    let advantages = group_advantages_with_floor(&group.rewards(), cfg.advantage_std_floor)?;
    let total_tokens = group.total_tokens() as f64;

    let mut surrogate = 0.0;
    let mut kl = 0.0;
    let mut saturated = 0;
    for (rollout, &adv) in group.rollouts.iter().zip(&advantages) {
        let weight = if cfg.apply_reward_weight {
            rollout.reward
        } else {
            1.0
        };
        let mut sum = 0.0;
        for (&new, &old) in rollout.token_logprob_new.iter().zip(&rollout.token_logprob_old) {
            let ratio = policy_ratio(new, old);
            if ratio.is_infinite() {
                saturated += 1;
            }
            sum += clipped_term(ratio, adv, cfg.clip_epsilon);
            if cfg.kl_beta > 0.0 {
                kl += kl_estimate(new, old);
            }
        }
        surrogate += weight * sum;
    }
    let mean_kl = kl / total_tokens;
    Ok(GrpoEvaluation {
        objective: surrogate / total_tokens - cfg.kl_beta * mean_kl,
        advantages,
        mean_kl,
        saturated_ratios: saturated,
    })
}

pub fn grpo_objective(group: &RolloutGroup, cfg: &GrpoConfig) -> Result<f64, GrpoError> {
    evaluate(group, cfg).map(|e| e.objective)
}

/// ∂objective/∂logp_new for every token, shaped like the rollouts.
///
/// Where the clipped branch is strictly smaller it is constant in
/// `logp_new`, so the surrogate contributes nothing; ties go to the
/// unclipped branch.
pub fn grpo_gradient(group: &RolloutGroup, cfg: &GrpoConfig) -> Result<Vec<Vec<f64>>, GrpoError> {
    cfg.validate()?;
    group.validate()?;
    let advantages = group_advantages_with_floor(&group.rewards(), cfg.advantage_std_floor)?;
    let total_tokens = group.total_tokens() as f64;

    Ok(group
        .rollouts
        .iter()
        .zip(&advantages)
        .map(|(rollout, &adv)| {
            let weight = if cfg.apply_reward_weight {
                rollout.reward
            } else {
                1.0
            };
            rollout
                .token_logprob_new
                .iter()
                .zip(&rollout.token_logprob_old)
                .map(|(&new, &old)| {
                    let ratio = policy_ratio(new, old);
                    let unclipped = ratio * adv;
                    let clipped = clip_ratio(ratio, cfg.clip_epsilon) * adv;
                    let surrogate = if unclipped <= clipped {
                        weight * adv * ratio
                    } else {
                        0.0
                    };
                    // d/dnew [exp(old - new) - (old - new) - 1] = 1 - exp(old - new)
                    let kl = if cfg.kl_beta > 0.0 {
                        cfg.kl_beta * (1.0 - (old - new).exp())
                    } else {
                        0.0
                    };
                    (surrogate - kl) / total_tokens
                })
                .collect()
        })
        .collect())
}

/// Largest relative deviation between the analytic gradient and central
/// differences of the objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientCheck {
    pub max_relative_error: f64,
    pub max_abs_error: f64,
    pub tokens_checked: usize,
}

/// Compares [`grpo_gradient`] with central finite differences of
/// [`grpo_objective`]. Tokens with a zero analytic gradient are compared in
/// absolute terms only, since the difference quotient there is rounding noise.
pub fn gradient_check(
    group: &RolloutGroup,
    cfg: &GrpoConfig,
    step: f64,
) -> Result<GradientCheck, GrpoError> {
    let analytic = grpo_gradient(group, cfg)?;
    let mut work = group.clone();
    let mut max_rel: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut checked = 0;
    for (i, grads) in analytic.iter().enumerate() {
        for (t, &g) in grads.iter().enumerate() {
            let orig = work.rollouts[i].token_logprob_new[t];
            // stay on the valid side of log p <= 0
            let h = step.min(-orig / 2.0).max(f64::MIN_POSITIVE);
            work.rollouts[i].token_logprob_new[t] = orig + h;
            let up = grpo_objective(&work, cfg)?;
            work.rollouts[i].token_logprob_new[t] = orig - h;
            let down = grpo_objective(&work, cfg)?;
            work.rollouts[i].token_logprob_new[t] = orig;

            let fd = (up - down) / (2.0 * h);
            let abs = (fd - g).abs();
            max_abs = max_abs.max(abs);
            if g != 0.0 {
                max_rel = max_rel.max(abs / g.abs().max(fd.abs()));
            }
            checked += 1;
        }
    }
    Ok(GradientCheck {
        max_relative_error: max_rel,
        max_abs_error: max_abs,
        tokens_checked: checked,
    })
}
