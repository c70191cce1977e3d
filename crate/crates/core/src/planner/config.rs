use serde::{Deserialize, Serialize};

use crate::{Error, Ident, Result};

/// When the sampler stops steering towards the automaton's final states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasSchedule {
    AlwaysBiased,
    /// Uniform sampling from iteration `n` on.
    SwitchToUniformAfter(usize),
    /// Uniform sampling once every bias target has been reached.
    #[default]
    SwitchOnGoalFound,
    /// Never biased.
    Uniform,
}

/// Which feasible final state the prefix tree is steered towards.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetPolicy {
    /// Feasible finals in index order, moving on after each detection.
    #[default]
    Sequential,
    /// A uniformly drawn undetected final, redrawn after each detection.
    Random,
    /// Always the named state. A state that is not a feasible final for
    /// the root leaves the tree without goals.
    Fixed(Ident),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewirePolicy {
    #[default]
    Always,
    /// Per tree: no rewiring before its first goal node appears.
    AfterFirstGoal,
    Never,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub p_rand: f64,
    pub p_new: f64,
    /// Probabilities are clamped to `[epsilon, 1 - epsilon]`.
    pub epsilon: f64,
    pub bias_schedule: BiasSchedule,
    pub target_policy: TargetPolicy,
    pub rng_seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            p_rand: 0.9,
            p_new: 0.9,
            epsilon: 0.05,
            bias_schedule: BiasSchedule::default(),
            target_policy: TargetPolicy::default(),
            rng_seed: 0,
        }
    }
}

impl SamplerConfig {
    /// Uniform sampling from the start.
    pub fn uniform(rng_seed: u64) -> Self {
        Self {
            bias_schedule: BiasSchedule::Uniform,
            rng_seed,
            ..Self::default()
        }
    }

    pub fn p_rand_clamped(&self) -> f64 {
        self.p_rand.clamp(self.epsilon, 1.0 - self.epsilon)
    }

    pub fn p_new_clamped(&self) -> f64 {
        self.p_new.clamp(self.epsilon, 1.0 - self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!("epsilon {} outside (0, 0.5)", self.epsilon)));
        }
        for (name, p) in [("p_rand", self.p_rand), ("p_new", self.p_new)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Config(format!("{name} = {p} outside (0, 1)")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub sampler: SamplerConfig,
    /// Weight of the prefix cost in `beta * j_pre + (1 - beta) * j_suf`.
    pub beta: f64,
    pub n_max_pre: usize,
    pub n_max_suf: usize,
    pub rewire: RewirePolicy,
    /// Skip extend attempts towards automaton states that cannot reach the
    /// current bias target.
    pub skip_unreachable_buchi: bool,
    /// End each tree at its first goal node.
    pub stop_at_first_goal: bool,
    /// Record the best goal cost of prefix trees as it changes.
    pub trace: bool,
    /// Wall-clock budget for a whole synthesis run.
    pub time_limit_ms: Option<u64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            sampler: SamplerConfig::default(),
            beta: 0.5,
            n_max_pre: 1000,
            n_max_suf: 1000,
            rewire: RewirePolicy::default(),
            skip_unreachable_buchi: false,
            stop_at_first_goal: false,
            trace: false,
            time_limit_ms: None,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("beta = {} outside [0, 1]", self.beta)));
        }
        self.sampler.validate()
    }
}
