use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::PlannerConfig;
use super::construct::{construct_tree_until, TreeBuilder, TreeOutcome};
use super::problem::Problem;
use super::tree::{Mode, ProductState};
use crate::automaton::Nba;
use crate::model::Team;
use crate::Result;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub iters_pre: usize,
    pub iters_suf: usize,
    pub tree_pre: usize,
    pub tree_suf: usize,
    pub wall_ms_pre: f64,
    pub wall_ms_suf: f64,
}

/// Prefix–suffix plan. The suffix starts at the last prefix state and
/// closes back to its own first state; a one-state suffix loops in place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub prefix: Vec<ProductState>,
    pub suffix: Vec<ProductState>,
    pub j_pre: f64,
    pub j_suf: f64,
    pub beta: f64,
    pub j_total: f64,
    #[serde(default)]
    pub stats: PlanStats,
}

impl Plan {
    pub fn new(prefix: Vec<ProductState>, suffix: Vec<ProductState>, j_pre: f64, j_suf: f64, beta: f64) -> Self {
        Self {
            prefix,
            suffix,
            j_pre,
            j_suf,
            beta,
            j_total: beta * j_pre + (1.0 - beta) * j_suf,
            stats: PlanStats::default(),
        }
    }

    /// Plan with region and automaton state names in place of indices.
    pub fn to_json(&self, team: &Team, nba: &Nba) -> Value {
        let states = |seq: &[ProductState]| -> Vec<Value> {
            seq.iter()
                .map(|q| json!({"pts": team.state_names(&q.pts), "buchi": nba.name(q.buchi)}))
                .collect()
        };
        json!({
            "beta": self.beta,
            "j_pre": self.j_pre,
            "j_suf": self.j_suf,
            "j_total": self.j_total,
            "prefix": states(&self.prefix),
            "suffix": states(&self.suffix),
            "stats": self.stats,
        })
    }
}

/// Result of [`synthesize`].
#[derive(Clone, Debug, Default)]
pub struct Synthesis {
    pub plan: Option<Plan>,
    /// Initial automaton states with at least one feasible final.
    pub feasible_roots: usize,
    /// Suffix trees built, over all initial states.
    pub suffix_trees: usize,
    /// Sampler iterations over all trees.
    pub total_iters: usize,
    pub wall: Duration,
    /// Some tree was cut short by the time limit.
    pub timed_out: bool,
}

/// RNG for tree `tree` of initial state `root`: tree 0 is the prefix tree,
/// tree `k + 1` the suffix tree of the `k`-th goal.
pub fn tree_rng(seed: u64, root: usize, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((root as u64) << 40) | tree as u64);
    rng
}

/// Sampling-based prefix–suffix synthesis. For every initial automaton
/// state with a feasible final, grows a prefix tree, then for its goal
/// nodes in order of cost either closes a zero-cost loop or grows a suffix
/// tree back to the goal. The plan minimizing
/// `beta * j_pre + (1 - beta) * j_suf` wins; goals whose prefix alone
/// cannot beat the best plan so far are skipped.
///
/// With `stop_at_first_goal` the prefix tree pauses at each new goal and
/// resumes only when none of its goals closes into a plan.
pub fn synthesize(team: &Team, nba: &Nba, cfg: &PlannerConfig) -> Result<Synthesis> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let deadline = cfg.time_limit_ms.map(|ms| start + Duration::from_millis(ms));
    let problem = Problem::new(team, nba)?;
    let beta = cfg.beta;
    let early = cfg.stop_at_first_goal;
    let mut out = Synthesis::default();
    let mut best: Option<Plan> = None;
    let seed = cfg.sampler.rng_seed;

    for (k, &q0) in problem.nba().initial().iter().enumerate() {
        if problem.feasible_finals(q0).is_empty() {
            continue;
        }
        out.feasible_roots += 1;
        let root = ProductState::new(team.initial_state(), q0);
        let mut rng = tree_rng(seed, k, 0);
        let mut pre = TreeBuilder::new(&problem, &root, Mode::Prefix, cfg, &mut rng)?;
        let mut tried = 0;
        'grow: loop {
            if !(early && pre.goals().len() > tried) {
                pre.run(cfg.n_max_pre, deadline, early, &mut rng);
                out.timed_out |= pre.timed_out();
            }
            let mut fresh: Vec<usize> = (tried..pre.goals().len()).collect();
            tried = pre.goals().len();
            let cost = |gi: usize| pre.tree().cost(pre.goals()[gi].node);
            fresh.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)));

            for gi in fresh {
                let a = pre.goals()[gi].node;
                let j_pre = pre.tree().cost(a);
                if best.as_ref().is_some_and(|p| beta * j_pre >= p.j_total) {
                    break;
                }
                let qa = pre.tree().state(a);
                let trivial = team.step_weight(&qa.pts, &qa.pts) == Some(0.0)
                    && problem.enabled(qa.buchi, qa.buchi, &qa.pts);
                let (suffix, j_suf, suf): (Vec<ProductState>, f64, Option<TreeOutcome>) = if trivial {
                    (vec![qa.clone()], 0.0, None)
                } else {
                    let suf = construct_tree_until(
                        &problem,
                        &qa,
                        Mode::Suffix,
                        cfg.n_max_suf,
                        cfg,
                        &mut tree_rng(seed, k, gi + 1),
                        deadline,
                    )?;
                    out.suffix_trees += 1;
                    out.total_iters += suf.iterations;
                    out.timed_out |= suf.timed_out;
                    let Some((g, v)) = suf.best_goal() else {
                        continue;
                    };
                    (suf.tree.find_path(g.node)?, v, Some(suf))
                };
                let mut plan = Plan::new(pre.tree().find_path(a)?, suffix, j_pre, j_suf, beta);
                plan.stats = PlanStats {
                    iters_pre: pre.iterations(),
                    iters_suf: suf.as_ref().map_or(0, |s| s.iterations),
                    tree_pre: pre.tree().len(),
                    tree_suf: suf.as_ref().map_or(1, |s| s.tree.len()),
                    wall_ms_pre: pre.wall().as_secs_f64() * 1e3,
                    wall_ms_suf: suf.as_ref().map_or(0.0, |s| s.wall.as_secs_f64() * 1e3),
                };
                if best.as_ref().is_none_or(|b| plan.j_total < b.j_total) {
                    best = Some(plan);
                }
                if early {
                    break 'grow;
                }
            }
            if !early || pre.iterations() >= cfg.n_max_pre || pre.timed_out() {
                break;
            }
        }
        out.total_iters += pre.iterations();
        if early && best.is_some() {
            break;
        }
    }
    out.plan = best;
    out.wall = start.elapsed();
    Ok(out)
}
