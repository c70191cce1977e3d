use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::instances::Instance;
use crate::oracle::{build_explicit_pba, optimal_plan_exact, verify_plan, DEFAULT_CAP};
use crate::planner::{
    construct_tree, synthesize, tree_rng, BiasSchedule, Mode, PlannerConfig, Problem, ProductState, Synthesis,
};
use crate::{Error, Result};

/// Relative tolerance on plan costs when comparing against the oracle.
pub const ORACLE_TOL: f64 = 1e-9;

/// Runs `f` on every trial index on the configured pool; results come back
/// in trial order.
pub fn run_trials<T, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let body = || (0..cfg.trials).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}

fn ms(cfg: &ExperimentConfig, d: Duration) -> Option<f64> {
    cfg.timing.then_some(d.as_secs_f64() * 1e3)
}

fn with_seed(p: &PlannerConfig, seed: u64) -> PlannerConfig {
    let mut p = p.clone();
    p.sampler.rng_seed = seed;
    p
}

/// `log10 |Q_P|` for a team and an automaton with `n_buchi` states.
pub fn log10_product_size(inst: &Instance) -> f64 {
    inst.team.log10_size() + (inst.nba.len() as f64).log10()
}

/// Order of magnitude as printed in scaling tables, e.g. `10^31`.
pub fn size_exponent(log10: f64) -> String {
    format!("10^{}", log10.round() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// No initial automaton state has a feasible final.
    Infeasible,
    /// Budget spent without a plan.
    NoPlan,
    /// Time limit hit without a plan.
    Dnf,
}

impl Status {
    pub fn of(s: &Synthesis) -> Status {
        match (&s.plan, s.feasible_roots, s.timed_out) {
            (Some(_), _, _) => Status::Ok,
            (None, 0, _) => Status::Infeasible,
            (None, _, true) => Status::Dnf,
            (None, _, false) => Status::NoPlan,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub trial: usize,
    pub seed: u64,
    pub robots: usize,
    pub max_states: usize,
    pub buchi_states: usize,
    pub log10_size: String,
    pub size: String,
    pub status: Status,
    pub n_pre: usize,
    pub n_suf: usize,
    pub tree_pre: usize,
    pub tree_suf: usize,
    pub total_iters: usize,
    pub j_total: Option<f64>,
    pub wall_ms_pre: Option<f64>,
    pub wall_ms_suf: Option<f64>,
    pub wall_ms: Option<f64>,
}

/// One synthesis per instance and trial, reported like a scaling table.
pub fn run_benchmark(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for inst in instances {
        let lg = log10_product_size(inst);
        rows.extend(run_trials(cfg, |t| {
            let seed = cfg.seed(t);
            let s = synthesize(&inst.team, &inst.nba, &with_seed(&cfg.planner, seed))?;
            let stats = s.plan.as_ref().map(|p| p.stats.clone()).unwrap_or_default();
            Ok(BenchRow {
                instance: inst.name.clone(),
                trial: t,
                seed,
                robots: inst.team.len(),
                max_states: inst.team.robots().iter().map(|w| w.len()).max().unwrap_or(0),
                buchi_states: inst.nba.len(),
                log10_size: format!("{lg:.2}"),
                size: size_exponent(lg),
                status: Status::of(&s),
                n_pre: stats.iters_pre,
                n_suf: stats.iters_suf,
                tree_pre: stats.tree_pre,
                tree_suf: stats.tree_suf,
                total_iters: s.total_iters,
                j_total: s.plan.as_ref().map(|p| p.j_total),
                wall_ms_pre: cfg.timing.then_some(stats.wall_ms_pre),
                wall_ms_suf: cfg.timing.then_some(stats.wall_ms_suf),
                wall_ms: ms(cfg, s.wall),
            })
        })?);
    }
    Ok(rows)
}

/// Medians of completed benchmark trials for one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchSummary {
    pub instance: String,
    pub trials: usize,
    pub completed: usize,
    pub median_n_pre: Option<f64>,
    pub median_n_suf: Option<f64>,
    pub median_wall_ms: Option<f64>,
}

pub fn summarize_benchmark(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut names: Vec<&str> = rows.iter().map(|r| r.instance.as_str()).collect();
    names.dedup();
    names
        .into_iter()
        .map(|name| {
            let all: Vec<&BenchRow> = rows.iter().filter(|r| r.instance == name).collect();
            let done: Vec<&&BenchRow> = all.iter().filter(|r| r.status == Status::Ok).collect();
            let med = |f: &dyn Fn(&BenchRow) -> Option<f64>| median(done.iter().filter_map(|r| f(r)).collect());
            BenchSummary {
                instance: name.to_string(),
                trials: all.len(),
                completed: done.len(),
                median_n_pre: med(&|r| Some(r.n_pre as f64)),
                median_n_suf: med(&|r| Some(r.n_suf as f64)),
                median_wall_ms: med(&|r| r.wall_ms),
            }
        })
        .collect()
}

pub fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub instance: String,
    pub n_max: usize,
    pub trials: usize,
    /// Witness prefix length in transitions.
    pub k: usize,
    /// Fraction of prefix trees containing the witness's final state.
    pub pi_suc: f64,
    /// Fraction of prefix trees containing every witness state.
    pub p_y_ge_k: f64,
    /// Fraction of full syntheses with this budget returning a plan.
    pub plan_rate: f64,
}

/// Success probabilities against budget. The oracle's optimal plan supplies
/// the goal state and the witness path. Trial `t` uses the same seed at
/// every budget, so each tree extends the one grown with a smaller budget.
pub fn run_success_curve(cfg: &ExperimentConfig, inst: &Instance) -> Result<Vec<CurveRow>> {
    let pba = build_explicit_pba(&inst.team, &inst.nba, DEFAULT_CAP)?;
    let opt = optimal_plan_exact(&pba, cfg.planner.beta)
        .ok_or_else(|| Error::Config(format!("{}: no plan exists, nothing to detect", inst.name)))?;
    let witness: Vec<ProductState> = opt.prefix.clone();
    let root = witness[0].clone();
    let goal = witness.last().unwrap().clone();
    let problem = Problem::new(&inst.team, &inst.nba)?;
    let k_root = problem
        .nba()
        .initial()
        .iter()
        .position(|&q| q == root.buchi)
        .expect("witness starts at an initial state");

    // per trial, per budget: (goal hit, witness hit, plan found)
    let hits = run_trials(cfg, |t| {
        let seed = cfg.seed(t);
        cfg.n_max
            .iter()
            .map(|&n| {
                let pc = with_seed(&cfg.planner, seed);
                let tree = construct_tree(&problem, &root, Mode::Prefix, n, &pc, &mut tree_rng(seed, k_root, 0))?.tree;
                let goal_hit = tree.contains(&goal);
                let path_hit = witness.iter().all(|q| tree.contains(q));
                let mut full = pc.clone();
                full.n_max_pre = n;
                full.n_max_suf = n;
                let plan = synthesize(&inst.team, &inst.nba, &full)?.plan.is_some();
                Ok((goal_hit, path_hit, plan))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let frac = |i: usize, f: fn(&(bool, bool, bool)) -> bool| {
        hits.iter().filter(|h| f(&h[i])).count() as f64 / cfg.trials as f64
    };
    Ok(cfg
        .n_max
        .iter()
        .enumerate()
        .map(|(i, &n)| CurveRow {
            instance: inst.name.clone(),
            n_max: n,
            trials: cfg.trials,
            k: witness.len() - 1,
            pi_suc: frac(i, |h| h.0),
            p_y_ge_k: frac(i, |h| h.1),
            plan_rate: frac(i, |h| h.2),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    Biased,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasTrialRow {
    pub instance: String,
    pub arm: Arm,
    pub trial: usize,
    pub seed: u64,
    pub solved: bool,
    /// Iterations until the first plan, or all iterations spent.
    pub iters: usize,
    pub j_total: Option<f64>,
    /// Prefix length in transitions of the first plan.
    pub k: Option<usize>,
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasSummaryRow {
    pub instance: String,
    pub arm: Arm,
    pub trials: usize,
    pub solved: usize,
    /// Over solved trials only.
    pub median_iters: Option<f64>,
    /// Unsolved trials counted at the iterations they spent, a lower bound
    /// on their true value.
    pub median_iters_censored: f64,
    pub median_wall_ms: Option<f64>,
    pub mean_k: Option<f64>,
    pub best_j: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub instance: String,
    pub arm: Arm,
    pub trial: usize,
    pub iteration: usize,
    pub best_j_pre: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BiasReport {
    pub trials: Vec<BiasTrialRow>,
    pub summary: Vec<BiasSummaryRow>,
    /// Filled when the planner config asks for traces.
    pub trace: Vec<TraceRow>,
}

fn arm_config(p: &PlannerConfig, arm: Arm, seed: u64) -> PlannerConfig {
    let mut p = with_seed(p, seed);
    if arm == Arm::Uniform {
        p.sampler.bias_schedule = BiasSchedule::Uniform;
    }
    p
}

/// Iterations to the first plan with the configured sampler against the
/// same run with uniform sampling, trial by trial on shared seeds.
pub fn run_compare_bias(cfg: &ExperimentConfig, inst: &Instance) -> Result<BiasReport> {
    let mut report = BiasReport::default();
    for arm in [Arm::Biased, Arm::Uniform] {
        let rows = run_trials(cfg, |t| {
            let seed = cfg.seed(t);
            let mut p = arm_config(&cfg.planner, arm, seed);
            p.stop_at_first_goal = true;
            let s = synthesize(&inst.team, &inst.nba, &p)?;
            let mut trace = Vec::new();
            if cfg.planner.trace {
                let problem = Problem::new(&inst.team, &inst.nba)?;
                let p = arm_config(&cfg.planner, arm, seed);
                if let Some((k, &q0)) = problem
                    .nba()
                    .initial()
                    .iter()
                    .enumerate()
                    .find(|(_, &q)| !problem.feasible_finals(q).is_empty())
                {
                    let root = ProductState::new(inst.team.initial_state(), q0);
                    let out = construct_tree(&problem, &root, Mode::Prefix, p.n_max_pre, &p, &mut tree_rng(seed, k, 0))?;
                    trace = out
                        .trace
                        .into_iter()
                        .map(|(iteration, best_j_pre)| TraceRow {
                            instance: inst.name.clone(),
                            arm,
                            trial: t,
                            iteration,
                            best_j_pre,
                        })
                        .collect();
                }
            }
            let row = BiasTrialRow {
                instance: inst.name.clone(),
                arm,
                trial: t,
                seed,
                solved: s.plan.is_some(),
                iters: s.total_iters,
                j_total: s.plan.as_ref().map(|p| p.j_total),
                k: s.plan.as_ref().map(|p| p.prefix.len() - 1),
                wall_ms: ms(cfg, s.wall),
            };
            Ok((row, trace))
        })?;
        let solved: Vec<&BiasTrialRow> = rows.iter().map(|r| &r.0).filter(|r| r.solved).collect();
        let ks: Vec<f64> = solved.iter().filter_map(|r| r.k).map(|k| k as f64).collect();
        report.summary.push(BiasSummaryRow {
            instance: inst.name.clone(),
            arm,
            trials: rows.len(),
            solved: solved.len(),
            median_iters: median(solved.iter().map(|r| r.iters as f64).collect()),
            median_iters_censored: median(rows.iter().map(|r| r.0.iters as f64).collect()).unwrap_or(0.0),
            median_wall_ms: median(solved.iter().filter_map(|r| r.wall_ms).collect()),
            mean_k: (!ks.is_empty()).then(|| ks.iter().sum::<f64>() / ks.len() as f64),
            best_j: solved.iter().filter_map(|r| r.j_total).min_by(f64::total_cmp),
        });
        for (row, trace) in rows {
            report.trials.push(row);
            report.trace.extend(trace);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub instance: String,
    pub trial: usize,
    pub seed: u64,
    pub pba_states: usize,
    pub oracle_j: Option<f64>,
    pub synth_j: Option<f64>,
    pub abs_diff: Option<f64>,
    /// Both found no plan, or both found plans of equal cost.
    pub matched: bool,
    /// `verify_plan` on the synthesized plan; empty without one.
    pub verified: Option<bool>,
    pub total_iters: usize,
    pub wall_ms: Option<f64>,
}

/// Sampled synthesis against the exact product-graph optimum.
pub fn run_oracle_check(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for inst in instances {
        let pba = build_explicit_pba(&inst.team, &inst.nba, DEFAULT_CAP)?;
        let opt = optimal_plan_exact(&pba, cfg.planner.beta).map(|p| p.j_total);
        rows.extend(run_trials(cfg, |t| {
            let seed = cfg.seed(t);
            let s = synthesize(&inst.team, &inst.nba, &with_seed(&cfg.planner, seed))?;
            let synth_j = s.plan.as_ref().map(|p| p.j_total);
            let abs_diff = opt.zip(synth_j).map(|(a, b)| (a - b).abs());
            let matched = match (opt, synth_j) {
                (None, None) => true,
                (Some(a), Some(b)) => (a - b).abs() <= ORACLE_TOL * a.abs().max(1.0),
                _ => false,
            };
            Ok(OracleRow {
                instance: inst.name.clone(),
                trial: t,
                seed,
                pba_states: pba.len(),
                oracle_j: opt,
                synth_j,
                abs_diff,
                matched,
                verified: s.plan.as_ref().map(|p| verify_plan(p, &inst.team, &inst.nba).is_ok()),
                total_iters: s.total_iters,
                wall_ms: ms(cfg, s.wall),
            })
        })?);
    }
    Ok(rows)
}
