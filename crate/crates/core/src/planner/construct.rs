use std::time::{Duration, Instant};

use rand::Rng;

use super::config::{BiasSchedule, PlannerConfig, RewirePolicy, TargetPolicy};
use super::problem::Problem;
use super::sampler::sample;
use super::tree::{Candidate, Mode, NodeId, ProductState, Tree};
use crate::automaton::INF;
use crate::Result;

/// Goal node of a tree. In suffix mode `closing` is the weight of the team
/// move back to the root; in prefix mode it is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Goal {
    pub node: NodeId,
    pub closing: f64,
}

#[derive(Clone, Debug)]
pub struct TreeOutcome {
    pub tree: Tree,
    /// Goal nodes in order of insertion.
    pub goals: Vec<Goal>,
    /// Sampler iterations run.
    pub iterations: usize,
    /// Iteration (1-based) that produced the first goal; 0 when the root is
    /// one.
    pub first_goal_iter: Option<usize>,
    pub wall: Duration,
    /// `(iteration, best goal value)` each time the best value changed;
    /// filled only when tracing is on.
    pub trace: Vec<(usize, f64)>,
    /// Stopped by the time limit before `n_max` iterations.
    pub timed_out: bool,
}

impl TreeOutcome {
    /// Goal minimizing `cost + closing`, ties to the lowest node id.
    pub fn best_goal(&self) -> Option<(Goal, f64)> {
        let mut best: Option<(Goal, f64)> = None;
        for &g in &self.goals {
            let v = self.tree.cost(g.node) + g.closing;
            let replace = match best {
                None => true,
                Some((b, bv)) => v < bv || (v == bv && g.node < b.node),
            };
            if replace {
                best = Some((g, v));
            }
        }
        best
    }
}

struct Targets {
    finals: Vec<usize>,
    detected: Vec<bool>,
    policy: TargetPolicy,
    all_found: bool,
}

impl Targets {
    fn next(&self, rng: &mut impl Rng) -> Option<usize> {
        let open: Vec<usize> = self
            .finals
            .iter()
            .zip(&self.detected)
            .filter(|(_, &d)| !d)
            .map(|(&f, _)| f)
            .collect();
        match self.policy {
            TargetPolicy::Random if !open.is_empty() => Some(open[rng.gen_range(0..open.len())]),
            _ => open.first().copied(),
        }
    }

    /// Marks `b` detected; true when the current target has to move.
    fn detect(&mut self, b: usize, current: Option<usize>) -> bool {
        if let Some(i) = self.finals.iter().position(|&f| f == b) {
            self.detected[i] = true;
        }
        if self.detected.iter().all(|&d| d) {
            self.all_found = true;
        }
        current == Some(b) && !matches!(self.policy, TargetPolicy::Fixed(_))
    }
}

/// Grows a tree from `root` for `n_max` sampler iterations. Each drawn
/// team state is paired with every automaton state: pairs not yet in the
/// tree are added under their cheapest parent, pairs in the tree are used
/// to rewire their neighbors.
///
/// Prefix trees collect nodes at feasible final states of the root's
/// automaton state; suffix trees collect nodes with a product transition
/// back to the root.
pub fn construct_tree(
    problem: &Problem<'_>,
    root: &ProductState,
    mode: Mode,
    n_max: usize,
    cfg: &PlannerConfig,
    rng: &mut impl Rng,
) -> Result<TreeOutcome> {
    let deadline = cfg.time_limit_ms.map(|ms| Instant::now() + Duration::from_millis(ms));
    construct_tree_until(problem, root, mode, n_max, cfg, rng, deadline)
}

pub(crate) fn construct_tree_until(
    problem: &Problem<'_>,
    root: &ProductState,
    mode: Mode,
    n_max: usize,
    cfg: &PlannerConfig,
    rng: &mut impl Rng,
    deadline: Option<Instant>,
) -> Result<TreeOutcome> {
    let mut b = TreeBuilder::new(problem, root, mode, cfg, rng)?;
    if !(cfg.stop_at_first_goal && !b.goals().is_empty()) {
        b.run(n_max, deadline, cfg.stop_at_first_goal, rng);
    }
    Ok(b.finish())
}

/// [`construct_tree`] in resumable form: [`TreeBuilder::run`] may be called
/// again after it returns to keep growing the same tree.
pub struct TreeBuilder<'p, 'a> {
    problem: &'p Problem<'a>,
    cfg: &'p PlannerConfig,
    mode: Mode,
    root_pts: Vec<usize>,
    root_b: usize,
    tree: Tree,
    targets: Option<Targets>,
    target: Option<usize>,
    goals: Vec<Goal>,
    best_val: f64,
    n: usize,
    first_goal_iter: Option<usize>,
    trace: Vec<(usize, f64)>,
    timed_out: bool,
    wall: Duration,
    best_parents: Vec<Option<Candidate>>,
}

impl<'p, 'a> TreeBuilder<'p, 'a> {
    pub fn new(
        problem: &'p Problem<'a>,
        root: &ProductState,
        mode: Mode,
        cfg: &'p PlannerConfig,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let start = Instant::now();
        let tree = Tree::new(problem, root, mode)?;
        let targets = match mode {
            Mode::Prefix => {
                let finals = problem.feasible_finals(root.buchi);
                let detected = vec![false; finals.len()];
                Some(Targets {
                    finals,
                    detected,
                    policy: cfg.sampler.target_policy.clone(),
                    all_found: false,
                })
            }
            Mode::Suffix => None,
        };
        let target = match &targets {
            Some(t) => match &t.policy {
                TargetPolicy::Fixed(name) => problem.nba().index_of(name).filter(|q| t.finals.contains(q)),
                _ => t.next(rng),
            },
            None => Some(root.buchi),
        };
        let mut b = Self {
            problem,
            cfg,
            mode,
            root_pts: root.pts.0.clone(),
            root_b: root.buchi,
            tree,
            targets,
            target,
            goals: Vec::new(),
            best_val: f64::INFINITY,
            n: 0,
            first_goal_iter: None,
            trace: Vec::new(),
            timed_out: false,
            wall: Duration::ZERO,
            best_parents: Vec::new(),
        };
        if b.target.is_none() {
            // nothing to aim for: the tree stays a lone root without goals
            b.targets = None;
            b.wall = start.elapsed();
            return Ok(b);
        }
        if let (Some(t), TargetPolicy::Fixed(_)) = (&mut b.targets, &cfg.sampler.target_policy) {
            t.finals = vec![b.target.unwrap()];
            t.detected = vec![false];
        }
        b.tree.set_target(b.target, problem.dm());

        let root_goal = match mode {
            Mode::Prefix => b.is_goal_pre(b.root_b).then_some(0.0),
            Mode::Suffix => problem
                .team()
                .step_weight_slices(&b.root_pts, &b.root_pts)
                .filter(|_| b.tree.node_enables(0, b.root_b)),
        };
        if let Some(closing) = root_goal {
            b.add_goal(0, b.root_b, closing, rng);
        }
        b.wall = start.elapsed();
        Ok(b)
    }

    fn is_goal_pre(&self, b: usize) -> bool {
        self.targets.as_ref().is_some_and(|t| t.finals.contains(&b))
    }

    fn add_goal(&mut self, id: NodeId, b: usize, closing: f64, rng: &mut impl Rng) {
        self.goals.push(Goal { node: id, closing });
        if self.first_goal_iter.is_none() {
            self.first_goal_iter = Some(self.n);
        }
        let v = self.tree.cost(id) + closing;
        if v < self.best_val {
            self.best_val = v;
            if self.cfg.trace {
                self.trace.push((self.n, v));
            }
        }
        if let Some(t) = self.targets.as_mut() {
            if t.detect(b, self.target) {
                self.target = t.next(rng).or(self.target);
                self.tree.set_target(self.target, self.problem.dm());
            }
        }
    }

    /// Runs iterations until `n_max` have been spent in total, the deadline
    /// passes or, with `stop_at_goal`, an iteration adds a goal. Returns the
    /// number of goals added.
    pub fn run(&mut self, n_max: usize, deadline: Option<Instant>, stop_at_goal: bool, rng: &mut impl Rng) -> usize {
        let start = Instant::now();
        let before = self.goals.len();
        if self.targets.is_none() && self.mode == Mode::Prefix {
            return 0;
        }
        let problem = self.problem;
        let cfg = self.cfg;
        let team = problem.team();
        let nb_count = problem.n_buchi();
        while self.n < n_max {
            if self.n.is_multiple_of(64) && deadline.is_some_and(|d| Instant::now() >= d) {
                self.timed_out = true;
                break;
            }
            self.n += 1;
            let all_found = match &self.targets {
                Some(t) => t.all_found,
                None => !self.goals.is_empty(),
            };
            let biased = match cfg.sampler.bias_schedule {
                BiasSchedule::AlwaysBiased => true,
                BiasSchedule::SwitchToUniformAfter(k) => self.n <= k,
                BiasSchedule::SwitchOnGoalFound => !all_found,
                BiasSchedule::Uniform => false,
            };
            let Some(x) = sample(&self.tree, problem, &cfg.sampler, biased, rng) else {
                continue;
            };
            let rewire = match cfg.rewire {
                RewirePolicy::Always => true,
                RewirePolicy::AfterFirstGoal => !self.goals.is_empty(),
                RewirePolicy::Never => false,
            };
            let closing = match self.mode {
                Mode::Suffix => team.step_weight_slices(&x, &self.root_pts),
                Mode::Prefix => None,
            };
            let mut nbh = self.tree.neighborhood(&x, team);
            let mut dirty = true;
            let mut rewired = false;
            let mut found = false;
            for b in 0..nb_count {
                if cfg.skip_unreachable_buchi {
                    if let Some(t) = self.target {
                        if problem.dm().d(b, t) == INF && b != t {
                            continue;
                        }
                    }
                }
                let id = match nbh.pid.and_then(|p| self.tree.node_at(p, b)) {
                    Some(id) => id,
                    None => {
                        if dirty {
                            self.tree.best_parents(&nbh, &mut self.best_parents, nb_count);
                            dirty = false;
                        }
                        let best = self.best_parents[b];
                        let Some(id) = self.tree.extend_with(problem, &x, b, &mut nbh, best) else {
                            continue;
                        };
                        let goal = match self.mode {
                            Mode::Prefix => self.is_goal_pre(b).then_some(0.0),
                            Mode::Suffix => closing.filter(|_| self.tree.node_enables(id, self.root_b)),
                        };
                        if let Some(closing) = goal {
                            self.add_goal(id, b, closing, rng);
                            found = true;
                        }
                        id
                    }
                };
                if rewire && self.tree.rewire_with(id, &nbh) > 0 {
                    dirty = true;
                    rewired = true;
                }
            }
            if rewired && cfg.trace && !self.goals.is_empty() {
                let v = self
                    .goals
                    .iter()
                    .map(|g| self.tree.cost(g.node) + g.closing)
                    .fold(f64::INFINITY, f64::min);
                if v < self.best_val {
                    self.best_val = v;
                    self.trace.push((self.n, v));
                }
            }
            if found && stop_at_goal {
                break;
            }
        }
        self.wall += start.elapsed();
        self.goals.len() - before
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Goal nodes in order of insertion.
    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    pub fn iterations(&self) -> usize {
        self.n
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    pub fn wall(&self) -> Duration {
        self.wall
    }

    pub fn finish(self) -> TreeOutcome {
        TreeOutcome {
            tree: self.tree,
            goals: self.goals,
            iterations: self.n,
            first_goal_iter: self.first_goal_iter,
            wall: self.wall,
            trace: self.trace,
            timed_out: self.timed_out,
        }
    }
}
