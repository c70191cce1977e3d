use rand::Rng;

use super::config::SamplerConfig;
use super::problem::Problem;
use super::tree::{Mode, NodeId, Tree};
use crate::automaton::INF;
use crate::model::{Team, TeamState, Wts};

/// Per-node probabilities `(inside D_min, outside D_min)` of the node
/// sampling density. When either set is empty the other gets all mass.
pub fn f_rand_masses(n_dmin: usize, n_total: usize, p_rand: f64) -> (f64, f64) {
    assert!(n_dmin <= n_total && n_total > 0);
    if n_dmin == 0 || n_dmin == n_total {
        let u = 1.0 / n_total as f64;
        return (u, u);
    }
    (p_rand / n_dmin as f64, (1.0 - p_rand) / (n_total - n_dmin) as f64)
}

/// Probability of drawing each tree node.
pub fn f_rand_vector(tree: &Tree, p_rand: f64) -> Vec<f64> {
    let (inside, outside) = f_rand_masses(tree.dmin().len(), tree.len(), p_rand);
    (0..tree.len())
        .map(|n| if tree.in_dmin(n) { inside } else { outside })
        .collect()
}

/// Distribution of a robot's next state from `cur`: mass `p_new` on
/// `biased` and the rest spread evenly over the other successors, or
/// uniform without a biased state.
pub fn f_new_vector(wts: &Wts, cur: usize, biased: Option<usize>, p_new: f64) -> Vec<(usize, f64)> {
    let succ = wts.successors(cur);
    let n = succ.len();
    match biased {
        Some(_) if n == 1 => vec![(succ[0].0, 1.0)],
        Some(s) => {
            let rest = (1.0 - p_new) / (n - 1) as f64;
            succ.iter()
                .map(|&(q, _)| (q, if q == s { p_new } else { rest }))
                .collect()
        }
        None => succ.iter().map(|&(q, _)| (q, 1.0 / n as f64)).collect(),
    }
}

/// Second state of a minimum-weight path from `cur` to `target`. Staying
/// put counts when `cur` already is the target and can loop.
pub fn towards(team: &Team, robot: usize, cur: usize, target: usize) -> Option<usize> {
    if cur == target {
        return team.robot(robot).has_self_loop(cur).then_some(cur);
    }
    team.paths_to(robot, target).second(cur)
}

/// Exact densities behind one biased draw.
#[derive(Clone, Debug)]
pub struct Densities {
    pub f_rand: Vec<f64>,
    /// The node the rest was conditioned on.
    pub q_rand: NodeId,
    pub f_new: Vec<Vec<(usize, f64)>>,
}

/// Draws a tree node from the density [`f_rand_vector`] describes.
pub fn draw_node(tree: &Tree, p_rand: f64, rng: &mut impl Rng) -> NodeId {
    let n = tree.len();
    let k = tree.dmin().len();
    if k == 0 || k == n {
        return rng.gen_range(0..n);
    }
    if rng.gen_bool(p_rand) {
        return tree.dmin()[rng.gen_range(0..k)] as NodeId;
    }
    for _ in 0..32 {
        let c = rng.gen_range(0..n);
        if !tree.in_dmin(c) {
            return c;
        }
    }
    let mut skip = rng.gen_range(0..n - k);
    for c in 0..n {
        if !tree.in_dmin(c) {
            if skip == 0 {
                return c;
            }
            skip -= 1;
        }
    }
    unreachable!("complement of D_min is nonempty")
}

fn pick<T: Copy>(items: &[T], rng: &mut impl Rng) -> T {
    items[rng.gen_range(0..items.len())]
}

/// Automaton part of a biased draw: the node to grow from and, per robot,
/// the state the new sample leans towards. `None` when the node has no
/// automaton successor that makes progress.
fn steer(
    tree: &Tree,
    problem: &Problem<'_>,
    q_rand: NodeId,
    rng: &mut impl Rng,
) -> Option<Vec<Option<usize>>> {
    let team = problem.team();
    let dm = problem.dm();
    let target = tree.bias_target()?;
    let succ = tree.node_succ(q_rand);
    let pts = tree.pts_of(q_rand);
    let root = tree.pts_of(tree.root());
    let root_b = tree.buchi_of(tree.root());
    if tree.mode() == Mode::Suffix && succ.contains(&(root_b as u32)) {
        // the node can already close the cycle: keep the label, head home
        let from = tree.buchi_of(q_rand);
        let l = problem.lmap(from, root_b).expect("enabled transition is feasible");
        return Some(
            (0..team.len())
                .map(|i| towards(team, i, pts[i], l[i].unwrap_or(root[i])))
                .collect(),
        );
    }
    let dmin = succ.iter().map(|&b| dm.d(b as usize, target)).min()?;
    if dmin == INF {
        return None;
    }
    let decr = problem.decr(target);
    let m: Vec<usize> = succ
        .iter()
        .map(|&b| b as usize)
        .filter(|&b| dm.d(b, target) == dmin && !decr[b].is_empty())
        .collect();
    if m.is_empty() {
        return None;
    }
    let q_min = pick(&m, rng);
    let q_decr = pick(&decr[q_min], rng);
    let l = problem.lmap(q_min, q_decr).expect("decrement follows a feasible transition");
    let to_root = tree.mode() == Mode::Suffix && q_decr == root_b;
    Some(
        (0..team.len())
            .map(|i| match l[i] {
                Some(r) => towards(team, i, pts[i], r),
                None if to_root => towards(team, i, pts[i], root[i]),
                None => None,
            })
            .collect(),
    )
}

/// Draws a team state to grow the tree towards. Biased draws steer along
/// the automaton towards the tree's bias target and along robot shortest
/// paths towards the regions it requires; they return `None` when the
/// drawn node offers no progress. Unbiased draws pick a node and a
/// successor per robot uniformly.
pub fn sample(
    tree: &Tree,
    problem: &Problem<'_>,
    cfg: &SamplerConfig,
    biased: bool,
    rng: &mut impl Rng,
) -> Option<TeamState> {
    let team = problem.team();
    if !biased || tree.bias_target().is_none() {
        let q_rand = rng.gen_range(0..tree.len());
        let pts = tree.pts_of(q_rand);
        return (0..team.len())
            .map(|i| {
                let succ = team.robot(i).successors(pts[i]);
                (!succ.is_empty()).then(|| pick(succ, rng).0)
            })
            .collect::<Option<Vec<_>>>()
            .map(TeamState);
    }
    let q_rand = draw_node(tree, cfg.p_rand_clamped(), rng);
    let lean = steer(tree, problem, q_rand, rng)?;
    let pts = tree.pts_of(q_rand);
    let p_new = cfg.p_new_clamped();
    let mut out = Vec::with_capacity(team.len());
    for (i, &cur) in pts.iter().enumerate() {
        let succ = team.robot(i).successors(cur);
        if succ.is_empty() {
            return None;
        }
        let q = match lean[i] {
            Some(_) if succ.len() == 1 => succ[0].0,
            Some(s) => {
                if rng.gen_bool(p_new) {
                    s
                } else {
                    // uniform over the successors other than s
                    let at = succ.partition_point(|&(q, _)| q < s);
                    let k = rng.gen_range(0..succ.len() - 1);
                    succ[if k >= at { k + 1 } else { k }].0
                }
            }
            None => pick(succ, rng).0,
        };
        out.push(q);
    }
    Some(TeamState(out))
}

/// Densities a biased draw would use, with the automaton choices made
/// using `rng`. `None` where [`sample`] would return `None`.
pub fn densities(tree: &Tree, problem: &Problem<'_>, cfg: &SamplerConfig, rng: &mut impl Rng) -> Option<Densities> {
    let p_rand = cfg.p_rand_clamped();
    let q_rand = draw_node(tree, p_rand, rng);
    let lean = steer(tree, problem, q_rand, rng)?;
    let pts = tree.pts_of(q_rand);
    let team = problem.team();
    Some(Densities {
        f_rand: f_rand_vector(tree, p_rand),
        q_rand,
        f_new: (0..team.len())
            .map(|i| f_new_vector(team.robot(i), pts[i], lean[i], cfg.p_new_clamped()))
            .collect(),
    })
}
