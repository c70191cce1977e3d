//! Built-in automata and random instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::{Conjunct, Guard, Nba, Transition};
use crate::model::{generate_grid, generate_random_wts, Ap, Team, WeightModel, Wts};
use crate::{Error, Ident, Result};

/// `□◇ π^rj ∧ □◇ π^re` for one robot: three states, state 2 accepting.
/// The edges into 2 from 0 and around 2 ask for both regions at once.
pub fn recurrence_nba(robot: usize, rj: impl Into<Ident>, re: impl Into<Ident>) -> Nba {
    let (j, e) = (Ap::new(robot, rj), Ap::new(robot, re));
    let lit = |a: &Ap| Guard::lit(a.clone());
    let both = Guard::normalized([Conjunct::new([j.clone(), e.clone()], [])]);
    let t = |from, to, guard| Transition { from, to, guard };
    Nba::new(
        vec![0.into(), 1.into(), 2.into()],
        vec![0],
        vec![2],
        [
            t(0, 0, Guard::top()),
            t(0, 1, lit(&j)),
            t(0, 2, both.clone()),
            t(1, 1, Guard::top()),
            t(1, 2, lit(&e)),
            t(2, 0, Guard::top()),
            t(2, 1, lit(&j)),
            t(2, 2, both),
        ],
    )
    .expect("well-formed")
}

/// Automaton for the patrolling task
///
/// `G(x1 -> X(!x1 U x2)) ∧ GF x1 ∧ GF x3 ∧ GF x4 ∧ (!x1 U x5) ∧ GF x5 ∧ G !x6 ∧ F(x7 ∨ x8)`
///
/// over eight guards `xi[0..8]`. States: an initial state waiting for
/// `x5`, then a flag for `x7 ∨ x8`, a counter over the recurring
/// obligations `x1, x3, x4, x5`, and a monitor for the `x1 ... x2`
/// response. Accepting states have the flag set and the counter full.
pub fn patrol_nba(xi: &[Guard; 8]) -> Nba {
    let x = |k: usize| &xi[k - 1];
    let safe = x(6).not();
    let not1 = x(1).not();
    let obligations = [x(1), x(3), x(4), x(5)];
    let flag_moves = |f: usize| -> Vec<(usize, Guard)> {
        match f {
            0 => vec![(0, Guard::top()), (1, x(7).clone().or(x(8).clone()))],
            _ => vec![(1, Guard::top())],
        }
    };
    let counter_moves = |c: usize| -> Vec<(usize, Guard)> {
        if c < 4 {
            vec![(c, Guard::top()), (c + 1, obligations[c].clone())]
        } else {
            vec![(0, Guard::top()), (1, x(1).clone())]
        }
    };
    let monitor_moves = |m: usize| -> Vec<(usize, Guard)> {
        if m == 0 {
            vec![(0, not1.clone()), (1, x(1).clone())]
        } else {
            vec![(0, x(2).and(&not1)), (1, not1.clone().or(x(2).clone()))]
        }
    };
    let id = |f: usize, c: usize, m: usize| 1 + f * 10 + c * 2 + m;
    let mut names: Vec<Ident> = vec!["init".into()];
    for f in 0..2 {
        for c in 0..5 {
            for m in 0..2 {
                names.push(format!("f{f}c{c}{}", if m == 0 { "i" } else { "w" }).into());
            }
        }
    }
    let moves_from = |f, c, m| {
        let mut out = Vec::new();
        for (f2, gf) in flag_moves(f) {
            for (c2, gc) in counter_moves(c) {
                for (m2, gm) in monitor_moves(m) {
                    let g = safe.and(&gf).and(&gc).and(&gm).feasible_part();
                    if !g.is_false() {
                        out.push((id(f2, c2, m2), g));
                    }
                }
            }
        }
        out
    };
    let mut transitions = Vec::new();
    let init_stay = safe.and(&not1).feasible_part();
    if !init_stay.is_false() {
        transitions.push(Transition { from: 0, to: 0, guard: init_stay });
    }
    for (to, g) in moves_from(0, 0, 0) {
        let g = g.and(x(5)).feasible_part();
        if !g.is_false() {
            transitions.push(Transition { from: 0, to, guard: g });
        }
    }
    for f in 0..2 {
        for c in 0..5 {
            for m in 0..2 {
                for (to, guard) in moves_from(f, c, m) {
                    transitions.push(Transition { from: id(f, c, m), to, guard });
                }
            }
        }
    }
    Nba::new(names, vec![0], vec![id(1, 4, 0), id(1, 4, 1)], transitions).expect("well-formed")
}

/// Two-robot surveillance task on a 4×4 grid, regions `r1..r16` row-major:
///
/// `□◇(π_1^r6 ∧ ◇π_2^r14) ∧ □¬π_1^r9 ∧ □¬π_1^r11 ∧ □¬π_2^r11
///  ∧ □(π_2^r14 → ○(¬π_2^r14 U π_1^r4)) ∧ ◇π_2^r12 ∧ □◇π_2^r10`
///
/// States track the `r6 ... r14` round, the `r14 ... r4` response, the
/// `r12` flag and a counter over the two recurring events; 24 in all, four
/// of them accepting. Region `rk` is grid index `k - 1`.
pub fn grid_task_nba() -> Nba {
    let r = |robot: usize, k: i64| Guard::lit(Ap::new(robot, k - 1));
    let safe = r(0, 9).not().and(&r(0, 11).not()).and(&r(1, 11).not());
    let (r6, r14, r4, r12, r10) = (r(0, 6), r(1, 14), r(0, 4), r(1, 12), r(1, 10));
    // (next round state, round completed, guard)
    let round = |a: usize| -> Vec<(usize, bool, Guard)> {
        if a == 0 {
            vec![
                (0, true, r6.and(&r14)),
                (1, false, r6.and(&r14.not())),
                (0, false, r6.not()),
            ]
        } else {
            vec![(0, true, r14.clone()), (1, false, r14.not())]
        }
    };
    let response = |m: usize| -> Vec<(usize, Guard)> {
        match m {
            0 => vec![(0, r14.not()), (1, r14.clone())],
            _ => vec![(0, r4.and(&r14.not())), (1, r4.and(&r14)), (1, r4.not().and(&r14.not()))],
        }
    };
    let flag = |f: usize| -> Vec<(usize, Guard)> {
        match f {
            0 => vec![(0, r12.not()), (1, r12.clone())],
            _ => vec![(1, Guard::top())],
        }
    };
    let counter = |c: usize, done: bool| -> Vec<(usize, Guard)> {
        match (c, done) {
            (0, true) => vec![(1, Guard::top())],
            (0, false) => vec![(0, Guard::top())],
            (1, _) => vec![(2, r10.clone()), (1, r10.not())],
            _ => vec![(0, Guard::top())],
        }
    };
    let id = |a: usize, m: usize, f: usize, c: usize| ((a * 2 + m) * 2 + f) * 3 + c;
    let mut names: Vec<Ident> = vec![0i64.into(); 24];
    let mut finals = Vec::new();
    let mut transitions = Vec::new();
    for a in 0..2 {
        for m in 0..2 {
            for f in 0..2 {
                for c in 0..3 {
                    let from = id(a, m, f, c);
                    names[from] = format!("a{a}m{m}f{f}c{c}").into();
                    if f == 1 && c == 2 {
                        finals.push(from);
                    }
                    for (a2, done, ga) in round(a) {
                        for (m2, gm) in response(m) {
                            for (f2, gf) in flag(f) {
                                for (c2, gc) in counter(c, done) {
                                    let g = safe.and(&ga).and(&gm).and(&gf).and(&gc).feasible_part();
                                    if !g.is_false() {
                                        transitions.push(Transition { from, to: id(a2, m2, f2, c2), guard: g });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Nba::new(names, vec![0], finals, transitions).expect("well-formed")
}

/// The grid task with unit-weight moves and no waiting: robot 1 starts in
/// `r1`, robot 2 in `r16`.
pub fn grid_task_instance() -> Instance {
    let w = generate_grid(4, 4, false, WeightModel::Unit).expect("valid grid");
    let r2 = relabel(w.clone(), 1, 15).expect("valid state");
    Instance {
        name: "grid-task".into(),
        team: Team::new(vec![w, r2]).expect("two robots"),
        nba: grid_task_nba(),
    }
}

/// Random `x1..x8` for a team: each is a conjunction over one or two robots
/// of a disjunction of one or two of that robot's regions. `x6`, the
/// forbidden condition, names a single region no other guard uses and no
/// robot starts in.
pub fn random_patrol_xi(team: &Team, rng: &mut impl Rng) -> [Guard; 8] {
    let n = team.len();
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut xi: Vec<Guard> = Vec::with_capacity(8);
    for k in 1..=8 {
        if k == 6 {
            xi.push(Guard::bottom());
            continue;
        }
        let mut robots: Vec<usize> = (0..n).collect();
        robots.shuffle(rng);
        robots.truncate(rng.gen_range(1..=n.min(2)));
        robots.sort_unstable();
        let mut g = Guard::top();
        for &r in &robots {
            let w = team.robot(r);
            let k = rng.gen_range(1..=2.min(w.len()));
            let regions: Vec<usize> = rand::seq::index::sample(rng, w.len(), k).into_vec();
            let mut d = Guard::bottom();
            for q in regions {
                used[r].push(q);
                d = d.or(Guard::lit(Ap::new(r, w.name(q).clone())));
            }
            g = g.and(&d);
        }
        xi.push(g);
    }
    let r = rng.gen_range(0..n);
    let w = team.robot(r);
    let free: Vec<usize> = (0..w.len())
        .filter(|q| *q != w.initial() && !used[r].contains(q))
        .collect();
    xi[5] = match free.choose(rng) {
        Some(&q) => Guard::lit(Ap::new(r, w.name(q).clone())),
        None => Guard::bottom(),
    };
    xi.try_into().expect("eight guards")
}

/// Random automaton over the team's regions. State 0 is initial; a path
/// `0 -> 1 -> ... -> n-1` with literal guards and random extra edges keep
/// most instances feasible. Some guards ask one robot to be in two regions
/// and are removed by pruning.
pub fn random_nba(team: &Team, n_states: usize, n_finals: usize, density: f64, rng: &mut impl Rng) -> Result<Nba> {
    if n_states == 0 || n_finals == 0 || n_finals > n_states {
        return Err(Error::invalid("need 1 <= n_finals <= n_states"));
    }
    let ap = |rng: &mut dyn rand::RngCore| {
        let r = rng.gen_range(0..team.len());
        let w = team.robot(r);
        Ap::new(r, w.name(rng.gen_range(0..w.len())).clone())
    };
    let guard = |rng: &mut ChaCha8Rng| -> Guard {
        match rng.gen_range(0..10) {
            0..=1 => Guard::top(),
            2..=4 => Guard::lit(ap(rng)),
            5..=6 => Guard::normalized([Conjunct::new([ap(rng)], [ap(rng)])]),
            7 => Guard::normalized([Conjunct::new([], [ap(rng)])]),
            8 => Guard::normalized([Conjunct::new([ap(rng), ap(rng)], [])]),
            _ => {
                let r = rng.gen_range(0..team.len());
                let w = team.robot(r);
                let a = Ap::new(r, w.name(0).clone());
                let b = Ap::new(r, w.name(w.len() - 1).clone());
                Guard::normalized([Conjunct::new([a, b], []), Conjunct::new([ap(rng)], [])])
            }
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut transitions = Vec::new();
    for q in 0..n_states {
        for to in 0..n_states {
            let chain = to == q + 1;
            let stay = to == q && (q == 0 || local.gen_bool(0.5));
            if chain || stay || local.gen_bool(density) {
                let g = if stay { Guard::top() } else { guard(&mut local) };
                transitions.push(Transition { from: q, to, guard: g });
            }
        }
    }
    let mut finals: Vec<usize> = rand::seq::index::sample(&mut local, n_states, n_finals).into_vec();
    finals.sort_unstable();
    Nba::new((0..n_states).map(Ident::from).collect(), vec![0], finals, transitions)
}

/// How robot systems of an instance are generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WtsSpec {
    Grid { rows: usize, cols: usize },
    Random { states: usize, avg_degree: f64 },
}

/// How the automaton of an instance is generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NbaSpec {
    Patrol,
    Random { states: usize, finals: usize, density: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub robots: usize,
    pub wts: WtsSpec,
    pub nba: NbaSpec,
    #[serde(default = "default_weights")]
    pub weights: (f64, f64),
    pub seed: u64,
}

fn default_weights() -> (f64, f64) {
    (1.0, 10.0)
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub team: Team,
    pub nba: Nba,
}

impl InstanceSpec {
    /// Robots start at distinct random states where possible.
    pub fn build(&self) -> Result<Instance> {
        if self.robots == 0 {
            return Err(Error::Config("an instance needs at least one robot".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut robots = Vec::with_capacity(self.robots);
        for r in 0..self.robots {
            let w = match &self.wts {
                WtsSpec::Grid { rows, cols } => generate_grid(
                    *rows,
                    *cols,
                    true,
                    WeightModel::Uniform {
                        lo: self.weights.0,
                        hi: self.weights.1,
                        seed: rng.gen(),
                    },
                )?,
                WtsSpec::Random { states, avg_degree } => {
                    generate_random_wts(*states, *avg_degree, rng.gen(), self.weights)?
                }
            };
            let start = rng.gen_range(0..w.len());
            robots.push(relabel(w, r, start)?);
        }
        let team = Team::new(robots)?;
        let nba = match &self.nba {
            NbaSpec::Patrol => patrol_nba(&random_patrol_xi(&team, &mut rng)),
            NbaSpec::Random { states, finals, density } => random_nba(&team, *states, *finals, *density, &mut rng)?,
        };
        let wts = match &self.wts {
            WtsSpec::Grid { rows, cols } => format!("grid{rows}x{cols}"),
            WtsSpec::Random { states, avg_degree } => format!("rand{states}d{avg_degree}"),
        };
        Ok(Instance {
            name: format!("n{}-{wts}-b{}-s{}", self.robots, nba.len(), self.seed),
            team,
            nba,
        })
    }
}

fn relabel(w: Wts, robot: usize, initial: usize) -> Result<Wts> {
    let mut doc = w.to_doc();
    doc.robot = robot;
    doc.initial = doc.states[initial].clone();
    Wts::from_doc(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{distance_matrix, feasible_finals, prune_infeasible};

    #[test]
    fn patrol_shape() {
        let w = generate_grid(4, 4, true, WeightModel::Unit).unwrap();
        let team = Team::new(vec![w.clone(), w.with_robot(1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nba = patrol_nba(&random_patrol_xi(&team, &mut rng));
        assert_eq!(nba.len(), 21);
        assert_eq!(nba.initial().len(), 1);
        assert_eq!(nba.finals().len(), 2);
        let t = nba.transitions().len();
        assert!((60..=140).contains(&t), "{t} transitions");
        let p = prune_infeasible(&nba, 2).unwrap();
        let dm = distance_matrix(&p);
        assert_eq!(feasible_finals(&p, &dm, 0).len(), 2);
    }

    #[test]
    fn grid_task_shape() {
        let nba = grid_task_nba();
        assert_eq!((nba.len(), nba.initial().len(), nba.finals().len()), (24, 1, 4));
        let p = prune_infeasible(&nba, 2).unwrap();
        let dm = distance_matrix(&p);
        assert_eq!(feasible_finals(&p, &dm, 0).len(), 4);
    }

    #[test]
    fn specs_are_deterministic() {
        let spec = InstanceSpec {
            robots: 2,
            wts: WtsSpec::Random { states: 12, avg_degree: 3.0 },
            nba: NbaSpec::Random { states: 5, finals: 1, density: 0.3 },
            weights: (1.0, 10.0),
            seed: 9,
        };
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        assert_eq!(a.nba.to_json(), b.nba.to_json());
        assert_eq!(a.team.robot(1).to_json(), b.team.robot(1).to_json());
    }
}
