//! Exact reference machinery for small instances: the explicit product
//! automaton, optimal plans by Dijkstra, and plan checking.

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;

use crate::automaton::{guard_sat, Nba};
use crate::model::{Frontier, Team, TeamState};
use crate::planner::{Plan, ProductState};
use crate::{Error, Result};

pub const DEFAULT_CAP: usize = 2_000_000;

/// Product of the team and the automaton, restricted to states reachable
/// from the initial ones. Transitions read the label of their source.
#[derive(Clone, Debug)]
pub struct ExplicitPba {
    pub nodes: Vec<ProductState>,
    pub index: HashMap<ProductState, usize>,
    pub succ: Vec<Vec<(usize, f64)>>,
    pub initials: Vec<usize>,
    pub finals: Vec<usize>,
}

impl ExplicitPba {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    fn preds(&self) -> Vec<Vec<(usize, f64)>> {
        let mut p = vec![Vec::new(); self.len()];
        for (u, out) in self.succ.iter().enumerate() {
            for &(v, w) in out {
                p[v].push((u, w));
            }
        }
        p
    }
}

fn team_successors(team: &Team, q: &TeamState) -> Vec<(TeamState, f64)> {
    let mut acc = vec![(Vec::with_capacity(team.len()), 0.0)];
    for (i, &r) in q.iter().enumerate() {
        let succ = team.robot(i).successors(r);
        acc = acc
            .into_iter()
            .flat_map(|(v, w)| {
                succ.iter().map(move |&(s, sw)| {
                    let mut v = v.clone();
                    v.push(s);
                    (v, w + sw)
                })
            })
            .collect();
    }
    acc.into_iter().map(|(v, w)| (TeamState(v), w)).collect()
}

/// Breadth-first construction from all initial product states. Fails
/// before any work when the full product exceeds `cap` states, and during
/// the search if the reachable part does.
pub fn build_explicit_pba(team: &Team, nba: &Nba, cap: usize) -> Result<ExplicitPba> {
    let log = team.log10_size() + (nba.len() as f64).log10();
    if log > (cap as f64).log10() {
        return Err(Error::TooLarge {
            size: format!("10^{log:.1}"),
            cap,
        });
    }
    let mut pba = ExplicitPba {
        nodes: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        initials: Vec::new(),
        finals: Vec::new(),
    };
    let mut queue = VecDeque::new();
    let add = |pba: &mut ExplicitPba, q: ProductState, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = pba.index.get(&q) {
            return Ok(i);
        }
        if pba.nodes.len() >= cap {
            return Err(Error::TooLarge {
                size: format!("more than {cap}"),
                cap,
            });
        }
        let i = pba.nodes.len();
        if nba.is_final(q.buchi) {
            pba.finals.push(i);
        }
        pba.index.insert(q.clone(), i);
        pba.nodes.push(q);
        pba.succ.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    };
    for &q0 in nba.initial() {
        let i = add(&mut pba, ProductState::new(team.initial_state(), q0), &mut queue)?;
        pba.initials.push(i);
    }
    while let Some(u) = queue.pop_front() {
        let q = pba.nodes[u].clone();
        let label = team.team_label(&q.pts);
        let enabled: Vec<usize> = nba
            .transitions()
            .iter()
            .filter(|t| t.from == q.buchi && guard_sat(&t.guard, &label))
            .map(|t| t.to)
            .collect();
        if enabled.is_empty() {
            continue;
        }
        for (next, w) in team_successors(team, &q.pts) {
            for &b in &enabled {
                let v = add(&mut pba, ProductState::new(next.clone(), b), &mut queue)?;
                pba.succ[u].push((v, w));
            }
        }
    }
    Ok(pba)
}

/// Dijkstra from `sources` over `adj`, expanding equal distances in
/// `rank` order. Returns distances and predecessors.
fn dijkstra(adj: &[Vec<(usize, f64)>], sources: &[usize], rank: &[usize]) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = adj.len();
    let mut by_rank = vec![0; n];
    for (i, &r) in rank.iter().enumerate() {
        by_rank[r] = i;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Frontier { cost: 0.0, node: rank[s] });
    }
    let mut done = vec![false; n];
    while let Some(Frontier { cost, node }) = heap.pop() {
        let u = by_rank[node];
        if done[u] || cost > dist[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in &adj[u] {
            let c = cost + w;
            if c < dist[v] {
                dist[v] = c;
                prev[v] = Some(u);
                heap.push(Frontier { cost: c, node: rank[v] });
            }
        }
    }
    (dist, prev)
}

/// Optimal plan over the explicit product: shortest paths from the
/// initial states to every final, shortest cycles through each final, and
/// the final minimizing `beta * prefix + (1 - beta) * cycle`. Ties go to
/// the smallest product state, so the result does not depend on the order
/// the product was built in.
pub fn optimal_plan_exact(pba: &ExplicitPba, beta: f64) -> Option<Plan> {
    let n = pba.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pba.nodes[a].cmp(&pba.nodes[b]));
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let (dist, prev) = dijkstra(&pba.succ, &pba.initials, &rank);
    let preds = pba.preds();

    let mut best: Option<(f64, usize, f64, f64, Vec<Option<usize>>)> = None;
    let mut finals = pba.finals.clone();
    finals.sort_by_key(|&f| rank[f]);
    for f in finals {
        if dist[f].is_infinite() {
            continue;
        }
        // distances to f, and the next hop towards it
        let (to_f, next) = dijkstra(&preds, &[f], &rank);
        let mut cyc: Option<(f64, usize)> = None;
        for &(s, w) in &pba.succ[f] {
            let c = w + to_f[s];
            if c.is_finite() && cyc.is_none_or(|(bc, bs)| c < bc || (c == bc && rank[s] < rank[bs])) {
                cyc = Some((c, s));
            }
        }
        let Some((j_suf, s)) = cyc else { continue };
        let j = beta * dist[f] + (1.0 - beta) * j_suf;
        if best.as_ref().is_none_or(|b| j < b.0) {
            let mut hops = next;
            hops[f] = Some(s);
            best = Some((j, f, dist[f], j_suf, hops));
        }
    }
    let (_, f, j_pre, _, hops) = best?;
    let mut prefix = vec![f];
    while let Some(p) = prev[*prefix.last().unwrap()] {
        prefix.push(p);
    }
    prefix.reverse();
    let mut suffix = vec![f];
    let mut cur = hops[f].expect("cycle successor");
    while cur != f {
        suffix.push(cur);
        cur = hops[cur].expect("path back to the final");
    }
    let states = |ids: &[usize]| ids.iter().map(|&i| pba.nodes[i].clone()).collect::<Vec<_>>();
    let (prefix, suffix) = (states(&prefix), states(&suffix));
    // recompute costs along the returned sequences, summed in plan order
    let weight = |a: &ProductState, b: &ProductState| {
        pba.succ[pba.index[a]]
            .iter()
            .find(|&&(v, _)| pba.nodes[v] == *b)
            .map(|&(_, w)| w)
            .expect("product edge")
    };
    let sum = |seq: &[ProductState], close: bool| {
        let mut total = 0.0;
        for w in seq.windows(2) {
            total += weight(&w[0], &w[1]);
        }
        if close {
            total += weight(seq.last().unwrap(), &seq[0]);
        }
        total
    };
    let j_pre_path = sum(&prefix, false);
    debug_assert!((j_pre_path - j_pre).abs() <= 1e-9 * j_pre.max(1.0));
    let j_suf = sum(&suffix, true);
    Some(Plan::new(prefix, suffix, j_pre_path, j_suf, beta))
}

/// First violated condition of a plan.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Empty,
    NotInitial,
    BadPrefixEdge(usize),
    SuffixStart,
    BadSuffixEdge(usize),
    BadClosingEdge,
    NoFinalInSuffix,
    CostMismatch { field: &'static str, claimed: f64, actual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("empty prefix or suffix"),
            Violation::NotInitial => f.write_str("prefix does not start at an initial product state"),
            Violation::BadPrefixEdge(i) => write!(f, "prefix step {i} -> {} is not a product transition", i + 1),
            Violation::SuffixStart => f.write_str("suffix does not start where the prefix ends"),
            Violation::BadSuffixEdge(i) => write!(f, "suffix step {i} -> {} is not a product transition", i + 1),
            Violation::BadClosingEdge => f.write_str("suffix does not close back to its start"),
            Violation::NoFinalInSuffix => f.write_str("suffix visits no final state"),
            Violation::CostMismatch { field, claimed, actual } => {
                write!(f, "{field} is {claimed} but the plan costs {actual}")
            }
        }
    }
}

fn step(team: &Team, nba: &Nba, a: &ProductState, b: &ProductState) -> Option<f64> {
    if !team.is_valid(&a.pts) || !team.is_valid(&b.pts) || a.buchi >= nba.len() || b.buchi >= nba.len() {
        return None;
    }
    let w = team.step_weight(&a.pts, &b.pts)?;
    let g = nba.guard(a.buchi, b.buchi)?;
    guard_sat(g, &team.team_label(&a.pts)).then_some(w)
}

fn close_enough(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Checks a plan against the unpruned automaton: every step and the
/// closing step are product transitions, the prefix starts at an initial
/// state, the suffix visits a final state, and the claimed costs match.
pub fn verify_plan(plan: &Plan, team: &Team, nba: &Nba) -> std::result::Result<(), Violation> {
    let (Some(first), Some(last)) = (plan.prefix.first(), plan.prefix.last()) else {
        return Err(Violation::Empty);
    };
    if plan.suffix.is_empty() {
        return Err(Violation::Empty);
    }
    if first.pts != team.initial_state() || !nba.initial().contains(&first.buchi) {
        return Err(Violation::NotInitial);
    }
    let mut j_pre = 0.0;
    for (i, w) in plan.prefix.windows(2).enumerate() {
        j_pre += step(team, nba, &w[0], &w[1]).ok_or(Violation::BadPrefixEdge(i))?;
    }
    if plan.suffix[0] != *last {
        return Err(Violation::SuffixStart);
    }
    let mut j_suf = 0.0;
    for (i, w) in plan.suffix.windows(2).enumerate() {
        j_suf += step(team, nba, &w[0], &w[1]).ok_or(Violation::BadSuffixEdge(i))?;
    }
    j_suf += step(team, nba, plan.suffix.last().unwrap(), &plan.suffix[0]).ok_or(Violation::BadClosingEdge)?;
    if !plan.suffix.iter().any(|q| nba.is_final(q.buchi)) {
        return Err(Violation::NoFinalInSuffix);
    }
    for (field, claimed, actual) in [("j_pre", plan.j_pre, j_pre), ("j_suf", plan.j_suf, j_suf)] {
        if !close_enough(claimed, actual) {
            return Err(Violation::CostMismatch { field, claimed, actual });
        }
    }
    let total = plan.beta * j_pre + (1.0 - plan.beta) * j_suf;
    if !close_enough(plan.j_total, total) {
        return Err(Violation::CostMismatch {
            field: "j_total",
            claimed: plan.j_total,
            actual: total,
        });
    }
    Ok(())
}
