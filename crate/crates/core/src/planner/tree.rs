use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::problem::Problem;
use crate::automaton::{DistanceMatrix, INF};
use crate::model::{Team, TeamState};
use crate::{Error, Result};

pub type NodeId = usize;

/// Product state: team configuration paired with an automaton state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductState {
    pub pts: TeamState,
    pub buchi: usize,
}

impl ProductState {
    pub fn new(pts: impl Into<TeamState>, buchi: usize) -> Self {
        Self {
            pts: pts.into(),
            buchi,
        }
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {})", self.pts.0, self.buchi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Prefix,
    Suffix,
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    pts: u32,
    buchi: u32,
    parent: u32,
    cost: f64,
    /// Weight of the edge from the parent.
    w: f64,
    children: Vec<u32>,
    /// Automaton successors enabled by this node's label, sorted.
    succ: Box<[u32]>,
}

impl Node {
    #[inline]
    fn enables(&self, b: u32) -> bool {
        self.succ.binary_search(&b).is_ok()
    }
}

/// Team states of the tree adjacent to some team state `x`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Neighborhood {
    pub pid: Option<u32>,
    /// Interned team states with an edge into `x`, and its weight.
    pub preds: Vec<(u32, f64)>,
    /// Interned team states `x` has an edge to.
    pub succs: Vec<(u32, f64)>,
    pub self_w: Option<f64>,
}

/// Tree over product states rooted at one of them. Costs are sums of team
/// move weights along parent links.
#[derive(Clone, Debug)]
pub struct Tree {
    n_robots: usize,
    pts_flat: Vec<usize>,
    pts_index: HashMap<Box<[usize]>, u32>,
    members: Vec<Vec<u32>>,
    by_first: Vec<Vec<u32>>,
    nodes: Vec<Node>,
    mode: Mode,
    target: Option<usize>,
    dmin: Vec<u32>,
    dmin_val: u32,
    in_dmin: Vec<bool>,
}

impl Tree {
    pub fn new(problem: &Problem<'_>, root: &ProductState, mode: Mode) -> Result<Self> {
        let team = problem.team();
        if !team.is_valid(&root.pts) || root.buchi >= problem.n_buchi() {
            return Err(Error::invalid(format!("root {root} does not belong to the problem")));
        }
        let mut t = Self {
            n_robots: team.len(),
            pts_flat: Vec::new(),
            pts_index: HashMap::new(),
            members: Vec::new(),
            by_first: vec![Vec::new(); team.robot(0).len()],
            nodes: Vec::new(),
            mode,
            target: (mode == Mode::Suffix).then_some(root.buchi),
            dmin: Vec::new(),
            dmin_val: INF,
            in_dmin: Vec::new(),
        };
        let pid = t.intern(&root.pts);
        t.push_node(problem, pid, root.buchi as u32, NONE, 0.0);
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn root(&self) -> NodeId {
        0
    }

    /// Number of distinct team states in the tree.
    pub fn pts_count(&self) -> usize {
        self.members.len()
    }

    pub fn pts_of(&self, id: NodeId) -> &[usize] {
        self.pts_slice(self.nodes[id].pts)
    }

    pub fn buchi_of(&self, id: NodeId) -> usize {
        self.nodes[id].buchi as usize
    }

    pub fn state(&self, id: NodeId) -> ProductState {
        ProductState::new(self.pts_of(id).to_vec(), self.buchi_of(id))
    }

    pub fn cost(&self, id: NodeId) -> f64 {
        self.nodes[id].cost
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        let p = self.nodes[id].parent;
        (p != NONE).then_some(p as usize)
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[id].children.iter().map(|&c| c as usize)
    }

    /// Automaton successors enabled at node `id`.
    pub fn buchi_successors(&self, id: NodeId) -> impl Iterator<Item = usize> + '_ {
        self.nodes[id].succ.iter().map(|&b| b as usize)
    }

    pub fn find(&self, q: &ProductState) -> Option<NodeId> {
        let pid = *self.pts_index.get(&q.pts[..])?;
        self.member(pid, q.buchi as u32).map(|n| n as usize)
    }

    pub fn contains(&self, q: &ProductState) -> bool {
        self.find(q).is_some()
    }

    /// Root-to-node sequence of product states.
    pub fn find_path(&self, id: NodeId) -> Result<Vec<ProductState>> {
        if id >= self.len() {
            return Err(Error::invalid(format!("node {id} not in a tree of {} nodes", self.len())));
        }
        let mut path = vec![self.state(id)];
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            path.push(self.state(p));
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    pub fn bias_target(&self) -> Option<usize> {
        self.target
    }

    /// Nodes nearest to the bias target in automaton hops.
    pub fn dmin(&self) -> &[u32] {
        &self.dmin
    }

    pub(crate) fn in_dmin(&self, id: usize) -> bool {
        self.in_dmin[id]
    }

    /// Points the sampling bias at automaton state `target` and recomputes
    /// D_min.
    pub fn set_target(&mut self, target: Option<usize>, dm: &DistanceMatrix) {
        self.target = target;
        self.dmin.clear();
        self.dmin_val = INF;
        self.in_dmin.iter_mut().for_each(|f| *f = false);
        for id in 0..self.nodes.len() {
            self.track_dmin(id, dm);
        }
    }

    fn track_dmin(&mut self, id: usize, dm: &DistanceMatrix) {
        // a suffix tree starts at its target, so nodes there still owe a
        // full cycle
        let d = match self.target {
            Some(t) if self.mode == Mode::Suffix && self.nodes[id].buchi as usize == t => dm.dcyc(t),
            Some(t) => dm.d(self.nodes[id].buchi as usize, t),
            None => INF,
        };
        if d < self.dmin_val {
            for &n in &self.dmin {
                self.in_dmin[n as usize] = false;
            }
            self.dmin.clear();
            self.dmin_val = d;
        }
        if d == self.dmin_val {
            self.dmin.push(id as u32);
            self.in_dmin[id] = true;
        }
    }

    pub(crate) fn pts_slice(&self, pid: u32) -> &[usize] {
        let s = pid as usize * self.n_robots;
        &self.pts_flat[s..s + self.n_robots]
    }

    pub(crate) fn pts_id(&self, pts: &[usize]) -> Option<u32> {
        self.pts_index.get(pts).copied()
    }

    fn intern(&mut self, pts: &[usize]) -> u32 {
        if let Some(&pid) = self.pts_index.get(pts) {
            return pid;
        }
        let pid = self.members.len() as u32;
        self.pts_flat.extend_from_slice(pts);
        self.pts_index.insert(pts.into(), pid);
        self.members.push(Vec::new());
        self.by_first[pts[0]].push(pid);
        pid
    }

    fn member(&self, pid: u32, b: u32) -> Option<u32> {
        let m = &self.members[pid as usize];
        m.binary_search_by_key(&b, |&n| self.nodes[n as usize].buchi)
            .ok()
            .map(|i| m[i])
    }

    pub(crate) fn node_at(&self, pid: u32, b: usize) -> Option<NodeId> {
        self.member(pid, b as u32).map(|n| n as usize)
    }

    fn push_node(&mut self, problem: &Problem<'_>, pid: u32, b: u32, parent: u32, w: f64) -> u32 {
        let id = self.nodes.len() as u32;
        let cost = if parent == NONE { 0.0 } else { self.nodes[parent as usize].cost + w };
        let succ: Box<[u32]> = problem
            .buchi_successors(b as usize, self.pts_slice(pid))
            .into_iter()
            .map(|s| s as u32)
            .collect();
        self.nodes.push(Node {
            pts: pid,
            buchi: b,
            parent,
            cost,
            w,
            children: Vec::new(),
            succ,
        });
        if parent != NONE {
            self.nodes[parent as usize].children.push(id);
        }
        let pos = self.members[pid as usize]
            .partition_point(|&n| self.nodes[n as usize].buchi < b);
        self.members[pid as usize].insert(pos, id);
        self.in_dmin.push(false);
        self.track_dmin(id as usize, problem.dm());
        id
    }

    /// Interned team states adjacent to `x`, found through the first
    /// robot's adjacency.
    pub(crate) fn neighborhood(&self, x: &[usize], team: &Team) -> Neighborhood {
        let pid = self.pts_id(x);
        let mut nb = Neighborhood {
            pid,
            self_w: team.step_weight_slices(x, x),
            ..Neighborhood::default()
        };
        let w0 = team.robot(0);
        for &(r, _) in w0.predecessors(x[0]) {
            for &p in &self.by_first[r] {
                if Some(p) == pid {
                    continue;
                }
                if let Some(w) = team.step_weight_slices(self.pts_slice(p), x) {
                    nb.preds.push((p, w));
                }
            }
        }
        for &(r, _) in w0.successors(x[0]) {
            for &p in &self.by_first[r] {
                if Some(p) == pid {
                    continue;
                }
                if let Some(w) = team.step_weight_slices(x, self.pts_slice(p)) {
                    nb.succs.push((p, w));
                }
            }
        }
        nb
    }

    /// Cheapest parent per automaton state among the nodes of `nb.preds`,
    /// ties to the lowest node id.
    pub(crate) fn best_parents(&self, nb: &Neighborhood, out: &mut Vec<Option<Candidate>>, n_buchi: usize) {
        out.clear();
        out.resize(n_buchi, None);
        for &(p, w) in &nb.preds {
            for &n in &self.members[p as usize] {
                let node = &self.nodes[n as usize];
                let c = node.cost + w;
                for &b in node.succ.iter() {
                    let slot = &mut out[b as usize];
                    if better(c, n, *slot) {
                        *slot = Some(Candidate { cost: c, node: n, w });
                    }
                }
            }
        }
    }

    /// Adds `(x, b)` under its cheapest parent. `best` must come from
    /// [`Tree::best_parents`] for the current costs; parents sharing `x` are
    /// checked here.
    pub(crate) fn extend_with(
        &mut self,
        problem: &Problem<'_>,
        x: &[usize],
        b: usize,
        nb: &mut Neighborhood,
        mut best: Option<Candidate>,
    ) -> Option<NodeId> {
        if let (Some(pid), Some(w)) = (nb.pid, nb.self_w) {
            for &n in &self.members[pid as usize] {
                let node = &self.nodes[n as usize];
                if node.enables(b as u32) {
                    let c = node.cost + w;
                    if better(c, n, best) {
                        best = Some(Candidate { cost: c, node: n, w });
                    }
                }
            }
        }
        let best = best?;
        let pid = match nb.pid {
            Some(p) => p,
            None => {
                let p = self.intern(x);
                nb.pid = Some(p);
                p
            }
        };
        Some(self.push_node(problem, pid, b as u32, best.node, best.w) as usize)
    }

    /// Reparents every neighbor of `id` that gets strictly cheaper through
    /// it. Returns the number of reparented nodes.
    pub(crate) fn rewire_with(&mut self, id: NodeId, nb: &Neighborhood) -> usize {
        let u = id as u32;
        let cu = self.nodes[id].cost;
        let mut changed = 0;
        let own = nb.pid.zip(nb.self_w);
        let groups = nb.succs.iter().copied().chain(own);
        let mut moves: Vec<(u32, f64)> = Vec::new();
        for (p, w) in groups {
            for &v in &self.members[p as usize] {
                if v == u || v == 0 {
                    continue;
                }
                let node = &self.nodes[v as usize];
                if self.nodes[id].enables(node.buchi) && cu + w < node.cost {
                    moves.push((v, w));
                }
            }
        }
        for (v, w) in moves {
            // an earlier move may already have lowered v
            if cu + w < self.nodes[v as usize].cost && !self.is_ancestor(v, u) {
                self.reparent(v, u, w);
                changed += 1;
            }
        }
        changed
    }

    fn is_ancestor(&self, a: u32, mut n: u32) -> bool {
        while n != NONE {
            if n == a {
                return true;
            }
            n = self.nodes[n as usize].parent;
        }
        false
    }

    fn reparent(&mut self, v: u32, u: u32, w: f64) {
        let old = self.nodes[v as usize].parent;
        let siblings = &mut self.nodes[old as usize].children;
        let pos = siblings.iter().position(|&c| c == v).expect("child of its parent");
        siblings.swap_remove(pos);
        self.nodes[u as usize].children.push(v);
        let node = &mut self.nodes[v as usize];
        node.parent = u;
        node.w = w;
        let mut stack = vec![v];
        while let Some(n) = stack.pop() {
            let p = self.nodes[n as usize].parent as usize;
            let c = self.nodes[p].cost + self.nodes[n as usize].w;
            self.nodes[n as usize].cost = c;
            stack.extend_from_slice(&self.nodes[n as usize].children);
        }
    }

    /// Adds `(pts, b)` under its cheapest valid parent; `None` when no tree
    /// node has a product transition into it.
    pub fn extend(&mut self, problem: &Problem<'_>, pts: &TeamState, b: usize) -> Result<Option<NodeId>> {
        let q = ProductState::new(pts.clone(), b);
        if !problem.team().is_valid(pts) || b >= problem.n_buchi() {
            return Err(Error::invalid(format!("{q} does not belong to the problem")));
        }
        if self.contains(&q) {
            return Err(Error::invalid(format!("{q} is already in the tree")));
        }
        let mut nb = self.neighborhood(pts, problem.team());
        let mut best = Vec::new();
        self.best_parents(&nb, &mut best, problem.n_buchi());
        Ok(self.extend_with(problem, pts, b, &mut nb, best[b]))
    }

    /// Routes neighbors of `id` through it where that is strictly cheaper,
    /// updating their subtrees. Returns the number of reparented nodes.
    pub fn rewire(&mut self, problem: &Problem<'_>, id: NodeId) -> Result<usize> {
        if id >= self.len() {
            return Err(Error::invalid(format!("node {id} not in the tree")));
        }
        let x = self.pts_of(id).to_vec();
        let nb = self.neighborhood(&x, problem.team());
        Ok(self.rewire_with(id, &nb))
    }

    pub(crate) fn node_enables(&self, id: NodeId, b: usize) -> bool {
        self.nodes[id].enables(b as u32)
    }

    pub(crate) fn node_succ(&self, id: NodeId) -> &[u32] {
        &self.nodes[id].succ
    }
}

/// Parent candidate: resulting cost, parent node and edge weight.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Candidate {
    pub cost: f64,
    pub node: u32,
    pub w: f64,
}

#[inline]
fn better(c: f64, n: u32, cur: Option<Candidate>) -> bool {
    match cur {
        None => true,
        Some(b) => c < b.cost || (c == b.cost && n < b.node),
    }
}
