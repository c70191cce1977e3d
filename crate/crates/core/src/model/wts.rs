use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Ident, Result};

/// Weighted transition system abstracting one robot's mobility: states are
/// workspace regions, edges are admissible moves with a nonnegative travel
/// cost. A state `r` satisfies exactly the proposition "robot is in `r`".
#[derive(Clone, Debug)]
pub struct Wts {
    robot: usize,
    names: Vec<Ident>,
    index: HashMap<Ident, usize>,
    initial: usize,
    /// Outgoing edges per state, sorted by destination.
    succ: Vec<Vec<(usize, f64)>>,
    /// Incoming edges per state, sorted by source.
    pred: Vec<Vec<(usize, f64)>>,
}

/// On-disk form of a [`Wts`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WtsDoc {
    pub robot: usize,
    pub states: Vec<Ident>,
    pub initial: Ident,
    pub edges: Vec<(Ident, Ident, f64)>,
}

impl Wts {
    pub fn new(
        robot: usize,
        states: Vec<Ident>,
        initial: &Ident,
        edges: impl IntoIterator<Item = (Ident, Ident, f64)>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::invalid(format!("robot {robot}: duplicate state {s}")));
            }
        }
        let lookup = |s: &Ident| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::invalid(format!("robot {robot}: unknown state {s}")))
        };
        let initial = lookup(initial)?;
        let mut indexed = Vec::new();
        for (src, dst, w) in edges {
            indexed.push((lookup(&src)?, lookup(&dst)?, w));
        }
        let mut wts = Self::from_indexed(robot, states.len(), initial, indexed)?;
        wts.names = states;
        wts.index = index;
        Ok(wts)
    }

    /// Builds a system whose states are named `0..n` by index.
    pub fn from_indexed(
        robot: usize,
        n_states: usize,
        initial: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n_states == 0 {
            return Err(Error::invalid(format!("robot {robot}: no states")));
        }
        if initial >= n_states {
            return Err(Error::invalid(format!("robot {robot}: initial state out of range")));
        }
        let mut succ = vec![Vec::new(); n_states];
        let mut pred = vec![Vec::new(); n_states];
        for (src, dst, w) in edges {
            if src >= n_states || dst >= n_states {
                return Err(Error::invalid(format!("robot {robot}: edge endpoint out of range")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!(
                    "robot {robot}: edge {src}->{dst} has invalid weight {w}"
                )));
            }
            succ[src].push((dst, w));
            pred[dst].push((src, w));
        }
        for (q, list) in succ.iter_mut().enumerate() {
            list.sort_by_key(|&(d, _)| d);
            if list.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::invalid(format!("robot {robot}: duplicate edge out of state {q}")));
            }
        }
        for list in &mut pred {
            list.sort_by_key(|&(s, _)| s);
        }
        let names: Vec<Ident> = (0..n_states).map(Ident::from).collect();
        let index = names.iter().cloned().zip(0..).collect();
        Ok(Self {
            robot,
            names,
            index,
            initial,
            succ,
            pred,
        })
    }

    pub fn from_doc(doc: WtsDoc) -> Result<Self> {
        Self::new(doc.robot, doc.states, &doc.initial, doc.edges)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WtsDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        Self::from_doc(doc)
    }

    pub fn to_doc(&self) -> WtsDoc {
        let edges = self
            .succ
            .iter()
            .enumerate()
            .flat_map(|(s, list)| {
                list.iter()
                    .map(move |&(d, w)| (self.names[s].clone(), self.names[d].clone(), w))
            })
            .collect();
        WtsDoc {
            robot: self.robot,
            states: self.names.clone(),
            initial: self.names[self.initial].clone(),
            edges,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("wts document serializes")
    }

    /// Re-labels the robot index this system belongs to.
    pub fn with_robot(mut self, robot: usize) -> Self {
        self.robot = robot;
        self
    }

    pub fn robot(&self) -> usize {
        self.robot
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn name(&self, q: usize) -> &Ident {
        &self.names[q]
    }

    pub fn names(&self) -> &[Ident] {
        &self.names
    }

    pub fn index_of(&self, name: &Ident) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn successors(&self, q: usize) -> &[(usize, f64)] {
        &self.succ[q]
    }

    pub fn predecessors(&self, q: usize) -> &[(usize, f64)] {
        &self.pred[q]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<f64> {
        let list = &self.succ[from];
        list.binary_search_by_key(&to, |&(d, _)| d)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn has_self_loop(&self, q: usize) -> bool {
        self.weight(q, q).is_some()
    }

    fn resolve(&self, q: &Ident) -> Result<usize> {
        self.index_of(q)
            .ok_or_else(|| Error::invalid(format!("robot {}: unknown state {q}", self.robot)))
    }

    /// States reachable from `q` in exactly one move.
    pub fn reachable_set(&self, q: &Ident) -> Result<Vec<Ident>> {
        let q = self.resolve(q)?;
        Ok(self.succ[q].iter().map(|&(d, _)| self.names[d].clone()).collect())
    }

    /// Minimum-weight path from `from` to `to`, or `None` when `to` is
    /// unreachable.
    pub fn shortest_path(&self, from: &Ident, to: &Ident) -> Result<Option<Vec<Ident>>> {
        let (from, to) = (self.resolve(from)?, self.resolve(to)?);
        Ok(self
            .shortest_path_indexed(from, to)
            .map(|(path, _)| path.into_iter().map(|q| self.names[q].clone()).collect()))
    }

    /// Index-level Dijkstra; ties in the frontier are expanded lowest state
    /// index first.
    pub fn shortest_path_indexed(&self, from: usize, to: usize) -> Option<(Vec<usize>, f64)> {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(Frontier { cost: 0.0, node: from });
        while let Some(Frontier { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if node == to {
                break;
            }
            for &(next, w) in &self.succ[node] {
                let cand = cost + w;
                if cand < dist[next] {
                    dist[next] = cand;
                    parent[next] = node;
                    heap.push(Frontier { cost: cand, node: next });
                }
            }
        }
        if dist[to].is_infinite() {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Some((path, dist[to]))
    }

    /// Shortest-path tree towards `target`: for every state, its distance to
    /// `target` and the next state on one shortest path.
    pub fn paths_to(&self, target: usize) -> PathsTo {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut next = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[target] = 0.0;
        heap.push(Frontier { cost: 0.0, node: target });
        while let Some(Frontier { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &(prev, w) in &self.pred[node] {
                let cand = cost + w;
                if cand < dist[prev] {
                    dist[prev] = cand;
                    next[prev] = Some(node);
                    heap.push(Frontier { cost: cand, node: prev });
                }
            }
        }
        PathsTo { target, dist, next }
    }
}

/// Single-target shortest-path tree produced by [`Wts::paths_to`].
#[derive(Clone, Debug)]
pub struct PathsTo {
    pub target: usize,
    pub dist: Vec<f64>,
    pub next: Vec<Option<usize>>,
}

impl PathsTo {
    /// Second state of a shortest path from `from` to the target. `None` when
    /// the target is unreachable or `from` already is the target.
    pub fn second(&self, from: usize) -> Option<usize> {
        self.next[from]
    }
}

/// Min-heap entry ordered by cost, then by lowest index.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frontier {
    pub cost: f64,
    pub node: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}
