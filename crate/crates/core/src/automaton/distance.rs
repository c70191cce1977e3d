use std::collections::VecDeque;

use super::nba::Nba;
use crate::{Error, Ident, Result};

/// Marker for "no path".
pub const INF: u32 = u32::MAX;

/// Hop distances on the feasible transition graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
    dcyc: Vec<u32>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Path distance; `d(q, q) = 0`, [`INF`] when unreachable.
    pub fn d(&self, from: usize, to: usize) -> u32 {
        self.d[from * self.n + to]
    }

    /// Length of the shortest closed walk through `q`, at least 1.
    pub fn dcyc(&self, q: usize) -> u32 {
        self.dcyc[q]
    }

    pub fn row(&self, from: usize) -> &[u32] {
        &self.d[from * self.n..(from + 1) * self.n]
    }
}

/// All-pairs BFS over transitions with a nonempty feasible guard.
pub fn distance_matrix(nba: &Nba) -> DistanceMatrix {
    let n = nba.len();
    let mut adj = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for t in nba.feasible_transitions() {
        adj[t.from].push(t.to);
        if t.from == t.to {
            self_loop[t.from] = true;
        }
    }
    let mut d = vec![INF; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut d[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v] == INF {
                    row[v] = row[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    let dcyc = (0..n)
        .map(|q| {
            if self_loop[q] {
                return 1;
            }
            adj[q]
                .iter()
                .map(|&s| d[s * n + q])
                .filter(|&x| x != INF)
                .min()
                .map_or(INF, |x| x + 1)
        })
        .collect();
    DistanceMatrix { n, d, dcyc }
}

/// Finals reachable from `q0` that lie on a feasible cycle, in index order.
pub fn feasible_finals(nba: &Nba, dm: &DistanceMatrix, q0: usize) -> Vec<usize> {
    nba.finals()
        .iter()
        .copied()
        .filter(|&f| dm.d(q0, f) != INF && dm.dcyc(f) != INF)
        .collect()
}

/// Region each robot is asked to occupy, or `None` when unconstrained.
pub type LMap = Vec<Option<Ident>>;

/// Positive literals of the first feasible conjunct on `from -> to`.
pub fn pick_symbol(nba: &Nba, from: usize, to: usize) -> Result<LMap> {
    let n_robots = nba
        .n_robots()
        .ok_or_else(|| Error::invalid("pick_symbol needs a pruned automaton"))?;
    let conj = nba
        .feasible_guard(from, to)
        .and_then(|g| g.dnf.first())
        .ok_or_else(|| Error::invalid(format!("no feasible symbol on {from} -> {to}")))?;
    let mut l = vec![None; n_robots];
    for a in &conj.pos {
        l[a.robot] = Some(a.region.clone());
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{parse_nba, prune_infeasible};

    fn chain() -> Nba {
        let nba = parse_nba(
            r#"{"states":[0,1,2],"initial":[0],"finals":[2],"transitions":[
                {"from":0,"to":1,"guard":"true"},{"from":1,"to":2,"guard":"true"},
                {"from":2,"to":2,"guard":"true"}]}"#,
        )
        .unwrap();
        prune_infeasible(&nba, 1).unwrap()
    }

    #[test]
    fn chain_distances() {
        let dm = distance_matrix(&chain());
        assert_eq!(dm.d(0, 2), 2);
        assert_eq!(dm.d(2, 0), INF);
        assert_eq!(dm.d(1, 1), 0);
        assert_eq!(dm.dcyc(2), 1);
        assert_eq!(dm.dcyc(0), INF);
    }

    #[test]
    fn finals_need_a_cycle() {
        let nba = chain();
        let dm = distance_matrix(&nba);
        assert_eq!(feasible_finals(&nba, &dm, 0), vec![2]);
        let nba = prune_infeasible(
            &parse_nba(
                r#"{"states":[0,1],"initial":[0],"finals":[1],"transitions":[
                    {"from":0,"to":1,"guard":"true"}]}"#,
            )
            .unwrap(),
            1,
        )
        .unwrap();
        let dm = distance_matrix(&nba);
        assert!(feasible_finals(&nba, &dm, 0).is_empty());
    }

    #[test]
    fn symbol_maps_positive_literals() {
        let nba = prune_infeasible(
            &parse_nba(
                r#"{"states":[0,1],"initial":[0],"finals":[1],"transitions":[
                    {"from":0,"to":1,"guard":{"dnf":[
                        {"pos":[[0,"a"],[0,"b"]]},
                        {"pos":[[0,"r6"]],"neg":[[1,"r2"]]},
                        {"pos":[[1,"r1"]]}]}}]}"#,
            )
            .unwrap(),
            3,
        )
        .unwrap();
        let l = pick_symbol(&nba, 0, 1).unwrap();
        assert_eq!(l, vec![Some(Ident::from("r6")), None, None]);
        assert_eq!(pick_symbol(&nba, 0, 1).unwrap(), l);
        assert!(pick_symbol(&nba, 1, 0).is_err());
    }
}
