use std::collections::HashMap;
use std::sync::OnceLock;

use crate::automaton::{distance_matrix, feasible_finals, prune_infeasible, DistanceMatrix, Guard, Nba, INF};
use crate::model::Team;
use crate::{Error, Result};

/// Conjunct with robots and regions resolved to indices.
#[derive(Clone, Debug, Default)]
pub(crate) struct Lits {
    pos: Vec<(u32, u32)>,
    neg: Vec<(u32, u32)>,
}

impl Lits {
    #[inline]
    fn sat(&self, pts: &[usize]) -> bool {
        self.pos.iter().all(|&(r, q)| pts[r as usize] == q as usize)
            && !self.neg.iter().any(|&(r, q)| pts[r as usize] == q as usize)
    }
}

/// A team and a pruned automaton, with everything the sampler looks up on
/// every iteration precomputed. Shared read-only between trees.
pub struct Problem<'a> {
    team: &'a Team,
    nba: Nba,
    dm: DistanceMatrix,
    /// Compiled feasible guards, one entry per feasible transition.
    guards: Vec<Vec<Lits>>,
    /// Per state: feasible `(target, transition)` pairs sorted by target.
    out: Vec<Vec<(usize, usize)>>,
    lookup: HashMap<(usize, usize), usize>,
    /// Region each robot must occupy for the first feasible conjunct.
    lmaps: Vec<Vec<Option<usize>>>,
    decr: Vec<OnceLock<Vec<Vec<usize>>>>,
}

impl<'a> Problem<'a> {
    /// Prunes `nba` for the team and checks that every literal names a
    /// robot of the team and a region of that robot.
    pub fn new(team: &'a Team, nba: &Nba) -> Result<Self> {
        let nba = prune_infeasible(nba, team.len())?;
        for t in nba.transitions() {
            for c in &t.guard.dnf {
                for a in c.pos.iter().chain(&c.neg) {
                    if team.robot(a.robot).index_of(&a.region).is_none() {
                        return Err(Error::invalid(format!(
                            "guard on {} -> {} mentions region {} unknown to robot {}",
                            nba.name(t.from),
                            nba.name(t.to),
                            a.region,
                            a.robot
                        )));
                    }
                }
            }
        }
        let dm = distance_matrix(&nba);
        let compile = |g: &Guard| -> Vec<Lits> {
            let res = |a: &crate::model::Ap| {
                let q = team.robot(a.robot).index_of(&a.region).expect("validated");
                (a.robot as u32, q as u32)
            };
            g.dnf
                .iter()
                .map(|c| Lits {
                    pos: c.pos.iter().map(res).collect(),
                    neg: c.neg.iter().map(res).collect(),
                })
                .collect()
        };
        let feasible = nba.feasible_transitions();
        let guards: Vec<Vec<Lits>> = feasible.iter().map(|t| compile(&t.guard)).collect();
        let lmaps = guards
            .iter()
            .map(|g| {
                let mut l = vec![None; team.len()];
                for &(r, q) in &g[0].pos {
                    l[r as usize] = Some(q as usize);
                }
                l
            })
            .collect();
        let mut out = vec![Vec::new(); nba.len()];
        let mut lookup = HashMap::new();
        for (i, t) in feasible.iter().enumerate() {
            out[t.from].push((t.to, i));
            lookup.insert((t.from, t.to), i);
        }
        for o in &mut out {
            o.sort_unstable();
        }
        let decr = (0..nba.len()).map(|_| OnceLock::new()).collect();
        Ok(Self {
            team,
            nba,
            dm,
            guards,
            out,
            lookup,
            lmaps,
            decr,
        })
    }

    pub fn team(&self) -> &'a Team {
        self.team
    }

    /// The pruned automaton.
    pub fn nba(&self) -> &Nba {
        &self.nba
    }

    pub fn dm(&self) -> &DistanceMatrix {
        &self.dm
    }

    pub fn n_buchi(&self) -> usize {
        self.nba.len()
    }

    pub fn feasible_finals(&self, q0: usize) -> Vec<usize> {
        feasible_finals(&self.nba, &self.dm, q0)
    }

    /// Automaton states reachable from `q` in one step when the team is at
    /// `pts`, in increasing order.
    pub fn buchi_successors(&self, q: usize, pts: &[usize]) -> Vec<usize> {
        self.out[q]
            .iter()
            .filter(|&&(_, t)| self.guards[t].iter().any(|c| c.sat(pts)))
            .map(|&(to, _)| to)
            .collect()
    }

    /// Whether `from -> to` is enabled by the label of `pts`.
    pub fn enabled(&self, from: usize, to: usize, pts: &[usize]) -> bool {
        self.lookup
            .get(&(from, to))
            .is_some_and(|&t| self.guards[t].iter().any(|c| c.sat(pts)))
    }

    /// Required region per robot for the symbol picked on `from -> to`.
    pub fn lmap(&self, from: usize, to: usize) -> Option<&[Option<usize>]> {
        self.lookup.get(&(from, to)).map(|&t| self.lmaps[t].as_slice())
    }

    /// For each state `q`, the feasible successors one hop closer to
    /// `target`. From `target` itself these are the successors that start a
    /// shortest cycle back to it.
    pub fn decr(&self, target: usize) -> &[Vec<usize>] {
        self.decr[target].get_or_init(|| {
            (0..self.nba.len())
                .map(|q| {
                    let want = if q == target {
                        self.dm.dcyc(target)
                    } else {
                        self.dm.d(q, target)
                    };
                    if want == INF {
                        return Vec::new();
                    }
                    self.out[q]
                        .iter()
                        .map(|&(to, _)| to)
                        .filter(|&to| self.dm.d(to, target) == want - 1)
                        .collect()
                })
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_nba;
    use crate::model::Wts;

    fn recurrence() -> (Team, Nba) {
        let w = Wts::new(
            0,
            vec!["j".into(), "e".into(), "x".into()],
            &"x".into(),
            [
                ("x".into(), "j".into(), 1.0),
                ("j".into(), "e".into(), 1.0),
                ("e".into(), "x".into(), 1.0),
            ],
        )
        .unwrap();
        let nba = parse_nba(
            r#"{"states":[0,1,2],"initial":[0],"finals":[2],"transitions":[
            {"from":0,"to":0,"guard":"true"},
            {"from":0,"to":1,"guard":{"dnf":[{"pos":[[0,"j"]]}]}},
            {"from":0,"to":2,"guard":{"dnf":[{"pos":[[0,"j"],[0,"e"]]}]}},
            {"from":1,"to":1,"guard":"true"},
            {"from":1,"to":2,"guard":{"dnf":[{"pos":[[0,"e"]]}]}},
            {"from":2,"to":0,"guard":"true"},
            {"from":2,"to":1,"guard":{"dnf":[{"pos":[[0,"j"]]}]}},
            {"from":2,"to":2,"guard":{"dnf":[{"pos":[[0,"j"],[0,"e"]]}]}}]}"#,
        )
        .unwrap();
        (Team::new(vec![w]).unwrap(), nba)
    }

    #[test]
    fn successors_follow_labels() {
        let (team, nba) = recurrence();
        let p = Problem::new(&team, &nba).unwrap();
        let j = team.robot(0).index_of(&"j".into()).unwrap();
        let e = team.robot(0).index_of(&"e".into()).unwrap();
        assert_eq!(p.buchi_successors(0, &[j]), vec![0, 1]);
        assert_eq!(p.buchi_successors(1, &[e]), vec![1, 2]);
        assert_eq!(p.buchi_successors(2, &[j]), vec![0, 1]);
        assert!(p.enabled(1, 2, &[e]));
        assert!(!p.enabled(0, 2, &[j]));
    }

    #[test]
    fn decrements() {
        let (team, nba) = recurrence();
        let p = Problem::new(&team, &nba).unwrap();
        let decr = p.decr(2);
        assert_eq!(decr[0], vec![1]);
        assert_eq!(decr[1], vec![2]);
        // dcyc(2) = 2 through 1 or 0 -> 1; only 1 is one hop from 2
        assert_eq!(decr[2], vec![1]);
        assert_eq!(p.lmap(1, 2).unwrap(), &[Some(team.robot(0).index_of(&"e".into()).unwrap())]);
    }

    #[test]
    fn unknown_region_is_rejected() {
        let (team, _) = recurrence();
        let nba = parse_nba(
            r#"{"states":[0],"initial":[0],"finals":[0],"transitions":[
            {"from":0,"to":0,"guard":{"dnf":[{"neg":[[0,"nowhere"]]}]}}]}"#,
        )
        .unwrap();
        assert!(Problem::new(&team, &nba).is_err());
    }
}
