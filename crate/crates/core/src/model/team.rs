use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::wts::{PathsTo, Wts};
use crate::{Error, Ident, Result};

/// Atomic proposition "robot `robot` is in region `region`".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ap {
    pub robot: usize,
    pub region: Ident,
}

impl Ap {
    pub fn new(robot: usize, region: impl Into<Ident>) -> Self {
        Self {
            robot,
            region: region.into(),
        }
    }
}

impl fmt::Display for Ap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi_{}^{}", self.robot, self.region)
    }
}

/// Team configuration: one region index per robot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamState(pub Vec<usize>);

impl Deref for TeamState {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for TeamState {
    fn from(v: Vec<usize>) -> Self {
        TeamState(v)
    }
}

/// The robot team. The synchronous product of the individual systems is
/// never enumerated; everything here works componentwise.
pub struct Team {
    robots: Vec<Wts>,
    paths: RwLock<HashMap<(usize, usize), Arc<PathsTo>>>,
}

impl Clone for Team {
    fn clone(&self) -> Self {
        Self {
            robots: self.robots.clone(),
            paths: RwLock::default(),
        }
    }
}

impl fmt::Debug for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Team").field("robots", &self.robots).finish()
    }
}

impl Team {
    /// Robots are ordered by their `robot` field, which must cover `0..N`.
    pub fn new(mut robots: Vec<Wts>) -> Result<Self> {
        if robots.is_empty() {
            return Err(Error::invalid("a team needs at least one robot"));
        }
        robots.sort_by_key(Wts::robot);
        for (i, w) in robots.iter().enumerate() {
            if w.robot() != i {
                return Err(Error::invalid(format!(
                    "robot ids must be 0..{} without gaps, found {}",
                    robots.len(),
                    w.robot()
                )));
            }
        }
        Ok(Self {
            robots,
            paths: RwLock::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn robot(&self, i: usize) -> &Wts {
        &self.robots[i]
    }

    pub fn robots(&self) -> &[Wts] {
        &self.robots
    }

    pub fn initial_state(&self) -> TeamState {
        TeamState(self.robots.iter().map(Wts::initial).collect())
    }

    pub fn is_valid(&self, q: &TeamState) -> bool {
        q.len() == self.len() && q.iter().zip(&self.robots).all(|(&r, w)| r < w.len())
    }

    /// Team-level move weight, or `None` if some robot lacks the edge.
    pub fn step_weight(&self, q: &TeamState, next: &TeamState) -> Option<f64> {
        self.step_weight_slices(q, next)
    }

    pub fn step_weight_slices(&self, q: &[usize], next: &[usize]) -> Option<f64> {
        let mut total = 0.0;
        for (i, w) in self.robots.iter().enumerate() {
            total += w.weight(q[i], next[i])?;
        }
        Some(total)
    }

    /// Sum of the individual move weights; errors if any robot cannot make
    /// its component of the move.
    pub fn pts_step_weight(&self, q: &TeamState, next: &TeamState) -> Result<f64> {
        if !self.is_valid(q) || !self.is_valid(next) {
            return Err(Error::invalid("team state does not match the team"));
        }
        let mut total = 0.0;
        for (i, w) in self.robots.iter().enumerate() {
            total += w.weight(q[i], next[i]).ok_or_else(|| Error::NotATransition {
                robot: i,
                from: w.name(q[i]).clone(),
                to: w.name(next[i]).clone(),
            })?;
        }
        Ok(total)
    }

    /// Propositions true at `q`: exactly one per robot.
    pub fn team_label(&self, q: &TeamState) -> Vec<Ap> {
        q.iter()
            .enumerate()
            .map(|(i, &r)| Ap::new(i, self.robots[i].name(r).clone()))
            .collect()
    }

    /// Region name robot `i` occupies in `q`.
    pub fn region_name(&self, q: &TeamState, i: usize) -> &Ident {
        self.robots[i].name(q[i])
    }

    pub fn state_from_names(&self, names: &[Ident]) -> Result<TeamState> {
        if names.len() != self.len() {
            return Err(Error::invalid("team state length differs from team size"));
        }
        names
            .iter()
            .zip(&self.robots)
            .map(|(n, w)| {
                w.index_of(n)
                    .ok_or_else(|| Error::invalid(format!("robot {}: unknown region {n}", w.robot())))
            })
            .collect::<Result<Vec<_>>>()
            .map(TeamState)
    }

    pub fn state_names(&self, q: &TeamState) -> Vec<Ident> {
        q.iter()
            .enumerate()
            .map(|(i, &r)| self.robots[i].name(r).clone())
            .collect()
    }

    /// Memoized shortest-path tree of robot `robot` towards `target`.
    pub fn paths_to(&self, robot: usize, target: usize) -> Arc<PathsTo> {
        if let Some(t) = self.paths.read().unwrap().get(&(robot, target)) {
            return Arc::clone(t);
        }
        let tree = Arc::new(self.robots[robot].paths_to(target));
        self.paths
            .write()
            .unwrap()
            .entry((robot, target))
            .or_insert(tree)
            .clone()
    }

    /// log10 of the number of team states.
    pub fn log10_size(&self) -> f64 {
        self.robots.iter().map(|w| (w.len() as f64).log10()).sum()
    }
}
