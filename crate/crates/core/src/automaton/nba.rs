use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::guard::{Conjunct, Guard, GuardDoc};
use crate::model::Ap;
use crate::{Error, Ident, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub guard: Guard,
}

/// Nondeterministic Büchi automaton over region propositions. States are
/// addressed by index; `name` maps back to the input ids.
#[derive(Clone, Debug)]
pub struct Nba {
    names: Vec<Ident>,
    index: HashMap<Ident, usize>,
    initial: Vec<usize>,
    finals: Vec<usize>,
    transitions: Vec<Transition>,
    lookup: HashMap<(usize, usize), usize>,
    pruned: Option<Pruned>,
}

#[derive(Clone, Debug)]
struct Pruned {
    n_robots: usize,
    transitions: Vec<Transition>,
    lookup: HashMap<(usize, usize), usize>,
    out: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbaDoc {
    pub states: Vec<Ident>,
    pub initial: Vec<Ident>,
    pub finals: Vec<Ident>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: Ident,
    pub to: Ident,
    guard: GuardDoc,
}

fn index_transitions(ts: &[Transition]) -> HashMap<(usize, usize), usize> {
    ts.iter().enumerate().map(|(i, t)| ((t.from, t.to), i)).collect()
}

impl Nba {
    /// Builds an automaton from indexed parts. Guards on repeated
    /// `(from, to)` pairs are merged by disjunction; unsatisfiable guards
    /// are dropped.
    pub fn new(
        names: Vec<Ident>,
        initial: Vec<usize>,
        finals: Vec<usize>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, s) in names.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate NBA state {s}")));
            }
        }
        if initial.is_empty() {
            return Err(Error::invalid("NBA has no initial state"));
        }
        let check = |q: usize| -> Result<usize> {
            if q < n {
                Ok(q)
            } else {
                Err(Error::invalid(format!("NBA state index {q} out of range")))
            }
        };
        let mut initial = initial.into_iter().map(check).collect::<Result<Vec<_>>>()?;
        let mut finals = finals.into_iter().map(check).collect::<Result<Vec<_>>>()?;
        initial.sort_unstable();
        initial.dedup();
        finals.sort_unstable();
        finals.dedup();

        let mut merged: Vec<Transition> = Vec::new();
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        for t in transitions {
            check(t.from)?;
            check(t.to)?;
            let guard = Guard::normalized(t.guard.dnf);
            match lookup.get(&(t.from, t.to)) {
                Some(&i) => {
                    let g = std::mem::take(&mut merged[i].guard);
                    merged[i].guard = g.or(guard);
                }
                None => {
                    lookup.insert((t.from, t.to), merged.len());
                    merged.push(Transition { guard, ..t });
                }
            }
        }
        merged.retain(|t| !t.guard.is_false());
        let lookup = index_transitions(&merged);
        Ok(Self {
            names,
            index,
            initial,
            finals,
            transitions: merged,
            lookup,
            pruned: None,
        })
    }

    pub fn from_doc(doc: NbaDoc) -> Result<Self> {
        let index: HashMap<&Ident, usize> = doc.states.iter().zip(0..).collect();
        let resolve = |q: &Ident, at: String| -> Result<usize> {
            index
                .get(q)
                .copied()
                .ok_or_else(|| Error::parse(at, format!("unknown state {q}")))
        };
        let initial = doc
            .initial
            .iter()
            .enumerate()
            .map(|(i, q)| resolve(q, format!("initial[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let finals = doc
            .finals
            .iter()
            .enumerate()
            .map(|(i, q)| resolve(q, format!("finals[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for (i, t) in doc.transitions.iter().enumerate() {
            let from = resolve(&t.from, format!("transitions[{i}].from"))?;
            let to = resolve(&t.to, format!("transitions[{i}].to"))?;
            let guard = match &t.guard {
                GuardDoc::Const(s) if s == "true" => Guard::top(),
                GuardDoc::Const(s) if s == "false" => Guard::bottom(),
                GuardDoc::Const(s) => {
                    return Err(Error::parse(
                        format!("transitions[{i}].guard"),
                        format!("expected \"true\", \"false\" or an object, found {s:?}"),
                    ))
                }
                GuardDoc::Dnf { dnf } => Guard {
                    dnf: dnf
                        .iter()
                        .map(|c| {
                            let aps = |v: &[(usize, Ident)]| {
                                v.iter().map(|(r, q)| Ap::new(*r, q.clone())).collect::<Vec<_>>()
                            };
                            Conjunct::new(aps(&c.pos), aps(&c.neg))
                        })
                        .collect(),
                },
            };
            transitions.push(Transition { from, to, guard });
        }
        if initial.is_empty() {
            return Err(Error::parse("initial", "at least one initial state is required"));
        }
        Self::new(doc.states, initial, finals, transitions).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::parse("states", m),
            e => e,
        })
    }

    pub fn to_doc(&self) -> NbaDoc {
        let name = |q: &usize| self.names[*q].clone();
        NbaDoc {
            states: self.names.clone(),
            initial: self.initial.iter().map(name).collect(),
            finals: self.finals.iter().map(name).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: name(&t.from),
                    to: name(&t.to),
                    guard: t.guard.to_doc(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("NBA serializes")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, q: usize) -> &Ident {
        &self.names[q]
    }

    pub fn names(&self) -> &[Ident] {
        &self.names
    }

    pub fn index_of(&self, q: &Ident) -> Option<usize> {
        self.index.get(q).copied()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.binary_search(&q).is_ok()
    }

    /// Transitions in input order, as parsed.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn guard(&self, from: usize, to: usize) -> Option<&Guard> {
        self.lookup.get(&(from, to)).map(|&i| &self.transitions[i].guard)
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned.is_some()
    }

    /// Robot count the automaton was pruned for.
    pub fn n_robots(&self) -> Option<usize> {
        self.pruned.as_ref().map(|p| p.n_robots)
    }

    /// Feasible transitions after pruning; all transitions before.
    pub fn feasible_transitions(&self) -> &[Transition] {
        match &self.pruned {
            Some(p) => &p.transitions,
            None => &self.transitions,
        }
    }

    pub fn feasible_guard(&self, from: usize, to: usize) -> Option<&Guard> {
        match &self.pruned {
            Some(p) => p.lookup.get(&(from, to)).map(|&i| &p.transitions[i].guard),
            None => self.guard(from, to),
        }
    }

    /// Indices into [`Nba::feasible_transitions`] leaving `q`, by target.
    pub fn feasible_out(&self, q: usize) -> Vec<usize> {
        match &self.pruned {
            Some(p) => p.out[q].clone(),
            None => out_lists(self.len(), &self.transitions).swap_remove(q),
        }
    }

    /// Largest robot index mentioned by any guard.
    pub fn max_robot(&self) -> Option<usize> {
        self.transitions.iter().filter_map(|t| t.guard.max_robot()).max()
    }
}

fn out_lists(n: usize, ts: &[Transition]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for (i, t) in ts.iter().enumerate() {
        out[t.from].push(i);
    }
    for o in &mut out {
        o.sort_by_key(|&i| ts[i].to);
    }
    out
}

pub fn parse_nba(text: &str) -> Result<Nba> {
    let doc: NbaDoc = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    Nba::from_doc(doc)
}

/// Removes every conjunct that would put one robot in two regions, then
/// every transition left without conjuncts. The original transitions stay
/// available through [`Nba::transitions`].
pub fn prune_infeasible(nba: &Nba, n_robots: usize) -> Result<Nba> {
    if let Some(r) = nba.max_robot() {
        if r >= n_robots {
            return Err(Error::invalid(format!(
                "guards mention robot {r} but the team has {n_robots} robots"
            )));
        }
    }
    let transitions: Vec<Transition> = nba
        .transitions
        .iter()
        .filter_map(|t| {
            let guard = t.guard.feasible_part();
            (!guard.is_false()).then(|| Transition { guard, ..t.clone() })
        })
        .collect();
    let mut out = nba.clone();
    out.pruned = Some(Pruned {
        n_robots,
        lookup: index_transitions(&transitions),
        out: out_lists(nba.len(), &transitions),
        transitions,
    });
    Ok(out)
}
