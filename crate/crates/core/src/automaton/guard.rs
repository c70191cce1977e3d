use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Ap;
use crate::Ident;

/// Conjunction of positive and negated region propositions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Conjunct {
    pub pos: Vec<Ap>,
    pub neg: Vec<Ap>,
}

impl Conjunct {
    pub fn new(pos: impl IntoIterator<Item = Ap>, neg: impl IntoIterator<Item = Ap>) -> Self {
        let mut c = Self {
            pos: pos.into_iter().collect(),
            neg: neg.into_iter().collect(),
        };
        c.pos.sort();
        c.pos.dedup();
        c.neg.sort();
        c.neg.dedup();
        c
    }

    pub fn is_true(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn is_contradictory(&self) -> bool {
        self.pos.iter().any(|a| self.neg.binary_search(a).is_ok())
    }

    /// False when some robot is asked to be in two regions at once.
    pub fn is_feasible(&self) -> bool {
        // pos is sorted by robot, so clashes are adjacent
        self.pos
            .windows(2)
            .all(|w| w[0].robot != w[1].robot || w[0].region == w[1].region)
    }

    pub fn sat(&self, label: &[Ap]) -> bool {
        self.pos.iter().all(|a| label.contains(a)) && !self.neg.iter().any(|a| label.contains(a))
    }

    pub fn max_robot(&self) -> Option<usize> {
        self.pos.iter().chain(&self.neg).map(|a| a.robot).max()
    }
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return f.write_str("true");
        }
        let mut first = true;
        for (a, negated) in self.pos.iter().map(|a| (a, false)).chain(self.neg.iter().map(|a| (a, true))) {
            if !first {
                f.write_str(" & ")?;
            }
            first = false;
            if negated {
                f.write_str("!")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Guard in disjunctive normal form. An empty disjunction is `false`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Guard {
    pub dnf: Vec<Conjunct>,
}

impl Guard {
    pub fn top() -> Self {
        Self {
            dnf: vec![Conjunct::default()],
        }
    }

    pub fn bottom() -> Self {
        Self::default()
    }

    /// Drops contradictory conjuncts and repeated ones, keeping first
    /// occurrences in order.
    pub fn normalized(dnf: impl IntoIterator<Item = Conjunct>) -> Self {
        let mut out: Vec<Conjunct> = Vec::new();
        for c in dnf {
            if !c.is_contradictory() && !out.contains(&c) {
                out.push(c);
            }
        }
        Self { dnf: out }
    }

    pub fn is_false(&self) -> bool {
        self.dnf.is_empty()
    }

    pub fn or(mut self, other: Guard) -> Guard {
        self.dnf.extend(other.dnf);
        Guard::normalized(self.dnf)
    }

    /// Keeps only the conjuncts some team label could satisfy.
    pub fn feasible_part(&self) -> Guard {
        Guard {
            dnf: self.dnf.iter().filter(|c| c.is_feasible()).cloned().collect(),
        }
    }

    pub fn max_robot(&self) -> Option<usize> {
        self.dnf.iter().filter_map(Conjunct::max_robot).max()
    }

    /// Single positive literal.
    pub fn lit(a: Ap) -> Self {
        Self {
            dnf: vec![Conjunct::new([a], [])],
        }
    }

    /// Conjunction, distributed back into normal form.
    pub fn and(&self, other: &Guard) -> Guard {
        let mut dnf = Vec::with_capacity(self.dnf.len() * other.dnf.len());
        for a in &self.dnf {
            for b in &other.dnf {
                dnf.push(Conjunct::new(
                    a.pos.iter().chain(&b.pos).cloned(),
                    a.neg.iter().chain(&b.neg).cloned(),
                ));
            }
        }
        Guard::normalized(dnf)
    }

    /// Negation by De Morgan's laws.
    pub fn not(&self) -> Guard {
        let mut acc = Guard::top();
        for c in &self.dnf {
            let flipped = Guard::normalized(
                c.pos
                    .iter()
                    .map(|a| Conjunct::new([], [a.clone()]))
                    .chain(c.neg.iter().map(|a| Conjunct::new([a.clone()], []))),
            );
            acc = acc.and(&flipped);
        }
        acc
    }

    pub(crate) fn to_doc(&self) -> GuardDoc {
        if self.dnf.len() == 1 && self.dnf[0].is_true() {
            return GuardDoc::Const("true".into());
        }
        if self.dnf.is_empty() {
            return GuardDoc::Const("false".into());
        }
        let lits = |v: &[Ap]| v.iter().map(|a| (a.robot, a.region.clone())).collect();
        GuardDoc::Dnf {
            dnf: self
                .dnf
                .iter()
                .map(|c| ConjunctDoc {
                    pos: lits(&c.pos),
                    neg: lits(&c.neg),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dnf.is_empty() {
            return f.write_str("false");
        }
        for (i, c) in self.dnf.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            if self.dnf.len() > 1 && c.pos.len() + c.neg.len() > 1 {
                write!(f, "({c})")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// True iff some conjunct holds under `label`.
pub fn guard_sat(g: &Guard, label: &[Ap]) -> bool {
    g.dnf.iter().any(|c| c.sat(label))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum GuardDoc {
    Const(String),
    Dnf { dnf: Vec<ConjunctDoc> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ConjunctDoc {
    #[serde(default)]
    pub pos: Vec<(usize, Ident)>,
    #[serde(default)]
    pub neg: Vec<(usize, Ident)>,
}
