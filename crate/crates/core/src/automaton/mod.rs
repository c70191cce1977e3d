//! Büchi automata with symbolic guards over region propositions.

mod distance;
mod guard;
mod nba;

pub use distance::{distance_matrix, feasible_finals, pick_symbol, DistanceMatrix, LMap, INF};
pub use guard::{guard_sat, Conjunct, Guard};
pub use nba::{parse_nba, prune_infeasible, Nba, NbaDoc, Transition, TransitionDoc};
