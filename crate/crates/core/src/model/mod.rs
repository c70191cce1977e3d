//! Robot transition systems and the team they form.

mod generate;
mod team;
mod wts;

pub use generate::{generate_grid, generate_random_wts, WeightModel};
pub use team::{Ap, Team, TeamState};
pub use wts::{PathsTo, Wts, WtsDoc};
pub(crate) use wts::Frontier;
