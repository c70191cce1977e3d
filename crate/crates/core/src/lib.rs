//! Sampling-based optimal control synthesis for multi-robot teams under
//! global temporal-logic tasks.
//!
//! The crate is split the same way the synthesis pipeline is:
//!
//! * [`model`] holds robot mobility models (weighted transition systems) and
//!   the implicit team product built from them.
//! * [`automaton`] ingests Büchi automata with symbolic DNF guards, prunes
//!   transitions no team can ever enable, and computes the hop metric used to
//!   steer sampling.
//! * [`planner`] grows trees over the (never materialized) product automaton
//!   and assembles prefix–suffix plans.
//! * [`oracle`] builds the explicit product at desk scale, solves it exactly
//!   and checks lasso plans.
//! * [`harness`] drives seeded experiment batches and writes CSV.

pub mod automaton;
pub mod error;
pub mod harness;
mod ident;
pub mod model;
pub mod oracle;
pub mod planner;

pub use error::{Error, Result};
pub use ident::Ident;
