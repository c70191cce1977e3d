//! Sampling-based synthesis over the implicit product of the team and the
//! automaton.

mod config;
mod construct;
mod problem;
mod sampler;
mod synth;
mod tree;

pub use config::{BiasSchedule, PlannerConfig, RewirePolicy, SamplerConfig, TargetPolicy};
pub use construct::{construct_tree, Goal, TreeBuilder, TreeOutcome};
pub use problem::Problem;
pub use sampler::{densities, draw_node, f_new_vector, f_rand_masses, f_rand_vector, sample, towards, Densities};
pub use synth::{synthesize, tree_rng, Plan, PlanStats, Synthesis};
pub use tree::{Mode, NodeId, ProductState, Tree};
