#![allow(dead_code)]

use stylus::harness::instances::{Instance, InstanceSpec, NbaSpec, WtsSpec};
use stylus::oracle::{build_explicit_pba, optimal_plan_exact, DEFAULT_CAP};

/// Largest explicit product allowed for desk-scale instances.
pub const DESK_PBA_CAP: usize = 6144;

fn desk_spec(seed: u64) -> InstanceSpec {
    let robots = 1 + (seed % 2) as usize;
    let wts = match seed % 3 {
        0 => WtsSpec::Grid { rows: 2, cols: 2 + (seed % 2) as usize },
        _ if robots == 1 => WtsSpec::Random { states: 6 + (seed % 11) as usize, avg_degree: 3.0 },
        _ => WtsSpec::Random { states: 4 + (seed % 5) as usize, avg_degree: 2.5 },
    };
    let nba = if seed % 5 == 4 {
        NbaSpec::Patrol
    } else {
        NbaSpec::Random { states: 3 + (seed % 6) as usize, finals: 1 + (seed % 2) as usize, density: 0.3 }
    };
    InstanceSpec { robots, wts, nba, weights: (1.0, 10.0), seed }
}

/// Random desk-scale instances: one or two robots with at most 16 states
/// each, at most 25 automaton states, explicit product within
/// [`DESK_PBA_CAP`]. Returns `n_feasible` instances that have a plan and up
/// to `n_infeasible` that do not, with the optimal cost of each.
pub fn desk_instances(n_feasible: usize, n_infeasible: usize) -> Vec<(Instance, Option<f64>)> {
    let (mut yes, mut no) = (Vec::new(), Vec::new());
    for seed in 0.. {
        if yes.len() == n_feasible && no.len() >= n_infeasible {
            break;
        }
        let inst = desk_spec(seed).build().unwrap();
        assert!(inst.team.robots().iter().all(|w| w.len() <= 16) && inst.nba.len() <= 25);
        let pba = build_explicit_pba(&inst.team, &inst.nba, DEFAULT_CAP).unwrap();
        if pba.len() > DESK_PBA_CAP {
            continue;
        }
        match optimal_plan_exact(&pba, 0.5) {
            Some(p) if yes.len() < n_feasible => yes.push((inst, Some(p.j_total))),
            None if no.len() < n_infeasible => no.push((inst, None)),
            _ => {}
        }
    }
    yes.extend(no);
    yes
}
