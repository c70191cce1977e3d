mod common;

use num_bigint::BigUint;

use stylus::harness::instances::{Instance, InstanceSpec, NbaSpec, WtsSpec};
use stylus::harness::*;
use stylus::planner::BiasSchedule;

/// Rows of the scaling table: robots, states per robot, printed size.
/// Every row uses the 21-state patrol automaton.
const TABLE: [(usize, usize, usize, &str); 6] = [
    (1, 10, 10, "10^3"),
    (10, 25, 40, "10^31"),
    (9, 3, 3, "10^10"),
    (10, 10, 10, "10^21"),
    (10, 50, 50, "10^35"),
    (10, 100, 100, "10^41"),
];

fn grid_patrol(robots: usize, rows: usize, cols: usize, seed: u64) -> Instance {
    InstanceSpec {
        robots,
        wts: WtsSpec::Grid { rows, cols },
        nba: NbaSpec::Patrol,
        weights: (1.0, 10.0),
        seed,
    }
    .build()
    .unwrap()
}

#[test]
fn scaling_table_exponents() {
    for (robots, rows, cols, want) in TABLE {
        let inst = grid_patrol(robots, rows, cols, 0);
        assert_eq!(inst.nba.len(), 21);
        assert_eq!(size_exponent(log10_product_size(&inst)), want, "{robots} x {}", rows * cols);
    }
    // one robot on 1000 states: the formula gives 10^4, not 10^3
    assert_eq!(size_exponent(log10_product_size(&grid_patrol(1, 25, 40, 0))), "10^4");
}

/// `round(log10 x) = k` iff `10^(2k-1) <= x^2 < 10^(2k+1)`, checked on exact
/// integers.
fn exact_exponent(robots: usize, states: usize, buchi: usize) -> u32 {
    let size = BigUint::from(states).pow(robots as u32) * BigUint::from(buchi);
    let sq = &size * &size;
    let ten = BigUint::from(10u32);
    (0..).find(|&k: &u32| sq < ten.pow(2 * k + 1)).unwrap()
}

#[test]
fn exponents_agree_with_exact_arithmetic() {
    for (robots, rows, cols, want) in TABLE {
        let k = exact_exponent(robots, rows * cols, 21);
        assert_eq!(format!("10^{k}"), want);
    }
    for robots in [1, 2, 5, 10, 50, 100] {
        for states in [9, 100, 1000, 2500, 10000] {
            let lg = robots as f64 * (states as f64).log10() + 21f64.log10();
            assert_eq!(size_exponent(lg), format!("10^{}", exact_exponent(robots, states, 21)));
        }
    }
}

fn desk_config(mode: ExperimentMode, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        mode,
        trials,
        master_seed: 42,
        timing: false,
        ..Default::default()
    }
}

fn desk(n: usize) -> Vec<Instance> {
    common::desk_instances(n, 1).into_iter().map(|(i, _)| i).collect()
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let insts = desk(3);
    let mut outs = Vec::new();
    for threads in [Some(1), Some(2)] {
        let mut cfg = desk_config(ExperimentMode::Benchmark, 4);
        cfg.threads = threads;
        let rows = run_benchmark(&cfg, &insts).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.wall_ms.is_none()));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        outs.push(buf);
    }
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs.pop().unwrap()).unwrap();
    assert!(text.starts_with("instance,trial,seed,"));
    assert!(text.contains(",infeasible,"));
}

#[test]
fn seeds_follow_the_master_seed() {
    let cfg = desk_config(ExperimentMode::Benchmark, 3);
    let rows = run_benchmark(&cfg, &desk(1)[..1]).unwrap();
    assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![42, 43, 40]);
    assert_eq!(rows.iter().map(|r| r.trial).collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn time_limit_gives_dnf_rows() {
    let mut cfg = desk_config(ExperimentMode::Benchmark, 2);
    cfg.planner.time_limit_ms = Some(0);
    let inst = grid_patrol(4, 10, 10, 3);
    let rows = run_benchmark(&cfg, &[inst]).unwrap();
    assert!(rows.iter().all(|r| r.status == Status::Dnf && r.j_total.is_none()));
}

#[test]
fn success_curve_bounds() {
    // an instance whose optimal prefix needs at least two moves
    let inst = common::desk_instances(12, 0)
        .into_iter()
        .map(|(i, _)| i)
        .find(|i| {
            let cfg = ExperimentConfig { n_max: vec![1], ..desk_config(ExperimentMode::SuccessCurve, 1) };
            run_success_curve(&cfg, i).unwrap()[0].k >= 2
        })
        .expect("a deep enough instance");
    let mut cfg = desk_config(ExperimentMode::SuccessCurve, 10);
    cfg.n_max = vec![1, 20, 3000];
    let rows = run_success_curve(&cfg, &inst).unwrap();
    assert_eq!(rows.len(), 3);
    // one iteration cannot hold a witness of two or more moves
    assert_eq!(rows[0].p_y_ge_k, 0.0);
    for r in &rows {
        assert!(r.pi_suc >= r.p_y_ge_k, "{r:?}");
    }
    let last = rows.last().unwrap();
    assert_eq!((last.pi_suc, last.p_y_ge_k, last.plan_rate), (1.0, 1.0, 1.0));
}

#[test]
fn success_curve_needs_a_plan() {
    let (inst, opt) = common::desk_instances(0, 1).pop().unwrap();
    assert!(opt.is_none());
    assert!(run_success_curve(&desk_config(ExperimentMode::SuccessCurve, 1), &inst).is_err());
}

#[test]
fn uniform_against_uniform_is_a_tie() {
    let inst = grid_patrol(1, 3, 3, 5);
    let mut cfg = desk_config(ExperimentMode::CompareBias, 4);
    cfg.planner.sampler.bias_schedule = BiasSchedule::Uniform;
    let r = run_compare_bias(&cfg, &inst).unwrap();
    let (a, b) = r.trials.split_at(4);
    assert!(a.iter().all(|t| t.arm == Arm::Biased) && b.iter().all(|t| t.arm == Arm::Uniform));
    for (x, y) in a.iter().zip(b) {
        assert_eq!((x.iters, x.j_total, x.seed), (y.iters, y.j_total, y.seed));
    }
    assert_eq!(r.summary[0].median_iters_censored, r.summary[1].median_iters_censored);
}

#[test]
fn bias_needs_fewer_iterations() {
    let inst = grid_patrol(2, 5, 5, 1);
    let mut cfg = desk_config(ExperimentMode::CompareBias, 6);
    cfg.planner.n_max_pre = 4000;
    cfg.planner.n_max_suf = 4000;
    let r = run_compare_bias(&cfg, &inst).unwrap();
    let (b, u) = (&r.summary[0], &r.summary[1]);
    assert_eq!((b.arm, u.arm), (Arm::Biased, Arm::Uniform));
    assert_eq!(b.solved, 6);
    assert!(b.median_iters_censored <= u.median_iters_censored, "{b:?} vs {u:?}");
}

#[test]
fn oracle_check_rows() {
    let cfg = desk_config(ExperimentMode::OracleCheck, 2);
    let rows = run_oracle_check(&cfg, &desk(2)).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.matched));
    assert!(rows.iter().filter(|r| r.oracle_j.is_none()).all(|r| r.verified.is_none()));
    assert!(rows.iter().filter(|r| r.oracle_j.is_some()).all(|r| r.verified == Some(true)));
}

#[test]
fn file_instances_and_report_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = grid_patrol(1, 3, 3, 2);
    std::fs::write(dir.path().join("r0.json"), inst.team.robot(0).to_json()).unwrap();
    std::fs::write(dir.path().join("task.json"), inst.nba.to_json()).unwrap();
    let cfg = ExperimentConfig::from_json(
        r#"{"mode":"compare_bias","trials":2,"timing":false,
            "planner":{"trace":true},
            "instances":[{"files":{"wts":["r0.json"],"nba":"task.json","name":"grid"}}]}"#,
    )
    .unwrap();
    let report = run(&cfg, dir.path()).unwrap();
    let out = dir.path().join("bias.csv");
    report.write(&out).unwrap();
    let summary = std::fs::read_to_string(&out).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().nth(1).unwrap().starts_with("grid,biased,"));
    let trials = std::fs::read_to_string(dir.path().join("bias.trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 5);
    assert!(dir.path().join("bias.trace.csv").exists());

    let missing = ExperimentConfig::from_json(
        r#"{"instances":[{"files":{"wts":["nope.json"],"nba":"task.json"}}]}"#,
    )
    .unwrap();
    assert!(matches!(run(&missing, dir.path()), Err(stylus::Error::Config(_))));
}
