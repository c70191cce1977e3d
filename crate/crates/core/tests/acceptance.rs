//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stylus::automaton::{distance_matrix, guard_sat, prune_infeasible, Conjunct, Guard, INF};
use stylus::harness::instances::{recurrence_nba, random_nba, Instance, InstanceSpec, NbaSpec, WtsSpec};
use stylus::harness::{run_compare_bias, run_oracle_check, run_success_curve, Arm, ExperimentConfig};
use stylus::model::{generate_grid, Ap, Team, WeightModel};
use stylus::planner::{
    construct_tree, densities, f_rand_masses, synthesize, Mode, PlannerConfig, Problem, ProductState, SamplerConfig,
};

const C1_TOL: f64 = 1e-9;
const C1_MIN_MATCH: f64 = 0.95;
const C1_MIN_INSTANCES: usize = 20;
const C1_BUDGET: Duration = Duration::from_secs(120);
const C2_GRID: [usize; 5] = [50, 100, 200, 500, 1000];
const C2_TRIALS: usize = 100;
const C2_SIGMAS: f64 = 3.0;
const C2_BUDGET: Duration = Duration::from_secs(300);
const C3_SEEDS: usize = 20;
const C3_RATIO: f64 = 0.5;
const C3_BUDGET: Duration = Duration::from_secs(600);
const C4_BUDGET: Duration = Duration::from_secs(60);
const C5_DRAWS: usize = 10_000;
const C5_SUM_TOL: f64 = 1e-12;
const C5_P: f64 = 0.9;
const C5_BUDGET: Duration = Duration::from_secs(30);
const C6_GUARDS: usize = 100;
const C6_BUDGET: Duration = Duration::from_secs(5);
const C7_NBAS: usize = 50;
const C7_MAX_STATES: usize = 60;
const C7_BUDGET: Duration = Duration::from_secs(30);
const C8_GRID: [usize; 8] = [1, 10, 20, 50, 100, 200, 500, 2000];
const C8_TRIALS: usize = 100;
const C8_BUDGET: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let e = start.elapsed();
    if e > budget {
        Err(format!("took {:.1}s, budget {}s", e.as_secs_f64(), budget.as_secs()))
    } else {
        Ok(())
    }
}

fn experiment(trials: usize, planner: PlannerConfig) -> ExperimentConfig {
    ExperimentConfig {
        trials,
        planner,
        timing: false,
        ..ExperimentConfig::default()
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let instances = common::desk_instances(C1_MIN_INSTANCES, 4);
    let inst: Vec<Instance> = instances.into_iter().map(|(i, _)| i).collect();
    let mut planner = PlannerConfig::default();
    planner.n_max_pre = 20_000;
    planner.n_max_suf = 20_000;
    let rows = run_oracle_check(&experiment(2, planner), &inst).map_err(|e| e.to_string())?;
    let matched = rows
        .iter()
        .filter(|r| r.matched && r.abs_diff.is_none_or(|d| d <= C1_TOL * r.oracle_j.unwrap().abs().max(1.0)))
        .count();
    let unverified = rows.iter().filter(|r| r.verified == Some(false)).count();
    let rate = matched as f64 / rows.len() as f64;
    within(start, C1_BUDGET)?;
    let msg = format!(
        "{} instances, {matched}/{} trials match, {unverified} plans fail verification, {:.1}s",
        inst.len(),
        rows.len(),
        start.elapsed().as_secs_f64()
    );
    if rate >= C1_MIN_MATCH && unverified == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn completeness() -> Outcome {
    let start = Instant::now();
    let mut planner = PlannerConfig::default();
    planner.stop_at_first_goal = true;
    let mut cfg = experiment(C2_TRIALS, planner);
    cfg.n_max = C2_GRID.to_vec();
    let mut curves = 0;
    for (inst, opt) in common::desk_instances(C1_MIN_INSTANCES, 4) {
        if opt.is_none() {
            let s = synthesize(&inst.team, &inst.nba, &cfg.planner).map_err(|e| e.to_string())?;
            if s.plan.is_some() {
                return Err(format!("{}: plan found where the oracle has none", inst.name));
            }
            continue;
        }
        let rows = run_success_curve(&cfg, &inst).map_err(|e| e.to_string())?;
        for w in rows.windows(2) {
            let p = w[0].plan_rate;
            let sigma = (p * (1.0 - p) / C2_TRIALS as f64).sqrt();
            if w[1].plan_rate < p - C2_SIGMAS * sigma {
                return Err(format!("{}: rate drops {} -> {} at n_max {}", inst.name, p, w[1].plan_rate, w[1].n_max));
            }
        }
        let last = rows.last().unwrap();
        if last.plan_rate < 1.0 {
            return Err(format!("{}: rate {} at n_max {}", inst.name, last.plan_rate, last.n_max));
        }
        curves += 1;
    }
    within(start, C2_BUDGET)?;
    Ok(format!(
        "{curves} curves non-decreasing and reaching 1.0, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn bias_benefit() -> Outcome {
    let start = Instant::now();
    let inst = InstanceSpec {
        robots: 5,
        wts: WtsSpec::Random { states: 100, avg_degree: 6.0 },
        nba: NbaSpec::Patrol,
        weights: (1.0, 10.0),
        seed: 1,
    }
    .build()
    .map_err(|e| e.to_string())?;
    let mut planner = PlannerConfig::default();
    planner.n_max_pre = 20_000;
    planner.n_max_suf = 20_000;
    let report = run_compare_bias(&experiment(C3_SEEDS, planner), &inst).map_err(|e| e.to_string())?;
    let arm = |a: Arm| report.summary.iter().find(|r| r.arm == a).unwrap();
    let (b, u) = (arm(Arm::Biased), arm(Arm::Uniform));
    within(start, C3_BUDGET)?;
    // unsolved uniform trials count at their budget, so the uniform median
    // is an underestimate and the ratio an overestimate
    let ratio = b.median_iters_censored / u.median_iters_censored;
    let msg = format!(
        "median iterations biased {} ({}/{} solved) vs uniform >= {} ({}/{} solved), ratio <= {ratio:.4}",
        b.median_iters_censored, b.solved, b.trials, u.median_iters_censored, u.solved, u.trials
    );
    if b.solved * 2 > b.trials && ratio <= C3_RATIO {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scalability() -> Outcome {
    let start = Instant::now();
    let inst = InstanceSpec {
        robots: 10,
        wts: WtsSpec::Random { states: 1000, avg_degree: 30.0 },
        nba: NbaSpec::Patrol,
        weights: (1.0, 10.0),
        seed: 1,
    }
    .build()
    .map_err(|e| e.to_string())?;
    let problem = Problem::new(&inst.team, &inst.nba).map_err(|e| e.to_string())?;
    let finals = problem.feasible_finals(problem.nba().initial()[0]).len();
    let mut planner = PlannerConfig::default();
    planner.n_max_pre = 200_000;
    planner.n_max_suf = 200_000;
    planner.stop_at_first_goal = true;
    planner.time_limit_ms = Some(C4_BUDGET.as_millis() as u64);
    let s = synthesize(&inst.team, &inst.nba, &planner).map_err(|e| e.to_string())?;
    within(start, C4_BUDGET)?;
    let p = s.plan.ok_or("no plan within budget")?;
    Ok(format!(
        "|Q_B| = {}, {finals} feasible finals, n = {} + {}, trees {} + {}, {:.2}s",
        inst.nba.len(),
        p.stats.iters_pre,
        p.stats.iters_suf,
        p.stats.tree_pre,
        p.stats.tree_suf,
        start.elapsed().as_secs_f64()
    ))
    .and_then(|m| if finals == 2 { Ok(m) } else { Err(m) })
}

fn density_floors() -> Outcome {
    let start = Instant::now();
    let sampler = SamplerConfig {
        p_rand: C5_P,
        p_new: C5_P,
        ..SamplerConfig::default()
    };
    let (pr, pn) = (sampler.p_rand_clamped(), sampler.p_new_clamped());
    if pr != C5_P || pn != C5_P {
        return Err(format!("clamping moved 0.9 to {pr}, {pn}"));
    }
    let eps = sampler.epsilon;
    let inst = InstanceSpec {
        robots: 3,
        wts: WtsSpec::Random { states: 30, avg_degree: 4.0 },
        nba: NbaSpec::Patrol,
        weights: (1.0, 10.0),
        seed: 5,
    }
    .build()
    .map_err(|e| e.to_string())?;
    let problem = Problem::new(&inst.team, &inst.nba).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut planner = PlannerConfig::default();
    planner.sampler = sampler.clone();
    let root = ProductState::new(inst.team.initial_state(), problem.nba().initial()[0]);
    let mut checked = 0;
    let mut budgets = [1usize, 10, 50, 200, 400].into_iter().cycle();
    let mut tree = None;
    while checked < C5_DRAWS {
        if checked % 500 == 0 {
            let n = budgets.next().unwrap();
            tree = Some(construct_tree(&problem, &root, Mode::Prefix, n, &planner, &mut rng).map_err(|e| e.to_string())?.tree);
        }
        let tree = tree.as_ref().unwrap();
        let Some(d) = densities(tree, &problem, &sampler, &mut rng) else {
            // no progress from the drawn node: nothing to check, but count
            // the draw so the loop ends on trees without successors
            checked += 1;
            continue;
        };
        let n = d.f_rand.len() as f64;
        let s: f64 = d.f_rand.iter().sum();
        if (s - 1.0).abs() > C5_SUM_TOL || d.f_rand.iter().any(|&p| p < eps / n) {
            return Err(format!("f_rand sums to {s} or under {eps}/|V_T|"));
        }
        for f in &d.f_new {
            let m = f.len() as f64;
            let s: f64 = f.iter().map(|x| x.1).sum();
            if (s - 1.0).abs() > C5_SUM_TOL || f.iter().any(|x| x.1 < eps / m) {
                return Err(format!("f_new sums to {s} or under {eps}/|R|"));
            }
        }
        checked += 1;
    }
    for _ in 0..C5_DRAWS {
        let n = rng.gen_range(1..5000usize);
        let k = rng.gen_range(0..=n);
        let (a, b) = f_rand_masses(k, n, pr);
        let s = a * k as f64 + b * (n - k) as f64;
        let s = if k == 0 || k == n { a * n as f64 } else { s };
        if (s - 1.0).abs() > C5_SUM_TOL || a.min(b) < eps / n as f64 {
            return Err(format!("masses ({a}, {b}) for k={k}, n={n}"));
        }
    }
    within(start, C5_BUDGET)?;
    Ok(format!("{checked} sampler states and {C5_DRAWS} mass pairs within floors"))
}

fn pruning() -> Outcome {
    let start = Instant::now();
    let nba = recurrence_nba(0, "j", "e");
    let p = prune_infeasible(&nba, 1).map_err(|e| e.to_string())?;
    let dm = distance_matrix(&p);
    if p.feasible_guard(0, 2).is_some() || p.feasible_guard(2, 2).is_some() {
        return Err("0 -> 2 or 2 -> 2 survived pruning".into());
    }
    if dm.d(0, 2) != 2 || dm.dcyc(2) == INF {
        return Err(format!("d(0,2) = {}, dcyc(2) = {}", dm.d(0, 2), dm.dcyc(2)));
    }
    // random guards over two robots with three regions each
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ap = |rng: &mut ChaCha8Rng| Ap::new(rng.gen_range(0..2usize), rng.gen_range(0..3i64));
    let labels: Vec<Vec<Ap>> = (0..9i64).map(|k| vec![Ap::new(0, k / 3), Ap::new(1, k % 3)]).collect();
    for _ in 0..C6_GUARDS {
        let g = Guard::normalized((0..rng.gen_range(1..4)).map(|_| {
            let pos: Vec<Ap> = (0..rng.gen_range(0..4)).map(|_| ap(&mut rng)).collect();
            let neg: Vec<Ap> = (0..rng.gen_range(0..2)).map(|_| ap(&mut rng)).collect();
            Conjunct::new(pos, neg)
        }));
        let f = g.feasible_part();
        if f.dnf.iter().any(|c| !c.is_feasible()) {
            return Err(format!("{f} keeps a clash"));
        }
        for l in &labels {
            if guard_sat(&f, l) != guard_sat(&g, l) {
                return Err(format!("{g} and {f} differ on {l:?}"));
            }
        }
    }
    within(start, C6_BUDGET)?;
    Ok(format!("recurrence automaton pruned as expected; {C6_GUARDS} random guards agree on all team labels"))
}

fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u64>> {
    const BIG: u64 = u64::MAX / 4;
    let mut d = vec![vec![BIG; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = d[a][b].min(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn distances() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = generate_grid(2, 2, true, WeightModel::Unit).map_err(|e| e.to_string())?;
    let team = Team::new(vec![w.clone(), w.with_robot(1)]).map_err(|e| e.to_string())?;
    for k in 0..C7_NBAS {
        let n = rng.gen_range(2..=C7_MAX_STATES);
        let nba = random_nba(&team, n, 1, 3.0 / n as f64, &mut rng).map_err(|e| e.to_string())?;
        let p = prune_infeasible(&nba, 2).map_err(|e| e.to_string())?;
        let edges: Vec<(usize, usize)> = p.feasible_transitions().iter().map(|t| (t.from, t.to)).collect();
        let fw = floyd_warshall(n, &edges);
        let dm = distance_matrix(&p);
        for i in 0..n {
            for j in 0..n {
                let want = if fw[i][j] >= u64::MAX / 4 { INF } else { fw[i][j] as u32 };
                if dm.d(i, j) != want {
                    return Err(format!("nba {k}: d({i},{j}) = {} but Floyd-Warshall gives {want}", dm.d(i, j)));
                }
            }
            let cyc = edges
                .iter()
                .filter(|e| e.0 == i)
                .map(|e| 1 + fw[e.1][i])
                .min()
                .filter(|&c| c < u64::MAX / 4)
                .map_or(INF, |c| c as u32);
            if dm.dcyc(i) != cyc {
                return Err(format!("nba {k}: dcyc({i}) = {} but expected {cyc}", dm.dcyc(i)));
            }
        }
    }
    within(start, C7_BUDGET)?;
    Ok(format!("{C7_NBAS} pruned automata match Floyd-Warshall"))
}

fn chernoff_trend() -> Outcome {
    let start = Instant::now();
    let w = generate_grid(3, 3, true, WeightModel::Uniform { lo: 1.0, hi: 5.0, seed: 8 }).map_err(|e| e.to_string())?;
    let inst = Instance {
        name: "recurrence-grid3x3".into(),
        team: Team::new(vec![w]).map_err(|e| e.to_string())?,
        nba: recurrence_nba(0, 8i64, 2i64),
    };
    let mut cfg = experiment(C8_TRIALS, PlannerConfig::default());
    cfg.n_max = C8_GRID.to_vec();
    let rows = run_success_curve(&cfg, &inst).map_err(|e| e.to_string())?;
    let line: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{:.2}/{:.2}", r.n_max, r.pi_suc, r.p_y_ge_k))
        .collect();
    let msg = format!("K = {}, n_max:pi/P(Y>=K) {}", rows[0].k, line.join(" "));
    within(start, C8_BUDGET)?;
    let ordered = rows.iter().all(|r| r.pi_suc >= r.p_y_ge_k);
    let short = rows.iter().filter(|r| r.n_max < r.k).all(|r| r.p_y_ge_k == 0.0);
    let last = rows.last().unwrap();
    if ordered && short && last.pi_suc == 1.0 && last.p_y_ge_k == 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("probabilistic completeness", completeness),
        ("bias benefit", bias_benefit),
        ("scalability smoke", scalability),
        ("density floors", density_floors),
        ("pruning soundness", pruning),
        ("distance metric", distances),
        ("success-probability ordering", chernoff_trend),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        match f() {
            Ok(m) => println!("PASS {} {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {} {name}: {m}", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
