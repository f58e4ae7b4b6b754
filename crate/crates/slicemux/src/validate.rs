//! Cross-checking suite behind the `validate` subcommand.
//!
//! Each fast component is paired with a slow, independently written
//! reference: exhaustive search for the knapsack, a linear scan for the
//! floor bisection, vertex enumeration for the simplex, and the
//! formulation transforms checked on generated corpora. The suite runs
//! everything on seeded instances, so a given seed always reproduces the
//! same verdicts.

use crate::demand::DemandTrace;
use crate::equivalence::{generate_feasible_corpus, verify_prop1, verify_prop2_small};
use crate::linalg::solve_dense;
use crate::lp::{solve, Cmp, LpProblem, LpStatus, Sense};
use crate::oracle::{offline_optimal, OracleCaps, OracleError};
use crate::provision::{provision_max_weight, required_counts, ProvisionError};
use crate::scheduler::{evaluate_sla, run_max_weight, solve_knapsack, KnapsackSelection};
use crate::sla::SlaSpec;
use crate::stats::{isolation_floor, EmpiricalCdf, ExcessTrace};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of one named cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Description of the first failing case, when any.
    pub detail: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

/// Runs every cross-check on instances derived from `seed`.
pub fn run_validation(seed: u64) -> ValidationReport {
    ValidationReport {
        checks: vec![
            knapsack_check(solve_knapsack, seed, 300),
            floor_check(seed, 12),
            lp_check(seed, 200),
            lift_check(seed),
            reserve_equivalence_check(seed, 12),
            availability_identity_check(seed, 20),
            provision_dominance_check(seed, 40),
        ],
    }
}

/// Signature of a knapsack solver under test.
pub type KnapsackSolver = fn(&[f64], &[u64], u64) -> KnapsackSelection;

/// Exhaustive knapsack reference: every subset, values summed in
/// decreasing index order to match the table's grouping, ties resolved to
/// the lexicographically smallest index set (missing positions compare as
/// infinity).
pub(crate) fn reference_knapsack(
    values: &[f64],
    weights: &[u64],
    capacity: u64,
) -> (Vec<usize>, f64) {
    let n = values.len();
    assert!(n <= 20, "exhaustive reference is exponential");
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 0u32..(1 << n) {
        let weight: u64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| weights[i])
            .sum();
        if weight > capacity {
            continue;
        }
        let mut value = 0.0;
        for i in (0..n).rev() {
            if mask >> i & 1 == 1 {
                value += values[i];
            }
        }
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let better = match &best {
            None => true,
            Some((s, v)) => value > *v || (value == *v && lex_precedes(&set, s)),
        };
        if better {
            best = Some((set, value));
        }
    }
    best.unwrap()
}

/// `a` strictly precedes `b` when sorted index sequences are compared with
/// absent positions reading as infinity.
fn lex_precedes(a: &[usize], b: &[usize]) -> bool {
    let len = a.len().max(b.len());
    for k in 0..len {
        let x = a.get(k).copied().unwrap_or(usize::MAX);
        let y = b.get(k).copied().unwrap_or(usize::MAX);
        if x != y {
            return x < y;
        }
    }
    false
}

/// Compares `solver` against the exhaustive reference on random instances,
/// demanding bitwise value equality and the same tie-break.
pub fn knapsack_check(solver: KnapsackSolver, seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b6e_6170);
    let mut failures = 0;
    let mut detail = None;
    for _ in 0..cases {
        let n = rng.random_range(1..=9usize);
        let values: Vec<f64> = (0..n)
            .map(|_| f64::from(rng.random_range(0..=40u32)) / 4.0)
            .collect();
        let weights: Vec<u64> = (0..n).map(|_| rng.random_range(1..=12u64)).collect();
        let capacity = rng.random_range(0..=30u64);
        let got = solver(&values, &weights, capacity);
        let (want_set, want_value) = reference_knapsack(&values, &weights, capacity);
        let got_weight: u64 = got.chosen.iter().map(|&i| weights[i]).sum();
        let ok = got.chosen == want_set
            && got.value == want_value
            && got.weight == got_weight
            && got.weight <= capacity;
        if !ok {
            failures += 1;
            detail.get_or_insert_with(|| {
                format!(
                    "values {values:?} weights {weights:?} capacity {capacity}: \
                     got {:?} value {}, want {want_set:?} value {want_value}",
                    got.chosen, got.value
                )
            });
        }
    }
    CheckOutcome {
        name: "knapsack vs exhaustive reference",
        cases,
        failures,
        detail,
    }
}

/// Floor bisection against a linear scan over every grid target, plus
/// monotonicity of the floor in the target.
fn floor_check(seed: u64, traces: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x666c_6f6f);
    let mut cases = 0;
    let mut failures = 0;
    let mut detail = None;
    for _ in 0..traces {
        let max_demand = if rng.random_bool(0.5) { 25 } else { 6 };
        let samples: Vec<u32> = (0..150).map(|_| rng.random_range(0..=max_demand)).collect();
        let cdf = EmpiricalCdf::from_samples(&samples).expect("nonempty samples");
        let mut previous = 0u32;
        for grid in 0..=20u32 {
            cases += 1;
            let p_l = f64::from(grid) / 20.0;
            let floor = match isolation_floor(&cdf, p_l) {
                Ok(floor) => floor,
                Err(err) => {
                    failures += 1;
                    detail.get_or_insert_with(|| format!("p_l {p_l}: {err}"));
                    continue;
                }
            };
            let scanned = (0..=cdf.max_value())
                .find(|&w| cdf.fraction_at(w) >= p_l)
                .expect("fraction reaches 1 at the maximum");
            let ok = floor.w_l == scanned
                && floor.p_m == cdf.fraction_at(floor.w_l)
                && floor.p_m >= p_l
                && floor.w_l >= previous;
            if !ok {
                failures += 1;
                detail.get_or_insert_with(|| {
                    format!(
                        "p_l {p_l}: bisection ({}, {}), scan {scanned}, previous {previous}",
                        floor.w_l, floor.p_m
                    )
                });
            }
            previous = floor.w_l;
        }
    }
    CheckOutcome {
        name: "floor bisection vs linear scan",
        cases,
        failures,
        detail,
    }
}

/// Simplex against vertex enumeration on random bounded programs.
fn lp_check(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c70_7631);
    let mut failures = 0;
    let mut detail = None;
    for _ in 0..cases {
        let n = rng.random_range(1..=4usize);
        let m = rng.random_range(1..=5usize);
        // Nonnegative right-hand sides keep the origin feasible, and the
        // final row bounds the polytope, so an optimal vertex exists.
        let mut rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| f64::from(rng.random_range(-3..=5i32))).collect())
            .collect();
        let mut rhs: Vec<f64> = (0..m).map(|_| f64::from(rng.random_range(0..=9u32))).collect();
        rows.push(vec![1.0; n]);
        rhs.push(12.0);
        let objective: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(-4..=4i32))).collect();

        let mut problem = LpProblem::new(Sense::Maximize, objective.clone());
        for (row, &b) in rows.iter().zip(&rhs) {
            problem.add_row(row.clone(), Cmp::Le, b);
        }
        let expected = best_vertex_objective(&rows, &rhs, &objective);
        let outcome = match solve(&problem) {
            Ok(solution) if solution.status == LpStatus::Optimal => {
                let tol = 1e-6 * (1.0 + expected.abs());
                ((solution.objective - expected).abs() <= tol)
                    .then_some(())
                    .ok_or(format!(
                        "objective {} vs vertex enumeration {expected}",
                        solution.objective
                    ))
            }
            Ok(solution) => Err(format!("status {:?} on a feasible bounded program", solution.status)),
            Err(err) => Err(format!("solver error: {err}")),
        };
        if let Err(why) = outcome {
            failures += 1;
            detail.get_or_insert_with(|| format!("rows {rows:?} rhs {rhs:?} obj {objective:?}: {why}"));
        }
    }
    CheckOutcome {
        name: "simplex vs vertex enumeration",
        cases,
        failures,
        detail,
    }
}

/// Best objective over all vertices of `{x >= 0, rows . x <= rhs}`. Every
/// vertex is the solution of some choice of `n` active constraints.
fn best_vertex_objective(rows: &[Vec<f64>], rhs: &[f64], objective: &[f64]) -> f64 {
    let n = objective.len();
    let m = rows.len();
    let pool = m + n;
    let mut best = f64::NEG_INFINITY;
    let mut active: Vec<usize> = (0..n).collect();
    loop {
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for &k in &active {
            if k < m {
                a.push(rows[k].clone());
                b.push(rhs[k]);
            } else {
                let mut axis = vec![0.0; n];
                axis[k - m] = 1.0;
                a.push(axis);
                b.push(0.0);
            }
        }
        if let Some(x) = solve_dense(a, b) {
            let feasible = x.iter().all(|&v| v >= -1e-9)
                && rows.iter().zip(rhs).all(|(row, &b)| {
                    row.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>() <= b + 1e-6
                });
            if feasible {
                let value: f64 = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = best.max(value);
            }
        }

        // Next combination in lexicographic order.
        let mut j = n;
        loop {
            if j == 0 {
                return best;
            }
            j -= 1;
            if active[j] != j + pool - n {
                active[j] += 1;
                for l in j + 1..n {
                    active[l] = active[l - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Reserve lifting on generated feasible corpora, 50 points per scenario.
fn lift_check(seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c69_6674);
    let deterministic = DemandTrace::new(
        1.0,
        0,
        (0..300).map(|t| vec![(t % 10) as u32, ((t * 3) % 7) as u32]).collect(),
    )
    .expect("fixed trace is well formed");
    let random = DemandTrace::new(
        1.0,
        seed,
        (0..300)
            .map(|_| vec![rng.random_range(0..10u32), rng.random_range(0..10u32)])
            .collect(),
    )
    .expect("random trace is well formed");
    let scenarios = [
        (deterministic, SlaSpec::new(vec![0.9, 0.8], vec![0.5, 0.25])),
        (random, SlaSpec::new(vec![0.75, 0.9], vec![0.25, 0.5])),
    ];

    let mut cases = 0;
    let mut failures = 0;
    let mut detail = None;
    for (scenario, (trace, sla)) in scenarios.into_iter().enumerate() {
        let sla = sla.expect("targets are in range");
        let corpus = match generate_feasible_corpus(&trace, &sla, 50, seed ^ scenario as u64) {
            Ok(corpus) => corpus,
            Err(err) => {
                cases += 1;
                failures += 1;
                detail.get_or_insert_with(|| format!("scenario {scenario}: corpus: {err}"));
                continue;
            }
        };
        for point in &corpus {
            cases += 1;
            match verify_prop1(point, &trace, &sla) {
                Ok(report) if report.pass => {}
                Ok(report) => {
                    failures += 1;
                    detail.get_or_insert_with(|| format!("scenario {scenario}: {report:?}"));
                }
                Err(err) => {
                    failures += 1;
                    detail.get_or_insert_with(|| format!("scenario {scenario}: {err}"));
                }
            }
        }
    }
    CheckOutcome {
        name: "reserve lift preserves feasibility",
        cases,
        failures,
        detail,
    }
}

/// Free-reserve enumeration against the floor-pinned objective on small
/// random traces.
fn reserve_equivalence_check(seed: u64, scenarios: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7072_3270);
    let slas = [
        (vec![1.0, 0.75], vec![0.0, 0.5]),
        (vec![0.5, 0.5], vec![0.5, 0.0]),
        (vec![0.75, 1.0], vec![0.25, 0.25]),
    ];
    let mut failures = 0;
    let mut detail = None;
    for scenario in 0..scenarios {
        let horizon = rng.random_range(2..6usize);
        let rows = (0..horizon)
            .map(|_| vec![rng.random_range(0..4u32), rng.random_range(0..4u32)])
            .collect();
        let trace = DemandTrace::new(1.0, seed, rows).expect("random trace is well formed");
        let (p_h, p_l) = slas[scenario % slas.len()].clone();
        let sla = SlaSpec::new(p_h, p_l).expect("targets are in range");
        match verify_prop2_small(&trace, &sla, &OracleCaps::default()) {
            Ok(report) if report.pass => {}
            Ok(report) => {
                failures += 1;
                detail.get_or_insert_with(|| format!("scenario {scenario}: {report:?}"));
            }
            Err(err) => {
                failures += 1;
                detail.get_or_insert_with(|| format!("scenario {scenario}: {err}"));
            }
        }
    }
    CheckOutcome {
        name: "pinned reserves attain the free optimum",
        cases: scenarios,
        failures,
        detail,
    }
}

/// Exact accounting identity on scheduler runs: slots counted available
/// split exactly into within-floor slots and pool-served excess slots.
fn availability_identity_check(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6964_656e);
    let mut failures = 0;
    let mut detail = None;
    for case in 0..cases {
        let rows = (0..400)
            .map(|_| (0..3).map(|_| rng.random_range(0..8u32)).collect())
            .collect();
        let trace = DemandTrace::new(1.0, seed, rows).expect("random trace is well formed");
        let floors: Vec<u32> = (0..3).map(|_| rng.random_range(0..=4u32)).collect();
        let targets: Vec<f64> = (0..3).map(|_| rng.random_range(0..=9u32) as f64 / 10.0).collect();
        let w_c = rng.random_range(0..=6u64);
        let sla = SlaSpec::new(targets.clone(), vec![0.0; 3]).expect("targets are in range");

        let outcome = ExcessTrace::new(&trace, &floors)
            .map_err(|err| err.to_string())
            .and_then(|excess| {
                let run = run_max_weight(&excess, w_c, &targets);
                evaluate_sla(&trace, &run.decisions, &floors, &sla, 0.0)
                    .map(|report| (run, report))
                    .map_err(|err| err.to_string())
            })
            .and_then(|(run, report)| {
                let holds = (0..3).all(|i| {
                    report.availability_counts[i]
                        == report.isolation_counts[i] + run.coverage_counts[i]
                });
                holds.then_some(()).ok_or(format!(
                    "availability {:?} != isolation {:?} + coverage {:?}",
                    report.availability_counts, report.isolation_counts, run.coverage_counts
                ))
            });
        if let Err(why) = outcome {
            failures += 1;
            detail.get_or_insert_with(|| format!("case {case} floors {floors:?} w_c {w_c}: {why}"));
        }
    }
    CheckOutcome {
        name: "availability accounting identity",
        cases,
        failures,
        detail,
    }
}

/// The causal provisioner can never beat the offline optimum, and both
/// must agree on feasibility at the upper bound.
fn provision_dominance_check(seed: u64, cases: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x646f_6d69);
    let target_menu = [0.25, 0.4, 0.6];
    let mut failures = 0;
    let mut detail = None;
    for case in 0..cases {
        let horizon = rng.random_range(8..16usize);
        let rows = (0..horizon)
            .map(|_| vec![rng.random_range(0..6u32), rng.random_range(0..6u32)])
            .collect();
        let trace = DemandTrace::new(1.0, seed, rows).expect("random trace is well formed");
        let floors: Vec<u32> = (0..2).map(|_| rng.random_range(0..=2u32)).collect();
        let targets: Vec<f64> = (0..2)
            .map(|_| target_menu[rng.random_range(0..target_menu.len())])
            .collect();

        let outcome = ExcessTrace::new(&trace, &floors)
            .map_err(|err| err.to_string())
            .and_then(|excess| {
                let required = required_counts(&targets, horizon);
                let online = provision_max_weight(&excess, &targets, horizon);
                let offline = offline_optimal(&excess, &required, &OracleCaps::default());
                match (online, offline) {
                    (Ok(w_online), Ok(result)) => (w_online >= result.w_c_offline)
                        .then_some(())
                        .ok_or(format!(
                            "online {w_online} below offline {}",
                            result.w_c_offline
                        )),
                    (
                        Err(ProvisionError::InfeasibleAtUpperBound { .. }),
                        Err(OracleError::InfeasibleAtUpperBound { .. }),
                    ) => Ok(()),
                    (online, offline) => Err(format!(
                        "feasibility disagrees: online {online:?}, offline {offline:?}"
                    )),
                }
            });
        if let Err(why) = outcome {
            failures += 1;
            detail.get_or_insert_with(|| format!("case {case} floors {floors:?} targets {targets:?}: {why}"));
        }
    }
    CheckOutcome {
        name: "causal provisioning dominates offline optimum",
        cases,
        failures,
        detail,
    }
}
