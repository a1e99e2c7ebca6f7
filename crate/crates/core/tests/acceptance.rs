//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion does.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{rng, SMALL};
use nfold::apps::{self, closest_string, EquitableColoringInstance, LobbyingInstance};
use nfold::audit::{exists_bounded_reordering, ColumnSequence};
use nfold::balancer::balance_counts;
use nfold::dag::{self, vertex_bound, SolveOptions};
use nfold::oracle::{brute_force_solve, brute_force_solve_p2};
use nfold::reduction::{lift_solution, reduce_to_equality};
use nfold::{NFoldInstance, Outcome};
use rand::Rng;

const P1_SEED: u64 = 0x5eed_0001;
const P2_SEED: u64 = 0x5eed_0002;
const BALANCE_SEED: u64 = 0x5eed_0003;
const COLUMNS_SEED: u64 = 0x5eed_0005;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn p1_suite() -> Vec<NFoldInstance> {
    let mut rng = rng(P1_SEED);
    (0..300).map(|_| common::random_p1(&mut rng, SMALL)).collect()
}

fn criterion_1(suite: &[NFoldInstance]) -> Verdict {
    let started = Instant::now();
    let mut disagreements = 0;
    let mut feasible = 0;
    for inst in suite {
        let got = dag::solve(inst).expect("solver");
        let want = brute_force_solve(inst).expect("oracle");
        feasible += usize::from(want.is_feasible());
        if got.objective() != want.objective() {
            disagreements += 1;
        }
    }
    let elapsed = started.elapsed();
    verdict(
        disagreements == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{} instances ({feasible} feasible), {disagreements} disagreements, {elapsed:.2?}",
            suite.len()
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = rng(P2_SEED);
    let mut disagreements = 0;
    let mut feasible = 0;
    for _ in 0..200 {
        let inst = common::random_p2(&mut rng, SMALL);
        let want = brute_force_solve_p2(&inst).expect("oracle");
        let (reduced, map) = reduce_to_equality(&inst).expect("reduction");
        let got = match dag::solve(&reduced).expect("solver") {
            Outcome::Optimal(sol) => lift_solution(&map, &sol).expect("lift"),
            Outcome::Infeasible => Outcome::Infeasible,
        };
        feasible += usize::from(want.is_feasible());
        if got.objective() != want.objective() {
            disagreements += 1;
        }
    }
    verdict(
        disagreements == 0,
        format!("200 instances ({feasible} feasible), {disagreements} disagreements"),
    )
}

fn criterion_3() -> Verdict {
    let mut rng = rng(BALANCE_SEED);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8usize);
        let q = rng.gen_range(0..=200u64);
        let mut counts = vec![0u64; n];
        for _ in 0..q {
            counts[rng.gen_range(0..n)] += 1;
        }
        let sched = balance_counts(&counts);
        let qi = q as i128;
        let mut occ = vec![0u64; n];
        for (j, &e) in sched.entries().iter().enumerate() {
            occ[e] += 1;
            let j = j as i128 + 1;
            for (&o, &m) in occ.iter().zip(&counts) {
                let scaled = qi * o as i128 - j * m as i128;
                if scaled < -(n as i128) * qi || scaled > qi {
                    violations += 1;
                }
            }
        }
        if occ != counts || sched.len() as u64 != q {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("1000 count vectors, {violations} violations"))
}

fn criterion_4(suite: &[NFoldInstance]) -> Verdict {
    let padded = SolveOptions {
        window_padding: 5,
        ..SolveOptions::default()
    };
    let mut violations = 0;
    for inst in suite {
        let base = dag::solve(inst).expect("solver").objective();
        let (wide, _) = dag::solve_with_options(inst, &padded).expect("padded solver");
        let improves = match (base, wide.objective()) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => b < a,
            _ => false,
        };
        violations += usize::from(improves);
    }
    verdict(
        violations == 0,
        format!("{} instances re-solved with windows padded by 5, {violations} improvements", suite.len()),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = rng(COLUMNS_SEED);
    let mut failures = 0;
    for _ in 0..200 {
        let r = rng.gen_range(1..=2usize);
        let m = rng.gen_range(1..=7usize);
        let delta = rng.gen_range(1..=2i64);
        let cols = common::zero_sum_columns(&mut rng, r, m, delta);
        let seq = ColumnSequence::new(r, cols).expect("columns");
        let bound = 2 * seq.delta() * r as i64;
        if !exists_bounded_reordering(&seq, bound).expect("search") {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("200 zero-sum multisets, {failures} without a bounded order"))
}

fn criterion_6(suite: &[NFoldInstance]) -> Verdict {
    let mut vertex_violations = 0;
    let mut arc_violations = 0;
    for inst in suite {
        let (_, stats) = dag::solve_with_stats(inst).expect("solver");
        let bound = vertex_bound(inst).expect("bound fits");
        if u128::from(stats.vertices) > bound {
            vertex_violations += 1;
        }
        if stats.relaxations > (inst.n() * inst.t()) as u64 * stats.vertices {
            arc_violations += 1;
        }
    }
    verdict(
        vertex_violations + arc_violations == 0,
        format!(
            "{} instances, {vertex_violations} over the vertex bound, {arc_violations} over nt·|V| relaxations",
            suite.len()
        ),
    )
}

/// Two blocks, two columns, one global row, all entries in `{-1, 0, 1}`.
///
/// The base mass of 16 per block puts even the smallest instance past the
/// point where layers fill their windows; before that, layer sizes still grow
/// with the layer index and the count is quadratic in `q`.
fn scaling_template(factor: i64) -> NFoldInstance {
    NFoldInstance::equality(
        vec![vec![vec![1, -1]], vec![vec![0, 1]]],
        vec![16 * factor],
        vec![16 * factor, 16 * factor],
        vec![vec![1, 2], vec![3, 1]],
    )
    .unwrap()
}

fn criterion_7() -> Verdict {
    let counts: Vec<u64> = [1, 2, 4, 8]
        .iter()
        .map(|&f| dag::solve_with_stats(&scaling_template(f)).expect("solver").1.relaxations)
        .collect();
    let ratios: Vec<f64> = counts.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let linear = ratios.iter().all(|&r| (2.0 / 1.5..=2.0 * 1.5).contains(&r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    verdict(
        linear,
        format!("relaxations {counts:?}, per-doubling ratios [{}]", shown.join(", ")),
    )
}

fn criterion_8() -> Verdict {
    let started = Instant::now();
    let mut checked = [0usize; 3];
    let mut disagreements = [0usize; 3];

    for w in 1..=4 {
        for m in 1..=3 {
            for matrix in common::all_matrices(w, m) {
                let want = common::lobbying_by_exhaustion(&LobbyingInstance::new(matrix.clone(), m, 0).unwrap());
                for k in 0..=w as u64 {
                    let inst = LobbyingInstance::new(matrix.clone(), m, k).unwrap();
                    let ans = apps::lobbying_solve(&inst).expect("lobbying");
                    let expected_yes = want.is_some_and(|best| best as u64 <= k);
                    checked[0] += 1;
                    if ans.yes != expected_yes || ans.optimum != want.map(|b| b as i64) {
                        disagreements[0] += 1;
                    }
                }
            }
        }
    }

    let sigma = ['0', '1'];
    for len in 0..=4 {
        let strings = common::all_strings(&sigma, len);
        for k in 1..=2 {
            let tuples: Vec<Vec<Vec<char>>> = match k {
                1 => strings.iter().map(|s| vec![s.clone()]).collect(),
                _ => strings
                    .iter()
                    .flat_map(|a| strings.iter().map(move |b| vec![a.clone(), b.clone()]))
                    .collect(),
            };
            for tuple in tuples {
                for d in 0..=len as i64 {
                    let inst = closest_string(tuple.clone(), &sigma, d).unwrap();
                    let ans = apps::multistrings_solve(&inst).expect("closest string");
                    let want = common::multistrings_by_exhaustion(&inst);
                    let valid = match &ans.output {
                        Some(y) => inst.accepts(&y.chars().collect::<Vec<_>>()).unwrap(),
                        None => true,
                    };
                    checked[1] += 1;
                    if ans.objective != want || !valid {
                        disagreements[1] += 1;
                    }
                }
            }
        }
    }

    for v in 1..=5 {
        for edges in common::all_graphs(v) {
            let cover = apps::minimum_vertex_cover(v, &edges).unwrap();
            for h in 1..=cover.len() {
                let inst = EquitableColoringInstance::new(v, edges.clone(), h, cover.clone()).unwrap();
                let ans = apps::equitable_coloring_solve(&inst).expect("coloring");
                let want = common::equitable_by_exhaustion(&inst);
                let valid = ans.coloring.as_ref().is_none_or(|c| inst.is_equitable(c));
                checked[2] += 1;
                if ans.yes != want || !valid {
                    disagreements[2] += 1;
                }
            }
        }
    }

    let elapsed = started.elapsed();
    verdict(
        disagreements.iter().all(|&d| d == 0) && elapsed < Duration::from_secs(300),
        format!(
            "lobbying {}/{}, closest string {}/{}, equitable coloring {}/{} disagreements, {elapsed:.2?}",
            disagreements[0], checked[0], disagreements[1], checked[1], disagreements[2], checked[2]
        ),
    )
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

/// Documented example per subcommand: arguments and golden file name.
const CLI_EXAMPLES: &[(&[&str], &str)] = &[
    (&["solve", "fixtures/toy.json", "--stats", "--audit", "--oracle"], "solve_toy.json"),
    (&["solve", "fixtures/infeasible.json"], "solve_infeasible.json"),
    (&["solve", "fixtures/mixed.json", "--stats", "--oracle"], "solve_mixed.json"),
    (&["oracle", "fixtures/toy.json", "--stats"], "oracle_toy.json"),
    (&["audit", "fixtures/mixed.json"], "audit_mixed.json"),
    (&["lobbying", "fixtures/lobbying.txt", "--k", "1"], "lobbying.json"),
    (&["closest-string", "fixtures/closest.txt", "--d", "1"], "closest_string.json"),
    (&["multistrings", "fixtures/multistrings.txt"], "multistrings.json"),
    (&["eqcolor", "fixtures/star3.txt", "--colors", "2", "--cover", "center"], "eqcolor_star3.json"),
    (&["eqcolor", "fixtures/star2.txt", "--colors", "2", "--cover", "center"], "eqcolor_star2.json"),
];

fn run_cli(args: &[&str], sequential: bool) -> (Vec<u8>, i32) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nfold"));
    cmd.current_dir(fixtures()).args(args);
    if sequential {
        cmd.arg("--sequential");
    }
    let out = cmd.output().expect("run nfold");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_9() -> Verdict {
    let mut mismatches = Vec::new();
    for (args, golden) in CLI_EXAMPLES {
        let expected = std::fs::read(fixtures().join("golden").join(golden)).unwrap_or_default();
        let runs = [run_cli(args, false), run_cli(args, false), run_cli(args, true)];
        let stable = runs.iter().all(|(out, code)| *code == 0 && *out == expected);
        if !stable {
            mismatches.push(*golden);
        }
    }
    verdict(
        mismatches.is_empty(),
        format!(
            "{} examples x 3 runs (one sequential), mismatches: {mismatches:?}",
            CLI_EXAMPLES.len()
        ),
    )
}

fn main() {
    // `cargo test -- --list` and similar harness probes expect no output.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let suite = p1_suite();
    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence, equality form", Box::new(|| criterion_1(&suite))),
        ("oracle equivalence, mixed relations", Box::new(criterion_2)),
        ("balanced schedule bounds", Box::new(criterion_3)),
        ("window padding never improves", Box::new(|| criterion_4(&suite))),
        ("bounded reordering of zero-sum columns", Box::new(criterion_5)),
        ("graph size bounds", Box::new(|| criterion_6(&suite))),
        ("linear scaling in q", Box::new(criterion_7)),
        ("applications vs exhaustion", Box::new(criterion_8)),
        ("CLI golden files", Box::new(criterion_9)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let mark = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{mark}] {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.passed);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
