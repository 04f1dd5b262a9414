//! End-to-end acceptance checks against exhaustive reference solutions.
//!
//! Each test prints one `[PASS]`/`[FAIL]` line straight to stdout (bypassing
//! the harness's output capture) and then asserts.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robsub::greedy::{
    extended_threshold_greedy, lazy_greedy, naive_greedy, threshold_greedy_round, union_of, ThresholdSchedule,
};
use robsub::harness::{generate_instance, run_experiment, write_records, ExperimentConfig, ExperimentKind, RunOptions};
use robsub::objectives::{CovarianceMatrix, ExemplarClustering, InfoGain, TruncatedAverage};
use robsub::oracle::corpus::{coverage_case, random_coverage, random_partition, robust_case, shipped_objectives};
use robsub::oracle::{brute_force_robust_opt, brute_force_single_opt, verify_monotone_submodular};
use robsub::{
    bicriteria_solve, Algorithm, Matroid, PartitionMatroid, RobustInstance, SolverParams, SubmodularFn, Verdict,
};

fn report(id: u32, name: &str, passed: bool, detail: impl AsRef<str>) {
    let tag = if passed { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{tag}] criterion {id:>2}: {name} — {}", detail.as_ref());
    drop(out);
    assert!(passed, "criterion {id} failed: {}", detail.as_ref());
}

fn set_values(family: &[Arc<dyn SubmodularFn>], set: &[usize]) -> Vec<f64> {
    family.iter().map(|f| f.eval(set).unwrap()).collect()
}

fn robust_instance(seed: u64, epsilon: f64) -> (RobustInstance, f64) {
    let case = robust_case(seed, 3).unwrap();
    let opt = brute_force_robust_opt(&case.family, &case.matroid).unwrap().value;
    let params = SolverParams {
        epsilon,
        delta: 0.1,
        ..SolverParams::default()
    };
    (
        RobustInstance::new(case.family, Arc::new(case.matroid), params).unwrap(),
        opt,
    )
}

#[test]
fn c01_single_round_factor() {
    let start = Instant::now();
    let mut passed = 0;
    let mut first_failure = None;
    for seed in 0..100 {
        let case = coverage_case(seed).unwrap();
        let opt = brute_force_single_opt(&case.g, &case.matroid).unwrap().value;
        let ok = [0.1, 0.3].iter().all(|&delta| {
            let set = threshold_greedy_round(&case.g, &case.matroid, delta, &[]).unwrap().set;
            case.g.eval(&set).unwrap() >= (1.0 - delta) / (2.0 - delta) * opt
        });
        if ok {
            passed += 1;
        } else {
            first_failure.get_or_insert(seed);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "threshold greedy ≥ (1−δ)/(2−δ)·OPT, δ ∈ {0.1, 0.3}",
        passed == 100 && secs < 10.0,
        format!(
            "{passed}/100 instances, {secs:.2} s{}",
            first_failure
                .map(|s| format!("; first failure seed {s}"))
                .unwrap_or_default()
        ),
    );
}

#[test]
fn c02_multi_round_factor() {
    let mut counts = [0; 3];
    for seed in 0..100 {
        let case = coverage_case(seed).unwrap();
        let opt = brute_force_single_opt(&case.g, &case.matroid).unwrap().value;
        for ell in 1..=3 {
            let rounds = extended_threshold_greedy(&case.g, &case.matroid, 0.1, ell).unwrap();
            let sets: Vec<Vec<usize>> = rounds.into_iter().map(|r| r.set).collect();
            let value = case.g.eval(&union_of(&sets)).unwrap();
            if value >= (1.0 - (1.0f64 / 1.9).powi(ell as i32)) * opt {
                counts[ell - 1] += 1;
            }
        }
    }
    report(
        2,
        "extended threshold greedy ≥ (1−(2−δ)^−ℓ)·OPT, ℓ ∈ {1, 2, 3}",
        counts == [100; 3],
        format!("ℓ=1: {}/100, ℓ=2: {}/100, ℓ=3: {}/100", counts[0], counts[1], counts[2]),
    );
}

#[test]
fn c03_robust_guarantee() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut ok = [0; 4];
    for seed in 0..100 {
        let (inst, opt) = robust_instance(seed, 0.1);
        for (a, algorithm) in Algorithm::ALL.into_iter().enumerate() {
            let r = bicriteria_solve(&inst, algorithm, seed).unwrap();
            let value = set_values(&inst.family, &r.union)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let nu = inst.matroid.violation_ratio(&r.union).unwrap();
            if value >= 0.9 * opt && nu <= r.stats.rounds_budget {
                ok[a] += 1;
            } else {
                failures.push(format!("{algorithm} seed {seed}: {value:.4} vs OPT {opt:.4}, ν={nu}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        3,
        "min_i f_i(S^alg) ≥ (1−ε)·OPT and ν ≤ ℓ, all four algorithms",
        failures.is_empty() && secs < 60.0,
        format!(
            "prev-e-g {}/100, e-g {}/100, e-thg {}/100, e-stochg {}/100, {secs:.2} s{}",
            ok[0],
            ok[1],
            ok[2],
            ok[3],
            failures
                .first()
                .map(|f| format!("; first failure {f}"))
                .unwrap_or_default()
        ),
    );
}

#[test]
fn c04_call_count_and_rank_independence() {
    let delta = 0.1;
    let mut bound_violations = Vec::new();
    let mut pass_mismatches = Vec::new();
    let mut runs = 0;
    for seed in 0..100 {
        let case = coverage_case(seed).unwrap();
        let n = case.g.ground_size();
        let t = ThresholdSchedule::expected_len(n, delta);
        for ell in 1..=3 {
            let rounds = extended_threshold_greedy(&case.g, &case.matroid, delta, ell).unwrap();
            let evals: u64 = rounds.iter().map(|r| r.evals).sum();
            runs += 1;
            if evals > (ell * n * (t + 1)) as u64 {
                bound_violations.push(format!("seed {seed} ℓ={ell}: {evals}"));
            }
        }

        // same g and n, budgets 1 versus n in a single part
        let tight = PartitionMatroid::new(vec![0; n], vec![1]).unwrap();
        let loose = PartitionMatroid::new(vec![0; n], vec![n]).unwrap();
        for ell in 1..=3 {
            let a = extended_threshold_greedy(&case.g, &tight, delta, ell).unwrap();
            let b = extended_threshold_greedy(&case.g, &loose, delta, ell).unwrap();
            // every round that starts with a positive marginal walks the whole schedule
            let walks_schedule = |rs: &[robsub::greedy::RoundOutput]| {
                rs.iter().all(|r| r.passes == t || (r.passes == 0 && r.set.is_empty()))
            };
            if !walks_schedule(&a) || !walks_schedule(&b) || a[0].passes != b[0].passes {
                pass_mismatches.push(format!("seed {seed} ℓ={ell}"));
            }
        }
    }
    report(
        4,
        "evals ≤ ℓ·n·(T(n,δ)+1); T(n,δ) passes per round under b=1 and b=n",
        bound_violations.is_empty() && pass_mismatches.is_empty(),
        format!(
            "{runs} runs, {} over the bound, {} pass-count mismatches",
            bound_violations.len(),
            pass_mismatches.len()
        ),
    );
}

#[test]
fn c05_lazy_equals_naive() {
    let mut same = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(5..=30);
        let g = random_coverage(&mut rng, n, 20, 0.15).unwrap();
        let q = rng.random_range(1..=5);
        let m = random_partition(&mut rng, n, q, 4).unwrap();
        if lazy_greedy(&g, &m, &[]).unwrap().set == naive_greedy(&g, &m, &[]).unwrap().set {
            same += 1;
        }
    }
    report(
        5,
        "lazy greedy output equals naive greedy",
        same == 100,
        format!("{same}/100 identical"),
    );
}

#[test]
fn c06_early_stopping_soundness() {
    let mut fired = 0;
    let mut violations = Vec::new();
    for seed in 0..100 {
        for epsilon in [0.1, 0.01] {
            let (inst, opt) = robust_instance(seed, epsilon);
            for algorithm in Algorithm::ALL {
                let r = bicriteria_solve(&inst, algorithm, seed).unwrap();
                for step in r.history.iter().filter(|s| s.verdict == Verdict::GuaranteeFailed) {
                    fired += 1;
                    if opt >= step.gamma {
                        violations.push(format!("{algorithm} seed {seed}: γ={} OPT={opt}", step.gamma));
                    }
                }
            }
        }
    }
    report(
        6,
        "a failed round guarantee certifies OPT < γ",
        violations.is_empty(),
        format!(
            "{fired} early stops, {} unsound{}",
            violations.len(),
            violations.first().map(|v| format!("; first {v}")).unwrap_or_default()
        ),
    );
}

#[test]
fn c07_early_stopping_saves_evaluations() {
    let mut config = ExperimentConfig::new(ExperimentKind::CoverageSynthetic);
    config.k = 10;
    config.n = 200;
    config.epsilon = 0.01;
    let mut fewer = 0;
    let mut reductions = Vec::new();
    for seed in 0..20 {
        let generated = generate_instance(&config, seed).unwrap();
        let inst = generated.instance;
        let fast = bicriteria_solve(&inst, Algorithm::ExtendedGreedy, seed)
            .unwrap()
            .stats
            .f_evals;
        let slow = bicriteria_solve(&inst, Algorithm::PrevExtendedGreedy, seed)
            .unwrap()
            .stats
            .f_evals;
        if fast < slow {
            fewer += 1;
        }
        reductions.push(slow as f64 / fast.max(1) as f64);
    }
    reductions.sort_by(f64::total_cmp);
    let median = (reductions[9] + reductions[10]) / 2.0;
    report(
        7,
        "early stopping + lazy evaluations cut f-level evaluations",
        fewer >= 19 && median >= 2.0,
        format!(
            "fewer on {fewer}/20 seeds, median reduction {median:.2}x (min {:.2}x, max {:.2}x)",
            reductions[0], reductions[19]
        ),
    );
}

fn log_det(m: &DMatrix<f64>, idx: &[usize], noise: f64) -> f64 {
    let k = idx.len();
    let sub = DMatrix::from_fn(k, k, |i, j| (i == j) as u8 as f64 + m[(idx[i], idx[j])] / noise);
    0.5 * sub.determinant().ln()
}

#[test]
fn c08_numerical_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_rel: f64 = 0.0;
    let mut queries = 0;
    while queries < 1000 {
        let dim = rng.random_range(2..=50);
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let sigma = &a * a.transpose() / dim as f64 + DMatrix::identity(dim, dim) * 0.1;
        let cov = CovarianceMatrix::new((&sigma + sigma.transpose()) / 2.0).unwrap();
        let noise = rng.random_range(0.5..2.0);
        let f = InfoGain::new(&cov, noise).unwrap();
        for _ in 0..50 {
            let size = rng.random_range(0..dim);
            let set = rand::seq::index::sample(&mut rng, dim, size + 1).into_vec();
            let (base, e) = set.split_at(size);
            let mut st = f.state_at(base).unwrap();
            let incremental = st.gain(e[0]).unwrap();
            let direct = log_det(cov.matrix(), &set, noise) - log_det(cov.matrix(), base, noise);
            worst_rel = worst_rel.max((incremental - direct).abs() / direct.abs().max(1e-300));
            queries += 1;
        }
    }

    let mut worst_abs: f64 = 0.0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let n = rng.random_range(2..=40);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let f = ExemplarClustering::with_origin(points.clone()).unwrap();
        let loss = |set: &[usize]| -> f64 {
            points
                .iter()
                .map(|p| {
                    let to_origin = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                    set.iter()
                        .map(|&v| {
                            p.iter()
                                .zip(&points[v])
                                .map(|(a, b)| (a - b) * (a - b))
                                .sum::<f64>()
                                .sqrt()
                        })
                        .fold(to_origin, f64::min)
                })
                .sum::<f64>()
                / n as f64
        };
        for _ in 0..50 {
            let size = rng.random_range(0..n);
            let set = rand::seq::index::sample(&mut rng, n, size + 1).into_vec();
            let (base, e) = set.split_at(size);
            let cached = f.state_at(base).unwrap().gain(e[0]).unwrap();
            let direct = loss(base) - loss(&set);
            worst_abs = worst_abs.max((cached - direct).abs());
        }
    }
    report(
        8,
        "incremental log-det within 1e-8 relative; clustering within 1e-9 absolute",
        worst_rel <= 1e-8 && worst_abs <= 1e-9,
        format!(
            "{queries} log-det queries, worst relative error {worst_rel:.2e}; worst clustering error {worst_abs:.2e}"
        ),
    );
}

#[test]
fn c09_structural_properties() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for seed in 0..40 {
        let case = robust_case(seed, 3).unwrap();
        if case.matroid.ground_size() > 8 {
            continue;
        }
        let opt = brute_force_robust_opt(&case.family, &case.matroid).unwrap().value;
        for scale in [0.5, 1.0, 2.0] {
            let gamma = scale * opt;
            if gamma <= 0.0 {
                continue;
            }
            let g = TruncatedAverage::new(case.family.clone(), gamma).unwrap();
            checked += 1;
            if !verify_monotone_submodular(&g).unwrap().passed() {
                failures.push(format!("g^γ seed {seed} γ={gamma}"));
            }
        }
    }
    let mut objectives = 0;
    let mut by_type: std::collections::BTreeMap<&str, (usize, usize)> = Default::default();
    for seed in 0..10 {
        for n in [1, 4, 8] {
            for (name, f) in shipped_objectives(seed, n).unwrap() {
                objectives += 1;
                let tally = by_type.entry(name).or_default();
                tally.1 += 1;
                if let Some(v) = verify_monotone_submodular(f.as_ref()).unwrap().violation {
                    tally.0 += 1;
                    failures.push(format!("{name} seed {seed} n={n}: {v:?}"));
                }
            }
        }
    }
    let failing_types: Vec<String> = by_type
        .iter()
        .filter(|(_, (bad, _))| *bad > 0)
        .map(|(name, (bad, total))| format!("{name} {bad}/{total}"))
        .collect();
    report(
        9,
        "g^γ and every objective type are monotone submodular (n ≤ 8)",
        failures.is_empty(),
        format!(
            "{checked} surrogate checks, {objectives} objective checks, {} violations [{}]{}",
            failures.len(),
            failing_types.join(", "),
            failures.first().map(|f| format!("; first {f}")).unwrap_or_default()
        ),
    );
}

#[test]
fn c10_bracket_invariant() {
    let mut traces = 0;
    let (mut lb_side, mut ub_side, mut wide) = (0, 0, 0);
    let mut lb_union_feasible = 0;
    let mut first = None;
    for seed in 0..100 {
        for epsilon in [0.1, 0.01] {
            let (inst, opt) = robust_instance(seed, epsilon);
            for algorithm in Algorithm::ALL {
                let r = bicriteria_solve(&inst, algorithm, seed).unwrap();
                traces += 1;
                let lb_ok = r.lb <= opt && r.history.iter().all(|s| s.lb <= opt);
                let ub_ok = opt <= r.ub && r.history.iter().all(|s| opt <= s.ub);
                if !lb_ok {
                    lb_side += 1;
                    if inst.matroid.is_independent(&r.union).unwrap() {
                        lb_union_feasible += 1;
                    }
                    first.get_or_insert(format!(
                        "{algorithm} ε={epsilon} seed {seed}: lb={:.4} OPT={opt:.4} ub={:.4}",
                        r.lb, r.ub
                    ));
                }
                if !ub_ok {
                    ub_side += 1;
                }
                if r.gap() > 2.0 * epsilon {
                    wide += 1;
                }
            }
        }
    }
    report(
        10,
        "lb ≤ OPT ≤ ub throughout, (ub−lb)/ub ≤ 2ε at the end",
        lb_side == 0 && ub_side == 0 && wide == 0,
        format!(
            "{traces} traces: {lb_side} with lb > OPT ({lb_union_feasible} of them with a feasible union), {ub_side} with ub < OPT, {wide} with a final gap above 2ε{}",
            first.map(|v| format!("; first {v}")).unwrap_or_default()
        ),
    );
}

#[test]
fn c11_bench_determinism() {
    let mut config = ExperimentConfig::new(ExperimentKind::CoverageSynthetic);
    config.n = 60;
    config.k = 5;
    config.repetitions = 4;
    config.seed = 2024;
    config.algorithm = Algorithm::ALL.to_vec();
    let stream = |threads| {
        let records = run_experiment(
            &config,
            RunOptions {
                timing: false,
                threads: Some(threads),
            },
        )
        .unwrap();
        let mut bytes = Vec::new();
        write_records(&records, &mut bytes).unwrap();
        (records.len(), bytes)
    };
    let (count, first) = stream(1);
    let (_, second) = stream(1);
    let (_, parallel) = stream(4);
    report(
        11,
        "repeated bench runs give byte-identical record streams",
        first == second && first == parallel,
        format!(
            "{count} records, {} bytes; repeat identical: {}, 4-thread identical: {}",
            first.len(),
            first == second,
            first == parallel
        ),
    );
}
