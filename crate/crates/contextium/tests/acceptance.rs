//! Acceptance suite: one pass/fail line per criterion, all criteria run even
//! when an earlier one fails, and the test fails if any criterion does.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use contextium::context::{
    classify_contexts, context_counts, count_contexts_closed_form, count_negative_closed_form,
    enumerate_contexts, enumerate_tables,
};
use contextium::inequality::{full_inequality, peres_mermin_inequality, two_qubit_15_inequality};
use contextium::report::{epsilon_limit_check, report_scaling};
use contextium::sim::{
    expectation_exact, locate_crossing, random_state, run_experiment, sequential_measure,
    threshold_scan, NoiseModel, StateKind,
};
use contextium::solver::{solve_exact, solve_local_search, table_parity_witness, LocalSearchConfig};

type Check = fn() -> Result<String, String>;

fn fail(msg: String) -> Result<(), String> {
    Err(msg)
}

fn check(ok: bool, msg: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        fail(msg.to_string())
    }
}

fn pass() -> Result<String, String> {
    Ok(String::new())
}

/// 1. Enumeration reproduces the exact context counts for n = 2..5 in under
/// five seconds, agreeing with the closed form.
fn criterion_1_context_counts() -> Result<String, String> {
    let started = Instant::now();
    let expected = [(2usize, 15u128), (3, 315), (4, 5355), (5, 86955)];
    for (n, want) in expected {
        let (total, _) = context_counts(n).map_err(|e| e.to_string())?;
        check(total == want, &format!("n={n}: enumerated {total}, want {want}"))?;
        let closed = count_contexts_closed_form(n).map_err(|e| e.to_string())?;
        check(closed == want, &format!("n={n}: closed form {closed}, want {want}"))?;
    }
    let elapsed = started.elapsed();
    check(
        elapsed.as_secs_f64() < 5.0,
        &format!("enumeration took {elapsed:?}, budget 5 s"),
    )?;
    pass()
}

/// 2. Negative-context counts match the closed form and yield the exact
/// tolerated-error fractions.
fn criterion_2_negative_counts() -> Result<String, String> {
    let expected = [(2usize, 3u128), (3, 90), (4, 1908), (5, 35400)];
    for (n, want) in expected {
        let (_, negatives) = context_counts(n).map_err(|e| e.to_string())?;
        check(
            negatives == want,
            &format!("n={n}: enumerated {negatives} negatives, want {want}"),
        )?;
        let closed = count_negative_closed_form(n).map_err(|e| e.to_string())?;
        check(closed == want, &format!("n={n}: closed form {closed}, want {want}"))?;
    }
    let rows = report_scaling(5, 0).map_err(|e| e.to_string())?;
    let eps: Vec<String> = rows.iter().map(|r| r.epsilon.to_string()).collect();
    let want = ["2/5", "4/7", "424/595", "4720/5797"];
    check(eps == want, &format!("epsilon fractions {eps:?}, want {want:?}"))?;
    pass()
}

/// 3. Brute force gives s = 12, b = 9 for the full two-qubit inequality and
/// s = 5, b = 4 for the six-context table inequality, in under one second.
fn criterion_3_exact_bounds() -> Result<String, String> {
    let started = Instant::now();
    let full = solve_exact(&two_qubit_15_inequality()).map_err(|e| e.to_string())?;
    check(
        full.s == 12 && full.bound == 9 && full.optimal,
        &format!("full n=2: s={}, b={}, want 12, 9", full.s, full.bound),
    )?;
    let pm = solve_exact(&peres_mermin_inequality()).map_err(|e| e.to_string())?;
    check(
        pm.s == 5 && pm.bound == 4 && pm.optimal,
        &format!("six-context: s={}, b={}, want 5, 4", pm.s, pm.bound),
    )?;
    let elapsed = started.elapsed();
    check(
        elapsed.as_secs_f64() < 1.0,
        &format!("exact solving took {elapsed:?}, budget 1 s"),
    )?;
    pass()
}

/// 4. Exactly ten 3x3 tables at n=2; each context sits in four of them; every
/// table has an odd number of negative lines and max-satisfiable 5 of 6.
fn criterion_4_ten_tables() -> Result<String, String> {
    let tables = enumerate_tables().map_err(|e| e.to_string())?;
    check(tables.len() == 10, &format!("found {} tables, want 10", tables.len()))?;
    let mut appearances: HashMap<_, usize> = HashMap::new();
    for table in &tables {
        let lines = table.line_contexts().map_err(|e| e.to_string())?;
        let negatives = lines.iter().filter(|c| c.is_negative()).count();
        check(
            negatives % 2 == 1,
            &format!("table has {negatives} negative lines, want odd"),
        )?;
        for line in lines {
            *appearances.entry(line).or_default() += 1;
        }
        let witness = table_parity_witness(table).map_err(|e| e.to_string())?;
        check(
            witness.max_satisfiable == 5 && witness.sign_product == -1,
            "table parity witness disagrees with 5-of-6",
        )?;
        let ineq = contextium::Inequality::from_contexts(
            2,
            table.line_contexts().map_err(|e| e.to_string())?,
            4,
        )
        .map_err(|e| e.to_string())?;
        let solved = solve_exact(&ineq).map_err(|e| e.to_string())?;
        check(solved.s == 5, &format!("table max-satisfiable {}, want 5", solved.s))?;
    }
    check(
        appearances.len() == 15,
        &format!("{} distinct contexts across tables, want 15", appearances.len()),
    )?;
    check(
        appearances.values().all(|&count| count == 4),
        "some context does not appear in exactly 4 tables",
    )?;
    pass()
}

/// 5. The 315 three-qubit contexts split into seven orbits of the known
/// sizes, with negative orbits of sizes 9 and 81.
fn criterion_5_symmetry_classes() -> Result<String, String> {
    let classes = classify_contexts(3).map_err(|e| e.to_string())?;
    check(classes.len() == 7, &format!("{} classes, want 7", classes.len()))?;
    let sizes: Vec<usize> = classes.iter().map(|c| c.orbit_size).collect();
    check(
        sizes == [27, 81, 9, 27, 81, 9, 81],
        &format!("orbit sizes {sizes:?}, want [27, 81, 9, 27, 81, 9, 81]"),
    )?;
    let mut negative_sizes: Vec<usize> = classes
        .iter()
        .filter(|c| c.negative)
        .map(|c| c.orbit_size)
        .collect();
    negative_sizes.sort();
    check(
        negative_sizes == [9, 81],
        &format!("negative orbit sizes {negative_sizes:?}, want [9, 81]"),
    )?;
    pass()
}

/// 6. Every context expectation equals its sign for 100 random pure and 100
/// random mixed states at n = 2 and 3, the aggregate equals N(n), and
/// noiseless sequential runs reproduce the sign on every shot.
fn criterion_6_state_independence() -> Result<String, String> {
    use rand::SeedableRng;
    for n in [2usize, 3] {
        let contexts = enumerate_contexts(n).map_err(|e| e.to_string())?;
        let total = contexts.len() as f64;
        for kind in [StateKind::Pure, StateKind::Mixed] {
            for seed in 0..100u64 {
                let state = random_state(n, kind, seed).map_err(|e| e.to_string())?;
                let mut aggregate = 0.0;
                for ctx in &contexts {
                    let value = expectation_exact(&state, ctx).map_err(|e| e.to_string())?;
                    let sign = ctx.sign() as f64;
                    check(
                        (value - sign).abs() < 1e-9,
                        &format!("n={n} seed={seed}: expectation {value} vs sign {sign}"),
                    )?;
                    aggregate += sign * value;
                }
                check(
                    (aggregate - total).abs() < 1e-6,
                    &format!("n={n} seed={seed}: aggregate {aggregate} vs N={total}"),
                )?;
            }
        }
        // noiseless sequential runs: outcome product equals the sign, always
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for seed in 0..3u64 {
            let state = random_state(n, StateKind::Pure, 1000 + seed).map_err(|e| e.to_string())?;
            for ctx in &contexts {
                for _ in 0..5 {
                    let (outcomes, _) =
                        sequential_measure(&state, ctx, &mut rng).map_err(|e| e.to_string())?;
                    let product: i8 = outcomes.iter().product();
                    check(
                        product == ctx.sign(),
                        &format!("n={n}: sequential product {product} vs sign {}", ctx.sign()),
                    )?;
                }
            }
        }
    }
    pass()
}

/// 7. 1e5-shot scans put the chi = b crossing at eps_corr 0.400 +/- 0.01
/// (n=2) and 0.571 +/- 0.01 (n=3), and the six-context chi estimate sits in
/// [5.2, 5.5] across eps_corr in [0.083, 0.133].
fn criterion_7_noise_threshold() -> Result<String, String> {
    let shots = 100_000u64;
    let cases = [
        (2usize, 0.065f64, 0.005f64, 5usize, 0.400f64),
        (3, 0.110, 0.005, 5, 4.0 / 7.0),
    ];
    for (n, grid_start, grid_step, points, expected) in cases {
        let ineq = full_inequality(n).map_err(|e| e.to_string())?;
        let state = random_state(n, StateKind::Pure, 11).map_err(|e| e.to_string())?;
        let flip_ps: Vec<f64> = (0..points).map(|i| grid_start + grid_step * i as f64).collect();
        let rows = threshold_scan(&state, &ineq, &flip_ps, shots, 42).map_err(|e| e.to_string())?;
        let crossing = locate_crossing(&rows, ineq.bound as f64)
            .ok_or_else(|| format!("n={n}: no crossing inside the scanned grid"))?;
        check(
            (crossing - expected).abs() <= 0.01,
            &format!("n={n}: crossing at eps_corr {crossing:.4}, want {expected:.4} +/- 0.01"),
        )?;
    }
    let pm = peres_mermin_inequality();
    let state = random_state(2, StateKind::Mixed, 13).map_err(|e| e.to_string())?;
    for eps in [0.09f64, 0.108, 0.13] {
        let noise = NoiseModel::from_eps_corr(eps).map_err(|e| e.to_string())?;
        let result =
            run_experiment(&state, &pm, noise, shots, 42, 0.0).map_err(|e| e.to_string())?;
        check(
            (5.2..=5.5).contains(&result.chi),
            &format!("eps_corr={eps}: chi {:.4} outside [5.2, 5.5]", result.chi),
        )?;
    }
    pass()
}

/// 8. Ceiling evidence at n=3: the counting argument claims at most 225
/// satisfied predictions, but 1000 local-search restarts reliably produce
/// verified assignments beating it. The criterion passes only when that
/// exceedance is found, independently re-counted, and flagged by the solver;
/// hiding or missing it is the failure mode. See README "A falsified bound".
fn criterion_8_local_search_ceiling() -> Result<String, String> {
    let ineq = full_inequality(3).map_err(|e| e.to_string())?;
    let report = solve_local_search(&ineq, LocalSearchConfig::new(1000, 0, 42))
        .map_err(|e| e.to_string())?;
    check(
        report.counting_ceiling == Some(225),
        &format!("ceiling reported as {:?}, want Some(225)", report.counting_ceiling),
    )?;
    check(
        report.s > 225 && report.exceeds_counting_ceiling,
        &format!(
            "search reached s={} (flag {}); expected to expose the false ceiling of 225",
            report.s, report.exceeds_counting_ceiling
        ),
    )?;
    // recount the witness here, independently of the solver internals
    let mut recount = 0usize;
    for term in &ineq.terms {
        let product: i8 = term
            .context
            .members()
            .iter()
            .map(|m| report.witness.get(m).expect("complete witness"))
            .product();
        if product == term.context.sign() {
            recount += 1;
        }
    }
    check(
        recount == report.s,
        &format!("independent recount {recount} disagrees with reported s={}", report.s),
    )?;
    // the all-plus model satisfies exactly the 225 positive contexts, so the
    // claimed ceiling is attainable but not maximal
    let all_plus = contextium::Assignment::all_plus(&ineq);
    let baseline =
        contextium::solver::satisfied_count(&ineq, &all_plus).map_err(|e| e.to_string())?;
    check(baseline == 225, &format!("all-plus baseline {baseline}, want 225"))?;
    Ok(format!(
        "falsification event detected and reported: verified assignment satisfies {} > 225 \
         contexts, so the claimed value 135 is not the true noncontextual maximum \
         (it is at least {})",
        report.s,
        2 * report.s as i64 - 315
    ))
}

/// 9. Tolerated error and degree of violation grow strictly for n = 2..10
/// from the closed forms, with the exact fractions of criterion 2 for n <= 5.
fn criterion_9_scaling() -> Result<String, String> {
    let report = epsilon_limit_check(10).map_err(|e| e.to_string())?;
    check(report.epsilon_strictly_increasing, "epsilon not strictly increasing")?;
    check(
        report.degree_ratios_above_one,
        &format!("degree ratios {:?} not all above 1", report.degree_ratios),
    )?;
    check(report.negative_fraction_below_half, "negative fraction reached 1/2")?;
    let rows = report_scaling(10, 0).map_err(|e| e.to_string())?;
    let degrees: Vec<f64> = rows.iter().map(|r| r.degree.to_f64()).collect();
    check(
        degrees.windows(2).all(|w| w[1] > w[0]),
        "degree of violation not strictly increasing",
    )?;
    let eps: Vec<String> = rows.iter().take(4).map(|r| r.epsilon.to_string()).collect();
    check(
        eps == ["2/5", "4/7", "424/595", "4720/5797"],
        &format!("closed-form fractions {eps:?} disagree with the exact values"),
    )?;
    pass()
}

#[test]
fn acceptance() {
    let criteria: [(&str, Check); 9] = [
        ("context counts n=2..5", criterion_1_context_counts),
        ("negative counts and fractions", criterion_2_negative_counts),
        ("exact noncontextual bounds", criterion_3_exact_bounds),
        ("ten-tables structure", criterion_4_ten_tables),
        ("symmetry classes", criterion_5_symmetry_classes),
        ("state-independence", criterion_6_state_independence),
        ("noise threshold", criterion_7_noise_threshold),
        ("local-search ceiling", criterion_8_local_search_ceiling),
        ("scaling report", criterion_9_scaling),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(note) if note.is_empty() => println!("criterion {number} ({name}): PASS"),
            Ok(note) => println!("criterion {number} ({name}): PASS - {note}"),
            Err(msg) => {
                println!("criterion {number} ({name}): FAIL - {msg}");
                failures.push(format!("criterion {number} ({name}): {msg}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
