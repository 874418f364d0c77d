//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always print.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spanforge::adversary::{adv_minimax, MinimaxOptions};
use spanforge::formula::{index_to_bits, Expr, Formula};
use spanforge::span::{
    compose_formula, eval_span, full_witness_size, make_and, make_or, witness_size,
};
use spanforge::spectra::{calibrate, zero_witness_exists};
use spanforge::sweep::{balanced_andor, corpus, measure, random_andor, Family};
use spanforge::verify::{
    check_balance_lemma, check_directsum_norm, check_formula, check_norm_lemma, check_root_bound,
    check_witness_bounds, Lemma, SuiteOptions,
};
use spanforge::GateSpec;

type Outcome = Result<(bool, String), String>;

fn run(id: u32, name: &str, limit: Option<Duration>, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut pass, mut summary) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            summary.push_str(&format!("; over the {:.0} s limit", limit.as_secs_f64()));
        }
    }
    println!(
        "[{}] {id:>2} {name}: {summary} ({:.2} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn main() {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Outcome); 10] = [
        (
            1,
            "gate witness-size table",
            Some(Duration::from_secs(5)),
            gate_table,
        ),
        (
            2,
            "composition exactness",
            Some(Duration::from_secs(60)),
            composition_exact,
        ),
        (3, "evaluation equivalences", None, evaluation_equivalence),
        (4, "full witness bounds per vertex", None, vertex_bounds),
        (5, "root full witness bound", None, root_bound),
        (6, "norm bounds", None, norm_bounds),
        (7, "balance lemma", None, balance),
        (8, "spectral gap lemma", None, gap),
        (9, "adversary minimax", None, minimax),
        (10, "query estimate scaling", None, scaling),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        if !run(id, name, limit, f) {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn err(e: spanforge::Error) -> String {
    e.to_string()
}

fn gate_table() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s1 = rng.gen_range(1.0..=100.0);
        let s2 = rng.gen_range(1.0..=100.0);
        let sp: f64 = s1 + s2;
        let costs = [f64::sqrt(s1), f64::sqrt(s2)];
        let and = make_and(s1, s2).map_err(err)?;
        let or = make_or(s1, s2).map_err(err)?;
        for i in 0..4 {
            let x = index_to_bits(i, 2);
            let a = witness_size(&and, &x, &costs).map_err(err)?.size;
            let o = witness_size(&or, &x, &costs).map_err(err)?.size;
            let a_expected = if i == 0 { sp.sqrt() / 2.0 } else { sp.sqrt() };
            let o_expected = if i == 3 { sp.sqrt() / 2.0 } else { sp.sqrt() };
            worst = worst.max((a - a_expected).abs() / a_expected);
            worst = worst.max((o - o_expected).abs() / o_expected);
        }
    }
    Ok((
        worst <= 1e-9,
        format!("max relative error {worst:.2e} over 100 pairs (limit 1e-9)"),
    ))
}

fn composition_exact() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, phi) in corpus() {
        let c = compose_formula(&phi).map_err(err)?;
        let n = c.n();
        let mut max = 0.0f64;
        for i in 0..1usize << n {
            let x = index_to_bits(i, n);
            max = max.max(
                witness_size(c.program(), &x, c.input_costs())
                    .map_err(err)?
                    .size,
            );
        }
        worst = worst.max((max - (n as f64).sqrt()).abs());
        count += 1;
    }
    Ok((
        worst <= 1e-6,
        format!("max |max_x wsize - sqrt n| = {worst:.2e} over {count} formulas (limit 1e-6)"),
    ))
}

fn evaluation_equivalence() -> Outcome {
    let mut mismatches = 0;
    let mut checked = 0;
    for (_, phi) in corpus() {
        let c = compose_formula(&phi).map_err(err)?;
        let p = c.variable_program();
        let n = phi.num_vars();
        for i in 0..1usize << n {
            let x = index_to_bits(i, n);
            let f = phi.evaluate(&x).map_err(err)?;
            let s = eval_span(&p, &x).map_err(err)?;
            let z = zero_witness_exists(&p, &x).map_err(err)?;
            if f != s || f != z {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    Ok((
        mismatches == 0,
        format!("{mismatches} mismatches over {checked} inputs"),
    ))
}

fn vertex_bounds() -> Outcome {
    let opts = SuiteOptions::default();
    let mut failed = 0;
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    for (name, phi) in corpus() {
        let reports = check_formula(&phi, &[Lemma::Witness], &opts).map_err(err)?;
        let r = &reports[0];
        checked += r.details["checked"].as_u64().unwrap_or(0);
        worst = worst.max(r.lhs - r.rhs);
        if !r.pass {
            failed += 1;
            println!(
                "    {name}: {}",
                serde_json::to_string(r).unwrap_or_default()
            );
        }
    }
    let and = compose_formula(
        &spanforge::formula::parse("AND(x1,x2)", &spanforge::Registry::standard()).map_err(err)?,
    )
    .map_err(err)?;
    let eq = check_witness_bounds(&and, &[true, true]).map_err(err)?;
    let exact = 1.0 + 2f64.sqrt();
    let eq_err = (eq.lhs - exact).abs().max((eq.rhs - exact).abs());
    let direct = full_witness_size(and.program(), &[true, true], and.input_costs()).map_err(err)?;
    let eq_err = eq_err.max((direct.full_size - exact).abs());
    Ok((
        failed == 0 && eq_err <= 1e-12,
        format!(
            "{checked} vertex-input pairs, {failed} formulas failing, worst lhs-rhs {worst:.3e}; AND(x1,x2) at 11 equality error {eq_err:.1e}"
        ),
    ))
}

fn root_bound() -> Outcome {
    let mut failed = 0;
    let mut worst = f64::NEG_INFINITY;
    for (_, phi) in corpus() {
        let c = compose_formula(&phi).map_err(err)?;
        let r = check_root_bound(&phi, &c).map_err(err)?;
        worst = worst.max(r.lhs - r.rhs);
        if !r.pass {
            failed += 1;
        }
    }
    Ok((
        failed == 0,
        format!("{failed} failures, worst wsizef - 2 sigma sqrt(n) = {worst:.3e} (tolerance 1e-8)"),
    ))
}

fn norm_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut norm_failed = 0;
    for _ in 0..20 {
        let p = make_or(rng.gen_range(1.0..50.0), rng.gen_range(1.0..50.0)).map_err(err)?;
        let costs = [rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0)];
        if !check_norm_lemma(&p, &costs).map_err(err)?.pass {
            norm_failed += 1;
        }
    }
    let mut ds_checked = 0;
    let mut ds_failed = 0;
    let mut root_failed = 0;
    let mut worst_ratio = 0.0f64;
    for (_, phi) in corpus() {
        let c = compose_formula(&phi).map_err(err)?;
        for (k, node) in c.descendants().into_iter().enumerate() {
            let r = check_directsum_norm(node);
            ds_checked += 1;
            if !r.pass {
                ds_failed += 1;
                if k == 0 {
                    root_failed += 1;
                }
            }
            if k == 0 {
                worst_ratio =
                    worst_ratio.max(r.lhs / r.details["max_gate_abs_norm"].as_f64().unwrap_or(1.0));
            }
        }
    }
    Ok((
        norm_failed == 0 && ds_failed == 0 && root_failed == 0,
        format!(
            "canonical OR: {norm_failed}/20 failing; direct sum: {ds_failed}/{ds_checked} failing; corpus roots: {root_failed} failing, largest norm / max gate norm {worst_ratio:.4}"
        ),
    ))
}

fn complete_or(depth: u32, first: usize) -> Expr {
    if depth == 0 {
        return Expr::var(first);
    }
    let half = 1usize << (depth - 1);
    Expr::or(vec![
        complete_or(depth - 1, first),
        complete_or(depth - 1, first + half),
    ])
}

fn balance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failed = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=64);
        let phi = random_andor(n, &mut rng).map_err(err)?;
        if !check_balance_lemma(&phi).map_err(err)?.pass {
            failed += 1;
        }
    }
    let mut eq_err = 0.0f64;
    for depth in 1..=6 {
        let trees = [
            Formula::new(complete_or(depth, 1)).map_err(err)?,
            balanced_andor(1 << depth).map_err(err)?,
        ];
        for phi in trees {
            let r = check_balance_lemma(&phi).map_err(err)?;
            let ratio = r.details["min_ratio"].as_f64().unwrap_or(f64::NAN);
            let bound = r.details["ratio_bound"].as_f64().unwrap_or(f64::NAN);
            eq_err = eq_err.max((ratio - bound).abs());
        }
    }
    Ok((
        failed == 0 && eq_err <= 1e-9,
        format!("{failed}/200 random formulas failing; complete binary trees equality error {eq_err:.1e}"),
    ))
}

fn gap() -> Outcome {
    let opts = SuiteOptions::default();
    let mut failed = 0;
    let mut inputs = 0;
    let mut nonvacuous = 0;
    let mut calibrated = 0;
    for (name, phi) in corpus() {
        if phi.num_vars() <= 10 {
            let cal = calibrate(&phi).map_err(err)?;
            if !cal.passed() {
                return Ok((
                    false,
                    format!("calibration failed on {name}: {:?}", cal.mismatches),
                ));
            }
            calibrated += cal.inputs_checked;
        }
        let reports = check_formula(&phi, &[Lemma::Gap], &opts).map_err(err)?;
        let r = &reports[0];
        inputs += r.details["checked"].as_u64().unwrap_or(0);
        if r.details["worst"]["details"]["eigenvalues_in_range"]
            .as_array()
            .is_some_and(|a| !a.is_empty())
        {
            nonvacuous += 1;
        }
        if !r.pass {
            failed += 1;
            println!(
                "    {name}: {}",
                serde_json::to_string(r).unwrap_or_default()
            );
        }
    }
    Ok((
        failed == 0,
        format!(
            "{failed} formulas failing over {inputs} inputs; {nonvacuous} formulas with in-range eigenvalues at the worst input; calibration exhaustive on {calibrated} inputs"
        ),
    ))
}

/// `max ||Gamma|| / max_j ||Gamma o Delta_j||` over a grid on the
/// symmetric adversary matrices of MAJ3. Pairs are grouped by
/// `(|x|, |y|, distance)` up to complementing both strings.
fn maj3_grid_oracle() -> f64 {
    let weight = |x: usize| x.count_ones() as usize;
    let class = |x: usize, y: usize| -> Option<usize> {
        let (a, b) = if weight(x) <= weight(y) {
            (x, y)
        } else {
            (y, x)
        };
        let (wa, wb, d) = (weight(a), weight(b), (a ^ b).count_ones());
        match (wa, wb, d) {
            (1, 2, 1) => Some(0),
            (0, 3, 3) => Some(1),
            (0, 2, 2) | (1, 3, 2) => Some(2),
            (1, 2, 3) => Some(3),
            _ => None,
        }
    };
    let steps = 10;
    let mut best = 0.0f64;
    for code in 0..(steps + 1usize).pow(4) {
        let mut w = [0.0; 4];
        let mut c = code;
        for slot in &mut w {
            *slot = (c % (steps + 1)) as f64 / steps as f64;
            c /= steps + 1;
        }
        let gamma = DMatrix::from_fn(8, 8, |x, y| {
            let fx = weight(x) >= 2;
            let fy = weight(y) >= 2;
            if fx == fy {
                0.0
            } else {
                class(x, y).map_or(0.0, |k| w[k])
            }
        });
        let mut worst_mask = 0.0f64;
        for j in 0..3 {
            let bit = 1usize << (2 - j);
            let masked = DMatrix::from_fn(8, 8, |x, y| {
                if (x ^ y) & bit != 0 {
                    gamma[(x, y)]
                } else {
                    0.0
                }
            });
            worst_mask = worst_mask.max(masked.singular_values().max());
        }
        if worst_mask > 0.0 {
            best = best.max(gamma.singular_values().max() / worst_mask);
        }
    }
    best
}

fn minimax() -> Outcome {
    let opts = MinimaxOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut closed_err = 0.0f64;
    for i in 0..50 {
        let s = [rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)];
        let gate = if i % 2 == 0 {
            GateSpec::or(2)
        } else {
            GateSpec::and(2)
        };
        let v = adv_minimax(&gate, &s, &opts).map_err(err)?.value;
        closed_err = closed_err.max((v - (s[0] * s[0] + s[1] * s[1]).sqrt()).abs());
    }
    let mut scale_err = 0.0f64;
    for (gate, s) in [
        (GateSpec::or(2), vec![1.0, 2.0]),
        (GateSpec::maj3(), vec![1.0, 1.5, 0.7]),
        (GateSpec::and(3), vec![0.5, 1.0, 2.0]),
    ] {
        let base = adv_minimax(&gate, &s, &opts).map_err(err)?.value;
        for c in [0.5, 3.0, 10.0] {
            let scaled: Vec<f64> = s.iter().map(|v| v * c).collect();
            let v = adv_minimax(&gate, &scaled, &opts).map_err(err)?.value;
            scale_err = scale_err.max((v - c * base).abs() / (c * base));
        }
    }
    let maj = adv_minimax(&GateSpec::maj3(), &[1.0; 3], &opts)
        .map_err(err)?
        .value;
    let oracle = maj3_grid_oracle();
    let maj_err = (maj - oracle).abs();
    Ok((
        closed_err <= 1e-3 && scale_err <= 1e-6 && maj_err <= 1e-2,
        format!(
            "AND/OR closed-form error {closed_err:.1e} (limit 1e-3); scaling error {scale_err:.1e} (limit 1e-6); MAJ3 {maj:.6} vs grid oracle {oracle:.6}"
        ),
    ))
}

fn scaling() -> Outcome {
    let mut ratios = Vec::new();
    for n in [2usize, 4, 8, 16, 32] {
        let phi = balanced_andor(n).map_err(err)?;
        let row = measure(Family::BalancedAndOr, format!("n{n}"), &phi, 0).map_err(err)?;
        ratios.push(row.t_est / ((n as f64).sqrt() * row.sigma_minus));
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let text: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    Ok((
        max / min < 2.0,
        format!(
            "T_est/(sqrt(n) sigma) = [{}], spread {:.3} (limit 2)",
            text.join(", "),
            max / min
        ),
    ))
}
