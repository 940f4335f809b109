//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Failing criteria are reported but do not fail the run unless
//! `ACCEPTANCE_STRICT=1` is set.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use iacm::approx::{create_constraint_matrix, get_constraint_distribution, iacm, EmpiricalInputs};
use iacm::causation::{calc_causal_probabilities, probabilities_decreasing, probabilities_increasing, MonotoneKind};
use iacm::discovery::{discover, DiscoveryConfig, DiscoveryData, PreprocessMode};
use iacm::dist::{kl_divergence, marginalize, DiscreteDistribution, MarginalSelector};
use iacm::lp::{solve, LpProblem, LpStatus};
use iacm::models::build_support;
use iacm::synth::{run_benchmark, BenchmarkConfig, BenchmarkMethod, NoiseKind};
use iacm::{CausalModelSpec, ErrorMode, IacmError, ModelVariant};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_simplex(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // cubed uniforms give a spread of near-zero and dominant cells
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>().powi(3) + 1e-12).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Independent random observational joint and interventional marginals.
fn random_inputs(b_x: usize, b_y: usize, rng: &mut ChaCha8Rng) -> EmpiricalInputs {
    let joint = DiscreteDistribution::from_sizes(&[b_x, b_y], random_simplex(b_x * b_y, rng)).unwrap();
    let int = (0..b_x)
        .map(|_| DiscreteDistribution::from_sizes(&[b_y], random_simplex(b_y, rng)).unwrap())
        .collect();
    EmpiricalInputs::new(joint, int).unwrap()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cm = create_constraint_matrix(2, 2).unwrap();
    let a = DMatrix::from_row_slice(cm.rows, cm.cols, &cm.data);
    let c = build_support(&CausalModelSpec::bivariate(ModelVariant::XToY, 2, 2))
        .unwrap()
        .objective_coeffs;
    let bases = combinations(cm.cols, cm.rows);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rhs = get_constraint_distribution(&random_inputs(2, 2, &mut rng));
        let sol = solve(&LpProblem::new(cm.rows, cm.cols, cm.data.clone(), rhs.clone(), c.clone()).unwrap());
        if sol.status != LpStatus::Optimal {
            return outcome(false, format!("solver status {:?}", sol.status));
        }
        let b = DVector::from_vec(rhs);
        let mut best = f64::NEG_INFINITY;
        for basis in &bases {
            let sub = a.select_columns(basis);
            let Some(x) = sub.clone().lu().solve(&b) else { continue };
            if (&sub * &x - &b).amax() > 1e-9 || x.iter().any(|&v| v < -1e-10) {
                continue;
            }
            best = best.max(basis.iter().zip(x.iter()).map(|(&j, v)| c[j] * v).sum());
        }
        worst = worst.max((sol.objective - best).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-7 && elapsed < Duration::from_secs(120),
        format!(
            "100 instances, {} bases each; max |simplex - enumeration| = {worst:.2e} (tol 1e-7); {:.1}s (limit 120s)",
            bases.len(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Criteria 2 and 3 share their instances.
fn criteria_2_3() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ranges = [(2, 2), (2, 3), (3, 2), (3, 3)];
    let (mut worst_identity, mut worst_dpi): (f64, f64) = (0.0, f64::NEG_INFINITY);
    let (mut checked, mut degenerate) = (0, 0);
    for i in 0..500 {
        let (b_x, b_y) = ranges[i % 4];
        let mut variants = vec![ModelVariant::XToY, ModelVariant::YToX];
        if (b_x, b_y) == (2, 2) {
            variants.extend([ModelVariant::XToYMonoInc, ModelVariant::XToYMonoDec]);
        }
        let variant = variants[(i / 4) % variants.len()];
        let spec = CausalModelSpec::bivariate(variant, b_x, b_y);
        let inputs = if variant.is_reversed() {
            random_inputs(b_y, b_x, &mut rng)
        } else {
            random_inputs(b_x, b_y, &mut rng)
        };
        match iacm(&inputs, &spec, ErrorMode::Global) {
            Ok(r) => {
                let kl = kl_divergence(&r.p_tilde, &r.p_hat).unwrap();
                worst_identity = worst_identity.max((kl + r.s_value.ln()).abs());
                worst_dpi = worst_dpi.max(r.local_error - r.global_error);
                checked += 1;
            }
            Err(IacmError::DegenerateModel) => degenerate += 1,
            Err(e) => {
                let fail = || outcome(false, format!("instance {i}: {e}"));
                return (fail(), fail());
            }
        }
    }
    let note = if degenerate > 0 {
        format!(" ({degenerate} monotone instances with zero support mass have no projection)")
    } else {
        String::new()
    };
    (
        outcome(
            worst_identity <= 1e-9,
            format!("{checked} instances; max |D(p~||p^) + ln S| = {worst_identity:.2e} (tol 1e-9){note}"),
        ),
        outcome(
            worst_dpi <= 1e-9,
            format!("{checked} instances; max (local - global) = {worst_dpi:.2e} (tol 1e-9)"),
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for b_x in 2..=4 {
        for b_y in 2..=4 {
            let joint = DiscreteDistribution::from_sizes(&[b_x, b_y], vec![1.0 / (b_x * b_y) as f64; b_x * b_y]).unwrap();
            let int = vec![DiscreteDistribution::from_sizes(&[b_y], vec![1.0 / b_y as f64; b_y]).unwrap(); b_x];
            let inputs = EmpiricalInputs::new(joint, int).unwrap();
            let r = iacm(&inputs, &CausalModelSpec::bivariate(ModelVariant::XToY, b_x, b_y), ErrorMode::Global).unwrap();
            worst = worst.max((r.s_value - 1.0).abs());
        }
    }
    outcome(worst <= 1e-9, format!("(b_x, b_y) in {{2..4}}^2; max |S - 1| = {worst:.2e} (tol 1e-9)"))
}

fn criterion_5() -> Outcome {
    let mut mismatches = Vec::new();
    for b_x in 2..=4usize {
        for b_y in 2..=4usize {
            let s = build_support(&CausalModelSpec::bivariate(ModelVariant::XToY, b_x, b_y)).unwrap();
            let want = b_x * b_y.pow(b_x as u32);
            if s.len() != want {
                mismatches.push(format!("({b_x},{b_y}): {} != {want}", s.len()));
            }
        }
    }
    let binary: Vec<String> = build_support(&CausalModelSpec::bivariate(ModelVariant::XToY, 2, 2))
        .unwrap()
        .members()
        .map(|i| format!("{i:04b}"))
        .collect();
    let paper = ["0000", "0001", "0110", "0111", "1000", "1010", "1101", "1111"];
    let list_ok = binary == paper;
    outcome(
        mismatches.is_empty() && list_ok,
        format!(
            "9 range pairs{}; binary support {:?}{}",
            if mismatches.is_empty() { " match b_x*b_y^b_x".to_string() } else { format!(" mismatched: {mismatches:?}") },
            binary,
            if list_ok { " == paper list" } else { " != paper list" }
        ),
    )
}

fn criterion_6() -> Outcome {
    let run = |negate: bool| {
        let f = |x: usize| if negate { 1 - x } else { x };
        let observational: Vec<(usize, usize)> = (0..1000).map(|i| (usize::from(i % 5 < 2), 0)).map(|(x, _)| (x, f(x))).collect();
        let groups: Vec<Vec<usize>> = (0..2).map(|a| vec![f(a); 500]).collect();
        let inputs = EmpiricalInputs::from_rows(&observational, &groups, 2, 2, 0.0).unwrap();
        calc_causal_probabilities(&inputs, ErrorMode::Local).unwrap()
    };
    let mut lines = Vec::new();
    let mut pass = true;
    for (negate, kind) in [(false, MonotoneKind::Increasing), (true, MonotoneKind::Decreasing)] {
        let r = run(negate);
        let ones = [r.pn, r.ps, Some(r.pns)]
            .iter()
            .all(|v| v.is_some_and(|v| (v - 1.0).abs() <= 1e-6));
        pass &= ones && r.monotone_kind == kind;
        lines.push(format!(
            "{}: {:?} pn={:?} ps={:?} pns={}",
            if negate { "Y=1-X" } else { "Y=X" },
            r.monotone_kind,
            r.pn,
            r.ps,
            r.pns
        ));
    }
    outcome(pass, lines.join("; ") + " (tol 1e-6)")
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut instances, mut terms_undefined) = (0.0f64, 0, 0);
    while instances < 200 {
        let inputs = random_inputs(2, 2, &mut rng);
        let increasing = instances % 2 == 0;
        let variant = if increasing { ModelVariant::XToYMonoInc } else { ModelVariant::XToYMonoDec };
        let r = match iacm(&inputs, &CausalModelSpec::bivariate(variant, 2, 2), ErrorMode::Local) {
            Ok(r) => r,
            Err(IacmError::DegenerateModel) => continue,
            Err(e) => return outcome(false, e.to_string()),
        };
        let joint = marginalize(&r.p_tilde, &MarginalSelector::new(vec![0, 1]).unwrap()).unwrap();
        let (probs, (x, y)) = if increasing {
            (probabilities_increasing(&r.p_tilde).unwrap(), (1, 1))
        } else {
            (probabilities_decreasing(&r.p_tilde).unwrap(), (0, 1))
        };
        // a term with zero weight contributes nothing even when its ratio is undefined
        let mut term = |weight: f64, v: Option<f64>| match v {
            Some(v) => weight * v,
            None => {
                terms_undefined += 1;
                0.0
            }
        };
        let necessity = term(joint.prob(&[x, y]), probs.pn);
        let rhs = necessity + term(joint.prob(&[1 - x, 1 - y]), probs.ps);
        // counterfactual mass: y_x = y and y_{1-x} != y
        let cf: f64 = r
            .p_tilde
            .mass()
            .iter()
            .enumerate()
            .filter(|&(cell, _)| {
                let yx = [(cell >> 1) & 1, cell & 1];
                yx[x] == y && yx[1 - x] != y
            })
            .map(|(_, m)| m)
            .sum();
        worst = worst.max((probs.pns - rhs).abs()).max((probs.pns - cf).abs());
        instances += 1;
    }
    outcome(
        worst <= 1e-6,
        format!(
            "200 projected monotone instances; max |PNS - (P(x,y)PN + P(x',y')PS)| and |PNS - P(counterfactual)| = {worst:.2e} (tol 1e-6); {terms_undefined} zero-weight terms"
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let bench = |noise_kind, ranges| {
        run_benchmark(&BenchmarkConfig {
            ranges,
            noise_kind,
            n_models: 200,
            n_samples: 1000,
            methods: vec![BenchmarkMethod::iacm()],
            seed: 0,
        })
        .unwrap()
    };
    let additive = bench(NoiseKind::Additive, vec![(2, 2), (3, 3)]);
    let multiplicative = bench(NoiseKind::Multiplicative, vec![(2, 2)]);
    let elapsed = start.elapsed();
    let rate = |r: &iacm::synth::BenchmarkReport, b| r.row(b, b, "IACM").unwrap().correct_rate();
    let cells = |r: &iacm::synth::BenchmarkReport, b| r.row(b, b, "IACM").unwrap().cell();
    let checks = [
        ("additive 2,2", rate(&additive, 2), (40.0, 75.0), cells(&additive, 2)),
        ("multiplicative 2,2", rate(&multiplicative, 2), (55.0, 100.0), cells(&multiplicative, 2)),
        ("additive 3,3", rate(&additive, 3), (35.0, 70.0), cells(&additive, 3)),
    ];
    let mut pass = elapsed < Duration::from_secs(15 * 60);
    let mut parts = Vec::new();
    for (name, r, (lo, hi), cell) in checks {
        let ok = (lo..=hi).contains(&r);
        pass &= ok;
        parts.push(format!("{name}: {cell} (correct,wrong,none) band [{lo:.0},{hi:.0}] {}", if ok { "ok" } else { "out" }));
    }
    parts.push(format!("{:.1}s (limit 900s)", elapsed.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let modes = [PreprocessMode::None, PreprocessMode::Split, PreprocessMode::SplitAndBalance];
    let mut mismatches = 0;
    for i in 0..100 {
        let (b_x, b_y) = [(2, 2), (2, 3), (3, 3), (3, 2)][i % 4];
        let n = rng.random_range(20..400);
        let rows: Vec<(usize, usize)> = (0..n).map(|_| (rng.random_range(0..b_x), rng.random_range(0..b_y))).collect();
        let cfg = DiscoveryConfig {
            mode: modes[i % 3],
            error_mode: if i % 2 == 0 { ErrorMode::Local } else { ErrorMode::Global },
            seed: rng.random(),
            ..Default::default()
        };
        let data = DiscoveryData::Pooled(rows);
        let v = discover(&data, b_x, b_y, &cfg).unwrap();
        let m = discover(&data.swapped(), b_y, b_x, &cfg).unwrap();
        if m != v.mirrored() {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("100 datasets; {mismatches} verdicts not exactly mirrored"))
}

/// Zero-equations transcribed per model; `true` if the cell is forced to zero.
fn forced_zero(variant: ModelVariant, names: &[String], cell: &[usize]) -> bool {
    let axis = |n: &str| cell[names.iter().position(|a| a == n).unwrap_or_else(|| panic!("no axis {n}"))];
    let z_values: Vec<usize> = match names.iter().position(|a| a == "z") {
        Some(i) => vec![cell[i]],
        None => vec![0, 1],
    };
    let (x, y) = (axis("x"), axis("y"));
    let vals = [0usize, 1];
    let mut hit = false;
    for &a in &z_values {
        match variant {
            ModelVariant::ZConfounder | ModelVariant::ZConfounderHidden => {
                let (xa, ya) = (axis(&format!("x_{a}")), axis(&format!("y_{a}")));
                for &x_a in &vals {
                    for &y_a in &vals {
                        let (xbar, ybar) = (1 - x_a, 1 - y_a);
                        hit |= (x, y, xa, ya) == (x_a, y_a, xbar, y_a);
                        hit |= (x, y, xa, ya) == (x_a, y_a, x_a, ybar);
                    }
                }
            }
            ModelVariant::ZChain | ModelVariant::ZChainHidden => {
                let xa_axis = axis(&format!("x_{a}"));
                for &x_a in &vals {
                    let y_xa = axis(&format!("y_{x_a}"));
                    for &yv in &vals {
                        let (xbar, ybar) = (1 - x_a, 1 - yv);
                        hit |= (x, y, xa_axis, y_xa) == (x_a, yv, xbar, yv);
                        hit |= (x, y, xa_axis, y_xa) == (x_a, yv, x_a, ybar);
                    }
                }
            }
            ModelVariant::ZCollider | ModelVariant::ZColliderHidden => {
                let ya_axis = axis(&format!("y_z{a}"));
                for b in vals {
                    let yb_axis = axis(&format!("y_x{b}"));
                    for &y_a in &vals {
                        let ybar = 1 - y_a;
                        hit |= (x, y, ya_axis, yb_axis) == (b, y_a, y_a, ybar);
                        hit |= (x, y, ya_axis, yb_axis) == (b, y_a, ybar, y_a);
                        hit |= (x, y, ya_axis, yb_axis) == (b, y_a, ybar, ybar);
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    hit
}

fn criterion_10() -> Outcome {
    let variants = [
        ModelVariant::ZConfounder,
        ModelVariant::ZConfounderHidden,
        ModelVariant::ZChain,
        ModelVariant::ZChainHidden,
        ModelVariant::ZCollider,
        ModelVariant::ZColliderHidden,
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for v in variants {
        let spec = CausalModelSpec::trivariate(v, 2, 2, 2);
        let layout = spec.layout().unwrap();
        let support = build_support(&spec).unwrap();
        let cells = layout.shape.cells();
        let (mut violations, mut non_maximal) = (0, 0);
        for i in 0..cells {
            let zero = forced_zero(v, &layout.axis_names, &layout.shape.coords(i));
            if support.member_flags[i] && zero {
                violations += 1;
            }
            if !support.member_flags[i] && !zero {
                non_maximal += 1;
            }
        }
        pass &= violations == 0 && non_maximal == 0 && cells <= 256;
        parts.push(format!("{v}: {}/{cells}", support.len()));
        if violations + non_maximal > 0 {
            parts.push(format!("{violations} violating, {non_maximal} missing"));
        }
    }
    outcome(pass, format!("support/cells {}; every support cell satisfies all zero-equations, every other cell is forced to zero", parts.join(", ")))
}

fn criterion_11() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let input = dir.join("noiseless.csv");
    let golden = std::fs::read(dir.join("noiseless_discover.json")).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_iacm"))
            .args(["discover", input.to_str().unwrap(), "--output", "json"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    let stable = a.stdout == b.stdout;
    let matches = a.status.success() && a.stdout == golden;
    outcome(
        stable && matches,
        format!(
            "exit {:?}; byte-stable across runs: {stable}; equals golden file: {matches}",
            a.status.code()
        ),
    )
}

fn main() {
    let names = [
        "LP-oracle equivalence",
        "projection identity",
        "data-processing inequality",
        "uniform inputs have zero error",
        "support counts",
        "deterministic causation",
        "PNS decomposition",
        "desk-scale benchmark bands",
        "column-swap antisymmetry",
        "trivariate zero-equations",
        "CLI golden file",
    ];
    let (c2, c3) = criteria_2_3();
    let results = vec![
        criterion_1(),
        c2,
        c3,
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    let mut failed = 0;
    for (i, (name, r)) in names.iter().zip(&results).enumerate() {
        println!("criterion {:>2} {} {name}: {}", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
