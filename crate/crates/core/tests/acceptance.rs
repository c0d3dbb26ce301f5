//! Exit criteria for the library. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::time::Instant;

use common::{affine_predict, naive_step, normal_equations, TestRng};
use reca::bits::{BitMatrix, BitVector};
use reca::pipeline::{run_batch, BatchResult, RunConfig};
use reca::readout::RIDGE_SCALE;
use reca::sweep::{run_sweep, write_csv, SweepSpec};
use reca::task::{all_patterns, evaluate};
use reca::{CaState, ReadoutModel, ReservoirParams, Rule, TrainingBatch};

const DIFFUSE: usize = 40;
const DISTRACTOR: usize = 200;
const BASE_SEED: u64 = 0;

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

fn params(rule: u8, iterations: usize, mapping_count: usize) -> ReservoirParams {
    ReservoirParams {
        rule: Rule::from(rule),
        iterations,
        mapping_count,
        diffuse_length: DIFFUSE,
        input_width: 4,
        seed: 0,
    }
}

fn single(rule: u8, i: usize, r: usize, runs: usize) -> BatchResult {
    run_batch(&RunConfig::single(params(rule, i, r), DISTRACTOR, BASE_SEED), runs).expect("batch")
}

fn layered(rule: u8, i: usize, r: usize, runs: usize) -> BatchResult {
    run_batch(&RunConfig::layered(params(rule, i, r), DISTRACTOR, BASE_SEED), runs).expect("batch")
}

fn c1_rule90_large() -> Outcome {
    let b = single(90, 8, 8, 30);
    outcome(
        b.layer1_successes >= 28,
        format!("rule 90 (8,8): {}/30 runs succeeded (need >= 28)", b.layer1_successes),
    )
}

fn c2_rule90_mid(b: &BatchResult) -> Outcome {
    let pct = b.layer1_percent();
    outcome(
        (pct - 66.1).abs() <= 12.0,
        format!("rule 90 (4,8): {pct:.1}% over {} runs (need 66.1 +/- 12)", b.n_runs),
    )
}

fn c3_rule180() -> Outcome {
    let small = single(180, 4, 4, 100);
    let large = single(180, 8, 8, 100);
    outcome(
        small.layer1_successes == 0 && large.layer1_successes == 0,
        format!(
            "rule 180: (4,4) {} and (8,8) {} successes over 100 runs each (need 0)",
            small.layer1_successes, large.layer1_successes
        ),
    )
}

fn c4_rule165_deep() -> Outcome {
    let b = layered(165, 4, 4, 300);
    let l1 = b.layer1_percent();
    let l2 = b.layer2_percent().unwrap();
    outcome(
        l2 > l1 && (l1 - 14.6).abs() <= 8.0,
        format!("rule 165 (4,4) over 300 runs: layer 1 {l1:.1}% (need 14.6 +/- 8), layer 2 {l2:.1}% (need > layer 1)"),
    )
}

fn c5_no_regression(rule90: &BatchResult) -> Outcome {
    let others = [(150u8, layered(150, 4, 8, 200)), (60, layered(60, 4, 8, 200))];
    let mut pass = true;
    let mut parts = Vec::new();
    for (rule, b) in std::iter::once((90u8, rule90)).chain(others.iter().map(|(r, b)| (*r, b))) {
        let (l1, l2) = (b.layer1_percent(), b.layer2_percent().unwrap());
        pass &= l2 >= l1 - 5.0;
        parts.push(format!("{rule}: {l1:.1}->{l2:.1}"));
    }
    outcome(pass, format!("(4,8) over 200 runs, layer 2 >= layer 1 - 5pp: {}", parts.join(", ")))
}

fn c6_packed_oracle() -> Outcome {
    let mut rng = TestRng::new(6);
    let mut mismatches = 0;
    for rule in 0..=255u8 {
        for _ in 0..200 {
            let width = 3 + rng.below(254);
            let bits = rng.bits(width);
            let packed = CaState::from_bits(&bits).unwrap().step(Rule::from(rule)).unwrap().to_bits();
            if packed != naive_step(&bits, rule) {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("256 rules x 200 states, widths 3-256: {mismatches} mismatches"))
}

fn c7_rule_algebra() -> Outcome {
    let r = Rule::from(102);
    let named = r.complement().number() == 153 && r.mirror().number() == 60 && r.complement().mirror().number() == 195;
    let mut rng = TestRng::new(7);
    let mut failures = 0;
    for n in 0..=255u8 {
        let rule = Rule::from(n);
        for _ in 0..100 {
            let width = 3 + rng.below(254);
            let s = CaState::from_bits(&rng.bits(width)).unwrap();
            let mirrored = s.step(rule).unwrap().reversed() == s.reversed().step(rule.mirror()).unwrap();
            let inverted = s.step(rule).unwrap().inverted() == s.inverted().step(rule.complement()).unwrap();
            if !(mirrored && inverted) {
                failures += 1;
            }
        }
    }
    outcome(
        named && failures == 0,
        format!("102 -> complement 153, mirror 60, both 195: {named}; commutation failures: {failures}"),
    )
}

fn c8_lambda() -> Outcome {
    let vals = [Rule::from(110).lambda(), Rule::from(0).lambda(), Rule::from(255).lambda()];
    outcome(vals == [0.625, 0.0, 1.0], format!("lambda(110, 0, 255) = {vals:?}"))
}

fn c9_task_structure() -> Outcome {
    let tasks = all_patterns(DISTRACTOR).unwrap();
    let mut ok = tasks.len() == 32;
    for s in &tasks {
        ok &= s.len() == 210;
        ok &= s.inputs.iter().chain(&s.targets).all(|r| r.iter().filter(|&&b| b == 1).count() == 1);
        let cues: Vec<usize> = (0..s.len()).filter(|&t| s.inputs[t][3] == 1).collect();
        // step 205 counting from one
        ok &= cues == vec![204];
        ok &= (0..5).all(|k| s.targets[205 + k][..2] == s.inputs[k][..2]);
    }
    let perfect: Vec<_> = tasks.iter().map(|t| t.targets.clone()).collect();
    let eval = evaluate(&perfect, &tasks).unwrap();
    ok &= eval.total_bits == 20160 && eval.correct_bits == 20160 && eval.success;
    outcome(ok, format!("32 sequences of 210 steps, cue at 205, {} bits scored", eval.total_bits))
}

fn c10_readout_oracle() -> Outcome {
    let mut rng = TestRng::new(10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let rows = 10 + rng.below(91);
        let cols = 1 + rng.below(50);
        let x: Vec<Vec<u8>> = (0..rows).map(|_| rng.bits(cols)).collect();
        let y: Vec<Vec<u8>> = (0..rows).map(|_| rng.bits(3)).collect();
        let batch = TrainingBatch::new(BitMatrix::from_rows(&x), BitMatrix::from_rows(&y)).unwrap();
        let model = ReadoutModel::fit(&batch).unwrap();
        let oracle = normal_equations(&x, &y, RIDGE_SCALE);
        for row in &x {
            let got = model.predict(&BitVector::from_bits(row)).unwrap();
            for (g, w) in got.iter().zip(affine_predict(&oracle, row)) {
                worst = worst.max((g - w).abs() / w.abs().max(1.0));
            }
        }
    }
    outcome(worst <= 1e-6, format!("20 random batches up to 100x50: worst relative deviation {worst:.2e} (need <= 1e-6)"))
}

fn c11_determinism() -> Outcome {
    let spec = SweepSpec {
        rules: vec![90, 165],
        combos: vec![(2, 4), (4, 4)],
        n_runs: 20,
        layered: true,
        base_seed: 42,
        ..SweepSpec::default()
    };
    let render = || {
        let tables = run_sweep(&spec, |_, _, _, _| {}).unwrap();
        let mut buf = Vec::new();
        write_csv(&spec, &tables, None, &mut buf).unwrap();
        buf
    };
    let (a, b) = (render(), render());
    outcome(a == b, format!("two sweeps of {} bytes each identical: {}", a.len(), a == b))
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| filter.is_empty() || filter.iter().any(|f| f == id);

    let mut results: Vec<(&str, &str, Outcome, f64)> = Vec::new();
    let mut check = |id: &'static str, name: &'static str, f: &dyn Fn() -> Outcome| {
        if wanted(id) {
            let start = Instant::now();
            let o = f();
            let secs = start.elapsed().as_secs_f64();
            println!("[{}] {id} {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            results.push((id, name, o, secs));
        }
    };

    check("C6", "packed stepper equals table lookup", &c6_packed_oracle);
    check("C7", "rule equivalences", &c7_rule_algebra);
    check("C8", "lambda values", &c8_lambda);
    check("C9", "5-bit task structure", &c9_task_structure);
    check("C10", "readout matches normal equations", &c10_readout_oracle);
    check("C11", "sweep CSV determinism", &c11_determinism);
    check("C1", "rule 90 (8,8) solves the task", &c1_rule90_large);
    check("C3", "rule 180 never succeeds", &c3_rule180);
    check("C4", "second layer improves rule 165 (4,4)", &c4_rule165_deep);
    if wanted("C2") || wanted("C5") {
        let rule90 = layered(90, 4, 8, 200);
        check("C2", "rule 90 (4,8) success rate", &|| c2_rule90_mid(&rule90));
        check("C5", "second layer does not regress", &|| c5_no_regression(&rule90));
    }

    let failed: Vec<&str> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
