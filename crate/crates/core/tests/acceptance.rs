//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use bethemix::analysis::lemmas::{evaluate, sample_instance};
use bethemix::analysis::constants::q4b2_product_floor;
use bethemix::analysis::{
    bound_lemma_prod, bound_lemma_prod_exact, g, kappa, kappa_q4b2, solve_c, threshold_q, LemmaId, SamplerConfig,
    VerifyConfig,
};
use bethemix::experiments::{run_decay, run_oracle_check, run_suite, to_json, ExperimentConfig, OracleConfig, SuiteConfig};
use bethemix::messages::{product_sum, ratio, update, ArithmeticMode, Message, Rational};
use bethemix::seed;

const SUITE_SEED: u64 = 20_240_601;
const DECAY_SEED: u64 = 7;

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

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{}; {:.1} s", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {} s", o.detail, limit.as_secs());
        }
    }
    o
}

fn oracle_equivalence() -> Outcome {
    let mut nodes = 0;
    let mut failures = Vec::new();
    for q in [4, 5] {
        let r = run_oracle_check(&OracleConfig {
            q,
            b: 2,
            max_depth: 3,
            instances: 250,
            seed: 1,
            mode: ArithmeticMode::Rational,
            ..Default::default()
        });
        match r {
            Ok(r) => {
                nodes += r.nodes_checked;
                if !r.passed() {
                    failures.push(format!("q = {q}: {} mismatches, {} over cap", r.mismatches.len(), r.cap_exceeded));
                }
            }
            Err(e) => failures.push(format!("q = {q}: {e}")),
        }
    }
    if failures.is_empty() {
        outcome(true, format!("500 instances, {nodes} vertices equal"))
    } else {
        outcome(false, failures.join(", "))
    }
}

fn constants() -> Outcome {
    let c = solve_c(1e-3).unwrap();
    let prod = bound_lemma_prod_exact(4, 2).unwrap();
    let (floor, second) = q4b2_product_floor();
    let checks = [
        ((c - 1.764).abs() <= 1e-3, format!("c = {c:.6}")),
        (kappa_q4b2() == ratio(48, 49), format!("kappa_q4b2 = {}", kappa_q4b2())),
        (
            prod == ratio(2, 9) && floor == ratio(2, 9) && bound_lemma_prod(4, 2).unwrap() == 2.0 / 9.0,
            format!("prod(4,2) = {prod}"),
        ),
        (second == ratio(49, 216), format!("secondary = {second}")),
    ];
    let pass = checks.iter().all(|c| c.0);
    outcome(pass, checks.map(|c| c.1).join(", "))
}

fn threshold_sweep() -> Outcome {
    let mut worst = 0.0f64;
    for b in 2..=500u64 {
        let k = match threshold_q(b).and_then(|q| kappa(q as usize, b as usize)) {
            Ok(k) => k,
            Err(e) => return outcome(false, format!("b = {b}: {e}")),
        };
        worst = worst.max(k);
        if k >= 1.0 {
            return outcome(false, format!("kappa = {k} at b = {b}"));
        }
    }
    let gs: Vec<f64> = (2..=500).map(|b| g(b as f64).unwrap()).collect();
    let increasing = gs.windows(2).all(|w| w[1] > w[0]);
    let below = gs.iter().all(|&x| x < 1.0);
    outcome(
        increasing && below,
        format!(
            "max kappa {worst:.6}; g from {:.6} to {:.6}, increasing {increasing}, below one {below}",
            gs[0],
            gs[gs.len() - 1]
        ),
    )
}

fn boundary_case() -> Outcome {
    let k = kappa(4, 2).unwrap();
    outcome((k - 1.0).abs() <= 1e-15, format!("kappa(4,2) = {k:e}"))
}

fn suite_config() -> SuiteConfig {
    SuiteConfig {
        lemmas: LemmaId::ALL.to_vec(),
        qs: vec![4, 5, 6, 8],
        bs: vec![2, 3],
        skip_unsupported: true,
        verify: VerifyConfig {
            samples: 100_000,
            seed: SUITE_SEED,
            mode: ArithmeticMode::Float,
            sampler: SamplerConfig {
                p_edge: 0.25,
                ..Default::default()
            },
            ..Default::default()
        },
    }
}

fn suite_json() -> Result<(String, usize, usize, usize), String> {
    let r = run_suite(&suite_config()).map_err(|e| e.to_string())?;
    let rechecked = r.reports.iter().map(|x| x.rechecked).sum();
    Ok((to_json(&r).map_err(|e| e.to_string())?, r.reports.len(), r.total_violations(), rechecked))
}

fn lemma_suite(json: &Result<(String, usize, usize, usize), String>) -> Outcome {
    match json {
        Ok((_, runs, violations, rechecked)) => outcome(
            *violations == 0,
            format!("{runs} runs of 100000 samples, {violations} violations, {rechecked} exact rechecks"),
        ),
        Err(e) => outcome(false, e.clone()),
    }
}

fn equality_witnesses() -> Outcome {
    let shapes = ["pinned-first", "pinned-second", "complementary-pairs"];
    let mut found = [0usize; 3];
    let mut bad = 0;
    let mut rng = seed::stream(3, seed::label_id("equality probes"));
    let cfg = SamplerConfig::default();
    let mut draws = 0;
    while draws < 200_000 && found.contains(&0) {
        draws += 1;
        let inst = sample_instance(LemmaId::Prodlb4, 4, 2, &cfg, &mut rng).unwrap();
        let ck = evaluate::<Rational>(LemmaId::Prodlb4, 4, 2, &inst).unwrap();
        if let Some(label) = ck.equality.as_deref() {
            if product_sum(&inst.messages).unwrap() != ratio(2, 9) {
                bad += 1;
            }
            if let Some(i) = shapes.iter().position(|s| *s == label) {
                found[i] += 1;
            }
        }
    }

    let a = Message::from_ratios(&[(0, 1), (1, 3), (1, 3), (1, 3)]).unwrap();
    let c = Message::from_ratios(&[(1, 3), (0, 1), (1, 3), (1, 3)]).unwrap();
    let got = update(&[a, c]).unwrap();
    let expected = [ratio(1, 6), ratio(1, 6), ratio(1, 3), ratio(1, 3)];
    let mut sorted = got.entries().to_vec();
    sorted.sort();
    let same_multiset = sorted == expected;
    let literal = got.entries() == expected;
    let shown: Vec<String> = got.entries().iter().map(|x| x.to_string()).collect();
    let note = if literal {
        String::new()
    } else {
        " (matches (1/6,1/6,1/3,1/3) only up to a color permutation)".to_string()
    };
    outcome(
        !found.contains(&0) && bad == 0 && same_multiset,
        format!(
            "shapes {:?} after {draws} draws with product 2/9; update = ({}){note}",
            found,
            shown.join(", ")
        ),
    )
}

fn decay_json() -> Result<(String, bethemix::experiments::DecayReport), String> {
    let r = run_decay(&ExperimentConfig {
        q: 5,
        b: 2,
        depth: 10,
        distances: (3..=10).collect(),
        trials: 50,
        master_seed: DECAY_SEED,
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    Ok((to_json(&r).map_err(|e| e.to_string())?, r))
}

fn decay(json: &Result<(String, bethemix::experiments::DecayReport), String>) -> Outcome {
    match json {
        Ok((_, r)) => {
            let rate = r.fitted_rate.unwrap_or(f64::NAN);
            outcome(
                r.envelope_ok && r.rate_ok == Some(true),
                format!(
                    "envelope {} (kappa {:.6}); fitted rate {rate:.4} vs {:.4} - 0.1",
                    if r.envelope_ok { "holds" } else { "broken" },
                    r.contraction_factor,
                    r.predicted_rate
                ),
            )
        }
        Err(e) => outcome(false, e.clone()),
    }
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "oracle equivalence", timed(Some(Duration::from_secs(60)), oracle_equivalence)));
    results.push((2, "constants", timed(None, constants)));
    results.push((3, "threshold sweep", timed(Some(Duration::from_secs(5)), threshold_sweep)));
    results.push((4, "boundary case", timed(None, boundary_case)));

    let mut suite = None;
    results.push((
        5,
        "lemma suite",
        timed(Some(Duration::from_secs(600)), || {
            let j = suite_json();
            let o = lemma_suite(&j);
            suite = Some(j);
            o
        }),
    ));
    results.push((6, "equality witnesses", timed(None, equality_witnesses)));
    let mut first_decay = None;
    results.push((
        7,
        "decay",
        timed(Some(Duration::from_secs(300)), || {
            let j = decay_json();
            let o = decay(&j);
            first_decay = Some(j);
            o
        }),
    ));
    results.push((
        8,
        "determinism",
        timed(None, || {
            let suite_again = suite_json();
            let decay_again = decay_json();
            let same_suite = matches!((&suite, &suite_again), (Some(Ok(a)), Ok(b)) if a.0 == b.0);
            let same_decay = matches!((&first_decay, &decay_again), (Some(Ok(a)), Ok(b)) if a.0 == b.0);
            outcome(
                same_suite && same_decay,
                format!("suite identical {same_suite}, decay identical {same_decay}"),
            )
        }),
    ));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n} ({name}): {tag}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
