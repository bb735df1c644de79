//! Randomized verification of the bounds in [`super::lemmas`].
//!
//! Float mode screens every input in `f64` and re-decides exactly whenever
//! the relative slack drops below `recheck_floor` (equality cases always
//! do). Rational mode decides every input exactly. Work is split into a
//! fixed number of chunks, each with its own seeded stream, so a report
//! depends only on the seed and never on the worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemmas::{evaluate, hypotheses_hold, sample_instance, Instance, LemmaId};
use super::sampler::SamplerConfig;
use crate::error::{Error, Result};
use crate::messages::{ArithmeticMode, Message, Rational};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub mode: ArithmeticMode,
    pub sampler: SamplerConfig,
    pub chunks: usize,
    pub recheck_floor: f64,
    pub max_witnesses: usize,
    /// Hypothesis failures tolerated per accepted sample before giving up.
    pub max_resamples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            mode: ArithmeticMode::Float,
            sampler: SamplerConfig::default(),
            chunks: 64,
            recheck_floor: 1e-10,
            max_witnesses: 8,
            max_resamples: 100,
        }
    }
}

/// An input worth reporting, in exact form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub pinned: usize,
    pub messages: Vec<Message<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma: String,
    pub q: usize,
    pub b: usize,
    pub mode: ArithmeticMode,
    pub seed: u64,
    pub samples: usize,
    pub violations: usize,
    /// Smallest relative slack seen; clamped at 0 when the exact check passed.
    pub worst_margin: f64,
    pub rechecked: usize,
    pub resampled: usize,
    pub equality_count: usize,
    pub equality_witnesses: Vec<Witness>,
    pub violation_witnesses: Vec<Witness>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Default)]
struct Tally {
    samples: usize,
    violations: usize,
    worst_margin: f64,
    rechecked: usize,
    resampled: usize,
    equality_count: usize,
    equality_witnesses: Vec<Witness>,
    violation_witnesses: Vec<Witness>,
}

impl Tally {
    fn new() -> Self {
        Self {
            worst_margin: f64::INFINITY,
            ..Default::default()
        }
    }

    fn absorb(&mut self, other: Tally, cap: usize) {
        self.samples += other.samples;
        self.violations += other.violations;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        self.rechecked += other.rechecked;
        self.resampled += other.resampled;
        self.equality_count += other.equality_count;
        for (mine, theirs) in [
            (&mut self.equality_witnesses, other.equality_witnesses),
            (&mut self.violation_witnesses, other.violation_witnesses),
        ] {
            let room = cap.saturating_sub(mine.len());
            mine.extend(theirs.into_iter().take(room));
        }
    }
}

fn witness(inst: &Instance<Rational>, label: Option<String>) -> Witness {
    Witness {
        label,
        pinned: inst.pinned,
        messages: inst.messages.clone(),
    }
}

fn run_samples<R: Rng + ?Sized>(
    lemma: LemmaId,
    q: usize,
    b: usize,
    n: usize,
    cfg: &VerifyConfig,
    rng: &mut R,
) -> Result<Tally> {
    let mut t = Tally::new();
    for _ in 0..n {
        let mut failures = 0;
        let (inst, finst) = loop {
            let inst = sample_instance(lemma, q, b, &cfg.sampler, rng)?;
            let finst = inst.to_f64();
            let ok = match cfg.mode {
                ArithmeticMode::Float => hypotheses_hold(lemma, q, b, &finst)?,
                ArithmeticMode::Rational => hypotheses_hold(lemma, q, b, &inst)?,
            };
            if ok {
                break (inst, finst);
            }
            failures += 1;
            t.resampled += 1;
            if failures > cfg.max_resamples {
                return Err(Error::SamplerStuck(format!("hypotheses of {lemma} at q = {q}, b = {b}")));
            }
        };
        t.samples += 1;

        let screened = match cfg.mode {
            ArithmeticMode::Float => {
                let ck = evaluate::<f64>(lemma, q, b, &finst)?;
                let slack = ck.slack();
                (!ck.undecided && slack >= cfg.recheck_floor).then_some(slack)
            }
            ArithmeticMode::Rational => None,
        };
        let margin = match screened {
            Some(slack) => slack,
            None => {
                if cfg.mode == ArithmeticMode::Float {
                    t.rechecked += 1;
                }
                let ck = evaluate::<Rational>(lemma, q, b, &inst)?;
                let slack = ck.slack();
                if !ck.holds() {
                    t.violations += 1;
                    if t.violation_witnesses.len() < cfg.max_witnesses {
                        t.violation_witnesses.push(witness(&inst, None));
                    }
                    slack.min(-f64::MIN_POSITIVE)
                } else {
                    if lemma.records_equality() && ck.tight() {
                        t.equality_count += 1;
                        if t.equality_witnesses.len() < cfg.max_witnesses {
                            t.equality_witnesses.push(witness(&inst, ck.equality.clone()));
                        }
                    }
                    slack.max(0.0)
                }
            }
        };
        t.worst_margin = t.worst_margin.min(margin);
    }
    Ok(t)
}

fn finish(lemma: LemmaId, q: usize, b: usize, cfg: &VerifyConfig, t: Tally) -> VerificationReport {
    VerificationReport {
        lemma: lemma.label().to_string(),
        q,
        b,
        mode: cfg.mode,
        seed: cfg.seed,
        samples: t.samples,
        violations: t.violations,
        worst_margin: if t.worst_margin.is_finite() { t.worst_margin } else { 0.0 },
        rechecked: t.rechecked,
        resampled: t.resampled,
        equality_count: t.equality_count,
        equality_witnesses: t.equality_witnesses,
        violation_witnesses: t.violation_witnesses,
    }
}

/// Single-stream verification driven by the caller's generator.
pub fn verify_lemma_with_rng<R: Rng + ?Sized>(
    lemma: LemmaId,
    q: usize,
    b: usize,
    n_samples: usize,
    cfg: &VerifyConfig,
    rng: &mut R,
) -> Result<VerificationReport> {
    lemma.check_regime(q, b)?;
    let t = run_samples(lemma, q, b, n_samples, cfg, rng)?;
    Ok(finish(lemma, q, b, cfg, t))
}

/// Parallel verification of `cfg.samples` inputs.
pub fn verify_lemma(lemma: LemmaId, q: usize, b: usize, cfg: &VerifyConfig) -> Result<VerificationReport> {
    lemma.check_regime(q, b)?;
    let chunks = cfg.chunks.clamp(1, cfg.samples.max(1));
    let per = cfg.samples / chunks;
    let extra = cfg.samples % chunks;
    let label = seed::label_id(lemma.label());
    let parts: Vec<Tally> = seed::with_workers(|| {
        (0..chunks)
            .into_par_iter()
            .map(|i| {
                let n = per + usize::from(i < extra);
                let id = seed::stream_id(&[label, q as u64, b as u64, i as u64]);
                let mut rng = seed::stream(cfg.seed, id);
                run_samples(lemma, q, b, n, cfg, &mut rng)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut total = Tally::new();
    for p in parts {
        total.absorb(p, cfg.max_witnesses);
    }
    Ok(finish(lemma, q, b, cfg, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(samples: usize, mode: ArithmeticMode) -> VerifyConfig {
        VerifyConfig {
            samples,
            seed: 3,
            mode,
            ..Default::default()
        }
    }

    #[test]
    fn small_runs_pass() {
        for lemma in LemmaId::ALL {
            for (q, b) in [(4, 2), (5, 2)] {
                if lemma.check_regime(q, b).is_err() {
                    continue;
                }
                let r = verify_lemma(lemma, q, b, &cfg(200, ArithmeticMode::Float)).unwrap();
                assert!(r.passed(), "{lemma} q={q} b={b}: {:?}", r.violation_witnesses);
                assert_eq!(r.samples, 200);
                assert!(r.worst_margin >= 0.0);
            }
        }
    }

    #[test]
    fn rational_mode_and_equalities() {
        let r = verify_lemma(LemmaId::Prod, 5, 2, &cfg(300, ArithmeticMode::Rational)).unwrap();
        assert!(r.passed());
        assert!(r.equality_count > 0);
        let r = verify_lemma(LemmaId::Prodlb4, 4, 2, &cfg(600, ArithmeticMode::Float)).unwrap();
        assert!(r.passed());
        assert!(r.equality_witnesses.iter().all(|w| w.label.is_some()));
    }

    #[test]
    fn unsupported_regime() {
        let e = verify_lemma(LemmaId::Contract1, 5, 2, &cfg(10, ArithmeticMode::Float));
        assert!(matches!(e, Err(Error::UnsupportedRegime { .. })));
    }

    #[test]
    fn same_seed_same_report() {
        let c = cfg(128, ArithmeticMode::Float);
        let a = verify_lemma(LemmaId::Contractb, 6, 3, &c).unwrap();
        let b = verify_lemma(LemmaId::Contractb, 6, 3, &c).unwrap();
        assert_eq!(a, b);
    }
}
