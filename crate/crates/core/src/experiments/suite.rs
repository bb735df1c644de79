//! Lemma verification over a grid of `(q, b)`.

use serde::{Deserialize, Serialize};

use crate::analysis::{verify_lemma, LemmaId, VerificationReport, VerifyConfig};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub lemmas: Vec<LemmaId>,
    pub qs: Vec<usize>,
    pub bs: Vec<usize>,
    /// Skip `(lemma, q, b)` combinations outside a lemma's regime instead of
    /// failing on them.
    pub skip_unsupported: bool,
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub samples: usize,
    pub reports: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(VerificationReport::passed)
    }

    pub fn total_violations(&self) -> usize {
        self.reports.iter().map(|r| r.violations).sum()
    }
}

/// One row of the CSV summary.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow<'a> {
    pub lemma: &'a str,
    pub q: usize,
    pub b: usize,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub rechecked: usize,
    pub resampled: usize,
    pub equality_count: usize,
}

impl SuiteReport {
    pub fn summary_rows(&self) -> Vec<SummaryRow<'_>> {
        self.reports
            .iter()
            .map(|r| SummaryRow {
                lemma: &r.lemma,
                q: r.q,
                b: r.b,
                samples: r.samples,
                violations: r.violations,
                worst_margin: r.worst_margin,
                rechecked: r.rechecked,
                resampled: r.resampled,
                equality_count: r.equality_count,
            })
            .collect()
    }
}

/// Runs every selected lemma at every grid point, in lemma-major order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    for &lemma in &cfg.lemmas {
        for &q in &cfg.qs {
            for &b in &cfg.bs {
                match lemma.check_regime(q, b) {
                    Ok(()) => reports.push(verify_lemma(lemma, q, b, &cfg.verify)?),
                    Err(_) if cfg.skip_unsupported => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(SuiteReport {
        seed: cfg.verify.seed,
        samples: cfg.verify.samples,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn grid_skips_or_fails() {
        let verify = VerifyConfig {
            samples: 50,
            seed: 1,
            ..Default::default()
        };
        let cfg = SuiteConfig {
            lemmas: vec![LemmaId::Contract1, LemmaId::Contractb],
            qs: vec![4, 5],
            bs: vec![2],
            skip_unsupported: true,
            verify,
        };
        let r = run_suite(&cfg).unwrap();
        // contract1 at q = 4 only, contractb at both
        assert_eq!(r.reports.len(), 3);
        assert!(r.passed());
        let strict = SuiteConfig {
            skip_unsupported: false,
            ..cfg
        };
        assert!(matches!(run_suite(&strict), Err(Error::UnsupportedRegime { .. })));
    }
}
