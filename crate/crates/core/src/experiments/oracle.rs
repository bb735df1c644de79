//! Recursion versus brute-force enumeration on random small instances.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::messages::{update, ArithmeticMode, Message, Rational, Scalar, DEFAULT_TOL};
use crate::seed;
use crate::tree::{
    build_complete_tree, corrupted_update, propagate_with, root_marginal_with, BoundaryCondition, Enumerator,
    NodeId, TreeFile, TreeInstance, UpdateRule,
};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub q: usize,
    pub b: usize,
    /// Instances use depths drawn from `1..=max_depth`.
    pub max_depth: usize,
    pub instances: usize,
    pub seed: u64,
    pub mode: ArithmeticMode,
    /// Probability of pinning each vertex above the pinned level.
    pub extra_pin_prob: f64,
    pub cap: usize,
    /// Replace the update rule with a deliberately wrong one.
    pub inject_fault: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            q: 4,
            b: 2,
            max_depth: 3,
            instances: 100,
            seed: 0,
            mode: ArithmeticMode::Rational,
            extra_pin_prob: 0.2,
            cap: 12,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub instance: usize,
    pub node: NodeId,
    pub detail: String,
    pub tree: TreeFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub q: usize,
    pub b: usize,
    pub max_depth: usize,
    pub mode: ArithmeticMode,
    pub seed: u64,
    pub instances: usize,
    /// Vertices whose message was compared.
    pub nodes_checked: usize,
    pub marginals_checked: usize,
    pub matched: usize,
    /// Sub-instances both sides agree admit no coloring.
    pub unsatisfiable: usize,
    pub cap_exceeded: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.cap_exceeded == 0
    }
}

/// Random complete tree with one fully pinned level and a few extra pins above it.
pub fn random_instance<R: Rng + ?Sized>(
    q: usize,
    b: usize,
    max_depth: usize,
    extra_pin_prob: f64,
    rng: &mut R,
) -> Result<(TreeInstance, BoundaryCondition)> {
    let depth = rng.random_range(1..=max_depth.max(1));
    let tree = build_complete_tree(b, depth)?;
    let level = rng.random_range(1..=depth);
    let mut bc = BoundaryCondition::default();
    for v in tree.nodes_at_depth(level) {
        bc.pin(v, rng.random_range(1..=q));
    }
    for d in 1..level {
        for v in tree.nodes_at_depth(d) {
            if rng.random_bool(extra_pin_prob) {
                bc.pin(v, rng.random_range(1..=q));
            }
        }
    }
    Ok((tree, bc))
}

#[derive(Default)]
struct Tally {
    nodes: usize,
    marginals: usize,
    matched: usize,
    unsatisfiable: usize,
    cap_exceeded: usize,
    mismatches: Vec<Mismatch>,
}

enum Outcome<T> {
    Value(T),
    Unsat,
}

fn classify<T>(r: Result<T>) -> Result<Outcome<T>> {
    match r {
        Ok(v) => Ok(Outcome::Value(v)),
        Err(Error::ZeroDenominator | Error::Unsatisfiable) => Ok(Outcome::Unsat),
        Err(e) => Err(e),
    }
}

fn agree<S: Scalar>(ours: &[S], oracle: &[Rational]) -> bool {
    ours.len() == oracle.len()
        && ours
            .iter()
            .zip(oracle)
            .all(|(x, y)| x.eq_tol(&S::from_rational(y), DEFAULT_TOL))
}

fn check_instance<S: Scalar>(
    idx: usize,
    tree: &TreeInstance,
    bc: &BoundaryCondition,
    cfg: &OracleConfig,
    t: &mut Tally,
) -> Result<()> {
    let rule: UpdateRule<S> = if cfg.inject_fault { corrupted_update::<S> } else { update::<S> };
    let enumerator = Enumerator::new(cfg.cap);
    let mismatch = |node: NodeId, detail: String, t: &mut Tally| {
        t.mismatches.push(Mismatch {
            instance: idx,
            node,
            detail,
            tree: TreeFile::from_instance(tree, bc, cfg.q),
        });
    };
    for v in 0..tree.len() {
        let oracle = match enumerator.message(tree, bc, cfg.q, v) {
            Err(Error::CapExceeded { .. }) => {
                t.cap_exceeded += 1;
                continue;
            }
            r => classify(r)?,
        };
        t.nodes += 1;
        let ours = classify(propagate_with::<S>(tree, bc, cfg.q, v, rule))?;
        match (ours, oracle) {
            (Outcome::Unsat, Outcome::Unsat) => t.unsatisfiable += 1,
            (Outcome::Value(m), Outcome::Value(o)) if agree(m.entries(), o.entries()) => t.matched += 1,
            (ours, oracle) => {
                let detail = format!("message: recursion {} vs enumeration {}", describe(&ours), describe(&oracle));
                mismatch(v, detail, t);
            }
        }
    }
    if !bc.is_pinned(tree.root()) {
        let oracle = match enumerator.marginal(tree, bc, cfg.q) {
            Err(Error::CapExceeded { .. }) => return Ok(()),
            r => classify(r)?,
        };
        t.marginals += 1;
        let ours = classify(root_marginal_with::<S>(tree, bc, cfg.q, rule))?;
        match (ours, oracle) {
            (Outcome::Unsat, Outcome::Unsat) => {}
            (Outcome::Value(p), Outcome::Value(o)) if agree(&p, &o) => {}
            _ => mismatch(tree.root(), "root marginal differs".into(), t),
        }
    }
    Ok(())
}

fn describe<S: Scalar>(o: &Outcome<Message<S>>) -> String {
    match o {
        Outcome::Value(m) => format!("{:?}", m.to_f64().entries()),
        Outcome::Unsat => "unsatisfiable".into(),
    }
}

pub fn run_oracle_check(cfg: &OracleConfig) -> Result<OracleReport> {
    if cfg.q < cfg.b + 1 || cfg.b == 0 {
        return Err(Error::Domain(format!(
            "oracle checks need b >= 1 and q >= b + 1 (q = {}, b = {})",
            cfg.q, cfg.b
        )));
    }
    let label = seed::label_id("oracle");
    let parts: Vec<Tally> = seed::with_workers(|| {
        (0..cfg.instances)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed::stream(cfg.seed, seed::stream_id(&[label, cfg.q as u64, cfg.b as u64, i as u64]));
                let (tree, bc) = random_instance(cfg.q, cfg.b, cfg.max_depth, cfg.extra_pin_prob, &mut rng)?;
                let mut t = Tally::default();
                match cfg.mode {
                    ArithmeticMode::Rational => check_instance::<Rational>(i, &tree, &bc, cfg, &mut t)?,
                    ArithmeticMode::Float => check_instance::<f64>(i, &tree, &bc, cfg, &mut t)?,
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut report = OracleReport {
        q: cfg.q,
        b: cfg.b,
        max_depth: cfg.max_depth,
        mode: cfg.mode,
        seed: cfg.seed,
        instances: cfg.instances,
        nodes_checked: 0,
        marginals_checked: 0,
        matched: 0,
        unsatisfiable: 0,
        cap_exceeded: 0,
        mismatches: Vec::new(),
    };
    for t in parts {
        report.nodes_checked += t.nodes;
        report.marginals_checked += t.marginals;
        report.matched += t.matched;
        report.unsatisfiable += t.unsatisfiable;
        report.cap_exceeded += t.cap_exceeded;
        report.mismatches.extend(t.mismatches);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_rule_matches() {
        let r = run_oracle_check(&OracleConfig {
            instances: 40,
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        assert!(r.passed(), "{:?}", r.mismatches.first());
        assert!(r.matched > 40);
    }

    #[test]
    fn tight_q_counts_unsatisfiable() {
        let r = run_oracle_check(&OracleConfig {
            q: 3,
            b: 2,
            max_depth: 2,
            instances: 60,
            seed: 2,
            ..Default::default()
        })
        .unwrap();
        // two children never exhaust three colors, so every instance is satisfiable
        assert!(r.passed());
        assert_eq!(r.unsatisfiable, 0);
    }

    #[test]
    fn corrupted_rule_is_caught() {
        let r = run_oracle_check(&OracleConfig {
            instances: 20,
            seed: 3,
            inject_fault: true,
            ..Default::default()
        })
        .unwrap();
        assert!(!r.passed());
    }
}
