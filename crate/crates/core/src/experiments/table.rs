//! Contraction and threshold tables.

use serde::{Deserialize, Serialize};

use crate::analysis::constants::C_TOLERANCE;
use crate::analysis::{g, kappa, min_contracting_q, solve_c, threshold_q, ContractionRecord};
use crate::error::{Error, Result};

pub const MAX_TABLE_B: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(flatten)]
    pub record: ContractionRecord,
    pub g: f64,
}

fn check_range(bs: &[usize]) -> Result<()> {
    match bs.iter().find(|&&b| !(2..=MAX_TABLE_B).contains(&b)) {
        Some(b) => Err(Error::Domain(format!("b = {b} outside [2, {MAX_TABLE_B}]"))),
        None => Ok(()),
    }
}

/// Rows at `q = threshold_q(b)` and its neighbours `q - 1`, `q + 1`.
pub fn contraction_table(bs: &[usize]) -> Result<Vec<TableRow>> {
    check_range(bs)?;
    let mut rows = Vec::with_capacity(3 * bs.len());
    for &b in bs {
        let t = threshold_q(b as u64)? as usize;
        let gb = g(b as f64)?;
        for q in [t - 1, t, t + 1] {
            if q >= b + 2 {
                rows.push(TableRow {
                    record: ContractionRecord::new(q, b)?,
                    g: gb,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub b: usize,
    pub c: f64,
    pub threshold_q: u64,
    pub kappa_at_threshold: f64,
    pub contracts: bool,
    /// Smallest q with kappa below one; not claimed to be tight for the
    /// underlying mixing property.
    pub min_contracting_q: usize,
    pub g: f64,
}

pub fn threshold_table(bs: &[usize]) -> Result<Vec<ThresholdRow>> {
    check_range(bs)?;
    let c = solve_c(C_TOLERANCE)?;
    bs.iter()
        .map(|&b| {
            let t = threshold_q(b as u64)?;
            let k = kappa(t as usize, b)?;
            Ok(ThresholdRow {
                b,
                c,
                threshold_q: t,
                kappa_at_threshold: k,
                contracts: k < 1.0,
                min_contracting_q: min_contracting_q(b)?,
                g: g(b as f64)?,
            })
        })
        .collect()
}
