//! Closed-form contraction constants and product lower bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::messages::{ratio, Rational, Scalar};

/// Guard used when taking `ceil(c * b)`.
pub const CEILING_GUARD: f64 = 1e-9;

/// Residual tolerance used for `c` wherever a threshold is derived from it.
pub const C_TOLERANCE: f64 = 1e-12;

/// Bisection for a sign change of `f` on `[lo, hi]`. Stops when
/// `|f(mid)| <= tol` or the bracket collapses.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Root of `c = exp(1/c)`, bracketed in `[1.5, 2]` where `c - exp(1/c)`
/// increases and changes sign. Equals `1/W(1)`, about 1.7632228.
pub fn solve_c(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
    }
    bisect(|c| c - (1.0 / c).exp(), 1.5, 2.0, tolerance, 200)
}

/// `ln(1 - 1/(q-b))`, computed without cancellation.
fn log_base(q: f64, b: f64) -> f64 {
    (-1.0 / (q - b)).ln_1p()
}

/// Per-level contraction factor of the l1 distance between message pairs,
/// `(b/q) (1 - 1/(q-b))^(-b + b^2/q)`. Requires `q >= b + 2`.
pub fn kappa(q: usize, b: usize) -> Result<f64> {
    if b == 0 || q < b + 2 {
        return Err(Error::Domain(format!("kappa needs q >= b + 2 and b >= 1 (q = {q}, b = {b})")));
    }
    let (qf, bf) = (q as f64, b as f64);
    let exponent = -bf + bf * bf / qf;
    Ok(bf / qf * (exponent * log_base(qf, bf)).exp())
}

/// Contraction factor for `q = 4, b = 2`: 48/49, i.e. 24/49 per differing child.
pub fn kappa_q4b2() -> Rational {
    ratio(48, 49)
}

/// Smallest `q >= b + 2` with `kappa(q, b) < 1`, by bisection over `q`
/// (kappa decreases in `q`).
pub fn min_contracting_q(b: usize) -> Result<usize> {
    let mut lo = b + 2;
    if kappa(lo, b)? < 1.0 {
        return Ok(lo);
    }
    let mut hi = 2 * lo;
    while kappa(hi, b)? >= 1.0 {
        lo = hi;
        hi *= 2;
    }
    // kappa(lo) >= 1 > kappa(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if kappa(mid, b)? < 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `1 + ceil(c b)`. Fails instead of rounding when `c b` is within
/// [`CEILING_GUARD`] of an integer.
pub fn threshold_q(b: u64) -> Result<u64> {
    if b < 2 {
        return Err(Error::Domain(format!("threshold is stated for b >= 2, got {b}")));
    }
    let c = solve_c(C_TOLERANCE)?;
    let product = c * b as f64;
    if (product - product.round()).abs() < CEILING_GUARD {
        return Err(Error::CeilingAmbiguous {
            b,
            product,
            guard: CEILING_GUARD,
        });
    }
    Ok(1 + product.ceil() as u64)
}

/// `kappa` evaluated along `q = 1 + c b` as a function of real `b`:
/// `(b/(cb+1)) (1 - 1/((c-1)b+1))^(-b + b^2/(cb+1))`.
pub fn g(b: f64) -> Result<f64> {
    if !(b >= 2.0) {
        return Err(Error::Domain(format!("g is evaluated for b >= 2, got {b}")));
    }
    let c = solve_c(C_TOLERANCE)?;
    let q = c * b + 1.0;
    let exponent = -b + b * b / q;
    Ok(b / q * (exponent * log_base(q, b)).exp())
}

fn check_prod_domain(q: usize, b: usize) -> Result<()> {
    if b == 0 || q <= b {
        return Err(Error::Domain(format!("product bounds need q > b >= 1 (q = {q}, b = {b})")));
    }
    Ok(())
}

/// Lower bound on `sum_j prod_i alpha^i_j` over messages in S1:
/// `(q-b)/(q-1)^b`, exact.
pub fn bound_lemma_prod_exact(q: usize, b: usize) -> Result<Rational> {
    check_prod_domain(q, b)?;
    Ok(Rational::from_int((q - b) as i64) / Rational::from_int(q as i64 - 1).powi(b as u32))
}

pub fn bound_lemma_prod(q: usize, b: usize) -> Result<f64> {
    Ok(bound_lemma_prod_exact(q, b)?.to_f64())
}

/// Lower bound over S1prime: `(q/(q-1)^b) (1 - 1/(q-b))^(b - b^2/q)`.
pub fn bound_lemma_prodnew(q: usize, b: usize) -> Result<f64> {
    check_prod_domain(q, b)?;
    let (qf, bf) = (q as f64, b as f64);
    let exponent = bf - bf * bf / qf;
    let power = if q == b + 1 { 0.0 } else { (exponent * log_base(qf, bf)).exp() };
    Ok(qf / (qf - 1.0).powi(b as i32) * power)
}

/// Lower bound when `b - s` messages lie in S1prime and `s` in S2:
/// `((q-s)/(q-1)^b) (1 - 1/(q-b))^(b - s - (b-s)^2/(q-s))`.
pub fn bound_lemma_bb(q: usize, b: usize, s: usize) -> Result<f64> {
    check_prod_domain(q, b)?;
    if s > b {
        return Err(Error::Domain(format!("need 0 <= s <= b (s = {s}, b = {b})")));
    }
    let (qf, bf, sf) = (q as f64, b as f64, s as f64);
    let free = bf - sf;
    let exponent = free - free * free / (qf - sf);
    let power = if exponent == 0.0 {
        1.0
    } else if q == b + 1 {
        0.0
    } else {
        (exponent * log_base(qf, bf)).exp()
    };
    Ok((qf - sf) / (qf - 1.0).powi(b as i32) * power)
}

/// The two values the pairwise product sum can take near its minimum for
/// `q = 4, b = 2`: exactly 2/9, or at least 49/216.
pub fn q4b2_product_floor() -> (Rational, Rational) {
    (ratio(2, 9), ratio(49, 216))
}

/// A row of the contraction table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionRecord {
    pub q: usize,
    pub b: usize,
    pub kappa: f64,
    pub threshold_q: u64,
    pub contracts: bool,
}

impl ContractionRecord {
    pub fn new(q: usize, b: usize) -> Result<Self> {
        let kappa = kappa(q, b)?;
        Ok(Self {
            q,
            b,
            kappa,
            threshold_q: threshold_q(b as u64)?,
            contracts: kappa < 1.0,
        })
    }
}
