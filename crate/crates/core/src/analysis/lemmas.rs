//! The inequalities checked by the randomized verifier.
//!
//! Each lemma knows how to draw inputs satisfying its hypotheses and how to
//! turn an input into a [`Check`]: a list of `lhs <= rhs` bounds plus
//! structural flags. The same code runs over `f64` for fast screening and
//! over [`Rational`] for exact decisions. Bounds with non-integer exponents
//! are compared after raising both sides to an integer power in exact mode.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::constants::{bound_lemma_bb, bound_lemma_prodnew, kappa};
use super::sampler::{sample_coupled, sample_message, sample_q4b2_with_thirds, sample_s2, sample_union, SamplerConfig};
use crate::error::{Error, Result};
use crate::messages::{
    coupled_with_tol, in_set, l1_distance, product_sum, update, Message, Rational, Scalar,
    SetSpec, SetVariant, DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    /// Product lower bound over S1.
    Prod,
    /// At most `b` entries of an S1prime message equal `1/(q-1)`.
    ClaimSp,
    /// S1prime is closed under the update from S1prime ∪ S2 children.
    Closure,
    /// One-child perturbation bound.
    Ineqb,
    /// Product lower bound with `s` pinned children.
    Bb,
    /// Product lower bound over S1prime.
    Prodnew,
    /// `sum gamma_i xi_i <= 1/3` for q = 4.
    ClaimProdbd,
    /// The refined q = 4 set is closed under the update.
    Closure4,
    /// One-child perturbation bound for q = 4, b = 2.
    Ineqb4,
    /// Sharper perturbation bound when the fixed child has at most one third.
    Sineq3,
    /// Pairwise product sum for q = 4, b = 2 is 2/9 or at least 49/216.
    Prodlb4,
    /// Per-level contraction by `kappa`.
    Contractb,
    /// Per-level contraction by 48/49 for q = 4, b = 2.
    Contract1,
}

impl LemmaId {
    pub const ALL: [LemmaId; 13] = [
        LemmaId::Prod,
        LemmaId::ClaimSp,
        LemmaId::Closure,
        LemmaId::Ineqb,
        LemmaId::Bb,
        LemmaId::Prodnew,
        LemmaId::ClaimProdbd,
        LemmaId::Closure4,
        LemmaId::Ineqb4,
        LemmaId::Sineq3,
        LemmaId::Prodlb4,
        LemmaId::Contractb,
        LemmaId::Contract1,
    ];

    pub fn label(self) -> &'static str {
        match self {
            LemmaId::Prod => "prod",
            LemmaId::ClaimSp => "clm:sp",
            LemmaId::Closure => "closure",
            LemmaId::Ineqb => "ineqb",
            LemmaId::Bb => "bb",
            LemmaId::Prodnew => "prodnew",
            LemmaId::ClaimProdbd => "clm:prodbd",
            LemmaId::Closure4 => "closure4",
            LemmaId::Ineqb4 => "ineqb4",
            LemmaId::Sineq3 => "sineq3",
            LemmaId::Prodlb4 => "prodlb4",
            LemmaId::Contractb => "contractb",
            LemmaId::Contract1 => "contract1",
        }
    }

    /// Fails with `UnsupportedRegime` when the statement is not made for `(q, b)`.
    pub fn check_regime(self, q: usize, b: usize) -> Result<()> {
        let unsupported = |reason: &str| {
            Err(Error::UnsupportedRegime {
                lemma: self.label().to_string(),
                q,
                b,
                reason: reason.to_string(),
            })
        };
        match self {
            LemmaId::Prod if b == 0 || q <= b || q < 3 => unsupported("needs q > b >= 1 and q >= 3"),
            LemmaId::ClaimSp
            | LemmaId::Closure
            | LemmaId::Ineqb
            | LemmaId::Bb
            | LemmaId::Prodnew
            | LemmaId::Contractb
                if b == 0 || q < b + 2 =>
            {
                unsupported("needs q >= b + 2")
            }
            LemmaId::ClaimProdbd
            | LemmaId::Closure4
            | LemmaId::Ineqb4
            | LemmaId::Sineq3
            | LemmaId::Prodlb4
            | LemmaId::Contract1
                if (q, b) != (4, 2) =>
            {
                unsupported("stated for q = 4, b = 2 only")
            }
            _ => Ok(()),
        }
    }

    /// Whether exact equality in a bound is worth recording.
    pub fn records_equality(self) -> bool {
        matches!(
            self,
            LemmaId::Prod | LemmaId::Bb | LemmaId::Prodnew | LemmaId::ClaimProdbd | LemmaId::Prodlb4
        )
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.label() == s)
            .ok_or_else(|| {
                let known: Vec<_> = LemmaId::ALL.iter().map(|l| l.label()).collect();
                Error::Parse(format!("unknown lemma `{s}` (known: {})", known.join(", ")))
            })
    }
}

/// One drawn input. `pinned` counts children that are pinned (and, for the
/// contraction statements, equal on both sides).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    pub messages: Vec<Message<S>>,
    pub pinned: usize,
}

impl Instance<Rational> {
    pub fn to_f64(&self) -> Instance<f64> {
        Instance {
            messages: self.messages.iter().map(|m| m.to_f64()).collect(),
            pinned: self.pinned,
        }
    }
}

/// Outcome of evaluating a lemma on one input.
#[derive(Debug, Clone)]
pub struct Check<S> {
    /// Each pair must satisfy `lhs <= rhs`.
    pub bounds: Vec<(S, S)>,
    /// A non-numeric requirement failed.
    pub broken: bool,
    /// Float evaluation cannot decide; the exact path must.
    pub undecided: bool,
    /// Name of the equality configuration attained, if any.
    pub equality: Option<String>,
}

impl<S: Scalar> Check<S> {
    fn new() -> Self {
        Self {
            bounds: Vec::new(),
            broken: false,
            undecided: false,
            equality: None,
        }
    }

    fn le(&mut self, lhs: S, rhs: S) {
        self.bounds.push((lhs, rhs));
    }

    /// Smallest relative slack `(rhs - lhs) / max(|lhs|, |rhs|)`; negative
    /// means violated. `-1` when a structural requirement failed.
    pub fn slack(&self) -> f64 {
        if self.broken {
            return -1.0;
        }
        self.bounds
            .iter()
            .map(|(l, r)| {
                let (l, r) = (l.to_f64(), r.to_f64());
                let scale = l.abs().max(r.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (r - l) / scale
                }
            })
            .fold(1.0, f64::min)
    }

    pub fn holds(&self) -> bool {
        !self.broken && self.bounds.iter().all(|(l, r)| l <= r)
    }

    pub fn tight(&self) -> bool {
        self.equality.is_some() || self.bounds.iter().any(|(l, r)| l == r)
    }
}

fn spec(q: usize, b: usize, v: SetVariant) -> Result<SetSpec> {
    SetSpec::new(q, b, v)
}

fn repeat<F>(n: usize, mut f: F) -> Result<Vec<Message<Rational>>>
where
    F: FnMut() -> Result<Message<Rational>>,
{
    (0..n).map(|_| f()).collect()
}

/// Draw an input satisfying the lemma's hypotheses.
pub fn sample_instance<R: Rng + ?Sized>(
    lemma: LemmaId,
    q: usize,
    b: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Instance<Rational>> {
    use SetVariant::*;
    let mut pinned = 0;
    let messages = match lemma {
        LemmaId::Prod => {
            let s1 = spec(q, b, S1)?;
            repeat(b, || sample_message(&s1, cfg, rng))?
        }
        LemmaId::ClaimSp => vec![sample_message(&spec(q, b, S1prime)?, cfg, rng)?],
        LemmaId::Closure => {
            let sp = spec(q, b, S1prime)?;
            repeat(b, || sample_union(&sp, cfg, rng))?
        }
        LemmaId::Ineqb => {
            let sp = spec(q, b, S1prime)?;
            let mut v = repeat(b - 1, || sample_union(&sp, cfg, rng))?;
            v.push(sample_message(&sp, cfg, rng)?);
            v.push(sample_message(&sp, cfg, rng)?);
            v
        }
        LemmaId::Bb | LemmaId::Prodnew => {
            let sp = spec(q, b, S1prime)?;
            if lemma == LemmaId::Bb {
                pinned = rng.random_range(0..=b);
            }
            let mut v = repeat(b - pinned, || sample_message(&sp, cfg, rng))?;
            for _ in 0..pinned {
                v.push(sample_s2(q, rng)?);
            }
            v
        }
        LemmaId::Contractb => {
            let sp = spec(q, b, S1prime)?;
            pinned = rng.random_range(0..=b);
            let shared = repeat(pinned, || sample_s2(q, rng))?;
            let alpha = repeat(b - pinned, || sample_message(&sp, cfg, rng))?;
            let beta = repeat(b - pinned, || sample_message(&sp, cfg, rng))?;
            shared.iter().cloned().chain(alpha).chain(shared.iter().cloned()).chain(beta).collect()
        }
        LemmaId::ClaimProdbd => {
            let s1 = spec(4, 2, S1)?;
            repeat(2, || sample_message(&s1, cfg, rng))?
        }
        LemmaId::Closure4 | LemmaId::Prodlb4 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            repeat(2, || sample_union(&r, cfg, rng))?
        }
        LemmaId::Ineqb4 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            let alpha = sample_message(&r, cfg, rng)?;
            let beta = sample_coupled(&alpha, cfg, rng)?;
            let gamma = sample_union(&r, cfg, rng)?;
            vec![alpha, beta, gamma]
        }
        LemmaId::Sineq3 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            let alpha = sample_message(&r, cfg, rng)?;
            let beta = sample_coupled(&alpha, cfg, rng)?;
            let gamma = sample_q4b2_with_thirds(rng.random_range(0..=1), cfg, rng)?;
            vec![alpha, beta, gamma]
        }
        LemmaId::Contract1 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            let pair = |rng: &mut R| -> Result<(Message<Rational>, Message<Rational>)> {
                if rng.random_bool(cfg.p_s2) {
                    let p = sample_s2(4, rng)?;
                    Ok((p.clone(), p))
                } else {
                    let a = sample_message(&r, cfg, rng)?;
                    let c = sample_coupled(&a, cfg, rng)?;
                    Ok((a, c))
                }
            };
            let (a, b1) = pair(rng)?;
            let (a2, b2) = pair(rng)?;
            vec![a, a2, b1, b2]
        }
    };
    Ok(Instance { messages, pinned })
}

fn is_pinned<S: Scalar>(m: &Message<S>) -> bool {
    let q = m.q();
    m.count_equal(&S::zero(), DEFAULT_TOL) == 1 && m.count_equal(&S::from_ratio(1, q as i64 - 1), DEFAULT_TOL) == q - 1
}

fn member<S: Scalar>(m: &Message<S>, spec: &SetSpec) -> bool {
    in_set(m, spec)
}

/// Re-check the hypotheses on a drawn input.
pub fn hypotheses_hold<S: Scalar>(lemma: LemmaId, q: usize, b: usize, inst: &Instance<S>) -> Result<bool> {
    use SetVariant::*;
    let msgs = &inst.messages;
    let in_union = |m: &Message<S>, sp: &SetSpec| member(m, sp) || is_pinned(m);
    let ok = match lemma {
        LemmaId::Prod => msgs.len() == b && msgs.iter().all(|m| member(m, &spec(q, b, S1).unwrap())),
        LemmaId::ClaimSp => msgs.len() == 1 && member(&msgs[0], &spec(q, b, S1prime)?),
        LemmaId::Closure => {
            let sp = spec(q, b, S1prime)?;
            msgs.len() == b && msgs.iter().all(|m| in_union(m, &sp))
        }
        LemmaId::Ineqb => {
            let sp = spec(q, b, S1prime)?;
            msgs.len() == b + 1
                && msgs[..b - 1].iter().all(|m| in_union(m, &sp))
                && msgs[b - 1..].iter().all(|m| member(m, &sp))
        }
        LemmaId::Bb | LemmaId::Prodnew => {
            let sp = spec(q, b, S1prime)?;
            let free = b - inst.pinned.min(b);
            msgs.len() == b
                && (lemma == LemmaId::Bb || inst.pinned == 0)
                && msgs[..free].iter().all(|m| member(m, &sp))
                && msgs[free..].iter().all(is_pinned)
        }
        LemmaId::Contractb => {
            let sp = spec(q, b, S1prime)?;
            let s = inst.pinned;
            msgs.len() == 2 * b
                && s <= b
                && (0..s).all(|i| is_pinned(&msgs[i]) && msgs[i] == msgs[b + i])
                && (s..b).all(|i| member(&msgs[i], &sp) && member(&msgs[b + i], &sp))
        }
        LemmaId::ClaimProdbd => msgs.len() == 2 && msgs.iter().all(|m| member(m, &spec(4, 2, S1).unwrap())),
        LemmaId::Closure4 | LemmaId::Prodlb4 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            msgs.len() == 2 && msgs.iter().all(|m| in_union(m, &r))
        }
        LemmaId::Ineqb4 | LemmaId::Sineq3 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            let third = S::from_ratio(1, 3);
            msgs.len() == 3
                && member(&msgs[0], &r)
                && member(&msgs[1], &r)
                && coupled_with_tol(&msgs[0], &msgs[1], DEFAULT_TOL)?
                && if lemma == LemmaId::Sineq3 {
                    member(&msgs[2], &r) && msgs[2].count_equal(&third, DEFAULT_TOL) <= 1
                } else {
                    in_union(&msgs[2], &r)
                }
        }
        LemmaId::Contract1 => {
            let r = spec(4, 2, S1primeQ4B2)?;
            let pair_ok = |a: &Message<S>, c: &Message<S>| -> Result<bool> {
                Ok(if is_pinned(a) {
                    a == c
                } else {
                    member(a, &r) && member(c, &r) && coupled_with_tol(a, c, DEFAULT_TOL)?
                })
            };
            msgs.len() == 4 && pair_ok(&msgs[0], &msgs[2])? && pair_ok(&msgs[1], &msgs[3])?
        }
    };
    Ok(ok)
}

/// `1 - 1/(q-b)` as an exact-or-float scalar.
fn base<S: Scalar>(q: usize, b: usize) -> S {
    S::from_ratio(q as i64 - b as i64 - 1, q as i64 - b as i64)
}

fn pow_usize<S: Scalar>(x: &S, e: usize) -> S {
    x.powi(e as u32)
}

fn max_of<S: Scalar>(xs: impl IntoIterator<Item = S>) -> S {
    xs.into_iter()
        .fold(S::zero(), |acc, x| if x > acc { x } else { acc })
}

/// Which equality configuration `(gamma, xi)` realizes when their pairwise
/// product sum is exactly 2/9.
fn prodlb4_shape<S: Scalar>(gamma: &Message<S>, xi: &Message<S>) -> Option<&'static str> {
    let third = S::from_ratio(1, 3);
    let sixth = S::from_ratio(1, 6);
    let zero_at = |m: &Message<S>| m.entries().iter().position(|x| x.is_zero());
    if is_pinned(gamma) {
        if let Some(p) = zero_at(gamma) {
            if xi.entries()[p] == third {
                return Some("pinned-first");
            }
        }
    }
    if is_pinned(xi) {
        if let Some(p) = zero_at(xi) {
            if gamma.entries()[p] == third {
                return Some("pinned-second");
            }
        }
    }
    let is_pair = |m: &Message<S>| m.count_equal(&third, 0.0) == 2 && m.count_equal(&sixth, 0.0) == 2;
    if is_pair(gamma)
        && is_pair(xi)
        && gamma
            .entries()
            .iter()
            .zip(xi.entries())
            .all(|(g, x)| (*g == third) == (*x == sixth))
    {
        return Some("complementary-pairs");
    }
    None
}

/// Evaluate the lemma on an input.
pub fn evaluate<S: Scalar>(lemma: LemmaId, q: usize, b: usize, inst: &Instance<S>) -> Result<Check<S>> {
    let msgs = &inst.messages;
    let mut ck = Check::new();
    let upper = S::from_ratio(1, q as i64 - 1);
    match lemma {
        LemmaId::Prod => {
            let bound = S::from_int(q as i64 - b as i64) / pow_usize(&S::from_int(q as i64 - 1), b);
            ck.le(bound, product_sum(msgs)?);
        }
        LemmaId::ClaimSp => {
            let m = &msgs[0];
            let tops = m.count_equal(&upper, DEFAULT_TOL);
            ck.le(S::from_int(tops as i64), S::from_int(b as i64));
            if tops == b {
                let lower: S = crate::messages::sets::s1prime_lower(q, b);
                for x in m.entries() {
                    if !x.eq_tol(&upper, DEFAULT_TOL) {
                        ck.le((x.clone() - lower.clone()).abs(), S::zero());
                    }
                }
            }
        }
        LemmaId::Closure => {
            let out = update(msgs)?;
            let lower: S = crate::messages::sets::s1prime_lower(q, b);
            for x in out.entries() {
                ck.le(lower.clone(), x.clone());
                ck.le(x.clone(), upper.clone());
            }
        }
        LemmaId::Ineqb => {
            let gammas = &msgs[..b - 1];
            let (alpha, beta) = (&msgs[b - 1], &msgs[b]);
            let z = if gammas.is_empty() {
                vec![S::one(); q]
            } else {
                crate::messages::color_products(gammas)?
            };
            let a = z
                .iter()
                .zip(alpha.entries())
                .fold(S::zero(), |acc, (zj, aj)| acc + zj.clone() * aj.clone());
            let with = |m: &Message<S>| {
                let mut kids = gammas.to_vec();
                kids.push(m.clone());
                update(&kids)
            };
            let d_out = l1_distance(&with(alpha)?, &with(beta)?)?;
            let d_in = l1_distance(alpha, beta)?;
            let scale = pow_usize(&S::from_int(q as i64 - 1), b);
            ck.le(d_out * scale * a, d_in);
        }
        LemmaId::Bb => {
            let s = inst.pinned;
            let lhs = product_sum(msgs)?;
            if S::EXACT {
                // LHS^(q-s) >= ((q-s)/(q-1)^b)^(q-s) x^((b-s)(q-b))
                let coef = S::from_int((q - s) as i64) / pow_usize(&S::from_int(q as i64 - 1), b);
                let rhs = pow_usize(&coef, q - s) * pow_usize(&base::<S>(q, b), (b - s) * (q - b));
                ck.le(rhs, pow_usize(&lhs, q - s));
            } else {
                ck.le(S::from_f64(bound_lemma_bb(q, b, s)?), lhs);
            }
        }
        LemmaId::Prodnew => {
            let lhs = product_sum(msgs)?;
            if S::EXACT {
                // LHS^q >= (q/(q-1)^b)^q x^(b(q-b))
                let coef = S::from_int(q as i64) / pow_usize(&S::from_int(q as i64 - 1), b);
                let rhs = pow_usize(&coef, q) * pow_usize(&base::<S>(q, b), b * (q - b));
                ck.le(rhs, pow_usize(&lhs, q));
            } else {
                ck.le(S::from_f64(bound_lemma_prodnew(q, b)?), lhs);
            }
        }
        LemmaId::Contractb => {
            let (alpha, beta) = msgs.split_at(b);
            let d_out = l1_distance(&update(alpha)?, &update(beta)?)?;
            let m = max_of(
                alpha
                    .iter()
                    .zip(beta)
                    .map(|(a, c)| l1_distance(a, c))
                    .collect::<Result<Vec<_>>>()?,
            );
            if S::EXACT {
                // D^q x^(b(q-b)) <= (b/q)^q M^q
                let lhs = pow_usize(&d_out, q) * pow_usize(&base::<S>(q, b), b * (q - b));
                let rhs = pow_usize(&S::from_ratio(b as i64, q as i64), q) * pow_usize(&m, q);
                ck.le(lhs, rhs);
            } else {
                ck.le(d_out, S::from_f64(kappa(q, b)?) * m);
            }
        }
        LemmaId::ClaimProdbd => {
            ck.le(product_sum(msgs)?, S::from_ratio(1, 3));
        }
        LemmaId::Closure4 => {
            let out = update(msgs)?;
            let third = S::from_ratio(1, 3);
            let sixth = S::from_ratio(1, 6);
            let cap = S::from_ratio(11, 36);
            if !S::EXACT
                && out
                    .entries()
                    .iter()
                    .any(|x| x.eq_tol(&third, 1e-9) || x.eq_tol(&sixth, 1e-9) || x.eq_tol(&cap, 1e-9))
            {
                ck.undecided = true;
            }
            for x in out.entries() {
                ck.le(sixth.clone(), x.clone());
                ck.le(x.clone(), third.clone());
                if *x != third {
                    ck.le(x.clone(), cap.clone());
                }
            }
            if out.count_equal(&third, 0.0) == 2 {
                for x in out.entries() {
                    if *x != third {
                        ck.le((x.clone() - sixth.clone()).abs(), S::zero());
                    }
                }
            }
        }
        LemmaId::Ineqb4 | LemmaId::Sineq3 => {
            let (alpha, beta, gamma) = (&msgs[0], &msgs[1], &msgs[2]);
            let d_out = l1_distance(&update(&[alpha.clone(), gamma.clone()])?, &update(&[beta.clone(), gamma.clone()])?)?;
            let d_in = l1_distance(alpha, beta)?;
            if lemma == LemmaId::Ineqb4 {
                let a = alpha
                    .entries()
                    .iter()
                    .zip(gamma.entries())
                    .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                ck.le(S::from_int(9) * a * d_out, d_in);
            } else {
                ck.le(S::from_int(49) * d_out, S::from_int(24) * d_in);
            }
        }
        LemmaId::Prodlb4 => {
            let s = product_sum(msgs)?;
            let two_ninths = S::from_ratio(2, 9);
            if S::EXACT {
                if s == two_ninths {
                    match prodlb4_shape(&msgs[0], &msgs[1]) {
                        Some(shape) => ck.equality = Some(shape.to_string()),
                        None => ck.broken = true,
                    }
                } else {
                    ck.le(S::from_ratio(49, 216), s);
                }
            } else if s.eq_tol(&two_ninths, 1e-9) {
                ck.undecided = true;
            } else {
                ck.le(S::from_ratio(49, 216), s);
            }
        }
        LemmaId::Contract1 => {
            let (a, a2, c, c2) = (&msgs[0], &msgs[1], &msgs[2], &msgs[3]);
            let f = |x: &Message<S>, y: &Message<S>| update(&[x.clone(), y.clone()]);
            let d_out = l1_distance(&f(a, a2)?, &f(c, c2)?)?;
            let d1 = l1_distance(a, c)?;
            let d2 = l1_distance(a2, c2)?;
            let m = if d1 > d2 { d1.clone() } else { d2.clone() };
            ck.le(S::from_int(49) * d_out, S::from_int(48) * m);
            // the two one-child steps through (a, c2) that compose into the bound
            let third = S::from_ratio(1, 3);
            let few_thirds = |x: &Message<S>| x.count_equal(&third, DEFAULT_TOL) <= 1 && !is_pinned(x);
            if few_thirds(a) && few_thirds(c2) {
                let step1 = l1_distance(&f(a, a2)?, &f(a, c2)?)?;
                let step2 = l1_distance(&f(a, c2)?, &f(c, c2)?)?;
                ck.le(S::from_int(49) * step1, S::from_int(24) * d2);
                ck.le(S::from_int(49) * step2, S::from_int(24) * d1);
            }
        }
    }
    Ok(ck)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::pinned_message;
    use crate::seed;

    fn exact(lemma: LemmaId, q: usize, b: usize, messages: Vec<Message<Rational>>, pinned: usize) -> Check<Rational> {
        let inst = Instance { messages, pinned };
        assert!(hypotheses_hold(lemma, q, b, &inst).unwrap(), "hypotheses for {lemma}");
        evaluate(lemma, q, b, &inst).unwrap()
    }

    #[test]
    fn labels_round_trip() {
        for l in LemmaId::ALL {
            assert_eq!(l.label().parse::<LemmaId>().unwrap(), l);
        }
        assert!("nope".parse::<LemmaId>().is_err());
    }

    #[test]
    fn regimes() {
        assert!(LemmaId::Contract1.check_regime(5, 2).is_err());
        assert!(LemmaId::Contract1.check_regime(4, 2).is_ok());
        assert!(LemmaId::Contractb.check_regime(4, 2).is_ok());
        assert!(LemmaId::Contractb.check_regime(4, 3).is_err());
        assert!(LemmaId::Prod.check_regime(4, 3).is_ok());
        assert!(LemmaId::Prod.check_regime(3, 3).is_err());
    }

    #[test]
    fn product_bound_is_attained_by_pinned_messages() {
        let m1 = pinned_message(4, 1).unwrap();
        let m2 = pinned_message(4, 2).unwrap();
        let ck = exact(LemmaId::Prod, 4, 2, vec![m1, m2], 0);
        assert!(ck.holds() && ck.tight());
    }

    #[test]
    fn prodlb4_shapes() {
        let g = pinned_message::<Rational>(4, 1).unwrap();
        let x = Message::from_ratios(&[(1, 3), (1, 6), (1, 6), (1, 3)]).unwrap();
        let ck = exact(LemmaId::Prodlb4, 4, 2, vec![g, x], 0);
        assert_eq!(ck.equality.as_deref(), Some("pinned-first"));
        let a = Message::from_ratios(&[(1, 3), (1, 3), (1, 6), (1, 6)]).unwrap();
        let c = Message::from_ratios(&[(1, 6), (1, 6), (1, 3), (1, 3)]).unwrap();
        let ck = exact(LemmaId::Prodlb4, 4, 2, vec![a, c], 0);
        assert_eq!(ck.equality.as_deref(), Some("complementary-pairs"));
        assert!(ck.holds());
    }

    #[test]
    fn clm_sp_equality_configuration() {
        // q = 5, b = 2: two entries at 1/4, the rest at L = 1/6
        let m = Message::from_ratios(&[(1, 4), (1, 4), (1, 6), (1, 6), (1, 6)]).unwrap();
        assert!(exact(LemmaId::ClaimSp, 5, 2, vec![m], 0).holds());
    }

    #[test]
    fn sampled_inputs_satisfy_hypotheses_and_lemmas() {
        let cfg = SamplerConfig::default();
        let mut rng = seed::stream(5, 1);
        for lemma in LemmaId::ALL {
            for (q, b) in [(4, 2), (5, 2), (6, 3)] {
                if lemma.check_regime(q, b).is_err() {
                    continue;
                }
                for _ in 0..30 {
                    let inst = sample_instance(lemma, q, b, &cfg, &mut rng).unwrap();
                    assert!(hypotheses_hold(lemma, q, b, &inst).unwrap(), "{lemma} q={q} b={b}");
                    let ck = evaluate(lemma, q, b, &inst).unwrap();
                    assert!(ck.holds(), "{lemma} q={q} b={b} {:?}", inst.to_f64());
                }
            }
        }
    }
}
