//! Messages of the coloring recursion and the operations on them.
//!
//! A message from a vertex `v` to its parent is a probability vector over
//! the `q` colors whose `i`-th entry is proportional to the number of
//! colorings of the subtree at `v` in which `v` avoids color `i`. Every such
//! vector sums to one and has entries in `[0, 1/(q-1)]`.
//!
//! Colors are 1-indexed at the API boundary ([`pinned_message`],
//! [`crate::tree::BoundaryCondition`]); entry storage is 0-indexed.

pub mod scalar;
pub mod sets;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
pub use scalar::{parse_rational, ratio, ArithmeticMode, Rational, Scalar, ScalarWire, DEFAULT_TOL};
pub use sets::{in_set, in_set_with_tol, SetSpec, SetVariant};

#[derive(Debug, Clone, PartialEq)]
pub struct Message<S> {
    entries: Vec<S>,
}

impl<S: Scalar> Message<S> {
    /// Validating constructor: entries must sum to one and lie in `[0, 1/(q-1)]`.
    pub fn new(entries: Vec<S>) -> Result<Self> {
        Self::new_with_tol(entries, DEFAULT_TOL)
    }

    pub fn new_with_tol(entries: Vec<S>, tol: f64) -> Result<Self> {
        let q = entries.len();
        if q < 2 {
            return Err(Error::TooFewColors(q));
        }
        let total = scalar::sum(entries.iter().cloned());
        if !total.eq_tol(&S::one(), tol) {
            return Err(Error::InvalidMessage(format!(
                "entries sum to {} instead of 1",
                total.to_f64()
            )));
        }
        let cap = S::from_ratio(1, q as i64 - 1);
        for (i, x) in entries.iter().enumerate() {
            if !S::zero().le_tol(x, tol) || !x.le_tol(&cap, tol) {
                return Err(Error::InvalidMessage(format!(
                    "entry {} = {} outside [0, 1/{}]",
                    i + 1,
                    x.to_f64(),
                    q - 1
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Skips validation. Callers guarantee the invariants.
    pub(crate) fn from_entries_unchecked(entries: Vec<S>) -> Self {
        Self { entries }
    }

    pub fn q(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    /// Entry for a 1-indexed color.
    pub fn get(&self, color: usize) -> Option<&S> {
        color.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    /// Apply a color permutation: entry `i` moves to position `perm[i]` (0-indexed).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.q(), "permutation length must equal q");
        let mut out = self.entries.clone();
        for (i, &p) in perm.iter().enumerate() {
            out[p] = self.entries[i].clone();
        }
        Self { entries: out }
    }

    pub fn to_f64(&self) -> Message<f64> {
        Message {
            entries: self.entries.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Number of entries equal to `value` (within `tol` for floats).
    pub fn count_equal(&self, value: &S, tol: f64) -> usize {
        self.entries.iter().filter(|x| x.eq_tol(value, tol)).count()
    }
}

impl Message<Rational> {
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(n, d)| ratio(n, d)).collect())
    }
}

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        Err(Error::TooFewColors(q))
    } else {
        Ok(())
    }
}

/// Message of a vertex pinned to `color` (1-indexed): zero at that color,
/// `1/(q-1)` elsewhere.
pub fn pinned_message<S: Scalar>(q: usize, color: usize) -> Result<Message<S>> {
    check_q(q)?;
    if color == 0 || color > q {
        return Err(Error::InvalidColor { color, q });
    }
    let entries = (1..=q)
        .map(|i| {
            if i == color {
                S::zero()
            } else {
                S::from_ratio(1, q as i64 - 1)
            }
        })
        .collect();
    Ok(Message { entries })
}

/// Message of a free leaf.
pub fn uniform_message<S: Scalar>(q: usize) -> Result<Message<S>> {
    check_q(q)?;
    Ok(Message {
        entries: vec![S::from_ratio(1, q as i64); q],
    })
}

fn common_q<S: Scalar>(messages: &[Message<S>]) -> Result<usize> {
    let first = messages.first().ok_or(Error::NoChildren)?;
    let q = first.q();
    for m in &messages[1..] {
        if m.q() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                found: m.q(),
            });
        }
    }
    Ok(q)
}

/// Per-color products `z_j = prod_l m^l_j`.
pub fn color_products<S: Scalar>(messages: &[Message<S>]) -> Result<Vec<S>> {
    let q = common_q(messages)?;
    Ok((0..q)
        .map(|j| {
            messages
                .iter()
                .fold(S::one(), |acc, m| acc * m.entries[j].clone())
        })
        .collect())
}

/// `sum_j prod_l m^l_j`.
pub fn product_sum<S: Scalar>(messages: &[Message<S>]) -> Result<S> {
    Ok(scalar::sum(color_products(messages)?))
}

/// The sum-product update: the message a free internal vertex sends to its
/// parent given the messages of its children,
/// `f_i = sum_{j != i} z_j / ((q-1) sum_j z_j)` with `z_j = prod_l beta^l_j`.
pub fn update<S: Scalar>(children: &[Message<S>]) -> Result<Message<S>> {
    let z = color_products(children)?;
    let q = z.len();
    let total = scalar::sum(z.iter().cloned());
    if total.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let denom = S::from_int(q as i64 - 1) * total.clone();
    let entries = z
        .into_iter()
        .map(|zi| (total.clone() - zi) / denom.clone())
        .collect();
    Ok(Message { entries })
}

pub fn l1_distance<S: Scalar>(a: &Message<S>, b: &Message<S>) -> Result<S> {
    if a.q() != b.q() {
        return Err(Error::DimensionMismatch {
            expected: a.q(),
            found: b.q(),
        });
    }
    Ok(scalar::sum(
        a.entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| (x.clone() - y.clone()).abs()),
    ))
}

/// Two q = 4 messages are coupled when they have value 1/3 in exactly the
/// same positions.
pub fn coupled<S: Scalar>(a: &Message<S>, b: &Message<S>) -> Result<bool> {
    coupled_with_tol(a, b, DEFAULT_TOL)
}

pub fn coupled_with_tol<S: Scalar>(a: &Message<S>, b: &Message<S>, tol: f64) -> Result<bool> {
    for m in [a, b] {
        if m.q() != 4 {
            return Err(Error::Domain(format!(
                "coupling is defined for q = 4 only, got q = {}",
                m.q()
            )));
        }
    }
    let third = S::from_ratio(1, 3);
    Ok(a
        .entries
        .iter()
        .zip(&b.entries)
        .all(|(x, y)| x.eq_tol(&third, tol) == y.eq_tol(&third, tol)))
}

#[derive(Serialize, Deserialize)]
struct MessageWire {
    q: usize,
    entries: Vec<ScalarWire>,
}

impl<S: Scalar> Serialize for Message<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        MessageWire {
            q: self.q(),
            entries: self.entries.iter().map(Scalar::to_wire).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Message<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = MessageWire::deserialize(deserializer)?;
        if wire.entries.len() != wire.q {
            return Err(D::Error::custom(format!(
                "q = {} but {} entries",
                wire.q,
                wire.entries.len()
            )));
        }
        let entries = wire
            .entries
            .iter()
            .map(S::from_wire)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Message::new(entries).map_err(D::Error::custom)
    }
}
