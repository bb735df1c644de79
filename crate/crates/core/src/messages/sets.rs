//! The message sets the contraction arguments work with.
//!
//! * `S1`: the simplex cut by the box `[0, 1/(q-1)]`; every message lies here.
//! * `S1prime`: the tighter box `[(1 - 1/(q-b))/(q-1), 1/(q-1)]`, closed
//!   under the update when children lie in `S1prime ∪ S2`.
//! * `S2`: permutations of a pinned message `(0, 1/(q-1), ..., 1/(q-1))`.
//! * `S1primeQ4B2`: the refined set for `q = 4, b = 2`: entries in
//!   `[1/6, 1/3]`, each entry either exactly 1/3 or at most 11/36, and a
//!   vector with exactly two entries of 1/3 must be a permutation of
//!   `(1/6, 1/6, 1/3, 1/3)`.
//!
//! All bounds are closed. Float checks widen them outward by the tolerance.

use serde::{Deserialize, Serialize};

use super::scalar::{self, Scalar, DEFAULT_TOL};
use super::Message;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetVariant {
    S1,
    S1prime,
    S2,
    S1primeQ4B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSpec {
    q: usize,
    b: usize,
    variant: SetVariant,
}

impl SetSpec {
    pub fn new(q: usize, b: usize, variant: SetVariant) -> Result<Self> {
        if q < 3 {
            return Err(Error::Domain(format!("set specs need q >= 3, got {q}")));
        }
        if b < 1 {
            return Err(Error::Domain("set specs need b >= 1".into()));
        }
        match variant {
            SetVariant::S1prime if q < b + 2 => Err(Error::Domain(format!(
                "S1prime needs q >= b + 2 (q = {q}, b = {b}); its lower bound is not positive"
            ))),
            SetVariant::S1primeQ4B2 if (q, b) != (4, 2) => Err(Error::Domain(format!(
                "S1primeQ4B2 is defined for q = 4, b = 2 only (q = {q}, b = {b})"
            ))),
            _ => Ok(Self { q, b, variant }),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn variant(&self) -> SetVariant {
        self.variant
    }

    /// Largest entry any message can have, `1/(q-1)`.
    pub fn upper<S: Scalar>(&self) -> S {
        S::from_ratio(1, self.q as i64 - 1)
    }

    /// Smallest entry allowed by the variant.
    pub fn lower<S: Scalar>(&self) -> S {
        match self.variant {
            SetVariant::S1 | SetVariant::S2 => S::zero(),
            SetVariant::S1prime => s1prime_lower(self.q, self.b),
            SetVariant::S1primeQ4B2 => S::from_ratio(1, 6),
        }
    }
}

/// `(1 - 1/(q-b)) / (q-1)`, the lower bound of `S1prime`.
pub fn s1prime_lower<S: Scalar>(q: usize, b: usize) -> S {
    let (q, b) = (q as i64, b as i64);
    S::from_ratio(q - b - 1, (q - b) * (q - 1))
}

pub fn in_set<S: Scalar>(m: &Message<S>, spec: &SetSpec) -> bool {
    in_set_with_tol(m, spec, DEFAULT_TOL)
}

pub fn in_set_with_tol<S: Scalar>(m: &Message<S>, spec: &SetSpec, tol: f64) -> bool {
    if m.q() != spec.q {
        return false;
    }
    let entries = m.entries();
    let total = scalar::sum(entries.iter().cloned());
    if !total.eq_tol(&S::one(), tol) {
        return false;
    }
    let upper: S = spec.upper();
    match spec.variant {
        SetVariant::S2 => {
            let zeros = m.count_equal(&S::zero(), tol);
            let tops = m.count_equal(&upper, tol);
            zeros == 1 && tops == spec.q - 1
        }
        SetVariant::S1 | SetVariant::S1prime => {
            let lower: S = spec.lower();
            entries
                .iter()
                .all(|x| lower.le_tol(x, tol) && x.le_tol(&upper, tol))
        }
        SetVariant::S1primeQ4B2 => in_q4b2(entries, tol),
    }
}

fn in_q4b2<S: Scalar>(entries: &[S], tol: f64) -> bool {
    let sixth = S::from_ratio(1, 6);
    let third = S::from_ratio(1, 3);
    let cap = S::from_ratio(11, 36);
    let box_ok = entries
        .iter()
        .all(|x| sixth.le_tol(x, tol) && x.le_tol(&third, tol));
    let gap_ok = entries
        .iter()
        .all(|x| x.eq_tol(&third, tol) || x.le_tol(&cap, tol));
    let thirds = entries.iter().filter(|x| x.eq_tol(&third, tol)).count();
    let pair_ok = thirds != 2
        || entries
            .iter()
            .filter(|x| !x.eq_tol(&third, tol))
            .all(|x| x.eq_tol(&sixth, tol));
    box_ok && gap_ok && pair_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::{pinned_message, ratio, uniform_message, Rational};

    fn m(pairs: &[(i64, i64)]) -> Message<Rational> {
        Message::from_ratios(pairs).unwrap()
    }

    fn spec(q: usize, b: usize, v: SetVariant) -> SetSpec {
        SetSpec::new(q, b, v).unwrap()
    }

    #[test]
    fn spec_invariants() {
        assert!(SetSpec::new(4, 3, SetVariant::S1prime).is_err());
        assert!(SetSpec::new(5, 3, SetVariant::S1prime).is_ok());
        assert!(SetSpec::new(5, 2, SetVariant::S1primeQ4B2).is_err());
        assert!(SetSpec::new(2, 1, SetVariant::S1).is_err());
        assert_eq!(s1prime_lower::<Rational>(4, 2), ratio(1, 6));
        assert_eq!(s1prime_lower::<Rational>(6, 3), ratio(2, 15));
    }

    #[test]
    fn q4b2_examples() {
        let q4 = spec(4, 2, SetVariant::S1primeQ4B2);
        assert!(in_set(&m(&[(1, 6), (1, 6), (1, 3), (1, 3)]), &q4));
        let pinned = pinned_message::<Rational>(4, 1).unwrap();
        assert!(!in_set(&pinned, &q4));
        assert!(in_set(&pinned, &spec(4, 2, SetVariant::S2)));
        // 8/25 sits strictly between 11/36 and 1/3; every other property holds
        let gap = m(&[(8, 25), (1, 3), (9, 50), (1, 6)]);
        assert!(in_set(&gap, &spec(4, 2, SetVariant::S1prime)));
        assert!(!in_set(&gap, &q4));
        // two thirds force the other entries to 1/6; anything else leaves the box
        let pair = m(&[(1, 3), (1, 3), (7, 36), (5, 36)]);
        assert!(!in_set(&pair, &q4));
        assert!(in_set(&m(&[(1, 3), (11, 36), (7, 36), (1, 6)]), &q4));
        assert!(in_set(&uniform_message::<Rational>(4).unwrap(), &q4));
    }

    #[test]
    fn s1_and_s1prime() {
        let s1 = spec(5, 2, SetVariant::S1);
        let s1p = spec(5, 2, SetVariant::S1prime);
        let pinned = pinned_message::<Rational>(5, 3).unwrap();
        assert!(in_set(&pinned, &s1));
        assert!(!in_set(&pinned, &s1p));
        assert!(in_set(&uniform_message::<Rational>(5).unwrap(), &s1p));
        // lower bound (2/3)/4 = 1/6 attained with two entries at 1/4
        let edge = m(&[(1, 4), (1, 4), (1, 6), (1, 6), (1, 6)]);
        assert!(in_set(&edge, &s1p));
        assert!(!in_set(&edge, &spec(5, 2, SetVariant::S2)));
        assert!(!in_set(&edge, &spec(4, 2, SetVariant::S1)));
    }

    #[test]
    fn float_bounds_are_widened() {
        let s1p = spec(4, 2, SetVariant::S1prime);
        let x = Message::<f64>::new(vec![1.0 / 6.0 - 1e-14, 1.0 / 3.0, 0.25, 0.25 + 1e-14]).unwrap();
        assert!(in_set(&x, &s1p));
        assert!(!in_set_with_tol(&x, &s1p, 0.0));
    }
}
