//! Random messages from the message sets, as exact rationals.
//!
//! Every sample lives on a grid: a set `{x : lo <= x_i <= hi, sum x = total}`
//! is rewritten in slack coordinates `t_i = (x_i - lo)/(hi - lo)` with
//! `0 <= t_i <= 1` and `sum t = T`, and `t` is drawn with denominators that
//! divide the grid resolution. Samples are re-checked against the set
//! exactly before they are returned.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::messages::{in_set, pinned_message, ratio, Message, Rational, SetSpec, SetVariant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Probability of pushing some entries onto the box faces.
    pub p_edge: f64,
    /// Probability of drawing from S2 when sampling a union with S2.
    pub p_s2: f64,
    /// Grid resolution `N` for slack coordinates.
    pub resolution: u64,
    /// Simplex draws tried before falling back to a direct fill.
    pub max_rejections: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            p_edge: 0.25,
            p_s2: 0.25,
            resolution: 1 << 16,
            max_rejections: 64,
        }
    }
}

fn grid_point<R: Rng + ?Sized>(n: u64, rng: &mut R) -> Rational {
    Rational::new(BigInt::from(rng.random_range(0..=n)), BigInt::from(n))
}

/// Uniform-ish point of `{t in [0,1]^m : sum t = total}`.
fn slack_point<R: Rng + ?Sized>(m: usize, total: &Rational, cfg: &SamplerConfig, rng: &mut R) -> Vec<Rational> {
    let n = cfg.resolution;
    let one = Rational::one();
    if m == 1 {
        return vec![total.clone()];
    }
    // scaled simplex spacings, rejected if any coordinate leaves the box;
    // gap * T <= N is tested on integers before building rationals
    let tn = total.numer();
    let td = total.denom();
    let limit = BigInt::from(n) * td;
    for _ in 0..cfg.max_rejections {
        let mut cuts: Vec<u64> = (0..m - 1).map(|_| rng.random_range(0..=n)).collect();
        cuts.sort_unstable();
        cuts.push(n);
        let mut prev = 0u64;
        let gaps: Vec<u64> = cuts
            .iter()
            .map(|&c| {
                let g = c - prev;
                prev = c;
                g
            })
            .collect();
        let widest = *gaps.iter().max().expect("m >= 2");
        if BigInt::from(widest) * tn <= limit {
            return gaps
                .into_iter()
                .map(|g| total * Rational::new(BigInt::from(g), BigInt::from(n)))
                .collect();
        }
    }
    let u: Vec<Rational> = (0..m).map(|_| grid_point(n, rng)).collect();
    let s: Rational = u.iter().cloned().sum();
    if s.is_zero() && total.is_zero() {
        return u;
    }
    if s >= *total {
        let scale = total / &s;
        u.into_iter().map(|x| x * &scale).collect()
    } else {
        let mf = Rational::from_integer(BigInt::from(m));
        let lift = (total - &s) / (mf - &s);
        u.into_iter().map(|x| &x + (&one - &x) * &lift).collect()
    }
}

/// `m` values in `[lo, hi]` summing to `total`, or `None` if infeasible.
fn fill_box<R: Rng + ?Sized>(
    m: usize,
    lo: &Rational,
    hi: &Rational,
    total: &Rational,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Option<Vec<Rational>> {
    let mf = Rational::from_integer(BigInt::from(m));
    if m == 0 {
        return total.is_zero().then(Vec::new);
    }
    let span = hi - lo;
    let slack = total - &mf * lo;
    if slack < Rational::zero() || slack > &mf * &span {
        return None;
    }
    if span.is_zero() {
        return Some(vec![lo.clone(); m]);
    }
    let t_total = slack / &span;
    Some(
        slack_point(m, &t_total, cfg, rng)
            .into_iter()
            .map(|t| lo + t * &span)
            .collect(),
    )
}

/// Fill a length-`q` vector whose entries lie in `[lo, hi]` and sum to
/// `total`, with an optional random number of entries forced to a face.
fn boxed_vector<R: Rng + ?Sized>(
    q: usize,
    lo: &Rational,
    hi: &Rational,
    total: &Rational,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Option<Vec<Rational>> {
    if rng.random_bool(cfg.p_edge) {
        for _ in 0..8 {
            let n_hi = rng.random_range(0..=q);
            let n_lo = rng.random_range(0..=q - n_hi);
            let rest = total - Rational::from_integer(BigInt::from(n_hi)) * hi
                - Rational::from_integer(BigInt::from(n_lo)) * lo;
            if let Some(free) = fill_box(q - n_hi - n_lo, lo, hi, &rest, cfg, rng) {
                let mut v: Vec<Rational> = std::iter::repeat_n(hi.clone(), n_hi)
                    .chain(std::iter::repeat_n(lo.clone(), n_lo))
                    .chain(free)
                    .collect();
                v.shuffle(rng);
                return Some(v);
            }
        }
    }
    fill_box(q, lo, hi, total, cfg, rng)
}

fn checked(entries: Vec<Rational>, spec: &SetSpec) -> Result<Message<Rational>> {
    // membership implies a valid message
    let m = Message::from_entries_unchecked(entries);
    if !in_set(&m, spec) {
        return Err(Error::SamplerStuck(format!(
            "draw {:?} left {:?}",
            m.to_f64().entries(),
            spec.variant()
        )));
    }
    Ok(m)
}

/// A random pinned message.
pub fn sample_s2<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Result<Message<Rational>> {
    pinned_message(q, rng.random_range(1..=q))
}

/// A random message of the set described by `spec`.
pub fn sample_message<R: Rng + ?Sized>(
    spec: &SetSpec,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Message<Rational>> {
    let q = spec.q();
    match spec.variant() {
        SetVariant::S2 => sample_s2(q, rng),
        SetVariant::S1 | SetVariant::S1prime => {
            let lo: Rational = spec.lower();
            let hi: Rational = spec.upper();
            let v = boxed_vector(q, &lo, &hi, &Rational::one(), cfg, rng)
                .ok_or_else(|| Error::SamplerStuck(format!("empty set for {spec:?}")))?;
            checked(v, spec)
        }
        SetVariant::S1primeQ4B2 => {
            let thirds = if rng.random_bool(cfg.p_edge) {
                rng.random_range(0..=2)
            } else {
                rng.random_range(0..=1)
            };
            sample_q4b2_with_thirds(thirds, cfg, rng)
        }
    }
}

/// A random element of `spec ∪ S2`.
pub fn sample_union<R: Rng + ?Sized>(
    spec: &SetSpec,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Message<Rational>> {
    if rng.random_bool(cfg.p_s2) {
        sample_s2(spec.q(), rng)
    } else {
        sample_message(spec, cfg, rng)
    }
}

fn q4b2_spec() -> SetSpec {
    SetSpec::new(4, 2, SetVariant::S1primeQ4B2).expect("q = 4, b = 2 is valid")
}

/// Fill the non-third positions of a q = 4 refined message.
fn q4b2_rest<R: Rng + ?Sized>(k: usize, cfg: &SamplerConfig, rng: &mut R) -> Result<Vec<Rational>> {
    if k == 2 {
        return Ok(vec![ratio(1, 6), ratio(1, 6)]);
    }
    let total = Rational::one() - ratio(k as i64, 3);
    boxed_vector(4 - k, &ratio(1, 6), &ratio(11, 36), &total, cfg, rng)
        .ok_or_else(|| Error::SamplerStuck(format!("no refined message with {k} thirds")))
}

/// A refined q = 4 message with exactly `thirds` entries equal to 1/3.
pub fn sample_q4b2_with_thirds<R: Rng + ?Sized>(
    thirds: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Message<Rational>> {
    if thirds > 2 {
        return Err(Error::Domain(format!("refined messages have at most 2 thirds, asked {thirds}")));
    }
    let mut v = q4b2_rest(thirds, cfg, rng)?;
    v.extend(std::iter::repeat_n(ratio(1, 3), thirds));
    v.shuffle(rng);
    checked(v, &q4b2_spec())
}

/// A second refined q = 4 message with 1/3 in exactly the same positions as
/// `alpha`. Pinned messages are returned unchanged.
pub fn sample_coupled<R: Rng + ?Sized>(
    alpha: &Message<Rational>,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Message<Rational>> {
    if alpha.q() != 4 {
        return Err(Error::Domain(format!("coupling is defined for q = 4, got {}", alpha.q())));
    }
    if alpha.entries().iter().any(|x| x.is_zero()) {
        return Ok(alpha.clone());
    }
    let third = ratio(1, 3);
    let free: Vec<usize> = (0..4).filter(|&i| alpha.entries()[i] != third).collect();
    let rest = q4b2_rest(4 - free.len(), cfg, rng)?;
    let mut v = alpha.entries().to_vec();
    for (&i, x) in free.iter().zip(rest) {
        v[i] = x;
    }
    checked(v, &q4b2_spec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::coupled;
    use crate::seed;

    #[test]
    fn samples_land_in_their_sets() {
        let cfg = SamplerConfig::default();
        let mut rng = seed::stream(7, 0);
        for (q, b) in [(3, 1), (4, 2), (5, 2), (8, 3), (16, 5)] {
            for variant in [SetVariant::S1, SetVariant::S1prime, SetVariant::S2] {
                let Ok(spec) = SetSpec::new(q, b, variant) else { continue };
                for _ in 0..200 {
                    let m = sample_message(&spec, &cfg, &mut rng).unwrap();
                    assert!(in_set(&m, &spec));
                }
            }
        }
    }

    #[test]
    fn edge_draws_hit_the_faces() {
        let cfg = SamplerConfig::default();
        let mut rng = seed::stream(8, 0);
        let spec = SetSpec::new(6, 2, SetVariant::S1prime).unwrap();
        let hi: Rational = spec.upper();
        let hits = (0..400)
            .filter(|_| sample_message(&spec, &cfg, &mut rng).unwrap().count_equal(&hi, 0.0) > 0)
            .count();
        assert!(hits > 20);
    }

    #[test]
    fn refined_and_coupled() {
        let cfg = SamplerConfig::default();
        let mut rng = seed::stream(9, 0);
        let spec = q4b2_spec();
        let mut seen = [0usize; 3];
        for _ in 0..500 {
            let a = sample_message(&spec, &cfg, &mut rng).unwrap();
            seen[a.count_equal(&ratio(1, 3), 0.0)] += 1;
            let b = sample_coupled(&a, &cfg, &mut rng).unwrap();
            assert!(in_set(&b, &spec));
            assert!(coupled(&a, &b).unwrap());
        }
        assert!(seen.iter().all(|&n| n > 0));
        let p = pinned_message::<Rational>(4, 2).unwrap();
        assert_eq!(sample_coupled(&p, &cfg, &mut rng).unwrap(), p);
        assert!(sample_q4b2_with_thirds(3, &cfg, &mut rng).is_err());
    }

    #[test]
    fn deterministic_per_stream() {
        let cfg = SamplerConfig::default();
        let spec = SetSpec::new(5, 2, SetVariant::S1prime).unwrap();
        let a: Vec<_> = {
            let mut rng = seed::stream(11, 3);
            (0..20).map(|_| sample_message(&spec, &cfg, &mut rng).unwrap()).collect()
        };
        let mut rng = seed::stream(11, 3);
        for m in a {
            assert_eq!(m, sample_message(&spec, &cfg, &mut rng).unwrap());
        }
    }
}
