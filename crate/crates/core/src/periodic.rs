//! Periodic binary sequences, the spaces `H(u)` of sequences whose minimal
//! period divides a Steinitz number `u`, and the Besicovitch pseudorank of
//! eventually periodic sequences.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::hamming::{HElement, Rank};
use crate::steinitz::{SteinitzError, SteinitzNumber};

/// Default bound on the periods produced by sequence arithmetic.
pub const DEFAULT_PERIOD_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicError {
    #[error("empty pattern")]
    EmptyPattern,
    #[error("period {period} exceeds the cap {cap}")]
    PeriodTooLarge { period: usize, cap: usize },
    #[error("{k} is not a multiple of the period {period}")]
    NotAPeriod { k: usize, period: usize },
    #[error("{divisor} does not divide {u}")]
    NotADivisor { divisor: u64, u: SteinitzNumber },
    #[error("malformed sequence {0:?}: expected `pre:tail` bit-strings")]
    Malformed(String),
    #[error(transparent)]
    Steinitz(#[from] SteinitzError),
}

/// Smallest `d | len` such that `bits` is `d`-periodic.
fn minimal_period(bits: &BitSlice<u64, Lsb0>) -> usize {
    let len = bits.len();
    (1..=len)
        .filter(|d| len % d == 0)
        .find(|&d| (d..len).all(|i| bits[i] == bits[i - d]))
        .unwrap_or(len)
}

/// A purely periodic sequence, stored as one window of its minimal period.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PeriodicSequence {
    pattern: BitVec<u64, Lsb0>,
}

impl PeriodicSequence {
    /// Minimal-period representative of the sequence repeating `raw`.
    pub fn normalize<I: IntoIterator<Item = bool>>(raw: I) -> Result<Self, PeriodicError> {
        let bits: BitVec<u64, Lsb0> = raw.into_iter().collect();
        if bits.is_empty() {
            return Err(PeriodicError::EmptyPattern);
        }
        let p = minimal_period(&bits);
        Ok(Self { pattern: bits[..p].to_bitvec() })
    }

    pub fn zero() -> Self {
        Self { pattern: bitvec![u64, Lsb0; 0; 1] }
    }

    pub fn one() -> Self {
        Self { pattern: bitvec![u64, Lsb0; 1; 1] }
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    /// Term `i` of the sequence, counting from 0.
    pub fn term(&self, i: usize) -> bool {
        self.pattern[i % self.period()]
    }

    pub fn pattern(&self) -> &BitSlice<u64, Lsb0> {
        &self.pattern
    }

    pub fn weight(&self) -> usize {
        self.pattern.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.pattern.not_any()
    }

    /// The first `k` terms; `k` must be a multiple of the period.
    pub fn window(&self, k: usize) -> Result<BitVec<u64, Lsb0>, PeriodicError> {
        if k == 0 || k % self.period() != 0 {
            return Err(PeriodicError::NotAPeriod { k, period: self.period() });
        }
        Ok((0..k).map(|i| self.term(i)).collect())
    }

    fn combine(
        &self,
        other: &Self,
        cap: usize,
        op: impl Fn(bool, bool) -> bool,
    ) -> Result<Self, PeriodicError> {
        let period = self.period().lcm(&other.period());
        if period > cap {
            return Err(PeriodicError::PeriodTooLarge { period, cap });
        }
        Self::normalize((0..period).map(|i| op(self.term(i), other.term(i))))
    }

    /// Coordinatewise XOR.
    pub fn add(&self, other: &Self) -> Result<Self, PeriodicError> {
        self.add_capped(other, DEFAULT_PERIOD_CAP)
    }

    /// Coordinatewise AND.
    pub fn mul(&self, other: &Self) -> Result<Self, PeriodicError> {
        self.mul_capped(other, DEFAULT_PERIOD_CAP)
    }

    pub fn add_capped(&self, other: &Self, cap: usize) -> Result<Self, PeriodicError> {
        self.combine(other, cap, |a, b| a ^ b)
    }

    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self, PeriodicError> {
        self.combine(other, cap, |a, b| a & b)
    }

    pub fn complement(&self) -> Self {
        Self { pattern: !self.pattern.clone() }
    }

    /// `weight / period`.
    pub fn rank(&self) -> Rank {
        Rank::ratio(self.weight(), self.period())
    }

    /// Average over the first `k` terms for any period `k` (a multiple of
    /// the minimal one).
    pub fn rank_over_period(&self, k: usize) -> Result<Rank, PeriodicError> {
        let w = self.window(k)?;
        Ok(Rank::ratio(w.count_ones(), k))
    }

    /// Whether the minimal period divides `u`.
    pub fn is_u_periodic(&self, u: &SteinitzNumber) -> bool {
        SteinitzNumber::from_natural(self.period() as u64)
            .expect("period is positive")
            .divides(u)
    }
}

/// The map `H_m → H(u)` sending an element to the sequence repeating its
/// bits.
pub fn embed_standard(x: &HElement) -> PeriodicSequence {
    PeriodicSequence::normalize(x.bits().iter().by_vals()).expect("elements are nonempty")
}

impl fmt::Display for PeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(":")?;
        for b in self.pattern.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PeriodicSequence({self})")
    }
}

impl Serialize for PeriodicSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn parse_bits(s: &str) -> Option<BitVec<u64, Lsb0>> {
    s.bytes()
        .map(|b| match b {
            b'0' => Some(false),
            b'1' => Some(true),
            _ => None,
        })
        .collect()
}

/// A finite preperiod followed by a periodic tail, in canonical form: the
/// preperiod is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSequence {
    preperiod: BitVec<u64, Lsb0>,
    tail: PeriodicSequence,
}

impl EventuallyPeriodicSequence {
    pub fn new<I: IntoIterator<Item = bool>>(
        preperiod: I,
        tail: PeriodicSequence,
    ) -> Self {
        let mut preperiod: BitVec<u64, Lsb0> = preperiod.into_iter().collect();
        let mut tail = tail.pattern;
        // absorb the last preperiod bit while it equals the last tail bit,
        // rotating the tail one step right each time
        while let Some(last_pre) = preperiod.last().map(|b| *b) {
            if last_pre != tail[tail.len() - 1] {
                break;
            }
            preperiod.pop();
            tail.rotate_right(1);
        }
        Self { preperiod, tail: PeriodicSequence { pattern: tail } }
    }

    pub fn preperiod(&self) -> &BitSlice<u64, Lsb0> {
        &self.preperiod
    }

    pub fn tail(&self) -> &PeriodicSequence {
        &self.tail
    }

    pub fn term(&self, i: usize) -> bool {
        match self.preperiod.get(i) {
            Some(b) => *b,
            None => self.tail.term(i - self.preperiod.len()),
        }
    }

    /// `limsup (a_1 + … + a_n) / n`, which for an eventually periodic
    /// sequence is the density of ones in the tail.
    pub fn besicovitch_pseudorank(&self) -> Rank {
        self.tail.rank()
    }

    /// Whether the sequence lies in the ideal of pseudorank-zero sequences,
    /// i.e. has finitely many ones.
    pub fn is_null(&self) -> bool {
        self.tail.is_zero()
    }
}

impl fmt::Display for EventuallyPeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.preperiod.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        write!(f, "{}", self.tail)
    }
}

impl fmt::Debug for EventuallyPeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventuallyPeriodicSequence({self})")
    }
}

impl FromStr for EventuallyPeriodicSequence {
    type Err = PeriodicError;

    /// `pre:tail`, e.g. `01:101`; a purely periodic sequence is `:101`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || PeriodicError::Malformed(s.to_string());
        let (pre, tail) = s.trim().split_once(':').ok_or_else(malformed)?;
        let pre = parse_bits(pre).ok_or_else(malformed)?;
        let tail = parse_bits(tail).ok_or_else(malformed)?;
        if tail.is_empty() {
            return Err(malformed());
        }
        Ok(Self::new(pre, PeriodicSequence::normalize(tail)?))
    }
}

impl FromStr for PeriodicSequence {
    type Err = PeriodicError;

    /// `:101` or `101`; a nonempty preperiod is rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let body = s.strip_prefix(':').unwrap_or(s);
        let bits = parse_bits(body).ok_or_else(|| PeriodicError::Malformed(s.to_string()))?;
        Self::normalize(bits)
    }
}

impl Serialize for EventuallyPeriodicSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    pub u: SteinitzNumber,
    pub divisors: Vec<u64>,
    /// lcm of the listed divisors: the part of `st(H(u))` they witness.
    pub truncated: SteinitzNumber,
    pub divides_u: bool,
    /// Each `H_d` maps injectively and rank-preservingly into `H(u)`.
    pub embeddings_ok: bool,
}

/// Largest `d` for which the embedding `H_d → H(u)` is checked on every
/// element; larger `d` are checked on atoms and their complements.
pub const EXHAUSTIVE_EMBEDDING_BOUND: u64 = 12;

/// Checks that the listed divisors of `u` witness standard subspaces
/// `H_d ⊂ H(u)` and that their lcm divides `u`.
pub fn steinitz_truncation_check(
    u: &SteinitzNumber,
    divisors: &[u64],
) -> Result<TruncationReport, PeriodicError> {
    let mut truncated = SteinitzNumber::one();
    let mut embeddings_ok = true;
    for &d in divisors {
        let sd = SteinitzNumber::from_natural(d)?;
        if !sd.divides(u) {
            return Err(PeriodicError::NotADivisor { divisor: d, u: u.clone() });
        }
        truncated = truncated.lcm(&sd);
        embeddings_ok &= check_embedding(d as usize, u);
    }
    let divides_u = truncated.divides(u);
    Ok(TruncationReport {
        u: u.clone(),
        divisors: divisors.to_vec(),
        truncated,
        divides_u,
        embeddings_ok,
    })
}

fn check_embedding(d: usize, u: &SteinitzNumber) -> bool {
    let space = crate::hamming::StandardSpace::new(d).expect("d >= 1");
    let elements: Vec<HElement> = if d as u64 <= EXHAUSTIVE_EMBEDDING_BOUND {
        space.elements().expect("small space").collect()
    } else {
        space.atoms().flat_map(|a| [a.complement(), a]).collect()
    };
    let mut seen = std::collections::HashSet::new();
    elements.iter().all(|x| {
        let s = embed_standard(x);
        // compare full windows of length d so that injectivity is checked
        // on the sequences, not on their minimal patterns
        let window = s.window(d).expect("period divides d");
        s.is_u_periodic(u) && s.rank() == x.rank() && seen.insert(window)
    })
}
