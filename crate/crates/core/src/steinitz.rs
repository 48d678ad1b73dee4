//! Steinitz (supernatural) numbers.
//!
//! A Steinitz number is a formal product `∏ p^r_p` over the primes where
//! every exponent is a natural number or infinity. Only finitely many
//! primes are stored: the representation is the sparse map of nonzero
//! exponents, so the number `1` is the empty map.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_prime::nt_funcs::{factorize64, is_prime64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteinitzError {
    #[error("0 is not a Steinitz number")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("zero exponent for prime {0}")]
    ZeroExponent(u64),
    #[error("prime {0} listed more than once")]
    DuplicatePrime(u64),
    #[error("infinite Steinitz number has no natural value")]
    Infinite,
    #[error("malformed Steinitz number {text:?}: {reason}")]
    Malformed { text: String, reason: String },
}

/// Exponent of a single prime. `Finite(0)` never appears inside a
/// [`SteinitzNumber`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    fn add(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => {
                Exponent::Finite(a.checked_add(b).expect("exponent overflow"))
            }
            _ => Exponent::Infinite,
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
            (Exponent::Finite(_), Exponent::Infinite) => Ordering::Less,
            (Exponent::Infinite, Exponent::Finite(_)) => Ordering::Greater,
            (Exponent::Infinite, Exponent::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(k) => write!(f, "{k}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

/// A Steinitz number in canonical sparse form.
///
/// Equality is equality of the canonical maps, so the derived `Eq` is the
/// mathematical one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SteinitzNumber {
    factors: BTreeMap<u64, Exponent>,
}

impl SteinitzNumber {
    /// The number 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a number from `(prime, exponent)` pairs, checking that every
    /// base is prime, no exponent is zero, and no prime repeats.
    pub fn from_factors<I>(factors: I) -> Result<Self, SteinitzError>
    where
        I: IntoIterator<Item = (u64, Exponent)>,
    {
        let mut map = BTreeMap::new();
        for (p, e) in factors {
            if !is_prime64(p) {
                return Err(SteinitzError::NotPrime(p));
            }
            if e == Exponent::Finite(0) {
                return Err(SteinitzError::ZeroExponent(p));
            }
            if map.insert(p, e).is_some() {
                return Err(SteinitzError::DuplicatePrime(p));
            }
        }
        Ok(Self { factors: map })
    }

    /// Prime factorization of a positive 64-bit integer.
    pub fn from_natural(n: u64) -> Result<Self, SteinitzError> {
        if n == 0 {
            return Err(SteinitzError::Zero);
        }
        let factors = factorize64(n)
            .into_iter()
            .map(|(p, k)| (p, Exponent::Finite(k as u64)))
            .collect();
        Ok(Self { factors })
    }

    /// `∏ p^∞` over every prime `p ≤ bound`: a finite stand-in for the
    /// number with all exponents infinite.
    pub fn all_primes_infinite_up_to(bound: u64) -> Self {
        let factors = (2..=bound)
            .filter(|&p| is_prime64(p))
            .map(|p| (p, Exponent::Infinite))
            .collect();
        Self { factors }
    }

    pub fn exponent(&self, p: u64) -> Option<Exponent> {
        self.factors.get(&p).copied()
    }

    /// `(prime, exponent)` pairs in ascending prime order.
    pub fn factors(&self) -> impl Iterator<Item = (u64, Exponent)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.values().all(|e| !e.is_infinite())
    }

    /// Exponents add; infinity absorbs.
    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            factors
                .entry(p)
                .and_modify(|cur| *cur = cur.add(e))
                .or_insert(e);
        }
        Self { factors }
    }

    /// Exponentwise maximum.
    pub fn lcm(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            factors
                .entry(p)
                .and_modify(|cur| *cur = (*cur).max(e))
                .or_insert(e);
        }
        Self { factors }
    }

    /// Exponentwise minimum.
    pub fn gcd(&self, other: &Self) -> Self {
        let factors = self
            .factors
            .iter()
            .filter_map(|(&p, &e)| other.factors.get(&p).map(|&f| (p, e.min(f))))
            .collect();
        Self { factors }
    }

    /// `self | other`: every exponent of `self` is at most the matching
    /// exponent of `other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.factors
            .iter()
            .all(|(p, &e)| other.factors.get(p).is_some_and(|&f| e <= f))
    }

    pub fn to_natural(&self) -> Result<BigUint, SteinitzError> {
        let mut acc = BigUint::from(1u32);
        for (&p, &e) in &self.factors {
            match e {
                Exponent::Finite(k) => {
                    let k = u32::try_from(k).map_err(|_| SteinitzError::Infinite)?;
                    acc *= BigUint::from(p).pow(k);
                }
                Exponent::Infinite => return Err(SteinitzError::Infinite),
            }
        }
        Ok(acc)
    }

    /// Natural value when it fits in a `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        self.to_natural().ok().and_then(|n| u64::try_from(n).ok())
    }
}

impl fmt::Display for SteinitzNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            match e {
                Exponent::Finite(1) => write!(f, "{p}")?,
                _ => write!(f, "{p}^{e}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for SteinitzNumber {
    type Err = SteinitzError;

    /// Grammar: `"1" | term ("*" term)*` with `term := prime ("^" (posint | "inf"))?`.
    /// Terms may come in any order on input; repeated primes are rejected.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let malformed = |reason: &str| SteinitzError::Malformed {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s = text.trim();
        if s == "1" {
            return Ok(Self::one());
        }
        if s.is_empty() {
            return Err(malformed("empty input"));
        }
        let mut pairs = Vec::new();
        for term in s.split('*') {
            let term = term.trim();
            let (base, exp) = match term.split_once('^') {
                Some((b, e)) => (b.trim(), Some(e.trim())),
                None => (term, None),
            };
            if base.is_empty() || !base.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(&format!("bad base in term {term:?}")));
            }
            let p: u64 = base
                .parse()
                .map_err(|_| malformed(&format!("base out of range in {term:?}")))?;
            let e = match exp {
                None => Exponent::Finite(1),
                Some("inf") => Exponent::Infinite,
                Some(e) if !e.is_empty() && e.bytes().all(|b| b.is_ascii_digit()) => {
                    Exponent::Finite(
                        e.parse()
                            .map_err(|_| malformed(&format!("exponent out of range in {term:?}")))?,
                    )
                }
                Some(_) => return Err(malformed(&format!("bad exponent in term {term:?}"))),
            };
            pairs.push((p, e));
        }
        Self::from_factors(pairs)
    }
}

impl Serialize for SteinitzNumber {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SteinitzNumber {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sn(s: &str) -> SteinitzNumber {
        s.parse().unwrap()
    }

    /// Trial division, independent of the factorization backend.
    fn trial_division(mut n: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            if k > 0 {
                out.push((d, k));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn from_natural_examples() {
        assert!(SteinitzNumber::from_natural(1).unwrap().is_one());
        let twelve = SteinitzNumber::from_natural(12).unwrap();
        let expected: Vec<_> = trial_division(12)
            .into_iter()
            .map(|(p, k)| (p, Exponent::Finite(k)))
            .collect();
        assert_eq!(twelve.factors().collect::<Vec<_>>(), expected);
        assert_eq!(twelve, sn("2^2*3"));
        assert_eq!(trial_division(97), vec![(97, 1)]);
        assert_eq!(SteinitzNumber::from_natural(97).unwrap(), sn("97"));
        assert_eq!(SteinitzNumber::from_natural(0), Err(SteinitzError::Zero));
    }

    #[test]
    fn from_natural_matches_trial_division() {
        for n in 1..3000u64 {
            let expected: Vec<_> = trial_division(n)
                .into_iter()
                .map(|(p, k)| (p, Exponent::Finite(k)))
                .collect();
            let got: Vec<_> = SteinitzNumber::from_natural(n).unwrap().factors().collect();
            assert_eq!(got, expected, "n = {n}");
        }
    }

    #[test]
    fn mul_examples() {
        // 12 * 18 = 216 = 2^3 * 3^3
        assert_eq!(12 * 18, 216);
        let prod = sn("2^2*3").mul(&sn("2*3^2"));
        assert_eq!(prod, sn("2^3*3^3"));
        assert_eq!(prod.to_natural().unwrap(), BigUint::from(216u32));
        assert_eq!(sn("2^inf").mul(&sn("2^3")), sn("2^inf"));
        let a = sn("5*7^inf");
        assert_eq!(a.mul(&SteinitzNumber::one()), a);
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(num_integer::lcm(12u64, 10), 60);
        assert_eq!(sn("2^2*3").lcm(&sn("2*5")), sn("2^2*3*5"));
        let a = sn("2^4*11^inf");
        assert_eq!(a.lcm(&a), a);
        assert_eq!(sn("3^inf").lcm(&sn("3^5")), sn("3^inf"));
    }

    #[test]
    fn divides_examples() {
        assert!(sn("2*3").divides(&sn("2^inf*3^2")));
        assert!(!sn("5").divides(&sn("2^inf")));
        for b in ["1", "2^inf", "3*5^2"] {
            assert!(SteinitzNumber::one().divides(&sn(b)));
        }
        assert!(!sn("2^inf").divides(&sn("2^100")));
    }

    #[test]
    fn to_natural_examples() {
        assert_eq!(SteinitzNumber::one().to_natural().unwrap(), BigUint::from(1u32));
        assert_eq!(sn("2^3*3^3").to_natural().unwrap(), BigUint::from(2u32.pow(3) * 3u32.pow(3)));
        assert_eq!(sn("2^inf").to_natural(), Err(SteinitzError::Infinite));
    }

    #[test]
    fn parse_and_format() {
        let a = sn("2^3*3^inf*5");
        assert_eq!(a.exponent(2), Some(Exponent::Finite(3)));
        assert_eq!(a.exponent(3), Some(Exponent::Infinite));
        assert_eq!(a.exponent(5), Some(Exponent::Finite(1)));
        assert_eq!(a.to_string(), "2^3*3^inf*5");
        assert!(sn("1").is_one());
        assert_eq!(sn("5*2").to_string(), "2*5");
        assert!(matches!("4^2".parse::<SteinitzNumber>(), Err(SteinitzError::NotPrime(4))));
        assert!(matches!("2^0".parse::<SteinitzNumber>(), Err(SteinitzError::ZeroExponent(2))));
        for bad in ["", "2^", "x", "2**3", "2^-1", "2^infinity", "2*2"] {
            assert!(bad.parse::<SteinitzNumber>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn serde_uses_canonical_text() {
        let a = sn("3^inf*2");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"2*3^inf\"");
        assert_eq!(serde_json::from_str::<SteinitzNumber>(&json).unwrap(), a);
    }

    fn arb_steinitz() -> impl proptest::strategy::Strategy<Value = SteinitzNumber> {
        use proptest::prelude::*;
        let exp = prop_oneof![4 => (1u64..6).prop_map(Exponent::Finite), 1 => Just(Exponent::Infinite)];
        proptest::collection::btree_map(prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), exp, 0..4)
            .prop_map(|m| SteinitzNumber::from_factors(m).unwrap())
    }

    proptest::proptest! {
        #[test]
        fn mul_and_lcm_laws(a in arb_steinitz(), b in arb_steinitz(), c in arb_steinitz()) {
            proptest::prop_assert_eq!(a.mul(&b), b.mul(&a));
            proptest::prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            proptest::prop_assert_eq!(a.mul(&SteinitzNumber::one()), a.clone());
            proptest::prop_assert_eq!(a.lcm(&b), b.lcm(&a));
            proptest::prop_assert_eq!(a.lcm(&b).lcm(&c), a.lcm(&b.lcm(&c)));
            proptest::prop_assert_eq!(a.lcm(&a), a.clone());
            proptest::prop_assert!(a.divides(&a.lcm(&b)));
            proptest::prop_assert!(a.divides(&a.mul(&b)));
            proptest::prop_assert!(a.gcd(&b).divides(&a));
            if a.divides(&b) && b.divides(&a) {
                proptest::prop_assert_eq!(&a, &b);
            }
            proptest::prop_assert_eq!(a.to_string().parse::<SteinitzNumber>().unwrap(), a.clone());
        }

        #[test]
        fn finite_agrees_with_big_integers(x in 1u64..1_000_000, y in 1u64..1_000_000) {
            let a = SteinitzNumber::from_natural(x).unwrap();
            let b = SteinitzNumber::from_natural(y).unwrap();
            proptest::prop_assert_eq!(a.mul(&b).to_natural().unwrap(), BigUint::from(x) * BigUint::from(y));
            proptest::prop_assert_eq!(a.lcm(&b).to_natural().unwrap(), BigUint::from(num_integer::lcm(x, y)));
            proptest::prop_assert_eq!(a.divides(&b), y % x == 0);
            proptest::prop_assert_eq!(SteinitzNumber::from_natural(a.to_u64().unwrap()).unwrap(), a);
        }
    }
}
