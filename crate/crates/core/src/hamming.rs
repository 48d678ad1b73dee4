//! Standard Hamming spaces `H_n`: bit-vectors of length `n` forming a
//! Boolean algebra under XOR and AND, with rank `weight / n`.
//!
//! Ranks are exact rationals. Elements remember the size of their space
//! and refuse to combine with elements of a different space.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest input accepted by [`orthogonal_cover`]; the construction
/// enumerates all `2^r` sign patterns.
pub const MAX_COVER_INPUTS: usize = 20;

/// Largest space that [`StandardSpace::elements`] will enumerate.
pub const MAX_ENUMERATION_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HammingError {
    #[error("space mismatch: H_{left} vs H_{right}")]
    SpaceMismatch { left: usize, right: usize },
    #[error("a standard space needs at least one atom")]
    EmptySpace,
    #[error("orthogonal cover of an empty list")]
    EmptyInput,
    #[error("cover construction limited to {cap} inputs, got {got}")]
    TooManyInputs { got: usize, cap: usize },
    #[error("element must be nonzero")]
    ZeroElement,
    #[error("element {element} does not lie in the ideal generated by {generator}")]
    NotInIdeal { element: String, generator: String },
    #[error("not an orthogonal cover: {0}")]
    InvalidCover(String),
    #[error("atom index {index} out of range for H_{n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("H_{0} is too large to enumerate")]
    TooLargeToEnumerate(usize),
    #[error("malformed element {0:?}: expected a nonempty string of 0 and 1")]
    Malformed(String),
    #[error("rank {0} outside [0, 1]")]
    RankOutOfRange(String),
}

/// An exact rank value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(BigRational);

impl Rank {
    pub fn new(value: BigRational) -> Result<Self, HammingError> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(HammingError::RankOutOfRange(value.to_string()));
        }
        Ok(Rank(value))
    }

    /// `num / den`. Panics when `den == 0` or `num > den`.
    pub fn ratio(num: usize, den: usize) -> Self {
        assert!(den > 0 && num <= den, "rank {num}/{den} outside [0, 1]");
        Rank(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Rank(BigRational::zero())
    }

    pub fn one() -> Self {
        Rank(BigRational::one())
    }

    pub fn is_zero_rank(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_value(self) -> BigRational {
        self.0
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Rank {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

/// `H_n`, identified by its number of atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandardSpace {
    n: usize,
}

impl StandardSpace {
    pub fn new(n: usize) -> Result<Self, HammingError> {
        if n == 0 {
            return Err(HammingError::EmptySpace);
        }
        Ok(Self { n })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn zero(self) -> HElement {
        HElement::zero(self.n)
    }

    pub fn one(self) -> HElement {
        HElement::one(self.n)
    }

    pub fn atom(self, i: usize) -> HElement {
        HElement::atom(self.n, i)
    }

    pub fn atoms(self) -> impl Iterator<Item = HElement> {
        (0..self.n).map(move |i| HElement::atom(self.n, i))
    }

    /// All `2^n` elements, ordered by the integer whose bit `i` is
    /// coordinate `i`.
    pub fn elements(self) -> Result<impl Iterator<Item = HElement>, HammingError> {
        if self.n > MAX_ENUMERATION_BITS {
            return Err(HammingError::TooLargeToEnumerate(self.n));
        }
        let n = self.n;
        Ok((0..1u64 << n).map(move |mask| HElement::from_mask(n, mask)))
    }

    pub fn random_element<R: Rng + ?Sized>(self, rng: &mut R) -> HElement {
        HElement::from_bits((0..self.n).map(|_| rng.gen::<bool>()))
    }
}

/// An element of `H_n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HElement {
    bits: BitVec<u64, Lsb0>,
}

impl HElement {
    pub fn zero(n: usize) -> Self {
        Self { bits: bitvec![u64, Lsb0; 0; n] }
    }

    pub fn one(n: usize) -> Self {
        Self { bits: bitvec![u64, Lsb0; 1; n] }
    }

    pub fn atom(n: usize, i: usize) -> Self {
        assert!(i < n, "atom {i} out of range for H_{n}");
        let mut e = Self::zero(n);
        e.bits.set(i, true);
        e
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self { bits: bits.into_iter().collect() }
    }

    /// Coordinate `i` is bit `i` of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64);
        Self::from_bits((0..n).map(|i| mask >> i & 1 == 1))
    }

    /// The sum of the atoms listed in `support`.
    pub fn from_support(n: usize, support: &[usize]) -> Result<Self, HammingError> {
        let mut e = Self::zero(n);
        for &i in support {
            if i >= n {
                return Err(HammingError::IndexOutOfRange { index: i, n });
            }
            e.bits.set(i, true);
        }
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn space(&self) -> StandardSpace {
        StandardSpace { n: self.n() }
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones()
    }

    /// Indices of the atoms below this element.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.not_any()
    }

    pub fn is_one(&self) -> bool {
        self.bits.all()
    }

    fn same_space(&self, other: &Self) -> Result<(), HammingError> {
        if self.n() != other.n() {
            return Err(HammingError::SpaceMismatch { left: self.n(), right: other.n() });
        }
        Ok(())
    }

    /// Coordinatewise XOR.
    pub fn add(&self, other: &Self) -> Result<Self, HammingError> {
        self.same_space(other)?;
        let mut bits = self.bits.clone();
        bits ^= other.bits.as_bitslice();
        Ok(Self { bits })
    }

    /// Coordinatewise AND.
    pub fn mul(&self, other: &Self) -> Result<Self, HammingError> {
        self.same_space(other)?;
        let mut bits = self.bits.clone();
        bits &= other.bits.as_bitslice();
        Ok(Self { bits })
    }

    /// `1 - a`, which in characteristic 2 is `1 + a`.
    pub fn complement(&self) -> Self {
        Self { bits: !self.bits.clone() }
    }

    pub fn is_orthogonal_to(&self, other: &Self) -> Result<bool, HammingError> {
        Ok(self.mul(other)?.is_zero())
    }

    /// `self ≤ other`, i.e. `self · other = self`.
    pub fn is_below(&self, other: &Self) -> Result<bool, HammingError> {
        Ok(self.mul(other)? == *self)
    }

    pub fn rank(&self) -> Rank {
        Rank::ratio(self.weight(), self.n())
    }

    /// Number of atoms below the element. This is the rank of the
    /// non-unital space of finite subsets of `{0..n-1}`.
    pub fn counting_rank(&self) -> usize {
        self.weight()
    }
}

impl fmt::Display for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HElement({self})")
    }
}

impl FromStr for HElement {
    type Err = HammingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(HammingError::Malformed(s.to_string()));
        }
        Ok(Self::from_bits(s.bytes().map(|b| b == b'1')))
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: usize,
    bits: String,
}

impl Serialize for HElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementJson { n: self.n(), bits: self.to_string() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ElementJson::deserialize(deserializer)?;
        let e: HElement = raw.bits.parse().map_err(serde::de::Error::custom)?;
        if e.n() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but bits has length {}",
                raw.n,
                e.n()
            )));
        }
        Ok(e)
    }
}

/// Sum of a family of pairwise orthogonal elements of one space.
fn orthogonal_sum<'a, I>(n: usize, parts: I) -> HElement
where
    I: IntoIterator<Item = &'a HElement>,
{
    let mut acc = HElement::zero(n);
    for p in parts {
        acc.bits |= p.bits.as_bitslice();
    }
    acc
}

/// A family of nonzero, pairwise orthogonal elements of one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalCover {
    n: usize,
    members: Vec<HElement>,
}

impl OrthogonalCover {
    pub fn new(members: Vec<HElement>) -> Result<Self, HammingError> {
        let first = members
            .first()
            .ok_or_else(|| HammingError::InvalidCover("no members".into()))?;
        let n = first.n();
        let mut seen = HElement::zero(n);
        for (i, m) in members.iter().enumerate() {
            first.same_space(m)?;
            if m.is_zero() {
                return Err(HammingError::InvalidCover(format!("member {i} is zero")));
            }
            if !seen.is_orthogonal_to(m)? {
                return Err(HammingError::InvalidCover(format!(
                    "member {i} = {m} meets an earlier member"
                )));
            }
            seen.bits |= m.bits.as_bitslice();
        }
        Ok(Self { n, members })
    }

    /// The atoms of `H_n`.
    pub fn atoms(space: StandardSpace) -> Self {
        Self { n: space.n(), members: space.atoms().collect() }
    }

    /// `{1}`.
    pub fn trivial(space: StandardSpace) -> Self {
        Self { n: space.n(), members: vec![space.one()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[HElement] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sum of all members.
    pub fn total(&self) -> HElement {
        orthogonal_sum(self.n, &self.members)
    }

    /// Indices of the members `e` with `x·e = e`, provided those members
    /// sum to `x`; `None` when `x` is not covered.
    pub fn decompose(&self, x: &HElement) -> Result<Option<Vec<usize>>, HammingError> {
        if x.n() != self.n {
            return Err(HammingError::SpaceMismatch { left: x.n(), right: self.n });
        }
        let below: Vec<usize> = self
            .members
            .iter()
            .enumerate()
            .filter(|(_, e)| HElement::is_below(e, x).unwrap_or(false))
            .map(|(i, _)| i)
            .collect();
        let sum = orthogonal_sum(self.n, below.iter().map(|&i| &self.members[i]));
        Ok((sum == *x).then_some(below))
    }

    pub fn covers(&self, x: &HElement) -> Result<bool, HammingError> {
        Ok(self.decompose(x)?.is_some())
    }

    /// Nonzero pairwise products of the two covers together with the parts
    /// of each cover lying outside the other's total.
    pub fn common_refinement(&self, other: &Self) -> Result<Self, HammingError> {
        if self.n != other.n {
            return Err(HammingError::SpaceMismatch { left: self.n, right: other.n });
        }
        let mut members = Vec::new();
        for a in &self.members {
            for b in &other.members {
                let p = a.mul(b)?;
                if !p.is_zero() {
                    members.push(p);
                }
            }
        }
        let outside_other = other.total().complement();
        let outside_self = self.total().complement();
        for a in &self.members {
            let p = a.mul(&outside_other)?;
            if !p.is_zero() {
                members.push(p);
            }
        }
        for b in &other.members {
            let p = b.mul(&outside_self)?;
            if !p.is_zero() {
                members.push(p);
            }
        }
        Self::new(members)
    }
}

/// All nonzero products `b_1 ⋯ b_r` with `b_i ∈ {a_i, 1 - a_i}`.
///
/// Members are listed by sign pattern, starting from `a_1 ⋯ a_r` and ending
/// with `(1 - a_1) ⋯ (1 - a_r)`.
pub fn orthogonal_cover(elements: &[HElement]) -> Result<OrthogonalCover, HammingError> {
    let first = elements.first().ok_or(HammingError::EmptyInput)?;
    if elements.len() > MAX_COVER_INPUTS {
        return Err(HammingError::TooManyInputs { got: elements.len(), cap: MAX_COVER_INPUTS });
    }
    for e in elements {
        first.same_space(e)?;
    }
    let n = first.n();
    let r = elements.len();
    let complements: Vec<HElement> = elements.iter().map(HElement::complement).collect();
    let mut members = Vec::new();
    for pattern in (0..1u32 << r).rev() {
        let mut prod = HElement::one(n);
        for i in 0..r {
            let factor = if pattern >> (r - 1 - i) & 1 == 1 { &elements[i] } else { &complements[i] };
            prod.bits &= factor.bits.as_bitslice();
            if prod.is_zero() {
                break;
            }
        }
        if !prod.is_zero() {
            members.push(prod);
        }
    }
    Ok(OrthogonalCover { n, members })
}

/// One failed rank axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    /// 1: `r(a) = 0 iff a = 0`; 2: `r(a) = 1 iff a = 1`; 3: additivity.
    pub axiom: u8,
    pub a: String,
    pub b: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub n: usize,
    pub exhaustive: bool,
    pub elements_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// How [`check_rank_axioms_with`] chooses elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomMode {
    /// Every element and every orthogonal pair (`3^n` pairs).
    Exhaustive,
    /// Boundary elements plus `trials` random orthogonal pairs.
    Sampled { trials: usize, seed: u64 },
}

/// Checks the three rank axioms for the standard rank `weight / n`.
pub fn check_rank_axioms(space: StandardSpace, trials: usize, seed: u64) -> AxiomReport {
    check_rank_axioms_with(space, AxiomMode::Sampled { trials, seed }, |a| a.rank().into_value())
}

pub fn check_rank_axioms_exhaustive(space: StandardSpace) -> Result<AxiomReport, HammingError> {
    if space.n() > 16 {
        return Err(HammingError::TooLargeToEnumerate(space.n()));
    }
    Ok(check_rank_axioms_with(space, AxiomMode::Exhaustive, |a| a.rank().into_value()))
}

/// Checks the rank axioms for an arbitrary candidate rank function.
pub fn check_rank_axioms_with<F>(space: StandardSpace, mode: AxiomMode, rank: F) -> AxiomReport
where
    F: Fn(&HElement) -> BigRational,
{
    let n = space.n();
    let mut report = AxiomReport {
        n,
        exhaustive: mode == AxiomMode::Exhaustive,
        elements_checked: 0,
        pairs_checked: 0,
        violations: Vec::new(),
    };
    let check_element = |a: &HElement, report: &mut AxiomReport| {
        report.elements_checked += 1;
        let r = rank(a);
        if r.is_zero() != a.is_zero() {
            report.violations.push(AxiomViolation {
                axiom: 1,
                a: a.to_string(),
                b: None,
                detail: format!("r(a) = {r}"),
            });
        }
        if r.is_one() != a.is_one() {
            report.violations.push(AxiomViolation {
                axiom: 2,
                a: a.to_string(),
                b: None,
                detail: format!("r(a) = {r}"),
            });
        }
    };
    let check_pair = |a: &HElement, b: &HElement, report: &mut AxiomReport| {
        report.pairs_checked += 1;
        let sum = a.add(b).expect("same space");
        let lhs = rank(&sum);
        let rhs = rank(a) + rank(b);
        if lhs != rhs {
            report.violations.push(AxiomViolation {
                axiom: 3,
                a: a.to_string(),
                b: Some(b.to_string()),
                detail: format!("r(a+b) = {lhs} but r(a) + r(b) = {rhs}"),
            });
        }
    };

    match mode {
        AxiomMode::Exhaustive => {
            assert!(n <= 32);
            for mask in 0..1u64 << n {
                let a = HElement::from_mask(n, mask);
                check_element(&a, &mut report);
                // every b supported on the complement of a
                let free = !mask & ((1u64 << n) - 1);
                let mut sub = free;
                loop {
                    check_pair(&a, &HElement::from_mask(n, sub), &mut report);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
            }
        }
        AxiomMode::Sampled { trials, seed } => {
            let mut boundary = vec![space.zero(), space.one()];
            for i in 0..n {
                boundary.push(space.atom(i));
                boundary.push(space.atom(i).complement());
            }
            for a in &boundary {
                check_element(a, &mut report);
            }
            check_pair(&space.zero(), &space.one(), &mut report);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let a = space.random_element(&mut rng);
                let b = HElement::from_bits((0..n).map(|i| !a.bit(i) && rng.gen::<bool>()));
                check_element(&a, &mut report);
                check_element(&b, &mut report);
                check_pair(&a, &b, &mut report);
            }
        }
    }
    report
}

/// The ideal `hH = {a·h}` of a nonzero element `h`, itself a unital
/// Hamming space with identity `h` and rank `r(a) / r(h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSpace {
    generator: HElement,
    support: Vec<usize>,
}

pub fn ideal_space(h: &HElement) -> Result<IdealSpace, HammingError> {
    if h.is_zero() {
        return Err(HammingError::ZeroElement);
    }
    Ok(IdealSpace { generator: h.clone(), support: h.support().collect() })
}

impl IdealSpace {
    pub fn generator(&self) -> &HElement {
        &self.generator
    }

    /// The ideal as a standard space on the support of the generator.
    pub fn space(&self) -> StandardSpace {
        StandardSpace { n: self.support.len() }
    }

    /// The identity element of the ideal.
    pub fn unit(&self) -> &HElement {
        &self.generator
    }

    pub fn contains(&self, a: &HElement) -> Result<bool, HammingError> {
        a.is_below(&self.generator)
    }

    /// `a·h`.
    pub fn project(&self, a: &HElement) -> Result<HElement, HammingError> {
        a.mul(&self.generator)
    }

    fn require_member(&self, a: &HElement) -> Result<(), HammingError> {
        if !self.contains(a)? {
            return Err(HammingError::NotInIdeal {
                element: a.to_string(),
                generator: self.generator.to_string(),
            });
        }
        Ok(())
    }

    /// Coordinates of `a` on the support of the generator.
    pub fn restrict(&self, a: &HElement) -> Result<HElement, HammingError> {
        self.require_member(a)?;
        Ok(HElement::from_bits(self.support.iter().map(|&i| a.bit(i))))
    }

    /// Inverse of [`IdealSpace::restrict`].
    pub fn lift(&self, b: &HElement) -> Result<HElement, HammingError> {
        if b.n() != self.support.len() {
            return Err(HammingError::SpaceMismatch { left: b.n(), right: self.support.len() });
        }
        let support: Vec<usize> = b.support().map(|k| self.support[k]).collect();
        HElement::from_support(self.generator.n(), &support)
    }

    /// `r_h(a) = r(a) / r(h)` for `a` in the ideal.
    pub fn rank(&self, a: &HElement) -> Result<Rank, HammingError> {
        self.require_member(a)?;
        Rank::new(a.rank().into_value() / self.generator.rank().into_value())
    }
}

/// `d(a, b) = r(a + b)`, the fraction of differing coordinates.
pub fn distance(a: &HElement, b: &HElement) -> Result<Rank, HammingError> {
    Ok(a.add(b)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(s: &str) -> HElement {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn add_and_mul() {
        assert_eq!(e("101").add(&e("110")).unwrap(), e("011"));
        assert_eq!(e("101").mul(&e("110")).unwrap(), e("100"));
        let a = e("10110");
        assert!(a.add(&a).unwrap().is_zero());
        assert_eq!(a.add(&HElement::zero(5)).unwrap(), a);
        assert_eq!(a.mul(&HElement::one(5)).unwrap(), a);
        assert_eq!(a.mul(&a).unwrap(), a);
        assert_eq!(
            e("10").add(&e("101")),
            Err(HammingError::SpaceMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn rank_and_distance() {
        assert_eq!(HElement::one(7).rank(), Rank::one());
        assert_eq!(HElement::zero(7).rank(), Rank::zero());
        assert_eq!(e("1010").rank(), Rank::ratio(1, 2));
        let a = e("110");
        assert_eq!(distance(&a, &a).unwrap(), Rank::zero());
        assert_eq!(distance(&e("110"), &e("011")).unwrap(), Rank::ratio(2, 3));
        assert_eq!(distance(&HElement::zero(5), &HElement::one(5)).unwrap(), Rank::one());
    }

    #[test]
    fn covers() {
        let a = e("1100");
        let c = orthogonal_cover(&[a.clone()]).unwrap();
        assert_eq!(c.members(), &[a.clone(), a.complement()]);
        let c = orthogonal_cover(&[HElement::one(3)]).unwrap();
        assert_eq!(c.members(), &[HElement::one(3)]);

        // sign patterns of (1100, 1010): 1000, 0100, 0010, 0001
        let c = orthogonal_cover(&[e("1100"), e("1010")]).unwrap();
        let mut got = c.members().to_vec();
        got.sort();
        let mut atoms: Vec<_> = StandardSpace::new(4).unwrap().atoms().collect();
        atoms.sort();
        assert_eq!(got, atoms);

        assert_eq!(orthogonal_cover(&[]), Err(HammingError::EmptyInput));
        let many = vec![HElement::one(2); MAX_COVER_INPUTS + 1];
        assert!(matches!(orthogonal_cover(&many), Err(HammingError::TooManyInputs { .. })));
    }

    #[test]
    fn cover_validation() {
        assert!(OrthogonalCover::new(vec![e("110"), e("011")]).is_err());
        assert!(OrthogonalCover::new(vec![e("100"), e("000")]).is_err());
        assert!(OrthogonalCover::new(vec![e("10"), e("011")]).is_err());
        let c = OrthogonalCover::new(vec![e("100"), e("010")]).unwrap();
        assert!(c.covers(&e("110")).unwrap());
        assert!(!c.covers(&e("001")).unwrap());
        assert!(!c.covers(&e("101")).unwrap());
    }

    #[test]
    fn common_refinement_refines_both() {
        let a = OrthogonalCover::new(vec![e("1100"), e("0011")]).unwrap();
        let b = OrthogonalCover::new(vec![e("1000"), e("0110")]).unwrap();
        let r = a.common_refinement(&b).unwrap();
        for m in a.members().iter().chain(b.members()) {
            assert!(r.covers(m).unwrap(), "{m} not covered");
        }
        assert!(r.total().is_one());
    }

    #[test]
    fn rank_axioms() {
        let h1 = StandardSpace::new(1).unwrap();
        assert!(check_rank_axioms_exhaustive(h1).unwrap().passed());

        // exhaustive H_4 as the oracle, then sampled H_8
        let h4 = StandardSpace::new(4).unwrap();
        let rep = check_rank_axioms_exhaustive(h4).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.pairs_checked, 81);
        assert_eq!(rep.elements_checked, 16);
        let h8 = StandardSpace::new(8).unwrap();
        let rep = check_rank_axioms(h8, 1000, 7);
        assert!(rep.passed());
        assert_eq!(rep.pairs_checked, 1001);
    }

    #[test]
    fn fake_rank_is_caught() {
        let space = StandardSpace::new(5).unwrap();
        let fake = |a: &HElement| q(a.weight() as i64, a.n() as i64 + 1);
        let rep = check_rank_axioms_with(space, AxiomMode::Sampled { trials: 50, seed: 1 }, fake);
        assert!(rep.violations.iter().any(|v| v.axiom == 2));
        assert!(!rep.violations.iter().any(|v| v.axiom == 3));
    }

    #[test]
    fn ideal_examples() {
        let one = HElement::one(4);
        let ideal = ideal_space(&one).unwrap();
        for a in StandardSpace::new(4).unwrap().elements().unwrap() {
            assert_eq!(ideal.rank(&a).unwrap(), a.rank());
        }
        let atom = HElement::atom(4, 2);
        let ideal = ideal_space(&atom).unwrap();
        assert_eq!(ideal.space().n(), 1);
        assert_eq!(ideal.rank(&atom).unwrap(), Rank::one());
        assert_eq!(ideal.rank(&HElement::zero(4)).unwrap(), Rank::zero());

        let h = e("1101");
        let ideal = ideal_space(&h).unwrap();
        assert_eq!(ideal.rank(&e("1001")).unwrap().into_value(), q(2, 4) / q(3, 4));
        assert_eq!(ideal.rank(&e("1001")).unwrap(), Rank::ratio(2, 3));
        assert_eq!(ideal.restrict(&e("1001")).unwrap(), e("101"));
        assert_eq!(ideal.lift(&e("101")).unwrap(), e("1001"));
        assert!(matches!(ideal.rank(&e("0010")), Err(HammingError::NotInIdeal { .. })));
        assert_eq!(ideal_space(&HElement::zero(3)), Err(HammingError::ZeroElement));
    }

    #[test]
    fn ideal_rank_satisfies_axioms() {
        let h = e("1011011");
        let ideal = ideal_space(&h).unwrap();
        let rep = check_rank_axioms_with(ideal.space(), AxiomMode::Exhaustive, |b| {
            ideal.rank(&ideal.lift(b).unwrap()).unwrap().into_value()
        });
        assert!(rep.passed(), "{:?}", rep.violations);
    }

    #[test]
    fn counting_rank_is_n_times_rank() {
        for a in StandardSpace::new(5).unwrap().elements().unwrap() {
            let scaled = a.rank().into_value() * BigRational::from_integer(5.into());
            assert_eq!(scaled, BigRational::from_integer(a.counting_rank().into()));
        }
    }

    #[test]
    fn json_form() {
        let a = e("1010");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"n":4,"bits":"1010"}"#);
        assert_eq!(serde_json::from_str::<HElement>(&json).unwrap(), a);
        assert!(serde_json::from_str::<HElement>(r#"{"n":3,"bits":"1010"}"#).is_err());
    }

    fn triple() -> impl Strategy<Value = (HElement, HElement, HElement)> {
        (1usize..40).prop_flat_map(|n| {
            let el = || proptest::collection::vec(any::<bool>(), n).prop_map(HElement::from_bits);
            (el(), el(), el())
        })
    }

    proptest! {
        #[test]
        fn boolean_algebra_laws((a, b, c) in triple()) {
            prop_assert_eq!(a.add(&b)?.add(&c)?, a.add(&b.add(&c)?)?);
            prop_assert_eq!(a.mul(&b)?.mul(&c)?, a.mul(&b.mul(&c)?)?);
            prop_assert_eq!(a.mul(&b.add(&c)?)?, a.mul(&b)?.add(&a.mul(&c)?)?);
            prop_assert_eq!(a.add(&b)?, b.add(&a)?);
            prop_assert_eq!(a.mul(&b)?, b.mul(&a)?);
            prop_assert_eq!(a.mul(&a)?, a.clone());
        }

        #[test]
        fn metric_axioms((a, b, c) in triple()) {
            prop_assert_eq!(distance(&a, &b)?.is_zero_rank(), a == b);
            prop_assert_eq!(distance(&a, &b)?, distance(&b, &a)?);
            let lhs = distance(&a, &c)?.into_value();
            let rhs = distance(&a, &b)?.into_value() + distance(&b, &c)?.into_value();
            prop_assert!(lhs <= rhs);
            let differing = (0..a.n()).filter(|&i| a.bit(i) != b.bit(i)).count();
            prop_assert_eq!(distance(&a, &b)?, Rank::ratio(differing, a.n()));
        }

        #[test]
        fn cover_reconstructs_inputs_and_ranks((a, b, c) in triple()) {
            let inputs = [a, b, c];
            let cover = orthogonal_cover(&inputs)?;
            prop_assert!(cover.total().is_one());
            for (i, x) in cover.members().iter().enumerate() {
                for y in &cover.members()[i + 1..] {
                    prop_assert!(x.is_orthogonal_to(y)?);
                }
            }
            for x in &inputs {
                let parts = cover.decompose(x)?.expect("input is covered");
                let total: BigRational = parts
                    .iter()
                    .map(|&i| cover.members()[i].rank().into_value())
                    .sum();
                prop_assert_eq!(total, x.rank().into_value());
            }
        }
    }
}
