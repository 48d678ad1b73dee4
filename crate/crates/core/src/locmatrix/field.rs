use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Exact scalar fields usable as matrix entries.
pub trait Field: Clone + Eq + Hash + Debug + Display + Send + Sync + 'static {
    const TAG: FieldTag;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;

    /// Number of elements, `None` for an infinite field.
    fn order() -> Option<u64>;

    /// The `i`-th element of a finite field, in the enumeration order
    /// `0, 1, …, q − 1`.
    fn from_index(i: u64) -> Self;

    /// Position in the enumeration order; only meaningful for finite fields.
    fn index(&self) -> u64;

    /// Uniform over a finite field; an integer in `[-2, 2]` otherwise.
    fn random_small<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Gf2,
    Gf3,
    Gf5,
    Q,
}

impl FieldTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Gf2 => "gf2",
            FieldTag::Gf3 => "gf3",
            FieldTag::Gf5 => "gf5",
            FieldTag::Q => "q",
        }
    }
}

impl Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gf2" => Ok(FieldTag::Gf2),
            "gf3" => Ok(FieldTag::Gf3),
            "gf5" => Ok(FieldTag::Gf5),
            "q" => Ok(FieldTag::Q),
            other => Err(format!("unknown field {other:?}; expected gf2, gf3, gf5 or q")),
        }
    }
}

const fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field `Z/PZ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Gf<const P: u32>(u32);

pub type Gf2 = Gf<2>;
pub type Gf3 = Gf<3>;
pub type Gf5 = Gf<5>;

impl<const P: u32> Gf<P> {
    const PRIME: () = assert!(is_prime(P), "Gf<P> needs P prime");

    pub fn new(v: u32) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::PRIME;
        Gf(v % P)
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl<const P: u32> Display for Gf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! gf_tag {
    ($p:literal, $tag:expr) => {
        impl Field for Gf<$p> {
            const TAG: FieldTag = $tag;

            fn zero() -> Self {
                Gf(0)
            }
            fn one() -> Self {
                Gf(1)
            }
            fn from_i64(v: i64) -> Self {
                Gf(v.rem_euclid($p) as u32)
            }
            fn add(&self, o: &Self) -> Self {
                Gf((self.0 + o.0) % $p)
            }
            fn sub(&self, o: &Self) -> Self {
                Gf((self.0 + $p - o.0) % $p)
            }
            fn mul(&self, o: &Self) -> Self {
                Gf((self.0 * o.0) % $p)
            }
            fn neg(&self) -> Self {
                Gf(($p - self.0) % $p)
            }
            fn inv(&self) -> Option<Self> {
                // Fermat: a^(p-2)
                if self.0 == 0 {
                    return None;
                }
                let mut acc = 1u32;
                for _ in 0..$p - 2 {
                    acc = acc * self.0 % $p;
                }
                Some(Gf(acc))
            }
            fn is_zero(&self) -> bool {
                self.0 == 0
            }
            fn order() -> Option<u64> {
                Some($p)
            }
            fn from_index(i: u64) -> Self {
                Gf((i % $p) as u32)
            }
            fn index(&self) -> u64 {
                u64::from(self.0)
            }
            fn random_small<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Gf(rng.gen_range(0..$p))
            }
            fn to_json(&self) -> Value {
                Value::from(self.0)
            }
            fn from_json(v: &Value) -> Result<Self, String> {
                match v {
                    Value::Number(n) => n
                        .as_i64()
                        .map(Self::from_i64)
                        .ok_or_else(|| format!("entry {n} is not an integer")),
                    Value::String(s) => s
                        .trim()
                        .parse::<i64>()
                        .map(Self::from_i64)
                        .map_err(|_| format!("entry {s:?} is not an integer")),
                    other => Err(format!("entry {other} is not a number")),
                }
            }
        }
    };
}

gf_tag!(2, FieldTag::Gf2);
gf_tag!(3, FieldTag::Gf3);
gf_tag!(5, FieldTag::Gf5);

/// The rationals, with arbitrary-precision numerators and denominators.
/// Every operation returns a reduced fraction.
pub type Q = BigRational;

impl Field for BigRational {
    const TAG: FieldTag = FieldTag::Q;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn order() -> Option<u64> {
        None
    }
    fn from_index(i: u64) -> Self {
        BigRational::from_integer(BigInt::from(i))
    }
    fn index(&self) -> u64 {
        0
    }
    fn random_small<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_i64(rng.gen_range(-2..=2))
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(Self::from_i64)
                .ok_or_else(|| format!("entry {n} is not an integer; write fractions as \"p/q\"")),
            Value::String(s) => parse_rational(s),
            other => Err(format!("entry {other} is not a rational")),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("malformed rational {s:?}");
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() || den.is_negative() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}
