//! Exact integer and rational linear algebra over the character lattice Zⁿ.
//!
//! Everything here uses arbitrary-precision integers. Column reductions can
//! blow up intermediate entries even for tiny inputs, so no fixed-width path
//! exists.

mod halfspace;
mod hermite;

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

pub use halfspace::{rational_halfspace_feasible, FunctionalConstraintSystem, Relation};
pub use hermite::{hermite_basis, integer_affine_solutions, IntegerAffineSolution};

use crate::error::{Error, Result};

/// An element of the character lattice Zⁿ.
///
/// Ordering is lexicographic on the entries, which is the canonical order
/// used for weight sets and every report.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        LatticeVector(entries)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); rank])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        LatticeVector(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &LatticeVector) -> BigInt {
        debug_assert_eq!(self.rank(), other.rank());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, factor: &BigInt) -> LatticeVector {
        LatticeVector(self.0.iter().map(|e| e * factor).collect())
    }

    /// Largest absolute entry; zero for the empty vector.
    pub fn max_abs(&self) -> BigInt {
        self.0.iter().map(|e| e.abs()).max().unwrap_or_default()
    }

    /// gcd of the entries (zero for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, e| g.gcd(e))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Entries as `i64` when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl<const N: usize> From<[i64; N]> for LatticeVector {
    fn from(entries: [i64; N]) -> Self {
        LatticeVector::from_i64s(&entries)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;

    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;

    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;

    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|e| -e).collect())
    }
}

impl FromStr for LatticeVector {
    type Err = Error;

    /// Parses `"1,-1"` (optionally wrapped in parentheses).
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = trimmed
            .split(',')
            .map(|part| {
                part.trim().parse::<BigInt>().map_err(|_| {
                    Error::Input(format!(
                        "cannot parse integer {:?} in vector {:?}",
                        part.trim(),
                        s
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeVector(entries))
    }
}

/// Parses a `;`-separated list such as `"1,0;0,1;-1,-1"`. Blank input gives
/// the empty list.
pub fn parse_vector_list(s: &str) -> Result<Vec<LatticeVector>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(str::parse).collect()
}

/// Exact value of a JSON numeric literal, if it is an integer.
///
/// Accepts decimal and exponent forms as long as the value is integral, so
/// `2`, `2.0` and `2e1` pass while `1.5` and `1e-1` do not.
pub fn integral_value(literal: &str) -> Option<BigInt> {
    let (mantissa, exponent) = match literal.find(['e', 'E']) {
        Some(pos) => (&literal[..pos], literal[pos + 1..].parse::<i64>().ok()?),
        None => (literal, 0),
    };
    if exponent.abs() > 1000 {
        return None;
    }
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let numerator: BigInt = digits.parse().ok()?;
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        BigRational::from_integer(numerator * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numerator, num_traits::pow(ten, (-shift) as usize))
    };
    value.is_integer().then(|| value.to_integer())
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for e in &self.0 {
            let number: serde_json::Number =
                e.to_string().parse().map_err(serde::ser::Error::custom)?;
            seq.serialize_element(&number)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct VectorVisitor;

        impl<'de> Visitor<'de> for VectorVisitor {
            type Value = LatticeVector;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of integers")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<LatticeVector, A::Error> {
                let mut entries = Vec::new();
                while let Some(number) = seq.next_element::<serde_json::Number>()? {
                    let literal = number.to_string();
                    let value = integral_value(&literal).ok_or_else(|| {
                        de::Error::custom(format!("non-integral numeric {literal}"))
                    })?;
                    entries.push(value);
                }
                Ok(LatticeVector(entries))
            }
        }

        deserializer.deserialize_seq(VectorVisitor)
    }
}
