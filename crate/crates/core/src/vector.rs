//! Points of ℕ^k with arbitrary-precision entries.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point of ℕ^k. Entries are unbounded naturals; ordering is
/// lexicographic entry by entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NatVector(Vec<BigUint>);

impl NatVector {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(NatVector(entries))
    }

    pub fn zero(dim: usize) -> Self {
        NatVector(vec![BigUint::zero(); dim])
    }

    /// The unit vector e_i (zero-based index).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = BigUint::from(1u8);
        v
    }

    pub fn from_u64s(entries: &[u64]) -> Self {
        assert!(!entries.is_empty(), "a vector needs at least one entry");
        NatVector(entries.iter().map(|&e| BigUint::from(e)).collect())
    }

    /// Converts signed entries, rejecting negatives.
    pub fn from_bigints(entries: &[BigInt]) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            match e.to_biguint() {
                Some(u) => out.push(u),
                None => return Err(Error::NegativeEntry(e.to_string())),
            }
        }
        Self::new(out)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigUint> {
        self.0
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.0
            .iter()
            .map(|e| BigInt::from_biguint(Sign::Plus, e.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Maximum norm.
    pub fn norm(&self) -> BigUint {
        self.0.iter().max().cloned().unwrap_or_default()
    }

    /// Largest bit length among the entries.
    pub fn max_bits(&self) -> u64 {
        self.0.iter().map(BigUint::bits).max().unwrap_or(0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &NatVector) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &NatVector) -> NatVector {
        debug_assert_eq!(self.dim(), other.dim());
        NatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: &BigUint) -> NatVector {
        NatVector(self.0.iter().map(|a| a * factor).collect())
    }

    /// `self - other` if `other <= self` componentwise.
    pub fn checked_sub(&self, other: &NatVector) -> Option<NatVector> {
        if !other.le(self) {
            return None;
        }
        Some(NatVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Small entries as machine words, if every entry fits.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.0.iter().map(ToPrimitive::to_u64).collect()
    }
}

impl fmt::Display for NatVector {
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

/// Maximum norm of a collection of vectors; zero when empty.
pub fn set_norm<'a>(vs: impl IntoIterator<Item = &'a NatVector>) -> BigUint {
    vs.into_iter()
        .map(NatVector::norm)
        .max()
        .unwrap_or_default()
}
