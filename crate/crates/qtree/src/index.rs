//! Leaf indices.
//!
//! An index is a natural number. Indices just above a vast `rho_n(k)` cannot
//! be written out, so they are kept as `rho(n,k)+offset`. The representation
//! is canonical: the symbolic form is used only when `rho_n(k)` is vast.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::ModelError;
use crate::rho::{rho, Rho, EXACT_BITS_LIMIT};

/// Largest `n` accepted in a symbolic index. Below this bound the order of
/// vast schedule values is lexicographic in `(k, n)`.
pub const MAX_SYMBOLIC_N: u32 = u16::MAX as u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Nat(BigUint),
    /// `rho_n(k) + offset` with `rho_n(k)` vast. Field order gives the
    /// numeric order.
    PastRho { k: u32, n: u32, offset: u64 },
}

impl Index {
    pub fn nat(v: impl Into<BigUint>) -> Result<Index, ModelError> {
        let v = v.into();
        if v.bits() > EXACT_BITS_LIMIT {
            return Err(ModelError::IndexTooLarge);
        }
        Ok(Index::Nat(v))
    }

    pub fn small(v: u64) -> Index {
        Index::Nat(BigUint::from(v))
    }

    /// `rho_n(k) + offset`, exact when the schedule value is exact.
    pub fn past_rho(n: u32, k: u32, offset: u64) -> Result<Index, ModelError> {
        match rho(n, k) {
            Rho::Exact(r) => Index::nat(r + BigUint::from(offset)),
            Rho::Vast { .. } => {
                if n > MAX_SYMBOLIC_N {
                    return Err(ModelError::IndexTooLarge);
                }
                Ok(Index::PastRho { k, n, offset })
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Index::Nat(v) if v.is_zero())
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Index::Nat(v) => v.to_u64(),
            Index::PastRho { .. } => None,
        }
    }

    /// Whether `1 <= self <= bound`.
    pub fn in_range_one_to(&self, bound: &Rho) -> bool {
        match (self, bound) {
            (Index::Nat(v), _) => !v.is_zero() && bound.ge_nat(v),
            (Index::PastRho { .. }, Rho::Exact(_)) => false,
            (Index::PastRho { k, n, offset }, Rho::Vast { n: bn, k: bk }) => {
                // Equal schedule values only when (n, k) agree.
                (*k, *n) < (*bk, *bn) || ((*k, *n) == (*bk, *bn) && *offset == 0)
            }
        }
    }
}

impl From<u64> for Index {
    fn from(v: u64) -> Index {
        Index::small(v)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Nat(v) => write!(f, "{v}"),
            Index::PastRho { k, n, offset } => write!(f, "rho({n},{k})+{offset}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_schedule_values_collapse_to_naturals() {
        assert_eq!(
            Index::past_rho(1, 2, 1).unwrap(),
            Index::small(10_066_329_601)
        );
        assert_eq!(Index::past_rho(0, 1, 1).unwrap(), Index::small(17));
    }

    #[test]
    fn symbolic_order() {
        let a = Index::past_rho(2, 3, 1).unwrap();
        let b = Index::past_rho(2, 3, 2).unwrap();
        let c = Index::past_rho(3, 3, 1).unwrap();
        let d = Index::past_rho(2, 4, 1).unwrap();
        assert!(Index::small(u64::MAX) < a);
        assert!(a < b && b < c && c < d);
        assert!(matches!(a, Index::PastRho { .. }));
    }

    #[test]
    fn range_checks() {
        let bound = rho(2, 3);
        assert!(Index::small(1).in_range_one_to(&bound));
        assert!(!Index::small(0).in_range_one_to(&bound));
        assert!(!Index::past_rho(2, 3, 1).unwrap().in_range_one_to(&bound));
        assert!(Index::past_rho(2, 3, 0).unwrap().in_range_one_to(&bound));
        let small = rho(0, 1);
        assert!(Index::small(16).in_range_one_to(&small));
        assert!(!Index::small(17).in_range_one_to(&small));
    }
}
