//! The radius schedule `rho_n(k)`.
//!
//! `rho_n(0) = 0` and `rho_n(k+1) = 2(n+2)(rho_n(k)+1) * 2^(rho_n(k)+2)`.
//! Values are exact big integers while they fit in [`EXACT_BITS_LIMIT`] bits.
//! Past that point the value is kept symbolically as [`Rho::Vast`]; such a
//! value has more bits than any integer this crate can hold, so comparisons
//! against materialized integers remain exact.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use parking_lot::Mutex;

/// Largest bit length for which `rho` values are materialized.
pub const EXACT_BITS_LIMIT: u64 = 1 << 20;

/// A value of the schedule, exact when it is small enough to store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rho {
    Exact(BigUint),
    /// `rho_n(k)` with more than [`EXACT_BITS_LIMIT`] bits.
    Vast { n: u32, k: u32 },
}

impl Rho {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Rho::Exact(v) => Some(v),
            Rho::Vast { .. } => None,
        }
    }

    pub fn is_vast(&self) -> bool {
        matches!(self, Rho::Vast { .. })
    }

    /// Whether `v <= self`. Every materialized integer lies below a vast value.
    pub fn ge_nat(&self, v: &BigUint) -> bool {
        match self {
            Rho::Exact(r) => v <= r,
            Rho::Vast { .. } => true,
        }
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho::Exact(v) => write!(f, "{v}"),
            Rho::Vast { n, k } => write!(f, "rho({n},{k})"),
        }
    }
}

/// Memoized values `rho_n(0..)` for one `n`.
#[derive(Clone, Debug)]
pub struct RhoTable {
    n: u32,
    values: Vec<Rho>,
}

impl RhoTable {
    pub fn new(n: u32) -> Self {
        RhoTable {
            n,
            values: vec![Rho::Exact(BigUint::zero())],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&mut self, k: u32) -> Rho {
        while self.values.len() <= k as usize {
            let j = self.values.len() as u32;
            let next = match self.values.last().expect("table is never empty") {
                Rho::Vast { .. } => Rho::Vast { n: self.n, k: j },
                Rho::Exact(prev) => step(self.n, prev, j),
            };
            self.values.push(next);
        }
        self.values[k as usize].clone()
    }
}

fn step(n: u32, prev: &BigUint, j: u32) -> Rho {
    // The result has at least prev + 2 bits.
    let shift = match prev.to_u64() {
        Some(s) if s + 2 <= EXACT_BITS_LIMIT => s + 2,
        _ => return Rho::Vast { n, k: j },
    };
    let coeff = BigUint::from(2u32) * BigUint::from(n as u64 + 2) * (prev + BigUint::one());
    let value = coeff << shift;
    if value.bits() > EXACT_BITS_LIMIT {
        Rho::Vast { n, k: j }
    } else {
        Rho::Exact(value)
    }
}

fn cache() -> &'static Mutex<HashMap<u32, RhoTable>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, RhoTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `rho_n(k)`, memoized process-wide.
pub fn rho(n: u32, k: u32) -> Rho {
    let mut guard = cache().lock();
    guard.entry(n).or_insert_with(|| RhoTable::new(n)).get(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(rho(0, 0), Rho::Exact(BigUint::zero()));
        assert_eq!(rho(0, 1), Rho::Exact(BigUint::from(16u32)));
        assert_eq!(rho(1, 1), Rho::Exact(BigUint::from(24u32)));
        assert_eq!(rho(1, 2), Rho::Exact(BigUint::from(10_066_329_600u64)));
    }

    #[test]
    fn vast_values_are_symbolic() {
        assert!(rho(2, 3).is_vast());
        assert!(rho(0, 3).is_vast());
        assert!(!rho(4, 2).is_vast());
        assert!(rho(2, 4).is_vast());
    }
}
