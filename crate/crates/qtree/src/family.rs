//! Finite descriptions of possibly infinite sets of terms.
//!
//! A [`FamilySet`] holds finitely many concrete terms together with spine
//! families `{ r(j, body) : lo <= j <= hi }`, where `lo` may be unbounded.
//! Subterm closures of R-nodes contain whole descending spines, which is why
//! they need this form.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};

use crate::index::Index;
use crate::term::{Kind, Level, Term};

/// Levels `lo..=hi` of a spine; `lo = None` means unbounded below.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LevelRange {
    pub lo: Option<Level>,
    pub hi: Level,
}

impl LevelRange {
    pub fn contains(&self, j: &Level) -> bool {
        j <= &self.hi && self.lo.as_ref().is_none_or(|lo| lo <= j)
    }

    /// Number of levels, `None` when unbounded.
    pub fn len(&self) -> Option<BigUint> {
        let lo = self.lo.as_ref()?;
        if lo > &self.hi {
            return Some(BigUint::default());
        }
        (&self.hi - lo + BigInt::one()).to_biguint()
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.lo, Some(lo) if lo > &self.hi)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilySet {
    concrete: BTreeSet<Term>,
    spines: BTreeMap<Term, Vec<LevelRange>>,
}

impl FamilySet {
    pub fn new() -> Self {
        FamilySet::default()
    }

    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut s = FamilySet::new();
        for t in terms {
            s.insert(t.clone());
        }
        s
    }

    pub fn concrete(&self) -> &BTreeSet<Term> {
        &self.concrete
    }

    pub fn spines(&self) -> &BTreeMap<Term, Vec<LevelRange>> {
        &self.spines
    }

    /// Inserts a concrete term unless a spine already covers it.
    pub fn insert(&mut self, t: Term) -> bool {
        if self.spine_covers(&t) {
            return false;
        }
        self.concrete.insert(t)
    }

    /// Adds `{ r(j, body) : lo <= j <= hi }`.
    pub fn insert_spine(&mut self, body: Term, range: LevelRange) {
        if range.is_empty() {
            return;
        }
        let ranges = self.spines.entry(body.clone()).or_default();
        ranges.push(range);
        merge_ranges(ranges);
        let ranges = ranges.clone();
        self.concrete.retain(|t| match t.kind() {
            Kind::R { level, body: b } if b == &body => !ranges.iter().any(|r| r.contains(level)),
            _ => true,
        });
    }

    fn spine_covers(&self, t: &Term) -> bool {
        match t.kind() {
            Kind::R { level, body } => self
                .spines
                .get(body)
                .is_some_and(|rs| rs.iter().any(|r| r.contains(level))),
            _ => false,
        }
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.concrete.contains(t) || self.spine_covers(t)
    }

    pub fn union_with(&mut self, other: &FamilySet) {
        for (body, ranges) in &other.spines {
            for r in ranges {
                self.insert_spine(body.clone(), r.clone());
            }
        }
        for t in &other.concrete {
            self.insert(t.clone());
        }
    }

    pub fn is_finite(&self) -> bool {
        self.spines.values().flatten().all(|r| r.lo.is_some())
    }

    /// Number of members, `None` when infinite.
    pub fn len(&self) -> Option<BigUint> {
        let mut total = BigUint::from(self.concrete.len());
        for r in self.spines.values().flatten() {
            total += r.len()?;
        }
        Some(total)
    }

    pub fn is_empty(&self) -> bool {
        self.concrete.is_empty() && self.spines.is_empty()
    }

    /// All members of a finite set, in term order. Returns `None` for an
    /// infinite set or one larger than `limit`.
    pub fn expand(&self, limit: usize) -> Option<Vec<Term>> {
        let mut out: BTreeSet<Term> = self.concrete.clone();
        for (body, ranges) in &self.spines {
            for r in ranges {
                let lo = r.lo.as_ref()?;
                let count = r.len()?.to_usize()?;
                if out.len() + count > limit {
                    return None;
                }
                let mut j = lo.clone();
                while j <= r.hi {
                    out.insert(Term::r(j.clone(), body));
                    j += 1;
                }
            }
        }
        if out.len() > limit {
            return None;
        }
        Some(out.into_iter().collect())
    }

    /// Every leaf index occurring in some member.
    pub fn indices(&self) -> BTreeSet<Index> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        for t in &self.concrete {
            t.collect_indices(&mut out, &mut seen);
        }
        for b in self.spines.keys() {
            b.collect_indices(&mut out, &mut seen);
        }
        out
    }

    /// Members lying in the S-orbit of `v`, concrete ones first. At most one
    /// spine member can share an orbit with `v`.
    pub fn orbit_members(&self, v: &Term) -> Vec<Term> {
        let base = v.base();
        let mut out: Vec<Term> = self
            .concrete
            .iter()
            .filter(|u| u.base() == base)
            .cloned()
            .collect();
        if let Some(u) = self.spine_member_in_orbit(&base) {
            out.push(u);
        }
        out
    }

    /// The spine member whose orbit representative is `base`, if any.
    pub fn spine_member_in_orbit(&self, base: &Term) -> Option<Term> {
        let (body, j) = spine_candidate(base)?;
        let ranges = self.spines.get(&body)?;
        ranges
            .iter()
            .any(|r| r.contains(&j))
            .then(|| Term::r(j, &body))
    }

    /// Orbit-indexed view of the concrete part for repeated queries.
    pub fn orbit_index(&self) -> OrbitIndex<'_> {
        let mut by_base: HashMap<Term, Vec<Term>> = HashMap::new();
        for t in &self.concrete {
            by_base.entry(t.base()).or_default().push(t.clone());
        }
        OrbitIndex { set: self, by_base }
    }
}

/// Precomputed orbit lookup over a [`FamilySet`].
pub struct OrbitIndex<'a> {
    set: &'a FamilySet,
    by_base: HashMap<Term, Vec<Term>>,
}

impl OrbitIndex<'_> {
    pub fn members_with_base(&self, base: &Term) -> Vec<Term> {
        let mut out = self.by_base.get(base).cloned().unwrap_or_default();
        if let Some(u) = self.set.spine_member_in_orbit(base) {
            out.push(u);
        }
        out
    }

    pub fn has_base(&self, base: &Term) -> bool {
        self.by_base.contains_key(base) || self.set.spine_member_in_orbit(base).is_some()
    }
}

/// If `base` (a term with `chi = 0`) is the orbit representative of some
/// `r(j, body)`, returns `(body, j)`.
///
/// The representative of `r(j, b)` is `r(j, b)` itself when `chi(b) = 0`, and
/// `p(r(j-1, b), base(b))` otherwise.
pub fn spine_candidate(base: &Term) -> Option<(Term, Level)> {
    match base.kind() {
        Kind::R { level, body } => Some((body.clone(), level.clone())),
        Kind::Pair(l, y) => match l.kind() {
            Kind::R { level, body } if &body.base() == y => Some((body.clone(), level + 1)),
            _ => None,
        },
        Kind::Leaf { .. } => None,
    }
}

fn merge_ranges(ranges: &mut Vec<LevelRange>) {
    ranges.sort_by(|a, b| {
        let ka = a.lo.as_ref();
        let kb = b.lo.as_ref();
        match (ka, kb) {
            (None, None) => a.hi.cmp(&b.hi),
            (None, Some(_)) => std::cmp::Ordering::Less,
            (Some(_), None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(y).then(a.hi.cmp(&b.hi)),
        }
    });
    let mut merged: Vec<LevelRange> = Vec::with_capacity(ranges.len());
    for r in ranges.drain(..) {
        if let Some(last) = merged.last_mut() {
            let touches = match &r.lo {
                None => true,
                Some(lo) => lo <= &(&last.hi + BigInt::one()),
            };
            if touches {
                if r.hi > last.hi {
                    last.hi = r.hi;
                }
                continue;
            }
        }
        merged.push(r);
    }
    *ranges = merged;
}

impl fmt::Display for FamilySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.concrete.iter().map(|t| t.to_string()).collect();
        for (body, ranges) in &self.spines {
            for r in ranges {
                match &r.lo {
                    None => parts.push(format!("spine({body},{})", r.hi)),
                    Some(lo) => parts.push(format!("spine({body},{},{lo})", r.hi)),
                }
            }
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spine_membership() {
        let a = Term::d(1, 0);
        let mut s = FamilySet::new();
        s.insert(Term::r(5, &a));
        s.insert(Term::r(3, &a));
        s.insert_spine(
            a.clone(),
            LevelRange {
                lo: None,
                hi: BigInt::from(4),
            },
        );
        assert!(s.contains(&Term::r(-100, &a)));
        assert!(s.contains(&Term::r(5, &a)));
        assert!(!s.contains(&Term::r(6, &a)));
        assert_eq!(s.concrete().len(), 1);
        assert_eq!(s.len(), None);
    }

    #[test]
    fn ranges_merge_and_count() {
        let a = Term::d(1, 0);
        let mut s = FamilySet::new();
        let r = |lo: i64, hi: i64| LevelRange {
            lo: Some(BigInt::from(lo)),
            hi: BigInt::from(hi),
        };
        s.insert_spine(a.clone(), r(0, 2));
        s.insert_spine(a.clone(), r(3, 4));
        s.insert_spine(a.clone(), r(9, 10));
        assert_eq!(s.spines()[&a].len(), 2);
        assert_eq!(s.len(), Some(BigUint::from(7u32)));
        assert_eq!(s.expand(100).unwrap().len(), 7);
    }

    #[test]
    fn orbit_lookup_through_spines() {
        let b = Term::d(2, 3);
        let mut s = FamilySet::new();
        s.insert_spine(
            b.clone(),
            LevelRange {
                lo: None,
                hi: BigInt::from(0),
            },
        );
        let member = Term::r(-2, &b);
        let probe = member.shift_by(7);
        assert_eq!(s.orbit_members(&probe), vec![member]);
        assert!(s.orbit_members(&Term::r(1, &b).shift_by(1)).is_empty());
        let c = Term::d(2, 0);
        let mut s2 = FamilySet::new();
        s2.insert_spine(
            c.clone(),
            LevelRange {
                lo: None,
                hi: BigInt::from(0),
            },
        );
        assert_eq!(s2.orbit_members(&Term::r(-1, &c).shift_by(-3)), vec![Term::r(-1, &c)]);
    }
}
