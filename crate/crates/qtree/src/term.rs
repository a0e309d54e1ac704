//! Tree terms in canonical normal form.
//!
//! A term is a leaf `d(n,m)`, a pair `p(l,r)`, or an R-node `r(m,b)` standing
//! for `R_m(b)`. R-nodes unfold as `R_m(b) = p(R_{m-1}(b), b)`; the normal
//! form folds every such pair back into an R-node. All construction goes
//! through the smart constructors, so every `Term` value is normal and
//! structural equality is equality in the model.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ModelError;
use crate::index::Index;

/// Integer level of a leaf or R-node.
pub type Level = BigInt;

/// Largest arity `n` for which `A_n` is expanded eagerly.
pub const MAX_A_ARITY: u64 = 1 << 16;

/// Immutable shared term node with a cached structural hash.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: Kind,
    hash: u64,
    size: u64,
    height: u32,
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Leaf { index: Index, level: Level },
    R { level: Level, body: Term },
    Pair(Term, Term),
}

/// A term split into the S-orbit representative with `chi = 0` and the shift
/// that recovers the term from it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitKey {
    pub base: Term,
    pub shift: BigInt,
}

impl Term {
    fn from_kind(kind: Kind) -> Term {
        let mut h = DefaultHasher::new();
        let (size, height) = match &kind {
            Kind::Leaf { index, level } => {
                0u8.hash(&mut h);
                index.hash(&mut h);
                level.hash(&mut h);
                (1, 0)
            }
            Kind::R { level, body } => {
                1u8.hash(&mut h);
                level.hash(&mut h);
                h.write_u64(body.0.hash);
                (body.size().saturating_add(1), body.height() + 1)
            }
            Kind::Pair(l, r) => {
                2u8.hash(&mut h);
                h.write_u64(l.0.hash);
                h.write_u64(r.0.hash);
                (
                    l.size().saturating_add(r.size()).saturating_add(1),
                    l.height().max(r.height()) + 1,
                )
            }
        };
        Term(Arc::new(Node {
            kind,
            hash: h.finish(),
            size,
            height,
        }))
    }

    /// The leaf `d(n,m)`.
    pub fn leaf(index: impl Into<Index>, level: impl Into<Level>) -> Term {
        Term::from_kind(Kind::Leaf {
            index: index.into(),
            level: level.into(),
        })
    }

    /// Shorthand for a leaf with small index and level.
    pub fn d(n: u64, m: i64) -> Term {
        Term::leaf(Index::small(n), m)
    }

    /// Normal form of `p(l,r)`: folds to `r(m+1, r)` when `l = r(m, r)`.
    pub fn pair(l: &Term, r: &Term) -> Term {
        if let Kind::R { level, body } = l.kind() {
            if body == r {
                return Term::r(level + 1, r);
            }
        }
        Term::from_kind(Kind::Pair(l.clone(), r.clone()))
    }

    /// `R_m(body)`.
    pub fn r(level: impl Into<Level>, body: &Term) -> Term {
        Term::from_kind(Kind::R {
            level: level.into(),
            body: body.clone(),
        })
    }

    /// `A_n(t)`: `A_1(t) = t`, `A_n(t) = p(A_{n-1}(t), t)`.
    pub fn apply_a(n: u64, t: &Term) -> Result<Term, ModelError> {
        if n == 0 {
            return Err(ModelError::ZeroArity);
        }
        if n > MAX_A_ARITY {
            return Err(ModelError::ArityTooLarge(n.to_string()));
        }
        let mut acc = t.clone();
        for _ in 1..n {
            acc = Term::pair(&acc, t);
        }
        Ok(acc)
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Node count, saturating.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn height(&self) -> u32 {
        self.0.height
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind(), Kind::Leaf { .. })
    }

    /// Whether the term is `d(0,m)` for some `m`.
    pub fn is_zero_leaf(&self) -> bool {
        matches!(self.kind(), Kind::Leaf { index, .. } if index.is_zero())
    }

    /// One-step decomposition. R-nodes unfold to `(R_{m-1}(b), b)`.
    pub fn children(&self) -> Option<(Term, Term)> {
        match self.kind() {
            Kind::Leaf { .. } => None,
            Kind::Pair(l, r) => Some((l.clone(), r.clone())),
            Kind::R { level, body } => Some((Term::r(level - 1, body), body.clone())),
        }
    }

    /// The level of the rightmost leaf.
    pub fn chi(&self) -> Level {
        let mut t = self;
        loop {
            match t.kind() {
                Kind::Leaf { level, .. } => return level.clone(),
                Kind::Pair(_, r) => t = r,
                Kind::R { body, .. } => t = body,
            }
        }
    }

    /// `S^r(t)` for any integer `r`.
    pub fn shift(&self, r: &BigInt) -> Term {
        if r.is_zero() {
            return self.clone();
        }
        match self.kind() {
            Kind::Leaf { index, level } => Term::leaf(index.clone(), level + r),
            Kind::Pair(l, x) => Term::pair(l, &x.shift(r)),
            Kind::R { level, body } => Term::pair(&Term::r(level - 1, body), &body.shift(r)),
        }
    }

    pub fn shift_by(&self, r: i64) -> Term {
        self.shift(&BigInt::from(r))
    }

    pub fn succ(&self) -> Term {
        self.shift(&BigInt::one())
    }

    pub fn pred(&self) -> Term {
        self.shift(&-BigInt::one())
    }

    pub fn orbit_key(&self) -> OrbitKey {
        let shift = self.chi();
        OrbitKey {
            base: self.shift(&-&shift),
            shift,
        }
    }

    /// The orbit representative with `chi = 0`.
    pub fn base(&self) -> Term {
        let c = self.chi();
        self.shift(&-c)
    }

    /// Whether `other = S^r(self)` for some `r`.
    pub fn same_orbit(&self, other: &Term) -> bool {
        self.base() == other.base()
    }

    /// The unique shift of this term that is an R-node: returns `(r, m, x)`
    /// with `S^r(self) = R_m(x)`.
    pub fn r_shift(&self) -> Option<(BigInt, Level, Term)> {
        match self.kind() {
            Kind::Leaf { .. } => None,
            Kind::R { level, body } => Some((BigInt::zero(), level.clone(), body.clone())),
            Kind::Pair(l, y) => match l.kind() {
                Kind::R { level, body } if body.same_orbit(y) => {
                    Some((body.chi() - y.chi(), level + 1, body.clone()))
                }
                _ => None,
            },
        }
    }

    /// The unique shift of this term that is an `A_n`-image with `n >= 2`:
    /// returns `(r, n, x)` with `S^r(self) = A_n(x)`.
    pub fn a_shift(&self) -> Option<(BigInt, u64, Term)> {
        let Kind::Pair(l, y) = self.kind() else {
            return None;
        };
        if let Kind::Pair(inner, x) = l.kind() {
            if x.same_orbit(y) {
                // l = A_j(x) iff peeling right components equal to x ends at x.
                let mut cur = inner.clone();
                let mut j = 2u64;
                loop {
                    if &cur == x {
                        return Some((x.chi() - y.chi(), j + 1, x.clone()));
                    }
                    match cur.kind() {
                        Kind::Pair(c, x2) if x2 == x => {
                            cur = c.clone();
                            j += 1;
                        }
                        _ => break,
                    }
                }
            }
        }
        if l.same_orbit(y) {
            return Some((l.chi() - y.chi(), 2, l.clone()));
        }
        None
    }

    /// Whether `self = A_n(x)`, decided without expanding `A_n`.
    pub fn is_a_image(&self, n: &BigInt, x: &Term) -> bool {
        if !n.is_positive() {
            return false;
        }
        let mut cur = self.clone();
        let mut remaining = n.clone();
        loop {
            if remaining.is_one() {
                return &cur == x;
            }
            match cur.kind() {
                Kind::Pair(l, r) if r == x => {
                    let next = l.clone();
                    cur = next;
                    remaining -= 1;
                }
                _ => return false,
            }
        }
    }

    /// All leaf indices occurring in the term.
    pub fn indices(&self) -> BTreeSet<Index> {
        let mut out = BTreeSet::new();
        self.collect_indices(&mut out, &mut HashSet::new());
        out
    }

    pub(crate) fn collect_indices(&self, out: &mut BTreeSet<Index>, seen: &mut HashSet<usize>) {
        if !seen.insert(Arc::as_ptr(&self.0) as usize) {
            return;
        }
        match self.kind() {
            Kind::Leaf { index, .. } => {
                out.insert(index.clone());
            }
            Kind::R { body, .. } => body.collect_indices(out, seen),
            Kind::Pair(l, r) => {
                l.collect_indices(out, seen);
                r.collect_indices(out, seen);
            }
        }
    }

    /// Whether some leaf of the term has index `i`.
    pub fn mentions_index(&self, i: &Index) -> bool {
        match self.kind() {
            Kind::Leaf { index, .. } => index == i,
            Kind::R { body, .. } => body.mentions_index(i),
            Kind::Pair(l, r) => l.mentions_index(i) || r.mentions_index(i),
        }
    }

    /// Applies `f` to every leaf index, rebuilding through the constructors.
    pub fn map_indices(&self, f: &mut impl FnMut(&Index) -> Index) -> Term {
        match self.kind() {
            Kind::Leaf { index, level } => Term::leaf(f(index), level.clone()),
            Kind::R { level, body } => Term::r(level.clone(), &body.map_indices(f)),
            Kind::Pair(l, r) => Term::pair(&l.map_indices(f), &r.map_indices(f)),
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.ptr_eq(other)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Smaller terms first, then structurally.
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.0
            .size
            .cmp(&other.0.size)
            .then_with(|| self.0.kind.cmp(&other.0.kind))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Leaf { index, level } => write!(f, "d({index},{level})"),
            Kind::R { level, body } => write!(f, "r({level},{body})"),
            Kind::Pair(l, r) => write!(f, "p({l},{r})"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An unnormalized term tree, as written by a user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Leaf(Index, Level),
    Pair(Box<RawTerm>, Box<RawTerm>),
    R(Level, Box<RawTerm>),
}

impl RawTerm {
    pub fn normalize(&self) -> Term {
        match self {
            RawTerm::Leaf(n, m) => Term::leaf(n.clone(), m.clone()),
            RawTerm::Pair(l, r) => Term::pair(&l.normalize(), &r.normalize()),
            RawTerm::R(m, b) => Term::r(m.clone(), &b.normalize()),
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            RawTerm::Leaf(..) => 1,
            RawTerm::Pair(l, r) => 1 + l.size() + r.size(),
            RawTerm::R(_, b) => 1 + b.size(),
        }
    }
}

impl Term {
    pub fn to_raw(&self) -> RawTerm {
        match self.kind() {
            Kind::Leaf { index, level } => RawTerm::Leaf(index.clone(), level.clone()),
            Kind::Pair(l, r) => RawTerm::Pair(Box::new(l.to_raw()), Box::new(r.to_raw())),
            Kind::R { level, body } => RawTerm::R(level.clone(), Box::new(body.to_raw())),
        }
    }
}
