//! Subterm closures `V_k`, their shift closures `W_k`, the order `≺`, and
//! the windowed constructor closure `Cl_n`.
//!
//! `W_k(X)` is all S-shifts of `V_k(X)`. It is never materialized: membership
//! goes through orbit representatives, and R-spines are matched by pattern.

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::ModelError;
use crate::family::{FamilySet, LevelRange};
use crate::rho::Rho;
use crate::term::{Kind, Term};

/// Default bound on explicit closure depths.
pub const DEFAULT_GUARD: u64 = 64;

/// Closure depth. `Unbounded` gives `V(X)`; it also stands for a vast
/// schedule value, which exceeds every depth a stored term can realize.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Radius {
    Finite(BigUint),
    Unbounded,
}

impl Radius {
    pub fn finite(k: u64) -> Radius {
        Radius::Finite(BigUint::from(k))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Radius::Finite(k) if k.is_zero())
    }

    fn dec(&self) -> Radius {
        match self {
            Radius::Finite(k) => Radius::Finite(k - 1u32),
            Radius::Unbounded => Radius::Unbounded,
        }
    }
}

impl From<Rho> for Radius {
    fn from(r: Rho) -> Radius {
        match r {
            Rho::Exact(v) => Radius::Finite(v),
            Rho::Vast { .. } => Radius::Unbounded,
        }
    }
}

impl std::fmt::Display for Radius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Radius::Finite(k) => write!(f, "{k}"),
            Radius::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// `V_k(X)` for any radius, with R-spines kept symbolic.
pub fn v_closure<'a>(xs: impl IntoIterator<Item = &'a Term>, radius: &Radius) -> FamilySet {
    let mut out = FamilySet::new();
    let mut best: HashMap<Term, Radius> = HashMap::new();
    let mut stack: Vec<(Term, Radius)> = xs.into_iter().map(|x| (x.clone(), radius.clone())).collect();
    while let Some((t, rem)) = stack.pop() {
        if best.get(&t).is_some_and(|b| b >= &rem) {
            continue;
        }
        best.insert(t.clone(), rem.clone());
        out.insert(t.clone());
        if rem.is_zero() {
            continue;
        }
        let next = rem.dec();
        match t.kind() {
            Kind::Leaf { .. } => {}
            Kind::Pair(l, r) => {
                stack.push((l.clone(), next.clone()));
                stack.push((r.clone(), next));
            }
            Kind::R { level, body } => {
                let lo = match &rem {
                    Radius::Finite(k) => Some(level - BigInt::from(k.clone())),
                    Radius::Unbounded => None,
                };
                out.insert_spine(
                    body.clone(),
                    LevelRange {
                        lo,
                        hi: level - 1,
                    },
                );
                stack.push((body.clone(), next));
            }
        }
    }
    out
}

/// `V_k({t})`, or `V({t})` when `depth` is `None`.
pub fn subterm_closure(t: &Term, depth: Option<u64>) -> FamilySet {
    let radius = depth.map_or(Radius::Unbounded, Radius::finite);
    v_closure([t], &radius)
}

/// `V_k(X)` with an explicit depth bound.
pub fn v_set(xs: &[Term], k: u64, guard: u64) -> Result<FamilySet, ModelError> {
    if k > guard {
        return Err(ModelError::GuardExceeded {
            requested: k,
            guard,
        });
    }
    Ok(v_closure(xs, &Radius::finite(k)))
}

/// A witness `(u, r)` with `u ∈ V_k(X)` and `S^r(u) = v`, if `v ∈ W_k(X)`.
pub fn w_member(
    v: &Term,
    xs: &[Term],
    k: u64,
    guard: u64,
) -> Result<Option<(Term, BigInt)>, ModelError> {
    let set = v_set(xs, k, guard)?;
    Ok(set
        .orbit_members(v)
        .into_iter()
        .next()
        .map(|u| {
            let r = v.chi() - u.chi();
            (u, r)
        }))
}

/// `v ≺ w`: some shift of `v` lies in `V(w)` and differs from `w`.
pub fn prec(v: &Term, w: &Term) -> bool {
    subterm_closure(w, None)
        .orbit_members(v)
        .iter()
        .any(|u| u != w)
}

/// Generator window for `Cl_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Window {
    pub r_levels: Vec<BigInt>,
    pub a_arities: Vec<u64>,
}

impl Window {
    pub fn new(r_levels: impl IntoIterator<Item = i64>, a_arities: impl IntoIterator<Item = u64>) -> Self {
        Window {
            r_levels: r_levels.into_iter().map(BigInt::from).collect(),
            a_arities: a_arities.into_iter().collect(),
        }
    }
}

/// `Cl_n(Y)` restricted to the window, materialized. Fails once the set
/// exceeds `limit` elements.
pub fn cl_set(ys: &[Term], n: u64, window: &Window, limit: usize) -> Result<FamilySet, ModelError> {
    let mut current: BTreeSet<Term> = ys.iter().cloned().collect();
    for _ in 0..n {
        let stage: Vec<Term> = current.iter().cloned().collect();
        let mut next = current.clone();
        for u in &stage {
            for v in &stage {
                next.insert(Term::pair(u, v));
                if next.len() > limit {
                    return Err(ModelError::SizeExceeded(limit));
                }
            }
            for m in &window.r_levels {
                next.insert(Term::r(m.clone(), u));
            }
            for &a in &window.a_arities {
                if a >= 2 {
                    next.insert(Term::apply_a(a, u)?);
                }
            }
            if next.len() > limit {
                return Err(ModelError::SizeExceeded(limit));
            }
        }
        current = next;
    }
    Ok(FamilySet::from_terms(current.iter()))
}

/// Length of the longest strictly `≺`-increasing chain in `W_k(X)`, together
/// with `|V_k(X)|`. Since `≺` depends only on the orbits of its arguments,
/// chains are searched on the orbits of `V_k(X)`. Returns `None` for the
/// chain length if a cycle is found.
pub fn longest_prec_chain(xs: &[Term], k: u64, guard: u64) -> Result<(Option<usize>, usize), ModelError> {
    let set = v_set(xs, k, guard)?;
    let members = set
        .expand(1 << 16)
        .ok_or(ModelError::SizeExceeded(1 << 16))?;
    let mut reps: Vec<Term> = Vec::new();
    let mut seen = BTreeSet::new();
    for m in &members {
        if seen.insert(m.base()) {
            reps.push(m.clone());
        }
    }
    let n = reps.len();
    let mut edges = vec![Vec::new(); n];
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate() {
            if prec(a, b) {
                edges[i].push(j);
            }
        }
    }
    // Longest path by depth-first search with cycle detection.
    let mut state = vec![0u8; n];
    let mut longest = vec![0usize; n];
    fn visit(i: usize, edges: &[Vec<usize>], state: &mut [u8], longest: &mut [usize]) -> bool {
        if state[i] == 2 {
            return true;
        }
        if state[i] == 1 {
            return false;
        }
        state[i] = 1;
        let mut best = 0;
        for &j in &edges[i] {
            if !visit(j, edges, state, longest) {
                return false;
            }
            best = best.max(longest[j] + 1);
        }
        longest[i] = best;
        state[i] = 2;
        true
    }
    for i in 0..n {
        if !visit(i, &edges, &mut state, &mut longest) {
            return Ok((None, members.len()));
        }
    }
    Ok((longest.iter().copied().max(), members.len()))
}

/// `|X| * (2^(k+2) - 1)`.
pub fn closure_size_bound(x_len: usize, k: &BigUint) -> Option<BigUint> {
    let shift = k.to_u64()?.checked_add(2)?;
    if shift > crate::rho::EXACT_BITS_LIMIT {
        return None;
    }
    Some(BigUint::from(x_len) * ((BigUint::one() << shift) - 1u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Term {
        Term::d(1, 0)
    }
    fn v() -> Term {
        Term::d(2, 3)
    }

    #[test]
    fn v_set_examples() {
        let leaf = u();
        let s = v_set(&[leaf.clone()], 5, DEFAULT_GUARD).unwrap();
        assert_eq!(s.expand(10).unwrap(), vec![leaf]);

        let p = Term::pair(&u(), &v());
        let s = v_set(&[p.clone()], 1, DEFAULT_GUARD).unwrap();
        let got: BTreeSet<Term> = s.expand(10).unwrap().into_iter().collect();
        assert_eq!(got, [p, u(), v()].into_iter().collect());

        let a = u();
        let s = v_set(&[Term::r(2, &a)], 2, DEFAULT_GUARD).unwrap();
        let got: BTreeSet<Term> = s.expand(10).unwrap().into_iter().collect();
        let want: BTreeSet<Term> = [Term::r(2, &a), a.clone(), Term::r(1, &a), Term::r(0, &a)]
            .into_iter()
            .collect();
        assert_eq!(got, want);
        assert!(!s.contains(&Term::r(-1, &a)));

        assert!(matches!(
            v_set(&[u()], 65, DEFAULT_GUARD),
            Err(ModelError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn unbounded_closure_of_r_node() {
        let a = Term::pair(&u(), &v());
        let s = subterm_closure(&Term::r(5, &a), None);
        assert!(s.concrete().contains(&Term::r(5, &a)));
        assert!(s.concrete().contains(&a));
        assert!(s.concrete().contains(&u()));
        let spine = &s.spines()[&a];
        assert_eq!(spine.len(), 1);
        assert_eq!(spine[0].hi, BigInt::from(4));
        assert_eq!(spine[0].lo, None);
        assert_eq!(s.to_string().matches("spine(").count(), 1);
    }

    #[test]
    fn w_member_examples() {
        let w = Term::pair(&u(), &v());
        assert_eq!(
            w_member(&w.succ(), &[w.clone()], 0, DEFAULT_GUARD).unwrap(),
            Some((w.clone(), BigInt::one()))
        );
        assert_eq!(
            w_member(&Term::pair(&w, &w), &[w.clone()], 0, DEFAULT_GUARD).unwrap(),
            None
        );
        let a = u();
        let b = v();
        assert_eq!(
            w_member(&a.pred(), &[Term::pair(&a, &b)], 1, DEFAULT_GUARD).unwrap(),
            Some((a, BigInt::from(-1)))
        );
    }

    #[test]
    fn prec_examples() {
        let w = Term::pair(&u(), &v());
        assert!(prec(&u(), &w));
        assert!(!prec(&w, &w));
        assert!(!prec(&w, &w.succ()));
        let a = u();
        assert!(prec(&Term::r(3, &a), &Term::r(5, &a)));
        assert!(!prec(&Term::r(5, &a), &Term::r(3, &a)));
    }

    #[test]
    fn cl_set_examples() {
        let w = u();
        let win = Window::new([0], [2]);
        let s = cl_set(&[w.clone()], 1, &win, 1000).unwrap();
        let got: BTreeSet<Term> = s.expand(10).unwrap().into_iter().collect();
        let want: BTreeSet<Term> = [w.clone(), Term::pair(&w, &w), Term::r(0, &w)].into_iter().collect();
        assert_eq!(got, want);
        let s2 = cl_set(&[w.clone()], 2, &win, 1000).unwrap();
        assert!(s2.contains(&Term::pair(&w, &Term::r(0, &w))));
        assert_eq!(cl_set(&[w.clone()], 0, &win, 10).unwrap().expand(10).unwrap(), vec![w]);
    }

    #[test]
    fn chain_bound_small() {
        let a = u();
        let x = [Term::pair(&Term::r(1, &a), &v())];
        let (len, n) = longest_prec_chain(&x, 3, DEFAULT_GUARD).unwrap();
        assert!(len.unwrap() < n);
    }
}
