//! Good maps on S-orbits, embedding checks, and the two extension procedures.
//!
//! A [`GoodMap`] stores one entry per orbit, keyed by the orbit
//! representative with `chi = 0`, and is extended to the whole orbit by
//! `F(S^r t) = S^r F(t)`. R-families are closed implicitly: when `x` is
//! mapped and the orbit of `R_m(x)` has no entry of its own, that orbit maps
//! to the orbit of `R_m(F x)`. This keeps the infinite descending spines of
//! unbounded closures finite in storage.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closure::{v_closure, Radius, Window};
use crate::error::ModelError;
use crate::family::FamilySet;
use crate::index::Index;
use crate::parse::parse_term;
use crate::term::{Kind, Term};

/// How an entry was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Via {
    /// Identity on the closure of the anchor.
    Initial,
    /// The distinguished pair `a0 -> b0`.
    Parameter,
    Pair,
    AImage,
    ZeroLeaf,
    Fresh,
    /// Supplied directly by a caller.
    Given,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub image: Term,
    pub via: Via,
}

/// A finite map on orbit representatives.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoodMap {
    entries: BTreeMap<Term, Entry>,
    inverse: BTreeMap<Term, Term>,
    used: BTreeSet<Index>,
}

impl GoodMap {
    pub fn new() -> Self {
        GoodMap::default()
    }

    /// Records `t -> image` for the whole orbit of `t`. Fails if the orbit
    /// already has a different image.
    pub fn insert(&mut self, t: &Term, image: &Term, via: Via) -> Result<(), ModelError> {
        let c = t.chi();
        let key = t.shift(&-&c);
        let img = image.shift(&-&c);
        if let Some(old) = self.entries.get(&key) {
            if old.image == img {
                return Ok(());
            }
            return Err(ModelError::State(format!(
                "orbit of {key} is already mapped to {}",
                old.image
            )));
        }
        let mut seen = std::collections::HashSet::new();
        key.collect_indices(&mut self.used, &mut seen);
        img.collect_indices(&mut self.used, &mut seen);
        self.inverse.entry(img.clone()).or_insert_with(|| key.clone());
        self.entries.insert(key, Entry { image: img, via });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<Term, Entry> {
        &self.entries
    }

    /// Leaf indices occurring in the domain or range.
    pub fn used_indices(&self) -> &BTreeSet<Index> {
        &self.used
    }

    /// `F(t)`, or `None` if the orbit of `t` is not mapped.
    pub fn lookup(&self, t: &Term) -> Option<Term> {
        resolve(t, &|b| self.entries.get(b).map(|e| e.image.clone()))
    }

    /// `F^{-1}(t)`, or `None` if the orbit of `t` is not in the range.
    pub fn preimage(&self, t: &Term) -> Option<Term> {
        resolve(t, &|b| self.inverse.get(b).cloned())
    }

    pub fn inverse(&self) -> GoodMap {
        let mut out = GoodMap::new();
        for (k, e) in &self.entries {
            out.entries.entry(e.image.clone()).or_insert(Entry {
                image: k.clone(),
                via: e.via,
            });
            out.inverse.entry(k.clone()).or_insert_with(|| e.image.clone());
        }
        out.used = self.used.clone();
        out
    }
}

fn resolve(t: &Term, get: &impl Fn(&Term) -> Option<Term>) -> Option<Term> {
    let c = t.chi();
    let base = t.shift(&-&c);
    let image = match get(&base) {
        Some(img) => img,
        None => {
            let (r, m, x) = base.r_shift()?;
            let fx = resolve(&x, get)?;
            Term::r(m, &fx).shift(&-r)
        }
    };
    Some(image.shift(&c))
}

/// One map entry in text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub base: String,
    pub image: String,
    pub via: Via,
}

impl Serialize for GoodMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<MapEntry> = self
            .entries
            .iter()
            .map(|(k, e)| MapEntry {
                base: k.to_string(),
                image: e.image.to_string(),
                via: e.via,
            })
            .collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GoodMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<GoodMap, D::Error> {
        let list = Vec::<MapEntry>::deserialize(d)?;
        let mut map = GoodMap::new();
        for e in list {
            let base = parse_term(&e.base).map_err(serde::de::Error::custom)?;
            let image = parse_term(&e.image).map_err(serde::de::Error::custom)?;
            map.insert(&base, &image, e.via)
                .map_err(serde::de::Error::custom)?;
        }
        Ok(map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl Report {
    fn from_violations(violations: Vec<Violation>) -> Report {
        Report {
            ok: violations.is_empty(),
            violations,
        }
    }

    /// Concatenates two reports.
    pub fn and(mut self, other: Report) -> Report {
        self.violations.extend(other.violations);
        self.ok = self.violations.is_empty();
        self
    }
}

fn violation(clause: &str, witness: String) -> Violation {
    Violation {
        clause: clause.to_string(),
        witness,
    }
}

/// Checks the Good clauses, key normalization and injectivity on orbits.
pub fn verify_good(f: &GoodMap) -> Report {
    let mut out = Vec::new();
    for (k, e) in &f.entries {
        let zero_k = k.is_zero_leaf();
        let zero_i = e.image.is_zero_leaf();
        if (zero_k || zero_i) && k != &e.image {
            out.push(violation("good-1", format!("{k} -> {}", e.image)));
        }
        if e.image.chi() != BigInt::default() {
            out.push(violation(
                "good-2",
                format!("{k} -> {}: chi 0 != {}", e.image, e.image.chi()),
            ));
        }
        if k.chi() != BigInt::default() {
            out.push(violation("key", format!("{k} is not an orbit base")));
        }
        if f.inverse.get(&e.image) != Some(k) {
            out.push(violation("injective", format!("{k} -> {}", e.image)));
        }
    }
    Report::from_violations(out)
}

/// Which relation symbols an embedding must preserve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Language {
    Full,
    MinusS,
}

/// Checks that the pairing graph, every R_m graph, every A_n graph and, in
/// full mode, the S graph are preserved in both directions by `f` on its
/// domain.
pub fn verify_embedding(f: &GoodMap, language: Language) -> Report {
    let mut out = Vec::new();
    let g = f.inverse();
    for (z, e) in &f.entries {
        let fz = &e.image;
        check_relations(f, z, fz, "", &mut out);
        check_relations(&g, fz, z, "inverse ", &mut out);
        if language == Language::Full && f.lookup(&z.succ()).as_ref() != Some(&fz.succ()) {
            out.push(violation("s-graph", format!("{z} -> {fz}")));
        }
    }
    Report::from_violations(out)
}

fn check_relations(f: &GoodMap, z: &Term, fz: &Term, side: &str, out: &mut Vec<Violation>) {
    if let Some((l, r)) = z.children() {
        if let (Some(fl), Some(fr)) = (f.lookup(&l), f.lookup(&r)) {
            let want = Term::pair(&fl, &fr);
            if &want != fz {
                out.push(violation(
                    "pair-graph",
                    format!("{side}p({l},{r}) = {z} but p({fl},{fr}) = {want} != {fz}"),
                ));
            }
        }
    }
    if let Some((s, m, x)) = z.r_shift() {
        if let Some(fx) = f.lookup(&x) {
            if fz.r_shift() != Some((s.clone(), m.clone(), fx.clone())) {
                out.push(violation(
                    "r-graph",
                    format!("{side}{z} is S^{} r({m},{x}) but {fz} is not S^{} r({m},{fx})", -&s, -&s),
                ));
            }
        }
    }
    if let Some((s, n, x)) = z.a_shift() {
        if let Some(fx) = f.lookup(&x) {
            if fz.a_shift() != Some((s.clone(), n, fx.clone())) {
                out.push(violation(
                    "a-graph",
                    format!("{side}{z} is S^{} A_{n}({x}) but {fz} is not S^{} A_{n}({fx})", -&s, -&s),
                ));
            }
        }
    }
}

/// The least positive index not in `avoid`.
pub fn fresh_index(avoid: &BTreeSet<Index>) -> Index {
    let mut i = 1u64;
    while avoid.contains(&Index::small(i)) {
        i += 1;
    }
    Index::small(i)
}

/// Extends `f` to the closure `V_k(X ∪ {a})` and its shifts.
///
/// Members are handled components first. A member whose R- or A-shift has a
/// mapped body goes through the same constructor, a pair of mapped
/// components maps to the pair of images, index-0 leaves are fixed, and
/// anything else goes to a leaf with a fresh index at the same level. Prior
/// entries are kept.
pub fn extend_point(f: &GoodMap, xs: &[Term], k: &Radius, a: &Term) -> Result<GoodMap, ModelError> {
    let target = v_closure(xs.iter().chain(std::iter::once(a)), k);
    let mut avoid = target.indices();
    avoid.extend(f.used_indices().iter().cloned());
    let mut ext = Extender {
        g: f.clone(),
        target: &target,
        avoid,
    };
    for t in target.concrete() {
        ext.process(t)?;
    }
    for body in target.spines().keys() {
        ext.process(body)?;
    }
    ext.process(a)?;
    Ok(ext.g)
}

struct Extender<'a> {
    g: GoodMap,
    target: &'a FamilySet,
    avoid: BTreeSet<Index>,
}

impl Extender<'_> {
    fn process(&mut self, t: &Term) -> Result<(), ModelError> {
        if self.g.lookup(t).is_some() {
            return Ok(());
        }
        if let Some((_, _, x)) = t.r_shift() {
            if self.target.contains(&x) {
                self.process(&x)?;
            }
            if self.g.lookup(&x).is_some() {
                return Ok(());
            }
        }
        if let Some((s, n, x)) = t.a_shift() {
            if self.target.contains(&x) {
                self.process(&x)?;
            }
            if let Some(fx) = self.g.lookup(&x) {
                let image = Term::apply_a(n, &fx)?.shift(&-s);
                return self.g.insert(t, &image, Via::AImage);
            }
        }
        if let Some((l, r)) = t.children() {
            for c in [&l, &r] {
                if self.target.contains(c) {
                    self.process(c)?;
                }
            }
            if self.g.lookup(t).is_some() {
                return Ok(());
            }
            if let (Some(fl), Some(fr)) = (self.g.lookup(&l), self.g.lookup(&r)) {
                return self.g.insert(t, &Term::pair(&fl, &fr), Via::Pair);
            }
        }
        if t.is_zero_leaf() {
            return self.g.insert(t, t, Via::ZeroLeaf);
        }
        let q = fresh_index(&self.avoid);
        self.avoid.insert(q.clone());
        self.g.insert(t, &Term::leaf(q, t.chi()), Via::Fresh)
    }
}

/// The map of the n-th closure extension: `F` on `W_k(X)`, the identity on
/// index-0 leaves, and the homomorphic pushforward through pairing and the
/// windowed R_m and A_n on `Cl_N` of those. Evaluated on demand.
pub struct NthClosureMap {
    f: GoodMap,
    vk: FamilySet,
    rank: u64,
    window: Window,
}

/// Builds the n-th closure map for `F`, `X`, `k` and rank `N`.
pub fn extend_nth_closure(f: &GoodMap, xs: &[Term], k: u64, rank: u64, window: &Window) -> NthClosureMap {
    NthClosureMap {
        f: f.clone(),
        vk: v_closure(xs, &Radius::finite(k)),
        rank,
        window: window.clone(),
    }
}

impl NthClosureMap {
    /// `L(t)`. Fails if `t` lies outside the windowed `Cl_N`.
    pub fn query(&self, t: &Term) -> Result<Term, ModelError> {
        self.eval(t, self.rank)
            .ok_or_else(|| ModelError::OutsideClosure(t.to_string()))
    }

    fn eval(&self, t: &Term, budget: u64) -> Option<Term> {
        if !self.vk.orbit_members(t).is_empty() {
            return self.f.lookup(t);
        }
        if t.is_zero_leaf() {
            return Some(t.clone());
        }
        if budget == 0 {
            return None;
        }
        if let Kind::R { level, body } = t.kind() {
            if self.window.r_levels.contains(level) {
                if let Some(fb) = self.eval(body, budget - 1) {
                    return Some(Term::r(level.clone(), &fb));
                }
            }
        }
        if let Some((s, n, x)) = t.a_shift() {
            if s == BigInt::default() && self.window.a_arities.contains(&n) {
                if let Some(fx) = self.eval(&x, budget - 1) {
                    return Term::apply_a(n, &fx).ok();
                }
            }
        }
        let (l, r) = t.children()?;
        let fl = self.eval(&l, budget - 1)?;
        let fr = self.eval(&r, budget - 1)?;
        Some(Term::pair(&fl, &fr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_on(ts: &[Term]) -> GoodMap {
        let mut f = GoodMap::new();
        for t in ts {
            f.insert(t, t, Via::Given).unwrap();
        }
        f
    }

    #[test]
    fn good_clauses() {
        let (u, v) = (Term::d(1, 0), Term::d(2, 3));
        let id = identity_on(&[u.clone(), v.clone(), Term::pair(&u, &v)]);
        assert!(verify_good(&id).ok);
        assert!(verify_embedding(&id, Language::Full).ok);

        let mut f = GoodMap::new();
        f.insert(&Term::d(0, 0), &Term::d(1, 0), Via::Given).unwrap();
        let r = verify_good(&f);
        assert!(r.violations.iter().any(|v| v.clause == "good-1"));

        let mut f = GoodMap::new();
        f.insert(&Term::d(3, 0), &Term::d(4, 7), Via::Given).unwrap();
        let r = verify_good(&f);
        assert!(r.violations.iter().any(|v| v.clause == "good-2"));
    }

    #[test]
    fn embedding_failures() {
        let (u, v) = (Term::d(1, 0), Term::d(2, 0));
        let mut f = identity_on(&[u.clone(), v.clone()]);
        f.insert(&Term::pair(&u, &v), &Term::pair(&v, &u), Via::Given).unwrap();
        let r = verify_embedding(&f, Language::Full);
        assert!(r.violations.iter().any(|v| v.clause == "pair-graph"));

        let (a, b) = (Term::d(1, 0), Term::d(2, 0));
        let mut f = GoodMap::new();
        f.insert(&a, &b, Via::Given).unwrap();
        f.insert(&Term::r(0, &a), &Term::r(1, &b), Via::Given).unwrap();
        let r = verify_embedding(&f, Language::Full);
        assert!(r.violations.iter().any(|v| v.clause == "r-graph"));
    }

    #[test]
    fn implicit_r_families() {
        let (a, b) = (Term::d(1, 0), Term::d(2, 0));
        let mut f = GoodMap::new();
        f.insert(&a, &b, Via::Given).unwrap();
        assert_eq!(f.lookup(&Term::r(-7, &a)), Some(Term::r(-7, &b)));
        assert_eq!(
            f.lookup(&Term::r(3, &a).shift_by(4)),
            Some(Term::r(3, &b).shift_by(4))
        );
        assert_eq!(f.preimage(&Term::r(3, &b)), Some(Term::r(3, &a)));
        assert_eq!(f.lookup(&Term::pair(&a, &a)), None);
    }

    #[test]
    fn fresh_index_examples() {
        let s = |v: &[u64]| v.iter().map(|&i| Index::small(i)).collect::<BTreeSet<_>>();
        assert_eq!(fresh_index(&s(&[0, 1, 3])), Index::small(2));
        assert_eq!(fresh_index(&s(&[])), Index::small(1));
        assert_eq!(fresh_index(&s(&(1..=10).collect::<Vec<_>>())), Index::small(11));
    }

    #[test]
    fn extend_point_examples() {
        let (u, v) = (Term::d(1, 0), Term::d(2, 1));
        let mut f = GoodMap::new();
        f.insert(&u, &Term::d(5, 0), Via::Given).unwrap();
        f.insert(&v, &Term::d(6, 1), Via::Given).unwrap();
        let xs = [u.clone(), v.clone()];
        let k = Radius::finite(3);

        let g = extend_point(&f, &xs, &k, &u.succ()).unwrap();
        assert_eq!(g, f);

        let p = Term::pair(&u, &v);
        let g = extend_point(&f, &xs, &k, &p).unwrap();
        assert_eq!(g.lookup(&p), Some(Term::pair(&Term::d(5, 0), &Term::d(6, 1))));

        let fresh = Term::d(3, 5);
        let g = extend_point(&f, &xs, &k, &fresh).unwrap();
        // Indices 1, 2, 3, 5, 6 are taken.
        assert_eq!(g.lookup(&fresh), Some(Term::d(4, 5)));
        assert!(verify_good(&g).ok);
        assert!(verify_embedding(&g, Language::Full).ok);

        let z = Term::d(0, -2);
        let g = extend_point(&f, &xs, &k, &z).unwrap();
        assert_eq!(g.lookup(&z), Some(z));
    }

    #[test]
    fn extend_point_through_constructors() {
        let a = Term::d(1, 0);
        let mut f = GoodMap::new();
        f.insert(&a, &Term::d(2, 0), Via::Given).unwrap();
        let t = Term::pair(&Term::r(4, &Term::pair(&a, &Term::d(7, 2))), &Term::apply_a(3, &a).unwrap());
        let g = extend_point(&f, &[a.clone()], &Radius::Unbounded, &t).unwrap();
        assert!(verify_good(&g).ok, "{:?}", verify_good(&g));
        assert!(verify_embedding(&g, Language::Full).ok, "{:?}", verify_embedding(&g, Language::Full));
        let image = g.lookup(&t).unwrap();
        assert_eq!(g.preimage(&image), Some(t));
    }

    #[test]
    fn nth_closure_queries() {
        let w = Term::d(1, 0);
        let mut f = GoodMap::new();
        f.insert(&w, &Term::d(2, 0), Via::Given).unwrap();
        let l = extend_nth_closure(&f, &[w.clone()], 0, 2, &Window::new([0, 1], [2]));
        assert_eq!(l.query(&w).unwrap(), Term::d(2, 0));
        assert_eq!(l.query(&Term::d(0, 5)).unwrap(), Term::d(0, 5));
        let p = Term::pair(&w, &Term::d(0, 0));
        assert_eq!(l.query(&p).unwrap(), Term::pair(&Term::d(2, 0), &Term::d(0, 0)));
        assert!(matches!(
            l.query(&Term::d(3, 0)),
            Err(ModelError::OutsideClosure(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let mut f = GoodMap::new();
        f.insert(&Term::d(1, 0), &Term::d(2, 0), Via::Parameter).unwrap();
        f.insert(&Term::d(3, 4), &Term::d(3, 4), Via::Initial).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"[{"base":"d(1,0)","image":"d(2,0)","via":"parameter"},{"base":"d(3,0)","image":"d(3,0)","via":"initial"}]"#
        );
        let back: GoodMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }
}
