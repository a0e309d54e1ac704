use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use qtree::arith::{self, check_axiom, Axiom, Element};
use qtree::closure::{prec, v_set, w_member, Radius, DEFAULT_GUARD};
use qtree::embedding::{extend_point, verify_embedding, verify_good, Language};
use qtree::game::{a_set_member, choose_challenge, tau};
use qtree::lemmas::random_good_map;
use qtree::parse::parse_term;
use qtree::sample::TermShape;
use qtree::term::RawTerm;
use qtree::{Index, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn raw_term(depth: u32) -> impl Strategy<Value = RawTerm> {
    let leaf = (0u64..=4, -4i64..=4).prop_map(|(n, m)| RawTerm::Leaf(Index::small(n), BigInt::from(m)));
    leaf.prop_recursive(depth, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| RawTerm::Pair(Box::new(l), Box::new(r))),
            (-3i64..=3, inner).prop_map(|(m, b)| RawTerm::R(BigInt::from(m), Box::new(b))),
        ]
    })
}

fn term() -> impl Strategy<Value = Term> {
    raw_term(3).prop_map(|r| r.normalize())
}

/// Terms that fold: pairs whose left side is an R-node over the right side.
fn foldable() -> impl Strategy<Value = RawTerm> {
    (raw_term(2), -3i64..=3, 1usize..=3).prop_map(|(b, m, reps)| {
        let mut t = RawTerm::R(BigInt::from(m), Box::new(b.clone()));
        for _ in 0..reps {
            t = RawTerm::Pair(Box::new(t), Box::new(b.clone()));
        }
        t
    })
}

fn element() -> impl Strategy<Value = Element> {
    prop_oneof![
        1 => (0u64..=8).prop_map(Element::std),
        3 => term().prop_map(Element::NonStd),
    ]
}

fn nonstd() -> impl Strategy<Value = Element> {
    term().prop_map(Element::NonStd)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn normalization_is_idempotent(raw in raw_term(4)) {
        let t = raw.normalize();
        prop_assert_eq!(t.to_raw().normalize(), t.clone());
        prop_assert!(t.size() <= raw.size());
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn folding_shrinks(raw in foldable()) {
        let t = raw.normalize();
        prop_assert!(t.size() < raw.size());
        let is_r = matches!(t.kind(), qtree::Kind::R { .. });
        prop_assert!(is_r);
    }

    #[test]
    fn pair_is_injective(a in term(), b in term(), c in term(), d in term()) {
        if Term::pair(&a, &b) == Term::pair(&c, &d) {
            prop_assert!(a == c && b == d);
        }
        prop_assert_eq!(Term::pair(&a, &b).children(), Some((a.clone(), b.clone())));
    }

    #[test]
    fn r_is_injective(a in term(), b in term(), m in -5i64..=5, k in -5i64..=5) {
        let same = Term::r(m, &a) == Term::r(k, &b);
        prop_assert_eq!(same, m == k && a == b);
    }

    #[test]
    fn r_and_a_images_are_disjoint(t in term(), u in term(), m in -5i64..=5, n in 2u64..=6, n2 in 2u64..=6) {
        let a = Term::apply_a(n, &u).unwrap();
        prop_assert_ne!(Term::r(m, &t), a.clone());
        let a2 = Term::apply_a(n2, &t).unwrap();
        prop_assert_eq!(a == a2, n == n2 && t == u);
    }

    #[test]
    fn contexts_do_not_fix_arguments(t in term(), u in term(), m in -3i64..=3, n in 2u64..=4) {
        let contexts = [
            Term::pair(&t, &u),
            Term::pair(&u, &t),
            Term::r(m, &t),
            Term::apply_a(n, &t).unwrap(),
            Term::pair(&Term::r(m, &t), &u),
            Term::r(m, &Term::pair(&t, &u)),
        ];
        for c in contexts {
            prop_assert_ne!(c, t.clone());
        }
    }

    #[test]
    fn successor_has_no_cycles(t in term()) {
        let mut s = t.clone();
        for _ in 1..=10 {
            s = s.succ();
            prop_assert_ne!(s.clone(), t.clone());
        }
    }

    #[test]
    fn successor_moves_chi(t in term()) {
        prop_assert_eq!(t.succ().chi(), t.chi() + 1);
        prop_assert_eq!(t.pred().chi(), t.chi() - 1);
        prop_assert_eq!(t.succ().pred(), t.clone());
        prop_assert_eq!(t.pred().succ(), t);
    }

    #[test]
    fn orbit_key_matches_bounded_reachability(t in term(), r in -3i64..=3, u in term()) {
        let s = t.shift_by(r);
        prop_assert_eq!(s.orbit_key().base, t.orbit_key().base);
        prop_assert_eq!(s.orbit_key().shift, t.orbit_key().shift + r);
        let reachable = (-6i64..=6).any(|j| t.shift_by(j) == u);
        let levels_close = (t.chi() - u.chi()).magnitude() <= &6u32.into();
        if levels_close {
            prop_assert_eq!(t.same_orbit(&u), reachable);
        }
    }

    #[test]
    fn r_shift_recovers_the_r_image(t in term(), m in -3i64..=3, r in -3i64..=3) {
        let s = Term::r(m, &t).shift_by(r);
        let (back, level, body) = s.r_shift().expect("a shift of an R-image");
        prop_assert_eq!(back, BigInt::from(-r));
        prop_assert_eq!(level, BigInt::from(m));
        prop_assert_eq!(body, t);
    }

    #[test]
    fn axioms_hold(x in element(), y in element(), z in element(), w in element()) {
        for axiom in Axiom::ALL {
            let sample = [x.clone(), y.clone(), z.clone(), w.clone()];
            let v = check_axiom(axiom, &sample[..axiom.arity()]).unwrap();
            prop_assert!(v.pass, "{} fails: {}", axiom, v.instance);
        }
    }

    #[test]
    fn multiplication_recursion(w in nonstd(), v in nonstd(), n in 0u64..=6) {
        let lhs = arith::mul(&w, &Element::std(n + 1)).unwrap();
        let rhs = arith::add(&arith::mul(&w, &Element::std(n)).unwrap(), &w);
        prop_assert_eq!(lhs, rhs);
        let lhs = arith::mul(&w, &arith::succ(&v)).unwrap();
        let rhs = arith::add(&arith::mul(&w, &v).unwrap(), &w);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn standard_sums_commute(w in nonstd(), m in 0u64..=50) {
        prop_assert_eq!(arith::add(&Element::std(m), &w), arith::add(&w, &Element::std(m)));
    }

    #[test]
    fn nonstandard_sums_are_injective(a in nonstd(), b in nonstd(), c in nonstd(), d in nonstd()) {
        if arith::add(&a, &b) == arith::add(&c, &d) {
            prop_assert!(a == c && b == d);
        }
    }

    #[test]
    fn prec_is_a_strict_order(a in term(), b in term(), c in term()) {
        prop_assert!(!prec(&a, &a));
        if prec(&a, &b) {
            prop_assert!(!prec(&b, &a));
            if prec(&b, &c) {
                prop_assert!(prec(&a, &c));
            }
        }
        prop_assert!(prec(&a, &Term::pair(&a, &b)));
        prop_assert!(prec(&b, &Term::r(0, &b)));
    }

    #[test]
    fn w_member_against_enumeration(x in term(), v in term(), k in 0u64..=3, r in -8i64..=8) {
        let xs = [x];
        let members = v_set(&xs, k, DEFAULT_GUARD).unwrap().expand(4096).unwrap();
        let shifted: BTreeSet<Term> = members.iter().flat_map(|u| (-8i64..=8).map(move |j| u.shift_by(j))).collect();
        for probe in [v.clone(), members[0].shift_by(r)] {
            let brute = shifted.contains(&probe);
            let found = w_member(&probe, &xs, k, DEFAULT_GUARD).unwrap();
            if let Some((u, s)) = &found {
                prop_assert!(members.contains(u));
                prop_assert_eq!(&u.shift(s), &probe);
            }
            if brute {
                prop_assert!(found.is_some());
            }
        }
    }

    #[test]
    fn tau_is_an_involutive_automorphism(t in term(), u in term(), p in 2u64..=9, m in -3i64..=3) {
        let (i, p) = (Index::small(1), Index::small(p));
        let tt = tau(&t, &i, &p).unwrap();
        prop_assert_eq!(tau(&t.succ(), &i, &p).unwrap(), tt.succ());
        prop_assert_eq!(tau(&Term::pair(&t, &u), &i, &p).unwrap(), Term::pair(&tt, &tau(&u, &i, &p).unwrap()));
        prop_assert_eq!(tau(&Term::r(m, &t), &i, &p).unwrap(), Term::r(m, &tt));
        prop_assert_eq!(tt.chi(), t.chi());
        prop_assert_eq!(tau(&tt, &i, &p).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn extension_is_sound_and_deterministic(seed in any::<u64>(), k in 0u64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = TermShape::new(5, 0..=3, -2..=2);
        let (f, xs) = random_good_map(&mut rng, &shape).unwrap();
        let a = qtree::sample::random_term(&mut rng, &shape);
        let g = extend_point(&f, &xs, &Radius::finite(k), &a).unwrap();
        prop_assert!(verify_good(&g).ok);
        prop_assert!(verify_embedding(&g, Language::Full).ok);
        for (b, e) in f.entries() {
            prop_assert_eq!(g.lookup(b), Some(e.image.clone()));
        }
        for m in -4i64..=4 {
            let z = Term::d(0, m);
            if let Some(img) = g.lookup(&z) {
                prop_assert_eq!(img, z);
            }
        }
        let again = extend_point(&f, &xs, &Radius::finite(k), &a).unwrap();
        prop_assert_eq!(serde_json::to_string(&g).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn challenges_discriminate(x in term(), std in 0u64..=20, use_std in any::<bool>(), n in 0u32..=2) {
        let w = if use_std { Element::std(std) } else { Element::NonStd(x) };
        let c = choose_challenge(&w, n).unwrap();
        prop_assert!(a_set_member(n, &c.a0));
        prop_assert!(!a_set_member(n, &c.b0));
    }
}

#[test]
fn sums_and_products_are_not_commutative() {
    let a = Element::NonStd(Term::d(1, 0));
    let b = Element::NonStd(Term::d(2, 0));
    assert_ne!(arith::add(&a, &b), arith::add(&b, &a));
    let b = Element::NonStd(Term::d(2, 1));
    assert_ne!(arith::mul(&a, &b).unwrap(), arith::mul(&b, &a).unwrap());
}
