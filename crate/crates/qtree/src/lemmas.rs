//! Sampled and exhaustive property suites behind `verify-axioms` and
//! `verify-lemmas`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{check_axiom, Axiom, Element};
use crate::closure::{closure_size_bound, longest_prec_chain, prec, v_closure, v_set, Radius, DEFAULT_GUARD};
use crate::embedding::{extend_point, verify_embedding, verify_good, GoodMap, Language, Via};
use crate::error::ModelError;
use crate::game::tau;
use crate::index::Index;
use crate::rho::rho;
use crate::sample::{random_element, random_term, TermShape};
use crate::term::Term;

/// Failures listed per suite; further failures are only counted.
const MAX_LISTED: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub instances: u64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub instances: u64,
    pub failures: Vec<String>,
}

struct Tally {
    instances: u64,
    failures: Vec<String>,
    failed: u64,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            instances: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    fn record(&mut self, pass: bool, instance: impl FnOnce() -> String) {
        self.instances += 1;
        if !pass {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED {
                self.failures.push(instance());
            }
        }
    }

    fn into_failures(mut self) -> Vec<String> {
        if self.failed as usize > self.failures.len() {
            let more = self.failed as usize - self.failures.len();
            self.failures.push(format!("... and {more} more"));
        }
        self.failures
    }
}

/// Checks each axiom on `samples` random instances. Terms have at most
/// `max_size` nodes, indices in `0..=4` and levels in `-4..=4`.
pub fn verify_axioms(samples: u64, max_size: u32, seed: u64) -> Result<Vec<AxiomReport>, ModelError> {
    let shape = TermShape::new(max_size, 0..=4, -4..=4);
    let mut out = Vec::new();
    for axiom in Axiom::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((axiom as u64) << 32));
        let mut tally = Tally::new();
        for _ in 0..samples {
            let sample: Vec<Element> = (0..axiom.arity())
                .map(|_| random_element(&mut rng, &shape, 0.3, 8))
                .collect();
            let v = check_axiom(axiom, &sample)?;
            tally.record(v.pass, || v.instance.clone());
        }
        out.push(AxiomReport {
            axiom: axiom.name().to_string(),
            instances: tally.instances,
            failures: tally.into_failures(),
        });
    }
    Ok(out)
}

/// Checks `2 |V_{rho_n(k)+1}(X)| <= rho_n(k+1) - rho_n(k) - 1` for `k` in
/// `{0, 1}`. At `k = 0` the actual closure size is used, at `k = 1` the
/// bound `|X| (2^{rho_n(1)+2} - 1)`, which is also compared with the actual
/// size.
pub fn growth_holds(n: u32, k: u32, xs: &[Term]) -> Result<bool, ModelError> {
    let (Some(rk), Some(rk1)) = (rho(n, k).exact().cloned(), rho(n, k + 1).exact().cloned()) else {
        return Err(ModelError::State(format!("rho({n},{}) is not exact", k + 1)));
    };
    let rhs = rk1 - &rk - 1u32;
    let closure = v_closure(xs, &Radius::Finite(&rk + 1u32));
    let actual = closure
        .len()
        .ok_or_else(|| ModelError::State("finite-depth closure is infinite".into()))?;
    let shift = u64::try_from(&rk + 2u32).map_err(|_| ModelError::State("exponent too large".into()))?;
    let bound = BigUint::from(xs.len()) * ((BigUint::one() << shift) - 1u32);
    let lhs = if k == 0 { actual.clone() } else { bound.clone() };
    Ok(actual <= bound && BigUint::from(2u32) * lhs <= rhs)
}

/// Runs the lemma suites with `samples` random cases each.
pub fn verify_lemmas(samples: u64, seed: u64) -> Result<Vec<LemmaReport>, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = TermShape::new(5, 0..=3, -2..=2);
    let mut out = Vec::new();

    let mut tally = Tally::new();
    for _ in 0..samples {
        let t = random_term(&mut rng, &small);
        let u = random_term(&mut rng, &small);
        let m: i64 = rng.gen_range(-5..=5);
        let n: u64 = rng.gen_range(2..=6);
        let a = Term::apply_a(n, &u)?;
        let r = Term::r(m, &t);
        tally.record(r != a, || format!("r({m},{t}) = A_{n}({u})"));
        let n2: u64 = rng.gen_range(2..=6);
        let a2 = Term::apply_a(n2, &t)?;
        tally.record(a != a2 || (n == n2 && t == u), || format!("A_{n}({u}) = A_{n2}({t})"));
        tally.record(Term::pair(&t, &u).children() == Some((t.clone(), u.clone())), || {
            format!("children of p({t},{u})")
        });
    }
    out.push(LemmaReport {
        lemma: "family-disjointness".into(),
        instances: tally.instances,
        failures: tally.into_failures(),
    });

    let mut tally = Tally::new();
    for _ in 0..samples {
        let size = rng.gen_range(1..=3);
        let xs: Vec<Term> = (0..size).map(|_| random_term(&mut rng, &small)).collect();
        let k = rng.gen_range(0..=3);
        let (chain, count) = longest_prec_chain(&xs, k, DEFAULT_GUARD)?;
        tally.record(chain.is_some_and(|c| c < count), || {
            format!("X = {xs:?}, k = {k}: chain {chain:?}, |V_k| = {count}")
        });
        let bound = closure_size_bound(xs.len(), &BigUint::from(k)).expect("small bound");
        let actual = v_set(&xs, k, DEFAULT_GUARD)?.len().expect("finite");
        tally.record(actual <= bound, || format!("|V_{k}(X)| = {actual} > {bound}"));
        let (a, b) = (&xs[0], &xs[xs.len() - 1]);
        tally.record(!prec(a, a), || format!("{a} precedes itself"));
        if prec(a, b) {
            tally.record(!prec(b, a), || format!("{a} and {b} precede each other"));
        }
    }
    out.push(LemmaReport {
        lemma: "well-foundedness".into(),
        instances: tally.instances,
        failures: tally.into_failures(),
    });

    let mut tally = Tally::new();
    for n in 1..=3u32 {
        for _ in 0..samples.min(50) {
            let size = rng.gen_range(1..=n as usize + 2);
            let xs: Vec<Term> = (0..size).map(|_| random_term(&mut rng, &small)).collect();
            for k in 0..=1 {
                let ok = growth_holds(n, k, &xs)?;
                tally.record(ok, || format!("n = {n}, k = {k}, X = {xs:?}"));
            }
        }
    }
    out.push(LemmaReport {
        lemma: "rho-growth".into(),
        instances: tally.instances,
        failures: tally.into_failures(),
    });

    let mut tally = Tally::new();
    for _ in 0..samples {
        let (f, xs) = random_good_map(&mut rng, &small)?;
        let a = random_term(&mut rng, &small);
        let k = Radius::finite(rng.gen_range(0..=4));
        let g = extend_point(&f, &xs, &k, &a)?;
        let good = verify_good(&g);
        let emb = verify_embedding(&g, Language::Full);
        let kept = f.entries().iter().all(|(b, e)| g.lookup(b).as_ref() == Some(&e.image));
        tally.record(good.ok && emb.ok && kept, || {
            format!("F = {}, a = {a}: {:?} {:?}", serde_json::to_string(&f).unwrap_or_default(), good, emb)
        });
    }
    out.push(LemmaReport {
        lemma: "extension".into(),
        instances: tally.instances,
        failures: tally.into_failures(),
    });

    let mut tally = Tally::new();
    for _ in 0..samples {
        let t = random_term(&mut rng, &small);
        let u = random_term(&mut rng, &small);
        let (i, p) = (Index::small(1), Index::small(rng.gen_range(2..=9)));
        let tt = tau(&t, &i, &p)?;
        let ok = tau(&t.succ(), &i, &p)? == tt.succ()
            && tau(&Term::pair(&t, &u), &i, &p)? == Term::pair(&tt, &tau(&u, &i, &p)?)
            && tau(&Term::r(2, &t), &i, &p)? == Term::r(2, &tt)
            && tt.chi() == t.chi()
            && tau(&tt, &i, &p)? == t;
        tally.record(ok, || format!("tau on {t}, {u} with {i} <-> {p}"));
    }
    out.push(LemmaReport {
        lemma: "tau-automorphism".into(),
        instances: tally.instances,
        failures: tally.into_failures(),
    });
    Ok(out)
}

/// A Good embedding built from an index permutation that fixes 0, applied
/// to the full subterm closure of a few random terms, together with those
/// terms. The domain covers every radius, so any extension radius is below
/// the one the map is defined on.
pub fn random_good_map(rng: &mut impl Rng, shape: &TermShape) -> Result<(GoodMap, Vec<Term>), ModelError> {
    let size = rng.gen_range(1..=3);
    let xs: Vec<Term> = (0..size).map(|_| random_term(rng, shape)).collect();
    let closure = v_closure(&xs, &Radius::Unbounded);
    let indices: BTreeSet<Index> = closure.indices();
    let mut targets: Vec<u64> = (1..=20).collect();
    for i in (1..targets.len()).rev() {
        let j = rng.gen_range(0..=i);
        targets.swap(i, j);
    }
    let mut perm = std::collections::BTreeMap::new();
    for (i, idx) in indices.iter().filter(|i| !i.is_zero()).enumerate() {
        perm.insert(idx.clone(), Index::small(targets[i]));
    }
    let mut f = GoodMap::new();
    let mut members: Vec<Term> = closure.concrete().iter().cloned().collect();
    members.extend(closure.spines().keys().cloned());
    for t in members {
        if f.lookup(&t).is_none() {
            let image = t.map_indices(&mut |i| perm.get(i).cloned().unwrap_or_else(|| i.clone()));
            f.insert(&t, &image, Via::Given)?;
        }
    }
    Ok((f, xs))
}
