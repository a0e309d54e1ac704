//! The n-round game between `(M, w, a0)` and `(M, w, b0)`: the challenge,
//! the responder strategy and the partial-embedding check.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_add, is_mul, is_succ, Element};
use crate::closure::{v_closure, Radius};
use crate::embedding::{extend_point, verify_embedding, verify_good, GoodMap, Language, Report, Via, Violation};
use crate::error::ModelError;
use crate::index::Index;
use crate::rho::{rho, Rho};
use crate::term::{Kind, Term};

/// Largest number of rounds accepted by the engine.
pub const MAX_ROUNDS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Side, ModelError> {
        match s {
            "left" | "l" | "L" => Ok(Side::Left),
            "right" | "r" | "R" => Ok(Side::Right),
            _ => Err(ModelError::State(format!("unknown side {s:?}"))),
        }
    }
}

/// Whether `t = d(k, 0)` with `1 <= k <= rho_n(n+1)`.
pub fn a_set_member(n: u32, t: &Term) -> bool {
    match t.kind() {
        Kind::Leaf { index, level } => {
            level == &num_bigint::BigInt::default() && index.in_range_one_to(&rho(n, n + 1))
        }
        _ => false,
    }
}

/// Swaps leaf indices `i` and `p` at every level.
pub fn tau(t: &Term, i: &Index, p: &Index) -> Result<Term, ModelError> {
    if i.is_zero() || p.is_zero() || i == p {
        return Err(ModelError::BadSwap);
    }
    Ok(t.map_indices(&mut |x| {
        if x == i {
            p.clone()
        } else if x == p {
            i.clone()
        } else {
            x.clone()
        }
    }))
}

/// [`tau`] on elements; standard elements are fixed.
pub fn tau_element(e: &Element, i: &Index, p: &Index) -> Result<Element, ModelError> {
    match e {
        Element::Std(_) => {
            tau(&Term::d(1, 0), i, p)?;
            Ok(e.clone())
        }
        Element::NonStd(t) => Ok(Element::NonStd(tau(t, i, p)?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Challenge {
    pub a0: Term,
    pub b0: Term,
    pub fragment: GoodMap,
}

/// Picks `a0` inside and `b0` outside the finite set `A_n`, and the initial
/// map: the identity on the closure of `w` plus `a0 -> b0`.
pub fn choose_challenge(w: &Element, n: u32) -> Result<Challenge, ModelError> {
    if n > MAX_ROUNDS {
        return Err(ModelError::State(format!("at most {MAX_ROUNDS} rounds are supported")));
    }
    let mut fragment = GoodMap::new();
    let (a0, b0) = match w {
        Element::Std(_) => (Term::d(1, 0), Term::leaf(Index::past_rho(n, n + 1, 1)?, 0)),
        Element::NonStd(t) => {
            let used = t.indices();
            let bound = rho(n, n + 1);
            let q = (1u64..)
                .map(Index::small)
                .find(|i| !used.contains(i))
                .expect("finitely many indices are used");
            if !q.in_range_one_to(&bound) {
                return Err(ModelError::State("no free index inside A_n".into()));
            }
            let p = (1u64..)
                .map(|off| Index::past_rho(n, n + 1, off))
                .find(|i| i.as_ref().map_or(true, |i| !used.contains(i)))
                .expect("finitely many indices are used")?;
            let closure = v_closure([t], &Radius::from(rho(n, n)));
            for u in closure.concrete() {
                if fragment.lookup(u).is_none() {
                    fragment.insert(u, u, Via::Initial)?;
                }
            }
            (Term::leaf(q, 0), Term::leaf(p, 0))
        }
    };
    fragment.insert(&a0, &b0, Via::Parameter)?;
    Ok(Challenge { a0, b0, fragment })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub side: Side,
    #[serde(rename = "move")]
    pub mv: Element,
    pub reply: Element,
    /// Closure radius maintained after this round.
    pub radius: String,
    #[serde(rename = "fragmentReport")]
    pub fragment_report: Report,
}

impl Round {
    /// The `(left, right)` pair played in this round.
    pub fn pair(&self) -> (Element, Element) {
        match self.side {
            Side::Left => (self.mv.clone(), self.reply.clone()),
            Side::Right => (self.reply.clone(), self.mv.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameState {
    pub n: u32,
    pub w: Element,
    pub a0: Term,
    pub b0: Term,
    pub rounds: Vec<Round>,
    pub fragment: GoodMap,
}

impl GameState {
    pub fn new(n: u32, w: Element) -> Result<GameState, ModelError> {
        let c = choose_challenge(&w, n)?;
        Ok(GameState {
            n,
            w,
            a0: c.a0,
            b0: c.b0,
            rounds: Vec::new(),
            fragment: c.fragment,
        })
    }

    pub fn is_finished(&self) -> bool {
        self.rounds.len() as u32 >= self.n
    }

    /// Nonstandard elements played so far on one side, parameters included.
    pub fn side_terms(&self, side: Side) -> Vec<Term> {
        let mut out = Vec::new();
        if let Element::NonStd(t) = &self.w {
            out.push(t.clone());
        }
        out.push(match side {
            Side::Left => self.a0.clone(),
            Side::Right => self.b0.clone(),
        });
        for r in &self.rounds {
            let (l, rt) = r.pair();
            let e = if side == Side::Left { l } else { rt };
            if let Element::NonStd(t) = e {
                out.push(t);
            }
        }
        out
    }

    /// Closure radius kept after `stage` rounds.
    pub fn radius_after(&self, stage: u32) -> Rho {
        rho(self.n, self.n - stage)
    }

    /// Plays one move and returns the reply.
    pub fn respond(&mut self, side: Side, mv: Element) -> Result<Element, ModelError> {
        if self.is_finished() {
            return Err(ModelError::State("the game is over".into()));
        }
        let stage = self.rounds.len() as u32 + 1;
        let radius = self.radius_after(stage);
        let reply = match &mv {
            Element::Std(_) => mv.clone(),
            Element::NonStd(t) => {
                let known = match side {
                    Side::Left => self.fragment.lookup(t),
                    Side::Right => self.fragment.preimage(t),
                };
                match known {
                    Some(img) => Element::NonStd(img),
                    None => {
                        let xs = self.side_terms(side);
                        let k = Radius::from(radius.clone());
                        self.fragment = match side {
                            Side::Left => extend_point(&self.fragment, &xs, &k, t)?,
                            Side::Right => extend_point(&self.fragment.inverse(), &xs, &k, t)?.inverse(),
                        };
                        let img = match side {
                            Side::Left => self.fragment.lookup(t),
                            Side::Right => self.fragment.preimage(t),
                        };
                        Element::NonStd(img.expect("extension maps the played term"))
                    }
                }
            }
        };
        let report = verify_good(&self.fragment).and(verify_embedding(&self.fragment, Language::Full));
        self.rounds.push(Round {
            side,
            mv,
            reply: reply.clone(),
            radius: radius.to_string(),
            fragment_report: report,
        });
        Ok(reply)
    }

    /// The checked list: `(w,w)`, `(a0,b0)`, the rounds, then `(0,0)`.
    pub fn checked_pairs(&self) -> Vec<(Element, Element)> {
        checked_pairs(&self.w, &self.a0, &self.b0, &self.rounds)
    }

    pub fn win_check(&self) -> Result<Report, ModelError> {
        if !self.is_finished() {
            return Err(ModelError::State("the game has not ended".into()));
        }
        Ok(check_partial_embedding(&self.checked_pairs()))
    }
}

pub fn checked_pairs(w: &Element, a0: &Term, b0: &Term, rounds: &[Round]) -> Vec<(Element, Element)> {
    let mut out = vec![
        (w.clone(), w.clone()),
        (Element::NonStd(a0.clone()), Element::NonStd(b0.clone())),
    ];
    out.extend(rounds.iter().map(Round::pair));
    out.push((Element::zero(), Element::zero()));
    out
}

fn labels(len: usize) -> Vec<String> {
    let mut out = vec!["w".to_string(), "a0".to_string()];
    for i in 1..len.saturating_sub(2) {
        out.push(format!("x{i}"));
    }
    out.push("0".to_string());
    out
}

/// Checks that `left_i -> right_i` preserves every unnested atomic formula
/// of the arithmetic language in both directions.
pub fn check_partial_embedding(pairs: &[(Element, Element)]) -> Report {
    let names = labels(pairs.len());
    let (l, r): (Vec<Element>, Vec<Element>) = pairs.iter().cloned().unzip();
    let mut out = Vec::new();
    let mut atom = |clause: &str, formula: String, lv: bool, rv: bool| {
        if lv != rv {
            out.push(Violation {
                clause: clause.to_string(),
                witness: format!("{formula} is {lv} on the left and {rv} on the right"),
            });
        }
    };
    let len = pairs.len();
    for i in 0..len {
        atom("zero", format!("{} = 0", names[i]), l[i].is_zero(), r[i].is_zero());
        for j in 0..len {
            atom(
                "equality",
                format!("{} = {}", names[i], names[j]),
                l[i] == l[j],
                r[i] == r[j],
            );
            atom(
                "succ-graph",
                format!("S({}) = {}", names[i], names[j]),
                is_succ(&l[i], &l[j]),
                is_succ(&r[i], &r[j]),
            );
            for k in 0..len {
                atom(
                    "add-graph",
                    format!("{} + {} = {}", names[i], names[j], names[k]),
                    is_add(&l[i], &l[j], &l[k]),
                    is_add(&r[i], &r[j], &r[k]),
                );
                atom(
                    "mul-graph",
                    format!("{} * {} = {}", names[i], names[j], names[k]),
                    is_mul(&l[i], &l[j], &l[k]),
                    is_mul(&r[i], &r[j], &r[k]),
                );
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|v| seen.insert((v.clause.clone(), v.witness.clone())));
    Report {
        ok: out.is_empty(),
        violations: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_element;

    fn el(s: &str) -> Element {
        parse_element(s).unwrap()
    }

    #[test]
    fn a_set_examples() {
        assert!(a_set_member(0, &Term::d(1, 0)));
        assert!(!a_set_member(0, &Term::d(0, 0)));
        assert!(a_set_member(0, &Term::d(16, 0)));
        assert!(!a_set_member(0, &Term::d(17, 0)));
        assert!(!a_set_member(0, &Term::d(1, 1)));
        assert!(a_set_member(3, &Term::d(1_000_000, 0)));
    }

    #[test]
    fn challenge_examples() {
        let c = choose_challenge(&el("5"), 0).unwrap();
        assert_eq!(c.a0, Term::d(1, 0));
        assert_eq!(c.b0, Term::d(17, 0));
        let c = choose_challenge(&el("d(2,0)"), 2).unwrap();
        assert_eq!(c.a0, Term::d(1, 0));
        let c = choose_challenge(&el("p(d(1,0),d(2,0))"), 1).unwrap();
        assert_eq!(c.a0, Term::d(3, 0));
        assert_eq!(c.b0.to_string(), "d(10066329601,0)");
        for n in 0..3 {
            let c = choose_challenge(&el("p(d(1,3),r(2,d(4,0)))"), n).unwrap();
            assert!(a_set_member(n, &c.a0));
            assert!(!a_set_member(n, &c.b0));
            assert!(verify_good(&c.fragment).ok);
            assert!(verify_embedding(&c.fragment, Language::Full).ok);
        }
        let c = choose_challenge(&el("7"), 2).unwrap();
        assert_eq!(c.b0.to_string(), "d(rho(2,3)+1,0)");
    }

    #[test]
    fn tau_examples() {
        let (one, nine) = (Index::small(1), Index::small(9));
        assert_eq!(tau(&Term::d(1, 3), &one, &nine).unwrap(), Term::d(9, 3));
        assert_eq!(tau(&Term::d(7, 2), &one, &nine).unwrap(), Term::d(7, 2));
        let t = Term::pair(&Term::d(1, 0), &Term::d(7, 2));
        assert_eq!(
            tau(&t, &one, &nine).unwrap(),
            Term::pair(&Term::d(9, 0), &Term::d(7, 2))
        );
        assert!(matches!(tau(&t, &Index::small(0), &nine), Err(ModelError::BadSwap)));
    }

    #[test]
    fn respond_examples() {
        let mut g = GameState::new(3, el("p(d(2,0),d(3,1))")).unwrap();
        assert_eq!(g.respond(Side::Left, el("5")).unwrap(), el("5"));
        let a0 = Element::NonStd(g.a0.clone());
        let b0 = Element::NonStd(g.b0.clone());
        assert_eq!(g.respond(Side::Left, a0.clone()).unwrap(), b0);
        let w = g.w.term().unwrap().clone();
        let mv = Element::NonStd(Term::pair(&w, &g.a0));
        assert_eq!(
            g.respond(Side::Left, mv).unwrap(),
            Element::NonStd(Term::pair(&w, &g.b0))
        );
        assert!(g.rounds.iter().all(|r| r.fragment_report.ok));
        assert!(g.win_check().unwrap().ok);
        assert!(g.respond(Side::Left, el("1")).is_err());
    }

    #[test]
    fn win_check_detects_violations() {
        let w = el("5");
        let a0 = Term::d(1, 0);
        let b0 = Term::d(17, 0);
        let mk = |side, mv: &str, reply: &str| Round {
            side,
            mv: el(mv),
            reply: el(reply),
            radius: "0".into(),
            fragment_report: Report::default(),
        };
        let rounds = vec![mk(Side::Left, "d(3,0)", "d(4,0)"), mk(Side::Left, "d(3,0)", "d(5,0)")];
        let r = check_partial_embedding(&checked_pairs(&w, &a0, &b0, &rounds));
        assert!(r.violations.iter().any(|v| v.clause == "equality"));
        let rounds = vec![
            mk(Side::Left, "d(3,0)", "d(3,0)"),
            mk(Side::Left, "p(d(1,0),d(3,0))", "p(d(3,0),d(3,0))"),
        ];
        let r = check_partial_embedding(&checked_pairs(&w, &a0, &b0, &rounds));
        assert!(r.violations.iter().any(|v| v.clause == "add-graph"), "{r:?}");
        let rounds = vec![mk(Side::Left, "d(1,0)", "d(17,0)"), mk(Side::Right, "3", "3")];
        assert!(check_partial_embedding(&checked_pairs(&w, &a0, &b0, &rounds)).ok);
    }
}
