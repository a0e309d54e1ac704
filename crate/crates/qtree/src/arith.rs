//! The structure `M = N ∪ T` with successor, addition and multiplication,
//! the pairing polynomial and the axiom checkers.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;
use crate::term::{Term, MAX_A_ARITY};

/// An element of the model: a standard natural or a tree term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Element {
    Std(BigUint),
    NonStd(Term),
}

impl Element {
    pub fn std(v: u64) -> Element {
        Element::Std(BigUint::from(v))
    }

    pub fn zero() -> Element {
        Element::Std(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Element::Std(v) if v.is_zero())
    }

    pub fn is_std(&self) -> bool {
        matches!(self, Element::Std(_))
    }

    pub fn term(&self) -> Option<&Term> {
        match self {
            Element::NonStd(t) => Some(t),
            Element::Std(_) => None,
        }
    }
}

impl From<Term> for Element {
    fn from(t: Term) -> Element {
        Element::NonStd(t)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Std(v) => write!(f, "{v}"),
            Element::NonStd(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Element, D::Error> {
        let text = String::deserialize(d)?;
        crate::parse::parse_element(&text).map_err(serde::de::Error::custom)
    }
}

pub fn succ(e: &Element) -> Element {
    match e {
        Element::Std(v) => Element::Std(v + 1u32),
        Element::NonStd(t) => Element::NonStd(t.succ()),
    }
}

/// Predecessor, with `pred(0) = 0`.
pub fn pred(e: &Element) -> Element {
    match e {
        Element::Std(v) if v.is_zero() => Element::zero(),
        Element::Std(v) => Element::Std(v - 1u32),
        Element::NonStd(t) => Element::NonStd(t.pred()),
    }
}

pub fn add(a: &Element, b: &Element) -> Element {
    match (a, b) {
        (Element::Std(x), Element::Std(y)) => Element::Std(x + y),
        (Element::NonStd(x), Element::NonStd(y)) => Element::NonStd(Term::pair(x, y)),
        (Element::Std(m), Element::NonStd(w)) | (Element::NonStd(w), Element::Std(m)) => {
            Element::NonStd(w.shift(&BigInt::from(m.clone())))
        }
    }
}

/// Multiplication. Fails only when `w * n` would expand `A_n` for an `n`
/// beyond [`MAX_A_ARITY`]; use [`is_mul`] to test such products.
pub fn mul(a: &Element, b: &Element) -> Result<Element, ModelError> {
    Ok(match (a, b) {
        (Element::Std(x), Element::Std(y)) => Element::Std(x * y),
        (Element::NonStd(_), Element::Std(n)) if n.is_zero() => Element::zero(),
        (Element::NonStd(w), Element::Std(n)) => {
            let n = n
                .to_u64()
                .filter(|n| *n <= MAX_A_ARITY)
                .ok_or_else(|| ModelError::ArityTooLarge(n.to_string()))?;
            Element::NonStd(Term::apply_a(n, w)?)
        }
        (Element::Std(n), Element::NonStd(v)) => {
            Element::NonStd(Term::d(0, 0).shift(&(BigInt::from(n.clone()) * v.chi())))
        }
        (Element::NonStd(w), Element::NonStd(v)) => Element::NonStd(Term::r(v.chi(), w)),
    })
}

pub fn is_succ(a: &Element, b: &Element) -> bool {
    &succ(a) == b
}

pub fn is_add(a: &Element, b: &Element, c: &Element) -> bool {
    match (a, b, c) {
        (Element::NonStd(_), Element::NonStd(_), Element::Std(_)) => false,
        _ => &add(a, b) == c,
    }
}

/// Whether `a * b = c`, without expanding large `A_n`.
pub fn is_mul(a: &Element, b: &Element, c: &Element) -> bool {
    match (a, b) {
        (Element::NonStd(w), Element::Std(n)) if !n.is_zero() => match c {
            Element::NonStd(t) => t.is_a_image(&BigInt::from(n.clone()), w),
            Element::Std(_) => false,
        },
        _ => mul(a, b).is_ok_and(|p| &p == c),
    }
}

/// `pi(x, y) = (x + y)^2 + x`.
pub fn pairing_pi(x: &Element, y: &Element) -> Element {
    let s = add(x, y);
    // s * s multiplies two elements of the same kind, so no A_n arises.
    let sq = mul(&s, &s).expect("square never expands A_n");
    add(&sq, x)
}

/// Left fold of [`pairing_pi`].
pub fn iter_pi(xs: &[Element]) -> Result<Element, ModelError> {
    if xs.len() < 2 {
        return Err(ModelError::ShortSequence);
    }
    let mut acc = pairing_pi(&xs[0], &xs[1]);
    for x in &xs[2..] {
        acc = pairing_pi(&acc, x);
    }
    Ok(acc)
}

/// `G(x, y) = (x + y)^2 + x + 1`.
pub fn g_pair(x: &Element, y: &Element) -> Element {
    succ(&pairing_pi(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
    Theta,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Q1,
        Axiom::Q2,
        Axiom::Q3,
        Axiom::Q4,
        Axiom::Q5,
        Axiom::Q6,
        Axiom::Q7,
        Axiom::Theta,
    ];

    pub fn arity(self) -> usize {
        match self {
            Axiom::Q2 | Axiom::Q3 | Axiom::Q4 | Axiom::Q6 => 1,
            Axiom::Q1 | Axiom::Q5 | Axiom::Q7 => 2,
            Axiom::Theta => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Q1 => "Q1",
            Axiom::Q2 => "Q2",
            Axiom::Q3 => "Q3",
            Axiom::Q4 => "Q4",
            Axiom::Q5 => "Q5",
            Axiom::Q6 => "Q6",
            Axiom::Q7 => "Q7",
            Axiom::Theta => "Theta",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one axiom instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub instance: String,
}

/// Evaluates one instance of an axiom.
pub fn check_axiom(axiom: Axiom, sample: &[Element]) -> Result<Verdict, ModelError> {
    if sample.len() != axiom.arity() {
        return Err(ModelError::ArityMismatch {
            expected: axiom.arity(),
            got: sample.len(),
        });
    }
    let zero = Element::zero();
    let x = &sample[0];
    let (pass, instance) = match axiom {
        Axiom::Q1 => {
            let y = &sample[1];
            let (sx, sy) = (succ(x), succ(y));
            let pass = x == y || sx != sy;
            (pass, format!("{x} != {y} -> S({x}) = {sx} != S({y}) = {sy}"))
        }
        Axiom::Q2 => {
            let sx = succ(x);
            (sx != zero, format!("S({x}) = {sx} != 0"))
        }
        Axiom::Q3 => {
            let p = pred(x);
            let sp = succ(&p);
            let pass = x.is_zero() || &sp == x;
            (pass, format!("{x} = 0 or {x} = S({p}) = {sp}"))
        }
        Axiom::Q4 => {
            let s = add(x, &zero);
            (&s == x, format!("{x} + 0 = {s}"))
        }
        Axiom::Q5 => {
            let y = &sample[1];
            let lhs = add(x, &succ(y));
            let rhs = succ(&add(x, y));
            (lhs == rhs, format!("{x} + S({y}) = {lhs}, S({x} + {y}) = {rhs}"))
        }
        Axiom::Q6 => {
            let p = mul(x, &zero)?;
            (p == zero, format!("{x} * 0 = {p}"))
        }
        Axiom::Q7 => {
            let y = &sample[1];
            let lhs = mul(x, &succ(y))?;
            let rhs = add(&mul(x, y)?, x);
            (lhs == rhs, format!("{x} * S({y}) = {lhs}, {x} * {y} + {x} = {rhs}"))
        }
        Axiom::Theta => {
            let (y, z, w) = (&sample[1], &sample[2], &sample[3]);
            let l = pairing_pi(x, y);
            let r = pairing_pi(z, w);
            let pass = l != r || (x == z && y == w);
            (
                pass,
                format!("pi({x},{y}) = {l}, pi({z},{w}) = {r}"),
            )
        }
    };
    Ok(Verdict { pass, instance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Element {
        Element::NonStd(Term::pair(&Term::d(1, 0), &Term::d(2, 1)))
    }

    #[test]
    fn successor_cases() {
        assert_eq!(succ(&Element::std(4)), Element::std(5));
        assert_eq!(pred(&Element::zero()), Element::zero());
        assert_eq!(
            succ(&Element::NonStd(Term::d(2, -1))),
            Element::NonStd(Term::d(2, 0))
        );
    }

    #[test]
    fn addition_cases() {
        assert_eq!(add(&Element::std(2), &Element::std(3)), Element::std(5));
        let t = w().term().unwrap().clone();
        assert_eq!(
            add(&Element::std(2), &w()),
            Element::NonStd(t.succ().succ())
        );
        let v = Term::d(3, 0);
        assert_eq!(
            add(&w(), &Element::NonStd(v.clone())),
            Element::NonStd(Term::pair(&t, &v))
        );
    }

    #[test]
    fn multiplication_cases() {
        let t = w().term().unwrap().clone();
        assert_eq!(
            mul(&w(), &Element::std(2)).unwrap(),
            Element::NonStd(Term::pair(&t, &t))
        );
        let v = Term::d(5, -2);
        assert_eq!(
            mul(&Element::std(3), &Element::NonStd(v.clone())).unwrap(),
            Element::NonStd(Term::d(0, -6))
        );
        let v1 = Term::d(5, 1);
        assert_eq!(
            mul(&w(), &Element::NonStd(v1)).unwrap(),
            Element::NonStd(Term::r(1, &t))
        );
        assert_eq!(
            mul(&Element::zero(), &Element::NonStd(v)).unwrap(),
            Element::NonStd(Term::d(0, 0))
        );
        assert_eq!(mul(&w(), &Element::zero()).unwrap(), Element::zero());
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pairing_pi(&Element::std(1), &Element::std(2)), Element::std(10));
        assert_eq!(pairing_pi(&Element::zero(), &Element::zero()), Element::zero());
        let t = w().term().unwrap().clone();
        let v = Term::d(3, 4);
        let s = Term::pair(&t, &v);
        assert_eq!(
            pairing_pi(&w(), &Element::NonStd(v.clone())),
            Element::NonStd(Term::pair(&Term::r(4, &s), &t))
        );
        assert_eq!(
            iter_pi(&[Element::std(1), Element::std(2), Element::std(3)]).unwrap(),
            Element::std(179)
        );
        assert_eq!(iter_pi(&[Element::std(1)]), Err(ModelError::ShortSequence));
        assert_eq!(g_pair(&Element::zero(), &Element::zero()), Element::std(1));
        assert_eq!(g_pair(&Element::std(1), &Element::std(2)), Element::std(11));
    }

    #[test]
    fn axiom_examples() {
        assert!(check_axiom(Axiom::Q5, &[w(), Element::std(2)]).unwrap().pass);
        assert!(check_axiom(Axiom::Q4, &[Element::std(7)]).unwrap().pass);
        assert!(matches!(
            check_axiom(Axiom::Q4, &[]),
            Err(ModelError::ArityMismatch { .. })
        ));
        let v = check_axiom(Axiom::Theta, &[w(), Element::std(1), Element::std(1), w()]).unwrap();
        assert!(v.pass);
    }

    #[test]
    fn graph_relations_avoid_expansion() {
        let t = Term::d(1, 0);
        let huge = Element::Std(BigUint::from(10u32).pow(30));
        assert!(mul(&Element::NonStd(t.clone()), &huge).is_err());
        assert!(!is_mul(&Element::NonStd(t.clone()), &huge, &Element::NonStd(t.clone())));
        let a3 = Term::apply_a(3, &t).unwrap();
        assert!(is_mul(&Element::NonStd(t), &Element::std(3), &Element::NonStd(a3)));
    }
}
