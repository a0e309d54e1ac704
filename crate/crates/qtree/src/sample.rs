//! Random and exhaustive generators of terms and elements.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::Rng;

use crate::arith::Element;
use crate::index::Index;
use crate::term::Term;

/// Shape parameters for generated terms.
#[derive(Clone, Debug)]
pub struct TermShape {
    /// Largest node count before normalization.
    pub max_nodes: u32,
    pub indices: Vec<Index>,
    /// Levels of leaves and R-nodes.
    pub levels: RangeInclusive<i64>,
}

impl TermShape {
    pub fn new(max_nodes: u32, indices: RangeInclusive<u64>, levels: RangeInclusive<i64>) -> Self {
        TermShape {
            max_nodes,
            indices: indices.map(Index::small).collect(),
            levels,
        }
    }
}

/// A random term with at most `shape.max_nodes` constructor nodes.
pub fn random_term(rng: &mut impl Rng, shape: &TermShape) -> Term {
    gen_term(rng, shape, shape.max_nodes.max(1))
}

fn gen_term(rng: &mut impl Rng, shape: &TermShape, budget: u32) -> Term {
    if budget == 1 || rng.gen_bool(0.25) {
        let i = shape.indices[rng.gen_range(0..shape.indices.len())].clone();
        return Term::leaf(i, rng.gen_range(shape.levels.clone()));
    }
    if budget >= 3 && rng.gen_bool(0.65) {
        let left = rng.gen_range(1..=budget - 2);
        let l = gen_term(rng, shape, left);
        let r = gen_term(rng, shape, budget - 1 - left);
        return Term::pair(&l, &r);
    }
    let body = gen_term(rng, shape, budget - 1);
    Term::r(rng.gen_range(shape.levels.clone()), &body)
}

/// A random element: standard with probability `std_ratio`, drawn from
/// `0..=std_max`, and a random term otherwise.
pub fn random_element(rng: &mut impl Rng, shape: &TermShape, std_ratio: f64, std_max: u64) -> Element {
    if rng.gen_bool(std_ratio) {
        Element::std(rng.gen_range(0..=std_max))
    } else {
        Element::NonStd(random_term(rng, shape))
    }
}

/// Every normalized term of size at most `shape.max_nodes`, in term order.
pub fn all_terms(shape: &TermShape) -> Vec<Term> {
    let max = shape.max_nodes as usize;
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max + 1];
    if max == 0 {
        return Vec::new();
    }
    for i in &shape.indices {
        for m in shape.levels.clone() {
            by_size[1].push(Term::leaf(i.clone(), m));
        }
    }
    for size in 2..=max {
        let mut out = Vec::new();
        for m in shape.levels.clone() {
            for b in &by_size[size - 1] {
                out.push(Term::r(m, b));
            }
        }
        for ls in 1..size - 1 {
            let rs = size - 1 - ls;
            for l in &by_size[ls] {
                for r in &by_size[rs] {
                    out.push(Term::pair(l, r));
                }
            }
        }
        by_size[size] = out;
    }
    let set: BTreeSet<Term> = by_size
        .into_iter()
        .flatten()
        .filter(|t| t.size() <= max as u64)
        .collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_terms_respect_bounds() {
        let shape = TermShape::new(8, 0..=4, -4..=4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let t = random_term(&mut rng, &shape);
            assert!(t.size() <= 8);
        }
    }

    #[test]
    fn enumeration_counts() {
        let shape = TermShape::new(1, 0..=2, -2..=2);
        assert_eq!(all_terms(&shape).len(), 15);
        let shape = TermShape::new(2, 0..=0, 0..=0);
        // d(0,0) and r(0,d(0,0)).
        assert_eq!(all_terms(&shape).len(), 2);
    }
}
