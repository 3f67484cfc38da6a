//! Finite abelian groups: primary invariants, bases and discrete-log coordinates.

use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::arith;

/// A finite abelian group in primary form.
///
/// Invariants: `factors` are prime powers sorted by prime then exponent;
/// `basis[i]` has order `factors[i]` and the basis elements are independent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianStructure<E> {
    pub factors: Vec<u64>,
    pub basis: Vec<E>,
}

impl<E> AbelianStructure<E> {
    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factors belonging to the prime `p`.
    pub fn p_factors(&self, p: u64) -> Vec<u64> {
        self.factors.iter().copied().filter(|&f| f % p == 0).collect()
    }
}

/// Sorts primary factors by prime, then by size.
pub fn sort_primary(factors: &mut [u64]) {
    factors.sort_by_key(|&f| (arith::prime_divisors(f)[0], f));
}

/// Primary invariants of the abelian subgroup `sub` of `g`.
pub fn primary_invariants_of(g: &FiniteGroup, sub: &[usize]) -> Vec<u64> {
    let n = sub.len() as u64;
    let mut out = Vec::new();
    for p in arith::prime_divisors(n) {
        // counts[k] = #{x : x^(p^k) = 1}, a power of p.
        let mut counts = vec![1u64];
        let mut pk = 1i64;
        loop {
            pk *= p as i64;
            let c = sub.iter().filter(|&&x| g.pow(x, pk) == g.identity()).count() as u64;
            counts.push(c);
            if c == arith::p_part(n, p) {
                break;
            }
        }
        // Number of cyclic factors of order ≥ p^k is log_p(counts[k]/counts[k-1]).
        let ge: Vec<u32> = (1..counts.len()).map(|k| arith::valuation(counts[k] / counts[k - 1], p)).collect();
        for k in 1..=ge.len() {
            let at_least_k = ge[k - 1];
            let at_least_next = if k < ge.len() { ge[k] } else { 0 };
            for _ in 0..(at_least_k - at_least_next) {
                out.push(p.pow(k as u32));
            }
        }
    }
    sort_primary(&mut out);
    out
}

/// An abelian subgroup of a table group with a primary basis and a
/// coordinate lookup for every member.
#[derive(Clone, Debug)]
pub struct AbelianCoords {
    pub structure: AbelianStructure<usize>,
    /// Element index → coordinate vector (or `None` outside the subgroup).
    coords: Vec<Option<Vec<u64>>>,
    /// Mixed-radix index of a coordinate vector → element.
    elements: Vec<usize>,
}

impl AbelianCoords {
    /// `sub` must be an abelian subgroup of `g`.
    pub fn new(g: &FiniteGroup, sub: &[usize]) -> Self {
        let factors = primary_invariants_of(g, sub);
        let mut basis: Vec<usize> = Vec::new();
        let found = choose_basis(g, sub, &factors, &mut basis);
        assert!(found, "primary basis exists for an abelian group");
        let structure = AbelianStructure { factors, basis };
        let mut coords = vec![None; g.order()];
        let mut elements = Vec::with_capacity(sub.len());
        let total: u64 = structure.order();
        for idx in 0..total {
            let c = mixed_radix_digits(idx, &structure.factors);
            let x = structure
                .basis
                .iter()
                .zip(&c)
                .fold(g.identity(), |acc, (&b, &k)| g.mul(acc, g.pow(b, k as i64)));
            coords[x] = Some(c);
            elements.push(x);
        }
        AbelianCoords { structure, coords, elements }
    }

    pub fn coords(&self, x: usize) -> Option<&[u64]> {
        self.coords[x].as_deref()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.coords[x].is_some()
    }

    pub fn element(&self, c: &[u64]) -> usize {
        let mut idx = 0u64;
        for (i, &f) in self.structure.factors.iter().enumerate().rev() {
            idx = idx * f + c[i] % f;
        }
        self.elements[idx as usize]
    }

    pub fn members(&self) -> &[usize] {
        &self.elements
    }
}

/// Little-endian mixed-radix digits of `idx` in the given radices.
pub fn mixed_radix_digits(mut idx: u64, radices: &[u64]) -> Vec<u64> {
    radices
        .iter()
        .map(|&r| {
            let d = idx % r;
            idx /= r;
            d
        })
        .collect()
}

fn choose_basis(g: &FiniteGroup, sub: &[usize], factors: &[u64], basis: &mut Vec<usize>) -> bool {
    // Pick large factors first; each choice must enlarge the span by its order.
    let mut order: Vec<usize> = (0..factors.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(factors[i]));
    let mut chosen = vec![usize::MAX; factors.len()];
    if !backtrack(g, sub, factors, &order, 0, &mut chosen) {
        return false;
    }
    basis.clear();
    basis.extend(chosen);
    true
}

fn backtrack(g: &FiniteGroup, sub: &[usize], factors: &[u64], order: &[usize], pos: usize, chosen: &mut [usize]) -> bool {
    if pos == order.len() {
        return true;
    }
    let target = factors[order[pos]];
    let span_before: Vec<usize> = order[..pos].iter().map(|&i| chosen[i]).collect();
    let before = g.subgroup(&span_before).len() as u64;
    for &x in sub {
        if g.element_order(x) as u64 != target {
            continue;
        }
        let mut trial = span_before.clone();
        trial.push(x);
        if g.subgroup(&trial).len() as u64 == before * target {
            chosen[order[pos]] = x;
            if backtrack(g, sub, factors, order, pos + 1, chosen) {
                return true;
            }
        }
    }
    false
}
