//! `H²(G, ℤ/ℓᴺ)` as normalized bar cocycles modulo coboundaries.
//!
//! A normalized cocycle is determined by its values `α(x, s)` on generators:
//! the identity with `z = s` along tree edges gives
//! `α(x, p·s) = α(x, p) + α(xp, s) − α(p, s)`. The remaining constraints are
//! the same identity along non-tree edges and `α(1, s) = 0`; identities for
//! generator `z` imply all identities.

use std::sync::Arc;

use super::hopf::check_cap;
use super::presentation::CayleyPresentation;
use super::Cocycle2;
use crate::arith;
use crate::error::{CllError, Result};
use crate::group::abelian::sort_primary;
use crate::group::FiniteGroup;
use crate::linalg::{Echelon, Subquotient, Zpk};

/// `H²(G, ℤ/ℓᴺ)` with one representative cocycle per invariant factor.
#[derive(Clone, Debug)]
pub struct H2 {
    pub modulus: u64,
    pub factors: Vec<u64>,
    pub cocycles: Vec<Cocycle2>,
}

pub fn h2(g: &FiniteGroup, ell: u64, n_exp: u32) -> Result<H2> {
    check_cap(g)?;
    let ring = Zpk::new(ell, n_exp);
    let n = g.order();
    let pres = CayleyPresentation::new(g);
    let k = pres.gens.len();
    let cols = n * k;
    let unknown = |x: usize, i: usize| x * k + i;
    let parent: Vec<Option<(usize, usize)>> = g
        .elements()
        .map(|y| {
            pres.words[y].last().map(|&i| (g.mul(y, g.inv(pres.gens[i])), i))
        })
        .collect();
    let mut order: Vec<usize> = g.elements().collect();
    order.sort_by_key(|&y| pres.words[y].len());

    let mut eqs = Echelon::new(ring, cols);
    for i in 0..k {
        let mut row = vec![0u64; cols];
        row[unknown(g.identity(), i)] = 1;
        eqs.insert(row);
    }
    let mut forms = vec![vec![0i64; cols]; n];
    for x in g.elements() {
        for &y in order.iter().skip(1) {
            let (p, i) = parent[y].unwrap();
            let mut f = forms[p].clone();
            f[unknown(g.mul(x, p), i)] += 1;
            f[unknown(p, i)] -= 1;
            forms[y] = f;
        }
        for &(y, i) in &pres.nontree {
            let y2 = g.mul(y, pres.gens[i]);
            // α(x, y·s) − α(x, y) − α(xy, s) + α(y, s) = 0
            let mut row: Vec<i64> = forms[y2].iter().zip(&forms[y]).map(|(a, b)| a - b).collect();
            row[unknown(g.mul(x, y), i)] -= 1;
            row[unknown(y, i)] += 1;
            eqs.insert(row.into_iter().map(|v| ring.reduce(v)).collect());
        }
    }
    // Coboundaries of indicator functions: δf(x, s) = f(x) + f(s) − f(xs).
    let image: Vec<Vec<u64>> = g
        .elements()
        .filter(|&h| h != g.identity())
        .map(|h| {
            let mut v = vec![0i64; cols];
            for x in g.elements() {
                for (i, &s) in pres.gens.iter().enumerate() {
                    let val = i64::from(x == h) + i64::from(s == h) - i64::from(g.mul(x, s) == h);
                    v[unknown(x, i)] += val;
                }
            }
            v.into_iter().map(|x| ring.reduce(x)).collect()
        })
        .collect();
    let sq = Subquotient::new(ring, &eqs.rows(), cols, &image);
    let mut cocycles = Vec::new();
    for z in &sq.generators {
        let mut values = vec![0u64; n * n];
        let mut row = vec![0u64; n];
        for x in g.elements() {
            row.iter_mut().for_each(|v| *v = 0);
            for &y in order.iter().skip(1) {
                let (p, i) = parent[y].unwrap();
                let v = ring.add(row[p], ring.sub(z[unknown(g.mul(x, p), i)], z[unknown(p, i)]));
                row[y] = v;
                values[x * n + y] = v;
            }
        }
        let c = Cocycle2 { order: n, modulus: ring.m, values };
        c.verify(g)?;
        cocycles.push(c);
    }
    let mut factors = sq.factors.clone();
    sort_primary(&mut factors);
    Ok(H2 { modulus: ring.m, factors, cocycles })
}

/// `H₂(G,ℤ)(ℓ)` by universal coefficients: with ℓᴺ ≥ exp(G)·|G|,
/// `H²(G,ℤ/ℓᴺ) ≅ H₂(G)(ℓ) ⊕ G^ab(ℓ)`, so the multiplier is the multiset
/// difference of invariant factors.
pub fn schur_multiplier_uct(g: &Arc<FiniteGroup>, ell: u64) -> Result<Vec<u64>> {
    if !(g.order() as u64).is_multiple_of(ell) {
        check_cap(g)?;
        return Ok(Vec::new());
    }
    let bound = g.exponent() * g.order() as u64;
    let mut n_exp = 1;
    while ell.pow(n_exp) < bound {
        n_exp += 1;
    }
    let h = h2(g, ell, n_exp)?;
    let mut rest = h.factors;
    for f in g.abelianization_invariants() {
        if f % ell != 0 || arith::prime_divisors(f) != [ell] {
            continue;
        }
        let pos = rest
            .iter()
            .position(|&x| x == f)
            .ok_or_else(|| CllError::Precondition(format!("abelianization factor {f} missing from H²")))?;
        rest.remove(pos);
    }
    Ok(rest)
}
