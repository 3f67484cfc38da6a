//! ℓ-Schur covers, full Schur covers and reduced covers `S_c`.
//!
//! Covers are built from the relation-module cocycles, which are a
//! deterministic function of the multiplication table and generator list, and
//! cached per session by table hash so every caller sees the same cover.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::hopf::RelationModule;
use super::{extension_from_cocycles, CentralExtension, Cocycle2};
use crate::arith;
use crate::error::{CllError, Result};
use crate::group::{CSet, FiniteGroup};

type CoverCache = Mutex<HashMap<(String, u64), Arc<CentralExtension>>>;

fn cache() -> &'static CoverCache {
    static CACHE: OnceLock<CoverCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(g: &Arc<FiniteGroup>, key: u64, build: impl FnOnce() -> Result<CentralExtension>) -> Result<Arc<CentralExtension>> {
    let k = (g.canonical_hash(), key);
    if let Some(e) = cache().lock().expect("cover cache").get(&k) {
        return Ok(e.clone());
    }
    let ext = Arc::new(build()?);
    // A concurrent builder may have won; keep the first entry.
    Ok(cache().lock().expect("cover cache").entry(k).or_insert(ext).clone())
}

fn trivial_extension(g: &Arc<FiniteGroup>) -> Result<CentralExtension> {
    CentralExtension::new(g.clone(), g.clone(), g.elements().collect())
}

fn from_parts(g: &Arc<FiniteGroup>, parts: Vec<(Vec<u64>, Vec<Cocycle2>)>) -> Result<CentralExtension> {
    let (factors, cocycles): (Vec<u64>, Vec<Cocycle2>) =
        parts.into_iter().flat_map(|(f, c)| f.into_iter().zip(c)).unzip();
    if factors.is_empty() {
        return trivial_extension(g);
    }
    let expected: u64 = factors.iter().product();
    let ext = extension_from_cocycles(g, &factors, &cocycles)?;
    if !ext.stem_verified || ext.kernel_order() as u64 != expected {
        return Err(CllError::SearchExhausted(format!(
            "relation-module cocycle did not give a stem cover of order {}",
            g.order() as u64 * expected
        )));
    }
    Ok(ext)
}

/// Stem extension of `g` with kernel `H₂(g)(ℓ)`.
pub fn l_schur_cover(g: &Arc<FiniteGroup>, ell: u64) -> Result<Arc<CentralExtension>> {
    schur_cover_for_primes(g, &[ell])
}

/// Stem extension of `g` with kernel the full multiplier `H₂(g)`.
pub fn full_schur_cover(g: &Arc<FiniteGroup>) -> Result<Arc<CentralExtension>> {
    schur_cover_for_primes(g, &arith::prime_divisors(g.order() as u64))
}

/// Stem extension of `g` whose kernel is the part of `H₂(g)` supported on
/// `primes`; primes not dividing `|g|` contribute nothing.
pub fn schur_cover_for_primes(g: &Arc<FiniteGroup>, primes: &[u64]) -> Result<Arc<CentralExtension>> {
    let mut relevant: Vec<u64> = primes.iter().copied().filter(|&p| (g.order() as u64).is_multiple_of(p)).collect();
    relevant.sort_unstable();
    relevant.dedup();
    let key = relevant.iter().product();
    cached(g, key, || {
        let mut parts = Vec::new();
        for &p in &relevant {
            let m = RelationModule::new(g.clone(), p, None)?;
            parts.push((m.factors.clone(), m.cover_cocycles()));
        }
        from_parts(g, parts)
    })
}

/// `S_c`: the full Schur cover modulo the commutators `[x̂, ŷ]` of lifts of
/// commuting pairs with `x ∈ c`. The kernel of `S_c → G` is `H₂(G, c)`.
pub fn reduced_schur_cover(g: &Arc<FiniteGroup>, c: &CSet) -> Result<CentralExtension> {
    let full = full_schur_cover(g)?;
    let t = &full.total;
    let mut seeds = Vec::new();
    for &x in c.members() {
        let xl = full.fiber(x)[0];
        for y in g.elements() {
            if g.mul(x, y) == g.mul(y, x) {
                seeds.push(t.commutator(xl, full.fiber(y)[0]));
            }
        }
    }
    seeds.sort_unstable();
    seeds.dedup();
    let n = t.normal_closure(&seeds, &[]);
    let (q, coset) = t.quotient(&n)?;
    let mut proj = vec![usize::MAX; q.order()];
    for x in t.elements() {
        proj[coset[x]] = full.proj.apply(x);
    }
    CentralExtension::new(Arc::new(q), g.clone(), proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn l_covers() {
        let v = Arc::new(catalog::elem_abelian(3, 2));
        let e = l_schur_cover(&v, 3).unwrap();
        assert_eq!(e.total.order(), 27);
        assert!(e.stem_verified && !e.total.is_abelian());
        let again = l_schur_cover(&v, 3).unwrap();
        assert!(Arc::ptr_eq(&e, &again));

        let c9 = Arc::new(catalog::cyclic(9));
        assert_eq!(l_schur_cover(&c9, 3).unwrap().total.order(), 9);

        let sd = Arc::new(catalog::semidirect_inversion(3, 2));
        let e = l_schur_cover(&sd, 3).unwrap();
        assert_eq!(e.total.order(), 54);
        assert_eq!(e.kernel_structure().factors, vec![3]);

        let h = Arc::new(catalog::heisenberg(3));
        let e = l_schur_cover(&h, 3).unwrap();
        assert_eq!(e.total.order(), 243);
        assert!(e.stem_verified);
    }

    #[test]
    fn reduced_covers() {
        let c2 = Arc::new(catalog::cyclic(2));
        let e = reduced_schur_cover(&c2, &CSet::nontrivial(&c2)).unwrap();
        assert_eq!(e.total.order(), 2);
        let s3 = Arc::new(catalog::dihedral(3));
        let e = reduced_schur_cover(&s3, &CSet::involutions(&s3)).unwrap();
        assert_eq!(e.total.order(), 6);
        let sd = Arc::new(catalog::semidirect_inversion(3, 2));
        let e = reduced_schur_cover(&sd, &CSet::involutions(&sd)).unwrap();
        assert_eq!(e.kernel_order(), 3);
    }

    #[test]
    fn involutions_lift_uniquely() {
        let sd = Arc::new(catalog::semidirect_inversion(3, 2));
        let e = l_schur_cover(&sd, 3).unwrap();
        for x in sd.elements().filter(|&x| sd.element_order(x) == 2) {
            let l = e.unique_same_order_lift(x).unwrap();
            assert_eq!(e.total.element_order(l), 2);
        }
        let r = sd.elements().find(|&x| sd.element_order(x) == 3).unwrap();
        assert!(matches!(e.unique_same_order_lift(r), Err(CllError::Precondition(_))));
        assert_eq!(e.unique_same_order_lift(sd.identity()).unwrap(), e.total.identity());
    }
}
