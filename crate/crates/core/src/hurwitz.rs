//! Lifting-invariant combinatorics over a reduced Schur cover `S_c → G`.
//!
//! `K(G,c) ≅ ker(S_c→G) × ker(ℤ^{c/G} → G^ab)` once a lift `x̂_γ` of a
//! representative of each class is fixed. Lifts of the other members of a
//! class are transported by conjugation, which is well defined in `S_c`
//! because lifts of commuting pairs with one entry in `c` commute there.

use std::sync::Arc;

use serde::Serialize;

use crate::arith;
use crate::cohomology::{reduced_schur_cover, schur_cover_for_primes, CentralExtension};
use crate::error::{CllError, Result};
use crate::group::{AbelianCoords, CSet, FiniteGroup, GammaGroup};

/// An element `(h, m)` of `K(G,c)`: `h ∈ ker(S_c→G)`, `m` indexed by `c/G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KElement {
    pub h: usize,
    pub m: Vec<i64>,
}

/// Classes of `c`, their representatives and a conjugation-consistent lift
/// system into a cover of `G` in which that system is well defined.
///
/// Invariants: `rep_lifts[i]` lies over `class_reps[i]`; `lifts[y]` lies over
/// `y` for every `y ∈ c` and `lifts[g⁻¹yg] = ĝ⁻¹·lifts[y]·ĝ`.
#[derive(Clone, Debug)]
pub struct CSetData {
    pub group: Arc<FiniteGroup>,
    pub cset: CSet,
    pub cover: Arc<CentralExtension>,
    pub classes: Vec<Vec<usize>>,
    pub class_reps: Vec<usize>,
    pub rep_lifts: Vec<usize>,
    class_of: Vec<usize>,
    lifts: Vec<usize>,
    /// `G^ab` coordinates of each class.
    class_ab: Vec<Vec<u64>>,
    pub ab_factors: Vec<u64>,
    /// Exponent of the cover; units act through residues mod this.
    modulus: u64,
}

impl CSetData {
    /// Data over the reduced cover `S_c`, with a same-order lift per
    /// representative when one exists.
    pub fn new(group: Arc<FiniteGroup>, cset: CSet) -> Result<Self> {
        let cover = Arc::new(reduced_schur_cover(&group, &cset)?);
        let c2 = cover.clone();
        Self::with_cover(group, cset, cover, move |x| {
            let o = c2.base.element_order(x);
            let f = c2.fiber(x);
            Ok(f.iter().copied().find(|&l| c2.total.element_order(l) == o).unwrap_or(f[0]))
        })
    }

    /// Data over an explicit cover, with representative lifts from `choose`.
    pub fn with_cover(
        group: Arc<FiniteGroup>,
        cset: CSet,
        cover: Arc<CentralExtension>,
        choose: impl Fn(usize) -> Result<usize>,
    ) -> Result<Self> {
        let classes = cset.classes(&group);
        let class_reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        let rep_lifts = class_reps.iter().map(|&x| choose(x)).collect::<Result<Vec<_>>>()?;
        Self::assemble(group, cset, cover, classes, class_reps, rep_lifts)
    }

    /// The same data with another lift per representative.
    pub fn with_rep_lifts(&self, rep_lifts: Vec<usize>) -> Result<Self> {
        Self::assemble(
            self.group.clone(),
            self.cset.clone(),
            self.cover.clone(),
            self.classes.clone(),
            self.class_reps.clone(),
            rep_lifts,
        )
    }

    fn assemble(
        group: Arc<FiniteGroup>,
        cset: CSet,
        cover: Arc<CentralExtension>,
        classes: Vec<Vec<usize>>,
        class_reps: Vec<usize>,
        rep_lifts: Vec<usize>,
    ) -> Result<Self> {
        if !Arc::ptr_eq(&cover.base, &group) && cover.base.canonical_hash() != group.canonical_hash() {
            return Err(CllError::Precondition("cover is not over the given group".into()));
        }
        let g = &group;
        let t = &cover.total;
        let mut class_of = vec![usize::MAX; g.order()];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x] = i;
            }
        }
        let mut lifts = vec![usize::MAX; g.order()];
        for (i, (&x, &l)) in class_reps.iter().zip(&rep_lifts).enumerate() {
            if cover.proj.apply(l) != x {
                return Err(CllError::Precondition(format!("lift of class {i} does not lie over its representative")));
            }
            lifts[x] = l;
            let mut stack = vec![x];
            while let Some(y) = stack.pop() {
                for &s in g.gens() {
                    let sl = cover.fiber(s)[0];
                    let z = g.conj(y, s);
                    let zl = t.conj(lifts[y], sl);
                    if lifts[z] == usize::MAX {
                        lifts[z] = zl;
                        stack.push(z);
                    } else if lifts[z] != zl {
                        return Err(CllError::VerificationFailed(format!(
                            "conjugation transport of lifts is inconsistent at {z}"
                        )));
                    }
                }
            }
        }
        let comm = g.commutator_subgroup();
        let (ab, coset) = g.quotient(&comm)?;
        let all: Vec<usize> = ab.elements().collect();
        let coords = AbelianCoords::new(&ab, &all);
        let ab_factors = coords.structure.factors.clone();
        let class_ab = class_reps
            .iter()
            .map(|&x| coords.coords(coset[x]).expect("abelian group").to_vec())
            .collect();
        let modulus = t.exponent();
        Ok(CSetData { group, cset, cover, classes, class_reps, rep_lifts, class_of, lifts, class_ab, ab_factors, modulus })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, x: usize) -> Option<usize> {
        (self.class_of[x] != usize::MAX).then_some(self.class_of[x])
    }

    /// The conjugation-consistent lift of `y ∈ c`.
    pub fn lift_of(&self, y: usize) -> Option<usize> {
        (self.lifts[y] != usize::MAX).then_some(self.lifts[y])
    }

    /// Elements of `ker(S_c → G)`.
    pub fn kernel(&self) -> &[usize] {
        &self.cover.kernel
    }

    fn check_unit(&self, a: i64) -> Result<u64> {
        let order = self.group.order() as u64;
        if arith::gcd(a.unsigned_abs(), order) != 1 {
            return Err(CllError::AlphaNotCoprime { alpha: a, order });
        }
        Ok(a.rem_euclid(self.modulus as i64) as u64)
    }

    fn check_q(&self, q: u64) -> Result<()> {
        let order = self.group.order() as u64;
        if arith::gcd(q, order) != 1 {
            return Err(CllError::QNotCoprime { q, order });
        }
        Ok(())
    }

    /// Residue of `q⁻¹` modulo the cover exponent.
    pub fn q_inverse(&self, q: u64) -> Result<u64> {
        self.check_q(q)?;
        arith::inv_mod((q % self.modulus) as i64, self.modulus)
            .ok_or(CllError::QNotCoprime { q, order: self.group.order() as u64 })
    }

    /// Class of `x_γ^a`.
    pub fn power_class(&self, class: usize, a: u64) -> usize {
        self.class_of[self.group.pow(self.class_reps[class], a as i64)]
    }

    /// Orbits of `γ ↦ γ^q` on `c/G`, each sorted, ordered by least class.
    pub fn q_orbits(&self, q: u64) -> Result<Vec<Vec<usize>>> {
        self.check_q(q)?;
        let k = self.num_classes();
        let image: Vec<usize> = (0..k).map(|i| self.power_class(i, q)).collect();
        let mut hit = vec![false; k];
        for &j in &image {
            hit[j] = true;
        }
        if hit.iter().any(|&h| !h) {
            return Err(CllError::VerificationFailed("q-th powering does not permute the classes".into()));
        }
        let mut seen = vec![false; k];
        let mut orbits = Vec::new();
        for i in 0..k {
            if seen[i] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                orbit.push(j);
                j = image[j];
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        Ok(orbits)
    }

    /// Number of `q`-power orbits on `c/G`.
    pub fn d_gcq(&self, q: u64) -> Result<usize> {
        Ok(self.q_orbits(q)?.len())
    }

    /// `w_α(γ) = x̂_γ^{-α} · (lift of x_γ^α)` per class, as kernel elements.
    pub fn w_alpha(&self, alpha: i64) -> Result<Vec<usize>> {
        let a = self.check_unit(alpha)?;
        let t = &self.cover.total;
        Ok(self
            .class_reps
            .iter()
            .zip(&self.rep_lifts)
            .map(|(&x, &l)| {
                let xa = self.group.pow(x, a as i64);
                t.mul(t.pow(l, -(a as i64)), self.lifts[xa])
            })
            .collect())
    }

    /// `W(m) = Π w(γ)^{m_γ}` for per-class values `w`.
    pub fn apply_w(&self, w: &[usize], m: &[i64]) -> usize {
        let t = &self.cover.total;
        w.iter().zip(m).fold(t.identity(), |acc, (&x, &k)| t.mul(acc, t.pow(x, k)))
    }

    /// `α∗(h, m) = (h^α·W_α(m), m^α)` where `m^α` moves the entry at `γ` to `γ^α`.
    pub fn alpha_star(&self, alpha: i64, z: &KElement) -> Result<KElement> {
        let w = self.w_alpha(alpha)?;
        Ok(self.alpha_star_with(&w, alpha.rem_euclid(self.modulus as i64) as u64, z))
    }

    fn alpha_star_with(&self, w: &[usize], a: u64, z: &KElement) -> KElement {
        let t = &self.cover.total;
        let h = t.mul(t.pow(z.h, a as i64), self.apply_w(w, &z.m));
        let mut m = vec![0; z.m.len()];
        for (i, &v) in z.m.iter().enumerate() {
            m[self.power_class(i, a)] = v;
        }
        KElement { h, m }
    }

    /// Whether `m` maps to the identity of `G^ab`.
    pub fn in_ab_kernel(&self, m: &[i64]) -> bool {
        self.ab_factors.iter().enumerate().all(|(j, &f)| {
            let s: i64 = m.iter().zip(&self.class_ab).map(|(&v, c)| v * c[j] as i64).sum();
            s.rem_euclid(f as i64) == 0
        })
    }

    /// Vectors on `c/G` constant on `q`-orbits with entries `≥ min` summing to `n`.
    pub fn enumerate_vectors(&self, q: u64, n: u64, min: u64) -> Result<Vec<Vec<u64>>> {
        let orbits = self.q_orbits(q)?;
        let mut out = Vec::new();
        let mut vals = vec![0u64; orbits.len()];
        fn rec(orbits: &[Vec<usize>], i: usize, left: u64, min: u64, vals: &mut [u64], k: usize, out: &mut Vec<Vec<u64>>) {
            if i == orbits.len() {
                if left == 0 {
                    let mut v = vec![0; k];
                    for (o, &x) in orbits.iter().zip(vals.iter()) {
                        for &c in o {
                            v[c] = x;
                        }
                    }
                    out.push(v);
                }
                return;
            }
            let s = orbits[i].len() as u64;
            let mut x = min;
            while x * s <= left {
                vals[i] = x;
                rec(orbits, i + 1, left - x * s, min, vals, k, out);
                x += 1;
            }
        }
        rec(&orbits, 0, n, min, &mut vals, self.num_classes(), &mut out);
        Ok(out)
    }

    /// `b(G,c,q,n)`, optionally restricted to `h` in `allowed`.
    fn b_sum(&self, q: u64, n: u64, allowed: impl Fn(usize) -> bool) -> Result<u64> {
        let qi = self.q_inverse(q)?;
        let w = self.w_alpha(qi as i64)?;
        let t = &self.cover.total;
        let mut hist = vec![0u64; t.order()];
        for &h in self.kernel() {
            if allowed(h) {
                hist[t.pow(h, q as i64 - 1)] += 1;
            }
        }
        let mut total = 0;
        for v in self.enumerate_vectors(q, n, 0)? {
            let m: Vec<i64> = v.iter().map(|&x| x as i64).collect();
            if self.in_ab_kernel(&m) {
                total += hist[t.pow(self.apply_w(&w, &m), q as i64)];
            }
        }
        Ok(total)
    }

    /// `Σ_{h ∈ ker(S_c→G)} #{m : W_{q⁻¹}(m)^q = h^{q−1}}` over vectors constant
    /// on `q`-orbits summing to `n` with trivial image in `G^ab`.
    pub fn b_count(&self, q: u64, n: u64) -> Result<u64> {
        self.b_sum(q, n, |_| true)
    }

    /// Elements `z = (h, m)` of `K(G,c)` with `q⁻¹∗z = z`, entries `≥ min`
    /// summing to `n` and `m` trivial in `G^ab`. Enumerates all compositions
    /// and applies the action directly.
    pub fn count_frobenius_fixed(&self, q: u64, n: u64, min: u64) -> Result<u64> {
        let qi = self.q_inverse(q)?;
        let w = self.w_alpha(qi as i64)?;
        let k = self.num_classes();
        let mut count = 0;
        let mut m = vec![0i64; k];
        fn rec(d: &CSetData, w: &[usize], a: u64, i: usize, left: i64, min: i64, m: &mut [i64], count: &mut u64) {
            let k = m.len();
            if k == 0 {
                return;
            }
            if i == k - 1 {
                if left < min {
                    return;
                }
                m[i] = left;
                if d.in_ab_kernel(m) {
                    for &h in d.kernel() {
                        let z = KElement { h, m: m.to_vec() };
                        if d.alpha_star_with(w, a, &z) == z {
                            *count += 1;
                        }
                    }
                }
                return;
            }
            let mut x = min;
            while x <= left - min * (k - 1 - i) as i64 {
                m[i] = x;
                rec(d, w, a, i + 1, left - x, min, m, count);
                x += 1;
            }
        }
        if k == 0 {
            return Ok(u64::from(n == 0));
        }
        rec(self, &w, qi, 0, n as i64, min as i64, &mut m, &mut count);
        Ok(count)
    }
}

/// The compatible coverings over `G = H⋊Γ`: `S′` is the part of the Schur
/// cover of `G` prime to `q|Γ|`, `S̄²` the reduced cover of `Γ` for
/// `c₂ = Γ∖{1}`, and `S̄¹ = S′ ×_Γ S̄²` with projections `φ` and `ρ̃`.
#[derive(Clone, Debug)]
pub struct CompatibleCovers {
    pub q: u64,
    pub g: Arc<FiniteGroup>,
    pub rho: Vec<usize>,
    pub s_prime: Arc<CentralExtension>,
    pub s1: Arc<CentralExtension>,
    pub phi: Vec<usize>,
    pub rho_tilde: Vec<usize>,
    /// Data for `(G, c₁)` over `S̄¹`, lifts mapping under `φ` to the unique
    /// same-order lifts in `S′`.
    pub data1: CSetData,
    /// Data for `(Γ, c₂)` over its own reduced cover.
    pub data2: CSetData,
}

impl CompatibleCovers {
    pub fn new(hg: &GammaGroup, q: u64) -> Result<Self> {
        hg.check_coprime()?;
        let sd = hg.semidirect();
        let g = sd.group.clone();
        let gamma = hg.gamma.clone();
        let order = g.order() as u64;
        if arith::gcd(q, order) != 1 {
            return Err(CllError::QNotCoprime { q, order });
        }
        let rho = sd.proj.clone();
        let primes: Vec<u64> = arith::prime_divisors(order)
            .into_iter()
            .filter(|&p| !q.is_multiple_of(p) && !(gamma.order() as u64).is_multiple_of(p))
            .collect();
        let s_prime = schur_cover_for_primes(&g, &primes)?;
        let data2 = CSetData::new(gamma.clone(), CSet::nontrivial(&gamma))?;
        let s2 = data2.cover.clone();

        let sp = &s_prime.total;
        let mut pairs = Vec::new();
        let mut index = vec![vec![usize::MAX; s2.total.order()]; sp.order()];
        for a in sp.elements() {
            let over = rho[s_prime.proj.apply(a)];
            for &b in s2.fiber(over) {
                index[a][b] = pairs.len();
                pairs.push((a, b));
            }
        }
        let n1 = pairs.len();
        if n1 > crate::group::TABLE_CAP {
            return Err(CllError::CapExceeded { what: "fiber product table", size: n1, cap: crate::group::TABLE_CAP });
        }
        let e = index[sp.identity()][s2.total.identity()];
        let table: Vec<Vec<usize>> = pairs
            .iter()
            .map(|&(a, b)| pairs.iter().map(|&(c, d)| index[sp.mul(a, c)][s2.total.mul(b, d)]).collect())
            .collect();
        let s1_group = Arc::new(FiniteGroup::from_mult_table(&table, e)?);
        let phi: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let rho_tilde: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let proj: Vec<usize> = phi.iter().map(|&a| s_prime.proj.apply(a)).collect();
        let s1 = Arc::new(CentralExtension::new(s1_group, g.clone(), proj)?);

        let c1 = CSet::same_order_as_image(&g, &gamma, &rho);
        let data1 = CSetData::with_cover(g.clone(), c1, s1.clone(), |x| {
            let a = s_prime.unique_same_order_lift(x)?;
            let b = data2.lift_of(rho[x]).ok_or(CllError::NoSuchLift(x))?;
            Ok(index[a][b])
        })?;
        Ok(CompatibleCovers { q, g, rho, s_prime, s1, phi, rho_tilde, data1, data2 })
    }

    /// `b(G,c₁,q,n;δ)`: the sum restricted to `h ∈ ker(S̄¹→G)` with `φ(h) = η`,
    /// `η ∈ ker(S′→G)` the image of the generator under `δ`.
    pub fn b_delta(&self, n: u64, eta: usize) -> Result<u64> {
        if !self.s_prime.kernel.contains(&eta) {
            return Err(CllError::NotInKernel);
        }
        self.data1.b_sum(self.q, n, |h| self.phi[h] == eta)
    }

    /// `b(Γ,c₂,q,n)` on the quotient's own reduced cover.
    pub fn b_gamma(&self, n: u64) -> Result<u64> {
        self.data2.b_count(self.q, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    fn sd_data(r: u32) -> CSetData {
        let g = Arc::new(catalog::semidirect_inversion(3, r));
        let c = CSet::involutions(&g);
        CSetData::new(g, c).unwrap()
    }

    fn c2_data() -> CSetData {
        let g = Arc::new(catalog::cyclic(2));
        let c = CSet::nontrivial(&g);
        CSetData::new(g, c).unwrap()
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(c2_data().d_gcq(7).unwrap(), 1);
        assert_eq!(sd_data(2).d_gcq(7).unwrap(), 1);
        assert!(matches!(c2_data().d_gcq(4), Err(CllError::QNotCoprime { .. })));
        let c5 = Arc::new(catalog::cyclic(5));
        let d = CSetData::new(c5.clone(), CSet::nontrivial(&c5)).unwrap();
        // Powering by 2 cycles the four nontrivial classes; by 4 pairs them.
        assert_eq!(d.d_gcq(2).unwrap(), 1);
        assert_eq!(d.d_gcq(4).unwrap(), 2);
        assert_eq!(d.d_gcq(11).unwrap(), 4);
    }

    #[test]
    fn w_alpha_examples() {
        let d = sd_data(2);
        let e = d.cover.total.identity();
        assert_eq!(d.w_alpha(1).unwrap(), vec![e]);
        assert!(c2_data().w_alpha(3).unwrap().iter().all(|&x| x == c2_data().cover.total.identity()));
        assert!(matches!(d.w_alpha(3), Err(CllError::AlphaNotCoprime { .. })));
        let w = d.w_alpha(7).unwrap();
        for &l in d.cover.fiber(d.class_reps[0]) {
            let alt = d.with_rep_lifts(vec![l]).unwrap();
            assert_eq!(alt.w_alpha(7).unwrap(), w);
        }
    }

    #[test]
    fn vectors() {
        let c2 = c2_data();
        assert_eq!(c2.enumerate_vectors(3, 5, 0).unwrap(), vec![vec![5]]);
        assert!(c2.enumerate_vectors(3, 5, 6).unwrap().is_empty());
        let c3 = Arc::new(catalog::cyclic(3));
        let d = CSetData::new(c3.clone(), CSet::nontrivial(&c3)).unwrap();
        assert_eq!(d.enumerate_vectors(2, 6, 0).unwrap(), vec![vec![3, 3]]);
        assert_eq!(d.enumerate_vectors(7, 4, 1).unwrap(), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
    }

    #[test]
    fn b_for_cyclic_two() {
        let d = c2_data();
        for n in 0..12 {
            assert_eq!(d.b_count(7, n).unwrap(), u64::from(n % 2 == 0));
            assert_eq!(d.count_frobenius_fixed(7, n, 0).unwrap(), u64::from(n % 2 == 0));
        }
        assert_eq!(d.count_frobenius_fixed(7, 4, 5).unwrap(), 0);
    }

    #[test]
    fn delta_count_equals_quotient_count_and_splits() {
        let hg = catalog::inversion_gamma(3, 2);
        let cc = CompatibleCovers::new(&hg, 7).unwrap();
        assert_eq!(cc.s1.kernel_order(), 3);
        let direct = reduced_schur_cover(&cc.g, &cc.data1.cset).unwrap();
        assert_eq!(direct.kernel_order(), cc.s1.kernel_order());
        for n in 0..=8 {
            let mut sum = 0;
            for &eta in &cc.s_prime.kernel {
                let b = cc.b_delta(n, eta).unwrap();
                assert_eq!(b, cc.b_gamma(n).unwrap(), "n={n} eta={eta}");
                sum += b;
            }
            assert_eq!(sum, cc.data1.b_count(7, n).unwrap());
        }
    }
}
