//! Free nilpotent exponent-ℓ groups of class ≤ 3 realized through their Lie
//! algebras (Lazard correspondence) and a truncated BCH group law.
//!
//! Coordinates are taken on a graded Hall basis:
//! degree 1 `X_i`, degree 2 `[X_j, X_k]` with `j < k`, degree 3
//! `[X_a, [X_j, X_k]]` with `j < k` and `a ≥ j`.
//! An element is stored as its Lie logarithm, so `x^k` is scaling and `x⁻¹`
//! is negation.

pub mod aut;
pub mod collect;
pub mod demushkin;
pub mod pairing;
pub mod symplectic;
pub mod word;

use rand::Rng;

use crate::error::{CllError, Result};
use crate::linalg::Zpk;

pub use aut::ConstrainedAut;
pub use collect::{Basic, Collector};
pub use demushkin::DemushkinTrunc;
pub use pairing::{pairing_image, relator_matrix, PairingImage};
pub use symplectic::q_symplectic_completion;
pub use word::{Word, WordGroup};

/// Lie logarithm coordinates on the Hall basis, reduced mod ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NilElement(pub Vec<u64>);

impl NilElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct FreeNilGroup {
    m: usize,
    class: u8,
    ring: Zpk,
    pairs: Vec<(usize, usize)>,
    pair_index: Vec<usize>,
    triples: Vec<(usize, usize, usize)>,
    /// `ad[a * d2 + p]`: `[X_a, pair p]` as signed triple coordinates.
    ad: Vec<Vec<(usize, u64)>>,
    half: u64,
    twelfth: u64,
}

const NO_INDEX: usize = usize::MAX;

impl FreeNilGroup {
    pub fn new(m: usize, class: u8, ell: u64) -> Result<Self> {
        if ell < 3 || !crate::arith::is_prime(ell) || !(2..=3).contains(&class) || (class == 3 && ell < 5) {
            return Err(CllError::BadPrimeForClass { ell, class });
        }
        let ring = Zpk::field(ell);
        let mut pairs = Vec::new();
        let mut pair_index = vec![NO_INDEX; m * m];
        for j in 0..m {
            for k in j + 1..m {
                pair_index[j * m + k] = pairs.len();
                pairs.push((j, k));
            }
        }
        let mut triples = Vec::new();
        let mut ad = Vec::new();
        if class == 3 {
            let mut triple_index = vec![NO_INDEX; m * pairs.len()];
            for (p, &(j, _)) in pairs.iter().enumerate() {
                for a in j..m {
                    triple_index[a * pairs.len() + p] = triples.len();
                    triples.push((a, pairs[p].0, pairs[p].1));
                }
            }
            let d2 = pairs.len();
            ad = vec![Vec::new(); m * d2];
            for a in 0..m {
                for (p, &(j, k)) in pairs.iter().enumerate() {
                    ad[a * d2 + p] = if a >= j {
                        vec![(triple_index[a * d2 + p], 1)]
                    } else {
                        // Jacobi: [X_a,[X_j,X_k]] = [X_j,[X_a,X_k]] - [X_k,[X_a,X_j]] for a < j < k.
                        let pak = pair_index[a * m + k];
                        let paj = pair_index[a * m + j];
                        vec![(triple_index[j * d2 + pak], 1), (triple_index[k * d2 + paj], ring.neg(1))]
                    };
                }
            }
        }
        let half = ring.unit_inv(2);
        let twelfth = if class == 3 { ring.unit_inv(12) } else { 0 };
        Ok(FreeNilGroup { m, class, ring, pairs, pair_index, triples, ad, half, twelfth })
    }

    pub fn num_gens(&self) -> usize {
        self.m
    }

    pub fn class(&self) -> u8 {
        self.class
    }

    pub fn ell(&self) -> u64 {
        self.ring.p
    }

    pub fn ring(&self) -> &Zpk {
        &self.ring
    }

    pub fn d2(&self) -> usize {
        self.pairs.len()
    }

    pub fn d3(&self) -> usize {
        self.triples.len()
    }

    pub fn dim(&self) -> usize {
        self.m + self.d2() + self.d3()
    }

    /// Coordinate range of degree `d` (1-based).
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        match d {
            1 => 0..self.m,
            2 => self.m..self.m + self.d2(),
            3 => self.m + self.d2()..self.dim(),
            _ => self.dim()..self.dim(),
        }
    }

    pub fn degree_of(&self, coord: usize) -> usize {
        if coord < self.m {
            1
        } else if coord < self.m + self.d2() {
            2
        } else {
            3
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn triples(&self) -> &[(usize, usize, usize)] {
        &self.triples
    }

    /// Coordinate of `[X_j, X_k]` for `j < k`.
    pub fn pair_coord(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k);
        self.m + self.pair_index[j * self.m + k]
    }

    /// log₁₀ of the group order, as a power of ℓ.
    pub fn order_exponent(&self) -> usize {
        self.dim()
    }

    pub fn identity(&self) -> NilElement {
        NilElement(vec![0; self.dim()])
    }

    pub fn generator(&self, i: usize) -> Result<NilElement> {
        if i >= self.m {
            return Err(CllError::BadIndex(i));
        }
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        Ok(NilElement(v))
    }

    pub fn from_coords(&self, c: &[i64]) -> NilElement {
        assert_eq!(c.len(), self.dim());
        NilElement(c.iter().map(|&x| self.ring.reduce(x)).collect())
    }

    pub fn random(&self, rng: &mut impl Rng) -> NilElement {
        NilElement((0..self.dim()).map(|_| rng.gen_range(0..self.ring.p)).collect())
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.ring.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.ring.sub(x, y)).collect()
    }

    pub fn scale(&self, k: u64, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.ring.mul(k, x)).collect()
    }

    /// `acc += k · v`.
    pub fn axpy(&self, acc: &mut [u64], k: u64, v: &[u64]) {
        if k == 0 {
            return;
        }
        for (d, &s) in acc.iter_mut().zip(v) {
            *d = self.ring.add(*d, self.ring.mul(k, s));
        }
    }

    /// Lie bracket in the truncated free Lie algebra.
    pub fn bracket(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let r = &self.ring;
        let m = self.m;
        let mut out = vec![0; self.dim()];
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            let v = r.sub(r.mul(a[j], b[k]), r.mul(a[k], b[j]));
            out[m + p] = v;
        }
        if self.class == 3 {
            let d2 = self.d2();
            let o3 = m + d2;
            for x in 0..m {
                let (ax, bx) = (a[x], b[x]);
                if ax == 0 && bx == 0 {
                    continue;
                }
                for p in 0..d2 {
                    // [a1, b2] - [b1, a2] restricted to generator x.
                    let c = r.sub(r.mul(ax, b[m + p]), r.mul(bx, a[m + p]));
                    if c == 0 {
                        continue;
                    }
                    for &(t, s) in &self.ad[x * d2 + p] {
                        out[o3 + t] = r.add(out[o3 + t], r.mul(c, s));
                    }
                }
            }
        }
        out
    }

    /// BCH product `a + b + ½[a,b] + (1/12)[a - b, [a,b]]`.
    pub fn mul(&self, a: &NilElement, b: &NilElement) -> NilElement {
        let ab = self.bracket(&a.0, &b.0);
        let mut out = self.add(&a.0, &b.0);
        self.axpy(&mut out, self.half, &ab);
        if self.class == 3 {
            let d = self.sub(&a.0, &b.0);
            let t = self.bracket(&d, &ab);
            self.axpy(&mut out, self.twelfth, &t);
        }
        NilElement(out)
    }

    pub fn inv(&self, a: &NilElement) -> NilElement {
        NilElement(a.0.iter().map(|&x| self.ring.neg(x)).collect())
    }

    pub fn pow(&self, a: &NilElement, k: i64) -> NilElement {
        NilElement(self.scale(self.ring.reduce(k), &a.0))
    }

    /// Group commutator `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: &NilElement, b: &NilElement) -> NilElement {
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(&self.mul(&ai, &bi), &self.mul(a, b))
    }

    /// `(-1)^deg` on coordinates: the automorphism `x_i ↦ x_i⁻¹`.
    pub fn negate_odd(&self, a: &[u64]) -> Vec<u64> {
        let mut out = a.to_vec();
        for d in [1, 3] {
            for c in self.degree_range(d) {
                out[c] = self.ring.neg(out[c]);
            }
        }
        out
    }

    /// Lie-algebra image of `v` under the homomorphism `X_i ↦ images[i]`.
    pub fn lie_map(&self, images: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
        let m = self.m;
        let mut out = vec![0; self.dim()];
        for (i, img) in images.iter().enumerate() {
            self.axpy(&mut out, v[i], img);
        }
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            let c = v[m + p];
            if c != 0 {
                let b = self.bracket(&images[j], &images[k]);
                self.axpy(&mut out, c, &b);
            }
        }
        let o3 = m + self.d2();
        for (t, &(a, j, k)) in self.triples.iter().enumerate() {
            let c = v[o3 + t];
            if c != 0 {
                let b = self.bracket(&images[a], &self.bracket(&images[j], &images[k]));
                self.axpy(&mut out, c, &b);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bracket_is_alternating_and_satisfies_jacobi() {
        for (m, class, ell) in [(3, 2, 3), (3, 3, 5), (4, 3, 7)] {
            let f = FreeNilGroup::new(m, class, ell).unwrap();
            let gens: Vec<Vec<u64>> = (0..m).map(|i| f.generator(i).unwrap().0).collect();
            let mut basis = gens.clone();
            for j in 0..m {
                for k in 0..m {
                    basis.push(f.bracket(&gens[j], &gens[k]));
                }
            }
            for a in &basis {
                assert!(f.bracket(a, a).iter().all(|&x| x == 0));
                for b in &basis {
                    let s = f.add(&f.bracket(a, b), &f.bracket(b, a));
                    assert!(s.iter().all(|&x| x == 0));
                    for c in &gens {
                        let j1 = f.bracket(a, &f.bracket(b, c));
                        let j2 = f.bracket(b, &f.bracket(c, a));
                        let j3 = f.bracket(c, &f.bracket(a, b));
                        assert!(f.add(&f.add(&j1, &j2), &j3).iter().all(|&x| x == 0));
                    }
                }
            }
        }
    }

    #[test]
    fn generator_commutator_is_the_basis_word() {
        let f = FreeNilGroup::new(2, 2, 3).unwrap();
        let c = f.commutator(&f.generator(0).unwrap(), &f.generator(1).unwrap());
        assert_eq!(c.0, vec![0, 0, 1]);
        assert_eq!(f.dim(), 3);
    }

    #[test]
    fn bch_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, class, ell) in [(4, 2, 3), (3, 3, 5), (4, 3, 7)] {
            let f = FreeNilGroup::new(m, class, ell).unwrap();
            for _ in 0..2000 {
                let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                assert_eq!(f.mul(&a, &f.inv(&a)), f.identity());
            }
        }
    }

    #[test]
    fn class_three_needs_a_large_prime() {
        assert!(matches!(FreeNilGroup::new(2, 3, 3), Err(CllError::BadPrimeForClass { ell: 3, class: 3 })));
        assert!(FreeNilGroup::new(2, 2, 2).is_err());
        assert_eq!(FreeNilGroup::new(4, 3, 5).unwrap().d3(), (64 - 4) / 3);
    }
}
