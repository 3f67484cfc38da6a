//! `H₂(G,ℤ)(ℓ)` as the ℓ-torsion of the coinvariants `R/[F,R]` of the
//! relation module, computed over ℤ/ℓᴺ with ℓᴺ beyond the multiplier exponent.

use std::sync::Arc;

use super::presentation::{CayleyPresentation, Word};
use super::Cocycle2;
use crate::arith;
use crate::error::{CllError, Result};
use crate::group::{AbelianStructure, FiniteGroup, GroupHom};
use crate::linalg::{CokernelCoords, Zpk};

/// Largest order handled by the cohomology routines.
pub const H2_CAP: usize = 128;

/// `R/[F,R] ⊗ ℤ/ℓᴺ ≅ (ℤ/ℓᴺ)^|S| ⊕ H₂(G)(ℓ)` in Smith coordinates.
#[derive(Clone, Debug)]
pub struct RelationModule {
    pub group: Arc<FiniteGroup>,
    pub pres: CayleyPresentation,
    pub ring: Zpk,
    coker: CokernelCoords,
    /// Smith positions of the torsion summands, ascending order.
    torsion: Vec<usize>,
    pub factors: Vec<u64>,
}

impl RelationModule {
    /// `exp` overrides the default `N = v_ℓ(|G|) + 1`; it must exceed the
    /// ℓ-exponent of the multiplier, which divides `|G|`.
    pub fn new(group: Arc<FiniteGroup>, ell: u64, exp: Option<u32>) -> Result<Self> {
        check_cap(&group)?;
        let n_exp = exp.unwrap_or(arith::valuation(group.order() as u64, ell) + 1).max(1);
        let ring = Zpk::new(ell, n_exp);
        let pres = CayleyPresentation::new(&group);
        let rows: Vec<Vec<u64>> = pres
            .coinvariant_relations(&group)
            .into_iter()
            .map(|r| r.into_iter().map(|v| ring.reduce(v)).collect())
            .collect();
        let coker = CokernelCoords::new(ring, &rows, pres.rank());
        let free = coker.smith.vals.iter().filter(|&&v| v == n_exp).count();
        if free != pres.gens.len() {
            return Err(CllError::Precondition(format!(
                "relation module has {free} free summands, expected {}",
                pres.gens.len()
            )));
        }
        let mut torsion: Vec<usize> = (0..pres.rank()).filter(|&j| (1..n_exp).contains(&coker.smith.vals[j])).collect();
        torsion.sort_by_key(|&j| (coker.smith.vals[j], j));
        let factors = torsion.iter().map(|&j| ell.pow(coker.smith.vals[j])).collect();
        Ok(RelationModule { group, pres, ring, coker, torsion, factors })
    }

    /// Torsion coordinates of an integer combination of relator basis cycles.
    pub fn project(&self, v: &[i64]) -> Vec<u64> {
        let reduced: Vec<u64> = v.iter().map(|&x| self.ring.reduce(x)).collect();
        self.project_reduced(&reduced)
    }

    fn project_reduced(&self, v: &[u64]) -> Vec<u64> {
        let w = self.coker.coords(v);
        self.torsion.iter().zip(&self.factors).map(|(&j, &f)| w[j] % f).collect()
    }

    /// Cycle vectors (mod ℓᴺ) realizing the torsion basis.
    pub fn basis_vectors(&self) -> Vec<Vec<u64>> {
        self.torsion.iter().map(|&j| self.coker.smith.q_inv[j].clone()).collect()
    }

    /// Class of a relator word in `R/[F,R]`, projected to the ℓ-torsion part.
    pub fn word_class(&self, word: &[(usize, i64)]) -> Result<Vec<u64>> {
        let g = &self.group;
        let mut acc = vec![0i64; self.pres.rank()];
        if self.pres.walk(g, g.identity(), word, &mut acc) != g.identity() {
            return Err(CllError::NotInKernel);
        }
        Ok(self.project(&acc))
    }

    pub fn structure(&self) -> AbelianStructure<Vec<u64>> {
        AbelianStructure { factors: self.factors.clone(), basis: self.basis_vectors() }
    }

    /// Cocycles `α_j(x,y)` = j-th torsion coordinate of `w_x w_y w_{xy}⁻¹`;
    /// together they define an ℓ-Schur cover.
    pub fn cover_cocycles(&self) -> Vec<Cocycle2> {
        let g = &self.group;
        let n = g.order();
        let t = self.factors.len();
        let k = self.pres.gens.len();
        // Torsion image of each unit cycle.
        let col_proj: Vec<Vec<u64>> = (0..self.pres.rank())
            .map(|c| {
                let mut e = vec![0u64; self.pres.rank()];
                e[c] = 1;
                self.project_reduced(&e)
            })
            .collect();
        let mut order: Vec<usize> = g.elements().collect();
        order.sort_by_key(|&y| self.pres.words[y].len());
        let mut values = vec![vec![0u64; n * n]; t];
        let mut acc = vec![vec![0u64; t]; n];
        for x in g.elements() {
            for a in acc.iter_mut() {
                a.iter_mut().for_each(|v| *v = 0);
            }
            for &y in order.iter().skip(1) {
                let w = &self.pres.words[y];
                let i = *w.last().unwrap();
                let p = g.mul(y, g.inv(self.pres.gens[i]));
                let start = g.mul(x, p);
                let mut a = acc[p].clone();
                if let Some(c) = self.pres.column(start, i) {
                    for ((v, &d), &f) in a.iter_mut().zip(&col_proj[c]).zip(&self.factors) {
                        *v = (*v + d) % f;
                    }
                }
                for j in 0..t {
                    values[j][x * n + y] = a[j];
                }
                acc[y] = a;
            }
        }
        debug_assert!(k > 0 || n == 1);
        values
            .into_iter()
            .zip(&self.factors)
            .map(|(v, &f)| Cocycle2 { order: n, modulus: f, values: v })
            .collect()
    }
}

pub(crate) fn check_cap(g: &FiniteGroup) -> Result<()> {
    if g.order() > H2_CAP {
        return Err(CllError::CapExceeded { what: "second cohomology", size: g.order(), cap: H2_CAP });
    }
    Ok(())
}

/// `H₂(G,ℤ)(ℓ)` with basis cycles in the relation module.
pub fn schur_multiplier_l(g: &Arc<FiniteGroup>, ell: u64) -> Result<AbelianStructure<Vec<u64>>> {
    Ok(RelationModule::new(g.clone(), ell, None)?.structure())
}

/// The map `H₂(G)(ℓ) → H₂(H)(ℓ)` induced by a surjection, on the
/// invariant-factor bases of both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coinflation {
    pub source: Vec<u64>,
    pub target: Vec<u64>,
    /// `matrix[i]` = target coordinates of the image of source basis element `i`.
    pub matrix: Vec<Vec<u64>>,
}

impl Coinflation {
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.target
            .iter()
            .enumerate()
            .map(|(j, &f)| v.iter().zip(&self.matrix).fold(0, |acc, (&x, row)| (acc + x * row[j]) % f))
            .collect()
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &Coinflation) -> Coinflation {
        let matrix = self.matrix.iter().map(|row| after.apply(row)).collect();
        Coinflation { source: self.source.clone(), target: after.target.clone(), matrix }
    }

    pub fn is_surjective(&self) -> bool {
        let order: u64 = self.target.iter().product();
        let mut seen = std::collections::HashSet::new();
        let mut frontier = vec![vec![0u64; self.target.len()]];
        seen.insert(frontier[0].clone());
        while let Some(v) = frontier.pop() {
            for row in &self.matrix {
                let w: Vec<u64> = v.iter().zip(row).zip(&self.target).map(|((&a, &b), &f)| (a + b) % f).collect();
                if seen.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        seen.len() as u64 == order
    }
}

/// Replaces each generator letter by a word.
pub fn substitute(word: &[(usize, i64)], images: &[Word]) -> Word {
    let mut out = Vec::new();
    for &(i, e) in word {
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                out.extend(images[i].iter().copied());
            } else {
                out.extend(images[i].iter().rev().map(|&(j, f)| (j, -f)));
            }
        }
    }
    out
}

/// Coinflation of a surjection: push the relators of the source through a
/// lift `F_source → F_target` and read the classes in the target module.
pub fn coinflation(alpha: &GroupHom, ell: u64) -> Result<Coinflation> {
    if !alpha.is_surjective() {
        return Err(CllError::Precondition("coinflation needs a surjection".into()));
    }
    let n_exp = arith::valuation(alpha.source.order() as u64, ell) + 1;
    let src = RelationModule::new(alpha.source.clone(), ell, Some(n_exp))?;
    let tgt = RelationModule::new(alpha.target.clone(), ell, Some(n_exp))?;
    let images: Vec<Word> = src.pres.gens.iter().map(|&s| tgt.pres.tree_word(alpha.apply(s))).collect();
    let rank_t = tgt.pres.rank();
    let pushed: Vec<Vec<i64>> = (0..src.pres.rank())
        .map(|c| {
            let w = substitute(&src.pres.relator(&src.group, c), &images);
            let mut acc = vec![0i64; rank_t];
            let end = tgt.pres.walk(&tgt.group, tgt.group.identity(), &w, &mut acc);
            debug_assert_eq!(end, tgt.group.identity());
            acc
        })
        .collect();
    let ring = src.ring;
    let matrix = src
        .basis_vectors()
        .iter()
        .map(|u| {
            let mut image = vec![0u64; rank_t];
            for (&coef, row) in u.iter().zip(&pushed) {
                if coef == 0 {
                    continue;
                }
                for (o, &r) in image.iter_mut().zip(row) {
                    *o = ring.add(*o, ring.mul(coef, ring.reduce(r)));
                }
            }
            tgt.project_reduced(&image)
        })
        .collect();
    Ok(Coinflation { source: src.factors.clone(), target: tgt.factors.clone(), matrix })
}

/// `Hom(H₂(G)(ℓ), A)` component of a central extension: the value of each
/// multiplier basis cycle on generator lifts, as an element of the kernel.
pub fn differential(ext: &super::CentralExtension, ell: u64) -> Result<Vec<usize>> {
    let kernel_exp = ext.kernel_structure().factors.iter().copied().max().unwrap_or(1);
    let n_exp = (arith::valuation(ext.base.order() as u64, ell) + 1).max(arith::valuation(kernel_exp, ell));
    let module = RelationModule::new(ext.base.clone(), ell, Some(n_exp))?;
    let t = &ext.total;
    let lifts: Vec<usize> = module.pres.gens.iter().map(|&s| ext.fiber(s)[0]).collect();
    let relator_values: Vec<usize> =
        (0..module.pres.rank()).map(|c| t.eval_word(&lifts, &module.pres.relator(&ext.base, c))).collect();
    Ok(module
        .basis_vectors()
        .iter()
        .map(|u| {
            u.iter()
                .zip(&relator_values)
                .fold(t.identity(), |acc, (&coef, &r)| t.mul(acc, t.pow(r, coef as i64)))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    fn mult(name: &str, ell: u64) -> Vec<u64> {
        let g = Arc::new(catalog::parse_group(name).unwrap());
        schur_multiplier_l(&g, ell).unwrap().factors
    }

    #[test]
    fn anchors() {
        assert!(mult("cyclic:9", 3).is_empty());
        assert!(mult("cyclic:1", 3).is_empty());
        assert_eq!(mult("elem_abelian:3^2", 3), vec![3]);
        assert_eq!(mult("elem_abelian:3^3", 3), vec![3, 3, 3]);
        assert_eq!(mult("heisenberg:3", 3), vec![3, 3]);
        assert_eq!(mult("semidirect_inversion:3^2", 3), vec![3]);
        assert!(mult("semidirect_inversion:3^2", 2).is_empty());
        assert_eq!(mult("dihedral:4", 2), vec![2]);
        assert!(mult("dihedral:3", 3).is_empty());
        assert_eq!(mult("elem_abelian:2^2", 2), vec![2]);
    }

    #[test]
    fn coinflation_examples() {
        let h = Arc::new(catalog::heisenberg(3));
        let (q, map) = h.quotient(&h.center()).unwrap();
        let alpha = GroupHom::new(h.clone(), Arc::new(q), map).unwrap();
        let c = coinflation(&alpha, 3).unwrap();
        assert_eq!(c.source, vec![3, 3]);
        assert_eq!(c.target, vec![3]);
        // The quotient by [G,G] = Z(G) is a stem cover of its image, so the
        // five-term sequence forces the induced map on multipliers to vanish.
        assert!(c.matrix.iter().all(|row| row.iter().all(|&x| x == 0)));
        assert!(!c.is_surjective());

        let v = Arc::new(catalog::elem_abelian(3, 2));
        let id = GroupHom::new(v.clone(), v.clone(), v.elements().collect()).unwrap();
        let c = coinflation(&id, 3).unwrap();
        assert_eq!(c.matrix, vec![vec![1]]);
        let c3 = Arc::new(catalog::cyclic(3));
        let proj = GroupHom::new(v.clone(), c3, v.elements().map(|x| x % 3).collect()).unwrap();
        let c = coinflation(&proj, 3).unwrap();
        assert!(c.target.is_empty());
    }
}
