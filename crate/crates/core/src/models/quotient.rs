//! Fixed quotients `Y`, `X = Y ⋊ Γ` and the three-manifold quotient `Z`,
//! held as Lie ideals of the ambient free nilpotent algebra.

use std::sync::Arc;

use crate::error::{CllError, Result};
use crate::group::{catalog, FiniteGroup, GammaGroup, TABLE_CAP};
use crate::linalg::FieldSpan;
use crate::nilpotent::collect::{Collected, Collector};
use crate::nilpotent::demushkin::{ideal_closure, DemushkinTrunc};
use crate::nilpotent::word::Images;
use crate::nilpotent::{ConstrainedAut, NilElement};

/// A truncation together with collection into all `2n` generators.
pub struct ModelContext {
    pub d: DemushkinTrunc,
    pub free: Collector,
}

impl ModelContext {
    pub fn new(n: usize, ell: u64, class: u8) -> Result<Self> {
        let d = DemushkinTrunc::new(n, ell, class)?;
        let gens: Vec<NilElement> = (0..2 * n).map(|i| d.f.generator(i)).collect::<Result<_>>()?;
        let free = Collector::new(d.f.clone(), &gens, FieldSpan::new(*d.f.ring(), d.f.dim()));
        Ok(ModelContext { d, free })
    }

    /// `Y = gtilde / (N · ⟨xi⟩)` with `N` generated by `g⁻¹φ(g)` over the
    /// generators of `gtilde ⋊ Γ`, closed under `sigma`.
    pub fn fixed_quotient(&self, phi: &ConstrainedAut) -> Result<FixedQuotient> {
        let d = &self.d;
        let f = &d.f;
        let mut seeds: Vec<Vec<u64>> = phi.images.iter().enumerate().map(|(i, y)| {
            let mut v = y.clone();
            v[i] = f.ring().sub(v[i], 1);
            v
        }).collect();
        seeds.push(phi.gamma_twist.clone());
        seeds.push(d.omega.clone());
        let ideal = ideal_closure(f, d.i_span.clone(), &seeds, true);
        // Relators: x_i⁻¹φ(x_i), h and xi (which implies I).
        let mut rel_elems: Vec<NilElement> = phi.images.iter().enumerate().map(|(i, y)| {
            f.mul(&f.inv(&f.generator(i).unwrap()), &NilElement(y.clone()))
        }).collect();
        rel_elems.push(NilElement(phi.gamma_twist.clone()));
        rel_elems.push(d.xi.clone());
        self.finish(ideal, &rel_elems)
    }

    /// `Z = gtilde / ⟨a_i, φ(a_i)⟩` with `a_i = x_{2i-1}`.
    pub fn z_quotient(&self, phi: &ConstrainedAut) -> Result<FixedQuotient> {
        let d = &self.d;
        let f = &d.f;
        let mut rel_elems = Vec::new();
        for i in 0..d.n {
            rel_elems.push(f.generator(2 * i)?);
            rel_elems.push(NilElement(phi.images[2 * i].clone()));
        }
        let seeds: Vec<Vec<u64>> = rel_elems.iter().map(|e| e.0.clone()).collect();
        let ideal = ideal_closure(f, d.i_span.clone(), &seeds, false);
        rel_elems.extend(d.i_span.basis().iter().map(|b| NilElement(b.clone())));
        self.finish(ideal, &rel_elems)
    }

    pub(crate) fn finish(&self, ideal: FieldSpan, rel_elems: &[NilElement]) -> Result<FixedQuotient> {
        let d = &self.d;
        let f = &d.f;
        let m = 2 * d.n;
        // Generators independent modulo the ideal plus higher degrees.
        let mut span = ideal.clone();
        for c in f.degree_range(2).chain(f.degree_range(3)) {
            let mut v = vec![0; f.dim()];
            v[c] = 1;
            span.insert(&v);
        }
        let mut basis = Vec::new();
        for i in 0..m {
            if span.insert(&f.generator(i)?.0) {
                basis.push(i);
            }
        }
        let gens: Vec<NilElement> = basis.iter().map(|&i| f.generator(i)).collect::<Result<_>>()?;
        let local = Collector::new(f.clone(), &gens, ideal.clone());
        let words = (0..m).map(|i| local.collect(&f.generator(i)?)).collect::<Result<Vec<_>>>()?;
        let relations = rel_elems.iter().map(|e| self.free.collect(e)).collect::<Result<Vec<_>>>()?;
        Ok(FixedQuotient { f: f.clone(), ideal, basis, words, relations })
    }
}

pub struct FixedQuotient {
    f: Arc<crate::nilpotent::FreeNilGroup>,
    /// Kernel of the ambient Lie algebra onto the quotient.
    pub ideal: FieldSpan,
    /// Generator indices whose images form a basis of the abelianization.
    pub basis: Vec<usize>,
    /// Each `x_j` collected in the basis generators modulo the ideal.
    pub words: Vec<Collected>,
    /// Relators over all generators whose normal closure is the kernel.
    pub relations: Vec<Collected>,
}

impl FixedQuotient {
    pub fn ab_rank(&self) -> usize {
        self.basis.len()
    }

    /// `log_ℓ` of the quotient order.
    pub fn rank(&self) -> usize {
        self.ideal.cols() - self.ideal.dim()
    }

    /// Calls `visit` with the images of all generators for every assignment
    /// of the basis generators into `allowed` that kills the relators and
    /// whose images generate a subgroup of order `gen_order`.
    pub fn for_each_hom(&self, t: &FiniteGroup, allowed: &[usize], gen_order: usize, mut visit: impl FnMut(&[usize])) {
        let k = self.basis.len();
        if allowed.is_empty() && k > 0 {
            return;
        }
        let g = Images { group: t, images: &[] };
        let total = allowed.len().checked_pow(k as u32).expect("tuple count overflow");
        let mut tuple = vec![0usize; k];
        for mut idx in 0..total {
            for slot in tuple.iter_mut() {
                *slot = allowed[idx % allowed.len()];
                idx /= allowed.len();
            }
            let images: Vec<usize> = self.words.iter().map(|w| Collector::eval(&g, &tuple, w)).collect();
            if self.relations.iter().all(|r| Collector::eval(&g, &images, r) == t.identity()) && t.subgroup(&tuple).len() == gen_order {
                visit(&images);
            }
        }
    }

    /// The quotient as a Γ-group (Γ = ℤ/2 acting through `sigma`) when its
    /// order fits in a table.
    pub fn y_group(&self) -> Result<GammaGroup> {
        let f = &self.f;
        let ell = f.ell() as usize;
        let free = self.ideal.free_columns();
        let size = ell.checked_pow(free.len() as u32).filter(|&s| s <= TABLE_CAP).ok_or(CllError::CapExceeded {
            what: "fixed quotient",
            size: usize::MAX,
            cap: TABLE_CAP,
        })?;
        let lift = |x: usize| -> NilElement {
            let mut v = vec![0; f.dim()];
            let mut x = x;
            for &c in &free {
                v[c] = (x % ell) as u64;
                x /= ell;
            }
            NilElement(v)
        };
        let index = |v: &[u64]| -> usize {
            let r = self.ideal.reduce(v);
            free.iter().rev().fold(0, |acc, &c| acc * ell + r[c] as usize)
        };
        let elems: Vec<NilElement> = (0..size).map(lift).collect();
        let group = FiniteGroup::from_fn(size, 0, |a, b| index(&f.mul(&elems[a], &elems[b]).0));
        let gens: Vec<usize> = self.basis.iter().map(|&i| index(&f.generator(i).unwrap().0)).collect();
        let group = if gens.is_empty() { group } else { group.with_gens(gens)? };
        let perm: Vec<u32> = elems.iter().map(|e| index(&f.negate_odd(&e.0)) as u32).collect();
        GammaGroup::from_generator_action(Arc::new(group), Arc::new(catalog::cyclic(2)), &[perm])
    }
}
