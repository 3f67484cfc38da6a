//! Target groups `H ⋊ Γ` with their ℓ-Schur cover, and the statistic `π†`.

use std::sync::Arc;

use rand::Rng;

use crate::cohomology::{l_schur_cover, CentralExtension};
use crate::error::{CllError, Result};
use crate::group::{GammaGroup, SemidirectProduct};
use crate::nilpotent::word::{Images, Word};

/// A kernel element of the session cover of `H ⋊ Γ`.
#[derive(Clone, Debug)]
pub struct DeltaTarget {
    pub value: usize,
    pub coords: Vec<u64>,
    pub order: u64,
}

pub struct TargetContext {
    pub h: GammaGroup,
    pub sd: SemidirectProduct,
    /// The nontrivial element of `Γ = ℤ/2`.
    pub gamma: usize,
    pub cover: Arc<CentralExtension>,
    pub relator: Word,
    /// Involutions `t` over `gamma` paired with the embedded elements of `H`
    /// they invert; the first entry is the splitting `section(gamma)`.
    pub involutions: Vec<(usize, Vec<usize>)>,
    /// `r` when `H ≅ (ℤ/ℓ)^r` with `Γ` acting by inversion.
    pub inversion_rank: Option<u32>,
}

impl TargetContext {
    pub fn new(h: GammaGroup, ell: u64, relator: Word) -> Result<Self> {
        if h.gamma.order() != 2 {
            return Err(CllError::Precondition("Γ must be ℤ/2".into()));
        }
        h.check_coprime()?;
        if crate::arith::prime_divisors(h.group.order() as u64).iter().any(|&p| p != ell) {
            return Err(CllError::Precondition(format!("H must be an {ell}-group")));
        }
        let gamma = (0..2).find(|&c| c != h.gamma.identity()).unwrap();
        let sd = h.semidirect();
        let cover = l_schur_cover(&sd.group, ell)?;
        let g = &sd.group;
        let t0 = sd.section[gamma];
        let mut ts = vec![t0];
        ts.extend(g.elements().filter(|&t| t != t0 && sd.proj[t] == gamma && g.element_order(t) == 2));
        let involutions = ts.into_iter().map(|t| {
            let inv: Vec<usize> = sd.embed_h.iter().copied().filter(|&x| g.conj(x, t) == g.inv(x)).collect();
            (t, inv)
        }).collect();
        let hg = &h.group;
        let inverting = hg.elements().all(|x| h.act(gamma, x) == hg.inv(x));
        let inversion_rank = (inverting && hg.is_abelian() && hg.exponent() <= ell)
            .then(|| crate::arith::valuation(hg.order() as u64, ell));
        Ok(TargetContext { h, sd, gamma, cover, relator, involutions, inversion_rank })
    }

    pub fn h_order(&self) -> usize {
        self.h.group.order()
    }

    pub fn delta(&self, coords: &[u64]) -> Result<DeltaTarget> {
        let k = self.cover.kernel_structure();
        if coords.iter().all(|&c| c == 0) {
            return Ok(DeltaTarget { value: self.cover.kernel_element(&vec![0; k.factors.len()]), coords: vec![0; k.factors.len()], order: 1 });
        }
        if coords.len() != k.factors.len() || coords.iter().zip(&k.factors).any(|(&c, &m)| c >= m) {
            return Err(CllError::Precondition(format!("delta coordinates must lie in {:?}", k.factors)));
        }
        let value = self.cover.kernel_element(coords);
        Ok(DeltaTarget { value, coords: coords.to_vec(), order: self.cover.total.element_order(value) as u64 })
    }

    pub fn kernel_factors(&self) -> Vec<u64> {
        self.cover.kernel_structure().factors.clone()
    }

    /// `π†` of generator images in `H ⋊ Γ`: the relator evaluated on lifts.
    /// `rng` randomizes the lifts.
    pub fn pi_dagger(&self, images: &[usize], rng: Option<&mut dyn rand::RngCore>) -> Result<usize> {
        let g = &self.sd.group;
        if self.relator.eval(&Images { group: g, images })? != g.identity() {
            return Err(CllError::RelatorNotKilled);
        }
        let lifts: Vec<usize> = match rng {
            None => images.iter().map(|&x| self.cover.fiber(x)[0]).collect(),
            Some(r) => images.iter().map(|&x| {
                let f = self.cover.fiber(x);
                f[r.gen_range(0..f.len())]
            }).collect(),
        };
        self.relator.eval(&Images { group: &self.cover.total, images: &lifts })
    }

    /// Index of a kernel element in `cover.kernel`.
    pub fn kernel_index(&self, x: usize) -> usize {
        self.cover.kernel.iter().position(|&k| k == x).expect("value lies in the kernel")
    }
}
