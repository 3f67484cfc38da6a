//! The model with the involution replaced by a conjugate `σ' = τ⁻¹στ`.
//!
//! `Y'` is built from the transported automorphism `τ⁻¹φτ`, closed under
//! `σ'`, and its Γ-maps are found through explicit relations
//! `ρ(σ'(x_i)) = t ρ(x_i) t⁻¹` rather than by restricting to inverted images.
//! Since `τ` fixes `xi`, every count agrees with the `σ` model sample by
//! sample.

use crate::error::{CllError, Result};
use crate::linalg;
use crate::nilpotent::demushkin::ideal_closure_with;
use crate::nilpotent::{ConstrainedAut, NilElement};

use super::quotient::ModelContext;
use super::target::TargetContext;

pub struct GaugedModel {
    tau: Vec<Vec<u64>>,
    tau_inv: Vec<Vec<u64>>,
    /// `σ'(X_i)`.
    sigma: Vec<Vec<u64>>,
}

impl GaugedModel {
    /// `tau` must act trivially on `ker π`.
    pub fn new(ctx: &ModelContext, tau: &ConstrainedAut) -> Result<Self> {
        let d = &ctx.d;
        let f = &d.f;
        let r = f.ring();
        if tau.q != 1 || tau.gamma_twist.iter().any(|&x| x != 0) {
            return Err(CllError::Precondition("the gauge must have multiplier 1 and no twist".into()));
        }
        let dim = f.dim();
        let cols: Vec<Vec<u64>> = (0..dim).map(|c| {
            let mut e = vec![0; dim];
            e[c] = 1;
            d.i_span.reduce(&f.lie_map(&tau.images, &e))
        }).collect();
        // Lie automorphisms preserve I, so the inverse is read off modulo I
        // on the free coordinates.
        let free = d.i_span.free_columns();
        let restricted: Vec<Vec<u64>> = free.iter().map(|&c| free.iter().map(|&k| cols[c][k]).collect()).collect();
        let a = linalg::transpose_rect(&restricted, free.len());
        let inv = linalg::inverse(r, &a).ok_or_else(|| CllError::VerificationFailed("gauge is not invertible".into()))?;
        let m = f.num_gens();
        let tau_inv: Vec<Vec<u64>> = (0..m).map(|i| {
            let col = free.iter().position(|&c| c == i).expect("generators are free columns");
            let mut v = vec![0; dim];
            for (row, &c) in free.iter().enumerate() {
                v[c] = inv[row][col];
            }
            v
        }).collect();
        let map = |images: &[Vec<u64>], v: &[u64]| d.i_span.reduce(&f.lie_map(images, v));
        for i in 0..m {
            let back = map(&tau_inv, &tau.images[i]);
            if !d.eq_gtilde(&back, &f.generator(i)?.0) {
                return Err(CllError::VerificationFailed("gauge inverse".into()));
            }
        }
        let sigma = (0..m).map(|i| map(&tau_inv, &f.negate_odd(&tau.images[i]))).collect();
        Ok(GaugedModel { tau: tau.images.clone(), tau_inv, sigma })
    }

    fn map(ctx: &ModelContext, images: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
        ctx.d.i_span.reduce(&ctx.d.f.lie_map(images, v))
    }

    /// `(#{π : π† = δ}, #Sur_Γ(Y', H))` for the transported sample `τ⁻¹φτ`.
    pub fn counts(&self, ctx: &ModelContext, tc: &TargetContext, phi: &ConstrainedAut, delta: usize) -> Result<(u64, u64)> {
        let d = &ctx.d;
        let f = &d.f;
        let m = f.num_gens();
        let images: Vec<Vec<u64>> = (0..m).map(|i| Self::map(ctx, &self.tau_inv, &phi.apply(d, &self.tau[i]))).collect();
        let twist = Self::map(ctx, &self.tau_inv, &phi.gamma_twist);
        let mut seeds: Vec<Vec<u64>> = images.iter().enumerate().map(|(i, y)| {
            let mut v = y.clone();
            v[i] = f.ring().sub(v[i], 1);
            v
        }).collect();
        seeds.push(twist.clone());
        seeds.push(d.omega.clone());
        let sigma = |v: &[u64]| Self::map(ctx, &self.sigma, v);
        let ideal = ideal_closure_with(f, d.i_span.clone(), &seeds, &[&sigma]);
        let mut rel_elems: Vec<NilElement> = images.iter().enumerate().map(|(i, y)| {
            f.mul(&f.inv(&f.generator(i).unwrap()), &NilElement(y.clone()))
        }).collect();
        rel_elems.push(NilElement(twist));
        rel_elems.push(d.xi.clone());
        let fq = ctx.finish(ideal, &rel_elems)?;
        let compat = self.sigma.iter().map(|s| ctx.free.collect(&NilElement(s.clone()))).collect::<Result<Vec<_>>>()?;
        let g = &tc.sd.group;
        let t = tc.involutions[0].0;
        let all: Vec<usize> = tc.sd.embed_h.clone();
        let im = crate::nilpotent::word::Images { group: g, images: &[] };
        let (mut hit, mut total) = (0, 0);
        let mut err = None;
        fq.for_each_hom(g, &all, tc.h_order(), |rho| {
            let ok = compat.iter().enumerate().all(|(i, w)| crate::nilpotent::Collector::eval(&im, rho, w) == g.conj(rho[i], t));
            if !ok {
                return;
            }
            match tc.pi_dagger(rho, None) {
                Ok(v) => {
                    total += 1;
                    hit += (v == delta) as u64;
                }
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok((hit, total)),
        }
    }
}
