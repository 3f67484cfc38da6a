//! Transitivity of `Aut(gtilde, π; q)` on Γ-surjections with a fixed lifted
//! invariant, at the class-2 truncation.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::quotient::ModelContext;
use super::target::TargetContext;
use crate::error::{CllError, Result};
use crate::group::abelian::AbelianCoords;
use crate::group::GammaGroup;
use crate::linalg::{self, Mat};
use crate::nilpotent::aut::UnitAutSampler;
use crate::nilpotent::symplectic;
use crate::nilpotent::word::Images;
use crate::nilpotent::{Collector, ConstrainedAut, NilElement};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitReport {
    pub n: usize,
    pub ell: u64,
    pub q: u64,
    pub method: String,
    /// Γ-surjections with the requested invariant.
    pub surjections: usize,
    pub pairs_checked: usize,
    pub connected: usize,
    pub failures: Vec<String>,
}

impl OrbitReport {
    pub fn all_connected(&self) -> bool {
        self.failures.is_empty() && self.connected == self.pairs_checked
    }
}

/// Images of `x_1..x_{2n}` in `H ⋊ Γ` of every Γ-surjection from `g`.
pub fn gamma_surjections(ctx: &ModelContext, tc: &TargetContext) -> Vec<Vec<usize>> {
    let g = &tc.sd.group;
    let allowed = &tc.involutions[0].1;
    let m = 2 * ctx.d.n;
    let total = allowed.len().pow(m as u32);
    let mut out = Vec::new();
    let mut tuple = vec![0; m];
    for mut idx in 0..total {
        for slot in tuple.iter_mut() {
            *slot = allowed[idx % allowed.len()];
            idx /= allowed.len();
        }
        let kills = tc.relator.eval(&Images { group: g, images: &tuple }).map(|x| x == g.identity()).unwrap_or(false);
        if kills && g.subgroup(&tuple).len() == tc.h_order() {
            out.push(tuple.clone());
        }
    }
    out
}

/// `ρ ∘ φ` on generators.
pub fn precompose(ctx: &ModelContext, tc: &TargetContext, rho: &[usize], phi: &ConstrainedAut) -> Result<Vec<usize>> {
    let im = Images { group: &tc.sd.group, images: &[] };
    phi.images.iter().map(|y| Ok(Collector::eval(&im, rho, &ctx.free.collect(&NilElement(y.clone()))?))).collect()
}

/// Coordinates on the Frattini quotient of `H` and on `[H, H]`.
struct HCoords {
    frattini: Vec<Vec<u64>>,
    rank: usize,
    commutator: AbelianCoords,
}

impl HCoords {
    fn new(h: &GammaGroup, ell: u64) -> Result<Self> {
        let g = &h.group;
        let comm = g.commutator_subgroup();
        let mut seeds = comm.clone();
        seeds.extend(g.elements().map(|x| g.pow(x, ell as i64)));
        let fr = g.subgroup(&seeds);
        let (q, coset) = g.quotient(&fr)?;
        let all: Vec<usize> = q.elements().collect();
        let qc = AbelianCoords::new(&q, &all);
        let frattini = g.elements().map(|x| qc.coords(coset[x]).unwrap().to_vec()).collect();
        Ok(HCoords { frattini, rank: qc.structure.factors.len(), commutator: AbelianCoords::new(g, &comm) })
    }
}

/// A witness `φ` with `ρ₁ = ρ₂ ∘ φ`: a similitude matching the two
/// abelianized maps through symplectic completion, then a degree-2
/// correction absorbing the commutator discrepancy.
pub fn construct_witness(ctx: &ModelContext, tc: &TargetContext, q: u64, rho1: &[usize], rho2: &[usize]) -> Result<ConstrainedAut> {
    let d = &ctx.d;
    let f = &d.f;
    let r = f.ring();
    let n = d.n;
    let m = 2 * n;
    if d.class() != 2 {
        return Err(CllError::Precondition("witness construction is implemented at class 2".into()));
    }
    let hc = HCoords::new(&tc.h, d.ell())?;
    let sd = &tc.sd;
    let om = symplectic::omega(r, n);
    // u_j with ⟨u_j, v⟩ = f_j(v) for the coordinate functionals f_j of ρ.
    let duals = |rho: &[usize]| -> Vec<Vec<u64>> {
        (0..hc.rank).map(|j| {
            let fj: Vec<u64> = rho.iter().map(|&x| hc.frattini[sd.h_part(x)][j]).collect();
            linalg::mat_vec(r, &om, &fj)
        }).collect()
    };
    let u1 = duals(rho1);
    let qq = r.reduce(q as i64);
    let u2: Vec<Vec<u64>> = duals(rho2).iter().map(|v| v.iter().map(|&x| r.mul(qq, x)).collect()).collect();
    let g1 = symplectic::gram(r, &u1);
    let g2: Mat = symplectic::gram(r, &u2).into_iter().map(|row| row.into_iter().map(|x| r.mul(x, r.unit_inv(qq))).collect()).collect();
    if g1 != g2 {
        return Err(CllError::WitnessSearchFailed("Gram matrices of the abelianized maps are not q-related".into()));
    }
    let b1 = symplectic::q_symplectic_completion(r, n, &u1, 1)?;
    let b2 = symplectic::q_symplectic_completion(r, n, &u2, qq)?;
    let b1inv = linalg::inverse(r, &symplectic::from_columns(&b1)).expect("completion is a basis");
    let t = linalg::mat_mul(r, &symplectic::from_columns(&b2), &b1inv);
    if symplectic::multiplier(r, &t) != Some(qq) {
        return Err(CllError::VerificationFailed("completed map is not a q-similitude".into()));
    }
    let mut images: Vec<Vec<u64>> = (0..m).map(|i| {
        let mut v = vec![0; f.dim()];
        for j in 0..m {
            v[j] = t[j][i];
        }
        v
    }).collect();
    let lin = ConstrainedAut { t: t.clone(), images: images.clone(), gamma_twist: vec![0; f.dim()], q: qq };
    let base = precompose(ctx, tc, rho2, &lin)?;
    let g = &sd.group;
    if base != rho1 {
        // ρ₂([x_j, x_k]) spans [H, H]; solve ρ₂(exp c_i) = ρ₂(T̂x_i)⁻¹ρ₁(x_i).
        let cc = &hc.commutator;
        let pairs = f.pairs();
        let cols: Vec<Vec<u64>> = pairs.iter().map(|&(j, k)| {
            let c = sd.h_part(g.commutator(rho2[j], rho2[k]));
            cc.coords(c).map(|v| v.to_vec()).ok_or(CllError::WitnessSearchFailed("commutator outside [H,H]".into()))
        }).collect::<Result<_>>()?;
        let a = linalg::transpose_rect(&cols, cc.structure.factors.len());
        for i in 0..m {
            let disc = sd.h_part(g.mul(g.inv(base[i]), rho1[i]));
            let target = cc.coords(disc).ok_or_else(|| CllError::WitnessSearchFailed("discrepancy outside [H,H]".into()))?;
            let c = linalg::solve(r, &a, target, pairs.len())
                .ok_or_else(|| CllError::WitnessSearchFailed("discrepancy not reachable in degree 2".into()))?;
            for (p, &cp) in c.iter().enumerate() {
                images[i][m + p] = cp;
            }
        }
    }
    let phi = ConstrainedAut { t, images, gamma_twist: vec![0; f.dim()], q: qq };
    phi.verify(d, false)?;
    if precompose(ctx, tc, rho2, &phi)? != rho1 {
        return Err(CllError::WitnessSearchFailed("witness does not match".into()));
    }
    Ok(phi)
}

/// Checks every pair (`pairs = None`, with exhaustive orbits at `n = 1`) or
/// `pairs` random pairs (constructive witnesses) among Γ-surjections whose
/// `π†` equals `h_coords`.
pub fn orbit_transitivity_check(n: usize, ell: u64, q: u64, h: GammaGroup, h_coords: &[u64], pairs: Option<usize>, seed: u64) -> Result<OrbitReport> {
    let ctx = ModelContext::new(n, ell, 2)?;
    let tc = TargetContext::new(h, ell, ctx.d.relator_word()?)?;
    let delta = tc.delta(h_coords)?;
    if !(q - 1).is_multiple_of(delta.order) {
        return Err(CllError::Precondition("the invariant's order must divide q - 1".into()));
    }
    let sur: Vec<Vec<usize>> = gamma_surjections(&ctx, &tc)
        .into_iter()
        .filter(|rho| tc.pi_dagger(rho, None).map(|v| v == delta.value).unwrap_or(false))
        .collect();
    let mut report = OrbitReport { n, ell, q, method: String::new(), surjections: sur.len(), pairs_checked: 0, connected: 0, failures: Vec::new() };
    if sur.is_empty() {
        return Err(CllError::Precondition("no Γ-surjections with this invariant".into()));
    }
    match pairs {
        None if n == 1 => {
            report.method = "exhaustive".into();
            let r = ctx.d.f.ring();
            let auts = UnitAutSampler::new(&ctx.d).enumerate_class2(&ctx.d, &symplectic::similitudes_dim2(r, q))?;
            for rho2 in &sur {
                let orbit: HashSet<Vec<usize>> = auts.iter().map(|a| precompose(&ctx, &tc, rho2, a)).collect::<Result<_>>()?;
                for rho1 in &sur {
                    report.pairs_checked += 1;
                    if orbit.contains(rho1) {
                        report.connected += 1;
                    } else {
                        report.failures.push(format!("{rho1:?} not in the orbit of {rho2:?}"));
                    }
                }
            }
        }
        _ => {
            report.method = "constructive".into();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = pairs.unwrap_or(sur.len() * sur.len());
            for k in 0..count {
                let (rho1, rho2) = if pairs.is_some() {
                    (sur.choose(&mut rng).unwrap(), sur.choose(&mut rng).unwrap())
                } else {
                    (&sur[k / sur.len()], &sur[k % sur.len()])
                };
                report.pairs_checked += 1;
                match construct_witness(&ctx, &tc, q, rho1, rho2) {
                    Ok(_) => report.connected += 1,
                    Err(e) => report.failures.push(format!("{rho1:?} vs {rho2:?}: {e}")),
                }
            }
        }
    }
    Ok(report)
}
