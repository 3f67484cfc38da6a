//! Monte Carlo moments of the random groups `Y`, `X` and `Z`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::parallel::{block_rng, map_blocks};
use super::quotient::ModelContext;
use super::target::TargetContext;
use crate::error::{CllError, Result};
use crate::group::{FiniteGroup, GammaGroup};
use crate::linalg::{self, Zpk};
use crate::nilpotent::aut::UnitAutSampler;
use crate::nilpotent::ConstrainedAut;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub config_hash: String,
}

impl MomentEstimate {
    /// `(mean - target) / stderr`; zero when both agree exactly.
    pub fn sigmas_off(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY * d.signum()
        } else {
            d / self.stderr
        }
    }
}

/// Welford accumulation, fed in sample order.
#[derive(Clone, Debug, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn finish(&self, seed: u64, config_hash: &str) -> MomentEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        let stderr = if self.n > 0 { (var / self.n as f64).sqrt() } else { 0.0 };
        MomentEstimate { mean: self.mean, stderr, samples: self.n, seed, config_hash: config_hash.to_string() }
    }

    pub fn estimate(values: impl IntoIterator<Item = f64>, seed: u64, config_hash: &str) -> MomentEstimate {
        let mut w = Welford::default();
        for v in values {
            w.push(v);
        }
        w.finish(seed, config_hash)
    }
}

pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `#Sur(𝔽_ℓ^k, 𝔽_ℓ^r) = Π_{i<r} (ℓ^k - ℓ^i)`.
pub fn elementary_surjections(ell: u64, k: usize, r: u32) -> u64 {
    (0..r).map(|i| (ell.pow(k as u32)).saturating_sub(ell.pow(i))).product()
}

/// `dim coker` of the degree-1 relations of `Y`: `im(T - 1) + ⟨H₁⟩`.
pub fn y_coker_rank(r: &Zpk, phi: &ConstrainedAut) -> usize {
    let m = phi.t.len();
    let mut a: linalg::Mat = (0..m).map(|i| {
        let mut row: Vec<u64> = (0..m).map(|j| if i == j { r.sub(phi.t[i][j], 1) } else { phi.t[i][j] }).collect();
        row.push(phi.gamma_twist[i]);
        row
    }).collect();
    m - linalg::rref(r, &mut a).len()
}

/// `dim coker` of the degree-1 relations of `Z`: `span{e_{2i-1}, Te_{2i-1}}`.
pub fn z_coker_rank(r: &Zpk, t: &linalg::Mat) -> usize {
    let m = t.len();
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for i in (0..m).step_by(2) {
        let mut e = vec![0; m];
        e[i] = 1;
        cols.push(e);
        cols.push((0..m).map(|j| t[j][i]).collect());
    }
    m - linalg::rank(r, &cols)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YConfig {
    pub n: usize,
    pub ell: u64,
    pub q: u64,
    pub class: u8,
    pub h: String,
    pub delta: Vec<u64>,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YSample {
    /// `#Sur_Γ(Y, H)`.
    pub y_total: u64,
    /// `#{π ∈ Sur_Γ(Y, H) : π† = δ}`.
    pub y_delta: u64,
    pub x_total: u64,
    pub x_delta: u64,
    /// `π†` histogram over `cover.kernel`.
    pub by_delta: Vec<u64>,
    /// Matrix-only `#Sur(Y^ab, H)` for `H = (ℤ/ℓ)^r` with inversion.
    pub coker: Option<u64>,
    pub ab_rank: usize,
}

pub fn sample_y(ctx: &ModelContext, tc: &TargetContext, q: u64, delta: usize, rng: &mut impl Rng) -> Result<YSample> {
    let d = &ctx.d;
    let phi = ConstrainedAut::sample(d, q, rng)?;
    let fq = ctx.fixed_quotient(&phi)?;
    let coker = tc.inversion_rank.map(|r| elementary_surjections(d.ell(), y_coker_rank(d.f.ring(), &phi), r));
    let g = &tc.sd.group;
    let mut s = YSample {
        y_total: 0,
        y_delta: 0,
        x_total: 0,
        x_delta: 0,
        by_delta: vec![0; tc.cover.kernel.len()],
        coker,
        ab_rank: fq.ab_rank(),
    };
    let mut err = None;
    for (i, (_, allowed)) in tc.involutions.iter().enumerate() {
        fq.for_each_hom(g, allowed, tc.h_order(), |images| {
            let v = match tc.pi_dagger(images, None) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    return;
                }
            };
            let hit = v == delta;
            s.x_total += 1;
            s.x_delta += hit as u64;
            if i == 0 {
                s.y_total += 1;
                s.y_delta += hit as u64;
                s.by_delta[tc.kernel_index(v)] += 1;
            }
        });
    }
    match err {
        Some(e) => Err(e),
        None => Ok(s),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YReport {
    pub config_hash: String,
    /// `E #{π ∈ Sur_Γ(Y, H) : π† = δ}`.
    pub y: MomentEstimate,
    /// `E #{π ∈ Sur(X, H ⋊ Γ) : π† = δ}`.
    pub x: MomentEstimate,
    pub y_total: MomentEstimate,
    pub coker: Option<MomentEstimate>,
    /// Paired per-sample `x - [H:H^Γ] y`.
    pub x_minus_index_y: MomentEstimate,
    pub fixed_index: usize,
    pub delta_order: u64,
    /// `ord δ ∤ q - 1`: the expectation is provably zero.
    pub delta_order_warning: bool,
    /// Samples where `Σ_δ` over `ord δ | q-1` differs from the total.
    pub additivity_violations: u64,
    /// Samples where the matrix-only count differs from the total.
    pub coker_mismatches: u64,
    /// Samples with at least one `Γ`-surjection.
    pub surjective_samples: u64,
}

pub fn estimate_moment_y(cfg: &YConfig, h: GammaGroup, threads: Option<usize>) -> Result<YReport> {
    if cfg.q.is_multiple_of(cfg.ell) {
        return Err(CllError::QNotCoprime { q: cfg.q, order: cfg.ell });
    }
    let ctx = ModelContext::new(cfg.n, cfg.ell, cfg.class)?;
    let tc = TargetContext::new(h, cfg.ell, ctx.d.relator_word()?)?;
    let delta = tc.delta(&cfg.delta)?;
    let samples = map_blocks(cfg.samples, threads, |b, c| {
        let mut rng = block_rng(cfg.seed, b);
        (0..c).map(|_| sample_y(&ctx, &tc, cfg.q, delta.value, &mut rng)).collect()
    })?;
    Ok(summarize_y(cfg, &tc, delta.order, &samples))
}

pub fn summarize_y(cfg: &YConfig, tc: &TargetContext, delta_order: u64, samples: &[YSample]) -> YReport {
    let hash = config_hash(cfg);
    let idx = tc.h.fixed_index();
    let est = |f: &dyn Fn(&YSample) -> f64| Welford::estimate(samples.iter().map(f), cfg.seed, &hash);
    let orders: Vec<u64> = tc.cover.kernel.iter().map(|&k| tc.cover.total.element_order(k) as u64).collect();
    let additivity_violations = samples.iter().filter(|s| {
        let sum: u64 = s.by_delta.iter().zip(&orders).filter(|(_, &o)| (cfg.q - 1).is_multiple_of(o)).map(|(c, _)| c).sum();
        sum != s.y_total
    }).count() as u64;
    let coker = tc.inversion_rank.map(|_| est(&|s| s.coker.unwrap() as f64));
    let coker_mismatches = samples.iter().filter(|s| s.coker.is_some_and(|c| c != s.y_total)).count() as u64;
    YReport {
        config_hash: hash.clone(),
        y: est(&|s| s.y_delta as f64),
        x: est(&|s| s.x_delta as f64),
        y_total: est(&|s| s.y_total as f64),
        coker,
        x_minus_index_y: est(&|s| s.x_delta as f64 - (idx as u64 * s.y_delta) as f64),
        fixed_index: idx,
        delta_order,
        delta_order_warning: !(cfg.q - 1).is_multiple_of(delta_order),
        additivity_violations,
        coker_mismatches,
        surjective_samples: samples.iter().filter(|s| s.y_total > 0).count() as u64,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZConfig {
    pub n: usize,
    pub ell: u64,
    pub class: u8,
    pub h: String,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSample {
    pub count: u64,
    pub coker: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZReport {
    pub config_hash: String,
    pub z: MomentEstimate,
    pub coker: Option<MomentEstimate>,
    pub coker_mismatches: u64,
}

pub fn sample_z(ctx: &ModelContext, units: &UnitAutSampler, h: &FiniteGroup, elem_rank: Option<u32>, rng: &mut impl Rng) -> Result<ZSample> {
    let d = &ctx.d;
    let phi = units.sample(d, rng)?;
    let zq = ctx.z_quotient(&phi)?;
    let all: Vec<usize> = h.elements().collect();
    let mut count = 0;
    zq.for_each_hom(h, &all, h.order(), |_| count += 1);
    let coker = elem_rank.map(|r| elementary_surjections(d.ell(), z_coker_rank(d.f.ring(), &phi.t), r));
    Ok(ZSample { count, coker })
}

/// `r` when `h ≅ (ℤ/ℓ)^r`.
pub fn elementary_rank(h: &FiniteGroup, ell: u64) -> Option<u32> {
    (h.is_abelian() && (h.order() == 1 || h.exponent() == ell)).then(|| crate::arith::valuation(h.order() as u64, ell))
}

pub fn estimate_moment_z(cfg: &ZConfig, h: &FiniteGroup, threads: Option<usize>) -> Result<ZReport> {
    if crate::arith::prime_divisors(h.order() as u64).iter().any(|&p| p != cfg.ell) {
        return Err(CllError::Precondition(format!("H must be an {}-group", cfg.ell)));
    }
    let ctx = ModelContext::new(cfg.n, cfg.ell, cfg.class)?;
    let units = UnitAutSampler::new(&ctx.d);
    let rank = elementary_rank(h, cfg.ell);
    let samples = map_blocks(cfg.samples, threads, |b, c| {
        let mut rng = block_rng(cfg.seed, b);
        (0..c).map(|_| sample_z(&ctx, &units, h, rank, &mut rng)).collect()
    })?;
    let hash = config_hash(cfg);
    Ok(ZReport {
        z: Welford::estimate(samples.iter().map(|s| s.count as f64), cfg.seed, &hash),
        coker: rank.map(|_| Welford::estimate(samples.iter().map(|s| s.coker.unwrap() as f64), cfg.seed, &hash)),
        coker_mismatches: samples.iter().filter(|s| s.coker.is_some_and(|c| c != s.count)).count() as u64,
        config_hash: hash,
    })
}

/// Exact `E #Sur(Z, ℤ/ℓ)` at finite `n` for the abelianized model:
/// `Z^ab = 𝔽^{2n} / (L + TL)` with `L` a fixed Lagrangian and `T` uniform in
/// `Sp`, so `#Sur = ℓ^{dim(L ∩ T⁻¹L)} - 1` and Lagrangian intersections
/// of dimension `k` have weight `ℓ^{(n-k)(n-k+1)/2} [n choose k]_ℓ / Π_{i≤n}(1 + ℓ^i)`.
pub fn z_cyclic_exact(ell: u64, n: usize) -> f64 {
    let l = ell as f64;
    let gauss = |n: usize, k: usize| -> f64 {
        (0..k).map(|i| (l.powi((n - i) as i32) - 1.0) / (l.powi((i + 1) as i32) - 1.0)).product()
    };
    let total: f64 = (1..=n).map(|i| 1.0 + l.powi(i as i32)).product();
    (0..=n).map(|k| l.powi(((n - k) * (n - k + 1) / 2) as i32) * gauss(n, k) / total * (l.powi(k as i32) - 1.0)).sum()
}
