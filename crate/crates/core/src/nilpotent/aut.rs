//! Automorphisms of `gtilde ⋊ Γ` preserving `ker(gtilde → g)` and acting on
//! it by `q`.
//!
//! Such a `φ` is determined by `Φ(X_i)` and `h = φ(s)s⁻¹`, and the constrained
//! set is parametrized bijectively by
//! `(T, H₁, d_i, H₃)`: `T` a similitude of multiplier `q`, `H₁` any degree-1
//! vector, `d_i, H₃` any degree-3 vectors modulo `I`, with
//! `Φ(X_i) = TX_i + ½[H₁, TX_i] + d_i` and `log h = H₁ + H₃`.
//! Compatibility with `s` forces the degree-2 correction and an odd `log h`;
//! `Φ(ω) = qω + (q/2)[H₁, ω] ≡ qω (mod I)` then holds automatically.
//! Uniform parameters therefore give the uniform measure on the set.

use rand::Rng;

use super::demushkin::DemushkinTrunc;
use super::symplectic;
use super::NilElement;
use crate::error::{CllError, Result};
use crate::linalg::{self, Mat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedAut {
    /// Action on the degree-1 layer (columns are images of `X_i`).
    pub t: Mat,
    /// `Φ(X_i)` as Lie coordinates reduced modulo `I`.
    pub images: Vec<Vec<u64>>,
    /// `log h` where `φ(s) = h·s`.
    pub gamma_twist: Vec<u64>,
    pub q: u64,
}

fn random_degree(d: &DemushkinTrunc, deg: usize, rng: &mut impl Rng) -> Vec<u64> {
    let mut v = vec![0; d.f.dim()];
    for c in d.f.degree_range(deg) {
        v[c] = rng.gen_range(0..d.ell());
    }
    v
}

/// Lifts a degree-1 matrix to the Lie automorphism `X_i ↦ TX_i`.
fn linear_images(d: &DemushkinTrunc, t: &Mat) -> Vec<Vec<u64>> {
    let m = 2 * d.n;
    (0..m).map(|i| {
        let mut v = vec![0; d.f.dim()];
        for j in 0..m {
            v[j] = t[j][i];
        }
        v
    }).collect()
}

impl ConstrainedAut {
    pub fn identity(d: &DemushkinTrunc) -> Self {
        let t = linalg::identity(2 * d.n);
        ConstrainedAut { images: linear_images(d, &t), t, gamma_twist: vec![0; d.f.dim()], q: 1 }
    }

    /// The automorphism with parameters `(T, H₁, d_i, H₃)`; verified.
    pub fn from_parameters(d: &DemushkinTrunc, t: Mat, h1: &[u64], corr3: &[Vec<u64>], h3: &[u64]) -> Result<Self> {
        let f = &d.f;
        let r = f.ring();
        let q = symplectic::multiplier(r, &t)
            .ok_or_else(|| CllError::VerificationFailed("T is not a symplectic similitude".into()))?;
        let mut hv = vec![0; f.dim()];
        hv[..2 * d.n].copy_from_slice(h1);
        let lin = linear_images(d, &t);
        let images = lin.iter().enumerate().map(|(i, tx)| {
            let mut y = tx.clone();
            f.axpy(&mut y, r.unit_inv(2), &f.bracket(&hv, tx));
            if let Some(c) = corr3.get(i) {
                y = f.add(&y, c);
            }
            d.i_span.reduce(&y)
        }).collect();
        let twist = d.i_span.reduce(&f.add(&hv, h3));
        let a = ConstrainedAut { t, images, gamma_twist: twist, q };
        a.verify(d, true)?;
        Ok(a)
    }

    /// Uniform element of `Aut(gtilde ⋊ Γ, π; q)`.
    pub fn sample(d: &DemushkinTrunc, q: u64, rng: &mut impl Rng) -> Result<Self> {
        let r = d.f.ring();
        if q.is_multiple_of(d.ell()) {
            return Err(CllError::QNotCoprime { q, order: d.ell() });
        }
        let t = symplectic::sample_similitude(r, d.n, q, rng);
        let h1: Vec<u64> = (0..2 * d.n).map(|_| rng.gen_range(0..d.ell())).collect();
        let (corr3, h3) = if d.class() == 3 {
            ((0..2 * d.n).map(|_| random_degree(d, 3, rng)).collect(), random_degree(d, 3, rng))
        } else {
            (Vec::new(), vec![0; d.f.dim()])
        };
        Self::from_parameters(d, t, &h1, &corr3, &h3)
    }

    /// Lie image of `v`, reduced modulo `I`.
    pub fn apply(&self, d: &DemushkinTrunc, v: &[u64]) -> Vec<u64> {
        d.i_span.reduce(&d.f.lie_map(&self.images, v))
    }

    pub fn apply_element(&self, d: &DemushkinTrunc, x: &NilElement) -> NilElement {
        NilElement(self.apply(d, &x.0))
    }

    /// `self ∘ other`.
    pub fn compose(&self, d: &DemushkinTrunc, other: &ConstrainedAut) -> ConstrainedAut {
        let r = d.f.ring();
        let images = other.images.iter().map(|y| self.apply(d, y)).collect();
        // φ₁(h₂ s) = φ₁(h₂) h₁ s.
        let h = d.mul(&self.apply_element(d, &NilElement(other.gamma_twist.clone())), &NilElement(self.gamma_twist.clone()));
        ConstrainedAut { t: linalg::mat_mul(r, &self.t, &other.t), images, gamma_twist: h.0, q: r.mul(self.q, other.q) }
    }

    /// Post-composition with conjugation by `s`, which acts as `sigma`.
    pub fn sigma_conjugate(&self, d: &DemushkinTrunc) -> ConstrainedAut {
        let r = d.f.ring();
        ConstrainedAut {
            t: self.t.iter().map(|row| row.iter().map(|&x| r.neg(x)).collect()).collect(),
            images: self.images.iter().map(|y| d.f.negate_odd(y)).collect(),
            gamma_twist: d.f.negate_odd(&self.gamma_twist),
            q: self.q,
        }
    }

    /// Checks the defining constraints; `with_gamma` adds compatibility with
    /// `φ(s) = h·s`.
    pub fn verify(&self, d: &DemushkinTrunc, with_gamma: bool) -> Result<()> {
        let f = &d.f;
        let r = f.ring();
        let m = 2 * d.n;
        let fail = |s: &str| Err(CllError::VerificationFailed(s.into()));
        if symplectic::multiplier(r, &self.t) != Some(r.reduce(self.q as i64)) {
            return fail("degree-1 action is not a similitude of the stated multiplier");
        }
        for i in 0..m {
            if (0..m).any(|j| self.images[i][j] != self.t[j][i]) {
                return fail("generator images disagree with T");
            }
        }
        // Invertible on the degree-1 layer, hence surjective (Burnside).
        if linalg::rank(r, &self.t) != m {
            return fail("image does not generate");
        }
        for b in d.i_span.basis() {
            if !d.i_span.contains(&f.lie_map(&self.images, b)) {
                return fail("I is not preserved");
            }
        }
        let fo = self.apply(d, &d.omega);
        if !d.eq_gtilde(&fo, &f.scale(r.reduce(self.q as i64), &d.omega)) {
            return fail("xi does not map to xi^q");
        }
        let gens: Vec<NilElement> = (0..m).map(|i| f.generator(i)).collect::<Result<_>>()?;
        for a in &gens {
            for b in &gens {
                let lhs = self.apply_element(d, &f.mul(a, b));
                let rhs = d.mul(&self.apply_element(d, a), &self.apply_element(d, b));
                if !d.eq_gtilde(&lhs.0, &rhs.0) {
                    return fail("not multiplicative on generator pairs");
                }
            }
        }
        if with_gamma {
            let h = &self.gamma_twist;
            if !d.eq_gtilde(&f.negate_odd(h), &f.scale(r.neg(1), h)) {
                return fail("twist is not inverted by sigma");
            }
            for (i, y) in self.images.iter().enumerate() {
                // φ(σ(x_i)) = h σ(φ(x_i)) h⁻¹.
                let lhs = f.scale(r.neg(1), y);
                let sy = f.negate_odd(y);
                let hb = f.bracket(h, &sy);
                let mut rhs = f.add(&sy, &hb);
                f.axpy(&mut rhs, r.unit_inv(2), &f.bracket(h, &hb));
                if !d.eq_gtilde(&lhs, &rhs) {
                    return fail(&format!("not compatible with s on x{}", i + 1));
                }
            }
        }
        Ok(())
    }
}

/// Sampler for `Aut(gtilde, π; 1)` without the `Γ` constraint.
///
/// Elements factor as `T̂ ∘ Ψ` with `T ∈ Sp` lifted linearly and `Ψ` unipotent:
/// `Ψ(X_i) = X_i + c_i + d_i`, where the degree-2 corrections satisfy the
/// linear condition `Σ [X_{2i-1}, c_{2i}] + [c_{2i-1}, X_{2i}] ∈ I`
/// (vacuous at class 2), solved once here.
pub struct UnitAutSampler {
    /// Basis of admissible `(c_1..c_{2n})`, each a list of `2n` vectors.
    basis: Vec<Vec<Vec<u64>>>,
}

impl UnitAutSampler {
    pub fn new(d: &DemushkinTrunc) -> Self {
        let f = &d.f;
        let r = f.ring();
        let m = 2 * d.n;
        let deg2: Vec<usize> = f.degree_range(2).collect();
        let unit = |i: usize, c: usize| -> Vec<Vec<u64>> {
            let mut cs = vec![vec![0; f.dim()]; m];
            cs[i][c] = 1;
            cs
        };
        let all: Vec<Vec<Vec<u64>>> = (0..m).flat_map(|i| deg2.iter().map(move |&c| (i, c))).map(|(i, c)| unit(i, c)).collect();
        if d.class() == 2 {
            return UnitAutSampler { basis: all };
        }
        let gens: Vec<Vec<u64>> = (0..m).map(|i| f.generator(i).unwrap().0).collect();
        let image = |cs: &[Vec<u64>]| -> Vec<u64> {
            let mut v = vec![0; f.dim()];
            for i in 0..d.n {
                v = f.add(&v, &f.bracket(&gens[2 * i], &cs[2 * i + 1]));
                v = f.add(&v, &f.bracket(&cs[2 * i], &gens[2 * i + 1]));
            }
            d.i_span.reduce(&v)
        };
        let cols: Vec<Vec<u64>> = all.iter().map(|cs| image(cs)).collect();
        let a = linalg::transpose_rect(&cols, f.dim());
        let ker = linalg::kernel(r, &a, all.len());
        let basis = ker.iter().map(|k| {
            let mut cs = vec![vec![0; f.dim()]; m];
            for (coef, u) in k.iter().zip(&all) {
                for i in 0..m {
                    f.axpy(&mut cs[i], *coef, &u[i]);
                }
            }
            cs
        }).collect();
        UnitAutSampler { basis }
    }

    pub fn correction_dim(&self) -> usize {
        self.basis.len()
    }

    /// The automorphism `T̂ ∘ Ψ` with `T ∈ Sp`; verified.
    pub fn build(&self, d: &DemushkinTrunc, t: Mat, coeffs: &[u64], corr3: &[Vec<u64>]) -> Result<ConstrainedAut> {
        let a = self.assemble(d, t, coeffs, corr3)?;
        if a.q != 1 {
            return Err(CllError::VerificationFailed("T is not symplectic".into()));
        }
        Ok(a)
    }

    /// `T̂ ∘ Ψ` for a similitude `T` of any multiplier; verified.
    fn assemble(&self, d: &DemushkinTrunc, t: Mat, coeffs: &[u64], corr3: &[Vec<u64>]) -> Result<ConstrainedAut> {
        let f = &d.f;
        let m = 2 * d.n;
        let q = symplectic::multiplier(f.ring(), &t).ok_or_else(|| CllError::VerificationFailed("T is not a similitude".into()))?;
        let mut psi: Vec<Vec<u64>> = (0..m).map(|i| f.generator(i).unwrap().0).collect();
        for (coef, b) in coeffs.iter().zip(&self.basis) {
            for i in 0..m {
                f.axpy(&mut psi[i], *coef, &b[i]);
            }
        }
        for (i, c) in corr3.iter().enumerate() {
            psi[i] = f.add(&psi[i], c);
        }
        let lin = linear_images(d, &t);
        let images = psi.iter().map(|p| d.i_span.reduce(&f.lie_map(&lin, p))).collect();
        let a = ConstrainedAut { t, images, gamma_twist: vec![0; f.dim()], q };
        a.verify(d, false)?;
        Ok(a)
    }

    pub fn sample(&self, d: &DemushkinTrunc, rng: &mut impl Rng) -> Result<ConstrainedAut> {
        let r = d.f.ring();
        let t = symplectic::sample_sp(r, d.n, rng);
        let coeffs: Vec<u64> = (0..self.basis.len()).map(|_| rng.gen_range(0..d.ell())).collect();
        let corr3: Vec<Vec<u64>> = if d.class() == 3 {
            (0..2 * d.n).map(|_| random_degree(d, 3, rng)).collect()
        } else {
            Vec::new()
        };
        self.build(d, t, &coeffs, &corr3)
    }

    /// Every `T̂ ∘ Ψ` at class 2 with `T` ranging over `ts` (any multiplier).
    pub fn enumerate_class2(&self, d: &DemushkinTrunc, ts: &[Mat]) -> Result<Vec<ConstrainedAut>> {
        assert_eq!(d.class(), 2);
        let k = self.basis.len();
        let total = (d.ell() as usize).pow(k as u32);
        let mut out = Vec::with_capacity(ts.len() * total);
        for t in ts {
            for mut idx in 0..total {
                let coeffs: Vec<u64> = (0..k).map(|_| {
                    let c = (idx % d.ell() as usize) as u64;
                    idx /= d.ell() as usize;
                    c
                }).collect();
                out.push(self.assemble(d, t.clone(), &coeffs, &[])?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_is_accepted() {
        let d = DemushkinTrunc::new(2, 3, 2).unwrap();
        ConstrainedAut::identity(&d).verify(&d, true).unwrap();
        let t = linalg::identity(4);
        let a = ConstrainedAut::from_parameters(&d, t, &[0; 4], &[], &vec![0; d.f.dim()]).unwrap();
        assert_eq!(a, ConstrainedAut::identity(&d));
    }

    #[test]
    fn samples_verify_at_both_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (n, ell, class, q) in [(2, 3, 2, 7), (2, 5, 3, 2), (1, 7, 3, 3)] {
            let d = DemushkinTrunc::new(n, ell, class).unwrap();
            for _ in 0..30 {
                let a = ConstrainedAut::sample(&d, q, &mut rng).unwrap();
                a.sigma_conjugate(&d).verify(&d, true).unwrap();
            }
            let z = UnitAutSampler::new(&d);
            for _ in 0..30 {
                z.sample(&d, &mut rng).unwrap();
            }
        }
    }

    #[test]
    fn wrong_degree_two_correction_is_rejected() {
        let d = DemushkinTrunc::new(1, 3, 2).unwrap();
        let mut a = ConstrainedAut::identity(&d);
        a.gamma_twist[0] = 1;
        assert!(matches!(a.verify(&d, true), Err(CllError::VerificationFailed(_))));
    }
}
