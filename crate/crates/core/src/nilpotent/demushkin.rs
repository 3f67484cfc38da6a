//! Truncations of the Demuškin group on `2n` generators and its Schur cover.
//!
//! With `ω = Σ [X_{2i-1}, X_{2i}]`, the cover is `gtilde = F / I` where
//! `I = span{[ω, X_i]}` (zero at class 2), the group is `g = gtilde / ⟨ω⟩`,
//! and `xi = exp(ω)`. At class 2 `exp(ω)` is the standard relator
//! `[x1,x2]⋯[x_{2n-1},x_{2n}]`; at class 3 `exp(ω)` is used instead because it
//! is fixed by `x_i ↦ x_i⁻¹` on the nose.

use std::sync::Arc;

use super::collect::Collector;
use super::word::Word;
use super::{FreeNilGroup, NilElement};
use crate::error::{CllError, Result};
use crate::linalg::FieldSpan;

#[derive(Clone, Debug)]
pub struct DemushkinTrunc {
    pub n: usize,
    pub f: Arc<FreeNilGroup>,
    pub omega: Vec<u64>,
    pub xi: NilElement,
    /// `I`, the kernel of `F → gtilde`.
    pub i_span: FieldSpan,
    /// `I + ⟨ω⟩`, the kernel of `F → g`.
    pub g_span: FieldSpan,
}

/// Smallest Lie ideal containing `base` and `seeds`, optionally also stable
/// under `v ↦ (-1)^deg v`.
pub fn ideal_closure(f: &FreeNilGroup, base: FieldSpan, seeds: &[Vec<u64>], sigma_stable: bool) -> FieldSpan {
    let sigma = |v: &[u64]| f.negate_odd(v);
    let maps: &[&dyn Fn(&[u64]) -> Vec<u64>] = if sigma_stable { &[&sigma] } else { &[] };
    ideal_closure_with(f, base, seeds, maps)
}

/// Smallest Lie ideal containing `base` and `seeds` and stable under every
/// linear map in `maps`.
pub fn ideal_closure_with(f: &FreeNilGroup, base: FieldSpan, seeds: &[Vec<u64>], maps: &[&dyn Fn(&[u64]) -> Vec<u64>]) -> FieldSpan {
    let mut span = base;
    let gens: Vec<Vec<u64>> = (0..f.num_gens()).map(|i| f.generator(i).unwrap().0).collect();
    // Every vector ever inserted is queued once, so its brackets and images
    // end up in the span.
    let mut queue: Vec<Vec<u64>> = span.basis().to_vec();
    for s in seeds {
        if span.insert(s) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        for g in &gens {
            let b = f.bracket(g, &v);
            if span.insert(&b) {
                queue.push(b);
            }
        }
        for map in maps {
            let s = map(&v);
            if span.insert(&s) {
                queue.push(s);
            }
        }
    }
    span
}

impl DemushkinTrunc {
    pub fn new(n: usize, ell: u64, class: u8) -> Result<Self> {
        if n == 0 {
            return Err(CllError::Precondition("n must be positive".into()));
        }
        let f = Arc::new(FreeNilGroup::new(2 * n, class, ell)?);
        let mut omega = vec![0; f.dim()];
        for i in 0..n {
            omega[f.pair_coord(2 * i, 2 * i + 1)] = 1;
        }
        let mut i_span = FieldSpan::new(*f.ring(), f.dim());
        for i in 0..2 * n {
            i_span.insert(&f.bracket(&omega, &f.generator(i)?.0));
        }
        let mut g_span = i_span.clone();
        g_span.insert(&omega);
        let xi = NilElement(omega.clone());
        Ok(DemushkinTrunc { n, f, omega, xi, i_span, g_span })
    }

    pub fn ell(&self) -> u64 {
        self.f.ell()
    }

    pub fn class(&self) -> u8 {
        self.f.class()
    }

    /// `log_ℓ |gtilde|`.
    pub fn gtilde_rank(&self) -> usize {
        self.f.dim() - self.i_span.dim()
    }

    /// `log_ℓ |g|`.
    pub fn g_rank(&self) -> usize {
        self.f.dim() - self.g_span.dim()
    }

    pub fn reduce_gtilde(&self, v: &NilElement) -> NilElement {
        NilElement(self.i_span.reduce(&v.0))
    }

    pub fn proj(&self, v: &NilElement) -> NilElement {
        NilElement(self.g_span.reduce(&v.0))
    }

    pub fn mul(&self, a: &NilElement, b: &NilElement) -> NilElement {
        self.reduce_gtilde(&self.f.mul(a, b))
    }

    pub fn sigma(&self, v: &NilElement) -> NilElement {
        NilElement(self.f.negate_odd(&v.0))
    }

    pub fn eq_gtilde(&self, a: &[u64], b: &[u64]) -> bool {
        self.i_span.contains(&self.f.sub(a, b))
    }

    /// The relator `xi` as a word in `x_1..x_{2n}`.
    pub fn relator_word(&self) -> Result<Word> {
        if self.class() == 2 {
            return Ok(Word::lambda_std(self.n));
        }
        let gens: Vec<NilElement> = (0..2 * self.n).map(|i| self.f.generator(i)).collect::<Result<_>>()?;
        let c = Collector::new(self.f.clone(), &gens, FieldSpan::new(*self.f.ring(), self.f.dim()));
        let expr = c.collect(&self.xi)?;
        let words: Vec<Word> = (0..2 * self.n).map(Word::Gen).collect();
        Ok(Collector::to_word(&expr, &words))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_match_coordinate_dimensions() {
        let d = DemushkinTrunc::new(1, 3, 2).unwrap();
        assert_eq!((d.gtilde_rank(), d.g_rank()), (3, 2));
        let d = DemushkinTrunc::new(2, 3, 2).unwrap();
        assert_eq!((d.gtilde_rank(), d.g_rank()), (10, 9));
        let d = DemushkinTrunc::new(2, 5, 3).unwrap();
        assert_eq!(d.gtilde_rank() - d.g_rank(), 1);
        assert_eq!(d.i_span.dim(), 4);
    }

    #[test]
    fn relator_word_evaluates_to_xi() {
        for (n, ell, class) in [(2, 3, 2), (2, 5, 3), (1, 7, 3)] {
            let d = DemushkinTrunc::new(n, ell, class).unwrap();
            let w = d.relator_word().unwrap();
            assert_eq!(w.eval(d.f.as_ref()).unwrap(), d.xi);
        }
    }
}
