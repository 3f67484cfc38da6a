//! Collection into basic commutators of chosen generators modulo an ideal.
//!
//! Given group elements `g_1..g_k` of a free nilpotent group whose images
//! generate `F / exp(J)`, every target `t` is written as
//! `t ≡ P_1 P_2 P_3 (mod exp(J))`, where `P_d` is an ordered product of powers
//! of degree-`d` commutators of the `g_b`. Level `d` is solved linearly in
//! `(J + L_{≥d}) / (J + L_{≥d+1})`, which is central in `F / exp(J + L_{≥d+1})`.

use std::sync::Arc;

use super::word::{Word, WordGroup};
use super::{FreeNilGroup, NilElement};
use crate::error::{CllError, Result};
use crate::linalg::{self, FieldSpan};

/// A commutator of collector generators (indices into the generator list).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basic {
    Gen(usize),
    /// `[g_j, g_k]`
    Pair(usize, usize),
    /// `[g_a, [g_j, g_k]]`
    Triple(usize, usize, usize),
}

impl Basic {
    pub fn to_word(self, gens: &[Word]) -> Word {
        match self {
            Basic::Gen(i) => gens[i].clone(),
            Basic::Pair(j, k) => Word::comm(gens[j].clone(), gens[k].clone()),
            Basic::Triple(a, j, k) => Word::comm(gens[a].clone(), Word::comm(gens[j].clone(), gens[k].clone())),
        }
    }

    pub fn eval<G: WordGroup>(self, g: &G, imgs: &[G::Elem]) -> G::Elem {
        match self {
            Basic::Gen(i) => imgs[i].clone(),
            Basic::Pair(j, k) => g.commutator(&imgs[j], &imgs[k]),
            Basic::Triple(a, j, k) => g.commutator(&imgs[a], &g.commutator(&imgs[j], &imgs[k])),
        }
    }
}

/// An ordered product of powers of basic commutators.
pub type Collected = Vec<(Basic, u64)>;

pub struct Collector {
    f: Arc<FreeNilGroup>,
    ideal: FieldSpan,
    levels: Vec<Vec<(Basic, NilElement)>>,
    /// `spans[d]` is `J + L_{≥d+2}`, the modulus at level `d + 1`.
    spans: Vec<FieldSpan>,
    /// Level columns reduced modulo `spans[d]`, restricted to its free columns.
    columns: Vec<linalg::Mat>,
}

impl Collector {
    /// `ideal` must be a Lie ideal; `gens` must generate modulo it.
    pub fn new(f: Arc<FreeNilGroup>, gens: &[NilElement], ideal: FieldSpan) -> Self {
        let k = gens.len();
        let mut levels = vec![gens.iter().enumerate().map(|(i, g)| (Basic::Gen(i), g.clone())).collect::<Vec<_>>()];
        let mut l2 = Vec::new();
        for j in 0..k {
            for kk in j + 1..k {
                l2.push((Basic::Pair(j, kk), f.commutator(&gens[j], &gens[kk])));
            }
        }
        let mut l3 = Vec::new();
        if f.class() == 3 {
            for &(b, ref c) in &l2 {
                let Basic::Pair(j, kk) = b else { unreachable!() };
                for a in j..k {
                    l3.push((Basic::Triple(a, j, kk), f.commutator(&gens[a], c)));
                }
            }
        }
        levels.push(l2);
        if f.class() == 3 {
            levels.push(l3);
        }
        let mut spans = Vec::new();
        let mut columns = Vec::new();
        for d in 1..=levels.len() {
            let mut s = ideal.clone();
            for c in d + 1..=f.class() as usize {
                for x in f.degree_range(c) {
                    let mut v = vec![0; f.dim()];
                    v[x] = 1;
                    s.insert(&v);
                }
            }
            let free = s.free_columns();
            let cols: Vec<Vec<u64>> = levels[d - 1].iter().map(|(_, e)| {
                let r = s.reduce(&e.0);
                free.iter().map(|&x| r[x]).collect()
            }).collect();
            columns.push(linalg::transpose_rect(&cols, free.len()));
            spans.push(s);
        }
        Collector { f, ideal, levels, spans, columns }
    }

    pub fn group(&self) -> &Arc<FreeNilGroup> {
        &self.f
    }

    pub fn ideal(&self) -> &FieldSpan {
        &self.ideal
    }

    pub fn num_gens(&self) -> usize {
        self.levels[0].len()
    }

    /// Collected form of `target` modulo the ideal.
    pub fn collect(&self, target: &NilElement) -> Result<Collected> {
        let f = &self.f;
        let r = f.ring();
        let mut res = target.clone();
        let mut out = Vec::new();
        for (d, s) in self.spans.iter().enumerate() {
            let red = s.reduce(&res.0);
            let free = s.free_columns();
            let b: Vec<u64> = free.iter().map(|&x| red[x]).collect();
            if b.iter().all(|&x| x == 0) {
                continue;
            }
            let ncols = self.levels[d].len();
            let e = linalg::solve(r, &self.columns[d], &b, ncols).ok_or(CllError::LayerSingular)?;
            let mut p = f.identity();
            for (i, &ei) in e.iter().enumerate() {
                if ei != 0 {
                    let (basic, ref elem) = self.levels[d][i];
                    out.push((basic, ei));
                    p = f.mul(&p, &f.pow(elem, ei as i64));
                }
            }
            res = f.mul(&f.inv(&p), &res);
        }
        if !self.ideal.contains(&res.0) {
            return Err(CllError::VerificationFailed("collection residue outside the ideal".into()));
        }
        Ok(out)
    }

    /// Evaluates a collected product given generator images.
    pub fn eval<G: WordGroup>(g: &G, imgs: &[G::Elem], expr: &Collected) -> G::Elem {
        expr.iter().fold(g.one(), |acc, &(b, e)| g.mul(&acc, &g.pow(&b.eval(g, imgs), e as i64)))
    }

    pub fn to_word(expr: &Collected, gens: &[Word]) -> Word {
        Word::Prod(expr.iter().map(|&(b, e)| {
            let w = b.to_word(gens);
            if e == 1 { w } else { Word::pow(w, e as i64) }
        }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collection_recovers_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, class, ell) in [(4, 2, 3), (3, 3, 5)] {
            let f = Arc::new(FreeNilGroup::new(m, class, ell).unwrap());
            let gens: Vec<NilElement> = (0..m).map(|i| f.generator(i).unwrap()).collect();
            let c = Collector::new(f.clone(), &gens, FieldSpan::new(*f.ring(), f.dim()));
            for _ in 0..200 {
                let t = f.random(&mut rng);
                let expr = c.collect(&t).unwrap();
                assert_eq!(Collector::eval(f.as_ref(), &gens, &expr), t);
            }
        }
    }
}
