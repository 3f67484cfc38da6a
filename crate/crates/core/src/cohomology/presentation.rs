//! Cayley-graph presentation of a finite group on its generator list.
//!
//! Vertices are group elements, edges `(x, i)` run from `x` to `x·s_i`. A BFS
//! spanning tree rooted at the identity gives positive tree words `w_x`; each
//! non-tree edge `e = (x, i)` gives the Schreier relator `w_x s_i w_{x s_i}⁻¹`,
//! and these relators form a basis of the relation module `R/[R,R]`.

use std::collections::VecDeque;

use crate::group::FiniteGroup;

/// A word as `(generator index, exponent)` pairs.
pub type Word = Vec<(usize, i64)>;

#[derive(Clone, Debug)]
pub struct CayleyPresentation {
    pub gens: Vec<usize>,
    /// Positive tree word of every element, as generator indices.
    pub words: Vec<Vec<usize>>,
    /// Non-tree edges `(x, i)` in column order.
    pub nontree: Vec<(usize, usize)>,
    /// Edge `x·|S| + i` → column, or `usize::MAX` for tree edges.
    edge_col: Vec<usize>,
    n: usize,
}

impl CayleyPresentation {
    pub fn new(g: &FiniteGroup) -> Self {
        let gens = g.gens().to_vec();
        let n = g.order();
        let k = gens.len();
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut tree = vec![false; n * k];
        words[g.identity()] = Some(Vec::new());
        let mut queue = VecDeque::from([g.identity()]);
        while let Some(x) = queue.pop_front() {
            for (i, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    w.push(i);
                    words[y] = Some(w);
                    tree[x * k + i] = true;
                    queue.push_back(y);
                }
            }
        }
        let words: Vec<Vec<usize>> = words.into_iter().map(|w| w.expect("generators generate")).collect();
        let mut edge_col = vec![usize::MAX; n * k];
        let mut nontree = Vec::new();
        for x in 0..n {
            for i in 0..k {
                if !tree[x * k + i] {
                    edge_col[x * k + i] = nontree.len();
                    nontree.push((x, i));
                }
            }
        }
        CayleyPresentation { gens, words, nontree, edge_col, n }
    }

    pub fn rank(&self) -> usize {
        self.nontree.len()
    }

    /// Column of edge `(x, i)`, `None` for tree edges.
    pub fn column(&self, x: usize, i: usize) -> Option<usize> {
        let c = self.edge_col[x * self.gens.len() + i];
        (c != usize::MAX).then_some(c)
    }

    /// Walks `word` from `start`, adding ±1 to `acc` for every non-tree edge
    /// traversed; returns the end vertex.
    pub fn walk(&self, g: &FiniteGroup, start: usize, word: &[(usize, i64)], acc: &mut [i64]) -> usize {
        let mut v = start;
        for &(i, e) in word {
            let s = self.gens[i];
            if e >= 0 {
                for _ in 0..e {
                    if let Some(c) = self.column(v, i) {
                        acc[c] += 1;
                    }
                    v = g.mul(v, s);
                }
            } else {
                let si = g.inv(s);
                for _ in 0..-e {
                    v = g.mul(v, si);
                    if let Some(c) = self.column(v, i) {
                        acc[c] -= 1;
                    }
                }
            }
        }
        v
    }

    pub fn tree_word(&self, x: usize) -> Word {
        self.words[x].iter().map(|&i| (i, 1)).collect()
    }

    /// Schreier relator of the non-tree edge in column `c`.
    pub fn relator(&self, g: &FiniteGroup, c: usize) -> Word {
        let (x, i) = self.nontree[c];
        let y = g.mul(x, self.gens[i]);
        let mut w = self.tree_word(x);
        w.push((i, 1));
        w.extend(self.words[y].iter().rev().map(|&j| (j, -1)));
        w
    }

    /// Rows `z·C_e − C_e` for every generator `z`: the relations cutting the
    /// relation module down to its coinvariants `R/[F,R]`.
    pub fn coinvariant_relations(&self, g: &FiniteGroup) -> Vec<Vec<i64>> {
        let rank = self.rank();
        let mut rows = Vec::with_capacity(self.gens.len() * rank);
        for &z in &self.gens {
            for c in 0..rank {
                let mut row = vec![0i64; rank];
                let end = self.walk(g, z, &self.relator(g, c), &mut row);
                debug_assert_eq!(end, z);
                row[c] -= 1;
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            }
        }
        rows
    }

    pub fn order(&self) -> usize {
        self.n
    }
}
