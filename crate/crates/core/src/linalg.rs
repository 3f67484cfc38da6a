//! Linear algebra over the local rings ℤ/pᵏ (including fields, k = 1).
//!
//! Matrices are dense `Vec<Vec<u64>>` with entries reduced mod pᵏ.

use crate::arith;

pub type Mat = Vec<Vec<u64>>;

/// The ring ℤ/pᵏ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zpk {
    pub p: u64,
    pub k: u32,
    pub m: u64,
}

impl Zpk {
    pub fn new(p: u64, k: u32) -> Self {
        assert!(k >= 1);
        let m = p.checked_pow(k).expect("modulus fits in u64");
        assert!(m < (1 << 31), "modulus too large for u64 products");
        Zpk { p, k, m }
    }

    pub fn field(p: u64) -> Self {
        Zpk::new(p, 1)
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.m as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.m
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.m - b) % self.m
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.m
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.m - a) % self.m
    }

    /// p-adic valuation, `k` for zero.
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            self.k
        } else {
            arith::valuation(a, self.p).min(self.k)
        }
    }

    pub fn unit_inv(&self, a: u64) -> u64 {
        arith::inv_mod(a as i64, self.m).expect("unit")
    }

    pub fn pow_p(&self, e: u32) -> u64 {
        if e >= self.k {
            0
        } else {
            self.p.pow(e)
        }
    }
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn mat_mul(r: &Zpk, a: &Mat, b: &Mat) -> Mat {
    let cols = b.first().map_or(0, |row| row.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(0, |acc, (&x, brow)| r.add(acc, r.mul(x, brow[j]))))
                .collect()
        })
        .collect()
}

pub fn mat_vec(r: &Zpk, a: &Mat, v: &[u64]) -> Vec<u64> {
    a.iter().map(|row| row.iter().zip(v).fold(0, |acc, (&x, &y)| r.add(acc, r.mul(x, y)))).collect()
}

/// Row vector times matrix.
pub fn vec_mat(r: &Zpk, v: &[u64], a: &Mat) -> Vec<u64> {
    let cols = a.first().map_or(0, |row| row.len());
    let mut out = vec![0; cols];
    for (&x, row) in v.iter().zip(a) {
        if x == 0 {
            continue;
        }
        for (o, &y) in out.iter_mut().zip(row) {
            *o = r.add(*o, r.mul(x, y));
        }
    }
    out
}

pub fn transpose(a: &Mat) -> Mat {
    let cols = a.first().map_or(0, |row| row.len());
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Matrix with the given columns, each of length `rows` (also when empty).
pub fn transpose_rect(columns: &[Vec<u64>], rows: usize) -> Mat {
    (0..rows).map(|i| columns.iter().map(|c| c[i]).collect()).collect()
}

/// Column-side Smith reduction: `P·A·Q = diag(p^vals)` with `Q`, `Q⁻¹` tracked.
///
/// `vals[j]` is the valuation of the j-th diagonal entry, `k` when the column
/// has no pivot.
#[derive(Clone, Debug)]
pub struct SmithColumns {
    pub vals: Vec<u32>,
    pub q: Mat,
    pub q_inv: Mat,
}

pub fn smith_columns(r: &Zpk, rows: &[Vec<u64>], cols: usize) -> SmithColumns {
    let mut a: Mat = rows.iter().filter(|row| row.iter().any(|&x| x != 0)).cloned().collect();
    let mut q = identity(cols);
    let mut q_inv = identity(cols);
    let mut vals = vec![r.k; cols];
    let mut t = 0;
    while t < cols && t < a.len() {
        // Minimal valuation in the remaining block; stop early at a unit.
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = r.val(x);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                        if v == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in q.iter_mut() {
                row.swap(t, pj);
            }
            q_inv.swap(t, pj);
        }
        // Normalize the pivot to exactly p^v.
        let unit = a[t][t] / r.p.pow(v);
        let uinv = r.unit_inv(unit % r.m);
        for x in a[t].iter_mut() {
            *x = r.mul(*x, uinv);
        }
        let pv = r.p.pow(v);
        for i in 0..a.len() {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let f = a[i][t] / pv;
            let (head, tail) = a.split_at_mut(i.max(t));
            let (src, dst) = if i < t { (&tail[0], &mut head[i]) } else { (&head[t], &mut tail[0]) };
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = r.sub(*d, r.mul(f, s));
            }
        }
        for j in t + 1..cols {
            let x = a[t][j];
            if x == 0 {
                continue;
            }
            let f = x / pv;
            // column_j -= f·column_t, tracked as Q ← Q·E, Q⁻¹ ← E⁻¹·Q⁻¹.
            a[t][j] = 0;
            for row in q.iter_mut() {
                row[j] = r.sub(row[j], r.mul(f, row[t]));
            }
            let (top, rest) = q_inv.split_at_mut(j);
            let src = &rest[0];
            let dst = &mut top[t];
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = r.add(*d, r.mul(f, s));
            }
        }
        vals[t] = v;
        t += 1;
        a.retain(|row| row.iter().any(|&x| x != 0));
        if a.len() < t {
            break;
        }
    }
    SmithColumns { vals, q, q_inv }
}

/// Row echelon generators of a submodule of `(ℤ/pᵏ)^c`, built row by row.
///
/// Invariant: `pivots[j]`, when present, is zero before column `j` and has
/// entry exactly `p^v` at `j`, with `v` minimal among the span rows reaching `j`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ring: Zpk,
    pub cols: usize,
    pivots: Vec<Option<Vec<u64>>>,
}

impl Echelon {
    pub fn new(ring: Zpk, cols: usize) -> Self {
        Echelon { ring, cols, pivots: vec![None; cols] }
    }

    pub fn insert(&mut self, mut row: Vec<u64>) {
        let r = self.ring;
        let mut j = 0;
        while j < self.cols {
            if row[j] == 0 {
                j += 1;
                continue;
            }
            let w = r.val(row[j]);
            match &mut self.pivots[j] {
                None => {
                    normalize(&r, &mut row, j, w);
                    self.pivots[j] = Some(row);
                    return;
                }
                Some(piv) => {
                    let v = r.val(piv[j]);
                    if w < v {
                        normalize(&r, &mut row, j, w);
                        std::mem::swap(piv, &mut row);
                        continue;
                    }
                    let f = row[j] / r.p.pow(v);
                    for (d, &s) in row.iter_mut().zip(piv.iter()).skip(j) {
                        *d = r.sub(*d, r.mul(f, s));
                    }
                    j += 1;
                }
            }
        }
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.pivots.iter().flatten().cloned().collect()
    }
}

fn normalize(r: &Zpk, row: &mut [u64], j: usize, v: u32) {
    let unit = row[j] / r.p.pow(v);
    let inv = r.unit_inv(unit);
    for x in row.iter_mut().skip(j) {
        *x = r.mul(*x, inv);
    }
}

/// A finite abelian p-group presented as a subquotient `K / I` of `(ℤ/pᵏ)^c`,
/// where `K = ker E` and `I ⊆ K` is spanned by given vectors.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub ring: Zpk,
    /// Orders `p^w` of the cyclic summands (trivial ones dropped).
    pub factors: Vec<u64>,
    /// Ambient representatives of the summand generators.
    pub generators: Vec<Vec<u64>>,
    kernel: SmithColumns,
    /// Exponent of each kernel summand.
    kernel_exps: Vec<u32>,
    quot: SmithColumns,
    /// Indices into the quotient Smith diagonal kept as nontrivial summands.
    kept: Vec<usize>,
}

impl Subquotient {
    pub fn new(ring: Zpk, equations: &[Vec<u64>], cols: usize, image: &[Vec<u64>]) -> Self {
        let kernel = smith_columns(&ring, equations, cols);
        let kernel_exps = kernel.vals.clone();
        let mut rel: Mat = Vec::new();
        for b in image {
            rel.push(kernel_coords(&ring, &kernel, &kernel_exps, b).expect("image lies in the kernel"));
        }
        for (i, &e) in kernel_exps.iter().enumerate() {
            let mut row = vec![0; cols];
            row[i] = ring.pow_p(e);
            rel.push(row);
        }
        let quot = smith_columns(&ring, &rel, cols);
        let mut factors = Vec::new();
        let mut generators = Vec::new();
        let mut kept = Vec::new();
        for (j, &w) in quot.vals.iter().enumerate() {
            if w == 0 {
                continue;
            }
            kept.push(j);
            factors.push(ring.p.pow(w));
            // Generator z = j-th row of Q2⁻¹, then y_i = p^(k-e_i)·z_i, x = Q·y.
            let z = &quot.q_inv[j];
            let y: Vec<u64> = z
                .iter()
                .zip(&kernel_exps)
                .map(|(&zi, &e)| ring.mul(zi % ring.p.pow(e).max(1), ring.pow_p(ring.k - e)))
                .collect();
            generators.push(mat_vec(&ring, &kernel.q, &y));
        }
        Subquotient { ring, factors, generators, kernel, kernel_exps, quot, kept }
    }

    /// Coordinates of a kernel vector on the summand generators, or `None` if
    /// the vector is not in the kernel.
    pub fn coords(&self, x: &[u64]) -> Option<Vec<u64>> {
        let z = kernel_coords(&self.ring, &self.kernel, &self.kernel_exps, x)?;
        let w = vec_mat(&self.ring, &z, &self.quot.q);
        Some(self.kept.iter().zip(&self.factors).map(|(&j, &f)| w[j] % f).collect())
    }
}

/// `z` with `x = Q·(p^(k-e_i)·z_i)`, or `None` if `x ∉ ker E`.
fn kernel_coords(r: &Zpk, s: &SmithColumns, exps: &[u32], x: &[u64]) -> Option<Vec<u64>> {
    let y = mat_vec(r, &s.q_inv, x);
    y.iter()
        .zip(exps)
        .map(|(&yi, &e)| {
            let shift = r.k - e;
            if shift == 0 {
                Some(yi)
            } else {
                let d = r.p.pow(shift);
                (yi % d == 0).then(|| (yi / d) % r.p.pow(e).max(1))
            }
        })
        .collect()
}

/// Quotient `(ℤ/pᵏ)^c / rowspace(rels)` in Smith coordinates.
#[derive(Clone, Debug)]
pub struct CokernelCoords {
    pub ring: Zpk,
    pub smith: SmithColumns,
}

impl CokernelCoords {
    pub fn new(ring: Zpk, rels: &[Vec<u64>], cols: usize) -> Self {
        CokernelCoords { ring, smith: smith_columns(&ring, rels, cols) }
    }

    /// Coordinates `x·Q`; entry j is meaningful mod `p^vals[j]`.
    pub fn coords(&self, x: &[u64]) -> Vec<u64> {
        vec_mat(&self.ring, x, &self.smith.q)
    }
}

/// Reduced row echelon form over a prime field; returns pivot columns.
pub fn rref(r: &Zpk, a: &mut Mat) -> Vec<usize> {
    debug_assert_eq!(r.k, 1);
    let rows = a.len();
    let cols = a.first().map_or(0, |row| row.len());
    let mut pivots = Vec::new();
    let mut t = 0;
    for c in 0..cols {
        if t == rows {
            break;
        }
        let Some(p) = (t..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(t, p);
        let inv = r.unit_inv(a[t][c]);
        for x in a[t].iter_mut() {
            *x = r.mul(*x, inv);
        }
        for i in 0..rows {
            if i != t && a[i][c] != 0 {
                let f = a[i][c];
                let pivot_row = a[t].clone();
                for (d, s) in a[i].iter_mut().zip(pivot_row) {
                    *d = r.sub(*d, r.mul(f, s));
                }
            }
        }
        pivots.push(c);
        t += 1;
    }
    a.truncate(t);
    pivots
}

pub fn rank(r: &Zpk, a: &Mat) -> usize {
    let mut b = a.clone();
    rref(r, &mut b).len()
}

/// Basis of `{x : A·x = 0}` over a prime field.
pub fn kernel(r: &Zpk, a: &Mat, cols: usize) -> Mat {
    let mut b = a.clone();
    let pivots = rref(r, &mut b);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; cols];
            v[f] = 1;
            for (row, &pc) in b.iter().zip(&pivots) {
                v[pc] = r.neg(row[f]);
            }
            v
        })
        .collect()
}

/// One solution of `A·x = b` over a prime field.
pub fn solve(r: &Zpk, a: &Mat, b: &[u64], cols: usize) -> Option<Vec<u64>> {
    let mut aug: Mat = a.iter().zip(b).map(|(row, &bi)| {
        let mut row = row.clone();
        row.push(bi);
        row
    }).collect();
    let pivots = rref(r, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![0; cols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[cols];
    }
    Some(x)
}

pub fn inverse(r: &Zpk, a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut aug: Mat = a.iter().enumerate().map(|(i, row)| {
        let mut row = row.clone();
        row.extend((0..n).map(|j| u64::from(i == j)));
        row
    }).collect();
    let pivots = rref(r, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// A subspace of 𝔽_p^cols held in fully reduced echelon form.
///
/// Invariant: every row has a unit pivot and is zero at all other pivots, so
/// `reduce` returns the unique representative vanishing on pivot columns.
#[derive(Clone, Debug)]
pub struct FieldSpan {
    ring: Zpk,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FieldSpan {
    pub fn new(ring: Zpk, cols: usize) -> Self {
        debug_assert_eq!(ring.k, 1);
        FieldSpan { ring, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let r = &self.ring;
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = v[pc];
            if f != 0 {
                for (d, &s) in v.iter_mut().zip(row) {
                    *d = r.sub(*d, r.mul(f, s));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let r = self.ring;
        let mut v = self.reduce(v);
        let Some(pc) = v.iter().position(|&x| x != 0) else { return false };
        let inv = r.unit_inv(v[pc]);
        for x in v.iter_mut() {
            *x = r.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let f = row[pc];
            if f != 0 {
                for (d, &s) in row.iter_mut().zip(&v) {
                    *d = r.sub(*d, r.mul(f, s));
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(pc);
        true
    }

    /// Columns not carrying a pivot: coordinates of the quotient space.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| !self.pivots.contains(c)).collect()
    }
}
