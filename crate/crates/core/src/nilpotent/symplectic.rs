//! The standard symplectic form on 𝔽_ℓ^{2n}, `⟨x, y⟩ = xᵀΩy` with
//! `Ω = diag([[0,1],[-1,0]], …)`, matching `ω = Σ [X_{2i-1}, X_{2i}]`.
//!
//! Matrices act on columns: column `j` of `T` is the image of `e_j`, so
//! `Λ²T(ω) = qω` reads `TΩTᵀ = qΩ`.

use rand::Rng;

use crate::error::{CllError, Result};
use crate::linalg::{self, Mat, Zpk};

pub fn omega(r: &Zpk, n: usize) -> Mat {
    let mut o = vec![vec![0; 2 * n]; 2 * n];
    for i in 0..n {
        o[2 * i][2 * i + 1] = 1;
        o[2 * i + 1][2 * i] = r.neg(1);
    }
    o
}

pub fn pairing(r: &Zpk, x: &[u64], y: &[u64]) -> u64 {
    let mut s = 0;
    for i in 0..x.len() / 2 {
        s = r.add(s, r.sub(r.mul(x[2 * i], y[2 * i + 1]), r.mul(x[2 * i + 1], y[2 * i])));
    }
    s
}

pub fn gram(r: &Zpk, vs: &[Vec<u64>]) -> Mat {
    vs.iter().map(|x| vs.iter().map(|y| pairing(r, x, y)).collect()).collect()
}

/// Matrix whose columns are `cols`.
pub fn from_columns(cols: &[Vec<u64>]) -> Mat {
    linalg::transpose_rect(cols, cols.first().map_or(0, Vec::len))
}

pub fn columns(t: &Mat) -> Vec<Vec<u64>> {
    linalg::transpose(t)
}

/// The multiplier of `t` if it is a symplectic similitude.
pub fn multiplier(r: &Zpk, t: &Mat) -> Option<u64> {
    let n = t.len() / 2;
    let o = omega(r, n);
    let lhs = linalg::mat_mul(r, &linalg::mat_mul(r, t, &o), &linalg::transpose(t));
    let s = lhs[0][1];
    let want: Mat = o.into_iter().map(|row| row.into_iter().map(|x| r.mul(s, x)).collect()).collect();
    (lhs == want && s != 0).then_some(s)
}

/// `diag(1, q, 1, q, …)`: a fixed element of multiplier `q`.
pub fn multiplier_element(r: &Zpk, n: usize, q: u64) -> Mat {
    let mut d = linalg::identity(2 * n);
    for i in 0..n {
        d[2 * i + 1][2 * i + 1] = r.reduce(q as i64);
    }
    d
}

fn random_vec(r: &Zpk, len: usize, rng: &mut impl Rng) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(0..r.p)).collect()
}

fn combine(r: &Zpk, coeffs: &[u64], basis: &[Vec<u64>], len: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    for (&c, b) in coeffs.iter().zip(basis) {
        for (d, &x) in v.iter_mut().zip(b) {
            *d = r.add(*d, r.mul(c, x));
        }
    }
    v
}

/// Uniform element of `Sp_{2n}(𝔽_ℓ)`: a uniformly random symplectic basis
/// built one hyperbolic pair at a time inside the current perpendicular.
pub fn sample_sp(r: &Zpk, n: usize, rng: &mut impl Rng) -> Mat {
    let dim = 2 * n;
    let o = omega(r, n);
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    for _ in 0..n {
        // Basis of the perpendicular of everything chosen so far.
        let cons: Mat = chosen.iter().map(|c| linalg::vec_mat(r, c, &o)).collect();
        let w = linalg::kernel(r, &cons, dim);
        let e = loop {
            let v = combine(r, &random_vec(r, w.len(), rng), &w, dim);
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        };
        // Some u in W pairs to 1 with e, since the form is nondegenerate on W.
        let u = w.iter().find(|b| pairing(r, &e, b) != 0).expect("nondegenerate");
        let inv = r.unit_inv(pairing(r, &e, u));
        let u: Vec<u64> = u.iter().map(|&x| r.mul(x, inv)).collect();
        let v = combine(r, &random_vec(r, w.len(), rng), &w, dim);
        let c = r.sub(1, pairing(r, &e, &v));
        let f: Vec<u64> = v.iter().zip(&u).map(|(&a, &b)| r.add(a, r.mul(c, b))).collect();
        chosen.push(e);
        chosen.push(f);
    }
    from_columns(&chosen)
}

/// Uniform element of `{T : TΩTᵀ = qΩ}` as `S · diag(1, q, …)`.
pub fn sample_similitude(r: &Zpk, n: usize, q: u64, rng: &mut impl Rng) -> Mat {
    linalg::mat_mul(r, &sample_sp(r, n, rng), &multiplier_element(r, n, q))
}

/// All similitudes of multiplier `q` in dimension 2 (`det T = q`).
pub fn similitudes_dim2(r: &Zpk, q: u64) -> Vec<Mat> {
    let p = r.p;
    let q = r.reduce(q as i64);
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if r.sub(r.mul(a, d), r.mul(b, c)) == q {
                        out.push(vec![vec![a, b], vec![c, d]]);
                    }
                }
            }
        }
    }
    out
}

/// Deterministic symplectic Gram–Schmidt on coordinate space 𝔽^k with the
/// alternating form `g`: returns `E` (columns) with
/// `EᵀgE = J_m ⊕ 0` and the count `m` of hyperbolic pairs.
fn normalize_form(r: &Zpk, g: &Mat) -> (Vec<Vec<u64>>, usize) {
    let k = g.len();
    let form = |x: &[u64], y: &[u64]| -> u64 {
        let mut s = 0;
        for i in 0..k {
            for j in 0..k {
                s = r.add(s, r.mul(x[i], r.mul(g[i][j], y[j])));
            }
        }
        s
    };
    let mut rest: Vec<Vec<u64>> = (0..k).map(|i| {
        let mut v = vec![0; k];
        v[i] = 1;
        v
    }).collect();
    let mut out = Vec::new();
    let mut pairs = 0;
    loop {
        let hit = (0..rest.len()).find_map(|i| (0..rest.len()).find(|&j| form(&rest[i], &rest[j]) != 0).map(|j| (i, j)));
        let Some((i, j)) = hit else { break };
        let e = rest[i].clone();
        let inv = r.unit_inv(form(&e, &rest[j]));
        let f: Vec<u64> = rest[j].iter().map(|&x| r.mul(x, inv)).collect();
        let mut next = Vec::new();
        for (t, w) in rest.iter().enumerate() {
            if t == i || t == j {
                continue;
            }
            let (we, wf) = (form(w, &e), form(w, &f));
            next.push(w.iter().zip(e.iter().zip(&f)).map(|(&x, (&a, &b))| r.sub(r.add(x, r.mul(we, b)), r.mul(wf, a))).collect());
        }
        out.push(e);
        out.push(f);
        pairs += 1;
        rest = next;
    }
    out.extend(rest);
    (out, pairs)
}

/// Extends independent vectors `partial` to a basis `B` of 𝔽^{2n} whose Gram
/// matrix is `s · M`, where `M` depends only on `Gram(partial) / s`.
///
/// The first `partial.len()` vectors of `B` are `partial` itself. Two inputs
/// with `Gram(p₂) = q · Gram(p₁)` give completions with
/// `Gram(B₂) = q · Gram(B₁)` (taking `s = 1` and `s = q`), so `B₂B₁⁻¹` is a
/// similitude of multiplier `q` sending `p₁` to `p₂`.
pub fn q_symplectic_completion(r: &Zpk, n: usize, partial: &[Vec<u64>], s: u64) -> Result<Vec<Vec<u64>>> {
    let dim = 2 * n;
    let s = r.reduce(s as i64);
    if s == 0 {
        return Err(CllError::InconsistentPrescription("zero multiplier".into()));
    }
    let k = partial.len();
    if partial.iter().any(|v| v.len() != dim) || linalg::rank(r, &partial.to_vec()) != k {
        return Err(CllError::InconsistentPrescription("input vectors are not independent".into()));
    }
    let sinv = r.unit_inv(s);
    let g: Mat = gram(r, partial).into_iter().map(|row| row.into_iter().map(|x| r.mul(x, sinv)).collect()).collect();
    let (e, pairs) = normalize_form(r, &g);
    let normalized: Vec<Vec<u64>> = e.iter().map(|c| combine(r, c, partial, dim)).collect();
    let radical = &normalized[2 * pairs..];
    let o = omega(r, n);
    let mut partners: Vec<Vec<u64>> = Vec::new();
    for t in 0..radical.len() {
        let mut rows: Mat = Vec::new();
        let mut rhs = Vec::new();
        for (u, rv) in radical.iter().enumerate() {
            rows.push(linalg::vec_mat(r, rv, &o));
            rhs.push(if u == t { s } else { 0 });
        }
        for v in normalized[..2 * pairs].iter().chain(&partners) {
            rows.push(linalg::vec_mat(r, v, &o));
            rhs.push(0);
        }
        let g = linalg::solve(r, &rows, &rhs, dim)
            .ok_or_else(|| CllError::InconsistentPrescription("no partner for an isotropic vector".into()))?;
        partners.push(g);
    }
    let mut used: Vec<Vec<u64>> = normalized.clone();
    used.extend(partners.iter().cloned());
    let cons: Mat = used.iter().map(|v| linalg::vec_mat(r, v, &o)).collect();
    let w = linalg::kernel(r, &cons, dim);
    let wg = gram(r, &w);
    let (we, wpairs) = normalize_form(r, &wg);
    if 2 * wpairs != w.len() {
        return Err(CllError::InconsistentPrescription("degenerate complement".into()));
    }
    let mut out: Vec<Vec<u64>> = partial.to_vec();
    out.extend(partners);
    for (i, c) in we.iter().enumerate() {
        let v = combine(r, c, &w, dim);
        // Scale the second vector of each pair so it pairs to s.
        out.push(if i % 2 == 1 { v.iter().map(|&x| r.mul(x, s)).collect() } else { v });
    }
    if out.len() != dim || linalg::rank(r, &out) != dim {
        return Err(CllError::InconsistentPrescription("completion is not a basis".into()));
    }
    Ok(out)
}
