//! The antisymmetric matrix of a relator and the pairing it induces on a
//! finite stem quotient.

use std::collections::HashMap;

use super::{FreeNilGroup, NilElement};
use crate::arith;
use crate::error::{CllError, Result};
use crate::group::FiniteGroup;
use crate::linalg::{self, Mat, Zpk};

/// `m_ij = -a_ij` for `i < j`, `a_ji` for `i > j`, zero on the diagonal, where
/// `a_ij` is the `[X_i, X_j]` coordinate of `central`.
pub fn relator_matrix(f: &FreeNilGroup, central: &NilElement) -> Result<Mat> {
    if f.degree_range(1).any(|c| central.0[c] != 0) {
        return Err(CllError::NotInCommutatorPart);
    }
    let r = f.ring();
    let m = f.num_gens();
    let mut out = vec![vec![0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let a = central.0[f.pair_coord(i, j)];
            out[i][j] = r.neg(a);
            out[j][i] = a;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingImage {
    /// `b_ij` mod ℓ for `i < j` (zero elsewhere).
    pub b: Mat,
    /// Order of each generator's image in the abelianization.
    pub orders: Vec<u64>,
    /// Pairing exponents mod `modulus`, in units of a fixed generator of μ.
    pub values: Mat,
}

/// Writes `lambda ≡ Π_{i<j} [y_i, y_j]^{b_ij}` in the layer
/// `T^(2) / (T^(3) (T^(2))^ℓ)` and assembles the pairing exponents
/// `-b_ij e_i e_j` (`i < j`) and `b_ji e_i e_j` (`i > j`), where
/// `e_i = modulus / ord(y_i in T^ab)` is the dual-basis value on `y_i`.
pub fn pairing_image(t: &FiniteGroup, gens: &[usize], lambda: usize, modulus: u64) -> Result<PairingImage> {
    let primes = arith::prime_divisors(modulus);
    if primes.len() != 1 {
        return Err(CllError::Precondition(format!("modulus {modulus} is not a prime power")));
    }
    let ell = primes[0];
    if gens.iter().chain([&lambda]).any(|&x| x >= t.order()) {
        return Err(CllError::Precondition("element out of range".into()));
    }
    if t.subgroup(gens).len() != t.order() {
        return Err(CllError::NotGenerating);
    }
    if gens.iter().any(|&g| t.mul(g, lambda) != t.mul(lambda, g)) {
        return Err(CllError::NotCentral);
    }
    let all: Vec<usize> = t.elements().collect();
    let t2 = t.commutator_subgroup();
    let in_t2: Vec<bool> = {
        let mut v = vec![false; t.order()];
        for &x in &t2 {
            v[x] = true;
        }
        v
    };
    if !in_t2[lambda] {
        return Err(CllError::LayerSingular);
    }
    let t3 = t.mutual_commutator(&all, &t2);
    let mut seeds = t3.clone();
    seeds.extend(t2.iter().map(|&x| t.pow(x, ell as i64)));
    let n = t.subgroup(&seeds);
    let coset = |x: usize| n.iter().map(|&y| t.mul(x, y)).min().unwrap();

    let r = gens.len();
    let ring = Zpk::field(ell);
    let mut pairs = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            pairs.push((i, j, t.commutator(gens[i], gens[j])));
        }
    }
    // Coordinates of the layer on a greedy basis drawn from the commutators.
    let mut coords: HashMap<usize, Vec<u64>> = HashMap::from([(coset(t.identity()), Vec::new())]);
    let mut reps: Vec<(usize, Vec<u64>)> = vec![(t.identity(), Vec::new())];
    for &(_, _, c) in &pairs {
        if coords.contains_key(&coset(c)) {
            continue;
        }
        let mut next = Vec::new();
        for (x, v) in &reps {
            let mut y = *x;
            for k in 0..ell {
                let mut w = v.clone();
                w.push(k);
                next.push((y, w));
                y = t.mul(y, c);
            }
        }
        for (_, w) in reps.iter_mut() {
            w.push(0);
        }
        reps = next;
        coords = reps.iter().map(|(x, w)| (coset(*x), w.clone())).collect();
    }
    let dim = reps[0].1.len();
    let get = |x: usize| coords.get(&coset(x)).cloned().ok_or(CllError::LayerSingular);
    let cols: Vec<Vec<u64>> = pairs.iter().map(|&(_, _, c)| get(c)).collect::<Result<_>>()?;
    let a = linalg::transpose_rect(&cols, dim);
    let sol = linalg::solve(&ring, &a, &get(lambda)?, pairs.len()).ok_or(CllError::LayerSingular)?;

    let orders: Vec<u64> = gens.iter().map(|&g| {
        let mut k = 1;
        let mut x = g;
        while !in_t2[x] {
            x = t.mul(x, g);
            k += 1;
        }
        k
    }).collect();
    if orders.iter().any(|&o| !modulus.is_multiple_of(o)) {
        return Err(CllError::Precondition("generator order in the abelianization does not divide the modulus".into()));
    }
    let e: Vec<u64> = orders.iter().map(|&o| modulus / o).collect();
    let mut b = vec![vec![0; r]; r];
    let mut values = vec![vec![0; r]; r];
    for (&(i, j, _), &bij) in pairs.iter().zip(&sol) {
        b[i][j] = bij;
        let v = (bij as u128 * e[i] as u128 * e[j] as u128 % modulus as u128) as u64;
        values[i][j] = (modulus - v) % modulus;
        values[j][i] = v;
    }
    Ok(PairingImage { b, orders, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use crate::nilpotent::Word;

    #[test]
    fn standard_relator_gives_the_block_matrix() {
        let f = FreeNilGroup::new(4, 2, 3).unwrap();
        let m = relator_matrix(&f, &Word::lambda_std(2).eval(&f).unwrap()).unwrap();
        assert_eq!(m, vec![vec![0, 2, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 2], vec![0, 0, 1, 0]]);
        assert!(matches!(relator_matrix(&f, &f.generator(0).unwrap()), Err(CllError::NotInCommutatorPart)));
    }

    #[test]
    fn heisenberg_commutator_has_unit_coefficient() {
        let h = catalog::heisenberg(3);
        let (a, b) = (h.gens()[0], h.gens()[1]);
        let p = pairing_image(&h, &[a, b], h.commutator(a, b), 3).unwrap();
        assert_eq!(p.b, vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(p.values, vec![vec![0, 2], vec![1, 0]]);
        let z = pairing_image(&h, &[a, b], h.identity(), 9).unwrap();
        assert!(z.values.iter().flatten().all(|&v| v == 0));
        assert!(matches!(pairing_image(&h, &[a, b], a, 3), Err(CllError::NotCentral)));
        assert!(matches!(pairing_image(&h, &[a], h.identity(), 3), Err(CllError::NotGenerating)));
    }
}
