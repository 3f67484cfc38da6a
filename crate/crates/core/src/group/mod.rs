//! Finite groups as dense multiplication tables.

pub mod abelian;
pub mod catalog;
pub mod cset;
pub mod gamma;
pub mod hom;
pub mod io;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::arith;
use crate::error::{CllError, Result};

pub use abelian::{AbelianCoords, AbelianStructure};
pub use cset::CSet;
pub use gamma::{GammaGroup, SemidirectProduct};
pub use hom::GroupHom;

/// Largest order stored as a table.
pub const TABLE_CAP: usize = 2048;
/// Largest source order for exhaustive surjection enumeration.
pub const ENUM_CAP: usize = 256;
/// Tables up to this order are checked for associativity exhaustively.
const EXHAUSTIVE_ASSOC: usize = 512;

/// A finite group stored as a dense multiplication table.
///
/// Invariants: `mult` is associative, `identity` is two-sided, `inv` is a
/// two-sided inverse table and `gens` generates the whole group.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    n: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
    gens: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.identity == other.identity && self.mult == other.mult
    }
}

impl FiniteGroup {
    /// Validates an externally supplied table.
    pub fn from_mult_table(table: &[Vec<usize>], identity: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(CllError::MalformedTable("empty table".into()));
        }
        if n > TABLE_CAP {
            return Err(CllError::CapExceeded { what: "group table", size: n, cap: TABLE_CAP });
        }
        if identity >= n {
            return Err(CllError::NoIdentity(identity));
        }
        let mut mult = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(CllError::MalformedTable(format!("row {i} has length {}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(CllError::MalformedTable(format!("entry {v} out of range in row {i}")));
                }
                mult.push(v as u32);
            }
        }
        for a in 0..n {
            if mult[identity * n + a] as usize != a || mult[a * n + identity] as usize != a {
                return Err(CllError::NoIdentity(identity));
            }
        }
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            let row = &mult[a * n..(a + 1) * n];
            match row.iter().position(|&v| v as usize == identity) {
                Some(b) if mult[b * n + a] as usize == identity => inv[a] = b as u32,
                _ => return Err(CllError::NoInverse(a)),
            }
        }
        check_associative(n, &mult)?;
        Ok(Self::assemble(n, mult, inv, identity))
    }

    /// Builds a group from a product closure known to satisfy the axioms.
    pub(crate) fn from_fn(n: usize, identity: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        assert!(n <= TABLE_CAP, "group order {n} exceeds table cap");
        let mut mult = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mult.push(f(a, b) as u32);
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            let b = (0..n).find(|&b| mult[a * n + b] as usize == identity).expect("inverse exists");
            inv[a] = b as u32;
        }
        debug_assert!(check_associative(n, &mult).is_ok());
        Self::assemble(n, mult, inv, identity)
    }

    fn assemble(n: usize, mult: Vec<u32>, inv: Vec<u32>, identity: usize) -> Self {
        let mut g = FiniteGroup { n, mult, inv, identity, gens: Vec::new(), labels: None };
        g.gens = g.greedy_generators();
        g
    }

    /// Replaces the generator list after checking that it generates.
    pub fn with_gens(mut self, gens: Vec<usize>) -> Result<Self> {
        if gens.iter().any(|&g| g >= self.n) {
            return Err(CllError::MalformedTable("generator out of range".into()));
        }
        if self.subgroup(&gens).len() != self.n {
            return Err(CllError::NotGenerating);
        }
        self.gens = gens;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(CllError::MalformedTable("label count differs from order".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn table_row(&self, a: usize) -> &[u32] {
        &self.mult[a * self.n..(a + 1) * self.n]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        self.elements().fold(1, |acc, a| arith::lcm(acc, self.element_order(a) as u64))
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// `g⁻¹ a g`.
    pub fn conj(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn eval_word(&self, images: &[usize], word: &[(usize, i64)]) -> usize {
        word.iter().fold(self.identity, |acc, &(g, e)| self.mul(acc, self.pow(images[g], e)))
    }

    /// Sorted element list of the subgroup generated by `seeds`.
    pub fn subgroup(&self, seeds: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.n];
        self.close_into(&mut member, seeds);
        (0..self.n).filter(|&x| member[x]).collect()
    }

    /// Extends `member` to `<gens>`; the current members must lie in `<gens>`.
    fn close_into(&self, member: &mut [bool], gens: &[usize]) {
        member[self.identity] = true;
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&x| member[x]).collect();
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !member[y] {
                    member[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }

    /// Smallest subgroup containing `seeds`, normal in `self` and stable under
    /// every automorphism (given as element permutations) in `autos`.
    pub fn normal_closure(&self, seeds: &[usize], autos: &[&[u32]]) -> Vec<usize> {
        let mut gens: Vec<usize> = seeds.iter().copied().filter(|&s| s != self.identity).collect();
        let mut member = vec![false; self.n];
        self.close_into(&mut member, &gens);
        loop {
            let mut fresh = Vec::new();
            for &h in &gens {
                for &g in &self.gens {
                    let c = self.conj(h, g);
                    if !member[c] {
                        fresh.push(c);
                    }
                }
                for a in autos {
                    let c = a[h] as usize;
                    if !member[c] {
                        fresh.push(c);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            fresh.sort_unstable();
            fresh.dedup();
            gens.extend(fresh);
            self.close_into(&mut member, &gens);
        }
        (0..self.n).filter(|&x| member[x]).collect()
    }

    pub fn is_normal(&self, sub: &[usize]) -> bool {
        let mut member = vec![false; self.n];
        for &x in sub {
            member[x] = true;
        }
        sub.iter().all(|&h| self.gens.iter().all(|&g| member[self.conj(h, g)]))
    }

    /// Quotient by a normal subgroup, with the projection as an element map.
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        if !self.is_normal(normal) || !normal.contains(&self.identity) {
            return Err(CllError::NotNormal);
        }
        let mut coset = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if coset[x] == usize::MAX {
                let id = reps.len();
                reps.push(x);
                for &k in normal {
                    coset[self.mul(x, k)] = id;
                }
            }
        }
        let m = reps.len();
        let q = FiniteGroup::from_fn(m, coset[self.identity], |a, b| coset[self.mul(reps[a], reps[b])]);
        let gens: Vec<usize> = self.gens.iter().map(|&g| coset[g]).collect();
        let q = q.with_gens(gens)?;
        Ok((q, coset))
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let seeds: Vec<usize> = self
            .gens
            .iter()
            .flat_map(|&a| self.gens.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        self.normal_closure(&seeds, &[])
    }

    /// `[A, B]` for normal subgroups `A`, `B` given as element sets.
    pub fn mutual_commutator(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut seeds = Vec::new();
        for &x in a {
            for &y in b {
                seeds.push(self.commutator(x, y));
            }
        }
        seeds.sort_unstable();
        seeds.dedup();
        self.normal_closure(&seeds, &[])
    }

    /// `G = γ₁ ⊇ γ₂ ⊇ …`, ending at the first repeated term.
    pub fn lower_central_series(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = self.elements().collect();
        let mut series = vec![all.clone()];
        loop {
            let last = series.last().unwrap();
            let next = self.mutual_commutator(last, &self.gens);
            if next.len() == last.len() {
                break;
            }
            series.push(next);
        }
        series
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.gens.iter().all(|&g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Conjugacy classes, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut classes = Vec::new();
        for x in 0..self.n {
            if seen[x] {
                continue;
            }
            let mut class = vec![x];
            seen[x] = true;
            let mut i = 0;
            while i < class.len() {
                let y = class[i];
                for &g in &self.gens {
                    let c = self.conj(y, g);
                    if !seen[c] {
                        seen[c] = true;
                        class.push(c);
                    }
                }
                i += 1;
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }

    /// Hex SHA-256 of the order, identity and table.
    pub fn canonical_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update((self.identity as u64).to_le_bytes());
        for &v in &self.mult {
            h.update(v.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Isomorphism-invariant summary: element-order histogram and class sizes.
    pub fn fingerprint(&self) -> (Vec<(usize, usize)>, Vec<usize>) {
        let mut orders = std::collections::BTreeMap::new();
        for a in self.elements() {
            *orders.entry(self.element_order(a)).or_insert(0) += 1;
        }
        let mut sizes: Vec<usize> = self.conjugacy_classes().iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        (orders.into_iter().collect(), sizes)
    }

    /// Primary invariants of an abelian group, sorted by prime then exponent.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        assert!(self.is_abelian(), "abelian_invariants needs an abelian group");
        abelian::primary_invariants_of(self, &self.elements().collect::<Vec<_>>())
    }

    /// Primary invariants of `G/[G,G]`.
    pub fn abelianization_invariants(&self) -> Vec<u64> {
        let comm = self.commutator_subgroup();
        let (q, _) = self.quotient(&comm).expect("commutator subgroup is normal");
        q.abelian_invariants()
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let nb = b.n;
        let g = FiniteGroup::from_fn(a.n * nb, a.identity * nb + b.identity, |x, y| {
            a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)
        });
        let mut gens: Vec<usize> = a.gens.iter().map(|&x| x * nb + b.identity).collect();
        gens.extend(b.gens.iter().map(|&y| a.identity * nb + y));
        g.with_gens(gens).expect("factor generators generate the product")
    }

    /// Applies a relabeling `perm` (old index → new index).
    pub fn relabel(&self, perm: &[usize]) -> FiniteGroup {
        let mut back = vec![0; self.n];
        for (old, &new) in perm.iter().enumerate() {
            back[new] = old;
        }
        let g = FiniteGroup::from_fn(self.n, perm[self.identity], |a, b| perm[self.mul(back[a], back[b])]);
        g.with_gens(self.gens.iter().map(|&x| perm[x]).collect()).expect("relabeled generators")
    }

    /// Greedy small generating set: repeatedly add the element that enlarges
    /// the generated subgroup the most.
    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = vec![false; self.n];
        current[self.identity] = true;
        let mut size = 1;
        while size < self.n {
            let mut best = (0, self.identity);
            let mut tried = vec![false; self.n];
            for x in 0..self.n {
                if current[x] || tried[x] {
                    continue;
                }
                // Elements of the same cyclic subgroup give the same closure.
                let mut y = x;
                loop {
                    tried[y] = true;
                    y = self.mul(y, x);
                    if y == x {
                        break;
                    }
                }
                let mut trial = current.clone();
                gens.push(x);
                self.close_into(&mut trial, &gens);
                gens.pop();
                let s = trial.iter().filter(|&&b| b).count();
                if s > best.0 {
                    best = (s, x);
                    if s == self.n {
                        break;
                    }
                }
            }
            gens.push(best.1);
            self.close_into(&mut current, &gens);
            size = best.0;
        }
        // Drop generators made redundant by later choices.
        let mut i = 0;
        while i < gens.len() && gens.len() > 1 {
            let rest: Vec<usize> = gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &g)| g).collect();
            if self.subgroup(&rest).len() == self.n {
                gens = rest;
            } else {
                i += 1;
            }
        }
        gens
    }
}

fn check_associative(n: usize, mult: &[u32]) -> Result<()> {
    let m = |a: usize, b: usize| mult[a * n + b] as usize;
    if n <= EXHAUSTIVE_ASSOC {
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(CllError::NotAssociative(a, b, c));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6173_736f_6369_6174);
        for _ in 0..100_000 {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if m(m(a, b), c) != m(a, m(b, c)) {
                return Err(CllError::NotAssociative(a, b, c));
            }
        }
    }
    Ok(())
}
