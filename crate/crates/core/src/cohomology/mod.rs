//! Second cohomology, Schur multipliers and central extensions.
//!
//! Two independent routes: the relation module of a Cayley-graph presentation
//! gives `H₂(G,ℤ)(ℓ)` directly ([`hopf`]), and normalized bar cochains give
//! `H²(G,ℤ/ℓᴺ)` with explicit cocycles ([`bar`]). Covers are built from the
//! relation-module cocycles and verified on their tables.

pub mod bar;
pub mod covers;
pub mod hopf;
pub mod presentation;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{CllError, Result};
use crate::group::abelian::mixed_radix_digits;
use crate::group::{AbelianCoords, AbelianStructure, FiniteGroup, GroupHom};

pub use bar::{h2, schur_multiplier_uct, H2};
pub use covers::{full_schur_cover, l_schur_cover, reduced_schur_cover, schur_cover_for_primes};
pub use hopf::{coinflation, differential, schur_multiplier_l, Coinflation, RelationModule, H2_CAP};

/// A normalized 2-cocycle `G × G → ℤ/modulus` with trivial action, stored
/// row-major as `values[x·|G| + y]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle2 {
    pub order: usize,
    pub modulus: u64,
    pub values: Vec<u64>,
}

impl Cocycle2 {
    pub fn zero(order: usize, modulus: u64) -> Self {
        Cocycle2 { order, modulus, values: vec![0; order * order] }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.values[x * self.order + y]
    }

    /// Checks normalization and `α(x,y)+α(xy,z) = α(y,z)+α(x,yz)` on all triples.
    pub fn verify(&self, g: &FiniteGroup) -> Result<()> {
        let n = g.order();
        if self.order != n || self.values.len() != n * n {
            return Err(CllError::NotCocycle("table has the wrong size".into()));
        }
        let m = self.modulus;
        let e = g.identity();
        for x in g.elements() {
            if self.get(x, e) != 0 || self.get(e, x) != 0 {
                return Err(CllError::NotCocycle(format!("not normalized at {x}")));
            }
        }
        for x in g.elements() {
            for y in g.elements() {
                let xy = g.mul(x, y);
                let a = self.get(x, y);
                for z in g.elements() {
                    let lhs = (a + self.get(xy, z)) % m;
                    let rhs = (self.get(y, z) + self.get(x, g.mul(y, z))) % m;
                    if lhs != rhs {
                        return Err(CllError::NotCocycle(format!("identity fails at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `α(x,y) − α(y,x)` on a commuting pair.
    pub fn alternation(&self, x: usize, y: usize) -> u64 {
        (self.get(x, y) + self.modulus - self.get(y, x)) % self.modulus
    }
}

/// A central extension `1 → A → total → base → 1`.
///
/// Invariants: `proj` is surjective, `kernel = ker proj` is central, and
/// `stem_verified` records `kernel ⊆ [total, total]`.
#[derive(Clone, Debug)]
pub struct CentralExtension {
    pub total: Arc<FiniteGroup>,
    pub base: Arc<FiniteGroup>,
    pub proj: GroupHom,
    pub kernel: Vec<usize>,
    pub central_verified: bool,
    pub stem_verified: bool,
    coords: AbelianCoords,
    fibers: Vec<Vec<usize>>,
}

impl CentralExtension {
    pub fn new(total: Arc<FiniteGroup>, base: Arc<FiniteGroup>, proj_map: Vec<usize>) -> Result<Self> {
        let proj = GroupHom::new(total.clone(), base.clone(), proj_map)?;
        if !proj.is_surjective() {
            return Err(CllError::Precondition("projection is not surjective".into()));
        }
        let kernel = proj.kernel();
        if !kernel.iter().all(|&k| total.gens().iter().all(|&g| total.mul(k, g) == total.mul(g, k))) {
            return Err(CllError::NotCentral);
        }
        let commutators = total.commutator_subgroup();
        let mut in_comm = vec![false; total.order()];
        for &c in &commutators {
            in_comm[c] = true;
        }
        let stem_verified = kernel.iter().all(|&k| in_comm[k]);
        let coords = AbelianCoords::new(&total, &kernel);
        let mut fibers = vec![Vec::new(); base.order()];
        for x in total.elements() {
            fibers[proj.apply(x)].push(x);
        }
        Ok(CentralExtension { total, base, proj, kernel, central_verified: true, stem_verified, coords, fibers })
    }

    pub fn kernel_structure(&self) -> &AbelianStructure<usize> {
        &self.coords.structure
    }

    pub fn kernel_order(&self) -> usize {
        self.kernel.len()
    }

    /// Coordinates of a kernel element on the kernel basis.
    pub fn kernel_coords(&self, x: usize) -> Option<&[u64]> {
        self.coords.coords(x)
    }

    pub fn kernel_element(&self, c: &[u64]) -> usize {
        self.coords.element(c)
    }

    pub fn fiber(&self, g: usize) -> &[usize] {
        &self.fibers[g]
    }

    /// The unique preimage of `g` with the order of `g`; needs
    /// `gcd(ord g, |kernel|) = 1`.
    pub fn unique_same_order_lift(&self, g: usize) -> Result<usize> {
        let o = self.base.element_order(g);
        if arith::gcd(o as u64, self.kernel.len() as u64) != 1 {
            return Err(CllError::Precondition(format!(
                "order {o} of element {g} is not coprime to the kernel order {}",
                self.kernel.len()
            )));
        }
        let mut hits = self.fibers[g].iter().copied().filter(|&x| self.total.element_order(x) == o);
        let first = hits.next().ok_or(CllError::NoSuchLift(g))?;
        if hits.next().is_some() {
            return Err(CllError::NotUnique(g));
        }
        Ok(first)
    }

    /// Product of the unique same-order lifts of a generating, product-one tuple.
    pub fn lifting_invariant(&self, tuple: &[usize]) -> Result<usize> {
        let b = &self.base;
        if b.subgroup(tuple).len() != b.order() {
            return Err(CllError::NotGenerating);
        }
        if tuple.iter().fold(b.identity(), |acc, &x| b.mul(acc, x)) != b.identity() {
            return Err(CllError::Precondition("tuple product is not the identity".into()));
        }
        let t = &self.total;
        let mut acc = t.identity();
        for &g in tuple {
            acc = t.mul(acc, self.unique_same_order_lift(g)?);
        }
        debug_assert!(self.coords.contains(acc));
        Ok(acc)
    }

    /// Order of the total group over that of the base.
    pub fn index(&self) -> usize {
        self.total.order() / self.base.order()
    }
}

/// The extension of `g` by `A = ⊕ ℤ/factors[i]` with cocycle components
/// `cocycles[i]` (each reduced mod `factors[i]`): elements `(a, x)` with
/// `(a,x)(b,y) = (a + b + α(x,y), xy)`, index `idx(a)·|G| + x`.
pub fn extension_from_cocycles(g: &Arc<FiniteGroup>, factors: &[u64], cocycles: &[Cocycle2]) -> Result<CentralExtension> {
    if factors.len() != cocycles.len() {
        return Err(CllError::Precondition("one cocycle per factor".into()));
    }
    for (c, &f) in cocycles.iter().zip(factors) {
        if c.modulus % f != 0 {
            return Err(CllError::Precondition(format!("factor {f} does not divide modulus {}", c.modulus)));
        }
        c.verify(g)?;
    }
    let n = g.order();
    let a_order: u64 = factors.iter().product();
    let total_order = n * a_order as usize;
    if total_order > crate::group::TABLE_CAP {
        return Err(CllError::CapExceeded { what: "extension table", size: total_order, cap: crate::group::TABLE_CAP });
    }
    let digits: Vec<Vec<u64>> = (0..a_order).map(|i| mixed_radix_digits(i, factors)).collect();
    let encode = |d: &[u64]| d.iter().zip(factors).rev().fold(0u64, |acc, (&x, &f)| acc * f + x % f) as usize;
    let total = FiniteGroup::from_fn(total_order, g.identity(), |u, v| {
        let (ia, x) = (u / n, u % n);
        let (ib, y) = (v / n, v % n);
        let sum: Vec<u64> = digits[ia]
            .iter()
            .zip(&digits[ib])
            .zip(cocycles)
            .map(|((&a, &b), c)| a + b + c.get(x, y))
            .collect();
        encode(&sum) * n + g.mul(x, y)
    });
    let proj_map = (0..total_order).map(|u| u % n).collect();
    CentralExtension::new(Arc::new(total), g.clone(), proj_map)
}

/// Single-factor form with `A = ℤ/modulus`.
pub fn extension_from_cocycle(g: &Arc<FiniteGroup>, alpha: &Cocycle2) -> Result<CentralExtension> {
    extension_from_cocycles(g, &[alpha.modulus], std::slice::from_ref(alpha))
}
