//! Conjugation-stable subsets closed under invertible powering.

use super::FiniteGroup;
use crate::arith;
use crate::error::{CllError, Result};

/// Invariants: `members` is sorted, closed under conjugation, and contains
/// `x^k` whenever it contains `x` and `gcd(k, ord x) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CSet {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl CSet {
    pub fn new(g: &FiniteGroup, members: &[usize]) -> Result<Self> {
        let mut mask = vec![false; g.order()];
        for &x in members {
            if x >= g.order() {
                return Err(CllError::Precondition(format!("element {x} out of range")));
            }
            mask[x] = true;
        }
        for x in g.elements().filter(|&x| mask[x]) {
            if g.gens().iter().any(|&s| !mask[g.conj(x, s)]) {
                return Err(CllError::Precondition(format!("not closed under conjugation at {x}")));
            }
            let o = g.element_order(x);
            for k in 1..o {
                if arith::gcd(k as u64, o as u64) == 1 && !mask[g.pow(x, k as i64)] {
                    return Err(CllError::Precondition(format!("not closed under powering at {x}")));
                }
            }
        }
        let members = g.elements().filter(|&x| mask[x]).collect();
        Ok(CSet { members, mask })
    }

    pub fn involutions(g: &FiniteGroup) -> Self {
        Self::of_order(g, 2)
    }

    pub fn of_order(g: &FiniteGroup, k: usize) -> Self {
        let m: Vec<usize> = g.elements().filter(|&x| g.element_order(x) == k).collect();
        CSet::new(g, &m).expect("order classes are closed")
    }

    pub fn nontrivial(g: &FiniteGroup) -> Self {
        let m: Vec<usize> = g.elements().filter(|&x| x != g.identity()).collect();
        CSet::new(g, &m).expect("complement of identity is closed")
    }

    /// Nontrivial elements whose order equals the order of their image under
    /// `rho` (given as an element map into a group `gamma`).
    pub fn same_order_as_image(g: &FiniteGroup, gamma: &FiniteGroup, rho: &[usize]) -> Self {
        let m: Vec<usize> = g
            .elements()
            .filter(|&x| x != g.identity() && g.element_order(x) == gamma.element_order(rho[x]))
            .collect();
        CSet::new(g, &m).expect("order conditions are conjugation and power stable")
    }

    /// `involutions`, `nontrivial`, `order:k`, or a comma list of elements
    /// whose closure is taken.
    pub fn parse(g: &FiniteGroup, spec: &str) -> Result<Self> {
        match spec {
            "involutions" => Ok(Self::involutions(g)),
            "nontrivial" => Ok(Self::nontrivial(g)),
            _ => {
                if let Some(k) = spec.strip_prefix("order:") {
                    let k = k.parse().map_err(|_| CllError::UnknownSpec(spec.into()))?;
                    return Ok(Self::of_order(g, k));
                }
                let seeds: Vec<usize> = spec
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| CllError::UnknownSpec(spec.into())))
                    .collect::<Result<_>>()?;
                Self::closure(g, &seeds)
            }
        }
    }

    /// Smallest c-set containing `seeds`.
    pub fn closure(g: &FiniteGroup, seeds: &[usize]) -> Result<Self> {
        let mut mask = vec![false; g.order()];
        for &x in seeds {
            if x >= g.order() {
                return Err(CllError::Precondition(format!("element {x} out of range")));
            }
            for y in g.elements() {
                let c = g.conj(x, y);
                let o = g.element_order(c);
                for k in 1..=o.max(1) {
                    if arith::gcd(k as u64, o as u64) == 1 {
                        mask[g.pow(c, k as i64)] = true;
                    }
                }
            }
        }
        let m: Vec<usize> = g.elements().filter(|&x| mask[x]).collect();
        CSet::new(g, &m)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask[x]
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Conjugacy classes inside the set, each sorted, ordered by least member.
    pub fn classes(&self, g: &FiniteGroup) -> Vec<Vec<usize>> {
        g.conjugacy_classes().into_iter().filter(|c| self.mask[c[0]]).collect()
    }

    /// Whether the set generates `g`.
    pub fn generates(&self, g: &FiniteGroup) -> bool {
        g.subgroup(&self.members).len() == g.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn csets() {
        let g = catalog::semidirect_inversion(3, 2);
        let c = CSet::involutions(&g);
        assert_eq!(c.members().len(), 9);
        assert_eq!(c.classes(&g).len(), 1);
        assert!(c.generates(&g));
        let s3 = catalog::dihedral(3);
        let r = CSet::of_order(&s3, 3);
        assert_eq!(r.members(), &[1, 2]);
        assert!(CSet::new(&s3, &[1]).is_err());
        assert_eq!(CSet::closure(&s3, &[1]).unwrap(), r);
        assert_eq!(CSet::parse(&s3, "order:2").unwrap().members().len(), 3);
    }
}
