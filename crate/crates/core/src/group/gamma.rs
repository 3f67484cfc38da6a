//! Groups with an action of a fixed finite group Γ, and semidirect products.

use std::sync::Arc;

use super::FiniteGroup;
use crate::arith;
use crate::error::{CllError, Result};

/// A group `H` with an action of `Γ` by automorphisms.
///
/// Invariants: `action[γ]` is an automorphism of `group` and `γ ↦ action[γ]`
/// is a homomorphism `Γ → Aut(group)`.
#[derive(Clone, Debug)]
pub struct GammaGroup {
    pub group: Arc<FiniteGroup>,
    pub gamma: Arc<FiniteGroup>,
    action: Vec<Vec<u32>>,
}

/// `H ⋊ Γ` with element index `γ·|H| + h` for the pair `(h, γ)`.
#[derive(Clone, Debug)]
pub struct SemidirectProduct {
    pub group: Arc<FiniteGroup>,
    pub h_order: usize,
    /// `H → H⋊Γ`.
    pub embed_h: Vec<usize>,
    /// Splitting `Γ → H⋊Γ`.
    pub section: Vec<usize>,
    /// `H⋊Γ → Γ`.
    pub proj: Vec<usize>,
}

impl SemidirectProduct {
    /// The `H`-component of an element.
    pub fn h_part(&self, x: usize) -> usize {
        x % self.h_order
    }

    pub fn pair(&self, h: usize, gamma: usize) -> usize {
        gamma * self.h_order + h
    }
}

impl GammaGroup {
    pub fn new(group: Arc<FiniteGroup>, gamma: Arc<FiniteGroup>, action: Vec<Vec<u32>>) -> Result<Self> {
        let n = group.order();
        if action.len() != gamma.order() {
            return Err(CllError::InvalidAction("one permutation per element of Γ required".into()));
        }
        for (c, perm) in action.iter().enumerate() {
            if perm.len() != n {
                return Err(CllError::InvalidAction(format!("permutation {c} has wrong length")));
            }
            let mut seen = vec![false; n];
            for &v in perm {
                if v as usize >= n || seen[v as usize] {
                    return Err(CllError::InvalidAction(format!("action of {c} is not a bijection")));
                }
                seen[v as usize] = true;
            }
            for a in 0..n {
                for b in 0..n {
                    if perm[group.mul(a, b)] as usize != group.mul(perm[a] as usize, perm[b] as usize) {
                        return Err(CllError::InvalidAction(format!("action of {c} is not a homomorphism")));
                    }
                }
            }
        }
        for c in 0..gamma.order() {
            for d in 0..gamma.order() {
                let cd = gamma.mul(c, d);
                // Left action: (cd)·h = c·(d·h).
                if (0..n).any(|h| action[cd][h] != action[c][action[d][h] as usize]) {
                    return Err(CllError::InvalidAction("action is not a homomorphism from Γ".into()));
                }
            }
        }
        Ok(GammaGroup { group, gamma, action })
    }

    /// Action through the Γ-generators only; the remaining elements are filled in.
    pub fn from_generator_action(group: Arc<FiniteGroup>, gamma: Arc<FiniteGroup>, gen_perms: &[Vec<u32>]) -> Result<Self> {
        let n = group.order();
        let mut action: Vec<Option<Vec<u32>>> = vec![None; gamma.order()];
        action[gamma.identity()] = Some((0..n as u32).collect());
        let mut queue = vec![gamma.identity()];
        while let Some(c) = queue.pop() {
            for (i, &s) in gamma.gens().iter().enumerate() {
                let cs = gamma.mul(c, s);
                if action[cs].is_none() {
                    let pc = action[c].as_ref().unwrap();
                    let ps = &gen_perms[i];
                    action[cs] = Some((0..n).map(|h| pc[ps[h] as usize]).collect());
                    queue.push(cs);
                }
            }
        }
        let action = action.into_iter().map(|a| a.expect("Γ generated")).collect();
        GammaGroup::new(group, gamma, action)
    }

    pub fn trivial_action(group: Arc<FiniteGroup>, gamma: Arc<FiniteGroup>) -> Self {
        let n = group.order() as u32;
        let action = (0..gamma.order()).map(|_| (0..n).collect()).collect();
        GammaGroup { group, gamma, action }
    }

    #[inline]
    pub fn act(&self, gamma: usize, h: usize) -> usize {
        self.action[gamma][h] as usize
    }

    pub fn action_perm(&self, gamma: usize) -> &[u32] {
        &self.action[gamma]
    }

    /// Permutations of the Γ-generators, for closure computations.
    pub fn generator_perms(&self) -> Vec<&[u32]> {
        self.gamma.gens().iter().map(|&c| self.action[c].as_slice()).collect()
    }

    pub fn fixed_subgroup(&self) -> Vec<usize> {
        self.group
            .elements()
            .filter(|&h| self.gamma.gens().iter().all(|&c| self.act(c, h) == h))
            .collect()
    }

    pub fn fixed_index(&self) -> usize {
        self.group.order() / self.fixed_subgroup().len()
    }

    pub fn check_coprime(&self) -> Result<()> {
        let (a, b) = (self.group.order(), self.gamma.order());
        if arith::gcd(a as u64, b as u64) != 1 {
            return Err(CllError::OrdersNotCoprime(a, b));
        }
        Ok(())
    }

    /// Whether the Γ-closed subgroup generated by all `h⁻¹·γ(h)` is everything.
    pub fn is_admissible(&self) -> Result<bool> {
        self.check_coprime()?;
        let g = &self.group;
        let seeds: Vec<usize> = g
            .elements()
            .flat_map(|h| self.gamma.elements().map(move |c| (h, c)))
            .map(|(h, c)| g.mul(g.inv(h), self.act(c, h)))
            .collect();
        let perms = self.generator_perms();
        let mut member = g.subgroup(&seeds);
        // Γ-closure of a subgroup generated by a Γ-stable set is automatic;
        // saturate anyway to stay independent of that argument.
        loop {
            let extra: Vec<usize> = member
                .iter()
                .flat_map(|&x| perms.iter().map(move |p| p[x] as usize))
                .collect();
            let mut all = member.clone();
            all.extend(extra);
            let next = g.subgroup(&all);
            if next.len() == member.len() {
                break;
            }
            member = next;
        }
        Ok(member.len() == g.order())
    }

    /// Elements inverted by the Γ-element `c`.
    pub fn inverted_by(&self, c: usize) -> Vec<usize> {
        self.group.elements().filter(|&h| self.act(c, h) == self.group.inv(h)).collect()
    }

    pub fn semidirect(&self) -> SemidirectProduct {
        let h = &self.group;
        let c = &self.gamma;
        let nh = h.order();
        let total = FiniteGroup::from_fn(nh * c.order(), c.identity() * nh + h.identity(), |x, y| {
            let (h1, c1) = (x % nh, x / nh);
            let (h2, c2) = (y % nh, y / nh);
            c.mul(c1, c2) * nh + h.mul(h1, self.act(c1, h2))
        });
        let embed_h: Vec<usize> = (0..nh).map(|x| c.identity() * nh + x).collect();
        let section: Vec<usize> = (0..c.order()).map(|g| g * nh + h.identity()).collect();
        let proj: Vec<usize> = (0..total.order()).map(|x| x / nh).collect();
        let mut gens: Vec<usize> = h.gens().iter().map(|&x| embed_h[x]).collect();
        gens.extend(c.gens().iter().map(|&g| section[g]));
        let total = total.with_gens(gens).expect("factor generators generate");
        SemidirectProduct { group: Arc::new(total), h_order: nh, embed_h, section, proj }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn semidirect_examples() {
        let triv = GammaGroup::trivial_action(Arc::new(catalog::cyclic(3)), Arc::new(catalog::cyclic(2)));
        let sd = triv.semidirect();
        assert!(sd.group.is_abelian());
        assert_eq!(sd.group.abelian_invariants(), vec![2, 3]);

        let inv = catalog::inversion_gamma(3, 1);
        let sd = inv.semidirect();
        let g = &sd.group;
        assert_eq!(g.order(), 6);
        assert_eq!(g.elements().filter(|&x| g.element_order(x) == 2).count(), 3);
        assert_eq!(g.center().len(), 1);

        let inv = catalog::inversion_gamma(3, 2);
        let sd = inv.semidirect();
        let g = &sd.group;
        let involutions: Vec<usize> = g.elements().filter(|&x| g.element_order(x) == 2).collect();
        assert_eq!(involutions.len(), 9);
        let classes = g.conjugacy_classes();
        assert!(classes.contains(&involutions));
    }

    #[test]
    fn admissibility_and_fixed_points() {
        let triv = GammaGroup::trivial_action(Arc::new(catalog::cyclic(3)), Arc::new(catalog::cyclic(2)));
        assert!(!triv.is_admissible().unwrap());
        assert_eq!(triv.fixed_index(), 1);
        let inv = catalog::inversion_gamma(3, 1);
        assert!(inv.is_admissible().unwrap());
        assert_eq!(inv.fixed_index(), 3);
        let heis = catalog::heisenberg_inversion(3);
        assert!(heis.is_admissible().unwrap());
        assert_eq!(heis.fixed_index(), 9);
        let bad = GammaGroup::trivial_action(Arc::new(catalog::cyclic(4)), Arc::new(catalog::cyclic(2)));
        assert_eq!(bad.is_admissible().unwrap_err(), CllError::OrdersNotCoprime(4, 2));
    }

    #[test]
    fn admissible_implies_small_abelianization() {
        for gg in [catalog::inversion_gamma(3, 1), catalog::inversion_gamma(3, 2), catalog::inversion_gamma(5, 2), catalog::heisenberg_inversion(3)] {
            assert!(gg.is_admissible().unwrap());
            let sd = gg.semidirect();
            let ab: u64 = sd.group.abelianization_invariants().iter().product();
            assert_eq!(ab, 2);
        }
    }

    #[test]
    fn rejects_non_automorphism() {
        let h = Arc::new(catalog::cyclic(3));
        let c = Arc::new(catalog::cyclic(2));
        let bad = vec![vec![0, 1, 2], vec![1, 0, 2]];
        assert!(matches!(GammaGroup::new(h, c, bad), Err(CllError::InvalidAction(_))));
    }
}
