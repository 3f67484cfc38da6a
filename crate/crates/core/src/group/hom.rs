//! Homomorphisms as element maps and surjection enumeration.

use std::collections::VecDeque;
use std::sync::Arc;

use super::{FiniteGroup, GammaGroup, ENUM_CAP};
use crate::error::{CllError, Result};

/// A homomorphism stored as a full element map.
///
/// Invariants: `map` sends identity to identity and is multiplicative.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    pub map: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() || map.iter().any(|&y| y >= target.order()) {
            return Err(CllError::Precondition("map has the wrong shape".into()));
        }
        if map[source.identity()] != target.identity() {
            return Err(CllError::Precondition("identity not preserved".into()));
        }
        for a in source.elements() {
            for &s in source.gens() {
                if map[source.mul(a, s)] != target.mul(map[a], map[s]) {
                    return Err(CllError::Precondition("map is not multiplicative".into()));
                }
            }
        }
        Ok(GroupHom { source, target, map })
    }

    /// Extends generator images to a homomorphism, if consistent.
    pub fn from_generator_images(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, images: &[usize]) -> Result<Self> {
        let gens = source.gens().to_vec();
        let mut map = vec![usize::MAX; source.order()];
        map[source.identity()] = target.identity();
        if !extend_map(&source, &target, &gens, images, &mut map) {
            return Err(CllError::Precondition("generator images do not define a homomorphism".into()));
        }
        Ok(GroupHom { source, target, map })
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_surjective(&self) -> bool {
        let imgs: Vec<usize> = self.source.gens().iter().map(|&g| self.map[g]).collect();
        self.target.subgroup(&imgs).len() == self.target.order()
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.source.elements().filter(|&x| self.map[x] == self.target.identity()).collect()
    }

    pub fn compose(&self, after: &GroupHom) -> GroupHom {
        let map = self.map.iter().map(|&y| after.map[y]).collect();
        GroupHom { source: self.source.clone(), target: after.target.clone(), map }
    }
}

/// Extends `map` (defined on `<gens[..k]>` for the already assigned prefix) to
/// `<gens>` using `images`, checking every Cayley edge; false on conflict.
fn extend_map(g: &FiniteGroup, h: &FiniteGroup, gens: &[usize], images: &[usize], map: &mut [usize]) -> bool {
    let mut queue: VecDeque<usize> = (0..g.order()).filter(|&x| map[x] != usize::MAX).collect();
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let img = h.mul(map[x], t);
            if map[y] == usize::MAX {
                map[y] = img;
                queue.push_back(y);
            } else if map[y] != img {
                return false;
            }
        }
    }
    true
}

/// All surjective homomorphisms `g → h`.
pub fn enumerate_surjections(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>) -> Result<Vec<GroupHom>> {
    let maps = search(g, h, None)?;
    Ok(maps.into_iter().map(|map| GroupHom { source: g.clone(), target: h.clone(), map }).collect())
}

/// All Γ-equivariant surjections between Γ-groups over the same Γ.
pub fn enumerate_gamma_surjections(g: &GammaGroup, h: &GammaGroup) -> Result<Vec<GroupHom>> {
    if *g.gamma != *h.gamma {
        return Err(CllError::InvalidAction("Γ-groups over different Γ".into()));
    }
    let maps = search(&g.group, &h.group, Some((g, h)))?;
    Ok(maps.into_iter().map(|map| GroupHom { source: g.group.clone(), target: h.group.clone(), map }).collect())
}

fn search(g: &FiniteGroup, h: &FiniteGroup, gamma: Option<(&GammaGroup, &GammaGroup)>) -> Result<Vec<Vec<usize>>> {
    if g.order() > ENUM_CAP {
        return Err(CllError::CapExceeded { what: "surjection enumeration", size: g.order(), cap: ENUM_CAP });
    }
    let gens = g.gens().to_vec();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let o = g.element_order(s);
            h.elements().filter(|&y| o.is_multiple_of(h.element_order(y))).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; g.order()];
    map[g.identity()] = h.identity();
    let mut images = Vec::with_capacity(gens.len());
    recurse(g, h, gamma, &gens, &candidates, &mut images, &map, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    g: &FiniteGroup,
    h: &FiniteGroup,
    gamma: Option<(&GammaGroup, &GammaGroup)>,
    gens: &[usize],
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
    map: &[usize],
    out: &mut Vec<Vec<usize>>,
) {
    let k = images.len();
    if k == gens.len() {
        if h.subgroup(images).len() != h.order() {
            return;
        }
        if let Some((gg, hg)) = gamma {
            for &c in gg.gamma.gens() {
                if gens.iter().any(|&s| map[gg.act(c, s)] != hg.act(c, map[s])) {
                    return;
                }
            }
        }
        out.push(map.to_vec());
        return;
    }
    for &y in &candidates[k] {
        images.push(y);
        let mut next = map.to_vec();
        if extend_map(g, h, &gens[..=k], images, &mut next) {
            recurse(g, h, gamma, gens, candidates, images, &next, out);
        }
        images.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surjection_counts() {
        let c3 = Arc::new(catalog::cyclic(3));
        assert_eq!(enumerate_surjections(&c3, &c3).unwrap().len(), 2);
        let s3 = Arc::new(catalog::dihedral(3));
        let c2 = Arc::new(catalog::cyclic(2));
        assert_eq!(enumerate_surjections(&s3, &c2).unwrap().len(), 1);
        let g = catalog::inversion_gamma(3, 2);
        let h = catalog::inversion_gamma(3, 1);
        assert_eq!(enumerate_gamma_surjections(&g, &h).unwrap().len(), 8);
        let big = Arc::new(catalog::cyclic(300));
        assert!(matches!(enumerate_surjections(&big, &c3), Err(CllError::CapExceeded { .. })));
    }

    #[test]
    fn counts_invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pairs = [("heisenberg:3", "elem_abelian:3^2"), ("dihedral:6", "dihedral:3"), ("semidirect_inversion:3^2", "dihedral:3")];
        for (a, b) in pairs {
            let g = catalog::parse_group(a).unwrap();
            let h = Arc::new(catalog::parse_group(b).unwrap());
            let base = enumerate_surjections(&Arc::new(g.clone()), &h).unwrap().len();
            for _ in 0..3 {
                let mut perm: Vec<usize> = g.elements().collect();
                perm.shuffle(&mut rng);
                let g2 = Arc::new(g.relabel(&perm));
                assert_eq!(enumerate_surjections(&g2, &h).unwrap().len(), base, "{a} -> {b}");
            }
        }
    }

    #[test]
    fn homs_are_validated() {
        let c6 = Arc::new(catalog::cyclic(6));
        let c3 = Arc::new(catalog::cyclic(3));
        assert!(GroupHom::new(c6.clone(), c3.clone(), (0..6).map(|x| x % 3).collect()).is_ok());
        assert!(GroupHom::new(c6, c3, vec![0, 1, 1, 0, 1, 2]).is_err());
    }
}
