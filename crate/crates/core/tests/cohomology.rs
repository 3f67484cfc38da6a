use std::sync::Arc;

use cll_core::cohomology::{l_schur_cover, schur_multiplier_l, schur_multiplier_uct};
use cll_core::group::catalog;
use proptest::prelude::*;

fn group(spec: &str) -> Arc<cll_core::group::FiniteGroup> {
    Arc::new(catalog::parse_group(spec).unwrap())
}

#[test]
fn multiplier_anchors() {
    let m = |s: &str, l| schur_multiplier_l(&group(s), l).unwrap().factors;
    assert!(m("cyclic:27", 3).is_empty());
    assert_eq!(m("elem_abelian:3^2", 3), vec![3]);
    assert_eq!(m("elem_abelian:3^3", 3), vec![3, 3, 3]);
    assert_eq!(m("heisenberg:3", 3), vec![3, 3]);
    assert_eq!(m("semidirect_inversion:3^2", 3), vec![3]);
    assert!(m("dihedral:3", 3).is_empty());
    assert_eq!(m("elem_abelian:5^2", 5), vec![5]);
}

#[test]
fn schur_covers_are_stem_of_full_order() {
    for spec in ["elem_abelian:3^2", "heisenberg:3", "semidirect_inversion:3^2", "elem_abelian:3^3"] {
        let g = group(spec);
        let m = schur_multiplier_l(&g, 3).unwrap();
        let c = l_schur_cover(&g, 3).unwrap();
        assert_eq!(c.kernel_order() as u64, m.order());
        assert_eq!(c.total.order(), g.order() * m.order() as usize);
        assert!(c.stem_verified && c.central_verified, "{spec}");
        assert_eq!(c.kernel_structure().factors, m.factors);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // Relation-module coinvariants and the universal-coefficient strip of H²
    // share no code beyond the group table.
    #[test]
    fn two_routes_agree(idx in 0usize..1000, ell in prop::sample::select(vec![2u64, 3, 5])) {
        let names = catalog::names_up_to(54);
        let g = group(&names[idx % names.len()]);
        prop_assert_eq!(schur_multiplier_l(&g, ell).unwrap().factors, schur_multiplier_uct(&g, ell).unwrap());
    }
}
