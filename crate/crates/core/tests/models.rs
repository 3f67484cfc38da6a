use std::collections::HashMap;

use cll_core::group::{catalog, FiniteGroup};
use cll_core::linalg::{self, Zpk};
use cll_core::models::estimate::{y_coker_rank, z_coker_rank};
use cll_core::models::*;
use cll_core::nilpotent::aut::UnitAutSampler;
use cll_core::nilpotent::word::Images;
use cll_core::nilpotent::{pairing_image, q_symplectic_completion, symplectic, ConstrainedAut, Word};
use cll_core::CllError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn minus_identity(m: usize) -> linalg::Mat {
    (0..m).map(|i| (0..m).map(|j| if i == j { 2 } else { 0 }).collect()).collect()
}

#[test]
fn identity_automorphism_leaves_the_demushkin_quotient() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    let fq = ctx.fixed_quotient(&ConstrainedAut::identity(&ctx.d)).unwrap();
    assert_eq!(fq.ab_rank(), 4);
    assert_eq!(fq.rank(), ctx.d.g_rank());
}

#[test]
fn minus_identity_kills_the_abelianization() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    let phi = ConstrainedAut::from_parameters(&ctx.d, minus_identity(4), &[0; 4], &[], &vec![0; ctx.d.f.dim()]).unwrap();
    let fq = ctx.fixed_quotient(&phi).unwrap();
    assert_eq!(fq.ab_rank(), 0);
    assert_eq!(fq.rank(), 0);
    assert_eq!(y_coker_rank(ctx.d.f.ring(), &phi), 0);
}

#[test]
fn genus_one_fixed_quotients_divide_nine() {
    let ctx = ModelContext::new(1, 3, 2).unwrap();
    let mut r = rng(3);
    for _ in 0..100 {
        let phi = ConstrainedAut::sample(&ctx.d, 7, &mut r).unwrap();
        let y = ctx.fixed_quotient(&phi).unwrap().y_group().unwrap();
        assert_eq!(9 % y.group.order(), 0);
    }
}

#[test]
fn nontrivial_fixed_quotients_are_admissible() {
    for (n, class, ell) in [(2, 2, 3), (1, 3, 5)] {
        let ctx = ModelContext::new(n, ell, class).unwrap();
        let mut r = rng(11);
        let mut nontrivial = 0;
        for _ in 0..60 {
            let phi = ConstrainedAut::sample(&ctx.d, 2, &mut r).unwrap();
            let fq = ctx.fixed_quotient(&phi).unwrap();
            let Ok(y) = fq.y_group() else { continue };
            // Abelianization rank and order agree with the Lie-side counts.
            assert_eq!(y.group.order(), (ell as usize).pow(fq.rank() as u32));
            if y.group.order() > 1 {
                nontrivial += 1;
                assert!(y.is_admissible().unwrap());
            }
        }
        assert!(nontrivial > 0);
    }
}

#[test]
fn matrix_only_coker_matches_group_counts() {
    for (r, h) in [(1u32, catalog::inversion_gamma(3, 1)), (2, catalog::inversion_gamma(3, 2))] {
        let cfg = YConfig { n: 2, ell: 3, q: 7, class: 2, h: format!("inv:{r}"), delta: vec![0], samples: 300, seed: 5 };
        let rep = estimate_moment_y(&cfg, h, None).unwrap();
        assert_eq!(rep.coker_mismatches, 0);
        assert_eq!(rep.additivity_violations, 0);
        assert_eq!(rep.coker.unwrap().mean, rep.y_total.mean);
    }
    for h in [catalog::cyclic(3), catalog::elem_abelian(3, 2)] {
        let cfg = ZConfig { n: 2, ell: 3, class: 2, h: "z".into(), samples: 300, seed: 5 };
        assert_eq!(estimate_moment_z(&cfg, &h, None).unwrap().coker_mismatches, 0);
    }
}

#[test]
fn x_statistic_is_index_times_y_per_sample() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    for h in [catalog::inversion_gamma(3, 1), catalog::inversion_gamma(3, 2)] {
        let idx = h.fixed_index() as u64;
        let tc = TargetContext::new(h, 3, ctx.d.relator_word().unwrap()).unwrap();
        let delta = tc.delta(&[]).unwrap().value;
        let mut r = rng(9);
        for _ in 0..80 {
            let s = sample_y(&ctx, &tc, 7, delta, &mut r).unwrap();
            assert_eq!(s.x_total, idx * s.y_total);
            assert_eq!(s.x_delta, idx * s.y_delta);
        }
    }
}

#[test]
fn vanishing_when_delta_order_does_not_divide_q_minus_one() {
    let cfg = YConfig { n: 2, ell: 3, q: 2, class: 2, h: "inv:2".into(), delta: vec![1], samples: 500, seed: 1 };
    let rep = estimate_moment_y(&cfg, catalog::inversion_gamma(3, 2), None).unwrap();
    assert!(rep.delta_order_warning);
    assert_eq!(rep.delta_order, 3);
    assert_eq!((rep.y.mean, rep.x.mean), (0.0, 0.0));
}

#[test]
fn q_divisible_by_ell_is_rejected() {
    let cfg = YConfig { n: 2, ell: 3, q: 6, class: 2, h: "inv:1".into(), delta: vec![], samples: 10, seed: 1 };
    assert!(matches!(estimate_moment_y(&cfg, catalog::inversion_gamma(3, 1), None), Err(CllError::QNotCoprime { .. })));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = YConfig { n: 2, ell: 3, q: 7, class: 2, h: "inv:1".into(), delta: vec![], samples: 200, seed: 17 };
    let a = estimate_moment_y(&cfg, catalog::inversion_gamma(3, 1), Some(1)).unwrap();
    let b = estimate_moment_y(&cfg, catalog::inversion_gamma(3, 1), None).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let zc = ZConfig { n: 2, ell: 3, class: 2, h: "c3".into(), samples: 200, seed: 17 };
    let a = estimate_moment_z(&zc, &catalog::cyclic(3), Some(1)).unwrap();
    let b = estimate_moment_z(&zc, &catalog::cyclic(3), Some(2)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn pi_dagger_ignores_the_choice_of_lift() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    for h in [catalog::inversion_gamma(3, 2), catalog::heisenberg_inversion(3)] {
        let tc = TargetContext::new(h, 3, ctx.d.relator_word().unwrap()).unwrap();
        let sur = gamma_surjections(&ctx, &tc);
        assert!(sur.len() >= 100);
        let mut r = rng(21);
        for k in 0..100 {
            let rho = &sur[k * sur.len() / 100];
            let v = tc.pi_dagger(rho, None).unwrap();
            for _ in 0..100 {
                assert_eq!(tc.pi_dagger(rho, Some(&mut r)).unwrap(), v);
            }
        }
    }
}

#[test]
fn pi_dagger_requires_a_killed_relator() {
    let ctx = ModelContext::new(1, 3, 2).unwrap();
    let tc = TargetContext::new(catalog::heisenberg_inversion(3), 3, ctx.d.relator_word().unwrap()).unwrap();
    let g = &tc.sd.group;
    let (a, b) = (tc.involutions[0].1[1], tc.involutions[0].1[2]);
    if g.commutator(a, b) != g.identity() {
        assert!(matches!(tc.pi_dagger(&[a, b], None), Err(CllError::RelatorNotKilled)));
    }
}

#[test]
fn pi_dagger_is_constant_on_orbits_of_xi_fixing_automorphisms() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    let tc = TargetContext::new(catalog::inversion_gamma(3, 2), 3, ctx.d.relator_word().unwrap()).unwrap();
    let units = UnitAutSampler::new(&ctx.d);
    let sur = gamma_surjections(&ctx, &tc);
    let mut r = rng(2);
    for _ in 0..200 {
        let rho = &sur[r.gen_range(0..sur.len())];
        let phi = units.sample(&ctx.d, &mut r).unwrap();
        let moved = orbit::precompose(&ctx, &tc, rho, &phi).unwrap();
        assert_eq!(tc.pi_dagger(&moved, None).unwrap(), tc.pi_dagger(rho, None).unwrap());
    }
}

#[test]
fn conjugate_involution_gives_identical_counts() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    let tc = TargetContext::new(catalog::inversion_gamma(3, 1), 3, ctx.d.relator_word().unwrap()).unwrap();
    let delta = tc.delta(&[]).unwrap().value;
    let units = UnitAutSampler::new(&ctx.d);
    let mut r = rng(41);
    let tau = units.sample(&ctx.d, &mut r).unwrap();
    // The gauge must not commute with sigma for the check to mean anything.
    assert!(tau.images.iter().any(|y| ctx.d.f.degree_range(2).any(|c| y[c] != 0)));
    let gauged = GaugedModel::new(&ctx, &tau).unwrap();
    let (mut a, mut b) = (Welford::default(), Welford::default());
    for _ in 0..300 {
        let phi = ConstrainedAut::sample(&ctx.d, 7, &mut r).unwrap();
        let s = {
            let fq = ctx.fixed_quotient(&phi).unwrap();
            let mut hit = 0;
            fq.for_each_hom(&tc.sd.group, &tc.involutions[0].1, tc.h_order(), |rho| {
                hit += (tc.pi_dagger(rho, None).unwrap() == delta) as u64;
            });
            hit
        };
        let (hit, _) = gauged.counts(&ctx, &tc, &phi, delta).unwrap();
        assert_eq!(hit, s);
        a.push(s as f64);
        b.push(hit as f64);
    }
    let (a, b) = (a.finish(0, ""), b.finish(0, ""));
    assert!((a.mean - b.mean).abs() <= 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
}

#[test]
fn symplectic_group_of_rank_two_is_sampled_uniformly() {
    let r = Zpk::new(3, 1);
    let mut counts: HashMap<linalg::Mat, u64> = HashMap::new();
    let mut g = rng(77);
    let n = 24_000;
    for _ in 0..n {
        *counts.entry(symplectic::sample_similitude(&r, 1, 7, &mut g)).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let e = n as f64 / 24.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // 23 degrees of freedom; 60 is far in the tail.
    assert!(chi2 < 60.0, "chi2 = {chi2}");
}

#[test]
fn cyclic_z_moment_matches_symplectic_enumeration() {
    let r = Zpk::new(3, 1);
    for q in [1u64, 2] {
        let all = symplectic::similitudes_dim2(&r, q);
        assert_eq!(all.len(), 24);
        if q == 1 {
            let mean = all.iter().map(|t| 3f64.powi(z_coker_rank(&r, t) as i32) - 1.0).sum::<f64>() / 24.0;
            assert!((mean - z_cyclic_exact(3, 1)).abs() < 1e-12);
        }
    }
    assert!((z_cyclic_exact(3, 1) - 0.5).abs() < 1e-12);
    for n in 1..6 {
        let exact = (3f64.powi(n as i32) - 1.0) / (3f64.powi(n as i32) + 1.0);
        assert!((z_cyclic_exact(3, n) - exact).abs() < 1e-12);
    }
}

#[test]
fn completion_respects_prescribed_gram() {
    let r = Zpk::new(3, 1);
    let u = vec![vec![1, 0, 1, 0], vec![0, 1, 0, 0]];
    for s in [1u64, 2] {
        let b = q_symplectic_completion(&r, 2, &u, s).unwrap();
        assert_eq!(&b[..2], &u[..]);
        let t = symplectic::from_columns(&b);
        assert!(linalg::inverse(&r, &t).is_some());
        let g = symplectic::gram(&r, &b);
        let gp = symplectic::gram(&r, &u);
        assert_eq!(g[0][1], gp[0][1]);
    }
    let dependent = vec![vec![1, 0, 0, 0], vec![2, 0, 0, 0]];
    assert!(q_symplectic_completion(&r, 2, &dependent, 1).is_err());
}

#[test]
fn genus_one_surjections_form_one_orbit() {
    let rep = orbit_transitivity_check(1, 3, 7, catalog::inversion_gamma(3, 1), &[], None, 1).unwrap();
    assert_eq!(rep.method, "exhaustive");
    assert!(rep.surjections > 0);
    assert!(rep.all_connected(), "{:?}", rep.failures.first());
}

#[test]
fn genus_two_witnesses_are_constructed() {
    let rep = orbit_transitivity_check(2, 3, 7, catalog::inversion_gamma(3, 2), &[0], Some(100), 4).unwrap();
    assert_eq!(rep.pairs_checked, 100);
    assert!(rep.all_connected(), "{:?}", rep.failures.first());
}

#[test]
fn equal_surjections_have_the_identity_witness() {
    let ctx = ModelContext::new(2, 3, 2).unwrap();
    let tc = TargetContext::new(catalog::inversion_gamma(3, 2), 3, ctx.d.relator_word().unwrap()).unwrap();
    let rho = &gamma_surjections(&ctx, &tc)[0];
    let w = construct_witness(&ctx, &tc, 1, rho, rho).unwrap();
    assert_eq!(w.t, linalg::identity(4));
}

#[test]
fn heisenberg_square_pairing_is_block_diagonal() {
    let h = catalog::heisenberg(3);
    let hh = FiniteGroup::direct_product(&h, &h);
    // The product lists the generators of the first factor, then the second.
    let gens = hh.gens().to_vec();
    let lambda = Word::lambda_std(2).eval(&Images { group: &hh, images: &gens }).unwrap();
    let p = pairing_image(&hh, &gens, lambda, 3).unwrap();
    assert_eq!(p.b, vec![vec![0, 1, 0, 0], vec![0, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 0, 0]]);
    assert_eq!(p.values, vec![vec![0, 2, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 2], vec![0, 0, 1, 0]]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witnesses_exist_for_random_pairs(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 4, 5, 7])) {
        let ctx = ModelContext::new(2, 3, 2).unwrap();
        let tc = TargetContext::new(catalog::inversion_gamma(3, 1), 3, ctx.d.relator_word().unwrap()).unwrap();
        let sur = gamma_surjections(&ctx, &tc);
        let mut r = rng(seed);
        let (a, b) = (&sur[r.gen_range(0..sur.len())], &sur[r.gen_range(0..sur.len())]);
        let w = construct_witness(&ctx, &tc, q, a, b).unwrap();
        prop_assert_eq!(&orbit::precompose(&ctx, &tc, b, &w).unwrap(), a);
    }

    #[test]
    fn sampled_automorphisms_compose(seed in any::<u64>()) {
        let ctx = ModelContext::new(2, 3, 2).unwrap();
        let mut r = rng(seed);
        let a = ConstrainedAut::sample(&ctx.d, 2, &mut r).unwrap();
        let b = ConstrainedAut::sample(&ctx.d, 5, &mut r).unwrap();
        let c = a.compose(&ctx.d, &b);
        prop_assert_eq!(c.q, 1);
        prop_assert!(c.verify(&ctx.d, true).is_ok());
    }
}
