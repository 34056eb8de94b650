mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weilbasis::cyclotomic::CycScalar;
use weilbasis::fqm::{Fqm, IsotropicSubgroup};
use weilbasis::intmat::{self, M2};
use weilbasis::lattice::named;
use weilbasis::weilrep::*;

fn a2() -> Arc<WeilCtx> {
    WeilCtx::new(named::a2().discriminant().clone()).unwrap()
}

fn e(ctx: &Arc<WeilCtx>, g: usize) -> GroupAlgebraVector {
    GroupAlgebraVector::basis(ctx, &[g])
}

#[test]
fn homomorphism_and_unitarity_small_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, d) in common::small_even_modules() {
        let ctx = WeilCtx::new(d).unwrap();
        for _ in 0..3 {
            let m1 = common::random_sl2(&mut rng, 20);
            let m2 = common::random_sl2(&mut rng, 20);
            let r1 = rho1(&ctx, &m1).unwrap();
            let r2 = rho1(&ctx, &m2).unwrap();
            let r12 = rho1(&ctx, &intmat::m2_mul(&m1, &m2)).unwrap();
            assert_eq!(r12, r1.compose(&r2), "{name}");
            assert!(r1.is_unitary(), "{name}");
            assert!(r1.compose(&r1.adjoint()).is_identity(), "{name}");
        }
    }
}

#[test]
fn rho_of_negative_identity() {
    for (_, d) in common::small_even_modules() {
        let ctx = WeilCtx::new(d.clone()).unwrap();
        let r = rho1(&ctx, &[[-1, 0], [0, -1]]).unwrap();
        let ph = CycScalar::e(ctx.sign, 4);
        for g in d.elements() {
            assert_eq!(r.apply(&e(&ctx, g)), e(&ctx, d.neg(g)).scale(&ph).unwrap());
        }
        // genus 2: a(-I) = e(2 sign/4) e^{-g}
        let ph2 = CycScalar::e(2 * ctx.sign, 4);
        for g in d.elements().take(4) {
            for h in d.elements().take(4) {
                let mut v = GroupAlgebraVector::basis(&ctx, &[g, h]);
                v.apply_neg_identity();
                let want = GroupAlgebraVector::basis(&ctx, &[d.neg(g), d.neg(h)]).scale(&ph2).unwrap();
                assert_eq!(v, want);
            }
        }
    }
}

#[test]
fn trivial_module_is_trivial() {
    let ctx = WeilCtx::new(Arc::new(Fqm::trivial())).unwrap();
    let r = rho1(&ctx, &[[7, 2], [3, 1]]).unwrap();
    assert!(r.is_identity());
}

#[test]
fn a2_generators() {
    let ctx = a2();
    let t = rho1(&ctx, &intmat::m2_t(1)).unwrap();
    assert_eq!(t.entry(0, 0), CycScalar::one(1));
    assert_eq!(t.entry(1, 1), CycScalar::e(1, 3));
    assert_eq!(t.entry(2, 2), CycScalar::e(1, 3));
    let j = rho1(&ctx, &intmat::M2_S).unwrap();
    // e(2/8)/sqrt(3) on every coefficient of J e^0
    let c = &CycScalar::e(2, 8) * &CycScalar::from_int_elem(&weilbasis::fqm::sqrt_int(3)).inverse().unwrap();
    for g in 0..3 {
        assert_eq!(j.entry(g, 0), c);
    }
}

#[test]
fn alpha_and_beta_actions() {
    let ctx = WeilCtx::new(Arc::new(Fqm::hyperbolic(4))).unwrap();
    let d = ctx.module.clone();
    for l in [1i64, 2, 3] {
        for g in d.elements() {
            let v = apply_coset_inverse(&e(&ctx, g), &[[l * l, 0], [0, 1]]).unwrap();
            assert_eq!(v, e(&ctx, d.scale(g, l)));
            let w = apply_coset_inverse(&e(&ctx, g), &[[1, 0], [0, l * l]]).unwrap();
            let mut want = GroupAlgebraVector::zero(&ctx, 1);
            for mu in d.elements() {
                if d.scale(mu, l) == g {
                    want = want.add(&e(&ctx, mu));
                }
            }
            assert_eq!(w, want, "beta, l = {l}");
        }
    }
}

#[test]
fn coset_action_independent_of_decomposition() {
    let ctx = WeilCtx::new(named::d_n(4).discriminant().clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for l in [2i64, 3] {
        for _ in 0..4 {
            let a = common::random_sl2(&mut rng, 6);
            let b = common::random_sl2(&mut rng, 6);
            let x = 1 + (l % 3);
            let delta = intmat::m2_mul(&intmat::m2_mul(&a, &[[l * l, 0], [0, 1]]), &b);
            let a2 = intmat::m2_mul(&a, &intmat::m2_t(l * l * x));
            let b2 = intmat::m2_mul(&intmat::m2_t(-x), &b);
            for g in ctx.module.elements() {
                let v1 = apply_coset_inverse(&e(&ctx, g), &delta).unwrap();
                let v2 = apply_coset_inverse_with(&e(&ctx, g), &a2, l, &b2).unwrap();
                let v3 = apply_coset_inverse_with(&e(&ctx, g), &a, l, &b).unwrap();
                assert_eq!(v1, v2);
                assert_eq!(v1, v3);
            }
        }
    }
}

#[test]
fn lift_and_descent() {
    let d = Arc::new(Fqm::hyperbolic(4));
    let ctx = WeilCtx::new(d.clone()).unwrap();
    let gamma = d.index(&[2, 0]);
    let h = IsotropicSubgroup::generated_by(d.clone(), &[gamma]).unwrap();
    let quo = d.quotient(&h).unwrap();
    let qctx = WeilCtx::new(quo.module.clone()).unwrap();
    let zero_bar = quo.proj[0].unwrap();
    // lift of e^{0bar} is e^0 + e^gamma
    let up = lift(&ctx, &quo, &e(&qctx, zero_bar)).unwrap();
    assert_eq!(up, e(&ctx, 0).add(&e(&ctx, gamma)));
    for c in quo.module.elements() {
        let v = e(&qctx, c);
        let up = lift(&ctx, &quo, &v).unwrap();
        assert_eq!(descend(&qctx, &quo, &up).unwrap(), v.scale_rational(h.order() as i128, 1));
        for g in d.elements() {
            let w = e(&ctx, g);
            assert_eq!(up.inner(&w), v.inner(&descend(&qctx, &quo, &w).unwrap()));
        }
        for m in [intmat::m2_t(1), intmat::M2_S] {
            let lhs = lift(&ctx, &quo, &apply_rho(&v, &m).unwrap()).unwrap();
            let rhs = apply_rho(&up, &m).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
    // trivial H gives the identity
    let t = IsotropicSubgroup::trivial(d.clone());
    let tq = d.quotient(&t).unwrap();
    let tctx = WeilCtx::new(tq.module.clone()).unwrap();
    for g in d.elements() {
        let v = e(&ctx, g);
        let dv = descend(&tctx, &tq, &v).unwrap();
        assert_eq!(lift(&ctx, &tq, &dv).unwrap(), v);
    }
}

#[test]
fn pushforward_commutes_with_rho() {
    let d = Arc::new(named::a2().direct_sum(&named::a2()).unwrap().discriminant().as_ref().clone());
    let ctx = WeilCtx::new(d.clone()).unwrap();
    let group = d.orthogonal_group().unwrap();
    assert!(group.len() > 2);
    for sigma in group.iter().take(6) {
        for g in d.elements() {
            let v = e(&ctx, g);
            let lhs = pushforward(&ctx, sigma, &apply_rho(&v, &intmat::M2_S).unwrap()).unwrap();
            let rhs = apply_rho(&pushforward(&ctx, sigma, &v).unwrap(), &intmat::M2_S).unwrap();
            assert_eq!(lhs, rhs);
            let back = pullback(&ctx, sigma, &pushforward(&ctx, sigma, &v).unwrap()).unwrap();
            assert_eq!(back, v);
        }
    }
}

fn sum_diag(ctx: &Arc<WeilCtx>, f: impl Fn(usize) -> (GroupAlgebraVector, GroupAlgebraVector)) -> GroupAlgebraVector {
    let mut acc = GroupAlgebraVector::zero(ctx, 2);
    for g in ctx.module.elements() {
        let (a, b) = f(g);
        acc = acc.add(&a.tensor(&b));
    }
    acc
}

fn small_sl2() -> impl Strategy<Value = M2> {
    any::<u64>().prop_map(|s| common::random_sl2(&mut ChaCha8Rng::seed_from_u64(s), 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prime_lemma(l in 1i64..4, a0 in small_sl2(), a1 in small_sl2(), b in small_sl2()) {
        let ctx = a2();
        let a = intmat::m2_mul(&intmat::m2_mul(&a0, &[[l * l, 0], [0, 1]]), &a1);
        let lhs = sum_diag(&ctx, |g| (apply_coset_inverse(&e(&ctx, g), &a).unwrap(), apply_rho_inverse(&e(&ctx, g), &b).unwrap()));
        let bpa = intmat::m2_mul(&prime(&b), &a);
        let rhs = sum_diag(&ctx, |g| (apply_coset_inverse(&e(&ctx, g), &bpa).unwrap(), e(&ctx, g)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn psi_lemma(a in small_sl2(), b in small_sl2()) {
        let ctx = a2();
        let lhs = apply_rho_inverse(&e(&ctx, 0), &a).unwrap().tensor(&apply_rho_inverse(&e(&ctx, 0), &b).unwrap());
        let p = psi(&a, &b);
        let rhs = sum_diag(&ctx, |g| (apply_coset_inverse(&e(&ctx, g), &p).unwrap(), e(&ctx, g)))
            .scale(&milgram_factor(&ctx)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_on_e00(l in 0i64..4, a in small_sl2(), b in small_sl2()) {
        let ctx = a2();
        let w = a_l_word(l).concat(&u_word(&a).unwrap()).concat(&d_word(&b).unwrap());
        let m = w.matrix();
        prop_assert!(is_symplectic(&m));
        let (phi, nu) = phi_nu(&m).unwrap();
        let eps = if nu > 0 { 1 } else { -1 };
        let mut lhs = GroupAlgebraVector::basis(&ctx, &[0, 0]);
        lhs.apply_word2(&w.inverse());
        let d = ctx.module.clone();
        let rhs = sum_diag(&ctx, |g| (apply_coset_inverse(&e(&ctx, d.scale(g, -eps)), &phi).unwrap(), e(&ctx, g)))
            .scale(&milgram_factor(&ctx)).unwrap();
        prop_assert_eq!(lhs, rhs);
        // equivariance of phi and nu
        let (phi0, nu0) = phi_nu(&a_l_matrix(l)).unwrap();
        prop_assert_eq!(nu, nu0);
        prop_assert_eq!(phi, intmat::m2_mul(&intmat::m2_mul(&prime(&b), &phi0), &a));
    }
}
