//! Cross-module invariants and randomized property tests.

use hgreg::hypergeom::{calF_ode, calF_series, pfq_series, HGParams, PathSpec};
use hgreg::lfunctions::kronecker;
use hgreg::numerics::{digamma, gamma, upper_incomplete_gamma, Complex, Ctx};
use hgreg::periods::{torus_period, PeriodForm, SchemeDescriptor, TorusCycle};
use hgreg::rational::recognize;
use hgreg::resolver::{blow_up, classify, Chart};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn gamma_functional_equations_random_sweep() {
    // Γ(z+1) = zΓ(z) and reflection, 100 random z in |z| <= 20 off the poles
    let ctx = Ctx::new(48);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let tol = ctx.tol(10);
    let mut checked = 0;
    while checked < 100 {
        let z = ctx.cx(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        if z.im.clone().abs() < ctx.re(0.05) {
            continue; // stay clear of the pole line for the sweep
        }
        let g = gamma(&ctx, &z).unwrap();
        let g1 = gamma(&ctx, &(&z + &ctx.one())).unwrap();
        let rec = (&g1 - &(&z * &g)).abs() / g1.abs();
        assert!(rec < tol, "recurrence at {z}: {rec}");
        let gr = gamma(&ctx, &(&ctx.one() - &z)).unwrap();
        let refl = {
            let lhs = &(&g * &gr) * &z.scale(&ctx.pi()).sin();
            (&lhs - &ctx.cx_re(ctx.pi())).abs() / ctx.pi()
        };
        assert!(refl < tol, "reflection at {z}: {refl}");
        let d = digamma(&ctx, &z).unwrap();
        let d1 = digamma(&ctx, &(&z + &ctx.one())).unwrap();
        let dig = (&(&d1 - &d) - &z.recip()).abs();
        assert!(dig < tol, "digamma recurrence at {z}: {dig}");
        checked += 1;
    }
}

#[test]
fn incomplete_gamma_derivative_matches_finite_difference() {
    let ctx = Ctx::new(48);
    let x = ctx.re(3);
    for s0 in [1i64, 2, 3] {
        let h = ctx.pow10(-(ctx.digits() as i64) / 3);
        let sp = ctx.cx_re(ctx.re_i64(s0) + h.clone());
        let sm = ctx.cx_re(ctx.re_i64(s0) - h.clone());
        let gp = upper_incomplete_gamma(&ctx, &sp, &x).unwrap();
        let gm = upper_incomplete_gamma(&ctx, &sm, &x).unwrap();
        let fd = (&gp - &gm).scale(&(ctx.re(1) / (h.clone() * 2u32)));
        // compare against half-step difference (Richardson check)
        let h2 = h / 2u32;
        let gp2 = upper_incomplete_gamma(&ctx, &ctx.cx_re(ctx.re_i64(s0) + h2.clone()), &x).unwrap();
        let gm2 = upper_incomplete_gamma(&ctx, &ctx.cx_re(ctx.re_i64(s0) - h2.clone()), &x).unwrap();
        let fd2 = (&gp2 - &gm2).scale(&(ctx.re(1) / (h2 * 2u32)));
        let dev = (&fd - &fd2).abs();
        assert!(dev < ctx.pow10(-(ctx.digits() as i64) / 2), "s={s0}: {dev}");
    }
}

#[test]
fn calf_derivative_identity_random_params() {
    // t F'(t) identity for random rational parameter tuples and 20 random t
    let ctx = Ctx::new(45);
    let mut rng = ChaCha8Rng::seed_from_u64(90210);
    for _ in 0..4 {
        let s = rng.gen_range(1..=3usize);
        let a: Vec<num::rational::Rational64> = (0..s)
            .map(|_| {
                let d = rng.gen_range(2..=6i64);
                let n = rng.gen_range(1..d);
                num::rational::Rational64::new(n, d)
            })
            .collect();
        let params = HGParams::from_rationals(a).unwrap();
        let reals = params.as_reals(&ctx);
        let lower = vec![ctx.re(1); s.saturating_sub(1)];
        for _ in 0..5 {
            let t = ctx.cx(rng.gen_range(-0.55..0.55), rng.gen_range(-0.55..0.55));
            if t.abs() < ctx.re(0.05) {
                continue;
            }
            let h = ctx.pow10(-(ctx.digits() as i64) / 3);
            let fp = calF_series(&ctx, &params, &(&t + &ctx.cx_re(h.clone()))).unwrap();
            let fm = calF_series(&ctx, &params, &(&t - &ctx.cx_re(h.clone()))).unwrap();
            let deriv = (&fp.value - &fm.value).scale(&(ctx.re(1) / (h.clone() * 2u32)));
            let lhs = &t * &deriv;
            let rhs = pfq_series(&ctx, &reals, &lower, &t).unwrap().value;
            let dev = (&lhs - &rhs).abs();
            let gate = ctx.pow10(8 - ctx.digits() as i64 + (ctx.digits() as i64) / 3);
            assert!(dev < gate, "params ({}), t={t}: dev {dev}", params.describe());
        }
    }
}

#[test]
fn calf_s1_derivative_closed_form() {
    // s = 1: t calF'(t) = 1F0(a;;t) = (1-t)^{-a}
    let ctx = Ctx::new(40);
    let params = HGParams::parse("1/2").unwrap();
    let t = ctx.cx(0.25, 0.0);
    let h = ctx.pow10(-(ctx.digits() as i64) / 3);
    let fp = calF_series(&ctx, &params, &(&t + &ctx.cx_re(h.clone()))).unwrap();
    let fm = calF_series(&ctx, &params, &(&t - &ctx.cx_re(h.clone()))).unwrap();
    let deriv = (&fp.value - &fm.value).scale(&(ctx.re(1) / (h * 2u32)));
    let lhs = &t * &deriv;
    let want = (&ctx.one() - &t).pow_re(&ctx.rat(-1, 2));
    let dev = (&lhs - &want).abs();
    assert!(dev < ctx.pow10(-(2 * ctx.digits() as i64) / 3 + 6), "dev {dev}");
}

#[test]
fn ode_homotopic_paths_agree() {
    let ctx = Ctx::new(40);
    let params = HGParams::parse("1/2,1/3").unwrap();
    let target = ctx.cx(-3, 0);
    let canonical = PathSpec::canonical(&ctx, &target).unwrap();
    let v1 = calF_ode(&ctx, &params, &target, &canonical).unwrap();
    // a homotopic polyline through the upper half plane
    let poly = PathSpec::polyline(
        &ctx,
        &[
            ctx.cx(0.1, 0),
            ctx.cx(0.1, 0.4),
            ctx.cx(-1.5, 0.6),
            ctx.cx(-3, 0.3),
            target.clone(),
        ],
    )
    .unwrap();
    let v2 = calF_ode(&ctx, &params, &target, &poly).unwrap();
    let dev = (&v1.value - &v2.value).abs();
    assert!(dev < ctx.tol(10), "homotopic paths disagree: {dev}");
}

#[test]
fn quadrature_convergence_order() {
    // doubling the grid should at least square the residual (order >= 1.8)
    let ctx = Ctx::new(40);
    let scheme = SchemeDescriptor::new(vec![2, 3], ctx.cx(0.15, 0)).unwrap();
    let form = PeriodForm::new(&scheme, vec![1, 2], 0).unwrap();
    let reference = {
        let cycle = TorusCycle::for_scheme(&ctx, &scheme).unwrap();
        torus_period(&ctx, &scheme, &form, &cycle).unwrap()
    };
    let at_grid = |k: u32| {
        let mut cycle = TorusCycle::for_scheme(&ctx, &scheme).unwrap();
        cycle.grid_log2 = k;
        // one-shot: disable the doubling by comparing raw errors at fixed k
        hgreg::periods::quadrature_probe(&ctx, &scheme, &form, &cycle, k).unwrap()
    };
    let e1 = (&at_grid(4) - &reference).abs();
    let e2 = (&at_grid(5) - &reference).abs();
    let e3 = (&at_grid(6) - &reference).abs();
    let order12 = (e1.clone() / &e2).ln() / ctx.ln2();
    let order23 = (e2.clone() / &e3).ln() / ctx.ln2();
    // geometric convergence: each doubling multiplies the digit count
    assert!(
        order12 > ctx.re(1.8) || e2 < ctx.tol(6),
        "order {order12}"
    );
    assert!(
        order23 > ctx.re(1.8) || e3 < ctx.tol(6),
        "order {order23}"
    );
}

#[test]
fn period_symmetry_under_coordinate_permutation() {
    let ctx = Ctx::new(32);
    let t = ctx.cx(0.12, 0.0);
    let s1 = SchemeDescriptor::new(vec![2, 3, 4], t.clone()).unwrap();
    let f1 = PeriodForm::new(&s1, vec![1, 2, 3], 0).unwrap();
    let s2 = SchemeDescriptor::new(vec![2, 4, 3], t).unwrap();
    let f2 = PeriodForm::new(&s2, vec![1, 3, 2], 0).unwrap();
    let c1 = TorusCycle::for_scheme(&ctx, &s1).unwrap();
    let c2 = TorusCycle::for_scheme(&ctx, &s2).unwrap();
    let v1 = torus_period(&ctx, &s1, &f1, &c1).unwrap();
    let v2 = torus_period(&ctx, &s2, &f2, &c2).unwrap();
    let dev = (v1.abs() - v2.abs()).abs() / v1.abs();
    assert!(dev < ctx.tol(10), "permutation changed |period|: {dev}");
}

#[test]
fn precision_doubling_within_reported_error() {
    let lo = Ctx::new(36);
    let hi = Ctx::new(72);
    let params = HGParams::parse("1/2,1/3").unwrap();
    for t in [lo.cx(0.4, 0.2), lo.cx(-0.6, 0.1)] {
        let a = calF_series(&lo, &params, &t).unwrap();
        let b = calF_series(&hi, &params, &t.to_prec(hi.bits())).unwrap();
        let dev = (&a.value - &b.value.to_prec(lo.bits())).abs();
        let allowance = a.error_estimate.clone() + lo.tol(4);
        assert!(dev <= allowance, "moved {dev} > allowance {allowance}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn complex_field_axioms(ar in -3.0f64..3.0, ai in -3.0f64..3.0,
                            br in -3.0f64..3.0, bi in -3.0f64..3.0) {
        let ctx = Ctx::new(40);
        let a = ctx.cx(ar, ai);
        let b = ctx.cx(br, bi);
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert!((&ab - &ba).abs() < ctx.tol(8));
        if b.abs() > ctx.re(1e-3) {
            let q = &ab / &b;
            prop_assert!((&q - &a).abs() < ctx.tol(6));
        }
    }

    #[test]
    fn pochhammer_recurrence(num in 1i64..12, den in 1i64..12, n in 0u64..20) {
        let ctx = Ctx::new(40);
        let a = ctx.cx_re(ctx.rat(num, den));
        let lhs = hgreg::numerics::pochhammer(&ctx, &a, n + 1);
        let shift = &a + &ctx.cx(n as i64, 0);
        let rhs = &hgreg::numerics::pochhammer(&ctx, &a, n) * &shift;
        let scale = lhs.abs().max(&ctx.re(1));
        prop_assert!((&lhs - &rhs).abs() / scale < ctx.tol(6));
    }

    #[test]
    fn rational_recognition_roundtrip(p in -64i64..64, q in 1i64..=64) {
        let ctx = Ctx::new(40);
        let x = ctx.rat(p, q);
        let got = recognize(&ctx, &x, 64).expect("exact rational recognized");
        prop_assert_eq!(ctx.rat(got.numer, got.denom), x);
    }

    #[test]
    fn resolver_random_charts_terminate(r in 1u32..4, m in proptest::collection::vec(1u32..5, 0..4)) {
        let chart = Chart::new(r, m, 0);
        // run the rewriting from this single chart
        let mut work = vec![chart];
        let mut steps = 0;
        while let Some(c) = work.pop() {
            if classify(&c).is_terminal() {
                continue;
            }
            steps += 1;
            prop_assert!(steps < 10_000);
            let before = c.measure();
            let (u1, u2) = blow_up(&c, 1, 1).unwrap();
            prop_assert!(u1.measure() < before);
            prop_assert!(u2.measure() < before);
            prop_assert_eq!(u1.dimension(), c.dimension());
            prop_assert_eq!(u2.dimension(), c.dimension());
            work.push(u1);
            work.push(u2);
        }
    }

    #[test]
    fn kronecker_multiplicative(a in -40i64..40, m in 1i64..40, n in 1i64..40) {
        let (m, n) = (2 * m + 1, 2 * n + 1); // odd positive
        prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
    }

    #[test]
    fn roots_of_unity_are_roots(n in 1u32..24) {
        let ctx = Ctx::new(40);
        for z in ctx.roots_of_unity(n) {
            let dev = (&z.powi(n as i64) - &ctx.one()).abs();
            prop_assert!(dev < ctx.tol(4));
        }
    }
}
