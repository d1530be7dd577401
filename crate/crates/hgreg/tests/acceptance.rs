//! Acceptance suite: every numerical identity and table the toolkit promises,
//! one test per criterion, each printing a pass/fail line with its tolerance.

use hgreg::cli::{table_row, EC_TABLE};
use hgreg::hypergeom::{
    calF_connection, calF_ode, calF_series, monodromy_report, pfq_at_unit, pfq_series, HGParams,
    PathSpec,
};
use hgreg::lfunctions::{
    self, eta_coeffs, lprime_at_0, primes_below, surface_trace_s, twist_relation_check,
    EtaProductSpec, LSeries, QuarticCurve,
};
use hgreg::numerics::{Complex, Ctx, Real};
use hgreg::periods::{
    contour_pole_integral, predicted_period, torus_period, PeriodForm, SchemeDescriptor,
    TorusCycle,
};
use hgreg::rational::recognize;
use hgreg::resolver;
use hgreg::symbols::{dlog_identity_residual, ross_vs_classical_dlog, RossSymbol};
use num::rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn status(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

/// Reference digits (Re calF, L') for the 12 rows, in EC_TABLE order.
const REFERENCE_TABLE: [(&str, &str); 12] = [
    ("-1.4866664931", "0.74333324664"),
    ("-2.42449751304", "2.42449751304"),
    ("-3.3173289967", "1.6586644983"),
    ("-3.5763399863", "-3.5763399863"),
    ("-1.0228481341", "0.51142406705"),
    ("-1.942820350", "0.971410175"),
    ("-4.091392536", "0.51142406705"),
    ("-4.21743424174", "2.10871712"),
    ("-0.71480404895", "1.429608097"),
    ("-1.5342722011", "0.511424067"),
    ("-4.819613084", "-9.639226168"),
    ("-4.8822409859", "4.8822409859"),
];

/// relative deviation allowing the last printed digit to be a rounding
/// artifact: >= 9 significant digits of agreement
fn matches_printed(ctx: &Ctx, value: &Real, printed: &str) -> bool {
    let p = ctx.re_str(printed);
    let dev = (value.clone() - &p).abs();
    let scale = p.abs();
    dev / scale < ctx.re(5e-9)
}

#[test]
fn criterion_01_ec_table() {
    let started = Instant::now();
    let ctx = Ctx::new(40);
    use rayon::prelude::*;
    let rows: Vec<_> = EC_TABLE
        .par_iter()
        .zip(REFERENCE_TABLE.par_iter())
        .map(|(&(an, ad, rn, rd), &(pf, pl))| {
            let alpha = Rational64::new(an, ad);
            let (f, lp, ratio, conductor, sign) =
                table_row(&ctx, alpha, 64).expect("table row computes");
            let ok = matches_printed(&ctx, &f, pf)
                && matches_printed(&ctx, &lp, pl)
                && ratio == Some((rn, rd));
            (alpha, ok, f, lp, ratio, conductor, sign)
        })
        .collect();
    let elapsed = started.elapsed();
    for (alpha, ok, f, lp, ratio, n, w) in &rows {
        println!(
            "  row alpha={alpha}: F={} L'={} ratio={ratio:?} N={n} w={w} {}",
            f.to_string_radix(10, Some(12)),
            lp.to_string_radix(10, Some(12)),
            if *ok { "ok" } else { "MISMATCH" }
        );
    }
    let all = rows.iter().all(|r| r.1);
    let budget_ok = elapsed.as_secs() <= 600;
    status(
        "1 (EC table, 12 rows)",
        all && budget_ok,
        &format!("{} rows in {elapsed:?} (budget 600s)", rows.len()),
    );
}

#[test]
fn criterion_02_k3_alpha_4() {
    let ctx = Ctx::new(60);
    let params = HGParams::parse("1/2,1/2,1/2").unwrap();
    let f = calF_connection(&ctx, &params, &ctx.cx(4, 0)).unwrap();
    let want_f = ctx.re_str("-2.41291989930352597175242344918");
    let rel_f = (f.value.re.clone() - &want_f).abs() / want_f.abs();
    let spec = EtaProductSpec::newform_c();
    let coeffs = eta_coeffs(&spec, lfunctions::afe::coefficients_needed(&ctx, 12)).unwrap();
    let ls = LSeries::new(coeffs, 3, 12, 1, "C").unwrap();
    let lp = lprime_at_0(&ctx, &ls).unwrap();
    let want_lp = ctx.re_str("0.30161498741294074646905293114776839989");
    let rel_lp = (lp.clone() - &want_lp).abs() / want_lp;
    // values carry ~1e-29 eps-limit error; recognize at a threshold above it
    let rctx = Ctx::new(48);
    let ratio = recognize(&rctx, &rctx.re(&(f.value.re.clone() / &lp)), 64);
    let ratio_ok = ratio.as_ref().map(|r| (r.numer, r.denom)) == Some((-8, 1));
    status(
        "2 (K3 alpha=4)",
        rel_f < ctx.re(1e-25) && rel_lp < ctx.re(1e-25) && ratio_ok,
        &format!(
            "rel dev F {:.3e}, rel dev L' {:.3e}, ratio {:?}",
            rel_f.to_f64(),
            rel_lp.to_f64(),
            ratio.map(|r| (r.numer, r.denom))
        ),
    );
}

#[test]
fn criterion_03_k3_alpha_64() {
    let ctx = Ctx::new(60);
    let params = HGParams::parse("1/2,1/2,1/2").unwrap();
    let f = calF_connection(&ctx, &params, &ctx.cx(64, 0)).unwrap();
    let want_f = ctx.re_str("-0.821372862231216089683652759186");
    let rel_f = (f.value.re.clone() - &want_f).abs() / want_f.abs();
    let spec = EtaProductSpec::newform_d();
    let coeffs = eta_coeffs(&spec, lfunctions::afe::coefficients_needed(&ctx, 7)).unwrap();
    let ls = LSeries::new(coeffs, 3, 7, 1, "D").unwrap();
    let lp = lprime_at_0(&ctx, &ls).unwrap();
    let want_lp = ctx.re_str("0.10267160777890201121045659489829291400");
    let rel_lp = (lp.clone() - &want_lp).abs() / want_lp;
    let rctx = Ctx::new(48);
    let ratio = recognize(&rctx, &rctx.re(&(f.value.re.clone() / &lp)), 64);
    let ratio_ok = ratio.as_ref().map(|r| (r.numer, r.denom)) == Some((-8, 1));
    status(
        "3 (K3 alpha=64)",
        rel_f < ctx.re(1e-25) && rel_lp < ctx.re(1e-25) && ratio_ok,
        &format!(
            "rel dev F {:.3e}, rel dev L' {:.3e}",
            rel_f.to_f64(),
            rel_lp.to_f64()
        ),
    );
}

#[test]
fn criterion_04_samart_identity() {
    let ctx = Ctx::new(60);
    let three_half = ctx.rat(3, 2);
    let upper = vec![
        three_half.clone(),
        three_half.clone(),
        three_half,
        ctx.re(1),
        ctx.re(1),
    ];
    let lower = vec![ctx.re(2); 4];
    let (s, _err) = pfq_at_unit(&ctx, &upper, &lower).unwrap();
    let spec = EtaProductSpec::newform_a();
    let coeffs = eta_coeffs(&spec, lfunctions::afe::coefficients_needed(&ctx, 16)).unwrap();
    let ls = LSeries::new(coeffs, 3, 16, 1, "A").unwrap();
    let lp = lprime_at_0(&ctx, &ls).unwrap();
    let resid = (ctx.re(64).ln() - s.clone() / 8u32 - ctx.re(8) * lp.clone()).abs();
    let samart_ok = resid < ctx.pow10(-20);
    // regulator restatement: Re calF(1) = -8 L'(A,0) via the t = 1 series
    let params = HGParams::parse("1/2,1/2,1/2").unwrap();
    let f1 = calF_series(&ctx, &params, &ctx.one()).unwrap();
    let resid2 = (f1.value.re.clone() + ctx.re(8) * lp).abs();
    let reg_ok = resid2 < ctx.pow10(-20);
    status(
        "4 (Samart identity)",
        samart_ok && reg_ok,
        &format!(
            "identity residual {:.3e}, regulator residual {:.3e}",
            resid.to_f64(),
            resid2.to_f64()
        ),
    );
}

#[test]
fn criterion_05_period_oracle() {
    // 20 seeded random configurations d <= 3, 2 <= n_k <= 5, |t| <= 0.3.
    // The quadrature context is staged by dimension to keep the d = 3 grids
    // tractable; the 1e-10 comparison runs at P = 40.
    let ctx = Ctx::new(40);
    let mut rng = ChaCha8Rng::seed_from_u64(20240501);
    let started = Instant::now();
    let mut worst = ctx.re(0);
    for cfg in 0..20 {
        // dimension mix: 8 of d=1, 8 of d=2, 4 of d=3; the 3-folds draw
        // smaller |t| so the trapezoid grids stay geometric and tractable
        let d = if cfg % 5 == 4 { 3 } else { 1 + cfg % 2 };
        let n: Vec<u32> = (0..=d).map(|_| rng.gen_range(2..=5u32)).collect();
        let i: Vec<u32> = n.iter().map(|&nk| rng.gen_range(1..nk)).collect();
        let tmag: f64 = if d == 3 {
            rng.gen_range(0.02..0.10)
        } else {
            rng.gen_range(0.03..0.28)
        };
        let targ: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let qctx = if d == 3 { Ctx::new(24) } else { Ctx::new(34) };
        let t = Complex::from_polar(&qctx.re(tmag), &qctx.re(targ), qctx.bits());
        let scheme = SchemeDescriptor::new(n.clone(), t).unwrap();
        let form = PeriodForm::new(&scheme, i.clone(), 0).unwrap();
        let mut cycle = TorusCycle::for_scheme(&qctx, &scheme).unwrap();
        cycle.grid_log2 = if d == 3 { 5 } else { 6 };
        let quad = torus_period(&qctx, &scheme, &form, &cycle).unwrap();
        let t40 = Complex::from_polar(&ctx.re(tmag), &ctx.re(targ), ctx.bits());
        let scheme40 = SchemeDescriptor::new(n.clone(), t40).unwrap();
        let form40 = PeriodForm::new(&scheme40, i.clone(), 0).unwrap();
        let want = predicted_period(&ctx, &scheme40, &form40).unwrap();
        let rel = (&quad.to_prec(ctx.bits()) - &want).abs() / want.abs();
        println!("  config {cfg}: d={d} n={n:?} i={i:?} |t|={tmag:.3}: rel {:.3e}", rel.to_f64());
        worst = worst.max(&rel);
    }
    status(
        "5 (period oracle, 20 random configs)",
        worst < ctx.re(1e-10),
        &format!("worst rel {:.3e} in {:?}", worst.to_f64(), started.elapsed()),
    );
}

#[test]
fn criterion_06_contour_lemma() {
    let ctx = Ctx::new(40);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = ctx.re(0);
    for _ in 0..10 {
        let c1 = ctx.cx(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let c2 = loop {
            let c = ctx.cx(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if c.abs() > ctx.re(0.4) {
                break c;
            }
        };
        for n in 0..=6u32 {
            let quad = contour_pole_integral(&ctx, &c1, &c2, n).unwrap();
            // closed form -c2^{-1} (1 - c1/c2)_n / n!
            let base = &ctx.one() - &(&c1 / &c2);
            let mut poch = ctx.one();
            let mut fact = ctx.re(1);
            for k in 0..n {
                poch = &poch * &(&base + &ctx.cx(k as i64, 0));
                fact *= k + 1;
            }
            let want = -&(&poch / &c2).scale(&(ctx.re(1) / fact));
            let dev = (&quad - &want).abs();
            worst = worst.max(&dev);
        }
    }
    status(
        "6 (contour lemma, n <= 6, 10 random (c1,c2))",
        worst < ctx.re(1e-12),
        &format!("worst abs dev {:.3e}", worst.to_f64()),
    );
}

#[test]
fn criterion_07_connection_vs_ode() {
    let ctx = Ctx::new(56);
    let mut worst = ctx.re(0);
    for params in [HGParams::parse("1/2,1/2").unwrap(), HGParams::parse("1/2,1/2,1/2").unwrap()] {
        for alpha in [2i64, 4, 8, 64] {
            let t = ctx.cx(alpha, 0);
            let conn = calF_connection(&ctx, &params, &t).unwrap();
            let path = PathSpec::canonical(&ctx, &t).unwrap();
            let ode = calF_ode(&ctx, &params, &t, &path).unwrap();
            let dev = (&conn.value - &ode.value).abs();
            println!(
                "  a=({}), alpha={alpha}: |connection - ode| = {:.3e}",
                params.describe(),
                dev.to_f64()
            );
            worst = worst.max(&dev);
        }
    }
    status(
        "7 (connection vs ODE, eps-limit included)",
        worst < ctx.re(1e-20),
        &format!("worst dev {:.3e}", worst.to_f64()),
    );
}

#[test]
fn criterion_08_monodromy() {
    let ctx = Ctx::new(40);
    let mut ok = true;
    let mut detail = String::new();
    for params in [HGParams::parse("1/2,1/2").unwrap(), HGParams::parse("1/2,1/2,1/2").unwrap()] {
        let s = params.s();
        let rep = monodromy_report(&ctx, &params, &ctx.cx(0.25, 0)).unwrap();
        let pass = rep.unipotency_residual < ctx.pow10(-15)
            && rep.rank_t0_minus_id == s - 1
            && rep.t_inf_spectrum_deviation < ctx.pow10(-12)
            && rep.loop_relation_residual < ctx.pow10(-12);
        detail.push_str(&format!(
            "a=({}): unip {:.2e}, rank {}, spectrum {:.2e}, relation {:.2e}; ",
            params.describe(),
            rep.unipotency_residual.to_f64(),
            rep.rank_t0_minus_id,
            rep.t_inf_spectrum_deviation.to_f64(),
            rep.loop_relation_residual.to_f64()
        ));
        ok &= pass;
    }
    status("8 (monodromy)", ok, &detail);
}

#[test]
fn criterion_09_dlog_identities() {
    let ctx = Ctx::new(40);
    let gate = ctx.pow10(-25);
    let mut worst = ctx.re(0);
    for (n, nu) in [
        (vec![2u32, 2], vec![1u32, 1]),
        (vec![2, 2, 2], vec![1, 1, 1]),
        (vec![3, 2], vec![1, 1]),
    ] {
        let sym = RossSymbol::new(n.clone(), nu).unwrap();
        let r = dlog_identity_residual(&ctx, &sym, 100, 424242).unwrap();
        println!("  dlog n={n:?}: residual {:.3e}", r.to_f64());
        worst = worst.max(&r);
    }
    let mut worst_classical = ctx.re(0);
    for (n0, n1) in [(2u32, 2u32), (3, 3), (2, 4)] {
        let r = ross_vs_classical_dlog(&ctx, n0, n1, 100, 515151).unwrap();
        println!("  classical (n0,n1)=({n0},{n1}): residual {:.3e}", r.to_f64());
        worst_classical = worst_classical.max(&r);
    }
    status(
        "9 (dlog identity + Ross comparison, 100 points)",
        worst < gate && worst_classical < gate,
        &format!(
            "identity worst {:.3e}, classical worst {:.3e}",
            worst.to_f64(),
            worst_classical.to_f64()
        ),
    );
}

#[test]
fn criterion_10_lfunction_internals() {
    // Weil + Hecke for A, C, D
    let mut hecke_ok = true;
    for (spec, label) in [
        (EtaProductSpec::newform_a(), "A"),
        (EtaProductSpec::newform_c(), "C"),
        (EtaProductSpec::newform_d(), "D"),
    ] {
        let coeffs = eta_coeffs(&spec, 2000).unwrap();
        let ls = LSeries::new(coeffs, spec.weight, spec.level, 1, label).unwrap();
        hecke_ok &= ls.weil_bounds_hold() && ls.hecke_relations_hold(2000);
    }
    // twist relation for alpha in {2, 4}, p < 1000
    let mut twist_ok = true;
    for alpha in [2i64, 4] {
        let failures = twist_relation_check(Rational64::from_integer(alpha), 1000).unwrap();
        twist_ok &= failures.is_empty();
    }
    // crystalline comparison a_p(A) vs trace for p < 500
    let a = eta_coeffs(&EtaProductSpec::newform_a(), 500).unwrap();
    let mut crys_ok = true;
    for p in primes_below(500) {
        if p == 2 {
            continue;
        }
        let trace = surface_trace_s(p).unwrap();
        if trace != a[(p - 1) as usize] {
            crys_ok = false;
        }
    }
    // Weil bounds for curve traces
    let curve = QuarticCurve::from_alpha(Rational64::new(2, 1)).unwrap();
    let frob = lfunctions::FrobeniusData::for_curve(&curve, 1000).unwrap();
    let weil_ok = frob.weil_bounds_hold(2);
    status(
        "10 (L-function internals)",
        hecke_ok && twist_ok && crys_ok && weil_ok,
        &format!("hecke {hecke_ok}, twist {twist_ok}, crystalline {crys_ok}, weil {weil_ok}"),
    );
}

#[test]
fn criterion_11_resolver() {
    let mut ok = true;
    let mut detail = String::new();
    for n in [vec![2u32, 2], vec![2, 2, 2], vec![2, 3, 4], vec![3, 3, 3, 3]] {
        let trace = resolver::resolve(&n).unwrap();
        let pass = trace.all_terminal_standard() && trace.measure_strictly_decreasing;
        detail.push_str(&format!(
            "n={n:?}: {} steps, {} terminal; ",
            trace.steps.len(),
            trace.terminal.len()
        ));
        ok &= pass;
    }
    status("11 (resolver termination + classification)", ok, &detail);
}

#[test]
fn criterion_12_precision_robustness() {
    // criteria 1-4 rerun at P = 80 must not move any reported digit within
    // the stated tolerances
    let lo = Ctx::new(40);
    let hi = Ctx::new(80);

    // (1) four representative table rows (full set runs in criterion 1)
    let mut table_ok = true;
    for &(an, ad, rn, rd) in &[EC_TABLE[0], EC_TABLE[3], EC_TABLE[8], EC_TABLE[10]] {
        let alpha = Rational64::new(an, ad);
        let (f_lo, lp_lo, r_lo, _, _) = table_row(&lo, alpha, 64).unwrap();
        let (f_hi, lp_hi, r_hi, _, _) = table_row(&hi, alpha, 64).unwrap();
        let df = (f_lo.clone() - hgreg::numerics::Real::with_val(lo.bits(), &f_hi)).abs();
        let dl = (lp_lo.clone() - hgreg::numerics::Real::with_val(lo.bits(), &lp_hi)).abs();
        table_ok &= df < lo.re(5e-9) && dl < lo.re(5e-9) && r_lo == r_hi && r_lo == Some((rn, rd));
    }

    // (2,3) the two K3 calF values and L' values
    let params = HGParams::parse("1/2,1/2,1/2").unwrap();
    let mut k3_ok = true;
    for (alpha, level, spec, want) in [
        (4i64, 12u32, EtaProductSpec::newform_c(), "-2.41291989930352597175242344918"),
        (64, 7, EtaProductSpec::newform_d(), "-0.821372862231216089683652759186"),
    ] {
        let f_hi = calF_connection(&hi, &params, &hi.cx(alpha, 0)).unwrap();
        let rel = (f_hi.value.re.clone() - hi.re_str(want)).abs() / hi.re_str(want).abs();
        k3_ok &= rel < hi.re(1e-25);
        let coeffs = eta_coeffs(&spec, lfunctions::afe::coefficients_needed(&hi, level)).unwrap();
        let ls = LSeries::new(coeffs, 3, level, 1, "f").unwrap();
        let lp_hi = lprime_at_0(&hi, &ls).unwrap();
        let rctx = Ctx::new(64);
        let ratio = recognize(&rctx, &rctx.re(&(f_hi.value.re.clone() / &lp_hi)), 64);
        k3_ok &= ratio.map(|r| (r.numer, r.denom)) == Some((-8, 1));
    }

    // (4) Samart at P = 80
    let three_half = hi.rat(3, 2);
    let upper = vec![
        three_half.clone(),
        three_half.clone(),
        three_half,
        hi.re(1),
        hi.re(1),
    ];
    let lower = vec![hi.re(2); 4];
    let (s, _) = pfq_at_unit(&hi, &upper, &lower).unwrap();
    let coeffs = eta_coeffs(
        &EtaProductSpec::newform_a(),
        lfunctions::afe::coefficients_needed(&hi, 16),
    )
    .unwrap();
    let ls = LSeries::new(coeffs, 3, 16, 1, "A").unwrap();
    let lp = lprime_at_0(&hi, &ls).unwrap();
    let samart = (hi.re(64).ln() - s / 8u32 - hi.re(8) * lp).abs();
    let samart_ok = samart < hi.pow10(-20);

    status(
        "12 (precision robustness at P=80)",
        table_ok && k3_ok && samart_ok,
        &format!(
            "table {table_ok}, K3 {k3_ok}, Samart residual {:.3e}",
            samart.to_f64()
        ),
    );
}

/// The pFq series values that anchor the calF assembly (op examples).
#[test]
fn pfq_op_examples() {
    let ctx = Ctx::new(40);
    // 2F1(1,1;2;1/2) = 2 log 2
    let v = pfq_series(&ctx, &[ctx.re(1), ctx.re(1)], &[ctx.re(2)], &ctx.cx(0.5, 0))
        .unwrap()
        .value;
    assert!((v.re.clone() - ctx.ln2() * 2u32).abs() < ctx.tol(6));
    // calF small-t limit
    let p = HGParams::parse("1/2,1/2").unwrap();
    let f = calF_series(&ctx, &p, &ctx.cx(1e-30, 0)).unwrap();
    let shifted = &f.value - &ctx.cx(1e-30, 0).ln();
    let want = (ctx.rat(1, 2).digamma() + ctx.euler()) * 2u32;
    assert!((shifted.re.clone() - want).abs() < ctx.re(1e-28));
}
