//! Gamma, digamma and incomplete-gamma functions for complex arguments.
//!
//! Real arguments go straight to MPFR.  Complex arguments use the Stirling
//! asymptotic series after raising the argument, with reflection for
//! Re z < 1/2.  The error contract is relative error <= 10^(8-P).

use super::{Complex, Ctx, NumericsError, Real};
use once_cell::sync::Lazy;
use rug::ops::{CompleteRound, Pow};
use rug::Float;
use std::collections::HashMap;
use std::sync::Mutex;

/// Cache of even-index Bernoulli numbers B_2, B_4, ... per working precision.
static BERNOULLI: Lazy<Mutex<HashMap<u32, Vec<Real>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// B_{2k} computed as 2 (2k)! ζ(2k) / (2π)^{2k} with alternating sign.
pub fn bernoulli_even(ctx: &Ctx, k: u32) -> Real {
    assert!(k >= 1);
    let bits = ctx.bits();
    let mut cache = BERNOULLI.lock().unwrap();
    let list = cache.entry(bits).or_default();
    while (list.len() as u32) < k {
        let j = list.len() as u32 + 1; // computing B_{2j}
        let two_j = 2 * j;
        let zeta = Float::with_val(bits, two_j).zeta();
        let fact = Float::with_val(bits, Float::factorial(two_j));
        let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
        let denom = two_pi.pow(two_j);
        let mut b = 2u32 * fact * zeta / denom;
        if j % 2 == 0 {
            b = -b;
        }
        list.push(b);
    }
    list[(k - 1) as usize].clone()
}

fn is_nonpositive_integer(z: &Complex) -> bool {
    z.im.is_zero() && z.re.is_integer() && (z.re.is_zero() || z.re.is_sign_negative())
}

/// |z| threshold above which the Stirling series reaches 10^(-P-8).
fn stirling_threshold(ctx: &Ctx) -> Real {
    let t = 0.4 * (ctx.digits() as f64 + 12.0);
    ctx.re(t.max(12.0))
}

/// Stirling series for Log Γ(z), valid once |z| is past the threshold and
/// Re z > 0.  Returns None if the asymptotic terms stop shrinking early.
fn ln_gamma_stirling(ctx: &Ctx, z: &Complex) -> Option<Complex> {
    let half = ctx.rat(1, 2);
    let ln2pi = (ctx.pi() * 2u32).ln();
    let log_z = z.ln();
    // (z - 1/2) Log z - z + (1/2) ln 2π
    let mut acc = &(z - &ctx.cx_re(half.clone())) * &log_z;
    acc = &acc - z;
    acc = &acc + &ctx.cx_re(ln2pi * &half);

    let target = {
        let scale = acc.abs().max(&ctx.re(1));
        ctx.tol(-10) * scale
    };
    let z2 = z * z;
    let mut zpow = z.clone(); // z^{2k-1}
    let mut prev_mag: Option<Real> = None;
    for k in 1..=4096u32 {
        let coeff = {
            let b = bernoulli_even(ctx, k);
            let d = ctx.re_i64((2 * k as i64) * (2 * k as i64 - 1));
            b / d
        };
        let term = zpow.recip().scale(&coeff);
        let mag = term.abs();
        if let Some(p) = &prev_mag {
            if mag > *p {
                // divergence onset before reaching the target
                return None;
            }
        }
        acc = &acc + &term;
        if mag < target {
            return Some(acc);
        }
        prev_mag = Some(mag);
        zpow = &zpow * &z2;
    }
    None
}

/// Canonical Log Γ on the cut plane C \ (-∞, 0].
pub fn ln_gamma(ctx: &Ctx, z: &Complex) -> Result<Complex, NumericsError> {
    if z.im.is_zero() && (z.re.is_sign_negative() || z.re.is_zero()) {
        return Err(NumericsError::Pole(format!("{z}")));
    }
    if z.im.is_zero() && z.re.is_sign_positive() {
        return Ok(ctx.cx_re(ctx.re(&z.re).ln_gamma()));
    }
    // Raise the argument until Stirling converges, subtracting Log(z+j).
    let threshold = stirling_threshold(ctx);
    let mut shift = 0u32;
    loop {
        let need = {
            let zr = ctx.re_i64(shift as i64) + &z.re;
            let shifted = Complex::new(zr, z.im.clone());
            shifted.abs() < threshold || !shifted.re.is_sign_positive()
        };
        if !need {
            break;
        }
        shift += 8;
        if shift > 1_000_000 {
            return Err(NumericsError::InvalidArgument(format!(
                "ln_gamma shift runaway at {z}"
            )));
        }
    }
    let mut correction = ctx.zero();
    for j in 0..shift {
        let zj = &ctx.cx_re(ctx.re_i64(j as i64)) + z;
        correction = &correction + &zj.ln();
    }
    let shifted = &ctx.cx_re(ctx.re_i64(shift as i64)) + z;
    let mut extra = 0u32;
    loop {
        let arg = &ctx.cx_re(ctx.re_i64(extra as i64)) + &shifted;
        if let Some(v) = ln_gamma_stirling(ctx, &arg) {
            let mut corr2 = ctx.zero();
            for j in 0..extra {
                let zj = &ctx.cx_re(ctx.re_i64(j as i64)) + &shifted;
                corr2 = &corr2 + &zj.ln();
            }
            return Ok(&(&v - &corr2) - &correction);
        }
        extra += 16;
        if extra > 1_000_000 {
            return Err(NumericsError::InvalidArgument(format!(
                "Stirling series failed to converge for {z}"
            )));
        }
    }
}

/// Γ(z) for complex z away from the poles at 0, -1, -2, ...
pub fn gamma(ctx: &Ctx, z: &Complex) -> Result<Complex, NumericsError> {
    if is_nonpositive_integer(z) {
        return Err(NumericsError::Pole(format!("{z}")));
    }
    if z.im.is_zero() {
        return Ok(ctx.cx_re(ctx.re(&z.re).gamma()));
    }
    let half = ctx.rat(1, 2);
    if z.re < half {
        // Reflection: Γ(z) = π / (sin πz · Γ(1-z)).
        let one_minus = &ctx.one() - z;
        let g = gamma(ctx, &one_minus)?;
        let pi = ctx.pi();
        let s = z.scale(&pi).sin();
        let denom = &s * &g;
        if denom.is_zero() {
            return Err(NumericsError::Pole(format!("{z}")));
        }
        return Ok(&ctx.cx_re(pi) / &denom);
    }
    Ok(ln_gamma(ctx, z)?.exp())
}

/// Digamma ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(ctx: &Ctx, z: &Complex) -> Result<Complex, NumericsError> {
    if is_nonpositive_integer(z) {
        return Err(NumericsError::Pole(format!("{z}")));
    }
    if z.im.is_zero() {
        return Ok(ctx.cx_re(ctx.re(&z.re).digamma()));
    }
    let half = ctx.rat(1, 2);
    if z.re < half {
        // ψ(z) = ψ(1-z) - π cot(πz)
        let one_minus = &ctx.one() - z;
        let p = digamma(ctx, &one_minus)?;
        let pi = ctx.pi();
        let pz = z.scale(&pi);
        let cot = &pz.cos() / &pz.sin();
        return Ok(&p - &cot.scale(&pi));
    }
    let threshold = stirling_threshold(ctx);
    let mut shift = 0u32;
    while {
        let s = &ctx.cx_re(ctx.re_i64(shift as i64)) + z;
        s.abs() < threshold
    } {
        shift += 8;
    }
    let mut correction = ctx.zero();
    for j in 0..shift {
        let zj = &ctx.cx_re(ctx.re_i64(j as i64)) + z;
        correction = &correction + &zj.recip();
    }
    let w = &ctx.cx_re(ctx.re_i64(shift as i64)) + z;
    // ψ(w) = Log w - 1/(2w) - Σ B_{2k} / (2k w^{2k})
    let mut acc = w.ln();
    let winv = w.recip();
    acc = &acc - &winv.scale(&ctx.rat(1, 2));
    let w2inv = &winv * &winv;
    let mut wpow = w2inv.clone();
    let target = ctx.tol(-10);
    let mut prev_mag: Option<Real> = None;
    for k in 1..=4096u32 {
        let b = bernoulli_even(ctx, k);
        let term = wpow.scale(&(b / ctx.re_i64(2 * k as i64)));
        let mag = term.abs();
        if let Some(p) = &prev_mag {
            if mag > *p {
                break;
            }
        }
        acc = &acc - &term;
        if mag < target {
            break;
        }
        prev_mag = Some(mag);
        wpow = &wpow * &w2inv;
    }
    Ok(&acc - &correction)
}

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1.
pub fn pochhammer(ctx: &Ctx, a: &Complex, n: u64) -> Complex {
    let mut acc = ctx.one();
    let mut f = a.clone();
    for _ in 0..n {
        acc = &acc * &f;
        f = &f + &ctx.one();
    }
    acc
}

/// Real rising factorial.
pub fn pochhammer_re(ctx: &Ctx, a: &Real, n: u64) -> Real {
    let mut acc = ctx.re(1);
    let mut f = a.clone();
    for _ in 0..n {
        acc *= &f;
        f += 1u32;
    }
    acc
}

/// Upper incomplete gamma Γ(s, x) = ∫_x^∞ u^{s-1} e^{-u} du for real x > 0.
///
/// Continued fraction for x > |s| + 1, power series below (the switchover
/// keeps both expansions in their stable regions).
pub fn upper_incomplete_gamma(
    ctx: &Ctx,
    s: &Complex,
    x: &Real,
) -> Result<Complex, NumericsError> {
    if !x.is_sign_positive() || x.is_zero() {
        return Err(NumericsError::InvalidArgument(format!(
            "incomplete gamma requires x > 0, got {x}"
        )));
    }
    let sabs = s.abs();
    let cf_region = {
        let bound = sabs + 1u32;
        *x > bound
    };
    if cf_region {
        incomplete_gamma_cf(ctx, s, x)
    } else {
        incomplete_gamma_series(ctx, s, x)
    }
}

/// Modified Lentz evaluation of the classical continued fraction
/// Γ(s,x) = e^{-x} x^s / (x+1-s - 1(1-s)/(x+3-s - 2(2-s)/(...))).
fn incomplete_gamma_cf(ctx: &Ctx, s: &Complex, x: &Real) -> Result<Complex, NumericsError> {
    let tiny = ctx.cx_re(ctx.pow10(-(2 * ctx.digits() as i64)));
    let xc = ctx.cx_re(x.clone());
    let b0 = &(&xc + &ctx.one()) - s;
    let mut f = if b0.is_zero() { tiny.clone() } else { b0.clone() };
    let mut c = f.clone();
    let mut d = ctx.zero();
    let eps = ctx.tol(-8);
    let max_iter = 64 * ctx.digits() as usize + 4096;
    for n in 1..=max_iter {
        let nf = ctx.re_i64(n as i64);
        let a_n = {
            let t = &ctx.cx_re(nf.clone()) - s; // n - s
            -(&ctx.cx_re(nf) * &t)
        };
        let b_n = &b0 + &ctx.cx(2 * n as i64, 0);
        d = &b_n + &(&a_n * &d);
        if d.is_zero() {
            d = tiny.clone();
        }
        c = &b_n + &(&a_n / &c);
        if c.is_zero() {
            c = tiny.clone();
        }
        d = d.recip();
        let delta = &c * &d;
        f = &f * &delta;
        let dev = (&delta - &ctx.one()).abs();
        if dev < eps {
            // prefactor e^{-x} x^s
            let lnx = ctx.re(x).ln();
            let pre = (&s.scale(&lnx) - &ctx.cx_re(x.clone())).exp();
            return Ok(&pre / &f);
        }
    }
    Err(NumericsError::IncompleteGammaDiverged(
        format!("{s}"),
        format!("{x}"),
    ))
}

/// Series evaluation for small x.  Uses Γ(s) - γ(s,x); at s = 0 falls back to
/// the exponential-integral series E1(x).
fn incomplete_gamma_series(ctx: &Ctx, s: &Complex, x: &Real) -> Result<Complex, NumericsError> {
    if s.is_zero() {
        // E1(x) = -γ - ln x + Σ_{n>=1} (-1)^{n+1} x^n / (n n!)
        let mut acc = -ctx.euler() - ctx.re(x).ln();
        let mut term = ctx.re(1);
        let eps = ctx.tol(-8);
        for n in 1..=100_000u32 {
            term *= x;
            term /= n;
            let contrib = term.clone() / n;
            if n % 2 == 1 {
                acc += &contrib;
            } else {
                acc -= &contrib;
            }
            if contrib.abs() < eps {
                return Ok(ctx.cx_re(acc));
            }
        }
        return Err(NumericsError::IncompleteGammaDiverged("0".into(), format!("{x}")));
    }
    if is_nonpositive_integer(s) {
        // Raise to s+m with Re(s+m) > 0 via Γ(s,x) = (Γ(s+1,x) - x^s e^{-x})/s.
        let s1 = s + &ctx.one();
        let up = upper_incomplete_gamma(ctx, &s1, x)?;
        let lnx = ctx.re(x).ln();
        let boundary = (&s.scale(&lnx) - &ctx.cx_re(x.clone())).exp();
        return Ok(&(&up - &boundary) / s);
    }
    let g = gamma(ctx, s)?;
    // γ(s,x) = x^s e^{-x} Σ_{n>=0} x^n / (s (s+1) ... (s+n))
    let mut denom = s.clone();
    let mut term = denom.recip();
    let mut acc = term.clone();
    let eps = ctx.tol(-8);
    let mut ok = false;
    for n in 1..=200_000u32 {
        denom = &denom + &ctx.one();
        term = &term.scale(x) / &denom;
        acc = &acc + &term;
        if term.abs() < eps.clone() * acc.abs() {
            ok = true;
            break;
        }
        let _ = n;
    }
    if !ok {
        return Err(NumericsError::IncompleteGammaDiverged(
            format!("{s}"),
            format!("{x}"),
        ));
    }
    let lnx = ctx.re(x).ln();
    let pre = (&s.scale(&lnx) - &ctx.cx_re(x.clone())).exp();
    let lower = &pre * &acc;
    Ok(&g - &lower)
}

/// Hurwitz zeta ζ(s, a) = Σ_{n>=0} (a+n)^{-s} for real s > 1, a > 0, by
/// Euler–Maclaurin.  Used for asymptotic tail summation of pFq at |t| = 1.
pub fn hurwitz_zeta(ctx: &Ctx, s: &Real, a: &Real) -> Real {
    assert!(*s > 1u32, "hurwitz_zeta needs s > 1");
    let bits = ctx.bits();
    let a_min = ctx.re(0.6 * (ctx.digits() as f64 + 10.0));
    let m: u32 = if *a >= a_min {
        0
    } else {
        let diff = (&a_min - a).complete(bits);
        diff.to_f64().ceil() as u32
    };
    let mut head = ctx.re(0);
    for n in 0..m {
        let base = ctx.re_i64(n as i64) + a;
        head += base.pow(-s.clone());
    }
    let w = ctx.re_i64(m as i64) + a;
    let w_inv_s = w.clone().pow(-s.clone()); // w^{-s}
    // w^{1-s}/(s-1) + w^{-s}/2
    let mut tail = (&w_inv_s * &w).complete(bits) / (s.clone() - 1u32);
    tail += w_inv_s.clone() / 2u32;
    // Σ_j B_{2j}/(2j)! (s)_{2j-1} w^{-s-2j+1}
    let mut poch = s.clone(); // (s)_1
    let mut fact = ctx.re(2); // (2j)!
    let mut wpow = (&w_inv_s / &w).complete(bits); // w^{-s-1}
    let w2 = (&w * &w).complete(bits);
    let eps = ctx.tol(-10);
    let mut prev: Option<Real> = None;
    for j in 1..=4096u32 {
        let b = bernoulli_even(ctx, j);
        let term = b * &poch * &wpow / &fact;
        let mag = term.clone().abs();
        if let Some(p) = &prev {
            if mag > *p {
                break;
            }
        }
        tail += &term;
        if mag < eps {
            break;
        }
        prev = Some(mag);
        // advance: (s)_{2j+1} = (s)_{2j-1} (s+2j-1)(s+2j)
        let k = 2 * j;
        poch *= (s.clone() + ctx.re_i64(k as i64 - 1)) * (s.clone() + ctx.re_i64(k as i64));
        fact *= ctx.re_i64((k as i64 + 1) * (k as i64 + 2));
        wpow /= &w2;
    }
    head + tail
}
