//! Power-series evaluation of pFq and of the regulator function `calF`.

use super::{EvalMethod, EvalResult, HGParams, HgError};
use crate::numerics::special::{bernoulli_even, hurwitz_zeta};
use crate::numerics::{Complex, Ctx, Real};
use rug::ops::{CompleteRound, Pow};

/// Hard cap on the number of series terms.
const TERM_CAP: usize = 10_000_000;

/// Sum of Σ_n Π(a_i)_n / Π(b_j)_n · t^n / n!, truncated when a rigorous tail
/// bound drops below 10^(-P) relative to the partial sum.
///
/// Inside |t| < 1 the tail is bounded geometrically once the term ratio is
/// monotonically below 1.  On |t| = 1 (allowed when κ = Re(Σb - Σa) > 0) the
/// bound is the integral comparison |term_n| · n / κ.
///
/// Returns the value together with the tail bound actually achieved.
pub fn pfq_raw(
    ctx: &Ctx,
    upper: &[Real],
    lower: &[Real],
    t: &Complex,
) -> Result<(Complex, Real), HgError> {
    for b in lower {
        if b.is_integer() && !b.is_sign_positive() {
            return Err(HgError::BadParameter(format!("lower parameter {b}")));
        }
    }
    let mag = t.abs();
    let one = ctx.re(1);
    if upper.len() > lower.len() + 1 && !t.is_zero() {
        // p > q+1 diverges for every t != 0
        return Err(HgError::Divergence);
    }
    if mag > one && upper.len() == lower.len() + 1 {
        return Err(HgError::Divergence);
    }
    let at_unit_argument = {
        let dev = (t - &ctx.one()).abs();
        dev < ctx.tol(4)
    };
    if at_unit_argument && upper.len() == lower.len() + 1 {
        // t = 1 exactly: the plain sum cannot reach 10^(-P) within the term
        // cap for small κ, so switch to the Euler–Maclaurin tail route.
        let (v, err) = pfq_at_unit(ctx, upper, lower)?;
        return Ok((ctx.cx_re(v), err));
    }
    let on_circle = {
        let dev = (mag.clone() - &one).abs();
        dev < ctx.tol(4)
    };
    let kappa = if on_circle {
        let mut k = ctx.re(0);
        for b in lower {
            k += b;
        }
        for a in upper {
            k -= a;
        }
        if !k.is_sign_positive() || k.is_zero() {
            return Err(HgError::SlowConvergence(format!(
                "convergence exponent {k} <= 0 on |t| = 1"
            )));
        }
        Some(k)
    } else {
        None
    };

    let mut sum = ctx.one();
    let mut term = ctx.one();
    let target = ctx.tol(0);
    let mut tail_bound = ctx.re(1);
    // |ratio_n| = |t| (1 + A/n + O(1/n^2)) with A = Re(Σa - Σb - 1); the
    // envelope below caps every later ratio once n is past a few multiples
    // of |A|.
    let ratio_slack = {
        let mut a_sum = ctx.re(0);
        for a in upper {
            a_sum += a;
        }
        for b in lower {
            a_sum -= b;
        }
        a_sum -= 1u32;
        a_sum.abs() + ctx.re(4)
    };

    for n in 0..TERM_CAP {
        // term_{n+1} = term_n * Π(a_i + n) / Π(b_j + n) * t / (n+1)
        let nf = ctx.re_i64(n as i64);
        let mut num = ctx.re(1);
        for a in upper {
            num *= (a + &nf).complete(ctx.bits());
        }
        let mut den = ctx.re(1);
        for b in lower {
            den *= (b + &nf).complete(ctx.bits());
        }
        den *= (&nf + &one).complete(ctx.bits());
        term = (&term * t).scale(&(num / den));
        sum = &sum + &term;

        let tmag = term.abs();
        let scale = sum.abs().max(&one);
        if let Some(k) = &kappa {
            // integral comparison: Σ_{m>n} |c_m| ≲ |c_n| n / κ
            tail_bound = tmag.clone() * ctx.re_i64(n as i64 + 1) / k.clone();
            if tail_bound < target.clone() * &scale {
                return Ok((sum, tail_bound));
            }
        } else {
            // ratio of the next term to this one, inflated to bound all
            // later ratios
            let nf1 = ctx.re_i64(n as i64 + 1);
            let mut rnum = ctx.re(1);
            for a in upper {
                rnum *= (a + &nf1).complete(ctx.bits()).abs();
            }
            let mut rden = ctx.re(1);
            for b in lower {
                rden *= (b + &nf1).complete(ctx.bits()).abs();
            }
            rden *= (&nf1 + &one).complete(ctx.bits());
            let ratio = rnum * &mag / rden;
            let past_transient = ctx.re_i64(n as i64) > ratio_slack.clone() * 4u32;
            if past_transient {
                let envelope = ctx.re(1) + ratio_slack.clone() / ctx.re_i64(n as i64);
                let rho = ratio.max(&mag) * envelope;
                if rho < one {
                    tail_bound = tmag.clone() * &rho / (one.clone() - &rho);
                    if tail_bound < target.clone() * &scale {
                        return Ok((sum, tail_bound));
                    }
                }
            }
        }
        if tmag.is_zero() {
            return Ok((sum, ctx.re(0)));
        }
    }
    Err(HgError::SlowConvergence(format!(
        "tail bound stuck at {tail_bound} after {TERM_CAP} terms"
    )))
}

/// Public pFq entry point returning a tagged [`EvalResult`].
pub fn pfq_series(
    ctx: &Ctx,
    upper: &[Real],
    lower: &[Real],
    t: &Complex,
) -> Result<EvalResult, HgError> {
    let (value, err) = pfq_raw(ctx, upper, lower, t)?;
    Ok(EvalResult::new(
        value,
        err,
        EvalMethod::Series,
        "power series, principal branch",
    ))
}

/// r-th derivative of pFq with respect to t, by term-wise differentiation:
/// Σ_{n>=r} c_n n (n-1) ... (n-r+1) t^{n-r}.
pub fn pfq_series_derivative(
    ctx: &Ctx,
    upper: &[Real],
    lower: &[Real],
    t: &Complex,
    r: u32,
) -> Result<Complex, HgError> {
    // falling-factor weight folded into an effective series: differentiate
    // term recurrence directly.
    let one = ctx.re(1);
    let mag = t.abs();
    if mag >= one && upper.len() == lower.len() + 1 {
        return Err(HgError::Divergence);
    }
    let mut coeff = ctx.one(); // c_n (series coefficient, t^n)
    let mut sum = ctx.zero();
    let mut tpow = ctx.one(); // t^{n-r} for n >= r
    let target = ctx.tol(0);
    let mut settled = 0u32;
    for n in 0..TERM_CAP {
        if n as u32 >= r {
            // weight n(n-1)...(n-r+1)
            let mut w = ctx.re(1);
            for j in 0..r {
                w *= ctx.re_i64(n as i64 - j as i64);
            }
            let contrib = &coeff.scale(&w) * &tpow;
            sum = &sum + &contrib;
            let cmag = contrib.abs();
            let scale = sum.abs().max(&one);
            if cmag < target.clone() * &scale && n > 8 {
                settled += 1;
                if settled >= 4 {
                    return Ok(sum);
                }
            } else {
                settled = 0;
            }
            tpow = &tpow * t;
        }
        // advance coefficient: c_{n+1} = c_n Π(a+n)/Π(b+n)/(n+1)
        let nf = ctx.re_i64(n as i64);
        let mut num = ctx.re(1);
        for a in upper {
            num *= (a + &nf).complete(ctx.bits());
        }
        let mut den = ctx.re(1);
        for b in lower {
            den *= (b + &nf).complete(ctx.bits());
        }
        den *= (&nf + &one).complete(ctx.bits());
        coeff = coeff.scale(&(num / den));
    }
    Err(HgError::SlowConvergence("derivative series".into()))
}

/// The regulator function
/// `calF(t) = Σ_k (ψ(a_k) + γ) + log t + a_1...a_s · t · F(t)` where
/// `F = (s+2)F(s+1)(a+1, ..., 1, 1; 2, ..., 2; t)`, principal branch of log.
pub fn calF_series(ctx: &Ctx, params: &HGParams, t: &Complex) -> Result<EvalResult, HgError> {
    if t.is_zero() {
        return Err(HgError::InvalidInput("calF needs t != 0".into()));
    }
    let a = params.as_reals(ctx);
    let s = a.len();
    let mut upper: Vec<Real> = a.iter().map(|x| (x + ctx.re(1)).into()).collect();
    upper.push(ctx.re(1));
    upper.push(ctx.re(1));
    let lower: Vec<Real> = vec![ctx.re(2); s + 1];
    let (f, tail) = pfq_raw(ctx, &upper, &lower, t)?;

    let gamma_e = ctx.euler();
    let mut acc = ctx.zero();
    for ai in &a {
        let psi = ctx.re(ai).digamma();
        acc = &acc + &ctx.cx_re(psi + &gamma_e);
    }
    acc = &acc + &t.ln();
    let mut prod = ctx.re(1);
    for ai in &a {
        prod *= ai;
    }
    let main = &(t * &f).scale(&prod);
    acc = &acc + main;
    let err = tail * prod.abs() * t.abs() + ctx.tol(4);
    Ok(EvalResult::new(
        acc,
        err,
        EvalMethod::Series,
        "series; principal log t",
    ))
}

/// pFq value at t = 1 (p = q+1) to full working precision, by direct summation
/// of the head plus Euler–Maclaurin/Hurwitz-zeta summation of the tail from
/// the Stirling expansion of the term coefficients.
///
/// This route reaches far beyond the plain series cap when κ = Σb - Σa is
/// small; it is the evaluator behind the weight-3 identities at t = 1.
pub fn pfq_at_unit(ctx: &Ctx, upper: &[Real], lower: &[Real]) -> Result<(Real, Real), HgError> {
    if upper.len() != lower.len() + 1 {
        return Err(HgError::InvalidInput(
            "unit-argument acceleration expects p = q+1".into(),
        ));
    }
    let bits = ctx.bits();
    let mut kappa = ctx.re(0);
    for b in lower {
        kappa += b;
    }
    for a in upper {
        kappa -= a;
    }
    if !kappa.is_sign_positive() || kappa.is_zero() {
        return Err(HgError::SlowConvergence("κ <= 0 at t = 1".into()));
    }

    let n_head: usize = 1200 + 30 * ctx.digits() as usize;
    let order: usize = 24 + (ctx.digits() as usize) / 2;

    // head: direct recurrence
    let mut head = ctx.re(1);
    let mut term = ctx.re(1);
    for n in 0..n_head {
        let nf = ctx.re_i64(n as i64);
        let mut num = ctx.re(1);
        for a in upper {
            num *= (a + &nf).complete(bits);
        }
        let mut den = ctx.re(1);
        for b in lower {
            den *= (b + &nf).complete(bits);
        }
        den *= ctx.re(1) + &nf;
        term *= num / den;
        head += &term;
    }

    // tail: c_n = e^B n^A exp(Σ_k q_k n^{-k}),
    // A = Σa - Σb - 1, e^B = ΠΓ(b)/ΠΓ(a),
    // q_k = (-1)^{k+1}/(k(k+1)) [Σ B_{k+1}(a_i) - Σ B_{k+1}(b_j) - B_{k+1}(1)]
    let capital_a = -(kappa.clone() + 1u32);
    let mut e_b = ctx.re(1);
    for b in lower {
        e_b *= ctx.re(b).gamma();
    }
    for a in upper {
        e_b /= ctx.re(a).gamma();
    }

    let mut q = vec![ctx.re(0); order + 1]; // q[0] unused
    for k in 1..=order {
        let mut v = ctx.re(0);
        for a in upper {
            v += bernoulli_poly(ctx, (k + 1) as u32, a);
        }
        for b in lower {
            v -= bernoulli_poly(ctx, (k + 1) as u32, b);
        }
        v -= bernoulli_poly(ctx, (k + 1) as u32, &ctx.re(1));
        let mut c = v / ctx.re_i64((k as i64) * (k as i64 + 1));
        if k % 2 == 0 {
            c = -c;
        }
        q[k] = c;
    }
    // f = exp(Σ q_k u^k) as a truncated series in u = 1/n
    let f = ps_exp(ctx, &q, order);

    let n0 = ctx.re_i64(n_head as i64 + 1);
    let mut tail = ctx.re(0);
    let mut last_mag = ctx.re(0);
    for (j, fj) in f.iter().enumerate() {
        if fj.is_zero() {
            continue;
        }
        let s_exp = (kappa.clone() + 1u32) + ctx.re_i64(j as i64); // = -A + j
        let z = hurwitz_zeta(ctx, &s_exp, &n0);
        let contrib = fj.clone() * z;
        last_mag = contrib.clone().abs();
        tail += contrib;
    }
    tail *= &e_b;
    last_mag *= e_b.abs();
    let _ = capital_a;

    let err = last_mag + ctx.tol(6);
    Ok((head + tail, err))
}

/// Bernoulli polynomial B_m(x) = Σ C(m,i) B_i x^{m-i}.
fn bernoulli_poly(ctx: &Ctx, m: u32, x: &Real) -> Real {
    let _bits = ctx.bits();
    let mut acc = ctx.re(0);
    let mut binom = ctx.re(1); // C(m, i)
    for i in 0..=m {
        let b_i = if i == 0 {
            ctx.re(1)
        } else if i == 1 {
            ctx.rat(-1, 2)
        } else if i % 2 == 1 {
            ctx.re(0)
        } else {
            bernoulli_even(ctx, i / 2)
        };
        if !b_i.is_zero() {
            let xpow = x.clone().pow((m - i) as u32);
            acc += binom.clone() * b_i * xpow;
        }
        // advance C(m, i+1) = C(m, i) (m-i)/(i+1)
        binom *= ctx.re_i64(m as i64 - i as i64);
        binom /= ctx.re(i) + 1u32;
    }
    acc
}

/// exp of a truncated power series with zero constant term.
fn ps_exp(ctx: &Ctx, u: &[Real], order: usize) -> Vec<Real> {
    let mut f = vec![ctx.re(0); order + 1];
    f[0] = ctx.re(1);
    // f' = u' f  =>  (k+1) f_{k+1} = Σ_{j=0}^{k} (j+1) u_{j+1} f_{k-j}
    for k in 0..order {
        let mut acc = ctx.re(0);
        for j in 0..=k {
            if j + 1 < u.len() && !u[j + 1].is_zero() {
                acc += u[j + 1].clone() * ctx.re_i64(j as i64 + 1) * &f[k - j];
            }
        }
        f[k + 1] = acc / ctx.re_i64(k as i64 + 1);
    }
    f
}
