//! Large-argument evaluation of `calF` through the connection formula
//!
//!   calF(1/t) = πi - Σ_j C_j H_j(t),     |t| < 1,
//!
//! with Gamma-factor coefficients C_j and auxiliary series H_j.  Parameters
//! with integer differences (every table case: a = (1/2, ..., 1/2)) go through
//! the ε-perturbation a_k + k ε with Richardson extrapolation in ε.
//!
//! Branch conventions: (-t)^{a_j} uses arg(-t) ∈ (-π, π] and the additive
//! constant is +πi; this matches continuation from (0,1) along the canonical
//! path through the upper half plane.

use super::series::pfq_raw;
use super::{EvalMethod, EvalResult, HGParams, HgError};
use crate::numerics::{Complex, Ctx, Real};
use num::rational::Rational64;
use rug::ops::{CompleteRound, Pow};

/// The assembled right-hand side of the connection formula at one argument:
/// Gamma-factor coefficients C_j, the term values H_j(t), and the additive
/// constant πi, with calF(1/t) = pi_i - Σ C_j H_j.
#[derive(Clone, Debug)]
pub struct ConnectionDecomposition {
    pub coefficients: Vec<Real>,
    pub terms: Vec<Complex>,
    pub pi_i: Complex,
    pub series_error: Real,
}

impl ConnectionDecomposition {
    pub fn assemble(&self, ctx: &Ctx) -> Complex {
        let mut sum = ctx.zero();
        for (c, h) in self.coefficients.iter().zip(&self.terms) {
            sum = &sum + &h.scale(c);
        }
        &self.pi_i - &sum
    }
}

/// Decompose the connection formula at non-degenerate real parameters:
/// the |argument| > 1 point is 1/t with |t| < 1.
pub fn connection_decomposition(
    ctx: &Ctx,
    params: &HGParams,
    t_big: &Complex,
) -> Result<ConnectionDecomposition, HgError> {
    if params.is_degenerate() {
        return Err(HgError::InvalidInput(
            "decomposition needs a_i - a_j non-integral; use calF_connection".into(),
        ));
    }
    if params.sum() >= Rational64::from_integer(params.s() as i64) {
        return Err(HgError::ConnectionHypothesis);
    }
    let t = t_big.recip();
    decomposition_once(ctx, &params.as_reals(ctx), &t)
}

fn decomposition_once(
    ctx: &Ctx,
    a: &[Real],
    t: &Complex,
) -> Result<ConnectionDecomposition, HgError> {
    let s = a.len();
    let one = ctx.re(1);
    let neg_t = -t;
    let mut total_err = ctx.re(0);
    let mut coefficients = Vec::with_capacity(s);
    let mut terms = Vec::with_capacity(s);
    for j in 0..s {
        // C_j = Γ(1-a_j)^{-(s-1)} Π_{k≠j} Γ(a_k - a_j)/Γ(a_k)
        let mut c_j = (one.clone() - &a[j]).gamma().pow((-(s as i64) + 1) as i32);
        for (k, ak) in a.iter().enumerate() {
            if k == j {
                continue;
            }
            let diff = (ak - &a[j]).complete(ctx.bits());
            if diff.is_integer() {
                return Err(HgError::InvalidInput(
                    "connection formula needs a_i - a_j not an integer".into(),
                ));
            }
            c_j *= diff.gamma();
            c_j /= ak.clone().gamma();
        }
        // H_j = a_j^{-1} (-t)^{a_j} (s+1)F(s)(a_j,...,a_j; {1-a_k+a_j}_{k≠j}, 1+a_j; t)
        let upper = vec![a[j].clone(); s + 1];
        let mut lower: Vec<Real> = Vec::with_capacity(s);
        for (k, ak) in a.iter().enumerate() {
            if k == j {
                continue;
            }
            let mut lo = one.clone() - ak;
            lo += &a[j];
            lower.push(lo);
        }
        lower.push(one.clone() + &a[j]);
        let (f, tail) = pfq_raw(ctx, &upper, &lower, t)?;
        let prefactor = neg_t.pow_re(&a[j]).scale(&(one.clone() / &a[j]));
        let h_j = &prefactor * &f;
        total_err += tail * c_j.clone().abs() * prefactor.abs();
        coefficients.push(c_j);
        terms.push(h_j);
    }
    Ok(ConnectionDecomposition {
        coefficients,
        terms,
        pi_i: Complex::new(ctx.re(0), ctx.pi()),
        series_error: total_err,
    })
}

/// One evaluation of πi - Σ C_j H_j(t) at explicitly non-degenerate real
/// parameters.  Returns the value and the accumulated series error.
fn connection_once(ctx: &Ctx, a: &[Real], t: &Complex) -> Result<(Complex, Real), HgError> {
    let dec = decomposition_once(ctx, a, t)?;
    let v = dec.assemble(ctx);
    Ok((v, dec.series_error))
}

/// `calF` at a large argument `t_big` (|t_big| > 1) via the connection
/// formula evaluated at t = 1/t_big.
pub fn calF_connection(
    ctx: &Ctx,
    params: &HGParams,
    t_big: &Complex,
) -> Result<EvalResult, HgError> {
    let s = params.s();
    if params.sum() >= Rational64::from_integer(s as i64) {
        return Err(HgError::ConnectionHypothesis);
    }
    let t = t_big.recip();
    if t.abs() >= ctx.re(1) {
        return Err(HgError::InvalidInput(
            "connection formula wants |argument| > 1".into(),
        ));
    }

    if !params.is_degenerate() {
        // direct evaluation with a modest guard
        let wctx = ctx.widened(10);
        let a = params.as_reals(&wctx);
        let tw = t.to_prec(wctx.bits());
        let (v, err) = connection_once(&wctx, &a, &tw)?;
        return Ok(EvalResult::new(
            v.to_prec(ctx.bits()),
            err + ctx.tol(6),
            EvalMethod::Connection,
            "connection formula, arg(-t) in (-pi,pi], +pi*i",
        ));
    }

    // Degenerate parameters: evaluate at a_k + k ε for ε, ε/2, ε/4 and
    // Richardson-extrapolate assuming an O(ε) error model.  The Gamma factors
    // blow up like ε^{-(s-1)}, so work at widened precision.
    let p = ctx.digits() as i64;
    let extra = ((s as u32).saturating_sub(1)) * (ctx.digits() / 4) + 30;
    let wctx = ctx.widened(extra);
    let eps0 = wctx.pow10(-(p / 4));
    let tw = t.to_prec(wctx.bits());
    let base = params.as_reals(&wctx);

    let eval_at = |eps: &Real| -> Result<(Complex, Real), HgError> {
        let shifted: Vec<Real> = base
            .iter()
            .enumerate()
            .map(|(k, ak)| eps.clone() * wctx.re_i64(k as i64 + 1) + ak)
            .collect();
        connection_once(&wctx, &shifted, &tw)
    };

    let half = wctx.rat(1, 2);
    let e1 = eps0.clone();
    let e2 = eps0.clone() * &half;
    let e4 = e2.clone() * &half;
    let (v1, err1) = eval_at(&e1)?;
    let (v2, err2) = eval_at(&e2)?;
    let (v4, err4) = eval_at(&e4)?;
    let r1 = &v2.scale(&wctx.re(2)) - &v1;
    let r2 = &v4.scale(&wctx.re(2)) - &v2;
    let disagreement = (&r2 - &r1).abs();
    let gate = ctx.pow10(-(p / 4));
    if disagreement > gate {
        return Err(HgError::DegenerateExtrapolation(format!(
            "estimates differ by {disagreement} (gate {gate})"
        )));
    }
    let err = disagreement + err1 + err2 + err4 + ctx.tol(6);
    Ok(EvalResult::new(
        r2.to_prec(ctx.bits()),
        err,
        EvalMethod::Connection,
        "connection formula, eps-limit (Richardson in eps)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom::series::pfq_series;

    #[test]
    fn degenerate_half_half_matches_closed_form() {
        // Re calF_{1/2,1/2}(T) = Re[-2 T^{-1/2} 3F2(1/2,1/2,1/2; 1,3/2; 1/T)], T > 1
        let c = Ctx::new(48);
        let p = HGParams::parse("1/2,1/2").unwrap();
        // the ε-limit is Richardson-extrapolated, so its accuracy floor is
        // ~ε₀² = 10^(-P/2)
        let gate = c.pow10(-(c.digits() as i64) / 2 + 3);
        for big in [2.0f64, 5.0, 8.0] {
            let t_big = c.cx(big, 0);
            let r = calF_connection(&c, &p, &t_big).unwrap();
            let t = c.re(1) / c.re(big);
            let f = pfq_series(
                &c,
                &[c.rat(1, 2), c.rat(1, 2), c.rat(1, 2)],
                &[c.re(1), c.rat(3, 2)],
                &c.cx_re(t.clone()),
            )
            .unwrap()
            .value;
            let want = -(c.re(2) * t.sqrt() * f.re);
            let dev = (r.value.re.clone() - want).abs();
            assert!(dev < gate, "T={big}: dev {dev}");
            assert!(dev <= r.error_estimate.clone() * 10u32, "honest error: {dev} vs {}", r.error_estimate);
        }
    }

    #[test]
    fn table_value_alpha_2() {
        // reference value: Re calF_{1/2,1/2}(2) = -1.4866664931...
        let c = Ctx::new(48);
        let p = HGParams::parse("1/2,1/2").unwrap();
        let r = calF_connection(&c, &p, &c.cx(2, 0)).unwrap();
        let want = c.re_str("-1.4866664931");
        assert!(
            (r.value.re.clone() - want).abs() < c.re(1e-9),
            "got {}",
            r.value.re
        );
    }

    #[test]
    fn nondegenerate_connection_against_series_continuation() {
        // For |T| slightly above 1 take a non-degenerate tuple and compare
        // against the series evaluated inside by the derivative identity:
        // here we instead check internal consistency between two T values
        // linked by the same branch, using the real part's smoothness.
        let c = Ctx::new(40);
        let p = HGParams::parse("1/2,1/3").unwrap();
        let a = calF_connection(&c, &p, &c.cx(3, 0)).unwrap();
        let b = calF_connection(&c, &p, &c.cx(3.0000001, 0)).unwrap();
        assert!((a.value.re.clone() - b.value.re.clone()).abs() < c.re(1e-6));
        assert!(a.error_estimate < c.re(1e-20));
    }

    #[test]
    fn rejects_sum_hypothesis_violation() {
        let c = Ctx::new(40);
        // Σ a_i = 2 = s violates Re(Σ a) < s
        let p = HGParams::parse("1,1").unwrap();
        assert!(matches!(
            calF_connection(&c, &p, &c.cx(2, 0)),
            Err(HgError::ConnectionHypothesis)
        ));
    }
}
