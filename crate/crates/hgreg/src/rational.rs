//! Rational recognition of high-precision reals by continued fractions.

use crate::numerics::{Ctx, Real};
use serde::Serialize;

/// Result of a recognition attempt: either an accepted p/q with its residual,
/// or a refusal (never a forced fraction).
#[derive(Clone, Debug, Serialize)]
pub struct RecognizedRational {
    /// the input value, echoed for reporting
    pub input: String,
    pub numer: i64,
    pub denom: i64,
    /// |x - p/q|
    pub residual: String,
    pub accepted: bool,
}

/// Continued-fraction recognition with denominator cap `q_max` and acceptance
/// threshold 10^(-P/2).
pub fn recognize(ctx: &Ctx, x: &Real, q_max: i64) -> Option<RecognizedRational> {
    let threshold = ctx.pow10(-(ctx.digits() as i64) / 2);
    // convergents of the continued fraction of x
    let mut h_prev = (1i64, 0i64); // p_{-1}, q_{-1}
    let mut h = (0i64, 1i64); // dummy to be replaced below
    let mut frac = x.clone();
    let mut first = true;
    for _ in 0..64 {
        let floor = frac.clone().floor();
        let a = floor.to_f64();
        if !a.is_finite() || a.abs() > 9e17 {
            return None;
        }
        let a = a as i64;
        if first {
            h = (a, 1);
            h_prev = (1, 0);
            first = false;
        } else {
            let p = a.checked_mul(h.0)?.checked_add(h_prev.0)?;
            let q = a.checked_mul(h.1)?.checked_add(h_prev.1)?;
            h_prev = h;
            h = (p, q);
        }
        if h.1 > q_max {
            break;
        }
        let approx = ctx.rat(h.0, h.1);
        let residual = (x.clone() - approx).abs();
        if residual < threshold {
            return Some(RecognizedRational {
                input: x.to_string_radix(10, Some(12)),
                numer: h.0,
                denom: h.1,
                residual: residual.to_string_radix(10, Some(3)),
                accepted: true,
            });
        }
        let rem = frac - floor;
        if rem.is_zero() {
            break;
        }
        frac = rem.recip();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_table_ratios() {
        let ctx = Ctx::new(40);
        for (num, den) in [(-2i64, 1i64), (-1, 1), (1, 2), (-1, 2), (-8, 1), (-3, 1)] {
            let x = ctx.rat(num, den) + ctx.pow10(-30);
            let r = recognize(&ctx, &x, 64).expect("should recognize");
            assert_eq!((r.numer, r.denom), (num, den));
        }
    }

    #[test]
    fn rejects_irrational() {
        let ctx = Ctx::new(40);
        let x = ctx.pi();
        assert!(recognize(&ctx, &x, 64).is_none());
        let x = ctx.re(2).sqrt();
        assert!(recognize(&ctx, &x, 64).is_none());
    }

    #[test]
    fn respects_denominator_cap() {
        let ctx = Ctx::new(40);
        let x = ctx.rat(1, 97); // prime denominator beyond the cap
        assert!(recognize(&ctx, &x, 64).is_none());
        assert!(recognize(&ctx, &x, 128).is_some());
    }
}
