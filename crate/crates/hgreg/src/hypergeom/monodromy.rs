//! Numerical local monodromy of the hypergeometric system at 0, 1 and ∞.

use super::ode::{hg_transport, PathSpec};
use super::{HGParams, HgError};
use crate::linalg::CMatrix;
use crate::numerics::{Complex, Ctx, Real};

/// Which puncture a local monodromy matrix belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopId {
    Zero,
    One,
    Infinity,
}

/// A local monodromy matrix in the basis (F, DF, ..., D^{s-1}F) at the
/// basepoint.
#[derive(Clone, Debug)]
pub struct MonodromyMatrix {
    pub base_point: Complex,
    pub loop_id: LoopId,
    pub matrix: CMatrix,
}

/// Diagnostics for the monodromy representation at a basepoint.
#[derive(Debug)]
pub struct MonodromyReport {
    pub t0: CMatrix,
    pub t1: CMatrix,
    /// T_∞ := (T_1 T_0)^{-1}, the stated basepoint/ordering convention.
    pub t_inf: CMatrix,
    pub base_point: Complex,
    /// ‖(T_0 - I)^s‖_F, unipotency residual.
    pub unipotency_residual: Real,
    /// Numeric rank of T_0 - I at tolerance 10^(-P/2).
    pub rank_t0_minus_id: usize,
    /// Numeric rank of log T_0 (series log of the unipotent part).
    pub rank_log_t0: usize,
    /// Eigenvalues of T_∞ next to the targets e^{2πi a_j}, with the max
    /// multiset matching deviation.
    pub t_inf_eigenvalues: Vec<Complex>,
    pub t_inf_spectrum_deviation: Real,
    /// ‖T_big · T_1 · T_0 - I‖ where T_big is an independently integrated
    /// counterclockwise circle enclosing both finite singularities.
    pub loop_relation_residual: Real,
}

impl MonodromyReport {
    /// The three labeled local monodromies (matrices are invertible by
    /// construction; determinant checked at tolerance by the caller).
    pub fn matrices(&self) -> [MonodromyMatrix; 3] {
        [
            MonodromyMatrix {
                base_point: self.base_point.clone(),
                loop_id: LoopId::Zero,
                matrix: self.t0.clone(),
            },
            MonodromyMatrix {
                base_point: self.base_point.clone(),
                loop_id: LoopId::One,
                matrix: self.t1.clone(),
            },
            MonodromyMatrix {
                base_point: self.base_point.clone(),
                loop_id: LoopId::Infinity,
                matrix: self.t_inf.clone(),
            },
        ]
    }
}

/// Loop radius convention: min(|α|, |α-1|, 1)/2.
fn loop_radius(ctx: &Ctx, alpha: &Complex) -> Real {
    let d0 = alpha.abs();
    let d1 = (alpha - &ctx.one()).abs();
    let r = d0.min(&d1).min(&ctx.re(1));
    r / 2u32
}

/// Local monodromy matrices by transporting the fundamental system around
/// the documented loops based at `alpha`.
pub fn monodromy_report(
    ctx: &Ctx,
    params: &HGParams,
    alpha: &Complex,
) -> Result<MonodromyReport, HgError> {
    if alpha.is_zero() || (alpha - &ctx.one()).is_zero() {
        return Err(HgError::InvalidInput("basepoint must avoid {0,1}".into()));
    }
    let s = params.s();
    let r = loop_radius(ctx, alpha);
    let loop0 = PathSpec::loop_around(ctx, &ctx.zero(), &r, alpha);
    let loop1 = PathSpec::loop_around(ctx, &ctx.one(), &r, alpha);
    let t0 = hg_transport(ctx, params, &loop0)?;
    let t1 = hg_transport(ctx, params, &loop1)?;
    let prod = t1.mul(&t0);
    let t_inf = prod
        .inverse(ctx)
        .ok_or_else(|| HgError::InvalidInput("singular loop product".into()))?;

    let id = CMatrix::identity(ctx, s);
    let n0 = t0.sub(&id);
    let unipotency_residual = n0.powi(ctx, s as u32).frobenius_norm(ctx);
    let rank_tol = ctx.pow10(-(ctx.digits() as i64) / 2);
    let rank_t0_minus_id = n0.numeric_rank(ctx, &rank_tol);

    // log T_0 = Σ_{k>=1} (-1)^{k+1} (T_0 - I)^k / k; nilpotent up to noise,
    // so s terms suffice.
    let mut log_t0 = CMatrix::zero(ctx, s);
    let mut pw = n0.clone();
    for k in 1..=s {
        let f = ctx.cx_re(ctx.rat(if k % 2 == 1 { 1 } else { -1 }, k as i64));
        log_t0 = log_t0.add(&pw.scale(&f));
        if k < s {
            pw = pw.mul(&n0);
        }
    }
    let rank_log_t0 = log_t0.numeric_rank(ctx, &rank_tol);

    // spectrum of T_∞ against {e^{2πi a_j}}
    let eig = t_inf.eigenvalues(ctx);
    let mut targets: Vec<Complex> = params
        .rationals()
        .iter()
        .map(|q| {
            let theta = ctx.pi() * 2u32 * ctx.rat(*q.numer(), *q.denom());
            Complex::from_polar(&ctx.re(1), &theta, ctx.bits())
        })
        .collect();
    // greedy multiset matching
    let mut worst = ctx.re(0);
    for e in &eig {
        let mut best: Option<(usize, Real)> = None;
        for (i, t) in targets.iter().enumerate() {
            let d = (e - t).abs();
            match &best {
                None => best = Some((i, d)),
                Some((_, bd)) if d < *bd => best = Some((i, d)),
                _ => {}
            }
        }
        if let Some((i, d)) = best {
            targets.remove(i);
            worst = worst.max(&d);
        }
    }

    // Independent big counterclockwise loop around both singularities; it is
    // homotopic to loop0 followed by loop1, so T_∞ · T_big should be the
    // identity when the ordering convention is right.
    let big_r = {
        let d0 = alpha.abs();
        let d1 = (alpha - &ctx.one()).abs();
        d0.max(&d1).max(&ctx.re(1)) * 2u32
    };
    let center = ctx.cx_re(ctx.rat(1, 2));
    // enter the big circle at its top to keep the approach clear of {0, 1}
    let top = &center + &Complex::new(ctx.re(0), big_r.clone());
    let half_pi = ctx.pi() / 2u32;
    let big_loop = {
        let segs = vec![
            super::ode::PathSeg::Line {
                from: alpha.clone(),
                to: top.clone(),
            },
            super::ode::PathSeg::Arc {
                center: center.clone(),
                radius: big_r.clone(),
                from_angle: half_pi.clone(),
                to_angle: half_pi + ctx.pi() * 2u32,
            },
            super::ode::PathSeg::Line {
                from: top,
                to: alpha.clone(),
            },
        ];
        let spec = PathSpec {
            segs,
            clearance: ctx.re(0),
        };
        let clearance = spec.measure_clearance(ctx);
        PathSpec { clearance, ..spec }
    };
    let t_big = hg_transport(ctx, params, &big_loop)?;
    let loop_relation_residual = t_inf.mul(&t_big).sub(&id).frobenius_norm(ctx);

    Ok(MonodromyReport {
        t0,
        t1,
        t_inf,
        base_point: alpha.clone(),
        unipotency_residual,
        rank_t0_minus_id,
        rank_log_t0,
        t_inf_eigenvalues: eig,
        t_inf_spectrum_deviation: worst,
        loop_relation_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_half_monodromy_shape() {
        let c = Ctx::new(32);
        let p = HGParams::parse("1/2,1/2").unwrap();
        let rep = monodromy_report(&c, &p, &c.cx(0.25, 0)).unwrap();
        // T_0 unipotent with one Jordan block: rank(T_0 - I) = 1
        assert_eq!(rep.rank_t0_minus_id, 1);
        assert_eq!(rep.rank_log_t0, 1);
        assert!(rep.unipotency_residual < c.pow10(-15));
        // T_∞ spectrum = {-1, -1}
        assert!(rep.t_inf_spectrum_deviation < c.pow10(-12));
        assert!(rep.loop_relation_residual < c.pow10(-12));
    }
}
