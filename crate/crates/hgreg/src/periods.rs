//! Independent numerical oracles for the period formulas: contour-pole
//! quadrature, torus-cycle quadrature of the rational d-forms, and the
//! twist/derivative recurrences that the lifted forms satisfy.
//!
//! All checks are stated at the level of numbers (period values).  Quadrature
//! is per-axis trapezoid on 2^k nodes, doubled until two successive values
//! agree; integrands here are analytic and periodic, so convergence is
//! geometric.

use crate::hypergeom::{pfq_series_derivative, HgError};
use crate::numerics::{pairwise_sum, Complex, Ctx, Real};
use rayon::prelude::*;
use rug::ops::Pow;

#[derive(Debug, thiserror::Error)]
pub enum PeriodError {
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("x0 branch left |x0 - 1| < 1/2 (branch ambiguity)")]
    BranchAmbiguity,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Hg(#[from] HgError),
}

/// The scheme (1 - x_0^{n_0}) ... (1 - x_d^{n_d}) = t.
#[derive(Clone, Debug)]
pub struct SchemeDescriptor {
    pub n: Vec<u32>,
    pub t: Complex,
}

impl SchemeDescriptor {
    pub fn new(n: Vec<u32>, t: Complex) -> Result<Self, PeriodError> {
        if n.is_empty() || n.iter().any(|&nk| nk == 0) {
            return Err(PeriodError::InvalidInput("need d+1 exponents >= 1".into()));
        }
        if t.is_zero() {
            return Err(PeriodError::InvalidInput("t = 0 is singular".into()));
        }
        Ok(SchemeDescriptor { n, t })
    }

    /// Dimension d (one less than the number of variables).
    pub fn d(&self) -> usize {
        self.n.len() - 1
    }
}

/// The rational d-form ω_{i_0...i_d} (r = 0) or its twist ω^{(r)}.
#[derive(Clone, Debug)]
pub struct PeriodForm {
    pub indices: Vec<u32>,
    pub r: u32,
}

impl PeriodForm {
    pub fn new(scheme: &SchemeDescriptor, indices: Vec<u32>, r: u32) -> Result<Self, PeriodError> {
        if indices.len() != scheme.n.len() {
            return Err(PeriodError::InvalidInput("index count mismatch".into()));
        }
        for (&i, &n) in indices.iter().zip(&scheme.n) {
            if i == 0 || i >= n {
                return Err(PeriodError::InvalidInput(format!(
                    "need 0 < i < n, got i={i}, n={n}"
                )));
            }
        }
        Ok(PeriodForm { indices, r })
    }
}

/// Torus |x_k - 1| = ρ, k = 1..d, with the x_0 branch near 1.
#[derive(Clone, Debug)]
pub struct TorusCycle {
    pub rho: Real,
    /// +1 keeps the calibrated orientation (see r=0 calibration test).
    pub orientation: i32,
    pub grid_log2: u32,
}

impl TorusCycle {
    /// Default cycle for a scheme: ρ = |t|^{1/(d+1)}, 2^6 starting grid.
    pub fn for_scheme(ctx: &Ctx, scheme: &SchemeDescriptor) -> Result<Self, PeriodError> {
        let mag = scheme.t.abs();
        if mag > ctx.re(0.3) {
            return Err(PeriodError::InvalidInput(
                "torus cycle needs |t| <= 0.3 for the single-valued x0 branch".into(),
            ));
        }
        let d1 = scheme.n.len() as f64;
        let rho = mag.pow(&ctx.re(1.0 / d1));
        Ok(TorusCycle {
            rho,
            orientation: 1,
            grid_log2: 6,
        })
    }
}

/// (1/2πi) ∮_{|x-1|=ε} x^{c1-1} / (1 - x^{c2})^{n+1} dx with the branch of
/// x^c near 1; equals -c2^{-1} (1 - c1/c2)_n / n!.
pub fn contour_pole_integral(
    ctx: &Ctx,
    c1: &Complex,
    c2: &Complex,
    n: u32,
) -> Result<Complex, PeriodError> {
    if c2.is_zero() {
        return Err(PeriodError::InvalidInput("c2 must be nonzero".into()));
    }
    let eps = ctx.rat(1, 4);
    let mut prev: Option<Complex> = None;
    let tol = ctx.tol(10);
    for k in 6..=16u32 {
        let m = 1usize << k;
        let vals: Vec<Complex> = (0..m)
            .into_par_iter()
            .map(|j| {
                let theta = ctx.pi() * 2u32 * ctx.re_i64(j as i64) / ctx.re_i64(m as i64);
                let x = &ctx.one() + &Complex::from_polar(&eps, &theta, ctx.bits());
                // branch: x^c = exp(c Log x), principal Log keeps |x^c - 1| small near 1
                let lx = x.ln();
                let num = (&(c1 - &ctx.one()) * &lx).exp();
                let den_base = &ctx.one() - &(c2 * &lx).exp();
                let den = den_base.powi(n as i64 + 1);
                let dx = Complex::from_polar(&eps, &theta, ctx.bits()).mul_i();
                &(&num / &den) * &dx
            })
            .collect();
        let sum = pairwise_sum(ctx, &vals);
        // ∮ f dx ≈ (2π/m) Σ f(x(θ_j)) iεe^{iθ_j}; dividing by 2πi leaves
        // (1/m) Σ (...) / i = -(i/m) Σ (...).
        let value = -sum.scale(&(ctx.re(1) / ctx.re_i64(m as i64))).mul_i();
        if let Some(p) = &prev {
            if (&value - p).abs() < tol {
                return Ok(value);
            }
        }
        prev = Some(value);
    }
    Err(PeriodError::QuadratureNotConverged(
        "contour pole integral".into(),
    ))
}

/// Solve (1 - x0^{n0}) = w on the branch with x0 near 1 by Newton iteration
/// on f(x) = x^{n0} - (1 - w); the seed is the principal root, or (marching
/// along a quadrature grid) the previous node's solution.  Rejects if the
/// branch wanders out of |x0 - 1| < 1/2.
fn solve_x0(ctx: &Ctx, n0: u32, w: &Complex, seed: Option<&Complex>) -> Result<Complex, PeriodError> {
    let base = &ctx.one() - w;
    let mut x = match seed {
        Some(s) => s.clone(),
        None => base.pow_re(&(ctx.re(1) / ctx.re(n0))),
    };
    let eps = ctx.tol(6) * base.abs();
    let mut converged = false;
    for _ in 0..24 {
        let xp = x.powi(n0 as i64 - 1);
        let fx = &(&xp * &x) - &base;
        if fx.abs() < eps {
            converged = true;
            break;
        }
        let dfx = xp.scale(&ctx.re(n0));
        x = &x - &(&fx / &dfx);
    }
    if !converged {
        // one more residual check after the final step
        let fx = (&x.powi(n0 as i64) - &base).abs();
        if fx > eps * 16u32 {
            return Err(PeriodError::QuadratureNotConverged("x0 Newton".into()));
        }
    }
    let dev = (&x - &ctx.one()).abs();
    if dev >= ctx.rat(1, 2) {
        return Err(PeriodError::BranchAmbiguity);
    }
    Ok(x)
}

/// Per-axis lookup tables for one quadrature pass: everything the inner loop
/// needs is a table read, so no transcendental function is evaluated per
/// node.
struct AxisTables {
    /// 1 - x^{n_k} at each grid node
    pole: Vec<Complex>,
    /// x^{i_k - 1} · iρe^{iθ} at each grid node (form power times Jacobian)
    weight: Vec<Complex>,
}

fn build_axis_tables(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
    rho: &Real,
    m: usize,
) -> Vec<AxisTables> {
    let d = scheme.d();
    let two_pi = ctx.pi() * 2u32;
    let units: Vec<Complex> = (0..m)
        .map(|j| {
            let theta = two_pi.clone() * ctx.re_i64(j as i64) / ctx.re_i64(m as i64);
            Complex::from_polar(&ctx.re(1), &theta, ctx.bits())
        })
        .collect();
    (1..=d)
        .map(|k| {
            let nk = scheme.n[k] as i64;
            let ik = form.indices[k] as i64;
            let mut pole = Vec::with_capacity(m);
            let mut weight = Vec::with_capacity(m);
            for u in &units {
                let x = &ctx.one() + &u.scale(rho);
                pole.push(&ctx.one() - &x.powi(nk));
                let jac = u.scale(rho).mul_i();
                weight.push(&x.powi(ik - 1) * &jac);
            }
            AxisTables { pole, weight }
        })
        .collect()
}

fn quadrature_once(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
    cycle: &TorusCycle,
    k: u32,
) -> Result<Complex, PeriodError> {
    let d = scheme.d();
    let m = 1usize << k;
    let tables = build_axis_tables(ctx, scheme, form, &cycle.rho, m);
    let n0 = scheme.n[0];
    let i0 = form.indices[0] as i64;
    let inv_n0 = ctx.re(1) / ctx.re(n0);
    // parallel over the outer axes; the innermost axis is marched
    // sequentially so each x0 Newton solve is seeded by its neighbor
    let outer: usize = m.pow(d as u32 - 1);
    let slices: Result<Vec<Complex>, PeriodError> = (0..outer)
        .into_par_iter()
        .map(|flat| {
            let mut idx = flat;
            let mut denom_outer = ctx.one();
            let mut weight_outer = ctx.one();
            for t in tables.iter().skip(1) {
                let j = idx % m;
                idx /= m;
                denom_outer = &denom_outer * &t.pole[j];
                weight_outer = &weight_outer * &t.weight[j];
            }
            let mut slice_sum = ctx.zero();
            let mut seed: Option<Complex> = None;
            for j in 0..m {
                let denom = &denom_outer * &tables[0].pole[j];
                let w = &scheme.t / &denom;
                let x0 = solve_x0(ctx, n0, &w, seed.as_ref())?;
                seed = Some(x0.clone());
                let mut val = x0.powi(i0 - n0 as i64).scale(&inv_n0);
                val = &(&val * &weight_outer) * &tables[0].weight[j];
                val = &val / &denom;
                if form.r > 0 {
                    let twist = &w / &x0.powi(n0 as i64);
                    val = &val * &twist.powi(form.r as i64);
                }
                slice_sum = &slice_sum + &val;
            }
            Ok(slice_sum)
        })
        .collect();
    let vals = slices?;
    let sum = pairwise_sum(ctx, &vals);
    let two_pi = ctx.pi() * 2u32;
    let step = two_pi / ctx.re_i64(m as i64);
    let mut scale = ctx.re(1);
    for _ in 0..d {
        scale *= &step;
    }
    let mut out = sum.scale(&scale);
    // Each counterclockwise circle contributes the residue with a minus sign
    // (the pole factor is 1/(1 - x^n)), so the vanishing-cycle orientation is
    // (-1)^d relative to the product of ccw circles.  Pinned by the
    // d=1, n=(2,2), t=1/10 calibration test.
    if d % 2 == 1 {
        out = -&out;
    }
    if cycle.orientation < 0 {
        out = -&out;
    }
    Ok(out)
}

/// Single quadrature pass at a fixed per-axis grid 2^k (no refinement);
/// exposed for convergence-order diagnostics.
pub fn quadrature_probe(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
    cycle: &TorusCycle,
    k: u32,
) -> Result<Complex, PeriodError> {
    quadrature_once(ctx, scheme, form, cycle, k)
}

/// ∫_Δ ω^{(r)} by product trapezoid quadrature, doubling the per-axis grid
/// until two successive refinements agree to the context tolerance.
pub fn torus_period(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
    cycle: &TorusCycle,
) -> Result<Complex, PeriodError> {
    let mag = scheme.t.abs();
    if mag > ctx.re(0.3) {
        return Err(PeriodError::InvalidInput(
            "torus_period enforces |t| <= 0.3".into(),
        ));
    }
    let tol = ctx.tol(10);
    let mut prev: Option<Complex> = None;
    let kmax = cycle.grid_log2 + 8;
    for k in cycle.grid_log2..=kmax {
        let v = quadrature_once(ctx, scheme, form, cycle, k)?;
        if let Some(p) = &prev {
            let dev = (&v - p).abs();
            let scale = v.abs().max(&ctx.re(1));
            if dev < tol.clone() * scale {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(PeriodError::QuadratureNotConverged(format!(
        "torus period at t = {}",
        scheme.t
    )))
}

/// The hypergeometric prediction (2πi)^d / Π n_k · (d+1)F(d)(a; 1...; t) for
/// the r = 0 period, or its t^r F^{(r)} analogue divided by the candidate
/// normalization for r >= 1.
pub fn predicted_period(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
) -> Result<Complex, PeriodError> {
    let d = scheme.d();
    let a: Vec<Real> = form
        .indices
        .iter()
        .zip(&scheme.n)
        .map(|(&i, &n)| ctx.re(1) - ctx.rat(i as i64, n as i64))
        .collect();
    let lower = vec![ctx.re(1); d];
    let f = if form.r == 0 {
        crate::hypergeom::pfq_series(ctx, &a, &lower, &scheme.t)?.value
    } else {
        let fr = pfq_series_derivative(ctx, &a, &lower, &scheme.t, form.r)?;
        &fr * &scheme.t.powi(form.r as i64)
    };
    let mut norm = ctx.re(1);
    for &n in &scheme.n {
        norm *= ctx.re(n);
    }
    let factor = ctx.two_pi_i().powi(d as i64).scale(&(ctx.re(1) / norm));
    Ok(&factor * &f)
}

/// Residuals of the quadrature value of ∫ ω^{(r)} against both candidate
/// normalizations of the lifted form: the rising factorial
/// a_0 (a_0+1) ... (a_0+r-1) and the falling product a_0 (a_0-1) ... (a_0-r+1).
/// Returns (rising_residual, falling_residual, quadrature value).
pub fn lifted_period_check(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
    cycle: &TorusCycle,
) -> Result<(Real, Real, Complex), PeriodError> {
    if form.r == 0 {
        return Err(PeriodError::InvalidInput("lifted check needs r >= 1".into()));
    }
    let quad = torus_period(ctx, scheme, form, cycle)?;
    let base = predicted_period(ctx, scheme, form)?; // (2πi)^d/Πn · t^r F^{(r)}
    let a0 = ctx.re(1) - ctx.rat(form.indices[0] as i64, scheme.n[0] as i64);
    let mut rising = ctx.re(1);
    let mut falling = ctx.re(1);
    for j in 0..form.r {
        rising *= a0.clone() + ctx.re(j);
        falling *= a0.clone() - ctx.re(j);
    }
    let scale = quad.abs().max(&ctx.re(1));
    let rise_val = base.scale(&(ctx.re(1) / rising));
    let fall_val = base.scale(&(ctx.re(1) / falling));
    let r_res = (&quad - &rise_val).abs() / &scale;
    let f_res = (&quad - &fall_val).abs() / &scale;
    Ok((r_res, f_res, quad))
}

/// Check the derivative recurrence t d/dt ∫ω^{(r)} = r ∫ω^{(r)} + (a_0+r) ∫ω^{(r+1)}
/// by central differences of the quadrature values on the t-grid.
pub fn omega_recurrence_check(
    ctx: &Ctx,
    scheme: &SchemeDescriptor,
    form: &PeriodForm,
    step: &Real,
) -> Result<Real, PeriodError> {
    if !scheme.t.im.is_zero() {
        return Err(PeriodError::InvalidInput(
            "recurrence check uses a real t grid".into(),
        ));
    }
    let t = scheme.t.re.clone();
    let mk = |tv: Real| -> Result<SchemeDescriptor, PeriodError> {
        SchemeDescriptor::new(scheme.n.clone(), ctx.cx_re(tv))
    };
    let sp = mk((t.clone() + step).into())?;
    let sm = mk((t.clone() - step).into())?;
    let s0 = mk(t.clone())?;
    let cyc = |s: &SchemeDescriptor| TorusCycle::for_scheme(ctx, s);
    let form_up = PeriodForm {
        indices: form.indices.clone(),
        r: form.r + 1,
    };
    let ip = torus_period(ctx, &sp, form, &cyc(&sp)?)?;
    let im = torus_period(ctx, &sm, form, &cyc(&sm)?)?;
    let i0 = torus_period(ctx, &s0, form, &cyc(&s0)?)?;
    let i1 = torus_period(ctx, &s0, &form_up, &cyc(&s0)?)?;
    let deriv = (&ip - &im).scale(&(ctx.re(1) / (step.clone() * 2u32)));
    let lhs = deriv.scale(&t);
    let a0 = ctx.re(1) - ctx.rat(form.indices[0] as i64, scheme.n[0] as i64);
    let rhs = &i0.scale(&ctx.re(form.r)) + &i1.scale(&(a0 + ctx.re(form.r)));
    let scale = lhs.abs().max(&ctx.re(1));
    Ok((&lhs - &rhs).abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom::pfq_series;

    #[test]
    fn contour_pole_trivial_n0() {
        let c = Ctx::new(40);
        let c1 = c.cx(0.7, 0.2);
        let c2 = c.cx(2.0, -0.5);
        let v = contour_pole_integral(&c, &c1, &c2, 0).unwrap();
        let want = -&c2.recip();
        assert!((&v - &want).abs() < c.tol(10));
    }

    #[test]
    fn contour_pole_closed_forms() {
        let c = Ctx::new(40);
        // c1=1, c2=2, n=1 -> -(1/2)(1/2)_1/1! = -1/4
        let v = contour_pole_integral(&c, &c.one(), &c.cx(2, 0), 1).unwrap();
        assert!((&v - &c.cx(-0.25, 0)).abs() < c.tol(10));
        // c1=1, c2=3, n=2 -> -5/27
        let v = contour_pole_integral(&c, &c.one(), &c.cx(3, 0), 2).unwrap();
        let want = c.cx_re(c.rat(-5, 27));
        assert!((&v - &want).abs() < c.tol(10));
    }

    #[test]
    fn torus_period_d1_matches_series() {
        let c = Ctx::new(32);
        let scheme = SchemeDescriptor::new(vec![2, 2], c.cx(0.1, 0)).unwrap();
        let form = PeriodForm::new(&scheme, vec![1, 1], 0).unwrap();
        let cycle = TorusCycle::for_scheme(&c, &scheme).unwrap();
        let v = torus_period(&c, &scheme, &form, &cycle).unwrap();
        let want = predicted_period(&c, &scheme, &form).unwrap();
        let rel = (&v - &want).abs() / want.abs();
        assert!(rel < c.tol(10), "rel {rel}");
    }

    #[test]
    fn torus_period_t_to_zero_normalization() {
        // at tiny t the period over (2πi)^d approaches 1/(n_0 n_1)
        let c = Ctx::new(32);
        let scheme = SchemeDescriptor::new(vec![3, 2], c.cx(1e-6, 0)).unwrap();
        let form = PeriodForm::new(&scheme, vec![2, 1], 0).unwrap();
        let cycle = TorusCycle::for_scheme(&c, &scheme).unwrap();
        let v = torus_period(&c, &scheme, &form, &cycle).unwrap();
        let ratio = &v / &c.two_pi_i();
        let want = c.rat(1, 6);
        assert!((ratio.re.clone() - want).abs() < c.re(1e-5));
    }

    #[test]
    fn rho_homotopy_invariance() {
        let c = Ctx::new(32);
        let scheme = SchemeDescriptor::new(vec![2, 3], c.cx(0.12, 0)).unwrap();
        let form = PeriodForm::new(&scheme, vec![1, 2], 0).unwrap();
        let mut cy1 = TorusCycle::for_scheme(&c, &scheme).unwrap();
        let mut cy2 = cy1.clone();
        cy1.rho *= c.re(0.9);
        cy2.rho *= c.re(1.1);
        let v1 = torus_period(&c, &scheme, &form, &cy1).unwrap();
        let v2 = torus_period(&c, &scheme, &form, &cy2).unwrap();
        let rel = (&v1 - &v2).abs() / v1.abs();
        assert!(rel < c.tol(10), "rel {rel}");
    }

    #[test]
    fn lifted_r1_candidates_coincide() {
        let c = Ctx::new(32);
        let scheme = SchemeDescriptor::new(vec![2, 2], c.cx(0.1, 0)).unwrap();
        let form = PeriodForm::new(&scheme, vec![1, 1], 1).unwrap();
        let cycle = TorusCycle::for_scheme(&c, &scheme).unwrap();
        let (rise, fall, _) = lifted_period_check(&c, &scheme, &form, &cycle).unwrap();
        assert!(rise < c.tol(10));
        assert!(fall < c.tol(10));
    }

    #[test]
    fn lifted_r2_rising_factorial_wins() {
        let c = Ctx::new(32);
        let scheme = SchemeDescriptor::new(vec![2, 2], c.cx(0.1, 0)).unwrap();
        let form = PeriodForm::new(&scheme, vec![1, 1], 2).unwrap();
        let cycle = TorusCycle::for_scheme(&c, &scheme).unwrap();
        let (rise, fall, _) = lifted_period_check(&c, &scheme, &form, &cycle).unwrap();
        assert!(rise < c.tol(10), "rising residual {rise}");
        assert!(fall > c.re(0.01), "falling should mismatch, got {fall}");
    }

    #[test]
    fn quadrature_on_2f1_value() {
        // d=1, n=(2,2), t=1/10: period = (2πi/4) 2F1(1/2,1/2;1;1/10)
        let c = Ctx::new(32);
        let scheme = SchemeDescriptor::new(vec![2, 2], c.cx(0.1, 0)).unwrap();
        let form = PeriodForm::new(&scheme, vec![1, 1], 0).unwrap();
        let cycle = TorusCycle::for_scheme(&c, &scheme).unwrap();
        let v = torus_period(&c, &scheme, &form, &cycle).unwrap();
        let f = pfq_series(&c, &[c.rat(1, 2), c.rat(1, 2)], &[c.re(1)], &c.cx(0.1, 0))
            .unwrap()
            .value;
        let want = ctx_scale(&c, &f);
        let rel = (&v - &want).abs() / want.abs();
        assert!(rel < c.tol(10), "rel {rel}");
    }

    fn ctx_scale(c: &Ctx, f: &Complex) -> Complex {
        let factor = c.two_pi_i().scale(&c.rat(1, 4));
        &factor * f
    }

    #[test]
    fn omega_recurrence_small_cases() {
        let c = Ctx::new(28);
        let h = c.pow10(-(c.digits() as i64) / 4);
        let gate = c.pow10(6 - (c.digits() as i64) / 2);
        for (n, i, r) in [
            (vec![2u32, 2], vec![1u32, 1], 0u32),
            (vec![2, 2], vec![1, 1], 1),
            (vec![2, 2, 2], vec![1, 1, 1], 0),
        ] {
            let scheme = SchemeDescriptor::new(n.clone(), c.cx(0.1, 0)).unwrap();
            let form = PeriodForm::new(&scheme, i, r).unwrap();
            let resid = omega_recurrence_check(&c, &scheme, &form, &h).unwrap();
            assert!(resid < gate, "n={n:?} r={r}: residual {resid}");
        }
    }

    #[test]
    fn connection_decomposition_reassembles() {
        use crate::hypergeom::{calF_connection, connection_decomposition, HGParams};
        let c = Ctx::new(36);
        let p = HGParams::parse("1/2,1/3").unwrap();
        let t_big = c.cx(5, 0);
        let dec = connection_decomposition(&c, &p, &t_big).unwrap();
        assert_eq!(dec.coefficients.len(), 2);
        let direct = calF_connection(&c, &p, &t_big).unwrap();
        let dev = (&dec.assemble(&c) - &direct.value).abs();
        assert!(dev < c.tol(6), "dev {dev}");
    }
}
