//! Analytic continuation of `calF` and of the fundamental solution system of
//! the hypergeometric operator  P = D^s - t (D + a_1) ... (D + a_s),  D = t d/dt,
//! along explicit paths avoiding {0, 1}.
//!
//! In the basis u_k = D^k F (k = 0..s-1) the system reads
//!   u' = (N/t + R/(1-t)) u
//! with N the shift matrix and R the single-row matrix of elementary
//! symmetric functions of the parameters.  Continuation uses adaptive
//! power-series (Taylor) steps: at a regular point the local solution is
//! analytic up to the nearest singularity, the coefficients follow from a
//! two-term Cauchy-product recurrence, and each hop is kept well inside the
//! disk of convergence with local tolerance 10^(-P-5).

use super::series::{pfq_raw, pfq_series_derivative};
use super::{calF_series, EvalMethod, EvalResult, HGParams, HgError};
use crate::linalg::CMatrix;
use crate::numerics::{Complex, Ctx, Real};

#[derive(Clone, Debug)]
pub enum PathSeg {
    Line { from: Complex, to: Complex },
    /// Circular arc center + radius, traversed from `from_angle` to
    /// `to_angle` (radians; increasing = counterclockwise).
    Arc {
        center: Complex,
        radius: Real,
        from_angle: Real,
        to_angle: Real,
    },
}

#[derive(Clone, Debug)]
pub struct PathSpec {
    pub segs: Vec<PathSeg>,
    /// Minimum distance of the whole path to the singularities {0, 1}.
    pub clearance: Real,
}

fn dist_to_singularities(ctx: &Ctx, z: &Complex) -> Real {
    let d0 = z.abs();
    let d1 = (z - &ctx.one()).abs();
    d0.min(&d1)
}

impl PathSpec {
    pub fn polyline(ctx: &Ctx, points: &[Complex]) -> Result<Self, HgError> {
        if points.len() < 2 {
            return Err(HgError::InvalidInput("path needs at least two points".into()));
        }
        let segs: Vec<PathSeg> = points
            .windows(2)
            .map(|w| PathSeg::Line {
                from: w[0].clone(),
                to: w[1].clone(),
            })
            .collect();
        let spec = PathSpec {
            segs,
            clearance: ctx.re(0),
        };
        let clearance = spec.measure_clearance(ctx);
        if !clearance.is_sign_positive() || clearance.is_zero() {
            return Err(HgError::InvalidInput(
                "path touches a singularity of the equation".into(),
            ));
        }
        Ok(PathSpec { clearance, ..spec })
    }

    /// The canonical continuation path: start at t = 1/10 on the positive
    /// real axis and move along the axis toward the target, detouring around
    /// t = 1 by an upper-half-plane semicircle of radius 1/4 (and around
    /// t = 0 by one of radius 1/10 when the target is negative).  All table
    /// branch conventions are pinned to this path.
    pub fn canonical(ctx: &Ctx, t_end: &Complex) -> Result<Self, HgError> {
        let start = ctx.cx(0.1, 0);
        if t_end.im.is_zero() {
            let x = t_end.re.clone();
            if x.is_zero() {
                return Err(HgError::InvalidInput("canonical path cannot end at 0".into()));
            }
            if x.is_sign_negative() {
                // 0.1 -> upper arc over 0 -> -0.1 -> t_end
                let segs = vec![
                    PathSeg::Arc {
                        center: ctx.zero(),
                        radius: ctx.re(0.1),
                        from_angle: ctx.re(0),
                        to_angle: ctx.pi(),
                    },
                    PathSeg::Line {
                        from: ctx.cx(-0.1, 0),
                        to: t_end.clone(),
                    },
                ];
                let spec = PathSpec {
                    segs,
                    clearance: ctx.re(0),
                };
                let clearance = spec.measure_clearance(ctx);
                return Ok(PathSpec { clearance, ..spec });
            }
            let near_one = ((x.clone() - ctx.re(1)).abs()) < ctx.re(0.05);
            if near_one {
                return Err(HgError::InvalidInput(
                    "canonical path target too close to t = 1".into(),
                ));
            }
            if x < ctx.re(1) {
                let spec = PathSpec {
                    segs: vec![PathSeg::Line {
                        from: start,
                        to: t_end.clone(),
                    }],
                    clearance: ctx.re(0),
                };
                let clearance = spec.measure_clearance(ctx);
                return Ok(PathSpec { clearance, ..spec });
            }
            // x > 1: 0.1 -> 0.75 -> semicircle over 1 -> 1.25 -> x
            let mut segs = vec![PathSeg::Line {
                from: start,
                to: ctx.cx(0.75, 0),
            }];
            segs.push(PathSeg::Arc {
                center: ctx.one(),
                radius: ctx.re(0.25),
                from_angle: ctx.pi(),
                to_angle: ctx.re(0),
            });
            segs.push(PathSeg::Line {
                from: ctx.cx(1.25, 0),
                to: t_end.clone(),
            });
            let spec = PathSpec {
                segs,
                clearance: ctx.re(0),
            };
            let clearance = spec.measure_clearance(ctx);
            return Ok(PathSpec { clearance, ..spec });
        }
        // complex target: straight if sufficiently clear, otherwise refuse
        let spec = PathSpec {
            segs: vec![PathSeg::Line {
                from: start,
                to: t_end.clone(),
            }],
            clearance: ctx.re(0),
        };
        let clearance = spec.measure_clearance(ctx);
        if clearance < ctx.re(0.05) {
            return Err(HgError::InvalidInput(
                "straight canonical path passes too near {0,1}; supply waypoints".into(),
            ));
        }
        Ok(PathSpec { clearance, ..spec })
    }

    /// Closed loop around `center_on` (0 or 1) based at `alpha`: radial
    /// approach, full counterclockwise circle, radial return.
    pub fn loop_around(ctx: &Ctx, center: &Complex, radius: &Real, alpha: &Complex) -> Self {
        let dir = alpha - center;
        let entry_angle = dir.arg();
        let entry = center + &Complex::from_polar(radius, &entry_angle, ctx.bits());
        let two_pi = ctx.pi() * 2u32;
        let segs = vec![
            PathSeg::Line {
                from: alpha.clone(),
                to: entry.clone(),
            },
            PathSeg::Arc {
                center: center.clone(),
                radius: radius.clone(),
                from_angle: entry_angle.clone(),
                to_angle: entry_angle + two_pi,
            },
            PathSeg::Line {
                from: entry,
                to: alpha.clone(),
            },
        ];
        let spec = PathSpec {
            segs,
            clearance: ctx.re(0),
        };
        let clearance = spec.measure_clearance(ctx);
        PathSpec { clearance, ..spec }
    }

    pub fn start(&self) -> Complex {
        match &self.segs[0] {
            PathSeg::Line { from, .. } => from.clone(),
            PathSeg::Arc {
                center,
                radius,
                from_angle,
                ..
            } => center + &Complex::from_polar(radius, from_angle, center.prec()),
        }
    }

    pub fn end(&self) -> Complex {
        match self.segs.last().unwrap() {
            PathSeg::Line { to, .. } => to.clone(),
            PathSeg::Arc {
                center,
                radius,
                to_angle,
                ..
            } => center + &Complex::from_polar(radius, to_angle, center.prec()),
        }
    }

    /// Minimum distance of the sampled path to {0, 1}.
    pub fn measure_clearance(&self, ctx: &Ctx) -> Real {
        let pts = self.densify(ctx);
        let mut best: Option<Real> = None;
        for p in &pts {
            let d = dist_to_singularities(ctx, p);
            best = Some(match best {
                None => d,
                Some(b) => b.min(&d),
            });
        }
        best.unwrap_or_else(|| ctx.re(0))
    }

    /// Sample the path into waypoints spaced conservatively within the local
    /// analyticity disk, so consecutive points are valid Taylor hops.
    pub fn densify(&self, ctx: &Ctx) -> Vec<Complex> {
        let mut pts: Vec<Complex> = Vec::new();
        let fraction = ctx.re(0.30);
        for seg in &self.segs {
            match seg {
                PathSeg::Line { from, to } => {
                    if pts.is_empty() {
                        pts.push(from.clone());
                    }
                    let mut cur = from.clone();
                    loop {
                        let remaining = to - &cur;
                        let dist = remaining.abs();
                        if dist.is_zero() {
                            break;
                        }
                        let room = dist_to_singularities(ctx, &cur) * &fraction;
                        if room >= dist {
                            pts.push(to.clone());
                            break;
                        }
                        let step = &remaining.scale(&(room / &dist));
                        cur = &cur + step;
                        pts.push(cur.clone());
                    }
                }
                PathSeg::Arc {
                    center,
                    radius,
                    from_angle,
                    to_angle,
                } => {
                    let sweep = (to_angle.clone() - from_angle).abs();
                    let steps = {
                        let s = (sweep.clone() / ctx.re(0.2)).ceil();
                        s.to_f64() as usize + 1
                    };
                    for k in 0..=steps {
                        let theta = from_angle.clone()
                            + (to_angle.clone() - from_angle) * ctx.re_i64(k as i64)
                                / ctx.re_i64(steps as i64);
                        let p = center + &Complex::from_polar(radius, &theta, ctx.bits());
                        if pts.is_empty() || (&p - pts.last().unwrap()).abs() > ctx.tol(2) {
                            pts.push(p);
                        }
                    }
                }
            }
        }
        pts
    }
}

/// Sparse system matrices for u' = (N/t + R/(1-t)) u of order `s`, with an
/// optional extra row integrating v' = u_0 / t (for the calF antiderivative).
struct OdeSystem {
    dim: usize,
    s: usize,
    /// elementary symmetric functions e_{s-j}(a) indexed by column j = 0..s-1
    last_row: Vec<Real>,
    with_integral: bool,
}

impl OdeSystem {
    fn new(ctx: &Ctx, params: &HGParams, with_integral: bool) -> Self {
        let a = params.as_reals(ctx);
        let s = a.len();
        // elementary symmetric polynomials e_0..e_s of the parameters
        let mut e = vec![ctx.re(0); s + 1];
        e[0] = ctx.re(1);
        for ai in &a {
            for j in (1..=s).rev() {
                let add = e[j - 1].clone() * ai;
                e[j] += add;
            }
        }
        // row entries: coefficient of u_j is e_{s-j}(a)
        let last_row: Vec<Real> = (0..s).map(|j| e[s - j].clone()).collect();
        OdeSystem {
            dim: s + usize::from(with_integral),
            s,
            last_row,
            with_integral,
        }
    }

    /// y <- N x (shift rows up; plus integral row picking x_0)
    fn apply_pole0(&self, ctx: &Ctx, x: &[Complex]) -> Vec<Complex> {
        let mut y = vec![ctx.zero(); self.dim];
        for i in 0..self.s.saturating_sub(1) {
            y[i] = x[i + 1].clone();
        }
        if self.with_integral {
            y[self.dim - 1] = x[0].clone();
        }
        y
    }

    /// y <- R x (only the last u-row is nonzero)
    fn apply_pole1(&self, ctx: &Ctx, x: &[Complex]) -> Vec<Complex> {
        let mut y = vec![ctx.zero(); self.dim];
        let mut acc = ctx.zero();
        for j in 0..self.s {
            acc = &acc + &x[j].scale(&self.last_row[j]);
        }
        y[self.s - 1] = acc;
        y
    }
}

/// One Taylor hop: develop the solution at `c` and evaluate at `c + h`.
/// `cols` holds the state column-major (each entry a dim-vector).
/// Returns the advanced columns and a local error estimate.
fn taylor_hop(
    ctx: &Ctx,
    sys: &OdeSystem,
    c: &Complex,
    h: &Complex,
    cols: &[Vec<Complex>],
    tol: &Real,
) -> Result<(Vec<Vec<Complex>>, Real), HgError> {
    let dim = sys.dim;
    let ncols = cols.len();
    let rho = dist_to_singularities(ctx, c);
    let hmag = h.abs();
    if hmag >= rho {
        return Err(HgError::StepUnderflow(format!("hop {hmag} >= disk {rho}")));
    }
    // geometric prefactors p_k = (-1)^k / c^{k+1}, q_k = 1/(1-c)^{k+1}
    let inv0 = c.recip();
    let inv1 = (&ctx.one() - c).recip();
    let max_order = 40 * ctx.digits() as usize + 600;

    // Taylor coefficients T_m for each column, flattened
    let mut coeffs: Vec<Vec<Vec<Complex>>> = vec![cols.to_vec()]; // T_0 = state
    let mut value: Vec<Vec<Complex>> = cols.to_vec();
    let mut hpow = h.clone();

    // running p/q prefactor stacks
    let mut p_list: Vec<Complex> = vec![inv0.clone()];
    let mut q_list: Vec<Complex> = vec![inv1.clone()];

    let ratio = hmag.clone() / &rho;
    let geom = ctx.re(1) / (ctx.re(1) - &ratio);
    let mut settled = 0usize;
    for m in 0..max_order {
        // T_{m+1} = 1/(m+1) Σ_{k=0}^m [ p_k N + q_k R ] T_{m-k}
        let mut nsum: Vec<Vec<Complex>> = vec![vec![ctx.zero(); dim]; ncols];
        let mut rsum: Vec<Vec<Complex>> = vec![vec![ctx.zero(); dim]; ncols];
        for k in 0..=m {
            let p_k = &p_list[k];
            let q_k = &q_list[k];
            for (ci, col) in coeffs[m - k].iter().enumerate() {
                for i in 0..dim {
                    if !col[i].is_zero() {
                        nsum[ci][i] = &nsum[ci][i] + &(&col[i] * p_k);
                        rsum[ci][i] = &rsum[ci][i] + &(&col[i] * q_k);
                    }
                }
            }
        }
        let inv_m1 = ctx.re(1) / ctx.re_i64(m as i64 + 1);
        let mut t_next: Vec<Vec<Complex>> = Vec::with_capacity(ncols);
        for ci in 0..ncols {
            let a = sys.apply_pole0(ctx, &nsum[ci]);
            let b = sys.apply_pole1(ctx, &rsum[ci]);
            let mut v = vec![ctx.zero(); dim];
            for i in 0..dim {
                v[i] = (&a[i] + &b[i]).scale(&inv_m1);
            }
            t_next.push(v);
        }
        // accumulate value += T_{m+1} h^{m+1}
        let mut contrib_mag = ctx.re(0);
        for ci in 0..ncols {
            for i in 0..dim {
                let add = &t_next[ci][i] * &hpow;
                value[ci][i] = &value[ci][i] + &add;
                let am = add.abs();
                contrib_mag = contrib_mag.max(&am);
            }
        }
        // a tail bound: remaining terms are ≲ |T h^m| ratio/(1-ratio) once the
        // coefficients settle into the geometric regime
        let bound = contrib_mag.clone() * &ratio * &geom;
        if bound < *tol {
            settled += 1;
            if settled >= 3 {
                // advance prefactor stacks not needed further
                return Ok((value, bound));
            }
        } else {
            settled = 0;
        }
        coeffs.push(t_next);
        hpow = &hpow * h;
        p_list.push(-(&p_list[k_last(&p_list)] * &inv0));
        q_list.push(&q_list[k_last(&q_list)] * &inv1);
    }
    Err(HgError::ToleranceNotMet)
}

fn k_last<T>(v: &[T]) -> usize {
    v.len() - 1
}

/// Transport state columns along the densified path.
fn transport(
    ctx: &Ctx,
    sys: &OdeSystem,
    path_points: &[Complex],
    mut cols: Vec<Vec<Complex>>,
    tol: &Real,
) -> Result<(Vec<Vec<Complex>>, Real), HgError> {
    let mut acc_err = ctx.re(0);
    for w in path_points.windows(2) {
        let c = &w[0];
        let target = &w[1];
        let mut sub: Vec<Complex> = vec![target.clone()];
        // halve hops until each fits the stepper; the densifier already keeps
        // hops inside 0.3 of the local disk so this rarely loops
        let mut guard = 0;
        loop {
            let mut ok = true;
            let mut cur = c.clone();
            let mut new_cols = cols.clone();
            let mut local_err = ctx.re(0);
            for pt in &sub {
                let h = pt - &cur;
                match taylor_hop(ctx, sys, &cur, &h, &new_cols, tol) {
                    Ok((nc, e)) => {
                        new_cols = nc;
                        local_err += e;
                        cur = pt.clone();
                    }
                    Err(HgError::ToleranceNotMet) | Err(HgError::StepUnderflow(_)) => {
                        ok = false;
                        break;
                    }
                    Err(other) => return Err(other),
                }
            }
            if ok {
                cols = new_cols;
                acc_err += local_err;
                break;
            }
            guard += 1;
            if guard > 24 {
                return Err(HgError::StepUnderflow(format!("near {c}")));
            }
            // refine subdivision
            let mut refined = Vec::with_capacity(sub.len() * 2);
            let mut prev = c.clone();
            for pt in &sub {
                let mid = (&prev + pt).scale(&ctx.rat(1, 2));
                refined.push(mid);
                refined.push(pt.clone());
                prev = pt.clone();
            }
            sub = refined;
        }
    }
    Ok((cols, acc_err))
}

/// Initial data u_k(t0) = D^k F(t0) from the defining series.
fn initial_u(ctx: &Ctx, params: &HGParams, t0: &Complex) -> Result<Vec<Complex>, HgError> {
    let a = params.as_reals(ctx);
    let s = a.len();
    let lower: Vec<Real> = vec![ctx.re(1); s - 1];
    let mut u = Vec::with_capacity(s);
    // D^k F = Σ n^k c_n t^n; build from t-derivatives via the identity
    // D = t d/dt applied repeatedly: D^k F = Σ_{j<=k} S(k,j) t^j F^{(j)}.
    // Small k only, so use Stirling numbers of the second kind directly.
    let mut stirling = vec![vec![0i64; s + 1]; s + 1];
    stirling[0][0] = 1;
    for n in 1..=s {
        for k in 1..=n {
            stirling[n][k] = stirling[n - 1][k - 1] + (k as i64) * stirling[n - 1][k];
        }
    }
    let mut derivs: Vec<Complex> = Vec::with_capacity(s);
    derivs.push(pfq_raw(ctx, &a, &lower, t0)?.0);
    for j in 1..s {
        derivs.push(pfq_series_derivative(ctx, &a, &lower, t0, j as u32)?);
    }
    for k in 0..s {
        let mut acc = ctx.zero();
        let mut tpow = ctx.one();
        for j in 0..=k {
            if j > 0 {
                tpow = &tpow * t0;
            }
            if stirling[k][j] != 0 {
                acc = &acc + &(&derivs[j] * &tpow).scale(&ctx.re_i64(stirling[k][j]));
            }
        }
        u.push(acc);
    }
    Ok(u)
}

/// Continue `calF` from t0 = min(0.1, |t_end|/2) along `path` to its end.
/// The path must start on (0, 0.3] on the positive real axis.
pub fn calF_ode(
    ctx: &Ctx,
    params: &HGParams,
    t_end: &Complex,
    path: &PathSpec,
) -> Result<EvalResult, HgError> {
    let start = path.start();
    if !start.im.is_zero() || !start.re.is_sign_positive() || start.re > ctx.re(0.3) {
        return Err(HgError::InvalidInput(
            "ODE path must start on (0, 0.3] of the real axis".into(),
        ));
    }
    let endpoint = path.end();
    if (&endpoint - t_end).abs() > ctx.tol(4) {
        return Err(HgError::InvalidInput("path does not end at t_end".into()));
    }
    if !path.clearance.is_sign_positive() || path.clearance.is_zero() {
        return Err(HgError::StepUnderflow("zero clearance".into()));
    }
    let wctx = ctx.widened(10);
    let sys = OdeSystem::new(&wctx, params, true);
    let t0 = start.to_prec(wctx.bits());
    let mut state = initial_u(&wctx, params, &t0)?;
    let f0 = calF_series(&wctx, params, &t0)?;
    state.push(f0.value.clone());
    let tol = wctx.pow10(-(ctx.digits() as i64) - 5);
    let pts: Vec<Complex> = path
        .densify(ctx)
        .into_iter()
        .map(|p| p.to_prec(wctx.bits()))
        .collect();
    let (cols, err) = transport(&wctx, &sys, &pts, vec![state], &tol)?;
    let value = cols[0][sys.dim - 1].clone();
    Ok(EvalResult::new(
        value.to_prec(ctx.bits()),
        err + f0.error_estimate,
        EvalMethod::Ode,
        "Taylor continuation along declared path",
    ))
}

/// Fundamental-solution transport matrix in the basis (F, DF, ..., D^{s-1}F):
/// columns of the result are the path-transports of the basis vectors, so for
/// a closed loop this is the monodromy matrix at the basepoint.
pub fn hg_transport(
    ctx: &Ctx,
    params: &HGParams,
    path: &PathSpec,
) -> Result<CMatrix, HgError> {
    if !path.clearance.is_sign_positive() || path.clearance.is_zero() {
        return Err(HgError::StepUnderflow("zero clearance".into()));
    }
    let wctx = ctx.widened(10);
    let sys = OdeSystem::new(&wctx, params, false);
    let s = sys.dim;
    let cols: Vec<Vec<Complex>> = (0..s)
        .map(|j| {
            let mut v = vec![wctx.zero(); s];
            v[j] = wctx.one();
            v
        })
        .collect();
    let tol = wctx.pow10(-(ctx.digits() as i64) - 5);
    let pts: Vec<Complex> = path
        .densify(ctx)
        .into_iter()
        .map(|p| p.to_prec(wctx.bits()))
        .collect();
    let (out, _err) = transport(&wctx, &sys, &pts, cols, &tol)?;
    let mut m = CMatrix::zero(ctx, s);
    for (j, col) in out.iter().enumerate() {
        for i in 0..s {
            *m.at_mut(i, j) = col[i].to_prec(ctx.bits());
        }
    }
    Ok(m)
}
