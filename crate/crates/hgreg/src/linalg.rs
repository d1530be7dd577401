//! Dense complex matrices of small dimension (the ODE systems here have
//! order at most 5): products, inverses, Frobenius norms, eigenvalues via the
//! characteristic polynomial, and numeric rank via singular values.

use crate::numerics::{real_cmp, Complex, Ctx, Real};
use rug::ops::Pow;

#[derive(Clone, Debug)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex>, // row-major
}

impl CMatrix {
    pub fn zero(ctx: &Ctx, n: usize) -> Self {
        CMatrix {
            n,
            data: vec![ctx.zero(); n * n],
        }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Self {
        let mut m = Self::zero(ctx, n);
        for i in 0..n {
            m.data[i * n + i] = ctx.one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex {
        &mut self.data[i * self.n + j]
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let ctx_zero = self.data[0].scale(&Real::with_val(self.data[0].prec(), 0));
        let mut out = CMatrix {
            n,
            data: vec![ctx_zero; n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.at(i, 0) * rhs.at(0, j);
                for k in 1..n {
                    acc = &acc + &(self.at(i, k) * rhs.at(k, j));
                }
                out.data[i * n + j] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = self.at(i, 0) * &v[0];
                for k in 1..n {
                    acc = &acc + &(self.at(i, k) * &v[k]);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = &*a + b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = &*a - b;
        }
        out
    }

    pub fn scale(&self, f: &Complex) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = &*a * f;
        }
        out
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.at(j, i).conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex {
        let mut acc = self.at(0, 0).clone();
        for i in 1..self.n {
            acc = &acc + self.at(i, i);
        }
        acc
    }

    pub fn frobenius_norm(&self, ctx: &Ctx) -> Real {
        let mut acc = ctx.re(0);
        for z in &self.data {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    /// Gauss–Jordan inverse with partial pivoting; None if numerically singular.
    pub fn inverse(&self, ctx: &Ctx) -> Option<CMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(ctx, n);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a.at(col, col).abs();
            for r in (col + 1)..n {
                let mag = a.at(r, col).abs();
                if real_cmp(&mag, &best) == std::cmp::Ordering::Greater {
                    best = mag;
                    pivot = r;
                }
            }
            if best.is_zero() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a.at(col, col).clone();
            for j in 0..n {
                *a.at_mut(col, j) = &*a.at(col, j) / &d;
                *inv.at_mut(col, j) = &*inv.at(col, j) / &d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.at(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let sub_a = &f * a.at(col, j);
                    *a.at_mut(r, j) = &*a.at(r, j) - &sub_a;
                    let sub_i = &f * inv.at(col, j);
                    *inv.at_mut(r, j) = &*inv.at(r, j) - &sub_i;
                }
            }
        }
        Some(inv)
    }

    pub fn determinant(&self, ctx: &Ctx) -> Complex {
        let n = self.n;
        let mut a = self.clone();
        let mut det = ctx.one();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a.at(col, col).abs();
            for r in (col + 1)..n {
                let mag = a.at(r, col).abs();
                if real_cmp(&mag, &best) == std::cmp::Ordering::Greater {
                    best = mag;
                    pivot = r;
                }
            }
            if best.is_zero() {
                return ctx.zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let d = a.at(col, col).clone();
            det = &det * &d;
            for r in (col + 1)..n {
                let f = a.at(r, col) / &d;
                for j in col..n {
                    let sub = &f * a.at(col, j);
                    *a.at_mut(r, j) = &*a.at(r, j) - &sub;
                }
            }
        }
        det
    }

    /// Matrix power with nonnegative exponent.
    pub fn powi(&self, ctx: &Ctx, e: u32) -> CMatrix {
        let mut acc = CMatrix::identity(ctx, self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Characteristic polynomial coefficients [1, c1, ..., cn] of
    /// det(λI - A) = λ^n + c1 λ^{n-1} + ... + cn (Faddeev–LeVerrier).
    pub fn char_poly(&self, ctx: &Ctx) -> Vec<Complex> {
        let n = self.n;
        let mut coeffs = vec![ctx.one()];
        let mut m = self.clone();
        for k in 1..=n {
            let c = {
                let t = m.trace();
                let kinv = ctx.re(1) / ctx.re_i64(k as i64);
                (-&t).scale(&kinv)
            };
            coeffs.push(c.clone());
            if k < n {
                // M_{k+1} = A (M_k + c_k I)
                let mut shifted = m.clone();
                for i in 0..n {
                    *shifted.at_mut(i, i) = &*shifted.at(i, i) + &c;
                }
                m = self.mul(&shifted);
            }
        }
        coeffs
    }

    /// Eigenvalues via the characteristic polynomial and Aberth iteration.
    pub fn eigenvalues(&self, ctx: &Ctx) -> Vec<Complex> {
        let poly = self.char_poly(ctx);
        polynomial_roots(ctx, &poly)
    }

    /// Singular values (descending), computed as sqrt of eigenvalues of AᴴA.
    pub fn singular_values(&self, ctx: &Ctx) -> Vec<Real> {
        let h = self.conj_transpose().mul(self);
        let eig = h.eigenvalues(ctx);
        let mut vals: Vec<Real> = eig
            .iter()
            .map(|l| {
                let re = l.re.clone();
                if re.is_sign_negative() {
                    ctx.re(0)
                } else {
                    re.sqrt()
                }
            })
            .collect();
        vals.sort_by(|a, b| real_cmp(b, a));
        vals
    }

    /// Numeric rank at a relative tolerance on singular values.
    pub fn numeric_rank(&self, ctx: &Ctx, tol: &Real) -> usize {
        let sv = self.singular_values(ctx);
        if sv.is_empty() {
            return 0;
        }
        let top = sv[0].clone().max(&ctx.re(1));
        sv.iter().filter(|s| (*s).clone() / &top > *tol).count()
    }
}

/// Aberth–Ehrlich root finder for a monic polynomial given by coefficients
/// [1, c1, ..., cn] (leading first).  Degrees here are tiny (≤ 5).
pub fn polynomial_roots(ctx: &Ctx, coeffs: &[Complex]) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    let eval = |z: &Complex| -> (Complex, Complex) {
        // Horner for p and p'
        let mut p = coeffs[0].clone();
        let mut dp = ctx.zero();
        for c in &coeffs[1..] {
            dp = &(&dp * z) + &p;
            p = &(&p * z) + c;
        }
        (p, dp)
    };
    // initial guesses on a circle with a deterministic irrational twist
    let radius = {
        let mut r = ctx.re(0);
        for (k, c) in coeffs[1..].iter().enumerate() {
            let mag = c.abs();
            if mag.is_zero() {
                continue;
            }
            let root = mag.pow(&ctx.re(1.0 / (k as f64 + 1.0)));
            r = r.max(&root);
        }
        r + ctx.re(1)
    };
    let mut roots: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = ctx.pi() * (2 * k as i64 + 1) / (n as i64) + ctx.re(0.3964);
            Complex::from_polar(&radius, &theta, ctx.bits())
        })
        .collect();
    let eps = ctx.tol(-6);
    for _iter in 0..500 {
        let mut max_step = ctx.re(0);
        let snapshot = roots.clone();
        for i in 0..n {
            let (p, dp) = eval(&snapshot[i]);
            if p.is_zero() {
                continue;
            }
            let newton = if dp.is_zero() { p.clone() } else { &p / &dp };
            let mut repulse = ctx.zero();
            for (j, other) in snapshot.iter().enumerate() {
                if j == i {
                    continue;
                }
                let diff = &snapshot[i] - other;
                if diff.is_zero() {
                    continue;
                }
                repulse = &repulse + &diff.recip();
            }
            let denom = &ctx.one() - &(&newton * &repulse);
            let step = if denom.is_zero() {
                newton.clone()
            } else {
                &newton / &denom
            };
            roots[i] = &roots[i] - &step;
            let s = step.abs();
            max_step = max_step.max(&s);
        }
        if max_step < eps {
            break;
        }
    }
    roots
}
