//! Complex numbers over MPFR reals: `(re, im)` pairs at the context precision.

use super::Real;
use rug::ops::CompleteRound;
use rug::Float;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", self.re, self.im.clone().abs())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn from_polar(r: &Real, theta: &Real, prec: u32) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(prec));
        Complex::new((r * &c).complete(prec), (r * &s).complete(prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), (-&self.im).complete(self.prec()))
    }

    pub fn scale(&self, f: &Real) -> Self {
        let p = self.prec();
        Complex::new((&self.re * f).complete(p), (&self.im * f).complete(p))
    }

    pub fn mul_i(&self) -> Self {
        let p = self.prec();
        Complex::new((-&self.im).complete(p), self.re.clone())
    }

    pub fn norm_sqr(&self) -> Real {
        let p = self.prec();
        (&self.re * &self.re).complete(p) + (&self.im * &self.im).complete(p)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    /// Principal argument in (-π, π].  A zero imaginary part (either sign of
    /// zero) is treated as the upper boundary, so arg(-x) = +π for x > 0.
    pub fn arg(&self) -> Real {
        if self.im.is_zero() {
            let p = self.prec();
            return if self.re.is_sign_negative() && !self.re.is_zero() {
                Float::with_val(p, rug::float::Constant::Pi)
            } else {
                Float::new(p)
            };
        }
        self.im.clone().atan2(&self.re)
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let n = self.norm_sqr();
        let re = (&self.re / &n).complete(p);
        let im = -((&self.im / &n).complete(p));
        Complex::new(re, im)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let r = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Complex::new((&r * &c).complete(p), (&r * &s).complete(p))
    }

    /// Principal logarithm: Im ∈ (-π, π].
    pub fn ln(&self) -> Self {
        Complex::new(self.abs().ln(), self.arg())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return self.clone();
        }
        let r = self.abs();
        let half = Float::with_val(p, 0.5);
        let theta = self.arg() * &half;
        Complex::from_polar(&r.sqrt(), &theta, p)
    }

    /// Principal power z^w = exp(w Log z).
    pub fn pow(&self, w: &Complex) -> Self {
        (&self.ln() * w).exp()
    }

    /// Principal power with real exponent.
    pub fn pow_re(&self, e: &Real) -> Self {
        let p = self.prec();
        let r = self.abs();
        let lr = r.ln();
        let th = self.arg();
        let newr = (&lr * e).complete(p).exp();
        let newth = (&th * e).complete(p);
        Complex::from_polar(&newr, &newth, p)
    }

    /// Integer power by repeated squaring (exact branch: (z^2)^2..., no logs).
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n == 0 {
            return Complex::new(Float::with_val(p, 1), Float::new(p));
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Complex::new(Float::with_val(p, 1), Float::new(p));
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let (sx, cx) = self.re.clone().sin_cos(Float::new(p));
        let (shy, chy) = self.im.clone().sinh_cosh(Float::new(p));
        Complex::new((sx * chy).into(), (cx * shy).into())
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let (sx, cx) = self.re.clone().sin_cos(Float::new(p));
        let (shy, chy) = self.im.clone().sinh_cosh(Float::new(p));
        Complex::new((cx * chy).into(), (-(sx * shy)).into())
    }

    /// Round to a (usually narrower) precision.
    pub fn to_prec(&self, bits: u32) -> Self {
        Complex::new(
            Float::with_val(bits, &self.re),
            Float::with_val(bits, &self.im),
        )
    }
}

impl<'a, 'b> Add<&'b Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, rhs: &'b Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        Complex::new(
            (&self.re + &rhs.re).complete(p),
            (&self.im + &rhs.im).complete(p),
        )
    }
}

impl<'a, 'b> Sub<&'b Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, rhs: &'b Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        Complex::new(
            (&self.re - &rhs.re).complete(p),
            (&self.im - &rhs.im).complete(p),
        )
    }
}

impl<'a, 'b> Mul<&'b Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, rhs: &'b Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        let re = (&self.re * &rhs.re).complete(p) - (&self.im * &rhs.im).complete(p);
        let im = (&self.re * &rhs.im).complete(p) + (&self.im * &rhs.re).complete(p);
        Complex::new(re, im)
    }
}

impl<'a, 'b> Div<&'b Complex> for &'a Complex {
    type Output = Complex;
    fn div(self, rhs: &'b Complex) -> Complex {
        let p = self.prec().max(rhs.prec());
        let n = rhs.norm_sqr();
        let re = (&self.re * &rhs.re).complete(p) + (&self.im * &rhs.im).complete(p);
        let im = (&self.im * &rhs.re).complete(p) - (&self.re * &rhs.im).complete(p);
        Complex::new(re / &n, im / &n)
    }
}

impl<'a> Neg for &'a Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        let p = self.prec();
        Complex::new((-&self.re).complete(p), (-&self.im).complete(p))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $m(self, rhs: Complex) -> Complex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Complex> for Complex {
            type Output = Complex;
            fn $m(self, rhs: &'a Complex) -> Complex {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Complex> for &'a Complex {
            type Output = Complex;
            fn $m(self, rhs: Complex) -> Complex {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}
