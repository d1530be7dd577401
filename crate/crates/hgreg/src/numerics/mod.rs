//! Configurable-precision real/complex arithmetic.
//!
//! A [`Ctx`] fixes the working precision `P` in decimal digits.  Every value
//! produced through a context carries enough binary precision that a single
//! arithmetic operation has relative error below `10^(1-P)`.  Contexts are
//! immutable and cheap to clone; concurrent evaluations may share one freely.

mod complex;
pub mod special;

pub use complex::Complex;
pub use special::{digamma, gamma, ln_gamma, pochhammer, upper_incomplete_gamma};

use rug::float::Constant;
use rug::ops::Pow;
use std::cmp::Ordering;

pub type Real = rug::Float;

/// Guard bits added on top of the requested decimal precision.
const GUARD_BITS: u32 = 24;

#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    #[error("gamma/digamma pole at non-positive integer {0}")]
    Pole(String),
    #[error("continued fraction for incomplete gamma did not converge (s={0}, x={1})")]
    IncompleteGammaDiverged(String, String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Precision context: `digits` is the decimal working precision `P`.
#[derive(Clone, Debug)]
pub struct Ctx {
    digits: u32,
    bits: u32,
}

impl Ctx {
    pub fn new(digits: u32) -> Self {
        assert!(digits >= 8, "precision below 8 digits is not supported");
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
        Ctx { digits, bits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// A context with `extra` more decimal digits, for internal steps that
    /// must absorb cancellation.
    pub fn widened(&self, extra: u32) -> Ctx {
        Ctx::new(self.digits + extra)
    }

    pub fn re<T>(&self, v: T) -> Real
    where
        Real: rug::Assign<T>,
    {
        Real::with_val(self.bits, v)
    }

    pub fn re_i64(&self, v: i64) -> Real {
        Real::with_val(self.bits, v)
    }

    /// Parse a decimal or rational literal ("2", "-0.5", "1/3").
    pub fn re_str(&self, s: &str) -> Real {
        if let Some((p, q)) = s.split_once('/') {
            let p = Real::with_val(self.bits, Real::parse(p.trim()).expect("bad numerator"));
            let q = Real::with_val(self.bits, Real::parse(q.trim()).expect("bad denominator"));
            p / q
        } else {
            Real::with_val(self.bits, Real::parse(s.trim()).expect("bad literal"))
        }
    }

    pub fn rat(&self, num: i64, den: i64) -> Real {
        assert!(den != 0);
        self.re_i64(num) / self.re_i64(den)
    }

    pub fn cx<A, B>(&self, re: A, im: B) -> Complex
    where
        Real: rug::Assign<A> + rug::Assign<B>,
    {
        Complex::new(self.re(re), self.re(im))
    }

    pub fn cx_re(&self, re: Real) -> Complex {
        Complex::new(re, self.re(0))
    }

    pub fn zero(&self) -> Complex {
        self.cx(0, 0)
    }

    pub fn one(&self) -> Complex {
        self.cx(1, 0)
    }

    pub fn i(&self) -> Complex {
        self.cx(0, 1)
    }

    pub fn pi(&self) -> Real {
        Real::with_val(self.bits, Constant::Pi)
    }

    /// Euler's constant γ = -Γ'(1).
    pub fn euler(&self) -> Real {
        Real::with_val(self.bits, Constant::Euler)
    }

    pub fn ln2(&self) -> Real {
        Real::with_val(self.bits, Constant::Log2)
    }

    pub fn two_pi_i(&self) -> Complex {
        let two_pi = self.pi() * 2u32;
        Complex::new(self.re(0), two_pi)
    }

    /// `10^e` as a positive real, for tolerances like `10^(10-P)`.
    pub fn pow10(&self, e: i64) -> Real {
        let ten = self.re(10);
        ten.pow(self.re_i64(e))
    }

    /// The standard tolerance `10^(offset - P)`.
    pub fn tol(&self, offset: i64) -> Real {
        self.pow10(offset - self.digits as i64)
    }

    /// e^{2πik/n}, k = 0..n-1.
    pub fn roots_of_unity(&self, n: u32) -> Vec<Complex> {
        assert!(n >= 1);
        let two_pi = self.pi() * 2u32;
        (0..n)
            .map(|k| {
                let theta = two_pi.clone() * k / n;
                Complex::from_polar(&self.re(1), &theta, self.bits)
            })
            .collect()
    }

    /// Primitive root e^{2πi m/n}.
    pub fn root_of_unity(&self, m: i64, n: u32) -> Complex {
        let theta = self.pi() * 2u32 * m / (n as i64);
        Complex::from_polar(&self.re(1), &theta, self.bits)
    }
}

/// Total-order comparison used for pivot selection (NaN-free inputs assumed).
pub fn real_cmp(a: &Real, b: &Real) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Deterministic pairwise summation; the result depends only on the order of
/// `values`, so parallel producers can fill the vector by index first.
pub fn pairwise_sum(ctx: &Ctx, values: &[Complex]) -> Complex {
    match values.len() {
        0 => ctx.zero(),
        1 => values[0].clone(),
        n => {
            let mid = n / 2;
            let left = pairwise_sum(ctx, &values[..mid]);
            let right = pairwise_sum(ctx, &values[mid..]);
            &left + &right
        }
    }
}
