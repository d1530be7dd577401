//! Generalized hypergeometric series, the regulator function `calF`, its
//! connection formula at large argument, and ODE-based analytic continuation.

mod connection;
mod monodromy;
mod ode;
mod series;

pub use connection::{calF_connection, connection_decomposition, ConnectionDecomposition};
pub use monodromy::{monodromy_report, LoopId, MonodromyMatrix, MonodromyReport};
pub use ode::{calF_ode, hg_transport, PathSeg, PathSpec};
pub use series::{calF_series, pfq_at_unit, pfq_series, pfq_series_derivative};

use crate::numerics::{Complex, Ctx, NumericsError, Real};
use num::rational::Rational64;
use num::{Signed, Zero};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum HgError {
    #[error("series diverges for |t| > 1")]
    Divergence,
    #[error("series at |t| = 1 cannot reach tolerance within the term cap: {0}")]
    SlowConvergence(String),
    #[error("parameter is a non-positive integer: {0}")]
    BadParameter(String),
    #[error("connection formula requires Re(sum a_i) < s")]
    ConnectionHypothesis,
    #[error("epsilon extrapolation failed: evaluations disagree by {0}")]
    DegenerateExtrapolation(String),
    #[error("branch mismatch against ODE cross-check: {0}")]
    BranchMismatch(String),
    #[error("ODE step size underflow near clearance violation at {0}")]
    StepUnderflow(String),
    #[error("ODE local tolerance could not be met")]
    ToleranceNotMet,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Hypergeometric parameter tuple (a_1, ..., a_s), exact rationals.
///
/// In the geometric case the parameters come from a scheme as
/// a_k = 1 - i_k/n_k with 0 < i_k < n_k, recorded as provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct HGParams {
    a: Vec<Rational64>,
    provenance: Option<Vec<(u32, u32)>>, // (n_k, i_k)
}

impl HGParams {
    pub fn from_rationals(a: Vec<Rational64>) -> Result<Self, HgError> {
        for q in &a {
            if q.is_integer() && !q.numer().is_positive() {
                return Err(HgError::BadParameter(q.to_string()));
            }
        }
        Ok(HGParams {
            a,
            provenance: None,
        })
    }

    /// Parameters a_k = 1 - i_k/n_k of the eigencomponent (i_0, ..., i_d).
    pub fn from_scheme(n: &[u32], i: &[u32]) -> Result<Self, HgError> {
        if n.len() != i.len() {
            return Err(HgError::InvalidInput(
                "index and exponent lists differ in length".into(),
            ));
        }
        let mut a = Vec::with_capacity(n.len());
        for (&nk, &ik) in n.iter().zip(i) {
            if ik == 0 || ik >= nk {
                return Err(HgError::InvalidInput(format!(
                    "need 0 < i < n, got i={ik}, n={nk}"
                )));
            }
            a.push(Rational64::new(1, 1) - Rational64::new(ik as i64, nk as i64));
        }
        Ok(HGParams {
            a,
            provenance: Some(n.iter().copied().zip(i.iter().copied()).collect()),
        })
    }

    /// Parse "1/2,1/2,1/2" style parameter lists.
    pub fn parse(list: &str) -> Result<Self, HgError> {
        let mut a = Vec::new();
        for part in list.split(',') {
            let part = part.trim();
            let q = if let Some((p, q)) = part.split_once('/') {
                let num: i64 = p
                    .trim()
                    .parse()
                    .map_err(|_| HgError::InvalidInput(format!("bad rational {part}")))?;
                let den: i64 = q
                    .trim()
                    .parse()
                    .map_err(|_| HgError::InvalidInput(format!("bad rational {part}")))?;
                Rational64::new(num, den)
            } else {
                let num: i64 = part
                    .parse()
                    .map_err(|_| HgError::InvalidInput(format!("bad rational {part}")))?;
                Rational64::from_integer(num)
            };
            a.push(q);
        }
        Self::from_rationals(a)
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    pub fn rationals(&self) -> &[Rational64] {
        &self.a
    }

    pub fn provenance(&self) -> Option<&[(u32, u32)]> {
        self.provenance.as_deref()
    }

    pub fn as_reals(&self, ctx: &Ctx) -> Vec<Real> {
        self.a
            .iter()
            .map(|q| ctx.rat(*q.numer(), *q.denom()))
            .collect()
    }

    /// True when some a_i - a_j is an integer (the case needing the ε-limit).
    pub fn is_degenerate(&self) -> bool {
        for i in 0..self.a.len() {
            for j in 0..i {
                if (self.a[i] - self.a[j]).is_integer() {
                    return true;
                }
            }
        }
        false
    }

    /// Sum of the parameters, exact.
    pub fn sum(&self) -> Rational64 {
        self.a.iter().fold(Rational64::zero(), |acc, q| acc + q)
    }

    pub fn describe(&self) -> String {
        self.a
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMethod {
    Series,
    Connection,
    Ode,
}

/// Result of a function evaluation with an a-posteriori error estimate and a
/// record of the branch conventions used.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Complex,
    pub error_estimate: Real,
    pub method: EvalMethod,
    pub branch_note: String,
}

impl EvalResult {
    pub fn new(value: Complex, error_estimate: Real, method: EvalMethod, note: &str) -> Self {
        EvalResult {
            value,
            error_estimate,
            method,
            branch_note: note.to_string(),
        }
    }
}

/// Evaluate `calF` by the method suited to the argument: series inside
/// |t| < 0.95, connection formula outside.
pub fn calF_auto(ctx: &Ctx, params: &HGParams, t: &Complex) -> Result<EvalResult, HgError> {
    let mag = t.abs();
    if mag < ctx.re(0.95) {
        calF_series(ctx, params, t)
    } else {
        calF_connection(ctx, params, t)
    }
}
