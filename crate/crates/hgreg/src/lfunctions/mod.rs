//! L-functions of the motives paired with the regulators: elliptic curves of
//! the quartic family (weight 2, by point counting) and the weight-3
//! eta-product newforms, with `L'(·,0)` via the completed function Λ(0).

pub mod afe;
pub mod eta;
pub mod pointcount;

pub use afe::{
    conductor_sign_search, curve_coefficients, curve_lseries, functional_equation_residual,
    lambda_at_k_direct, lambda_completed, lambda_completed_split, lprime_at_0, LSeries,
};
pub use eta::{eta_coeffs, EtaProductSpec};
pub use pointcount::{
    ec_ap, kronecker, legendre, primes_below, surface_affine_count, surface_trace_s,
    twist_relation_check, FrobeniusData, QuarticCurve, TwistPair,
};

use crate::numerics::NumericsError;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum LfError {
    #[error("bad prime {0}")]
    BadPrime(u64),
    #[error("Weil bound violated at p={0}: a_p={1}")]
    WeilBoundViolated(u64, i64),
    #[error("eta product has non-integral q-exponent (24th: {0})")]
    NonIntegralExponent(u32),
    #[error("have {have} coefficients, need {need}")]
    InsufficientCoefficients { have: usize, need: usize },
    #[error("conductor search ambiguous: {0}")]
    AmbiguousConductor(String),
    #[error("integer overflow in coefficient sieve")]
    Overflow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Hg(#[from] crate::hypergeom::HgError),
    #[error("coefficient cache: {0}")]
    Cache(String),
}

/// Serializable descriptor of a curve or eta-product L-function.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LSeriesDescriptor {
    Quartic {
        alpha: String,
    },
    Eta {
        factors: Vec<(u32, u32)>,
        weight: u32,
        level: u32,
    },
}

/// CSV coefficient cache with a version header:
///   hgreg-coeffs/1,<weight>,<level>
///   n,a_n
pub fn save_coefficients(
    path: &std::path::Path,
    weight: u32,
    level: u32,
    coeffs: &[i64],
) -> Result<(), LfError> {
    let mut out = format!("hgreg-coeffs/1,{weight},{level}\n");
    for (i, a) in coeffs.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, a));
    }
    std::fs::write(path, out).map_err(|e| LfError::Cache(e.to_string()))
}

pub fn load_coefficients(path: &std::path::Path) -> Result<(u32, u32, Vec<i64>), LfError> {
    let data = std::fs::read_to_string(path).map_err(|e| LfError::Cache(e.to_string()))?;
    let mut lines = data.lines();
    let header = lines.next().ok_or_else(|| LfError::Cache("empty".into()))?;
    let mut parts = header.split(',');
    if parts.next() != Some("hgreg-coeffs/1") {
        return Err(LfError::Cache("unknown version header".into()));
    }
    let weight: u32 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| LfError::Cache("bad weight".into()))?;
    let level: u32 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| LfError::Cache("bad level".into()))?;
    let mut coeffs = Vec::new();
    for (i, line) in lines.enumerate() {
        let (n, a) = line
            .split_once(',')
            .ok_or_else(|| LfError::Cache(format!("bad row {line}")))?;
        let n: usize = n.parse().map_err(|_| LfError::Cache("bad index".into()))?;
        if n != i + 1 {
            return Err(LfError::Cache("rows out of order".into()));
        }
        coeffs.push(a.parse().map_err(|_| LfError::Cache("bad value".into()))?);
    }
    Ok((weight, level, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_json_shapes() {
        let q = LSeriesDescriptor::Quartic { alpha: "2".into() };
        let js = serde_json::to_string(&q).unwrap();
        assert_eq!(js, r#"{"type":"quartic","alpha":"2"}"#);
        let e = LSeriesDescriptor::Eta {
            factors: vec![(4, 6)],
            weight: 3,
            level: 16,
        };
        let js = serde_json::to_string(&e).unwrap();
        assert_eq!(
            js,
            r#"{"type":"eta","factors":[[4,6]],"weight":3,"level":16}"#
        );
        let back: LSeriesDescriptor = serde_json::from_str(&js).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn coefficient_cache_roundtrip() {
        let dir = std::env::temp_dir().join("hgreg-cache-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.csv");
        let coeffs = vec![1i64, 0, -2, 5];
        save_coefficients(&path, 3, 16, &coeffs).unwrap();
        let (w, l, back) = load_coefficients(&path).unwrap();
        assert_eq!((w, l), (3, 16));
        assert_eq!(back, coeffs);
    }
}
