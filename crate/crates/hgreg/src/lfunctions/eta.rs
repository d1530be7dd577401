//! Integer q-expansions of Dedekind eta products by sparse theta series.
//!
//! Building blocks (exponents kept in units of q^{1/24}):
//!   η(mz)   = Σ_{j∈Z} (-1)^j q^{m(6j+1)^2/24}
//!   η(mz)^3 = Σ_{j>=0} (-1)^j (2j+1) q^{m(2j+1)^2/8}
//! General powers are assembled by repeated sparse convolution; the result
//! must land on integral q-exponents (Σ m·e ≡ 0 mod 24).

use super::LfError;
use serde::{Deserialize, Serialize};

/// An eta product Π η(m_i z)^{e_i}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaProductSpec {
    /// (multiplier m, exponent e) pairs
    pub factors: Vec<(u32, u32)>,
    pub weight: u32,
    pub level: u32,
}

impl EtaProductSpec {
    pub fn new(factors: Vec<(u32, u32)>, level: u32) -> Result<Self, LfError> {
        if factors.is_empty() {
            return Err(LfError::InvalidInput("empty eta product".into()));
        }
        let me: u32 = factors.iter().map(|(m, e)| m * e).sum();
        if me % 24 != 0 {
            return Err(LfError::NonIntegralExponent(me));
        }
        let e_sum: u32 = factors.iter().map(|(_, e)| e).sum();
        if e_sum % 2 != 0 {
            return Err(LfError::InvalidInput(
                "half-integral weight eta products are unsupported".into(),
            ));
        }
        Ok(EtaProductSpec {
            factors,
            weight: e_sum / 2,
            level,
        })
    }

    /// The four weight-3 newforms used by the K3 identities.
    pub fn newform_a() -> Self {
        Self::new(vec![(4, 6)], 16).unwrap()
    }
    pub fn newform_b() -> Self {
        Self::new(vec![(1, 2), (2, 1), (4, 1), (8, 2)], 8).unwrap()
    }
    pub fn newform_c() -> Self {
        Self::new(vec![(2, 3), (6, 3)], 12).unwrap()
    }
    pub fn newform_d() -> Self {
        Self::new(vec![(1, 3), (7, 3)], 7).unwrap()
    }
}

/// Dense accumulator over exponents in 24ths of a q-power.
struct Dense24 {
    coeffs: Vec<i64>, // index = exponent in 1/24 units
}

impl Dense24 {
    fn one(limit24: usize) -> Self {
        let mut coeffs = vec![0i64; limit24 + 1];
        coeffs[0] = 1;
        Dense24 { coeffs }
    }

    /// Multiply in place by a sparse series given as (exponent24, coeff).
    fn mul_sparse(&mut self, sparse: &[(usize, i64)]) {
        let n = self.coeffs.len();
        let mut out = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(e, s) in sparse {
                let j = i + e;
                if j >= n {
                    break; // sparse exponents are sorted ascending
                }
                out[j] += c.checked_mul(s).expect("eta coefficient overflow");
            }
        }
        self.coeffs = out;
    }
}

/// η(mz) up to exponent limit (in 24ths): terms (-1)^j at m(6j+1)^2, j ∈ Z.
fn eta_pow1_sparse(m: u32, limit24: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let m = m as i64;
    let mut j: i64 = 0;
    loop {
        let mut hit = false;
        for jj in [j, -j - 1] {
            let k = 6 * jj + 1;
            let e = m * k * k;
            if e as usize <= limit24 {
                let sign = if jj.rem_euclid(2) == 0 { 1 } else { -1 };
                out.push((e as usize, sign));
                hit = true;
            }
        }
        if !hit {
            break;
        }
        j += 1;
    }
    out.sort_unstable();
    out
}

/// η(mz)^3 up to exponent limit (in 24ths): (-1)^j (2j+1) at 3m(2j+1)^2.
fn eta_pow3_sparse(m: u32, limit24: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let m = m as i64;
    let mut j: i64 = 0;
    loop {
        let k = 2 * j + 1;
        let e = 3 * m * k * k;
        if e as usize > limit24 {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out.push((e as usize, sign * k));
        j += 1;
    }
    out
}

/// Integer coefficients a_1..a_{n_max} of the eta product's q-expansion.
/// Exact integer arithmetic throughout; panics on i64 overflow rather than
/// returning wrong numbers.
pub fn eta_coeffs(spec: &EtaProductSpec, n_max: usize) -> Result<Vec<i64>, LfError> {
    if n_max == 0 || n_max > 10_000_000 {
        return Err(LfError::InvalidInput(format!("n_max {n_max} out of range")));
    }
    let limit24 = 24 * n_max;
    let mut acc = Dense24::one(limit24);
    for &(m, e) in &spec.factors {
        let cubes = e / 3;
        let singles = e % 3;
        let s3 = eta_pow3_sparse(m, limit24);
        for _ in 0..cubes {
            acc.mul_sparse(&s3);
        }
        let s1 = eta_pow1_sparse(m, limit24);
        for _ in 0..singles {
            acc.mul_sparse(&s1);
        }
    }
    // all mass must sit on integral exponents
    for (i, &c) in acc.coeffs.iter().enumerate() {
        if c != 0 && i % 24 != 0 {
            return Err(LfError::NonIntegralExponent(i as u32));
        }
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        out.push(acc.coeffs[24 * n]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newform_a_known_coefficients() {
        // independent double-sum oracle over (2j+1)^2 + (2k+1)^2 = 2n for η(4z)^6
        let a = eta_coeffs(&EtaProductSpec::newform_a(), 16).unwrap();
        let oracle = |n: i64| -> i64 {
            let mut acc = 0;
            let mut j = 1i64;
            while j * j <= 2 * n {
                let mut k = 1i64;
                while j * j + k * k <= 2 * n {
                    if j % 2 == 1 && k % 2 == 1 && j * j + k * k == 2 * n {
                        let sj = if (j - 1) / 2 % 2 == 0 { 1 } else { -1 };
                        let sk = if (k - 1) / 2 % 2 == 0 { 1 } else { -1 };
                        acc += sj * sk * j * k;
                    }
                    k += 1;
                }
                j += 1;
            }
            acc
        };
        for n in 1..=16 {
            assert_eq!(a[n - 1], oracle(n as i64), "a_{n}");
        }
        assert_eq!(a[0], 1);
        assert_eq!(a[4], -6);
        assert_eq!(a[8], 9);
        assert_eq!(a[12], 10);
    }

    #[test]
    fn newform_c_leading_term() {
        let c = eta_coeffs(&EtaProductSpec::newform_c(), 8).unwrap();
        assert_eq!(c[0], 1);
    }

    #[test]
    fn newform_d_multiplicative() {
        let d = eta_coeffs(&EtaProductSpec::newform_d(), 2500).unwrap();
        assert_eq!(d[0], 1);
        for m in 2..=50usize {
            for n in 2..=50usize {
                if gcd(m, n) == 1 && m * n <= 2500 {
                    assert_eq!(d[m * n - 1], d[m - 1] * d[n - 1], "a_{{{m}*{n}}}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_integral_expansion() {
        assert!(EtaProductSpec::new(vec![(1, 1)], 1).is_err());
        assert!(EtaProductSpec::new(vec![(3, 2)], 9).is_err());
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
}
