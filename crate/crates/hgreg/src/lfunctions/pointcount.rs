//! Frobenius traces by character sums and brute-force point counts.

use super::LfError;
use num::rational::Rational64;
use num::Zero;
use std::collections::BTreeMap;

/// The quartic model Y^2 = x^4 + c2 x^2 + c0 of the curve
/// (1 - x_0^2)(1 - x_1^2) = α, with c2 = α - 2 and c0 = 1 - α.
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticCurve {
    pub alpha: Rational64,
    pub c2: Rational64,
    pub c0: Rational64,
}

impl QuarticCurve {
    pub fn from_alpha(alpha: Rational64) -> Result<Self, LfError> {
        if alpha.is_zero() || alpha == Rational64::from_integer(1) {
            return Err(LfError::InvalidInput("α must avoid {0,1}".into()));
        }
        let two = Rational64::from_integer(2);
        let one = Rational64::from_integer(1);
        Ok(QuarticCurve {
            alpha,
            c2: alpha - two,
            c0: one - alpha,
        })
    }

    /// disc(x^4 + c2 x^2 + c0) = 16 c0 (c2^2 - 4 c0)^2 = 16 (1-α) α^4.
    pub fn disc(&self) -> Rational64 {
        let sixteen = Rational64::from_integer(16);
        let inner = self.c2 * self.c2 - Rational64::from_integer(4) * self.c0;
        sixteen * self.c0 * inner * inner
    }

    /// Odd primes dividing numerator or denominator of (1-α)α (candidate bad
    /// reduction support beyond 2).
    pub fn odd_bad_support(&self) -> Vec<u64> {
        let mut primes = Vec::new();
        let mut push_factors = |mut v: i64| {
            v = v.abs();
            while v % 2 == 0 && v > 0 {
                v /= 2;
            }
            let mut p = 3i64;
            while p * p <= v {
                if v % p == 0 {
                    while v % p == 0 {
                        v /= p;
                    }
                    primes.push(p as u64);
                }
                p += 2;
            }
            if v > 1 {
                primes.push(v as u64);
            }
        };
        let prod = self.c0 * self.alpha; // (1-α)α
        push_factors(*prod.numer());
        push_factors(*prod.denom());
        primes.sort_unstable();
        primes.dedup();
        primes
    }

    pub fn is_good_prime(&self, p: u64) -> bool {
        if p == 2 {
            return false;
        }
        let d = self.disc();
        (d.numer().rem_euclid(p as i64) != 0) && (d.denom().rem_euclid(p as i64) != 0)
    }
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Reduce a rational mod p (denominator must be invertible).
pub fn rational_mod(q: &Rational64, p: u64) -> Result<u64, LfError> {
    let den = q.denom().rem_euclid(p as i64) as u64;
    if den == 0 {
        return Err(LfError::BadPrime(p));
    }
    let num = q.numer().rem_euclid(p as i64) as u64;
    Ok(mulmod(num, invmod(den, p), p))
}

/// Quadratic-character lookup table over F_p: χ(0)=0, χ(QR)=1, χ(non-QR)=-1.
pub fn quadratic_character_table(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    let mut x = 1u64;
    while x < p {
        chi[mulmod(x, x, p) as usize] = 1;
        x += 1;
    }
    chi
}

/// Kronecker symbol (a/n), the usual extension of the Jacobi symbol.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i64;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut e2 = 0u32;
    while n % 2 == 0 {
        n /= 2;
        e2 += 1;
    }
    if e2 % 2 == 1 {
        result *= match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0, // a even
        };
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let nm8 = n % 8;
            if nm8 == 3 || nm8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i64 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    let e = powmod(r, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// a_p of the quartic curve by the character sum
/// a_p = -1 - Σ_x χ(f(x)) (the monic quartic has two rational points at ∞).
pub fn ec_ap(curve: &QuarticCurve, p: u64) -> Result<i64, LfError> {
    if p == 2 || !curve.is_good_prime(p) {
        return Err(LfError::BadPrime(p));
    }
    let c2 = rational_mod(&curve.c2, p)?;
    let c0 = rational_mod(&curve.c0, p)?;
    let chi = quadratic_character_table(p);
    let mut sum: i64 = 0;
    for x in 0..p {
        let x2 = mulmod(x, x, p);
        let fx = (mulmod(x2, x2, p) + mulmod(c2, x2, p) + c0) % p;
        sum += chi[fx as usize] as i64;
    }
    let ap = -1 - sum;
    // Weil sanity: a_p^2 <= 4p
    if ap * ap > 4 * p as i64 {
        return Err(LfError::WeilBoundViolated(p, ap));
    }
    Ok(ap)
}

/// Brute-force point count of the quartic's affine chart plus the two points
/// at infinity (independent O(p^2) oracle for tests).
pub fn ec_ap_bruteforce(curve: &QuarticCurve, p: u64) -> Result<i64, LfError> {
    if p == 2 || !curve.is_good_prime(p) {
        return Err(LfError::BadPrime(p));
    }
    let c2 = rational_mod(&curve.c2, p)?;
    let c0 = rational_mod(&curve.c0, p)?;
    let mut count = 2u64; // two points above x = ∞
    for x in 0..p {
        let x2 = mulmod(x, x, p);
        let fx = (mulmod(x2, x2, p) + mulmod(c2, x2, p) + c0) % p;
        for y in 0..p {
            if mulmod(y, y, p) == fx {
                count += 1;
            }
        }
    }
    Ok(p as i64 + 1 - count as i64)
}

/// Map p ↦ a_p for good primes below a bound.
#[derive(Clone, Debug, Default)]
pub struct FrobeniusData {
    pub ap: BTreeMap<u64, i64>,
}

impl FrobeniusData {
    pub fn for_curve(curve: &QuarticCurve, bound: u64) -> Result<Self, LfError> {
        let mut ap = BTreeMap::new();
        for p in primes_below(bound) {
            if curve.is_good_prime(p) {
                ap.insert(p, ec_ap(curve, p)?);
            }
        }
        Ok(FrobeniusData { ap })
    }

    /// Weil bound |a_p| <= 2 p^{(k-1)/2} as exact integer comparison
    /// a_p^2 <= 4 p^{k-1}.
    pub fn weil_bounds_hold(&self, weight: u32) -> bool {
        self.ap.iter().all(|(&p, &a)| {
            let bound = 4i128 * (p as i128).pow(weight - 1);
            (a as i128) * (a as i128) <= bound
        })
    }
}

pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return vec![];
    }
    let mut sieve = vec![true; bound as usize];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p < bound as usize {
        if sieve[p] {
            let mut q = p * p;
            while q < bound as usize {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// The elliptic curves of the transcendental-part factorization:
/// E_α : y^2 = x(x^2 + 2x - α/(1-α)) and its (1-α)-twist E'_α.
#[derive(Clone, Debug)]
pub struct TwistPair {
    pub alpha: Rational64,
    /// -α/(1-α), the linear coefficient of the cubic
    pub lin: Rational64,
}

impl TwistPair {
    pub fn new(alpha: Rational64) -> Result<Self, LfError> {
        if alpha.is_zero() || alpha == Rational64::from_integer(1) {
            return Err(LfError::InvalidInput("α must avoid {0,1}".into()));
        }
        let one = Rational64::from_integer(1);
        Ok(TwistPair {
            alpha,
            lin: -(alpha / (one - alpha)),
        })
    }

    fn good(&self, p: u64) -> bool {
        if p <= 3 {
            return false;
        }
        // needs α, 1-α, and the cubic discriminant invertible;
        // disc(x^3+2x^2+lx) = l^2 (4 - ... ) — it suffices that l and 4+... be
        // nonzero; the cubic x(x^2+2x+l) is separable iff l != 0 and 1 - l != 0
        let one = Rational64::from_integer(1);
        for q in [self.alpha, one - self.alpha, self.lin, one - self.lin] {
            if q.numer().rem_euclid(p as i64) == 0 || q.denom().rem_euclid(p as i64) == 0 {
                return false;
            }
        }
        true
    }

    /// a_p(E_α) by the cubic character sum.
    pub fn ap_base(&self, p: u64) -> Result<i64, LfError> {
        if !self.good(p) {
            return Err(LfError::BadPrime(p));
        }
        let l = rational_mod(&self.lin, p)?;
        let chi = quadratic_character_table(p);
        let mut sum = 0i64;
        for x in 0..p {
            let x2 = mulmod(x, x, p);
            let fx = (mulmod(x, x2, p) + 2 * x2 % p + mulmod(l, x, p)) % p;
            sum += chi[fx as usize] as i64;
        }
        Ok(-sum)
    }

    /// a_p(E'_α) by honest brute-force enumeration of (1-α) y^2 = f(x).
    pub fn ap_twist_bruteforce(&self, p: u64) -> Result<i64, LfError> {
        if !self.good(p) {
            return Err(LfError::BadPrime(p));
        }
        let one = Rational64::from_integer(1);
        let u = rational_mod(&(one - self.alpha), p)?;
        let l = rational_mod(&self.lin, p)?;
        let mut count = 1u64; // point at infinity
        for x in 0..p {
            let x2 = mulmod(x, x, p);
            let fx = (mulmod(x, x2, p) + 2 * x2 % p + mulmod(l, x, p)) % p;
            for y in 0..p {
                if mulmod(u, mulmod(y, y, p), p) == fx {
                    count += 1;
                }
            }
        }
        Ok(p as i64 + 1 - count as i64)
    }
}

/// Verify a_p(E'_α) = χ_{1-α}(p) a_p(E_α) for all good p below the bound;
/// returns the list of failures (empty = relation holds).
pub fn twist_relation_check(
    alpha: Rational64,
    p_bound: u64,
) -> Result<Vec<(u64, i64, i64, i64)>, LfError> {
    let pair = TwistPair::new(alpha)?;
    let one = Rational64::from_integer(1);
    let m = one - alpha;
    let mut failures = Vec::new();
    for p in primes_below(p_bound) {
        if !pair.good(p) {
            continue;
        }
        let base = pair.ap_base(p)?;
        let twist = pair.ap_twist_bruteforce(p)?;
        let chi = legendre(*m.numer(), p) * legendre(*m.denom(), p);
        if twist != chi * base {
            failures.push((p, base, twist, chi));
        }
    }
    Ok(failures)
}

/// Trace of Frobenius on the transcendental part of the K3 surface
/// (1-x_0^2)(1-x_1^2)(1-x_2^2) = 1: a_p(E)^2 - 2p if p ≡ 1 mod 4, else 0,
/// where E : w^2 = 1 - z^4.
pub fn surface_trace_s(p: u64) -> Result<i64, LfError> {
    if p <= 2 {
        return Err(LfError::BadPrime(p));
    }
    if p % 4 == 3 {
        return Ok(0);
    }
    // a_p(E) for w^2 = 1 - z^4: #E = p + Σχ(1-z^4) + 1 + χ(-1), so
    // a_p = -Σ_z χ(1 - z^4) - χ(-1).
    let chi = quadratic_character_table(p);
    let mut sum = 0i64;
    for z in 0..p {
        let z2 = mulmod(z, z, p);
        let z4 = mulmod(z2, z2, p);
        let v = (p + 1 - z4) % p;
        sum += chi[v as usize] as i64;
    }
    let chi_m1 = chi[(p - 1) as usize] as i64;
    let ap = -sum - chi_m1;
    Ok(ap * ap - 2 * p as i64)
}

/// Affine point count of (1-x_0^2)(1-x_1^2)(1-x_2^2) = α over F_p
/// (O(p^2) exploratory count).
pub fn surface_affine_count(alpha: &Rational64, p: u64) -> Result<u64, LfError> {
    if p == 2 {
        return Err(LfError::BadPrime(p));
    }
    let a = rational_mod(alpha, p)?;
    if a == 0 {
        return Err(LfError::BadPrime(p));
    }
    let chi = quadratic_character_table(p);
    // table of 1 - x^2 values
    let vals: Vec<u64> = (0..p).map(|x| (p + 1 - mulmod(x, x, p) % p) % p).collect();
    let mut count = 0u64;
    for x1 in 0..p as usize {
        let v1 = vals[x1];
        if v1 == 0 {
            continue; // product would be 0 ≠ α
        }
        for x2 in 0..p as usize {
            let v2 = vals[x2];
            if v2 == 0 {
                continue;
            }
            let c = mulmod(a, invmod(mulmod(v1, v2, p), p), p);
            // count x_0 with 1 - x_0^2 = c  ⇔  x_0^2 = 1 - c
            let target = (p + 1 - c) % p;
            count += (1 + chi[target as usize] as i64) as u64;
        }
    }
    Ok(count)
}
