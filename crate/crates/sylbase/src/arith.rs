//! Exact integer and rational arithmetic plus 2-adic utilities.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{domain, Result};

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;
/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// A sign `ε ∈ {+1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => domain(format!("sign must be +1 or -1, got {v}")),
        }
    }

    /// `ε^k`.
    pub fn pow(self, k: u64) -> Sign {
        if self == Sign::Minus && k % 2 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn to_int(self) -> Integer {
        Integer::from(self.to_i64())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The decomposition `m = 2^exponent · odd_part`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAdicSplit {
    pub exponent: u64,
    pub odd_part: Integer,
}

impl TwoAdicSplit {
    /// `2^exponent`, the 2-part of the original number.
    pub fn two_part(&self) -> Integer {
        pow2(self.exponent)
    }
}

/// `2^e`.
pub fn pow2(e: u64) -> Integer {
    Integer::one() << e
}

/// `base^e` for a non-negative machine exponent.
pub fn ipow(base: &Integer, e: u64) -> Integer {
    num_traits::pow::Pow::pow(base, e)
}

/// Convenience constructor.
pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

/// Rational `num/den`; panics on a zero denominator.
pub fn ratio(num: Integer, den: Integer) -> Rational {
    Rational::new(num, den)
}

/// Rational from an integer.
pub fn rat(v: Integer) -> Rational {
    Rational::from_integer(v)
}

/// Splits `m ≥ 1` as `2^e · u` with `u` odd.
pub fn val2(m: &Integer) -> Result<TwoAdicSplit> {
    if !m.is_positive() {
        return domain(format!("val2 needs a positive integer, got {m}"));
    }
    let exponent = m.trailing_zeros().expect("non-zero");
    Ok(TwoAdicSplit {
        exponent,
        odd_part: m >> exponent,
    })
}

/// The 2-part `(m)_2` of a positive integer.
pub fn two_part(m: &Integer) -> Result<Integer> {
    Ok(val2(m)?.two_part())
}

/// `(q^d − ε)_2` for odd `q ≥ 3`, via the three-branch closed form, without expanding `q^d`.
pub fn two_part_power(q: &Integer, d: u64, eps: Sign) -> Result<Integer> {
    two_part_power_impl(q, d, eps, false)
}

/// Variant used by the lemma self-check harness: `fault` corrupts the even-`d`, `ε = +1` branch.
#[doc(hidden)]
pub fn two_part_power_impl(q: &Integer, d: u64, eps: Sign, fault: bool) -> Result<Integer> {
    if q.is_even() {
        return domain(format!("two_part_power needs odd q, got {q}"));
    }
    if *q < int(3) {
        return domain(format!("two_part_power needs q >= 3, got {q}"));
    }
    if d == 0 {
        return domain("two_part_power needs d >= 1");
    }
    if d % 2 == 1 {
        return two_part(&(q - eps.to_int()));
    }
    if eps == Sign::Plus {
        let alpha = two_part(&(q * q - 1))?;
        let half = two_part(&Integer::from(d / 2))?;
        let v = alpha * half;
        return Ok(if fault { v * 2 } else { v });
    }
    Ok(int(2))
}

/// `(m!)_2` computed by Legendre's formula `Σ_i ⌊m / 2^i⌋`.
pub fn factorial_two_part(m: u64) -> Integer {
    pow2(factorial_val2(m))
}

/// The exponent of 2 in `m!`.
pub fn factorial_val2(m: u64) -> u64 {
    let mut e = 0;
    let mut p = 2u64;
    while p <= m {
        e += m / p;
        match p.checked_mul(2) {
            Some(n) => p = n,
            None => break,
        }
    }
    e
}

/// Positive greatest common divisor; `(0, 0)` is rejected.
pub fn gcd(a: &Integer, b: &Integer) -> Result<Integer> {
    if a.is_zero() && b.is_zero() {
        return domain("gcd(0, 0) is undefined");
    }
    Ok(a.gcd(b))
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::zero();
    }
    let k = k.min(n - k);
    let mut acc = Integer::one();
    for i in 0..k {
        acc = acc * Integer::from(n - i) / Integer::from(i + 1);
    }
    acc
}

/// `true` iff `x` is a perfect square; returns the root when it is.
pub fn exact_sqrt(x: &Integer) -> Option<Integer> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

/// Integer value of a rational if its denominator is 1.
pub fn as_integer(r: &Rational) -> Option<Integer> {
    r.is_integer().then(|| r.to_integer())
}

/// Lossy conversion for display and heuristics only.
pub fn to_f64(r: &Rational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // Scale both sides down to keep magnitudes representable.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Deterministic primality by trial division up to `√n`.
pub fn is_small_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, f)` with `q = p^f` if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    (1..=q.ilog2()).rev().find_map(|f| {
        let r = Integer::from(q).nth_root(f);
        let r = r.to_u64()?;
        (r.checked_pow(f) == Some(q) && is_small_prime(r)).then_some((r, f))
    })
}

/// A cell where the closed form for `(q^d − ε)_2` disagrees with direct expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerMismatch {
    pub q: u64,
    pub d: u64,
    pub eps: Sign,
    pub closed: String,
    pub brute: String,
}

impl fmt::Display for PowerMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q,d,eps) = ({},{},{}): closed form {} vs direct {}", self.q, self.d, self.eps, self.closed, self.brute)
    }
}

/// Summary of [`lemma_oracle_grid`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub q_max: u64,
    pub d_max: u64,
    pub m_max: u64,
    pub power_cells: usize,
    pub power_mismatches: Vec<PowerMismatch>,
    /// Values of `m` violating `2^m (m!)_2 = ((2m)!)_2` or `(m!)_2 < 2^m`.
    pub factorial_failures: Vec<u64>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.power_mismatches.is_empty() && self.factorial_failures.is_empty()
    }
}

/// Checks [`two_part_power`] against the 2-part of the expanded `q^d − ε` for every odd prime
/// power `3 ≤ q ≤ q_max`, `1 ≤ d ≤ d_max` and both signs, and checks the factorial identity
/// and bound for `1 ≤ m ≤ m_max` by counting factors of two in the factors of `(2m)!`.
///
/// `fault` routes the power check through the corrupted branch of [`two_part_power_impl`].
pub fn lemma_oracle_grid(q_max: u64, d_max: u64, m_max: u64, fault: bool) -> Result<LemmaReport> {
    let mut power_cells = 0;
    let mut power_mismatches = Vec::new();
    for q in (3..=q_max).step_by(2).filter(|&q| prime_power(q).is_some()) {
        let qi = Integer::from(q);
        for d in 1..=d_max {
            let qd = ipow(&qi, d);
            for eps in [Sign::Plus, Sign::Minus] {
                let closed = two_part_power_impl(&qi, d, eps, fault)?;
                let brute = two_part(&(&qd - eps.to_int()))?;
                power_cells += 1;
                if closed != brute {
                    power_mismatches.push(PowerMismatch {
                        q,
                        d,
                        eps,
                        closed: closed.to_string(),
                        brute: brute.to_string(),
                    });
                }
            }
        }
    }
    // Running 2-adic valuation of (2m)!, one factor at a time.
    let mut double_val = 0u64;
    let mut factorial_failures = Vec::new();
    for m in 1..=m_max {
        double_val += u64::from((2 * m - 1).trailing_zeros()) + u64::from((2 * m).trailing_zeros());
        let single = factorial_val2(m);
        if m + single != double_val || single >= m {
            factorial_failures.push(m);
        }
    }
    Ok(LemmaReport { q_max, d_max, m_max, power_cells, power_mismatches, factorial_failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn val2_examples() {
        assert_eq!(
            val2(&int(48)).unwrap(),
            TwoAdicSplit { exponent: 4, odd_part: int(3) }
        );
        assert_eq!(
            val2(&int(1)).unwrap(),
            TwoAdicSplit { exponent: 0, odd_part: int(1) }
        );
        assert_eq!(
            val2(&int(40320)).unwrap(),
            TwoAdicSplit { exponent: 7, odd_part: int(315) }
        );
        assert!(val2(&int(0)).is_err());
        assert!(val2(&int(-4)).is_err());
    }

    #[test]
    fn two_part_power_examples() {
        assert_eq!(two_part_power(&int(7), 2, Sign::Plus).unwrap(), int(16));
        assert_eq!(two_part_power(&int(5), 3, Sign::Plus).unwrap(), int(4));
        assert_eq!(two_part_power(&int(7), 4, Sign::Minus).unwrap(), int(2));
        assert!(two_part_power(&int(8), 2, Sign::Plus).is_err());
        assert!(two_part_power(&int(1), 2, Sign::Plus).is_err());
        assert!(two_part_power(&int(3), 0, Sign::Plus).is_err());
    }

    #[test]
    fn lemma_grid_small() {
        let r = lemma_oracle_grid(27, 8, 200, false).unwrap();
        // 3 5 7 9 11 13 17 19 23 25 27
        assert_eq!(r.power_cells, 11 * 8 * 2);
        assert!(r.passed());
        let bad = lemma_oracle_grid(3, 2, 0, true).unwrap();
        assert_eq!(bad.power_mismatches.len(), 1);
        assert_eq!((bad.power_mismatches[0].d, bad.power_mismatches[0].eps), (2, Sign::Plus));
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial_two_part(4), int(8));
        assert_eq!(factorial_two_part(0), int(1));
        assert_eq!(factorial_two_part(10), int(256));
        assert_eq!(factorial_two_part(1), int(1));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&int(4), &int(6)).unwrap(), int(2));
        assert_eq!(gcd(&int(6), &int(8)).unwrap(), int(2));
        assert_eq!(gcd(&int(5), &int(0)).unwrap(), int(5));
        assert_eq!(gcd(&int(-4), &int(6)).unwrap(), int(2));
        assert!(gcd(&int(0), &int(0)).is_err());
    }

    #[test]
    fn sign_helpers() {
        assert_eq!(Sign::Minus.pow(3), Sign::Minus);
        assert_eq!(Sign::Minus.pow(4), Sign::Plus);
        assert_eq!(Sign::from_i64(-1).unwrap(), Sign::Minus);
        assert!(Sign::from_i64(0).is_err());
    }

    #[test]
    fn binomial_and_roots() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(3, 5), int(0));
        assert_eq!(exact_sqrt(&int(81)), Some(int(9)));
        assert_eq!(exact_sqrt(&int(27)), None);
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(2147483647u64 * 2147483647), Some((2147483647, 2)));
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(1024), Some((2, 10)));
    }

    #[test]
    fn rationals_are_normalised() {
        let r = ratio(int(6), int(-4));
        assert_eq!(r.numer(), &int(-3));
        assert_eq!(r.denom(), &int(2));
        assert!((to_f64(&r) + 1.5).abs() < 1e-12);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn val2_reconstructs(m in 1u64..u64::MAX) {
                let s = val2(&Integer::from(m)).unwrap();
                prop_assert!(s.odd_part.is_odd());
                prop_assert_eq!(s.two_part() * &s.odd_part, Integer::from(m));
            }

            #[test]
            fn rational_sum_cross_multiplies(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
                let s = ratio(int(a), int(b)) + ratio(int(c), int(d));
                prop_assert_eq!(s.numer() * int(b * d), s.denom() * int(a * d + c * b));
                prop_assert!(s.denom().is_positive());
                prop_assert!(gcd(s.numer(), s.denom()).unwrap().is_one());
            }

            #[test]
            fn factorial_lemma(m in 1u64..5000) {
                prop_assert_eq!(pow2(m) * factorial_two_part(m), factorial_two_part(2 * m));
                prop_assert!(factorial_two_part(m) < pow2(m));
            }
        }
    }
}
