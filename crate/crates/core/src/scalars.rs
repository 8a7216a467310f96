//! Prime fields `F_p` and binomial coefficients.
//!
//! Residues are stored as `u32` in `[0, p)`. Hot paths use the methods on
//! [`Prime`] directly; [`FpScalar`] is the self-describing value type used at
//! API boundaries.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{Check, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic must be odd, got {0}")]
    EvenCharacteristic(u64),
    #[error("{0} does not fit the supported modulus range")]
    TooLarge(u64),
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u32, u32),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
}

/// An odd prime `p`, checked by trial division.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl TryFrom<u64> for Prime {
    type Error = ScalarError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0 as u64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Prime {
    pub fn new(p: u64) -> Result<Prime, ScalarError> {
        if p > u32::MAX as u64 / 2 {
            return Err(ScalarError::TooLarge(p));
        }
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(ScalarError::NotPrime(p));
        }
        if p == 2 {
            return Err(ScalarError::EvenCharacteristic(p));
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse by Fermat; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        (a % self.0 != 0).then(|| self.pow(a, self.0 as u64 - 2))
    }

    /// The inverse of 2, which exists because `p` is odd.
    pub fn half(self) -> u32 {
        (self.0 + 1) / 2
    }

    /// `(-1)^e`.
    #[inline]
    pub fn sign(self, e: i64) -> u32 {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.0 - 1
        }
    }

    /// Binomial coefficient `binom(m, k)` for any integer `m`, reduced mod `p`.
    ///
    /// Negative tops are folded with `binom(m,k) = (-1)^k binom(k-m-1,k)` and then
    /// evaluated digitwise, so no factorial is ever inverted.
    pub fn binom(self, m: i64, k: i64) -> u32 {
        if k < 0 {
            return 0;
        }
        if m >= 0 {
            lucas(self, m as u64, k as u64)
        } else {
            let top = (k - m - 1) as u64;
            self.mul(self.sign(k), lucas(self, top, k as u64))
        }
    }

    pub fn scalar(self, v: i64) -> FpScalar {
        FpScalar { value: self.reduce(v), p: self }
    }
}

fn lucas(p: Prime, mut m: u64, mut k: u64) -> u32 {
    let q = p.0 as u64;
    let mut acc = 1u32;
    while k > 0 || m > 0 {
        let (md, kd) = (m % q, k % q);
        if kd > md {
            return 0;
        }
        acc = p.mul(acc, small_binom(p, md, kd));
        m /= q;
        k /= q;
    }
    acc
}

/// `binom(m, k)` for `0 <= k <= m < p` via the multiplicative formula.
fn small_binom(p: Prime, m: u64, k: u64) -> u32 {
    let k = k.min(m - k);
    let (mut num, mut den) = (1u32, 1u32);
    for i in 0..k {
        num = p.mul(num, ((m - i) % p.0 as u64) as u32);
        den = p.mul(den, ((i + 1) % p.0 as u64) as u32);
    }
    p.mul(num, p.inv(den).expect("k < p so k! is a unit"))
}

/// An element of `F_p` that carries its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    pub value: u32,
    pub p: Prime,
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FpScalar {
    pub fn new(p: Prime, v: i64) -> FpScalar {
        p.scalar(v)
    }

    pub fn zero(p: Prime) -> FpScalar {
        FpScalar { value: 0, p }
    }

    pub fn one(p: Prime) -> FpScalar {
        FpScalar { value: 1, p }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same(self, o: FpScalar) -> Result<Prime, ScalarError> {
        if self.p == o.p {
            Ok(self.p)
        } else {
            Err(ScalarError::PrimeMismatch(self.p.0, o.p.0))
        }
    }

    pub fn checked_add(self, o: FpScalar) -> Result<FpScalar, ScalarError> {
        let p = self.same(o)?;
        Ok(FpScalar { value: p.add(self.value, o.value), p })
    }

    pub fn checked_sub(self, o: FpScalar) -> Result<FpScalar, ScalarError> {
        let p = self.same(o)?;
        Ok(FpScalar { value: p.sub(self.value, o.value), p })
    }

    pub fn checked_mul(self, o: FpScalar) -> Result<FpScalar, ScalarError> {
        let p = self.same(o)?;
        Ok(FpScalar { value: p.mul(self.value, o.value), p })
    }

    pub fn checked_div(self, o: FpScalar) -> Result<FpScalar, ScalarError> {
        let p = self.same(o)?;
        let inv = p.inv(o.value).ok_or(ScalarError::DivisionByZero(p.0))?;
        Ok(FpScalar { value: p.mul(self.value, inv), p })
    }

    pub fn inv(self) -> Result<FpScalar, ScalarError> {
        let value = self.p.inv(self.value).ok_or(ScalarError::DivisionByZero(self.p.0))?;
        Ok(FpScalar { value, p: self.p })
    }

    pub fn pow(self, e: u64) -> FpScalar {
        FpScalar { value: self.p.pow(self.value, e), p: self.p }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for FpScalar {
            type Output = FpScalar;
            /// Panics when the operands live over different primes.
            fn $m(self, o: FpScalar) -> FpScalar {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar { value: self.p.neg(self.value), p: self.p }
    }
}

/// Exact integer binomial `m(m-1)...(m-k+1)/k!` for any sign of `m`.
pub fn integer_binomial(m: i64, k: u64) -> BigInt {
    if m < 0 {
        let folded = integer_binomial(k as i64 - m - 1, k);
        return if k % 2 == 0 { folded } else { -folded };
    }
    if k as i64 > m {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(m - i as i64);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `binom(m, k)` computed over the integers and then reduced mod `p`.
pub fn fp_binomial(p: Prime, m: i64, k: u64) -> FpScalar {
    let q = BigInt::from(p.get());
    let mut r = integer_binomial(m, k) % &q;
    if r.is_negative() {
        r += &q;
    }
    FpScalar { value: r.to_u32().expect("residue below p"), p }
}

/// `binom(m, k)` mod `p` from the base-`p` digits of `m` and `k`.
pub fn lucas_binomial(p: Prime, m: u64, k: u64) -> FpScalar {
    FpScalar { value: lucas(p, m, k), p }
}

/// Checks `binom(pn+k-1, k) = 0` for `p ∤ k` and
/// `binom(pn+pk-1, pk) = binom(n+k-1, k)` for `1 <= n <= nmax`, `1 <= k <= kmax`.
pub fn verify_lucas_lemma(p: Prime, nmax: u64, kmax: u64) -> Report {
    let q = p.get() as u64;
    let mut vanishing = Check::new("lucas-vanishing").param("p", q).param("nmax", nmax).param("kmax", kmax);
    let mut lifting = Check::new("lucas-lifting").param("p", q).param("nmax", nmax).param("kmax", kmax);
    for n in 1..=nmax {
        for k in 1..=kmax {
            if k % q != 0 {
                let v = fp_binomial(p, (q * n + k - 1) as i64, k);
                vanishing.record(v.is_zero(), || format!("n={n} k={k}: binom({},{k}) = {v}", q * n + k - 1));
            }
            let lhs = fp_binomial(p, (q * n + q * k - 1) as i64, q * k);
            let rhs = fp_binomial(p, (n + k - 1) as i64, k);
            lifting.record(lhs == rhs, || format!("n={n} k={k}: {lhs} != {rhs}"));
        }
    }
    Report::new("lucas", vec![vanishing.finish(), lifting.finish()]).param("p", q)
}

/// Left and right sides of the first binomial identity in `F_p`.
pub fn first_identity_sides(p: Prime, m: i64, n: i64, k: i64) -> (u32, u32) {
    let lhs = p.mul(p.reduce(m - n), p.binom(m + n + 1, k));
    let rhs = (0..=k).fold(0, |acc, i| {
        let t = p.mul(p.reduce(m - n - k + 2 * i), p.mul(p.binom(m + 1, k - i), p.binom(n + 1, i)));
        p.add(acc, t)
    });
    (lhs, rhs)
}

/// Left and right sides of the second (cocycle) binomial identity in `F_p`.
pub fn second_identity_sides(p: Prime, m: i64, n: i64, k: i64) -> (u32, u32) {
    let lhs = if m + n - k == 0 {
        (0..=k).fold(0, |acc, i| {
            let t = p.mul(p.binom(m + 1, k - i), p.mul(p.binom(n + 1, i), p.binom(m - k + i + 1, 3)));
            p.add(acc, t)
        })
    } else {
        0
    };
    let rhs = if m + n == 0 && k == 0 { p.binom(m + 1, 3) } else { 0 };
    (lhs, rhs)
}

/// Verifies both binomial identities over the given ranges.
pub fn verify_appendix_identities(
    p: Prime,
    mrange: std::ops::RangeInclusive<i64>,
    nrange: std::ops::RangeInclusive<i64>,
    krange: std::ops::RangeInclusive<i64>,
) -> Report {
    let describe = |c: Check| {
        c.param("p", p.get())
            .param("m", format!("{}..={}", mrange.start(), mrange.end()))
            .param("n", format!("{}..={}", nrange.start(), nrange.end()))
            .param("k", format!("{}..={}", krange.start(), krange.end()))
    };
    let mut first = describe(Check::new("bracket-binomial-identity"));
    let mut second = describe(Check::new("cocycle-binomial-identity"));
    for m in mrange.clone() {
        for n in nrange.clone() {
            for k in krange.clone() {
                let (l, r) = first_identity_sides(p, m, n, k);
                first.record(l == r, || format!("m={m} n={n} k={k}: {l} != {r}"));
                let (l, r) = second_identity_sides(p, m, n, k);
                second.record(l == r, || format!("m={m} n={n} k={k}: {l} != {r}"));
            }
        }
    }
    Report::new("appendix", vec![first.finish(), second.finish()]).param("p", p.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(q: u64) -> Prime {
        Prime::new(q).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(3).is_ok());
        assert!(Prime::new(7919).is_ok());
        assert_eq!(Prime::new(2), Err(ScalarError::EvenCharacteristic(2)));
        assert_eq!(Prime::new(9), Err(ScalarError::NotPrime(9)));
        assert_eq!(Prime::new(1), Err(ScalarError::NotPrime(1)));
        assert_eq!(Prime::new(0), Err(ScalarError::NotPrime(0)));
    }

    #[test]
    fn scalar_ops_and_mismatch() {
        let a = FpScalar::new(p(5), 3);
        let b = FpScalar::new(p(5), 4);
        assert_eq!((a + b).value, 2);
        assert_eq!((a - b).value, 4);
        assert_eq!((a * b).value, 2);
        assert_eq!((a / b * b), a);
        assert_eq!((-a).value, 2);
        let c = FpScalar::new(p(7), 1);
        assert_eq!(a.checked_add(c), Err(ScalarError::PrimeMismatch(5, 7)));
        assert!(FpScalar::zero(p(5)).inv().is_err());
        assert_eq!(p(3).half(), 2);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(fp_binomial(p(3), 3, 3).value, 1);
        assert_eq!(fp_binomial(p(3), -2, 3).value, 2);
        for j in 0..=10 {
            let expect = if j % 2 == 0 { 1 } else { 4 };
            assert_eq!(fp_binomial(p(5), -1, j).value, expect);
        }
        assert_eq!(lucas_binomial(p(5), 7, 2).value, 1);
        assert_eq!(lucas_binomial(p(3), 4, 5).value, 0);
        for m in 0..30 {
            assert_eq!(lucas_binomial(p(7), m, 0).value, 1);
        }
    }

    #[test]
    fn integer_binomial_matches_hand_values() {
        assert_eq!(integer_binomial(-2, 3), BigInt::from(-4));
        assert_eq!(integer_binomial(12, 3), BigInt::from(220));
        assert_eq!(integer_binomial(5, 3), BigInt::from(10));
        assert_eq!(integer_binomial(3, 5), BigInt::zero());
    }

    #[test]
    fn lucas_lemma_examples() {
        assert!(fp_binomial(p(3), 3, 1).is_zero());
        assert_eq!(fp_binomial(p(3), 5, 3), fp_binomial(p(3), 1, 1));
        assert!(fp_binomial(p(5), 12, 3).is_zero());
        assert!(verify_lucas_lemma(p(3), 10, 10).passed());
    }

    #[test]
    fn appendix_examples() {
        for m in -5..5 {
            for n in -5..5 {
                let (l, r) = first_identity_sides(p(7), m, n, 0);
                assert_eq!(l, p(7).reduce(m - n));
                assert_eq!(r, l);
            }
        }
        assert_eq!(first_identity_sides(p(5), 2, 1, 2), (1, 1));
        assert_eq!(second_identity_sides(p(5), 2, -2, 0), (1, 1));
    }

    #[test]
    fn lucas_agrees_with_exact_binomial() {
        for q in [3, 5, 7] {
            for m in 0..=200 {
                for k in 0..=200 {
                    assert_eq!(lucas_binomial(p(q), m, k), fp_binomial(p(q), m as i64, k));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pascal(m in -20i64..=20, k in 1u64..=12, qi in 0usize..3) {
            let q = p([3, 5, 7][qi]);
            let lhs = fp_binomial(q, m, k);
            let rhs = fp_binomial(q, m - 1, k - 1) + fp_binomial(q, m - 1, k);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn vandermonde(m in -20i64..=20, n in -20i64..=20, k in 0i64..=12, qi in 0usize..3) {
            let q = p([3, 5, 7][qi]);
            let lhs = (0..=k).fold(0, |a, i| q.add(a, q.mul(q.binom(m, k - i), q.binom(n, i))));
            prop_assert_eq!(lhs, q.binom(m + n, k));
        }

        #[test]
        fn fast_binomial_matches_exact(m in -60i64..=60, k in 0u64..=40, qi in 0usize..3) {
            let q = p([3, 5, 7][qi]);
            prop_assert_eq!(q.binom(m, k as i64), fp_binomial(q, m, k).value);
        }

        #[test]
        fn field_axioms(a in 0i64..1000, b in 1i64..1000) {
            let q = p(101);
            let (x, y) = (FpScalar::new(q, a), FpScalar::new(q, b));
            if !y.is_zero() {
                prop_assert_eq!(x / y * y, x);
            }
            prop_assert_eq!(x.pow(101), x);
        }
    }
}
