//! Exact arithmetic: exponent vectors, residue rings Z/p^e, univariate
//! t-polynomials and multivariate Laurent polynomials.

mod laurent;
mod tpoly;

pub use laurent::LaurentPoly;
pub use tpoly::{tpoly_digit_slice, TPoly};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RingError {
    #[error("variable count mismatch: {0} vs {1}")]
    VariableCountMismatch(usize, usize),
    #[error("modulus mismatch")]
    ModulusMismatch,
    #[error("exact division by {0} failed")]
    InexactDivision(BigInt),
    #[error("modulus {0}^{1} does not fit the 63-bit residue format")]
    ModulusOverflow(u64, u32),
    #[error("degree bound violated: degree {got} exceeds {bound}")]
    DegreeOverflow { got: i64, bound: i64 },
    #[error("element {0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),
}

/// Exponent vector in Z^n. The derived `Ord` is lexicographic, which is the
/// canonical term order used everywhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zero(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        debug_assert_eq!(self.len(), other.len());
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        debug_assert_eq!(self.len(), other.len());
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec(self.0.iter().map(|&a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> ExpVec {
        ExpVec(self.0.iter().map(|&a| a * k).collect())
    }

    /// True when every component is divisible by `p`.
    pub fn divisible_by(&self, p: i64) -> bool {
        self.0.iter().all(|&c| c % p == 0)
    }

    pub fn div_exact(&self, p: i64) -> ExpVec {
        debug_assert!(self.divisible_by(p));
        ExpVec(self.0.iter().map(|&c| c / p).collect())
    }

    /// Componentwise residue in [0, p).
    pub fn rem_euclid(&self, p: i64) -> ExpVec {
        ExpVec(self.0.iter().map(|&c| c.rem_euclid(p)).collect())
    }
}

impl fmt::Debug for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Modulus descriptor p^e with the value p^e cached.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Modulus {
    pub p: u64,
    pub e: u32,
    pub value: u64,
}

impl Modulus {
    pub fn new(p: u64, e: u32) -> Result<Self, RingError> {
        let mut value: u64 = 1;
        for _ in 0..e {
            value = value
                .checked_mul(p)
                .filter(|&v| v < (1u64 << 63))
                .ok_or(RingError::ModulusOverflow(p, e))?;
        }
        Ok(Modulus { p, e, value })
    }

    pub fn big(&self) -> BigInt {
        BigInt::from(self.value)
    }

    pub fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = self.big();
        let r = ((v % &m) + &m) % &m;
        r.to_u64().expect("reduced residue fits u64")
    }
}

/// Element of Z/p^e. Operations are only defined between equal moduli.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Residue {
    pub value: u64,
    pub modulus: Modulus,
}

impl Residue {
    pub fn new(value: u64, modulus: Modulus) -> Self {
        Residue {
            value: value % modulus.value,
            modulus,
        }
    }

    pub fn from_int(v: &BigInt, modulus: Modulus) -> Self {
        Residue {
            value: modulus.reduce_big(v),
            modulus,
        }
    }

    fn check(&self, other: &Residue) -> Result<(), RingError> {
        if self.modulus != other.modulus {
            return Err(RingError::ModulusMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Residue) -> Result<Residue, RingError> {
        self.check(other)?;
        Ok(Residue::new(
            add_mod(self.value, other.value, self.modulus.value),
            self.modulus,
        ))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue, RingError> {
        self.check(other)?;
        Ok(Residue::new(
            sub_mod(self.value, other.value, self.modulus.value),
            self.modulus,
        ))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue, RingError> {
        self.check(other)?;
        Ok(Residue::new(
            mul_mod(self.value, other.value, self.modulus.value),
            self.modulus,
        ))
    }

    pub fn inv(&self) -> Result<Residue, RingError> {
        let v = inv_mod(self.value, self.modulus.value)
            .ok_or(RingError::NotInvertible(self.value, self.modulus.value))?;
        Ok(Residue::new(v, self.modulus))
    }

    pub fn pow(&self, mut e: u64) -> Residue {
        let m = self.modulus.value;
        let mut base = self.value;
        let mut acc = 1u64 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, m);
            }
            base = mul_mod(base, base, m);
            e >>= 1;
        }
        Residue::new(acc, self.modulus)
    }
}

pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - b as u128 % m as u128) % m as u128) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Modular inverse by extended Euclid; `None` when gcd(a, m) > 1.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficient ring abstraction covering Z (big integers) and Z[t].
pub trait CoeffRing: Clone + PartialEq + Eq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_int(v: i64) -> Self;
    fn mul_int(&self, k: &BigInt) -> Self;
    /// The Frobenius lift sigma: identity on Z, t -> t^p on Z[t].
    fn frobenius(&self, p: u64) -> Self;
    fn div_exact(&self, k: &BigInt) -> Result<Self, RingError>;
    /// Reduce every integer into [0, m).
    fn reduce_mod(&self, m: &BigInt) -> Self;
    /// Degree in t; `None` for plain integers.
    fn t_degree(&self) -> Option<i64> {
        None
    }
}

impl CoeffRing for BigInt {
    fn zero() -> Self {
        BigInt::from(0)
    }
    fn one() -> Self {
        BigInt::from(1)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_int(v: i64) -> Self {
        BigInt::from(v)
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self * k
    }
    fn frobenius(&self, _p: u64) -> Self {
        self.clone()
    }
    fn div_exact(&self, k: &BigInt) -> Result<Self, RingError> {
        if num_traits::Zero::is_zero(&(self % k)) {
            Ok(self / k)
        } else {
            Err(RingError::InexactDivision(k.clone()))
        }
    }
    fn reduce_mod(&self, m: &BigInt) -> Self {
        let r = self % m;
        if r.is_negative() {
            r + m
        } else {
            r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expvec_lex_order() {
        let a = ExpVec(vec![0, 1]);
        let b = ExpVec(vec![1, -5]);
        assert!(a < b);
        assert!(ExpVec(vec![-1, 2]) < a);
    }

    #[test]
    fn residue_arithmetic() {
        let m = Modulus::new(3, 2).unwrap();
        assert_eq!(m.value, 9);
        let a = Residue::new(7, m);
        let b = Residue::new(5, m);
        assert_eq!(a.add(&b).unwrap().value, 3);
        assert_eq!(a.sub(&b).unwrap().value, 2);
        assert_eq!(a.mul(&b).unwrap().value, 8);
        assert_eq!(a.inv().unwrap().mul(&a).unwrap().value, 1);
    }

    #[test]
    fn residue_modulus_mismatch_rejected() {
        let a = Residue::new(1, Modulus::new(3, 2).unwrap());
        let b = Residue::new(1, Modulus::new(3, 1).unwrap());
        assert_eq!(a.add(&b), Err(RingError::ModulusMismatch));
    }

    #[test]
    fn modulus_overflow_rejected() {
        assert!(Modulus::new(2, 63).is_err());
        assert!(Modulus::new(2, 62).is_ok());
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (2..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97
            ]
        );
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(4, 5), BigInt::from(0));
        assert_eq!(binomial(0, 0), BigInt::from(1));
    }
}
