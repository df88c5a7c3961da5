use super::{CoeffRing, RingError};
use num_bigint::BigInt;
use std::fmt;

/// Dense univariate polynomial in t with big-integer coefficients,
/// index = degree. Trailing zeros are trimmed; the zero polynomial has
/// degree -1.
#[derive(Clone, PartialEq, Eq)]
pub struct TPoly {
    coeffs: Vec<BigInt>,
}

impl TPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn constant(c: BigInt) -> Self {
        TPoly::new(vec![c])
    }

    pub fn t() -> Self {
        TPoly::new(vec![BigInt::zero(), BigInt::from(1)])
    }

    /// Degree with -1 as the zero sentinel.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Multiply by t^l.
    pub fn shift(&self, l: usize) -> TPoly {
        if self.is_zero() {
            return TPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); l];
        coeffs.extend(self.coeffs.iter().cloned());
        TPoly { coeffs }
    }

    /// Substitute t -> t^p.
    pub fn subst_t_pow(&self, p: u64) -> TPoly {
        if self.is_zero() {
            return TPoly::zero();
        }
        let p = p as usize;
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * p + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * p] = c.clone();
        }
        TPoly { coeffs }
    }
}

impl CoeffRing for TPoly {
    fn zero() -> Self {
        TPoly { coeffs: vec![] }
    }

    fn one() -> Self {
        TPoly::constant(BigInt::from(1))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) + rhs.coeff(i));
        }
        TPoly::new(coeffs)
    }

    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i) - rhs.coeff(i));
        }
        TPoly::new(coeffs)
    }

    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return TPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TPoly::new(coeffs)
    }

    fn neg(&self) -> Self {
        TPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    fn from_int(v: i64) -> Self {
        TPoly::constant(BigInt::from(v))
    }

    fn mul_int(&self, k: &BigInt) -> Self {
        TPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    fn frobenius(&self, p: u64) -> Self {
        self.subst_t_pow(p)
    }

    fn div_exact(&self, k: &BigInt) -> Result<Self, RingError> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !(c % k).is_zero() {
                return Err(RingError::InexactDivision(k.clone()));
            }
            coeffs.push(c / k);
        }
        Ok(TPoly::new(coeffs))
    }

    fn reduce_mod(&self, m: &BigInt) -> Self {
        TPoly::new(
            self.coeffs
                .iter()
                .map(|c| CoeffRing::reduce_mod(c, m))
                .collect(),
        )
    }

    fn t_degree(&self) -> Option<i64> {
        Some(self.degree())
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Split t^l * q(t) along base-p blocks of t-degrees:
/// t^l q(t) = sum_m lambda_m(t) t^{pm} with deg lambda_m < p.
/// Requires deg(t^l q) <= p*rho - 1 so that m < rho suffices.
pub fn tpoly_digit_slice(q: &TPoly, p: u64, l: u32, rho: u32) -> Result<Vec<TPoly>, RingError> {
    let p = p as usize;
    let rho = rho as usize;
    let l = l as usize;
    let shifted = q.shift(l);
    let bound = (p * rho) as i64 - 1;
    if shifted.degree() > bound {
        return Err(RingError::DegreeOverflow {
            got: shifted.degree(),
            bound,
        });
    }
    let mut slices = Vec::with_capacity(rho);
    for m in 0..rho {
        let block: Vec<BigInt> = (0..p).map(|d| shifted.coeff(p * m + d)).collect();
        slices.push(TPoly::new(block));
    }
    Ok(slices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(v: &[i64]) -> TPoly {
        TPoly::new(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn zero_degree_sentinel() {
        assert_eq!(TPoly::zero().degree(), -1);
        assert_eq!(tp(&[0, 0]).degree(), -1);
        assert_eq!(tp(&[1, 2]).degree(), 1);
    }

    #[test]
    fn mul_and_subst() {
        let a = tp(&[1, 1]);
        assert_eq!(a.mul(&a), tp(&[1, 2, 1]));
        assert_eq!(tp(&[1, -1]).subst_t_pow(3), tp(&[1, 0, 0, -1]));
    }

    #[test]
    fn digit_slice_low_degree() {
        // q = 1 + 2t, p = 3, l = 0: fits in the first block.
        let s = tpoly_digit_slice(&tp(&[1, 2]), 3, 0, 2).unwrap();
        assert_eq!(s, vec![tp(&[1, 2]), TPoly::zero()]);
    }

    #[test]
    fn digit_slice_shifted() {
        // t * t^4 = t^5 = t^2 * t^{3*1}.
        let s = tpoly_digit_slice(&tp(&[0, 0, 0, 0, 1]), 3, 1, 2).unwrap();
        assert_eq!(s, vec![TPoly::zero(), tp(&[0, 0, 1])]);
    }

    #[test]
    fn digit_slice_reassembles_exactly() {
        let q = tp(&[3, -1, 4, 1, -5, 9, 2]);
        let (p, rho) = (3u64, 3u32);
        for l in 0..rho {
            let slices = tpoly_digit_slice(&q, p, l, rho).unwrap();
            let mut acc = TPoly::zero();
            for (m, lam) in slices.iter().enumerate() {
                assert!(lam.degree() < p as i64);
                acc = acc.add(&lam.shift(p as usize * m));
            }
            assert_eq!(acc, q.shift(l as usize));
        }
    }

    #[test]
    fn digit_slice_degree_overflow() {
        let q = tp(&[1, 0, 0, 0, 0, 0, 1]); // degree 6
        assert!(tpoly_digit_slice(&q, 3, 2, 2).is_err());
    }
}
