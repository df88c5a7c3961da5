use super::{CoeffRing, ExpVec, RingError};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// Multivariate Laurent polynomial: a sorted map from exponent vectors to
/// nonzero coefficients. The coefficient ring is Z or Z[t].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentPoly<C: CoeffRing> {
    n: usize,
    terms: BTreeMap<ExpVec, C>,
}

impl<C: CoeffRing> LaurentPoly<C> {
    pub fn zero(n: usize) -> Self {
        LaurentPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(ExpVec::zero(n), C::one())
    }

    pub fn monomial(e: ExpVec, c: C) -> Self {
        let n = e.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        LaurentPoly { n, terms }
    }

    pub fn from_terms(n: usize, it: impl IntoIterator<Item = (ExpVec, C)>) -> Self {
        let mut poly = Self::zero(n);
        for (e, c) in it {
            assert_eq!(e.len(), n, "exponent vector length mismatch");
            poly.add_term(e, c);
        }
        poly
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &C)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &ExpVec> {
        self.terms.keys()
    }

    pub fn coeff(&self, e: &ExpVec) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&ExpVec::zero(self.n))
    }

    pub fn add_term(&mut self, e: ExpVec, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        if self.n != other.n {
            return Err(RingError::VariableCountMismatch(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (e1, c1) in &small.terms {
            for (e2, c2) in &large.terms {
                out.add_term(e1.add(e2), c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("variable count mismatch")
    }

    /// Binary powering; with `modulus` given, coefficients are reduced into
    /// [0, m) after every multiplication.
    pub fn pow(&self, e: u64, modulus: Option<&BigInt>) -> Self {
        let reduce = |p: Self| match modulus {
            Some(m) => p.reduce_mod(m),
            None => p,
        };
        let mut acc = Self::one(self.n);
        let mut base = reduce(self.clone());
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = reduce(acc.mul(&base));
            }
            e >>= 1;
            if e > 0 {
                base = reduce(base.mul(&base));
            }
        }
        acc
    }

    /// Full Frobenius: every exponent vector scaled by p and sigma applied to
    /// the coefficients (t -> t^p); produces f^sigma(x^p).
    pub fn frobenius(&self, p: u64) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.scale(p as i64), c.frobenius(p)))
                .collect(),
        }
    }

    /// Sigma on coefficients only, x untouched; produces f^sigma(x).
    pub fn coeff_frobenius(&self, p: u64) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.frobenius(p)))
                .collect(),
        }
    }

    /// Cartier selection: keep terms with exponent vector divisible by p
    /// componentwise and divide those exponents by p. Coefficients pass
    /// through untouched (the operator acts on x only).
    pub fn cartier_select(&self, p: u64) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.divisible_by(p as i64))
                .map(|(e, c)| (e.div_exact(p as i64), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul(c));
        }
        out
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        let mut out = Self::zero(self.n);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.mul_int(k));
        }
        out
    }

    pub fn div_exact_int(&self, k: &BigInt) -> Result<Self, RingError> {
        let mut terms = BTreeMap::new();
        for (e, a) in &self.terms {
            terms.insert(e.clone(), a.div_exact(k)?);
        }
        Ok(LaurentPoly { n: self.n, terms })
    }

    pub fn reduce_mod(&self, m: &BigInt) -> Self {
        let mut out = Self::zero(self.n);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.reduce_mod(m));
        }
        out
    }

    /// Shift every exponent by u (multiplication by the monomial x^u).
    pub fn shift(&self, u: &ExpVec) -> Self {
        LaurentPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.add(u), c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Lp = LaurentPoly<BigInt>;

    fn uni(terms: &[(i64, i64)]) -> Lp {
        Lp::from_terms(
            1,
            terms
                .iter()
                .map(|&(e, c)| (ExpVec(vec![e]), BigInt::from(c))),
        )
    }

    fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Lp {
        let mut p = Lp::zero(n);
        for _ in 0..rng.gen_range(1..6) {
            let e = ExpVec((0..n).map(|_| rng.gen_range(-3..4)).collect());
            p.add_term(e, BigInt::from(rng.gen_range(-9i64..10)));
        }
        p
    }

    #[test]
    fn binomial_square() {
        let a = uni(&[(1, 1), (-1, 1)]);
        assert_eq!(a.mul(&a), uni(&[(2, 1), (0, 2), (-2, 1)]));
    }

    #[test]
    fn zero_annihilates() {
        let a = uni(&[(1, 3), (0, -2)]);
        assert!(a.mul(&Lp::zero(1)).is_zero());
    }

    #[test]
    fn mismatched_variable_counts_rejected() {
        let a = uni(&[(0, 1)]);
        let b = Lp::one(2);
        assert!(matches!(
            a.checked_mul(&b),
            Err(RingError::VariableCountMismatch(1, 2))
        ));
    }

    #[test]
    fn pow_basics() {
        let g = uni(&[(1, 1), (0, 2), (-1, 1)]);
        assert_eq!(g.pow(0, None), Lp::one(1));
        assert_eq!(
            g.pow(2, None),
            uni(&[(2, 1), (1, 4), (0, 6), (-1, 4), (-2, 1)])
        );
        // ct[(x+2+1/x)^3] = C(6,3) = 20
        assert_eq!(g.pow(3, None).constant_term(), BigInt::from(20));
    }

    #[test]
    fn pow_splits_additively() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_poly(&mut rng, 2);
            let e1 = rng.gen_range(0..4);
            let e2 = rng.gen_range(0..4);
            assert_eq!(a.pow(e1 + e2, None), a.pow(e1, None).mul(&a.pow(e2, None)));
        }
    }

    #[test]
    fn ring_axioms_spot_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_poly(&mut rng, 2);
            let b = random_poly(&mut rng, 2);
            let c = random_poly(&mut rng, 2);
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }
    }

    #[test]
    fn frobenius_exponent_scaling() {
        let g = uni(&[(1, 1), (0, 2), (-1, 1)]);
        assert_eq!(g.frobenius(3), uni(&[(3, 1), (0, 2), (-3, 1)]));
    }

    #[test]
    fn frobenius_on_t_coefficients() {
        use crate::ring::TPoly;
        // 1 - t*x under p=2 becomes 1 - t^2*x^2.
        let f = LaurentPoly::<TPoly>::from_terms(
            1,
            [
                (ExpVec(vec![0]), TPoly::one()),
                (ExpVec(vec![1]), TPoly::t().neg()),
            ],
        );
        let expect = LaurentPoly::<TPoly>::from_terms(
            1,
            [
                (ExpVec(vec![0]), TPoly::one()),
                (ExpVec(vec![2]), TPoly::t().mul(&TPoly::t()).neg()),
            ],
        );
        assert_eq!(f.frobenius(2), expect);
    }

    #[test]
    fn frobenius_congruence_mod_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &p in &[2u64, 3, 5] {
            for _ in 0..5 {
                let a = random_poly(&mut rng, 2);
                let lhs = a.pow(p, None);
                let rhs = a.frobenius(p);
                let diff = lhs.sub(&rhs).reduce_mod(&BigInt::from(p));
                assert!(diff.is_zero(), "a^p != frobenius(a) mod {p}");
            }
        }
    }

    #[test]
    fn modular_pow_matches_exact_then_reduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = BigInt::from(27);
        for _ in 0..10 {
            let a = random_poly(&mut rng, 2);
            let e = rng.gen_range(0..6);
            assert_eq!(a.pow(e, Some(&m)), a.pow(e, None).reduce_mod(&m));
        }
    }

    #[test]
    fn cartier_select_examples() {
        // 3x^4 - 2x^3 + 5, p=2 -> 3x^2 + 5
        let h = uni(&[(4, 3), (3, -2), (0, 5)]);
        assert_eq!(h.cartier_select(2), uni(&[(2, 3), (0, 5)]));

        let h2 = Lp::from_terms(
            2,
            [
                (ExpVec(vec![2, 4]), BigInt::from(1)),
                (ExpVec(vec![1, 2]), BigInt::from(1)),
            ],
        );
        assert_eq!(
            h2.cartier_select(2),
            Lp::monomial(ExpVec(vec![1, 2]), BigInt::from(1))
        );
    }

    #[test]
    fn cartier_commutation_lemma() {
        // C(K(x^p) L(x)) = K(x) C(L(x)) for polynomials.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let p = 3u64;
        for _ in 0..10 {
            let k = random_poly(&mut rng, 2);
            let l = random_poly(&mut rng, 2);
            let kp = LaurentPoly {
                n: k.n,
                terms: k
                    .terms
                    .iter()
                    .map(|(e, c)| (e.scale(p as i64), c.clone()))
                    .collect(),
            };
            let lhs = kp.mul(&l).cartier_select(p);
            let rhs = k.mul(&l.cartier_select(p));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn negative_coefficient_reduction() {
        let a = uni(&[(0, -1)]);
        let r = a.reduce_mod(&BigInt::from(5));
        assert_eq!(r.constant_term(), BigInt::from(4));
    }
}
