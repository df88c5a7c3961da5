//! Brute-force ground truth, independent of the scheme construction:
//! exact constant terms by repeated multiplication, exact series
//! coefficients by the defining recursion, dense modular tables for sweeps,
//! and closed-form sequence generators.

use crate::ring::{inv_mod, mul_mod, sub_mod, ExpVec, LaurentPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle cap exceeded: k = {0} > {1}")]
    CapExceeded(u64, u64),
    #[error("series denominator has a term with negative exponent {0:?}")]
    NotPolynomial(ExpVec),
    #[error("constant term of the series denominator is zero")]
    ZeroConstantTerm,
    #[error("index component out of the tabulated box")]
    OutOfBox,
}

/// Default exact powering caps: desk-scale only.
pub fn ct_cap(n: usize) -> u64 {
    if n <= 2 {
        2000
    } else {
        200
    }
}

/// Exact ct[x^u * q * g^k] by repeated sparse multiplication.
pub fn ct_oracle(
    g: &LaurentPoly<BigInt>,
    q: &LaurentPoly<BigInt>,
    u: &ExpVec,
    k: u64,
) -> Result<BigInt, OracleError> {
    let cap = ct_cap(g.nvars());
    if k > cap {
        return Err(OracleError::CapExceeded(k, cap));
    }
    let mut acc = q.shift(u);
    for _ in 0..k {
        acc = acc.mul(g);
    }
    Ok(acc.constant_term())
}

/// Dense row-major indexing for an integer box [lo, hi] (inclusive).
#[derive(Clone, Debug)]
pub struct BoxIndex {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    strides: Vec<usize>,
    len: usize,
}

impl BoxIndex {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let dims: Vec<usize> = lo
            .iter()
            .zip(&hi)
            .map(|(&a, &b)| usize::try_from(b - a + 1).expect("non-empty box"))
            .collect();
        let mut strides = vec![0usize; dims.len()];
        let mut acc = 1usize;
        for i in (0..dims.len()).rev() {
            strides[i] = acc;
            acc = acc.checked_mul(dims[i]).expect("box fits in memory");
        }
        BoxIndex {
            lo,
            hi,
            strides,
            len: acc,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn offset(&self, e: &ExpVec) -> Option<usize> {
        let mut acc = 0usize;
        for i in 0..self.lo.len() {
            let c = e.0[i];
            if c < self.lo[i] || c > self.hi[i] {
                return None;
            }
            acc += (c - self.lo[i]) as usize * self.strides[i];
        }
        Some(acc)
    }

    pub fn decode(&self, mut offset: usize) -> ExpVec {
        let mut e = Vec::with_capacity(self.lo.len());
        for i in 0..self.lo.len() {
            e.push(self.lo[i] + (offset / self.strides[i]) as i64);
            offset %= self.strides[i];
        }
        ExpVec(e)
    }
}

fn support_box(g: &LaurentPoly<BigInt>) -> (Vec<i64>, Vec<i64>) {
    let n = g.nvars();
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for e in g.support() {
        for i in 0..n {
            lo[i] = lo[i].min(e.0[i]);
            hi[i] = hi[i].max(e.0[i]);
        }
    }
    (lo, hi)
}

/// values[k][i] = coefficient of x^{targets[i]} in g^k mod m, for k <= kmax,
/// computed by dense convolution sweeps (no Cartier machinery involved).
pub struct CtTable {
    pub m: u64,
    pub kmax: u64,
    targets: Vec<ExpVec>,
    values: Vec<Vec<u64>>,
}

impl CtTable {
    pub fn build(g: &LaurentPoly<BigInt>, targets: &[ExpVec], kmax: u64, m: u64) -> CtTable {
        let mut targets: Vec<ExpVec> = targets.to_vec();
        targets.sort();
        targets.dedup();
        let (slo, shi) = support_box(g);
        let k = kmax as i64;
        let index = BoxIndex::new(
            slo.iter().map(|&v| v * k).collect(),
            shi.iter().map(|&v| v * k).collect(),
        );
        let gterms: Vec<(ExpVec, u64)> = g
            .terms()
            .map(|(e, c)| (e.clone(), crate::ring::CoeffRing::reduce_mod(c, &BigInt::from(m)).try_into().unwrap()))
            .collect();

        let mut cur = vec![0u64; index.len()];
        let origin = index.offset(&ExpVec::zero(g.nvars())).unwrap();
        cur[origin] = 1 % m;
        let mut next = vec![0u64; index.len()];
        let mut values = Vec::with_capacity(kmax as usize + 1);

        let read = |buf: &[u64], targets: &[ExpVec]| -> Vec<u64> {
            targets
                .iter()
                .map(|t| index.offset(t).map_or(0, |o| buf[o]))
                .collect()
        };
        values.push(read(&cur, &targets));
        for step in 1..=kmax {
            next.iter_mut().for_each(|v| *v = 0);
            // Support of g^{step-1} lies in (step-1) * [slo, shi].
            let prev_lo: Vec<i64> = slo.iter().map(|&v| v * (step as i64 - 1)).collect();
            let prev_hi: Vec<i64> = shi.iter().map(|&v| v * (step as i64 - 1)).collect();
            let sub = BoxIndex::new(prev_lo, prev_hi);
            for off in 0..sub.len() {
                let e = sub.decode(off);
                let src = index.offset(&e).unwrap();
                let c = cur[src];
                if c == 0 {
                    continue;
                }
                for (ge, gc) in &gterms {
                    let dst = index.offset(&e.add(ge)).unwrap();
                    next[dst] = (next[dst] + mul_mod(c, *gc, m)) % m;
                }
            }
            std::mem::swap(&mut cur, &mut next);
            values.push(read(&cur, &targets));
        }
        CtTable {
            m,
            kmax,
            targets,
            values,
        }
    }

    /// Coefficient of x^e in g^k mod m; `None` when e was not a target.
    pub fn get(&self, e: &ExpVec, k: u64) -> Option<u64> {
        let i = self.targets.binary_search(e).ok()?;
        Some(self.values[k as usize][i])
    }
}

/// Exact power-series coefficients of x^u * Q / P^rho over the rationals,
/// tabulated on the box [0, bound]. Denominators are powers of P(0).
pub struct SeriesTable {
    index: BoxIndex,
    values: Vec<BigRational>,
}

impl SeriesTable {
    pub fn build(
        pden: &LaurentPoly<BigInt>,
        qnum: &LaurentPoly<BigInt>,
        rho: u32,
        bound: &[i64],
    ) -> Result<SeriesTable, OracleError> {
        for e in pden.support() {
            if e.0.iter().any(|&c| c < 0) {
                return Err(OracleError::NotPolynomial(e.clone()));
            }
        }
        let d = pden.pow(rho as u64, None);
        let d0 = d.constant_term();
        if d0.is_zero() {
            return Err(OracleError::ZeroConstantTerm);
        }
        let d0 = BigRational::from(d0);
        let dterms: Vec<(ExpVec, BigInt)> = d
            .terms()
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        let index = BoxIndex::new(vec![0; bound.len()], bound.to_vec());
        let mut values = vec![BigRational::zero(); index.len()];
        for off in 0..index.len() {
            let e = index.decode(off);
            let mut acc = BigRational::from(qnum.coeff(&e));
            for (de, dc) in &dterms {
                let prev = e.sub(de);
                if let Some(o) = index.offset(&prev) {
                    acc -= BigRational::from(dc.clone()) * &values[o];
                }
            }
            values[off] = acc / &d0;
        }
        Ok(SeriesTable { index, values })
    }

    pub fn get(&self, e: &ExpVec) -> Result<&BigRational, OracleError> {
        self.index
            .offset(e)
            .map(|o| &self.values[o])
            .ok_or(OracleError::OutOfBox)
    }
}

/// Exact coefficient of x^K in Q/P as a rational with P_0-power denominator.
pub fn series_oracle(
    pden: &LaurentPoly<BigInt>,
    qnum: &LaurentPoly<BigInt>,
    k: &ExpVec,
) -> Result<BigRational, OracleError> {
    if k.0.iter().any(|&c| c < 0) {
        return Err(OracleError::OutOfBox);
    }
    let cap = 120i64;
    if k.0.iter().sum::<i64>() > cap {
        return Err(OracleError::CapExceeded(
            k.0.iter().sum::<i64>() as u64,
            cap as u64,
        ));
    }
    let table = SeriesTable::build(pden, qnum, 1, &k.0)?;
    table.get(k).cloned()
}

/// Modular series table: coefficients of x^u / P^rho mod m on [0, bound].
pub struct SeriesTableMod {
    index: BoxIndex,
    values: Vec<u64>,
}

impl SeriesTableMod {
    pub fn build(
        pden: &LaurentPoly<BigInt>,
        qnum: &LaurentPoly<BigInt>,
        rho: u32,
        m: u64,
        bound: &[i64],
    ) -> Result<SeriesTableMod, OracleError> {
        let d = pden.pow(rho as u64, Some(&BigInt::from(m)));
        let big_m = BigInt::from(m);
        let reduce = |c: &BigInt| -> u64 { u64::try_from(crate::ring::CoeffRing::reduce_mod(c, &big_m)).unwrap() };
        let d0 = reduce(&d.constant_term());
        let inv0 = inv_mod(d0, m).ok_or(OracleError::ZeroConstantTerm)?;
        let dterms: Vec<(ExpVec, u64)> = d
            .terms()
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, c)| (e.clone(), reduce(c)))
            .collect();
        let index = BoxIndex::new(vec![0; bound.len()], bound.to_vec());
        let mut values = vec![0u64; index.len()];
        for off in 0..index.len() {
            let e = index.decode(off);
            let mut acc = reduce(&qnum.coeff(&e));
            for (de, dc) in &dterms {
                if let Some(o) = index.offset(&e.sub(de)) {
                    acc = sub_mod(acc, mul_mod(*dc, values[o], m), m);
                }
            }
            values[off] = mul_mod(acc, inv0, m);
        }
        Ok(SeriesTableMod { index, values })
    }

    pub fn get(&self, e: &ExpVec) -> Option<u64> {
        self.index.offset(e).map(|o| self.values[o])
    }
}

/// Named sequences with closed-form exact generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceSpec {
    CentralBinomial,
    Franel(u32),
    Apery,
    MultinomialSquare(u32),
    PowerOfTwo,
}

impl SequenceSpec {
    pub fn name(&self) -> String {
        match self {
            SequenceSpec::CentralBinomial => "central-binomial".into(),
            SequenceSpec::Franel(l) => format!("franel({l})"),
            SequenceSpec::Apery => "apery".into(),
            SequenceSpec::MultinomialSquare(n) => format!("multinomial-square({n})"),
            SequenceSpec::PowerOfTwo => "power-of-2".into(),
        }
    }
}

/// Factorials 0!..kmax! for binomial assembly.
pub struct Factorials {
    f: Vec<BigInt>,
}

impl Factorials {
    pub fn upto(kmax: u64) -> Factorials {
        let mut f = Vec::with_capacity(kmax as usize + 1);
        f.push(BigInt::one());
        for i in 1..=kmax {
            let last = f.last().unwrap() * BigInt::from(i);
            f.push(last);
        }
        Factorials { f }
    }

    pub fn binomial(&self, n: u64, k: u64) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        &self.f[n as usize] / (&self.f[k as usize] * &self.f[(n - k) as usize])
    }

    pub fn factorial(&self, n: u64) -> &BigInt {
        &self.f[n as usize]
    }
}

pub fn apery_number(fac: &Factorials, k: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for m in 0..=k {
        let b1 = fac.binomial(k, m);
        let b2 = fac.binomial(k + m, m);
        acc += &b1 * &b1 * &b2 * &b2;
    }
    acc
}

/// A_0..A_kmax by the three-term recurrence
/// (n+1)^3 A_{n+1} = (34n^3 + 51n^2 + 27n + 5) A_n - n^3 A_{n-1},
/// whose division is exact; O(kmax) big multiplications instead of the
/// O(kmax^2) of the binomial sum.
pub fn apery_table(kmax: u64) -> Vec<BigInt> {
    let mut a = Vec::with_capacity(kmax as usize + 1);
    a.push(BigInt::one());
    if kmax >= 1 {
        a.push(BigInt::from(5));
    }
    for n in 1..kmax {
        let n = BigInt::from(n);
        let c1 = (BigInt::from(34) * &n * &n * &n)
            + BigInt::from(51) * &n * &n
            + BigInt::from(27) * &n
            + 5;
        let c2 = &n * &n * &n;
        let next = (c1 * &a[a.len() - 1] - c2 * &a[a.len() - 2])
            / ((&n + 1) * (&n + 1) * (&n + 1));
        a.push(next);
    }
    a
}

/// A'_k = sum_m binom(k,m)^2 binom(k+m,m)^2 * 2(H_{k+m} - H_{k-m}), with H_n
/// the n-th harmonic number. A'_0 = 0, A'_1 = 12, A'_2 = 210.
pub fn apery_prime(fac: &Factorials, k: u64) -> BigRational {
    // h[n] = H_n for n <= 2k.
    let mut h = vec![BigRational::zero()];
    for n in 1..=2 * k {
        let prev = h[(n - 1) as usize].clone();
        h.push(prev + BigRational::new(BigInt::one(), BigInt::from(n)));
    }
    let mut acc = BigRational::zero();
    for m in 0..=k {
        let b1 = fac.binomial(k, m);
        let b2 = fac.binomial(k + m, m);
        let span = &h[(k + m) as usize] - &h[(k - m) as usize];
        acc += BigRational::from(&b1 * &b1 * &b2 * &b2 * BigInt::from(2)) * span;
    }
    acc
}

fn multinomial_square_table(fac: &Factorials, n: u32, kmax: u64) -> Vec<BigInt> {
    // Sum over compositions of k into n parts of the squared multinomial,
    // as a DP over the number of parts: v_m[k] = sum_j binom(k,j)^2
    // v_{m-1}[k-j], with v_1 = 1.
    let mut v = vec![BigInt::one(); kmax as usize + 1];
    for _ in 1..n {
        v = (0..=kmax)
            .map(|k| {
                let mut acc = BigInt::zero();
                for j in 0..=k {
                    let b = fac.binomial(k, j);
                    acc += &b * &b * &v[(k - j) as usize];
                }
                acc
            })
            .collect();
    }
    v
}

pub fn sequence_values(spec: &SequenceSpec, kmax: u64) -> Vec<BigInt> {
    let fac = Factorials::upto(2 * kmax + 1);
    match spec {
        SequenceSpec::Apery => apery_table(kmax),
        SequenceSpec::MultinomialSquare(n) => multinomial_square_table(&fac, *n, kmax),
        _ => (0..=kmax)
            .map(|k| match spec {
                SequenceSpec::CentralBinomial => fac.binomial(2 * k, k),
                SequenceSpec::Franel(l) => {
                    let mut acc = BigInt::zero();
                    for m in 0..=k {
                        let b = fac.binomial(k, m);
                        let mut t = BigInt::one();
                        for _ in 0..*l {
                            t *= &b;
                        }
                        acc += t;
                    }
                    acc
                }
                SequenceSpec::PowerOfTwo => BigInt::from(2).pow(k as u32),
                _ => unreachable!(),
            })
            .collect(),
    }
}

/// The Laurent polynomial whose constant-term sequence `spec` is, where one
/// exists; used to cross-check formulas against ct_oracle.
pub fn sequence_polynomial(spec: &SequenceSpec) -> Option<LaurentPoly<BigInt>> {
    let lift = |n: usize, terms: Vec<(Vec<i64>, i64)>| {
        LaurentPoly::from_terms(
            n,
            terms
                .into_iter()
                .map(|(e, c)| (ExpVec(e), BigInt::from(c))),
        )
    };
    match spec {
        // (1+x)(1+1/x) = x + 2 + 1/x.
        SequenceSpec::CentralBinomial => {
            Some(lift(1, vec![(vec![1], 1), (vec![0], 2), (vec![-1], 1)]))
        }
        // sum binom(k,m)^l = ct[(1+x_1)...(1+x_{l-1})(1+1/(x_1...x_{l-1}))]^k.
        SequenceSpec::Franel(l) => {
            let n = *l as usize - 1;
            let mut g = LaurentPoly::one(n);
            for i in 0..n {
                let mut e = vec![0i64; n];
                e[i] = 1;
                g = g.mul(&lift(n, vec![(vec![0; n], 1), (e, 1)]));
            }
            g = g.mul(&lift(n, vec![(vec![0; n], 1), (vec![-1; n], 1)]));
            Some(g)
        }
        SequenceSpec::Apery => {
            let f = |terms: Vec<(Vec<i64>, i64)>| lift(3, terms);
            let a = f(vec![(vec![1, 0, 0], 1), (vec![0, 1, 0], 1)]);
            let b = f(vec![(vec![0, 0, 1], 1), (vec![0, 0, 0], 1)]);
            let c = f(vec![(vec![1, 0, 0], 1), (vec![0, 1, 0], 1), (vec![0, 0, 1], 1)]);
            let d = f(vec![(vec![0, 1, 0], 1), (vec![0, 0, 1], 1), (vec![0, 0, 0], 1)]);
            let inv = LaurentPoly::monomial(ExpVec(vec![-1, -1, -1]), BigInt::one());
            Some(a.mul(&b).mul(&c).mul(&d).mul(&inv))
        }
        // sum multinom(k; k_1..k_n)^2 =
        // ct[(1 + x_1 + ... + x_{n-1})(1 + 1/x_1 + ... + 1/x_{n-1})]^k.
        SequenceSpec::MultinomialSquare(n) => {
            let n = *n as usize - 1;
            if n == 0 {
                return None;
            }
            let mut up = vec![(vec![0i64; n], 1i64)];
            let mut down = vec![(vec![0i64; n], 1i64)];
            for i in 0..n {
                let mut e = vec![0i64; n];
                e[i] = 1;
                up.push((e.clone(), 1));
                down.push((e.iter().map(|&v| -v).collect(), 1));
            }
            Some(lift(n, up).mul(&lift(n, down)))
        }
        SequenceSpec::PowerOfTwo => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{canonical_vars, parse_poly};

    fn ev(v: &[i64]) -> ExpVec {
        ExpVec(v.to_vec())
    }

    fn apery_g() -> LaurentPoly<BigInt> {
        parse_poly(
            "(x1+x2)*(x3+1)*(x1+x2+x3)*(x2+x3+1)/(x1*x2*x3)",
            &canonical_vars(3),
        )
        .unwrap()
    }

    #[test]
    fn ct_oracle_trinomial() {
        let g = parse_poly("x1 + 2 + x1^-1", &canonical_vars(1)).unwrap();
        let one = LaurentPoly::one(1);
        assert_eq!(
            ct_oracle(&g, &one, &ev(&[0]), 3).unwrap(),
            BigInt::from(20)
        );
        // ct[g^k] = binom(2k, k).
        let fac = Factorials::upto(20);
        for k in 0..=10u64 {
            assert_eq!(
                ct_oracle(&g, &one, &ev(&[0]), k).unwrap(),
                fac.binomial(2 * k, k)
            );
        }
    }

    #[test]
    fn ct_oracle_apery() {
        let g = apery_g();
        let one = LaurentPoly::one(3);
        let fac = Factorials::upto(20);
        assert_eq!(ct_oracle(&g, &one, &ev(&[0, 0, 0]), 2).unwrap(), BigInt::from(73));
        for k in 0..=6u64 {
            assert_eq!(
                ct_oracle(&g, &one, &ev(&[0, 0, 0]), k).unwrap(),
                apery_number(&fac, k),
                "k = {k}"
            );
        }
    }

    #[test]
    fn ct_oracle_franel() {
        // (1+x)(1+y)(1+1/(xy)) has ct[g^k] = Franel numbers sum binom(k,m)^3.
        let g = parse_poly(
            "(1+x1)*(1+x2)*(1+x1^-1*x2^-1)",
            &canonical_vars(2),
        )
        .unwrap();
        let one = LaurentPoly::one(2);
        assert_eq!(
            ct_oracle(&g, &one, &ev(&[0, 0]), 2).unwrap(),
            BigInt::from(10)
        );
        let franel = sequence_values(&SequenceSpec::Franel(3), 8);
        for k in 0..=8u64 {
            assert_eq!(
                ct_oracle(&g, &one, &ev(&[0, 0]), k).unwrap(),
                franel[k as usize]
            );
        }
    }

    #[test]
    fn ct_oracle_cap() {
        let g = apery_g();
        let one = LaurentPoly::one(3);
        assert_eq!(
            ct_oracle(&g, &one, &ev(&[0, 0, 0]), 201),
            Err(OracleError::CapExceeded(201, 200))
        );
    }

    #[test]
    fn ct_table_matches_exact() {
        let g = apery_g();
        let one = LaurentPoly::one(3);
        let m = 125u64;
        let t = CtTable::build(&g, &[ev(&[0, 0, 0]), ev(&[1, 0, -1])], 12, m);
        for k in 0..=12u64 {
            let exact = ct_oracle(&g, &one, &ev(&[0, 0, 0]), k).unwrap();
            let expect = u64::try_from(crate::ring::CoeffRing::reduce_mod(&exact, &BigInt::from(m))).unwrap();
            assert_eq!(t.get(&ev(&[0, 0, 0]), k), Some(expect), "k = {k}");
            // Second target: coefficient of x^{(1,0,-1)} in g^k equals
            // ct[x^{(-1,0,1)} g^k].
            let exact2 = ct_oracle(&g, &one, &ev(&[-1, 0, 1]), k).unwrap();
            let expect2 = u64::try_from(crate::ring::CoeffRing::reduce_mod(&exact2, &BigInt::from(m))).unwrap();
            assert_eq!(t.get(&ev(&[1, 0, -1]), k), Some(expect2), "k = {k}");
        }
    }

    #[test]
    fn series_oracle_binomials() {
        let v2 = canonical_vars(2);
        let pden = parse_poly("1 - x1 - x2", &v2).unwrap();
        let one = LaurentPoly::one(2);
        let fac = Factorials::upto(20);
        for k in 0..=8i64 {
            assert_eq!(
                series_oracle(&pden, &one, &ev(&[k, k])).unwrap(),
                BigRational::from(fac.binomial(2 * k as u64, k as u64))
            );
        }
        assert_eq!(
            series_oracle(&pden, &one, &ev(&[3, 3])).unwrap(),
            BigRational::from(BigInt::from(20))
        );
    }

    #[test]
    fn series_oracle_rational_denominator() {
        let v = canonical_vars(1);
        let pden = parse_poly("2 - x1", &v).unwrap();
        let one = LaurentPoly::one(1);
        assert_eq!(
            series_oracle(&pden, &one, &ev(&[3])).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(16))
        );
        assert_eq!(
            series_oracle(&pden, &one, &ev(&[0])).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(2))
        );
    }

    #[test]
    fn series_oracle_cap() {
        let v = canonical_vars(1);
        let pden = parse_poly("1 - x1", &v).unwrap();
        let one = LaurentPoly::one(1);
        assert!(matches!(
            series_oracle(&pden, &one, &ev(&[121])),
            Err(OracleError::CapExceeded(121, 120))
        ));
    }

    #[test]
    fn series_table_mod_matches_exact() {
        let v2 = canonical_vars(2);
        let pden = parse_poly("1 - x1 - x2", &v2).unwrap();
        let num = LaurentPoly::monomial(ev(&[0, 1]), BigInt::one());
        let t = SeriesTableMod::build(&pden, &num, 2, 9, &[6, 6]).unwrap();
        let exact = SeriesTable::build(
            &pden,
            &LaurentPoly::monomial(ev(&[0, 1]), BigInt::one()),
            2,
            &[6, 6],
        )
        .unwrap();
        for a in 0..=6i64 {
            for b in 0..=6i64 {
                let e = ev(&[a, b]);
                let x = exact.get(&e).unwrap();
                assert!(x.is_integer());
                let expect =
                    u64::try_from(crate::ring::CoeffRing::reduce_mod(&x.to_integer(), &BigInt::from(9)))
                        .unwrap();
                assert_eq!(t.get(&e), Some(expect), "at {e:?}");
            }
        }
    }

    #[test]
    fn apery_sequence_values() {
        let fac = Factorials::upto(10);
        let first: Vec<BigInt> = (0..5).map(|k| apery_number(&fac, k)).collect();
        assert_eq!(
            first,
            vec![
                BigInt::from(1),
                BigInt::from(5),
                BigInt::from(73),
                BigInt::from(1445),
                BigInt::from(33001)
            ]
        );
    }

    #[test]
    fn apery_table_matches_binomial_sum() {
        let fac = Factorials::upto(120);
        let table = apery_table(60);
        for k in 0..=60u64 {
            assert_eq!(table[k as usize], apery_number(&fac, k), "k={k}");
        }
    }

    #[test]
    fn apery_prime_values() {
        let fac = Factorials::upto(10);
        assert_eq!(apery_prime(&fac, 0), BigRational::zero());
        // k = 1: m = 1 term is 1 * 4 * 2(H_2 - H_0) = 8 * 3/2 = 12.
        assert_eq!(apery_prime(&fac, 1), BigRational::from(BigInt::from(12)));
        assert_eq!(apery_prime(&fac, 2), BigRational::from(BigInt::from(210)));
    }

    #[test]
    fn multinomial_square_values() {
        // n = 2 gives central binomials: sum binom(k,j)^2 = binom(2k,k).
        let vals = sequence_values(&SequenceSpec::MultinomialSquare(2), 8);
        let cb = sequence_values(&SequenceSpec::CentralBinomial, 8);
        assert_eq!(vals, cb);
        // n = 3, k = 2: sum over compositions of multinomial^2:
        // (2;2,0,0)x3 -> 1 each, (2;1,1,0)x3 -> 4 each: 3 + 12 = 15.
        let v3 = sequence_values(&SequenceSpec::MultinomialSquare(3), 2);
        assert_eq!(v3[2], BigInt::from(15));
    }

    #[test]
    fn central_binomial_polynomial_matches() {
        let g = sequence_polynomial(&SequenceSpec::CentralBinomial).unwrap();
        let vals = sequence_values(&SequenceSpec::CentralBinomial, 6);
        let one = LaurentPoly::one(1);
        for k in 0..=6u64 {
            assert_eq!(
                ct_oracle(&g, &one, &ExpVec::zero(1), k).unwrap(),
                vals[k as usize]
            );
        }
    }
}
