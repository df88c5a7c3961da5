//! Congruence verification suites: digit-product Lucas congruences, Gessel's
//! mod p^2 Apery congruence, the two-state 2^k scheme, and the Hasse-Witt
//! recursion mod p.

use super::oracle::{
    apery_prime, apery_table, sequence_values, CtTable, Factorials, SequenceSpec,
};
use super::{base_p_digits, EngineError, Report};
use crate::ring::{add_mod, inv_mod, mul_mod, pow_mod, CoeffRing, ExpVec, LaurentPoly};
use crate::scheme::build_hasse_witt;
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

fn reduce(v: &BigInt, m: u64) -> u64 {
    CoeffRing::reduce_mod(v, &BigInt::from(m)).to_u64().unwrap()
}

/// a_k = a_{k_m} ... a_{k_0} mod p over the base-p digits of k.
pub fn lucas_check(spec: &SequenceSpec, p: u64, kmax: u64) -> Report {
    let values = sequence_values(spec, kmax);
    let residues: Vec<u64> = values.iter().map(|v| reduce(v, p)).collect();
    let mut report = Report::new(format!("lucas {} p={} kmax={}", spec.name(), p, kmax));
    for k in 0..=kmax {
        let digits = base_p_digits(&BigUint::from(k), p);
        let prod = digits
            .iter()
            .fold(1 % p, |acc, &d| mul_mod(acc, residues[d as usize], p));
        report.check(k, "-", residues[k as usize], prod, residues[k as usize] == prod);
    }
    report
}

/// Gessel: A_{kp+l} = A_l A_k + p A'_l k A_k mod p^2, with A'_l the exact
/// rational sum involving 2(H_{l+m} - H_{l-m}). For l >= (p+1)/2 the harmonic
/// denominators may carry one factor of p, so p A'_l is reduced as a single
/// p-integral rational.
pub fn gessel_check(p: u64, kmax: u64) -> Result<Report, EngineError> {
    if p == 2 || !crate::ring::is_prime(p) {
        return Err(EngineError::OddPrimeRequired(p));
    }
    let m = p * p;
    let top = kmax * p + p - 1;
    let fac = Factorials::upto(2 * p);
    let a: Vec<u64> = apery_table(top).iter().map(|v| reduce(v, m)).collect();
    let p_a_prime: Vec<u64> = (0..p)
        .map(|l| {
            let v = apery_prime(&fac, l) * num_rational::BigRational::from(BigInt::from(p));
            let num = reduce(v.numer(), m);
            let den = inv_mod(reduce(v.denom(), m), m).expect("p A'_l is p-integral");
            mul_mod(num, den, m)
        })
        .collect();
    let mut report = Report::new(format!("gessel p={p} kmax={kmax}"));
    for k in 0..=kmax {
        for l in 0..p {
            let lhs = a[(k * p + l) as usize];
            let main = mul_mod(a[l as usize], a[k as usize], m);
            let corr = mul_mod(
                p_a_prime[l as usize],
                mul_mod(k % m, a[k as usize], m),
                m,
            );
            let rhs = add_mod(main, corr, m);
            report.check(k, l, lhs, rhs, lhs == rhs);
        }
    }
    Ok(report)
}

/// The two-state scheme for a_k = 2^k, b_k = k 2^k mod p^2:
/// a_{kp+l} = 2^l a_k + p alpha 2^l b_k and
/// b_{kp+l} = l 2^l a_k + p 2^l (1 + l alpha) b_k,
/// where alpha = (2^{p-1} - 1)/p mod p.
pub fn two_state_power_check(p: u64) -> Result<Report, EngineError> {
    if p == 2 || !crate::ring::is_prime(p) {
        return Err(EngineError::OddPrimeRequired(p));
    }
    let m = p * p;
    let alpha = (pow_mod(2, p - 1, m) - 1) / p;
    let kmax = 500u64;
    let a = |k: u64| pow_mod(2, k, m);
    let b = |k: u64| mul_mod(k % m, pow_mod(2, k, m), m);
    let mut report = Report::new(format!("power2 p={p}"));
    for k in 0..=kmax {
        for l in 0..p {
            let n = k * p + l;
            let tl = pow_mod(2, l, m);
            let a_rhs = add_mod(
                mul_mod(tl, a(k), m),
                mul_mod(mul_mod(p % m, alpha, m), mul_mod(tl, b(k), m), m),
                m,
            );
            report.check(k, l, a(n), a_rhs, a(n) == a_rhs);
            let b_rhs = add_mod(
                mul_mod(mul_mod(l % m, tl, m), a(k), m),
                mul_mod(
                    mul_mod(p % m, tl, m),
                    mul_mod(add_mod(1, mul_mod(l % m, alpha, m), m), b(k), m),
                    m,
                ),
                m,
            );
            report.check(k, l, b(n), b_rhs, b(n) == b_rhs);
        }
    }
    Ok(report)
}

/// F_u(t) = sum_v H_{uv}(t) F_v(t^p) mod p, compared coefficientwise up to
/// t^K with F_u computed from convolution tables.
pub fn verify_hasse_witt(
    g: &LaurentPoly<BigInt>,
    p: u64,
    kcap: u64,
) -> Result<Report, EngineError> {
    let hw = build_hasse_witt(g, p)?;
    let targets: Vec<ExpVec> = hw.points.iter().map(|u| u.neg()).collect();
    let table = CtTable::build(g, &targets, kcap, p);
    // F_u coefficient j is ct[x^u g^j] (rho = 1 so the binomials vanish).
    let f = |iu: usize, j: u64| table.get(&hw.points[iu].neg(), j).expect("target");
    let mut report = Report::new(format!("hasse-witt p={p} K={kcap}"));
    for (iu, _) in hw.points.iter().enumerate() {
        for j in 0..=kcap {
            let d = (j % p) as usize;
            let rhs = hw
                .points
                .iter()
                .enumerate()
                .fold(0u64, |acc, (iv, _)| {
                    let h = hw.h[iu][iv].get(d).copied().unwrap_or(0);
                    add_mod(acc, mul_mod(h, f(iv, j / p), p), p)
                });
            report.check(j, format!("u#{iu}"), f(iu, j), rhs, f(iu, j) == rhs);
        }
    }
    Ok(report)
}
