//! Evaluation at arbitrary indices, exact state-vector oracles and the
//! scheme-vs-oracle verification sweeps.

pub mod checks;
pub mod oracle;

use crate::parse::{canonical_vars, parse_poly, ParseError};
use crate::ring::{add_mod, binomial, mul_mod, ExpVec, LaurentPoly};
use crate::scheme::{CTScheme, RatScheme, Scheme, SchemeError};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use oracle::{ct_oracle, CtTable, OracleError, SeriesTable, SeriesTableMod};
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid index `{0}`")]
    BadIndex(String),
    #[error("p = {0} must be an odd prime for this check")]
    OddPrimeRequired(u64),
    #[error("index arity {0} does not match scheme arity {1}")]
    ArityMismatch(usize, usize),
}

pub fn parse_index(text: &str) -> Result<BigUint, EngineError> {
    let t = text.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(EngineError::BadIndex(text.to_string()));
    }
    Ok(BigUint::parse_bytes(t.as_bytes(), 10).expect("digits"))
}

/// Base-p digits, little-endian; empty for zero.
pub fn base_p_digits(n: &BigUint, p: u64) -> Vec<u64> {
    let mut digits = Vec::new();
    let p = BigUint::from(p);
    let mut n = n.clone();
    while !n.is_zero() {
        digits.push((&n % &p).to_u64().unwrap());
        n /= &p;
    }
    digits
}

fn mat_vec(m: &[Vec<u64>], v: &[u64], modulus: u64) -> Vec<u64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(0u64, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, modulus), modulus))
        })
        .collect()
}

fn extract(e: &[i64], v: &[u64], modulus: u64) -> u64 {
    e.iter().zip(v).fold(0u64, |acc, (&c, &x)| {
        let c = (c as i128).rem_euclid(modulus as i128) as u64;
        add_mod(acc, mul_mod(c, x, modulus), modulus)
    })
}

/// a_N mod p^r by the digit product of transition matrices, most significant
/// digit applied first; O(log_p N) matrix-vector products.
pub fn eval_ct(s: &CTScheme, n: &BigUint) -> u64 {
    let m = s.modulus.value;
    let digits = base_p_digits(n, s.p);
    let mut v = s.init.clone();
    for &d in digits.iter().rev() {
        v = mat_vec(&s.digit_matrix(d), &v, m);
    }
    extract(&s.extraction, &v, m)
}

/// Coefficient a_K of Q/P mod p^r via the componentwise digit vectors of K.
pub fn eval_rat(s: &RatScheme, k: &[BigUint]) -> Result<u64, EngineError> {
    if k.len() != s.n {
        return Err(EngineError::ArityMismatch(k.len(), s.n));
    }
    let m = s.modulus.value;
    let digit_vecs: Vec<Vec<u64>> = k.iter().map(|c| base_p_digits(c, s.p)).collect();
    let len = digit_vecs.iter().map(|d| d.len()).max().unwrap_or(0);
    let mut v = s.init.clone();
    for i in (0..len).rev() {
        let l = ExpVec(
            digit_vecs
                .iter()
                .map(|d| d.get(i).copied().unwrap_or(0) as i64)
                .collect(),
        );
        let lam = s.digit_matrix(&l)?;
        v = mat_vec(&lam, &v, m);
    }
    Ok(extract(&s.extraction, &v, m))
}

/// Exact CT state vector at index k: entry (l,u) is
/// binom(rho+k-l-1, k-l) * ct[x^u g^{k-l}] for k >= l, else 0.
pub fn ct_state_vector(s: &CTScheme, k: u64) -> Result<Vec<BigInt>, EngineError> {
    let vars = canonical_vars(s.n);
    let g = parse_poly(&s.source_g, &vars)?;
    let one = LaurentPoly::one(s.n);
    s.states
        .iter()
        .map(|(l, u)| {
            let l = *l as u64;
            if k < l {
                return Ok(BigInt::from(0));
            }
            let j = k - l;
            let ct = ct_oracle(&g, &one, u, j)?;
            Ok(binomial(s.rho as u64 + j - 1, j) * ct)
        })
        .collect()
}

/// Exact rational state vector at index K: entry u is [x^K] (x^u / P^rho).
pub fn rat_state_vector(s: &RatScheme, k: &ExpVec) -> Result<Vec<BigRational>, EngineError> {
    let vars = canonical_vars(s.n);
    let pden = parse_poly(&s.source_p, &vars)?;
    s.states
        .iter()
        .map(|u| {
            let num = LaurentPoly::monomial(u.clone(), BigInt::from(1));
            let table = SeriesTable::build(&pden, &num, s.rho, &k.0)?;
            Ok(table.get(k)?.clone())
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub k: String,
    pub l: String,
    pub lhs: String,
    pub rhs: String,
}

/// Line-oriented verification report; failures beyond a cap are counted but
/// not stored.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub checked: u64,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub failure_count: u64,
}

const FAILURE_CAP: usize = 25;

impl Report {
    pub fn new(name: impl Into<String>) -> Report {
        Report {
            name: name.into(),
            checked: 0,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    pub fn check(
        &mut self,
        k: impl ToString,
        l: impl ToString,
        lhs: impl ToString,
        rhs: impl ToString,
        ok: bool,
    ) {
        self.checked += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < FAILURE_CAP {
                self.failures.push(Failure {
                    k: k.to_string(),
                    l: l.to_string(),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            writeln!(f, "{}: {} checks, all passed", self.name, self.checked)?;
        } else {
            writeln!(
                f,
                "{}: {} checks, {} FAILED",
                self.name, self.checked, self.failure_count
            )?;
            for fail in &self.failures {
                writeln!(
                    f,
                    "  FAIL k={} l={}: lhs={} rhs={}",
                    fail.k, fail.l, fail.lhs, fail.rhs
                )?;
            }
            if self.failure_count > self.failures.len() as u64 {
                writeln!(
                    f,
                    "  ... {} more failures",
                    self.failure_count - self.failures.len() as u64
                )?;
            }
        }
        Ok(())
    }
}

pub fn verify_scheme(s: &Scheme, kmax: u64) -> Result<Report, EngineError> {
    match s {
        Scheme::Ct(s) => verify_ct_scheme(s, kmax),
        Scheme::Rat(s) => verify_rat_scheme(s, kmax.min(40), kmax.min(20), 7),
    }
}

/// Checks, for all indices N = pk + l <= kmax: the transition identity
/// state(N) = M_l state(k) on oracle state vectors, extraction . state(N) =
/// a_N, and eval(N) = a_N, everything mod p^r with the oracle values coming
/// from dense convolution tables.
pub fn verify_ct_scheme(s: &CTScheme, kmax: u64) -> Result<Report, EngineError> {
    let vars = canonical_vars(s.n);
    let g = parse_poly(&s.source_g, &vars)?;
    let q = parse_poly(&s.source_q, &vars)?;
    let m = s.modulus.value;
    let rho = s.rho as u64;

    let points: Vec<ExpVec> = s
        .states
        .iter()
        .filter(|(l, _)| *l == 0)
        .map(|(_, u)| u.clone())
        .collect();
    let np = points.len();

    let mut targets: Vec<ExpVec> = points.iter().map(|u| u.neg()).collect();
    targets.extend(q.support().map(|w| w.neg()));
    let table = CtTable::build(&g, &targets, kmax, m);

    // binom(rho + j - 1, j) mod m for j <= kmax.
    let mut bins = Vec::with_capacity(kmax as usize + 1);
    let mut acc = BigInt::from(1);
    for j in 0..=kmax {
        if j > 0 {
            acc = acc * BigInt::from(rho + j - 1) / BigInt::from(j);
        }
        bins.push(s.modulus.reduce_big(&acc));
    }

    // Oracle state vectors for all indices up to kmax.
    let sv: Vec<Vec<u64>> = (0..=kmax)
        .map(|k| {
            let mut v = vec![0u64; s.size()];
            for l in 0..rho {
                if k < l {
                    continue;
                }
                let j = k - l;
                for (iu, u) in points.iter().enumerate() {
                    let ct = table.get(&u.neg(), j).expect("target present");
                    v[(l as usize) * np + iu] = mul_mod(bins[j as usize], ct, m);
                }
            }
            v
        })
        .collect();

    let q_red: Vec<(ExpVec, u64)> = q
        .terms()
        .map(|(w, c)| (w.neg(), s.modulus.reduce_big(c)))
        .collect();
    let target = |n: u64| -> u64 {
        q_red.iter().fold(0u64, |acc, (w, c)| {
            add_mod(acc, mul_mod(*c, table.get(w, n).expect("target"), m), m)
        })
    };

    let digit_mats: Vec<Vec<Vec<u64>>> = (0..s.p).map(|d| s.digit_matrix(d)).collect();
    let mut report = Report::new(format!("verify ct p={} r={} kmax={}", s.p, s.r, kmax));
    for n in 0..=kmax {
        if n >= 1 {
            let (k, l) = (n / s.p, n % s.p);
            let rhs = mat_vec(&digit_mats[l as usize], &sv[k as usize], m);
            report.check(
                k,
                l,
                format!("{:?}", sv[n as usize]),
                format!("{rhs:?}"),
                sv[n as usize] == rhs,
            );
        }
        let a_n = target(n);
        let ext = extract(&s.extraction, &sv[n as usize], m);
        report.check(n, "extraction", ext, a_n, ext == a_n);
        let ev = eval_ct(s, &BigUint::from(n));
        report.check(n, "eval", ev, a_n, ev == a_n);
    }
    Ok(report)
}

/// Rational verification: the transition identity on oracle series tables
/// for all multi-indices with components <= def1_bound, plus extraction and
/// evaluator agreement against an independent table of Q/P coefficients on
/// components <= bound (evaluation is sampled when the box is large).
pub fn verify_rat_scheme(
    s: &RatScheme,
    bound: u64,
    def1_bound: u64,
    seed: u64,
) -> Result<Report, EngineError> {
    let vars = canonical_vars(s.n);
    let pden = parse_poly(&s.source_p, &vars)?;
    let qnum = parse_poly(&s.source_q, &vars)?;
    let m = s.modulus.value;
    let def1_bound = def1_bound.min(bound);
    let small_box = vec![def1_bound as i64; s.n];
    let big_box = vec![bound as i64; s.n];

    let state_tables: Vec<SeriesTableMod> = s
        .states
        .iter()
        .map(|u| {
            let num = LaurentPoly::monomial(u.clone(), BigInt::from(1));
            SeriesTableMod::build(&pden, &num, s.rho, m, &small_box)
        })
        .collect::<Result<_, _>>()?;
    let target = SeriesTableMod::build(&pden, &qnum, 1, m, &big_box)?;

    let mut report = Report::new(format!("verify rat p={} r={} bound={}", s.p, s.r, bound));
    let index = oracle::BoxIndex::new(vec![0; s.n], small_box.clone());
    for off in 0..index.len() {
        let n = index.decode(off);
        // Transition identity at N = p*K + L.
        if !n.is_zero() {
            let k = ExpVec(n.0.iter().map(|&c| c / s.p as i64).collect());
            let l = ExpVec(n.0.iter().map(|&c| c % s.p as i64).collect());
            let lam = s.digit_matrix(&l)?;
            for (iu, _) in s.states.iter().enumerate() {
                let lhs = state_tables[iu].get(&n).expect("in box");
                let rhs = s
                    .states
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (iv, _)| {
                        let sk = state_tables[iv].get(&k).expect("in box");
                        add_mod(acc, mul_mod(lam[iu][iv], sk, m), m)
                    });
                report.check(
                    format!("{:?}", n),
                    format!("state {iu}"),
                    lhs,
                    rhs,
                    lhs == rhs,
                );
            }
        }
        // Extraction against the independent Q/P table.
        let a_n = target.get(&n).expect("in box");
        let sv: Vec<u64> = state_tables.iter().map(|t| t.get(&n).expect("in box")).collect();
        let ext = extract(&s.extraction, &sv, m);
        report.check(format!("{:?}", n), "extraction", ext, a_n, ext == a_n);
    }

    // Evaluator agreement over the large box, sampled when too big.
    let volume = (bound + 1).checked_pow(s.n as u32);
    let mut eval_points: Vec<ExpVec> = Vec::new();
    match volume {
        Some(v) if v <= 200_000 => {
            let big_index = oracle::BoxIndex::new(vec![0; s.n], big_box.clone());
            for off in 0..big_index.len() {
                eval_points.push(big_index.decode(off));
            }
        }
        _ => {
            for d in 0..=bound as i64 {
                eval_points.push(ExpVec(vec![d; s.n]));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..2000 {
                eval_points.push(ExpVec(
                    (0..s.n).map(|_| rng.gen_range(0..=bound as i64)).collect(),
                ));
            }
        }
    }
    for kvec in eval_points {
        let idx: Vec<BigUint> = kvec.0.iter().map(|&c| BigUint::from(c as u64)).collect();
        let ev = eval_rat(s, &idx)?;
        let a_k = target.get(&kvec).expect("in box");
        report.check(format!("{:?}", kvec), "eval", ev, a_k, ev == a_k);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{build_ct_scheme, build_rat_scheme};
    use num_traits::One;

    fn trinomial() -> LaurentPoly<BigInt> {
        parse_poly("x1 + 2 + x1^-1", &canonical_vars(1)).unwrap()
    }

    #[test]
    fn parse_index_accepts_digits_only() {
        assert_eq!(parse_index(" 1234 ").unwrap(), BigUint::from(1234u64));
        assert!(parse_index("12a").is_err());
        assert!(parse_index("-3").is_err());
        assert!(parse_index("").is_err());
    }

    #[test]
    fn digits_little_endian() {
        assert_eq!(base_p_digits(&BigUint::from(0u32), 5), Vec::<u64>::new());
        // 38 = 3 + 2*5 + 1*25.
        assert_eq!(base_p_digits(&BigUint::from(38u32), 5), vec![3, 2, 1]);
    }

    #[test]
    fn eval_ct_matches_oracle_small() {
        let g = trinomial();
        let q = LaurentPoly::one(1);
        let s = build_ct_scheme(&g, &q, 3, 2).unwrap();
        let u0 = ExpVec(vec![0]);
        for n in 0u64..30 {
            let exact = ct_oracle(&g, &q, &u0, n).unwrap();
            let want = s.modulus.reduce_big(&exact);
            assert_eq!(eval_ct(&s, &BigUint::from(n)), want, "n={n}");
        }
    }

    #[test]
    fn ct_state_vector_base_cases() {
        let g = trinomial();
        let s = build_ct_scheme(&g, &LaurentPoly::one(1), 3, 2).unwrap();
        let v0 = ct_state_vector(&s, 0).unwrap();
        // At k = 0 only the l = 0 states are live; (0, 0) has ct[g^0] = 1.
        assert_eq!(v0[1], BigInt::one());
        assert_eq!(v0[0], BigInt::from(0));
        for l1 in 3..6 {
            assert_eq!(v0[l1], BigInt::from(0));
        }
        // k = 1, state (0, 0): binom(rho, 1) ct[g] = 2 * 2 = 4.
        let v1 = ct_state_vector(&s, 1).unwrap();
        assert_eq!(v1[1], BigInt::from(4));
        // k = 1, state (1, 0): binom(rho - 1, 0) ct[g^0] = 1.
        assert_eq!(v1[4], BigInt::one());
    }

    #[test]
    fn rat_state_vector_origin() {
        let pden = parse_poly("2 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 5, 2).unwrap();
        let v = rat_state_vector(&s, &ExpVec(vec![0, 0])).unwrap();
        // Entry for state u = 0 at K = 0 is P_0^{-rho}.
        let idx = s.states.iter().position(|u| u.is_zero()).unwrap();
        let want = BigRational::new(BigInt::one(), BigInt::from(2).pow(s.rho));
        assert_eq!(v[idx], want);
    }

    #[test]
    fn verify_ct_trinomial() {
        let g = trinomial();
        let s = build_ct_scheme(&g, &LaurentPoly::one(1), 3, 1).unwrap();
        let r = verify_ct_scheme(&s, 200).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn verify_detects_corruption() {
        let g = trinomial();
        let mut s = build_ct_scheme(&g, &LaurentPoly::one(1), 3, 2).unwrap();
        // Flip one matrix entry; the sweep must notice.
        s.matrix[0][0][0] = (s.matrix[0][0][0] + 1) % s.modulus.value;
        let r = verify_ct_scheme(&s, 50).unwrap();
        assert!(!r.passed());
        assert!(r.failure_count > 0);
    }

    #[test]
    fn verify_rat_two_vars() {
        let pden = parse_poly("1 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 5, 2).unwrap();
        let r = verify_rat_scheme(&s, 25, 12, 7).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn report_display_and_json() {
        let mut r = Report::new("demo");
        r.check(1, 0, 2, 3, false);
        r.check(2, 0, 4, 4, true);
        assert!(!r.passed());
        let text = format!("{r}");
        assert!(text.contains("1 FAILED"));
        assert!(r.json().contains("\"demo\""));
    }
}
