//! Scheme construction and the persistent scheme data model.
//!
//! Two families: constant-term schemes for ct[q g^k] with transition data
//! given by a matrix of t-polynomials of degree < p, and rational-coefficient
//! schemes for the power-series coefficients of Q/P with one digit matrix per
//! base-p digit vector, computed lazily.

use crate::cartier::{choose_rho, CartierContext, CartierError, StateRegion};
use crate::parse::{canonical_vars, parse_poly, pretty, ParseError};
use crate::polytope::{newton_polytope, PolytopeError};
use crate::ring::{
    is_prime, CoeffRing, ExpVec, LaurentPoly, Modulus, Residue, RingError, TPoly,
};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Cartier(#[from] CartierError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("numerator support point {0:?} lies outside the admissible region")]
    PrecondNumeratorSupport(ExpVec),
    #[error("constant term of the denominator is divisible by p")]
    BadConstantTerm,
    #[error("denominator has a term with negative exponent {0:?}")]
    NotPolynomial(ExpVec),
    #[error("the origin is not an interior lattice point of the Newton polytope")]
    OriginNotInterior,
    #[error("the interior of the Newton polytope contains no lattice points")]
    EmptyInterior,
    #[error("extraction coefficient at {0:?} does not fit in an i64")]
    ExtractionOverflow(ExpVec),
    #[error("digit vector {0:?} has a component outside [0, p)")]
    BadDigit(ExpVec),
    #[error("malformed scheme file: {0}")]
    Malformed(String),
    #[error("unsupported scheme file version {0}")]
    VersionMismatch(u32),
    #[error("{what}[{index}] = {value} is not reduced modulo {modulus}")]
    EntryOutOfRange {
        what: &'static str,
        index: usize,
        value: u64,
        modulus: u64,
    },
}

const FILE_VERSION: u32 = 1;

fn require_prime(p: u64) -> Result<(), SchemeError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(SchemeError::NotPrime(p))
    }
}

fn to_i64(c: &BigInt, at: &ExpVec) -> Result<i64, SchemeError> {
    c.to_i64()
        .ok_or_else(|| SchemeError::ExtractionOverflow(at.clone()))
}

/// Constant-term scheme: states (l, u) with l in [0, rho) and u a lattice
/// point of rho * interior(Delta), ordered l ascending then u lexicographic.
/// `matrix[row][col]` holds the t-coefficients (low to high, degree < p) of
/// the entry as residues mod p^r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CTScheme {
    pub p: u64,
    pub r: u32,
    pub rho: u32,
    pub n: usize,
    pub modulus: Modulus,
    pub states: Vec<(u32, ExpVec)>,
    pub matrix: Vec<Vec<Vec<u64>>>,
    pub init: Vec<u64>,
    pub extraction: Vec<i64>,
    pub source_g: String,
    pub source_q: String,
}

impl CTScheme {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    /// M_d: the matrix applied when the incoming base-p digit is d.
    pub fn digit_matrix(&self, d: u64) -> Vec<Vec<u64>> {
        let d = d as usize;
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|entry| entry.get(d).copied().unwrap_or(0))
                    .collect()
            })
            .collect()
    }
}

/// f = 1 - t*g lifted into Laurent polynomials with t-polynomial coefficients.
pub fn ct_denominator(g: &LaurentPoly<BigInt>) -> LaurentPoly<TPoly> {
    let mut f = LaurentPoly::<TPoly>::one(g.nvars());
    for (e, c) in g.terms() {
        f.add_term(e.clone(), TPoly::t().mul_int(&-c));
    }
    f
}

pub fn build_ct_scheme(
    g: &LaurentPoly<BigInt>,
    q: &LaurentPoly<BigInt>,
    p: u64,
    r: u32,
) -> Result<CTScheme, SchemeError> {
    require_prime(p)?;
    assert!(r >= 1, "r must be positive");
    let n = g.nvars();
    if q.nvars() != n {
        return Err(RingError::VariableCountMismatch(n, q.nvars()).into());
    }
    let modulus = Modulus::new(p, r)?;
    let support: Vec<ExpVec> = g.support().cloned().collect();
    let delta = newton_polytope(&support)?;
    for w in q.support() {
        if !delta.membership_lattice(w, 1, true) {
            return Err(SchemeError::PrecondNumeratorSupport(w.clone()));
        }
    }
    let rho = choose_rho(p, r);
    let region = StateRegion::interior(delta, rho);
    let points = region.points.points.clone();
    if points.is_empty() {
        return Err(SchemeError::EmptyInterior);
    }
    let origin = region
        .points
        .index_of(&ExpVec::zero(n))
        .ok_or(SchemeError::OriginNotInterior)?;

    let f = ct_denominator(g);
    let ctx = CartierContext::new(&f, p, r, region)?;
    let np = points.len();
    let size = rho as usize * np;

    // Row block for one u: entries for all l, indexed [l][col].
    let rows: Vec<Vec<Vec<Vec<u64>>>> = points
        .par_iter()
        .map(|u| -> Result<_, SchemeError> {
            let a = LaurentPoly::monomial(u.clone(), TPoly::one());
            let reduced = ctx.cartier_reduce(&a)?;
            let mut block = vec![vec![Vec::new(); size]; rho as usize];
            for (v, q_uv) in &reduced {
                let iv = ctx.region.points.index_of(v).expect("v is a state");
                for l in 0..rho {
                    let slices = crate::ring::tpoly_digit_slice(q_uv, p, l, rho)?;
                    for (m, lam) in slices.iter().enumerate() {
                        let col = m * np + iv;
                        block[l as usize][col] = lam
                            .coeffs()
                            .iter()
                            .map(|c| modulus.reduce_big(c))
                            .collect();
                    }
                }
            }
            Ok(block)
        })
        .collect::<Result<_, _>>()?;

    let mut matrix = vec![Vec::new(); size];
    for (iu, block) in rows.into_iter().enumerate() {
        for (l, row) in block.into_iter().enumerate() {
            matrix[l * np + iu] = row;
        }
    }

    let mut init = vec![0u64; size];
    init[origin] = 1;

    // q * f^{rho-1} = sum_w c_w(t) x^w; extraction[(j,w)] = [t^j] c_w.
    let q_lift = LaurentPoly::<TPoly>::from_terms(
        n,
        q.terms().map(|(e, c)| (e.clone(), TPoly::constant(c.clone()))),
    );
    let ext_poly = q_lift.mul(&f.pow(rho as u64 - 1, None));
    let mut extraction = vec![0i64; size];
    for (w, cw) in ext_poly.terms() {
        let iw = ctx
            .region
            .points
            .index_of(w)
            .ok_or_else(|| SchemeError::PrecondNumeratorSupport(w.clone()))?;
        for j in 0..=cw.degree().max(0) as usize {
            let c = cw.coeff(j);
            if CoeffRing::is_zero(&c) {
                continue;
            }
            if j >= rho as usize {
                return Err(SchemeError::PrecondNumeratorSupport(w.clone()));
            }
            extraction[j * np + iw] = to_i64(&c, w)?;
        }
    }

    let vars = canonical_vars(n);
    let states = (0..rho)
        .flat_map(|l| points.iter().map(move |u| (l, u.clone())))
        .collect();
    Ok(CTScheme {
        p,
        r,
        rho,
        n,
        modulus,
        states,
        matrix,
        init,
        extraction,
        source_g: pretty(g, &vars),
        source_q: pretty(q, &vars),
    })
}

/// Hasse-Witt matrix mod p: H_{uv}(t) = coefficient of x^{pu-v} in
/// (1 - t*g)^{p-1}, indexed by the interior lattice points of Delta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseWitt {
    pub p: u64,
    pub points: Vec<ExpVec>,
    pub h: Vec<Vec<Vec<u64>>>,
}

pub fn build_hasse_witt(g: &LaurentPoly<BigInt>, p: u64) -> Result<HasseWitt, SchemeError> {
    require_prime(p)?;
    let support: Vec<ExpVec> = g.support().cloned().collect();
    let delta = newton_polytope(&support)?;
    let points = crate::polytope::dilated_interior_points(&delta, 1).points;
    if points.is_empty() {
        return Err(SchemeError::EmptyInterior);
    }
    let modulus = BigInt::from(p);
    let fpow = ct_denominator(g).pow(p - 1, Some(&modulus));
    let h = points
        .iter()
        .map(|u| {
            points
                .iter()
                .map(|v| {
                    // Entry (u, v) is the coefficient of x^{pv - u} in
                    // (1 - t g)^{p-1}: extracting x^u from the Cartier image
                    // picks x^{pu} pre-image terms, i.e. F_u = sum_v H_{uv}(t)
                    // F_v(t^p) needs the x^{pv - u} coefficient.
                    let e = v.scale(p as i64).sub(u);
                    let entry = fpow.coeff(&e);
                    debug_assert!(entry.degree() <= p as i64 - 1);
                    entry
                        .coeffs()
                        .iter()
                        .map(|c| c.to_u64().expect("reduced mod p"))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(HasseWitt { p, points, h })
}

/// Rational-coefficient scheme for the series Q/P: states are the lattice
/// points of the rho-dilated box closure of interior(Newton(P)); the digit
/// matrix for a digit vector l is built on first use and memoized.
pub struct RatScheme {
    pub p: u64,
    pub r: u32,
    pub rho: u32,
    pub n: usize,
    pub modulus: Modulus,
    pub states: Vec<ExpVec>,
    pub init: Vec<u64>,
    pub extraction: Vec<i64>,
    pub source_p: String,
    pub source_q: String,
    ctx: CartierContext<BigInt>,
    memo: Mutex<BTreeMap<ExpVec, Arc<Vec<Vec<u64>>>>>,
}

impl std::fmt::Debug for RatScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RatScheme")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("rho", &self.rho)
            .field("states", &self.states)
            .field("source_p", &self.source_p)
            .finish()
    }
}

impl PartialEq for RatScheme {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.r == other.r
            && self.rho == other.rho
            && self.n == other.n
            && self.states == other.states
            && self.init == other.init
            && self.extraction == other.extraction
            && self.source_p == other.source_p
            && self.source_q == other.source_q
            && *self.memo.lock().unwrap() == *other.memo.lock().unwrap()
    }
}

impl RatScheme {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, u: &ExpVec) -> Option<usize> {
        self.states.binary_search(u).ok()
    }

    /// Lambda_l, memoized. Recomputation on a lost race is harmless: the
    /// matrix is a pure function of l.
    pub fn digit_matrix(&self, l: &ExpVec) -> Result<Arc<Vec<Vec<u64>>>, SchemeError> {
        if l.len() != self.n || l.0.iter().any(|&c| c < 0 || c >= self.p as i64) {
            return Err(SchemeError::BadDigit(l.clone()));
        }
        if let Some(m) = self.memo.lock().unwrap().get(l) {
            return Ok(m.clone());
        }
        let size = self.states.len();
        let mut matrix = vec![vec![0u64; size]; size];
        for (iu, u) in self.states.iter().enumerate() {
            let a = LaurentPoly::monomial(u.sub(l), BigInt::from(1));
            let reduced = self.ctx.cartier_reduce(&a)?;
            for (v, lam) in &reduced {
                let iv = self.state_index(v).expect("v is a state");
                matrix[iu][iv] = self.modulus.reduce_big(lam);
            }
        }
        let arc = Arc::new(matrix);
        self.memo
            .lock()
            .unwrap()
            .entry(l.clone())
            .or_insert_with(|| arc.clone());
        Ok(arc)
    }

    pub fn memoized(&self) -> Vec<(ExpVec, Arc<Vec<Vec<u64>>>)> {
        self.memo
            .lock()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

pub fn build_rat_scheme(
    pden: &LaurentPoly<BigInt>,
    qnum: &LaurentPoly<BigInt>,
    p: u64,
    r: u32,
) -> Result<RatScheme, SchemeError> {
    require_prime(p)?;
    assert!(r >= 1, "r must be positive");
    let n = pden.nvars();
    if qnum.nvars() != n {
        return Err(RingError::VariableCountMismatch(n, qnum.nvars()).into());
    }
    for e in pden.support() {
        if e.0.iter().any(|&c| c < 0) {
            return Err(SchemeError::NotPolynomial(e.clone()));
        }
    }
    let modulus = Modulus::new(p, r)?;
    let p0 = pden.constant_term();
    if CoeffRing::is_zero(&CoeffRing::reduce_mod(&p0, &BigInt::from(p))) {
        return Err(SchemeError::BadConstantTerm);
    }
    let support: Vec<ExpVec> = pden.support().cloned().collect();
    let delta = newton_polytope(&support)?;
    for w in qnum.support() {
        if !delta.box_membership_lattice(w, 1) {
            return Err(SchemeError::PrecondNumeratorSupport(w.clone()));
        }
    }
    let rho = choose_rho(p, r);
    let region = StateRegion::box_closure(delta, rho)?;
    let states = region.points.points.clone();
    let ctx = CartierContext::new(pden, p, r, region)?;

    let origin = states
        .binary_search(&ExpVec::zero(n))
        .expect("origin is in every box closure");
    let mut init = vec![0u64; states.len()];
    init[origin] = Residue::from_int(&p0, modulus).inv()?.pow(rho as u64).value;

    let ext_poly = qnum.mul(&pden.pow(rho as u64 - 1, None));
    let mut extraction = vec![0i64; states.len()];
    for (w, c) in ext_poly.terms() {
        let iw = states
            .binary_search(w)
            .map_err(|_| SchemeError::PrecondNumeratorSupport(w.clone()))?;
        extraction[iw] = to_i64(c, w)?;
    }

    let vars = canonical_vars(n);
    Ok(RatScheme {
        p,
        r,
        rho,
        n,
        modulus,
        states,
        init,
        extraction,
        source_p: pretty(pden, &vars),
        source_q: pretty(qnum, &vars),
        ctx,
        memo: Mutex::new(BTreeMap::new()),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    Ct(CTScheme),
    Rat(Arc<RatScheme>),
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    version: u32,
    kind: String,
    p: u64,
    r: u32,
    rho: u32,
    n: usize,
    modulus: u64,
    states: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<Vec<u64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    digit_matrices: Option<BTreeMap<String, Vec<Vec<u64>>>>,
    init: Vec<u64>,
    extraction: Vec<i64>,
    source: BTreeMap<String, String>,
}

pub fn save_scheme(s: &Scheme) -> String {
    let json = match s {
        Scheme::Ct(s) => SchemeJson {
            version: FILE_VERSION,
            kind: "ct".into(),
            p: s.p,
            r: s.r,
            rho: s.rho,
            n: s.n,
            modulus: s.modulus.value,
            states: s
                .states
                .iter()
                .map(|(l, u)| {
                    let mut row = vec![*l as i64];
                    row.extend_from_slice(&u.0);
                    row
                })
                .collect(),
            matrix: Some(s.matrix.clone()),
            digit_matrices: None,
            init: s.init.clone(),
            extraction: s.extraction.clone(),
            source: BTreeMap::from([
                ("g".to_string(), s.source_g.clone()),
                ("q".to_string(), s.source_q.clone()),
            ]),
        },
        Scheme::Rat(s) => SchemeJson {
            version: FILE_VERSION,
            kind: "rat".into(),
            p: s.p,
            r: s.r,
            rho: s.rho,
            n: s.n,
            modulus: s.modulus.value,
            states: s.states.iter().map(|u| u.0.clone()).collect(),
            matrix: None,
            digit_matrices: Some(
                s.memoized()
                    .into_iter()
                    .map(|(l, m)| {
                        let key = l
                            .0
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(",");
                        (key, (*m).clone())
                    })
                    .collect(),
            ),
            init: s.init.clone(),
            extraction: s.extraction.clone(),
            source: BTreeMap::from([
                ("P".to_string(), s.source_p.clone()),
                ("Q".to_string(), s.source_q.clone()),
            ]),
        },
    };
    let mut text = serde_json::to_string(&json).expect("scheme serialization");
    text.push('\n');
    text
}

fn check_entries(what: &'static str, entries: &[u64], modulus: u64) -> Result<(), SchemeError> {
    for (i, &v) in entries.iter().enumerate() {
        if v >= modulus {
            return Err(SchemeError::EntryOutOfRange {
                what,
                index: i,
                value: v,
                modulus,
            });
        }
    }
    Ok(())
}

pub fn load_scheme(text: &str) -> Result<Scheme, SchemeError> {
    let json: SchemeJson =
        serde_json::from_str(text).map_err(|e| SchemeError::Malformed(e.to_string()))?;
    if json.version != FILE_VERSION {
        return Err(SchemeError::VersionMismatch(json.version));
    }
    let modulus = Modulus::new(json.p, json.r)?;
    if modulus.value != json.modulus {
        return Err(SchemeError::Malformed(format!(
            "modulus field {} does not equal {}^{}",
            json.modulus, json.p, json.r
        )));
    }
    let source = |key: &str| -> Result<&String, SchemeError> {
        json.source
            .get(key)
            .ok_or_else(|| SchemeError::Malformed(format!("missing source.{key}")))
    };
    let vars = canonical_vars(json.n);
    match json.kind.as_str() {
        "ct" => {
            let g = parse_poly(source("g")?, &vars)?;
            let q = parse_poly(source("q")?, &vars)?;
            let scheme = build_ct_scheme(&g, &q, json.p, json.r)?;
            let states: Vec<Vec<i64>> = scheme
                .states
                .iter()
                .map(|(l, u)| {
                    let mut row = vec![*l as i64];
                    row.extend_from_slice(&u.0);
                    row
                })
                .collect();
            if states != json.states {
                return Err(SchemeError::Malformed("state list mismatch".into()));
            }
            let size = states.len();
            let matrix = json
                .matrix
                .ok_or_else(|| SchemeError::Malformed("missing matrix".into()))?;
            if matrix.len() != size || matrix.iter().any(|row| row.len() != size) {
                return Err(SchemeError::Malformed("matrix dimension mismatch".into()));
            }
            for row in &matrix {
                for entry in row {
                    if entry.len() > json.p as usize {
                        return Err(SchemeError::Malformed(
                            "matrix entry degree >= p".into(),
                        ));
                    }
                    check_entries("matrix", entry, modulus.value)?;
                }
            }
            check_entries("init", &json.init, modulus.value)?;
            if json.init.len() != size || json.extraction.len() != size {
                return Err(SchemeError::Malformed("vector length mismatch".into()));
            }
            // Stored data is taken at face value once the structural
            // invariants hold; semantic corruption is the verifier's job.
            let mut scheme = scheme;
            scheme.matrix = matrix;
            scheme.init = json.init;
            scheme.extraction = json.extraction;
            Ok(Scheme::Ct(scheme))
        }
        "rat" => {
            let pden = parse_poly(source("P")?, &vars)?;
            let qnum = parse_poly(source("Q")?, &vars)?;
            let scheme = build_rat_scheme(&pden, &qnum, json.p, json.r)?;
            let states: Vec<Vec<i64>> = scheme.states.iter().map(|u| u.0.clone()).collect();
            if states != json.states {
                return Err(SchemeError::Malformed("state list mismatch".into()));
            }
            let size = states.len();
            check_entries("init", &json.init, modulus.value)?;
            if json.init.len() != size || json.extraction.len() != size {
                return Err(SchemeError::Malformed("vector length mismatch".into()));
            }
            let mut scheme = scheme;
            scheme.init = json.init;
            scheme.extraction = json.extraction;
            if let Some(dm) = json.digit_matrices {
                let mut memo = scheme.memo.lock().unwrap();
                for (key, matrix) in dm {
                    let comps: Result<Vec<i64>, _> =
                        key.split(',').map(|c| c.parse::<i64>()).collect();
                    let l = ExpVec(comps.map_err(|_| {
                        SchemeError::Malformed(format!("bad digit key `{key}`"))
                    })?);
                    if l.len() != json.n
                        || l.0.iter().any(|&c| c < 0 || c >= json.p as i64)
                    {
                        return Err(SchemeError::Malformed(format!(
                            "digit key `{key}` out of range"
                        )));
                    }
                    if matrix.len() != size || matrix.iter().any(|row| row.len() != size) {
                        return Err(SchemeError::Malformed(
                            "digit matrix dimension mismatch".into(),
                        ));
                    }
                    for row in &matrix {
                        check_entries("digit_matrix", row, modulus.value)?;
                    }
                    memo.insert(l, Arc::new(matrix));
                }
            }
            Ok(Scheme::Rat(Arc::new(scheme)))
        }
        other => Err(SchemeError::Malformed(format!("unknown kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[i64]) -> ExpVec {
        ExpVec(v.to_vec())
    }

    fn parse1(text: &str) -> LaurentPoly<BigInt> {
        parse_poly(text, &canonical_vars(1)).unwrap()
    }

    fn trinomial() -> LaurentPoly<BigInt> {
        parse1("x1 + 2 + x1^-1")
    }

    #[test]
    fn ct_trinomial_mod_3() {
        let g = trinomial();
        let s = build_ct_scheme(&g, &LaurentPoly::one(1), 3, 1).unwrap();
        assert_eq!(s.rho, 1);
        assert_eq!(s.states, vec![(0, ev(&[0]))]);
        assert_eq!(s.matrix, vec![vec![vec![1, 2]]]);
        assert_eq!(s.init, vec![1]);
        assert_eq!(s.extraction, vec![1]);
    }

    #[test]
    fn ct_trinomial_mod_9() {
        let g = trinomial();
        let s = build_ct_scheme(&g, &LaurentPoly::one(1), 3, 2).unwrap();
        assert_eq!(s.rho, 2);
        assert_eq!(
            s.states,
            vec![
                (0, ev(&[-1])),
                (0, ev(&[0])),
                (0, ev(&[1])),
                (1, ev(&[-1])),
                (1, ev(&[0])),
                (1, ev(&[1]))
            ]
        );
        // q * f^{rho-1} = 1 - t(x + 2 + 1/x).
        assert_eq!(s.extraction, vec![0, 1, 0, -1, -2, -1]);
        assert_eq!(s.init, vec![0, 1, 0, 0, 0, 0]);
        for row in &s.matrix {
            for entry in row {
                assert!(entry.len() <= 3);
            }
        }
    }

    #[test]
    fn ct_states_bound() {
        for (p, r) in [(2u64, 2u32), (3, 2), (5, 3)] {
            let s = build_ct_scheme(&trinomial(), &LaurentPoly::one(1), p, r).unwrap();
            assert!(s.rho <= 2 * r);
            let np = s.states.iter().filter(|(l, _)| *l == 0).count();
            assert_eq!(s.size(), s.rho as usize * np);
        }
    }

    #[test]
    fn ct_rejects_numerator_outside_interior() {
        let q = parse1("x1");
        let err = build_ct_scheme(&trinomial(), &q, 3, 1).unwrap_err();
        assert!(matches!(err, SchemeError::PrecondNumeratorSupport(_)));
    }

    #[test]
    fn ct_rejects_composite_p() {
        let err = build_ct_scheme(&trinomial(), &LaurentPoly::one(1), 4, 1).unwrap_err();
        assert!(matches!(err, SchemeError::NotPrime(4)));
    }

    #[test]
    fn hasse_witt_trinomial() {
        let hw = build_hasse_witt(&trinomial(), 3).unwrap();
        assert_eq!(hw.points, vec![ev(&[0])]);
        assert_eq!(hw.h, vec![vec![vec![1, 2]]]);
    }

    #[test]
    fn hasse_witt_matches_r1_scheme() {
        for p in [2u64, 3, 5, 7] {
            let s = build_ct_scheme(&trinomial(), &LaurentPoly::one(1), p, 1).unwrap();
            let hw = build_hasse_witt(&trinomial(), p).unwrap();
            assert_eq!(s.matrix, hw.h, "p = {p}");
        }
    }

    #[test]
    fn hasse_witt_p2_degree_bound() {
        // p = 2: entries come from 1 - t*g, degree <= 1.
        let g = parse_poly("x1 + x2 + x1^-1*x2^-1", &canonical_vars(2)).unwrap();
        let hw = build_hasse_witt(&g, 2).unwrap();
        for row in &hw.h {
            for entry in row {
                assert!(entry.len() <= 2);
            }
        }
    }

    #[test]
    fn rat_one_state_mod_5() {
        let pden = parse_poly("1 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 5, 1).unwrap();
        assert_eq!(s.rho, 1);
        assert_eq!(s.states, vec![ev(&[0, 0])]);
        assert_eq!(s.init, vec![1]);
        assert_eq!(s.extraction, vec![1]);
        // lambda for l = 0: constant term of (1-x-y)^{p-1} is 1.
        let m = s.digit_matrix(&ev(&[0, 0])).unwrap();
        assert_eq!(*m, vec![vec![1]]);
    }

    #[test]
    fn rat_digit_matrix_binomial_entry() {
        // 1-state scheme: lambda_{0,0,l} = a_l; diagonal of 1/(1-x-y) gives
        // a_{(1,1)} = binom(2,1) = 2 = 0 mod 2.
        let pden = parse_poly("1 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 2, 1).unwrap();
        let m = s.digit_matrix(&ev(&[1, 1])).unwrap();
        assert_eq!(*m, vec![vec![0]]);
        let m01 = s.digit_matrix(&ev(&[0, 1])).unwrap();
        assert_eq!(*m01, vec![vec![1]]);
    }

    #[test]
    fn rat_states_mod_9() {
        let pden = parse_poly("1 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 3, 2).unwrap();
        assert_eq!(s.rho, 2);
        assert_eq!(s.states, vec![ev(&[0, 0]), ev(&[0, 1]), ev(&[1, 0])]);
        // Bound rho^n * d_1 * d_2 = 4.
        assert!(s.size() <= 4);
        // P_0 = 1 so init is 1 at the origin.
        assert_eq!(s.init, vec![1, 0, 0]);
    }

    #[test]
    fn rat_rejects_bad_constant_term() {
        let pden = parse_poly("3 - x1", &canonical_vars(1)).unwrap();
        let err = build_rat_scheme(&pden, &LaurentPoly::one(1), 3, 1).unwrap_err();
        assert!(matches!(err, SchemeError::BadConstantTerm));
    }

    #[test]
    fn rat_rejects_laurent_denominator() {
        let pden = parse1("1 - x1^-1");
        let err = build_rat_scheme(&pden, &LaurentPoly::one(1), 3, 1).unwrap_err();
        assert!(matches!(err, SchemeError::NotPolynomial(_)));
    }

    #[test]
    fn memoization_returns_same_matrix() {
        let pden = parse_poly("1 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 3, 2).unwrap();
        let a = s.digit_matrix(&ev(&[1, 2])).unwrap();
        let b = s.digit_matrix(&ev(&[1, 2])).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(s.memoized().len(), 1);
    }

    #[test]
    fn roundtrip_ct() {
        let s = build_ct_scheme(&trinomial(), &LaurentPoly::one(1), 3, 2).unwrap();
        let text = save_scheme(&Scheme::Ct(s.clone()));
        let loaded = load_scheme(&text).unwrap();
        assert_eq!(loaded, Scheme::Ct(s));
        // Deterministic rebuild: saving again is byte-identical.
        assert_eq!(save_scheme(&loaded), text);
    }

    #[test]
    fn roundtrip_rat_with_memo() {
        let pden = parse_poly("1 - x1 - x2", &canonical_vars(2)).unwrap();
        let s = build_rat_scheme(&pden, &LaurentPoly::one(2), 3, 2).unwrap();
        s.digit_matrix(&ev(&[2, 1])).unwrap();
        let text = save_scheme(&Scheme::Rat(Arc::new(s)));
        let loaded = load_scheme(&text).unwrap();
        assert_eq!(save_scheme(&loaded), text);
        match loaded {
            Scheme::Rat(s2) => assert_eq!(s2.memoized().len(), 1),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn tampered_entry_rejected() {
        let s = build_ct_scheme(&trinomial(), &LaurentPoly::one(1), 3, 1).unwrap();
        let text = save_scheme(&Scheme::Ct(s));
        // matrix [[[1,2]]] -> [[[1,9]]]: 9 >= 3^1.
        let bad = text.replace("[[[1,2]]]", "[[[1,9]]]");
        assert_ne!(bad, text);
        match load_scheme(&bad) {
            Err(SchemeError::EntryOutOfRange { value: 9, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_rejected() {
        let s = build_ct_scheme(&trinomial(), &LaurentPoly::one(1), 3, 1).unwrap();
        let text = save_scheme(&Scheme::Ct(s)).replace("\"version\":1", "\"version\":2");
        assert!(matches!(
            load_scheme(&text),
            Err(SchemeError::VersionMismatch(2))
        ));
    }
}
