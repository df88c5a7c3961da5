//! The Cartier operator mod p^r on the module of rational functions
//! A(x)/f(x)^rho with numerator support in rho*mu.

use crate::polytope::{box_closure_points, dilated_interior_points, LatticePointSet, Polytope,
                      PolytopeError, RegionKind};
use crate::ring::{binomial, CoeffRing, ExpVec, LaurentPoly, RingError};
use num_bigint::BigInt;
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, thiserror::Error)]
pub enum CartierError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("rho = {rho} violates rho - ceil(rho/p) >= r - 1 for p = {p}, r = {r}")]
    RhoConstraint { rho: u32, p: u64, r: u32 },
    #[error("f^sigma(x^p) - f^p is not divisible by p = {0}")]
    NonDivisibility(u64),
    #[error("support escape: exponent {exponent:?} of {what} outside dilation {dilation} of the state region")]
    SupportEscape {
        what: &'static str,
        exponent: ExpVec,
        dilation: u32,
    },
    #[error("t-degree escape: degree {got} exceeds bound {bound}")]
    DegreeEscape { got: i64, bound: i64 },
}

/// Minimal rho >= 1 with rho - ceil(rho/p) >= r - 1; always <= 2r.
pub fn choose_rho(p: u64, r: u32) -> u32 {
    let mut rho = 1u32;
    while rho as u64 - (rho as u64).div_ceil(p) < r as u64 - 1 {
        rho += 1;
    }
    rho
}

/// G = (f^sigma(x^p) - f^p) / p, exact; support lies in p*Delta.
pub fn compute_g<C: CoeffRing>(
    f: &LaurentPoly<C>,
    p: u64,
) -> Result<LaurentPoly<C>, CartierError> {
    let diff = f.frobenius(p).sub(&f.pow(p, None));
    diff.div_exact_int(&BigInt::from(p))
        .map_err(|_| CartierError::NonDivisibility(p))
}

/// The state region mu: either the open interior of Delta or its box
/// closure, together with the enumerated lattice points at dilation rho.
#[derive(Clone, Debug)]
pub struct StateRegion {
    pub kind: RegionKind,
    pub polytope: Polytope,
    pub rho: u32,
    pub points: LatticePointSet,
}

impl StateRegion {
    pub fn interior(polytope: Polytope, rho: u32) -> Self {
        let points = dilated_interior_points(&polytope, rho);
        StateRegion {
            kind: RegionKind::InteriorDilation,
            polytope,
            rho,
            points,
        }
    }

    pub fn box_closure(polytope: Polytope, rho: u32) -> Result<Self, PolytopeError> {
        let points = box_closure_points(&polytope, rho)?;
        Ok(StateRegion {
            kind: RegionKind::BoxClosure,
            polytope,
            rho,
            points,
        })
    }

    /// Membership of a lattice point in the dilation s*mu.
    pub fn contains_at(&self, e: &ExpVec, s: u32) -> bool {
        match self.kind {
            RegionKind::InteriorDilation => self.polytope.membership_lattice(e, s, true),
            RegionKind::BoxClosure => self.polytope.box_membership_lattice(e, s),
        }
    }
}

/// Precomputed data for repeated Cartier reductions against a fixed f.
/// Everything is reduced mod p^r except G itself, whose exact division by p
/// happens once over Z.
pub struct CartierContext<C: CoeffRing> {
    pub p: u64,
    pub r: u32,
    pub rho: u32,
    pub ceil_rho_p: u32,
    pub modulus: BigInt,
    pub region: StateRegion,
    /// G^m mod p^r for m = 0..r.
    g_pows: Vec<LaurentPoly<C>>,
    /// f^{p*ceil(rho/p) - rho} mod p^r, bucketed by exponent class mod p.
    f_fixed_buckets: HashMap<ExpVec, Vec<(ExpVec, C)>>,
    /// f^sigma(x)^{rho - m - ceil(rho/p)} mod p^r for m = 0..r.
    rebase: Vec<LaurentPoly<C>>,
    /// p^m * binom(ceil(rho/p) + m - 1, m) for m = 0..r.
    multipliers: Vec<BigInt>,
}

impl<C: CoeffRing> CartierContext<C> {
    pub fn new(
        f: &LaurentPoly<C>,
        p: u64,
        r: u32,
        region: StateRegion,
    ) -> Result<Self, CartierError> {
        let rho = region.rho;
        let ceil_rho_p = u32::try_from((rho as u64).div_ceil(p)).unwrap();
        if rho - ceil_rho_p < r - 1 {
            return Err(CartierError::RhoConstraint { rho, p, r });
        }
        let modulus = BigInt::from(p).pow(r);

        let g = compute_g(f, p)?.reduce_mod(&modulus);
        let mut g_pows = Vec::with_capacity(r as usize);
        let mut acc = LaurentPoly::<C>::one(f.nvars());
        for m in 0..r {
            if m > 0 {
                acc = acc.mul(&g).reduce_mod(&modulus);
            }
            g_pows.push(acc.clone());
        }

        let f_fixed = f.pow(p as u64 * ceil_rho_p as u64 - rho as u64, Some(&modulus));
        let mut f_fixed_buckets: HashMap<ExpVec, Vec<(ExpVec, C)>> = HashMap::new();
        for (e, c) in f_fixed.terms() {
            f_fixed_buckets
                .entry(e.rem_euclid(p as i64))
                .or_default()
                .push((e.clone(), c.clone()));
        }

        let f_sigma = f.coeff_frobenius(p);
        let rebase = (0..r)
            .map(|m| f_sigma.pow((rho - m - ceil_rho_p) as u64, Some(&modulus)))
            .collect();

        let multipliers = (0..r)
            .map(|m| {
                BigInt::from(p).pow(m) * binomial((ceil_rho_p + m - 1) as u64, m as u64)
            })
            .collect();

        Ok(CartierContext {
            p,
            r,
            rho,
            ceil_rho_p,
            modulus,
            region,
            g_pows,
            f_fixed_buckets,
            rebase,
            multipliers,
        })
    }

    /// Bound on the t-degree of the output coefficients:
    /// p(r-1) + p*ceil(rho/p) - rho.
    pub fn t_degree_bound(&self) -> i64 {
        self.p as i64 * (self.r as i64 - 1) + self.p as i64 * self.ceil_rho_p as i64
            - self.rho as i64
    }

    /// Q_m = C(A * G^m * f^{p ceil(rho/p) - rho}) without materializing the
    /// product: f-power terms are looked up by exponent class mod p.
    fn select_q(&self, a: &LaurentPoly<C>, m: u32) -> LaurentPoly<C> {
        let p = self.p as i64;
        let mut out = LaurentPoly::<C>::zero(a.nvars());
        for (e1, c1) in a.terms() {
            for (e2, c2) in self.g_pows[m as usize].terms() {
                let partial = e1.add(e2);
                let class = partial.neg().rem_euclid(p);
                let Some(bucket) = self.f_fixed_buckets.get(&class) else {
                    continue;
                };
                let c12 = c1.mul(c2);
                for (e3, c3) in bucket {
                    out.add_term(partial.add(e3).div_exact(p), c12.mul(c3));
                }
            }
        }
        out.reduce_mod(&self.modulus)
    }

    /// The numerator N(x) of the single fraction N(x)/f^sigma(x)^rho
    /// congruent to C(A/f^rho) mod p^r, as a coefficient map.
    pub fn cartier_reduce(
        &self,
        a: &LaurentPoly<C>,
    ) -> Result<BTreeMap<ExpVec, C>, CartierError> {
        let mut numerator = LaurentPoly::<C>::zero(a.nvars());
        for m in 0..self.r {
            let q_m = self.select_q(a, m);
            for e in q_m.support() {
                if !self.region.contains_at(e, m + self.ceil_rho_p) {
                    return Err(CartierError::SupportEscape {
                        what: "Q_m",
                        exponent: e.clone(),
                        dilation: m + self.ceil_rho_p,
                    });
                }
            }
            let term = q_m
                .mul(&self.rebase[m as usize])
                .mul_int(&self.multipliers[m as usize]);
            numerator = numerator.add(&term).reduce_mod(&self.modulus);
        }

        let bound = self.t_degree_bound();
        let mut out = BTreeMap::new();
        for (e, c) in numerator.terms() {
            if !self.region.points.contains(e) {
                return Err(CartierError::SupportEscape {
                    what: "numerator",
                    exponent: e.clone(),
                    dilation: self.rho,
                });
            }
            if let Some(deg) = c.t_degree() {
                if deg > bound {
                    return Err(CartierError::DegreeEscape { got: deg, bound });
                }
            }
            out.insert(e.clone(), c.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::newton_polytope;
    use crate::ring::TPoly;

    fn ev(v: &[i64]) -> ExpVec {
        ExpVec(v.to_vec())
    }

    #[test]
    fn choose_rho_examples() {
        for p in [2u64, 3, 5, 97] {
            assert_eq!(choose_rho(p, 1), 1);
        }
        assert_eq!(choose_rho(2, 2), 2);
        assert_eq!(choose_rho(5, 3), 3);
        assert_eq!(choose_rho(2, 3), 4);
    }

    #[test]
    fn choose_rho_bounded_by_2r() {
        for p in (2u64..=100).filter(|&p| crate::ring::is_prime(p)) {
            for r in 1..=10u32 {
                let rho = choose_rho(p, r);
                assert!(rho <= 2 * r, "rho = {rho} > 2r for p={p}, r={r}");
                assert!(rho as u64 - (rho as u64).div_ceil(p) >= r as u64 - 1);
            }
        }
    }

    #[test]
    fn compute_g_one_plus_x() {
        // f = 1 + x, p = 2: (1 + x^2) - (1 + 2x + x^2) = -2x, so G = -x.
        let f = LaurentPoly::<BigInt>::from_terms(
            1,
            [
                (ev(&[0]), BigInt::from(1)),
                (ev(&[1]), BigInt::from(1)),
            ],
        );
        let g = compute_g(&f, 2).unwrap();
        assert_eq!(
            g,
            LaurentPoly::monomial(ev(&[1]), BigInt::from(-1))
        );
    }

    #[test]
    fn compute_g_with_t() {
        // f = 1 - t*x, p = 2: (1 - t^2 x^2) - (1 - 2tx + t^2 x^2) over 2
        // equals t*x - t^2 x^2.
        let f = LaurentPoly::<TPoly>::from_terms(
            1,
            [
                (ev(&[0]), TPoly::one()),
                (ev(&[1]), TPoly::t().neg()),
            ],
        );
        let g = compute_g(&f, 2).unwrap();
        let expect = LaurentPoly::<TPoly>::from_terms(
            1,
            [
                (ev(&[1]), TPoly::t()),
                (ev(&[2]), TPoly::t().mul(&TPoly::t()).neg()),
            ],
        );
        assert_eq!(g, expect);
    }

    #[test]
    fn compute_g_constant() {
        // f = p: G = (p - p^p)/p = 1 - p^{p-1}.
        let f = LaurentPoly::<BigInt>::monomial(ev(&[0]), BigInt::from(3));
        let g = compute_g(&f, 3).unwrap();
        assert_eq!(g.constant_term(), BigInt::from(1 - 9));
    }

    fn trinomial_f() -> LaurentPoly<TPoly> {
        // f = 1 - t(x + 2 + 1/x)
        LaurentPoly::from_terms(
            1,
            [
                (ev(&[0]), TPoly::one().sub(&TPoly::t().mul_int(&BigInt::from(2)))),
                (ev(&[1]), TPoly::t().neg()),
                (ev(&[-1]), TPoly::t().neg()),
            ],
        )
    }

    #[test]
    fn reduce_trinomial_mod_3() {
        // g = x+2+1/x, p=3, r=1, rho=1, A=1: single state u=0 with
        // numerator 1 - 4t + 6t^2 = 1 + 2t mod 3.
        let f = trinomial_f();
        let delta = newton_polytope(&[ev(&[-1]), ev(&[0]), ev(&[1])]).unwrap();
        let region = StateRegion::interior(delta, 1);
        let ctx = CartierContext::new(&f, 3, 1, region).unwrap();
        let n = ctx.cartier_reduce(&LaurentPoly::one(1)).unwrap();
        assert_eq!(n.len(), 1);
        let q = &n[&ev(&[0])];
        assert_eq!(q.coeff(0), BigInt::from(1));
        assert_eq!(q.coeff(1), BigInt::from(2));
        assert_eq!(q.coeff(2), BigInt::from(0));
    }

    #[test]
    fn zero_numerator_gives_empty_map() {
        let f = trinomial_f();
        let delta = newton_polytope(&[ev(&[-1]), ev(&[0]), ev(&[1])]).unwrap();
        let ctx = CartierContext::new(&f, 3, 1, StateRegion::interior(delta, 1)).unwrap();
        assert!(ctx.cartier_reduce(&LaurentPoly::zero(1)).unwrap().is_empty());
    }

    #[test]
    fn r1_reduces_to_hasse_witt_selection() {
        // For r = rho = 1 the output is C(A * f^{p-1}): check against the
        // direct expansion.
        let f = trinomial_f();
        let delta = newton_polytope(&[ev(&[-1]), ev(&[0]), ev(&[1])]).unwrap();
        for p in [2u64, 3, 5] {
            let ctx =
                CartierContext::new(&f, p, 1, StateRegion::interior(delta.clone(), 1)).unwrap();
            let n = ctx.cartier_reduce(&LaurentPoly::one(1)).unwrap();
            let direct = f
                .pow(p - 1, None)
                .cartier_select(p)
                .reduce_mod(&BigInt::from(p));
            for (e, c) in &n {
                assert_eq!(*c, direct.coeff(e));
            }
        }
    }
}
