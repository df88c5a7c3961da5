//! Exact lattice geometry: Newton polytopes, interior lattice points of
//! dilations, and lattice points of box closures.

use crate::ring::ExpVec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("support is empty")]
    EmptySupport,
    #[error("Newton polytope is not full-dimensional in R^{0}")]
    NotFullDimensional(usize),
    #[error("polytope has a vertex outside the non-negative orthant")]
    NegativeVertex,
}

/// Facet inequality <a, x> <= c with a primitive integer normal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

/// Full-dimensional lattice polytope in V- and H-representation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polytope {
    pub vertices: Vec<ExpVec>,
    pub facets: Vec<Facet>,
    pub dim: usize,
}

/// Which region of the paper's constructions a lattice point set describes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RegionKind {
    /// Lattice points of the open dilation rho * interior(Delta).
    InteriorDilation,
    /// Lattice points of the box closure rho * B(interior(Delta)).
    BoxClosure,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatticePointSet {
    pub kind: RegionKind,
    pub rho: u32,
    pub points: Vec<ExpVec>,
}

impl LatticePointSet {
    pub fn contains(&self, e: &ExpVec) -> bool {
        self.points.binary_search(e).is_ok()
    }

    pub fn index_of(&self, e: &ExpVec) -> Option<usize> {
        self.points.binary_search(e).ok()
    }
}

fn dot(a: &[i64], x: &[i64]) -> i128 {
    a.iter().zip(x).map(|(&a, &x)| a as i128 * x as i128).sum()
}

/// Rank of an integer matrix (rows) by fraction-free elimination.
fn rank(rows: &mut Vec<Vec<i128>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail {
            if row[col] != 0 {
                let (a, b) = (prow[col], row[col]);
                for j in 0..ncols {
                    row[j] = row[j] * a - prow[j] * b;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Generalized cross product: integer normal of the hyperplane spanned by
/// n-1 difference vectors in Z^n. Zero vector when they are dependent.
fn hyperplane_normal(n: usize, diffs: &[Vec<i64>]) -> Vec<i64> {
    debug_assert_eq!(diffs.len() + 1, n);
    let mut normal = vec![0i64; n];
    for j in 0..n {
        // Minor obtained by deleting column j.
        let minor: Vec<Vec<i128>> = diffs
            .iter()
            .map(|d| {
                d.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &v)| v as i128)
                    .collect()
            })
            .collect();
        let det = determinant(minor);
        let signed = if j % 2 == 0 { det } else { -det };
        normal[j] = i64::try_from(signed).expect("normal entry fits i64");
    }
    normal
}

fn determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    // Fraction-free Bareiss elimination.
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Convex hull of a lattice point set by exhaustive facet search, exact over
/// the integers. Errors unless the hull is full-dimensional.
pub fn newton_polytope(support: &[ExpVec]) -> Result<Polytope, PolytopeError> {
    if support.is_empty() {
        return Err(PolytopeError::EmptySupport);
    }
    let n = support[0].len();
    let mut points: Vec<ExpVec> = support.to_vec();
    points.sort();
    points.dedup();

    let mut diffs: Vec<Vec<i128>> = points
        .iter()
        .skip(1)
        .map(|p| {
            p.0.iter()
                .zip(&points[0].0)
                .map(|(&a, &b)| (a - b) as i128)
                .collect()
        })
        .collect();
    if rank(&mut diffs) < n {
        return Err(PolytopeError::NotFullDimensional(n));
    }

    // Every candidate facet hyperplane passes through n affinely independent
    // support points; enumerate n-subsets.
    let mut facets: Vec<Facet> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let base = &points[idx[0]];
        let diffs: Vec<Vec<i64>> = idx[1..]
            .iter()
            .map(|&i| {
                points[i]
                    .0
                    .iter()
                    .zip(&base.0)
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        let normal = hyperplane_normal(n, &diffs);
        if normal.iter().any(|&c| c != 0) {
            let c0 = dot(&normal, &base.0);
            let mut has_below = false;
            let mut has_above = false;
            for p in &points {
                let v = dot(&normal, &p.0);
                if v < c0 {
                    has_below = true;
                } else if v > c0 {
                    has_above = true;
                }
            }
            let oriented = if !has_above {
                Some((normal.clone(), c0))
            } else if !has_below {
                Some((normal.iter().map(|&c| -c).collect(), -c0))
            } else {
                None
            };
            if let Some((mut a, c)) = oriented {
                let mut g = 0i64;
                for &v in &a {
                    g = gcd(g, v);
                }
                let c = c / g as i128;
                for v in &mut a {
                    *v /= g;
                }
                let facet = Facet {
                    normal: a,
                    offset: i64::try_from(c).expect("offset fits i64"),
                };
                if !facets.contains(&facet) {
                    facets.push(facet);
                }
            }
        }
        // Next n-combination of point indices.
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if idx[i] != i + points.len() - n {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                idx = vec![];
                break;
            }
        }
        if idx.is_empty() || points.len() < n {
            break;
        }
        if idx[0] > points.len() - n {
            break;
        }
    }
    facets.sort_by(|a, b| (&a.normal, a.offset).cmp(&(&b.normal, b.offset)));

    // Vertices: support points whose tight facet normals span R^n.
    let vertices: Vec<ExpVec> = points
        .iter()
        .filter(|p| {
            let mut tight: Vec<Vec<i128>> = facets
                .iter()
                .filter(|f| dot(&f.normal, &p.0) == f.offset as i128)
                .map(|f| f.normal.iter().map(|&c| c as i128).collect())
                .collect();
            rank(&mut tight) == n
        })
        .cloned()
        .collect();

    let poly = Polytope {
        vertices,
        facets,
        dim: n,
    };
    debug_assert!(poly.consistent());
    Ok(poly)
}

impl Polytope {
    /// V/H consistency: every vertex satisfies all facets and every facet is
    /// tight on at least n affinely independent vertices.
    pub fn consistent(&self) -> bool {
        let n = self.dim;
        for v in &self.vertices {
            for f in &self.facets {
                if dot(&f.normal, &v.0) > f.offset as i128 {
                    return false;
                }
            }
        }
        self.facets.iter().all(|f| {
            let on: Vec<&ExpVec> = self
                .vertices
                .iter()
                .filter(|v| dot(&f.normal, &v.0) == f.offset as i128)
                .collect();
            if on.len() < n {
                return false;
            }
            let mut diffs: Vec<Vec<i128>> = on
                .iter()
                .skip(1)
                .map(|p| {
                    p.0.iter()
                        .zip(&on[0].0)
                        .map(|(&a, &b)| (a - b) as i128)
                        .collect()
                })
                .collect();
            rank(&mut diffs) == n - 1
        })
    }

    /// Strict or closed membership of a rational point in the dilation
    /// rho * Delta.
    pub fn membership(&self, point: &[BigRational], rho: u32, strict: bool) -> bool {
        self.facets.iter().all(|f| {
            let lhs: BigRational = f
                .normal
                .iter()
                .zip(point)
                .map(|(&a, x)| BigRational::from(BigInt::from(a)) * x)
                .sum();
            let rhs = BigRational::from(BigInt::from(f.offset as i128 * rho as i128));
            if strict {
                lhs < rhs
            } else {
                lhs <= rhs
            }
        })
    }

    pub fn membership_lattice(&self, point: &ExpVec, rho: u32, strict: bool) -> bool {
        self.facets.iter().all(|f| {
            let lhs = dot(&f.normal, &point.0);
            let rhs = f.offset as i128 * rho as i128;
            if strict {
                lhs < rhs
            } else {
                lhs <= rhs
            }
        })
    }

    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let n = self.dim;
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for v in &self.vertices {
            for i in 0..n {
                lo[i] = lo[i].min(v.0[i]);
                hi[i] = hi[i].max(v.0[i]);
            }
        }
        (lo, hi)
    }

    /// Max vertex coordinate per variable (the per-variable degree d_i for a
    /// polynomial Newton polytope).
    pub fn degrees(&self) -> Vec<i64> {
        self.bounding_box().1
    }

    /// True when `point` (non-negative) lies in the box closure
    /// rho * B(interior), decided by Fourier-Motzkin over the rationals.
    pub fn box_membership(&self, point: &[BigRational], rho: u32) -> bool {
        if point.iter().any(|c| c.is_negative()) {
            return false;
        }
        let n = self.dim;
        let mut constraints: Vec<Constraint> = Vec::new();
        for f in &self.facets {
            constraints.push(Constraint {
                coeffs: f
                    .normal
                    .iter()
                    .map(|&a| BigRational::from(BigInt::from(a)))
                    .collect(),
                rhs: BigRational::from(BigInt::from(f.offset as i128 * rho as i128)),
                strict: true,
            });
        }
        for i in 0..n {
            let mut coeffs = vec![BigRational::zero(); n];
            coeffs[i] = -BigRational::one();
            constraints.push(Constraint {
                coeffs,
                rhs: -&point[i],
                strict: false,
            });
        }
        fourier_motzkin_feasible(constraints, n)
    }

    pub fn box_membership_lattice(&self, point: &ExpVec, rho: u32) -> bool {
        let q: Vec<BigRational> = point
            .0
            .iter()
            .map(|&c| BigRational::from(BigInt::from(c)))
            .collect();
        self.box_membership(&q, rho)
    }
}

/// All lattice points strictly inside rho * Delta, by bounding-box scan.
pub fn dilated_interior_points(poly: &Polytope, rho: u32) -> LatticePointSet {
    let (lo, hi) = poly.bounding_box();
    let lo: Vec<i64> = lo.iter().map(|&v| v * rho as i64).collect();
    let hi: Vec<i64> = hi.iter().map(|&v| v * rho as i64).collect();
    let mut points = Vec::new();
    scan_box(&lo, &hi, &mut |e| {
        if poly.membership_lattice(e, rho, true) {
            points.push(e.clone());
        }
    });
    points.sort();
    LatticePointSet {
        kind: RegionKind::InteriorDilation,
        rho,
        points,
    }
}

/// All lattice points of the box closure rho * B(interior(Delta)). Requires
/// the polytope to live in the non-negative orthant.
pub fn box_closure_points(poly: &Polytope, rho: u32) -> Result<LatticePointSet, PolytopeError> {
    if poly.vertices.iter().any(|v| v.0.iter().any(|&c| c < 0)) {
        return Err(PolytopeError::NegativeVertex);
    }
    let d = poly.degrees();
    let lo = vec![0i64; poly.dim];
    let hi: Vec<i64> = d.iter().map(|&di| rho as i64 * di - 1).collect();
    let mut points = Vec::new();
    scan_box(&lo, &hi, &mut |e| {
        if poly.box_membership_lattice(e, rho) {
            points.push(e.clone());
        }
    });
    points.sort();
    Ok(LatticePointSet {
        kind: RegionKind::BoxClosure,
        rho,
        points,
    })
}

fn scan_box(lo: &[i64], hi: &[i64], visit: &mut impl FnMut(&ExpVec)) {
    let n = lo.len();
    if (0..n).any(|i| lo[i] > hi[i]) {
        return;
    }
    let mut cur: Vec<i64> = lo.to_vec();
    loop {
        visit(&ExpVec(cur.clone()));
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

/// Linear constraint sum(coeffs . z) <= rhs, or strict when `strict`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
    pub strict: bool,
}

/// Decide feasibility of a system of strict/non-strict linear inequalities by
/// eliminating all variables.
pub fn fourier_motzkin_feasible(mut constraints: Vec<Constraint>, nvars: usize) -> bool {
    for var in 0..nvars {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for c in constraints {
            match c.coeffs[var].cmp(&BigRational::zero()) {
                std::cmp::Ordering::Greater => pos.push(c),
                std::cmp::Ordering::Less => neg.push(c),
                std::cmp::Ordering::Equal => rest.push(c),
            }
        }
        for p in &pos {
            for q in &neg {
                // p: a z_var + ... <= b (a > 0), q: -a' z_var + ... <= b' (a' > 0).
                let a = p.coeffs[var].clone();
                let a2 = -q.coeffs[var].clone();
                let coeffs: Vec<BigRational> = (0..nvars)
                    .map(|j| &p.coeffs[j] * &a2 + &q.coeffs[j] * &a)
                    .collect();
                rest.push(Constraint {
                    rhs: &p.rhs * &a2 + &q.rhs * &a,
                    coeffs,
                    strict: p.strict || q.strict,
                });
            }
        }
        constraints = rest;
    }
    constraints.iter().all(|c| {
        if c.strict {
            c.rhs > BigRational::zero()
        } else {
            c.rhs >= BigRational::zero()
        }
    })
}

/// Spot check of the Minkowski containment a*mu + b*closure(mu) in (a+b)*mu
/// on random rational points. Returns the first counterexample, if any
/// (there should be none; this guards the implementation, not the theorem).
pub fn minkowski_property_check(
    poly: &Polytope,
    kind: RegionKind,
    a: u32,
    b: u32,
    samples: usize,
    seed: u64,
) -> Result<(), (Vec<BigRational>, Vec<BigRational>)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = poly.dim;
    let (lo, hi) = poly.bounding_box();
    let denom = 64i64;
    let sample_dilation = |rng: &mut rand_chacha::ChaCha8Rng, s: u32, strict: bool| loop {
        let point: Vec<BigRational> = (0..n)
            .map(|i| {
                let v = rng.gen_range(lo[i] * s as i64 * denom..=hi[i] * s as i64 * denom);
                BigRational::new(BigInt::from(v), BigInt::from(denom))
            })
            .collect();
        if poly.membership(&point, s, strict) {
            return point;
        }
    };
    let scale_down = |point: &[BigRational], frac: BigRational| -> Vec<BigRational> {
        point.iter().map(|c| c * &frac).collect()
    };
    for _ in 0..samples {
        let (x, y) = match kind {
            RegionKind::InteriorDilation => (
                sample_dilation(&mut rng, a, true),
                sample_dilation(&mut rng, b, false),
            ),
            RegionKind::BoxClosure => {
                // Point of a*B(interior): z strictly inside a*Delta, then a
                // random point dominated by z. Closure side: z in b*Delta.
                let za = sample_dilation(&mut rng, a, true);
                let zb = sample_dilation(&mut rng, b, false);
                let frac = |rng: &mut rand_chacha::ChaCha8Rng| {
                    BigRational::new(BigInt::from(rng.gen_range(0..=denom)), BigInt::from(denom))
                };
                let x = scale_down(&za, frac(&mut rng));
                let y = scale_down(&zb, frac(&mut rng));
                (x, y)
            }
        };
        let sum: Vec<BigRational> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        let ok = match kind {
            RegionKind::InteriorDilation => poly.membership(&sum, a + b, true),
            RegionKind::BoxClosure => poly.box_membership(&sum, a + b),
        };
        if !ok {
            return Err((x, y));
        }
    }
    Ok(())
}
