//! Totally real cubic fields: root isolation, the geometric embedding,
//! brute-force unit search and the conditioned directional-shape family.
//!
//! The order Z[alpha] stands in for the full ring of integers; index-finite
//! orders give commensurable embedded lattices and the same qualitative
//! experiments. Norms are computed exactly as determinants of
//! multiplication matrices, so the unit predicate |N| = 1 is an integer
//! identity, never a float comparison.

use crate::error::{Error, Result};
use crate::exact::{Mat3, Vec3};
use crate::lattice2::ShapePoint;
use crate::scalar::{Rat, Scalar};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::{directional_by_coords, Lattice3};

/// Monic integer cubic x^3 + a x^2 + b x + c.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicPoly {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl CubicPoly {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        CubicPoly {
            a: BigInt::from(a),
            b: BigInt::from(b),
            c: BigInt::from(c),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let a = Rat::from_bigint(self.a.clone());
        let b = Rat::from_bigint(self.b.clone());
        let c = Rat::from_bigint(self.c.clone());
        ((x.clone() + a) * x.clone() + b) * x.clone() + c
    }

    /// 18abc - 4a^3c + a^2b^2 - 4b^3 - 27c^2.
    pub fn discriminant(&self) -> BigInt {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        BigInt::from(18) * a * b * c - BigInt::from(4) * a * a * a * c + a * a * b * b
            - BigInt::from(4) * b * b * b
            - BigInt::from(27) * c * c
    }

    /// A monic integer cubic is reducible over Q iff it has an integer root
    /// dividing the constant term.
    pub fn has_rational_root(&self) -> bool {
        if self.c.is_zero() {
            return true;
        }
        let limit = self.c.abs();
        let mut d = BigInt::one();
        while &d * &d <= limit {
            if (&limit % &d).is_zero() {
                for cand in [d.clone(), &limit / &d] {
                    for signed in [cand.clone(), -cand.clone()] {
                        if self.eval(&Rat::from_bigint(signed)).is_zero() {
                            return true;
                        }
                    }
                }
            }
            d += 1;
        }
        false
    }
}

/// Rational enclosure of one real root.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    pub lo: Rat,
    pub hi: Rat,
}

impl RootEnclosure {
    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn width(&self) -> Rat {
        self.hi.clone() - self.lo.clone()
    }
}

/// A totally real cubic order with its geometric embedding.
#[derive(Clone, Debug)]
pub struct CubicFieldSpec {
    pub poly: CubicPoly,
    /// Real roots sigma_1(alpha) > sigma_2(alpha) > sigma_3(alpha).
    pub roots: [RootEnclosure; 3],
    /// phi(1), phi(alpha), phi(alpha^2).
    pub embedding: [Vec3<f64>; 3],
    /// The embedded order lattice phi(Z[alpha]).
    pub order_lattice: Lattice3<f64>,
}

impl CubicFieldSpec {
    pub fn roots_f64(&self) -> [f64; 3] {
        [
            self.roots[0].mid_f64(),
            self.roots[1].mid_f64(),
            self.roots[2].mid_f64(),
        ]
    }

    /// phi(x + y alpha + z alpha^2) at the working precision.
    pub fn embed(&self, coords: &[BigInt; 3]) -> Vec3<f64> {
        let r = self.roots_f64();
        let x = big_to_f64(&coords[0]);
        let y = big_to_f64(&coords[1]);
        let z = big_to_f64(&coords[2]);
        Vec3([0, 1, 2].map(|i| x + y * r[i] + z * r[i] * r[i]))
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

// dense polynomial over Q for the Sturm chain
type Poly = Vec<BigRational>;

fn poly_eval(p: &Poly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_derivative(p: &Poly) -> Poly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn poly_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_rem(num: &Poly, den: &Poly) -> Poly {
    let mut rem = num.clone();
    let dlead = den.last().expect("nonzero divisor");
    while rem.len() >= den.len() && !rem.is_empty() {
        let shift = rem.len() - den.len();
        let factor = rem.last().unwrap() / dlead;
        for (i, c) in den.iter().enumerate() {
            let idx = i + shift;
            rem[idx] = &rem[idx] - &factor * c;
        }
        rem = poly_trim(rem);
        if rem.len() <= shift {
            break;
        }
    }
    rem
}

fn sturm_chain(f: &Poly) -> Vec<Poly> {
    let mut chain = vec![f.clone(), poly_derivative(f)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.iter().map(|c| -c).collect());
    }
    chain
}

fn sign_variations(chain: &[Poly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None;
    for p in chain {
        let v = poly_eval(p, x);
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if let Some(prev) = last {
            if prev != s {
                count += 1;
            }
        }
        last = Some(s);
    }
    count
}

/// Validate a monic integer cubic and isolate its three real roots to the
/// requested precision (enclosure width below 2^-precision_bits).
pub fn cubic_field(poly: CubicPoly, precision_bits: u32) -> Result<CubicFieldSpec> {
    if poly.has_rational_root() {
        return Err(Error::BadPolynomial(
            "reducible over Q (has a rational root)".into(),
        ));
    }
    let disc = poly.discriminant();
    if !disc.is_positive() {
        return Err(Error::BadPolynomial(format!(
            "discriminant {disc} <= 0: not three distinct real roots"
        )));
    }
    let f: Poly = vec![
        BigRational::from_integer(poly.c.clone()),
        BigRational::from_integer(poly.b.clone()),
        BigRational::from_integer(poly.a.clone()),
        BigRational::one(),
    ];
    let chain = sturm_chain(&f);
    let bound = BigInt::one()
        + [&poly.a, &poly.b, &poly.c]
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap();
    let lo = BigRational::from_integer(-bound.clone());
    let hi = BigRational::from_integer(bound);
    let total = sign_variations(&chain, &lo) - sign_variations(&chain, &hi);
    if total != 3 {
        return Err(Error::BadPolynomial(format!(
            "expected 3 real roots in the Cauchy bound, found {total}"
        )));
    }
    // isolate by repeated bisection
    let mut pending = vec![(lo, hi)];
    let mut isolated: Vec<(BigRational, BigRational)> = Vec::new();
    while let Some((a, b)) = pending.pop() {
        let count = sign_variations(&chain, &a) - sign_variations(&chain, &b);
        match count {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = (&a + &b) / BigInt::from(2);
                // irreducible cubic has no rational root, so f(mid) != 0
                pending.push((a, mid.clone()));
                pending.push((mid, b));
            }
        }
    }
    if isolated.len() != 3 {
        return Err(Error::BadPolynomial("root isolation failed".into()));
    }
    // refine each to the requested width
    let target = BigRational::new(BigInt::one(), BigInt::one() << precision_bits);
    let mut roots: Vec<RootEnclosure> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            let fa_pos = poly_eval(&f, &a).is_positive();
            while &b - &a > target {
                let mid = (&a + &b) / BigInt::from(2);
                if poly_eval(&f, &mid).is_positive() == fa_pos {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            RootEnclosure {
                lo: Rat(a),
                hi: Rat(b),
            }
        })
        .collect();
    roots.sort_by(|x, y| y.lo.partial_cmp(&x.lo).unwrap());
    let roots: [RootEnclosure; 3] = [roots[0].clone(), roots[1].clone(), roots[2].clone()];

    // product of the roots must be -c
    let prod: f64 = roots.iter().map(|r| r.mid_f64()).product();
    let want = -big_to_f64(&poly.c);
    if (prod - want).abs() > 1e-9 * (1.0 + want.abs()) {
        return Err(Error::NumericalFailure {
            step: 0,
            what: format!("root product {prod} differs from {want}"),
        });
    }

    let r = [roots[0].mid_f64(), roots[1].mid_f64(), roots[2].mid_f64()];
    let embedding = [
        Vec3([1.0, 1.0, 1.0]),
        Vec3(r),
        Vec3([r[0] * r[0], r[1] * r[1], r[2] * r[2]]),
    ];
    let order_lattice = Lattice3::new([
        embedding[0].clone(),
        embedding[1].clone(),
        embedding[2].clone(),
    ])?;
    Ok(CubicFieldSpec {
        poly,
        roots,
        embedding,
        order_lattice,
    })
}

/// Matrix of multiplication by x + y alpha + z alpha^2 on the basis
/// {1, alpha, alpha^2} of Z[alpha], with integer entries.
pub fn multiplication_matrix(poly: &CubicPoly, coords: &[BigInt; 3]) -> Mat3<Rat> {
    let (a, b, c) = (&poly.a, &poly.b, &poly.c);
    let (x, y, z) = (&coords[0], &coords[1], &coords[2]);
    // alpha^3 = -a alpha^2 - b alpha - c
    // alpha^4 = (a^2 - b) alpha^2 + (ab - c) alpha + ac
    let col0 = [x.clone(), y.clone(), z.clone()];
    let col1 = [-(c * z), x - b * z, y - a * z];
    let col2 = [
        -(c * y) + a * c * z,
        -(b * y) + (a * b - c) * z,
        x - a * y + (a * a - b) * z,
    ];
    Mat3([0, 1, 2].map(|i| {
        [
            Rat::from_bigint(col0[i].clone()),
            Rat::from_bigint(col1[i].clone()),
            Rat::from_bigint(col2[i].clone()),
        ]
    }))
}

/// Field norm of x + y alpha + z alpha^2, exact.
pub fn norm_exact(poly: &CubicPoly, coords: &[BigInt; 3]) -> BigInt {
    multiplication_matrix(poly, coords)
        .det()
        .to_bigint()
        .expect("integer determinant")
}

/// An order element of norm +-1.
#[derive(Clone, Debug, serde::Serialize)]
pub struct UnitElement {
    /// Coordinates (x, y, z) of x + y alpha + z alpha^2.
    pub coords: [i64; 3],
    /// Sign of the norm.
    pub norm: i8,
    /// (log|sigma_1|, log|sigma_2|, log|sigma_3|); sums to ~0.
    pub log_embedding: [f64; 3],
}

/// All coordinate vectors in the box [-bound, bound]^3 whose norm is +-1,
/// in lexicographic order.
pub fn unit_search(spec: &CubicFieldSpec, bound: i64) -> Vec<UnitElement> {
    let mut out = Vec::new();
    let r = spec.roots_f64();
    for x in -bound..=bound {
        for y in -bound..=bound {
            for z in -bound..=bound {
                if x == 0 && y == 0 && z == 0 {
                    continue;
                }
                let coords = [BigInt::from(x), BigInt::from(y), BigInt::from(z)];
                let n = norm_exact(&spec.poly, &coords);
                if n.abs() != BigInt::one() {
                    continue;
                }
                let log_embedding = [0, 1, 2].map(|i| {
                    let s = x as f64 + y as f64 * r[i] + z as f64 * r[i] * r[i];
                    s.abs().ln()
                });
                out.push(UnitElement {
                    coords: [x, y, z],
                    norm: if n.is_positive() { 1 } else { -1 },
                    log_embedding,
                });
            }
        }
    }
    out
}

fn log_plane_coords(u: &UnitElement) -> (f64, f64) {
    let l = &u.log_embedding;
    // orthonormal basis of the sum-zero plane
    let e1 = (l[0] - l[1]) / 2.0f64.sqrt();
    let e2 = (l[0] + l[1] - 2.0 * l[2]) / 6.0f64.sqrt();
    (e1, e2)
}

/// Rank of the log-embedding span (0, 1 or 2) with the given threshold.
pub fn log_rank(units: &[UnitElement], tol: f64) -> usize {
    let pts: Vec<(f64, f64)> = units.iter().map(log_plane_coords).collect();
    let nonzero: Vec<&(f64, f64)> = pts
        .iter()
        .filter(|(a, b)| a.hypot(*b) > tol)
        .collect();
    if nonzero.is_empty() {
        return 0;
    }
    for i in 0..nonzero.len() {
        for j in (i + 1)..nonzero.len() {
            let det = nonzero[i].0 * nonzero[j].1 - nonzero[i].1 * nonzero[j].0;
            if det.abs() > tol {
                return 2;
            }
        }
    }
    1
}

/// Pick a multiplicatively independent pair with the smallest log norms
/// (short generators keep the exponent-box embeddings well conditioned).
pub fn independent_pair(units: &[UnitElement], tol: f64) -> Option<(usize, usize)> {
    let pts: Vec<(f64, f64)> = units.iter().map(log_plane_coords).collect();
    let mut best: Option<(f64, (usize, usize))> = None;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let det = (pts[i].0 * pts[j].1 - pts[i].1 * pts[j].0).abs();
            if det <= tol {
                continue;
            }
            let size = pts[i].0.hypot(pts[i].1).max(pts[j].0.hypot(pts[j].1));
            if best.map_or(true, |(s, _)| size < s) {
                best = Some((size, (i, j)));
            }
        }
    }
    best.map(|(_, pair)| pair)
}

/// One conditioned directional sample pi^{phi(eps)}(L).
#[derive(Clone, Debug)]
pub struct ConditionedSample {
    pub exponents: (i64, i64),
    pub unit_coords: [i64; 3],
    pub shape: ShapePoint,
    pub height: f64,
    /// Distance between the two computation routes (projection along
    /// phi(eps) versus diagonal action on pi^{1}(L)).
    pub route_gap: f64,
}

/// The conditioned-shape table over unit words eps1^m eps2^n.
#[derive(Clone, Debug)]
pub struct ConditionedReport {
    pub samples: Vec<ConditionedSample>,
    /// True when some exponent pairs were dropped due to float overflow.
    pub truncated: bool,
}

fn mul_coords(poly: &CubicPoly, a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    let m = multiplication_matrix(poly, a);
    let v = m.mul_vec(&Vec3([
        Rat::from_bigint(b[0].clone()),
        Rat::from_bigint(b[1].clone()),
        Rat::from_bigint(b[2].clone()),
    ]));
    [0, 1, 2].map(|i| v.0[i].to_bigint().expect("integer product"))
}

fn invert_coords(poly: &CubicPoly, a: &[BigInt; 3]) -> Result<[BigInt; 3]> {
    let m = multiplication_matrix(poly, a);
    let det = m.det();
    if det.abs() != Rat::from_int(1) {
        return Err(Error::InvalidArgument("not a unit".into()));
    }
    // inverse = adjugate * det for det = +-1; coords of eps^{-1} are the
    // image of 1, the first column
    let adj = m.adjugate();
    let inv = adj.scale(&det);
    Ok([0, 1, 2].map(|i| inv.0[i][0].to_bigint().expect("integer inverse")))
}

fn power_coords(poly: &CubicPoly, base: &[BigInt; 3], e: i64) -> Result<[BigInt; 3]> {
    let one = [BigInt::one(), BigInt::zero(), BigInt::zero()];
    let base = if e < 0 {
        invert_coords(poly, base)?
    } else {
        base.clone()
    };
    let mut acc = one;
    for _ in 0..e.abs() {
        acc = mul_coords(poly, &acc, &base);
    }
    Ok(acc)
}

/// Shapes of the conditioned directional lattices over the exponent box
/// [-m_max, m_max] x [-n_max, n_max], with the dual-route gap recorded.
///
/// Route one projects L orthogonally along phi(eps). Route two goes through
/// the dual lattice: in rank 2 the in-plane dual is a rotated rescaling of
/// the primal, so shape(pi^v(L)) = shape(L* meet v^perp), and for a unit
/// eps the intersections are exactly equivariant:
/// L* meet phi(eps)^perp = diag(sigma_i(eps))^{-1} (L* meet phi(1)^perp).
/// Applying the inverse diagonal to that fixed 2-lattice is therefore an
/// independent computation of the same shape. (The naive transcription
/// diag(sigma_i(eps)) . pi^{1}(L) lands in the wrong plane and does not
/// reproduce the family; the route tests pin this down.)
pub fn conditioned_shapes(
    spec: &CubicFieldSpec,
    units: &[UnitElement],
    m_max: i64,
    n_max: i64,
) -> Result<ConditionedReport> {
    let (i, j) = independent_pair(units, 1e-6).ok_or_else(|| {
        Error::InvalidArgument("no multiplicatively independent unit pair".into())
    })?;
    let eps1 = units[i].coords.map(BigInt::from);
    let eps2 = units[j].coords.map(BigInt::from);
    // L* meet phi(1)^perp: the embedding basis has phi(1) first, so the
    // dual-basis columns 2 and 3 span the intersection exactly
    let dual = spec
        .order_lattice
        .basis_matrix()
        .inverse_transpose()
        .ok_or(Error::RankDeficient)?;
    let dual_cap = crate::lattice2::Lattice2::new(
        Vec3([dual.0[0][1], dual.0[1][1], dual.0[2][1]]),
        Vec3([dual.0[0][2], dual.0[1][2], dual.0[2][2]]),
    )?;
    let mut samples = Vec::new();
    let mut truncated = false;
    for m in -m_max..=m_max {
        let pm = power_coords(&spec.poly, &eps1, m)?;
        for n in -n_max..=n_max {
            let pn = power_coords(&spec.poly, &eps2, n)?;
            let eps = mul_coords(&spec.poly, &pm, &pn);
            let v = spec.embed(&eps);
            if !v
                .0
                .iter()
                .all(|c| c.is_finite() && f64::abs(*c) > 1e-150 && f64::abs(*c) < 1e150)
            {
                truncated = true;
                continue;
            }
            // route one: project along phi(eps)
            let lat1 = directional_by_coords(&spec.order_lattice, &eps)?;
            // route two: inverse diagonal action on the dual intersection
            let diag_inv = Mat3::from_rows([
                [1.0 / v.0[0], 0.0, 0.0],
                [0.0, 1.0 / v.0[1], 0.0],
                [0.0, 0.0, 1.0 / v.0[2]],
            ]);
            let lat2 = dual_cap.apply(&diag_inv)?;
            let z1 = lat1.shape()?;
            let z2 = lat2.shape()?;
            let gap = (z1.z - z2.z).norm();
            let coords_small = [0, 1, 2].map(|k| eps[k].to_i64().unwrap_or(i64::MAX));
            samples.push(ConditionedSample {
                exponents: (m, n),
                unit_coords: coords_small,
                shape: z1,
                height: lat1.height()?,
                route_gap: gap,
            });
        }
    }
    Ok(ConditionedReport { samples, truncated })
}
