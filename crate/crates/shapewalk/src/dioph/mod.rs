//! Diophantine experiments on the space of 2-lattices.
//!
//! Full-rank lattices in R^3 and their directional 2-lattices (orthogonal
//! projections along a primitive lattice vector), the diagonal-flow height
//! scan behind the boundedness criterion, continued fractions with certified
//! digits ([`cf`]), and totally real cubic fields with unit search and the
//! conditioned directional family ([`cubic`]).

pub mod cf;
pub mod cubic;

use crate::error::{Error, Result};
use crate::exact::{complete_to_unimodular, Mat3, Vec3};
use crate::lattice2::Lattice2;
use crate::scalar::{Rat, Scalar};
use cf::{cf_expand, CfExpansion, CfInput};
use num::{BigInt, One, ToPrimitive};
use std::str::FromStr;

/// A full-rank lattice in R^3, given by an ordered basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice3<S> {
    basis: [Vec3<S>; 3],
}

impl<S: Scalar> Lattice3<S> {
    pub fn new(basis: [Vec3<S>; 3]) -> Result<Self> {
        let m = Mat3([
            basis[0].0.clone(),
            basis[1].0.clone(),
            basis[2].0.clone(),
        ])
        .transpose();
        if m.det().is_zero() {
            return Err(Error::RankDeficient);
        }
        Ok(Lattice3 { basis })
    }

    pub fn from_ints(rows: [[i64; 3]; 3]) -> Result<Self> {
        Self::new(rows.map(Vec3::from_ints))
    }

    pub fn standard() -> Self {
        Self::from_ints([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).expect("rank 3")
    }

    pub fn basis(&self) -> &[Vec3<S>; 3] {
        &self.basis
    }

    /// Matrix with basis vectors as columns.
    pub fn basis_matrix(&self) -> Mat3<S> {
        Mat3([
            self.basis[0].0.clone(),
            self.basis[1].0.clone(),
            self.basis[2].0.clone(),
        ])
        .transpose()
    }

    pub fn covolume(&self) -> f64 {
        self.basis_matrix().det().to_f64().abs()
    }

    /// Lattice point with the given integer coordinates.
    pub fn point(&self, coords: &[BigInt; 3]) -> Vec3<S> {
        let mut acc = Vec3::zero();
        for (b, c) in self.basis.iter().zip(coords) {
            let cf = S::from_int(c.to_i64().expect("coordinate fits i64"));
            acc = acc.add(&b.scale(&cf));
        }
        acc
    }
}

/// Directional 2-lattice along the primitive member with the given integer
/// coordinates: the orthogonal projection of the other basis directions
/// onto v^perp.
pub fn directional_by_coords<S: Scalar>(
    l: &Lattice3<S>,
    coords: &[BigInt; 3],
) -> Result<Lattice2<S>> {
    let content = coords
        .iter()
        .fold(BigInt::from(0), |acc, x| num::Integer::gcd(&acc, x));
    if content != BigInt::one() {
        return Err(Error::NotPrimitive);
    }
    let u = complete_to_unimodular(coords)?;
    // images of the completed basis: b_j = sum_i U[i][j] basis_i
    let col = |j: usize| -> Vec3<S> {
        let mut acc = Vec3::zero();
        for i in 0..3 {
            let c = S::from_int(
                u.0[i][j]
                    .to_bigint()
                    .expect("unimodular integer entry")
                    .to_i64()
                    .expect("entry fits i64"),
            );
            acc = acc.add(&l.basis[i].scale(&c));
        }
        acc
    };
    let v = col(0);
    let b1 = col(1);
    let b2 = col(2);
    let vv = v.norm_sq();
    if vv.is_zero() {
        return Err(Error::ZeroVector);
    }
    let project = |x: &Vec3<S>| -> Vec3<S> { x.sub(&v.scale(&(x.dot(&v) / vv.clone()))) };
    Lattice2::new(project(&b1), project(&b2))
}

/// Directional 2-lattice along a vector of the lattice; the coordinates are
/// recovered and verified (exactly in the rational flavor, within 1e-9
/// relative in float), then must be coprime.
pub fn directional<S: Scalar>(l: &Lattice3<S>, v: &Vec3<S>) -> Result<Lattice2<S>> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let m = l.basis_matrix();
    let inv = m.inverse().ok_or(Error::RankDeficient)?;
    let coords_s = inv.mul_vec(v);
    let coords: [BigInt; 3] = [0, 1, 2].map(|i| {
        let f = coords_s.0[i].to_f64();
        BigInt::from(f.round() as i64)
    });
    // verify the rounded coordinates reproduce v
    let recon = l.point(&coords);
    let ok = if S::EXACT {
        recon == *v
    } else {
        let scale = v.norm_sq().to_f64().sqrt().max(1.0);
        recon.sub(v).norm_sq().to_f64().sqrt() <= 1e-9 * scale
    };
    if !ok {
        return Err(Error::NotInLattice);
    }
    directional_by_coords(l, &coords)
}

/// Height field of the diagonal flow over a rectangular grid.
#[derive(Clone, Debug)]
pub struct HeightField {
    /// (t1, t2, u_X(a(t1,t2) Lambda)) rows in row-major grid order.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_height: f64,
    pub argmax: (f64, f64),
}

fn grid_points(t_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -t_max + 2.0 * t_max * i as f64 / (n - 1) as f64)
        .collect()
}

/// u_X(a(t1, t2) Lambda) for a = diag(e^{t1}, e^{t2}, e^{-t1-t2}) over the
/// grid of [-T1, T1] x [-T2, T2].
pub fn a_orbit_scan(
    lat: &Lattice2<f64>,
    t_box: (f64, f64),
    grid: (usize, usize),
) -> Result<HeightField> {
    if grid.0 == 0 || grid.1 == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let t1s = grid_points(t_box.0, grid.0);
    let t2s = grid_points(t_box.1, grid.1);
    let mut rows = Vec::with_capacity(t1s.len() * t2s.len());
    let mut max_height = f64::NEG_INFINITY;
    let mut argmax = (0.0, 0.0);
    for &t1 in &t1s {
        for &t2 in &t2s {
            let a = Mat3::from_rows([
                [t1.exp(), 0.0, 0.0],
                [0.0, t2.exp(), 0.0],
                [0.0, 0.0, (-t1 - t2).exp()],
            ]);
            let h = lat.apply(&a)?.height()?;
            if h > max_height {
                max_height = h;
                argmax = (t1, t2);
            }
            rows.push((t1, t2, h));
        }
    }
    Ok(HeightField {
        rows,
        max_height,
        argmax,
    })
}

/// A 2-lattice built from three prescribed basis ratios v_i / w_i, keeping
/// the exact ratio descriptors for certified continued fractions.
#[derive(Clone, Debug)]
pub struct RatioLattice {
    pub name: String,
    pub ratios: [CfInput; 3],
    pub lattice: Lattice2<f64>,
}

/// Basis v = (x1, x2, x3), w = (1, 1, 1) realising the given ratios.
pub fn lattice_from_ratios(name: impl Into<String>, ratios: [CfInput; 3]) -> Result<RatioLattice> {
    let v = Vec3([
        ratios[0].approx_f64(),
        ratios[1].approx_f64(),
        ratios[2].approx_f64(),
    ]);
    let w = Vec3([1.0, 1.0, 1.0]);
    Ok(RatioLattice {
        name: name.into(),
        ratios,
        lattice: Lattice2::new(v, w)?,
    })
}

/// Badly approximable test lattice: ratios i + sqrt(2), all partial
/// quotients equal to 2.
pub fn bounded_cf_lattice() -> RatioLattice {
    let base = CfInput::surd(0, 2, 1);
    lattice_from_ratios(
        "bounded-cf",
        [base.shifted(0), base.shifted(1), base.shifted(2)],
    )
    .expect("rank 2")
}

/// Slowly unbounded test lattice: ratios i + [0; 1, 2, 3, ..., 30].
pub fn linear_cf_lattice() -> RatioLattice {
    let digits: Vec<BigInt> = std::iter::once(BigInt::from(0))
        .chain((1..=30).map(BigInt::from))
        .collect();
    let conv = cf::convergents(&digits);
    let (p, q) = conv.last().expect("nonempty").clone();
    let base = CfInput::Rational(Rat::from_ratio(p, q));
    lattice_from_ratios(
        "linear-cf",
        [base.shifted(0), base.shifted(1), base.shifted(2)],
    )
    .expect("rank 2")
}

/// Liouville-type test lattice: ratios i + sum_{k<=4} 10^{-k!}, an exact
/// rational with enormous partial quotients.
pub fn liouville_lattice() -> RatioLattice {
    let x = Rat::from_str("0.110001000000000000000001").expect("decimal literal");
    let base = CfInput::Rational(x);
    lattice_from_ratios(
        "liouville",
        [base.shifted(0), base.shifted(1), base.shifted(2)],
    )
    .expect("rank 2")
}

pub fn builtin_ratio_lattice(name: &str) -> Result<RatioLattice> {
    match name {
        "bounded-cf" => Ok(bounded_cf_lattice()),
        "linear-cf" => Ok(linear_cf_lattice()),
        "liouville" => Ok(liouville_lattice()),
        other => Err(Error::InvalidArgument(format!(
            "unknown ratio lattice '{other}' (expected bounded-cf, linear-cf or liouville)"
        ))),
    }
}

/// Paired data for the boundedness-versus-approximability experiment: the
/// certified continued fractions of the three basis ratios next to the
/// diagonal-flow height scan of the same lattice.
#[derive(Clone, Debug)]
pub struct FurstenbergReport {
    pub name: String,
    pub ratio_expansions: [CfExpansion; 3],
    /// Largest certified partial quotient (index >= 1) over the three ratios.
    pub max_partial_quotient: BigInt,
    /// Per-coordinate-plane check that no small basis combination has a
    /// vanishing coordinate (hypothesis of the boundedness criterion);
    /// violations are flagged, not fatal.
    pub coordinate_plane_clear: [bool; 3],
    pub scan_max: f64,
    pub scan_argmax: (f64, f64),
}

pub fn furstenberg_report(
    rl: &RatioLattice,
    t_box: (f64, f64),
    grid: (usize, usize),
    cf_terms: usize,
) -> Result<FurstenbergReport> {
    let expansions: [CfExpansion; 3] = [
        cf_expand(&rl.ratios[0], cf_terms)?,
        cf_expand(&rl.ratios[1], cf_terms)?,
        cf_expand(&rl.ratios[2], cf_terms)?,
    ];
    let max_pq = expansions
        .iter()
        .filter_map(|e| e.max_partial_quotient())
        .max()
        .unwrap_or_else(|| BigInt::from(0));
    let (u, w) = rl.lattice.basis();
    let mut clear = [true; 3];
    for a in -50i64..=50 {
        for b in -50i64..=50 {
            if a == 0 && b == 0 {
                continue;
            }
            let x = u.scale(&(a as f64)).add(&w.scale(&(b as f64)));
            let scale = x.norm().max(1e-30);
            for i in 0..3 {
                if x.0[i].abs() < 1e-9 * scale {
                    clear[i] = false;
                }
            }
        }
    }
    let field = a_orbit_scan(&rl.lattice, t_box, grid)?;
    Ok(FurstenbergReport {
        name: rl.name.clone(),
        ratio_expansions: expansions,
        max_partial_quotient: max_pq,
        coordinate_plane_clear: clear,
        scan_max: field.max_height,
        scan_argmax: field.argmax,
    })
}
