//! 2-lattices and their shapes.
//!
//! A [`Lattice2`] is an ordered basis pair spanning a rank-2 discrete
//! subgroup of R^3, considered up to positive scaling. Its *shape* is the
//! point of the modular fundamental domain obtained from the Gram matrix,
//! further folded onto the reflection-canonical half `Re z >= 0` (one sheet
//! of the double cover of the space of shapes).
//!
//! This module provides:
//! - [`reduce_fundamental`]: PSL2(Z) reduction with a replayable word
//! - [`Lattice2::shape`]: reduced, reflection-canonical shape point
//! - [`Lattice2::height`] / [`Lattice2::shortest_vector`]: the normalised
//!   minimum `u_X` via Lagrange–Gauss reduction
//! - [`expansion_cocycle`]: by which factor a lattice vector is stretched,
//!   after normalising covolumes
//! - [`rho_line`]: the normalised covolume of a lattice line intersection

use crate::error::{Error, Result};
use crate::exact::{wedge2, Mat2, Mat3, Vec3};
use crate::scalar::{Rat, Scalar};
use num::complex::Complex64;

/// Iteration cap guarding float pathologies near the real axis.
const REDUCE_MAX_ITER: usize = 10_000;
/// Relative tolerance deciding whether a point sits on the arc |z| = 1.
const ARC_EPS: f64 = 1e-12;

/// One PSL2(Z) move applied during reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReduceMove {
    /// z -> z - n
    Translate(i64),
    /// z -> -1/z
    Invert,
}

/// Ordered rank-2 basis in R^3.
#[derive(Clone, PartialEq, Debug)]
pub struct Lattice2<S> {
    u: Vec3<S>,
    w: Vec3<S>,
}

impl<S: Scalar> Lattice2<S> {
    pub fn new(u: Vec3<S>, w: Vec3<S>) -> Result<Self> {
        if wedge2(&u, &w).is_zero() {
            return Err(Error::RankDeficient);
        }
        Ok(Lattice2 { u, w })
    }

    pub fn from_ints(u: [i64; 3], w: [i64; 3]) -> Result<Self> {
        Self::new(Vec3::from_ints(u), Vec3::from_ints(w))
    }

    /// The standard plane lattice span{e1, e2}.
    pub fn standard() -> Self {
        Self::from_ints([1, 0, 0], [0, 1, 0]).expect("rank 2")
    }

    pub fn basis(&self) -> (&Vec3<S>, &Vec3<S>) {
        (&self.u, &self.w)
    }

    /// Wedge of the basis; its direction is the plane normal and its norm
    /// the covolume.
    pub fn wedge(&self) -> Vec3<S> {
        wedge2(&self.u, &self.w)
    }

    pub fn covolume_sq(&self) -> S {
        self.wedge().norm_sq()
    }

    pub fn covolume(&self) -> f64 {
        self.covolume_sq().to_f64().sqrt()
    }

    pub fn gram(&self) -> Mat2<S> {
        Mat2([
            [self.u.norm_sq(), self.u.dot(&self.w)],
            [self.w.dot(&self.u), self.w.norm_sq()],
        ])
    }

    /// Image lattice g . Lambda.
    pub fn apply(&self, g: &Mat3<S>) -> Result<Self> {
        Lattice2::new(g.mul_vec(&self.u), g.mul_vec(&self.w))
    }

    pub fn scale(&self, c: &S) -> Result<Self> {
        Lattice2::new(self.u.scale(c), self.w.scale(c))
    }

    /// Basis change by an integer matrix acting on the right.
    pub fn change_basis(&self, m: &Mat2<S>) -> Result<Self> {
        let u = self.u.scale(&m.0[0][0]).add(&self.w.scale(&m.0[1][0]));
        let w = self.u.scale(&m.0[0][1]).add(&self.w.scale(&m.0[1][1]));
        Lattice2::new(u, w)
    }

    pub fn to_f64(&self) -> Lattice2<f64> {
        Lattice2 {
            u: self.u.to_f64(),
            w: self.w.to_f64(),
        }
    }

    /// Lagrange–Gauss reduced basis: first vector is a shortest nonzero
    /// lattice vector, second is shortest among vectors independent of it.
    pub fn lagrange_reduced(&self) -> Result<(Vec3<S>, Vec3<S>)> {
        let mut u = self.u.clone();
        let mut w = self.w.clone();
        let half = S::one() / S::from_int(2);
        // float flavor accepts |mu| within 2^-40 of 1/2; rounding noise on
        // the tie would otherwise bounce between the +-1/2 representatives
        let tol = if S::EXACT {
            S::zero()
        } else {
            S::one() / S::from_int(1 << 40)
        };
        let bound = half + tol;
        for _ in 0..REDUCE_MAX_ITER {
            if w.norm_sq() < u.norm_sq() {
                std::mem::swap(&mut u, &mut w);
            }
            let usq = u.norm_sq();
            if usq.is_zero() {
                return Err(Error::RankDeficient);
            }
            let mu = u.dot(&w) / usq;
            if mu.abs() <= bound {
                return Ok((u, w));
            }
            w = w.sub(&u.scale(&mu.round_int()));
        }
        Err(Error::ReductionOverflow(REDUCE_MAX_ITER))
    }

    /// A true minimum of the norm over the nonzero lattice vectors.
    pub fn shortest_vector(&self) -> Result<Vec3<S>> {
        Ok(self.lagrange_reduced()?.0)
    }

    /// Mahler height u_X = |Lambda|^{1/2} / ||v_min||; scale invariant.
    pub fn height(&self) -> Result<f64> {
        let (u, _) = self.lagrange_reduced()?;
        let covol_sq = self.covolume_sq().to_f64();
        Ok(covol_sq.sqrt().sqrt() / u.norm_sq().to_f64().sqrt())
    }

    /// Reduced, reflection-canonical shape point.
    ///
    /// The Gram matrix of the Lagrange-reduced basis fixes an isometry class;
    /// z0 = (<u,w> + i |u /\ w|) / |u|^2 is then reduced into the fundamental
    /// domain and folded onto Re z >= 0.
    pub fn shape(&self) -> Result<ShapePoint> {
        let (u, w) = self.lagrange_reduced()?;
        let g11 = u.norm_sq().to_f64();
        let g12 = u.dot(&w).to_f64();
        let g22 = w.norm_sq().to_f64();
        let det = g11 * g22 - g12 * g12;
        if !(det > 0.0) || !(g11 > 0.0) {
            return Err(Error::RankDeficient);
        }
        let z0 = Complex64::new(g12 / g11, det.sqrt() / g11);
        let (z, word) = reduce_fundamental(z0)?;
        let (z, reflected) = if z.re < 0.0 {
            (Complex64::new(-z.re, z.im), true)
        } else {
            (z, false)
        };
        Ok(ShapePoint {
            z,
            reduced: true,
            word,
            reflected,
        })
    }
}

/// A point of the upper half-plane together with its reduction record.
#[derive(Clone, Debug)]
pub struct ShapePoint {
    /// Representative, with Im z > 0; when `reduced`, lies in the closed
    /// fundamental domain and, if additionally canonical, has Re z >= 0.
    pub z: Complex64,
    pub reduced: bool,
    /// Moves that carried the input to `z` (before any reflection).
    pub word: Vec<ReduceMove>,
    /// Whether the final reflection z -> -conj(z) was applied.
    pub reflected: bool,
}

impl ShapePoint {
    pub fn re(&self) -> f64 {
        self.z.re
    }
    pub fn im(&self) -> f64 {
        self.z.im
    }
}

/// Reduce z into the PSL2(Z) fundamental domain.
///
/// Boundary conventions: Re in [-1/2, 1/2) after translations and, on the
/// arc |z| = 1, Re >= 0 (the arc rule wins at the corner). The returned word
/// is the move sequence applied to the input; [`reconstruct`] replays it
/// backwards.
pub fn reduce_fundamental(z0: Complex64) -> Result<(Complex64, Vec<ReduceMove>)> {
    if !(z0.im > 0.0) || !z0.re.is_finite() || !z0.im.is_finite() {
        return Err(Error::NonPositiveImaginary(z0.im));
    }
    let mut z = z0;
    let mut word = Vec::new();
    let mut steps = 0;
    loop {
        steps += 1;
        if steps > REDUCE_MAX_ITER {
            return Err(Error::ReductionOverflow(REDUCE_MAX_ITER));
        }
        let n = (z.re + 0.5).floor();
        if n.abs() > 9.0e15 {
            return Err(Error::InvalidArgument(format!(
                "translation amount {n} too large to track exactly"
            )));
        }
        if n != 0.0 {
            z.re -= n;
            word.push(ReduceMove::Translate(n as i64));
        }
        let nsq = z.norm_sqr();
        if nsq < 1.0 - ARC_EPS {
            z = Complex64::new(-z.re / nsq, z.im / nsq);
            word.push(ReduceMove::Invert);
            continue;
        }
        // On the arc, fold the left half onto the right half.
        if nsq <= 1.0 + ARC_EPS && z.re < 0.0 {
            z = Complex64::new(-z.re / nsq, z.im / nsq);
            word.push(ReduceMove::Invert);
        }
        return Ok((z, word));
    }
}

/// Replay a reduction word backwards: maps the reduced point to the input.
pub fn reconstruct(z_star: Complex64, word: &[ReduceMove]) -> Complex64 {
    let mut z = z_star;
    for mv in word.iter().rev() {
        match mv {
            ReduceMove::Translate(n) => z.re += *n as f64,
            ReduceMove::Invert => {
                let nsq = z.norm_sqr();
                z = Complex64::new(-z.re / nsq, z.im / nsq);
            }
        }
    }
    z
}

/// Expansion cocycle f_{Lambda,v}(g): the stretch of `v` under `g` relative
/// to the covolume normalisation of the lattice.
///
/// Equals (|gv|/|v|) / (|g(u /\ w)| / |u /\ w|)^{1/2} and satisfies
/// f_{Lambda,v}(hg) = f_{g Lambda, gv}(h) * f_{Lambda,v}(g).
pub fn expansion_cocycle<S: Scalar>(
    g: &Mat3<S>,
    lat: &Lattice2<S>,
    v: &Vec3<S>,
) -> Result<f64> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let gv = g.mul_vec(v);
    let (u, w) = lat.basis();
    let wedge = wedge2(u, w);
    let gwedge = wedge2(&g.mul_vec(u), &g.mul_vec(w));
    let vec_ratio = (gv.norm_sq().to_f64() / v.norm_sq().to_f64()).sqrt();
    let wedge_ratio = (gwedge.norm_sq().to_f64() / wedge.norm_sq().to_f64()).sqrt();
    Ok(vec_ratio / wedge_ratio.sqrt())
}

/// rho = |Lambda meet l| / |Lambda|^{1/2} for a line l inside the lattice
/// plane, decided exactly over the rationals.
pub fn rho_line(lat: &Lattice2<Rat>, dir: &Vec3<Rat>) -> Result<f64> {
    if dir.is_zero() {
        return Err(Error::ZeroVector);
    }
    let (u, w) = lat.basis();
    // kernel of the 3x3 matrix with columns (u, w, -dir)
    let m = Mat3([
        [u.0[0].clone(), w.0[0].clone(), -dir.0[0].clone()],
        [u.0[1].clone(), w.0[1].clone(), -dir.0[1].clone()],
        [u.0[2].clone(), w.0[2].clone(), -dir.0[2].clone()],
    ]);
    if !m.det().is_zero() {
        return Err(Error::LineOutsidePlane);
    }
    // columns of the adjugate span the kernel when the rank is 2
    let adj = m.adjugate();
    let mut kernel: Option<[Rat; 3]> = None;
    for j in 0..3 {
        let col = [adj.0[0][j].clone(), adj.0[1][j].clone(), adj.0[2][j].clone()];
        if col.iter().any(|e| !e.is_zero()) {
            kernel = Some(col);
            break;
        }
    }
    let Some([a, b, t]) = kernel else {
        return Err(Error::RankDeficient);
    };
    if t.is_zero() {
        // a u + b w = 0 with (a,b) nonzero contradicts rank 2
        return Err(Error::LineOutsidePlane);
    }
    // primitive integer coefficients along (a, b)
    let denom_lcm = num::integer::lcm(a.denom().clone(), b.denom().clone());
    let ai = a.numer() * (&denom_lcm / a.denom());
    let bi = b.numer() * (&denom_lcm / b.denom());
    let g = num::Integer::gcd(&ai, &bi);
    let (ai, bi) = (&ai / &g, &bi / &g);
    let p = u
        .scale(&Rat::from_bigint(ai))
        .add(&w.scale(&Rat::from_bigint(bi)));
    let covol_sq = lat.covolume_sq().to_f64();
    Ok(p.norm_sq().to_f64().sqrt() / covol_sq.sqrt().sqrt())
}
