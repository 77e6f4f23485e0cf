//! The equivariant section over the circle of isotropic planes.
//!
//! The family `Lambda_t = span_Z{e1 + t e2, e2 + 2t e3}` (with
//! `Lambda_inf = span_Z{e2, 2 e3}`) defines a map `psi` from the projective
//! line into the space of 2-lattices. Conjugating the SL2 generators
//! `g1 = [[1,0],[2,1]]`, `g2 = [[1,1],[0,1]]` through `psi` gives exactly the
//! unipotents `u^+(2)`, `u^-(2)`: `psi o g1 = u_+ o psi` and
//! `psi o g2 = u_- o psi`. [`equivariance_check`] verifies these identities
//! exactly over the rationals; [`zeta`] inverts the plane map to produce the
//! section over the isotropic circle, and [`curve_sample`] traces its shape
//! projection.

use crate::error::{Error, Result};
use crate::exact::{integer_kernel_basis, lattice2_eq_homothety, Mat2, Vec3};
use crate::groups::{make_u_minus, make_u_plus, moebius_act, ProjLine};
use crate::lattice2::{Lattice2, ShapePoint};
use crate::scalar::{Rat, Scalar};
use num::BigInt;

/// lattice = span_Z{e1 + t e2, e2 + 2t e3} for finite t; span_Z{e2, 2 e3}
/// at infinity.
#[derive(Clone, Debug)]
pub struct SectionPoint {
    pub t: ProjLine,
    pub lattice: Lattice2<Rat>,
}

/// Lambda_t, the lattice of the section family over t.
pub fn lambda_t(t: &ProjLine) -> Lattice2<Rat> {
    match t {
        ProjLine::Infinity => Lattice2::from_ints([0, 1, 0], [0, 0, 2]).expect("rank 2"),
        ProjLine::Finite(t) => Lattice2::new(
            Vec3([Rat::from_int(1), t.clone(), Rat::from_int(0)]),
            Vec3([Rat::from_int(0), Rat::from_int(1), t.clone() * Rat::from_int(2)]),
        )
        .expect("rank 2 for all t"),
    }
}

pub fn section_point(t: ProjLine) -> SectionPoint {
    let lattice = lambda_t(&t);
    SectionPoint { t, lattice }
}

/// Which of the two defining identities to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// u_+ Lambda_t = Lambda_{g1 t}
    Plus,
    /// u_- Lambda_t = Lambda_{g2 t}
    Minus,
}

/// The SL2 element conjugate to u^+(2) through the section.
pub fn g1() -> Mat2<Rat> {
    Mat2::from_ints([[1, 0], [2, 1]])
}

/// The SL2 element conjugate to u^-(2) through the section.
pub fn g2() -> Mat2<Rat> {
    Mat2::from_ints([[1, 1], [0, 1]])
}

/// Exact verification of one side of the equivariance identity at t.
///
/// Returns the homothety witness `(c, M)` with
/// `basis(Lambda_{g t}) = c * basis(u Lambda_t) * M`. Failure falsifies the
/// defining computation of the section and is reported as a hard error.
pub fn equivariance_check(t: &ProjLine, side: Side) -> Result<(Rat, Mat2<Rat>)> {
    let (u, g) = match side {
        Side::Plus => (make_u_plus(&Rat::from_int(2)), g1()),
        Side::Minus => (make_u_minus(&Rat::from_int(2)), g2()),
    };
    let left = lambda_t(t).apply(&u)?;
    let right = lambda_t(&moebius_act(&g, t));
    let (lu, lw) = left.basis();
    let (ru, rw) = right.basis();
    match lattice2_eq_homothety((lu, lw), (ru, rw))? {
        Some(witness) => Ok(witness),
        None => Err(Error::EquivarianceFailure(t.to_string())),
    }
}

/// A plane through the origin, given by its Euclidean normal direction.
#[derive(Clone, Debug)]
pub struct IsotropicPlane<S> {
    pub normal: Vec3<S>,
}

impl<S: Scalar> IsotropicPlane<S> {
    pub fn from_normal(normal: Vec3<S>) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(IsotropicPlane { normal })
    }
}

impl IsotropicPlane<Rat> {
    /// Membership in the circle of isotropic planes, decided exactly: the
    /// restriction of Q to the plane must be degenerate (the plane is
    /// tangent to the light cone). Planes meeting the cone transversally
    /// have nondegenerate indefinite restriction and are excluded.
    pub fn is_isotropic(&self) -> bool {
        match self.restricted_q_det() {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    fn restricted_q_det(&self) -> Result<Rat> {
        // integer normal via denominator clearing
        let lcm = self
            .normal
            .0
            .iter()
            .fold(BigInt::from(1), |acc, e| num::integer::lcm(acc, e.denom().clone()));
        let iv: [BigInt; 3] = [
            self.normal.0[0].numer() * (&lcm / self.normal.0[0].denom()),
            self.normal.0[1].numer() * (&lcm / self.normal.0[1].denom()),
            self.normal.0[2].numer() * (&lcm / self.normal.0[2].denom()),
        ];
        let (a, b) = integer_kernel_basis(&iv)?;
        let s = crate::groups::gram_q::<Rat>();
        let bform = |x: &Vec3<Rat>, y: &Vec3<Rat>| x.dot(&s.mul_vec(y));
        let qaa = bform(&a, &a);
        let qab = bform(&a, &b);
        let qbb = bform(&b, &b);
        Ok(qaa * qbb - qab.clone() * qab)
    }

    /// The section: the unique Lambda_t spanning this plane.
    ///
    /// The plane normals of the family are (2t^2, -2t, 1) up to scale, so
    /// t = -n2 / (2 n3), with the n3 = 0 branch mapping to infinity;
    /// consistency with n1 = 2 t^2 n3 is re-checked, and the result's plane
    /// is the input plane exactly.
    pub fn zeta(&self) -> Result<Lattice2<Rat>> {
        if !self.is_isotropic() {
            return Err(Error::NotIsotropic);
        }
        let [n1, n2, n3] = &self.normal.0;
        let t = if n3.is_zero() {
            if !n2.is_zero() {
                return Err(Error::NotIsotropic);
            }
            ProjLine::Infinity
        } else {
            ProjLine::Finite(-(n2.clone() / (Rat::from_int(2) * n3.clone())))
        };
        if let ProjLine::Finite(t) = &t {
            let expect_n1 = Rat::from_int(2) * t.clone() * t.clone() * n3.clone();
            if *n1 != expect_n1 {
                return Err(Error::NotIsotropic);
            }
        }
        let lat = lambda_t(&t);
        debug_assert!(plane_eq(&lat.wedge(), &self.normal));
        Ok(lat)
    }
}

impl IsotropicPlane<f64> {
    /// Float-flavor membership test: restricted Gram determinant below
    /// tolerance after normalising the plane basis.
    pub fn is_isotropic(&self, tol: f64) -> bool {
        let n = &self.normal;
        let nn = n.norm();
        if !(nn > 0.0) {
            return false;
        }
        // orthonormal basis of the plane
        let pick = if n.0[0].abs() < 0.9 * nn {
            Vec3([1.0, 0.0, 0.0])
        } else {
            Vec3([0.0, 1.0, 0.0])
        };
        let mut a = pick.sub(&n.scale(&(pick.dot(n) / (nn * nn))));
        let na = a.norm();
        a = a.scale(&(1.0 / na));
        let b = n.scale(&(1.0 / nn)).cross(&a);
        let s = crate::groups::gram_q::<f64>();
        let qaa = a.dot(&s.mul_vec(&a));
        let qab = a.dot(&s.mul_vec(&b));
        let qbb = b.dot(&s.mul_vec(&b));
        (qaa * qbb - qab * qab).abs() <= tol
    }
}

/// Whether two normal directions agree up to scale (exact).
fn plane_eq(a: &Vec3<Rat>, b: &Vec3<Rat>) -> bool {
    a.cross(b).is_zero() && !a.is_zero() && !b.is_zero()
}

/// Shapes of Lambda_t over a grid of parameters.
pub fn curve_sample(grid: &[ProjLine]) -> Result<Vec<(ProjLine, ShapePoint)>> {
    grid.iter()
        .map(|t| Ok((t.clone(), lambda_t(t).shape()?)))
        .collect()
}

/// tan-spaced parameter grid covering the whole circle, closing with the
/// point at infinity.
pub fn tan_spaced_grid(n: usize) -> Vec<ProjLine> {
    let mut grid = Vec::with_capacity(n + 1);
    for i in 0..n {
        let theta = -std::f64::consts::FRAC_PI_2
            + std::f64::consts::PI * ((i as f64 + 0.5) / n as f64);
        // rational parameter keeps the lattice exact
        let t = (theta.tan() * 1e6).round() as i64;
        grid.push(ProjLine::Finite(Rat::new(t, 1_000_000)));
    }
    grid.push(ProjLine::Infinity);
    grid
}
