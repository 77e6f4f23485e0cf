//! The orthogonal-shape family: integer points on `Q = 1` and the shapes of
//! the lattices `Z^3 meet v^perp`.
//!
//! Sampling walks the `<u^+(2), u^-(2), k>` orbit of the base point
//! `v1 = (1,1,1)`. Each sampled group element `g` contributes the vector
//! `v = g v1` (which stays on `Q = 1` exactly) and the lattice
//! `Z^3 meet v^perp`. The latter is computed as the dual image
//! `g^{-T} (Z^3 meet v1^perp)`; this avoids a kernel computation per sample
//! and is certified against the direct route by [`duality_check`].

use crate::error::{Error, Result};
use crate::exact::{ivec_to_rat, lattice2_eq_homothety, Mat3, Vec3};
use crate::groups::{check_soq, gamma0_alphabet, gram_q};
use crate::lattice2::{Lattice2, ShapePoint};
use crate::rng::Xoshiro256PlusPlus;
use crate::scalar::{Rat, Scalar};
use num::BigInt;

/// One sampled point of the orthogonal-shape family.
#[derive(Clone, Debug)]
pub struct OrthoSample {
    pub word_index: usize,
    pub word_len: usize,
    /// v = g . (1,1,1); satisfies Q(v) = 1 exactly.
    pub v: [BigInt; 3],
    /// Z^3 meet v^perp, carried exactly.
    pub lattice: Lattice2<Rat>,
    pub shape: ShapePoint,
}

/// The base vector (1,1,1) on Q = 1.
pub fn base_vector() -> Vec3<Rat> {
    Vec3::from_ints([1, 1, 1])
}

/// Exact basis of Z^3 meet v^perp for a nonzero integer vector.
pub fn ortho_lattice(v: &[BigInt; 3]) -> Result<Lattice2<Rat>> {
    let (w1, w2) = crate::exact::integer_kernel_basis(v)?;
    Lattice2::new(w1, w2)
}

/// Verify `Z^3 meet (gv)^perp = g^{-T} (Z^3 meet v^perp)` exactly for a
/// determinant-1 integer matrix; returns the homothety witness (c = 1).
pub fn duality_check(g: &Mat3<Rat>, v: &[BigInt; 3]) -> Result<(Rat, crate::exact::Mat2<Rat>)> {
    if g.det() != Rat::from_int(1) {
        return Err(Error::InvalidArgument("determinant must be 1".into()));
    }
    let vr = ivec_to_rat(v);
    let gv = g.mul_vec(&vr);
    let gv_int: [BigInt; 3] = [
        gv.0[0].to_bigint().ok_or(Error::NotInLattice)?,
        gv.0[1].to_bigint().ok_or(Error::NotInLattice)?,
        gv.0[2].to_bigint().ok_or(Error::NotInLattice)?,
    ];
    let direct = ortho_lattice(&gv_int)?;
    let ginv_t = g.inverse_transpose().ok_or(Error::RankDeficient)?;
    let dual = ortho_lattice(v)?.apply(&ginv_t)?;
    let (du, dw) = dual.basis();
    let (au, aw) = direct.basis();
    match lattice2_eq_homothety((du, dw), (au, aw))? {
        Some(witness) => Ok(witness),
        None => Err(Error::DualityFailure),
    }
}

/// Sample the orbit by uniform words over {u^+(2)^{+-1}, u^-(2)^{+-1}, k}.
///
/// Deterministic given the seed; words use per-index substreams so the
/// output is independent of evaluation order. With `dedup` set, repeated
/// letter sequences are skipped (output may then be shorter than n_words).
pub fn conj1_sample(
    n_words: usize,
    word_len: usize,
    seed: u64,
    dedup: bool,
) -> Result<Vec<OrthoSample>> {
    use crate::exact::{imat_from_rat, imat_identity, imat_mul, imat_mul_vec, ivec3, ivec_to_rat};
    // the alphabet is integral, so the whole orbit runs on BigInt matrices
    let alphabet: Vec<crate::exact::IMat3> = gamma0_alphabet()
        .iter()
        .map(|m| imat_from_rat(m).expect("integral alphabet"))
        .collect();
    let k = imat_from_rat(&gram_q::<Rat>()).expect("integral Gram");
    let v1 = ivec3([1, 1, 1]);
    let (bu, bw) = crate::exact::integer_kernel_basis(&v1)?;
    let to_ivec = |v: &crate::exact::Vec3<Rat>| -> [BigInt; 3] {
        [0, 1, 2].map(|i| v.0[i].to_bigint().expect("integer kernel"))
    };
    let (base_u, base_w) = (to_ivec(&bu), to_ivec(&bw));
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n_words);
    for word_index in 0..n_words {
        let mut rng = Xoshiro256PlusPlus::from_seed_stream(seed, word_index as u64);
        let letters: Vec<usize> = (0..word_len)
            .map(|_| rng.uniform_below(alphabet.len() as u64) as usize)
            .collect();
        if dedup && !seen.insert(letters.clone()) {
            continue;
        }
        let mut g = imat_identity();
        for &l in &letters {
            g = imat_mul(&alphabet[l], &g);
        }
        debug_assert!(check_soq(&crate::exact::imat_to_rat(&g)));
        let v = imat_mul_vec(&g, &v1);
        let q = BigInt::from(2) * &v[0] * &v[2] - &v[1] * &v[1];
        if q != BigInt::from(1) {
            return Err(Error::NumericalFailure {
                step: word_index as u64,
                what: "orbit left Q = 1".into(),
            });
        }
        // dual image: for g in SO(Q), g^{-T} = k g k, an exact integer matrix
        let dual_g = imat_mul(&imat_mul(&k, &g), &k);
        let lattice = Lattice2::new(
            ivec_to_rat(&imat_mul_vec(&dual_g, &base_u)),
            ivec_to_rat(&imat_mul_vec(&dual_g, &base_w)),
        )?;
        let shape = lattice.shape()?;
        out.push(OrthoSample {
            word_index,
            word_len,
            v,
            lattice,
            shape,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{ivec3, wedge2};
    use crate::groups::{make_u_plus, sample_word, MeasureSpec};
    use num::complex::Complex64;

    #[test]
    fn ortho_lattice_examples() {
        let hex = ortho_lattice(&ivec3([1, 1, 1])).unwrap();
        let z = hex.shape().unwrap().z;
        assert!((z - Complex64::new(0.5, 3.0f64.sqrt() / 2.0)).norm() < 1e-12);

        let square = ortho_lattice(&ivec3([0, 0, 1])).unwrap();
        assert!((square.shape().unwrap().z - Complex64::new(0.0, 1.0)).norm() < 1e-12);

        // (5,3,1) = u+(2) . (1,1,1); basis cross product must be +-(5,3,1)
        let lat = ortho_lattice(&ivec3([5, 3, 1])).unwrap();
        let (u, w) = lat.basis();
        let cr = wedge2(u, w);
        let v = ivec_to_rat(&ivec3([5, 3, 1]));
        assert!(cr == v || cr == v.neg());

        assert!(ortho_lattice(&ivec3([0, 0, 0])).is_err());
    }

    #[test]
    fn duality_examples() {
        let id = Mat3::<Rat>::identity();
        let (c, _) = duality_check(&id, &ivec3([1, 1, 1])).unwrap();
        assert_eq!(c, Rat::from_int(1));

        let (c, _) = duality_check(&make_u_plus(&Rat::from_int(2)), &ivec3([1, 1, 1])).unwrap();
        assert_eq!(c, Rat::from_int(1));
    }

    #[test]
    fn duality_randomized_words() {
        let mu = MeasureSpec::uniform(gamma0_alphabet(), "fig1").unwrap();
        let mut rng = Xoshiro256PlusPlus::from_seed(51);
        for _ in 0..60 {
            let len = rng.uniform_below(15) as usize + 1;
            let (g, _) = sample_word(&mu, &mut rng, len);
            let (c, _) = duality_check(&g, &ivec3([1, 1, 1])).unwrap();
            assert_eq!(c, Rat::from_int(1));
        }
    }

    #[test]
    fn inverse_transpose_is_k_conjugation() {
        // for g in SO(Q): g^{-T} = S g S^{-1} with S the Gram matrix
        let mu = MeasureSpec::uniform(gamma0_alphabet(), "fig1").unwrap();
        let mut rng = Xoshiro256PlusPlus::from_seed(52);
        let s = gram_q::<Rat>();
        for _ in 0..20 {
            let (g, _) = sample_word(&mu, &mut rng, 10);
            let lhs = g.inverse_transpose().unwrap();
            let rhs = s.mul(&g).mul(&s);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn identity_word_gives_base_shape() {
        let samples = conj1_sample(1, 0, 9, false).unwrap();
        let z = samples[0].shape.z;
        assert!((z - Complex64::new(0.5, 3.0f64.sqrt() / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn single_letter_matches_kernel_route() {
        // find the sample whose word is the single letter u+(2): instead of
        // fishing in the random stream, apply the construction directly
        let k = gram_q::<Rat>();
        let g = make_u_plus(&Rat::from_int(2));
        let base = ortho_lattice(&ivec3([1, 1, 1])).unwrap();
        let dual = base.apply(&k.mul(&g).mul(&k)).unwrap();
        let direct = ortho_lattice(&ivec3([5, 3, 1])).unwrap();
        let zd = dual.shape().unwrap().z;
        let zk = direct.shape().unwrap().z;
        assert!((zd - zk).norm() < 1e-9);
    }

    #[test]
    fn samples_stay_on_the_orbit_and_are_deterministic() {
        let a = conj1_sample(40, 8, 123, false).unwrap();
        let b = conj1_sample(40, 8, 123, false).unwrap();
        assert_eq!(a.len(), 40);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.v, y.v);
            assert!((x.shape.z - y.shape.z).norm() == 0.0);
            // cross product of the emitted basis is +-v (primitive)
            let (u, w) = x.lattice.basis();
            let cr = wedge2(u, w);
            let v = ivec_to_rat(&x.v);
            assert!(cr == v || cr == v.neg());
        }
    }

    #[test]
    fn dedup_skips_repeated_words() {
        // with length 0 all words are empty; dedup keeps exactly one
        let samples = conj1_sample(5, 0, 1, true).unwrap();
        assert_eq!(samples.len(), 1);
    }
}
