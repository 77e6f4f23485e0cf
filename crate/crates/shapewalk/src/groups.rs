//! The acting groups and their measures.
//!
//! `SO(Q)` for the signature-(2,1) form `Q(v) = 2 v1 v3 - v2^2`, its
//! one-parameter unipotent generators `u^+(t)`, `u^-(t)` and the involution
//! `k`, a Zariski-dense elementary generating set of SL3(Z), finitely
//! supported measures with deterministic word sampling, and the SL2 action
//! on the projective line by fractional linear transformations.

use crate::error::{Error, Result};
use crate::exact::{Mat2, Mat3};
use crate::rng::Xoshiro256PlusPlus;
use crate::scalar::{Rat, Scalar};
use std::fmt;
use std::str::FromStr;

/// Gram matrix S of Q(v) = 2 v1 v3 - v2^2, so Q(v) = v^T S v.
pub fn gram_q<S: Scalar>() -> Mat3<S> {
    Mat3::from_ints([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
}

/// Q(v) evaluated exactly in the scalar flavor.
pub fn eval_q<S: Scalar>(v: &crate::exact::Vec3<S>) -> S {
    let two = S::from_int(2);
    two * v.0[0].clone() * v.0[2].clone() - v.0[1].clone() * v.0[1].clone()
}

/// Upper unipotent u^+(t) = [[1, t, t^2/2], [0, 1, t], [0, 0, 1]].
pub fn make_u_plus(t: &Rat) -> Mat3<Rat> {
    let half_sq = t.clone() * t.clone() / Rat::from_int(2);
    Mat3([
        [Rat::from_int(1), t.clone(), half_sq],
        [Rat::from_int(0), Rat::from_int(1), t.clone()],
        [Rat::from_int(0), Rat::from_int(0), Rat::from_int(1)],
    ])
}

/// Lower unipotent u^-(t), the transpose of u^+(t).
pub fn make_u_minus(t: &Rat) -> Mat3<Rat> {
    make_u_plus(t).transpose()
}

/// The involution k; as a matrix it coincides with the Gram matrix of Q.
pub fn make_k() -> Mat3<Rat> {
    gram_q()
}

/// The twelve elementary matrices `I +- E_ij` (i != j), a standard
/// Zariski-dense generating set of SL3(Z).
pub fn make_sl3_elementary_set() -> Vec<Mat3<Rat>> {
    let mut out = Vec::with_capacity(12);
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for sign in [1i64, -1] {
                let mut m = Mat3::<Rat>::identity();
                m.0[i][j] = Rat::from_int(sign);
                out.push(m);
            }
        }
    }
    out
}

/// g in SO(Q): g^T S g = S and det g = 1, decided exactly.
pub fn check_soq(g: &Mat3<Rat>) -> bool {
    let s = gram_q::<Rat>();
    g.transpose().mul(&s).mul(g) == s && g.det() == Rat::from_int(1)
}

/// Float-flavor membership check with entrywise tolerance.
pub fn check_soq_approx(g: &Mat3<f64>, tol: f64) -> bool {
    let s = gram_q::<f64>();
    let lhs = g.transpose().mul(&s).mul(g);
    let ok = (0..3).all(|i| (0..3).all(|j| (lhs.0[i][j] - s.0[i][j]).abs() <= tol));
    ok && (g.det() - 1.0).abs() <= tol
}

/// det g = 1, the SL3 membership check.
pub fn check_sl3(g: &Mat3<Rat>) -> bool {
    g.det() == Rat::from_int(1)
}

/// Integer fast path of [`check_soq`] for integral group elements.
pub fn check_soq_int(g: &crate::exact::IMat3) -> bool {
    use crate::exact::{imat_det, imat_from_rat, imat_mul, imat_transpose};
    use num::One;
    let s = imat_from_rat(&gram_q::<Rat>()).expect("integral Gram");
    imat_mul(&imat_mul(&imat_transpose(g), &s), g) == s && imat_det(g).is_one()
}

/// A point of the projective line R union {infinity}.
#[derive(Clone, PartialEq, Debug)]
pub enum ProjLine {
    Finite(Rat),
    Infinity,
}

impl ProjLine {
    pub fn from_int(n: i64) -> Self {
        ProjLine::Finite(Rat::from_int(n))
    }
}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjLine::Finite(t) => write!(f, "{t}"),
            ProjLine::Infinity => write!(f, "inf"),
        }
    }
}

/// Fractional linear action of an integer matrix with det +-1.
pub fn moebius_act(m: &Mat2<Rat>, t: &ProjLine) -> ProjLine {
    let [[a, b], [c, d]] = &m.0;
    match t {
        ProjLine::Infinity => {
            if c.is_zero() {
                ProjLine::Infinity
            } else {
                ProjLine::Finite(a.clone() / c.clone())
            }
        }
        ProjLine::Finite(t) => {
            let denom = c.clone() * t.clone() + d.clone();
            if denom.is_zero() {
                ProjLine::Infinity
            } else {
                ProjLine::Finite((a.clone() * t.clone() + b.clone()) / denom)
            }
        }
    }
}

/// Finitely supported probability measure on 3x3 determinant-1 matrices.
#[derive(Clone, Debug)]
pub struct MeasureSpec<S: Scalar> {
    atoms: Vec<(Mat3<S>, S)>,
    symmetric: bool,
    name: String,
}

impl<S: Scalar> MeasureSpec<S> {
    /// Build from explicit atoms; weights must be positive and sum to one
    /// (exactly in the rational flavor, within 1e-12 in float).
    pub fn new(atoms: Vec<(Mat3<S>, S)>, name: impl Into<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let mut total = S::zero();
        for (_, p) in &atoms {
            if !(p.clone() > S::zero()) {
                return Err(Error::BadMeasureSpec("nonpositive weight".into()));
            }
            total = total + p.clone();
        }
        let one = S::one();
        let ok = if S::EXACT {
            total == one
        } else {
            (total - one).abs().to_f64() <= 1e-12
        };
        if !ok {
            return Err(Error::BadMeasureSpec("weights do not sum to 1".into()));
        }
        let symmetric = Self::is_symmetric(&atoms);
        Ok(MeasureSpec {
            atoms,
            symmetric,
            name: name.into(),
        })
    }

    /// Uniform measure on a list of matrices.
    pub fn uniform(mats: Vec<Mat3<S>>, name: impl Into<String>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let p = S::one() / S::from_int(mats.len() as i64);
        Self::new(mats.into_iter().map(|m| (m, p.clone())).collect(), name)
    }

    fn is_symmetric(atoms: &[(Mat3<S>, S)]) -> bool {
        atoms.iter().all(|(g, p)| {
            g.inverse()
                .is_some_and(|gi| atoms.iter().any(|(h, q)| *h == gi && q == p))
        })
    }

    pub fn atoms(&self) -> &[(Mat3<S>, S)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Whether the support is closed under inversion with matching weights.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Draw one atom index from the weights.
    pub fn sample_index(&self, rng: &mut Xoshiro256PlusPlus) -> usize {
        let x = rng.uniform_f64();
        let mut acc = 0.0;
        for (i, (_, p)) in self.atoms.iter().enumerate() {
            acc += p.to_f64();
            if x < acc {
                return i;
            }
        }
        self.atoms.len() - 1
    }
}

impl MeasureSpec<Rat> {
    pub fn to_f64(&self) -> MeasureSpec<f64> {
        MeasureSpec {
            atoms: self
                .atoms
                .iter()
                .map(|(g, p)| (g.to_f64(), p.to_f64()))
                .collect(),
            symmetric: self.symmetric,
            name: self.name.clone(),
        }
    }
}

/// Product g_n ... g_1 of a sampled word together with the letters
/// (atom indices, in sampling order g_1, ..., g_n).
pub fn sample_word<S: Scalar>(
    mu: &MeasureSpec<S>,
    rng: &mut Xoshiro256PlusPlus,
    n: usize,
) -> (Mat3<S>, Vec<usize>) {
    let mut product = Mat3::<S>::identity();
    let mut letters = Vec::with_capacity(n);
    for _ in 0..n {
        let i = mu.sample_index(rng);
        letters.push(i);
        // new letters multiply on the left
        product = mu.atoms[i].0.mul(&product);
    }
    (product, letters)
}

/// The four generator families plotted in the Case II experiments,
/// symmetrised (closed under inverses) and weighted uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTwoSet {
    /// u^+(2), u^-(1)
    A,
    /// u^+(1), u^-(2)
    B,
    /// u^+(2), u^-(1), k
    C,
    /// u^+(1), u^-(1)
    D,
}

impl CaseTwoSet {
    pub const ALL: [CaseTwoSet; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn label(&self) -> &'static str {
        match self {
            Self::A => "II-a",
            Self::B => "II-b",
            Self::C => "II-c",
            Self::D => "II-d",
        }
    }
}

/// Uniform measure on the twelve elementary SL3(Z) generators; the default
/// Zariski-dense Case I measure (it is symmetric: inverses are members).
pub fn case_i_measure() -> MeasureSpec<Rat> {
    MeasureSpec::uniform(make_sl3_elementary_set(), "I").expect("nonempty")
}

/// Symmetrised uniform measure for one of the Case II generator families.
pub fn case_ii_measure(set: CaseTwoSet) -> MeasureSpec<Rat> {
    let (tp, tm, with_k) = match set {
        CaseTwoSet::A => (2, 1, false),
        CaseTwoSet::B => (1, 2, false),
        CaseTwoSet::C => (2, 1, true),
        CaseTwoSet::D => (1, 1, false),
    };
    let mut mats = vec![
        make_u_plus(&Rat::from_int(tp)),
        make_u_plus(&Rat::from_int(-tp)),
        make_u_minus(&Rat::from_int(tm)),
        make_u_minus(&Rat::from_int(-tm)),
    ];
    if with_k {
        mats.push(make_k());
    }
    MeasureSpec::uniform(mats, set.label()).expect("nonempty")
}

/// The five-letter alphabet {u^+(2)^{+-1}, u^-(2)^{+-1}, k} used for the
/// integer-orbit sampling of the orthogonal-shape family.
pub fn gamma0_alphabet() -> Vec<Mat3<Rat>> {
    vec![
        make_u_plus(&Rat::from_int(2)),
        make_u_plus(&Rat::from_int(-2)),
        make_u_minus(&Rat::from_int(2)),
        make_u_minus(&Rat::from_int(-2)),
        make_k(),
    ]
}

/// Resolve a built-in measure name as used by the CLI.
pub fn builtin_measure(name: &str) -> Result<MeasureSpec<Rat>> {
    match name {
        "I" => Ok(case_i_measure()),
        "II-a" => Ok(case_ii_measure(CaseTwoSet::A)),
        "II-b" => Ok(case_ii_measure(CaseTwoSet::B)),
        "II-c" => Ok(case_ii_measure(CaseTwoSet::C)),
        "II-d" => Ok(case_ii_measure(CaseTwoSet::D)),
        other => Err(Error::BadMeasureSpec(format!(
            "unknown built-in measure '{other}' (expected I, II-a, II-b, II-c or II-d)"
        ))),
    }
}

/// Parse a measure file.
///
/// Grammar (one atom per non-comment line):
/// ```text
/// # comment
/// <weight> <m11> <m12> <m13> <m21> <m22> <m23> <m31> <m32> <m33>
/// ```
/// Entries are integers or rationals `p/q`, matrices row-major. Weights must
/// be positive and sum to exactly 1; every matrix must have determinant 1.
pub fn parse_measure_file(text: &str, name: impl Into<String>) -> Result<MeasureSpec<Rat>> {
    let mut atoms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 10 {
            return Err(Error::BadMeasureSpec(format!(
                "line {}: expected 10 fields (weight + 9 entries), got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<Rat> {
            Rat::from_str(s).map_err(|e| Error::BadMeasureSpec(format!("line {}: {e}", lineno + 1)))
        };
        let weight = parse(fields[0])?;
        let mut m = Mat3::<Rat>::identity();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = parse(fields[1 + 3 * i + j])?;
            }
        }
        if m.det() != Rat::from_int(1) {
            return Err(Error::BadMeasureSpec(format!(
                "line {}: matrix determinant is {}, expected 1",
                lineno + 1,
                m.det()
            )));
        }
        atoms.push((m, weight));
    }
    MeasureSpec::new(atoms, name)
}
