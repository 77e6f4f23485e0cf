//! Python bindings for the 2-lattice shape library.
//!
//! Build with `cargo build -p shapewalk-py --release` and import the
//! resulting cdylib as `shapewalk_py` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use shapewalk::dioph::cf::{cf_expand, CfInput};
use shapewalk::dioph::cubic::{cubic_field, log_rank, unit_search, CubicPoly};
use shapewalk::dioph::{a_orbit_scan, builtin_ratio_lattice};
use shapewalk::groups::{builtin_measure, ProjLine};
use shapewalk::ortho::conj1_sample;
use shapewalk::scalar::{Rat, Scalar};
use shapewalk::section::{equivariance_check, lambda_t, Side};
use shapewalk::walk;
use shapewalk::{Lattice2, Vec3};
use std::collections::HashMap;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A rank-2 lattice in R^3 given by an ordered float basis.
#[pyclass(name = "Lattice2")]
#[derive(Clone)]
struct PyLattice2 {
    inner: Lattice2<f64>,
}

#[pymethods]
impl PyLattice2 {
    #[new]
    fn new(u: [f64; 3], w: [f64; 3]) -> PyResult<Self> {
        Ok(PyLattice2 {
            inner: Lattice2::new(Vec3(u), Vec3(w)).map_err(err)?,
        })
    }

    /// span{e1, e2}.
    #[staticmethod]
    fn standard() -> Self {
        PyLattice2 {
            inner: Lattice2::standard(),
        }
    }

    /// Z^3 meet (1,1,1)^perp, the hexagonal base point.
    #[staticmethod]
    fn hexagonal() -> PyResult<Self> {
        let lat = shapewalk::ortho::ortho_lattice(&shapewalk::exact::ivec3([1, 1, 1]))
            .map_err(err)?;
        Ok(PyLattice2 {
            inner: lat.to_f64(),
        })
    }

    /// Reduced, reflection-canonical shape point (re, im).
    fn shape(&self) -> PyResult<(f64, f64)> {
        let s = self.inner.shape().map_err(err)?;
        Ok((s.re(), s.im()))
    }

    /// Mahler height u_X.
    fn height(&self) -> PyResult<f64> {
        self.inner.height().map_err(err)
    }

    fn shortest_vector(&self) -> PyResult<[f64; 3]> {
        Ok(self.inner.shortest_vector().map_err(err)?.0)
    }

    fn covolume(&self) -> f64 {
        self.inner.covolume()
    }

    fn basis(&self) -> ([f64; 3], [f64; 3]) {
        let (u, w) = self.inner.basis();
        (u.0, w.0)
    }

    fn __repr__(&self) -> String {
        let (u, w) = self.inner.basis();
        format!("Lattice2(u={:?}, w={:?})", u.0, w.0)
    }
}

/// Shape of the section lattice Lambda_t at the rational parameter
/// num/den; den = 0 gives the point at infinity.
#[pyfunction]
fn section_shape(num: i64, den: i64) -> PyResult<(f64, f64)> {
    let t = if den == 0 {
        ProjLine::Infinity
    } else {
        ProjLine::Finite(Rat::new(num, den))
    };
    let s = lambda_t(&t).shape().map_err(err)?;
    Ok((s.re(), s.im()))
}

/// Exactly verify both equivariance identities at num/den (den = 0 for the
/// point at infinity). Returns True or raises.
#[pyfunction]
fn section_verify(num: i64, den: i64) -> PyResult<bool> {
    let t = if den == 0 {
        ProjLine::Infinity
    } else {
        ProjLine::Finite(Rat::new(num, den))
    };
    equivariance_check(&t, Side::Plus).map_err(err)?;
    equivariance_check(&t, Side::Minus).map_err(err)?;
    Ok(true)
}

/// Shapes (re, im) of the orthogonal family sampled by random words.
#[pyfunction]
#[pyo3(signature = (n_words, word_len, seed, dedup = false))]
fn ortho_shapes(n_words: usize, word_len: usize, seed: u64, dedup: bool) -> PyResult<Vec<(f64, f64)>> {
    let samples = conj1_sample(n_words, word_len, seed, dedup).map_err(err)?;
    Ok(samples
        .iter()
        .map(|s| (s.shape.re(), s.shape.im()))
        .collect())
}

/// Run a walk with a built-in measure; returns (occupation_fraction,
/// samples) with samples as (step, re, im, height) tuples.
#[pyfunction]
#[pyo3(signature = (case, steps, seed, stride = 10, height_cap = 10.0))]
fn run_walk(
    case: &str,
    steps: u64,
    seed: u64,
    stride: u64,
    height_cap: f64,
) -> PyResult<(f64, Vec<(u64, f64, f64, f64)>)> {
    let mu = builtin_measure(case).map_err(err)?.to_f64();
    let x0 = Lattice2::<f64>::standard();
    let report = walk::run_walk(&mu, &x0, steps, seed, stride, height_cap).map_err(err)?;
    let samples = report
        .samples
        .iter()
        .map(|s| (s.step, s.re_z, s.im_z, s.height))
        .collect();
    Ok((report.frac_height_le_cap, samples))
}

/// Walk + goodness of fit against the hyperbolic reference.
#[pyfunction]
#[pyo3(signature = (case, steps, seed, stride = 10, ymax = 6.0, grid = 12))]
fn gof(
    case: &str,
    steps: u64,
    seed: u64,
    stride: u64,
    ymax: f64,
    grid: usize,
) -> PyResult<HashMap<String, f64>> {
    let mu = builtin_measure(case).map_err(err)?.to_f64();
    let x0 = Lattice2::<f64>::standard();
    let report = walk::run_walk(&mu, &x0, steps, seed, stride, 10.0).map_err(err)?;
    let g = walk::gof_hyperbolic(&report, ymax, grid).map_err(err)?;
    let mut out = HashMap::new();
    out.insert("chi_square".into(), g.chi_square);
    out.insert("degrees_of_freedom".into(), g.degrees_of_freedom as f64);
    out.insert("p_value".into(), g.p_value);
    out.insert("total_variation".into(), g.total_variation);
    out.insert("frac_height_le_cap".into(), report.frac_height_le_cap);
    Ok(out)
}

/// Lyapunov vector and weight evaluations for a built-in measure.
#[pyfunction]
#[pyo3(signature = (case, steps = 100_000, replicas = 16, seed = 1))]
fn lyapunov(case: &str, steps: u64, replicas: usize, seed: u64) -> PyResult<HashMap<String, f64>> {
    let mu = builtin_measure(case).map_err(err)?.to_f64();
    let est = walk::estimate_lyapunov(&mu, steps, replicas, seed).map_err(err)?;
    let mut out = HashMap::new();
    out.insert("lambda1".into(), est.lambda1.value);
    out.insert("lambda1_se".into(), est.lambda1.std_error);
    out.insert("lambda1_plus_lambda2".into(), est.lambda1_plus_lambda2.value);
    out.insert("t1".into(), est.sigma[0]);
    out.insert("t2".into(), est.sigma[1]);
    out.insert("t3".into(), est.sigma[2]);
    out.insert("t2_se".into(), est.sigma_se[1]);
    out.insert("weight_l0".into(), est.weight_l0.value);
    out.insert("weight_r0".into(), est.weight_r0.value);
    out.insert("weight_l0_minus_r0".into(), est.weight_l0_minus_r0.value);
    out.insert(
        "weight_l0_minus_r0_se".into(),
        est.weight_l0_minus_r0.std_error,
    );
    Ok(out)
}

/// Continued fraction of p/q (exact).
#[pyfunction]
fn cf_rational(p: i64, q: i64, terms: usize) -> PyResult<Vec<i64>> {
    if q == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    let e = cf_expand(&CfInput::Rational(Rat::new(p, q)), terms).map_err(err)?;
    e.digits
        .iter()
        .map(|d| i64::try_from(d).map_err(|_| PyValueError::new_err("digit exceeds i64")))
        .collect()
}

/// Continued fraction of (p + sqrt(d)) / q (exact).
#[pyfunction]
fn cf_surd(p: i64, d: i64, q: i64, terms: usize) -> PyResult<Vec<i64>> {
    let e = cf_expand(&CfInput::surd(p, d, q), terms).map_err(err)?;
    e.digits
        .iter()
        .map(|v| i64::try_from(v).map_err(|_| PyValueError::new_err("digit exceeds i64")))
        .collect()
}

/// Units of the order Z[alpha] for x^3 + a x^2 + b x + c found in the
/// coordinate box; returns (coords, norm_sign, log_embedding) triples and
/// the log rank.
#[pyfunction]
fn cubic_units(
    a: i64,
    b: i64,
    c: i64,
    bound: i64,
) -> PyResult<(Vec<([i64; 3], i8, [f64; 3])>, usize)> {
    let spec = cubic_field(CubicPoly::new(a, b, c), 96).map_err(err)?;
    let units = unit_search(&spec, bound);
    let rank = log_rank(&units, 1e-6);
    Ok((
        units
            .iter()
            .map(|u| (u.coords, u.norm, u.log_embedding))
            .collect(),
        rank,
    ))
}

/// Max height of the diagonal-flow scan for a built-in ratio lattice.
#[pyfunction]
fn aorbit_max(lattice: &str, t: f64, grid: usize) -> PyResult<f64> {
    let rl = builtin_ratio_lattice(lattice).map_err(err)?;
    let field = a_orbit_scan(&rl.lattice, (t, t), (grid, grid)).map_err(err)?;
    Ok(field.max_height)
}

#[pymodule]
fn shapewalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice2>()?;
    m.add_function(wrap_pyfunction!(section_shape, m)?)?;
    m.add_function(wrap_pyfunction!(section_verify, m)?)?;
    m.add_function(wrap_pyfunction!(ortho_shapes, m)?)?;
    m.add_function(wrap_pyfunction!(run_walk, m)?)?;
    m.add_function(wrap_pyfunction!(gof, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(cf_rational, m)?)?;
    m.add_function(wrap_pyfunction!(cf_surd, m)?)?;
    m.add_function(wrap_pyfunction!(cubic_units, m)?)?;
    m.add_function(wrap_pyfunction!(aorbit_max, m)?)?;
    Ok(())
}
