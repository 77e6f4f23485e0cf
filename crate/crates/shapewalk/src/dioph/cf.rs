//! Continued fractions with certified digits.
//!
//! Three input descriptors: exact rationals (Euclidean algorithm), quadratic
//! surds `(p + sqrt(d)) / q` (the exact periodic integer recurrence), and
//! rational enclosures `[lo, hi]` of a real number. Interval inputs emit a
//! digit only while both endpoints agree on it, so an emitted digit is never
//! wrong; running out of width sets the `exhausted` flag instead.

use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::fmt;

/// What to expand.
#[derive(Clone, Debug)]
pub enum CfInput {
    Rational(Rat),
    /// (p + sqrt(d)) / q with d > 0; a perfect-square d falls back to the
    /// rational branch.
    Surd { p: BigInt, d: BigInt, q: BigInt },
    /// Certified enclosure lo <= x <= hi.
    Interval { lo: Rat, hi: Rat },
}

impl CfInput {
    pub fn surd(p: i64, d: i64, q: i64) -> Self {
        CfInput::Surd {
            p: BigInt::from(p),
            d: BigInt::from(d),
            q: BigInt::from(q),
        }
    }

    /// Midpoint as a double, for plotting and lattice construction.
    pub fn approx_f64(&self) -> f64 {
        match self {
            CfInput::Rational(x) => x.to_f64(),
            CfInput::Surd { p, d, q } => {
                let pf = Rat::from_bigint(p.clone()).to_f64();
                let df = Rat::from_bigint(d.clone()).to_f64();
                let qf = Rat::from_bigint(q.clone()).to_f64();
                (pf + df.sqrt()) / qf
            }
            CfInput::Interval { lo, hi } => 0.5 * (lo.to_f64() + hi.to_f64()),
        }
    }

    /// Shift the value by an integer (shifts only the leading digit).
    pub fn shifted(&self, n: i64) -> Self {
        match self {
            CfInput::Rational(x) => CfInput::Rational(x.clone() + Rat::from_int(n)),
            CfInput::Surd { p, d, q } => CfInput::Surd {
                p: p + q * BigInt::from(n),
                d: d.clone(),
                q: q.clone(),
            },
            CfInput::Interval { lo, hi } => CfInput::Interval {
                lo: lo.clone() + Rat::from_int(n),
                hi: hi.clone() + Rat::from_int(n),
            },
        }
    }
}

impl fmt::Display for CfInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfInput::Rational(x) => write!(f, "{x}"),
            CfInput::Surd { p, d, q } => write!(f, "({p}+sqrt({d}))/{q}"),
            CfInput::Interval { lo, hi } => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// Partial quotients a0; a1, a2, ... with certification bookkeeping.
#[derive(Clone, Debug)]
pub struct CfExpansion {
    pub input: String,
    pub digits: Vec<BigInt>,
    /// Number of certified digits; equals digits.len() since only certified
    /// digits are ever emitted.
    pub certified: usize,
    /// Stopped early because the enclosure could not determine more digits.
    pub exhausted: bool,
    /// The expansion is complete (rational input fully expanded).
    pub terminated: bool,
}

impl CfExpansion {
    /// Largest partial quotient with index >= 1 (the integer part does not
    /// count towards approximability).
    pub fn max_partial_quotient(&self) -> Option<BigInt> {
        self.digits.iter().skip(1).cloned().max()
    }
}

/// Convergents p_k/q_k of a digit sequence.
pub fn convergents(digits: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(digits.len());
    // (p_prev, q_prev) = h_{-2} = 0/1, (p, q) = h_{-1} = 1/0
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    for a in digits {
        let np = a * &p + &p_prev;
        let nq = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
        out.push((p.clone(), q.clone()));
    }
    out
}

pub fn cf_expand(x: &CfInput, n: usize) -> Result<CfExpansion> {
    let input = x.to_string();
    match x {
        CfInput::Rational(r) => Ok(expand_rational(r, n, input)),
        CfInput::Surd { p, d, q } => expand_surd(p, d, q, n, input),
        CfInput::Interval { lo, hi } => expand_interval(lo, hi, n, input),
    }
}

fn expand_rational(x: &Rat, n: usize, input: String) -> CfExpansion {
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    let mut digits = Vec::new();
    let mut terminated = false;
    while digits.len() < n {
        let a = p.div_floor(&q);
        let r = &p - &a * &q;
        digits.push(a);
        if r.is_zero() {
            terminated = true;
            break;
        }
        p = q;
        q = r;
    }
    let certified = digits.len();
    CfExpansion {
        input,
        digits,
        certified,
        exhausted: false,
        terminated,
    }
}

fn floor_surd(p: &BigInt, s: &BigInt, q: &BigInt) -> BigInt {
    // floor((p + sqrt(d)) / q) with s = floor(sqrt(d)), sqrt(d) irrational
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        (p + s + BigInt::one()).div_floor(q)
    }
}

fn expand_surd(p: &BigInt, d: &BigInt, q: &BigInt, n: usize, input: String) -> Result<CfExpansion> {
    if q.is_zero() {
        return Err(Error::InvalidArgument("surd with zero denominator".into()));
    }
    if !d.is_positive() {
        return Err(Error::InvalidArgument(
            "surd discriminant must be positive".into(),
        ));
    }
    let s0 = d.sqrt();
    if &(&s0 * &s0) == d {
        // perfect square: the value is rational
        let val = Rat::from_ratio(p + s0, q.clone());
        return Ok(expand_rational(&val, n, input));
    }
    // normalise so that q divides d - p^2
    let (mut pp, mut dd, mut qq) = (p.clone(), d.clone(), q.clone());
    if !(&dd - &pp * &pp).mod_floor(&qq).is_zero() {
        let qa = qq.abs();
        pp *= &qa;
        dd *= &qq * &qq;
        qq *= qa;
    }
    let s = dd.sqrt();
    let mut digits = Vec::with_capacity(n);
    while digits.len() < n {
        let a = floor_surd(&pp, &s, &qq);
        let p_next = &a * &qq - &pp;
        let q_next = (&dd - &p_next * &p_next) / &qq;
        digits.push(a);
        pp = p_next;
        qq = q_next;
        if qq.is_zero() {
            return Err(Error::NumericalFailure {
                step: digits.len() as u64,
                what: "surd recurrence degenerated".into(),
            });
        }
    }
    let certified = digits.len();
    Ok(CfExpansion {
        input,
        digits,
        certified,
        exhausted: false,
        terminated: false,
    })
}

fn expand_interval(lo: &Rat, hi: &Rat, n: usize, input: String) -> Result<CfExpansion> {
    if lo > hi {
        return Err(Error::InvalidArgument("interval with lo > hi".into()));
    }
    let mut lo = lo.0.clone();
    let mut hi = hi.0.clone();
    let mut digits = Vec::new();
    let mut exhausted = false;
    let mut terminated = false;
    while digits.len() < n {
        let flo = lo.floor();
        let fhi = hi.floor();
        if flo != fhi {
            exhausted = true;
            break;
        }
        digits.push(flo.numer().clone());
        let frac_lo: BigRational = lo - &flo;
        let frac_hi: BigRational = hi - &flo;
        if frac_hi.is_zero() && frac_lo.is_zero() {
            terminated = true;
            break;
        }
        if frac_lo.is_zero() {
            // the next digit is unbounded over the enclosure
            exhausted = true;
            break;
        }
        lo = frac_hi.recip();
        hi = frac_lo.recip();
    }
    let certified = digits.len();
    Ok(CfExpansion {
        input,
        digits,
        certified,
        exhausted,
        terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256PlusPlus;
    use std::str::FromStr;

    fn digits_i64(e: &CfExpansion) -> Vec<i64> {
        e.digits
            .iter()
            .map(|d| i64::try_from(d).expect("small digit"))
            .collect()
    }

    #[test]
    fn rational_examples() {
        let e = cf_expand(&CfInput::Rational(Rat::new(649, 200)), 10).unwrap();
        assert_eq!(digits_i64(&e), vec![3, 4, 12, 4]);
        assert!(e.terminated && !e.exhausted);

        let e = cf_expand(&CfInput::Rational(Rat::new(-7, 2)), 10).unwrap();
        assert_eq!(digits_i64(&e), vec![-4, 2]);
    }

    #[test]
    fn surd_examples() {
        let e = cf_expand(&CfInput::surd(0, 2, 1), 8).unwrap();
        assert_eq!(digits_i64(&e), vec![1, 2, 2, 2, 2, 2, 2, 2]);
        // golden ratio
        let e = cf_expand(&CfInput::surd(1, 5, 2), 8).unwrap();
        assert_eq!(digits_i64(&e), vec![1; 8]);
        // sqrt(3) = [1; 1, 2, 1, 2, ...]
        let e = cf_expand(&CfInput::surd(0, 3, 1), 7).unwrap();
        assert_eq!(digits_i64(&e), vec![1, 1, 2, 1, 2, 1, 2]);
        // perfect square discriminant falls back to the rational branch
        let e = cf_expand(&CfInput::surd(1, 4, 2), 7).unwrap();
        assert_eq!(digits_i64(&e), vec![1, 2]);
        assert!(e.terminated);
    }

    #[test]
    fn interval_certification() {
        // pi to 6 decimals: only the digits the enclosure pins down appear
        let lo = Rat::from_str("3.141592").unwrap();
        let hi = Rat::from_str("3.141593").unwrap();
        let e = cf_expand(&CfInput::Interval { lo, hi }, 20).unwrap();
        assert!(e.exhausted);
        assert!(!e.digits.is_empty());
        let want = [3i64, 7, 15, 1]; // true prefix of pi's expansion
        assert!(digits_i64(&e).len() <= 10);
        for (got, want) in digits_i64(&e).iter().zip(want.iter()) {
            assert_eq!(got, want);
        }
        // a width-zero interval behaves like the exact rational
        let x = Rat::new(355, 113);
        let e = cf_expand(
            &CfInput::Interval {
                lo: x.clone(),
                hi: x.clone(),
            },
            10,
        )
        .unwrap();
        assert_eq!(digits_i64(&e), vec![3, 7, 16]);
        assert!(e.terminated);
    }

    #[test]
    fn convergent_identities_randomized() {
        // p_k q_{k-1} - p_{k-1} q_k = (-1)^{k-1} and |x - p/q| < 1/q^2
        let mut rng = Xoshiro256PlusPlus::from_seed(71);
        for _ in 0..300 {
            let num = rng.uniform_below(100_000) as i64 + 1;
            let den = rng.uniform_below(99_000) as i64 + 1;
            let x = Rat::new(num, den);
            let e = cf_expand(&CfInput::Rational(x.clone()), 64).unwrap();
            assert!(e.terminated);
            let conv = convergents(&e.digits);
            for k in 1..conv.len() {
                let (pk, qk) = &conv[k];
                let (pk1, qk1) = &conv[k - 1];
                let det = pk * qk1 - pk1 * qk;
                let want = if (k - 1) % 2 == 0 { 1 } else { -1 };
                assert_eq!(det, BigInt::from(want));
            }
            for (k, (p, q)) in conv.iter().enumerate() {
                let approx = Rat::from_ratio(p.clone(), q.clone());
                let err = (x.clone() - approx).abs();
                let bound = Rat::from_int(1) / Rat::from_bigint(q * q);
                if k + 1 < conv.len() {
                    assert!(err < bound);
                } else {
                    assert!(err.is_zero());
                }
            }
        }
    }

    #[test]
    fn surd_convergents_approximate() {
        let e = cf_expand(&CfInput::surd(0, 2, 1), 20).unwrap();
        let conv = convergents(&e.digits);
        // exact check: |2 q^2 - p^2| in {1, 2} along sqrt(2) convergents,
        // which implies |sqrt(2) - p/q| < 1/q^2
        for (p, q) in &conv {
            let t = BigInt::from(2) * q * q - p * p;
            assert!(t.abs() <= BigInt::from(2) && !t.is_zero());
        }
    }

    #[test]
    fn tail_digits_are_positive() {
        let mut rng = Xoshiro256PlusPlus::from_seed(72);
        for _ in 0..200 {
            let num = rng.uniform_below(10_000) as i64 - 5_000;
            let den = rng.uniform_below(999) as i64 + 1;
            let e = cf_expand(&CfInput::Rational(Rat::new(num, den)), 64).unwrap();
            for d in e.digits.iter().skip(1) {
                assert!(d.is_positive(), "nonpositive tail digit for {num}/{den}");
            }
        }
    }

    #[test]
    fn max_partial_quotient_skips_integer_part() {
        let e = cf_expand(&CfInput::Rational(Rat::new(1000, 3)), 10).unwrap();
        // 1000/3 = [333; 3]
        assert_eq!(e.max_partial_quotient(), Some(BigInt::from(3)));
    }
}
