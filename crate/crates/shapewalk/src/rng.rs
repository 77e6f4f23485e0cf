//! Deterministic, portable random number generation.
//!
//! Every stochastic routine in this crate draws from [`Xoshiro256PlusPlus`],
//! seeded through [`SplitMix64`]. Both generators are fixed 64-bit integer
//! recurrences, so a `(seed, stream)` pair reproduces the same byte stream on
//! any platform. Substreams for parallel trajectories come from
//! [`Xoshiro256PlusPlus::from_seed_stream`]; distinct stream indices yield
//! independently-seeded states.
//!
//! Regression test vectors for both generators are pinned in the test module
//! below and listed in `docs/rng.md`.

/// SplitMix64 state expander (Steele, Lea, Vigna).
///
/// Used only to turn a 64-bit seed into generator state words.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// xoshiro256++ generator (Blackman & Vigna), 64-bit output.
#[derive(Clone, Debug)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    /// Seed the four state words from SplitMix64, as the authors recommend.
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        Xoshiro256PlusPlus { s }
    }

    /// Substream `stream` of a master seed.
    ///
    /// The state is expanded from `seed XOR (stream+1)*GOLDEN`, where GOLDEN
    /// is the SplitMix64 increment; distinct streams therefore start SplitMix64
    /// at distinct, well-separated states.
    pub fn from_seed_stream(seed: u64, stream: u64) -> Self {
        let tweak = stream
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
        Self::from_seed(seed ^ tweak)
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform double in [0,1) with 53 random bits.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`, rejection-sampled to avoid modulo bias.
    pub fn uniform_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "uniform_below(0)");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let r = self.next_u64();
            if r <= zone {
                return r % n;
            }
        }
    }

    /// Uniform in the half-open interval [a, b).
    pub fn uniform_range_f64(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform_f64()
    }

    /// Pair of independent standard normals (Box–Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // u in (0,1] so the log is finite.
        let u = 1.0 - self.uniform_f64();
        let v = self.uniform_f64();
        let r = (-2.0 * u.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * v;
        (r * theta.cos(), r * theta.sin())
    }

    /// Uniform point on the unit sphere in R^3.
    pub fn unit_vec3(&mut self) -> [f64; 3] {
        loop {
            let (a, b) = self.normal_pair();
            let (c, _) = self.normal_pair();
            let n = (a * a + b * b + c * c).sqrt();
            if n > 1e-12 {
                return [a / n, b / n, c / n];
            }
        }
    }

    /// Haar-ish random rotation: QR-free construction from two unit vectors.
    ///
    /// Columns form a right-handed orthonormal frame. Good enough for the
    /// invariance suites, which only need "many different" rotations.
    pub fn rotation3(&mut self) -> [[f64; 3]; 3] {
        loop {
            let a = self.unit_vec3();
            let b0 = self.unit_vec3();
            // Gram-Schmidt b against a.
            let d = a[0] * b0[0] + a[1] * b0[1] + a[2] * b0[2];
            let mut b = [b0[0] - d * a[0], b0[1] - d * a[1], b0[2] - d * a[2]];
            let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            if nb < 1e-6 {
                continue;
            }
            for x in &mut b {
                *x /= nb;
            }
            let c = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            return [
                [a[0], b[0], c[0]],
                [a[1], b[1], c[1]],
                [a[2], b[2], c[2]],
            ];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Pinned regression vectors; also listed in docs/rng.md. A change in any
    // of these silently breaks byte-level reproducibility of every artifact.
    #[test]
    fn splitmix64_pinned_vectors() {
        let mut sm = SplitMix64::new(0);
        let got: Vec<u64> = (0..3).map(|_| sm.next_u64()).collect();
        assert_eq!(
            got,
            vec![0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
        );
    }

    #[test]
    fn xoshiro_pinned_vectors() {
        let mut rng = Xoshiro256PlusPlus::from_seed(42);
        let first: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
        assert_eq!(
            first,
            vec![
                0xD0764D4F4476689F,
                0x519E4174576F3791,
                0xFBE07CFB0C24ED8C,
                0xB37D9F600CD835B8,
            ]
        );
        let mut zero = Xoshiro256PlusPlus::from_seed(0);
        let z: Vec<u64> = (0..4).map(|_| zero.next_u64()).collect();
        assert_eq!(
            z,
            vec![
                0x53175D61490B23DF,
                0x61DA6F3DC380D507,
                0x5C0FDF91EC9A7BFC,
                0x02EEBF8C3BBE5E1A,
            ]
        );
        let mut long = Xoshiro256PlusPlus::from_seed(1);
        let mut last = 0u64;
        for _ in 0..10_000 {
            last = long.next_u64();
        }
        assert_eq!(last, 0xC63D128BAB8BEB4B);
    }

    #[test]
    fn streams_differ_and_are_stable() {
        let mut a = Xoshiro256PlusPlus::from_seed_stream(7, 0);
        let mut b = Xoshiro256PlusPlus::from_seed_stream(7, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_below_is_in_range() {
        let mut rng = Xoshiro256PlusPlus::from_seed(1);
        for _ in 0..1000 {
            assert!(rng.uniform_below(7) < 7);
        }
    }

    #[test]
    fn unit_vectors_are_unit() {
        let mut rng = Xoshiro256PlusPlus::from_seed(3);
        for _ in 0..100 {
            let v = rng.unit_vec3();
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = Xoshiro256PlusPlus::from_seed(4);
        for _ in 0..50 {
            let r = rng.rotation3();
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-12);
                }
            }
            let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
            assert!((det - 1.0).abs() < 1e-12);
        }
    }
}
