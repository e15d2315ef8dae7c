//! Counter-keyed random number streams.
//!
//! Every stochastic consumer in the estimator owns a [`StreamKey`] derived
//! from the master seed by a chain of labelled `child` steps, e.g.
//! `root(seed) -> trial i -> particle j -> level k`. Two consumers with
//! different key paths draw from statistically independent ChaCha streams,
//! and the same key always reproduces the same sequence bit for bit. This
//! is what makes trajectories replayable and lets split particle copies
//! diverge without sharing any future randomness with their parent.

use core::marker::PhantomData;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::scalar::Real;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer; avalanches all input bits into the output.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 256-bit key identifying one random stream.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct StreamKey([u64; 4]);

impl StreamKey {
    /// Expands a master seed into a root key.
    pub fn root(seed: u64) -> Self {
        let mut s = seed;
        let mut words = [0u64; 4];
        for w in &mut words {
            s = s.wrapping_add(GOLDEN);
            *w = mix64(s);
        }
        Self(words)
    }

    /// Derives a labelled child key. Distinct labels give unrelated keys;
    /// the parent cannot be recovered, so derivation chains never collide
    /// with sibling chains in practice.
    pub fn child(&self, label: u64) -> Self {
        let [a, b, c, d] = self.0;
        let m = mix64(label.wrapping_add(GOLDEN));
        let a2 = mix64(a ^ m);
        let b2 = mix64(b.wrapping_add(a2) ^ m.rotate_left(17));
        let c2 = mix64(c.wrapping_add(b2) ^ m.rotate_left(31));
        let d2 = mix64(d.wrapping_add(c2) ^ m.rotate_left(47));
        Self([a2, b2, c2, d2])
    }

    fn seed_bytes(&self) -> [u8; 32] {
        let mut bytes = [0u8; 32];
        for (i, w) in self.0.iter().enumerate() {
            bytes[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
        }
        bytes
    }

    /// Compact hex form for provenance records.
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|w| format!("{w:016x}")).collect()
    }
}

/// Samples the driving noise of one consumer from its keyed stream.
///
/// All draws happen in `f64` and narrow to `T` afterwards, so a given key
/// yields the same underlying sequence regardless of the scalar width.
pub struct NoiseDriver<T: Real> {
    rng: ChaCha8Rng,
    _scalar: PhantomData<T>,
}

impl<T: Real> NoiseDriver<T> {
    pub fn new(key: StreamKey) -> Self {
        Self {
            rng: ChaCha8Rng::from_seed(key.seed_bytes()),
            _scalar: PhantomData,
        }
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> T {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        T::lit(z)
    }

    /// Brownian increment over a step of length `dt`, i.e. N(0, dt).
    pub fn brownian_increment(&mut self, dt: T) -> T {
        self.standard_normal() * dt.sqrt()
    }

    /// Fills `out` with independent Brownian increments over `dt`.
    pub fn fill_brownian(&mut self, dt: T, out: &mut [T]) {
        for slot in out {
            *slot = self.brownian_increment(dt);
        }
    }

    /// Unit-rate exponential draw, used for local jump time budgets.
    pub fn exp1(&mut self) -> T {
        let e: f64 = Exp1.sample(&mut self.rng);
        T::lit(e)
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> T {
        T::lit(self.rng.random::<f64>())
    }

    /// Bernoulli trial with success probability `p` (clamped to [0, 1]).
    pub fn bernoulli(&mut self, p: T) -> bool {
        let p = p.to_f64_lossy().clamp(0.0, 1.0);
        self.rng.random::<f64>() < p
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.rng.random_range(0..n)
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<X>(&mut self, xs: &mut [X]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }
}
