//! Deterministic, addressable randomness.
//!
//! All random quantities in the crate are drawn from xoshiro256** streams
//! addressed by a [`StreamKey`]: a 64-bit key folded from a base seed, string
//! tags, and integer indices via the SplitMix64 finalizer. Two properties
//! matter here:
//!
//! * the generator is self-contained and bit-portable, so a seed produces the
//!   same bytes on every platform and toolchain;
//! * streams are addressed rather than sequenced — the transition row for
//!   state-action pair (s, a) comes from the key `(seed, "transitions",
//!   s*n_a + a)` regardless of the order rows are generated in, so parallel
//!   and sequential generation agree.

const SPLITMIX64_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 step: advances `state` and returns the next output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX64_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over bytes, used to hash string tags into key material.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

fn fold(key: u64, salt: u64) -> u64 {
    let mut state = key ^ salt.rotate_left(32);
    splitmix64(&mut state)
}

/// Address of an independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        StreamKey(splitmix64(&mut state))
    }

    /// Derive a child key for a named purpose.
    pub fn tagged(self, tag: &str) -> Self {
        StreamKey(fold(self.0, fnv1a64(tag.as_bytes())))
    }

    /// Derive a child key for an integer coordinate.
    pub fn indexed(self, index: u64) -> Self {
        StreamKey(fold(self.0, index))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> Xoshiro256StarStar {
        Xoshiro256StarStar::from_seed(self.0)
    }
}

/// xoshiro256** (Blackman & Vigna), seeded through SplitMix64.
#[derive(Clone, Debug)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn from_seed(seed: u64) -> Self {
        let mut state = seed;
        let s = [
            splitmix64(&mut state),
            splitmix64(&mut state),
            splitmix64(&mut state),
            splitmix64(&mut state),
        ];
        Xoshiro256StarStar { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform in [-amplitude, amplitude).
    pub fn symmetric(&mut self, amplitude: f64) -> f64 {
        self.uniform(-amplitude, amplitude)
    }

    /// Unbiased uniform integer in [0, n) by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is undefined");
        let threshold = n.wrapping_neg() % n; // 2^64 mod n
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// `k` distinct values from 0..n via partial Fisher-Yates, returned sorted.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot sample {k} distinct values from 0..{n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        let mut chosen = pool[..k].to_vec();
        chosen.sort_unstable();
        chosen
    }

    /// `count` sorted uniform draws from (0, 1).
    pub fn sorted_uniforms(&mut self, count: usize) -> Vec<f64> {
        let mut cuts: Vec<f64> = (0..count).map(|_| self.next_f64()).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
        cuts
    }
}
