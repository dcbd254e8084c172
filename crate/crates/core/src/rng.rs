//! Deterministic pseudo-randomness.
//!
//! Every stochastic component draws from an xoshiro256++ generator whose
//! state is derived from a master seed plus a stable integer path (for
//! example `[STREAM_WALK, start_node, walk_number]`). Substreams make the
//! output independent of execution order, which is what lets parallel and
//! serial corpus generation produce identical bytes.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; a strong 64-bit mixing function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a substream seed from a master seed and an integer path.
///
/// Distinct paths yield statistically independent seeds; the same
/// (master, path) always yields the same seed.
pub fn stream_seed(master: u64, path: &[u64]) -> u64 {
    let mut s = mix64(master ^ GOLDEN);
    for &part in path {
        s = mix64(s.wrapping_add(GOLDEN) ^ mix64(part));
    }
    s
}

/// xoshiro256++ generator.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        // SplitMix64 expansion, as recommended by the xoshiro authors.
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(GOLDEN);
            mix64(sm)
        };
        Rng {
            s: [next(), next(), next(), next()],
        }
    }

    pub fn from_stream(master: u64, path: &[u64]) -> Self {
        Rng::from_seed(stream_seed(master, path))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in 0..n. `n` must be nonzero.
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

/// FNV-1a over bytes; used for stable config fingerprints in file headers.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
