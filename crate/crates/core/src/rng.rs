//! Deterministic counter-based random streams.
//!
//! Every stream is a pure function of `(seed, stream_id, counter)`: the k-th
//! output is `mix64(start + k * gamma)` where `start` and the odd increment
//! `gamma` are derived by hashing the seed and stream id (the SplitMix
//! construction of Steele, Lea and Flood). Distinct stream ids walk distinct
//! full-period permutation orbits, so trials indexed by stream id can run on
//! any number of workers and still reproduce byte-identical results.

/// Golden-ratio increment used by the key derivation.
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Finalizer from SplitMix64 (Stafford variant 13).
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    z
}

/// Turn an arbitrary word into a "good" odd gamma: odd, with enough bit
/// transitions that consecutive counter values decorrelate.
fn mix_gamma(z: u64) -> u64 {
    let g = mix64(z) | 1;
    if (g ^ (g >> 1)).count_ones() < 24 {
        g ^ 0xaaaa_aaaa_aaaa_aaaa
    } else {
        g
    }
}

/// A counter-based random stream keyed by `(seed, stream_id)`.
///
/// Cloning a stream clones its position; two streams with the same key and
/// counter produce identical output forever.
#[derive(Clone, Copy, Debug)]
pub struct RngStream {
    start: u64,
    gamma: u64,
    counter: u64,
}

impl RngStream {
    /// Create the stream addressed by `(seed, stream_id)` at counter zero.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let s = mix64(seed ^ 0x6a09_e667_f3bc_c909);
        let t = mix64(stream_id.wrapping_mul(GOLDEN) ^ 0xbb67_ae85_84ca_a73b);
        RngStream {
            start: mix64(s ^ t.rotate_left(23)),
            gamma: mix_gamma(s.wrapping_add(t) ^ GOLDEN),
            counter: 0,
        }
    }

    /// Derive an independent child stream. Children of distinct `(parent,
    /// child_id)` pairs are distinct; the parent is left untouched.
    pub fn split(&self, child_id: u64) -> Self {
        RngStream::new(mix64(self.start ^ self.gamma.rotate_left(32)), child_id)
    }

    /// Next raw 64-bit word.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.start.wrapping_add(self.counter.wrapping_mul(self.gamma)))
    }

    /// Uniform draw on the open interval (0, 1); never returns 0 or 1, so it
    /// is always a safe argument to `ln`.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Exponential(1) draw by inverse transform, -ln U.
    #[inline]
    pub fn next_exp(&mut self) -> f64 {
        -self.next_open01().ln()
    }

    /// Uniform draw on {0, 1, ..., bound-1} (Lemire rejection).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (bound as u128);
            let lo = m as u64;
            if lo >= bound || lo >= bound.wrapping_neg() % bound {
                return (m >> 64) as u64;
            }
        }
    }

    /// Poisson(mean) draw by multiplicative inversion, chunked so the
    /// running product never underflows. Cost is O(mean); the shell
    /// intensities used in this crate stay in the hundreds.
    pub fn next_poisson(&mut self, mean: f64) -> u64 {
        assert!(mean.is_finite() && mean >= 0.0, "poisson mean must be finite and >= 0");
        let mut total = 0u64;
        let mut rest = mean;
        while rest > 500.0 {
            total += self.poisson_small(500.0);
            rest -= 500.0;
        }
        total + self.poisson_small(rest)
    }

    fn poisson_small(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let floor = (-mean).exp();
        let mut k = 0u64;
        let mut p = 1.0;
        loop {
            p *= self.next_open01();
            if p <= floor {
                return k;
            }
            k += 1;
        }
    }

    /// Fisher-Yates shuffle of a slice.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
