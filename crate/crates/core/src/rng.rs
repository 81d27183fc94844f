//! Seeded uniform streams.
//!
//! Every random draw in the crate comes from xoshiro256++ seeded through
//! SplitMix64 (`Xoshiro256PlusPlus::seed_from_u64`). Uniforms on the open
//! interval (0, 1) are `((x >> 11) + 0.5) * 2^-53` for a raw 64-bit output
//! `x`, so inversion sampling never sees 0 or 1. Independent substreams for
//! trial `i` of a run seeded with `s` are seeded with
//! `splitmix64(s ^ splitmix64(i + 1))`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Stream = Xoshiro256PlusPlus;

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

pub fn substream(seed: u64, index: u64) -> Stream {
    stream(substream_seed(seed, index))
}

/// Seed of substream `index`, for APIs that take a seed rather than a stream.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on the open interval (0, 1).
pub fn open01<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform<R: RngCore>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * open01(rng)
}

/// Log-uniform on (lo, hi), both positive.
pub fn log_uniform<R: RngCore>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}

/// Uniform integer in `lo..=hi` by rejection.
pub fn int_in<R: RngCore>(rng: &mut R, lo: usize, hi: usize) -> usize {
    debug_assert!(lo <= hi);
    let span = (hi - lo) as u64 + 1;
    let zone = u64::MAX - (u64::MAX % span);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return lo + (x % span) as usize;
        }
    }
}
