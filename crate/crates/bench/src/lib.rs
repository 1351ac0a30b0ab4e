//! Shared inputs for the benchmarks.

use maxtree::{synth, Image2D};

/// Deterministic natural-looking 8-bit image of about `megapixels` million
/// pixels, optionally re-quantized to `bits`.
pub fn fixture(megapixels: f64, bits: u32, seed: u64) -> Image2D {
    let side = (megapixels * 1e6).sqrt().round().max(1.0) as usize;
    let img = synth::natural(side, side, seed);
    if bits == img.bit_depth() {
        img
    } else {
        img.requantize(bits, seed).expect("bits within 1..=32")
    }
}
