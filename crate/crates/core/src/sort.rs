//! Stable increasing-order pixel sorts: counting sort for low quantization,
//! LSD radix sort on 16-bit digits above it.

use crate::error::{Error, Result};
use crate::image::Image2D;

/// Bit depth from which [`sort_pixels`] switches from counting sort to radix
/// sort.
pub const SORT_SWITCH_BITS: u32 = 18;

const DIGIT_BITS: u32 = 16;

/// Pixel indices stably sorted by increasing value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedPixels(Vec<usize>);

impl SortedPixels {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl std::ops::Deref for SortedPixels {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// Sorts with counting sort below [`SORT_SWITCH_BITS`], radix sort otherwise.
pub fn sort_pixels(img: &Image2D) -> SortedPixels {
    sort_pixels_with_switch(img, SORT_SWITCH_BITS)
}

/// [`sort_pixels`] with a custom switch point, for measuring the crossover.
pub fn sort_pixels_with_switch(img: &Image2D, switch_bits: u32) -> SortedPixels {
    SortedPixels(sort_values(img.values(), img.bit_depth(), switch_bits))
}

pub fn counting_sort(img: &Image2D, bits: u32) -> Result<SortedPixels> {
    if bits >= SORT_SWITCH_BITS {
        return Err(Error::Contract(format!("counting sort needs fewer than {SORT_SWITCH_BITS} bits, got {bits}")));
    }
    check_fits(img, bits)?;
    Ok(SortedPixels(counting_sort_values(img.values(), bits)))
}

pub fn radix_sort(img: &Image2D, bits: u32) -> Result<SortedPixels> {
    if bits == 0 {
        return Err(Error::Contract("radix sort needs at least one bit".into()));
    }
    check_fits(img, bits)?;
    Ok(SortedPixels(radix_sort_values(img.values(), bits)))
}

fn check_fits(img: &Image2D, bits: u32) -> Result<()> {
    if bits < img.bit_depth() && img.max_value() > crate::image::max_value(bits) {
        return Err(Error::Contract(format!("image values do not fit in {bits} bits")));
    }
    Ok(())
}

pub(crate) fn sort_values(values: &[u32], bits: u32, switch_bits: u32) -> Vec<usize> {
    if bits < switch_bits && bits < SORT_SWITCH_BITS {
        counting_sort_values(values, bits)
    } else {
        radix_sort_values(values, bits)
    }
}

fn counting_sort_values(values: &[u32], bits: u32) -> Vec<usize> {
    let mut start = vec![0usize; (1usize << bits) + 1];
    for &v in values {
        start[v as usize + 1] += 1;
    }
    for i in 1..start.len() {
        start[i] += start[i - 1];
    }
    let mut out = vec![0usize; values.len()];
    for (p, &v) in values.iter().enumerate() {
        let slot = &mut start[v as usize];
        out[*slot] = p;
        *slot += 1;
    }
    out
}

fn radix_sort_values(values: &[u32], bits: u32) -> Vec<usize> {
    let n = values.len();
    let passes = bits.div_ceil(DIGIT_BITS);
    let mut src: Vec<usize> = (0..n).collect();
    let mut dst = vec![0usize; n];
    let mut count = vec![0usize; (1 << DIGIT_BITS) + 1];
    for pass in 0..passes {
        let shift = pass * DIGIT_BITS;
        let digit = |p: usize| ((values[p] >> shift) & 0xffff) as usize;
        count.iter_mut().for_each(|c| *c = 0);
        for &p in &src {
            count[digit(p) + 1] += 1;
        }
        for i in 1..count.len() {
            count[i] += count[i - 1];
        }
        for &p in &src {
            let slot = &mut count[digit(p)];
            dst[*slot] = p;
            *slot += 1;
        }
        std::mem::swap(&mut src, &mut dst);
    }
    src
}
