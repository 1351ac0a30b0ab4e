//! Gray-level images on a rectangular grid, pixel neighborhoods, and the
//! resize/requantize transforms used by the benchmark protocol.

mod io;

pub use io::{encode_pgm, encode_raw, load_image, load_pgm, load_raw, parse_pgm, parse_raw, save_pgm, save_raw};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported bit depth.
pub const MAX_BIT_DEPTH: u32 = 32;

/// Pixel adjacency on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    /// N, W, E and S neighbors.
    #[default]
    C4,
    /// All eight surrounding pixels.
    C8,
}

impl Connectivity {
    pub fn max_neighbors(self) -> usize {
        match self {
            Connectivity::C4 => 4,
            Connectivity::C8 => 8,
        }
    }
}

impl std::str::FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4" | "c4" | "C4" => Ok(Connectivity::C4),
            "8" | "c8" | "C8" => Ok(Connectivity::C8),
            _ => Err(Error::Domain(format!("unknown connectivity `{s}` (expected 4 or 8)"))),
        }
    }
}

/// A rectangular image of unsigned integer values stored row-major.
///
/// Pixel `(row, col)` lives at linear index `row * width + col`. Every value
/// is strictly below `2^bit_depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image2D {
    width: usize,
    height: usize,
    bit_depth: u32,
    values: Vec<u32>,
}

impl Image2D {
    pub fn new(width: usize, height: usize, bit_depth: u32, values: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain(format!("empty image {width}x{height}")));
        }
        if !(1..=MAX_BIT_DEPTH).contains(&bit_depth) {
            return Err(Error::Domain(format!("bit depth {bit_depth} outside [1, 32]")));
        }
        let n = width.checked_mul(height).ok_or_else(|| Error::Domain("image dimensions overflow".into()))?;
        if values.len() != n {
            return Err(Error::Domain(format!("expected {n} values for {width}x{height}, got {}", values.len())));
        }
        let limit = max_value(bit_depth);
        if let Some(p) = values.iter().position(|&v| v > limit) {
            return Err(Error::Domain(format!("value {} at pixel {p} does not fit in {bit_depth} bits", values[p])));
        }
        Ok(Image2D { width, height, bit_depth, values })
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u32,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width.saturating_mul(height));
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Image2D::new(width, height, bit_depth, values)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    /// Number of pixels.
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; images have at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    #[inline]
    pub fn get(&self, p: usize) -> u32 {
        self.values[p]
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// Contiguous rows `[row_begin, row_end)` as a borrowed view.
    pub fn rows(&self, row_begin: usize, row_end: usize) -> ImageView<'_> {
        assert!(row_begin < row_end && row_end <= self.height);
        ImageView {
            width: self.width,
            height: row_end - row_begin,
            bit_depth: self.bit_depth,
            values: &self.values[row_begin * self.width..row_end * self.width],
        }
    }

    pub fn view(&self) -> ImageView<'_> {
        ImageView { width: self.width, height: self.height, bit_depth: self.bit_depth, values: &self.values }
    }

    /// In-domain neighbors of `p` in a fixed order: N, W, E, S for
    /// [`Connectivity::C4`], row-major for [`Connectivity::C8`].
    pub fn neighbors(&self, p: usize, conn: Connectivity) -> Result<Vec<usize>> {
        if p >= self.len() {
            return Err(Error::Domain(format!("pixel {p} outside image of {} pixels", self.len())));
        }
        let mut buf = [0usize; 8];
        let k = Neighborhood::new(self.width, self.height, conn).fill(p, &mut buf);
        Ok(buf[..k].to_vec())
    }

    /// Tiles (or crops) the image to `target_w x target_h`:
    /// `out(r, c) = in(r mod height, c mod width)`.
    pub fn resize_by_tiling(&self, target_w: usize, target_h: usize) -> Result<Image2D> {
        if target_w == 0 || target_h == 0 {
            return Err(Error::Domain(format!("target size {target_w}x{target_h} is empty")));
        }
        let mut values = Vec::with_capacity(target_w * target_h);
        for r in 0..target_h {
            let src = &self.values[(r % self.height) * self.width..][..self.width];
            values.extend((0..target_w).map(|c| src[c % self.width]));
        }
        Ok(Image2D { width: target_w, height: target_h, bit_depth: self.bit_depth, values })
    }

    /// Changes the quantization to `target_bits`.
    ///
    /// Up-quantization shifts values left and fills the new low bits with
    /// seeded uniform noise; down-quantization drops low bits.
    pub fn requantize(&self, target_bits: u32, seed: u64) -> Result<Image2D> {
        if !(1..=MAX_BIT_DEPTH).contains(&target_bits) {
            return Err(Error::Domain(format!("target bit depth {target_bits} outside [1, 32]")));
        }
        let values = if target_bits >= self.bit_depth {
            let shift = target_bits - self.bit_depth;
            if shift == 0 {
                self.values.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let span = 1u64 << shift;
                self.values.iter().map(|&v| (((v as u64) << shift) + rng.gen_range(0..span)) as u32).collect()
            }
        } else {
            let shift = self.bit_depth - target_bits;
            self.values.iter().map(|&v| v >> shift).collect()
        };
        Ok(Image2D { width: self.width, height: self.height, bit_depth: target_bits, values })
    }

    pub fn min_value(&self) -> u32 {
        self.values.iter().copied().min().unwrap_or(0)
    }

    pub fn max_value(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

#[inline]
pub fn max_value(bit_depth: u32) -> u32 {
    if bit_depth >= 32 {
        u32::MAX
    } else {
        (1u32 << bit_depth) - 1
    }
}

/// Borrowed rectangular block of an [`Image2D`], used to run builders on
/// row bands without copying.
#[derive(Debug, Clone, Copy)]
pub struct ImageView<'a> {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u32,
    pub values: &'a [u32],
}

impl<'a> ImageView<'a> {
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn neighborhood(&self, conn: Connectivity) -> Neighborhood {
        Neighborhood::new(self.width, self.height, conn)
    }
}

/// Allocation-free neighbor enumeration for a fixed grid size.
#[derive(Debug, Clone, Copy)]
pub struct Neighborhood {
    width: usize,
    height: usize,
    conn: Connectivity,
}

impl Neighborhood {
    pub fn new(width: usize, height: usize, conn: Connectivity) -> Self {
        Neighborhood { width, height, conn }
    }

    /// Writes the in-domain neighbors of `p` into `out` and returns how many
    /// were written.
    #[inline]
    pub fn fill(&self, p: usize, out: &mut [usize; 8]) -> usize {
        let w = self.width;
        let r = p / w;
        let c = p - r * w;
        let up = r > 0;
        let down = r + 1 < self.height;
        let left = c > 0;
        let right = c + 1 < w;
        let mut k = 0;
        let mut put = |cond: bool, q: usize| {
            if cond {
                out[k] = q;
                k += 1;
            }
        };
        match self.conn {
            Connectivity::C4 => {
                put(up, p.wrapping_sub(w));
                put(left, p.wrapping_sub(1));
                put(right, p + 1);
                put(down, p + w);
            }
            Connectivity::C8 => {
                put(up && left, p.wrapping_sub(w + 1));
                put(up, p.wrapping_sub(w));
                put(up && right, p.wrapping_sub(w).wrapping_add(1));
                put(left, p.wrapping_sub(1));
                put(right, p + 1);
                put(down && left, (p + w).wrapping_sub(1));
                put(down, p + w);
                put(down && right, p + w + 1);
            }
        }
        k
    }
}
