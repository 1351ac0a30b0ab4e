//! Seeded synthetic images.
//!
//! `natural` stands in for a photograph when none is supplied: smooth
//! multi-octave value noise with a little sensor-like grain, quantized to
//! 8 bits, so it has large gradients, flat zones and texture.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{max_value, Image2D};

/// Independent uniform values in `[0, 2^bits)`.
pub fn uniform(width: usize, height: usize, bits: u32, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = max_value(bits);
    Image2D::from_fn(width, height, bits, |_, _| rng.gen_range(0..=top)).expect("valid dimensions")
}

/// Piecewise-constant image using at most `levels` distinct values drawn
/// from `[0, 2^bits)`. Produces wide flat zones.
pub fn flat_zones(width: usize, height: usize, bits: u32, levels: usize, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = max_value(bits);
    let palette: Vec<u32> = (0..levels.max(1)).map(|_| rng.gen_range(0..=top)).collect();
    let field = NoiseField::new(width, height, 4 + rng.gen_range(0..8usize), &mut rng);
    Image2D::from_fn(width, height, bits, |r, c| {
        let t = field.sample(r, c);
        let i = ((t * palette.len() as f64) as usize).min(palette.len() - 1);
        palette[i]
    })
    .expect("valid dimensions")
}

/// Natural-looking 8-bit image.
pub fn natural(width: usize, height: usize, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let octaves: Vec<(NoiseField, f64)> = [(96usize, 1.0), (40, 0.45), (14, 0.2), (5, 0.08)]
        .into_iter()
        .map(|(cell, amp)| (NoiseField::new(width, height, cell, &mut rng), amp))
        .collect();
    let total: f64 = octaves.iter().map(|(_, a)| a).sum();
    let mut values = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            let s: f64 = octaves.iter().map(|(f, a)| f.sample(r, c) * a).sum::<f64>() / total;
            // contrast stretch: octave sums cluster around 0.5
            let v = (s - 0.5) * 2.2 + 0.5;
            let grain = rng.gen_range(-1.5..1.5);
            values.push((v * 255.0 + grain).round().clamp(0.0, 255.0) as u32);
        }
    }
    Image2D::new(width, height, 8, values).expect("valid dimensions")
}

/// Bilinearly interpolated random lattice with smoothstep easing.
struct NoiseField {
    cell: f64,
    cols: usize,
    grid: Vec<f64>,
}

impl NoiseField {
    fn new(width: usize, height: usize, cell: usize, rng: &mut ChaCha8Rng) -> Self {
        let cell = cell.max(1);
        let cols = width / cell + 2;
        let rows = height / cell + 2;
        let grid = (0..cols * rows).map(|_| rng.gen::<f64>()).collect();
        NoiseField { cell: cell as f64, cols, grid }
    }

    fn sample(&self, r: usize, c: usize) -> f64 {
        let y = r as f64 / self.cell;
        let x = c as f64 / self.cell;
        let (y0, x0) = (y.floor() as usize, x.floor() as usize);
        let ease = |t: f64| t * t * (3.0 - 2.0 * t);
        let (ty, tx) = (ease(y - y0 as f64), ease(x - x0 as f64));
        let g = |yy: usize, xx: usize| self.grid[yy * self.cols + xx];
        let top = g(y0, x0) * (1.0 - tx) + g(y0, x0 + 1) * tx;
        let bottom = g(y0 + 1, x0) * (1.0 - tx) + g(y0 + 1, x0 + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}
