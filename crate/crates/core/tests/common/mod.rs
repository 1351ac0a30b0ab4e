#![allow(dead_code)]

use maxtree::{synth, Algorithm, BuildOptions, Connectivity, Image2D, MaxTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BIT_DEPTHS: [u32; 8] = [1, 2, 4, 8, 12, 16, 20, 32];
pub const BANDS: [usize; 5] = [1, 2, 3, 4, 7];

pub struct Case {
    pub img: Image2D,
    pub conn: Connectivity,
    pub label: String,
}

/// Seeded images covering every bit depth and both connectivities, with
/// sizes from 1x1 to 64x64 and three textures (noise, flat zones, smooth).
pub fn corpus(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (w, h) = match i {
                0 => (1, 1),
                1 => (64, 64),
                2 => (1, 64),
                3 => (64, 1),
                _ => (rng.gen_range(1..=64), rng.gen_range(1..=64)),
            };
            let bits = BIT_DEPTHS[i % BIT_DEPTHS.len()];
            let conn = if (i / BIT_DEPTHS.len()).is_multiple_of(2) { Connectivity::C4 } else { Connectivity::C8 };
            let s = rng.gen::<u64>();
            let (style, img) = match i % 3 {
                0 => ("uniform", synth::uniform(w, h, bits, s)),
                1 => ("flat", synth::flat_zones(w, h, bits, rng.gen_range(1..=8), s)),
                _ => ("natural", synth::natural(w, h, s).requantize(bits, s).unwrap()),
            };
            let label = format!("#{i} {style} {w}x{h} {bits}b {conn:?}");
            Case { img, conn, label }
        })
        .collect()
}

/// Every builder applicable to `img`, labelled. The parallel builder is run
/// once per band count, over a base algorithm that rotates with `salt`.
pub fn all_builds(img: &Image2D, conn: Connectivity, salt: usize) -> Vec<(String, MaxTree)> {
    let mut out = Vec::new();
    for algo in Algorithm::SEQUENTIAL {
        if algo.supports(img.bit_depth()) {
            let t = maxtree::build(img, algo, &BuildOptions { conn, ..Default::default() }).unwrap();
            out.push((algo.id().to_string(), t));
        }
    }
    let bases: Vec<Algorithm> = Algorithm::SEQUENTIAL.into_iter().filter(|a| a.supports(img.bit_depth())).collect();
    for (k, bands) in BANDS.into_iter().enumerate() {
        let base = bases[(salt + k) % bases.len()];
        let opts = BuildOptions { conn, base, bands, workers: 2 };
        let t = maxtree::build(img, Algorithm::Parallel, &opts).unwrap();
        out.push((format!("parallel/{base}/{bands}"), t));
    }
    out
}
