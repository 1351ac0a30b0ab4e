//! Benchmark sweep: one image per (size, bit depth), every requested
//! builder timed over several repetitions, medians reported as CSV.

use std::path::PathBuf;
use std::time::Instant;

use log::warn;
use maxtree::{synth, Algorithm, BuildOptions, Connectivity, Error, Image2D, Phase, PhaseTimes, Result};

use crate::mem;

pub const CSV_HEADER: &str = "algo,n,bits,bands,workers,phase,ms,mem_bytes";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub image: Option<PathBuf>,
    pub megapixels: Vec<f64>,
    pub bit_depths: Vec<u32>,
    pub bands: Vec<usize>,
    pub workers: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub phases: bool,
    pub conn: Connectivity,
}

impl BenchConfig {
    pub fn check(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Domain(m.to_string()));
        if self.reps < 3 {
            return fail("--reps must be at least 3 (the median is reported)");
        }
        if self.algorithms.is_empty()
            || self.megapixels.is_empty()
            || self.bit_depths.is_empty()
            || self.bands.is_empty()
            || self.workers.is_empty()
        {
            return fail("every sweep list needs at least one value");
        }
        if self.megapixels.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return fail("sizes must be positive megapixel counts");
        }
        if self.bit_depths.iter().any(|b| !(1..=32).contains(b)) {
            return fail("bit depths must be in 1..=32");
        }
        if self.bands.contains(&0) {
            return fail("band counts must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub algo: Algorithm,
    pub n: usize,
    pub bits: u32,
    pub bands: usize,
    pub workers: usize,
    /// A phase name, or `total`.
    pub phase: &'static str,
    pub ms: f64,
    pub mem_bytes: Option<u64>,
}

impl BenchRecord {
    pub fn csv(&self) -> String {
        let mem = self.mem_bytes.map(|m| m.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{:.4},{}",
            self.algo, self.n, self.bits, self.bands, self.workers, self.phase, self.ms, mem
        )
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

/// Input for one (size, bits) pair: `source` tiled or cropped to the
/// target pixel count with its aspect ratio kept, or a synthetic natural
/// image. `None` when the target rounds to an empty image.
pub fn make_image(source: Option<&Image2D>, megapixels: f64, bits: u32, seed: u64) -> Option<Image2D> {
    let target = megapixels * 1e6;
    let (w, h) = match source {
        Some(src) => {
            let scale = (target / src.len() as f64).sqrt();
            ((src.width() as f64 * scale).round() as usize, (src.height() as f64 * scale).round() as usize)
        }
        None => {
            let side = target.sqrt().round() as usize;
            (side, side)
        }
    };
    if w == 0 || h == 0 {
        return None;
    }
    let img = match source {
        Some(src) => src.resize_by_tiling(w, h).ok()?,
        None => synth::natural(w, h, seed),
    };
    if img.bit_depth() == bits {
        Some(img)
    } else {
        img.requantize(bits, seed).ok()
    }
}

/// Runs the sweep, emitting records as each cell completes. `build` runs
/// one construction and returns its phase times.
pub fn run<B, E>(cfg: &BenchConfig, source: Option<&Image2D>, mut build: B, mut emit: E) -> Result<()>
where
    B: FnMut(&Image2D, Algorithm, &BuildOptions) -> Result<PhaseTimes>,
    E: FnMut(&BenchRecord) -> Result<()>,
{
    for &mp in &cfg.megapixels {
        for &bits in &cfg.bit_depths {
            let Some(img) = make_image(source, mp, bits, cfg.seed) else {
                warn!("{mp} MP rounds to an empty image, cells skipped");
                continue;
            };
            for &algo in &cfg.algorithms {
                if !algo.supports(bits) {
                    warn!("{algo} does not support {bits} bits, cell skipped");
                    continue;
                }
                if algo == Algorithm::Parallel && !cfg.bands.iter().any(|&b| b <= img.height()) {
                    warn!("image has {} rows, fewer than every band count; cells skipped", img.height());
                    continue;
                }
                let splits: Vec<(usize, usize)> = if algo == Algorithm::Parallel {
                    cfg.bands.iter().flat_map(|&b| cfg.workers.iter().map(move |&w| (b, w))).collect()
                } else {
                    vec![(1, 1)]
                };
                for (bands, workers) in splits {
                    let opts = BuildOptions { conn: cfg.conn, bands, workers, ..Default::default() };
                    for rec in cell(&img, algo, &opts, cfg, &mut build)? {
                        emit(&rec)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn cell<B>(
    img: &Image2D,
    algo: Algorithm,
    opts: &BuildOptions,
    cfg: &BenchConfig,
    build: &mut B,
) -> Result<Vec<BenchRecord>>
where
    B: FnMut(&Image2D, Algorithm, &BuildOptions) -> Result<PhaseTimes>,
{
    let tracked = mem::reset_peak();
    let mut totals = Vec::with_capacity(cfg.reps);
    let mut phases: Vec<Vec<f64>> = vec![Vec::new(); Phase::ALL.len()];
    for _ in 0..cfg.reps {
        let start = Instant::now();
        let times = build(img, algo, opts)?;
        totals.push(start.elapsed().as_secs_f64() * 1e3);
        for (i, ph) in Phase::ALL.into_iter().enumerate() {
            if let Some(d) = times.get(ph) {
                phases[i].push(d.as_secs_f64() * 1e3);
            }
        }
    }
    let mem_bytes = if tracked { mem::peak_bytes() } else { None };
    let (bands, workers) = if algo == Algorithm::Parallel { (opts.bands, opts.workers) } else { (1, 1) };
    let record =
        |phase, ms| BenchRecord { algo, n: img.len(), bits: img.bit_depth(), bands, workers, phase, ms, mem_bytes };
    let mut out = Vec::new();
    if cfg.phases {
        for (i, ph) in Phase::ALL.into_iter().enumerate() {
            if !phases[i].is_empty() {
                out.push(record(ph.as_str(), median(&mut phases[i])));
            }
        }
    }
    out.push(record("total", median(&mut totals)));
    Ok(out)
}
