//! Map-reduce max-tree: row bands are built independently (parent only),
//! merged pairwise along their shared row boundary, then canonized with
//! `S` recomputed from scratch.

use log::warn;

use crate::builder::Algorithm;
use crate::error::{Error, Result};
use crate::flooding::{nonrec_parent, salembier_parent, QueueBackend};
use crate::image::{Connectivity, Image2D, ImageView};
use crate::sort::SORT_SWITCH_BITS;
use crate::timing::{timed, PhaseTimes};
use crate::tree::{canonize_rebuild_s_values, MaxTree};
use crate::unionfind::{uf_levelcomp_parent, uf_parent, uf_rank_parent, LevelCompression};

/// Half-open row intervals covering the image, top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSplit {
    bands: Vec<(usize, usize)>,
}

impl DomainSplit {
    /// Splits `height` rows into `num_bands` bands of near-equal height.
    /// More bands than rows are clamped to one row per band.
    pub fn even(height: usize, num_bands: usize) -> Result<Self> {
        if num_bands == 0 {
            return Err(Error::Domain("num_bands must be at least 1".into()));
        }
        if height == 0 {
            return Err(Error::Domain("cannot split an empty image".into()));
        }
        let k = if num_bands > height {
            warn!("{num_bands} bands requested for {height} rows, using {height}");
            height
        } else {
            num_bands
        };
        let bands = (0..k).map(|i| (i * height / k, (i + 1) * height / k)).collect();
        Ok(DomainSplit { bands })
    }

    pub fn bands(&self) -> &[(usize, usize)] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }
}

/// Balanced binary reduction over consecutive bands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergePlan {
    Leaf(usize),
    /// Merge of bands `[first, mid)` with `[mid, last)`; the junction lies
    /// between the last row of band `mid - 1` and the first row of band `mid`.
    Merge {
        first: usize,
        mid: usize,
        last: usize,
        left: Box<MergePlan>,
        right: Box<MergePlan>,
    },
}

impl MergePlan {
    pub fn balanced(num_bands: usize) -> Self {
        assert!(num_bands > 0);
        Self::over(0, num_bands)
    }

    fn over(first: usize, last: usize) -> Self {
        if last - first == 1 {
            return MergePlan::Leaf(first);
        }
        let mid = first + (last - first) / 2;
        MergePlan::Merge {
            first,
            mid,
            last,
            left: Box::new(Self::over(first, mid)),
            right: Box::new(Self::over(mid, last)),
        }
    }

    pub fn bands(&self) -> std::ops::Range<usize> {
        match *self {
            MergePlan::Leaf(b) => b..b + 1,
            MergePlan::Merge { first, last, .. } => first..last,
        }
    }

    /// Number of merges in the plan.
    pub fn merges(&self) -> usize {
        match self {
            MergePlan::Leaf(_) => 0,
            MergePlan::Merge { left, right, .. } => 1 + left.merges() + right.merges(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MergePlan::Leaf(_) => 0,
            MergePlan::Merge { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// Parent array of a row range, holding global pixel indices.
struct Region<'a> {
    parent: &'a mut [usize],
    base: usize,
}

impl Region<'_> {
    #[inline]
    fn par(&self, p: usize) -> usize {
        self.parent[p - self.base]
    }

    #[inline]
    fn set(&mut self, p: usize, q: usize) {
        self.parent[p - self.base] = q;
    }

    fn findrepr(&mut self, values: &[u32], p: usize) -> usize {
        let mut r = p;
        loop {
            let q = self.par(r);
            if q == r || values[q] != values[r] {
                break;
            }
            r = q;
        }
        let mut x = p;
        while x != r {
            let next = self.par(x);
            self.set(x, r);
            x = next;
        }
        r
    }

    fn connect(&mut self, values: &[u32], p: usize, q: usize) {
        let mut x = self.findrepr(values, p);
        let mut y = self.findrepr(values, q);
        if values[x] < values[y] {
            std::mem::swap(&mut x, &mut y);
        }
        while x != y {
            let z = self.findrepr(values, self.par(x));
            self.set(x, z);
            if x == z {
                self.set(x, y);
                y = x;
            } else if values[z] >= values[y] {
                x = z;
            } else {
                self.set(x, y);
                x = y;
                y = z;
            }
        }
    }
}

/// Level root of `p`'s flat zone: climbs while the parent has the same
/// level, then points every visited pixel at the result.
pub fn findrepr(parent: &mut [usize], ima: &Image2D, p: usize) -> usize {
    Region { parent, base: 0 }.findrepr(ima.values(), p)
}

/// Merges the branches of two neighboring pixels `p` and `q` that belong to
/// different sub-trees of `parent`. Canonicity is not restored.
pub fn connect(parent: &mut [usize], ima: &Image2D, p: usize, q: usize) {
    Region { parent, base: 0 }.connect(ima.values(), p, q)
}

/// Map-reduce builder. `base` is one of the sequential algorithms;
/// `max_workers = 0` uses all available cores.
pub fn maxtree_parallel(
    img: &Image2D,
    conn: Connectivity,
    base: Algorithm,
    num_bands: usize,
    max_workers: usize,
) -> Result<MaxTree> {
    maxtree_parallel_timed(img, conn, base, num_bands, max_workers, &mut PhaseTimes::default())
}

pub fn maxtree_parallel_timed(
    img: &Image2D,
    conn: Connectivity,
    base: Algorithm,
    num_bands: usize,
    max_workers: usize,
    times: &mut PhaseTimes,
) -> Result<MaxTree> {
    let (tree, _) = run(img, conn, base, num_bands, max_workers, times)?;
    Ok(tree)
}

/// Runs the pipeline and also returns the number of `connect` calls.
pub(crate) fn run(
    img: &Image2D,
    conn: Connectivity,
    base: Algorithm,
    num_bands: usize,
    max_workers: usize,
    times: &mut PhaseTimes,
) -> Result<(MaxTree, usize)> {
    match base {
        Algorithm::Parallel => {
            return Err(Error::Domain("the parallel builder needs a sequential base algorithm".into()))
        }
        Algorithm::Salembier if img.bit_depth() >= SORT_SWITCH_BITS => {
            return Err(Error::Unsupported(format!(
                "salembier bands need fewer than {SORT_SWITCH_BITS} bits, image has {}",
                img.bit_depth()
            )))
        }
        _ => {}
    }
    let split = DomainSplit::even(img.height(), num_bands)?;
    let plan = MergePlan::balanced(split.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;

    let mut parent = vec![0usize; img.len()];
    let ctx = Ctx { img, conn, base, split: &split };
    let connects = pool.install(|| {
        timed(&mut times.build, || ctx.map(&plan, &mut parent, 0));
        timed(&mut times.merge, || ctx.reduce(&plan, &mut parent, 0))
    });
    let tree = timed(&mut times.canonize, || canonize_rebuild_s_values(img.values(), parent))?;
    Ok((tree, connects))
}

struct Ctx<'a> {
    img: &'a Image2D,
    conn: Connectivity,
    base: Algorithm,
    split: &'a DomainSplit,
}

impl Ctx<'_> {
    fn row_start(&self, band: usize) -> usize {
        self.split.bands()[band].0 * self.img.width()
    }

    /// Splits `parent` (covering `plan`'s bands, starting at pixel `base`)
    /// at the plan's midpoint.
    fn halves<'p>(
        &self,
        parent: &'p mut [usize],
        base: usize,
        mid: usize,
    ) -> (&'p mut [usize], &'p mut [usize], usize) {
        let cut = self.row_start(mid);
        let (a, b) = parent.split_at_mut(cut - base);
        (a, b, cut)
    }

    fn map(&self, plan: &MergePlan, parent: &mut [usize], base: usize) {
        match plan {
            MergePlan::Leaf(b) => {
                let (r0, r1) = self.split.bands()[*b];
                build_band(self.img.rows(r0, r1), self.conn, self.base, parent);
                for x in parent.iter_mut() {
                    *x += base;
                }
            }
            MergePlan::Merge { mid, left, right, .. } => {
                let (a, b, cut) = self.halves(parent, base, *mid);
                rayon::join(|| self.map(left, a, base), || self.map(right, b, cut));
            }
        }
    }

    fn reduce(&self, plan: &MergePlan, parent: &mut [usize], base: usize) -> usize {
        let MergePlan::Merge { mid, left, right, .. } = plan else {
            return 0;
        };
        let (a, b, cut) = self.halves(parent, base, *mid);
        let (ca, cb) = rayon::join(|| self.reduce(left, a, base), || self.reduce(right, b, cut));
        let mut region = Region { parent, base };
        ca + cb + merge_junction(&mut region, self.img, self.conn, self.split.bands()[*mid].0)
    }
}

/// Connects every neighbor pair straddling the boundary above `row`.
fn merge_junction(region: &mut Region<'_>, img: &Image2D, conn: Connectivity, row: usize) -> usize {
    let w = img.width();
    let values = img.values();
    let mut count = 0;
    for c in 0..w {
        let p = (row - 1) * w + c;
        let below = row * w + c;
        match conn {
            Connectivity::C4 => {
                region.connect(values, p, below);
                count += 1;
            }
            Connectivity::C8 => {
                let lo = c.saturating_sub(1);
                let hi = (c + 1).min(w - 1);
                for cc in lo..=hi {
                    region.connect(values, p, row * w + cc);
                    count += 1;
                }
            }
        }
    }
    count
}

/// Parent image of one band with band-local indices; no `S`, no
/// canonization.
fn build_band(view: ImageView<'_>, conn: Connectivity, algo: Algorithm, parent: &mut [usize]) {
    let mut times = PhaseTimes::default();
    match algo {
        Algorithm::Uf => {
            uf_parent(view, conn, parent, &mut times, |_, _, _| {});
        }
        Algorithm::UfRank => {
            uf_rank_parent(view, conn, parent, &mut times, |_, _, _| {});
        }
        Algorithm::UfLevelcomp => {
            if LevelCompression::Auto.enabled_for(view.bit_depth) {
                uf_levelcomp_parent(view, conn, parent, false, &mut times);
            } else {
                uf_parent(view, conn, parent, &mut times, |_, _, _| {});
            }
        }
        Algorithm::Salembier => {
            salembier_parent(view, conn, parent, None);
        }
        Algorithm::Nonrec => {
            nonrec_parent(view, conn, QueueBackend::for_bits(view.bit_depth), parent, None, false);
        }
        Algorithm::Parallel => unreachable!("rejected before mapping"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{normalize, validate};
    use crate::unionfind::maxtree_uf;

    fn img(w: usize, h: usize, bits: u32, v: &[u32]) -> Image2D {
        Image2D::new(w, h, bits, v.to_vec()).unwrap()
    }

    #[test]
    fn split_covers_rows() {
        let s = DomainSplit::even(10, 3).unwrap();
        assert_eq!(s.bands(), &[(0, 3), (3, 6), (6, 10)]);
        assert_eq!(DomainSplit::even(2, 7).unwrap().len(), 2);
        assert!(DomainSplit::even(5, 0).is_err());
    }

    #[test]
    fn plan_is_balanced() {
        let p = MergePlan::balanced(5);
        assert_eq!(p.merges(), 4);
        assert_eq!(p.depth(), 3);
        assert_eq!(p.bands(), 0..5);
        assert_eq!(MergePlan::balanced(1), MergePlan::Leaf(0));
        assert_eq!(MergePlan::balanced(8).depth(), 3);
    }

    #[test]
    fn findrepr_climbs_flat_chain() {
        let im = img(4, 1, 4, &[1, 2, 2, 2]);
        let mut parent = vec![0, 0, 1, 2];
        assert_eq!(findrepr(&mut parent, &im, 3), 1);
        assert_eq!(parent, vec![0, 0, 1, 1]);
        assert_eq!(findrepr(&mut parent, &im, 1), 1);
        assert_eq!(findrepr(&mut parent, &im, 0), 0);
    }

    #[test]
    fn findrepr_stops_at_flat_root() {
        let im = img(3, 1, 4, &[5, 5, 5]);
        let mut parent = vec![0, 0, 1];
        assert_eq!(findrepr(&mut parent, &im, 2), 0);
    }

    #[test]
    fn connect_hand_trace() {
        // rows [1,2] and [4,3]: band trees {0 <- 1} and {3 <- 2}
        let im = img(2, 2, 4, &[1, 2, 4, 3]);
        let mut parent = vec![0, 0, 3, 3];
        connect(&mut parent, &im, 0, 2);
        connect(&mut parent, &im, 1, 3);
        let t = canonize_rebuild_s_values(im.values(), parent).unwrap();
        assert!(validate(&im, &t).is_ok());
        let nt = normalize(&im, &t).unwrap();
        assert_eq!(nt.num_nodes(), 4);
        assert_eq!(nt, normalize(&im, &maxtree_uf(&im, Connectivity::C4)).unwrap());
    }

    #[test]
    fn connect_same_component_is_noop() {
        let im = img(2, 1, 4, &[3, 3]);
        let mut parent = vec![0, 0];
        connect(&mut parent, &im, 0, 1);
        assert_eq!(parent, vec![0, 0]);
    }

    #[test]
    fn all_bases_and_band_counts_agree() {
        let im = crate::synth::flat_zones(9, 11, 8, 4, 3);
        let want = normalize(&im, &maxtree_uf(&im, Connectivity::C8)).unwrap();
        for base in Algorithm::SEQUENTIAL {
            for bands in [1, 2, 3, 4, 7, 11, 20] {
                for conn in [Connectivity::C4, Connectivity::C8] {
                    let t = maxtree_parallel(&im, conn, base, bands, 2).unwrap();
                    assert!(validate(&im, &t).is_ok(), "{base:?} {bands}");
                    if conn == Connectivity::C8 {
                        assert_eq!(normalize(&im, &t).unwrap(), want, "{base:?} {bands}");
                    }
                }
            }
        }
    }

    #[test]
    fn junction_pairs_counted_once() {
        let im = crate::synth::uniform(6, 8, 4, 1);
        let mut times = PhaseTimes::default();
        let (_, c4) = run(&im, Connectivity::C4, Algorithm::Uf, 4, 1, &mut times).unwrap();
        assert_eq!(c4, 3 * 6);
        let (_, c8) = run(&im, Connectivity::C8, Algorithm::Uf, 4, 1, &mut times).unwrap();
        assert_eq!(c8, 3 * (3 * 6 - 2));
        assert!(times.build.is_some() && times.merge.is_some() && times.canonize.is_some());
        assert!(times.sort.is_none());
    }

    #[test]
    fn rejects_bad_bases() {
        let im = img(1, 2, 20, &[0, 1]);
        assert!(matches!(maxtree_parallel(&im, Connectivity::C4, Algorithm::Parallel, 2, 1), Err(Error::Domain(_))));
        assert!(matches!(
            maxtree_parallel(&im, Connectivity::C4, Algorithm::Salembier, 2, 1),
            Err(Error::Unsupported(_))
        ));
        assert!(maxtree_parallel(&im, Connectivity::C4, Algorithm::Nonrec, 2, 1).is_ok());
    }
}
