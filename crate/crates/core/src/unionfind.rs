//! Immersion builders: pixels are processed from the highest level down and
//! merged into growing peak components with a union-find forest (`zpar`)
//! kept separate from the tree itself (`parent`).
//!
//! Three variants: plain path compression, union-by-rank (with a `repr`
//! link from each `zpar` root to the current node root in `parent`), and
//! level compression, which keeps the existing root when two components of
//! the same flat zone merge and rebuilds `S` as pixels get attached.

use std::mem;

use crate::image::{Connectivity, Image2D, ImageView};
use crate::sort::{sort_values, SORT_SWITCH_BITS};
use crate::timing::{timed, PhaseTimes};
use crate::tree::{canonize_values, MaxTree};
use crate::UNPROCESSED;

/// Whether [`maxtree_uf_levelcomp_with`] merges flat zones with level
/// compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelCompression {
    /// Enabled below [`SORT_SWITCH_BITS`], where flat zones are common.
    #[default]
    Auto,
    On,
    Off,
}

impl LevelCompression {
    pub fn enabled_for(self, bit_depth: u32) -> bool {
        match self {
            LevelCompression::Auto => bit_depth < SORT_SWITCH_BITS,
            LevelCompression::On => true,
            LevelCompression::Off => false,
        }
    }
}

/// Scratch state of the union-by-rank builder.
#[derive(Debug, Clone)]
pub struct UfScratch {
    pub zpar: Vec<usize>,
    pub rank: Vec<u8>,
    pub repr: Vec<usize>,
}

impl UfScratch {
    fn new(n: usize) -> Self {
        UfScratch { zpar: vec![0; n], rank: vec![0; n], repr: vec![0; n] }
    }
}

/// Returns the root of `p` in `zpar`, pointing every pixel on the way
/// directly at it.
#[inline]
pub fn find_root(zpar: &mut [usize], p: usize) -> usize {
    let mut root = p;
    while zpar[root] != root {
        root = zpar[root];
    }
    let mut x = p;
    while zpar[x] != root {
        let next = zpar[x];
        zpar[x] = root;
        x = next;
    }
    root
}

/// Union-find with path compression only.
pub fn maxtree_uf(img: &Image2D, conn: Connectivity) -> MaxTree {
    maxtree_uf_timed(img, conn, &mut PhaseTimes::default())
}

pub fn maxtree_uf_timed(img: &Image2D, conn: Connectivity, times: &mut PhaseTimes) -> MaxTree {
    let mut parent = vec![0; img.len()];
    let s = uf_parent(img.view(), conn, &mut parent, times, |_, _, _| {});
    timed(&mut times.canonize, || canonize_values(img.values(), &mut parent, &s));
    MaxTree { parent, s }
}

/// Union-find with path compression and union-by-rank.
pub fn maxtree_uf_rank(img: &Image2D, conn: Connectivity) -> MaxTree {
    maxtree_uf_rank_timed(img, conn, &mut PhaseTimes::default())
}

pub fn maxtree_uf_rank_timed(img: &Image2D, conn: Connectivity, times: &mut PhaseTimes) -> MaxTree {
    let mut parent = vec![0; img.len()];
    let s = uf_rank_parent(img.view(), conn, &mut parent, times, |_, _, _| {});
    timed(&mut times.canonize, || canonize_values(img.values(), &mut parent, &s));
    MaxTree { parent, s }
}

/// Union-find with level compression, enabled below [`SORT_SWITCH_BITS`].
pub fn maxtree_uf_levelcomp(img: &Image2D, conn: Connectivity) -> MaxTree {
    maxtree_uf_levelcomp_with(img, conn, LevelCompression::Auto)
}

pub fn maxtree_uf_levelcomp_with(img: &Image2D, conn: Connectivity, mode: LevelCompression) -> MaxTree {
    maxtree_uf_levelcomp_timed(img, conn, mode, &mut PhaseTimes::default())
}

pub fn maxtree_uf_levelcomp_timed(
    img: &Image2D,
    conn: Connectivity,
    mode: LevelCompression,
    times: &mut PhaseTimes,
) -> MaxTree {
    if !mode.enabled_for(img.bit_depth()) {
        return maxtree_uf_timed(img, conn, times);
    }
    let mut parent = vec![0; img.len()];
    let s = uf_levelcomp_parent(img.view(), conn, &mut parent, true, times);
    timed(&mut times.canonize, || canonize_values(img.values(), &mut parent, &s));
    MaxTree { parent, s }
}

/// Plain union-find over `view`, writing band-local links into `parent`.
/// Returns the increasing sort order, which is a valid `S` for the
/// (not yet canonized) result. `observe(step, parent, zpar)` runs after
/// each processed pixel.
pub(crate) fn uf_parent<F>(
    view: ImageView<'_>,
    conn: Connectivity,
    parent: &mut [usize],
    times: &mut PhaseTimes,
    mut observe: F,
) -> Vec<usize>
where
    F: FnMut(usize, &[usize], &[usize]),
{
    let n = view.len();
    let s = timed(&mut times.sort, || sort_values(view.values, view.bit_depth, SORT_SWITCH_BITS));
    timed(&mut times.build, || {
        let nbh = view.neighborhood(conn);
        let mut nbrs = [0usize; 8];
        parent.fill(UNPROCESSED);
        let mut zpar = vec![0usize; n];
        for (step, &p) in s.iter().rev().enumerate() {
            parent[p] = p;
            zpar[p] = p;
            let k = nbh.fill(p, &mut nbrs);
            for &q in &nbrs[..k] {
                if parent[q] != UNPROCESSED {
                    let r = find_root(&mut zpar, q);
                    if r != p {
                        zpar[r] = p;
                        parent[r] = p;
                    }
                }
            }
            observe(step, parent, &zpar);
        }
    });
    s
}

pub(crate) fn uf_rank_parent<F>(
    view: ImageView<'_>,
    conn: Connectivity,
    parent: &mut [usize],
    times: &mut PhaseTimes,
    mut observe: F,
) -> Vec<usize>
where
    F: FnMut(usize, &[usize], &UfScratch),
{
    let n = view.len();
    let s = timed(&mut times.sort, || sort_values(view.values, view.bit_depth, SORT_SWITCH_BITS));
    timed(&mut times.build, || {
        let nbh = view.neighborhood(conn);
        let mut nbrs = [0usize; 8];
        parent.fill(UNPROCESSED);
        let mut uf = UfScratch::new(n);
        for (step, &p) in s.iter().rev().enumerate() {
            parent[p] = p;
            uf.zpar[p] = p;
            uf.rank[p] = 0;
            uf.repr[p] = p;
            let mut zp = p;
            let k = nbh.fill(p, &mut nbrs);
            for &q in &nbrs[..k] {
                if parent[q] == UNPROCESSED {
                    continue;
                }
                let mut zn = find_root(&mut uf.zpar, q);
                if zn != zp {
                    parent[uf.repr[zn]] = p;
                    if uf.rank[zp] < uf.rank[zn] {
                        mem::swap(&mut zp, &mut zn);
                    }
                    uf.zpar[zn] = zp;
                    uf.repr[zp] = p;
                    if uf.rank[zp] == uf.rank[zn] {
                        uf.rank[zp] += 1;
                    }
                }
            }
            observe(step, parent, &uf);
        }
    });
    s
}

/// Level-compression union-find. When `build_s` is false the returned
/// vector is the sort order, partially overwritten, and must not be used as
/// `S` (the parallel builder recomputes `S` anyway).
pub(crate) fn uf_levelcomp_parent(
    view: ImageView<'_>,
    conn: Connectivity,
    parent: &mut [usize],
    build_s: bool,
    times: &mut PhaseTimes,
) -> Vec<usize> {
    let n = view.len();
    let values = view.values;
    let mut s = timed(&mut times.sort, || sort_values(values, view.bit_depth, SORT_SWITCH_BITS));
    timed(&mut times.build, || {
        let nbh = view.neighborhood(conn);
        let mut nbrs = [0usize; 8];
        parent.fill(UNPROCESSED);
        let mut zpar = vec![0usize; n];
        // S is refilled from the back as pixels get attached; writes always
        // land beyond the slot being read.
        let mut j = n;
        let mut zp = 0;
        for i in (0..n).rev() {
            let p = s[i];
            parent[p] = p;
            zpar[p] = p;
            zp = p;
            let k = nbh.fill(p, &mut nbrs);
            for &q in &nbrs[..k] {
                if parent[q] == UNPROCESSED {
                    continue;
                }
                let mut zn = find_root(&mut zpar, q);
                if zn != zp {
                    if values[zp] == values[zn] {
                        mem::swap(&mut zp, &mut zn);
                    }
                    zpar[zn] = zp;
                    parent[zn] = zp;
                    if build_s {
                        j -= 1;
                        s[j] = zn;
                    }
                }
            }
        }
        // the last pixel processed ends inside the root's component
        if build_s {
            debug_assert_eq!(j, 1);
            s[0] = zp;
        }
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{normalize, validate};

    fn img(w: usize, h: usize, bits: u32, v: &[u32]) -> Image2D {
        Image2D::new(w, h, bits, v.to_vec()).unwrap()
    }

    #[test]
    fn find_root_compresses() {
        let mut zpar = vec![0, 0, 1];
        assert_eq!(find_root(&mut zpar, 2), 0);
        assert_eq!(zpar, vec![0, 0, 0]);
        // compressed: one hop from 2 to the root
        assert_eq!(zpar[2], 0);
        let mut single = vec![0];
        assert_eq!(find_root(&mut single, 0), 0);
    }

    #[test]
    fn uf_hand_traced() {
        let im = img(3, 1, 8, &[1, 3, 2]);
        let t = maxtree_uf(&im, Connectivity::C4);
        assert_eq!(t.parent, vec![0, 2, 0]);
        assert_eq!(t.s, vec![0, 2, 1]);
    }

    #[test]
    fn uf_constant_root_is_first_pixel() {
        let im = img(2, 2, 8, &[9; 4]);
        let t = maxtree_uf(&im, Connectivity::C4);
        assert_eq!(t.parent, vec![0; 4]);
        assert_eq!(t.root(), 0);
    }

    #[test]
    fn variants_agree_on_small_images() {
        let cases: [(usize, usize, &[u32]); 4] =
            [(3, 1, &[1, 3, 2]), (2, 2, &[1, 2, 4, 3]), (4, 1, &[6, 6, 6, 6]), (3, 3, &[2, 2, 1, 0, 2, 3, 3, 2, 2])];
        for (w, h, v) in cases {
            let im = img(w, h, 8, v);
            for conn in [Connectivity::C4, Connectivity::C8] {
                let a = maxtree_uf(&im, conn);
                let b = maxtree_uf_rank(&im, conn);
                let c = maxtree_uf_levelcomp(&im, conn);
                for t in [&a, &b, &c] {
                    assert!(validate(&im, t).is_ok(), "{v:?}: {}", validate(&im, t));
                }
                let na = normalize(&im, &a).unwrap();
                assert_eq!(na, normalize(&im, &b).unwrap());
                assert_eq!(na, normalize(&im, &c).unwrap());
            }
        }
    }

    #[test]
    fn levelcomp_constant_line() {
        let im = img(4, 1, 8, &[3; 4]);
        let t = maxtree_uf_levelcomp(&im, Connectivity::C4);
        assert!(validate(&im, &t).is_ok());
        assert_eq!(t.node_count(&im), 1);
        assert_eq!(t.parent[t.s[0]], t.s[0]);
        // flat zone keeps the first processed pixel as its root
        assert_eq!(t.s[0], 3);
    }

    #[test]
    fn levelcomp_switches_off_for_wide_values() {
        let im = img(3, 1, 20, &[5, 5, 1 << 19]);
        assert!(!LevelCompression::Auto.enabled_for(20));
        assert_eq!(maxtree_uf_levelcomp(&im, Connectivity::C4), maxtree_uf(&im, Connectivity::C4));
        let forced = maxtree_uf_levelcomp_with(&im, Connectivity::C4, LevelCompression::On);
        assert!(validate(&im, &forced).is_ok());
        assert_eq!(normalize(&im, &forced).unwrap(), normalize(&im, &maxtree_uf(&im, Connectivity::C4)).unwrap());
    }

    #[test]
    fn rank_stays_logarithmic() {
        let im = crate::synth::flat_zones(40, 40, 8, 3, 1);
        let mut times = PhaseTimes::default();
        let mut parent = vec![0; im.len()];
        let mut worst = 0u8;
        let mut last = None;
        uf_rank_parent(im.view(), Connectivity::C8, &mut parent, &mut times, |_, _, uf| {
            worst = worst.max(uf.rank.iter().copied().max().unwrap_or(0));
            last = Some(uf.clone());
        });
        assert!((worst as f64) <= (im.len() as f64).log2());
        // after the final merge every pixel is one find away from the root
        let mut uf = last.unwrap();
        let root = find_root(&mut uf.zpar, 0);
        for p in 0..im.len() {
            find_root(&mut uf.zpar, p);
            assert_eq!(uf.zpar[p], root);
        }
    }

    /// Connected components of the processed pixels, by flood fill.
    fn processed_components(im: &Image2D, conn: Connectivity, parent: &[usize]) -> Vec<usize> {
        let mut label = vec![usize::MAX; im.len()];
        for start in 0..im.len() {
            if parent[start] == UNPROCESSED || label[start] != usize::MAX {
                continue;
            }
            label[start] = start;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for q in im.neighbors(x, conn).unwrap() {
                    if parent[q] != UNPROCESSED && label[q] == usize::MAX {
                        label[q] = start;
                        stack.push(q);
                    }
                }
            }
        }
        label
    }

    fn read_root(zpar: &[usize], mut p: usize) -> usize {
        while zpar[p] != p {
            p = zpar[p];
        }
        p
    }

    #[test]
    fn zpar_tracks_peak_components_at_every_step() {
        for seed in 0..40 {
            let im = crate::synth::uniform(4, 4, 2, seed);
            for conn in [Connectivity::C4, Connectivity::C8] {
                let mut times = PhaseTimes::default();
                let mut parent = vec![0; im.len()];
                let check = |zpar: &[usize], parent: &[usize]| {
                    let label = processed_components(&im, conn, parent);
                    for p in (0..im.len()).filter(|&p| parent[p] != UNPROCESSED) {
                        for q in (0..im.len()).filter(|&q| parent[q] != UNPROCESSED) {
                            let same_set = read_root(zpar, p) == read_root(zpar, q);
                            assert_eq!(same_set, label[p] == label[q], "seed {seed} pixels {p} {q}");
                        }
                    }
                };
                uf_parent(im.view(), conn, &mut parent, &mut times, |_, parent, zpar| check(zpar, parent));
                uf_rank_parent(im.view(), conn, &mut parent, &mut times, |_, parent, uf| check(&uf.zpar, parent));
            }
        }
    }
}
