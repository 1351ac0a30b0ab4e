//! Max-tree construction for 2D gray-level images.
//!
//! Every builder returns a [`MaxTree`]: a `parent` image whose links always
//! point at a node's canonical pixel, plus an array `S` listing pixels so
//! that parents come before children. Builders differ in strategy:
//! union-find immersion ([`maxtree_uf`], [`maxtree_uf_rank`],
//! [`maxtree_uf_levelcomp`]), flooding ([`maxtree_salembier`],
//! [`maxtree_nonrec`]), and a map-reduce combination over row bands
//! ([`maxtree_parallel`]).
//!
//! ```
//! use maxtree::{compute_attribute, direct_filter, maxtree_uf_rank, Area, Connectivity, Image2D};
//!
//! let img = Image2D::new(2, 2, 8, vec![1, 2, 4, 3]).unwrap();
//! let tree = maxtree_uf_rank(&img, Connectivity::C4);
//! assert_eq!(tree.node_count(&img), 4);
//!
//! let area = compute_attribute(&tree, &img, &Area).unwrap();
//! let opened = direct_filter(&tree, &img, &area, &2).unwrap();
//! assert_eq!(opened.values(), &[1, 2, 3, 3]);
//! ```

pub mod attributes;
pub mod builder;
pub mod error;
pub mod flooding;
pub mod image;
pub mod oracle;
pub mod parallel;
pub mod recommend;
pub mod sort;
pub mod synth;
pub mod timing;
pub mod tree;
pub mod unionfind;

/// `parent` marker for pixels not reached yet.
pub(crate) const UNPROCESSED: usize = usize::MAX;
/// `parent` marker for pixels waiting in a flooding queue.
pub(crate) const INQUEUE: usize = usize::MAX - 1;

pub use attributes::{area_opening, compute_attribute, direct_filter, Area, Attribute, AttributeMap};
pub use builder::{build, build_timed, Algorithm, BuildOptions};
pub use error::{Error, Result};
pub use flooding::{maxtree_nonrec, maxtree_nonrec_with, maxtree_salembier, QueueBackend};
pub use image::{load_image, load_pgm, save_pgm, Connectivity, Image2D, ImageView};
pub use oracle::{brute_area_opening, brute_maxtree};
pub use parallel::{connect, findrepr, maxtree_parallel, DomainSplit, MergePlan};
pub use recommend::{recommend, Recommendation};
pub use sort::{counting_sort, radix_sort, sort_pixels, SortedPixels, SORT_SWITCH_BITS};
pub use timing::{Phase, PhaseTimes};
pub use tree::{
    canonize, canonize_rebuild_s, normalize, read_dump, validate, write_dump, MaxTree, NormalizedTree,
    ValidationReport, Violation,
};
pub use unionfind::{maxtree_uf, maxtree_uf_levelcomp, maxtree_uf_levelcomp_with, maxtree_uf_rank, LevelCompression};
