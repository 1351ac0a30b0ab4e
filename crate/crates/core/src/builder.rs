//! Uniform entry point over every builder.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flooding::{maxtree_nonrec_timed, maxtree_salembier_timed, QueueBackend};
use crate::image::{Connectivity, Image2D};
use crate::parallel::maxtree_parallel_timed;
use crate::timing::PhaseTimes;
use crate::tree::MaxTree;
use crate::unionfind::{maxtree_uf_levelcomp_timed, maxtree_uf_rank_timed, maxtree_uf_timed, LevelCompression};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Uf,
    UfRank,
    UfLevelcomp,
    Salembier,
    Nonrec,
    Parallel,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Uf,
        Algorithm::UfRank,
        Algorithm::UfLevelcomp,
        Algorithm::Salembier,
        Algorithm::Nonrec,
        Algorithm::Parallel,
    ];

    pub const SEQUENTIAL: [Algorithm; 5] =
        [Algorithm::Uf, Algorithm::UfRank, Algorithm::UfLevelcomp, Algorithm::Salembier, Algorithm::Nonrec];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Uf => "uf",
            Algorithm::UfRank => "uf_rank",
            Algorithm::UfLevelcomp => "uf_levelcomp",
            Algorithm::Salembier => "salembier",
            Algorithm::Nonrec => "nonrec",
            Algorithm::Parallel => "parallel",
        }
    }

    /// Whether the algorithm can handle images of this bit depth.
    pub fn supports(self, bit_depth: u32) -> bool {
        self != Algorithm::Salembier || QueueBackend::for_bits(bit_depth) == QueueBackend::Bucketed
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.id() == s).ok_or_else(|| {
            let ids: Vec<_> = Algorithm::ALL.iter().map(|a| a.id()).collect();
            Error::Domain(format!("unknown algorithm {s:?} (expected one of {})", ids.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub conn: Connectivity,
    /// Sequential algorithm run on each band by [`Algorithm::Parallel`].
    pub base: Algorithm,
    pub bands: usize,
    /// Thread cap for the parallel builder; 0 means all cores.
    pub workers: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { conn: Connectivity::C4, base: Algorithm::UfLevelcomp, bands: 4, workers: 0 }
    }
}

pub fn build(img: &Image2D, algo: Algorithm, opts: &BuildOptions) -> Result<MaxTree> {
    build_timed(img, algo, opts, &mut PhaseTimes::default())
}

pub fn build_timed(img: &Image2D, algo: Algorithm, opts: &BuildOptions, times: &mut PhaseTimes) -> Result<MaxTree> {
    let conn = opts.conn;
    Ok(match algo {
        Algorithm::Uf => maxtree_uf_timed(img, conn, times),
        Algorithm::UfRank => maxtree_uf_rank_timed(img, conn, times),
        Algorithm::UfLevelcomp => maxtree_uf_levelcomp_timed(img, conn, LevelCompression::Auto, times),
        Algorithm::Salembier => maxtree_salembier_timed(img, conn, times)?,
        Algorithm::Nonrec => maxtree_nonrec_timed(img, conn, QueueBackend::for_bits(img.bit_depth()), times)?,
        Algorithm::Parallel => maxtree_parallel_timed(img, conn, opts.base, opts.bands, opts.workers, times)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("quick".parse::<Algorithm>().is_err());
    }

    #[test]
    fn support_matrix() {
        assert!(Algorithm::Salembier.supports(17));
        assert!(!Algorithm::Salembier.supports(18));
        assert!(Algorithm::Nonrec.supports(32));
    }

    #[test]
    fn build_dispatches_every_algorithm() {
        let im = Image2D::new(2, 2, 8, vec![1, 2, 4, 3]).unwrap();
        let opts = BuildOptions { bands: 2, workers: 1, ..Default::default() };
        for a in Algorithm::ALL {
            let t = build(&im, a, &opts).unwrap();
            assert_eq!(t.node_count(&im), 4, "{a}");
        }
    }
}
