//! Per-phase wall-clock accounting for the builders.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Sort,
    Build,
    Merge,
    CanonizeS,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::Sort, Phase::Build, Phase::Merge, Phase::CanonizeS];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Sort => "sort",
            Phase::Build => "build",
            Phase::Merge => "merge",
            Phase::CanonizeS => "canonize+S",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accumulated time per phase; `None` when a builder has no such phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimes {
    pub sort: Option<Duration>,
    pub build: Option<Duration>,
    pub merge: Option<Duration>,
    pub canonize: Option<Duration>,
}

impl PhaseTimes {
    pub fn get(&self, phase: Phase) -> Option<Duration> {
        match phase {
            Phase::Sort => self.sort,
            Phase::Build => self.build,
            Phase::Merge => self.merge,
            Phase::CanonizeS => self.canonize,
        }
    }

    /// Phases this run reported, in pipeline order.
    pub fn recorded(&self) -> Vec<(Phase, Duration)> {
        Phase::ALL.iter().filter_map(|&ph| self.get(ph).map(|d| (ph, d))).collect()
    }

    pub fn sum(&self) -> Duration {
        self.recorded().iter().map(|(_, d)| *d).sum()
    }
}

/// Runs `f`, adding its wall time to `slot`.
#[inline]
pub fn timed<T>(slot: &mut Option<Duration>, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = Some(slot.unwrap_or_default() + start.elapsed());
    out
}
