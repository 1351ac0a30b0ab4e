//! Flooding builders. Propagation always continues from the highest pixel
//! in the front, so peak components are completed depth-first and `S` can
//! be filled from the back as pixels receive their parent.
//!
//! [`maxtree_salembier`] is the recursive formulation (a `levroot` array
//! indexed by level, hierarchical queue), run on an explicit frame stack.
//! [`maxtree_nonrec`] keeps level roots on a stack and re-enters the loop
//! whenever a higher neighbor is found.

mod queue;

pub use queue::{HeapQueue, HierarchicalQueue, QueueBackend};

use queue::MaxQueue;

use crate::error::{Error, Result};
use crate::image::{Connectivity, Image2D, ImageView};
use crate::sort::SORT_SWITCH_BITS;
use crate::timing::{timed, PhaseTimes};
use crate::tree::MaxTree;
use crate::{INQUEUE, UNPROCESSED};

const NONE: usize = usize::MAX;

/// Counters collected during a flood.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct FloodStats {
    pub pushes: usize,
    pub pops: usize,
    /// Level-root stack was strictly increasing at every stack unwinding.
    pub stack_monotone: bool,
    pub process_stack_calls: usize,
}

/// Fills `S` from the back.
struct FrontInserter<'a> {
    s: Option<&'a mut [usize]>,
    front: usize,
}

impl FrontInserter<'_> {
    #[inline]
    fn insert(&mut self, p: usize) {
        if let Some(s) = self.s.as_deref_mut() {
            self.front -= 1;
            s[self.front] = p;
        }
    }
}

fn check_bucketed(bits: u32) -> Result<()> {
    if bits >= SORT_SWITCH_BITS {
        return Err(Error::Unsupported(format!(
            "hierarchical queues need fewer than {SORT_SWITCH_BITS} bits, image has {bits}; \
             use maxtree_nonrec (heap backend) instead"
        )));
    }
    Ok(())
}

/// Recursive hierarchical-queue flooding. Requires fewer than
/// [`SORT_SWITCH_BITS`] bits per pixel.
pub fn maxtree_salembier(img: &Image2D, conn: Connectivity) -> Result<MaxTree> {
    maxtree_salembier_timed(img, conn, &mut PhaseTimes::default())
}

pub fn maxtree_salembier_timed(img: &Image2D, conn: Connectivity, times: &mut PhaseTimes) -> Result<MaxTree> {
    check_bucketed(img.bit_depth())?;
    let n = img.len();
    let mut parent = vec![0; n];
    let mut s = vec![0; n];
    timed(&mut times.build, || salembier_parent(img.view(), conn, &mut parent, Some(&mut s)));
    Ok(MaxTree { parent, s })
}

/// Non-recursive flooding on the queue backend suited to the bit depth.
pub fn maxtree_nonrec(img: &Image2D, conn: Connectivity) -> MaxTree {
    maxtree_nonrec_timed(img, conn, QueueBackend::for_bits(img.bit_depth()), &mut PhaseTimes::default())
        .expect("automatic backend always fits")
}

pub fn maxtree_nonrec_with(img: &Image2D, conn: Connectivity, backend: QueueBackend) -> Result<MaxTree> {
    maxtree_nonrec_timed(img, conn, backend, &mut PhaseTimes::default())
}

pub fn maxtree_nonrec_timed(
    img: &Image2D,
    conn: Connectivity,
    backend: QueueBackend,
    times: &mut PhaseTimes,
) -> Result<MaxTree> {
    if backend == QueueBackend::Bucketed {
        check_bucketed(img.bit_depth())?;
    }
    let n = img.len();
    let mut parent = vec![0; n];
    let mut s = vec![0; n];
    timed(&mut times.build, || nonrec_parent(img.view(), conn, backend, &mut parent, Some(&mut s), false));
    Ok(MaxTree { parent, s })
}

struct Frame {
    level: usize,
    root: usize,
    active: bool,
    nbrs: [usize; 8],
    count: usize,
    next: usize,
}

impl Frame {
    fn new(level: usize, root: usize) -> Self {
        Frame { level, root, active: false, nbrs: [0; 8], count: 0, next: 0 }
    }
}

/// Recursive flooding with the recursion unrolled onto `frames`. Each frame
/// is one `flood(level, root)` call; a child's returned parent level is
/// handled by its caller exactly as the `while l > level` loop would.
pub(crate) fn salembier_parent(
    view: ImageView<'_>,
    conn: Connectivity,
    parent: &mut [usize],
    s: Option<&mut [usize]>,
) -> FloodStats {
    let values = view.values;
    let n = view.len();
    let nbh = view.neighborhood(conn);
    let mut out = FrontInserter { s, front: n };
    parent.fill(UNPROCESSED);
    let mut hq = HierarchicalQueue::with_histogram(values, view.bit_depth);
    let mut levroot = vec![NONE; 1usize << view.bit_depth];

    let (p_min, l_min) = values
        .iter()
        .enumerate()
        .min_by_key(|&(p, &v)| (v, p))
        .map(|(p, &v)| (p, v as usize))
        .expect("non-empty image");
    hq.push_level(l_min, p_min);
    parent[p_min] = INQUEUE;
    levroot[l_min] = p_min;

    let mut frames = vec![Frame::new(l_min, p_min)];
    'flood: while let Some(f) = frames.last_mut() {
        if f.active {
            while f.next < f.count {
                let q = f.nbrs[f.next];
                f.next += 1;
                if parent[q] != UNPROCESSED {
                    continue;
                }
                let l = values[q] as usize;
                if levroot[l] == NONE {
                    levroot[l] = q;
                }
                hq.push_level(l, q);
                parent[q] = INQUEUE;
                if l > f.level {
                    let r = levroot[l];
                    frames.push(Frame::new(l, r));
                    continue 'flood;
                }
            }
            f.active = false;
        }
        if let Some(p) = hq.pop_level(f.level) {
            parent[p] = f.root;
            if p != f.root {
                out.insert(p);
            }
            f.count = nbh.fill(p, &mut f.nbrs);
            f.next = 0;
            f.active = true;
            continue;
        }

        // level exhausted: attach the node to its parent
        let (level, r) = (f.level, f.root);
        levroot[level] = NONE;
        let lpar = (0..level).rev().find(|&h| levroot[h] != NONE);
        if let Some(h) = lpar {
            parent[r] = levroot[h];
        }
        out.insert(r);
        frames.pop();
        if let (Some(h), Some(caller)) = (lpar, frames.last()) {
            if h > caller.level {
                frames.push(Frame::new(h, levroot[h]));
            }
        }
    }
    let (pushes, pops) = hq.counters();
    FloodStats { pushes, pops, stack_monotone: true, process_stack_calls: 0 }
}

pub(crate) fn nonrec_parent(
    view: ImageView<'_>,
    conn: Connectivity,
    backend: QueueBackend,
    parent: &mut [usize],
    s: Option<&mut [usize]>,
    check_stack: bool,
) -> FloodStats {
    match backend {
        QueueBackend::Bucketed => {
            let q = HierarchicalQueue::with_histogram(view.values, view.bit_depth);
            nonrec_with_queue(view, conn, q, parent, s, check_stack)
        }
        QueueBackend::Heap => {
            let q = HeapQueue::with_capacity(view.len());
            nonrec_with_queue(view, conn, q, parent, s, check_stack)
        }
    }
}

fn nonrec_with_queue<Q: MaxQueue>(
    view: ImageView<'_>,
    conn: Connectivity,
    mut pq: Q,
    parent: &mut [usize],
    s: Option<&mut [usize]>,
    check_stack: bool,
) -> FloodStats {
    let values = view.values;
    let nbh = view.neighborhood(conn);
    let mut out = FrontInserter { s, front: view.len() };
    let mut nbrs = [0usize; 8];
    let mut stats = FloodStats { stack_monotone: true, ..Default::default() };
    parent.fill(UNPROCESSED);

    let start = 0;
    let mut levroot = vec![start];
    pq.push(start, values[start]);
    parent[start] = INQUEUE;

    'flood: loop {
        let p = pq.top().expect("front is never empty inside the loop");
        let r = *levroot.last().expect("level-root stack is never empty inside the loop");
        let k = nbh.fill(p, &mut nbrs);
        for &q in &nbrs[..k] {
            if parent[q] != UNPROCESSED {
                continue;
            }
            pq.push(q, values[q]);
            parent[q] = INQUEUE;
            if values[p] < values[q] {
                levroot.push(q);
                continue 'flood;
            }
        }

        // p is done
        pq.pop();
        parent[p] = r;
        if p != r {
            out.insert(p);
        }
        let Some(q) = pq.top() else { break };
        if values[q] != values[r] {
            if check_stack {
                stats.stack_monotone &= levroot.windows(2).all(|w| values[w[0]] < values[w[1]]);
            }
            stats.process_stack_calls += 1;
            process_stack(values, parent, &mut levroot, &mut out, r, q);
        }
    }

    let mut r = levroot.pop().expect("root remains on the stack");
    while let Some(t) = levroot.pop() {
        parent[r] = t;
        out.insert(r);
        r = t;
    }
    parent[r] = r;
    out.insert(r);

    let (pushes, pops) = pq.counters();
    stats.pushes = pushes;
    stats.pops = pops;
    stats
}

/// Closes every level root above the level of `q` and links `r`'s node to
/// the next one down, pushing `q` as a new level root when its level has
/// none on the stack.
fn process_stack(
    values: &[u32],
    parent: &mut [usize],
    levroot: &mut Vec<usize>,
    out: &mut FrontInserter<'_>,
    mut r: usize,
    q: usize,
) {
    let level = values[q];
    levroot.pop();
    while let Some(&top) = levroot.last() {
        if level >= values[top] {
            break;
        }
        out.insert(r);
        levroot.pop();
        parent[r] = top;
        r = top;
    }
    if levroot.last().is_none_or(|&top| values[top] != level) {
        levroot.push(q);
    }
    parent[r] = *levroot.last().expect("just ensured non-empty");
    out.insert(r);
}
