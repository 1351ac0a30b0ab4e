//! Brute-force ground truth built from explicit upper level sets.
//!
//! Deliberately independent from the builders: components are found by
//! breadth-first search at every distinct level, with a neighbor scan of its
//! own. Quadratic in the worst case; meant for small images.

use std::collections::{HashMap, VecDeque};

use crate::image::{Connectivity, Image2D};
use crate::tree::NormalizedTree;

const UNLABELED: u32 = u32::MAX;

/// Connected components of `{p : ima(p) >= level}`; returns per-pixel
/// labels and per-label sizes.
fn upper_components(img: &Image2D, conn: Connectivity, level: u32) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let offsets: &[(isize, isize)] = match conn {
        Connectivity::C4 => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
        Connectivity::C8 => &[(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)],
    };
    let vals = img.values();
    let mut label = vec![UNLABELED; vals.len()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..vals.len() {
        if vals[start] < level || label[start] != UNLABELED {
            continue;
        }
        let id = sizes.len() as u32;
        let mut size = 0;
        label[start] = id;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            size += 1;
            let (r, c) = ((p as isize) / w, (p as isize) % w);
            for &(dr, dc) in offsets {
                let (rr, cc) = (r + dr, c + dc);
                if rr < 0 || rr >= h || cc < 0 || cc >= w {
                    continue;
                }
                let q = (rr * w + cc) as usize;
                if vals[q] >= level && label[q] == UNLABELED {
                    label[q] = id;
                    queue.push_back(q);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

fn distinct_levels(img: &Image2D) -> Vec<u32> {
    let mut levels = img.values().to_vec();
    levels.sort_unstable();
    levels.dedup();
    levels
}

/// Max-tree of `img` by definition: a node is an upper component at level
/// λ holding at least one pixel of value λ; its parent is the node at the
/// highest lower level whose component strictly contains it.
pub fn brute_maxtree(img: &Image2D, conn: Connectivity) -> NormalizedTree {
    struct Node {
        level: u32,
        rep: usize,
        size: usize,
        parent: Option<usize>,
    }

    let vals = img.values();
    let n = vals.len();
    let mut nodes: Vec<Node> = Vec::new();
    let mut node_at = vec![usize::MAX; n];
    let mut pending: Vec<usize> = Vec::new();

    for &level in distinct_levels(img).iter().rev() {
        let (label, sizes) = upper_components(img, conn, level);
        let mut here: HashMap<u32, usize> = HashMap::new();
        for p in 0..n {
            if vals[p] == level {
                let next = nodes.len();
                let id = *here.entry(label[p]).or_insert(next);
                if id == next {
                    nodes.push(Node { level, rep: p, size: sizes[label[p] as usize], parent: None });
                }
                node_at[p] = id;
            }
        }
        pending.retain(|&child| {
            let l = label[nodes[child].rep];
            if sizes[l as usize] > nodes[child].size {
                let id = *here.get(&l).expect("a strictly larger component holds a pixel at its level");
                nodes[child].parent = Some(id);
                false
            } else {
                true
            }
        });
        pending.extend(here.values().copied());
    }
    assert_eq!(pending.len(), 1, "connected grid has one root");

    let mut id_of = vec![usize::MAX; nodes.len()];
    let mut order = Vec::new();
    let mut node_of = Vec::with_capacity(n);
    for &raw in &node_at {
        if id_of[raw] == usize::MAX {
            id_of[raw] = order.len();
            order.push(raw);
        }
        node_of.push(id_of[raw]);
    }
    let node_level = order.iter().map(|&raw| nodes[raw].level).collect();
    let node_parent = order.iter().map(|&raw| id_of[nodes[raw].parent.unwrap_or(raw)]).collect();
    NormalizedTree { node_of, node_level, node_parent }
}

/// Area opening by definition: each pixel takes the highest level
/// λ ≤ ima(p) at which its upper component has at least `threshold`
/// pixels, or 0 when there is none.
pub fn brute_area_opening(img: &Image2D, conn: Connectivity, threshold: u64) -> Image2D {
    let vals = img.values();
    let mut out = vec![0u32; vals.len()];
    for level in distinct_levels(img) {
        let (label, sizes) = upper_components(img, conn, level);
        for (p, &l) in label.iter().enumerate() {
            if l != UNLABELED && sizes[l as usize] as u64 >= threshold {
                out[p] = level;
            }
        }
    }
    Image2D::new(img.width(), img.height(), img.bit_depth(), out).expect("levels come from the input")
}
