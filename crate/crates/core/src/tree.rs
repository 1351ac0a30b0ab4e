//! The `(parent, S)` max-tree encoding.
//!
//! Every node is represented by one canonical pixel. `parent` links each
//! pixel to the canonical pixel of its own node (non-canonical pixels) or of
//! the parent node (canonical pixels); the root links to itself. `S` lists
//! all pixels so that a parent always comes before its children, which is
//! enough to traverse the tree both ways without child lists.

use std::fmt;
use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::image::Image2D;

/// Parent image plus top-down pixel ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxTree {
    pub parent: Vec<usize>,
    pub s: Vec<usize>,
}

impl MaxTree {
    pub fn new(parent: Vec<usize>, s: Vec<usize>) -> Self {
        MaxTree { parent, s }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// First element of `S`.
    pub fn root(&self) -> usize {
        self.s[0]
    }

    /// Number of nodes, i.e. canonical pixels.
    pub fn node_count(&self, ima: &Image2D) -> usize {
        let v = ima.values();
        (0..self.len()).filter(|&p| canonical_in(v, &self.parent, p)).count()
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self, ima: &Image2D) -> usize {
        let v = ima.values();
        let mut depth = vec![0usize; self.len()];
        let mut best = 0;
        for &p in &self.s {
            let q = self.parent[p];
            depth[p] = if q == p {
                1
            } else if v[q] < v[p] {
                depth[q] + 1
            } else {
                depth[q]
            };
            best = best.max(depth[p]);
        }
        best
    }
}

#[inline]
pub(crate) fn canonical_in(values: &[u32], parent: &[usize], p: usize) -> bool {
    let q = parent[p];
    q == p || values[q] < values[p]
}

/// True iff `p` is the root or its parent lies at a strictly lower level.
pub fn is_canonical(ima: &Image2D, tree: &MaxTree, p: usize) -> bool {
    canonical_in(ima.values(), &tree.parent, p)
}

/// A single broken invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Length { n: usize, parent_len: usize, s_len: usize },
    ParentOutOfRange { pixel: usize, parent: usize },
    NoRoot,
    ExtraRoot { pixel: usize },
    LevelIncrease { pixel: usize, parent: usize },
    NonCanonicalParent { pixel: usize, parent: usize },
    SNotPermutation { index: usize, pixel: usize },
    SRootNotFirst { first: usize },
    SOrder { pixel: usize, parent: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Length { n, parent_len, s_len } => {
                write!(f, "image has {n} pixels but parent has {parent_len} and S has {s_len}")
            }
            Violation::ParentOutOfRange { pixel, parent } => {
                write!(f, "pixel {pixel}: parent {parent} out of range")
            }
            Violation::NoRoot => write!(f, "no pixel is its own parent"),
            Violation::ExtraRoot { pixel } => write!(f, "pixel {pixel}: second self-parented root"),
            Violation::LevelIncrease { pixel, parent } => {
                write!(f, "pixel {pixel}: parent {parent} lies at a higher level")
            }
            Violation::NonCanonicalParent { pixel, parent } => {
                write!(f, "pixel {pixel}: parent {parent} is not canonical")
            }
            Violation::SNotPermutation { index, pixel } => {
                write!(f, "S[{index}] = {pixel} is out of range or repeated")
            }
            Violation::SRootNotFirst { first } => write!(f, "S[0] = {first} is not the root"),
            Violation::SOrder { pixel, parent } => {
                write!(f, "pixel {pixel} precedes its parent {parent} in S")
            }
        }
    }
}

/// Result of [`validate`]: every violation found, empty for a valid tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Pixels named by at least one violation.
    pub fn pixels(&self) -> Vec<usize> {
        self.violations
            .iter()
            .filter_map(|v| match *v {
                Violation::ParentOutOfRange { pixel, .. }
                | Violation::ExtraRoot { pixel }
                | Violation::LevelIncrease { pixel, .. }
                | Violation::NonCanonicalParent { pixel, .. }
                | Violation::SNotPermutation { pixel, .. }
                | Violation::SOrder { pixel, .. } => Some(pixel),
                Violation::SRootNotFirst { first } => Some(first),
                Violation::Length { .. } | Violation::NoRoot => None,
            })
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the four encoding invariants: unique self-parented root,
/// level-monotone parents, canonical parents, and `S` a permutation starting
/// at the root with parents before children.
pub fn validate(ima: &Image2D, tree: &MaxTree) -> ValidationReport {
    validate_values(ima.values(), tree)
}

pub(crate) fn validate_values(values: &[u32], tree: &MaxTree) -> ValidationReport {
    let n = values.len();
    let mut out = Vec::new();
    if tree.parent.len() != n || tree.s.len() != n {
        out.push(Violation::Length { n, parent_len: tree.parent.len(), s_len: tree.s.len() });
        return ValidationReport { violations: out };
    }
    let parent = &tree.parent;

    let mut in_range = true;
    let mut root = None;
    for (p, &q) in parent.iter().enumerate() {
        if q >= n {
            out.push(Violation::ParentOutOfRange { pixel: p, parent: q });
            in_range = false;
        } else if q == p {
            if root.is_some() {
                out.push(Violation::ExtraRoot { pixel: p });
            } else {
                root = Some(p);
            }
        }
    }
    if root.is_none() {
        out.push(Violation::NoRoot);
    }
    if in_range {
        for (p, &q) in parent.iter().enumerate() {
            if values[q] > values[p] {
                out.push(Violation::LevelIncrease { pixel: p, parent: q });
            }
            if !canonical_in(values, parent, q) {
                out.push(Violation::NonCanonicalParent { pixel: p, parent: q });
            }
        }
    }

    let mut pos = vec![usize::MAX; n];
    let mut perm = true;
    for (i, &p) in tree.s.iter().enumerate() {
        if p >= n || pos[p] != usize::MAX {
            out.push(Violation::SNotPermutation { index: i, pixel: p });
            perm = false;
        } else {
            pos[p] = i;
        }
    }
    if perm {
        if let Some(r) = root {
            if tree.s[0] != r {
                out.push(Violation::SRootNotFirst { first: tree.s[0] });
            }
        }
        if in_range {
            for (p, &q) in parent.iter().enumerate() {
                if q != p && pos[q] > pos[p] {
                    out.push(Violation::SOrder { pixel: p, parent: q });
                }
            }
        }
    }
    ValidationReport { violations: out }
}

/// Makes every parent link point to a canonical pixel, walking `S` forward
/// so that each parent is already canonized when its children are visited.
pub fn canonize(ima: &Image2D, parent: &mut [usize], s: &[usize]) {
    canonize_values(ima.values(), parent, s)
}

pub(crate) fn canonize_values(values: &[u32], parent: &mut [usize], s: &[usize]) {
    for &p in s {
        let q = parent[p];
        let qq = parent[q];
        if values[q] == values[qq] {
            parent[p] = qq;
        }
    }
}

/// Canonizes a parent image that only satisfies the root and level
/// invariants (as left by tree merging) and rebuilds `S` top-down.
///
/// Each unvisited pixel's root path is walked until an already canonized
/// pixel (or the root) is met, then canonized from the top down. A second
/// walk over the canonical links lists pixels in `S`, so the output depends
/// only on the tree and not on the non-canonical links of the input.
pub fn canonize_rebuild_s(ima: &Image2D, parent: Vec<usize>) -> Result<MaxTree> {
    canonize_rebuild_s_values(ima.values(), parent)
}

pub(crate) fn canonize_rebuild_s_values(values: &[u32], mut parent: Vec<usize>) -> Result<MaxTree> {
    const UNSEEN: u8 = 0;
    const ON_PATH: u8 = 1;
    const CANONIZED: u8 = 2;
    const PLACED: u8 = 3;

    let n = values.len();
    if parent.len() != n {
        return Err(Error::InvalidTree(format!("parent has {} entries for {n} pixels", parent.len())));
    }
    let mut state = vec![UNSEEN; n];
    let mut path = Vec::new();
    let mut roots = 0usize;

    for start in 0..n {
        if state[start] != UNSEEN {
            continue;
        }
        path.clear();
        let mut x = start;
        loop {
            state[x] = ON_PATH;
            path.push(x);
            let q = parent[x];
            if q >= n {
                return Err(Error::InvalidTree(format!("pixel {x}: parent {q} out of range")));
            }
            if q == x {
                roots += 1;
                if roots > 1 {
                    return Err(Error::InvalidTree(format!("pixel {x} is a second root")));
                }
                break;
            }
            match state[q] {
                UNSEEN => x = q,
                ON_PATH => return Err(Error::Cycle { pixel: q }),
                _ => break,
            }
        }
        for &y in path.iter().rev() {
            let q = parent[y];
            let qq = parent[q];
            if values[q] == values[qq] {
                parent[y] = qq;
            }
            state[y] = CANONIZED;
        }
    }

    let mut s = Vec::with_capacity(n);
    for start in 0..n {
        if state[start] == PLACED {
            continue;
        }
        path.clear();
        let mut x = start;
        while state[x] != PLACED {
            state[x] = PLACED;
            path.push(x);
            x = parent[x];
        }
        s.extend(path.iter().rev());
    }
    Ok(MaxTree { parent, s })
}

/// Representative-independent form of a max-tree.
///
/// Node ids are assigned in order of each node's smallest pixel index, so two
/// trees of the same image compare equal iff they describe the same
/// component hierarchy, whichever canonical pixels the builders picked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedTree {
    pub node_of: Vec<usize>,
    pub node_level: Vec<u32>,
    pub node_parent: Vec<usize>,
}

impl NormalizedTree {
    pub fn num_nodes(&self) -> usize {
        self.node_level.len()
    }

    /// Pixel count of each node's own level component(s), excluding
    /// descendants.
    pub fn proper_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_nodes()];
        for &id in &self.node_of {
            sizes[id] += 1;
        }
        sizes
    }

    /// Human-readable description of the first difference with `other`.
    pub fn first_difference(&self, other: &NormalizedTree) -> Option<String> {
        if let Some(p) = (0..self.node_of.len().min(other.node_of.len())).find(|&p| self.node_of[p] != other.node_of[p])
        {
            return Some(format!("pixel {p}: node {} vs node {}", self.node_of[p], other.node_of[p]));
        }
        if self.node_of.len() != other.node_of.len() {
            return Some(format!("pixel counts differ: {} vs {}", self.node_of.len(), other.node_of.len()));
        }
        for id in 0..self.num_nodes().min(other.num_nodes()) {
            if self.node_level[id] != other.node_level[id] {
                return Some(format!("node {id}: level {} vs {}", self.node_level[id], other.node_level[id]));
            }
            if self.node_parent[id] != other.node_parent[id] {
                return Some(format!("node {id}: parent node {} vs {}", self.node_parent[id], other.node_parent[id]));
            }
        }
        if self.num_nodes() != other.num_nodes() {
            return Some(format!("node counts differ: {} vs {}", self.num_nodes(), other.num_nodes()));
        }
        None
    }
}

pub fn normalize(ima: &Image2D, tree: &MaxTree) -> Result<NormalizedTree> {
    let report = validate(ima, tree);
    if !report.is_ok() {
        return Err(Error::InvalidTree(report.to_string()));
    }
    let v = ima.values();
    let parent = &tree.parent;
    let n = v.len();
    let canon = |p: usize| if canonical_in(v, parent, p) { p } else { parent[p] };

    let mut id_of = vec![usize::MAX; n];
    let mut node_of = Vec::with_capacity(n);
    let mut reps = Vec::new();
    for p in 0..n {
        let c = canon(p);
        if id_of[c] == usize::MAX {
            id_of[c] = reps.len();
            reps.push(c);
        }
        node_of.push(id_of[c]);
    }
    let node_level = reps.iter().map(|&c| v[c]).collect();
    let node_parent = reps.iter().map(|&c| id_of[parent[c]]).collect();
    Ok(NormalizedTree { node_of, node_level, node_parent })
}

/// Writes one `p parent(p) ima(p)` line per pixel, in `S` order.
pub fn write_dump<W: Write>(ima: &Image2D, tree: &MaxTree, mut out: W) -> io::Result<()> {
    for &p in &tree.s {
        writeln!(out, "{} {} {}", p, tree.parent[p], ima.get(p))?;
    }
    Ok(())
}

/// Parses a tree dump for an image of `n` pixels. Returns the tree and the
/// per-pixel levels recorded in the dump.
pub fn read_dump<R: BufRead>(input: R, n: usize) -> Result<(MaxTree, Vec<u32>)> {
    let mut parent = vec![usize::MAX; n];
    let mut levels = vec![0u32; n];
    let mut s = Vec::with_capacity(n);
    let mut offset = 0usize;
    for line in input.lines() {
        let line = line?;
        let line_len = line.len() + 1;
        let text = line.trim();
        if text.is_empty() {
            offset += line_len;
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let bad = |msg: String| Error::Parse { offset, message: msg };
        if fields.len() != 3 {
            return Err(bad(format!("expected `p parent level`, got `{text}`")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad number `{s}`")));
        let (p, q, level) = (num(fields[0])? as usize, num(fields[1])? as usize, num(fields[2])?);
        if p >= n {
            return Err(bad(format!("pixel {p} outside image of {n} pixels")));
        }
        if parent[p] != usize::MAX {
            return Err(bad(format!("pixel {p} listed twice")));
        }
        parent[p] = q;
        levels[p] = u32::try_from(level).map_err(|_| bad(format!("level {level} too large")))?;
        s.push(p);
        offset += line_len;
    }
    if let Some(p) = parent.iter().position(|&q| q == usize::MAX) {
        return Err(Error::Parse { offset, message: format!("pixel {p} missing from dump") });
    }
    Ok((MaxTree { parent, s }, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(w: usize, h: usize, v: &[u32]) -> Image2D {
        Image2D::new(w, h, 8, v.to_vec()).unwrap()
    }

    /// Hand-built tree of the 2x2 image [1, 2, 4, 3]: chain 0 <- 1 <- 3 <- 2.
    fn chain_2x2() -> (Image2D, MaxTree) {
        (img(2, 2, &[1, 2, 4, 3]), MaxTree::new(vec![0, 0, 3, 1], vec![0, 1, 3, 2]))
    }

    #[test]
    fn canonical_elements() {
        let flat = img(2, 2, &[5; 4]);
        let t = MaxTree::new(vec![0, 0, 0, 0], vec![0, 1, 2, 3]);
        assert!(is_canonical(&flat, &t, 0));
        assert!((1..4).all(|p| !is_canonical(&flat, &t, p)));

        let ima = img(3, 1, &[1, 3, 2]);
        let t = MaxTree::new(vec![0, 2, 0], vec![0, 2, 1]);
        let canon: Vec<usize> = (0..3).filter(|&p| is_canonical(&ima, &t, p)).collect();
        assert_eq!(canon, vec![0, 1, 2]);
    }

    #[test]
    fn valid_tree_has_empty_report() {
        let (ima, t) = chain_2x2();
        assert!(validate(&ima, &t).is_ok());
        assert_eq!(t.node_count(&ima), 4);
        assert_eq!(t.depth(&ima), 4);
    }

    #[test]
    fn reports_non_canonical_parent() {
        // 1x3 flat: 2 -> 1 -> 0 leaves pixel 2 pointing at a non-canonical pixel
        let ima = img(3, 1, &[4, 4, 4]);
        let t = MaxTree::new(vec![0, 0, 1], vec![0, 1, 2]);
        let r = validate(&ima, &t);
        assert_eq!(r.violations, vec![Violation::NonCanonicalParent { pixel: 2, parent: 1 }]);
        assert_eq!(r.pixels(), vec![2]);
    }

    #[test]
    fn reports_reversed_s() {
        let (ima, mut t) = chain_2x2();
        t.s.reverse();
        let r = validate(&ima, &t);
        assert!(r.violations.contains(&Violation::SRootNotFirst { first: 2 }));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::SOrder { .. })));
    }

    #[test]
    fn reports_structural_faults() {
        let (ima, t) = chain_2x2();
        let mut two_roots = t.clone();
        two_roots.parent[2] = 2;
        assert!(validate(&ima, &two_roots).violations.contains(&Violation::ExtraRoot { pixel: 2 }));

        let mut upward = t.clone();
        upward.parent[1] = 2;
        assert!(validate(&ima, &upward).violations.contains(&Violation::LevelIncrease { pixel: 1, parent: 2 }));

        let mut dup = t.clone();
        dup.s[3] = 0;
        assert!(validate(&ima, &dup).violations.contains(&Violation::SNotPermutation { index: 3, pixel: 0 }));

        let mut oob = t.clone();
        oob.parent[3] = 17;
        assert!(validate(&ima, &oob).violations.contains(&Violation::ParentOutOfRange { pixel: 3, parent: 17 }));

        let short = MaxTree::new(vec![0], vec![0]);
        assert!(matches!(validate(&ima, &short).violations[0], Violation::Length { .. }));
    }

    #[test]
    fn canonize_flat_chain() {
        let ima = img(3, 1, &[4, 4, 4]);
        let mut parent = vec![0, 0, 1];
        canonize(&ima, &mut parent, &[0, 1, 2]);
        assert_eq!(parent, vec![0, 0, 0]);
        let t = MaxTree::new(parent.clone(), vec![0, 1, 2]);
        assert!(validate(&ima, &t).is_ok());
        // fixpoint
        canonize(&ima, &mut parent, &[0, 1, 2]);
        assert_eq!(parent, vec![0, 0, 0]);
    }

    #[test]
    fn canonize_leaves_canonical_tree_alone() {
        let (ima, t) = chain_2x2();
        let mut parent = t.parent.clone();
        canonize(&ima, &mut parent, &t.s);
        assert_eq!(parent, t.parent);
    }

    #[test]
    fn rebuild_s_single_node() {
        let ima = img(2, 2, &[7; 4]);
        // flat chain 3 -> 2 -> 1 -> 0
        let t = canonize_rebuild_s(&ima, vec![0, 0, 1, 2]).unwrap();
        assert_eq!(t.s, vec![0, 1, 2, 3]);
        assert_eq!(t.parent, vec![0, 0, 0, 0]);
        assert!(validate(&ima, &t).is_ok());
    }

    #[test]
    fn rebuild_s_is_idempotent() {
        let ima = img(3, 2, &[1, 3, 3, 2, 3, 1]);
        // root 0; 5 flat with 0; 3 under 0; 1 under 3; 2 and 4 in 1's node via chain
        let first = canonize_rebuild_s(&ima, vec![0, 3, 1, 5, 2, 0]).unwrap();
        assert!(validate(&ima, &first).is_ok());
        let second = canonize_rebuild_s(&ima, first.parent.clone()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rebuild_s_detects_cycles() {
        let ima = img(3, 1, &[2, 2, 2]);
        match canonize_rebuild_s(&ima, vec![0, 2, 1]) {
            Err(Error::Cycle { pixel }) => assert!(pixel == 1 || pixel == 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(canonize_rebuild_s(&ima, vec![0, 1, 1]), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn normalize_examples() {
        let flat = img(2, 2, &[5; 4]);
        let t = MaxTree::new(vec![3, 3, 3, 3], vec![3, 0, 1, 2]);
        let nt = normalize(&flat, &t).unwrap();
        assert_eq!(nt.node_of, vec![0; 4]);
        assert_eq!(nt.node_parent, vec![0]);
        assert_eq!(nt.node_level, vec![5]);

        let (ima, t) = chain_2x2();
        let nt = normalize(&ima, &t).unwrap();
        assert_eq!(nt.node_of, vec![0, 1, 2, 3]);
        assert_eq!(nt.node_level, vec![1, 2, 4, 3]);
        assert_eq!(nt.node_parent, vec![0, 0, 3, 1]);
    }

    #[test]
    fn normalize_ignores_representative_choice() {
        let ima = img(3, 1, &[2, 2, 5]);
        let a = MaxTree::new(vec![0, 0, 0], vec![0, 1, 2]);
        let b = MaxTree::new(vec![1, 1, 1], vec![1, 0, 2]);
        assert_eq!(normalize(&ima, &a).unwrap(), normalize(&ima, &b).unwrap());
    }

    #[test]
    fn normalize_rejects_invalid() {
        let (ima, mut t) = chain_2x2();
        t.s.swap(0, 3);
        assert!(matches!(normalize(&ima, &t), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn dump_round_trip() {
        let (ima, t) = chain_2x2();
        let mut buf = Vec::new();
        write_dump(&ima, &t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0 0 1\n1 0 2\n3 1 3\n2 3 4\n");
        let (back, levels) = read_dump(&buf[..], 4).unwrap();
        assert_eq!(back, t);
        assert_eq!(levels, vec![1, 2, 4, 3]);
    }

    #[test]
    fn dump_parse_errors() {
        assert!(matches!(read_dump(&b"0 0 1\n0 0 1\n"[..], 2), Err(Error::Parse { offset: 6, .. })));
        assert!(matches!(read_dump(&b"0 0 1\n"[..], 2), Err(Error::Parse { .. })));
        assert!(matches!(read_dump(&b"0 0\n"[..], 1), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(read_dump(&b"5 0 1\n"[..], 1), Err(Error::Parse { .. })));
    }
}
