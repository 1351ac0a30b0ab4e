//! Attribute accumulation over a max-tree and direct filtering.

use crate::error::{Error, Result};
use crate::image::{Connectivity, Image2D};
use crate::tree::{validate, MaxTree};

/// An attribute defined by a per-pixel projection and an associative
/// combination with a neutral element.
pub trait Attribute {
    type Value: Clone;

    fn project(&self, p: usize, level: u32) -> Self::Value;
    fn combine(&self, acc: &mut Self::Value, other: &Self::Value);
    fn identity(&self) -> Self::Value;
}

/// Number of pixels in the peak component.
#[derive(Debug, Clone, Copy, Default)]
pub struct Area;

impl Attribute for Area {
    type Value = u64;

    #[inline]
    fn project(&self, _p: usize, _level: u32) -> u64 {
        1
    }

    #[inline]
    fn combine(&self, acc: &mut u64, other: &u64) {
        *acc += *other;
    }

    fn identity(&self) -> u64 {
        0
    }
}

/// Per-pixel attribute values. Only entries at canonical pixels describe a
/// node; the others hold partial sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeMap<V> {
    pub attr: Vec<V>,
}

impl<V> AttributeMap<V> {
    pub fn get(&self, p: usize) -> &V {
        &self.attr[p]
    }
}

/// Folds every pixel's projection into its ancestors, leaves first.
pub fn compute_attribute<A: Attribute>(tree: &MaxTree, img: &Image2D, def: &A) -> Result<AttributeMap<A::Value>> {
    let report = validate(img, tree);
    if !report.is_ok() {
        return Err(Error::InvalidTree(report.to_string()));
    }
    let values = img.values();
    let mut attr: Vec<A::Value> = values.iter().enumerate().map(|(p, &v)| def.project(p, v)).collect();
    for &p in tree.s[1..].iter().rev() {
        let q = tree.parent[p];
        let (child, parent) = if p < q {
            let (a, b) = attr.split_at_mut(q);
            (&a[p], &mut b[0])
        } else {
            let (a, b) = attr.split_at_mut(p);
            (&b[0], &mut a[q])
        };
        def.combine(parent, child);
    }
    Ok(AttributeMap { attr })
}

/// Lowers every node whose attribute is below `threshold` to the output of
/// its parent. A failing root goes to 0.
pub fn direct_filter<V: PartialOrd>(
    tree: &MaxTree,
    img: &Image2D,
    attr: &AttributeMap<V>,
    threshold: &V,
) -> Result<Image2D> {
    let n = img.len();
    if tree.len() != n || attr.attr.len() != n {
        return Err(Error::Contract(format!(
            "image has {n} pixels, tree {}, attribute map {}",
            tree.len(),
            attr.attr.len()
        )));
    }
    let values = img.values();
    let mut out = vec![0u32; n];
    let root = tree.root();
    out[root] = if attr.attr[root] < *threshold { 0 } else { values[root] };
    for &p in &tree.s[1..] {
        let q = tree.parent[p];
        out[p] = if values[q] == values[p] || attr.attr[p] < *threshold { out[q] } else { values[p] };
    }
    Image2D::new(img.width(), img.height(), img.bit_depth(), out)
}

/// Area opening: removes peak components smaller than `threshold` pixels.
pub fn area_opening(img: &Image2D, conn: Connectivity, threshold: u64) -> Result<Image2D> {
    let tree = crate::unionfind::maxtree_uf_rank(img, conn);
    let area = compute_attribute(&tree, img, &Area)?;
    direct_filter(&tree, img, &area, &threshold)
}
