//! `(W, I, s, Δ)`-tree arrays: length-`s` connector paths for prescribed
//! pairs, with a `Δ`-ary tree of height `s` grown at every internal vertex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extendable::{extend_path, extend_tree, extension_radius, ExtendableState, GrowthConfig, Strictness};
use crate::graph::{Graph, VertexSet};
use crate::tree::{families, Tree};

/// A rooted tree shape together with its host images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedTree {
    pub parent: Vec<Option<usize>>,
    pub images: Vec<usize>,
}

impl EmbeddedTree {
    pub fn new(t: &Tree, images: Vec<usize>) -> Self {
        EmbeddedTree { parent: (0..t.n()).map(|v| t.parent(v)).collect(), images }
    }

    pub fn tree(&self) -> Tree {
        Tree::from_parents(self.parent.clone()).expect("stored shape is a tree")
    }

    pub fn root_image(&self) -> usize {
        let r = self.parent.iter().position(Option::is_none).expect("rooted");
        self.images[r]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayPath {
    pub pair: (usize, usize),
    pub vertices: Vec<usize>,
}

impl ArrayPath {
    pub fn internal(&self) -> &[usize] {
        &self.vertices[1..self.vertices.len() - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeArray {
    pub s: usize,
    pub delta: usize,
    pub paths: Vec<ArrayPath>,
    /// Internal path vertex → the tree rooted there.
    pub rooted_trees: BTreeMap<usize, EmbeddedTree>,
    pub warnings: Vec<String>,
}

impl TreeArray {
    pub fn empty(s: usize, delta: usize) -> Self {
        TreeArray { s, delta, paths: Vec::new(), rooted_trees: BTreeMap::new(), warnings: Vec::new() }
    }

    /// Every host vertex the array occupies.
    pub fn vertex_count(&self) -> usize {
        let roots = self.rooted_trees.len();
        self.paths.iter().map(|p| p.vertices.len()).sum::<usize>()
            + self.rooted_trees.values().map(|t| t.images.len()).sum::<usize>()
            - roots
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrayBounds {
    pub radius: usize,
    pub s_min: usize,
    pub w_needed: usize,
}

/// The construction's requirements: `d1 ≥ Δ + 2`, `s ≥ 2⌈log 2m / log(d1−1)⌉ + 1`
/// and `|W| > 10 d1 m + |I|(s+1)Δ^{s+1}`.
pub fn tree_array_bounds(pairs: usize, s: usize, delta: usize, d1: usize, m: usize) -> ArrayBounds {
    let radius = extension_radius(d1, m);
    let pow = (delta as u128).saturating_pow(s as u32 + 1);
    let w_needed = (10 * d1 * m) as u128 + pairs as u128 * (s as u128 + 1) * pow;
    ArrayBounds { radius, s_min: 2 * radius + 1, w_needed: w_needed.min(usize::MAX as u128) as usize }
}

fn check_pairs(g: &Graph, w: &VertexSet, pairs: &[(usize, usize)]) -> Result<()> {
    let mut seen = VertexSet::new(g.n());
    for &(x, y) in pairs {
        for v in [x, y] {
            if v >= g.n() || w.contains(v) || seen.contains(v) {
                return Err(Error::InvalidParameter(format!("pair vertex {v} repeated or inside W")));
            }
            seen.insert(v);
        }
    }
    Ok(())
}

fn array_preconditions(
    w: &VertexSet,
    pairs: usize,
    s: usize,
    delta: usize,
    d1: usize,
    m: usize,
    strictness: Strictness,
) -> Result<Vec<String>> {
    let b = tree_array_bounds(pairs, s, delta, d1, m);
    let mut failures = Vec::new();
    if d1 < delta + 2 {
        failures.push(format!("d1 = {d1} < Δ + 2 = {}", delta + 2));
    }
    if s < b.s_min {
        failures.push(format!("s = {s} < 2⌈log 2m / log(d1−1)⌉ + 1 = {}", b.s_min));
    }
    if w.len() <= b.w_needed {
        failures.push(format!("|W| = {} ≤ 10·d1·m + |I|(s+1)Δ^(s+1) = {}", w.len(), b.w_needed));
    }
    match (strictness, failures.first()) {
        (Strictness::Strict, Some(f)) => Err(Error::PreconditionViolated(f.clone())),
        _ => Ok(failures),
    }
}

/// Builds the connector paths by repeated path extension from the empty
/// graph on the pair vertices, then grows a full `Δ`-ary tree of height
/// `s` at every internal path vertex.
pub fn build_tree_array(
    g: &Graph,
    w: &VertexSet,
    pairs: &[(usize, usize)],
    s: usize,
    delta: usize,
    d1: usize,
    m: usize,
    cfg: &GrowthConfig,
) -> Result<TreeArray> {
    let full = families::complete_kary(delta, s);
    build_shaped_tree_array(g, w, pairs, s, delta, d1, m, &|_, _| full.clone(), cfg)
}

/// As [`build_tree_array`], but at internal vertex `j` of path `i` only the
/// rooted tree `shape(i, j)` is grown. Each shape must fit inside a
/// `Δ`-ary tree of height `s`; the result is a pruned array.
#[allow(clippy::too_many_arguments)]
pub fn build_shaped_tree_array(
    g: &Graph,
    w: &VertexSet,
    pairs: &[(usize, usize)],
    s: usize,
    delta: usize,
    d1: usize,
    m: usize,
    shape: &dyn Fn(usize, usize) -> Tree,
    cfg: &GrowthConfig,
) -> Result<TreeArray> {
    if s == 0 {
        return Err(Error::InvalidParameter("tree arrays need s ≥ 1".into()));
    }
    check_pairs(g, w, pairs)?;
    let mut arr = TreeArray::empty(s, delta);
    if pairs.is_empty() {
        return Ok(arr);
    }
    arr.warnings = array_preconditions(w, pairs.len(), s, delta, d1, m, cfg.strictness)?;
    let ends: Vec<usize> = pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
    let mut state = ExtendableState::new(g, w, &ends, d1.max(3), m.max(1))?;
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let p = extend_path(&mut state, x, y, s, cfg).map_err(|e| Error::stage(format!("array path {i}"), e))?;
        arr.paths.push(ArrayPath { pair: (x, y), vertices: p });
    }
    for i in 0..arr.paths.len() {
        let internal = arr.paths[i].internal().to_vec();
        for (j, &v) in internal.iter().enumerate() {
            let t = shape(i, j);
            if !fits_kary(&t, delta, s) {
                return Err(Error::ShapeMismatch(format!(
                    "shape at path {i} position {j} exceeds a {delta}-ary tree of height {s}"
                )));
            }
            let images = extend_tree(&mut state, v, &t, cfg).map_err(|e| Error::stage(format!("array tree {i}.{j}"), e))?;
            arr.rooted_trees.insert(v, EmbeddedTree::new(&t, images));
        }
    }
    arr.warnings.extend(state.warnings.drain(..));
    Ok(arr)
}

/// Whether `t` embeds in a `Δ`-ary tree of height `s` root to root:
/// at most `Δ` children everywhere and height at most `s`.
pub fn fits_kary(t: &Tree, delta: usize, s: usize) -> bool {
    t.height() <= s && (0..t.n()).all(|v| t.children(v).count() <= delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayCheck {
    pub valid: bool,
    pub violation: Option<String>,
}

fn fail(msg: impl Into<String>) -> ArrayCheck {
    ArrayCheck { valid: false, violation: Some(msg.into()) }
}

/// Checks every clause of the tree-array definition: full `Δ`-ary trees.
pub fn verify_tree_array(arr: &TreeArray, w: &VertexSet, pairs: &[(usize, usize)], s: usize, delta: usize, g: &Graph) -> ArrayCheck {
    verify_array(arr, w, pairs, s, delta, g, true)
}

/// As [`verify_tree_array`], with each tree only required to be a subtree
/// of the `Δ`-ary tree of height `s`.
pub fn verify_pruned_tree_array(
    arr: &TreeArray,
    w: &VertexSet,
    pairs: &[(usize, usize)],
    s: usize,
    delta: usize,
    g: &Graph,
) -> ArrayCheck {
    verify_array(arr, w, pairs, s, delta, g, false)
}

fn verify_array(
    arr: &TreeArray,
    w: &VertexSet,
    pairs: &[(usize, usize)],
    s: usize,
    delta: usize,
    g: &Graph,
    full: bool,
) -> ArrayCheck {
    if arr.paths.len() != pairs.len() {
        return fail(format!("{} paths for {} pairs", arr.paths.len(), pairs.len()));
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    let mut internal = Vec::new();
    for (i, (p, &pair)) in arr.paths.iter().zip(pairs).enumerate() {
        if p.pair != pair || p.vertices.first() != Some(&pair.0) || p.vertices.last() != Some(&pair.1) {
            return fail(format!("path {i} does not join its pair"));
        }
        if p.vertices.len() != s + 1 {
            return fail(format!("path {i} has length {}, expected {s}", p.vertices.len() - 1));
        }
        if pair.0 >= g.n() || pair.1 >= g.n() || w.contains(pair.0) || w.contains(pair.1) {
            return fail(format!("pair {i} is not outside W"));
        }
        for win in p.vertices.windows(2) {
            if !g.adjacent(win[0], win[1]) {
                return fail(format!("path {i} uses non-edge {}-{}", win[0], win[1]));
            }
        }
        for &v in &p.vertices {
            if owner[v].is_some() {
                return fail("paths not disjoint");
            }
            owner[v] = Some(i);
        }
        for &v in p.internal() {
            if !w.contains(v) {
                return fail(format!("internal vertex {v} of path {i} lies outside W"));
            }
            internal.push(v);
        }
    }
    if arr.rooted_trees.len() != internal.len() || internal.iter().any(|v| !arr.rooted_trees.contains_key(v)) {
        return fail("rooted trees do not match the internal path vertices");
    }
    let mut used = vec![false; g.n()];
    for (&v, et) in &arr.rooted_trees {
        let Ok(t) = Tree::from_parents(et.parent.clone()) else { return fail(format!("tree at {v} is malformed")) };
        if et.images.len() != t.n() || et.images[t.root()] != v {
            return fail(format!("tree at {v} is not rooted at {v}"));
        }
        let depths = t.depths();
        for u in 0..t.n() {
            let kids = t.children(u).count();
            let shape_ok = if full {
                (kids == delta && depths[u] < s) || (kids == 0 && depths[u] == s)
            } else {
                kids <= delta && depths[u] <= s
            };
            if !shape_ok {
                let kind = if full { "full" } else { "pruned" };
                return fail(format!("tree at {v} is not a {kind} {delta}-ary tree of height {s}"));
            }
        }
        for (p, c) in t.edges() {
            if !g.adjacent(et.images[p], et.images[c]) {
                return fail(format!("tree at {v} uses a non-edge"));
            }
        }
        for (u, &x) in et.images.iter().enumerate() {
            if u == t.root() {
                continue;
            }
            if x >= g.n() || !w.contains(x) {
                return fail(format!("tree at {v} leaves W"));
            }
            if owner[x].is_some() {
                return fail(format!("tree at {v} meets a path"));
            }
            if used[x] {
                return fail("rooted trees not disjoint");
            }
            used[x] = true;
        }
    }
    ArrayCheck { valid: true, violation: None }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedInequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl NamedInequality {
    /// Records `lhs ≤ rhs` (or `lhs < rhs` when `strict`).
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, strict: bool) -> Self {
        let holds = if strict { lhs < rhs } else { lhs <= rhs };
        NamedInequality { name: name.into(), lhs, rhs, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecParameters {
    pub log_base: u32,
    /// `√log n`, unrounded.
    pub h: f64,
    pub s_min: usize,
    pub s_max: usize,
    pub m_bound: usize,
    /// `Δ^{2h}`.
    pub d1: f64,
    pub inequalities: Vec<NamedInequality>,
}

/// Evaluates the recursive parameter choices and their three chained
/// inequalities (base-2 logarithms).
pub fn rec_parameters(n: usize, d: usize, delta: usize) -> RecParameters {
    let log_n = (n as f64).log2();
    let h = log_n.sqrt();
    let s_min = (h - 1.0 - 1e-9).ceil().max(0.0) as usize;
    let s_max = (2.0 * h - 1.0 + 1e-9).floor().max(0.0) as usize;
    let m_bound = if d == 0 { 0 } else { n / (2 * d) };
    let dl = delta as f64;
    let d1 = dl.powf(2.0 * h);
    let m = m_bound as f64;
    let regime = NamedInequality::le("Δ^{5√log n} ≤ d < n", dl.powf(5.0 * h), d as f64, false);
    let radius = if m >= 1.0 && d1 > 2.0 { ((2.0 * m).log2() / (d1 - 1.0).log2()).ceil() } else { 0.0 };
    let path_len = NamedInequality::le("2⌈log 2m / log(d1−1)⌉ + 1 ≤ h − 1", 2.0 * radius + 1.0, h - 1.0, false);
    let s = s_max as f64;
    let w_min = n as f64 / dl.powf(2.5 * h);
    let size = NamedInequality::le(
        "10·d1·m + m(s+1)Δ^{s+1} ≤ n / Δ^{5h/2}",
        10.0 * d1 * m + m * (s + 1.0) * dl.powf(s + 1.0),
        w_min,
        false,
    );
    RecParameters { log_base: 2, h, s_min, s_max, m_bound, d1, inequalities: vec![regime, path_len, size] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> GrowthConfig {
        GrowthConfig { enforce: false, ..GrowthConfig::desk() }
    }

    #[test]
    fn bounds_arithmetic() {
        let b = tree_array_bounds(2, 5, 3, 5, 4);
        assert_eq!(b.s_min, 5);
        assert_eq!(b.w_needed, 200 + 2 * 6 * 729);
        assert_eq!(b.w_needed, 8948);
    }

    #[test]
    fn empty_family() {
        let g = Graph::complete(10);
        let w = g.vertices();
        let arr = build_tree_array(&g, &w, &[], 3, 2, 4, 1, &GrowthConfig::default()).unwrap();
        assert!(arr.paths.is_empty());
        assert!(verify_tree_array(&arr, &w, &[], 3, 2, &g).valid);
    }

    #[test]
    fn single_pair_in_complete_graph() {
        let g = Graph::complete(200);
        let w = VertexSet::from_iter(200, 2..200);
        let arr = build_tree_array(&g, &w, &[(0, 1)], 3, 2, 4, 1, &desk()).unwrap();
        assert_eq!(arr.paths[0].internal().len(), 2);
        assert_eq!(arr.rooted_trees.len(), 2);
        assert!(arr.rooted_trees.values().all(|t| t.images.len() == 15));
        assert!(verify_tree_array(&arr, &w, &[(0, 1)], 3, 2, &g).valid);
        assert!(arr.warnings.is_empty());
    }

    #[test]
    fn strict_mode_names_the_bound() {
        let g = Graph::complete(100);
        let w = VertexSet::from_iter(100, 2..100);
        let e = build_tree_array(&g, &w, &[(0, 1)], 3, 2, 4, 1, &GrowthConfig::default());
        assert!(matches!(e, Err(Error::PreconditionViolated(m)) if m.contains("|W|")));
    }

    #[test]
    fn mutations_are_caught() {
        let g = Graph::complete(120);
        let w = VertexSet::from_iter(120, 4..120);
        let pairs = [(0, 1), (2, 3)];
        let arr = build_tree_array(&g, &w, &pairs, 3, 2, 4, 1, &desk()).unwrap();
        assert!(verify_tree_array(&arr, &w, &pairs, 3, 2, &g).valid);

        let mut shared = arr.clone();
        shared.paths[1].vertices[1] = shared.paths[0].vertices[1];
        assert_eq!(verify_tree_array(&shared, &w, &pairs, 3, 2, &g).violation.as_deref(), Some("paths not disjoint"));

        let mut short = arr.clone();
        let (&v, _) = short.rooted_trees.iter().next().unwrap();
        let t = families::complete_kary(2, 2);
        let images: Vec<usize> = short.rooted_trees[&v].images[..t.n()].to_vec();
        short.rooted_trees.insert(v, EmbeddedTree::new(&t, images));
        assert!(!verify_tree_array(&short, &w, &pairs, 3, 2, &g).valid);
        assert!(verify_pruned_tree_array(&short, &w, &pairs, 3, 2, &g).valid);
    }

    #[test]
    fn shapes_beyond_capacity() {
        let g = Graph::complete(60);
        let w = VertexSet::from_iter(60, 2..60);
        let tall = families::path(4);
        let e = build_shaped_tree_array(&g, &w, &[(0, 1)], 2, 2, 4, 1, &|_, _| tall.clone(), &desk());
        assert!(matches!(e, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn rec_parameter_examples() {
        let r = rec_parameters(1 << 16, 1 << 10, 2);
        assert_eq!((r.h, r.s_min, r.s_max, r.d1), (4.0, 3, 7, 256.0));
        let r = rec_parameters(1 << 16, 1 << 20, 2);
        assert_eq!(r.m_bound, 0);
        let r = rec_parameters(1 << 25, 1 << 10, 2);
        assert_eq!((r.h, r.s_min, r.s_max), (5.0, 4, 9));
    }
}
