//! Prune-and-regrow: pendant subtrees near an unmatched vertex are removed
//! from the embedding and re-embedded inside a tree array whose connector
//! path replaces the tree path they hung from.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::extendable::GrowthConfig;
use crate::graph::{Graph, VertexSet};
use crate::tree::Tree;
use crate::tree_array::{build_shaped_tree_array, fits_kary, TreeArray};

/// One tree path to re-route. `anchor` keeps its image; `chain` is the tree
/// path leaving it, whose last vertex lands on `end_image` and whose other
/// vertices, with everything hanging from them, are regrown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regrow {
    pub anchor: usize,
    pub chain: Vec<usize>,
    pub end_image: usize,
    /// Tree vertices the pruning must not cross.
    pub exclude: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegrowConfig {
    pub delta: usize,
    pub d1: usize,
    pub m: usize,
    pub growth: GrowthConfig,
}

/// Mapped vertices reachable from the first chain vertex without passing
/// the anchor, the chain end or an excluded vertex.
pub fn pruned_region(t: &Tree, emb: &Embedding, job: &Regrow) -> Vec<usize> {
    let s = job.chain.len();
    if s < 2 {
        return Vec::new();
    }
    let end = job.chain[s - 1];
    let mut seen = vec![false; t.n()];
    seen[job.anchor] = true;
    seen[end] = true;
    job.exclude.iter().for_each(|&x| seen[x] = true);
    let first = job.chain[0];
    seen[first] = true;
    let mut out = vec![first];
    let mut q = VecDeque::from([first]);
    while let Some(u) = q.pop_front() {
        for &w in t.neighbors(u) {
            if !seen[w] && emb.get(w).is_some() {
                seen[w] = true;
                out.push(w);
                q.push_back(w);
            }
        }
    }
    out
}

/// The pendant tree at every internal chain vertex, rooted there, with the
/// map from shape ids back to tree vertices.
pub fn regrow_shapes(t: &Tree, emb: &Embedding, job: &Regrow) -> Result<Vec<(Tree, Vec<usize>)>> {
    let region = pruned_region(t, emb, job);
    let mut inside = vec![false; t.n()];
    region.iter().for_each(|&v| inside[v] = true);
    let internal = &job.chain[..job.chain.len().saturating_sub(1)];
    for &c in internal {
        if !inside[c] {
            return Err(Error::InvalidParameter(format!("chain vertex {c} is not embedded")));
        }
    }
    let mut on_chain = vec![false; t.n()];
    internal.iter().for_each(|&c| on_chain[c] = true);
    let mut shapes = Vec::with_capacity(internal.len());
    let mut covered = 0;
    for &c in internal {
        let mut map = vec![c];
        let mut parent = vec![None];
        let mut local = std::collections::HashMap::from([(c, 0usize)]);
        let mut q = VecDeque::from([c]);
        while let Some(u) = q.pop_front() {
            for &w in t.neighbors(u) {
                if inside[w] && !on_chain[w] && !local.contains_key(&w) {
                    local.insert(w, map.len());
                    parent.push(Some(local[&u]));
                    map.push(w);
                    q.push_back(w);
                }
            }
        }
        covered += map.len();
        shapes.push((Tree::from_parents(parent)?, map));
    }
    debug_assert_eq!(covered, region.len());
    Ok(shapes)
}

/// Prunes every job's region from `emb`, builds a pruned tree array in `w`
/// on the pairs `(φ(anchor), end_image)` with the pruned trees as shapes,
/// and splices the result back into `emb`. All chains must share one
/// length `s`; a pendant tree outside the `Δ`-ary height-`s` capacity is a
/// `ShapeMismatch`. `emb` is left untouched on error.
pub fn prune_and_regrow(
    g: &Graph,
    t: &Tree,
    emb: &mut Embedding,
    jobs: &[Regrow],
    w: &VertexSet,
    cfg: &RegrowConfig,
) -> Result<TreeArray> {
    let Some(first) = jobs.first() else { return Ok(TreeArray::empty(1, cfg.delta)) };
    let s = first.chain.len();
    if s == 0 || jobs.iter().any(|j| j.chain.len() != s) {
        return Err(Error::InvalidParameter("regrow chains must share one positive length".into()));
    }
    let mut shapes = Vec::with_capacity(jobs.len());
    let mut pairs = Vec::with_capacity(jobs.len());
    for (i, job) in jobs.iter().enumerate() {
        let a = emb.get(job.anchor).ok_or_else(|| Error::InvalidParameter(format!("anchor {} is not embedded", job.anchor)))?;
        let end = job.chain[s - 1];
        if emb.get(end).is_some_and(|v| v != job.end_image) {
            return Err(Error::InvalidParameter(format!("chain end {end} already sits elsewhere")));
        }
        let sh = regrow_shapes(t, emb, job)?;
        for (j, (shape, _)) in sh.iter().enumerate() {
            if !fits_kary(shape, cfg.delta, s) {
                return Err(Error::ShapeMismatch(format!(
                    "pendant tree at regrow {i} position {j} (height {}) exceeds a {}-ary tree of height {s}",
                    shape.height(),
                    cfg.delta
                )));
            }
        }
        shapes.push(sh);
        pairs.push((a, job.end_image));
    }
    let arr = build_shaped_tree_array(g, w, &pairs, s, cfg.delta, cfg.d1, cfg.m, &|i, j| shapes[i][j].0.clone(), &cfg.growth)?;
    for sh in &shapes {
        for (_, map) in sh {
            for &u in map {
                emb.unset(u);
            }
        }
    }
    for ((job, sh), path) in jobs.iter().zip(&shapes).zip(&arr.paths) {
        for (j, (_, map)) in sh.iter().enumerate() {
            let root_image = path.vertices[j + 1];
            let grown = &arr.rooted_trees[&root_image];
            for (k, &u) in map.iter().enumerate() {
                emb.set(u, grown.images[k]);
            }
        }
        emb.set(job.chain[s - 1], job.end_image);
    }
    Ok(arr)
}
