//! Bounded-degree trees, leaf stripping and the structural dichotomies.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rooted tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<Option<usize>>,
    adj: Vec<Vec<usize>>,
    root: usize,
}

impl Tree {
    /// Builds a tree from a parent array with exactly one `None` (the root).
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidParameter("tree needs at least one vertex".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidParameter(format!("expected one root, found {}", roots.len())));
        }
        let edges: Vec<(usize, usize)> = (0..n).filter_map(|v| parent[v].map(|p| (p, v))).collect();
        Tree::from_edges(n, &edges, roots[0])
    }

    /// Builds a tree from `n - 1` edges, rooted at `root`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        if n == 0 || root >= n {
            return Err(Error::InvalidParameter("bad tree order or root".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidParameter(format!("tree on {n} vertices needs {} edges", n - 1)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidParameter(format!("bad edge {u}-{v}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        if count != n {
            return Err(Error::InvalidParameter("edges do not form a connected tree".into()));
        }
        Ok(Tree { parent, adj, root })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.parent[v];
        self.adj[v].iter().copied().filter(move |&u| Some(u) != p)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.adj[v].len() <= 1
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).filter_map(|v| self.parent[v].map(|p| (p, v))).collect()
    }

    /// Vertices in breadth-first order from the root, children by id.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n());
        order.push(self.root);
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            order.extend(self.children(u));
            i += 1;
        }
        order
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n()];
        for v in self.bfs_order() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    /// Height of the tree (edges on the longest root-leaf path).
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Same tree, rooted at `r`.
    pub fn rerooted(&self, r: usize) -> Tree {
        Tree::from_edges(self.n(), &self.edges(), r).expect("rerooting a valid tree")
    }

    /// Tree induced on a connected vertex set. Returns the subtree (rooted at
    /// the member closest to the original root) and the map new id → old id.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Tree, Vec<usize>)> {
        let mut local = vec![usize::MAX; self.n()];
        let mut map: Vec<usize> = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for &v in &map {
            if let Some(p) = self.parent[v] {
                if local[p] != usize::MAX {
                    edges.push((local[p], local[v]));
                }
            }
        }
        let depth = self.depths();
        let root = map.iter().copied().min_by_key(|&v| (depth[v], v)).ok_or_else(|| {
            Error::InvalidParameter("empty vertex set".into())
        })?;
        let t = Tree::from_edges(map.len(), &edges, local[root])?;
        Ok((t, map))
    }

    /// Parses the parent-array file format: `n`, then `n` parent ids (root −1).
    pub fn read(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or(Error::Parse { line: 1, msg: "missing n".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "bad n".into() })?;
        let mut parent = Vec::with_capacity(n);
        for tok in tokens {
            let p: i64 = tok.parse().map_err(|_| Error::Parse { line: 2, msg: format!("bad parent `{tok}`") })?;
            parent.push(if p < 0 { None } else { Some(p as usize) });
        }
        if parent.len() != n {
            return Err(Error::Parse { line: 2, msg: format!("expected {n} parents, got {}", parent.len()) });
        }
        Tree::from_parents(parent).map_err(|e| Error::Parse { line: 2, msg: e.to_string() })
    }

    pub fn write(&self) -> String {
        let ps: Vec<String> = self.parent.iter().map(|p| p.map_or("-1".to_string(), |p| p.to_string())).collect();
        format!("{}\n{}\n", self.n(), ps.join(" "))
    }
}

/// Standard families used by tests and experiments.
pub mod families {
    use super::Tree;

    pub fn path(n: usize) -> Tree {
        let e: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Tree::from_edges(n, &e, 0).unwrap()
    }

    /// `K_{1,k}` with centre 0.
    pub fn star(k: usize) -> Tree {
        let e: Vec<_> = (1..=k).map(|v| (0, v)).collect();
        Tree::from_edges(k + 1, &e, 0).unwrap()
    }

    /// Centre 0 with `legs` paths of length `len`.
    pub fn spider(legs: usize, len: usize) -> Tree {
        let mut e = Vec::new();
        let mut next = 1;
        for _ in 0..legs {
            let mut prev = 0;
            for _ in 0..len {
                e.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        Tree::from_edges(next, &e, 0).unwrap()
    }

    /// Two adjacent centres 0 and 1, each with `k` leaves.
    pub fn double_star(k: usize) -> Tree {
        let mut e = vec![(0, 1)];
        for i in 0..k {
            e.push((0, 2 + i));
            e.push((1, 2 + k + i));
        }
        Tree::from_edges(2 + 2 * k, &e, 0).unwrap()
    }

    /// Complete `k`-ary tree of the given height.
    pub fn complete_kary(k: usize, height: usize) -> Tree {
        let mut e = Vec::new();
        let mut level = vec![0usize];
        let mut next = 1;
        for _ in 0..height {
            let mut new = Vec::new();
            for &p in &level {
                for _ in 0..k {
                    e.push((p, next));
                    new.push(next);
                    next += 1;
                }
            }
            level = new;
        }
        Tree::from_edges(next, &e, 0).unwrap()
    }

    /// Spine `0..spine` with `legs` leaves on every spine vertex.
    pub fn caterpillar(spine: usize, legs: usize) -> Tree {
        let mut e: Vec<_> = (1..spine).map(|v| (v - 1, v)).collect();
        let mut next = spine;
        for s in 0..spine {
            for _ in 0..legs {
                e.push((s, next));
                next += 1;
            }
        }
        Tree::from_edges(next, &e, 0).unwrap()
    }

    /// Replaces every edge by a path with `times` new internal vertices.
    pub fn subdivide(t: &Tree, times: usize) -> Tree {
        let mut e = Vec::new();
        let mut next = t.n();
        for (p, v) in t.edges() {
            let mut prev = p;
            for _ in 0..times {
                e.push((prev, next));
                prev = next;
                next += 1;
            }
            e.push((prev, v));
        }
        Tree::from_edges(next, &e, t.root()).unwrap()
    }

    /// Spine `0..spine`; every `every`-th spine vertex carries a branch
    /// `v - r - c` where `c` has `leaves` leaf children (a pendant star
    /// rooted at `r`).
    pub fn pendant_star_spine(spine: usize, every: usize, leaves: usize) -> Tree {
        let mut e: Vec<_> = (1..spine).map(|v| (v - 1, v)).collect();
        let mut next = spine;
        for s in (0..spine).step_by(every.max(1)) {
            let (r, c) = (next, next + 1);
            e.push((s, r));
            e.push((r, c));
            next += 2;
            for _ in 0..leaves {
                e.push((c, next));
                next += 1;
            }
        }
        Tree::from_edges(next, &e, 0).unwrap()
    }
}

/// Degree-capped random attachment: vertex `v` attaches to a uniformly random
/// earlier vertex that still has spare degree.
pub fn random_bounded_tree(n: usize, delta: usize, seed: u64) -> Result<Tree> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if delta < 2 && n > 2 || delta == 0 && n > 1 {
        return Err(Error::InvalidParameter(format!("delta = {delta} cannot host a tree on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut avail = vec![0usize];
    let mut pos = vec![usize::MAX; n];
    pos[0] = 0;
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let i = rng.gen_range(0..avail.len());
        let p = avail[i];
        edges.push((p, v));
        deg[p] += 1;
        deg[v] = 1;
        if deg[p] >= delta {
            let last = *avail.last().unwrap();
            avail.swap_remove(pos[p]);
            if last != p {
                pos[last] = pos[p];
            }
            pos[p] = usize::MAX;
        }
        if delta > 1 {
            pos[v] = avail.len();
            avail.push(v);
        }
    }
    Tree::from_edges(n, &edges, 0)
}

/// `T′`: the tree minus its leaves, with the map back to original ids.
/// On two vertices the lower id survives; a single vertex is returned as is.
pub fn strip_leaves(t: &Tree) -> (Tree, Vec<usize>) {
    let n = t.n();
    if n <= 2 {
        return t.induced(&[0]).expect("single vertex");
    }
    let keep: Vec<usize> = (0..n).filter(|&v| !t.is_leaf(v)).collect();
    t.induced(&keep).expect("non-leaves of a tree induce a subtree")
}

/// The levels `T_0 ⊇ T_1 ⊇ … ⊇ T_h` of repeated leaf stripping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    /// `levels[i]`: vertex set of `T_i` in original ids, sorted.
    pub levels: Vec<Vec<usize>>,
    /// `leaf_sets[i]`: leaves of `T_i` (a lone vertex counts as a leaf).
    pub leaf_sets: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
    /// Largest `i` with `v ∈ T_i`, for every vertex.
    pub level_of: Vec<usize>,
}

impl TreeDecomposition {
    pub fn h(&self) -> usize {
        self.levels.len() - 1
    }
}

/// Leaves of the subtree induced on `set` (degree ≤ 1 inside the set).
fn leaves_within(t: &Tree, inside: &[bool], set: &[usize]) -> Vec<usize> {
    set.iter()
        .copied()
        .filter(|&v| t.neighbors(v).iter().filter(|&&u| inside[u]).count() <= 1)
        .collect()
}

/// Strips leaves `h` times, stopping early once a level is a single vertex.
pub fn decompose_levels(t: &Tree, h: usize) -> TreeDecomposition {
    let n = t.n();
    let delta = t.max_degree().max(1);
    let mut inside = vec![true; n];
    let mut level_of = vec![0; n];
    let mut levels = vec![(0..n).collect::<Vec<_>>()];
    let mut leaf_sets = Vec::new();
    loop {
        let cur = levels.last().unwrap().clone();
        let leaves = leaves_within(t, &inside, &cur);
        leaf_sets.push(leaves.clone());
        if levels.len() > h || cur.len() <= 1 {
            break;
        }
        let next: Vec<usize> = if cur.len() == 2 {
            vec![cur[0]]
        } else {
            let mut is_leaf = vec![false; n];
            leaves.iter().for_each(|&v| is_leaf[v] = true);
            cur.iter().copied().filter(|&v| !is_leaf[v]).collect()
        };
        for &v in &cur {
            inside[v] = false;
        }
        for &v in &next {
            inside[v] = true;
            level_of[v] = levels.len();
        }
        levels.push(next);
    }
    let sizes: Vec<usize> = levels.iter().map(Vec::len).collect();
    for (i, &ni) in sizes.iter().enumerate() {
        let reach: f64 = (0..=i).map(|j| (delta as f64).powi(j as i32)).sum();
        assert!(ni as f64 * reach >= n as f64, "level {i}: n_i(1+Δ+…+Δ^i) < n");
    }
    TreeDecomposition { levels, leaf_sets, sizes, level_of }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    Leaves,
    BarePaths,
    PendantStars,
    Caterpillars,
}

/// Maximal star centred at a leaf of `T′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendantStar {
    pub root: usize,
    pub center: usize,
    pub leaves: Vec<usize>,
}

/// Bare path of `T′` with the `T`-leaves hanging off its internal vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caterpillar {
    pub path: Vec<usize>,
    /// Internal path vertices carrying at least one leg.
    pub branching: Vec<usize>,
    /// `(internal vertex, its legs)` for every internal vertex, in path order.
    pub legs: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub branch: Branch,
    pub leaves: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
    pub stars: Vec<PendantStar>,
    pub caterpillars: Vec<Caterpillar>,
    pub threshold: f64,
}

impl Dichotomy {
    pub fn payload_len(&self) -> usize {
        match self.branch {
            Branch::Leaves => self.leaves.len(),
            Branch::BarePaths => self.paths.len(),
            Branch::PendantStars => self.stars.len(),
            Branch::Caterpillars => self.caterpillars.len(),
        }
    }
}

/// Maximal bare paths: maximal chains of degree-2 vertices together with
/// their two end vertices. A path graph yields itself.
pub fn maximal_bare_paths(t: &Tree) -> Vec<Vec<usize>> {
    let n = t.n();
    let mut out = Vec::new();
    if n == 1 {
        return out;
    }
    let mut done = vec![false; n];
    for u in 0..n {
        if t.degree(u) == 2 {
            continue;
        }
        for &first in t.neighbors(u) {
            let mut path = vec![u];
            let (mut prev, mut cur) = (u, first);
            while t.degree(cur) == 2 {
                path.push(cur);
                let next = if t.neighbors(cur)[0] == prev { t.neighbors(cur)[1] } else { t.neighbors(cur)[0] };
                prev = cur;
                cur = next;
            }
            path.push(cur);
            let key = if path.len() > 2 { path[1] } else { usize::MAX };
            if key != usize::MAX {
                if done[key] {
                    continue;
                }
                path[1..path.len() - 1].iter().for_each(|&v| done[v] = true);
            } else if cur < u {
                continue;
            }
            out.push(path);
        }
    }
    out
}

/// Greedy left-to-right cut of maximal bare paths into vertex-disjoint
/// subpaths with exactly `k` edges.
pub fn bare_path_segments(t: &Tree, k: usize) -> Vec<Vec<usize>> {
    let mut used = vec![false; t.n()];
    let mut chains = maximal_bare_paths(t);
    chains.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut out = Vec::new();
    for chain in chains {
        let mut i = 0;
        while i + k < chain.len() {
            let window = &chain[i..=i + k];
            if let Some(off) = window.iter().rposition(|&v| used[v]) {
                i += off + 1;
                continue;
            }
            window.iter().for_each(|&v| used[v] = true);
            out.push(window.to_vec());
            i += k + 1;
        }
    }
    out
}

fn empty_dichotomy(branch: Branch, threshold: f64) -> Dichotomy {
    Dichotomy { branch, leaves: vec![], paths: vec![], stars: vec![], caterpillars: vec![], threshold }
}

/// At least `n/4k` leaves, or at least `n/4k` disjoint bare paths of length
/// `k`. Leaves are preferred when both hold.
pub fn leaf_or_barepath(t: &Tree, k: usize) -> Dichotomy {
    let n = t.n();
    assert!(k >= 1, "k must be positive");
    let threshold = n as f64 / (4.0 * k as f64);
    let leaves = t.leaves();
    if leaves.len() as f64 >= threshold {
        let mut d = empty_dichotomy(Branch::Leaves, threshold);
        d.leaves = leaves;
        return d;
    }
    let paths = bare_path_segments(t, k);
    assert!(
        paths.len() as f64 >= threshold,
        "bare-path branch found {} paths, below n/4k = {threshold}",
        paths.len()
    );
    let mut d = empty_dichotomy(Branch::BarePaths, threshold);
    d.paths = paths;
    d
}

/// Pendant stars: one per leaf of `T′`. Empty when `T′` is a single vertex.
pub fn pendant_stars(t: &Tree) -> Vec<PendantStar> {
    if t.n() < 3 {
        return Vec::new();
    }
    let (tp, map) = strip_leaves(t);
    if tp.n() < 2 {
        return Vec::new();
    }
    tp.leaves()
        .into_iter()
        .map(|c| {
            let center = map[c];
            let root = map[tp.neighbors(c)[0]];
            let leaves = t.neighbors(center).iter().copied().filter(|&u| t.is_leaf(u)).collect();
            PendantStar { root, center, leaves }
        })
        .collect()
}

fn caterpillar_of(t: &Tree, path: Vec<usize>) -> Caterpillar {
    let mut legs = Vec::new();
    let mut branching = Vec::new();
    for &v in &path[1..path.len() - 1] {
        let l: Vec<usize> = t.neighbors(v).iter().copied().filter(|&u| t.is_leaf(u)).collect();
        if !l.is_empty() {
            branching.push(v);
        }
        legs.push((v, l));
    }
    Caterpillar { path, branching, legs }
}

/// The same dichotomy on `T′` with threshold `n/(4kΔ)`: pendant stars or
/// caterpillars.
pub fn star_or_caterpillar(t: &Tree, k: usize) -> Dichotomy {
    let n = t.n();
    let delta = t.max_degree().max(2);
    let threshold = n as f64 / (4.0 * k as f64 * delta as f64);
    let (tp, map) = strip_leaves(t);
    let inner = if tp.n() <= 2 { None } else { Some(leaf_or_barepath(&tp, k)) };
    match inner {
        Some(d) if d.branch == Branch::BarePaths => {
            let mut out = empty_dichotomy(Branch::Caterpillars, threshold);
            out.caterpillars =
                d.paths.into_iter().map(|p| caterpillar_of(t, p.into_iter().map(|v| map[v]).collect())).collect();
            out
        }
        _ => {
            let mut out = empty_dichotomy(Branch::PendantStars, threshold);
            out.stars = pendant_stars(t);
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn strip_examples() {
        assert_eq!(strip_leaves(&path(5)).0.n(), 3);
        let (s, map) = strip_leaves(&star(4));
        assert_eq!((s.n(), map), (1, vec![0]));
        let (s, _) = strip_leaves(&spider(3, 2));
        assert_eq!((s.n(), s.max_degree(), s.leaves().len()), (4, 3, 3));
        assert_eq!(strip_leaves(&path(2)).1, vec![0]);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose_levels(&path(9), 2).sizes, vec![9, 7, 5]);
        assert_eq!(decompose_levels(&star(8), 2).sizes, vec![9, 1]);
        assert_eq!(decompose_levels(&complete_kary(2, 3), 2).sizes, vec![15, 7, 3]);
        let d = decompose_levels(&path(9), 2);
        assert_eq!(d.leaf_sets[2], vec![2, 6]);
        assert_eq!(d.level_of[4], 2);
        assert_eq!(d.level_of[0], 0);
    }

    #[test]
    fn dichotomy_examples() {
        assert_eq!(leaf_or_barepath(&star(9), 3).branch, Branch::Leaves);
        assert_eq!(leaf_or_barepath(&path(12), 3).branch, Branch::Leaves);
        let d = leaf_or_barepath(&path(200), 3);
        assert_eq!(d.branch, Branch::BarePaths);
        assert!(d.paths.len() >= 17);
        assert!(d.paths.iter().all(|p| p.len() == 4));
    }

    #[test]
    fn star_or_caterpillar_examples() {
        let d = star_or_caterpillar(&double_star(4), 3);
        assert_eq!((d.branch, d.stars.len()), (Branch::PendantStars, 2));
        let d = star_or_caterpillar(&caterpillar(100, 1), 3);
        assert_eq!(d.branch, Branch::Caterpillars);
        assert!(d.caterpillars.iter().all(|c| !c.branching.is_empty()));
        let d = star_or_caterpillar(&path(200), 3);
        assert_eq!(d.branch, Branch::Caterpillars);
        assert!(d.caterpillars.iter().all(|c| c.branching.is_empty()));
    }

    #[test]
    fn pendant_star_examples() {
        assert!(pendant_stars(&star(4)).is_empty());
        let s = pendant_stars(&spider(3, 2));
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|p| p.root == 0 && p.leaves.len() == 1));
        let s = pendant_stars(&double_star(4));
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|p| p.leaves.len() == 4));
    }

    #[test]
    fn random_tree_examples() {
        assert_eq!(random_bounded_tree(1, 5, 0).unwrap().n(), 1);
        let p = random_bounded_tree(5, 2, 3).unwrap();
        assert_eq!(p.max_degree(), 2);
        assert_eq!(p.leaves().len(), 2);
        let t = random_bounded_tree(50, 3, 7).unwrap();
        assert_eq!(t.n(), 50);
        assert!(t.max_degree() <= 3);
        assert!(random_bounded_tree(5, 1, 0).is_err());
        assert_eq!(random_bounded_tree(40, 3, 9).unwrap(), random_bounded_tree(40, 3, 9).unwrap());
    }

    #[test]
    fn file_round_trip() {
        let t = random_bounded_tree(30, 4, 1).unwrap();
        assert_eq!(Tree::read(&t.write()).unwrap(), t);
        assert!(Tree::read("3\n-1 0\n").is_err());
        assert!(Tree::read("3\n-1 -1 0\n").is_err());
    }

    #[test]
    fn maximal_bare_paths_of_spider() {
        let mut p = maximal_bare_paths(&spider(3, 2));
        p.sort();
        assert_eq!(p, vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6]]);
        assert_eq!(maximal_bare_paths(&path(4)), vec![vec![0, 1, 2, 3]]);
        assert_eq!(maximal_bare_paths(&path(2)), vec![vec![0, 1]]);
    }
}
