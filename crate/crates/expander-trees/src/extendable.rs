//! `(d, m)`-extendable subgraphs and the growth routines built on them:
//! path and tree extension, almost-spanning tree embedding and exact-length
//! pair connection.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::matching::{saturating_star_matching, MatchOutcome, StarDemand};
use crate::subsets::{self, binomial};
use crate::tree::{families, Tree};

const NONE: usize = usize::MAX;

/// Default cap on search-node expansions per growth call.
pub const DEFAULT_GROWTH_BUDGET: u64 = 1_000_000;

/// Exact enumeration is used by `Auto` when it needs at most this many sets.
pub const AUTO_EXACT_LIMIT: u128 = 200_000;

/// Free vertices of a window plus, for every host vertex, how many free
/// neighbours it still has.
#[derive(Clone, Debug)]
pub(crate) struct FreePool {
    free: Vec<bool>,
    freedeg: Vec<usize>,
}

impl FreePool {
    pub(crate) fn new(g: &Graph, window: &VertexSet) -> Self {
        let free: Vec<bool> = (0..g.n()).map(|v| window.contains(v)).collect();
        let freedeg = (0..g.n()).map(|v| g.degree_into(v, window)).collect();
        FreePool { free, freedeg }
    }

    pub(crate) fn is_free(&self, v: usize) -> bool {
        self.free[v]
    }

    pub(crate) fn freedeg(&self, v: usize) -> usize {
        self.freedeg[v]
    }

    pub(crate) fn take(&mut self, g: &Graph, v: usize) {
        debug_assert!(self.free[v]);
        self.free[v] = false;
        for &u in g.neighbors(v) {
            self.freedeg[u] -= 1;
        }
    }

    pub(crate) fn release(&mut self, g: &Graph, v: usize) {
        debug_assert!(!self.free[v]);
        self.free[v] = true;
        for &u in g.neighbors(v) {
            self.freedeg[u] += 1;
        }
    }

    pub(crate) fn free_vertices(&self) -> Vec<usize> {
        (0..self.free.len()).filter(|&v| self.free[v]).collect()
    }

    /// Free neighbours of `v`, ascending by free-degree, ties by id.
    pub(crate) fn ordered_free_neighbors(&self, g: &Graph, v: usize) -> Vec<usize> {
        let mut c: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| self.free[u]).collect();
        c.sort_by_key(|&u| (self.freedeg[u], u));
        c
    }
}

/// How a tree is to be grown by the engine.
#[derive(Clone, Debug, Default)]
pub(crate) struct GrowSpec<'a> {
    /// Host image of the tree root; taken from the pool if free there,
    /// otherwise treated as an already-used attachment point.
    pub pin: Option<usize>,
    /// Tree vertices left unembedded (must be closed under descendants).
    pub skip: Option<&'a [bool]>,
    /// Tree vertices whose edge to the parent is virtual: any free vertex
    /// may host them.
    pub loose: Option<&'a [bool]>,
}

/// Guarded greedy tree growth with backtracking. Tree vertices are placed
/// in BFS order; a candidate must keep enough free neighbours for its own
/// children and must not starve any placed vertex of the free neighbours
/// its pending children need. `hook` sees every complete placement and may
/// reject it, which resumes the search. On success the images stay taken
/// in `pool`; on failure the pool is restored.
pub(crate) fn grow_tree(
    g: &Graph,
    pool: &mut FreePool,
    t: &Tree,
    spec: &GrowSpec<'_>,
    budget: u64,
    hook: &mut dyn FnMut(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    let skipped = |u: usize| spec.skip.is_some_and(|s| s[u]);
    let loose = |u: usize| spec.loose.is_some_and(|s| s[u]);
    let order: Vec<usize> = t.bfs_order().into_iter().filter(|&u| !skipped(u)).collect();
    let need: Vec<usize> = (0..t.n()).map(|u| t.children(u).count()).collect();
    let mut img = vec![NONE; t.n()];
    let mut pend = vec![0usize; g.n()];
    let mut taken = vec![false; t.n()];
    let mut frames: Vec<(Vec<usize>, usize)> = Vec::with_capacity(order.len());
    let mut steps = 0u64;
    let mut i = 0usize;

    let unplace = |u: usize, img: &mut Vec<usize>, taken: &mut Vec<bool>, pend: &mut Vec<usize>, pool: &mut FreePool| {
        let v = img[u];
        pend[v] = 0;
        if let Some(p) = t.parent(u) {
            if img[p] != NONE {
                pend[img[p]] += 1;
            }
        }
        if taken[u] {
            pool.release(g, v);
            taken[u] = false;
        }
        img[u] = NONE;
    };

    loop {
        if i == order.len() {
            if hook(&img) {
                return Some(img);
            }
            if i == 0 {
                return None;
            }
            i -= 1;
            continue;
        }
        steps += 1;
        if steps > budget {
            for &u in order.iter().rev() {
                if img[u] != NONE {
                    unplace(u, &mut img, &mut taken, &mut pend, pool);
                }
            }
            return None;
        }
        let u = order[i];
        if img[u] != NONE {
            unplace(u, &mut img, &mut taken, &mut pend, pool);
        }
        if frames.len() == i {
            let cands = if i == 0 && spec.pin.is_some() {
                vec![spec.pin.unwrap()]
            } else if i == 0 || loose(u) {
                let mut c = pool.free_vertices();
                c.sort_by_key(|&v| (pool.freedeg(v), v));
                c
            } else {
                let p = img[t.parent(u).expect("non-root has a parent")];
                pool.ordered_free_neighbors(g, p)
            };
            frames.push((cands, 0));
        }
        let parent_img = t.parent(u).map(|p| img[p]).filter(|&v| v != NONE);
        let mut placed = false;
        while frames[i].1 < frames[i].0.len() {
            let c = frames[i].0[frames[i].1];
            frames[i].1 += 1;
            let pinned_external = i == 0 && spec.pin == Some(c) && !pool.is_free(c);
            if !pinned_external {
                if !pool.is_free(c) || pool.freedeg(c) < need[u] {
                    continue;
                }
                let starves = g.neighbors(c).iter().any(|&y| {
                    pend[y] > 0 && Some(y) != parent_img && pool.freedeg(y) < pend[y] + 1
                });
                if starves {
                    continue;
                }
                pool.take(g, c);
                taken[u] = true;
            }
            img[u] = c;
            pend[c] = need[u];
            if let Some(p) = parent_img {
                pend[p] -= 1;
            }
            placed = true;
            break;
        }
        if placed {
            i += 1;
        } else {
            frames.pop();
            if i == 0 {
                return None;
            }
            i -= 1;
        }
    }
}

/// Exact-length path search from `a` to `b` whose internal vertices are
/// free in `pool`; pruned by BFS distances to `b` inside the free set.
pub(crate) fn grow_path(
    g: &Graph,
    pool: &mut FreePool,
    a: usize,
    b: usize,
    len: usize,
    budget: u64,
    hook: &mut dyn FnMut(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    if len == 0 || a == b {
        return None;
    }
    if len == 1 {
        let p = vec![a, b];
        return (g.adjacent(a, b) && hook(&p)).then_some(p);
    }
    let mut dist = vec![usize::MAX; g.n()];
    dist[b] = 0;
    let mut q = VecDeque::from([b]);
    while let Some(v) = q.pop_front() {
        for &u in g.neighbors(v) {
            if pool.is_free(u) && dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
        }
    }
    let mut path = vec![a];
    let mut frames: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut steps = 0u64;
    loop {
        let cur = *path.last().unwrap();
        let rem = len + 1 - path.len();
        if rem == 1 {
            if g.adjacent(cur, b) {
                path.push(b);
                if hook(&path) {
                    return Some(path);
                }
                path.pop();
            }
        } else if frames.len() < path.len() {
            let mut c = pool.ordered_free_neighbors(g, cur);
            c.retain(|&v| dist[v] < rem && v != a);
            frames.push((c, 0));
        }
        steps += 1;
        let advanced = if rem > 1 && steps <= budget {
            let f = frames.last_mut().unwrap();
            if f.1 < f.0.len() {
                let c = f.0[f.1];
                f.1 += 1;
                pool.take(g, c);
                path.push(c);
                true
            } else {
                false
            }
        } else {
            false
        };
        if !advanced {
            if rem > 1 {
                frames.pop();
            }
            if path.len() == 1 || steps > budget {
                for &v in &path[1..] {
                    pool.release(g, v);
                }
                return None;
            }
            let v = path.pop().unwrap();
            pool.release(g, v);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    Exact,
    Sampled { trials: usize, seed: u64 },
    /// Exact when the enumeration fits [`AUTO_EXACT_LIMIT`], sampled otherwise.
    Auto { trials: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    /// Cardinality preconditions are errors.
    Strict,
    /// Cardinality preconditions are recorded as warnings.
    Desk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub mode: VerifyMode,
    /// Re-check extendability of every grown structure and reject failures.
    pub enforce: bool,
    pub budget: u64,
    pub strictness: Strictness,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            mode: VerifyMode::Auto { trials: 2_000, seed: 0 },
            enforce: true,
            budget: DEFAULT_GROWTH_BUDGET,
            strictness: Strictness::Strict,
        }
    }
}

impl GrowthConfig {
    pub fn desk() -> Self {
        GrowthConfig { strictness: Strictness::Desk, ..GrowthConfig::default() }
    }
}

/// A subgraph `S` of `host[allowed]`, tracked by its vertex set and the
/// degree of each vertex inside `S`.
#[derive(Clone, Debug)]
pub struct ExtendableState<'g> {
    host: &'g Graph,
    allowed: VertexSet,
    sub: VertexSet,
    sub_degrees: Vec<usize>,
    pub d: usize,
    pub m: usize,
    pool: FreePool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendCheck {
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
    pub exact: bool,
}

impl<'g> ExtendableState<'g> {
    /// Empty graph on `start` inside `host[allowed]`.
    pub fn new(host: &'g Graph, allowed: &VertexSet, start: &[usize], d: usize, m: usize) -> Result<Self> {
        if d < 3 || m < 1 {
            return Err(Error::InvalidParameter(format!("extendability needs d ≥ 3 and m ≥ 1, got d={d}, m={m}")));
        }
        let n = host.n();
        let mut sub = VertexSet::new(n);
        start.iter().for_each(|&v| sub.insert(v));
        let allowed = allowed.union(&sub);
        let pool = FreePool::new(host, &allowed.difference(&sub));
        Ok(ExtendableState { host, allowed, sub, sub_degrees: vec![0; n], d, m, pool, warnings: Vec::new() })
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    pub fn allowed(&self) -> &VertexSet {
        &self.allowed
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.sub
    }

    pub fn degree_in_sub(&self, v: usize) -> usize {
        self.sub_degrees[v]
    }

    pub fn max_sub_degree(&self) -> usize {
        self.sub.iter().map(|v| self.sub_degrees[v]).max().unwrap_or(0)
    }

    /// Adds the edges of a walk (vertices consecutive in `walk`).
    fn absorb(&mut self, edges: &[(usize, usize)]) {
        for &(u, v) in edges {
            for x in [u, v] {
                if !self.sub.contains(x) {
                    self.sub.insert(x);
                    if self.pool.is_free(x) {
                        self.pool.take(self.host, x);
                    }
                }
            }
            self.sub_degrees[u] += 1;
            self.sub_degrees[v] += 1;
        }
    }

    /// `|Γ(X) \ V(S)| − ((d−1)|X| − Σ_{x∈X∩S}(d(x,S)−1))`, with `Γ` inside
    /// `allowed`. Negative means `X` violates extendability.
    pub fn slack_of(&self, x: &[usize]) -> i64 {
        let mut gamma = VertexSet::new(self.host.n());
        for &v in x {
            for &u in self.host.neighbors(v) {
                if self.allowed.contains(u) && !self.sub.contains(u) {
                    gamma.insert(u);
                }
            }
        }
        gamma.len() as i64 - self.rhs(x)
    }

    fn rhs(&self, x: &[usize]) -> i64 {
        let credit: i64 =
            x.iter().filter(|&&v| self.sub.contains(v)).map(|&v| self.sub_degrees[v] as i64 - 1).sum();
        (self.d as i64 - 1) * x.len() as i64 - credit
    }

    fn hypothetical(&self, edges: &[(usize, usize)]) -> ExtendableState<'g> {
        let mut s = self.clone();
        s.absorb(edges);
        s
    }

    fn precondition(&mut self, strictness: Strictness, ok: bool, msg: String) -> Result<()> {
        if ok {
            return Ok(());
        }
        match strictness {
            Strictness::Strict => Err(Error::PreconditionViolated(msg)),
            Strictness::Desk => {
                self.warnings.push(msg);
                Ok(())
            }
        }
    }
}

fn exact_sets_needed(universe: usize, m: usize) -> u128 {
    (1..=2 * m).map(|j| binomial(universe, j)).fold(0, u128::saturating_add)
}

/// Checks the extendability inequality for sets of size at most `2m`.
pub fn is_extendable(state: &ExtendableState<'_>, mode: VerifyMode) -> Result<ExtendCheck> {
    if state.max_sub_degree() > state.d {
        let v = state.sub.iter().find(|&v| state.sub_degrees[v] > state.d).unwrap();
        return Ok(ExtendCheck { holds: false, witness: Some(vec![v]), exact: true });
    }
    let items = state.allowed.to_vec();
    let needed = exact_sets_needed(items.len(), state.m);
    let exact = match mode {
        VerifyMode::Exact => {
            subsets::check_budget(needed, subsets::DEFAULT_BUDGET as u64)?;
            true
        }
        VerifyMode::Sampled { .. } => false,
        VerifyMode::Auto { .. } => needed <= AUTO_EXACT_LIMIT,
    };
    if exact {
        let outside = state.allowed.difference(&state.sub);
        let mut witness = None;
        for j in 1..=(2 * state.m).min(items.len()) {
            let done = subsets::for_each_subset_with_union(state.host, &items, j, |x, union| {
                let gamma = union.intersection_count(outside.bits()) as i64;
                if gamma < state.rhs(x) {
                    witness = Some(x.to_vec());
                    return false;
                }
                true
            });
            if !done {
                break;
            }
        }
        return Ok(ExtendCheck { holds: witness.is_none(), witness, exact: true });
    }
    let (trials, seed) = match mode {
        VerifyMode::Sampled { trials, seed } | VerifyMode::Auto { trials, seed } => (trials, seed),
        VerifyMode::Exact => unreachable!(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &v in &items {
        if state.slack_of(&[v]) < 0 {
            return Ok(ExtendCheck { holds: false, witness: Some(vec![v]), exact: false });
        }
    }
    let sub = state.sub.to_vec();
    for _ in 0..trials {
        let size = rng.gen_range(1..=(2 * state.m).min(items.len()));
        let mut x: Vec<usize> = Vec::with_capacity(size);
        let mut frontier: Vec<usize> = if !sub.is_empty() && rng.gen_bool(0.5) {
            vec![sub[rng.gen_range(0..sub.len())]]
        } else {
            vec![items[rng.gen_range(0..items.len())]]
        };
        while x.len() < size {
            let v = if !frontier.is_empty() && rng.gen_bool(0.7) {
                frontier.swap_remove(rng.gen_range(0..frontier.len()))
            } else {
                items[rng.gen_range(0..items.len())]
            };
            if !x.contains(&v) {
                x.push(v);
                frontier.extend(state.host.neighbors(v).iter().filter(|&&u| state.allowed.contains(u)));
            }
        }
        if state.slack_of(&x) < 0 {
            x.sort_unstable();
            return Ok(ExtendCheck { holds: false, witness: Some(x), exact: false });
        }
    }
    Ok(ExtendCheck { holds: true, witness: None, exact: false })
}

/// `⌈log(2m) / log(d − 1)⌉`, the radius used by path extension.
pub fn extension_radius(d: usize, m: usize) -> usize {
    if m == 0 || d < 3 {
        return 0;
    }
    let k = ((2 * m) as f64).ln() / ((d - 1) as f64).ln();
    (k - 1e-12).ceil().max(0.0) as usize
}

fn edges_of_path(p: &[usize]) -> Vec<(usize, usize)> {
    p.windows(2).map(|w| (w[0], w[1])).collect()
}

fn accept(state: &ExtendableState<'_>, cfg: &GrowthConfig, edges: &[(usize, usize)]) -> bool {
    if !cfg.enforce {
        return true;
    }
    let next = state.hypothetical(edges);
    is_extendable(&next, cfg.mode).map(|c| c.holds).unwrap_or(false)
}

/// Grows an `(a, b)`-path with exactly `len` edges and internal vertices
/// outside `S`, then adds it to `S`.
pub fn extend_path(
    state: &mut ExtendableState<'_>,
    a: usize,
    b: usize,
    len: usize,
    cfg: &GrowthConfig,
) -> Result<Vec<usize>> {
    if !state.sub.contains(a) || !state.sub.contains(b) || a == b {
        return Err(Error::PreconditionViolated("path ends must be distinct vertices of S".into()));
    }
    let k = extension_radius(state.d, state.m);
    state.precondition(cfg.strictness, len > 2 * k, format!("length {len} < 2k+1 = {} (k = {k})", 2 * k + 1))?;
    let half = state.d / 2;
    let ok = state.sub_degrees[a] <= half && state.sub_degrees[b] <= half;
    state.precondition(cfg.strictness, ok, format!("end degree in S exceeds d/2 = {half}"))?;
    let bound = state.allowed.len() as i64 - 10 * (state.d * state.m) as i64 - (len as i64 - 2 * k as i64 - 1);
    let size = state.sub.len();
    state.precondition(
        cfg.strictness,
        size as i64 <= bound,
        format!("|S| = {size} > |G| − 10dm − (len−2k−1) = {bound}"),
    )?;
    let snapshot = state.clone();
    let host = state.host;
    let path = grow_path(host, &mut state.pool, a, b, len, cfg.budget, &mut |p| {
        accept(&snapshot, cfg, &edges_of_path(p))
    })
    .ok_or_else(|| Error::exhausted("extend_path"))?;
    state.absorb(&edges_of_path(&path));
    Ok(path)
}

/// Grows a copy of `t` whose root sits on `root_in_s` and whose other
/// vertices avoid `S`; returns the image of every tree vertex.
pub fn extend_tree(state: &mut ExtendableState<'_>, root_in_s: usize, t: &Tree, cfg: &GrowthConfig) -> Result<Vec<usize>> {
    if !state.sub.contains(root_in_s) {
        return Err(Error::PreconditionViolated("tree root must lie in S".into()));
    }
    if t.max_degree() + 1 > state.d {
        return Err(Error::PreconditionViolated(format!("Δ(t) = {} > d − 1 = {}", t.max_degree(), state.d - 1)));
    }
    let bound = state.allowed.len() as i64 - (2 * state.d * state.m + 3 * state.m) as i64;
    let total = (state.sub.len() + t.n()) as i64;
    state.precondition(cfg.strictness, total <= bound, format!("|S| + |t| = {total} > |G| − 2dm − 3m = {bound}"))?;
    if t.n() == 1 {
        return Ok(vec![root_in_s]);
    }
    let snapshot = state.clone();
    let host = state.host;
    let spec = GrowSpec { pin: Some(root_in_s), ..GrowSpec::default() };
    let images = grow_tree(host, &mut state.pool, t, &spec, cfg.budget, &mut |img| {
        let edges: Vec<(usize, usize)> = t.edges().iter().map(|&(p, c)| (img[p], img[c])).collect();
        accept(&snapshot, cfg, &edges)
    })
    .ok_or_else(|| Error::exhausted("extend_tree"))?;
    let edges: Vec<(usize, usize)> = t.edges().iter().map(|&(p, c)| (images[p], images[c])).collect();
    state.absorb(&edges);
    Ok(images)
}

/// Largest tree order the almost-spanning theorem guarantees in `w`:
/// `|w| − 4Δ⌈|w| / (2 d_exp)⌉`.
pub fn almost_spanning_capacity(w: usize, d_exp: f64, delta: usize) -> usize {
    let chunk = (w as f64 / (2.0 * d_exp)).ceil() as usize;
    w.saturating_sub(4 * delta * chunk)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostSpanningOptions {
    pub strictness: Strictness,
    pub budget: u64,
    /// Place leaves last through a star matching from their parents.
    pub defer_leaves: bool,
    /// Pin a tree vertex to a host vertex.
    pub pin: Option<(usize, usize)>,
}

impl Default for AlmostSpanningOptions {
    fn default() -> Self {
        AlmostSpanningOptions { strictness: Strictness::Strict, budget: DEFAULT_GROWTH_BUDGET, defer_leaves: true, pin: None }
    }
}

/// Embeds `t` into `w` by guarded greedy growth; leaves are optionally
/// attached at the end through a star matching. Vertices of `t` joined by
/// a virtual edge (`loose`) need not be adjacent in the host, which lets a
/// forest be embedded as one tree.
pub fn embed_almost_spanning(
    g: &Graph,
    w: &VertexSet,
    t: &Tree,
    d_exp: f64,
    opts: &AlmostSpanningOptions,
) -> Result<Embedding> {
    let cap = almost_spanning_capacity(w.len(), d_exp, t.max_degree());
    if t.n() > cap {
        match opts.strictness {
            Strictness::Strict => return Err(Error::CapacityExceeded { tree: t.n(), capacity: cap }),
            Strictness::Desk if t.n() > w.len() => {
                return Err(Error::CapacityExceeded { tree: t.n(), capacity: w.len() })
            }
            Strictness::Desk => {}
        }
    }
    let mut pool = FreePool::new(g, w);
    let images = embed_into_pool(g, &mut pool, t, None, opts)?;
    Ok(Embedding::from_images(&images))
}

/// Shared body of [`embed_almost_spanning`], also used by the pipeline on
/// a persistent pool and with virtual edges.
pub(crate) fn embed_into_pool(
    g: &Graph,
    pool: &mut FreePool,
    t: &Tree,
    loose: Option<&[bool]>,
    opts: &AlmostSpanningOptions,
) -> Result<Vec<usize>> {
    let t = match opts.pin {
        Some((u, _)) if u != t.root() => t.rerooted(u),
        _ => t.clone(),
    };
    let pin = opts.pin.map(|p| p.1);
    let pin_was_free = pin.is_some_and(|p| pool.is_free(p));
    if opts.defer_leaves && t.n() >= 3 {
        let skip: Vec<bool> = (0..t.n())
            .map(|u| u != t.root() && t.is_leaf(u) && !loose.is_some_and(|l| l[u]))
            .collect();
        let spec = GrowSpec { pin, skip: Some(&skip), loose };
        if let Some(mut img) = grow_tree(g, pool, &t, &spec, opts.budget, &mut |_| true) {
            if attach_leaves(g, pool, &t, &skip, &mut img) {
                return Ok(img);
            }
            release_images(g, pool, &img, pin.filter(|_| !pin_was_free));
        }
    }
    let spec = GrowSpec { pin, skip: None, loose };
    grow_tree(g, pool, &t, &spec, opts.budget, &mut |_| true)
        .ok_or_else(|| Error::EmbeddingFailed(format!("no placement of a {}-vertex tree within budget", t.n())))
}

/// Returns every image to the pool except an externally pinned root.
fn release_images(g: &Graph, pool: &mut FreePool, img: &[usize], external: Option<usize>) {
    for &v in img {
        if v != NONE && Some(v) != external && !pool.is_free(v) {
            pool.release(g, v);
        }
    }
}

/// Matches skipped leaves to free vertices adjacent to their parents' images.
fn attach_leaves(g: &Graph, pool: &mut FreePool, t: &Tree, skip: &[bool], img: &mut [usize]) -> bool {
    let mut counts: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for u in 0..t.n() {
        if skip[u] {
            let p = t.parent(u).expect("skipped leaves have parents");
            counts.entry(img[p]).or_default().push(u);
        }
    }
    if counts.is_empty() {
        return true;
    }
    let a: Vec<usize> = counts.keys().copied().collect();
    let f: Vec<usize> = counts.values().map(Vec::len).collect();
    let b = pool.free_vertices();
    let Ok(demand) = StarDemand::new(&a, &b, &f) else { return false };
    match saturating_star_matching(g, &demand) {
        MatchOutcome::Matching(m) => {
            for (centre, leaves) in &m.stars {
                for (&u, &v) in counts[centre].iter().zip(leaves) {
                    img[u] = v;
                    pool.take(g, v);
                }
            }
            true
        }
        MatchOutcome::Violator(_) => false,
    }
}

/// One realised connection: `pairs[index]` joined by `path`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub index: usize,
    pub path: Vec<usize>,
    /// Whether the two-tree construction produced it (else the direct search).
    pub via_trees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectConfig {
    pub strictness: Strictness,
    pub seed: u64,
    pub budget: u64,
    /// Random sets tried per peeling round when exhaustive search is too large.
    pub peel_trials: usize,
    /// Fall back to a direct exact-length search when the trees do not meet.
    pub fallback: bool,
}

impl Default for ConnectConfig {
    fn default() -> Self {
        ConnectConfig { strictness: Strictness::Strict, seed: 0, budget: DEFAULT_GROWTH_BUDGET, peel_trials: 2_000, fallback: false }
    }
}

impl ConnectConfig {
    pub fn desk(seed: u64) -> Self {
        ConnectConfig { strictness: Strictness::Desk, seed, fallback: true, ..ConnectConfig::default() }
    }
}

fn log_ratio(a: f64, b: f64) -> f64 {
    if a <= 1.0 {
        0.0
    } else {
        a.ln() / b.ln()
    }
}

/// Removes small sets of `part` expanding by less than `2 d1` inside it,
/// until no violating set of size at most `m` is found.
pub fn peel_bad_sets(g: &Graph, part: &[usize], d1: usize, m: usize, trials: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive: Vec<usize> = part.to_vec();
    let mut removed = Vec::new();
    loop {
        let set = VertexSet::from_iter(g.n(), alive.iter().copied());
        let expands = |x: &[usize]| {
            let mut gamma = VertexSet::new(g.n());
            for &v in x {
                g.neighbors(v).iter().filter(|&&u| set.contains(u)).for_each(|&u| gamma.insert(u));
            }
            x.iter().for_each(|&v| gamma.remove(v));
            gamma.len() >= 2 * d1 * x.len()
        };
        let mut bad: Option<Vec<usize>> = None;
        let needed: u128 = (1..=m).map(|j| binomial(alive.len(), j)).fold(0, u128::saturating_add);
        if m <= 3 && needed <= AUTO_EXACT_LIMIT {
            for j in 1..=m.min(alive.len()) {
                subsets::for_each_subset(&alive, j, |x| {
                    if expands(x) {
                        true
                    } else {
                        bad = Some(x.to_vec());
                        false
                    }
                });
                if bad.is_some() {
                    break;
                }
            }
        } else {
            for &v in &alive {
                if !expands(&[v]) {
                    bad = Some(vec![v]);
                    break;
                }
            }
            for _ in 0..trials {
                if bad.is_some() || alive.is_empty() {
                    break;
                }
                let size = rng.gen_range(1..=m.min(alive.len()));
                let x: Vec<usize> = alive.choose_multiple(&mut rng, size).copied().collect();
                if !expands(&x) {
                    bad = Some(x);
                }
            }
        }
        match bad {
            Some(x) if !x.is_empty() => {
                alive.retain(|v| !x.contains(v));
                removed.extend(x);
            }
            _ => return (alive, removed),
        }
    }
}

/// Joins one of the given pairs by a path of exactly its prescribed length
/// with all internal vertices in `u`: each half of `u` is pruned to an
/// expanding core, a `d1`-ary tree with a stub is grown from `x_j` in one
/// core and from `y_j` in the other, and the deepest levels are joined by
/// an edge.
pub fn connect_exact_length(
    g: &Graph,
    pairs: &[(usize, usize)],
    u: &VertexSet,
    lengths: &[usize],
    d1: usize,
    m: usize,
    cfg: &ConnectConfig,
) -> Result<Connection> {
    if pairs.is_empty() || pairs.len() != lengths.len() {
        return Err(Error::InvalidParameter("pairs and lengths must be non-empty and aligned".into()));
    }
    if d1 < 2 || m < 1 {
        return Err(Error::InvalidParameter(format!("need d1 ≥ 2 and m ≥ 1, got d1={d1}, m={m}")));
    }
    let lower = 2.0 * log_ratio(m as f64, d1 as f64) + 1.0;
    for &k in lengths {
        if 2 * k > u.len() {
            return Err(Error::PreconditionViolated(format!("length {k} > |U|/2 = {}", u.len() as f64 / 2.0)));
        }
        if (k as f64) < lower - 1e-9 {
            return Err(Error::PreconditionViolated(format!("length {k} < 2 log m / log d1 + 1 = {lower:.3}")));
        }
    }
    if cfg.strictness == Strictness::Strict {
        if pairs.len() != 2 * m {
            return Err(Error::PreconditionViolated(format!("{} pairs given, 2m = {}", pairs.len(), 2 * m)));
        }
        if u.len() < 20 * d1 * m {
            return Err(Error::PreconditionViolated(format!("|U| = {} < 20·d1·m = {}", u.len(), 20 * d1 * m)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut items = u.to_vec();
    items.shuffle(&mut rng);
    let (h1, h2) = items.split_at(items.len() / 2);
    let (v1, _) = peel_bad_sets(g, h1, d1, m, cfg.peel_trials, cfg.seed ^ 1);
    let (v2, _) = peel_bad_sets(g, h2, d1, m, cfg.peel_trials, cfg.seed ^ 2);
    let v1s = VertexSet::from_iter(g.n(), v1.iter().copied());
    let v2s = VertexSet::from_iter(g.n(), v2.iter().copied());
    let height = log_ratio(m as f64, d1 as f64).ceil() as usize;
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&j| {
        let (x, y) = pairs[j];
        let score = g.degree_into(x, &v1s).min(g.degree_into(y, &v2s));
        (score < 2 * d1, j)
    });
    for &j in &order {
        let (x, y) = pairs[j];
        let k = lengths[j];
        if k / 2 < height + 1 {
            continue;
        }
        let stub1 = k / 2 - height - 1;
        let stub2 = k.div_ceil(2) - height;
        if let Some(path) = join_two_trees(g, (x, &v1s, stub1), (y, &v2s, stub2), d1, height, cfg.budget) {
            debug_assert_eq!(path.len(), k + 1);
            return Ok(Connection { index: j, path, via_trees: true });
        }
    }
    if cfg.fallback {
        let mut pool = FreePool::new(g, u);
        for &j in &order {
            let (x, y) = pairs[j];
            if let Some(path) = grow_path(g, &mut pool, x, y, lengths[j], cfg.budget, &mut |_| true) {
                return Ok(Connection { index: j, path, via_trees: false });
            }
        }
    }
    Err(Error::exhausted("connect_exact_length"))
}

/// `d`-ary tree of the given height with a path of `stub` edges hanging off
/// its root; the far end of the stub is the returned tree's root.
fn stubbed_tree(d: usize, height: usize, stub: usize) -> (Tree, usize, Vec<usize>) {
    let core = families::complete_kary(d, height);
    let n = core.n() + stub;
    let mut edges: Vec<(usize, usize)> = core.edges().iter().map(|&(p, c)| (p + stub, c + stub)).collect();
    for i in 0..stub {
        edges.push((i, i + 1));
    }
    let t = Tree::from_edges(n, &edges, 0).expect("stubbed tree");
    let depths = core.depths();
    let last: Vec<usize> = (0..core.n()).filter(|&v| depths[v] == height).map(|v| v + stub).collect();
    (t, stub + core.root(), last)
}

fn join_two_trees(
    g: &Graph,
    a: (usize, &VertexSet, usize),
    b: (usize, &VertexSet, usize),
    d1: usize,
    height: usize,
    budget: u64,
) -> Option<Vec<usize>> {
    let mut pool1 = FreePool::new(g, a.1);
    let mut pool2 = FreePool::new(g, b.1);
    let (t1, _, last1) = stubbed_tree(d1, height, a.2);
    let (t2, _, last2) = stubbed_tree(d1, height, b.2);
    let img1 = grow_tree(g, &mut pool1, &t1, &GrowSpec { pin: Some(a.0), ..Default::default() }, budget, &mut |_| true)?;
    let img2 = grow_tree(g, &mut pool2, &t2, &GrowSpec { pin: Some(b.0), ..Default::default() }, budget, &mut |_| true)?;
    for &w1 in &last1 {
        for &w2 in &last2 {
            if g.adjacent(img1[w1], img2[w2]) {
                let mut p = tree_path(&t1, w1).iter().map(|&v| img1[v]).collect::<Vec<_>>();
                p.reverse();
                p.extend(tree_path(&t2, w2).iter().map(|&v| img2[v]));
                return Some(p);
            }
        }
    }
    None
}

/// Vertices from `v` up to the root.
fn tree_path(t: &Tree, mut v: usize) -> Vec<usize> {
    let mut p = vec![v];
    while let Some(u) = t.parent(v) {
        p.push(u);
        v = u;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::verify_embedding;
    use crate::tree::random_bounded_tree;

    #[test]
    fn extendability_examples() {
        let k20 = Graph::complete(20);
        let all = k20.vertices();
        let s = ExtendableState::new(&k20, &all, &[], 3, 2).unwrap();
        assert!(is_extendable(&s, VerifyMode::Exact).unwrap().holds);

        let s = ExtendableState::new(&k20, &all, &(0..20).collect::<Vec<_>>(), 3, 2).unwrap();
        let c = is_extendable(&s, VerifyMode::Exact).unwrap();
        assert!(!c.holds && c.witness.is_some());

        let c12 = Graph::cycle(12);
        let mut s = ExtendableState::new(&c12, &c12.vertices(), &[0, 1], 3, 1).unwrap();
        s.absorb(&[(0, 1)]);
        let c = is_extendable(&s, VerifyMode::Exact).unwrap();
        assert!(!c.holds);
        assert_eq!(s.slack_of(&[0]), 1 - 2);
    }

    #[test]
    fn radius_and_bounds() {
        assert_eq!(extension_radius(4, 3), 2);
        let k50 = Graph::complete(50);
        let mut s = ExtendableState::new(&k50, &k50.vertices(), &[0, 1], 4, 3).unwrap();
        let e = extend_path(&mut s, 0, 1, 4, &GrowthConfig::default());
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));

        let g = Graph::complete(30);
        let start: Vec<usize> = (0..20).collect();
        let mut s = ExtendableState::new(&g, &g.vertices(), &start, 3, 2).unwrap();
        let e = extend_tree(&mut s, 0, &families::path(5), &GrowthConfig::default());
        assert!(matches!(e, Err(Error::PreconditionViolated(m)) if m.contains("25") && m.contains("12")));
    }

    #[test]
    fn path_in_complete_graph() {
        let k50 = Graph::complete(50);
        let mut s = ExtendableState::new(&k50, &k50.vertices(), &[0, 1], 3, 2).unwrap();
        let cfg = GrowthConfig { mode: VerifyMode::Exact, ..GrowthConfig::desk() };
        let p = extend_path(&mut s, 0, 1, 5, &cfg).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!((p[0], p[5]), (0, 1));
        assert!(p.windows(2).all(|w| k50.adjacent(w[0], w[1])));
        assert!(is_extendable(&s, VerifyMode::Exact).unwrap().holds);
    }

    #[test]
    fn tree_in_complete_graph() {
        let k40 = Graph::complete(40);
        let mut s = ExtendableState::new(&k40, &k40.vertices(), &[7], 4, 2).unwrap();
        let t = families::complete_kary(3, 1);
        let img = extend_tree(&mut s, 7, &t, &GrowthConfig::default()).unwrap();
        assert_eq!(img[t.root()], 7);
        assert_eq!(s.vertices().len(), 4);
        let single = extend_tree(&mut s, 7, &families::path(1), &GrowthConfig::default()).unwrap();
        assert_eq!(single, vec![7]);
    }

    #[test]
    fn capacity_and_trivial_embedding() {
        assert_eq!(almost_spanning_capacity(100, 10.0, 3), 40);
        let k30 = Graph::complete(30);
        let t = families::path(10);
        let e = embed_almost_spanning(&k30, &k30.vertices(), &t, 29.0, &AlmostSpanningOptions::default()).unwrap();
        assert!(verify_embedding(&k30, &t, &e, false).valid);
        let big = families::path(31);
        assert!(matches!(
            embed_almost_spanning(&k30, &k30.vertices(), &big, 29.0, &AlmostSpanningOptions::default()),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn spanning_leaf_matching_in_complete_graph() {
        let g = Graph::complete(60);
        let t = random_bounded_tree(60, 3, 4).unwrap();
        let opts = AlmostSpanningOptions { strictness: Strictness::Desk, ..Default::default() };
        let e = embed_almost_spanning(&g, &g.vertices(), &t, 30.0, &opts).unwrap();
        assert!(verify_embedding(&g, &t, &e, true).valid);
    }

    #[test]
    fn connect_in_complete_graph() {
        let g = Graph::complete(60);
        let pairs = vec![(0, 1), (2, 3), (4, 5), (6, 7)];
        let u = VertexSet::from_iter(60, 8..48);
        let cfg = ConnectConfig { strictness: Strictness::Desk, ..Default::default() };
        let c = connect_exact_length(&g, &pairs, &u, &[6; 4], 2, 2, &cfg).unwrap();
        assert!(c.via_trees);
        assert_eq!(c.path.len(), 7);
        assert_eq!((c.path[0], c.path[6]), pairs[c.index]);
        assert!(c.path[1..6].iter().all(|&v| u.contains(v)));
        assert!(c.path.windows(2).all(|w| g.adjacent(w[0], w[1])));

        let e = connect_exact_length(&g, &pairs, &u, &[21; 4], 2, 2, &cfg);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
    }
}
