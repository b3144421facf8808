//! Exact path covers by absorption: fans, the flexible bipartite template,
//! the absorbing structure and the three-phase cover of prescribed pairs by
//! disjoint paths of one fixed length.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extendable::{connect_exact_length, ConnectConfig, Strictness};
use crate::graph::{Graph, VertexSet};
use crate::matching::{f_matching, MatchOutcome, StarDemand};
use crate::subsets::{self, binomial};
use crate::tree_array::NamedInequality;

/// The constant `c` fixing how many pairs survive Phase 2.
pub const LEFTOVER_C: f64 = 0.125;

/// Largest template degree the construction may use.
pub const TEMPLATE_MAX_DEGREE: usize = 40;

/// `k` triangles through a common root, otherwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub root: usize,
    pub triangles: Vec<(usize, usize, usize)>,
    pub absorbers: Vec<(usize, usize)>,
}

impl Fan {
    pub fn k(&self) -> usize {
        self.triangles.len()
    }

    /// Triangles present in `g`, sharing only the root, absorbers matching.
    pub fn is_valid(&self, g: &Graph) -> bool {
        let mut seen = VertexSet::new(g.n());
        if self.absorbers.len() != self.triangles.len() {
            return false;
        }
        for (&(v, a, b), &e) in self.triangles.iter().zip(&self.absorbers) {
            if v != self.root || e != (a, b) || a == b || a == v || b == v {
                return false;
            }
            if !(g.adjacent(v, a) && g.adjacent(v, b) && g.adjacent(a, b)) {
                return false;
            }
            for x in [a, b] {
                if seen.contains(x) {
                    return false;
                }
                seen.insert(x);
            }
        }
        true
    }
}

/// Greedy `k`-edge matching inside `N(v) ∩ s`, closed into a `k`-fan at `v`.
pub fn build_fan(g: &Graph, v: usize, k: usize, s: &VertexSet) -> Result<Fan> {
    if k == 0 {
        return Err(Error::InvalidParameter("fans need k ≥ 1".into()));
    }
    let nbhd: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| u != v && s.contains(u)).collect();
    let mut used = VertexSet::new(g.n());
    let mut triangles = Vec::with_capacity(k);
    for &a in &nbhd {
        if triangles.len() == k {
            break;
        }
        if used.contains(a) {
            continue;
        }
        if let Some(&b) = nbhd.iter().find(|&&b| b != a && !used.contains(b) && g.adjacent(a, b)) {
            used.insert(a);
            used.insert(b);
            triangles.push((v, a, b));
        }
    }
    if triangles.len() < k {
        return Err(Error::InsufficientNeighborhood { vertex: v, k });
    }
    let absorbers = triangles.iter().map(|&(_, a, b)| (a, b)).collect();
    Ok(Fan { root: v, triangles, absorbers })
}

/// Bipartite `H` between `X = [3t]` and `Y ∪ Z` with `|Y| = |Z| = 2t`.
/// Right-hand indices `0..2t` are `Y`, `2t..4t` are `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateGraph {
    pub t: usize,
    /// Number of random injections whose union forms `H`.
    pub rounds: usize,
    pub adj: Vec<Vec<usize>>,
    /// How many half-size `Z′` were audited, and whether all of them were.
    pub audited: usize,
    pub exhaustive: bool,
}

impl TemplateGraph {
    pub fn x_len(&self) -> usize {
        3 * self.t
    }

    pub fn right_len(&self) -> usize {
        4 * self.t
    }

    pub fn z_range(&self) -> std::ops::Range<usize> {
        2 * self.t..4 * self.t
    }

    pub fn max_degree(&self) -> usize {
        let mut right = vec![0usize; self.right_len()];
        self.adj.iter().flatten().for_each(|&j| right[j] += 1);
        self.adj.iter().map(Vec::len).chain(right).max().unwrap_or(0)
    }

    /// Perfect matching `X ↔ Y ∪ Z′`, as `x → right index`.
    pub fn matching_with(&self, z_prime: &[usize]) -> Option<Vec<usize>> {
        let nx = self.x_len();
        let right: Vec<usize> = (0..2 * self.t).chain(z_prime.iter().copied()).collect();
        if right.len() != nx {
            return None;
        }
        let slot: BTreeMap<usize, usize> = right.iter().enumerate().map(|(i, &j)| (j, nx + i)).collect();
        let edges = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(i, js)| js.iter().filter_map(|j| slot.get(j)).map(move |&s| (i, s)))
            .collect::<Vec<_>>();
        let g = Graph::from_edges(2 * nx, edges).ok()?;
        let a: Vec<usize> = (0..nx).collect();
        let b: Vec<usize> = (nx..2 * nx).collect();
        let demand = StarDemand::uniform(&a, &b, 1).ok()?;
        match f_matching(&g, &demand).ok()? {
            MatchOutcome::Matching(m) => Some((0..nx).map(|i| right[m.stars[&i][0] - nx]).collect()),
            MatchOutcome::Violator(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateOptions {
    pub min_rounds: usize,
    pub max_rounds: usize,
    /// Fresh samples per round count before it is increased.
    pub retries: usize,
}

impl Default for TemplateOptions {
    fn default() -> Self {
        TemplateOptions { min_rounds: 2, max_rounds: TEMPLATE_MAX_DEGREE, retries: 8 }
    }
}

pub fn flexible_template(t: usize, seed: u64, audit_samples: usize) -> Result<TemplateGraph> {
    flexible_template_with(t, seed, audit_samples, &TemplateOptions::default())
}

/// Union of random injections `X → Y ∪ Z`, starting sparse and adding
/// rounds until every audited `Z′` admits a perfect matching. The audit is
/// exhaustive when `C(2t, t) ≤ audit_samples`.
pub fn flexible_template_with(t: usize, seed: u64, audit_samples: usize, opts: &TemplateOptions) -> Result<TemplateGraph> {
    if t == 0 {
        return Err(Error::InvalidParameter("templates need t ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<usize> = (2 * t..4 * t).collect();
    let exhaustive = binomial(2 * t, t) <= audit_samples as u128;
    let mut tries = 0;
    for rounds in opts.min_rounds.max(1)..=opts.max_rounds.min(TEMPLATE_MAX_DEGREE) {
        for _ in 0..opts.retries {
            tries += 1;
            let mut adj = vec![Vec::new(); 3 * t];
            for _ in 0..rounds {
                let mut perm: Vec<usize> = (0..4 * t).collect();
                perm.shuffle(&mut rng);
                for (i, &j) in perm.iter().take(3 * t).enumerate() {
                    if !adj[i].contains(&j) {
                        adj[i].push(j);
                    }
                }
            }
            adj.iter_mut().for_each(|a| a.sort_unstable());
            let mut h = TemplateGraph { t, rounds, adj, audited: 0, exhaustive };
            let mut ok = true;
            if exhaustive {
                subsets::for_each_subset(&z, t, |zp| {
                    h.audited += 1;
                    ok = h.matching_with(zp).is_some();
                    ok
                });
            } else {
                for _ in 0..audit_samples {
                    let zp: Vec<usize> = z.choose_multiple(&mut rng, t).copied().collect();
                    h.audited += 1;
                    if h.matching_with(&zp).is_none() {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                if exhaustive {
                    prune_template(&mut h, &z, &mut rng);
                }
                return Ok(h);
            }
        }
    }
    Err(Error::ConstructionFailed { retries: tries })
}

/// Drops edges, in random order, while every `Z′` still has its matching;
/// fewer template edges mean fewer absorbers per path.
fn prune_template(h: &mut TemplateGraph, z: &[usize], rng: &mut ChaCha8Rng) {
    let mut edges: Vec<(usize, usize)> = h.adj.iter().enumerate().flat_map(|(i, js)| js.iter().map(move |&j| (i, j))).collect();
    edges.shuffle(rng);
    for (i, j) in edges {
        let at = h.adj[i].iter().position(|&x| x == j).expect("edge present");
        h.adj[i].remove(at);
        let mut ok = true;
        subsets::for_each_subset(z, h.t, |zp| {
            ok = h.matching_with(zp).is_some();
            ok
        });
        if !ok {
            h.adj[i].insert(at, j);
        }
    }
}

/// `|A| = 3r(ℓ−2) − r`.
pub fn absorber_set_size(r: usize, ell: usize) -> usize {
    (3 * r * ell.saturating_sub(2)).saturating_sub(r)
}

/// Splits `ℓ − 2 − absorbers` into `absorbers + 1` nearly equal segment
/// lengths, each at least 3.
pub fn segment_lengths(ell: usize, absorbers: usize) -> Option<Vec<usize>> {
    let total = ell.checked_sub(2 + absorbers)?;
    let parts = absorbers + 1;
    if total < 3 * parts {
        return None;
    }
    Some((0..parts).map(|j| total / parts + usize::from(j < total % parts)).collect())
}

/// `ℓ·|pairs| = |w| + 2|pairs|`.
pub fn check_exact_cover_identity(w_len: usize, pairs: usize, ell: usize) -> Result<()> {
    let (lhs, rhs) = (ell * pairs, w_len + 2 * pairs);
    if lhs == rhs {
        Ok(())
    } else {
        Err(Error::ArithmeticMismatch { lhs, rhs })
    }
}

/// The quantitative hypotheses of the absorption argument at host order
/// `n`, path order `ℓ` and expansion `d`, with the unspecified constant `C`.
pub fn pathcover_conditions(n: usize, ell: usize, d: f64, c_const: f64) -> Vec<NamedInequality> {
    let nf = n as f64;
    let lf = ell as f64;
    let w = (lf - 2.0) / lf * nf;
    let m = (w / (2.0 * d)).ceil();
    let r = nf / (1e4 * lf);
    vec![
        NamedInequality::le("ℓ ≥ 200", 200.0, lf, false),
        NamedInequality::le("ℓ | n", (n % ell.max(1)) as f64, 0.0, false),
        NamedInequality::le("r = n/(10⁴ℓ) ≥ 1", 1.0, r, false),
        NamedInequality::le("d ≥ Cℓ√n", c_const * lf * nf.sqrt(), d, false),
        NamedInequality::le("m = ⌈|W|/2d⌉ < √n/(Cℓ)", m, nf.sqrt() / (c_const * lf), true),
        NamedInequality::le("(ℓ−2)s − r = cr ≥ 20m²", 20.0 * m * m, LEFTOVER_C * r, false),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCoverPlan {
    pub pairs: Vec<(usize, usize)>,
    pub ell: usize,
    pub r: usize,
    pub c: f64,
    pub s: usize,
    /// `W_1..W_4`.
    pub parts: Vec<Vec<usize>>,
    pub absorber_size: usize,
    pub seed: u64,
}

impl PathCoverPlan {
    /// Pairs routed through the absorbing structure.
    pub fn absorbing_pairs(&self) -> &[(usize, usize)] {
        &self.pairs[..3 * self.r]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCoverOptions {
    pub strictness: Strictness,
    pub seed: u64,
    pub retries: usize,
    /// Node budget of every backtracking search.
    pub budget: u64,
    /// Replaces `10⁴` in `r = n/(10⁴ℓ)` outside strict mode.
    pub r_divisor: usize,
    pub audit_samples: usize,
    /// Expansion of the host into `w`; the minimum degree into `w` if unset.
    pub d: Option<f64>,
    pub c_const: f64,
}

impl Default for PathCoverOptions {
    fn default() -> Self {
        PathCoverOptions {
            strictness: Strictness::Desk,
            seed: 0,
            retries: 12,
            budget: 200_000,
            r_divisor: 10,
            audit_samples: 200,
            d: None,
            c_const: 1.0,
        }
    }
}

/// Shuffles the pairs (after the first attempt), fixes `r` and `s` and
/// splits `w` at random into `W_1..W_4` with `|W_1| = |W_2| = 2r`.
pub fn plan_path_cover(w: &VertexSet, pairs: &[(usize, usize)], ell: usize, opts: &PathCoverOptions, attempt: usize) -> PathCoverPlan {
    let seed = opts.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(attempt as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = pairs.to_vec();
    if attempt > 0 {
        pairs.shuffle(&mut rng);
    }
    let p = pairs.len();
    let n = ell * p;
    let divisor = match opts.strictness {
        Strictness::Strict => 10_000,
        Strictness::Desk => opts.r_divisor.max(1),
    };
    let r = if ell < 5 || p < 4 { 0 } else { (n / (divisor * ell)).max(1).min((p - 1) / 3) };
    let x2 = p - 3 * r;
    let s = if r == 0 {
        p
    } else {
        let formula = ((1.0 + LEFTOVER_C) * r as f64 / (ell - 2) as f64).ceil() as usize;
        formula.max(x2.min(3)).min(x2)
    };
    let mut items = w.to_vec();
    items.shuffle(&mut rng);
    let rest = items.split_off((4 * r).min(items.len()));
    let w2 = items.split_off((2 * r).min(items.len()));
    let half = rest.len() / 2;
    let parts = vec![items, w2, rest[..half].to_vec(), rest[half..].to_vec()];
    PathCoverPlan { pairs, ell, r, c: LEFTOVER_C, s, parts, absorber_size: absorber_set_size(r, ell), seed }
}

/// Backtracking search for disjoint exact-length paths, one per pair,
/// inside a pool. Vertices flagged `limited` may be used at most `limit`
/// times in total.
struct PathSearch<'a> {
    g: &'a Graph,
    pairs: &'a [(usize, usize)],
    edges: usize,
    free: Vec<bool>,
    limited: Vec<bool>,
    limit: usize,
    steps: u64,
    budget: u64,
    score: &'a dyn Fn(usize, &[usize], usize) -> i64,
    accept: &'a dyn Fn(usize, &[usize]) -> bool,
}

impl PathSearch<'_> {
    fn run(&mut self) -> Option<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(self.pairs.len());
        if self.pairs.is_empty() {
            return Some(out);
        }
        let mut path = vec![self.pairs[0].0];
        self.rec(0, &mut path, &mut out).then_some(out)
    }

    fn rec(&mut self, j: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
        let (_, b) = self.pairs[j];
        let cur = *path.last().unwrap();
        let rem = self.edges + 1 - path.len();
        if rem == 1 {
            if !self.g.adjacent(cur, b) {
                return false;
            }
            path.push(b);
            if (self.accept)(j, path) {
                out.push(path.clone());
                if j + 1 == self.pairs.len() {
                    return true;
                }
                let mut next = vec![self.pairs[j + 1].0];
                if self.rec(j + 1, &mut next, out) {
                    return true;
                }
                out.pop();
            }
            path.pop();
            return false;
        }
        self.steps += 1;
        if self.steps > self.budget {
            return false;
        }
        let g = self.g;
        let mut cands: Vec<(i64, bool, usize, usize)> = g
            .neighbors(cur)
            .iter()
            .copied()
            .filter(|&c| self.free[c] && (!self.limited[c] || self.limit > 0) && (rem > 2 || g.adjacent(c, b)))
            .map(|c| {
                let freedeg = g.neighbors(c).iter().filter(|&&u| self.free[u]).count();
                ((self.score)(j, path, c), self.limited[c], freedeg, c)
            })
            .collect();
        cands.sort_unstable();
        for (_, lim, _, c) in cands {
            if self.steps > self.budget {
                return false;
            }
            self.free[c] = false;
            if lim {
                self.limit -= 1;
            }
            path.push(c);
            if self.rec(j, path, out) {
                return true;
            }
            path.pop();
            self.free[c] = true;
            if lim {
                self.limit += 1;
            }
        }
        false
    }
}

#[allow(clippy::too_many_arguments)]
fn search_paths(
    g: &Graph,
    pool: &VertexSet,
    pairs: &[(usize, usize)],
    edges: usize,
    limited: Option<(&VertexSet, usize)>,
    budget: u64,
    score: &dyn Fn(usize, &[usize], usize) -> i64,
    accept: &dyn Fn(usize, &[usize]) -> bool,
) -> Option<Vec<Vec<usize>>> {
    let mut s = PathSearch {
        g,
        pairs,
        edges,
        free: (0..g.n()).map(|v| pool.contains(v)).collect(),
        limited: (0..g.n()).map(|v| limited.is_some_and(|(l, _)| l.contains(v))).collect(),
        limit: limited.map_or(0, |l| l.1),
        steps: 0,
        budget,
        score,
        accept,
    };
    s.run()
}

/// Absorbing paths `P_i` of length `ℓ−2` for the first `3r` pairs and, per
/// path, the absorber edge assigned to each template neighbour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingStructure {
    pub template: TemplateGraph,
    /// Right-hand template index → host vertex; `Z` lands in `W_1`, `Y` in `W_2`.
    pub tau: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
    pub absorbers: Vec<BTreeMap<usize, (usize, usize)>>,
    pub fans: Vec<Fan>,
    /// `A`: the internal vertices of every `P_i`, together with `W_2`.
    pub absorber_set: Vec<usize>,
}

/// Threads every absorbing path so that its edges contain an absorber for
/// each root in `τ(N_H(i))`, then reads the fans off the chosen edges.
pub fn build_absorbing_structure(g: &Graph, plan: &PathCoverPlan, template: &TemplateGraph, budget: u64) -> Result<AbsorbingStructure> {
    let r = plan.r;
    if template.t != r || r == 0 {
        return Err(Error::stage("template", Error::InvalidParameter(format!("template order {} for r = {r}", template.t))));
    }
    let (w1, w2) = (&plan.parts[0], &plan.parts[1]);
    if w1.len() != 2 * r || w2.len() != 2 * r {
        return Err(Error::stage("template", Error::InvalidParameter("|W_1| and |W_2| must equal 2r".into())));
    }
    let tau: Vec<usize> = w2.iter().chain(w1.iter()).copied().collect();
    let roots: Vec<Vec<usize>> = template.adj.iter().map(|js| js.iter().map(|&j| tau[j]).collect()).collect();
    let pool = VertexSet::from_iter(g.n(), plan.parts[2].iter().chain(&plan.parts[3]).copied());
    let covers = |v: usize, a: usize, b: usize| g.adjacent(v, a) && g.adjacent(v, b);
    let uncovered = |j: usize, path: &[usize]| -> Vec<usize> {
        roots[j].iter().copied().filter(|&v| !path.windows(2).any(|e| covers(v, e[0], e[1]))).collect()
    };
    let score = |j: usize, path: &[usize], c: usize| -> i64 {
        let cur = *path.last().unwrap();
        uncovered(j, path)
            .iter()
            .map(|&v| if covers(v, cur, c) { -10 } else if g.adjacent(v, c) { -1 } else { 0 })
            .sum()
    };
    let accept = |j: usize, path: &[usize]| uncovered(j, path).is_empty();
    let paths = search_paths(g, &pool, plan.absorbing_pairs(), plan.ell - 2, None, budget, &score, &accept)
        .ok_or_else(|| Error::stage("thread", Error::exhausted("absorbing paths")))?;
    let mut absorbers = Vec::with_capacity(paths.len());
    let mut triangles: BTreeMap<usize, Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (j, p) in paths.iter().enumerate() {
        let mut map = BTreeMap::new();
        for &v in &roots[j] {
            let e = p.windows(2).find(|e| covers(v, e[0], e[1])).expect("accepted paths cover their roots");
            map.insert(v, (e[0], e[1]));
            triangles.entry(v).or_default().push((v, e[0], e[1]));
        }
        absorbers.push(map);
    }
    let fans: Vec<Fan> = triangles
        .into_iter()
        .map(|(root, tri)| Fan { root, absorbers: tri.iter().map(|&(_, a, b)| (a, b)).collect(), triangles: tri })
        .collect();
    if let Some(f) = fans.iter().find(|f| !f.is_valid(g)) {
        return Err(Error::stage("fan", Error::ShapeMismatch(format!("fan at {} is not a fan", f.root))));
    }
    let mut absorber_set: Vec<usize> = paths.iter().flat_map(|p| p[1..p.len() - 1].iter().copied()).chain(w2.iter().copied()).collect();
    absorber_set.sort_unstable();
    debug_assert_eq!(absorber_set.len(), plan.absorber_size);
    Ok(AbsorbingStructure { template: template.clone(), tau, paths, absorbers, fans, absorber_set })
}

/// Inserts `U ∪ W_2` into the absorbing paths along a template matching,
/// giving `3r` disjoint paths of length `ℓ−1`.
pub fn activate_absorbers(plan: &PathCoverPlan, st: &AbsorbingStructure, u: &[usize]) -> Result<Vec<Vec<usize>>> {
    let r = plan.r;
    let index: BTreeMap<usize, usize> = st.tau.iter().enumerate().map(|(j, &v)| (v, j)).collect();
    let mut zp = Vec::with_capacity(u.len());
    for v in u {
        match index.get(v) {
            Some(&j) if j >= 2 * r => zp.push(j),
            _ => return Err(Error::InvalidParameter(format!("vertex {v} is not in W_1"))),
        }
    }
    zp.sort_unstable();
    zp.dedup();
    if zp.len() != r {
        return Err(Error::InvalidParameter(format!("|U| = {} distinct, r = {r}", zp.len())));
    }
    let m = st.template.matching_with(&zp).ok_or_else(|| Error::exhausted("template matching"))?;
    let mut out = Vec::with_capacity(st.paths.len());
    for (i, p) in st.paths.iter().enumerate() {
        let v = st.tau[m[i]];
        let (a, b) = st.absorbers[i][&v];
        let at = p.windows(2).position(|e| e == [a, b]).expect("absorber lies on its path");
        let mut q = p.clone();
        q.insert(at + 1, v);
        out.push(q);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCheck {
    pub valid: bool,
    pub violation: Option<String>,
}

fn bad(msg: impl Into<String>) -> PathCheck {
    PathCheck { valid: false, violation: Some(msg.into()) }
}

/// Disjoint paths on `ℓ` vertices joining each pair, with internal vertices
/// exactly covering `cover`.
pub fn verify_path_cover(g: &Graph, cover: &VertexSet, pairs: &[(usize, usize)], ell: usize, paths: &[Vec<usize>]) -> PathCheck {
    if paths.len() != pairs.len() {
        return bad(format!("{} paths for {} pairs", paths.len(), pairs.len()));
    }
    let mut seen = VertexSet::new(g.n());
    let mut internal = 0;
    for (i, (p, &(x, y))) in paths.iter().zip(pairs).enumerate() {
        if p.len() != ell || p.first() != Some(&x) || p.last() != Some(&y) {
            return bad(format!("path {i} is not an ({x},{y})-path on {ell} vertices"));
        }
        if let Some(e) = p.windows(2).find(|e| e[0] >= g.n() || e[1] >= g.n() || !g.adjacent(e[0], e[1])) {
            return bad(format!("path {i} uses non-edge {}-{}", e[0], e[1]));
        }
        for (k, &v) in p.iter().enumerate() {
            if seen.contains(v) {
                return bad(format!("vertex {v} used twice"));
            }
            seen.insert(v);
            if k > 0 && k + 1 < p.len() {
                if !cover.contains(v) {
                    return bad(format!("internal vertex {v} of path {i} lies outside the cover set"));
                }
                internal += 1;
            }
        }
    }
    if internal != cover.len() {
        return bad(format!("{internal} internal vertices, cover set has {}", cover.len()));
    }
    PathCheck { valid: true, violation: None }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorberAudit {
    pub samples: usize,
    pub failures: usize,
    pub first_failure: Option<Vec<usize>>,
}

impl AbsorberAudit {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Activates the structure for random `U ⊆ W_1` of size `r` and checks the
/// resulting `3r` paths cover `A ∪ U` exactly.
pub fn audit_absorbers(g: &Graph, plan: &PathCoverPlan, st: &AbsorbingStructure, samples: usize, seed: u64) -> AbsorberAudit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = AbsorberAudit { samples, failures: 0, first_failure: None };
    let pairs = plan.absorbing_pairs();
    for _ in 0..samples {
        let u: Vec<usize> = plan.parts[0].choose_multiple(&mut rng, plan.r).copied().collect();
        let cover = VertexSet::from_iter(g.n(), st.absorber_set.iter().chain(&u).copied());
        let ok = activate_absorbers(plan, st, &u).is_ok_and(|paths| verify_path_cover(g, &cover, pairs, plan.ell, &paths).valid);
        if !ok {
            audit.failures += 1;
            audit.first_failure.get_or_insert(u);
        }
    }
    audit
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCover {
    /// One path per input pair, in input order.
    pub paths: Vec<Vec<usize>>,
    pub plan: Option<PathCoverPlan>,
    pub absorbing: Option<AbsorbingStructure>,
    pub attempts: usize,
}

pub fn path_cover(g: &Graph, w: &VertexSet, pairs: &[(usize, usize)], ell: usize) -> Result<PathCover> {
    path_cover_with(g, w, pairs, ell, &PathCoverOptions::default())
}

/// Covers `w` and the pair vertices by disjoint `(x_i, y_i)`-paths on
/// exactly `ℓ` vertices: absorbing structure on `3r` pairs, greedy exact
/// connections until `s` pairs remain, those routed through the leftover
/// and `W_1`, and finally the absorbers take up the unused `r` vertices of
/// `W_1`. Small instances (`r = 0`) are covered by direct search.
pub fn path_cover_with(g: &Graph, w: &VertexSet, pairs: &[(usize, usize)], ell: usize, opts: &PathCoverOptions) -> Result<PathCover> {
    if ell < 2 {
        return Err(Error::InvalidParameter("paths need ℓ ≥ 2 vertices".into()));
    }
    let mut ends = VertexSet::new(g.n());
    for &(x, y) in pairs {
        for v in [x, y] {
            if v >= g.n() || w.contains(v) || ends.contains(v) {
                return Err(Error::InvalidParameter(format!("pair vertex {v} repeated or inside w")));
            }
            ends.insert(v);
        }
    }
    check_exact_cover_identity(w.len(), pairs.len(), ell)?;
    if opts.strictness == Strictness::Strict {
        let d = opts.d.unwrap_or_else(|| (0..g.n()).map(|v| g.degree_into(v, w)).min().unwrap_or(0) as f64);
        let n = ell * pairs.len();
        if let Some(f) = pathcover_conditions(n, ell, d, opts.c_const).into_iter().find(|c| !c.holds) {
            return Err(Error::PreconditionViolated(format!("{} fails: {} vs {}", f.name, f.lhs, f.rhs)));
        }
    }
    if pairs.is_empty() {
        return Ok(PathCover { paths: Vec::new(), plan: None, absorbing: None, attempts: 0 });
    }
    let mut last = Error::exhausted("path cover");
    for attempt in 0..opts.retries.max(1) {
        let plan = plan_path_cover(w, pairs, ell, opts, attempt);
        match run_plan(g, w, &plan, opts) {
            Ok((paths, absorbing)) => {
                let order: BTreeMap<(usize, usize), usize> = plan.pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
                let paths: Vec<Vec<usize>> = pairs.iter().map(|p| paths[order[p]].clone()).collect();
                let check = verify_path_cover(g, w, pairs, ell, &paths);
                if !check.valid {
                    last = Error::stage("verify", Error::EmbeddingFailed(check.violation.unwrap_or_default()));
                    continue;
                }
                return Ok(PathCover { paths, plan: Some(plan), absorbing, attempts: attempt + 1 });
            }
            Err(e) => last = e,
        }
    }
    Err(Error::stage("path cover", last))
}

type PlanOutput = (Vec<Vec<usize>>, Option<AbsorbingStructure>);

fn run_plan(g: &Graph, w: &VertexSet, plan: &PathCoverPlan, opts: &PathCoverOptions) -> Result<PlanOutput> {
    let ell = plan.ell;
    let no_score = |_: usize, _: &[usize], _: usize| 0i64;
    let any = |_: usize, _: &[usize]| true;
    if plan.r == 0 {
        let paths = search_paths(g, w, &plan.pairs, ell - 1, None, opts.budget, &no_score, &any)
            .ok_or_else(|| Error::stage("direct", Error::exhausted("exact paths")))?;
        return Ok((paths, None));
    }
    let r = plan.r;
    let template = flexible_template(r, plan.seed, opts.audit_samples).map_err(|e| Error::stage("template", e))?;
    let st = build_absorbing_structure(g, plan, &template, opts.budget)?;

    let mut free = w.clone();
    plan.parts[0].iter().chain(&st.absorber_set).for_each(|&v| free.remove(v));
    let mut done: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut remaining: Vec<usize> = (3 * r..plan.pairs.len()).collect();
    let d_est = (0..g.n()).map(|v| g.degree_into(v, w)).min().unwrap_or(1).max(1);
    let m = w.len().div_ceil(2 * d_est).max(1);
    let mut round = 0u64;
    while remaining.len() > plan.s {
        round += 1;
        let pairs: Vec<(usize, usize)> = remaining.iter().map(|&i| plan.pairs[i]).collect();
        let lengths = vec![ell - 1; pairs.len()];
        let cfg = ConnectConfig { peel_trials: 200, budget: opts.budget, ..ConnectConfig::desk(plan.seed ^ round) };
        let found = match connect_exact_length(g, &pairs, &free, &lengths, m.max(2), m, &cfg) {
            Ok(c) => Some((c.index, c.path)),
            Err(_) => (0..pairs.len()).find_map(|k| {
                search_paths(g, &free, &pairs[k..=k], ell - 1, None, opts.budget, &no_score, &any).map(|mut p| (k, p.remove(0)))
            }),
        };
        let (k, path) = found.ok_or_else(|| Error::stage("connect", Error::exhausted("greedy connection")))?;
        path[1..ell - 1].iter().for_each(|&v| free.remove(v));
        done.insert(remaining.remove(k), path);
    }

    let leftover = free.len();
    let limit = (plan.s * (ell - 2)).checked_sub(leftover).filter(|&l| l == r).ok_or_else(|| {
        Error::stage("leftover", Error::ArithmeticMismatch { lhs: plan.s * (ell - 2), rhs: leftover + r })
    })?;
    let w1 = VertexSet::from_iter(g.n(), plan.parts[0].iter().copied());
    let pool = free.union(&w1);
    let pairs: Vec<(usize, usize)> = remaining.iter().map(|&i| plan.pairs[i]).collect();
    let last = search_paths(g, &pool, &pairs, ell - 1, Some((&w1, limit)), opts.budget, &no_score, &any)
        .ok_or_else(|| Error::stage("leftover", Error::exhausted("leftover paths")))?;
    let mut unused = w1;
    for (&i, p) in remaining.iter().zip(last) {
        p.iter().for_each(|&v| unused.remove(v));
        done.insert(i, p);
    }
    let absorbed = activate_absorbers(plan, &st, &unused.to_vec()).map_err(|e| Error::stage("absorb", e))?;
    for (i, p) in absorbed.into_iter().enumerate() {
        done.insert(i, p);
    }
    Ok((done.into_values().collect(), Some(st)))
}
