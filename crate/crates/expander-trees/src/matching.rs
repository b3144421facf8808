//! Star matchings (f-matchings) via max-flow, plus greedy maximal packings.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::subsets::{self, binomial, check_budget};

/// Demand `f` on the centres `a`, to be served from `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarDemand {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub f: Vec<usize>,
}

impl StarDemand {
    /// Pairs `a[i]` with `f[i]`; both sides are sorted by vertex id.
    pub fn new(a: &[usize], b: &[usize], f: &[usize]) -> Result<Self> {
        if a.len() != f.len() {
            return Err(Error::InvalidParameter("a and f differ in length".into()));
        }
        let mut pairs: Vec<(usize, usize)> = a.iter().copied().zip(f.iter().copied()).collect();
        pairs.sort_unstable();
        let mut b = b.to_vec();
        b.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) || b.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("repeated vertex in a demand side".into()));
        }
        if pairs.iter().any(|&(u, _)| b.binary_search(&u).is_ok()) {
            return Err(Error::InvalidParameter("a and b must be disjoint".into()));
        }
        Ok(StarDemand { a: pairs.iter().map(|p| p.0).collect(), b, f: pairs.iter().map(|p| p.1).collect() })
    }

    pub fn uniform(a: &[usize], b: &[usize], value: usize) -> Result<Self> {
        StarDemand::new(a, b, &vec![value; a.len()])
    }

    pub fn total(&self) -> usize {
        self.f.iter().sum()
    }
}

/// Vertex-disjoint stars: centre → its leaves in `B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarMatching {
    pub stars: BTreeMap<usize, Vec<usize>>,
}

impl StarMatching {
    pub fn leaf_count(&self) -> usize {
        self.stars.values().map(Vec::len).sum()
    }

    /// Checks disjointness, adjacency and the exact demands.
    pub fn is_valid_for(&self, g: &Graph, demand: &StarDemand) -> bool {
        let mut seen = std::collections::HashSet::new();
        for (i, &u) in demand.a.iter().enumerate() {
            let Some(leaves) = self.stars.get(&u) else { return demand.f[i] == 0 };
            if leaves.len() != demand.f[i] {
                return false;
            }
            for &b in leaves {
                if !g.adjacent(u, b) || demand.b.binary_search(&b).is_err() || !seen.insert(b) {
                    return false;
                }
            }
        }
        self.stars.keys().all(|u| demand.a.binary_search(u).is_ok())
    }
}

/// A set `X ⊆ A` with `|N(X) ∩ B| < Σ_{x∈X} f(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallViolator {
    pub x: Vec<usize>,
    pub neighbors: Vec<usize>,
    pub demand: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchOutcome {
    Matching(StarMatching),
    Violator(HallViolator),
}

impl MatchOutcome {
    pub fn matching(self) -> Option<StarMatching> {
        match self {
            MatchOutcome::Matching(m) => Some(m),
            MatchOutcome::Violator(_) => None,
        }
    }
}

struct Dinic {
    head: Vec<usize>,
    tail: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<usize>,
    next: Vec<usize>,
    level: Vec<i64>,
    iter: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl Dinic {
    fn new(nodes: usize) -> Self {
        Dinic { head: vec![NIL; nodes], tail: vec![NIL; nodes], to: vec![], cap: vec![], next: vec![], level: vec![0; nodes], iter: vec![0; nodes] }
    }

    fn add(&mut self, u: usize, v: usize, c: usize) -> usize {
        let e = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([c, 0]);
        self.next.extend([NIL, NIL]);
        // Append so iteration follows insertion order.
        for (x, edge) in [(u, e), (v, e + 1)] {
            if self.head[x] == NIL {
                self.head[x] = edge;
            } else {
                self.next[self.tail[x]] = edge;
            }
            self.tail[x] = edge;
        }
        e
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let mut e = self.head[u];
            while e != NIL {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
                e = self.next[e];
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: usize) -> usize {
        if u == t {
            return f;
        }
        while self.iter[u] != NIL {
            let e = self.iter[u];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, f.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.iter[u] = self.next[e];
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.clone_from(&self.head);
            loop {
                let f = self.dfs(s, t, usize::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }
}

struct FlowResult {
    flow: usize,
    stars: StarMatching,
    reachable_a: Vec<usize>,
}

fn run_flow(g: &Graph, d: &StarDemand) -> FlowResult {
    let (na, nb) = (d.a.len(), d.b.len());
    let (s, t) = (0, 1);
    let mut net = Dinic::new(2 + na + nb);
    let big = d.total() + 1;
    let mut mid = Vec::new();
    for (i, &u) in d.a.iter().enumerate() {
        net.add(s, 2 + i, d.f[i]);
        for (j, &b) in d.b.iter().enumerate() {
            if g.adjacent(u, b) {
                mid.push((i, j, net.add(2 + i, 2 + na + j, big)));
            }
        }
    }
    for j in 0..nb {
        net.add(2 + na + j, t, 1);
    }
    let flow = net.max_flow(s, t);
    let mut stars = StarMatching::default();
    for &(i, j, e) in &mid {
        if net.cap[e ^ 1] > 0 {
            stars.stars.entry(d.a[i]).or_default().push(d.b[j]);
        }
    }
    net.bfs(s);
    let reachable_a = (0..na).filter(|&i| net.level[2 + i] >= 0).map(|i| d.a[i]).collect();
    FlowResult { flow, stars, reachable_a }
}

fn neighbors_in(g: &Graph, x: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().copied().filter(|&w| x.iter().any(|&u| g.adjacent(u, w))).collect()
}

fn shrink_violator(g: &Graph, d: &StarDemand, mut x: Vec<usize>) -> HallViolator {
    let f_of = |u: usize| d.f[d.a.binary_search(&u).unwrap()];
    let violates = |x: &[usize]| neighbors_in(g, x, &d.b).len() < x.iter().map(|&u| f_of(u)).sum::<usize>();
    let mut i = 0;
    while i < x.len() {
        let mut y = x.clone();
        y.remove(i);
        if !y.is_empty() && violates(&y) {
            x = y;
        } else {
            i += 1;
        }
    }
    let neighbors = neighbors_in(g, &x, &d.b);
    let demand = x.iter().map(|&u| f_of(u)).sum();
    HallViolator { x, neighbors, demand }
}

/// Perfect f-matching (`Σf = |B|`) or an inclusion-minimal Hall violator
/// extracted from the minimum cut.
pub fn f_matching(g: &Graph, demand: &StarDemand) -> Result<MatchOutcome> {
    if demand.total() != demand.b.len() {
        return Err(Error::DemandMismatch { sum: demand.total(), b: demand.b.len() });
    }
    Ok(saturating_star_matching(g, demand))
}

/// Star matching serving every demand in full when `Σf ≤ |B|` allows slack.
pub fn saturating_star_matching(g: &Graph, demand: &StarDemand) -> MatchOutcome {
    let r = run_flow(g, demand);
    if r.flow == demand.total() {
        MatchOutcome::Matching(r.stars)
    } else {
        MatchOutcome::Violator(shrink_violator(g, demand, r.reachable_a))
    }
}

/// Greedy packing result: the stars placed and what stayed uncovered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyStarMatching {
    pub matching: StarMatching,
    pub uncovered_a: Vec<usize>,
    pub uncovered_b: Vec<usize>,
}

/// Inclusion-maximal star packing: centres in seeded random order, each
/// takes its full demand from the still-free `B` vertices (in a seeded order)
/// or nothing. With `joined = Some(m)` and `f ≡ 1`, a leftover of size `≥ m`
/// on both sides contradicts m-joinedness and is reported as an error.
pub fn maximal_star_matching_greedy(
    g: &Graph,
    demand: &StarDemand,
    seed: u64,
    joined: Option<usize>,
) -> Result<GreedyStarMatching> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..demand.a.len()).collect();
    order.shuffle(&mut rng);
    let mut b_order = demand.b.clone();
    b_order.shuffle(&mut rng);
    let mut taken = vec![false; b_order.len()];
    let mut matching = StarMatching::default();
    let mut uncovered_a = Vec::new();
    for i in order {
        let u = demand.a[i];
        let picks: Vec<usize> =
            (0..b_order.len()).filter(|&j| !taken[j] && g.adjacent(u, b_order[j])).take(demand.f[i]).collect();
        if picks.len() == demand.f[i] {
            let mut leaves: Vec<usize> = picks.iter().map(|&j| b_order[j]).collect();
            picks.iter().for_each(|&j| taken[j] = true);
            leaves.sort_unstable();
            matching.stars.insert(u, leaves);
        } else {
            uncovered_a.push(u);
        }
    }
    uncovered_a.sort_unstable();
    let mut uncovered_b: Vec<usize> = (0..b_order.len()).filter(|&j| !taken[j]).map(|j| b_order[j]).collect();
    uncovered_b.sort_unstable();
    if let Some(m) = joined {
        if demand.f.iter().all(|&f| f == 1) && uncovered_a.len() >= m && uncovered_b.len() >= m {
            return Err(Error::JoinednessContradiction(format!(
                "maximal matching left {} and {} uncovered vertices, host claimed {m}-joined",
                uncovered_a.len(),
                uncovered_b.len()
            )));
        }
    }
    Ok(GreedyStarMatching { matching, uncovered_a, uncovered_b })
}

/// Maximum matching between `a` and `b` (a maximum matching is in
/// particular maximal), reported in the greedy packing's shape.
pub fn maximum_matching(g: &Graph, a: &[usize], b: &[usize]) -> Result<GreedyStarMatching> {
    let demand = StarDemand::uniform(a, b, 1)?;
    let r = run_flow(g, &demand);
    let matching = r.stars;
    let uncovered_a = demand.a.iter().copied().filter(|u| !matching.stars.contains_key(u)).collect();
    let hit: std::collections::HashSet<usize> = matching.stars.values().flatten().copied().collect();
    let uncovered_b = demand.b.iter().copied().filter(|v| !hit.contains(v)).collect();
    Ok(GreedyStarMatching { matching, uncovered_a, uncovered_b })
}

fn small_sets_expand(g: &Graph, from: &[usize], into: &[usize], d: usize, m: usize) -> bool {
    (1..=m.min(from.len())).all(|j| {
        subsets::for_each_subset(from, j, |x| neighbors_in(g, x, into).len() >= d * j)
    })
}

fn sides_joined(g: &Graph, a: &[usize], b: &[usize], m: usize) -> bool {
    if a.len() < m || b.len() < m {
        return true;
    }
    subsets::for_each_subset(a, m, |x| b.len() - neighbors_in(g, x, b).len() < m)
}

fn star_budget(a: usize, b: usize, m: usize, budget: u64, two_sided: bool) -> Result<()> {
    let mut need: u128 = (1..=m).map(|j| binomial(a, j)).fold(binomial(a, m), u128::saturating_add);
    if two_sided {
        need = (1..=m).map(|j| binomial(b, j)).fold(need, u128::saturating_add);
    }
    check_budget(need, budget)
}

/// The one-sided hypotheses: small sets of `A` expand by `d` into `B`, the
/// sides are m-joined, and every `B` vertex has `m` neighbours in `A`.
pub fn verify_lemma_star_hypotheses(g: &Graph, a: &[usize], b: &[usize], d: usize, m: usize) -> Result<bool> {
    star_budget(a.len(), b.len(), m, subsets::DEFAULT_BUDGET, false)?;
    Ok(small_sets_expand(g, a, b, d, m)
        && sides_joined(g, a, b, m)
        && b.iter().all(|&w| a.iter().filter(|&&u| g.adjacent(u, w)).count() >= m))
}

/// The two-sided hypotheses: small sets on both sides expand by `d` and the
/// sides are m-joined.
pub fn verify_lemma_star1_hypotheses(g: &Graph, a: &[usize], b: &[usize], d: usize, m: usize) -> Result<bool> {
    star_budget(a.len(), b.len(), m, subsets::DEFAULT_BUDGET, true)?;
    Ok(small_sets_expand(g, a, b, d, m) && small_sets_expand(g, b, a, d, m) && sides_joined(g, a, b, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bip(a: usize, b: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(a + b, edges.iter().map(|&(u, v)| (u, a + v))).unwrap()
    }

    #[test]
    fn examples() {
        let g = bip(1, 2, &[(0, 0), (0, 1)]);
        let d = StarDemand::new(&[0], &[1, 2], &[2]).unwrap();
        let m = f_matching(&g, &d).unwrap().matching().unwrap();
        assert_eq!(m.stars[&0], vec![1, 2]);

        let g = bip(2, 2, &[(0, 0), (1, 1)]);
        let d = StarDemand::uniform(&[0, 1], &[2, 3], 1).unwrap();
        let m = f_matching(&g, &d).unwrap().matching().unwrap();
        assert!(m.is_valid_for(&g, &d));

        let g = bip(2, 2, &[(0, 0), (1, 0)]);
        let d = StarDemand::uniform(&[0, 1], &[2, 3], 1).unwrap();
        match f_matching(&g, &d).unwrap() {
            MatchOutcome::Violator(v) => {
                assert_eq!(v.x, vec![0, 1]);
                assert_eq!(v.neighbors, vec![2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn demand_mismatch() {
        let g = bip(1, 2, &[(0, 0)]);
        let d = StarDemand::new(&[0], &[1, 2], &[1]).unwrap();
        assert_eq!(f_matching(&g, &d), Err(Error::DemandMismatch { sum: 1, b: 2 }));
    }

    #[test]
    fn greedy_examples() {
        let g = Graph::complete_bipartite(3, 3);
        let d = StarDemand::uniform(&[0, 1, 2], &[3, 4, 5], 1).unwrap();
        let r = maximal_star_matching_greedy(&g, &d, 5, Some(1)).unwrap();
        assert!(r.uncovered_a.is_empty() && r.uncovered_b.is_empty());

        let g = bip(2, 2, &[(0, 0), (1, 0)]);
        let d = StarDemand::uniform(&[0, 1], &[2, 3], 1).unwrap();
        for seed in 0..5 {
            let r = maximal_star_matching_greedy(&g, &d, seed, None).unwrap();
            assert_eq!(r.matching.stars.len(), 1);
            assert_eq!(r.uncovered_a.len(), 1);
            assert_eq!(r.uncovered_b, vec![3]);
        }
    }

    #[test]
    fn hypotheses_examples() {
        let g = Graph::complete_bipartite(3, 4);
        assert!(verify_lemma_star_hypotheses(&g, &[0, 1, 2], &[3, 4, 5, 6], 2, 1).unwrap());
        let g = bip(2, 3, &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        assert!(!verify_lemma_star_hypotheses(&g, &[0, 1], &[2, 3, 4], 1, 2).unwrap());
    }
}
