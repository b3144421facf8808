//! Immutable simple graphs and vertex sets.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsets::{self, binomial, check_budget};

/// A set of vertex ids over the universe `0..n`, backed by a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet { bits }
    }

    pub fn from_iter(n: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = VertexSet::new(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    pub(crate) fn from_bits(bits: FixedBitSet) -> Self {
        VertexSet { bits }
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.universe(), "vertex {v} outside universe {}", self.universe());
        self.bits.insert(v);
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.set(v, false);
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut b = self.bits.clone();
        b.union_with(&other.bits);
        VertexSet { bits: b }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut b = self.bits.clone();
        b.intersect_with(&other.bits);
        VertexSet { bits: b }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut b = self.bits.clone();
        b.difference_with(&other.bits);
        VertexSet { bits: b }
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "EdgeListRepr", try_from = "EdgeListRepr")]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    bits: Vec<FixedBitSet>,
    edges: usize,
}

#[derive(Serialize, Deserialize)]
struct EdgeListRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl From<Graph> for EdgeListRepr {
    fn from(g: Graph) -> Self {
        EdgeListRepr { n: g.n(), edges: g.edges().collect() }
    }
}

impl TryFrom<EdgeListRepr> for Graph {
    type Error = Error;
    fn try_from(r: EdgeListRepr) -> Result<Self> {
        Graph::from_edges(r.n, r.edges)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n(), self.edges)
    }
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and out-of-range ids.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut bits: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        let mut adj = vec![Vec::new(); n];
        let mut count = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge {u}-{v} outside 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            if bits[u].contains(v) {
                return Err(Error::InvalidParameter(format!("duplicate edge {u}-{v}")));
            }
            bits[u].insert(v);
            bits[v].insert(u);
            adj[u].push(v);
            adj[v].push(u);
            count += 1;
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { adj, bits, edges: count })
    }

    /// Builds a graph from edges already known to be simple; duplicates are merged.
    pub(crate) fn from_edges_lossy(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut bits: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for (u, v) in edges {
            if u != v {
                bits[u].insert(v);
                bits[v].insert(u);
            }
        }
        let adj: Vec<Vec<usize>> = bits.iter().map(|b| b.ones().collect()).collect();
        let edges = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adj, bits, edges }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbor_bits(&self, v: usize) -> &FixedBitSet {
        &self.bits[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.bits[u].contains(v)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    /// Number of neighbours of `v` inside `w`.
    pub fn degree_into(&self, v: usize, w: &VertexSet) -> usize {
        self.bits[v].intersection_count(w.bits())
    }

    pub fn empty(n: usize) -> Self {
        Graph::from_edges_lossy(n, [])
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_edges_lossy(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs n >= 3");
        Graph::from_edges_lossy(n, (0..n).map(|u| (u, (u + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges_lossy(n, (1..n).map(|u| (u - 1, u)))
    }

    /// `K_{1,k}` with centre 0.
    pub fn star(k: usize) -> Self {
        Graph::from_edges_lossy(k + 1, (1..=k).map(|v| (0, v)))
    }

    /// `K_{a,b}` with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        Graph::from_edges_lossy(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
    }

    /// Circulant graph: `u ~ u ± o (mod n)` for every offset `o`.
    pub fn circulant(n: usize, offsets: &[usize]) -> Self {
        let mut e = Vec::new();
        for u in 0..n {
            for &o in offsets {
                let o = o % n;
                if o != 0 {
                    e.push((u, (u + o) % n));
                }
            }
        }
        Graph::from_edges_lossy(n, e)
    }

    /// Petersen graph: outer 5-cycle 0..5, spokes to 5..10, inner pentagram.
    pub fn petersen() -> Self {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges_lossy(10, e)
    }

    /// Disjoint union of the two graphs plus the given cross edges (ids of `b`
    /// are shifted by `a.n()`).
    pub fn join(a: &Graph, b: &Graph, cross: &[(usize, usize)]) -> Self {
        let off = a.n();
        let e = a
            .edges()
            .chain(b.edges().map(|(u, v)| (u + off, v + off)))
            .chain(cross.iter().map(|&(u, v)| (u, v + off)))
            .collect::<Vec<_>>();
        Graph::from_edges_lossy(off + b.n(), e)
    }

    /// Parses the edge-list format: first line `n m`, then `m` lines `u v`.
    pub fn read_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_nums(ln, head)?;
        if nums.len() != 2 {
            return Err(Error::Parse { line: ln, msg: "header must be `n m`".into() });
        }
        let (n, m) = (nums[0], nums[1]);
        let mut edges = Vec::with_capacity(m);
        for (ln, l) in lines {
            let uv = parse_nums(ln, l)?;
            if uv.len() != 2 {
                return Err(Error::Parse { line: ln, msg: "edge line must be `u v`".into() });
            }
            edges.push((uv[0], uv[1]));
        }
        if edges.len() != m {
            return Err(Error::Parse { line: 1, msg: format!("header says {m} edges, found {}", edges.len()) });
        }
        Graph::from_edges(n, edges).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.edges);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

fn parse_nums(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad integer `{t}`") }))
        .collect()
}

/// `N(x, w)`: neighbours of `x` outside `x`, restricted to `w`.
pub fn neighborhood_into(g: &Graph, x: &VertexSet, w: &VertexSet) -> VertexSet {
    let mut acc = FixedBitSet::with_capacity(g.n());
    for v in x.iter() {
        acc.union_with(g.neighbor_bits(v));
    }
    acc.difference_with(x.bits());
    acc.intersect_with(w.bits());
    VertexSet::from_bits(acc)
}

/// Ordered-pair edge count `|{(u,v) ∈ x×y : uv ∈ E}|`.
pub fn edge_count_between(g: &Graph, x: &VertexSet, y: &VertexSet) -> usize {
    x.iter().map(|u| g.degree_into(u, y)).sum()
}

/// Outcome of an exhaustive joinedness check.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinCheck {
    pub joined: bool,
    /// Lexicographically least violating pair when not joined.
    pub witness: Option<(VertexSet, VertexSet)>,
}

/// Exhaustive m-joinedness test with the default budget.
pub fn is_m_joined_exact(g: &Graph, m: usize) -> Result<JoinCheck> {
    is_m_joined_exact_with_budget(g, m, subsets::DEFAULT_BUDGET)
}

/// Every `m`-set `X` is checked once: a violation exists iff at least `m`
/// vertices lie outside `X ∪ N(X)`.
pub fn is_m_joined_exact_with_budget(g: &Graph, m: usize, budget: u64) -> Result<JoinCheck> {
    let n = g.n();
    if m == 0 || 2 * m > n {
        return Err(Error::InvalidParameter(format!("m-joined check needs 1 <= m <= n/2, got m={m}, n={n}")));
    }
    check_budget(binomial(n, m), budget)?;
    let all: Vec<usize> = (0..n).collect();
    Ok(joined_scan(g, &all, m))
}

pub(crate) fn joined_scan(g: &Graph, items: &[usize], m: usize) -> JoinCheck {
    let n = g.n();
    let mut witness = None;
    subsets::for_each_subset_with_union(g, items, m, |x, union| {
        let mut free = union.clone();
        free.toggle_range(..);
        for &v in x {
            free.set(v, false);
        }
        if free.count_ones(..) >= m {
            let y: Vec<usize> = free.ones().take(m).collect();
            witness = Some((VertexSet::from_iter(n, x.iter().copied()), VertexSet::from_iter(n, y)));
            return false;
        }
        true
    });
    JoinCheck { joined: witness.is_none(), witness }
}
