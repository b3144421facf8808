//! Case dispatch and role sets. Planning is a total function of the tree
//! and the parameters; infeasible part sizes surface when the plan runs.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Case, PipelineParams, Theorem};
use crate::tree::{bare_path_segments, decompose_levels, pendant_stars, strip_leaves, PendantStar, Tree};

/// Half of a path `P` (already oriented) whose vertices `a_0..a_{k′}` are
/// re-routed; `a_1` carries legs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub path: Vec<usize>,
    /// Index of `a_0` in `path`.
    pub idx0: usize,
    pub a: Vec<usize>,
    /// Legs of `a_1..a_{k′−1}`.
    pub legs: Vec<usize>,
}

/// A pendant star seen from a path vertex `z` through a hanging subtree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HangingStar {
    pub path: Vec<usize>,
    /// Index of `z` in `path`.
    pub iz: usize,
    /// Tree path from the neighbour of `z` to the star root `r`; empty when
    /// `r = z`.
    pub hang: Vec<usize>,
    pub root: usize,
    pub center: usize,
    pub leaves: Vec<usize>,
    /// Index of `a`, at distance `h − 1` from `r`.
    pub ia: usize,
    /// Index of `b`, at distance `h` from `z`.
    pub ib: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Roles {
    /// Chains `a_h, a_{h−1}, …, a_2, b` from the leaves of `T_h`; `c` are the
    /// leaf children of the chain ends `b`.
    Leaves { chains: Vec<Vec<usize>>, b: Vec<usize>, a2: Vec<usize>, c: Vec<usize> },
    /// Paths whose interiors are covered by a path cover between their ends.
    BarePaths { paths: Vec<Vec<usize>> },
    Halved { windows: Vec<Window> },
    Hanging { stars: Vec<HangingStar> },
    /// Roots `A` with multiplicities `s(v)`, centres `B`, leaves `C`.
    Pendant { stars: Vec<PendantStar>, s: BTreeMap<usize, usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingPlan {
    pub theorem: Theorem,
    pub case: Case,
    pub n: usize,
    pub delta: usize,
    pub h: usize,
    pub k: usize,
    pub k_prime: usize,
    /// The cardinality threshold the dispatch compared against.
    pub threshold: f64,
    pub r: usize,
    pub roles: Roles,
    /// Part sizes `|V_1|, |V_2|, …`; a negative entry means the tree is too
    /// small for the case at these slacks.
    pub sizes: Vec<i64>,
    /// Vertices of `T′`, sorted.
    pub core: Vec<usize>,
    /// Edges of `T′` that need not be host edges.
    pub virtual_edges: Vec<(usize, usize)>,
    pub detail: String,
}

impl EmbeddingPlan {
    pub fn feasible(&self) -> bool {
        self.sizes.iter().all(|&s| s >= 0)
    }
}

/// Deterministic plan: arbitrary choices take the smallest candidate.
pub fn plan_embedding(t: &Tree, params: &PipelineParams) -> EmbeddingPlan {
    plan_with(t, params, None)
}

/// Plan whose arbitrary choices are drawn from `seed`.
pub fn plan_embedding_seeded(t: &Tree, params: &PipelineParams, seed: u64) -> EmbeddingPlan {
    plan_with(t, params, Some(seed))
}

fn plan_with(t: &Tree, params: &PipelineParams, seed: Option<u64>) -> EmbeddingPlan {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    match params.theorem {
        Theorem::Th1Plus => plan_th1(t, params, &mut rng),
        Theorem::Th2 => plan_th2(t, params),
    }
}

struct Builder<'a> {
    params: &'a PipelineParams,
    n: usize,
    delta: usize,
}

impl Builder<'_> {
    fn slack(&self, mult: f64) -> i64 {
        self.params.slack(self.n, self.delta, mult) as i64
    }

    /// `V_1` takes whatever the other parts leave.
    fn sizes(&self, rest: &[i64]) -> Vec<i64> {
        let mut v = vec![self.n as i64 - rest.iter().sum::<i64>()];
        v.extend_from_slice(rest);
        v
    }

    /// Desk clamps a share at zero; strict keeps the formula.
    fn share(&self, x: i64) -> i64 {
        if self.params.is_strict() {
            x
        } else {
            x.max(0)
        }
    }

    fn core_without(&self, removed: &[usize]) -> Vec<usize> {
        let mut gone = vec![false; self.n];
        removed.iter().for_each(|&v| gone[v] = true);
        (0..self.n).filter(|&v| !gone[v]).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn plan(
        &self,
        case: Case,
        h: usize,
        k: usize,
        k_prime: usize,
        threshold: f64,
        r: usize,
        roles: Roles,
        sizes: Vec<i64>,
        removed: &[usize],
        virtual_edges: Vec<(usize, usize)>,
        detail: String,
    ) -> EmbeddingPlan {
        EmbeddingPlan {
            theorem: self.params.theorem,
            case,
            n: self.n,
            delta: self.delta,
            h,
            k,
            k_prime,
            threshold,
            r,
            roles,
            sizes,
            core: self.core_without(removed),
            virtual_edges,
            detail,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Surroundings {
    Bare,
    Caterpillar,
    Sees,
}

/// Off-path neighbours of `path[i]`.
fn off_path<'a>(t: &'a Tree, path: &'a [usize], i: usize) -> impl Iterator<Item = usize> + 'a {
    let (prev, next) = (i.checked_sub(1).map(|j| path[j]), path.get(i + 1).copied());
    t.neighbors(path[i]).iter().copied().filter(move |&u| Some(u) != prev && Some(u) != next)
}

fn classify(t: &Tree, path: &[usize], interior: std::ops::Range<usize>) -> Surroundings {
    let mut legs = false;
    for i in interior {
        for u in off_path(t, path, i) {
            if !t.is_leaf(u) {
                return Surroundings::Sees;
            }
            legs = true;
        }
    }
    if legs {
        Surroundings::Caterpillar
    } else {
        Surroundings::Bare
    }
}

fn take<T: Clone>(items: &[T], count: usize, strict: bool) -> Vec<T> {
    if strict {
        items[..count.min(items.len())].to_vec()
    } else {
        items.to_vec()
    }
}

/// The half of `path[lo..=hi]` (`K = hi − lo` edges) that starts one step
/// before its first leg-bearing interior vertex, reversed when that half
/// would overrun `hi`.
fn halve(t: &Tree, path: &[usize], lo: usize, hi: usize, k_prime: usize) -> Option<Window> {
    let kk = hi - lo;
    let j = (1..kk).find(|&j| off_path(t, path, lo + j).next().is_some())?;
    let (path, idx0) = if j - 1 + k_prime <= kk {
        (path.to_vec(), lo + j - 1)
    } else {
        let rev: Vec<usize> = path.iter().rev().copied().collect();
        let lo_rev = path.len() - 1 - hi;
        (rev, lo_rev + (kk - j) - 1)
    };
    let a: Vec<usize> = path[idx0..=idx0 + k_prime].to_vec();
    let legs = (idx0 + 1..idx0 + k_prime).flat_map(|i| off_path(t, &path, i).collect::<Vec<_>>()).collect();
    Some(Window { path, idx0, a, legs })
}

fn plan_th1(t: &Tree, params: &PipelineParams, rng: &mut Option<ChaCha8Rng>) -> EmbeddingPlan {
    let n = t.n();
    let b = Builder { params, n, delta: t.max_degree().max(1) };
    let strict = params.is_strict();
    let h_req = params.h(n);
    let k = params.k(n);
    let dec = decompose_levels(t, h_req);
    let h = dec.h();
    let n_h = dec.sizes[h];
    let kf = k as f64;
    let threshold = n_h as f64 / (4.0 * kf);
    let r = (n_h as f64 / (8.0 * kf)).floor() as usize;
    let leaves_h = dec.leaf_sets[h].clone();

    let segments: Vec<Vec<usize>> = if h == h_req && k >= 4 * h + 2 && n_h > 1 {
        let (th, map) = t.induced(&dec.levels[h]).expect("levels induce subtrees");
        bare_path_segments(&th, k).into_iter().map(|p| p.into_iter().map(|v| map[v]).collect()).collect()
    } else {
        Vec::new()
    };
    let floor = if strict { 0.0 } else { params.leaf_floor as f64 };
    let many_leaves = leaves_h.len() as f64 >= threshold.max(floor) || segments.is_empty();

    if many_leaves {
        let want = if strict { threshold.ceil() as usize } else { leaves_h.len() };
        let mut chains = Vec::new();
        if h >= 2 {
            for &top in leaves_h.iter().take(want) {
                let mut chain = vec![top];
                for j in (1..h).rev() {
                    let cur = *chain.last().unwrap();
                    let mut cands: Vec<usize> =
                        t.neighbors(cur).iter().copied().filter(|&u| dec.level_of[u] == j).collect();
                    if let Some(rng) = rng.as_mut() {
                        cands.shuffle(rng);
                    }
                    chain.push(cands[0]);
                }
                chains.push(chain);
            }
        }
        let bs: Vec<usize> = chains.iter().map(|c| c[h - 1]).collect();
        let a2: Vec<usize> = chains.iter().map(|c| c[h - 2]).collect();
        let cs: Vec<usize> = bs.iter().flat_map(|&v| t.neighbors(v).iter().copied().filter(|&u| dec.level_of[u] == 0)).collect();
        let half = b.share((cs.len() as i64 - b.slack(22.0)).div_euclid(2));
        let sizes = b.sizes(&[bs.len() as i64, half, half]);
        let removed: Vec<usize> = bs.iter().chain(&cs).copied().collect();
        let detail = format!("|L_h| = {}, threshold {:.2}, {} chains, |C| = {}", leaves_h.len(), threshold, chains.len(), cs.len());
        let roles = Roles::Leaves { chains, b: bs, a2, c: cs };
        return b.plan(Case::ManyLeaves, h, k, 0, threshold, r, roles, sizes, &removed, vec![], detail);
    }

    let (lo, hi) = (2 * h, k - 2 * h);
    let mut classes: BTreeMap<&str, Vec<Vec<usize>>> = BTreeMap::new();
    for p in &segments {
        let key = match classify(t, p, lo + 1..hi) {
            Surroundings::Bare => "bare",
            Surroundings::Caterpillar => "cat",
            Surroundings::Sees => "sees",
        };
        classes.entry(key).or_default().push(p.clone());
    }
    let count = |c: &str| classes.get(c).map_or(0, Vec::len);
    let rf = r as f64;
    let half_r = if strict { rf / 2.0 } else { (rf / 2.0).max(1.0) };
    let pick = if count("bare") >= r.max(1) {
        "bare"
    } else if count("cat") as f64 >= half_r {
        "cat"
    } else if count("sees") as f64 >= half_r {
        "sees"
    } else {
        ["bare", "cat", "sees"].into_iter().max_by_key(|c| (count(c), std::cmp::Reverse(*c))).unwrap()
    };
    let tally = format!("segments: {} bare, {} caterpillar, {} seeing; r = {r}", count("bare"), count("cat"), count("sees"));
    let chosen = classes.remove(pick).unwrap_or_default();
    let kk = hi - lo;
    match pick {
        "bare" => {
            let qs = take(&chosen, r.max(1), strict);
            let paths: Vec<Vec<usize>> = qs.iter().map(|p| p[lo..=hi].to_vec()).collect();
            let rr = paths.len() as i64;
            let sizes = b.sizes(&[(kk as i64 - 1) * rr - b.slack(22.0)]);
            let removed: Vec<usize> = paths.iter().flat_map(|q| q[1..kk].to_vec()).collect();
            let virt = paths.iter().map(|q| (q[0], q[kk])).collect();
            let detail = format!("{tally}; {} bare paths with k′ = {kk}", paths.len());
            b.plan(Case::CaseA, h, k, kk, rf, r, Roles::BarePaths { paths }, sizes, &removed, virt, detail)
        }
        "cat" => {
            let kp = kk.div_ceil(2);
            let want = (rf / 2.0).ceil() as usize;
            let windows: Vec<Window> =
                take(&chosen, want, strict).iter().filter_map(|p| halve(t, p, lo, hi, kp)).collect();
            let rr = windows.len() as i64;
            let legs: i64 = windows.iter().map(|w| w.legs.len() as i64).sum();
            let third = b.share((legs - b.slack(22.0)).div_euclid(2));
            let sizes = b.sizes(&[rr, third, (kp as i64 - 2) * rr, third]);
            let removed: Vec<usize> =
                windows.iter().flat_map(|w| w.a[1..kp].iter().chain(&w.legs).copied().collect::<Vec<_>>()).collect();
            let virt = windows.iter().map(|w| (w.a[0], w.a[kp])).collect();
            let detail = format!("{tally}; {} caterpillar halves with k′ = {kp}, |L| = {legs}", windows.len());
            b.plan(Case::CaseB, h, k, kp, rf / 2.0, r, Roles::Halved { windows }, sizes, &removed, virt, detail)
        }
        _ => {
            let want = (rf / 2.0).ceil() as usize;
            let stars: Vec<HangingStar> =
                take(&chosen, want, strict).iter().filter_map(|p| hanging_star(t, p, lo + 1..hi, h)).collect();
            let leaves: i64 = stars.iter().map(|s| s.leaves.len() as i64).sum();
            let third = b.share((leaves - b.slack(21.0)).div_euclid(3));
            let sizes = b.sizes(&[stars.len() as i64, third, third, third]);
            let removed: Vec<usize> = stars.iter().flat_map(|s| std::iter::once(s.center).chain(s.leaves.iter().copied())).collect();
            let detail = format!("{tally}; {} pendant stars seen, |C⁻| = {leaves}", stars.len());
            b.plan(Case::CaseC, h, k, kk, rf / 2.0, r, Roles::Hanging { stars }, sizes, &removed, vec![], detail)
        }
    }
}

/// The first interior vertex `z` with a non-leaf off-path neighbour, and the
/// pendant star nearest to it in the hanging subtree behind that neighbour.
fn hanging_star(t: &Tree, path: &[usize], interior: std::ops::Range<usize>, h: usize) -> Option<HangingStar> {
    let (iz, y) = interior.clone().find_map(|i| off_path(t, path, i).find(|&u| !t.is_leaf(u)).map(|u| (i, u)))?;
    let z = path[iz];
    let is_center = |v: usize| !t.is_leaf(v) && t.neighbors(v).iter().filter(|&&u| !t.is_leaf(u)).count() == 1;
    let mut parent = BTreeMap::from([(y, z)]);
    let mut q = VecDeque::from([y]);
    let mut center = None;
    while let Some(u) = q.pop_front() {
        if is_center(u) {
            center = Some(u);
            break;
        }
        for &w in t.neighbors(u) {
            if w != z && !parent.contains_key(&w) {
                parent.insert(w, u);
                q.push_back(w);
            }
        }
    }
    let c = center?;
    let root = parent[&c];
    let mut hang = Vec::new();
    let mut v = root;
    while v != z {
        hang.push(v);
        v = parent[&v];
    }
    hang.reverse();
    let depth = hang.len();
    if depth + 2 > h || iz + h >= path.len() {
        return None;
    }
    let ia = iz.checked_sub(h - 1 - depth)?;
    let leaves = t.neighbors(c).iter().copied().filter(|&u| u != root).collect();
    Some(HangingStar { path: path.to_vec(), iz, hang, root, center: c, leaves, ia, ib: iz + h })
}

fn plan_th2(t: &Tree, params: &PipelineParams) -> EmbeddingPlan {
    let n = t.n();
    let delta = t.max_degree().max(1);
    let b = Builder { params, n, delta };
    let strict = params.is_strict();
    let k = params.k(n);
    let kf = k as f64;
    let threshold = n as f64 / (4.0 * kf * delta as f64);
    let r = (n as f64 / (8.0 * kf * delta as f64)).floor() as usize;
    let stars = pendant_stars(t);
    let segments: Vec<Vec<usize>> = if n >= 3 && k >= 2 {
        let (tp, map) = strip_leaves(t);
        bare_path_segments(&tp, k).into_iter().map(|p| p.into_iter().map(|v| map[v]).collect()).collect()
    } else {
        Vec::new()
    };
    let floor = if strict { 0.0 } else { params.leaf_floor as f64 };
    if stars.len() as f64 >= threshold.max(floor) || segments.is_empty() {
        let chosen = take(&stars, threshold.ceil() as usize, strict);
        let mut s: BTreeMap<usize, usize> = BTreeMap::new();
        chosen.iter().for_each(|st| *s.entry(st.root).or_default() += 1);
        let centers = chosen.len() as i64;
        let leaves: i64 = chosen.iter().map(|st| st.leaves.len() as i64).sum();
        let half = b.share((leaves - b.slack(22.0)).div_euclid(2));
        let sizes = b.sizes(&[centers, half, half]);
        let removed: Vec<usize> =
            chosen.iter().flat_map(|st| std::iter::once(st.center).chain(st.leaves.iter().copied())).collect();
        let detail = format!("{} pendant stars ({} roots), threshold {threshold:.2}, |C| = {leaves}", chosen.len(), s.len());
        let roles = Roles::Pendant { stars: chosen, s };
        return b.plan(Case::Th2Pendant, 0, k, 0, threshold, r, roles, sizes, &removed, vec![], detail);
    }
    let (bare, leggy): (Vec<Vec<usize>>, Vec<Vec<usize>>) =
        segments.into_iter().partition(|p| classify(t, p, 1..k) == Surroundings::Bare);
    if bare.len() >= r.max(1) || leggy.is_empty() {
        let paths = take(&bare, r.max(1), strict);
        let rr = paths.len() as i64;
        let sizes = b.sizes(&[(k as i64 - 1) * rr - b.slack(21.0)]);
        let removed: Vec<usize> = paths.iter().flat_map(|p| p[1..k].to_vec()).collect();
        let virt = paths.iter().map(|p| (p[0], p[k])).collect();
        let detail = format!("subcase 1: {} bare of {} caterpillars", paths.len(), paths.len() + leggy.len());
        return b.plan(Case::Th2Caterpillar, 0, k, k, threshold, r, Roles::BarePaths { paths }, sizes, &removed, virt, detail);
    }
    let kp = k / 2;
    let windows: Vec<Window> =
        take(&leggy, threshold.ceil() as usize, strict).iter().filter_map(|p| halve(t, p, 0, k, kp)).collect();
    let rr = windows.len() as i64;
    let legs: i64 = windows.iter().map(|w| w.legs.len() as i64).sum();
    let sizes = b.sizes(&[rr, (kp as i64 - 2) * rr, b.share(legs - b.slack(21.0))]);
    let removed: Vec<usize> =
        windows.iter().flat_map(|w| w.a[1..kp].iter().chain(&w.legs).copied().collect::<Vec<_>>()).collect();
    let virt = windows.iter().map(|w| (w.a[0], w.a[kp])).collect();
    let detail = format!("subcase 2: {} caterpillar halves with k′ = {kp}, |L| = {legs}", windows.len());
    b.plan(Case::Th2Caterpillar, 0, k, kp, threshold, r, Roles::Halved { windows }, sizes, &removed, virt, detail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::families;

    fn desk1() -> PipelineParams {
        PipelineParams::desk(Theorem::Th1Plus, 50)
    }

    #[test]
    fn path_dispatches_to_bare_paths() {
        let t = families::path(300);
        let p = plan_embedding(&t, &desk1());
        assert_eq!(p.case, Case::CaseA);
        let Roles::BarePaths { paths } = &p.roles else { panic!() };
        // T_3 is the path on 294 vertices; greedy cuts of 21 vertices.
        assert_eq!(paths.len(), 294 / 21);
        assert!(paths.iter().all(|q| q.len() == 9));
        assert_eq!(p.sizes.iter().sum::<i64>(), 300);
        assert_eq!(p.core.len(), 300 - 7 * paths.len());
    }

    #[test]
    fn leggy_spine_dispatches_to_caterpillars() {
        let t = families::caterpillar(240, 1);
        let p = plan_embedding(&t, &desk1());
        assert_eq!(p.case, Case::CaseB);
        let Roles::Halved { windows } = &p.roles else { panic!() };
        for w in windows {
            assert_eq!(w.a.len(), 5);
            assert_eq!(w.legs.len(), 3);
            assert!(t.neighbors(w.a[1]).iter().any(|&u| t.is_leaf(u)));
            assert!(w.a.windows(2).all(|e| t.neighbors(e[0]).contains(&e[1])));
        }
    }

    #[test]
    fn far_pendant_stars_dispatch_to_case_c() {
        let t = families::pendant_star_spine(160, 4, 2);
        let p = plan_embedding(&t, &desk1());
        assert_eq!(p.case, Case::CaseC);
        let Roles::Hanging { stars } = &p.roles else { panic!() };
        assert!(!stars.is_empty());
        for s in stars {
            assert_eq!(s.hang, vec![s.root]);
            assert_eq!(s.leaves.len(), 2);
            assert_eq!(s.ib - s.ia, 2 * p.h - 1 - s.hang.len());
        }
    }

    #[test]
    fn bushy_trees_have_many_leaves() {
        let t = crate::tree::random_bounded_tree(400, 3, 5).unwrap();
        let p = plan_embedding(&t, &desk1());
        assert_eq!(p.case, Case::ManyLeaves);
        let Roles::Leaves { chains, b, c, .. } = &p.roles else { panic!() };
        assert!(chains.iter().all(|ch| ch.len() == 3));
        assert_eq!(p.core.len() + b.len() + c.len(), 400);
        assert_eq!(p.sizes.iter().sum::<i64>(), 400);
    }

    #[test]
    fn th2_dispatch() {
        let params = PipelineParams::desk(Theorem::Th2, 50);
        let p = plan_embedding(&families::pendant_star_spine(100, 2, 2), &params);
        assert_eq!(p.case, Case::Th2Pendant);
        let p = plan_embedding(&families::caterpillar(200, 1), &params);
        assert_eq!(p.case, Case::Th2Caterpillar);
        assert!(matches!(p.roles, Roles::Halved { .. }));
        let p = plan_embedding(&families::path(300), &params);
        assert!(matches!(p.roles, Roles::BarePaths { .. }));
    }

    #[test]
    fn dispatch_is_total_on_small_trees() {
        for n in 1..40 {
            for theorem in [Theorem::Th1Plus, Theorem::Th2] {
                let params = PipelineParams::desk(theorem, 5);
                for t in [families::path(n), families::star(n - 1), crate::tree::random_bounded_tree(n, 3, n as u64).unwrap()] {
                    let p = plan_embedding(&t, &params);
                    assert_eq!(p.sizes.iter().sum::<i64>(), n as i64);
                }
            }
        }
    }
}
