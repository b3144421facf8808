//! Phase executors for every case.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::partition::{partition_with_expansion, PartitionOptions};
use super::plan::{EmbeddingPlan, HangingStar, Roles, Window};
use super::regrow::{prune_and_regrow, Regrow, RegrowConfig};
use super::{refusal, Case, PhaseRecord, PipelineParams};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::extendable::{embed_into_pool, AlmostSpanningOptions, FreePool, GrowthConfig};
use crate::graph::{Graph, VertexSet};
use crate::matching::{
    f_matching, maximal_star_matching_greedy, maximum_matching, saturating_star_matching, MatchOutcome,
    StarDemand, StarMatching,
};
use crate::path_cover::{path_cover_with, PathCoverOptions};
use crate::tree::Tree;
use crate::tree_array::NamedInequality;

pub(super) type Outcome = (Embedding, Vec<PhaseRecord>, Vec<String>);

struct Run<'a> {
    g: &'a Graph,
    t: &'a Tree,
    plan: &'a EmbeddingPlan,
    params: &'a PipelineParams,
    rng: ChaCha8Rng,
    emb: Embedding,
    phases: Vec<PhaseRecord>,
    warnings: Vec<String>,
}

pub(super) fn execute(g: &Graph, t: &Tree, plan: &EmbeddingPlan, params: &PipelineParams, seed: u64) -> Result<Outcome> {
    let mut run = Run {
        g,
        t,
        plan,
        params,
        rng: ChaCha8Rng::seed_from_u64(seed),
        emb: Embedding::new(t.n()),
        phases: vec![PhaseRecord { name: "plan".into(), detail: plan.detail.clone() }],
        warnings: Vec::new(),
    };
    if let Some(i) = plan.sizes.iter().position(|&s| s < 0) {
        return Err(run.fail("partition", Error::PreconditionViolated(format!("part V_{} has negative size {}", i + 1, plan.sizes[i]))));
    }
    match (&plan.roles, plan.case) {
        (Roles::Leaves { chains, b, a2, .. }, _) => run.many_leaves(chains, b, a2)?,
        (Roles::BarePaths { paths }, _) => run.bare_paths(paths)?,
        (Roles::Halved { windows }, Case::CaseB) => run.case_b(windows)?,
        (Roles::Halved { windows }, _) => run.th2_halves(windows)?,
        (Roles::Hanging { stars }, _) => run.case_c(stars)?,
        (Roles::Pendant { s, .. }, _) => run.th2_pendant(s)?,
    }
    Ok((run.emb, run.phases, run.warnings))
}

impl Run<'_> {
    fn fail(&self, phase: &str, e: Error) -> Error {
        Error::stage(format!("{}/{phase}", self.plan.case), e)
    }

    fn record(&mut self, name: &str, detail: String) {
        self.phases.push(PhaseRecord { name: name.into(), detail });
    }

    fn sub_seed(&mut self) -> u64 {
        use rand::Rng;
        self.rng.gen()
    }

    fn m(&self) -> usize {
        self.params.m(self.plan.n)
    }

    fn set(&self, vs: &[usize]) -> VertexSet {
        VertexSet::from_iter(self.g.n(), vs.iter().copied())
    }

    fn image(&self, u: usize) -> usize {
        self.emb.get(u).expect("role vertex is embedded")
    }

    fn free_hosts(&self) -> Vec<usize> {
        let used = self.set(&self.emb.images());
        (0..self.g.n()).filter(|&v| !used.contains(v)).collect()
    }

    /// The vertices of `part` no tree vertex occupies.
    fn free_in(&self, part: &[usize]) -> Vec<usize> {
        let used = self.set(&self.emb.images());
        part.iter().copied().filter(|&v| !used.contains(v)).collect()
    }

    /// A tree-array window: `part`, widened at the desk by whatever is
    /// still free in `extra`.
    fn window(&self, part: &[usize], extra: &[&[usize]]) -> Vec<usize> {
        let mut w = part.to_vec();
        if !self.params.is_strict() {
            for e in extra {
                w.extend(self.free_in(e));
            }
        }
        w
    }

    fn check(&mut self, phase: &str, c: NamedInequality) -> Result<()> {
        if c.holds {
            return Ok(());
        }
        if self.params.is_strict() {
            return Err(self.fail(phase, refusal(&c)));
        }
        self.warnings.push(format!("{} fails: {} vs {}", c.name, c.lhs, c.rhs));
        Ok(())
    }

    /// Phase 0: the random partition with per-part expansion certificates.
    fn partition(&mut self) -> Result<Vec<Vec<usize>>> {
        let sizes: Vec<usize> = self.plan.sizes.iter().map(|&s| s as usize).collect();
        let opts = PartitionOptions {
            strictness: self.params.strictness,
            trials: self.params.partition_trials,
            log_base: self.params.log_base,
        };
        let seed = self.sub_seed();
        let plan = partition_with_expansion(
            self.g,
            &self.g.vertices(),
            &sizes,
            self.params.d as f64,
            self.params.partition_retries,
            seed,
            &opts,
        )
        .map_err(|e| self.fail("partition", e))?;
        let kinds: Vec<String> =
            plan.certificates.iter().map(|c| c.as_ref().map_or("-".into(), |c| format!("{:?}", c.kind))).collect();
        self.record(
            "partition",
            format!("sizes {:?}, attempts {}, certificates [{}]", plan.sizes(), plan.attempts, kinds.join(", ")),
        );
        self.warnings.extend(plan.warnings);
        Ok(plan.parts)
    }

    /// Phase 1: `T′` (with its virtual edges) into `V_1`.
    fn embed_core(&mut self, v1: &[usize]) -> Result<()> {
        let core = &self.plan.core;
        let mut local = vec![usize::MAX; self.t.n()];
        core.iter().enumerate().for_each(|(i, &u)| local[u] = i);
        let mut edges: Vec<(usize, usize)> = self
            .t
            .edges()
            .into_iter()
            .filter(|&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|(a, b)| (local[a], local[b]))
            .collect();
        edges.extend(self.plan.virtual_edges.iter().map(|&(a, b)| (local[a], local[b])));
        let tree = Tree::from_edges(core.len(), &edges, 0).map_err(|e| self.fail("core", e))?;
        let mut loose = vec![false; core.len()];
        for &(a, b) in &self.plan.virtual_edges {
            let (a, b) = (local[a], local[b]);
            let child = if tree.parent(b) == Some(a) { b } else { a };
            loose[child] = true;
        }
        let slack = v1.len() as i64 - core.len() as i64;
        let d1 = v1.len() as f64 * self.params.d as f64 / (5.0 * self.plan.n as f64);
        let need = 4.0 * self.plan.delta as f64 * (v1.len() as f64 / (2.0 * d1.max(f64::MIN_POSITIVE))).ceil();
        self.check("core", NamedInequality::le("4Δ⌈|V_1|/2d_1⌉ < |V_1| − |T′|", need, slack as f64, true))?;
        let opts = AlmostSpanningOptions {
            strictness: self.params.strictness,
            budget: self.params.budget,
            defer_leaves: true,
            pin: None,
        };
        let mut pool = FreePool::new(self.g, &self.set(v1));
        let images = embed_into_pool(self.g, &mut pool, &tree, Some(&loose), &opts).map_err(|e| self.fail("core", e))?;
        for (i, &u) in core.iter().enumerate() {
            self.emb.set(u, images[i]);
        }
        self.record("core", format!("|T′| = {} into |V_1| = {}, slack {slack}", core.len(), v1.len()));
        Ok(())
    }

    /// Maximum matching from the images of `anchors` into `part`; returns
    /// `anchor → host` for the matched ones, the unmatched anchors and the
    /// unused part vertices.
    fn match_into(&mut self, phase: &str, anchors: &[usize], part: &[usize]) -> Result<(BTreeMap<usize, usize>, Vec<usize>, Vec<usize>)> {
        let imgs: Vec<usize> = anchors.iter().map(|&u| self.image(u)).collect();
        let owner: BTreeMap<usize, usize> = imgs.iter().copied().zip(anchors.iter().copied()).collect();
        let mm = maximum_matching(self.g, &imgs, part).map_err(|e| self.fail(phase, e))?;
        let hit: BTreeMap<usize, usize> = mm.matching.stars.iter().map(|(&a, b)| (owner[&a], b[0])).collect();
        let left: Vec<usize> = mm.uncovered_a.iter().map(|a| owner[a]).collect();
        let mut spare = mm.uncovered_b;
        spare.shuffle(&mut self.rng);
        if left.len() >= self.m() {
            self.warnings.push(format!("{phase}: {} unmatched, m = {}", left.len(), self.m()));
        }
        self.record(phase, format!("matched {} of {}, {} left over", hit.len(), anchors.len(), left.len()));
        Ok((hit, left, spare))
    }

    fn regrow(&mut self, phase: &str, jobs: &[Regrow], w: &[usize]) -> Result<()> {
        if jobs.is_empty() {
            return Ok(());
        }
        let cfg = RegrowConfig {
            delta: self.plan.delta,
            d1: self.plan.delta + 2,
            m: self.m(),
            growth: GrowthConfig {
                enforce: false,
                budget: self.params.budget,
                strictness: self.params.strictness,
                ..GrowthConfig::default()
            },
        };
        let w = self.set(w);
        let arr = prune_and_regrow(self.g, self.t, &mut self.emb, jobs, &w, &cfg).map_err(|e| self.fail(phase, e))?;
        self.warnings.extend(arr.warnings);
        let s = jobs[0].chain.len();
        self.record(phase, format!("{} paths of length {s} regrown through |W| = {}", jobs.len(), w.len()));
        Ok(())
    }

    /// Covers `w` by paths between the images of each pair's ends and maps
    /// the listed tree vertices onto the interiors.
    fn cover(&mut self, phase: &str, routes: &[Vec<usize>], w: &[usize]) -> Result<()> {
        if routes.is_empty() {
            return Ok(());
        }
        let ell = routes[0].len();
        let pairs: Vec<(usize, usize)> = routes.iter().map(|r| (self.image(r[0]), self.image(r[ell - 1]))).collect();
        let opts = PathCoverOptions {
            strictness: self.params.strictness,
            seed: self.sub_seed(),
            budget: self.params.budget,
            ..PathCoverOptions::default()
        };
        let pc = path_cover_with(self.g, &self.set(w), &pairs, ell, &opts).map_err(|e| self.fail(phase, e))?;
        for (route, path) in routes.iter().zip(&pc.paths) {
            for i in 1..ell - 1 {
                self.emb.set(route[i], path[i]);
            }
        }
        self.record(phase, format!("{} paths on {ell} vertices through |W| = {}, attempts {}", routes.len(), w.len(), pc.attempts));
        Ok(())
    }

    /// Last phase: every unmapped vertex is a leaf below a mapped parent;
    /// the leaves are star-matched onto the free host vertices.
    fn attach_leaves(&mut self) -> Result<()> {
        let free = self.free_hosts();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for u in (0..self.t.n()).filter(|&u| self.emb.get(u).is_none()) {
            let p = match self.t.neighbors(u) {
                [p] if self.emb.get(*p).is_some() => *p,
                _ => return Err(self.fail("leaves", Error::EmbeddingFailed(format!("unmapped vertex {u} is not a leaf below a mapped vertex")))),
            };
            groups.entry(self.image(p)).or_default().push(u);
        }
        let centres: Vec<usize> = groups.keys().copied().collect();
        let f: Vec<usize> = groups.values().map(Vec::len).collect();
        let demand = StarDemand::new(&centres, &free, &f).map_err(|e| self.fail("leaves", e))?;
        let stars = match f_matching(self.g, &demand).map_err(|e| self.fail("leaves", e))? {
            MatchOutcome::Matching(s) => s,
            MatchOutcome::Violator(v) => {
                return Err(self.fail("leaves", Error::EmbeddingFailed(format!("Hall violator {v:?}"))))
            }
        };
        self.place_stars(&groups, &stars);
        self.record("leaves", format!("{} leaves onto {} free vertices", free.len(), free.len()));
        Ok(())
    }

    /// Assigns the tree vertices grouped under each centre image to that
    /// centre's star leaves.
    fn place_stars(&mut self, groups: &BTreeMap<usize, Vec<usize>>, stars: &StarMatching) {
        for (c, hosts) in &stars.stars {
            for (&u, &v) in groups[c].iter().zip(hosts) {
                self.emb.set(u, v);
            }
        }
    }

    fn many_leaves(&mut self, chains: &[Vec<usize>], b: &[usize], a2: &[usize]) -> Result<()> {
        let parts = self.partition()?;
        self.embed_core(&parts[0])?;
        let (hit, left, spare) = self.match_into("match", a2, &parts[1])?;
        let chain_of: BTreeMap<usize, usize> = a2.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        for (&a, &v) in &hit {
            self.emb.set(b[chain_of[&a]], v);
        }
        let jobs: Vec<Regrow> = left
            .iter()
            .zip(&spare)
            .map(|(a, &end)| {
                let ch = &chains[chain_of[a]];
                Regrow { anchor: ch[0], chain: ch[1..].to_vec(), end_image: end, exclude: vec![] }
            })
            .collect();
        if jobs.iter().any(|j| j.chain.len() < 2) {
            return Err(self.fail("regrow", Error::PreconditionViolated("chains too short to regrow".into())));
        }
        let w = self.window(&parts[2], &[&parts[0]]);
        self.regrow("regrow", &jobs, &w)?;
        self.attach_leaves()
    }

    fn bare_paths(&mut self, paths: &[Vec<usize>]) -> Result<()> {
        let parts = self.partition()?;
        self.embed_core(&parts[0])?;
        let mut w = parts[1].clone();
        w.extend(self.free_in(&parts[0]));
        self.cover("cover", paths, &w)?;
        self.attach_leaves()
    }

    /// Shared start of the halving cases: core, then `a_1` matched from `a_0`.
    fn halves_start(&mut self, windows: &[Window], parts: &[Vec<usize>]) -> Result<(Vec<usize>, Vec<usize>)> {
        self.embed_core(&parts[0])?;
        let a0: Vec<usize> = windows.iter().map(|w| w.a[0]).collect();
        let (hit, left, spare) = self.match_into("match", &a0, &parts[1])?;
        let by_a0: BTreeMap<usize, &Window> = windows.iter().map(|w| (w.a[0], w)).collect();
        for (a, &v) in &hit {
            self.emb.set(by_a0[a].a[1], v);
        }
        Ok((left, spare))
    }

    fn routes(windows: &[Window]) -> Vec<Vec<usize>> {
        windows.iter().map(|w| w.a[1..].to_vec()).collect()
    }

    fn case_b(&mut self, windows: &[Window]) -> Result<()> {
        let parts = self.partition()?;
        let (left, spare) = self.halves_start(windows, &parts)?;
        let h = self.plan.h;
        let by_a0: BTreeMap<usize, &Window> = windows.iter().map(|w| (w.a[0], w)).collect();
        let jobs: Vec<Regrow> = left
            .iter()
            .zip(&spare)
            .map(|(a, &end)| {
                let w = by_a0[a];
                let i = w.idx0;
                Regrow { anchor: w.path[i + 1 - h], chain: w.path[i + 2 - h..=i + 1].to_vec(), end_image: end, exclude: vec![] }
            })
            .collect();
        let w = self.window(&parts[2], &[&parts[0]]);
        self.regrow("regrow", &jobs, &w)?;
        self.cover("cover", &Self::routes(windows), &parts[3])?;
        self.attach_leaves()
    }

    fn th2_halves(&mut self, windows: &[Window]) -> Result<()> {
        let parts = self.partition()?;
        let (left, spare) = self.halves_start(windows, &parts)?;
        let by_a0: BTreeMap<usize, &Window> = windows.iter().map(|w| (w.a[0], w)).collect();
        let imgs: Vec<usize> = left.iter().map(|&a| self.image(a)).collect();
        let demand = StarDemand::uniform(&imgs, &parts[2], 1).map_err(|e| self.fail("overflow", e))?;
        let stars = match saturating_star_matching(self.g, &demand) {
            MatchOutcome::Matching(s) => s,
            MatchOutcome::Violator(v) => {
                return Err(self.fail("overflow", Error::EmbeddingFailed(format!("Hall violator {v:?}"))))
            }
        };
        let owner: BTreeMap<usize, usize> = imgs.iter().copied().zip(left.iter().copied()).collect();
        for (x, b) in &stars.stars {
            self.emb.set(by_a0[&owner[x]].a[1], b[0]);
        }
        self.record("overflow", format!("{} left-over a_0 matched into V_3", left.len()));
        let mut w = self.free_in(&parts[2]);
        w.extend(spare);
        self.cover("cover", &Self::routes(windows), &w)?;
        self.attach_leaves()
    }

    fn case_c(&mut self, stars: &[HangingStar]) -> Result<()> {
        let parts = self.partition()?;
        self.embed_core(&parts[0])?;
        let roots: Vec<usize> = stars.iter().map(|s| s.root).collect();
        let (hit, left, spare) = self.match_into("match", &roots, &parts[1])?;
        let by_root: BTreeMap<usize, &HangingStar> = stars.iter().map(|s| (s.root, s)).collect();
        for (r, &v) in &hit {
            self.emb.set(by_root[r].center, v);
        }
        let chosen: Vec<(&HangingStar, usize)> = left.iter().zip(&spare).map(|(r, &end)| (by_root[r], end)).collect();
        let first: Vec<Regrow> = chosen
            .iter()
            .map(|&(s, end)| {
                let mut chain: Vec<usize> = s.path[s.ia + 1..=s.iz].to_vec();
                chain.extend(&s.hang);
                chain.push(s.center);
                Regrow { anchor: s.path[s.ia], chain, end_image: end, exclude: vec![s.path[s.iz + 1]] }
            })
            .collect();
        let w = self.window(&parts[3], &[&parts[0]]);
        self.regrow("regrow-1", &first, &w)?;
        let second: Vec<Regrow> = chosen
            .iter()
            .map(|&(s, _)| Regrow {
                anchor: s.path[s.iz],
                chain: s.path[s.iz + 1..=s.ib].to_vec(),
                end_image: self.image(s.path[s.ib]),
                exclude: vec![],
            })
            .collect();
        let w = self.window(&parts[4], &[&parts[2], &parts[0]]);
        self.regrow("regrow-2", &second, &w)?;
        self.attach_leaves()
    }

    fn th2_pendant(&mut self, s: &BTreeMap<usize, usize>) -> Result<()> {
        let parts = self.partition()?;
        self.embed_core(&parts[0])?;
        let Roles::Pendant { stars, .. } = &self.plan.roles else { unreachable!() };
        let mut centres: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for st in stars {
            centres.entry(self.image(st.root)).or_default().push(st.center);
        }
        let imgs: Vec<usize> = centres.keys().copied().collect();
        let f: Vec<usize> = centres.values().map(Vec::len).collect();
        debug_assert_eq!(f.iter().sum::<usize>(), s.values().sum::<usize>());
        let demand = StarDemand::new(&imgs, &parts[1], &f).map_err(|e| self.fail("match", e))?;
        let seed = self.sub_seed();
        let greedy = maximal_star_matching_greedy(self.g, &demand, seed, None).map_err(|e| self.fail("match", e))?;
        self.place_stars(&centres, &greedy.matching);
        let left = greedy.uncovered_a;
        let m = self.m();
        self.check("match", NamedInequality::le("|A_2| < m", left.len() as f64, m as f64, true))?;
        self.record("match", format!("{} of {} roots served, {} left over", imgs.len() - left.len(), imgs.len(), left.len()));
        let f2: Vec<usize> = left.iter().map(|a| centres[a].len()).collect();
        let demand = StarDemand::new(&left, &parts[2], &f2).map_err(|e| self.fail("overflow", e))?;
        match saturating_star_matching(self.g, &demand) {
            MatchOutcome::Matching(st) => self.place_stars(&centres, &st),
            MatchOutcome::Violator(v) => {
                return Err(self.fail("overflow", Error::EmbeddingFailed(format!("Hall violator {v:?}"))))
            }
        }
        self.record("overflow", format!("{} centres into V_3", f2.iter().sum::<usize>()));
        self.attach_leaves()
    }
}
