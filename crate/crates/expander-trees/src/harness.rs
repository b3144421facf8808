//! Batch experiments: host and tree generators, a flat key-value config,
//! and reports as CSV rows plus a JSON aggregate.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::verify_embedding;
use crate::error::{Error, Result};
use crate::extendable::Strictness;
use crate::graph::Graph;
use crate::pipeline::{embed_spanning_tree, PipelineParams, Theorem};
use crate::spectral::{falsify_expansion_sampled, SampledOutcome};
use crate::tree::{random_bounded_tree, Tree};

/// Restarts of the regular-graph pairing before giving up.
pub const REGULAR_REJECTION_BUDGET: usize = 1_000;

/// Inclusive range of host orders; a single value is `n..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub lo: usize,
    pub hi: usize,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl FromStr for Order {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::InvalidSpec(format!("bad order {s:?}")));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => (num(s)?, num(s)?),
        };
        if lo == 0 || lo > hi {
            return Err(Error::InvalidSpec(format!("bad order range {s:?}")));
        }
        Ok(Order { lo, hi })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HostSpec {
    Regular { n: Order, d: usize },
    Gnp { n: Order, p: f64 },
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Path,
    Star,
    /// Spine with one leg on every `every`-th spine vertex.
    Caterpillar { every: usize },
    Binary,
    /// Spine with a branch `v − r − c` plus two leaves on `c` at every
    /// `every`-th spine vertex.
    PendantStars { every: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeSpec {
    Random { delta: usize },
    Family(Family),
    File(PathBuf),
}

/// One experiment. Every random choice derives from `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub host: HostSpec,
    pub tree: TreeSpec,
    pub theorem: Theorem,
    pub mode: Strictness,
    /// Host expansion; half the minimum degree (certified by sampling) when
    /// unset.
    pub d: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub slack_ratio: f64,
    pub leaf_floor: usize,
    pub attempts: usize,
    pub h: Option<usize>,
    pub k: Option<usize>,
    pub certify_trials: usize,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    /// Record wall-clock milliseconds (reports are then not reproducible).
    pub timings: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PipelineParams::desk(Theorem::Th1Plus, 1);
        ExperimentConfig {
            host: HostSpec::Gnp { n: Order { lo: 200, hi: 200 }, p: 0.5 },
            tree: TreeSpec::Random { delta: 3 },
            theorem: Theorem::Th1Plus,
            mode: Strictness::Desk,
            d: None,
            trials: 1,
            seed: 0,
            slack_ratio: p.slack_ratio,
            leaf_floor: p.leaf_floor,
            attempts: p.attempts,
            h: None,
            k: None,
            certify_trials: 64,
            threads: 0,
            timings: false,
            out: None,
        }
    }
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::Th1Plus => "th1+",
        Theorem::Th2 => "th2",
    }
}

fn mode_name(s: Strictness) -> &'static str {
    match s {
        Strictness::Strict => "strict",
        Strictness::Desk => "desk",
    }
}

pub fn parse_mode(s: &str) -> Result<Strictness> {
    match s {
        "strict" => Ok(Strictness::Strict),
        "desk" => Ok(Strictness::Desk),
        _ => Err(Error::InvalidSpec(format!("mode must be strict or desk, got {s:?}"))),
    }
}

pub fn parse_theorem(s: &str) -> Result<Theorem> {
    match s {
        "th1+" | "th1" => Ok(Theorem::Th1Plus),
        "th2" => Ok(Theorem::Th2),
        _ => Err(Error::InvalidSpec(format!("theorem must be th1+ or th2, got {s:?}"))),
    }
}

impl ExperimentConfig {
    /// The flat `key = value` form; `parse` of the output gives back `self`.
    pub fn to_text(&self) -> String {
        let mut kv: Vec<(&str, String)> = Vec::new();
        match &self.host {
            HostSpec::Regular { n, d } => {
                kv.push(("host", "regular".into()));
                kv.push(("host_n", n.to_string()));
                kv.push(("host_d", d.to_string()));
            }
            HostSpec::Gnp { n, p } => {
                kv.push(("host", "gnp".into()));
                kv.push(("host_n", n.to_string()));
                kv.push(("host_p", format!("{p:?}")));
            }
            HostSpec::File(p) => {
                kv.push(("host", "file".into()));
                kv.push(("host_file", p.display().to_string()));
            }
        }
        match &self.tree {
            TreeSpec::Random { delta } => {
                kv.push(("tree", "random".into()));
                kv.push(("tree_delta", delta.to_string()));
            }
            TreeSpec::Family(f) => {
                let (name, every) = match f {
                    Family::Path => ("path", None),
                    Family::Star => ("star", None),
                    Family::Binary => ("binary", None),
                    Family::Caterpillar { every } => ("caterpillar", Some(*every)),
                    Family::PendantStars { every } => ("pendant", Some(*every)),
                };
                kv.push(("tree", name.into()));
                if let Some(e) = every {
                    kv.push(("tree_every", e.to_string()));
                }
            }
            TreeSpec::File(p) => {
                kv.push(("tree", "file".into()));
                kv.push(("tree_file", p.display().to_string()));
            }
        }
        kv.push(("theorem", theorem_name(self.theorem).into()));
        kv.push(("mode", mode_name(self.mode).into()));
        if let Some(d) = self.d {
            kv.push(("d", d.to_string()));
        }
        kv.push(("trials", self.trials.to_string()));
        kv.push(("seed", self.seed.to_string()));
        kv.push(("slack_ratio", format!("{:?}", self.slack_ratio)));
        kv.push(("leaf_floor", self.leaf_floor.to_string()));
        kv.push(("attempts", self.attempts.to_string()));
        if let Some(h) = self.h {
            kv.push(("h", h.to_string()));
        }
        if let Some(k) = self.k {
            kv.push(("k", k.to_string()));
        }
        kv.push(("certify_trials", self.certify_trials.to_string()));
        kv.push(("threads", self.threads.to_string()));
        kv.push(("timings", self.timings.to_string()));
        if let Some(o) = &self.out {
            kv.push(("out", o.display().to_string()));
        }
        kv.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Reads `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults, unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got {line:?}") })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut c = ExperimentConfig::default();
        let take = |kv: &mut BTreeMap<String, String>, k: &str| kv.remove(k);
        fn num<T: FromStr>(k: &str, v: String) -> Result<T> {
            v.parse().map_err(|_| Error::InvalidSpec(format!("{k}: cannot parse {v:?}")))
        }
        let host = take(&mut kv, "host").unwrap_or_else(|| "gnp".into());
        let order = |kv: &mut BTreeMap<String, String>| -> Result<Order> {
            kv.remove("host_n").map_or(Ok(Order { lo: 200, hi: 200 }), |v| v.parse())
        };
        c.host = match host.as_str() {
            "regular" => {
                let n = order(&mut kv)?;
                let d = num("host_d", take(&mut kv, "host_d").ok_or_else(|| Error::InvalidSpec("host_d missing".into()))?)?;
                HostSpec::Regular { n, d }
            }
            "gnp" => {
                let n = order(&mut kv)?;
                let p = take(&mut kv, "host_p").map_or(Ok(0.5), |v| num("host_p", v))?;
                HostSpec::Gnp { n, p }
            }
            "file" => HostSpec::File(
                take(&mut kv, "host_file").ok_or_else(|| Error::InvalidSpec("host_file missing".into()))?.into(),
            ),
            other => return Err(Error::InvalidSpec(format!("unknown host kind {other:?}"))),
        };
        let tree = take(&mut kv, "tree").unwrap_or_else(|| "random".into());
        let every = |kv: &mut BTreeMap<String, String>| -> Result<usize> {
            kv.remove("tree_every").map_or(Ok(4), |v| num("tree_every", v))
        };
        c.tree = match tree.as_str() {
            "random" => TreeSpec::Random { delta: take(&mut kv, "tree_delta").map_or(Ok(3), |v| num("tree_delta", v))? },
            "path" => TreeSpec::Family(Family::Path),
            "star" => TreeSpec::Family(Family::Star),
            "binary" => TreeSpec::Family(Family::Binary),
            "caterpillar" => TreeSpec::Family(Family::Caterpillar { every: every(&mut kv)? }),
            "pendant" => TreeSpec::Family(Family::PendantStars { every: every(&mut kv)? }),
            "file" => TreeSpec::File(
                take(&mut kv, "tree_file").ok_or_else(|| Error::InvalidSpec("tree_file missing".into()))?.into(),
            ),
            other => return Err(Error::InvalidSpec(format!("unknown tree kind {other:?}"))),
        };
        if let Some(v) = take(&mut kv, "theorem") {
            c.theorem = parse_theorem(&v)?;
        }
        if let Some(v) = take(&mut kv, "mode") {
            c.mode = parse_mode(&v)?;
        }
        if let Some(v) = take(&mut kv, "d") {
            c.d = Some(num("d", v)?);
        }
        macro_rules! field {
            ($key:literal, $field:expr) => {
                if let Some(v) = take(&mut kv, $key) {
                    $field = num($key, v)?;
                }
            };
        }
        field!("trials", c.trials);
        field!("seed", c.seed);
        field!("slack_ratio", c.slack_ratio);
        field!("leaf_floor", c.leaf_floor);
        field!("attempts", c.attempts);
        field!("certify_trials", c.certify_trials);
        field!("threads", c.threads);
        field!("timings", c.timings);
        if let Some(v) = take(&mut kv, "h") {
            c.h = Some(num("h", v)?);
        }
        if let Some(v) = take(&mut kv, "k") {
            c.k = Some(num("k", v)?);
        }
        c.out = take(&mut kv, "out").map(PathBuf::from);
        if let Some(k) = kv.keys().next() {
            return Err(Error::InvalidSpec(format!("unknown key {k:?}")));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn params(&self, d: usize) -> PipelineParams {
        let base = match self.mode {
            Strictness::Strict => PipelineParams::strict(self.theorem, d),
            Strictness::Desk => PipelineParams::desk(self.theorem, d),
        };
        PipelineParams {
            slack_ratio: self.slack_ratio,
            leaf_floor: self.leaf_floor,
            attempts: self.attempts,
            h: self.h,
            k: self.k,
            ..base
        }
    }
}

/// `G(n, p)` by independent coin flips.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("coin-flip edges are simple")
}

/// Random `d`-regular simple graph by the pairing model: stubs are paired
/// one random pair at a time, skipping pairs that would make a loop or a
/// repeated edge, and the whole pairing restarts when it gets stuck. Each
/// restart counts against [`REGULAR_REJECTION_BUDGET`].
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if (n * d) % 2 == 1 || d >= n.max(1) {
        return Err(Error::InvalidSpec(format!("no {d}-regular simple graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'draw: for _ in 0..REGULAR_REJECTION_BUDGET {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        while !stubs.is_empty() {
            let mut tries = 0;
            loop {
                let (i, j) = (rng.gen_range(0..stubs.len()), rng.gen_range(0..stubs.len()));
                let (u, v) = (stubs[i].min(stubs[j]), stubs[i].max(stubs[j]));
                if u != v && !seen.contains(&(u, v)) {
                    seen.insert((u, v));
                    edges.push((u, v));
                    let (hi, lo) = (i.max(j), i.min(j));
                    stubs.swap_remove(hi);
                    stubs.swap_remove(lo);
                    break;
                }
                tries += 1;
                if tries > 4 * stubs.len() * stubs.len() {
                    continue 'draw;
                }
            }
        }
        return Graph::from_edges(n, edges);
    }
    Err(Error::RejectionBudgetExceeded)
}

fn pick_order(n: Order, rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(n.lo..=n.hi)
}

/// Host for one trial; deterministic per seed.
pub fn generate_host(spec: &HostSpec, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        HostSpec::Regular { n, d } => {
            let n = pick_order(*n, &mut rng);
            random_regular(n, *d, rng.gen())
        }
        HostSpec::Gnp { n, p } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidSpec(format!("p = {p} is not a probability")));
            }
            let n = pick_order(*n, &mut rng);
            Ok(gnp(n, *p, rng.gen()))
        }
        HostSpec::File(path) => Graph::read_edge_list(&std::fs::read_to_string(path)?),
    }
}

/// Spine with one leg on every `every`-th spine vertex, `n` vertices in all.
pub fn sparse_caterpillar(n: usize, every: usize) -> Tree {
    let every = every.max(1);
    let spine = (n * every).div_ceil(every + 1).max(1);
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|v| (v - 1, v)).collect();
    for (i, leg) in (spine..n).enumerate() {
        edges.push((i * every, leg));
    }
    Tree::from_edges(n, &edges, 0).expect("caterpillar edges form a tree")
}

/// Spine with a branch `v − r − c` and two leaves on `c` at every
/// `every`-th spine vertex while room remains; `n` vertices in all.
pub fn pendant_star_tree(n: usize, every: usize) -> Tree {
    let every = every.max(1);
    let mut edges = Vec::new();
    let mut next = 0;
    let mut prev: Option<usize> = None;
    let mut i = 0;
    while next < n {
        let v = next;
        next += 1;
        if let Some(p) = prev {
            edges.push((p, v));
        }
        prev = Some(v);
        if i % every == 0 && n - next >= 5 {
            let (r, c) = (next, next + 1);
            edges.extend([(v, r), (r, c), (c, c + 1), (c, c + 2)]);
            next += 4;
        }
        i += 1;
    }
    Tree::from_edges(n, &edges, 0).expect("branches form a tree")
}

/// Heap-shaped binary tree: the parent of `v` is `(v − 1)/2`.
pub fn binary_tree(n: usize) -> Tree {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    Tree::from_edges(n, &edges, 0).expect("heap edges form a tree")
}

pub fn generate_tree(spec: &TreeSpec, n: usize, seed: u64) -> Result<Tree> {
    match spec {
        TreeSpec::Random { delta } => random_bounded_tree(n, *delta, seed),
        TreeSpec::Family(f) => Ok(match f {
            Family::Path => crate::tree::families::path(n),
            Family::Star => crate::tree::families::star(n.saturating_sub(1)),
            Family::Binary => binary_tree(n),
            Family::Caterpillar { every } => sparse_caterpillar(n, *every),
            Family::PendantStars { every } => pendant_star_tree(n, *every),
        }),
        TreeSpec::File(path) => Tree::read(&std::fs::read_to_string(path)?),
    }
}

/// Half the minimum degree, halved again until random refutation finds no
/// violation. Returns `d` and the certificate kind.
pub fn desk_expansion(g: &Graph, trials: usize, seed: u64) -> (usize, String) {
    let mut d = (g.min_degree() / 2).max(1);
    loop {
        match falsify_expansion_sampled(g, &g.vertices(), d as f64, trials, seed) {
            SampledOutcome::NoViolationFound { .. } => return (d, "SampledOnly".into()),
            _ if d == 1 => return (1, "none".into()),
            _ => d /= 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub case: String,
    pub n: usize,
    pub d: usize,
    pub delta: usize,
    pub success: bool,
    pub verified: bool,
    pub millis: u64,
    pub certificate: String,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub successes: usize,
    pub verified: usize,
    pub refused: usize,
    pub success_rate: f64,
    pub case_histogram: BTreeMap<String, usize>,
    pub success_by_case: BTreeMap<String, usize>,
    pub first_refusal: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

pub const CSV_HEADER: [&str; 9] = ["trial", "seed", "case", "n", "d", "delta", "success", "verified", "millis"];

impl RunReport {
    pub fn from_records(records: Vec<TrialRecord>) -> Self {
        let mut a = Aggregate { trials: records.len(), ..Aggregate::default() };
        for r in &records {
            *a.case_histogram.entry(r.case.clone()).or_default() += 1;
            if r.success {
                a.successes += 1;
                *a.success_by_case.entry(r.case.clone()).or_default() += 1;
            }
            if r.verified {
                a.verified += 1;
            }
            if let Some(e) = r.error.as_ref().filter(|e| e.contains("strict mode refused")) {
                a.refused += 1;
                a.first_refusal.get_or_insert_with(|| e.clone());
            }
        }
        a.success_rate = if a.trials == 0 { 0.0 } else { a.successes as f64 / a.trials as f64 };
        RunReport { records, aggregate: a }
    }

    /// No reported success lacks a passing verification.
    pub fn all_verified(&self) -> bool {
        self.records.iter().all(|r| !r.success || r.verified)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_verified() {
            0
        } else {
            1
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                r.case.clone(),
                r.n.to_string(),
                r.d.to_string(),
                r.delta.to_string(),
                r.success.to_string(),
                r.verified.to_string(),
                r.millis.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Writes `trials.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("trials.csv"), self.to_csv())?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        Ok(())
    }
}

fn trial_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(i as u64)
}

/// One trial: host, tree of the host's order, expansion, embedding and an
/// independent verification.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> TrialRecord {
    let seed = trial_seed(cfg.seed, trial);
    let start = Instant::now();
    let mut rec = TrialRecord {
        trial,
        seed,
        case: "-".into(),
        n: 0,
        d: 0,
        delta: 0,
        success: false,
        verified: false,
        millis: 0,
        certificate: "-".into(),
        error: None,
    };
    let out = (|| -> Result<()> {
        let g = generate_host(&cfg.host, seed)?;
        rec.n = g.n();
        let t = generate_tree(&cfg.tree, g.n(), seed ^ 0x5eed)?;
        rec.delta = t.max_degree();
        let (d, cert) = match cfg.d {
            Some(d) => (d, "given".to_string()),
            None => desk_expansion(&g, cfg.certify_trials, seed),
        };
        rec.d = d;
        rec.certificate = cert;
        let params = cfg.params(d);
        rec.case = crate::pipeline::plan_embedding_seeded(&t, &params, seed).case.to_string();
        let e = embed_spanning_tree(&g, &t, &params, seed)?;
        rec.success = true;
        rec.verified = verify_embedding(&g, &t, &e.embedding, true).valid;
        Ok(())
    })();
    if let Err(e) = out {
        rec.error = Some(e.to_string());
    }
    if cfg.timings {
        rec.millis = start.elapsed().as_millis() as u64;
    }
    rec
}

/// Runs every trial (in parallel when `threads ≠ 1`), merges the records in
/// trial order and writes the report files when `out` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let records: Vec<TrialRecord> = if cfg.threads == 1 {
        (0..cfg.trials).map(|i| run_trial(cfg, i)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidSpec(e.to_string()))?;
        pool.install(|| (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect())
    };
    let report = RunReport::from_records(records);
    if let Some(dir) = &cfg.out {
        report.write(dir)?;
    }
    Ok(report)
}
