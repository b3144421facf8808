//! Spanning embeddings of bounded-degree trees: case dispatch on the tree's
//! structure, expansion-preserving partitions of the host, and the phase
//! executors that fill every host vertex.

pub mod partition;
mod plan;
pub mod regrow;
mod run;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::extendable::Strictness;
use crate::graph::Graph;
use crate::tree::Tree;
use crate::tree_array::{rec_parameters, NamedInequality};

pub use crate::embedding::{verify_embedding, EmbeddingCheck, Violation};
pub use partition::{partition_with_expansion, part_targets, PartitionOptions, PartitionPlan};
pub use plan::{plan_embedding, plan_embedding_seeded, EmbeddingPlan, HangingStar, Roles, Window};
pub use regrow::{prune_and_regrow, Regrow, RegrowConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `d ≥ Δ^{5√log n}`: leaves, bare paths, caterpillars or pendant stars
    /// around the core `T_h`.
    Th1Plus,
    /// `d ≥ CΔ√n`: pendant stars or caterpillars of `T′`.
    Th2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Case {
    ManyLeaves,
    CaseA,
    CaseB,
    CaseC,
    Th2Pendant,
    Th2Caterpillar,
}

impl Case {
    pub const ALL: [Case; 6] =
        [Case::ManyLeaves, Case::CaseA, Case::CaseB, Case::CaseC, Case::Th2Pendant, Case::Th2Caterpillar];

    pub fn tag(self) -> &'static str {
        match self {
            Case::ManyLeaves => "MANY_LEAVES",
            Case::CaseA => "CASE_A",
            Case::CaseB => "CASE_B",
            Case::CaseC => "CASE_C",
            Case::Th2Pendant => "TH2_PENDANT",
            Case::Th2Caterpillar => "TH2_CATERPILLAR",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parameters of one pipeline run. Every `Option` overrides the value the
/// mode would otherwise derive from `n`; nothing derived is cached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub theorem: Theorem,
    pub strictness: Strictness,
    /// Expansion of the host.
    pub d: usize,
    pub h: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<usize>,
    /// Desk stand-in for `Δm`: the slacks `22Δm`, `21Δm` become
    /// `round(22·slack_ratio·n)` and `round(21·slack_ratio·n)`.
    pub slack_ratio: f64,
    /// Desk floor on the thresholds that choose leaves or pendant stars.
    pub leaf_floor: usize,
    pub log_base: f64,
    /// The constant of `d ≥ CΔ√n`; `400k` when unset.
    pub c_const: Option<f64>,
    /// Whole-pipeline attempts, each on a fresh partition.
    pub attempts: usize,
    pub partition_retries: usize,
    pub partition_trials: usize,
    /// Node budget handed to every search.
    pub budget: u64,
}

impl PipelineParams {
    pub fn desk(theorem: Theorem, d: usize) -> Self {
        PipelineParams {
            theorem,
            strictness: Strictness::Desk,
            d,
            h: None,
            k: None,
            m: None,
            slack_ratio: 0.001,
            leaf_floor: 8,
            log_base: 2.0,
            c_const: None,
            attempts: 6,
            partition_retries: 4,
            partition_trials: 64,
            budget: 200_000,
        }
    }

    pub fn strict(theorem: Theorem, d: usize) -> Self {
        PipelineParams { strictness: Strictness::Strict, attempts: 1, ..PipelineParams::desk(theorem, d) }
    }

    pub fn is_strict(&self) -> bool {
        self.strictness == Strictness::Strict
    }

    pub fn log(&self, x: f64) -> f64 {
        x.max(1.0).ln() / self.log_base.ln()
    }

    /// `⌈√log n⌉` in strict mode, 3 at the desk.
    pub fn h(&self, n: usize) -> usize {
        self.h.unwrap_or_else(|| if self.is_strict() { self.log(n as f64).sqrt().ceil() as usize } else { 3 })
    }

    /// `⌈log³ n⌉` in strict mode; 20 (th1+) or 12 (th2) at the desk.
    pub fn k(&self, n: usize) -> usize {
        self.k.unwrap_or_else(|| match (self.is_strict(), self.theorem) {
            (true, _) => self.log(n as f64).powi(3).ceil() as usize,
            (false, Theorem::Th1Plus) => 20,
            (false, Theorem::Th2) => 12,
        })
    }

    /// `⌈n / 2d⌉`, at least 1.
    pub fn m(&self, n: usize) -> usize {
        self.m.unwrap_or_else(|| n.div_ceil(2 * self.d.max(1)).max(1))
    }

    /// `Δm` in strict mode, `slack_ratio·n` at the desk.
    pub fn delta_m(&self, n: usize, delta: usize) -> f64 {
        if self.is_strict() {
            (delta * self.m(n)) as f64
        } else {
            self.slack_ratio * n as f64
        }
    }

    /// `round(mult·Δm)`.
    pub fn slack(&self, n: usize, delta: usize, mult: f64) -> usize {
        (mult * self.delta_m(n, delta)).round() as usize
    }

    /// `γ = 1/4k` of the th2 dichotomy.
    pub fn gamma(&self, n: usize) -> f64 {
        1.0 / (4.0 * self.k(n) as f64)
    }

    /// `C = 100/γ = 400k` unless overridden.
    pub fn c(&self, n: usize) -> f64 {
        self.c_const.unwrap_or(100.0 / self.gamma(n))
    }
}

/// The theorem's hypotheses at `(n, d, Δ)`, in the order strict mode checks
/// them.
pub fn theorem_inequalities(params: &PipelineParams, n: usize, delta: usize) -> Vec<NamedInequality> {
    let (nf, dl, d) = (n as f64, delta as f64, params.d as f64);
    match params.theorem {
        Theorem::Th1Plus => {
            let root = params.log(nf).sqrt();
            let mut v = vec![
                NamedInequality::le("Δ^{5√log n} ≤ d", dl.powf(5.0 * root), d, false),
                NamedInequality::le("d ≤ n − 1", d, nf - 1.0, false),
            ];
            v.extend(rec_parameters(n, params.d, delta).inequalities.into_iter().skip(1));
            v
        }
        Theorem::Th2 => vec![
            NamedInequality::le("CΔ√n ≤ d", params.c(n) * dl * nf.sqrt(), d, false),
            NamedInequality::le("d ≤ n − 1", d, nf - 1.0, false),
        ],
    }
}

/// The first failing hypothesis as a strict-mode refusal.
pub fn strict_refusal(params: &PipelineParams, n: usize, delta: usize) -> Option<Error> {
    theorem_inequalities(params, n, delta).into_iter().find(|c| !c.holds).map(|c| refusal(&c))
}

pub(crate) fn refusal(c: &NamedInequality) -> Error {
    Error::StrictRefusal(format!("{} fails: {} vs {}", c.name, c.lhs, c.rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub name: String,
    pub detail: String,
}

/// A verified spanning embedding and how it was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanningEmbedding {
    pub case: Case,
    pub seed: u64,
    pub phases: Vec<PhaseRecord>,
    pub embedding: Embedding,
    pub verified: bool,
    /// Whole-pipeline attempts used.
    pub attempts: usize,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct EmbeddingJson<'a> {
    case: Case,
    seed: u64,
    phases: &'a [PhaseRecord],
    map: Vec<Option<usize>>,
    verified: bool,
}

impl SpanningEmbedding {
    /// Host vertex per tree vertex.
    pub fn map(&self) -> Vec<usize> {
        self.embedding.images()
    }

    /// `{case, seed, phases, map, verified}` in that order.
    pub fn to_json(&self) -> String {
        let j = EmbeddingJson {
            case: self.case,
            seed: self.seed,
            phases: &self.phases,
            map: self.embedding.map.clone(),
            verified: self.verified,
        };
        serde_json::to_string_pretty(&j).expect("plain data serializes")
    }
}

/// Embeds `t` into `g` so that every host vertex is used. Each attempt draws
/// a fresh partition; the result is verified before it is returned. Errors
/// are tagged with the case and the phase that failed.
pub fn embed_spanning_tree(g: &Graph, t: &Tree, params: &PipelineParams, seed: u64) -> Result<SpanningEmbedding> {
    let n = g.n();
    if t.n() != n {
        return Err(Error::InvalidParameter(format!("tree has {} vertices, host has {n}", t.n())));
    }
    if params.d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if params.is_strict() {
        if let Some(e) = strict_refusal(params, n, t.max_degree()) {
            return Err(e);
        }
    }
    let plan = plan_embedding_seeded(t, params, seed);
    let mut last = Error::exhausted("pipeline");
    for attempt in 0..params.attempts.max(1) {
        let s = seed.wrapping_add((attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        match run::execute(g, t, &plan, params, s) {
            Ok((embedding, phases, warnings)) => {
                let check = verify_embedding(g, t, &embedding, true);
                if !check.valid {
                    last = Error::stage(
                        format!("{}/verify", plan.case),
                        Error::EmbeddingFailed(format!("{:?}", check.violation)),
                    );
                    continue;
                }
                return Ok(SpanningEmbedding {
                    case: plan.case,
                    seed,
                    phases,
                    embedding,
                    verified: true,
                    attempts: attempt + 1,
                    warnings,
                });
            }
            Err(e @ Error::StrictRefusal(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_defaults() {
        let p = PipelineParams::desk(Theorem::Th1Plus, 50);
        assert_eq!((p.h(600), p.k(600), p.m(600)), (3, 20, 6));
        assert_eq!(p.slack(200, 3, 22.0), 4);
        assert_eq!(p.slack(800, 3, 22.0), 18);
        assert_eq!(PipelineParams::desk(Theorem::Th2, 50).k(600), 12);
    }

    #[test]
    fn strict_parameters_follow_logs() {
        let p = PipelineParams::strict(Theorem::Th1Plus, 100);
        // log2 1024 = 10
        assert_eq!(p.h(1024), 4);
        assert_eq!(p.k(1024), 1000);
        assert_eq!(p.delta_m(1000, 3), 15.0);
    }

    #[test]
    fn strict_refuses_small_hosts() {
        let p = PipelineParams::strict(Theorem::Th1Plus, 999);
        match strict_refusal(&p, 1000, 3) {
            Some(Error::StrictRefusal(msg)) => assert!(msg.starts_with("Δ^{5√log n} ≤ d fails")),
            other => panic!("{other:?}"),
        }
        let p = PipelineParams::strict(Theorem::Th2, 999);
        assert!(matches!(strict_refusal(&p, 1000, 3), Some(Error::StrictRefusal(m)) if m.starts_with("CΔ√n ≤ d")));
    }

    #[test]
    fn case_tags_serialize_screaming() {
        for c in Case::ALL {
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
        }
    }
}
