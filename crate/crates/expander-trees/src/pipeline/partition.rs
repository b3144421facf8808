//! Random partitions of a vertex set whose parts each receive a share of
//! the host's expansion.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extendable::Strictness;
use crate::graph::{Graph, VertexSet};
use crate::spectral::{
    check_expands_into_exact_with_budget, falsify_expansion_sampled, CertificateKind, Claim, ExpanderCertificate,
};

/// Exhaustive certification is attempted within this many subset evaluations.
pub const EXACT_PART_BUDGET: u64 = 50_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionOptions {
    pub strictness: Strictness,
    /// Random refutation trials per part when exhaustive search is too large.
    pub trials: usize,
    /// Base of the logarithm in `d_i ≥ 2 log n`.
    pub log_base: f64,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions { strictness: Strictness::Desk, trials: 64, log_base: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub parts: Vec<Vec<usize>>,
    /// `d_i = |V_i| d / 5n`.
    pub targets: Vec<f64>,
    /// One per part; `None` for empty parts and, at the desk, for parts
    /// whose target `d_i` is below 1 (every host vertex would need a
    /// neighbour inside a part that small).
    pub certificates: Vec<Option<ExpanderCertificate>>,
    pub attempts: usize,
    pub warnings: Vec<String>,
}

impl PartitionPlan {
    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }
}

/// `d_i = n_i d / 5n` for every part size.
pub fn part_targets(n: usize, sizes: &[usize], d: f64) -> Vec<f64> {
    sizes.iter().map(|&s| s as f64 * d / (5.0 * n as f64)).collect()
}

fn certify_part(g: &Graph, part: &VertexSet, d: f64, trials: usize, seed: u64) -> Option<ExpanderCertificate> {
    let claim = Claim::ExpandsInto { window: part.len(), d };
    match check_expands_into_exact_with_budget(g, part, d, EXACT_PART_BUDGET) {
        Ok(check) if check.holds => {
            return Some(ExpanderCertificate {
                kind: CertificateKind::Exact,
                claim,
                parameters: [("d".to_string(), d)].into_iter().collect(),
                witness_window: check.window,
                seed: None,
            })
        }
        Ok(_) => return None,
        Err(_) => {}
    }
    let window = (1, ((part.len() as f64 / (2.0 * d)).ceil() as usize).min(g.n()));
    falsify_expansion_sampled(g, part, d, trials, seed).certificate(claim, window, seed)
}

/// Uniformly random partition of `w` into parts of the given sizes such
/// that `g` `d_i`-expands into each part, certified exactly when the
/// enumeration is small and by random refutation otherwise. Failed
/// certifications trigger a fresh partition, up to `retries` times.
pub fn partition_with_expansion(
    g: &Graph,
    w: &VertexSet,
    sizes: &[usize],
    d: f64,
    retries: usize,
    seed: u64,
    opts: &PartitionOptions,
) -> Result<PartitionPlan> {
    let total: usize = sizes.iter().sum();
    if total != w.len() {
        return Err(Error::InvalidParameter(format!("part sizes sum to {total}, |W| = {}", w.len())));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("d = {d} must be positive")));
    }
    let n = g.n();
    let log_n = (n.max(2) as f64).ln() / opts.log_base.ln();
    let targets = part_targets(n, sizes, d);
    let mut warnings = Vec::new();
    if sizes.len() as f64 > log_n {
        let msg = format!("{} parts > log n = {log_n:.2}", sizes.len());
        match opts.strictness {
            Strictness::Strict => return Err(Error::PreconditionViolated(msg)),
            Strictness::Desk => warnings.push(msg),
        }
    }
    for (i, &di) in targets.iter().enumerate() {
        if di < 2.0 * log_n {
            let msg = format!("d_{} ≥ 2 log n fails: {di:.3} vs {:.3}", i + 1, 2.0 * log_n);
            match opts.strictness {
                Strictness::Strict => return Err(Error::PreconditionViolated(msg)),
                Strictness::Desk => warnings.push(msg),
            }
        }
    }
    if opts.strictness == Strictness::Desk {
        let vacuous: Vec<String> =
            targets.iter().enumerate().filter(|(_, &t)| t < 1.0).map(|(i, _)| format!("V_{}", i + 1)).collect();
        if !vacuous.is_empty() {
            warnings.push(format!("d_i < 1, left uncertified: {}", vacuous.join(", ")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = vec![0usize; sizes.len()];
    let mut pool = w.to_vec();
    for attempt in 0..=retries {
        pool.shuffle(&mut rng);
        let mut parts = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            let mut p = pool[start..start + s].to_vec();
            p.sort_unstable();
            parts.push(p);
            start += s;
        }
        let mut certificates = Vec::with_capacity(parts.len());
        let mut ok = true;
        for (i, p) in parts.iter().enumerate() {
            if p.is_empty() {
                certificates.push(None);
                continue;
            }
            if opts.strictness == Strictness::Desk && targets[i] < 1.0 {
                certificates.push(None);
                continue;
            }
            let set = VertexSet::from_iter(n, p.iter().copied());
            let cert_seed = seed ^ ((attempt as u64) << 32 | i as u64);
            match certify_part(g, &set, targets[i], opts.trials, cert_seed) {
                Some(c) => certificates.push(Some(c)),
                None => {
                    failures[i] += 1;
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(PartitionPlan { parts, targets, certificates, attempts: attempt + 1, warnings });
        }
    }
    Err(Error::RetriesExhausted { failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_arithmetic() {
        assert_eq!(part_targets(1000, &[500, 300, 200], 100.0), vec![10.0, 6.0, 4.0]);
    }

    #[test]
    fn sizes_must_sum() {
        let g = Graph::complete(10);
        let e = partition_with_expansion(&g, &g.vertices(), &[4, 4], 2.0, 0, 1, &PartitionOptions::default());
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn complete_graph_first_try() {
        let g = Graph::complete(60);
        let plan = partition_with_expansion(&g, &g.vertices(), &[30, 30], 10.0, 3, 7, &PartitionOptions::default()).unwrap();
        assert_eq!(plan.attempts, 1);
        assert_eq!(plan.sizes(), vec![30, 30]);
        assert!(plan.certificates.iter().all(Option::is_some));
        let mut all: Vec<usize> = plan.parts.concat();
        all.sort_unstable();
        assert_eq!(all, (0..60).collect::<Vec<_>>());
    }

    #[test]
    fn disconnected_host_exhausts_retries() {
        let g = Graph::join(&Graph::complete(20), &Graph::complete(20), &[]);
        let e = partition_with_expansion(&g, &g.vertices(), &[20, 20], 10.0, 2, 3, &PartitionOptions::default());
        assert!(matches!(e, Err(Error::RetriesExhausted { ref failures }) if failures.iter().sum::<usize>() == 3));
    }
}
