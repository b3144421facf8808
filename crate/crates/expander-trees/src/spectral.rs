//! Spectral profiles and expander certificates.
//!
//! Routes: exhaustive checks for tiny graphs, the eigenvalue and bijumbled
//! sufficient conditions, and seeded random falsifiers for everything else.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_count_between, joined_scan, neighborhood_into, Graph, VertexSet};
use crate::subsets::{self, binomial, check_budget};

/// Largest order handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub top_eigenvalue: f64,
    /// `max_{i >= 2} |λ_i|`.
    pub lambda: f64,
    pub is_regular: bool,
    pub degree: Option<usize>,
    /// Full spectrum in non-increasing order; empty when the iterative
    /// fallback was used.
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub dense_limit: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { dense_limit: DENSE_LIMIT, max_iterations: 20_000, tolerance: 1e-10 }
    }
}

pub fn second_eigenvalue(g: &Graph) -> Result<SpectralProfile> {
    second_eigenvalue_with(g, EigenOptions::default())
}

pub fn second_eigenvalue_with(g: &Graph, opts: EigenOptions) -> Result<SpectralProfile> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter("spectrum needs n >= 2".into()));
    }
    let degree = g.regular_degree();
    if n <= opts.dense_limit {
        let a = DMatrix::from_fn(n, n, |i, j| if g.adjacent(i, j) { 1.0 } else { 0.0 });
        let mut spectrum: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        spectrum.sort_by(|x, y| y.total_cmp(x));
        let lambda = spectrum[1].abs().max(spectrum[n - 1].abs());
        Ok(SpectralProfile { top_eigenvalue: spectrum[0], lambda, is_regular: degree.is_some(), degree, spectrum })
    } else {
        let (top, lambda) = iterative_lambda(g, opts)?;
        Ok(SpectralProfile { top_eigenvalue: top, lambda, is_regular: degree.is_some(), degree, spectrum: Vec::new() })
    }
}

fn mul(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(v).iter().map(|&u| x[u]).sum();
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Power iteration: top eigenpair of `A + ΔI`, then the largest eigenvalue of
/// `A²` on the orthogonal complement of the top eigenvector.
fn iterative_lambda(g: &Graph, opts: EigenOptions) -> Result<(f64, f64)> {
    let n = g.n();
    let shift = g.max_degree() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v1: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    normalize(&mut v1);
    let mut tmp = vec![0.0; n];
    let mut top = 0.0;
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        mul(g, &v1, &mut tmp);
        tmp.iter_mut().zip(&v1).for_each(|(t, v)| *t += shift * v);
        let est = normalize(&mut tmp) - shift;
        std::mem::swap(&mut v1, &mut tmp);
        if (est - top).abs() <= opts.tolerance * est.abs().max(1.0) {
            top = est;
            converged = true;
            break;
        }
        top = est;
    }
    if !converged {
        return Err(Error::ConvergenceFailure { iterations: opts.max_iterations });
    }
    let project = |x: &mut [f64], v1: &[f64]| {
        let dot: f64 = x.iter().zip(v1).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(v1).for_each(|(a, b)| *a -= dot * b);
    };
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project(&mut x, &v1);
    normalize(&mut x);
    let mut tmp2 = vec![0.0; n];
    let mut sq = 0.0;
    for _ in 0..opts.max_iterations {
        mul(g, &x, &mut tmp);
        mul(g, &tmp, &mut tmp2);
        project(&mut tmp2, &v1);
        let est = normalize(&mut tmp2);
        std::mem::swap(&mut x, &mut tmp2);
        if (est - sq).abs() <= opts.tolerance * est.abs().max(1.0) {
            return Ok((top, est.sqrt()));
        }
        sq = est;
    }
    Err(Error::ConvergenceFailure { iterations: opts.max_iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Exact,
    EigenvalueRoute,
    BijumbledRoute,
    /// Random refutation found nothing. Not a proof.
    SampledOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Claim {
    Expander { n: usize, d: f64 },
    ExpandsInto { window: usize, d: f64 },
    Joined { m: usize },
}

/// Serialized field order is the canonical record order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpanderCertificate {
    pub kind: CertificateKind,
    pub claim: Claim,
    pub parameters: BTreeMap<String, f64>,
    /// Inclusive range of set sizes actually covered by the check.
    pub witness_window: (usize, usize),
    pub seed: Option<u64>,
}

impl ExpanderCertificate {
    pub fn is_proof(&self) -> bool {
        self.kind != CertificateKind::SampledOnly
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }
}

/// A failed hypothesis: the inequality that should have held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    Accepted(T),
    Rejected(Rejection),
}

impl<T> Verdict<T> {
    pub fn accepted(self) -> Option<T> {
        match self {
            Verdict::Accepted(t) => Some(t),
            Verdict::Rejected(_) => None,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }
}

fn params(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Eigenvalue route: `λ < d/8` gives an `(n, d/(2λ))`-expander.
pub fn eigen_expander_certificate(g: &Graph) -> Result<Verdict<ExpanderCertificate>> {
    let d = g.regular_degree().ok_or(Error::NotRegular)? as f64;
    let prof = second_eigenvalue(g)?;
    eigen_certificate_from(g.n(), d, prof.lambda)
}

pub(crate) fn eigen_certificate_from(n: usize, d: f64, lambda: f64) -> Result<Verdict<ExpanderCertificate>> {
    if !(lambda < d / 8.0) {
        return Ok(Verdict::Rejected(Rejection { inequality: "lambda < d/8".into(), lhs: lambda, rhs: d / 8.0 }));
    }
    let d1 = d / (2.0 * lambda);
    let m = (lambda * n as f64 / d).ceil();
    Ok(Verdict::Accepted(ExpanderCertificate {
        kind: CertificateKind::EigenvalueRoute,
        claim: Claim::Expander { n, d: d1 },
        parameters: params(&[("d", d), ("lambda", lambda), ("d1", d1), ("m", m)]),
        witness_window: (1, n),
        seed: None,
    }))
}

/// Bijumbled route: `β ≤ pn/400` and `δ ≥ 4√(pβn)` give an `(n, pn/(4β))`-expander.
pub fn bijumbled_expander_certificate(n: usize, p: f64, beta: f64, min_degree: f64) -> Result<Verdict<ExpanderCertificate>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1]")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
    }
    let nf = n as f64;
    if beta > p * nf / 400.0 {
        return Ok(Verdict::Rejected(Rejection { inequality: "beta <= pn/400".into(), lhs: beta, rhs: p * nf / 400.0 }));
    }
    let need = 4.0 * (p * beta * nf).sqrt();
    if min_degree < need {
        return Ok(Verdict::Rejected(Rejection {
            inequality: "min_degree >= 4*sqrt(p*beta*n)".into(),
            lhs: min_degree,
            rhs: need,
        }));
    }
    let d1 = p * nf / (4.0 * beta);
    Ok(Verdict::Accepted(ExpanderCertificate {
        kind: CertificateKind::BijumbledRoute,
        claim: Claim::Expander { n, d: d1 },
        parameters: params(&[("p", p), ("beta", beta), ("min_degree", min_degree), ("d1", d1)]),
        witness_window: (1, n),
        seed: None,
    }))
}

/// Counterexample to an expansion property.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A set whose neighbourhood is too small.
    Set(VertexSet),
    /// Two disjoint equal-size sets with no edge between them.
    Pair(VertexSet, VertexSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Inclusive size range covered: expansion sizes `1..t-1`, pairs at `t`.
    pub window: (usize, usize),
}

fn threshold(window: usize, d: f64) -> usize {
    (window as f64 / (2.0 * d)).ceil() as usize
}

/// Exhaustive check that `g` `d`-expands into `w`.
pub fn check_expands_into_exact(g: &Graph, w: &VertexSet, d: f64) -> Result<ExpansionCheck> {
    check_expands_into_exact_with_budget(g, w, d, subsets::DEFAULT_BUDGET)
}

pub fn check_expands_into_exact_with_budget(g: &Graph, w: &VertexSet, d: f64, budget: u64) -> Result<ExpansionCheck> {
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("d = {d} must be positive")));
    }
    let n = g.n();
    let t = threshold(w.len(), d);
    let pairs = t >= 1 && 2 * t <= n;
    let mut needed: u128 = (1..t).map(|j| binomial(n, j)).fold(0, u128::saturating_add);
    if pairs {
        needed = needed.saturating_add(binomial(n, t));
    }
    check_budget(needed, budget)?;
    let all: Vec<usize> = (0..n).collect();
    for j in 1..t {
        let mut bad = None;
        subsets::for_each_subset_with_union(g, &all, j, |x, union| {
            let mut nb = union.clone();
            for &v in x {
                nb.set(v, false);
            }
            let count = nb.intersection_count(w.bits());
            if (count as f64) < d * j as f64 {
                bad = Some(VertexSet::from_iter(n, x.iter().copied()));
                return false;
            }
            true
        });
        if let Some(x) = bad {
            return Ok(ExpansionCheck { holds: false, witness: Some(Witness::Set(x)), window: (1, t) });
        }
    }
    if pairs {
        let jc = joined_scan(g, &all, t);
        if let Some((x, y)) = jc.witness {
            return Ok(ExpansionCheck { holds: false, witness: Some(Witness::Pair(x, y)), window: (1, t) });
        }
    }
    Ok(ExpansionCheck { holds: true, witness: None, window: (1, t) })
}

/// Exhaustive `(n, d)`-expander check.
pub fn check_expander_exact(g: &Graph, d: f64) -> Result<ExpansionCheck> {
    check_expands_into_exact(g, &g.vertices(), d)
}

pub fn check_expander_exact_with_budget(g: &Graph, d: f64, budget: u64) -> Result<ExpansionCheck> {
    check_expands_into_exact_with_budget(g, &g.vertices(), d, budget)
}

/// Exact certificate when the exhaustive check succeeds.
pub fn certify_expands_into_exact(g: &Graph, w: &VertexSet, d: f64) -> Result<Verdict<ExpanderCertificate>> {
    let c = check_expands_into_exact(g, w, d)?;
    if !c.holds {
        return Ok(Verdict::Rejected(Rejection { inequality: "exhaustive expansion check".into(), lhs: 0.0, rhs: 1.0 }));
    }
    Ok(Verdict::Accepted(ExpanderCertificate {
        kind: CertificateKind::Exact,
        claim: Claim::ExpandsInto { window: w.len(), d },
        parameters: params(&[("d", d)]),
        witness_window: c.window,
        seed: None,
    }))
}

/// Spectral joinedness: the least `m` with `(d/n)m² > λm`.
pub fn m_joined_spectral(g: &Graph) -> Result<Verdict<usize>> {
    let d = g.regular_degree().ok_or(Error::NotRegular)? as f64;
    let prof = second_eigenvalue(g)?;
    let n = g.n();
    let m = (prof.lambda * n as f64 / d).floor() as usize + 1;
    if 2 * m > n {
        return Ok(Verdict::Rejected(Rejection { inequality: "m <= n/2".into(), lhs: m as f64, rhs: n as f64 / 2.0 }));
    }
    Ok(Verdict::Accepted(m))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampledOutcome {
    NoViolationFound { trials: usize },
    Violation(Witness),
}

impl SampledOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, SampledOutcome::NoViolationFound { .. })
    }

    /// Sampled-only certificate for a pass.
    pub fn certificate(&self, claim: Claim, window: (usize, usize), seed: u64) -> Option<ExpanderCertificate> {
        match self {
            SampledOutcome::NoViolationFound { trials } => Some(ExpanderCertificate {
                kind: CertificateKind::SampledOnly,
                claim,
                parameters: params(&[("trials", *trials as f64)]),
                witness_window: window,
                seed: Some(seed),
            }),
            SampledOutcome::Violation(_) => None,
        }
    }
}

/// Grows a random set of the given size, preferring neighbours of the set so
/// far (sets with small boundary are the likely violators).
fn connected_biased(g: &Graph, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.n();
    let mut inside = vec![false; n];
    let mut x = Vec::with_capacity(size);
    let mut frontier: Vec<usize> = Vec::new();
    while x.len() < size {
        let pick = if !frontier.is_empty() && rng.gen_bool(0.8) {
            let i = rng.gen_range(0..frontier.len());
            frontier.swap_remove(i)
        } else {
            rng.gen_range(0..n)
        };
        if inside[pick] {
            continue;
        }
        inside[pick] = true;
        x.push(pick);
        frontier.extend(g.neighbors(pick).iter().copied().filter(|&u| !inside[u]));
    }
    x.sort_unstable();
    x
}

/// Random refutation of "g d-expands into w". Singletons are scanned
/// exhaustively first since they are cheap.
pub fn falsify_expansion_sampled(g: &Graph, w: &VertexSet, d: f64, trials: usize, seed: u64) -> SampledOutcome {
    let n = g.n();
    let t = threshold(w.len(), d).min(n);
    if t > 1 {
        for v in 0..n {
            let x = VertexSet::from_iter(n, [v]);
            if (neighborhood_into(g, &x, w).len() as f64) < d {
                return SampledOutcome::Violation(Witness::Set(x));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = t >= 1 && 2 * t <= n;
    for trial in 0..trials {
        let check_pair = pairs && (t <= 1 || trial % 2 == 1);
        if check_pair {
            let x = connected_biased(g, t, &mut rng);
            let xs = VertexSet::from_iter(n, x.iter().copied());
            let mut free = xs.union(&neighborhood_into(g, &xs, &g.vertices()));
            free = g.vertices().difference(&free);
            if free.len() >= t {
                let y = VertexSet::from_iter(n, free.iter().take(t));
                return SampledOutcome::Violation(Witness::Pair(xs, y));
            }
        } else if t > 1 {
            let size = rng.gen_range(1..t);
            let x = VertexSet::from_iter(n, connected_biased(g, size, &mut rng));
            if (neighborhood_into(g, &x, w).len() as f64) < d * size as f64 {
                return SampledOutcome::Violation(Witness::Set(x));
            }
        }
    }
    SampledOutcome::NoViolationFound { trials }
}

/// `|e(X,Y) − p|X||Y|| / √(|X||Y|)` for one pair of sets.
pub fn bijumbled_deviation(g: &Graph, p: f64, x: &VertexSet, y: &VertexSet) -> f64 {
    let (a, b) = (x.len() as f64, y.len() as f64);
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let e = edge_count_between(g, x, y) as f64;
    (e - p * a * b).abs() / (a * b).sqrt()
}

/// Lower estimate of the bijumbledness parameter over random pairs of sets.
pub fn bijumbled_deviation_sampled(g: &Graph, p: f64, trials: usize, seed: u64) -> f64 {
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = 0.0f64;
    for trial in 0..trials {
        let cap = if trial % 2 == 0 { n.min(4) } else { n };
        let a = rng.gen_range(1..=cap);
        let b = rng.gen_range(1..=cap);
        order.shuffle(&mut rng);
        let x = VertexSet::from_iter(n, order[..a].iter().copied());
        order.shuffle(&mut rng);
        let y = VertexSet::from_iter(n, order[..b].iter().copied());
        best = best.max(bijumbled_deviation(g, p, &x, &y));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectra_of_small_graphs() {
        let k5 = second_eigenvalue(&Graph::complete(5)).unwrap();
        assert_abs_diff_eq!(k5.lambda, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(k5.top_eigenvalue, 4.0, epsilon = 1e-9);
        let p = second_eigenvalue(&Graph::petersen()).unwrap();
        assert_abs_diff_eq!(p.lambda, 2.0, epsilon = 1e-9);
        let c5 = second_eigenvalue(&Graph::cycle(5)).unwrap();
        assert_abs_diff_eq!(c5.lambda, 1.618_033_988_749_895, epsilon = 1e-9);
    }

    #[test]
    fn iterative_matches_dense() {
        let g = Graph::circulant(60, &[1, 5, 11]);
        let dense = second_eigenvalue(&g).unwrap();
        let it = second_eigenvalue_with(&g, EigenOptions { dense_limit: 10, max_iterations: 200_000, tolerance: 1e-13 })
            .unwrap();
        assert_abs_diff_eq!(dense.top_eigenvalue, it.top_eigenvalue, epsilon = 1e-6);
        assert_abs_diff_eq!(dense.lambda, it.lambda, epsilon = 1e-3);
    }

    #[test]
    fn eigen_route_examples() {
        let c = eigen_expander_certificate(&Graph::complete(17)).unwrap().accepted().unwrap();
        assert_abs_diff_eq!(c.parameters["d1"], 8.0, epsilon = 1e-9);
        assert!(!eigen_expander_certificate(&Graph::petersen()).unwrap().is_accepted());
        assert!(!eigen_expander_certificate(&Graph::cycle(8)).unwrap().is_accepted());
        assert_eq!(eigen_expander_certificate(&Graph::path(3)), Err(Error::NotRegular));
    }

    #[test]
    fn bijumbled_route_examples() {
        let c = bijumbled_expander_certificate(1000, 0.5, 1.0, 90.0).unwrap().accepted().unwrap();
        assert_abs_diff_eq!(c.parameters["d1"], 125.0);
        let r = bijumbled_expander_certificate(1000, 0.5, 2.0, 90.0).unwrap();
        assert!(matches!(r, Verdict::Rejected(ref j) if j.inequality == "beta <= pn/400"));
        let c = bijumbled_expander_certificate(400, 1.0, 1.0, 400.0).unwrap().accepted().unwrap();
        assert_abs_diff_eq!(c.parameters["d1"], 100.0);
        assert!(bijumbled_expander_certificate(10, 0.0, 1.0, 1.0).is_err());
        assert!(bijumbled_expander_certificate(10, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn exact_expansion_examples() {
        let k8 = Graph::complete(8);
        assert!(check_expands_into_exact(&k8, &k8.vertices(), 3.0).unwrap().holds);
        let c8 = Graph::cycle(8);
        let r = check_expands_into_exact(&c8, &c8.vertices(), 3.0).unwrap();
        assert_eq!(r.witness, Some(Witness::Set(VertexSet::from_iter(8, [0]))));
        let k44 = Graph::complete_bipartite(4, 4);
        let side = VertexSet::from_iter(8, 0..4);
        let r = check_expands_into_exact(&k44, &side, 2.0).unwrap();
        match r.witness {
            Some(Witness::Pair(x, y)) => {
                assert_eq!(edge_count_between(&k44, &x, &y), 0);
            }
            other => panic!("expected pair witness, got {other:?}"),
        }
    }

    #[test]
    fn exact_expander_examples() {
        assert!(check_expander_exact(&Graph::complete(6), 2.0).unwrap().holds);
        assert!(!check_expander_exact(&Graph::cycle(10), 2.0).unwrap().holds);
        assert!(!check_expander_exact(&Graph::star(9), 2.0).unwrap().holds);
    }

    #[test]
    fn spectral_joinedness() {
        assert_eq!(m_joined_spectral(&Graph::complete(17)).unwrap(), Verdict::Accepted(2));
        match m_joined_spectral(&Graph::petersen()).unwrap() {
            Verdict::Rejected(r) => assert_eq!(r.lhs, 7.0),
            v => panic!("unexpected {v:?}"),
        }
        match m_joined_spectral(&Graph::cycle(4)).unwrap() {
            Verdict::Rejected(r) => assert_eq!(r.lhs, 5.0),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn sampled_falsifier_examples() {
        let c = Graph::cycle(100);
        assert!(!falsify_expansion_sampled(&c, &c.vertices(), 3.0, 1000, 1).passed());
        let k = Graph::complete(50);
        assert!(falsify_expansion_sampled(&k, &k.vertices(), 5.0, 1000, 1).passed());
    }

    #[test]
    fn bijumbled_samples() {
        let k = Graph::complete(10);
        let x = VertexSet::from_iter(10, 0..3);
        let y = VertexSet::from_iter(10, 5..9);
        assert_eq!(bijumbled_deviation(&k, 1.0, &x, &y), 0.0);
        assert_eq!(bijumbled_deviation_sampled(&Graph::empty(8), 0.0, 100, 3), 0.0);
        let c6 = Graph::cycle(6);
        let x = VertexSet::from_iter(6, [0, 1]);
        let y = VertexSet::from_iter(6, [3, 4]);
        assert_abs_diff_eq!(bijumbled_deviation(&c6, 1.0 / 3.0, &x, &y), 2.0 / 3.0, epsilon = 1e-12);
        assert!(bijumbled_deviation_sampled(&c6, 1.0 / 3.0, 1000, 9) >= 2.0 / 3.0 - 1e-12);
        assert_eq!(bijumbled_deviation_sampled(&c6, 1.0 / 3.0, 50, 4), bijumbled_deviation_sampled(&c6, 1.0 / 3.0, 50, 4));
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = eigen_expander_certificate(&Graph::complete(17)).unwrap().accepted().unwrap();
        let s = c.to_json();
        assert!(s.find("\"kind\"").unwrap() < s.find("\"claim\"").unwrap());
        assert!(s.find("\"witness_window\"").unwrap() < s.find("\"seed\"").unwrap());
        assert_eq!(ExpanderCertificate::from_json(&s).unwrap(), c);
    }
}
