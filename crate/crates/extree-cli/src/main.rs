use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use expander_trees::extendable::Strictness;
use expander_trees::harness::{self, ExperimentConfig};
use expander_trees::path_cover::{path_cover_with, verify_path_cover, PathCoverOptions};
use expander_trees::pipeline::{embed_spanning_tree, plan_embedding_seeded};
use expander_trees::spectral::{
    check_expander_exact, eigen_expander_certificate, falsify_expansion_sampled, m_joined_spectral, Claim,
    ExpanderCertificate, Verdict,
};
use expander_trees::tree::{decompose_levels, leaf_or_barepath, star_or_caterpillar, Tree};
use expander_trees::{Error, Graph, VertexSet};

/// Spanning tree embeddings in expanders.
#[derive(Parser, Debug)]
#[command(name = "extree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment config (flat `key = value` file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// strict | desk
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify the expansion of a host.
    Certify {
        /// Edge-list file; the config's host is generated otherwise.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Expansion to certify; the largest sampled value otherwise.
        #[arg(long)]
        d: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Leaf levels, dichotomies and the case plan of a tree.
    Decompose {
        /// Parent-array tree file; the config's tree is generated otherwise.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Spanning embedding of a tree into a host of the same order.
    Embed {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact path cover: one path on `ell` vertices per pair, together
    /// covering every other vertex.
    Cover {
        #[arg(long)]
        graph: PathBuf,
        /// Pairs as `u-v,u-v,...`.
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Batch trials from a config; writes trials.csv and report.json.
    Experiment {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(m) = &c.mode {
        cfg.mode = harness::parse_mode(m)?;
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Graph::read_edge_list(&text)?)
}

fn read_tree(path: &Path) -> Result<Tree> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Tree::read(&text)?)
}

fn host(graph: &Option<PathBuf>, cfg: &ExperimentConfig) -> Result<Graph> {
    match graph {
        Some(p) => read_graph(p),
        None => Ok(harness::generate_host(&cfg.host, cfg.seed)?),
    }
}

/// Writes `value` to `out/name`, or prints it.
fn emit(out: &Option<PathBuf>, name: &str, value: &serde_json::Value) -> Result<()> {
    emit_text(out, name, serde_json::to_string_pretty(value)?)
}

fn emit_text(out: &Option<PathBuf>, name: &str, text: String) -> Result<()> {
    let text = text + "\n";
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn certify(g: &Graph, d: Option<f64>, trials: usize, seed: u64) -> Result<serde_json::Value> {
    let mut certs: Vec<ExpanderCertificate> = Vec::new();
    let mut rejections = Vec::new();
    if g.regular_degree().is_some() {
        match eigen_expander_certificate(g)? {
            Verdict::Accepted(c) => certs.push(c),
            Verdict::Rejected(r) => rejections.push(r),
        }
        if let Verdict::Rejected(r) = m_joined_spectral(g)? {
            rejections.push(r);
        }
    }
    let d = match d {
        Some(d) => d,
        None => harness::desk_expansion(g, trials, seed).0 as f64,
    };
    let claim = Claim::Expander { n: g.n(), d };
    match check_expander_exact(g, d) {
        Ok(c) if c.holds => certs.push(ExpanderCertificate {
            kind: expander_trees::spectral::CertificateKind::Exact,
            claim: claim.clone(),
            parameters: [("d".to_string(), d)].into_iter().collect(),
            witness_window: c.window,
            seed: None,
        }),
        Ok(c) => bail!("{} is not an (n, {d})-expander: witness {:?}", g.n(), c.witness),
        Err(Error::SizeLimitExceeded { .. }) => {
            let t = ((g.n() as f64 / (2.0 * d)).ceil() as usize).min(g.n());
            let out = falsify_expansion_sampled(g, &g.vertices(), d, trials, seed);
            match out.certificate(claim, (1, t), seed) {
                Some(c) => certs.push(c),
                None => bail!("sampled refutation found a violation of d = {d}"),
            }
        }
        Err(e) => return Err(e.into()),
    }
    Ok(json!({ "n": g.n(), "edges": g.edge_count(), "certificates": certs, "rejections": rejections }))
}

fn decompose(t: &Tree, cfg: &ExperimentConfig, h: Option<usize>, k: Option<usize>) -> serde_json::Value {
    let mut params = cfg.params(cfg.d.unwrap_or(1));
    params.h = h.or(params.h);
    params.k = k.or(params.k);
    let (h, k) = (params.h(t.n()), params.k(t.n()));
    let levels = decompose_levels(t, h);
    let plan = plan_embedding_seeded(t, &params, cfg.seed);
    let mut v = json!({
        "n": t.n(),
        "delta": t.max_degree(),
        "h": h,
        "k": k,
        "levels": levels,
        "case": plan.case,
        "sizes": plan.sizes,
        "plan": plan.detail,
    });
    if t.n() > 2 && k > 2 {
        v["leaf_or_barepath"] = json!(leaf_or_barepath(t, k));
        v["star_or_caterpillar"] = json!(star_or_caterpillar(t, k));
    }
    v
}

fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.trim().split_once('-').with_context(|| format!("pair {p:?} is not u-v"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Certify { graph, d, trials, common } => {
            let cfg = load_config(&common)?;
            let g = host(&graph, &cfg)?;
            emit(&cfg.out, "certificate.json", &certify(&g, d, trials, cfg.seed)?)?;
        }
        Command::Decompose { tree, n, h, k, common } => {
            let cfg = load_config(&common)?;
            let t = match &tree {
                Some(p) => read_tree(p)?,
                None => {
                    let n = n.unwrap_or(match &cfg.host {
                        harness::HostSpec::Regular { n, .. } | harness::HostSpec::Gnp { n, .. } => n.lo,
                        harness::HostSpec::File(_) => bail!("--n is needed when the host is a file"),
                    });
                    harness::generate_tree(&cfg.tree, n, cfg.seed)?
                }
            };
            emit(&cfg.out, "decomposition.json", &decompose(&t, &cfg, h, k))?;
        }
        Command::Embed { graph, tree, d, common } => {
            let cfg = load_config(&common)?;
            let g = host(&graph, &cfg)?;
            let t = match &tree {
                Some(p) => read_tree(p)?,
                None => harness::generate_tree(&cfg.tree, g.n(), cfg.seed)?,
            };
            let d = match d.or(cfg.d) {
                Some(d) => d,
                None => harness::desk_expansion(&g, cfg.certify_trials, cfg.seed).0,
            };
            match embed_spanning_tree(&g, &t, &cfg.params(d), cfg.seed) {
                Ok(e) => emit_text(&cfg.out, "embedding.json", e.to_json())?,
                Err(e @ Error::StrictRefusal(_)) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(2));
                }
                Err(e) => {
                    eprintln!("embedding failed: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::Cover { graph, pairs, ell, common } => {
            let cfg = load_config(&common)?;
            let g = read_graph(&graph)?;
            let pairs = parse_pairs(&pairs)?;
            let mut ends = VertexSet::new(g.n());
            for &(a, b) in &pairs {
                if a >= g.n() || b >= g.n() {
                    bail!("pair ({a}, {b}) is outside the host");
                }
                ends.insert(a);
                ends.insert(b);
            }
            let w = g.vertices().difference(&ends);
            let opts = PathCoverOptions { strictness: cfg.mode, seed: cfg.seed, ..PathCoverOptions::default() };
            match path_cover_with(&g, &w, &pairs, ell, &opts) {
                Ok(c) => {
                    let check = verify_path_cover(&g, &w, &pairs, ell, &c.paths);
                    emit(&cfg.out, "cover.json", &json!({ "ell": ell, "paths": c.paths, "verified": check.valid }))?;
                    if !check.valid {
                        return Ok(ExitCode::FAILURE);
                    }
                }
                Err(e) => {
                    eprintln!("path cover failed: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::Experiment { common } => {
            let cfg = load_config(&common)?;
            let report = harness::run_experiment(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", report.to_csv());
            }
            eprintln!("{}", serde_json::to_string(&report.aggregate)?);
            if cfg.mode == Strictness::Strict {
                if let Some(r) = &report.aggregate.first_refusal {
                    eprintln!("{r}");
                }
            }
            return Ok(ExitCode::from(report.exit_code() as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
