use expander_trees::harness::*;
use expander_trees::pipeline::Theorem;
use expander_trees::extendable::Strictness;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = "host = gnp\nhost_n = 200..260\nhost_p = 0.5\ntree = random\ntrials = 6\nseed = 42\n";
    let mut bytes = Vec::new();
    for run in 0..2 {
        let mut c = config(text);
        c.out = Some(dir.path().join(format!("run{run}")));
        c.threads = if run == 0 { 1 } else { 0 };
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.exit_code(), 0);
        let out = c.out.unwrap();
        bytes.push((std::fs::read(out.join("trials.csv")).unwrap(), std::fs::read(out.join("report.json")).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn csv_columns_in_fixed_order() {
    let r = run_experiment(&config("host_n = 200\ntrials = 2\nseed = 1\n")).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "trial,seed,case,n,d,delta,success,verified,millis");
    assert_eq!(lines.count(), 2);
    assert!(r.records.iter().all(|t| t.success && t.verified && t.millis == 0));
}

#[test]
fn empty_experiment_exits_cleanly() {
    let r = run_experiment(&config("trials = 0\n")).unwrap();
    assert!(r.records.is_empty());
    assert_eq!(r.aggregate.trials, 0);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn strict_runs_are_refused_with_the_inequality() {
    let r = run_experiment(&config("host = regular\nhost_n = 10000\nhost_d = 4\nmode = strict\nd = 3\ntrials = 2\n")).unwrap();
    assert_eq!(r.aggregate.refused, 2, "{:?}", r.records);
    assert!(r.aggregate.first_refusal.as_deref().unwrap().contains("Δ^{5√log n} ≤ d fails"));
    assert!(r.records.iter().all(|t| !t.success && !t.verified));
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn histogram_counts_cases() {
    let r = run_experiment(&config("host_n = 240\ntree = caterpillar\ntree_every = 5\ntrials = 3\nseed = 4\n")).unwrap();
    assert_eq!(r.aggregate.case_histogram.get("CASE_B"), Some(&3));
    assert_eq!(r.aggregate.success_by_case.values().sum::<usize>(), r.aggregate.successes);
}

#[test]
fn config_text_round_trips() {
    let c = ExperimentConfig {
        host: HostSpec::Regular { n: Order { lo: 100, hi: 140 }, d: 40 },
        tree: TreeSpec::Family(Family::PendantStars { every: 3 }),
        theorem: Theorem::Th2,
        mode: Strictness::Strict,
        d: Some(12),
        h: Some(2),
        k: Some(9),
        slack_ratio: 0.0125,
        out: Some("reports/x".into()),
        ..ExperimentConfig::default()
    };
    assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
}

#[test]
fn config_errors() {
    assert!(ExperimentConfig::parse("hots = gnp\n").is_err());
    assert!(ExperimentConfig::parse("trials = many\n").is_err());
    assert!(ExperimentConfig::parse("mode = lax\n").is_err());
    assert!(ExperimentConfig::parse("host_n = 9..3\n").is_err());
    assert!(ExperimentConfig::parse("just words\n").is_err());
    assert_eq!(config("# comment\n\ntrials = 3 # three\n").trials, 3);
}

#[test]
fn host_generators() {
    let g = generate_host(&HostSpec::Regular { n: Order { lo: 10, hi: 10 }, d: 3 }, 1).unwrap();
    assert!((0..10).all(|v| g.degree(v) == 3));
    assert_eq!(generate_host(&HostSpec::Gnp { n: Order { lo: 50, hi: 50 }, p: 1.0 }, 0).unwrap().edge_count(), 1225);
    assert!(random_regular(5, 3, 0).is_err());
    for (n, d) in [(12, 5), (14, 13), (2000, 8)] {
        let g = random_regular(n, d, 3).unwrap();
        assert!((0..n).all(|v| g.degree(v) == d), "{n} {d}");
    }
    let a = generate_host(&HostSpec::Gnp { n: Order { lo: 30, hi: 90 }, p: 0.3 }, 8).unwrap();
    let b = generate_host(&HostSpec::Gnp { n: Order { lo: 30, hi: 90 }, p: 0.3 }, 8).unwrap();
    assert_eq!(a.to_edge_list(), b.to_edge_list());
}
