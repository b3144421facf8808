use expander_trees::embedding::Embedding;
use expander_trees::extendable::GrowthConfig;
use expander_trees::harness::{desk_expansion, gnp, pendant_star_tree, sparse_caterpillar};
use expander_trees::pipeline::*;
use expander_trees::tree::{families, random_bounded_tree, Tree};
use expander_trees::{Error, Graph, VertexSet};

#[test]
fn part_targets_scale_with_size() {
    // n_i d / 5n with n = 1000, d = 100
    assert_eq!(part_targets(1000, &[500, 300, 200], 100.0), vec![10.0, 6.0, 4.0]);
}

#[test]
fn partition_of_complete_graph() {
    let g = Graph::complete(60);
    let p = partition_with_expansion(&g, &g.vertices(), &[30, 30], 10.0, 0, 1, &PartitionOptions::default()).unwrap();
    assert_eq!(p.attempts, 1);
    assert_eq!(p.sizes(), vec![30, 30]);
    assert!(p.certificates.iter().all(Option::is_some));
    let mut all: Vec<usize> = p.parts.concat();
    all.sort_unstable();
    assert_eq!(all, (0..60).collect::<Vec<_>>());
}

#[test]
fn partition_sizes_must_cover_w() {
    let g = Graph::complete(10);
    let r = partition_with_expansion(&g, &g.vertices(), &[4, 4], 2.0, 3, 0, &PartitionOptions::default());
    assert!(matches!(r, Err(Error::InvalidParameter(_))));
}

#[test]
fn many_leaves_slack_identity() {
    // A binary heap tree has about n/2 leaves, far above n_h / 4k.
    let n = 4000;
    let t = expander_trees::harness::binary_tree(n);
    let d = 100;
    let p = PipelineParams::strict(Theorem::Th1Plus, d);
    let plan = plan_embedding(&t, &p);
    assert_eq!(plan.case, Case::ManyLeaves);
    let delta = t.max_degree();
    let m = n.div_ceil(2 * d);
    let v1 = plan.sizes[0];
    let slack = v1 - plan.core.len() as i64;
    assert_eq!(slack, 22 * (delta * m) as i64);
    // 4Δ⌈|V_1|/2d_1⌉ with d_1 = |V_1| d / 5n is 4Δ⌈5n/2d⌉ = 4Δ·5m here.
    let d1 = v1 as f64 * d as f64 / (5.0 * n as f64);
    let need = 4 * delta * (v1 as f64 / (2.0 * d1)).ceil() as usize;
    assert_eq!(need, 20 * delta * m);
    assert!((need as i64) < slack);
    assert_eq!(plan.sizes.iter().sum::<i64>(), n as i64);
}

fn closed_loop(g: &Graph, t: &Tree, theorem: Theorem, seed: u64) -> SpanningEmbedding {
    let (d, _) = desk_expansion(g, 64, seed);
    let e = embed_spanning_tree(g, t, &PipelineParams::desk(theorem, d), seed).unwrap();
    let check = verify_embedding(g, t, &e.embedding, true);
    assert!(check.valid, "{:?}", check.violation);
    assert!(e.verified);
    let mut images = e.map();
    images.sort_unstable();
    assert_eq!(images, (0..g.n()).collect::<Vec<_>>());
    e
}

#[test]
fn random_cubic_tree_spans_dense_host() {
    let g = gnp(600, 0.3, 11);
    let t = random_bounded_tree(600, 3, 11).unwrap();
    let e = closed_loop(&g, &t, Theorem::Th1Plus, 11);
    assert_eq!(e.case, Case::ManyLeaves);
}

#[test]
fn path_is_covered_exactly() {
    let g = gnp(300, 0.5, 5);
    let e = closed_loop(&g, &families::path(300), Theorem::Th1Plus, 5);
    assert_eq!(e.case, Case::CaseA);
    assert!(e.phases.iter().any(|p| p.name == "cover"));
}

#[test]
fn caterpillars_and_pendant_stars() {
    let g = gnp(400, 0.5, 3);
    assert_eq!(closed_loop(&g, &sparse_caterpillar(400, 5), Theorem::Th1Plus, 3).case, Case::CaseB);
    assert_eq!(closed_loop(&g, &pendant_star_tree(400, 4), Theorem::Th1Plus, 3).case, Case::CaseC);
    assert_eq!(closed_loop(&g, &sparse_caterpillar(400, 5), Theorem::Th2, 3).case, Case::Th2Caterpillar);
    assert_eq!(closed_loop(&g, &pendant_star_tree(400, 4), Theorem::Th2, 3).case, Case::Th2Pendant);
}

#[test]
fn embedding_json_has_fixed_field_order() {
    let g = gnp(200, 0.5, 2);
    let e = closed_loop(&g, &random_bounded_tree(200, 3, 2).unwrap(), Theorem::Th1Plus, 2);
    let j = e.to_json();
    let pos: Vec<usize> =
        ["\"case\"", "\"seed\"", "\"phases\"", "\"map\"", "\"verified\""].iter().map(|k| j.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    let v: serde_json::Value = serde_json::from_str(&j).unwrap();
    assert_eq!(v["map"].as_array().unwrap().len(), 200);
    assert_eq!(v["verified"], true);
}

#[test]
fn order_mismatch_is_rejected() {
    let g = Graph::complete(10);
    let r = embed_spanning_tree(&g, &families::path(9), &PipelineParams::desk(Theorem::Th1Plus, 2), 0);
    assert!(matches!(r, Err(Error::InvalidParameter(_))));
}

#[test]
fn failures_name_case_and_phase() {
    // A cycle cannot host a caterpillar with legs: the run fails, and the
    // error says where.
    let g = Graph::cycle(240);
    let t = sparse_caterpillar(240, 5);
    let mut p = PipelineParams::desk(Theorem::Th1Plus, 1);
    p.attempts = 1;
    let err = embed_spanning_tree(&g, &t, &p, 0).unwrap_err().to_string();
    let case = plan_embedding(&t, &p).case;
    assert!(err.contains(case.tag()), "{err}");
}

#[test]
fn strict_mode_refuses_desk_hosts() {
    let g = gnp(300, 0.5, 1);
    let t = random_bounded_tree(300, 3, 1).unwrap();
    for th in [Theorem::Th1Plus, Theorem::Th2] {
        match embed_spanning_tree(&g, &t, &PipelineParams::strict(th, 75), 1) {
            Err(Error::StrictRefusal(msg)) => assert!(msg.contains("fails")),
            other => panic!("{other:?}"),
        }
    }
}

fn regrow_cfg() -> RegrowConfig {
    RegrowConfig { delta: 2, d1: 4, m: 1, growth: GrowthConfig { enforce: false, ..GrowthConfig::desk() } }
}

#[test]
fn regrow_with_no_jobs_is_identity() {
    let g = Graph::complete(8);
    let t = families::path(4);
    let mut e = Embedding::from_images(&[0, 1, 2, 3]);
    let before = e.clone();
    let arr = prune_and_regrow(&g, &t, &mut e, &[], &VertexSet::from_iter(8, 4..8), &regrow_cfg()).unwrap();
    assert!(arr.paths.is_empty());
    assert_eq!(e, before);
}

#[test]
fn regrow_moves_a_pendant_tree_into_the_window() {
    // 0 - 1 - 2, with a pendant leaf 3 on 1. The chain [1, 2] is rebuilt
    // between φ(0) and host 20, and the leaf follows 1 into the window.
    let g = Graph::complete(40);
    let t = Tree::from_edges(4, &[(0, 1), (1, 2), (1, 3)], 0).unwrap();
    let mut e = Embedding::from_images(&[0, 1, 2, 3]);
    e.unset(2);
    let w = VertexSet::from_iter(40, 21..40);
    let job = Regrow { anchor: 0, chain: vec![1, 2], end_image: 20, exclude: vec![] };
    prune_and_regrow(&g, &t, &mut e, &[job], &w, &regrow_cfg()).unwrap();
    assert_eq!(e.get(0), Some(0));
    assert_eq!(e.get(2), Some(20));
    for u in [1, 3] {
        assert!(w.contains(e.get(u).unwrap()));
    }
    assert!(verify_embedding(&g, &t, &e, false).valid);
}

#[test]
fn regrow_rejects_shapes_beyond_capacity() {
    // The subtree below 1 has height 3 > s = 2.
    let g = Graph::complete(40);
    let t = Tree::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)], 0).unwrap();
    let mut e = Embedding::from_images(&[0, 1, 2, 3, 4, 5]);
    e.unset(2);
    let job = Regrow { anchor: 0, chain: vec![1, 2], end_image: 20, exclude: vec![] };
    let r = prune_and_regrow(&g, &t, &mut e, &[job], &VertexSet::from_iter(40, 21..40), &regrow_cfg());
    assert!(matches!(r, Err(Error::ShapeMismatch(_))));
}

#[test]
fn dispatch_is_total_on_random_trees() {
    for seed in 0..200 {
        let n = 40 + (seed as usize * 37) % 700;
        let t = random_bounded_tree(n, 2 + seed as usize % 4, seed).unwrap();
        for th in [Theorem::Th1Plus, Theorem::Th2] {
            let plan = plan_embedding_seeded(&t, &PipelineParams::desk(th, 20), seed);
            assert_eq!(plan.sizes.iter().sum::<i64>(), n as i64);
            assert!(Case::ALL.contains(&plan.case));
        }
    }
}
