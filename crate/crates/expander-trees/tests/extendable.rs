use expander_trees::embedding::verify_embedding;
use expander_trees::extendable::{
    connect_exact_length, embed_almost_spanning, extend_path, is_extendable, AlmostSpanningOptions, ConnectConfig,
    ExtendableState, GrowthConfig, Strictness, VerifyMode,
};
use expander_trees::tree::random_bounded_tree;
use expander_trees::{Graph, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

#[test]
fn almost_spanning_on_random_graphs() {
    let trials = 1000;
    let mut ok = 0;
    let opts = AlmostSpanningOptions { strictness: Strictness::Desk, ..Default::default() };
    for trial in 0..trials {
        let g = gnp(300, 0.2, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial + 10_000);
        let order = rng.gen_range(20..=180);
        let t = random_bounded_tree(order, 3, trial).unwrap();
        if let Ok(e) = embed_almost_spanning(&g, &g.vertices(), &t, 10.0, &opts) {
            assert!(verify_embedding(&g, &t, &e, false).valid);
            ok += 1;
        }
    }
    assert!(ok * 100 >= trials * 99, "success {ok}/{trials}");
}

#[test]
fn paths_across_a_bridge_always_reverify() {
    let a = Graph::complete(25);
    let g = Graph::join(&a, &a, &[(0, 0)]);
    let cfg = GrowthConfig { mode: VerifyMode::Sampled { trials: 200, seed: 3 }, enforce: false, ..GrowthConfig::desk() };
    for len in [3, 5, 9] {
        let mut s = ExtendableState::new(&g, &g.vertices(), &[3, 30], 3, 1).unwrap();
        if let Ok(p) = extend_path(&mut s, 3, 30, len, &cfg) {
            assert_eq!(p.len(), len + 1);
            assert!(p.windows(2).all(|w| g.adjacent(w[0], w[1])));
            assert!(p.contains(&0) && p.contains(&25));
        }
    }
}

#[test]
fn connect_on_random_graph_is_exact() {
    let g = gnp(200, 0.3, 5);
    let pairs: Vec<(usize, usize)> = (0..6).map(|i| (2 * i, 2 * i + 1)).collect();
    let u = VertexSet::from_iter(200, 12..200);
    for k in 5..12 {
        let c = connect_exact_length(&g, &pairs, &u, &vec![k; 6], 2, 3, &ConnectConfig::desk(k as u64)).unwrap();
        assert_eq!(c.path.len(), k + 1);
        assert_eq!((c.path[0], c.path[k]), pairs[c.index]);
        let mut seen = c.path.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), k + 1);
        assert!(c.path[1..k].iter().all(|&v| u.contains(v)));
    }
}

#[test]
fn sampled_check_finds_planted_violation() {
    let g = Graph::cycle(30);
    let mut s = ExtendableState::new(&g, &g.vertices(), &[], 3, 2).unwrap();
    let c = is_extendable(&s, VerifyMode::Sampled { trials: 50, seed: 1 }).unwrap();
    assert!(!c.holds);
    s.warnings.clear();
}
