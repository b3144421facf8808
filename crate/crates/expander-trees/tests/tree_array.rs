use expander_trees::extendable::GrowthConfig;
use expander_trees::harness::gnp;
use expander_trees::spectral::check_expander_exact;
use expander_trees::tree::families;
use expander_trees::tree_array::*;
use expander_trees::{Graph, VertexSet};

/// Number of host vertices one pair of a full array occupies.
fn per_pair(s: usize, delta: usize) -> usize {
    let tree: usize = (0..=s).map(|i| delta.pow(i as u32)).sum();
    (s - 1) * tree + 2
}

fn instance(run: usize) -> (Graph, usize, usize, usize, bool) {
    let s = 2 + run % 3;
    let delta = 2 + (run / 3) % 2;
    let n = 120 + (run * 53) % 281;
    let complete = run % 2 == 0;
    let g = if complete { Graph::complete(n) } else { gnp(n, 0.5, run as u64) };
    let pairs = ((n * 6 / 10) / per_pair(s, delta)).clamp(1, 8);
    (g, s, delta, pairs, complete)
}

#[test]
fn arrays_verify_on_dense_hosts() {
    let cfg = GrowthConfig { enforce: false, ..GrowthConfig::desk() };
    let (mut ok, mut tried) = (0, 0);
    for run in 0..60 {
        let (g, s, delta, pairs, _) = instance(run);
        if pairs * per_pair(s, delta) > g.n() {
            continue;
        }
        tried += 1;
        let ends: Vec<(usize, usize)> = (0..pairs).map(|i| (2 * i, 2 * i + 1)).collect();
        let w = VertexSet::from_iter(g.n(), 2 * pairs..g.n());
        match build_tree_array(&g, &w, &ends, s, delta, delta + 2, 1, &cfg) {
            Ok(arr) => {
                let check = verify_tree_array(&arr, &w, &ends, s, delta, &g);
                assert!(check.valid, "run {run}: {:?}", check.violation);
                assert_eq!(arr.vertex_count(), pairs * per_pair(s, delta));
                ok += 1;
            }
            Err(e) => eprintln!("run {run} (n {}, s {s}, Δ {delta}, pairs {pairs}): {e}", g.n()),
        }
    }
    assert!(tried >= 50, "{tried}");
    assert!(ok * 100 >= tried * 95, "{ok}/{tried}");
}

#[test]
fn complete_hosts_are_exact_expanders() {
    // K_n is an (n, n/4)-expander: singletons see n − 1 ≥ n/4 vertices and
    // any two disjoint 2-sets are joined.
    for n in [120, 233, 400] {
        assert!(check_expander_exact(&Graph::complete(n), n as f64 / 4.0).unwrap().holds);
    }
}

#[test]
fn shaped_arrays_take_only_what_they_need() {
    let g = Graph::complete(80);
    let w = VertexSet::from_iter(80, 4..80);
    let pairs = [(0, 1), (2, 3)];
    let leaf = families::path(2);
    let arr = build_shaped_tree_array(&g, &w, &pairs, 3, 2, 4, 1, &|_, _| leaf.clone(), &GrowthConfig::desk()).unwrap();
    assert!(verify_pruned_tree_array(&arr, &w, &pairs, 3, 2, &g).valid);
    assert!(!verify_tree_array(&arr, &w, &pairs, 3, 2, &g).valid);
    // Two internal vertices per path, each with one extra leaf.
    assert_eq!(arr.vertex_count(), 2 * (4 + 2));
}

#[test]
fn bounds_follow_the_formula() {
    for (pairs, s, delta, d1, m) in [(1, 3, 2, 4, 1), (5, 4, 3, 10, 7), (12, 2, 2, 6, 3)] {
        let b = tree_array_bounds(pairs, s, delta, d1, m);
        let direct = 10 * d1 * m + pairs * (s + 1) * delta.pow(s as u32 + 1);
        assert_eq!(b.w_needed, direct);
        assert_eq!(b.s_min, 2 * b.radius + 1);
    }
}
