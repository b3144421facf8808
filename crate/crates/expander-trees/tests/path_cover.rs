use expander_trees::path_cover::{audit_absorbers, path_cover, verify_path_cover};
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
fn random_dense_covers() {
    let mut ok = 0;
    let runs = 120;
    for run in 0..runs {
        let ell = [6, 8, 10][run % 3];
        let pairs_n = 4 + run % 9;
        let n = ell * pairs_n;
        let g = gnp(n, 0.4, run as u64);
        let pairs: Vec<(usize, usize)> = (0..pairs_n).map(|i| (2 * i, 2 * i + 1)).collect();
        let w = VertexSet::from_iter(n, 2 * pairs_n..n);
        match path_cover(&g, &w, &pairs, ell) {
            Ok(c) => {
                assert!(verify_path_cover(&g, &w, &pairs, ell, &c.paths).valid);
                if let (Some(plan), Some(st)) = (&c.plan, &c.absorbing) {
                    assert!(audit_absorbers(&g, plan, st, 20, run as u64).passed());
                }
                ok += 1;
            }
            Err(e) => eprintln!("run {run} (ell {ell}, pairs {pairs_n}): {e}"),
        }
    }
    assert!(ok * 10 >= runs * 9, "{ok}/{runs}");
}
