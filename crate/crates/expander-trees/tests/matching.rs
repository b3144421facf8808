use expander_trees::matching::*;
use expander_trees::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bipartite graph with `A = 0..a`, `B = a..a+b`.
fn random_bipartite(a: usize, b: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(a + b, edges).unwrap()
}

/// Whether each `B` vertex can be handed to an adjacent centre so that
/// every centre gets exactly its demand.
fn packing_exists(g: &Graph, a: &[usize], b: &[usize], f: &[usize]) -> bool {
    fn go(g: &Graph, a: &[usize], b: &[usize], left: &mut Vec<usize>, i: usize) -> bool {
        if i == b.len() {
            return left.iter().all(|&x| x == 0);
        }
        for j in 0..a.len() {
            if left[j] > 0 && g.adjacent(a[j], b[i]) {
                left[j] -= 1;
                if go(g, a, b, left, i + 1) {
                    return true;
                }
                left[j] += 1;
            }
        }
        false
    }
    go(g, a, b, &mut f.to_vec(), 0)
}

fn neighbours_in(g: &Graph, x: &[usize], b: &[usize]) -> usize {
    b.iter().filter(|&&v| x.iter().any(|&u| g.adjacent(u, v))).count()
}

#[test]
fn flow_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..400 {
        let (na, nb) = (rng.gen_range(1..=4), rng.gen_range(1..=7));
        let g = random_bipartite(na, nb, rng.gen_range(0.2..0.9), &mut rng);
        let a: Vec<usize> = (0..na).collect();
        let b: Vec<usize> = (na..na + nb).collect();
        // A random composition of |B| into |A| positive-or-zero parts.
        let mut f = vec![0; na];
        for _ in 0..nb {
            f[rng.gen_range(0..na)] += 1;
        }
        let demand = StarDemand::new(&a, &b, &f).unwrap();
        match f_matching(&g, &demand).unwrap() {
            MatchOutcome::Matching(m) => {
                assert!(m.is_valid_for(&g, &demand));
                assert!(packing_exists(&g, &a, &b, &f));
            }
            MatchOutcome::Violator(v) => {
                assert!(!packing_exists(&g, &a, &b, &f));
                let need: usize = v.x.iter().map(|u| f[*u]).sum();
                assert_eq!(need, v.demand);
                assert!(neighbours_in(&g, &v.x, &b) < need);
                assert_eq!(v.neighbors.len(), neighbours_in(&g, &v.x, &b));
            }
        }
    }
}

#[test]
fn greedy_packing_is_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..200 {
        let (na, nb) = (rng.gen_range(1..8), rng.gen_range(1..12));
        let g = random_bipartite(na, nb, 0.4, &mut rng);
        let a: Vec<usize> = (0..na).collect();
        let b: Vec<usize> = (na..na + nb).collect();
        let f: Vec<usize> = (0..na).map(|_| rng.gen_range(1..=3)).collect();
        let demand = StarDemand::new(&a, &b, &f).unwrap();
        let r = maximal_star_matching_greedy(&g, &demand, seed, None).unwrap();
        for &u in &r.uncovered_a {
            let free = r.uncovered_b.iter().filter(|&&v| g.adjacent(u, v)).count();
            assert!(free < f[u], "centre {u} could still take a star");
        }
        assert_eq!(r.matching.leaf_count() + r.uncovered_b.len(), nb);
        assert_eq!(r.matching.stars.len() + r.uncovered_a.len(), na);
    }
}

#[test]
fn greedy_leftover_below_joinedness() {
    // K_{2m} minus a perfect matching, split in halves, is m-joined across
    // the sides; any maximal matching leaves fewer than m on each side.
    for m in 2..6 {
        let n = 4 * m;
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !(u % 2 == 0 && v == u + 1)).collect();
        let g = Graph::from_edges(n, edges).unwrap();
        let a: Vec<usize> = (0..n / 2).collect();
        let b: Vec<usize> = (n / 2..n).collect();
        for seed in 0..20 {
            let r = maximal_star_matching_greedy(&g, &StarDemand::uniform(&a, &b, 1).unwrap(), seed, Some(m)).unwrap();
            assert!(r.uncovered_a.len() < m && r.uncovered_b.len() < m);
        }
    }
}

#[test]
fn hypotheses_imply_matchings() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut confirmed = 0;
    for _ in 0..500 {
        let (na, nb) = (rng.gen_range(2..=6), rng.gen_range(2..=8));
        let g = random_bipartite(na, nb, rng.gen_range(0.5..1.0), &mut rng);
        let a: Vec<usize> = (0..na).collect();
        let b: Vec<usize> = (na..na + nb).collect();
        let (d, m) = (2, 1);
        if !verify_lemma_star_hypotheses(&g, &a, &b, d, m).unwrap() {
            continue;
        }
        // Every demand with values in 1..=d and total |B| must be met.
        let mut f = vec![1; na];
        let mut extra = nb as isize - na as isize;
        if extra < 0 || extra as usize > na * (d - 1) {
            continue;
        }
        for x in f.iter_mut() {
            if extra > 0 {
                *x += 1;
                extra -= 1;
            }
        }
        let demand = StarDemand::new(&a, &b, &f).unwrap();
        assert!(f_matching(&g, &demand).unwrap().matching().is_some());
        confirmed += 1;
    }
    assert!(confirmed > 20, "{confirmed}");
}

#[test]
fn maximum_matching_leaves_no_augmenting_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let g = random_bipartite(6, 6, 0.3, &mut rng);
        let a: Vec<usize> = (0..6).collect();
        let b: Vec<usize> = (6..12).collect();
        let r = maximum_matching(&g, &a, &b).unwrap();
        for &u in &r.uncovered_a {
            assert!(r.uncovered_b.iter().all(|&v| !g.adjacent(u, v)));
        }
    }
}
