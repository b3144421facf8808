//! Tree-into-graph maps and their structural verifier.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::tree::Tree;

/// Partial map `φ` from tree vertices to host vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<Option<usize>>,
}

impl Embedding {
    pub fn new(tree_order: usize) -> Self {
        Embedding { map: vec![None; tree_order] }
    }

    /// Total map from a dense image vector.
    pub fn from_images(images: &[usize]) -> Self {
        Embedding { map: images.iter().map(|&v| Some(v)).collect() }
    }

    pub fn get(&self, u: usize) -> Option<usize> {
        self.map[u]
    }

    pub fn set(&mut self, u: usize, v: usize) {
        self.map[u] = Some(v);
    }

    pub fn unset(&mut self, u: usize) -> Option<usize> {
        self.map[u].take()
    }

    pub fn mapped_count(&self) -> usize {
        self.map.iter().flatten().count()
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    /// Host vertex → tree vertex, for a host on `host_n` vertices.
    pub fn inverse(&self, host_n: usize) -> Vec<Option<usize>> {
        let mut inv = vec![None; host_n];
        for (u, v) in self.map.iter().enumerate() {
            if let Some(v) = *v {
                if v < host_n {
                    inv[v] = Some(u);
                }
            }
        }
        inv
    }

    pub fn images(&self) -> Vec<usize> {
        self.map.iter().flatten().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    Unmapped { vertex: usize },
    OutOfRange { vertex: usize, image: usize },
    NotInjective { a: usize, b: usize, image: usize },
    EdgeMissing { u: usize, v: usize, images: (usize, usize) },
    NotSurjective { host_vertex: usize },
    OrderMismatch { tree: usize, map: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub valid: bool,
    pub violation: Option<Violation>,
}

impl EmbeddingCheck {
    fn fail(v: Violation) -> Self {
        EmbeddingCheck { valid: false, violation: Some(v) }
    }
}

/// Totality, injectivity and edge preservation; `spanning` also demands
/// that every host vertex is hit.
pub fn verify_embedding(g: &Graph, t: &Tree, e: &Embedding, spanning: bool) -> EmbeddingCheck {
    if e.map.len() != t.n() {
        return EmbeddingCheck::fail(Violation::OrderMismatch { tree: t.n(), map: e.map.len() });
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    for u in 0..t.n() {
        let Some(v) = e.map[u] else { return EmbeddingCheck::fail(Violation::Unmapped { vertex: u }) };
        if v >= g.n() {
            return EmbeddingCheck::fail(Violation::OutOfRange { vertex: u, image: v });
        }
        if let Some(a) = owner[v] {
            return EmbeddingCheck::fail(Violation::NotInjective { a, b: u, image: v });
        }
        owner[v] = Some(u);
    }
    for (p, c) in t.edges() {
        let (a, b) = (e.map[p].unwrap(), e.map[c].unwrap());
        if !g.adjacent(a, b) {
            return EmbeddingCheck::fail(Violation::EdgeMissing { u: p, v: c, images: (a, b) });
        }
    }
    if spanning {
        if let Some(v) = owner.iter().position(Option::is_none) {
            return EmbeddingCheck::fail(Violation::NotSurjective { host_vertex: v });
        }
    }
    EmbeddingCheck { valid: true, violation: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::families;

    #[test]
    fn identity_and_swap() {
        let t = families::path(4);
        let g = Graph::path(4);
        let id = Embedding::from_images(&[0, 1, 2, 3]);
        assert!(verify_embedding(&g, &t, &id, true).valid);
        let swapped = Embedding::from_images(&[0, 2, 1, 3]);
        let check = verify_embedding(&g, &t, &swapped, true);
        assert!(!check.valid);
        assert!(matches!(check.violation, Some(Violation::EdgeMissing { .. })));
    }

    #[test]
    fn surjectivity() {
        let t = families::path(3);
        let g = Graph::path(4);
        let e = Embedding::from_images(&[0, 1, 2]);
        assert!(verify_embedding(&g, &t, &e, false).valid);
        assert_eq!(verify_embedding(&g, &t, &e, true).violation, Some(Violation::NotSurjective { host_vertex: 3 }));
    }
}
