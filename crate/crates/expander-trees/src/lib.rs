pub mod embedding;
pub mod error;
pub mod extendable;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod path_cover;
pub mod pipeline;
pub mod spectral;
pub mod tree;
pub mod tree_array;
mod subsets;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
pub use subsets::{binomial, DEFAULT_BUDGET};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expanders.md")]
    mod expanders {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/matchings.md")]
    mod matchings {}
    #[doc = include_str!("../../../book/src/extendable.md")]
    mod extendable {}
    #[doc = include_str!("../../../book/src/tree_arrays.md")]
    mod tree_arrays {}
    #[doc = include_str!("../../../book/src/path_covers.md")]
    mod path_covers {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
