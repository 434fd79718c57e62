//! Writer-independent signature verification in a dissimilarity space, with
//! wrapper feature selection by binary particle swarm optimisation.
//!
//! The pipeline, end to end:
//!
//! 1. [`data`] / [`synthetic`]: signature feature vectors per writer.
//! 2. [`dichotomy`]: questioned/reference pairs become `|q - r|` vectors
//!    labelled same-writer or not.
//! 3. [`condense`]: Condensed Nearest Neighbors shrinks the training set.
//! 4. [`classifier`]: a linear SVM over the dimensions kept by a
//!    [`FeatureMask`](classifier::FeatureMask).
//! 5. [`metrics`]: user-threshold equal error rate of Max-fused scores.
//! 6. [`optimizer`]: binary PSO over masks, validated on held-out writers.
//! 7. [`experiment`]: replications, strategy comparison and reports.
//!
//! The guide in `book/` walks through each stage; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod classifier;
pub mod condense;
pub mod data;
pub mod dichotomy;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod optimizer;
pub mod rng;
pub mod synthetic;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/dichotomy.md")]
    mod dichotomy {}
    #[doc = include_str!("../../../book/src/condensing.md")]
    mod condensing {}
    #[doc = include_str!("../../../book/src/classifier.md")]
    mod classifier {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/experiment.md")]
    mod experiment {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
