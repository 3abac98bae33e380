//! Information Forests: randomized binary decision trees whose internal
//! nodes either regroup the data by maximizing the class-conditional
//! divergence of the two children (KL-nodes) or classify it by minimizing
//! the label entropy of the children (H-nodes).
//!
//! With a divergence threshold of zero every internal node is an H-node and
//! the ensemble is an ordinary Random Forest.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel training live in the `infoforest` crate.

#![no_std]

extern crate alloc;

pub mod datagen;
pub mod divergence;
pub mod error;
pub mod forest;
pub mod model;
pub mod stumps;
pub mod tree;

pub use divergence::{DivergenceConfig, Histogram, NodeDivergence};
pub use error::{Error, Result};
pub use forest::{Forest, Prediction, Sampling, FORMAT_VERSION};
pub use model::{Dataset, LabelDistribution, Projection, SampleView, Stump};
pub use stumps::{FeaturePool, PoolConfig, PoolRefresh};
pub use tree::{Node, NodeKind, TrainConfig, TreeStats};
