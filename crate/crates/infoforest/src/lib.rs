//! Std companion to `infoforest-core`: the CSV dataset format, the JSON
//! model format, run manifests, parallel forest training and the
//! stripes-depth benchmark behind the `infoforest` CLI.

pub mod bench;
pub mod dataset_csv;
pub mod manifest;
pub mod model_file;
pub mod parallel;

pub use infoforest_core as core;
