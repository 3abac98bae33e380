//! JSON model format.
//!
//! ```text
//! {"format_version":1,"dimension":2,"config":{..},"seed":7,"n_trees":1,
//!  "trees":[{"kind":"h","stump":{"projection":{"type":"axis","dim":0},"threshold":0.5},
//!            "children":[{"kind":"leaf",..},{"kind":"leaf",..}],"diagnostics":{..}}]}
//! ```
//!
//! Reals are written in their shortest round-trip form and parsed back
//! exactly.

use std::path::Path;

use infoforest_core::tree::Node;
use infoforest_core::{Forest, FORMAT_VERSION};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u32 },
    #[error("inconsistent model: {0}")]
    Inconsistent(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub fn serialize(forest: &Forest) -> Vec<u8> {
    let mut out = serde_json::to_vec(forest).expect("forest serializes");
    out.push(b'\n');
    out
}

pub fn to_json(forest: &Forest) -> String {
    String::from_utf8(serialize(forest)).expect("JSON is UTF-8")
}

pub fn deserialize(bytes: &[u8]) -> Result<Forest, ModelError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(ModelError::Malformed("empty document".into()));
    }
    // Trees nest two JSON levels per depth, beyond serde_json's default limit.
    let mut de = serde_json::Deserializer::from_slice(bytes);
    de.disable_recursion_limit();
    let value = serde_json::Value::deserialize(&mut de)
        .map_err(|e| ModelError::Malformed(e.to_string()))?;
    de.end().map_err(|e| ModelError::Malformed(e.to_string()))?;

    let version = value
        .get("format_version")
        .ok_or_else(|| ModelError::Malformed("missing format_version".into()))?
        .as_u64()
        .ok_or_else(|| ModelError::Malformed("format_version is not an integer".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(ModelError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }

    let forest = Forest::deserialize(value).map_err(|e| ModelError::Malformed(e.to_string()))?;
    forest
        .validate()
        .map_err(|e| ModelError::Inconsistent(e.to_string()))?;
    for (t, tree) in forest.trees.iter().enumerate() {
        let mut problem = None;
        tree.visit(|node, _| {
            if let Node::Leaf(l) = node {
                if l.label > 1 || !(0.0..=1.0).contains(&l.posterior) {
                    problem.get_or_insert(format!("tree {t}: leaf label/posterior out of range"));
                }
            }
        });
        if let Some(p) = problem {
            return Err(ModelError::Inconsistent(p));
        }
    }
    Ok(forest)
}

pub fn from_json(text: &str) -> Result<Forest, ModelError> {
    deserialize(text.as_bytes())
}

pub fn write_model(forest: &Forest, path: &Path) -> Result<(), ModelError> {
    std::fs::write(path, serialize(forest)).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_model(path: &Path) -> Result<Forest, ModelError> {
    let bytes = std::fs::read(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    deserialize(&bytes)
}
