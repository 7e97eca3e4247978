//! JSON point-set files. Coordinates are rational strings (`"-3/4"`, `"5"`),
//! so a write followed by a read reproduces every point exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::BlockTree;
use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};

pub const FORMAT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub dim: usize,
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    #[serde(default)]
    pub meta: Meta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<BlockTree>,
}

impl PointSetFile {
    pub fn from_set(ps: &PointSet, meta: Meta) -> Self {
        PointSetFile {
            dim: ps.dim(),
            points: ps.points().to_vec(),
            labels: ps.labels.clone(),
            blocks: ps.blocks.clone(),
            meta: Meta { version: FORMAT_VERSION.to_string(), ..meta },
            tree: None,
        }
    }

    pub fn with_tree(mut self, tree: BlockTree) -> Self {
        self.tree = Some(tree);
        self
    }

    /// Validates dimensions, distinctness and annotations.
    pub fn to_set(&self) -> Result<PointSet> {
        let mut ps = PointSet::new(self.dim, self.points.clone())?;
        if let Some(b) = &self.blocks {
            ps = ps.with_blocks(b.clone())?;
        }
        if let Some(l) = &self.labels {
            ps = ps.with_labels(l.clone())?;
        }
        Ok(ps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PointSetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.to_set()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
    }
}
