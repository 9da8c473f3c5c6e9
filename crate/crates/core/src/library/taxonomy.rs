//! Hierarchical metadata taxonomy (up to three levels).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LibraryError;

/// Root reserved for non-compliant and warning clauses. Never part of the taxonomy.
pub const COMPLIANCE_ROOT: &str = "COMPLIANCE";

pub const MAX_LEVEL: usize = 3;

/// Dotted path into the taxonomy, e.g. `CONTROLLER.CONTACT.E-MAIL`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetadataPath(Vec<String>);

impl MetadataPath {
    pub fn new<I, S>(segments: I) -> Result<Self, LibraryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(LibraryError::InvalidPath {
                path: String::new(),
                reason: "path is empty".into(),
            });
        }
        for seg in &segments {
            if !is_valid_segment(seg) {
                return Err(LibraryError::InvalidPath {
                    path: segments.join("."),
                    reason: format!("segment {seg:?} must be non-empty uppercase text"),
                });
            }
        }
        Ok(Self(segments))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn parent(&self) -> Option<MetadataPath> {
        (self.0.len() > 1).then(|| MetadataPath(self.0[..self.0.len() - 1].to_vec()))
    }

    /// All proper ancestors, nearest first.
    pub fn ancestors(&self) -> impl Iterator<Item = MetadataPath> + '_ {
        (1..self.0.len()).rev().map(|n| MetadataPath(self.0[..n].to_vec()))
    }

    pub fn is_ancestor_of(&self, other: &MetadataPath) -> bool {
        self.0.len() < other.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_compliance(&self) -> bool {
        self.0.len() == 1 && self.0[0] == COMPLIANCE_ROOT
    }

    pub fn compliance() -> Self {
        MetadataPath(vec![COMPLIANCE_ROOT.to_string()])
    }
}

fn is_valid_segment(seg: &str) -> bool {
    !seg.is_empty()
        && seg.trim() == seg
        && seg.chars().any(|c| c.is_ascii_uppercase())
        && seg
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || matches!(c, ' ' | '\'' | '-'))
}

impl fmt::Display for MetadataPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

impl FromStr for MetadataPath {
    type Err = LibraryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetadataPath::new(s.split('.'))
    }
}

impl Serialize for MetadataPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetadataPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One node of the taxonomy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataType {
    pub path: MetadataPath,
    pub level: usize,
    pub children: Vec<MetadataPath>,
}

/// A forest of metadata types. Ancestors of every listed path are materialized.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    nodes: BTreeMap<MetadataPath, MetadataType>,
}

impl Taxonomy {
    pub fn from_paths<I>(paths: I) -> Result<Self, LibraryError>
    where
        I: IntoIterator<Item = MetadataPath>,
    {
        let mut nodes: BTreeMap<MetadataPath, MetadataType> = BTreeMap::new();
        for path in paths {
            if path.level() > MAX_LEVEL {
                return Err(LibraryError::InvalidPath {
                    path: path.to_string(),
                    reason: format!("taxonomy depth is limited to {MAX_LEVEL} levels"),
                });
            }
            if path.segments()[0] == COMPLIANCE_ROOT {
                return Err(LibraryError::InvalidPath {
                    path: path.to_string(),
                    reason: format!("{COMPLIANCE_ROOT} is a reserved root"),
                });
            }
            let mut lineage: Vec<MetadataPath> = path.ancestors().collect();
            lineage.reverse();
            lineage.push(path);
            for p in lineage {
                nodes.entry(p.clone()).or_insert_with(|| MetadataType {
                    level: p.level(),
                    path: p,
                    children: Vec::new(),
                });
            }
        }
        let links: Vec<(MetadataPath, MetadataPath)> = nodes
            .keys()
            .filter_map(|p| p.parent().map(|parent| (parent, p.clone())))
            .collect();
        for (parent, child) in links {
            if let Some(node) = nodes.get_mut(&parent) {
                node.children.push(child);
            }
        }
        Ok(Self { nodes })
    }

    pub fn contains(&self, path: &MetadataPath) -> bool {
        self.nodes.contains_key(path)
    }

    pub fn get(&self, path: &MetadataPath) -> Option<&MetadataType> {
        self.nodes.get(path)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetadataType> {
        self.nodes.values()
    }

    pub fn roots(&self) -> impl Iterator<Item = &MetadataType> {
        self.nodes.values().filter(|n| n.level == 1)
    }

    /// Leaf nodes. These form the clause category set.
    pub fn leaves(&self) -> impl Iterator<Item = &MetadataPath> {
        self.nodes.values().filter(|n| n.children.is_empty()).map(|n| &n.path)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Descendants of `path` (not including itself).
    pub fn descendants<'a>(&'a self, path: &'a MetadataPath) -> impl Iterator<Item = &'a MetadataPath> {
        self.nodes.keys().filter(move |p| path.is_ancestor_of(p))
    }

    /// Leaf paths as segment arrays, the on-disk form.
    pub(crate) fn leaf_segments(&self) -> Vec<Vec<String>> {
        self.leaves().map(|p| p.segments().to_vec()).collect()
    }
}
