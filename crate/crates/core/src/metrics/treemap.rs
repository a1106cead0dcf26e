use super::{compute_density, zero_counts, ArtifactMetrics};
use crate::smells::SmellKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Folder hierarchy of artifacts. Size is the word count, colour the density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreemapNode {
    pub name: String,
    /// Artifact id for leaves, `/`-joined folder path for folders.
    pub path: String,
    pub children: Vec<TreemapNode>,
    pub word_count: usize,
    pub findings: usize,
    pub per_smell: BTreeMap<SmellKind, usize>,
    pub density: f64,
}

impl TreemapNode {
    fn folder(name: &str, path: String) -> Self {
        TreemapNode {
            name: name.to_string(),
            path,
            children: Vec::new(),
            word_count: 0,
            findings: 0,
            per_smell: zero_counts(),
            density: 0.0,
        }
    }

    fn leaf(m: &ArtifactMetrics) -> Self {
        let name = m.artifact_id.rsplit('/').next().unwrap_or(&m.artifact_id);
        TreemapNode {
            name: name.to_string(),
            path: m.artifact_id.clone(),
            children: Vec::new(),
            word_count: m.word_count,
            findings: m.findings_total,
            per_smell: m.per_smell.clone(),
            density: m.density_total,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn recompute(&mut self) {
        if self.is_leaf() {
            return;
        }
        self.children.iter_mut().for_each(TreemapNode::recompute);
        self.children
            .sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.path.cmp(&b.path)));
        self.word_count = self.children.iter().map(|c| c.word_count).sum();
        self.per_smell = zero_counts();
        for c in &self.children {
            for (s, n) in &c.per_smell {
                *self.per_smell.entry(*s).or_default() += n;
            }
        }
        self.findings = self.children.iter().map(|c| c.findings).sum();
        self.density = compute_density(self.findings, self.word_count);
    }

    /// The same tree coloured by one smell only; sizes are unchanged.
    pub fn for_smell(&self, smell: SmellKind) -> TreemapNode {
        let findings = self.per_smell.get(&smell).copied().unwrap_or(0);
        TreemapNode {
            name: self.name.clone(),
            path: self.path.clone(),
            children: self.children.iter().map(|c| c.for_smell(smell)).collect(),
            word_count: self.word_count,
            findings,
            per_smell: self
                .per_smell
                .iter()
                .filter(|(s, _)| **s == smell)
                .map(|(s, n)| (*s, *n))
                .collect(),
            density: compute_density(findings, self.word_count),
        }
    }

    pub fn leaves(&self) -> Vec<&TreemapNode> {
        if self.is_leaf() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }
}

#[derive(Default)]
struct Folder<'a> {
    folders: BTreeMap<String, Folder<'a>>,
    artifacts: Vec<&'a ArtifactMetrics>,
}

impl Folder<'_> {
    fn into_node(self, name: &str, path: String) -> TreemapNode {
        let mut node = TreemapNode::folder(name, path.clone());
        for (child, folder) in self.folders {
            let child_path = if path.is_empty() {
                child.clone()
            } else {
                format!("{path}/{child}")
            };
            node.children.push(folder.into_node(&child, child_path));
        }
        node.children
            .extend(self.artifacts.into_iter().map(TreemapNode::leaf));
        node.recompute();
        node
    }
}

/// Groups artifacts by folder. `folder_path` lists the folders containing
/// each artifact, outermost first. A single artifact is returned as the root
/// itself.
pub fn build_treemap(artifacts: &[(Vec<String>, &ArtifactMetrics)]) -> TreemapNode {
    if let [(_, only)] = artifacts {
        return TreemapNode::leaf(only);
    }
    let mut root = Folder::default();
    for (folders, metrics) in artifacts {
        let node = folders.iter().fold(&mut root, |node, f| {
            node.folders.entry(f.clone()).or_default()
        });
        node.artifacts.push(metrics);
    }
    root.into_node("", String::new())
}
