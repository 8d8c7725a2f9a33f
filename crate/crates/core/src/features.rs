//! Feature identification over the file reference graph.
//!
//! Controllers are files nothing references that reference something.
//! Each public entry method of a controller starts one feature, whose files
//! are everything the method touches plus what those files reach.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::config::FeatureConfig;
use crate::model::{CodeModel, MethodEntity, TypeId, Visibility};

/// Simple digraph over file paths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReferenceGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
    #[serde(skip)]
    out: BTreeMap<String, BTreeSet<String>>,
    #[serde(skip)]
    in_degree: BTreeMap<String, usize>,
}

impl ReferenceGraph {
    pub fn from_edges(
        nodes: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Self {
        let mut g = ReferenceGraph {
            nodes: nodes.into_iter().collect(),
            ..Default::default()
        };
        for (a, b) in edges {
            if a == b {
                continue;
            }
            g.nodes.insert(a.clone());
            g.nodes.insert(b.clone());
            if g.edges.insert((a.clone(), b.clone())) {
                *g.in_degree.entry(b.clone()).or_default() += 1;
                g.out.entry(a).or_default().insert(b);
            }
        }
        g
    }

    pub fn successors(&self, node: &str) -> impl Iterator<Item = &String> {
        self.out.get(node).into_iter().flatten()
    }

    pub fn in_degree(&self, node: &str) -> usize {
        self.in_degree.get(node).copied().unwrap_or(0)
    }

    pub fn out_degree(&self, node: &str) -> usize {
        self.out.get(node).map_or(0, BTreeSet::len)
    }

    /// Every node reachable from `starts`, the starts included.
    pub fn reach<'a>(&self, starts: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut queue: VecDeque<String> = VecDeque::new();
        for s in starts {
            if seen.insert(s.to_string()) {
                queue.push_back(s.to_string());
            }
        }
        while let Some(n) = queue.pop_front() {
            for m in self.successors(&n) {
                if seen.insert(m.clone()) {
                    queue.push_back(m.clone());
                }
            }
        }
        seen
    }
}

pub fn build_reference_graph(model: &CodeModel) -> ReferenceGraph {
    ReferenceGraph::from_edges(
        model.files.keys().cloned(),
        model
            .references
            .iter()
            .map(|r| (r.from_file.clone(), r.to_file.clone())),
    )
}

/// Files with in-degree 0 and out-degree at least 1, sorted.
pub fn find_controllers(graph: &ReferenceGraph) -> Vec<String> {
    graph
        .nodes
        .iter()
        .filter(|n| graph.in_degree(n) == 0 && graph.out_degree(n) >= 1)
        .cloned()
        .collect()
}

/// Entry methods of a controller file, sorted by signature.
pub fn find_main_methods<'m>(
    model: &'m CodeModel,
    controller: &str,
    cfg: &FeatureConfig,
) -> Vec<&'m MethodEntity> {
    let file_types: BTreeSet<TypeId> = model.types_in_file(controller).map(|t| t.id).collect();
    let methods: Vec<&MethodEntity> = model
        .types_in_file(controller)
        .flat_map(|t| model.methods_of(t))
        .collect();
    let called_from_file = |m: &MethodEntity| {
        methods.iter().filter(|o| o.id != m.id).any(|o| {
            o.invoked.iter().any(|i| {
                i.name == m.name
                    && i.arg_count == m.params.len()
                    && i.target.is_some_and(|t| file_types.contains(&t))
            })
        })
    };
    let mut mains: Vec<&MethodEntity> = methods
        .iter()
        .copied()
        .filter(|m| !m.is_constructor && !m.is_accessor() && m.body.is_some())
        .filter(|m| !cfg.main_requires_public || m.visibility == Visibility::Public)
        .filter(|m| !cfg.main_requires_calls || !m.invoked.is_empty())
        .filter(|m| !cfg.main_excludes_called || !called_from_file(m))
        .collect();
    mains.sort_by(|a, b| a.signature.cmp(&b.signature).then(a.owner.cmp(&b.owner)));
    mains
}

/// The controller, the files of every project type the method references,
/// and everything reachable from those files.
pub fn feature_closure(
    model: &CodeModel,
    graph: &ReferenceGraph,
    controller: &str,
    main_method: &MethodEntity,
) -> Vec<String> {
    let touched: BTreeSet<&str> = model
        .files_of_types(&main_method.referenced_types)
        .into_iter()
        .filter(|f| *f != controller)
        .collect();
    let mut files = graph.reach(touched);
    files.insert(controller.to_string());
    files.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Feature {
    pub id: usize,
    pub name: String,
    pub controller: String,
    /// Method qualified name of the entry method.
    pub main_method: String,
    pub files: Vec<String>,
}

/// Split a camel-case identifier into words, keeping acronyms whole.
pub fn split_camel(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '$' {
            if !out.ends_with(' ') && !out.is_empty() {
                out.push(' ');
            }
            continue;
        }
        if i > 0 && c.is_uppercase() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if (prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower))
                && !out.ends_with(' ')
                && !out.is_empty()
            {
                out.push(' ');
            }
        }
        out.push(c);
    }
    out.trim_end().to_string()
}

fn file_stem(path: &str) -> &str {
    let name = path.rsplit('/').next().unwrap_or(path);
    name.strip_suffix(".java").unwrap_or(name)
}

/// Label for a feature: controller name without a known suffix, split into
/// words, with ` – method` appended when the controller has several entries.
pub fn feature_name(controller: &str, method: &str, main_count: usize, suffixes: &[String]) -> String {
    let stem = file_stem(controller);
    let base = suffixes
        .iter()
        .find_map(|s| stem.strip_suffix(s.as_str()).filter(|b| !b.is_empty()))
        .unwrap_or(stem);
    let words = split_camel(base);
    if main_count > 1 {
        format!("{words} \u{2013} {method}")
    } else {
        words
    }
}

/// One feature per (controller, entry method), sorted by name.
pub fn identify_features(model: &CodeModel, cfg: &FeatureConfig) -> Vec<Feature> {
    let graph = build_reference_graph(model);
    let controllers = find_controllers(&graph);
    if controllers.is_empty() && !graph.edges.is_empty() {
        tracing::warn!("reference graph has no controller files; no features identified");
    }
    let mut found: Vec<Feature> = Vec::new();
    let mut seen: BTreeSet<(String, Vec<String>, String)> = BTreeSet::new();
    for c in &controllers {
        let mains = find_main_methods(model, c, cfg);
        for m in &mains {
            let Ok(qn) = model.method_qualified_name(m) else { continue };
            let files = feature_closure(model, &graph, c, m);
            let name = feature_name(c, &m.name, mains.len(), &cfg.controller_suffixes);
            if seen.insert((c.clone(), files.clone(), name.clone())) {
                found.push(Feature {
                    id: 0,
                    name,
                    controller: c.clone(),
                    main_method: qn,
                    files,
                });
            }
        }
    }
    found.sort_by(|a, b| (&a.name, &a.main_method).cmp(&(&b.name, &b.main_method)));
    for (i, f) in found.iter_mut().enumerate() {
        f.id = i;
    }
    found
}
