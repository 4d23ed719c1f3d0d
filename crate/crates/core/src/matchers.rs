//! Candidate-generating matchers: a recall-oriented lexical base matcher and
//! a forwarding matcher that replays a given alignment.

use std::collections::{BTreeMap, BTreeSet};

use crate::alignment::{Alignment, Correspondence};
use crate::rdf::{Graph, Object};
use crate::vocab;

/// Extension key marking correspondences found by exact label equality.
pub const EXT_BASE_EXACT: &str = "base/exact";
/// Extension key marking correspondences found only after normalization.
pub const EXT_BASE_NORMALIZED: &str = "base/normalized";

/// Label properties consulted when none are configured.
pub fn default_label_properties() -> Vec<String> {
    vec![vocab::RDFS_LABEL.to_string(), vocab::SKOS_ALT_LABEL.to_string()]
}

/// Normalizes a label: non-ASCII whitespace becomes a space, all other
/// non-ASCII code points are dropped, the rest is ASCII-lowercased, and
/// whitespace is trimmed and collapsed to single spaces.
pub fn normalize_label(s: &str) -> String {
    let mut filtered = String::with_capacity(s.len());
    for c in s.chars() {
        if c.is_ascii() {
            filtered.push(c.to_ascii_lowercase());
        } else if c.is_whitespace() {
            filtered.push(' ');
        }
    }
    let mut out = String::with_capacity(filtered.len());
    for token in filtered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

fn label_values<'g>(graph: &'g Graph, subject: &str, properties: &[String]) -> Vec<&'g str> {
    let mut out = Vec::new();
    for p in properties {
        for lit in graph.literal_values(subject, Some(p)) {
            out.push(lit.lexical());
        }
    }
    out
}

/// value → subjects carrying it, for exact and for normalized comparison.
fn label_indexes<'g>(
    graph: &'g Graph,
    properties: &[String],
) -> (BTreeMap<&'g str, BTreeSet<&'g str>>, BTreeMap<String, BTreeSet<&'g str>>) {
    let mut exact: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut normalized: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for subject in graph.subjects() {
        if graph.is_skolem(subject) {
            continue;
        }
        for value in label_values(graph, subject, properties) {
            if !value.is_empty() {
                exact.entry(value).or_default().insert(subject);
            }
            let norm = normalize_label(value);
            if !norm.is_empty() {
                normalized.entry(norm).or_default().insert(subject);
            }
        }
    }
    (exact, normalized)
}

/// Emits `<s, t, =, 1.0>` for every pair of subjects sharing a label value
/// under any of the given properties, compared once exactly and once after
/// normalization. Exact hits carry `base/exact`, normalization-only hits
/// `base/normalized`.
pub fn base_match(source: &Graph, target: &Graph, label_properties: &[String]) -> Alignment {
    let props: Vec<String> = if label_properties.is_empty() {
        default_label_properties()
    } else {
        label_properties.to_vec()
    };
    let (src_exact, src_norm) = label_indexes(source, &props);
    let (tgt_exact, tgt_norm) = label_indexes(target, &props);

    let mut exact_pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for (value, ss) in &src_exact {
        if let Some(ts) = tgt_exact.get(value) {
            for &s in ss {
                for &t in ts {
                    exact_pairs.insert((s, t));
                }
            }
        }
    }

    let mut alignment = Alignment::new();
    for &(s, t) in &exact_pairs {
        alignment.add(Correspondence::new(s, t, 1.0).with_extension(EXT_BASE_EXACT, 1.0));
    }
    for (value, ss) in &src_norm {
        if let Some(ts) = tgt_norm.get(value) {
            for &s in ss {
                for &t in ts {
                    if !exact_pairs.contains(&(s, t)) {
                        alignment.add(
                            Correspondence::new(s, t, 1.0).with_extension(EXT_BASE_NORMALIZED, 1.0),
                        );
                    }
                }
            }
        }
    }
    alignment
}

/// Replays the given alignment unchanged.
pub fn forward_match(given: &Alignment) -> Alignment {
    given.clone()
}
