//! Feature-generating filters over candidate alignments.
//!
//! Each filter reads both graphs plus the alignment itself and writes one
//! numeric feature into every correspondence's extension map; membership is
//! never changed. The confidence threshold filter and the one-to-one
//! extractor are the only membership-reducing operations here.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use crate::alignment::{Alignment, Correspondence};
use crate::matchers::normalize_label;
use crate::rdf::{Direction, Graph};
use crate::vocab;

/// How a set overlap is turned into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapMode {
    /// Plain intersection size.
    Absolute,
    /// Intersection over the smaller set.
    Min,
    /// Intersection over the larger set.
    Max,
    /// Intersection over union.
    Jaccard,
    /// Twice the intersection over the size sum.
    Dice,
}

impl OverlapMode {
    pub const ALL: [OverlapMode; 5] =
        [OverlapMode::Absolute, OverlapMode::Min, OverlapMode::Max, OverlapMode::Jaccard, OverlapMode::Dice];

    pub fn key_name(self) -> &'static str {
        match self {
            OverlapMode::Absolute => "absolute",
            OverlapMode::Min => "min",
            OverlapMode::Max => "max",
            OverlapMode::Jaccard => "jaccard",
            OverlapMode::Dice => "dice",
        }
    }
}

impl std::str::FromStr for OverlapMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(OverlapMode::Absolute),
            "min" => Ok(OverlapMode::Min),
            "max" => Ok(OverlapMode::Max),
            "jaccard" => Ok(OverlapMode::Jaccard),
            "dice" => Ok(OverlapMode::Dice),
            other => Err(format!("unknown overlap mode '{other}'")),
        }
    }
}

/// How literal values are compared when the neighbours filter includes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LiteralComparison {
    #[default]
    None,
    Exact,
    Normalized,
}

/// Tokenization for the bag-of-words filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tokenizer {
    #[default]
    Whitespace,
    WhitespaceLowercase,
}

/// Shared configuration for the feature filters.
#[derive(Debug, Clone)]
pub struct FilterConfig {
    pub overlap_mode: OverlapMode,
    pub literal_comparison: LiteralComparison,
    pub excluded_property_iris: BTreeSet<String>,
    pub tokenizer: Tokenizer,
    /// Literal property whose values feed the bag-of-words filter.
    pub bow_property: String,
    /// Connects an instance to its hierarchy (rdf:type for type hierarchies).
    pub instance_to_hierarchy_property: String,
    /// Connects hierarchy nodes upward (rdfs:subClassOf for type hierarchies).
    pub hierarchy_property: String,
    /// Geometric per-level discount, in (0, 1].
    pub level_discount: f64,
    pub neighbour_direction: Direction,
    pub max_hierarchy_depth: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            overlap_mode: OverlapMode::Jaccard,
            literal_comparison: LiteralComparison::None,
            excluded_property_iris: [
                vocab::RDFS_LABEL,
                vocab::RDFS_COMMENT,
                vocab::SKOS_ALT_LABEL,
                vocab::SKOS_PREF_LABEL,
            ]
            .into_iter()
            .map(str::to_string)
            .collect(),
            tokenizer: Tokenizer::Whitespace,
            bow_property: vocab::RDFS_LABEL.to_string(),
            instance_to_hierarchy_property: vocab::RDF_TYPE.to_string(),
            hierarchy_property: vocab::RDFS_SUBCLASS_OF.to_string(),
            level_discount: 0.5,
            neighbour_direction: Direction::Both,
            max_hierarchy_depth: 10,
        }
    }
}

/// Overlap score from raw counts. Relative modes return 0 whenever their
/// denominator is 0.
pub fn overlap_score_counts(intersection: f64, size_a: f64, size_b: f64, mode: OverlapMode) -> f64 {
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    match mode {
        OverlapMode::Absolute => intersection,
        OverlapMode::Min => ratio(intersection, size_a.min(size_b)),
        OverlapMode::Max => ratio(intersection, size_a.max(size_b)),
        OverlapMode::Jaccard => ratio(intersection, size_a + size_b - intersection),
        OverlapMode::Dice => ratio(2.0 * intersection, size_a + size_b),
    }
}

/// Overlap score of two finite sets.
pub fn overlap_score<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>, mode: OverlapMode) -> f64 {
    let intersection = a.intersection(b).count() as f64;
    overlap_score_counts(intersection, a.len() as f64, b.len() as f64, mode)
}

/// Image of `items` under the alignment's source→target relation, optionally
/// extended with the identity on equal IRIs.
fn map_through<'a>(
    items: &BTreeSet<&'a str>,
    alignment: &'a Alignment,
    include_identity: bool,
) -> BTreeSet<&'a str> {
    let mut out = BTreeSet::new();
    for &item in items {
        out.extend(alignment.targets_of(item));
        if include_identity {
            out.insert(item);
        }
    }
    out
}

fn annotate(
    alignment: &Alignment,
    mut feature: impl FnMut(&Correspondence) -> Vec<(String, f64)>,
) -> Alignment {
    let mut out = Alignment::new();
    for c in alignment.iter() {
        let mut annotated = c.clone();
        for (key, value) in feature(c) {
            annotated.extensions.insert(key, value);
        }
        out.add(annotated);
    }
    out
}

fn literal_overlap_count(src: &Graph, tgt: &Graph, s: &str, t: &str, cmp: LiteralComparison) -> usize {
    let project = |g: &Graph, node: &str| -> BTreeSet<String> {
        g.literal_values(node, None)
            .into_iter()
            .map(|l| match cmp {
                LiteralComparison::Normalized => normalize_label(l.lexical()),
                _ => l.lexical().to_string(),
            })
            .collect()
    };
    project(src, s).intersection(&project(tgt, t)).count()
}

/// Scores each correspondence by how many already matched neighbours the two
/// instances share; writes `filter/neighbours/<mode>`. The matched-entity
/// lookup is the input alignment itself.
pub fn similar_neighbours_filter(
    alignment: &Alignment,
    src: &Graph,
    tgt: &Graph,
    cfg: &FilterConfig,
) -> Alignment {
    annotate(alignment, |c| {
        let ns = src.neighbours(&c.source, cfg.neighbour_direction);
        let nt = tgt.neighbours(&c.target, cfg.neighbour_direction);
        let mapped = map_through(&ns, alignment, false);
        let mut intersection = mapped.intersection(&nt).count() as f64;
        let mut size_s = ns.len() as f64;
        let mut size_t = nt.len() as f64;
        if cfg.literal_comparison != LiteralComparison::None {
            let shared =
                literal_overlap_count(src, tgt, &c.source, &c.target, cfg.literal_comparison) as f64;
            intersection += shared;
            size_s += shared;
            size_t += shared;
        }
        let score = overlap_score_counts(intersection, size_s, size_t, cfg.overlap_mode);
        vec![(format!("filter/neighbours/{}", cfg.overlap_mode.key_name()), score)]
    })
}

/// Scores each correspondence by the overlap of the properties used on both
/// sides (excluded annotation properties removed, property correspondences
/// plus identical IRIs count as matched); writes `filter/properties/<mode>`.
pub fn common_properties_filter(
    alignment: &Alignment,
    src: &Graph,
    tgt: &Graph,
    cfg: &FilterConfig,
) -> Alignment {
    annotate(alignment, |c| {
        let keep = |props: BTreeSet<&str>| -> BTreeSet<&str> {
            props.into_iter().filter(|p| !cfg.excluded_property_iris.contains(*p)).collect()
        };
        let ps = keep(src.properties(&c.source));
        let pt = keep(tgt.properties(&c.target));
        let mapped = map_through(&ps, alignment, true);
        let intersection = mapped.intersection(&pt).count() as f64;
        let score =
            overlap_score_counts(intersection, ps.len() as f64, pt.len() as f64, cfg.overlap_mode);
        vec![(format!("filter/properties/{}", cfg.overlap_mode.key_name()), score)]
    })
}

/// Ancestors by level: level 1 via the instance-to-hierarchy property, each
/// further level via the hierarchy property. Cycles terminate through the
/// visited set; each node is recorded at the first level it appears on.
fn hierarchy_levels<'g>(
    graph: &'g Graph,
    instance: &str,
    cfg: &FilterConfig,
    max_depth: usize,
) -> HashMap<&'g str, usize> {
    let mut level_of: HashMap<&str, usize> = HashMap::new();
    let mut frontier: BTreeSet<&str> =
        graph.resource_objects_of(instance, &cfg.instance_to_hierarchy_property);
    let mut level = 1;
    while !frontier.is_empty() && level <= max_depth {
        let mut next: BTreeSet<&str> = BTreeSet::new();
        for node in frontier {
            if level_of.contains_key(node) {
                continue;
            }
            level_of.insert(node, level);
            next.extend(graph.resource_objects_of(node, &cfg.hierarchy_property));
        }
        frontier = next.into_iter().filter(|n| !level_of.contains_key(n)).collect();
        level += 1;
    }
    level_of
}

fn hierarchy_features(
    alignment: &Alignment,
    src: &Graph,
    tgt: &Graph,
    cfg: &FilterConfig,
    max_depth: usize,
    key_prefix: &str,
    with_discounted: bool,
) -> Alignment {
    assert!(
        cfg.level_discount > 0.0 && cfg.level_discount <= 1.0,
        "level discount must lie in (0, 1]"
    );
    annotate(alignment, |c| {
        let src_levels = hierarchy_levels(src, &c.source, cfg, max_depth);
        let tgt_levels = hierarchy_levels(tgt, &c.target, cfg, max_depth);

        // For every matched target-side ancestor keep the lowest max(k, j).
        let mut best_exponent: BTreeMap<&str, usize> = BTreeMap::new();
        for (&a, &k) in &src_levels {
            let mut images: BTreeSet<&str> = alignment.targets_of(a).collect();
            images.insert(a);
            for image in images {
                if let Some((&b, &j)) = tgt_levels.get_key_value(image) {
                    let exponent = k.max(j) - 1;
                    best_exponent
                        .entry(b)
                        .and_modify(|e| *e = (*e).min(exponent))
                        .or_insert(exponent);
                }
            }
        }

        let intersection = best_exponent.len() as f64;
        let score = overlap_score_counts(
            intersection,
            src_levels.len() as f64,
            tgt_levels.len() as f64,
            cfg.overlap_mode,
        );
        let mut features =
            vec![(format!("{key_prefix}/{}", cfg.overlap_mode.key_name()), score)];
        if with_discounted {
            let discounted: f64 = best_exponent
                .values()
                .map(|&e| cfg.level_discount.powi(e as i32))
                .sum();
            features.push((format!("{key_prefix}/discounted"), discounted));
        }
        features
    })
}

/// Scores matches anywhere in the hierarchies above the two instances;
/// writes `filter/hierarchy/<mode>` and a level-discounted sum under
/// `filter/hierarchy/discounted` (a match at levels k and j contributes
/// `discount^(max(k,j)-1)`).
pub fn similar_hierarchy_filter(
    alignment: &Alignment,
    src: &Graph,
    tgt: &Graph,
    cfg: &FilterConfig,
) -> Alignment {
    hierarchy_features(alignment, src, tgt, cfg, cfg.max_hierarchy_depth, "filter/hierarchy", true)
}

/// The hierarchy filter restricted to direct parents; writes
/// `filter/type/<mode>`.
pub fn similar_type_filter(
    alignment: &Alignment,
    src: &Graph,
    tgt: &Graph,
    cfg: &FilterConfig,
) -> Alignment {
    hierarchy_features(alignment, src, tgt, cfg, 1, "filter/type", false)
}

fn token_set(graph: &Graph, node: &str, cfg: &FilterConfig) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for lit in graph.literal_values(node, Some(&cfg.bow_property)) {
        for token in lit.lexical().split_whitespace() {
            match cfg.tokenizer {
                Tokenizer::Whitespace => out.insert(token.to_string()),
                Tokenizer::WhitespaceLowercase => out.insert(token.to_lowercase()),
            };
        }
    }
    out
}

/// Scores the token overlap of the literals under the configured property;
/// writes `filter/bow/<mode>`.
pub fn bag_of_words_filter(
    alignment: &Alignment,
    src: &Graph,
    tgt: &Graph,
    cfg: &FilterConfig,
) -> Alignment {
    annotate(alignment, |c| {
        let a = token_set(src, &c.source, cfg);
        let b = token_set(tgt, &c.target, cfg);
        let score = overlap_score(&a, &b, cfg.overlap_mode);
        vec![(format!("filter/bow/{}", cfg.overlap_mode.key_name()), score)]
    })
}

/// Keeps exactly the correspondences with confidence ≥ `threshold`.
pub fn threshold_filter(alignment: &Alignment, threshold: f64) -> Alignment {
    alignment.iter().filter(|c| c.confidence >= threshold).cloned().collect()
}

/// Greedy confidence-descending one-to-one extraction. Ties break on
/// lexicographic (source, target) order, so the result is deterministic;
/// neither a source nor a target IRI is used twice.
pub fn naive_descending_extract(alignment: &Alignment) -> Alignment {
    let mut ordered: Vec<&Correspondence> = alignment.iter().collect();
    ordered.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.target.cmp(&b.target))
    });
    let mut used_sources: BTreeSet<&str> = BTreeSet::new();
    let mut used_targets: BTreeSet<&str> = BTreeSet::new();
    let mut out = Alignment::new();
    for c in ordered {
        if used_sources.contains(c.source.as_str()) || used_targets.contains(c.target.as_str()) {
            continue;
        }
        used_sources.insert(&c.source);
        used_targets.insert(&c.target);
        out.add(c.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::Relation;

    fn set(items: &[u32]) -> BTreeSet<u32> {
        items.iter().copied().collect()
    }

    #[test]
    fn overlap_identity_case() {
        let a = set(&[1, 2, 3]);
        for mode in [OverlapMode::Min, OverlapMode::Max, OverlapMode::Jaccard, OverlapMode::Dice] {
            assert_eq!(overlap_score(&a, &a, mode), 1.0);
        }
        assert_eq!(overlap_score(&a, &a, OverlapMode::Absolute), 3.0);
    }

    #[test]
    fn overlap_definition_arithmetic() {
        let a = set(&[1, 2]);
        let b = set(&[2, 3]);
        assert_eq!(overlap_score(&a, &b, OverlapMode::Absolute), 1.0);
        assert!((overlap_score(&a, &b, OverlapMode::Jaccard) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(overlap_score(&a, &b, OverlapMode::Dice), 0.5);
        assert_eq!(overlap_score(&a, &b, OverlapMode::Min), 0.5);
        assert_eq!(overlap_score(&a, &b, OverlapMode::Max), 0.5);
    }

    #[test]
    fn overlap_empty_operand_is_zero() {
        let empty = set(&[]);
        let b = set(&[1]);
        for mode in OverlapMode::ALL {
            assert_eq!(overlap_score(&empty, &b, mode), 0.0);
            assert_eq!(overlap_score(&empty, &empty, mode), 0.0);
        }
    }

    fn pair_alignment(pairs: &[(&str, &str)]) -> Alignment {
        pairs.iter().map(|(s, t)| Correspondence::new(*s, *t, 1.0)).collect()
    }

    fn jaccard_cfg() -> FilterConfig {
        FilterConfig::default()
    }

    // Twin fixture: s and t each have two neighbours; both are matched.
    fn twin_graphs() -> (Graph, Graph) {
        let src = Graph::parse_ntriples(
            "<http://s/i> <http://s/p> <http://s/n1> .\n\
             <http://s/i> <http://s/p> <http://s/n2> .\n",
        )
        .unwrap();
        let tgt = Graph::parse_ntriples(
            "<http://t/i> <http://t/p> <http://t/m1> .\n\
             <http://t/i> <http://t/p> <http://t/m2> .\n",
        )
        .unwrap();
        (src, tgt)
    }

    #[test]
    fn neighbours_isolated_nodes_score_zero() {
        let src = Graph::parse_ntriples("<http://s/x> <http://s/p> \"v\" .\n").unwrap();
        let tgt = Graph::parse_ntriples("<http://t/y> <http://t/p> \"v\" .\n").unwrap();
        let a = pair_alignment(&[("http://s/x", "http://t/y")]);
        let out = similar_neighbours_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/x", "http://t/y", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/neighbours/jaccard"], 0.0);
    }

    #[test]
    fn neighbours_fully_matched_twin_scores_one() {
        let (src, tgt) = twin_graphs();
        let a = pair_alignment(&[
            ("http://s/i", "http://t/i"),
            ("http://s/n1", "http://t/m1"),
            ("http://s/n2", "http://t/m2"),
        ]);
        let out = similar_neighbours_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/neighbours/jaccard"], 1.0);
    }

    #[test]
    fn neighbours_one_unmapped_each_gives_one_third() {
        let (src, tgt) = twin_graphs();
        let a = pair_alignment(&[("http://s/i", "http://t/i"), ("http://s/n1", "http://t/m1")]);
        let out = similar_neighbours_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert!((c.extensions["filter/neighbours/jaccard"] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn neighbours_literal_inclusion_extends_counts() {
        let src = Graph::parse_ntriples(
            "<http://s/i> <http://s/p> <http://s/n1> .\n\
             <http://s/i> <http://s/name> \"Bat\" .\n",
        )
        .unwrap();
        let tgt = Graph::parse_ntriples(
            "<http://t/i> <http://t/p> <http://t/m1> .\n\
             <http://t/i> <http://t/name> \"bat\" .\n",
        )
        .unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i"), ("http://s/n1", "http://t/m1")]);

        let mut cfg = jaccard_cfg();
        cfg.literal_comparison = LiteralComparison::Normalized;
        let out = similar_neighbours_filter(&a, &src, &tgt, &cfg);
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        // neighbours 1/1 matched plus one shared literal: (1+1)/(1+1+1+1-2) = 1.
        assert_eq!(c.extensions["filter/neighbours/jaccard"], 1.0);

        // With exact comparison "Bat" != "bat": (1+0)/(1+1-1) = 1 only from neighbours.
        cfg.literal_comparison = LiteralComparison::Exact;
        let out = similar_neighbours_filter(&a, &src, &tgt, &cfg);
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/neighbours/jaccard"], 1.0);

        cfg.literal_comparison = LiteralComparison::None;
        let out = similar_neighbours_filter(&a, &src, &tgt, &cfg);
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/neighbours/jaccard"], 1.0);
    }

    // 'bat' homonym fixture from the properties filter contract.
    fn bat_graphs() -> (Graph, Graph, Graph) {
        let mammal = Graph::parse_ntriples(
            "<http://a/bat> <http://x/taxon> <http://x/chiroptera> .\n\
             <http://a/bat> <http://x/age> \"3\" .\n\
             <http://a/bat> <http://x/habitat> <http://x/cave> .\n",
        )
        .unwrap();
        let racket = Graph::parse_ntriples(
            "<http://b/bat> <http://y/material> \"wood\" .\n\
             <http://b/bat> <http://y/quality> \"good\" .\n\
             <http://b/bat> <http://y/producer> <http://y/acme> .\n",
        )
        .unwrap();
        let mammal2 = Graph::parse_ntriples(
            "<http://c/bat> <http://x/taxon> <http://x/chiroptera> .\n\
             <http://c/bat> <http://x/habitat> <http://x/cave> .\n",
        )
        .unwrap();
        (mammal, racket, mammal2)
    }

    #[test]
    fn properties_disjoint_senses_score_zero() {
        let (mammal, racket, _) = bat_graphs();
        let a = pair_alignment(&[("http://a/bat", "http://b/bat")]);
        let out = common_properties_filter(&a, &mammal, &racket, &jaccard_cfg());
        let c = out.get("http://a/bat", "http://b/bat", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/properties/jaccard"], 0.0);
    }

    #[test]
    fn properties_same_sense_scores_two_thirds() {
        let (mammal, _, mammal2) = bat_graphs();
        let a = pair_alignment(&[("http://a/bat", "http://c/bat")]);
        let out = common_properties_filter(&a, &mammal, &mammal2, &jaccard_cfg());
        let c = out.get("http://a/bat", "http://c/bat", Relation::Equivalence).unwrap();
        assert!((c.extensions["filter/properties/jaccard"] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn properties_identical_sets_score_one() {
        let (mammal, _, _) = bat_graphs();
        let a = pair_alignment(&[("http://a/bat", "http://a/bat")]);
        let out = common_properties_filter(&a, &mammal, &mammal, &jaccard_cfg());
        let c = out.get("http://a/bat", "http://a/bat", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/properties/jaccard"], 1.0);
    }

    #[test]
    fn properties_only_excluded_props_score_zero() {
        let text = format!("<http://s/i> <{}> \"label\" .\n", vocab::RDFS_LABEL);
        let src = Graph::parse_ntriples(&text).unwrap();
        let text = format!("<http://t/i> <{}> \"label\" .\n", vocab::RDFS_LABEL);
        let tgt = Graph::parse_ntriples(&text).unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i")]);
        let out = common_properties_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/properties/jaccard"], 0.0);
    }

    fn hierarchy_fixture(levels: usize) -> Graph {
        // i --type--> c1 --sub--> c2 --sub--> ... up to `levels`.
        let mut text = String::new();
        if levels >= 1 {
            text.push_str(&format!("<http://g/i> <{}> <http://g/c1> .\n", vocab::RDF_TYPE));
        }
        for k in 1..levels {
            text.push_str(&format!(
                "<http://g/c{k}> <{}> <http://g/c{}> .\n",
                vocab::RDFS_SUBCLASS_OF,
                k + 1
            ));
        }
        Graph::parse_ntriples(&text).unwrap()
    }

    #[test]
    fn hierarchy_no_triples_scores_zero() {
        let src = Graph::parse_ntriples("<http://s/i> <http://s/p> <http://s/x> .\n").unwrap();
        let tgt = Graph::parse_ntriples("<http://t/i> <http://t/p> <http://t/y> .\n").unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i")]);
        let out = similar_hierarchy_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/hierarchy/jaccard"], 0.0);
        assert_eq!(c.extensions["filter/hierarchy/discounted"], 0.0);
    }

    #[test]
    fn hierarchy_direct_match_has_no_discount() {
        let g = hierarchy_fixture(1);
        let a = pair_alignment(&[("http://g/i", "http://g/i")]);
        let out = similar_hierarchy_filter(&a, &g, &g, &jaccard_cfg());
        let c = out.get("http://g/i", "http://g/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/hierarchy/discounted"], 1.0);
        assert_eq!(c.extensions["filter/hierarchy/jaccard"], 1.0);
    }

    #[test]
    fn hierarchy_grandparent_match_discounted_once() {
        // Source: i -type-> s1 -sub-> shared. Target: i -type-> t1 -sub-> shared.
        // Only the grandparent is shared, at level 2 on both sides.
        let src = Graph::parse_ntriples(&format!(
            "<http://s/i> <{t}> <http://s/c1> .\n<http://s/c1> <{s}> <http://shared/c2> .\n",
            t = vocab::RDF_TYPE,
            s = vocab::RDFS_SUBCLASS_OF
        ))
        .unwrap();
        let tgt = Graph::parse_ntriples(&format!(
            "<http://t/i> <{t}> <http://t/c1> .\n<http://t/c1> <{s}> <http://shared/c2> .\n",
            t = vocab::RDF_TYPE,
            s = vocab::RDFS_SUBCLASS_OF
        ))
        .unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i")]);
        let out = similar_hierarchy_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/hierarchy/discounted"], 0.5);
    }

    #[test]
    fn hierarchy_cycle_terminates() {
        let g = Graph::parse_ntriples(&format!(
            "<http://g/i> <{t}> <http://g/a> .\n\
             <http://g/a> <{s}> <http://g/b> .\n\
             <http://g/b> <{s}> <http://g/a> .\n",
            t = vocab::RDF_TYPE,
            s = vocab::RDFS_SUBCLASS_OF
        ))
        .unwrap();
        let a = pair_alignment(&[("http://g/i", "http://g/i")]);
        let out = similar_hierarchy_filter(&a, &g, &g, &jaccard_cfg());
        let c = out.get("http://g/i", "http://g/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/hierarchy/jaccard"], 1.0);
    }

    #[test]
    fn type_filter_no_types_scores_zero() {
        let g = Graph::parse_ntriples("<http://g/i> <http://g/p> <http://g/x> .\n").unwrap();
        let a = pair_alignment(&[("http://g/i", "http://g/i")]);
        let out = similar_type_filter(&a, &g, &g, &jaccard_cfg());
        let c = out.get("http://g/i", "http://g/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/type/jaccard"], 0.0);
    }

    #[test]
    fn type_filter_equal_direct_type_scores_one() {
        let g = hierarchy_fixture(3);
        let a = pair_alignment(&[("http://g/i", "http://g/i")]);
        let out = similar_type_filter(&a, &g, &g, &jaccard_cfg());
        let c = out.get("http://g/i", "http://g/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/type/jaccard"], 1.0);
        // Depth stays at the direct parent: no hierarchy key is written.
        assert!(!c.extensions.contains_key("filter/type/discounted"));
    }

    #[test]
    fn type_filter_partial_overlap_scores_half() {
        let src = Graph::parse_ntriples(&format!(
            "<http://s/i> <{t}> <http://s/A> .\n<http://s/i> <{t}> <http://s/B> .\n",
            t = vocab::RDF_TYPE
        ))
        .unwrap();
        let tgt = Graph::parse_ntriples(&format!(
            "<http://t/i> <{t}> <http://t/A> .\n",
            t = vocab::RDF_TYPE
        ))
        .unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i"), ("http://s/A", "http://t/A")]);
        let out = similar_type_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/type/jaccard"], 0.5);
    }

    #[test]
    fn bow_empty_literals_score_zero() {
        let g = Graph::parse_ntriples("<http://g/i> <http://g/p> <http://g/x> .\n").unwrap();
        let a = pair_alignment(&[("http://g/i", "http://g/i")]);
        let out = bag_of_words_filter(&a, &g, &g, &jaccard_cfg());
        let c = out.get("http://g/i", "http://g/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/bow/jaccard"], 0.0);
    }

    #[test]
    fn bow_token_overlap_arithmetic() {
        let src = Graph::parse_ntriples(&format!(
            "<http://s/i> <{l}> \"star wars saga\" .\n",
            l = vocab::RDFS_LABEL
        ))
        .unwrap();
        let tgt = Graph::parse_ntriples(&format!(
            "<http://t/i> <{l}> \"star wars\" .\n",
            l = vocab::RDFS_LABEL
        ))
        .unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i")]);
        let out = bag_of_words_filter(&a, &src, &tgt, &jaccard_cfg());
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert!((c.extensions["filter/bow/jaccard"] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bow_lowercase_tokenizer_merges_case() {
        let src = Graph::parse_ntriples(&format!(
            "<http://s/i> <{l}> \"Star wars\" .\n",
            l = vocab::RDFS_LABEL
        ))
        .unwrap();
        let tgt = Graph::parse_ntriples(&format!(
            "<http://t/i> <{l}> \"star wars\" .\n",
            l = vocab::RDFS_LABEL
        ))
        .unwrap();
        let a = pair_alignment(&[("http://s/i", "http://t/i")]);

        let mut cfg = jaccard_cfg();
        cfg.tokenizer = Tokenizer::WhitespaceLowercase;
        let out = bag_of_words_filter(&a, &src, &tgt, &cfg);
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert_eq!(c.extensions["filter/bow/jaccard"], 1.0);

        cfg.tokenizer = Tokenizer::Whitespace;
        let out = bag_of_words_filter(&a, &src, &tgt, &cfg);
        let c = out.get("http://s/i", "http://t/i", Relation::Equivalence).unwrap();
        assert!((c.extensions["filter/bow/jaccard"] - 1.0 / 3.0).abs() < 1e-15);
    }

    fn scored(pairs: &[(&str, &str, f64)]) -> Alignment {
        pairs.iter().map(|(s, t, conf)| Correspondence::new(*s, *t, *conf)).collect()
    }

    #[test]
    fn threshold_zero_keeps_everything() {
        let a = scored(&[("a", "b", 0.9), ("c", "d", 0.1)]);
        assert_eq!(threshold_filter(&a, 0.0), a);
    }

    #[test]
    fn threshold_above_one_drops_everything() {
        let a = scored(&[("a", "b", 1.0)]);
        assert!(threshold_filter(&a, 1.1).is_empty());
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let a = scored(&[("a", "b", 0.9), ("c", "d", 0.85), ("e", "f", 0.2)]);
        let kept = threshold_filter(&a, 0.85);
        assert_eq!(kept.len(), 2);
        assert!(kept.contains("c", "d", Relation::Equivalence));
    }

    #[test]
    fn extract_keeps_one_to_one_input() {
        let a = scored(&[("a", "b", 0.9), ("c", "d", 0.7)]);
        assert_eq!(naive_descending_extract(&a), a);
    }

    #[test]
    fn extract_greedy_trace() {
        let a = scored(&[("a", "b", 0.9), ("a", "c", 0.8), ("d", "c", 0.7)]);
        let out = naive_descending_extract(&a);
        assert_eq!(out.len(), 2);
        assert!(out.contains("a", "b", Relation::Equivalence));
        assert!(out.contains("d", "c", Relation::Equivalence));
    }

    #[test]
    fn extract_tie_breaks_lexicographically() {
        let a = scored(&[("a", "c", 0.5), ("a", "b", 0.5)]);
        let out = naive_descending_extract(&a);
        assert_eq!(out.len(), 1);
        assert!(out.contains("a", "b", Relation::Equivalence));
    }

    #[test]
    fn extract_is_idempotent_and_injective() {
        let a = scored(&[
            ("a", "b", 0.9),
            ("a", "c", 0.85),
            ("b", "b", 0.8),
            ("c", "d", 0.8),
            ("c", "e", 0.95),
        ]);
        let once = naive_descending_extract(&a);
        let twice = naive_descending_extract(&once);
        assert_eq!(once, twice);
        let mut sources = BTreeSet::new();
        let mut targets = BTreeSet::new();
        for c in once.iter() {
            assert!(sources.insert(c.source.clone()));
            assert!(targets.insert(c.target.clone()));
            assert!(a.contains(&c.source, &c.target, c.relation));
        }
    }

    #[test]
    fn feature_filters_preserve_membership() {
        let (src, tgt) = twin_graphs();
        let a = pair_alignment(&[("http://s/i", "http://t/i"), ("http://s/n1", "http://t/m1")]);
        let cfg = jaccard_cfg();
        for out in [
            similar_neighbours_filter(&a, &src, &tgt, &cfg),
            common_properties_filter(&a, &src, &tgt, &cfg),
            similar_hierarchy_filter(&a, &src, &tgt, &cfg),
            similar_type_filter(&a, &src, &tgt, &cfg),
            bag_of_words_filter(&a, &src, &tgt, &cfg),
        ] {
            assert_eq!(out.len(), a.len());
            for c in a.iter() {
                assert!(out.contains(&c.source, &c.target, c.relation));
            }
        }
    }

    #[test]
    fn feature_writes_are_deterministic() {
        let (src, tgt) = twin_graphs();
        let a = pair_alignment(&[("http://s/i", "http://t/i"), ("http://s/n1", "http://t/m1")]);
        let cfg = jaccard_cfg();
        let once = similar_neighbours_filter(&a, &src, &tgt, &cfg);
        let again = similar_neighbours_filter(&a, &src, &tgt, &cfg);
        assert_eq!(once, again);
    }
}
