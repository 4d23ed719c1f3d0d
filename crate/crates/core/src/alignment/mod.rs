//! Correspondences, alignments, training-data sampling, and
//! gold-standard-completeness-aware judging.

mod xml;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rdf::Graph;

pub use xml::{parse_alignment_xml, serialize_alignment_xml};

/// The relation asserted by a correspondence. Only equivalence is currently
/// supported; the enum leaves room for more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Relation {
    #[default]
    Equivalence,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Equivalence => write!(f, "="),
        }
    }
}

impl FromStr for Relation {
    type Err = AlignmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "=" => Ok(Relation::Equivalence),
            other => Err(AlignmentError::UnknownRelation(other.to_string())),
        }
    }
}

/// A typed edge between two entities: source IRI, target IRI, relation, and
/// a confidence in `[0, 1]`, plus an extensible key→number feature map.
///
/// The identity of a correspondence is the `(source, target, relation)`
/// triple; extensions and confidence never affect identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    pub source: String,
    pub target: String,
    pub relation: Relation,
    pub confidence: f64,
    pub extensions: BTreeMap<String, f64>,
}

impl Correspondence {
    pub fn new(source: impl Into<String>, target: impl Into<String>, confidence: f64) -> Self {
        assert!(
            confidence.is_finite() && (0.0..=1.0).contains(&confidence),
            "confidence must lie in [0, 1], got {confidence}"
        );
        Correspondence {
            source: source.into(),
            target: target.into(),
            relation: Relation::Equivalence,
            confidence,
            extensions: BTreeMap::new(),
        }
    }

    pub fn with_extension(mut self, key: impl Into<String>, value: f64) -> Self {
        self.extensions.insert(key.into(), value);
        self
    }

    fn key(&self) -> Key {
        (self.source.clone(), self.target.clone(), self.relation)
    }
}

type Key = (String, String, Relation);

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("feature value for key '{key}' is not finite")]
    NonFiniteValue { key: String },
    #[error("sample size {n} out of range for alignment of size {len}")]
    SampleSize { n: usize, len: usize },
    #[error("sample fraction {0} outside the open interval (0, 1)")]
    FractionRange(f64),
    #[error("unknown relation '{0}'")]
    UnknownRelation(String),
    #[error("unknown completeness level '{0}'")]
    UnknownCompleteness(String),
    #[error("alignment XML error: {0}")]
    Xml(String),
    #[error("alignment XML: Cell {cell} missing mandatory child '{child}'")]
    MissingCellChild { cell: usize, child: &'static str },
    #[error("alignment XML: Cell {cell} has invalid {what}: {value}")]
    InvalidCellValue { cell: usize, what: &'static str, value: String },
    #[error("{0}")]
    Io(String),
}

/// A set of correspondences with by-source and by-target lookup indexes.
/// At most one correspondence exists per `(source, target, relation)`.
#[derive(Debug, Clone, Default)]
pub struct Alignment {
    corrs: BTreeMap<Key, Correspondence>,
    by_source: HashMap<String, BTreeSet<String>>,
    by_target: HashMap<String, BTreeSet<String>>,
}

impl PartialEq for Alignment {
    fn eq(&self, other: &Self) -> bool {
        self.corrs == other.corrs
    }
}

impl Alignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a correspondence. When the identity key already exists, the
    /// stored entry keeps the maximum of both confidences and the union of
    /// both extension maps (the incoming entry wins on key clashes).
    pub fn add(&mut self, c: Correspondence) {
        self.by_source.entry(c.source.clone()).or_default().insert(c.target.clone());
        self.by_target.entry(c.target.clone()).or_default().insert(c.source.clone());
        match self.corrs.entry(c.key()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let existing = e.get_mut();
                existing.confidence = existing.confidence.max(c.confidence);
                existing.extensions.extend(c.extensions);
            }
        }
    }

    /// Adds a correspondence and records `key → value` in its extensions.
    /// Non-finite values are rejected.
    pub fn add_with_feature(
        &mut self,
        c: Correspondence,
        key: impl Into<String>,
        value: f64,
    ) -> Result<(), AlignmentError> {
        let key = key.into();
        if !value.is_finite() {
            return Err(AlignmentError::NonFiniteValue { key });
        }
        self.add(c.with_extension(key, value));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.corrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corrs.is_empty()
    }

    pub fn contains(&self, source: &str, target: &str, relation: Relation) -> bool {
        self.get(source, target, relation).is_some()
    }

    pub fn get(&self, source: &str, target: &str, relation: Relation) -> Option<&Correspondence> {
        self.corrs.get(&(source.to_string(), target.to_string(), relation))
    }

    pub fn has_source(&self, iri: &str) -> bool {
        self.by_source.contains_key(iri)
    }

    pub fn has_target(&self, iri: &str) -> bool {
        self.by_target.contains_key(iri)
    }

    /// Target IRIs this source is matched to.
    pub fn targets_of(&self, source: &str) -> impl Iterator<Item = &str> + '_ {
        self.by_source.get(source).into_iter().flatten().map(String::as_str)
    }

    /// Source IRIs this target is matched to.
    pub fn sources_of(&self, target: &str) -> impl Iterator<Item = &str> + '_ {
        self.by_target.get(target).into_iter().flatten().map(String::as_str)
    }

    /// Correspondences in deterministic `(source, target, relation)` order.
    pub fn iter(&self) -> impl Iterator<Item = &Correspondence> + '_ {
        self.corrs.values()
    }

    /// Correspondences of `self` whose identity key is absent from `other`.
    pub fn subtract(&self, other: &Alignment) -> Alignment {
        self.iter()
            .filter(|c| !other.contains(&c.source, &c.target, c.relation))
            .cloned()
            .collect()
    }

    /// Splits off `n` uniformly selected correspondences. The same seed
    /// yields the same split; sampled and rest always partition the input.
    pub fn sample(&self, n: usize, seed: u64) -> Result<(Alignment, Alignment), AlignmentError> {
        if n > self.len() {
            return Err(AlignmentError::SampleSize { n, len: self.len() });
        }
        let mut keys: Vec<&Key> = self.corrs.keys().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        keys.shuffle(&mut rng);
        let picked: BTreeSet<&Key> = keys.into_iter().take(n).collect();
        let mut sampled = Alignment::new();
        let mut rest = Alignment::new();
        for (key, c) in &self.corrs {
            if picked.contains(key) {
                sampled.add(c.clone());
            } else {
                rest.add(c.clone());
            }
        }
        Ok((sampled, rest))
    }

    /// Samples `round(fraction · |alignment|)` correspondences (half-up).
    /// The fraction must lie strictly inside `(0, 1)`.
    pub fn sample_by_fraction(
        &self,
        fraction: f64,
        seed: u64,
    ) -> Result<(Alignment, Alignment), AlignmentError> {
        if !fraction.is_finite() || fraction <= 0.0 || fraction >= 1.0 {
            return Err(AlignmentError::FractionRange(fraction));
        }
        let n = (fraction * self.len() as f64 + 0.5).floor() as usize;
        self.sample(n, seed)
    }
}

impl FromIterator<Correspondence> for Alignment {
    fn from_iter<T: IntoIterator<Item = Correspondence>>(iter: T) -> Self {
        let mut a = Alignment::new();
        for c in iter {
            a.add(c);
        }
        a
    }
}

impl<'a> IntoIterator for &'a Alignment {
    type Item = &'a Correspondence;
    type IntoIter = std::collections::btree_map::Values<'a, Key, Correspondence>;

    fn into_iter(self) -> Self::IntoIter {
        self.corrs.values()
    }
}

/// How exhaustively the reference alignment covers each side of the task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoldStandardCompleteness {
    Complete,
    PartialSourceCompleteTargetComplete,
    PartialSourceIncompleteTargetComplete,
    PartialSourceCompleteTargetIncomplete,
    PartialSourceIncompleteTargetIncomplete,
}

impl GoldStandardCompleteness {
    pub fn is_complete(self) -> bool {
        matches!(self, GoldStandardCompleteness::Complete)
    }

    pub fn is_source_complete(self) -> bool {
        use GoldStandardCompleteness::*;
        matches!(self, Complete | PartialSourceCompleteTargetComplete | PartialSourceCompleteTargetIncomplete)
    }

    pub fn is_target_complete(self) -> bool {
        use GoldStandardCompleteness::*;
        matches!(self, Complete | PartialSourceCompleteTargetComplete | PartialSourceIncompleteTargetComplete)
    }

    pub const ALL: [GoldStandardCompleteness; 5] = [
        GoldStandardCompleteness::Complete,
        GoldStandardCompleteness::PartialSourceCompleteTargetComplete,
        GoldStandardCompleteness::PartialSourceIncompleteTargetComplete,
        GoldStandardCompleteness::PartialSourceCompleteTargetIncomplete,
        GoldStandardCompleteness::PartialSourceIncompleteTargetIncomplete,
    ];
}

impl fmt::Display for GoldStandardCompleteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GoldStandardCompleteness::*;
        let s = match self {
            Complete => "complete",
            PartialSourceCompleteTargetComplete => "partial-source-complete-target-complete",
            PartialSourceIncompleteTargetComplete => "partial-source-incomplete-target-complete",
            PartialSourceCompleteTargetIncomplete => "partial-source-complete-target-incomplete",
            PartialSourceIncompleteTargetIncomplete => "partial-source-incomplete-target-incomplete",
        };
        write!(f, "{s}")
    }
}

impl FromStr for GoldStandardCompleteness {
    type Err = AlignmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use GoldStandardCompleteness::*;
        match s {
            "complete" => Ok(Complete),
            "partial-source-complete-target-complete" => Ok(PartialSourceCompleteTargetComplete),
            "partial-source-incomplete-target-complete" => Ok(PartialSourceIncompleteTargetComplete),
            "partial-source-complete-target-incomplete" => Ok(PartialSourceCompleteTargetIncomplete),
            "partial-source-incomplete-target-incomplete" => Ok(PartialSourceIncompleteTargetIncomplete),
            other => Err(AlignmentError::UnknownCompleteness(other.to_string())),
        }
    }
}

/// The verdict for one correspondence against a reference alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgement {
    TruePositive,
    FalsePositive,
    Unjudgeable,
}

/// Judges one correspondence under the given completeness level: an exact
/// reference hit is a true positive; otherwise the correspondence is wrong
/// exactly when a complete side can vouch for it; everything else cannot be
/// judged.
pub fn judge(
    c: &Correspondence,
    reference: &Alignment,
    completeness: GoldStandardCompleteness,
) -> Judgement {
    if reference.contains(&c.source, &c.target, c.relation) {
        return Judgement::TruePositive;
    }
    let judged_by_source = completeness.is_source_complete() && reference.has_source(&c.source);
    let judged_by_target = completeness.is_target_complete() && reference.has_target(&c.target);
    if completeness.is_complete() || judged_by_source || judged_by_target {
        Judgement::FalsePositive
    } else {
        Judgement::Unjudgeable
    }
}

/// A matching task: two graphs, a reference alignment, and how complete the
/// reference is. Reference IRIs are not required to occur in the graphs.
#[derive(Debug, Clone)]
pub struct TestCase {
    pub source: Graph,
    pub target: Graph,
    pub reference: Alignment,
    pub completeness: GoldStandardCompleteness,
}

impl TestCase {
    pub fn load(
        source: impl AsRef<Path>,
        target: impl AsRef<Path>,
        reference: impl AsRef<Path>,
        completeness: GoldStandardCompleteness,
    ) -> Result<Self, AlignmentError> {
        let src = Graph::parse_ntriples_path(&source).map_err(|e| AlignmentError::Io(e.to_string()))?;
        let tgt = Graph::parse_ntriples_path(&target).map_err(|e| AlignmentError::Io(e.to_string()))?;
        let text = std::fs::read_to_string(reference.as_ref())
            .map_err(|e| AlignmentError::Io(format!("{}: {e}", reference.as_ref().display())))?;
        let reference = parse_alignment_xml(&text)?;
        Ok(TestCase { source: src, target: tgt, reference, completeness })
    }
}
