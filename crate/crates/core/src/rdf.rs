//! Immutable, indexed in-memory RDF graphs with N-Triples I/O.
//!
//! A [`Graph`] is built once (from an N-Triples document or through a
//! [`GraphBuilder`]) and is read-only afterwards, so it can be shared freely
//! across threads. Resources are interned to integer ids internally; the
//! public API speaks IRI strings.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

/// Synthetic IRI prefix used when skolemizing blank nodes.
const SKOLEM_PREFIX: &str = "urn:skolem:";

/// An RDF literal: a lexical form plus at most one of a language tag or a
/// datatype IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    tag: LiteralTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum LiteralTag {
    Plain,
    Language(String),
    Datatype(String),
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), tag: LiteralTag::Plain }
    }

    pub fn lang_tagged(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), tag: LiteralTag::Language(language.into()) }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), tag: LiteralTag::Datatype(datatype.into()) }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        match &self.tag {
            LiteralTag::Language(l) => Some(l),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<&str> {
        match &self.tag {
            LiteralTag::Datatype(d) => Some(d),
            _ => None,
        }
    }
}

/// Object position of a triple as seen through the public API.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Object<'g> {
    Resource(&'g str),
    Literal(&'g Literal),
}

/// A borrowed view of one triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleRef<'g> {
    pub subject: &'g str,
    pub predicate: &'g str,
    pub object: Object<'g>,
}

/// Which triples to follow when collecting neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Outgoing,
    Incoming,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Obj {
    Res(u32),
    Lit(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct IndexedTriple {
    subject: u32,
    predicate: u32,
    object: Obj,
}

/// Errors raised while parsing N-Triples input.
#[derive(Debug, Error)]
#[error("N-Triples parse error at line {line}: {message}")]
pub struct NtParseError {
    pub line: usize,
    pub message: String,
}

impl NtParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        NtParseError { line, message: message.into() }
    }
}

/// Incrementally assembles a [`Graph`]; duplicate triples collapse to one.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    iris: Vec<String>,
    ids: HashMap<String, u32>,
    skolems: HashSet<u32>,
    literals: Vec<Literal>,
    literal_ids: HashMap<Literal, u32>,
    triples: Vec<IndexedTriple>,
    seen: HashSet<IndexedTriple>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, iri: &str) -> u32 {
        if let Some(&id) = self.ids.get(iri) {
            return id;
        }
        let id = self.iris.len() as u32;
        self.iris.push(iri.to_string());
        self.ids.insert(iri.to_string(), id);
        id
    }

    fn intern_skolem(&mut self, label: &str) -> u32 {
        let iri = format!("{SKOLEM_PREFIX}{label}");
        let id = self.intern(&iri);
        self.skolems.insert(id);
        id
    }

    fn intern_literal(&mut self, lit: Literal) -> u32 {
        if let Some(&id) = self.literal_ids.get(&lit) {
            return id;
        }
        let id = self.literals.len() as u32;
        self.literals.push(lit.clone());
        self.literal_ids.insert(lit, id);
        id
    }

    fn push(&mut self, t: IndexedTriple) {
        if self.seen.insert(t) {
            self.triples.push(t);
        }
    }

    pub fn resource_triple(&mut self, subject: &str, predicate: &str, object: &str) -> &mut Self {
        let t = IndexedTriple {
            subject: self.intern(subject),
            predicate: self.intern(predicate),
            object: Obj::Res(self.intern(object)),
        };
        self.push(t);
        self
    }

    pub fn literal_triple(&mut self, subject: &str, predicate: &str, object: Literal) -> &mut Self {
        let t = IndexedTriple {
            subject: self.intern(subject),
            predicate: self.intern(predicate),
            object: Obj::Lit(self.intern_literal(object)),
        };
        self.push(t);
        self
    }

    pub fn build(self) -> Graph {
        let mut by_subject: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut by_predicate: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut by_object: HashMap<Obj, Vec<u32>> = HashMap::new();
        let mut by_subject_predicate: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (i, t) in self.triples.iter().enumerate() {
            let i = i as u32;
            by_subject.entry(t.subject).or_default().push(i);
            by_predicate.entry(t.predicate).or_default().push(i);
            by_object.entry(t.object).or_default().push(i);
            by_subject_predicate.entry((t.subject, t.predicate)).or_default().push(i);
        }
        Graph {
            iris: self.iris,
            ids: self.ids,
            skolems: self.skolems,
            literals: self.literals,
            triples: self.triples,
            by_subject,
            by_predicate,
            by_object,
            by_subject_predicate,
        }
    }
}

/// An immutable triple store for one knowledge graph, indexed by subject,
/// predicate, object, and (subject, predicate).
#[derive(Debug, Clone, Default)]
pub struct Graph {
    iris: Vec<String>,
    ids: HashMap<String, u32>,
    skolems: HashSet<u32>,
    literals: Vec<Literal>,
    triples: Vec<IndexedTriple>,
    by_subject: HashMap<u32, Vec<u32>>,
    by_predicate: HashMap<u32, Vec<u32>>,
    by_object: HashMap<Obj, Vec<u32>>,
    by_subject_predicate: HashMap<(u32, u32), Vec<u32>>,
}

impl Graph {
    /// Parses a line-oriented N-Triples document. Comment and blank lines are
    /// skipped; duplicate statements collapse to one triple; blank nodes are
    /// skolemized to stable synthetic IRIs scoped to this document.
    pub fn parse_ntriples(text: &str) -> Result<Graph, NtParseError> {
        let mut builder = GraphBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            parse_statement(line, lineno, &mut builder)?;
        }
        Ok(builder.build())
    }

    pub fn parse_ntriples_path(path: impl AsRef<Path>) -> Result<Graph, NtParseError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| NtParseError::new(0, format!("{}: {e}", path.as_ref().display())))?;
        Self::parse_ntriples(&text)
    }

    /// Serializes the graph back to N-Triples, one statement per line, in
    /// load order.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            let _ = write!(out, "<{}> <{}> ", self.iris[t.subject as usize], self.iris[t.predicate as usize]);
            match t.object {
                Obj::Res(r) => {
                    let _ = write!(out, "<{}>", self.iris[r as usize]);
                }
                Obj::Lit(l) => {
                    let lit = &self.literals[l as usize];
                    let _ = write!(out, "\"{}\"", escape_literal(lit.lexical()));
                    match &lit.tag {
                        LiteralTag::Plain => {}
                        LiteralTag::Language(lang) => {
                            let _ = write!(out, "@{lang}");
                        }
                        LiteralTag::Datatype(dt) => {
                            let _ = write!(out, "^^<{dt}>");
                        }
                    }
                }
            }
            out.push_str(" .\n");
        }
        out
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    fn id_of(&self, iri: &str) -> Option<u32> {
        self.ids.get(iri).copied()
    }

    pub fn contains_resource(&self, iri: &str) -> bool {
        self.ids.contains_key(iri)
    }

    /// True when the resource was minted from a blank node during parsing.
    pub fn is_skolem(&self, iri: &str) -> bool {
        self.id_of(iri).is_some_and(|id| self.skolems.contains(&id))
    }

    pub fn triples(&self) -> impl Iterator<Item = TripleRef<'_>> + '_ {
        self.triples.iter().map(move |t| TripleRef {
            subject: &self.iris[t.subject as usize],
            predicate: &self.iris[t.predicate as usize],
            object: match t.object {
                Obj::Res(r) => Object::Resource(&self.iris[r as usize]),
                Obj::Lit(l) => Object::Literal(&self.literals[l as usize]),
            },
        })
    }

    /// Distinct subject IRIs in first-seen order.
    pub fn subjects(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for t in &self.triples {
            if seen.insert(t.subject) {
                out.push(self.iris[t.subject as usize].as_str());
            }
        }
        out
    }

    /// All interned resource IRIs (subjects, predicates, and resource
    /// objects) in interning order.
    pub fn resources(&self) -> impl Iterator<Item = &str> + '_ {
        self.iris.iter().map(|s| s.as_str())
    }

    /// Resource neighbours of `node` following the given direction. Literal
    /// objects never appear; an unknown node yields the empty set.
    pub fn neighbours(&self, node: &str, direction: Direction) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let Some(id) = self.id_of(node) else {
            return out;
        };
        if matches!(direction, Direction::Outgoing | Direction::Both) {
            if let Some(idxs) = self.by_subject.get(&id) {
                for &i in idxs {
                    if let Obj::Res(r) = self.triples[i as usize].object {
                        out.insert(self.iris[r as usize].as_str());
                    }
                }
            }
        }
        if matches!(direction, Direction::Incoming | Direction::Both) {
            if let Some(idxs) = self.by_object.get(&Obj::Res(id)) {
                for &i in idxs {
                    let s = self.triples[i as usize].subject;
                    out.insert(self.iris[s as usize].as_str());
                }
            }
        }
        out
    }

    /// Literal objects of triples with subject `node`, optionally restricted
    /// to one predicate, sorted by lexical form.
    pub fn literal_values(&self, node: &str, property: Option<&str>) -> Vec<&Literal> {
        let Some(id) = self.id_of(node) else {
            return Vec::new();
        };
        let idxs = match property {
            Some(p) => match self.id_of(p) {
                Some(pid) => self.by_subject_predicate.get(&(id, pid)),
                None => None,
            },
            None => self.by_subject.get(&id),
        };
        let mut out: Vec<&Literal> = idxs
            .into_iter()
            .flatten()
            .filter_map(|&i| match self.triples[i as usize].object {
                Obj::Lit(l) => Some(&self.literals[l as usize]),
                Obj::Res(_) => None,
            })
            .collect();
        out.sort();
        out
    }

    /// Predicates of all triples whose subject is `node`.
    pub fn properties(&self, node: &str) -> BTreeSet<&str> {
        let Some(id) = self.id_of(node) else {
            return BTreeSet::new();
        };
        self.by_subject
            .get(&id)
            .into_iter()
            .flatten()
            .map(|&i| self.iris[self.triples[i as usize].predicate as usize].as_str())
            .collect()
    }

    /// Resource objects of triples `(node, property, ·)`.
    pub fn resource_objects_of(&self, node: &str, property: &str) -> BTreeSet<&str> {
        let (Some(id), Some(pid)) = (self.id_of(node), self.id_of(property)) else {
            return BTreeSet::new();
        };
        self.by_subject_predicate
            .get(&(id, pid))
            .into_iter()
            .flatten()
            .filter_map(|&i| match self.triples[i as usize].object {
                Obj::Res(r) => Some(self.iris[r as usize].as_str()),
                Obj::Lit(_) => None,
            })
            .collect()
    }

    /// Resource objects of triples `(node, predicate, ·)`, in load order with
    /// duplicates preserved; the sampling basis for random walks.
    pub fn resource_objects(&self, node: &str) -> Vec<(&str, &str)> {
        let Some(id) = self.id_of(node) else {
            return Vec::new();
        };
        self.by_subject
            .get(&id)
            .into_iter()
            .flatten()
            .filter_map(|&i| {
                let t = &self.triples[i as usize];
                match t.object {
                    Obj::Res(r) => {
                        Some((self.iris[t.predicate as usize].as_str(), self.iris[r as usize].as_str()))
                    }
                    Obj::Lit(_) => None,
                }
            })
            .collect()
    }

    #[cfg(test)]
    fn subject_bucket_sizes(&self) -> usize {
        self.by_subject.values().map(Vec::len).sum()
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(line_text: &'a str, line: usize) -> Self {
        Lexer { chars: line_text.chars().peekable(), line }
    }

    fn err(&self, message: impl Into<String>) -> NtParseError {
        NtParseError::new(self.line, message)
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(' ') | Some('\t')) {
            self.chars.next();
        }
    }

    fn expect(&mut self, c: char) -> Result<(), NtParseError> {
        match self.chars.next() {
            Some(got) if got == c => Ok(()),
            Some(got) => Err(self.err(format!("expected '{c}', found '{got}'"))),
            None => Err(self.err(format!("expected '{c}', found end of line"))),
        }
    }

    fn unescape(&mut self, iri_position: bool) -> Result<char, NtParseError> {
        let c = self.chars.next().ok_or_else(|| self.err("dangling escape"))?;
        let hex_escape = |lexer: &mut Self, n: usize| -> Result<char, NtParseError> {
            let mut v: u32 = 0;
            for _ in 0..n {
                let h = lexer.chars.next().ok_or_else(|| lexer.err("truncated \\u escape"))?;
                v = v * 16
                    + h.to_digit(16).ok_or_else(|| lexer.err("invalid hex digit in escape"))?;
            }
            char::from_u32(v).ok_or_else(|| lexer.err("escape is not a valid code point"))
        };
        match c {
            'u' => hex_escape(self, 4),
            'U' => hex_escape(self, 8),
            't' => Ok('\t'),
            'n' => Ok('\n'),
            'r' => Ok('\r'),
            'b' if !iri_position => Ok('\u{0008}'),
            'f' if !iri_position => Ok('\u{000C}'),
            '"' if !iri_position => Ok('"'),
            '\'' if !iri_position => Ok('\''),
            '\\' => Ok('\\'),
            other => Err(self.err(format!("unsupported escape '\\{other}'"))),
        }
    }

    fn iri(&mut self) -> Result<String, NtParseError> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.chars.next() {
                Some('>') => break,
                Some('\\') => out.push(self.unescape(true)?),
                Some(c) => out.push(c),
                None => return Err(self.err("unterminated IRI")),
            }
        }
        if out.is_empty() {
            return Err(self.err("empty IRI"));
        }
        Ok(out)
    }

    fn blank_label(&mut self) -> Result<String, NtParseError> {
        self.expect('_')?;
        self.expect(':')?;
        let mut out = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' {
                out.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if out.is_empty() {
            return Err(self.err("empty blank node label"));
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<Literal, NtParseError> {
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.chars.next() {
                Some('"') => break,
                Some('\\') => lexical.push(self.unescape(false)?),
                Some(c) => lexical.push(c),
                None => return Err(self.err("unterminated literal")),
            }
        }
        match self.chars.peek() {
            Some('@') => {
                self.chars.next();
                let mut lang = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        lang.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                if lang.is_empty() {
                    return Err(self.err("empty language tag"));
                }
                Ok(Literal::lang_tagged(lexical, lang))
            }
            Some('^') => {
                self.chars.next();
                self.expect('^')?;
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }
}

fn parse_statement(line: &str, lineno: usize, builder: &mut GraphBuilder) -> Result<(), NtParseError> {
    let mut lx = Lexer::new(line, lineno);

    lx.skip_ws();
    let subject = match lx.chars.peek() {
        Some('<') => builder.intern(&lx.iri()?),
        Some('_') => {
            let label = lx.blank_label()?;
            builder.intern_skolem(&label)
        }
        Some(c) => return Err(lx.err(format!("unexpected subject start '{c}'"))),
        None => return Err(lx.err("missing subject")),
    };

    lx.skip_ws();
    let predicate = match lx.chars.peek() {
        Some('<') => builder.intern(&lx.iri()?),
        Some(c) => return Err(lx.err(format!("unexpected predicate start '{c}'"))),
        None => return Err(lx.err("missing predicate")),
    };

    lx.skip_ws();
    let object = match lx.chars.peek() {
        Some('<') => Obj::Res(builder.intern(&lx.iri()?)),
        Some('_') => {
            let label = lx.blank_label()?;
            Obj::Res(builder.intern_skolem(&label))
        }
        Some('"') => Obj::Lit(builder.intern_literal(lx.literal()?)),
        Some(c) => return Err(lx.err(format!("unexpected object start '{c}'"))),
        None => return Err(lx.err("missing object")),
    };

    lx.skip_ws();
    lx.expect('.')?;
    lx.skip_ws();
    if let Some(c) = lx.chars.next() {
        return Err(lx.err(format!("trailing content '{c}' after statement")));
    }

    builder.push(IndexedTriple { subject, predicate, object });
    Ok(())
}
