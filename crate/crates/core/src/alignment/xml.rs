//! Alignment-format XML I/O.
//!
//! The document shape is `Alignment` → `map` → one `Cell` per
//! correspondence; each Cell carries `entity1`/`entity2` resource
//! attributes, a `relation` ("="), a decimal `measure`, and one
//! `<ext key="...">value</ext>` child per extension entry.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::{Alignment, AlignmentError, Correspondence, Relation};
use crate::numfmt::fmt_decimal;

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Serializes an alignment; output is byte-deterministic for equal inputs.
pub fn serialize_alignment_xml(alignment: &Alignment) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str("<Alignment>\n  <map>\n");
    for c in alignment.iter() {
        out.push_str("    <Cell>\n");
        let _ = writeln!(out, "      <entity1 resource=\"{}\"/>", escape_attr(&c.source));
        let _ = writeln!(out, "      <entity2 resource=\"{}\"/>", escape_attr(&c.target));
        let _ = writeln!(out, "      <relation>{}</relation>", escape_text(&c.relation.to_string()));
        let _ = writeln!(out, "      <measure>{}</measure>", fmt_decimal(c.confidence));
        for (key, value) in &c.extensions {
            let _ = writeln!(out, "      <ext key=\"{}\">{}</ext>", escape_attr(key), fmt_decimal(*value));
        }
        out.push_str("    </Cell>\n");
    }
    out.push_str("  </map>\n</Alignment>\n");
    out
}

#[derive(Default)]
struct CellState {
    entity1: Option<String>,
    entity2: Option<String>,
    relation: Option<String>,
    measure: Option<String>,
    extensions: BTreeMap<String, f64>,
}

enum TextTarget {
    None,
    Relation,
    Measure,
    Ext(String),
}

/// Parses alignment XML. Errors carry the 1-based ordinal of the offending
/// Cell where one is involved.
pub fn parse_alignment_xml(text: &str) -> Result<Alignment, AlignmentError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut alignment = Alignment::new();
    let mut cell_ordinal = 0usize;
    let mut cell: Option<CellState> = None;
    let mut target = TextTarget::None;
    let mut saw_root = false;

    let attr_value = |e: &quick_xml::events::BytesStart<'_>, name: &[u8]| -> Result<Option<String>, AlignmentError> {
        for attr in e.attributes() {
            let attr = attr.map_err(|err| AlignmentError::Xml(err.to_string()))?;
            if attr.key.local_name().as_ref() == name {
                let v = attr.unescape_value().map_err(|err| AlignmentError::Xml(err.to_string()))?;
                return Ok(Some(v.into_owned()));
            }
        }
        Ok(None)
    };

    loop {
        let event = reader.read_event().map_err(|e| AlignmentError::Xml(e.to_string()))?;
        match event {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) => {
                let name = e.local_name();
                match name.as_ref() {
                    b"Alignment" => saw_root = true,
                    b"Cell" => {
                        cell_ordinal += 1;
                        cell = Some(CellState::default());
                        target = TextTarget::None;
                    }
                    b"entity1" => {
                        if let Some(state) = cell.as_mut() {
                            state.entity1 = attr_value(&e, b"resource")?;
                        }
                    }
                    b"entity2" => {
                        if let Some(state) = cell.as_mut() {
                            state.entity2 = attr_value(&e, b"resource")?;
                        }
                    }
                    b"relation" if cell.is_some() => target = TextTarget::Relation,
                    b"measure" if cell.is_some() => target = TextTarget::Measure,
                    b"ext" if cell.is_some() => {
                        let key = attr_value(&e, b"key")?.ok_or(AlignmentError::InvalidCellValue {
                            cell: cell_ordinal,
                            what: "ext key attribute",
                            value: "(missing)".to_string(),
                        })?;
                        target = TextTarget::Ext(key);
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let Some(state) = cell.as_mut() {
                    let text = t.xml_content().map_err(|e| AlignmentError::Xml(e.to_string()))?;
                    match &target {
                        TextTarget::Relation => state.relation = Some(text.into_owned()),
                        TextTarget::Measure => state.measure = Some(text.into_owned()),
                        TextTarget::Ext(key) => {
                            let value: f64 = text.trim().parse().map_err(|_| {
                                AlignmentError::InvalidCellValue {
                                    cell: cell_ordinal,
                                    what: "ext value",
                                    value: text.to_string(),
                                }
                            })?;
                            if !value.is_finite() {
                                return Err(AlignmentError::NonFiniteValue { key: key.clone() });
                            }
                            state.extensions.insert(key.clone(), value);
                        }
                        TextTarget::None => {}
                    }
                }
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"Cell" => {
                    let state = cell.take().ok_or_else(|| {
                        AlignmentError::Xml("unexpected </Cell>".to_string())
                    })?;
                    alignment.add(finish_cell(state, cell_ordinal)?);
                }
                b"relation" | b"measure" | b"ext" => target = TextTarget::None,
                _ => {}
            },
            _ => {}
        }
    }

    if !saw_root {
        return Err(AlignmentError::Xml("missing Alignment root element".to_string()));
    }
    Ok(alignment)
}

fn finish_cell(state: CellState, ordinal: usize) -> Result<Correspondence, AlignmentError> {
    let missing = |child| AlignmentError::MissingCellChild { cell: ordinal, child };
    let entity1 = state.entity1.ok_or_else(|| missing("entity1"))?;
    let entity2 = state.entity2.ok_or_else(|| missing("entity2"))?;
    let relation = state.relation.ok_or_else(|| missing("relation"))?;
    let measure = state.measure.ok_or_else(|| missing("measure"))?;

    let relation: Relation = relation.trim().parse().map_err(|_| AlignmentError::InvalidCellValue {
        cell: ordinal,
        what: "relation",
        value: relation.clone(),
    })?;
    let confidence: f64 = measure.trim().parse().map_err(|_| AlignmentError::InvalidCellValue {
        cell: ordinal,
        what: "measure",
        value: measure.clone(),
    })?;
    if !confidence.is_finite() || !(0.0..=1.0).contains(&confidence) {
        return Err(AlignmentError::InvalidCellValue {
            cell: ordinal,
            what: "measure",
            value: measure,
        });
    }

    Ok(Correspondence {
        source: entity1,
        target: entity2,
        relation,
        confidence,
        extensions: state.extensions,
    })
}
