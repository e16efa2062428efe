//! The `.poset` text format and its JSON mirror.
//!
//! ```text
//! # comments run to the end of the line
//! poset crown2
//! el a1
//! el b1
//! cov a1 b1
//! base a1
//! ```
//!
//! `cov a b` means `a < b` with `b` covering `a`. Labels are single tokens
//! without `#`.

use std::path::Path;

use finspace::poset::Poset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDocument {
    pub name: String,
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
    #[serde(default)]
    pub basepoint: Option<String>,
}

/// Positions are 1-based and count characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("invalid JSON document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid poset: {0}")]
    Invalid(#[from] finspace::error::Error),
    #[error("label `{0}` cannot be written in the text format")]
    Unrepresentable(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (true, Some((c, b))) => {
                out.push((c + 1, &line[b..byte]));
                start = None;
            }
            (false, None) => start = Some((col, byte)),
            _ => {}
        }
    }
    if let Some((c, b)) = start {
        out.push((c + 1, &line[b..]));
    }
    out
}

pub fn parse_poset(text: &str) -> Result<PosetDocument, ParseError> {
    let mut name: Option<String> = None;
    let mut doc = PosetDocument {
        name: String::new(),
        elements: Vec::new(),
        covers: Vec::new(),
        basepoint: None,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        let args = &toks[1..];
        let arity = match keyword {
            "poset" | "el" | "base" => 1,
            "cov" => 2,
            _ => return Err(perr(line, col, format!("unknown directive `{keyword}`"))),
        };
        if args.len() != arity {
            let at = args.get(arity).map_or(content.chars().count() + 1, |t| t.0);
            return Err(perr(
                line,
                at,
                format!(
                    "`{keyword}` takes {arity} argument{}",
                    if arity == 1 { "" } else { "s" }
                ),
            ));
        }
        if keyword == "poset" {
            if name.is_some() {
                return Err(perr(line, col, "second `poset` header"));
            }
            name = Some(args[0].1.to_string());
            continue;
        }
        if name.is_none() {
            return Err(perr(line, col, "expected `poset <name>` header first"));
        }
        match keyword {
            "el" => doc.elements.push(args[0].1.to_string()),
            "cov" => doc
                .covers
                .push((args[0].1.to_string(), args[1].1.to_string())),
            _ => {
                if doc.basepoint.is_some() {
                    return Err(perr(line, col, "second `base` line"));
                }
                doc.basepoint = Some(args[0].1.to_string());
            }
        }
    }
    doc.name = name.ok_or_else(|| {
        perr(
            text.lines().count().max(1),
            1,
            "missing `poset <name>` header",
        )
    })?;
    Ok(doc)
}

fn check_token(s: &str) -> Result<&str, DocumentError> {
    if s.is_empty() || s.contains('#') || s.chars().any(char::is_whitespace) {
        Err(DocumentError::Unrepresentable(s.to_string()))
    } else {
        Ok(s)
    }
}

pub fn emit_poset(doc: &PosetDocument) -> Result<String, DocumentError> {
    let mut out = format!("poset {}\n", check_token(&doc.name)?);
    for e in &doc.elements {
        out.push_str(&format!("el {}\n", check_token(e)?));
    }
    for (a, b) in &doc.covers {
        out.push_str(&format!("cov {} {}\n", check_token(a)?, check_token(b)?));
    }
    if let Some(b) = &doc.basepoint {
        out.push_str(&format!("base {}\n", check_token(b)?));
    }
    Ok(out)
}

pub fn parse_json(text: &str) -> Result<PosetDocument, DocumentError> {
    Ok(serde_json::from_str(text)?)
}

pub fn emit_json(doc: &PosetDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize") + "\n"
}

/// Reads a document, as JSON when the extension is `.json`.
pub fn load(path: &Path) -> Result<PosetDocument, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_json(&text)
    } else {
        Ok(parse_poset(&text)?)
    }
}

impl PosetDocument {
    pub fn from_poset(name: &str, p: &Poset, basepoint: Option<usize>) -> Self {
        PosetDocument {
            name: name.to_string(),
            elements: p.labels().to_vec(),
            covers: p
                .covers()
                .iter()
                .map(|&(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
                .collect(),
            basepoint: basepoint.map(|b| p.label(b).to_string()),
        }
    }

    /// The poset and the basepoint's id.
    pub fn to_poset(&self) -> Result<(Poset, Option<usize>), DocumentError> {
        let p = Poset::from_covers(&self.elements, &self.covers)?;
        let base = match &self.basepoint {
            Some(b) => Some(
                p.index_of(b)
                    .ok_or_else(|| finspace::error::Error::UnknownLabel(b.clone()))?,
            ),
            None => None,
        };
        Ok((p, base))
    }
}
