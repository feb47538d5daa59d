//! Documents, labeled collections and the sparse text format they are read from.
//!
//! A corpus file holds one document per line:
//!
//! ```text
//! # comment
//! <label> <termid>:<count> <termid>:<count> ...
//! ```
//!
//! Term ids are 0-based dictionary indices, counts are positive integers and
//! a term id may appear at most once per line. A line with only a label is an
//! empty document.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a term in the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermId(pub u32);

impl TermId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Sparse bag-of-words vector: `(term, frequency)` pairs sorted by term with
/// no zero frequencies stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Document {
    entries: Vec<(TermId, u32)>,
}

impl Document {
    /// Builds a document from unordered pairs. Zero counts are dropped; a
    /// repeated term id is an error.
    pub fn new(pairs: impl IntoIterator<Item = (TermId, u32)>) -> Result<Self> {
        let mut entries: Vec<(TermId, u32)> =
            pairs.into_iter().filter(|&(_, count)| count > 0).collect();
        entries.sort_unstable_by_key(|&(term, _)| term);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateTerm(w[0].0));
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    #[inline]
    pub fn entries(&self) -> &[(TermId, u32)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, u32)> + '_ {
        self.entries.iter().copied()
    }

    /// Number of distinct terms.
    #[inline]
    pub fn num_terms(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Frequency of `term`, 0 when absent.
    pub fn frequency(&self, term: TermId) -> u32 {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .map_or(0, |i| self.entries[i].1)
    }

    /// `dl(x)`: sum of all term frequencies.
    pub fn length(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn term_set(&self) -> BTreeSet<TermId> {
        self.entries.iter().map(|&(t, _)| t).collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = TermId> + '_ {
        self.entries.iter().map(|&(t, _)| t)
    }

    pub fn max_term(&self) -> Option<TermId> {
        self.entries.last().map(|&(t, _)| t)
    }

    pub fn to_binary(&self) -> Document {
        Document {
            entries: self.entries.iter().map(|&(t, _)| (t, 1)).collect(),
        }
    }

    /// Applies `f` to every stored frequency. `f` must map positive values
    /// to positive values.
    pub fn map_frequencies(&self, mut f: impl FnMut(TermId, u32) -> u32) -> Document {
        Document {
            entries: self
                .entries
                .iter()
                .map(|&(t, c)| {
                    let mapped = f(t, c);
                    assert!(mapped > 0, "frequency map produced 0 for {t}");
                    (t, mapped)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    pub doc: Document,
    pub label: u32,
    pub source_id: Option<String>,
}

impl LabeledDocument {
    pub fn new(doc: Document, label: u32) -> Self {
        Self {
            doc,
            label,
            source_id: None,
        }
    }
}

/// A non-empty, ordered collection of labeled documents over a dictionary of
/// `dims` terms and `classes` labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    docs: Vec<LabeledDocument>,
    dims: usize,
    classes: usize,
}

impl Corpus {
    /// Validates and wraps `docs`. The dictionary size is `1 + max term id`
    /// unless `dims` overrides it, in which case every term must fit.
    pub fn new(docs: Vec<LabeledDocument>, dims: Option<usize>) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let observed = docs
            .iter()
            .filter_map(|d| d.doc.max_term())
            .max()
            .map_or(0, |t| t.index() + 1);
        let dims = match dims {
            Some(d) if d < observed => {
                return Err(Error::TermOutOfRange {
                    term: TermId((observed - 1) as u32),
                    dims: d,
                })
            }
            Some(d) => d,
            None => observed,
        };
        let classes = docs.iter().map(|d| d.label as usize + 1).max().unwrap_or(1);
        Ok(Self {
            docs,
            dims,
            classes,
        })
    }

    /// Number of documents `N`.
    #[inline]
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    /// Always false; kept for API symmetry with collections.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Dictionary size `M`.
    #[inline]
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Class count `C`.
    #[inline]
    pub fn classes(&self) -> usize {
        self.classes
    }

    #[inline]
    pub fn docs(&self) -> &[LabeledDocument] {
        &self.docs
    }

    #[inline]
    pub fn doc(&self, index: usize) -> &Document {
        &self.docs[index].doc
    }

    #[inline]
    pub fn label(&self, index: usize) -> u32 {
        self.docs[index].label
    }

    pub fn labels(&self) -> Vec<u32> {
        self.docs.iter().map(|d| d.label).collect()
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> + Clone + '_ {
        self.docs.iter().map(|d| &d.doc)
    }

    pub fn to_binary(&self) -> Corpus {
        Corpus {
            docs: self
                .docs
                .iter()
                .map(|d| LabeledDocument {
                    doc: d.doc.to_binary(),
                    label: d.label,
                    source_id: d.source_id.clone(),
                })
                .collect(),
            dims: self.dims,
            classes: self.classes,
        }
    }

    /// Rewrites every document frequency through `f`, keeping labels, `M`
    /// and `C`.
    pub fn map_frequencies(&self, mut f: impl FnMut(TermId, u32) -> u32) -> Corpus {
        Corpus {
            docs: self
                .docs
                .iter()
                .map(|d| LabeledDocument {
                    doc: d.doc.map_frequencies(&mut f),
                    label: d.label,
                    source_id: d.source_id.clone(),
                })
                .collect(),
            dims: self.dims,
            classes: self.classes,
        }
    }

    pub fn parse<R: BufRead>(reader: R, dims: Option<usize>) -> Result<Self> {
        let mut docs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let number = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let doc = parse_line(trimmed).map_err(|message| Error::Parse {
                line: number,
                message,
            })?;
            docs.push(doc);
        }
        Corpus::new(docs, dims)
    }

    pub fn parse_str(text: &str, dims: Option<usize>) -> Result<Self> {
        Self::parse(text.as_bytes(), dims)
    }

    pub fn load(path: impl AsRef<Path>, dims: Option<usize>) -> Result<Self> {
        let file = File::open(path)?;
        Self::parse(BufReader::new(file), dims)
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for d in &self.docs {
            writeln!(out, "{}", format_line(d))?;
        }
        Ok(())
    }
}

/// Parses one `<label> <termid>:<count>...` line.
pub fn parse_line(line: &str) -> std::result::Result<LabeledDocument, String> {
    let mut fields = line.split_whitespace();
    let label_field = fields.next().ok_or_else(|| "missing label".to_string())?;
    let label: u32 = label_field
        .parse()
        .map_err(|e| format!("invalid label `{label_field}`: {e}"))?;
    let mut pairs = Vec::new();
    for field in fields {
        let (term, count) = field
            .split_once(':')
            .ok_or_else(|| format!("expected <termid>:<count>, found `{field}`"))?;
        let term: u32 = term
            .parse()
            .map_err(|e| format!("invalid term id in `{field}`: {e}"))?;
        let count: u32 = count
            .parse()
            .map_err(|e| format!("invalid count in `{field}`: {e}"))?;
        if count == 0 {
            return Err(format!("zero count for term {term}"));
        }
        pairs.push((TermId(term), count));
    }
    let doc = Document::new(pairs).map_err(|e| e.to_string())?;
    Ok(LabeledDocument::new(doc, label))
}

pub fn format_line(doc: &LabeledDocument) -> String {
    let mut line = doc.label.to_string();
    for (term, count) in doc.doc.iter() {
        line.push_str(&format!(" {}:{}", term.0, count));
    }
    line
}
