//! Term weighting: a document factor (raw or `1 + ln x`) times a collection
//! factor (none, idf or icf). Natural logarithms throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, LabeledDocument, TermId};
use crate::error::{Error, Result};
use crate::index::FrequencyIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DocFactor {
    Raw,
    LogTf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CollectionFactor {
    None,
    Idf,
    Icf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightingScheme {
    pub doc_factor: DocFactor,
    pub collection_factor: CollectionFactor,
}

impl WeightingScheme {
    pub const IDENTITY: Self = Self::new(DocFactor::Raw, CollectionFactor::None);
    pub const TF: Self = Self::new(DocFactor::LogTf, CollectionFactor::None);
    pub const IDF: Self = Self::new(DocFactor::Raw, CollectionFactor::Idf);
    pub const TF_IDF: Self = Self::new(DocFactor::LogTf, CollectionFactor::Idf);
    pub const ICF: Self = Self::new(DocFactor::Raw, CollectionFactor::Icf);
    pub const TF_ICF: Self = Self::new(DocFactor::LogTf, CollectionFactor::Icf);

    pub const ALL: [Self; 6] = [
        Self::IDENTITY,
        Self::TF,
        Self::IDF,
        Self::TF_IDF,
        Self::ICF,
        Self::TF_ICF,
    ];

    pub const fn new(doc_factor: DocFactor, collection_factor: CollectionFactor) -> Self {
        Self {
            doc_factor,
            collection_factor,
        }
    }

    pub fn is_identity(self) -> bool {
        self == Self::IDENTITY
    }

    pub fn needs_class_stats(self) -> bool {
        self.collection_factor == CollectionFactor::Icf
    }

    /// Configuration name: `none`, `tf`, `idf`, `tf-idf`, `icf` or `tf-icf`.
    pub fn name(self) -> &'static str {
        match (self.doc_factor, self.collection_factor) {
            (DocFactor::Raw, CollectionFactor::None) => "none",
            (DocFactor::LogTf, CollectionFactor::None) => "tf",
            (DocFactor::Raw, CollectionFactor::Idf) => "idf",
            (DocFactor::LogTf, CollectionFactor::Idf) => "tf-idf",
            (DocFactor::Raw, CollectionFactor::Icf) => "icf",
            (DocFactor::LogTf, CollectionFactor::Icf) => "tf-icf",
        }
    }
}

impl Default for WeightingScheme {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::UnknownWeighting(s.to_string()))
    }
}

/// Sparse `(term, weight)` pairs sorted by term; weights are finite and
/// strictly positive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedVector {
    entries: Vec<(TermId, f64)>,
}

impl WeightedVector {
    /// Keeps pairs with positive weight. Input must be sorted by term without
    /// repeats.
    pub fn from_sorted(pairs: impl IntoIterator<Item = (TermId, f64)>) -> Self {
        let entries: Vec<_> = pairs.into_iter().filter(|&(_, w)| w > 0.0).collect();
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w.is_finite()));
        Self { entries }
    }

    #[inline]
    pub fn entries(&self) -> &[(TermId, f64)] {
        &self.entries
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn weight(&self, term: TermId) -> f64 {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .map_or(0.0, |i| self.entries[i].1)
    }
}

/// Number of classes each term occurs in, over some labeled collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTermStats {
    classes: usize,
    class_freq: Vec<u32>,
}

impl ClassTermStats {
    pub fn build<'a>(
        docs: impl IntoIterator<Item = &'a LabeledDocument>,
        dims: usize,
        classes: usize,
    ) -> Self {
        let mut seen = vec![false; dims * classes];
        let mut class_freq = vec![0u32; dims];
        for d in docs {
            let label = d.label as usize;
            assert!(label < classes, "label {label} outside {classes} classes");
            for term in d.doc.terms() {
                let slot = &mut seen[term.index() * classes + label];
                if !*slot {
                    *slot = true;
                    class_freq[term.index()] += 1;
                }
            }
        }
        Self {
            classes,
            class_freq,
        }
    }

    /// `C`.
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// `c_i`; 0 for terms beyond the dictionary.
    pub fn class_freq(&self, term: TermId) -> usize {
        self.class_freq.get(term.index()).map_or(0, |&c| c as usize)
    }
}

pub fn class_term_stats(corpus: &crate::corpus::Corpus) -> ClassTermStats {
    ClassTermStats::build(corpus.docs(), corpus.dims(), corpus.classes())
}

/// `1 + ln x` for `x > 0`, else 0.
#[inline]
pub fn tf_factor(freq: u32) -> f64 {
    if freq == 0 {
        0.0
    } else {
        1.0 + f64::from(freq).ln()
    }
}

/// `ln(N / n_i)`.
pub fn idf(index: &FrequencyIndex, term: TermId) -> Result<f64> {
    match index.doc_freq(term) {
        0 => Err(Error::ZeroDocumentFrequency(term)),
        n => Ok(idf_from_counts(index.num_docs(), n)),
    }
}

#[inline]
pub(crate) fn idf_from_counts(num_docs: usize, doc_freq: usize) -> f64 {
    (num_docs as f64 / doc_freq as f64).ln()
}

/// BM25's idf, `ln((N - n_i + 0.5) / (n_i + 0.5))`. Negative when the term
/// is in more than half of the documents.
pub fn idf_bm25(index: &FrequencyIndex, term: TermId) -> Result<f64> {
    match index.doc_freq(term) {
        0 => Err(Error::ZeroDocumentFrequency(term)),
        n => Ok(idf_bm25_from_counts(index.num_docs(), n)),
    }
}

#[inline]
pub(crate) fn idf_bm25_from_counts(num_docs: usize, doc_freq: usize) -> f64 {
    let n = num_docs as f64;
    let df = doc_freq as f64;
    ((n - df + 0.5) / (df + 0.5)).ln()
}

/// Inverse category frequency, `ln(1 + C / c_i)`.
pub fn icf(stats: &ClassTermStats, term: TermId) -> Result<f64> {
    match stats.class_freq(term) {
        0 => Err(Error::ZeroClassFrequency(term)),
        c => Ok(icf_from_counts(stats.classes(), c)),
    }
}

#[inline]
fn icf_from_counts(classes: usize, class_freq: usize) -> f64 {
    (1.0 + classes as f64 / class_freq as f64).ln()
}

/// Applies `scheme` to `doc`.
///
/// Terms whose collection factor is zero (a term in every document under
/// idf) are dropped. Terms the collection has never seen have no idf or icf
/// and are dropped as well; they cannot match any collection document.
pub fn weigh(
    doc: &Document,
    scheme: WeightingScheme,
    index: &FrequencyIndex,
    stats: Option<&ClassTermStats>,
) -> Result<WeightedVector> {
    let stats = match (scheme.collection_factor, stats) {
        (CollectionFactor::Icf, None) => return Err(Error::MissingClassStats),
        (_, s) => s,
    };
    let entries = doc.iter().filter_map(|(term, freq)| {
        let local = match scheme.doc_factor {
            DocFactor::Raw => f64::from(freq),
            DocFactor::LogTf => tf_factor(freq),
        };
        let global = match scheme.collection_factor {
            CollectionFactor::None => 1.0,
            CollectionFactor::Idf => match index.doc_freq(term) {
                0 => return None,
                n => idf_from_counts(index.num_docs(), n),
            },
            CollectionFactor::Icf => {
                let stats = stats.expect("checked above");
                match stats.class_freq(term) {
                    0 => return None,
                    c => icf_from_counts(stats.classes(), c),
                }
            }
        };
        Some((term, local * global))
    });
    Ok(WeightedVector::from_sorted(entries))
}
