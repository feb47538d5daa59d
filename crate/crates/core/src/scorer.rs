//! Collections (subsets of a corpus with their own statistics) and scorers
//! that rank a collection against query documents.
//!
//! A [`Scorer`] precomputes whatever its measure needs per collection
//! document (weighted vectors and norms, BM25 length factors, a table of
//! Sp log terms) so that a query costs one merge over each candidate. Scores
//! are bit-identical to the pairwise functions in [`crate::measures`].

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::index::FrequencyIndex;
use crate::measures::{
    bm25_length_factor, bm25_shared, cosine_with_norms, jaccard, l2_norm, sp_summand, sp_with,
    weighted_jaccard, Measure, MeasureConfig,
};
use crate::weighting::{idf_bm25_from_counts, weigh, ClassTermStats, WeightedVector};

/// A view of a corpus restricted to `members`, with statistics computed over
/// those documents only.
#[derive(Debug, Clone)]
pub struct Collection<'c> {
    corpus: &'c Corpus,
    members: Vec<usize>,
    index: FrequencyIndex,
    class_stats: ClassTermStats,
}

impl<'c> Collection<'c> {
    /// Collection over the given corpus indices. Indices are sorted and
    /// deduplicated.
    pub fn new(corpus: &'c Corpus, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= corpus.len()) {
            return Err(Error::DocumentOutOfRange {
                index: bad,
                len: corpus.len(),
            });
        }
        let index = FrequencyIndex::build(members.iter().map(|&i| corpus.doc(i)), corpus.dims());
        let class_stats = ClassTermStats::build(
            members.iter().map(|&i| &corpus.docs()[i]),
            corpus.dims(),
            corpus.classes(),
        );
        Ok(Self {
            corpus,
            members,
            index,
            class_stats,
        })
    }

    pub fn full(corpus: &'c Corpus) -> Self {
        Self::new(corpus, (0..corpus.len()).collect()).expect("corpus is non-empty")
    }

    /// Replaces the computed index, e.g. with one loaded from disk. The
    /// index must describe the same documents.
    pub fn with_index(mut self, index: FrequencyIndex) -> Result<Self> {
        if index.num_docs() != self.members.len() || index.dims() != self.corpus.dims() {
            return Err(Error::IndexFormat(format!(
                "index covers {} documents over {} terms, collection has {} over {}",
                index.num_docs(),
                index.dims(),
                self.members.len(),
                self.corpus.dims()
            )));
        }
        self.index = index;
        Ok(self)
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    /// Corpus indices of the collection, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index(&self) -> &FrequencyIndex {
        &self.index
    }

    pub fn class_stats(&self) -> &ClassTermStats {
        &self.class_stats
    }
}

#[derive(Debug)]
enum Prepared {
    Weighted {
        vectors: Vec<WeightedVector>,
        norms: Vec<f64>,
    },
    Bm25 {
        idf: Vec<f64>,
        length_factors: Vec<f64>,
    },
    Jaccard,
    Sp {
        log_terms: Vec<f64>,
    },
}

/// Scores query documents against every member of a collection under one
/// measure configuration.
#[derive(Debug)]
pub struct Scorer<'a> {
    config: MeasureConfig,
    collection: &'a Collection<'a>,
    prepared: Prepared,
}

impl<'a> Scorer<'a> {
    pub fn new(config: MeasureConfig, collection: &'a Collection<'a>) -> Result<Self> {
        let corpus = collection.corpus();
        let index = collection.index();
        let stats = config
            .weighting
            .needs_class_stats()
            .then(|| collection.class_stats());
        let prepared = match config.measure {
            Measure::Cosine | Measure::WeightedJaccard => {
                let vectors = collection
                    .members()
                    .iter()
                    .map(|&i| weigh(corpus.doc(i), config.weighting, index, stats))
                    .collect::<Result<Vec<_>>>()?;
                let norms = vectors.iter().map(l2_norm).collect();
                Prepared::Weighted { vectors, norms }
            }
            Measure::Bm25 => {
                let avgdl = index.avgdl();
                if avgdl <= 0.0 {
                    return Err(Error::ZeroAverageLength);
                }
                let n = index.num_docs();
                let idf = (0..index.dims())
                    .map(|t| {
                        idf_bm25_from_counts(n, index.doc_freq(crate::corpus::TermId(t as u32)))
                    })
                    .collect();
                let length_factors = collection
                    .members()
                    .iter()
                    .map(|&i| bm25_length_factor(corpus.doc(i).length(), avgdl, config.bm25))
                    .collect();
                Prepared::Bm25 {
                    idf,
                    length_factors,
                }
            }
            Measure::Jaccard => Prepared::Jaccard,
            Measure::Sp => {
                let n = index.num_docs();
                Prepared::Sp {
                    log_terms: (0..=n).map(|c| sp_summand(n, c)).collect(),
                }
            }
        };
        Ok(Self {
            config,
            collection,
            prepared,
        })
    }

    pub fn config(&self) -> &MeasureConfig {
        &self.config
    }

    pub fn collection(&self) -> &'a Collection<'a> {
        self.collection
    }

    /// Scores of `query` against every member, aligned with
    /// [`Collection::members`].
    pub fn score_all(&self, query: &Document) -> Result<Vec<f64>> {
        let collection = self.collection;
        let corpus = collection.corpus();
        let index = collection.index();
        let members = collection.members();
        let scores = match &self.prepared {
            Prepared::Weighted { vectors, norms } => {
                let stats = self
                    .config
                    .weighting
                    .needs_class_stats()
                    .then(|| collection.class_stats());
                let q = weigh(query, self.config.weighting, index, stats)?;
                if self.config.measure == Measure::Cosine {
                    let nq = l2_norm(&q);
                    vectors
                        .iter()
                        .zip(norms)
                        .map(|(v, &nv)| cosine_with_norms(&q, v, nq, nv))
                        .collect()
                } else {
                    vectors.iter().map(|v| weighted_jaccard(&q, v)).collect()
                }
            }
            Prepared::Bm25 {
                idf,
                length_factors,
            } => {
                let params = self.config.bm25;
                let kq = bm25_length_factor(query.length(), index.avgdl(), params);
                let n = index.num_docs();
                let idf_of = |t: crate::corpus::TermId| {
                    idf.get(t.index())
                        .copied()
                        .unwrap_or_else(|| idf_bm25_from_counts(n, 0))
                };
                members
                    .iter()
                    .zip(length_factors)
                    .map(|(&i, &kd)| bm25_shared(query, kq, corpus.doc(i), kd, params.a, idf_of))
                    .collect()
            }
            Prepared::Jaccard => members
                .iter()
                .map(|&i| jaccard(query, corpus.doc(i)))
                .collect(),
            Prepared::Sp { log_terms } => members
                .iter()
                .map(|&i| sp_with(query, corpus.doc(i), index, |c| log_terms[c]))
                .collect(),
        };
        Ok(scores)
    }
}
