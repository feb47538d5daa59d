//! Shared fixtures for the criterion benchmarks.

use docsim::synthetic::skewed_corpus;
use docsim::Corpus;

/// Text-like corpus of `num_docs` documents over a 20,000-term dictionary,
/// about 80 distinct terms each.
pub fn text_like(num_docs: usize) -> Corpus {
    skewed_corpus(num_docs, 20_000, 100, 4, 42)
}

/// Evenly spaced document positions to use as queries.
pub fn query_ids(corpus: &Corpus, count: usize) -> Vec<usize> {
    let step = (corpus.len() / count).max(1);
    (0..corpus.len()).step_by(step).take(count).collect()
}
