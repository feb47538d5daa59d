//! Bag-of-words inter-document similarity.
//!
//! Documents are sparse term-frequency vectors over integer term ids. The
//! crate provides five similarity measures (cosine, BM25, Jaccard, weighted
//! Jaccard and the data-dependent Sp measure), the usual tf/idf/icf term
//! weighting, a cumulative-frequency index that answers "how many documents
//! have a term frequency in `[lo, hi]`" in constant time, and a
//! cross-validation harness for query-by-example retrieval and kNN
//! classification.
//!
//! ```
//! use docsim::{Corpus, FrequencyIndex, sp};
//!
//! let corpus = Corpus::parse_str("0 1:1 2:2\n0 1:1 3:1\n1 2:1\n1 1:2 2:2 3:3\n", None).unwrap();
//! let index = FrequencyIndex::from_corpus(&corpus);
//! let s = sp(corpus.doc(0), corpus.doc(3), &index);
//! assert!((s - ((4.0f64 / 3.0).ln() + 2f64.ln()) / 3.0).abs() < 1e-12);
//! ```

pub mod corpus;
pub mod error;
pub mod eval;
pub mod index;
pub mod measures;
pub mod presets;
pub mod scorer;
pub mod synthetic;
pub mod weighting;

pub use corpus::{Corpus, Document, LabeledDocument, TermId};
pub use error::{Error, Result};
pub use eval::{
    cross_validate, knn_classify, map_at_k, precision_at_k, top_k, EvalReport, FoldAssignment,
    RankedList, Task, Verdict,
};
pub use index::FrequencyIndex;
pub use measures::{
    bm25, cosine, jaccard, sp, weighted_jaccard, Bm25Params, Measure, MeasureConfig,
};
pub use presets::Representation;
pub use scorer::{Collection, Scorer};
pub use weighting::{
    class_term_stats, icf, idf, idf_bm25, tf_factor, weigh, ClassTermStats, WeightedVector,
    WeightingScheme,
};
