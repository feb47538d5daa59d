//! Small hand-built corpora and seeded random generators used by tests,
//! benchmarks and the acceptance suite.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, LabeledDocument, TermId};

fn doc(pairs: &[(u32, u32)]) -> Document {
    Document::new(pairs.iter().map(|&(t, c)| (TermId(t), c))).expect("fixture is canonical")
}

/// Four documents over terms 1..=3 (id 0 unused), labels `0, 0, 1, 1`:
///
/// ```text
/// d1 = {t1:1, t2:2}
/// d2 = {t1:1, t3:1}
/// d3 = {t2:1}
/// d4 = {t1:2, t2:2, t3:3}
/// ```
pub fn toy_corpus() -> Corpus {
    let docs = vec![
        LabeledDocument::new(doc(&[(1, 1), (2, 2)]), 0),
        LabeledDocument::new(doc(&[(1, 1), (3, 1)]), 0),
        LabeledDocument::new(doc(&[(2, 1)]), 1),
        LabeledDocument::new(doc(&[(1, 2), (2, 2), (3, 3)]), 1),
    ];
    Corpus::new(docs, None).expect("fixture is valid")
}

/// A collection plus a query and two candidate documents `x` and `y`
/// (indices into the collection) where `y` should rank above `x`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub collection: Corpus,
    pub query: Document,
    pub x: usize,
    pub y: usize,
}

/// Rare-versus-frequent term scenario with `N = 4`.
///
/// Term `g` appears once in half of the documents; term `h` appears in every
/// document, once everywhere except in `y` where it appears ten times. The
/// query equals `y`. Under idf weighting `h` has weight 0, so `x` and `y`
/// look identical to the query.
#[derive(Debug, Clone)]
pub struct IdfScenario {
    pub collection: Corpus,
    pub query: Document,
    pub x: usize,
    pub y: usize,
    pub term_g: TermId,
    pub term_h: TermId,
}

pub fn idf_scenario() -> IdfScenario {
    let (g, h) = (0, 1);
    let docs = vec![
        LabeledDocument::new(doc(&[(g, 1), (h, 1)]), 0),
        LabeledDocument::new(doc(&[(g, 1), (h, 10)]), 0),
        LabeledDocument::new(doc(&[(h, 1)]), 0),
        LabeledDocument::new(doc(&[(h, 1)]), 0),
    ];
    IdfScenario {
        collection: Corpus::new(docs, None).expect("fixture is valid"),
        query: doc(&[(g, 1), (h, 10)]),
        x: 0,
        y: 1,
        term_g: TermId(g),
        term_h: TermId(h),
    }
}

/// Term-frequency scenario: `q_r = y_r = 1`, `x_r = 10`, everything else
/// equal between `x` and `y`.
pub fn tf_scenario() -> Scenario {
    let (r, s) = (0, 1);
    let docs = vec![
        LabeledDocument::new(doc(&[(r, 10), (s, 1)]), 0),
        LabeledDocument::new(doc(&[(r, 1), (s, 1)]), 0),
        LabeledDocument::new(doc(&[(r, 1)]), 0),
        LabeledDocument::new(doc(&[(r, 3), (s, 2)]), 0),
        LabeledDocument::new(doc(&[(s, 1)]), 0),
    ];
    Scenario {
        collection: Corpus::new(docs, None).expect("fixture is valid"),
        query: doc(&[(r, 1), (s, 1)]),
        x: 0,
        y: 1,
    }
}

/// Parameters for [`random_corpus`].
#[derive(Debug, Clone, Copy)]
pub struct RandomCorpusSpec {
    pub num_docs: usize,
    pub dims: usize,
    /// Frequencies are drawn uniformly from `1..=max_freq`.
    pub max_freq: u32,
    /// Probability that a given term occurs in a given document.
    pub density: f64,
    pub classes: u32,
}

/// Uniform random corpus; each term is present independently with
/// probability `density`. Documents may be empty.
pub fn random_corpus(spec: RandomCorpusSpec, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..spec.num_docs)
        .map(|_| {
            let mut pairs = Vec::new();
            for t in 0..spec.dims as u32 {
                if rng.random_bool(spec.density) {
                    pairs.push((TermId(t), rng.random_range(1..=spec.max_freq)));
                }
            }
            let label = rng.random_range(0..spec.classes.max(1));
            LabeledDocument::new(Document::new(pairs).expect("distinct terms"), label)
        })
        .collect();
    Corpus::new(docs, Some(spec.dims)).expect("num_docs >= 1")
}

/// Documents with skewed term popularity, closer to text than
/// [`random_corpus`]: each document draws about `terms_per_doc` distinct
/// terms with index `floor(dims * u^3)` and frequencies `1 + Geometric(0.5)`.
pub fn skewed_corpus(
    num_docs: usize,
    dims: usize,
    terms_per_doc: usize,
    classes: u32,
    seed: u64,
) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..num_docs)
        .map(|_| {
            let mut terms: Vec<u32> = (0..terms_per_doc)
                .map(|_| {
                    let u: f64 = rng.random();
                    ((dims as f64 * u * u * u) as u32).min(dims as u32 - 1)
                })
                .collect();
            terms.sort_unstable();
            terms.dedup();
            let pairs: Vec<_> = terms
                .into_iter()
                .map(|t| {
                    let mut freq = 1;
                    while freq < 50 && rng.random_bool(0.5) {
                        freq += 1;
                    }
                    (TermId(t), freq)
                })
                .collect();
            let label = rng.random_range(0..classes.max(1));
            LabeledDocument::new(Document::new(pairs).expect("deduplicated"), label)
        })
        .collect();
    Corpus::new(docs, Some(dims)).expect("num_docs >= 1")
}

/// Two classes with disjoint vocabularies of six terms each. Every document
/// holds four of its class's six terms, so any two documents of the same
/// class share at least two terms while documents of different classes share
/// none.
pub fn two_cluster_corpus(docs_per_class: usize, seed: u64) -> Corpus {
    const VOCAB: u32 = 6;
    const PICK: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(2 * docs_per_class);
    for i in 0..2 * docs_per_class {
        // interleave labels so folds see both classes
        let label = (i % 2) as u32;
        let base = label * VOCAB;
        let mut terms: Vec<u32> = (0..VOCAB).collect();
        for k in 0..PICK {
            let j = rng.random_range(k..terms.len());
            terms.swap(k, j);
        }
        let pairs: Vec<_> = terms[..PICK]
            .iter()
            .map(|&t| (TermId(base + t), rng.random_range(1..=5)))
            .collect();
        docs.push(LabeledDocument::new(
            Document::new(pairs).expect("distinct terms"),
            label,
        ));
    }
    Corpus::new(docs, None).expect("docs_per_class >= 1")
}
