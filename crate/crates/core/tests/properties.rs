use std::collections::BTreeMap;

use docsim::eval::{select_top_k, Ranked};
use docsim::{
    bm25, cosine, jaccard, sp, top_k, weigh, weighted_jaccard, Bm25Params, Collection, Corpus,
    Document, FoldAssignment, FrequencyIndex, LabeledDocument, Measure, MeasureConfig, Scorer,
    TermId, WeightingScheme,
};
use proptest::prelude::*;

fn document(max_term: u32, max_freq: u32) -> impl Strategy<Value = Document> {
    prop::collection::btree_map(0..max_term, 1..=max_freq, 0..8).prop_map(
        |m: BTreeMap<u32, u32>| Document::new(m.into_iter().map(|(t, c)| (TermId(t), c))).unwrap(),
    )
}

fn corpus(max_docs: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec((document(12, 10), 0u32..3), 1..max_docs).prop_map(|docs| {
        let docs = docs
            .into_iter()
            .map(|(d, label)| LabeledDocument::new(d, label))
            .collect();
        Corpus::new(docs, Some(12)).unwrap()
    })
}

proptest! {
    #[test]
    fn range_count_matches_scan(c in corpus(30), term in 0u32..12, lo in 1u32..12, span in 0u32..12) {
        let index = FrequencyIndex::from_corpus(&c);
        let hi = lo + span;
        let expected = c.documents().filter(|d| (lo..=hi).contains(&d.frequency(TermId(term)))).count();
        prop_assert_eq!(index.range_count(TermId(term), lo, hi), expected);
    }

    #[test]
    fn cumulative_arrays_are_consistent(c in corpus(30)) {
        let index = FrequencyIndex::from_corpus(&c);
        let n = c.len();
        let total: u64 = c.documents().map(Document::length).sum();
        prop_assert_eq!(index.avgdl(), total as f64 / n as f64);
        for t in 0..c.dims() as u32 {
            let f = index.cumulative(TermId(t)).unwrap();
            prop_assert!(f.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(*f.last().unwrap() as usize, n);
            prop_assert_eq!(n - f[0] as usize, index.doc_freq(TermId(t)));
        }
    }

    #[test]
    fn binary_index_has_unit_maxima(c in corpus(30)) {
        let index = FrequencyIndex::from_corpus(&c.to_binary());
        for t in 0..c.dims() as u32 {
            let t = TermId(t);
            prop_assert_eq!(index.max_freq(t), u32::from(index.doc_freq(t) > 0));
        }
    }

    #[test]
    fn index_survives_persistence(c in corpus(20)) {
        let index = FrequencyIndex::from_corpus(&c);
        let mut bytes = Vec::new();
        index.write_to(&mut bytes).unwrap();
        prop_assert_eq!(FrequencyIndex::read_from(bytes.as_slice()).unwrap(), index);
    }

    #[test]
    fn corpus_text_round_trips(c in corpus(20)) {
        let mut text = Vec::new();
        c.write(&mut text).unwrap();
        let back = Corpus::parse(text.as_slice(), Some(c.dims())).unwrap();
        prop_assert_eq!(back.docs(), c.docs());
    }

    #[test]
    fn weights_are_positive_and_cover_known_terms(c in corpus(20), q in document(14, 10)) {
        let index = FrequencyIndex::from_corpus(&c);
        let stats = docsim::class_term_stats(&c);
        for scheme in WeightingScheme::ALL {
            let w = weigh(&q, scheme, &index, Some(&stats)).unwrap();
            prop_assert!(w.entries().iter().all(|&(_, v)| v > 0.0 && v.is_finite()));
            prop_assert!(w.entries().windows(2).all(|p| p[0].0 < p[1].0));
            for (t, _) in w.entries() {
                prop_assert!(q.frequency(*t) > 0);
            }
        }
    }

    #[test]
    fn measures_are_symmetric_and_bounded(c in corpus(20), i in 0usize..20, j in 0usize..20) {
        let (i, j) = (i % c.len(), j % c.len());
        let (x, y) = (c.doc(i), c.doc(j));
        let index = FrequencyIndex::from_corpus(&c);
        let params = Bm25Params::default();
        prop_assert_eq!(sp(x, y, &index), sp(y, x, &index));
        prop_assert_eq!(jaccard(x, y), jaccard(y, x));
        if index.avgdl() > 0.0 {
            prop_assert_eq!(bm25(x, y, &index, params).unwrap(), bm25(y, x, &index, params).unwrap());
        } else {
            prop_assert!(matches!(bm25(x, y, &index, params), Err(docsim::Error::ZeroAverageLength)));
        }
        prop_assert!((0.0..=1.0).contains(&jaccard(x, y)));
        prop_assert!(sp(x, y, &index) >= 0.0);
        for scheme in WeightingScheme::ALL {
            if scheme.needs_class_stats() {
                continue;
            }
            let wx = weigh(x, scheme, &index, None).unwrap();
            let wy = weigh(y, scheme, &index, None).unwrap();
            let cos = cosine(&wx, &wy);
            prop_assert!((cos - cosine(&wy, &wx)).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&cos));
            prop_assert_eq!(weighted_jaccard(&wx, &wy), weighted_jaccard(&wy, &wx));
            prop_assert!((0.0..=1.0).contains(&weighted_jaccard(&wx, &wy)));
        }
    }

    #[test]
    fn top_k_agrees_with_full_sort(c in corpus(25), q in 0usize..25, k in 1usize..30) {
        let q = q % c.len();
        let collection = Collection::full(&c);
        let scorer = Scorer::new(MeasureConfig::plain(Measure::Sp), &collection).unwrap();
        let Ok(ranked) = top_k(&scorer, c.doc(q), k, Some(q)) else {
            prop_assert_eq!(c.len(), 1);
            return Ok(());
        };
        let mut all: Vec<(usize, f64)> = (0..c.len())
            .filter(|&d| d != q)
            .map(|d| (d, sp(c.doc(q), c.doc(d), collection.index())))
            .collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        all.truncate(k);
        let got: Vec<(usize, f64)> = ranked.entries().iter().map(|r| (r.doc, r.score)).collect();
        prop_assert_eq!(got, all);
    }

    #[test]
    fn selection_is_a_prefix_of_the_sorted_order(scores in prop::collection::vec(0u8..5, 1..40), k in 1usize..45) {
        let candidates: Vec<Ranked> = scores
            .iter()
            .enumerate()
            .map(|(doc, &s)| Ranked { doc, score: f64::from(s) })
            .collect();
        let full = select_top_k(candidates.clone(), candidates.len());
        let top = select_top_k(candidates, k);
        prop_assert_eq!(top.entries(), &full.entries()[..k.min(full.len())]);
    }

    #[test]
    fn folds_partition_the_corpus(n in 2usize..60, folds in 2usize..10, seed: u64) {
        prop_assume!(n >= folds);
        let a = FoldAssignment::new(n, folds, seed).unwrap();
        let mut seen = vec![0; n];
        for f in 0..folds {
            let test = a.test_indices(f);
            let train = a.train_indices(f);
            prop_assert!(!test.is_empty());
            prop_assert_eq!(test.len() + train.len(), n);
            prop_assert!(test.iter().all(|d| !train.contains(d)));
            for d in test {
                seen[d] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
    }
}

#[test]
fn training_statistics_ignore_held_out_documents() {
    let c = Corpus::parse_str("0 0:1 1:1\n0 0:2\n1 1:3\n1 2:7 1:1\n", None).unwrap();
    let folds = FoldAssignment::new(c.len(), 2, 5).unwrap();
    for f in 0..2 {
        let train = folds.train_indices(f);
        let collection = Collection::new(&c, train.clone()).unwrap();
        let only_train = Corpus::new(
            train.iter().map(|&i| c.docs()[i].clone()).collect(),
            Some(c.dims()),
        )
        .unwrap();
        assert_eq!(
            collection.index(),
            &FrequencyIndex::from_corpus(&only_train)
        );
        for t in 0..c.dims() as u32 {
            assert_eq!(
                collection.class_stats().class_freq(TermId(t)),
                docsim::class_term_stats(&only_train).class_freq(TermId(t))
            );
        }
    }
}
