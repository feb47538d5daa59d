//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always visible; exits non-zero on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use docsim::presets::{classification, retrieval};
use docsim::synthetic::{
    idf_scenario, random_corpus, skewed_corpus, tf_scenario, two_cluster_corpus, RandomCorpusSpec,
};
use docsim::{
    bm25, cosine, cross_validate, idf, idf_bm25, jaccard, sp, top_k, weigh, weighted_jaccard,
    Bm25Params, Collection, Corpus, Document, FoldAssignment, FrequencyIndex, LabeledDocument,
    Measure, MeasureConfig, Representation, Scorer, Task, TermId, WeightingScheme,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-12;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Outcome::Pass(detail.into())
    } else {
        Outcome::Fail(detail.into())
    }
}

fn doc(pairs: &[(u32, u32)]) -> Document {
    Document::new(pairs.iter().map(|&(t, c)| (TermId(t), c))).unwrap()
}

fn corpus_of(docs: Vec<Document>) -> Corpus {
    Corpus::new(
        docs.into_iter()
            .map(|d| LabeledDocument::new(d, 0))
            .collect(),
        None,
    )
    .unwrap()
}

fn range_count_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0usize;
    for seed in 0..120 {
        let spec = RandomCorpusSpec {
            num_docs: rng.random_range(1..=200),
            dims: rng.random_range(1..=50),
            max_freq: rng.random_range(1..=10),
            density: rng.random_range(0.05..0.9),
            classes: 1,
        };
        let corpus = random_corpus(spec, seed);
        let index = FrequencyIndex::from_corpus(&corpus);
        for t in 0..corpus.dims() as u32 {
            let term = TermId(t);
            let m = index.max_freq(term);
            for lo in 1..=m + 2 {
                for hi in lo..=m + 2 {
                    let brute = corpus
                        .documents()
                        .filter(|d| (lo..=hi).contains(&d.frequency(term)))
                        .count();
                    if index.range_count(term, lo, hi) != brute {
                        return Outcome::Fail(format!("seed {seed} {term} [{lo}, {hi}]"));
                    }
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(10),
        format!("120 corpora, {checked} ranges, {elapsed:.2?}"),
    )
}

fn jaccard_equivalence() -> Outcome {
    let corpus = random_corpus(
        RandomCorpusSpec {
            num_docs: 50,
            dims: 40,
            max_freq: 1,
            density: 0.2,
            classes: 1,
        },
        2,
    );
    let index = FrequencyIndex::from_corpus(&corpus);
    let vectors: Vec<_> = corpus
        .documents()
        .map(|d| weigh(d, WeightingScheme::IDENTITY, &index, None).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for i in 0..corpus.len() {
        for j in 0..corpus.len() {
            let diff = (weighted_jaccard(&vectors[i], &vectors[j])
                - jaccard(corpus.doc(i), corpus.doc(j)))
            .abs();
            worst = worst.max(diff);
        }
    }
    check(worst <= EPS, format!("2500 pairs, max deviation {worst:e}"))
}

fn sp_binary_is_idf() -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for seed in 0..20 {
        let corpus = random_corpus(
            RandomCorpusSpec {
                num_docs: 60,
                dims: 25,
                max_freq: 1,
                density: 0.25,
                classes: 1,
            },
            100 + seed,
        );
        let index = FrequencyIndex::from_corpus(&corpus);
        for t in 0..corpus.dims() as u32 {
            let term = TermId(t);
            if index.doc_freq(term) == 0 {
                continue;
            }
            let single = doc(&[(t, 1)]);
            worst = worst.max((sp(&single, &single, &index) - idf(&index, term).unwrap()).abs());
        }
        for i in 0..corpus.len() {
            for j in i..corpus.len() {
                let (x, y) = (corpus.doc(i), corpus.doc(j));
                let (tx, ty) = (x.term_set(), y.term_set());
                let union = tx.union(&ty).count();
                if union == 0 {
                    continue;
                }
                let expected: f64 = tx
                    .intersection(&ty)
                    .map(|&t| idf(&index, t).unwrap())
                    .sum::<f64>()
                    / union as f64;
                worst = worst.max((sp(x, y, &index) - expected).abs());
                pairs += 1;
            }
        }
    }
    check(
        worst <= EPS,
        format!("{pairs} pairs, max deviation {worst:e}"),
    )
}

fn sp_matrix(corpus: &Corpus) -> Vec<f64> {
    let index = FrequencyIndex::from_corpus(corpus);
    let mut out = Vec::with_capacity(corpus.len() * corpus.len());
    for x in corpus.documents() {
        for y in corpus.documents() {
            out.push(sp(x, y, &index));
        }
    }
    out
}

fn sp_scaling_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let corpus = random_corpus(
            RandomCorpusSpec {
                num_docs: 40,
                dims: 15,
                max_freq: 10,
                density: 0.35,
                classes: 1,
            },
            200 + seed,
        );
        // per term, a strictly increasing map 1..=10 -> positive integers
        let maps: Vec<Vec<u32>> = (0..corpus.dims())
            .map(|_| {
                let mut v = 0;
                (0..=10)
                    .map(|_| {
                        v += rng.random_range(1..=7);
                        v
                    })
                    .collect()
            })
            .collect();
        let scaled = corpus.map_frequencies(|t, c| maps[t.index()][c as usize]);
        for (a, b) in sp_matrix(&corpus).iter().zip(sp_matrix(&scaled)) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= EPS, format!("10 corpora, max deviation {worst:e}"))
}

fn sp_self_dominance() -> Outcome {
    let (mut pairs, mut ties, mut violations) = (0, 0, 0);
    for seed in 0..10 {
        let corpus = random_corpus(
            RandomCorpusSpec {
                num_docs: 50,
                dims: 20,
                max_freq: 5,
                density: 0.3,
                classes: 1,
            },
            300 + seed,
        );
        let index = FrequencyIndex::from_corpus(&corpus);
        for x in corpus.documents() {
            let own = sp(x, x, &index);
            for y in corpus.documents() {
                if x == y {
                    continue;
                }
                let other = sp(x, y, &index);
                pairs += 1;
                if other > own {
                    violations += 1;
                } else if other == own {
                    ties += 1;
                    if ties <= 3 {
                        println!("    tie: sp(x,x) = sp(x,y) = {own} for x = {x:?}, y = {y:?}");
                    }
                }
            }
        }
    }
    println!(
        "    strict dominance held on {} of {pairs} pairs ({ties} ties)",
        pairs - ties
    );
    check(
        violations == 0,
        format!("{pairs} pairs, {violations} violations, {ties} ties"),
    )
}

fn scenarios() -> Outcome {
    let start = Instant::now();
    let s = idf_scenario();
    let index = FrequencyIndex::from_corpus(&s.collection);
    let (x, y) = (s.collection.doc(s.x), s.collection.doc(s.y));
    let sp_x = sp(&s.query, x, &index);
    let sp_y = sp(&s.query, y, &index);
    let cosine_of = |d: &Document| {
        cosine(
            &weigh(&s.query, WeightingScheme::TF_IDF, &index, None).unwrap(),
            &weigh(d, WeightingScheme::TF_IDF, &index, None).unwrap(),
        )
    };
    let (cos_x, cos_y) = (cosine_of(x), cosine_of(y));

    let t = tf_scenario();
    let tf_index = FrequencyIndex::from_corpus(&t.collection);
    let tf_x = sp(&t.query, t.collection.doc(t.x), &tf_index);
    let tf_y = sp(&t.query, t.collection.doc(t.y), &tf_index);
    let elapsed = start.elapsed();

    check(
        sp_y > sp_x && (cos_x - cos_y).abs() <= EPS && tf_y > tf_x && elapsed < Duration::from_secs(1),
        format!(
            "idf scenario sp {sp_y:.4} > {sp_x:.4}, cos {cos_y:.4} = {cos_x:.4}; tf scenario sp {tf_y:.4} > {tf_x:.4}"
        ),
    )
}

fn bm25_idf_sign() -> Outcome {
    for n in 2..=20usize {
        for df in 1..=n {
            let docs = (0..n)
                .map(|i| {
                    if i < df {
                        doc(&[(0, 1)])
                    } else {
                        doc(&[(1, 1)])
                    }
                })
                .collect();
            let index = FrequencyIndex::from_corpus(&corpus_of(docs));
            let v = idf_bm25(&index, TermId(0)).unwrap();
            let ok = if 2 * df > n {
                v < 0.0
            } else if 2 * df == n {
                v == 0.0
            } else {
                v > 0.0
            };
            if !ok {
                return Outcome::Fail(format!("N = {n}, n_i = {df}: {v}"));
            }
        }
    }
    Outcome::Pass("N = 2..20, every n_i".into())
}

fn bm25_witness() -> Outcome {
    // x's second term sits in most of the collection, so its idf is negative
    // and repeating it drags x's self-score down
    let x = doc(&[(0, 1), (1, 9)]);
    let y = doc(&[(0, 5)]);
    let mut docs = vec![x.clone(), y.clone()];
    docs.extend((0..4).map(|_| doc(&[(1, 1)])));
    let index = FrequencyIndex::from_corpus(&corpus_of(docs));
    let params = Bm25Params::default();
    let xy = bm25(&x, &y, &index, params).unwrap();
    let xx = bm25(&x, &x, &index, params).unwrap();
    check(
        xy > xx,
        format!("bm25(x,y) = {xy:.4} > bm25(x,x) = {xx:.4}"),
    )
}

/// Independent evaluator: dense vectors, statistics by scanning, full sort.
mod reference {
    use super::*;

    pub struct Stats {
        pub n: usize,
        pub df: Vec<usize>,
        pub cf: Vec<usize>,
        pub classes: usize,
        pub avgdl: f64,
    }

    pub fn stats(corpus: &Corpus, train: &[usize]) -> Stats {
        let m = corpus.dims();
        let mut df = vec![0; m];
        let mut seen = vec![vec![false; corpus.classes()]; m];
        let mut total = 0u64;
        for &i in train {
            for (t, c) in corpus.doc(i).iter() {
                df[t.index()] += 1;
                seen[t.index()][corpus.label(i) as usize] = true;
                total += u64::from(c);
            }
        }
        Stats {
            n: train.len(),
            df,
            cf: seen
                .iter()
                .map(|s| s.iter().filter(|&&b| b).count())
                .collect(),
            classes: corpus.classes(),
            avgdl: total as f64 / train.len() as f64,
        }
    }

    fn dense(d: &Document, m: usize) -> Vec<u32> {
        let mut v = vec![0; m];
        for (t, c) in d.iter() {
            v[t.index()] = c;
        }
        v
    }

    fn weights(d: &[u32], scheme: WeightingScheme, s: &Stats) -> Vec<f64> {
        let (local, global) = match scheme.name() {
            "none" => (false, "none"),
            "tf" => (true, "none"),
            "idf" => (false, "idf"),
            "tf-idf" => (true, "idf"),
            "icf" => (false, "icf"),
            "tf-icf" => (true, "icf"),
            other => panic!("unexpected scheme {other}"),
        };
        d.iter()
            .enumerate()
            .map(|(t, &c)| {
                if c == 0 {
                    return 0.0;
                }
                let l = if local {
                    1.0 + f64::from(c).ln()
                } else {
                    f64::from(c)
                };
                let g = match global {
                    "idf" if s.df[t] == 0 => 0.0,
                    "idf" => (s.n as f64 / s.df[t] as f64).ln(),
                    "icf" if s.cf[t] == 0 => 0.0,
                    "icf" => (1.0 + s.classes as f64 / s.cf[t] as f64).ln(),
                    _ => 1.0,
                };
                l * g
            })
            .collect()
    }

    pub fn score(
        config: &MeasureConfig,
        q: &Document,
        d: &Document,
        corpus: &Corpus,
        train: &[usize],
        s: &Stats,
    ) -> f64 {
        let m = corpus.dims();
        let (qv, dv) = (dense(q, m), dense(d, m));
        match config.measure {
            Measure::Cosine => {
                let (a, b) = (
                    weights(&qv, config.weighting, s),
                    weights(&dv, config.weighting, s),
                );
                let na = a.iter().map(|w| w * w).sum::<f64>().sqrt();
                let nb = b.iter().map(|w| w * w).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    return 0.0;
                }
                let mut dot = 0.0;
                for t in 0..m {
                    if a[t] != 0.0 && b[t] != 0.0 {
                        dot += a[t] * b[t];
                    }
                }
                dot / (na * nb)
            }
            Measure::WeightedJaccard => {
                let (a, b) = (
                    weights(&qv, config.weighting, s),
                    weights(&dv, config.weighting, s),
                );
                let (mut lo, mut hi) = (0.0, 0.0);
                for t in 0..m {
                    match (a[t] > 0.0, b[t] > 0.0) {
                        (true, true) => {
                            lo += a[t].min(b[t]);
                            hi += a[t].max(b[t]);
                        }
                        (true, false) => hi += a[t],
                        (false, true) => hi += b[t],
                        (false, false) => {}
                    }
                }
                if hi == 0.0 {
                    0.0
                } else {
                    lo / hi
                }
            }
            Measure::Jaccard => {
                let shared = (0..m).filter(|&t| qv[t] > 0 && dv[t] > 0).count();
                let union = (0..m).filter(|&t| qv[t] > 0 || dv[t] > 0).count();
                if union == 0 {
                    0.0
                } else {
                    shared as f64 / union as f64
                }
            }
            Measure::Bm25 => {
                let (a, b) = (config.bm25.a, config.bm25.b);
                let k = |dl: u64| a * (1.0 - b + b * (dl as f64 / s.avgdl));
                let (kq, kd) = (k(q.length()), k(d.length()));
                let sat = |v: u32, k: f64| f64::from(v) * (a + 1.0) / (f64::from(v) + k);
                let mut sum = 0.0;
                for t in 0..m {
                    if qv[t] > 0 && dv[t] > 0 {
                        let n = s.n as f64;
                        let df = s.df[t] as f64;
                        let w = ((n - df + 0.5) / (df + 0.5)).ln();
                        sum += w * (sat(qv[t], kq) * sat(dv[t], kd));
                    }
                }
                sum
            }
            Measure::Sp => {
                let mut sum = 0.0;
                let mut union = 0;
                for t in 0..m {
                    if qv[t] > 0 || dv[t] > 0 {
                        union += 1;
                    }
                    if qv[t] > 0 && dv[t] > 0 {
                        let (lo, hi) = (qv[t].min(dv[t]), qv[t].max(dv[t]));
                        let count = train
                            .iter()
                            .filter(|&&i| {
                                (lo..=hi).contains(&corpus.doc(i).frequency(TermId(t as u32)))
                            })
                            .count();
                        sum += (s.n as f64 / count.max(1) as f64).ln();
                    }
                }
                if union == 0 {
                    0.0
                } else {
                    sum / union as f64
                }
            }
        }
    }

    /// One value per fold.
    pub fn evaluate(
        corpus: &Corpus,
        config: &MeasureConfig,
        task: Task,
        k: usize,
        folds: &FoldAssignment,
    ) -> Vec<f64> {
        (0..folds.folds())
            .map(|f| {
                let train = folds.train_indices(f);
                let test = folds.test_indices(f);
                let s = stats(corpus, &train);
                let mut per_query = Vec::new();
                for &q in &test {
                    let mut ranked: Vec<(usize, f64)> = train
                        .iter()
                        .map(|&d| {
                            (
                                d,
                                score(config, corpus.doc(q), corpus.doc(d), corpus, &train, &s),
                            )
                        })
                        .collect();
                    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                    ranked.truncate(k);
                    let value = match task {
                        Task::Retrieval => {
                            let mut hits = 0;
                            let mut precisions = Vec::new();
                            for (i, &(d, _)) in ranked.iter().enumerate() {
                                hits += usize::from(corpus.label(d) == corpus.label(q));
                                precisions.push(hits as f64 / (i + 1) as f64);
                            }
                            precisions.iter().sum::<f64>() / precisions.len() as f64
                        }
                        Task::Classification => {
                            let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
                            for &(d, _) in &ranked {
                                *votes.entry(corpus.label(d)).or_default() += 1;
                            }
                            let best = *votes.values().max().unwrap();
                            let predicted = ranked
                                .iter()
                                .map(|&(d, _)| corpus.label(d))
                                .find(|l| votes[l] == best)
                                .unwrap();
                            f64::from(u8::from(predicted == corpus.label(q)))
                        }
                    };
                    per_query.push(value);
                }
                per_query.iter().sum::<f64>() / per_query.len() as f64
            })
            .collect()
    }
}

fn pipeline_oracle() -> Outcome {
    let base = random_corpus(
        RandomCorpusSpec {
            num_docs: 90,
            dims: 30,
            max_freq: 6,
            density: 0.15,
            classes: 3,
        },
        9,
    );
    let folds = FoldAssignment::new(base.len(), 10, 17).unwrap();
    let mut compared = 0;
    for rep in [Representation::Tf, Representation::Binary] {
        let corpus = rep.apply(base.clone());
        let configs = classification(rep);
        for (task, k) in [(Task::Retrieval, 25), (Task::Classification, 5)] {
            let report = cross_validate(&corpus, &configs, task, k, &folds).unwrap();
            for (config, result) in configs.iter().zip(&report.results) {
                let expected = reference::evaluate(&corpus, config, task, k, &folds);
                let same = expected.len() == result.runs.len()
                    && expected
                        .iter()
                        .zip(&result.runs)
                        .all(|(a, b)| a.to_bits() == b.to_bits());
                if !same {
                    return Outcome::Fail(format!(
                        "{} {rep} {task:?}: {:?} vs reference {expected:?}",
                        config.label(),
                        result.runs
                    ));
                }
                compared += 1;
            }
        }
    }

    let clusters = two_cluster_corpus(40, 21);
    let folds = FoldAssignment::new(clusters.len(), 10, 3).unwrap();
    for rep in [Representation::Tf, Representation::Binary] {
        let corpus = rep.apply(clusters.clone());
        let configs = retrieval(rep);
        for (task, k) in [(Task::Retrieval, 25), (Task::Classification, 5)] {
            let report = cross_validate(&corpus, &configs, task, k, &folds).unwrap();
            if let Some(r) = report
                .results
                .iter()
                .find(|r| r.runs.iter().any(|&v| v != 1.0))
            {
                return Outcome::Fail(format!(
                    "two clusters, {rep} {task:?} {}: {:?}",
                    r.label, r.runs
                ));
            }
        }
    }
    Outcome::Pass(format!(
        "{compared} config/task runs match the reference exactly; two clusters score 1.0 on all presets"
    ))
}

fn webkb() -> Outcome {
    let Ok(path) = std::env::var("DOCSIM_WEBKB") else {
        return Outcome::Skip("set DOCSIM_WEBKB to a term-frequency corpus file to run".into());
    };
    let corpus = match Corpus::load(&path, None) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("{path}: {e}")),
    };
    let seed = std::env::var("DOCSIM_WEBKB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let folds = FoldAssignment::new(corpus.len(), 10, seed).unwrap();
    let sp_config = [MeasureConfig::plain(Measure::Sp)];
    let map = cross_validate(&corpus, &sp_config, Task::Retrieval, 25, &folds)
        .unwrap()
        .results[0]
        .mean
        * 100.0;
    let binary = corpus.to_binary();
    let acc = cross_validate(&binary, &sp_config, Task::Classification, 5, &folds)
        .unwrap()
        .results[0]
        .mean
        * 100.0;
    check(
        (map - 74.91).abs() <= 0.66 && (acc - 84.71).abs() <= 1.06,
        format!("Sp MAP@25 {map:.2} (74.91 ± 0.66), 5NN binary accuracy {acc:.2} (84.71 ± 1.06)"),
    )
}

fn mean_query_time(scorer: &Scorer<'_>, corpus: &Corpus, queries: &[usize]) -> Duration {
    let start = Instant::now();
    for &q in queries {
        std::hint::black_box(top_k(scorer, corpus.doc(q), 25, Some(q)).unwrap());
    }
    start.elapsed() / queries.len() as u32
}

fn performance() -> Outcome {
    let corpus = skewed_corpus(10_000, 5_000, 60, 4, 5);
    let collection = Collection::full(&corpus);
    let queries: Vec<usize> = (0..100).map(|i| i * 97).collect();
    let sp_scorer = Scorer::new(MeasureConfig::plain(Measure::Sp), &collection).unwrap();
    let cos_scorer = Scorer::new(
        MeasureConfig::new(Measure::Cosine, WeightingScheme::TF_IDF).unwrap(),
        &collection,
    )
    .unwrap();
    // warm up both paths once before timing
    mean_query_time(&sp_scorer, &corpus, &queries[..5]);
    mean_query_time(&cos_scorer, &corpus, &queries[..5]);
    let sp_time = mean_query_time(&sp_scorer, &corpus, &queries);
    let cos_time = mean_query_time(&cos_scorer, &corpus, &queries);
    let ratio = sp_time.as_secs_f64() / cos_time.as_secs_f64();
    check(
        ratio <= 3.0,
        format!("Sp {sp_time:.2?}/query, cosine tf-idf {cos_time:.2?}/query, ratio {ratio:.2}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("range-count oracle", range_count_oracle),
        ("jaccard equivalence", jaccard_equivalence),
        ("sp binary summand is idf", sp_binary_is_idf),
        ("sp monotone-scaling invariance", sp_scaling_invariance),
        ("sp self-similarity dominance", sp_self_dominance),
        ("rare-term and tf scenarios", scenarios),
        ("bm25 idf sign", bm25_idf_sign),
        ("bm25 self-similarity witness", bm25_witness),
        ("evaluation pipeline oracle", pipeline_oracle),
        ("webkb reference results", webkb),
        ("query performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
