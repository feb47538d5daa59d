//! Query-by-example retrieval and kNN classification under k-fold cross
//! validation.
//!
//! Per fold, every statistic (document frequencies, cumulative counts,
//! average length, class frequencies) is rebuilt from the training folds;
//! held-out documents are only ever used as queries. A document counts as
//! relevant to a query when the two share a class label.
//!
//! Retrieval runs report MAP@k: per query the mean of P@1..P@k, averaged over
//! the queries of a run. Classification runs report accuracy. Across runs
//! the report gives mean and standard error and compares configurations with
//! the two-standard-error interval rule.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::measures::MeasureConfig;
use crate::scorer::{Collection, Scorer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    /// Corpus index of the document.
    pub doc: usize,
    pub score: f64,
}

/// Documents in descending score order, ties by ascending corpus index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    entries: Vec<Ranked>,
}

impl RankedList {
    pub fn entries(&self) -> &[Ranked] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn docs(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|r| r.doc)
    }
}

fn ranking_order(a: &Ranked, b: &Ranked) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .expect("similarity scores are never NaN")
        .then(a.doc.cmp(&b.doc))
}

/// Keeps the `k` best of `(doc, score)` candidates under the ranking order.
pub fn select_top_k(mut candidates: Vec<Ranked>, k: usize) -> RankedList {
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, ranking_order);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(ranking_order);
    RankedList {
        entries: candidates,
    }
}

/// The `k` collection members most similar to `query`. `exclude` drops one
/// corpus index from consideration (self-match removal).
pub fn top_k(
    scorer: &Scorer<'_>,
    query: &Document,
    k: usize,
    exclude: Option<usize>,
) -> Result<RankedList> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let members = scorer.collection().members();
    let scores = scorer.score_all(query)?;
    let candidates: Vec<Ranked> = members
        .iter()
        .zip(scores)
        .filter(|&(&doc, _)| Some(doc) != exclude)
        .map(|(&doc, score)| Ranked { doc, score })
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptyCollection);
    }
    Ok(select_top_k(candidates, k))
}

/// Fraction of the first `k` results labeled `query_label`.
pub fn precision_at_k(
    ranked: &RankedList,
    query_label: u32,
    labels: &[u32],
    k: usize,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if k > ranked.len() {
        return Err(Error::DepthExceedsList {
            k,
            len: ranked.len(),
        });
    }
    let hits = ranked
        .docs()
        .take(k)
        .filter(|&d| labels[d] == query_label)
        .count();
    Ok(hits as f64 / k as f64)
}

/// `P@1, ..., P@min(k, len)`.
pub fn precision_curve(
    ranked: &RankedList,
    query_label: u32,
    labels: &[u32],
    k: usize,
) -> Vec<f64> {
    let mut hits = 0usize;
    ranked
        .docs()
        .take(k)
        .enumerate()
        .map(|(i, d)| {
            if labels[d] == query_label {
                hits += 1;
            }
            hits as f64 / (i + 1) as f64
        })
        .collect()
}

/// Mean of each query's `P@1..P@k` (or of all it has when its list is
/// shorter), averaged over queries. 0 when there are no queries.
pub fn map_at_k(per_query: &[Vec<f64>], k: usize) -> f64 {
    if per_query.is_empty() || k == 0 {
        return 0.0;
    }
    let total: f64 = per_query
        .iter()
        .map(|curve| {
            let depth = curve.len().min(k);
            if depth == 0 {
                0.0
            } else {
                curve[..depth].iter().sum::<f64>() / depth as f64
            }
        })
        .sum();
    total / per_query.len() as f64
}

/// Majority label among `neighbors`; a tie goes to the tied label whose
/// first occurrence is nearest.
pub fn majority_label(neighbors: &RankedList, labels: &[u32]) -> Option<u32> {
    let mut votes: HashMap<u32, (usize, usize)> = HashMap::new();
    for (rank, doc) in neighbors.docs().enumerate() {
        let entry = votes.entry(labels[doc]).or_insert((0, rank));
        entry.0 += 1;
    }
    votes
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(label, _)| label)
}

/// Predicts the majority label of the `k` nearest collection members.
pub fn knn_classify(
    scorer: &Scorer<'_>,
    query: &Document,
    k: usize,
    exclude: Option<usize>,
) -> Result<u32> {
    let neighbors = top_k(scorer, query, k, exclude)?;
    let labels = scorer.collection().corpus().labels();
    Ok(majority_label(&neighbors, &labels).expect("top_k is non-empty"))
}

/// Assignment of every corpus document to one of `folds` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    folds: usize,
    seed: u64,
    stratified: bool,
}

impl FoldAssignment {
    /// Seeded uniform shuffle, then round-robin dealing. Fold sizes differ
    /// by at most one.
    pub fn new(num_docs: usize, folds: usize, seed: u64) -> Result<Self> {
        let mut order: Vec<usize> = (0..num_docs).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        Self::deal(num_docs, &order, folds, seed, false)
    }

    /// Shuffles within each class and deals classes one after another, so
    /// every fold gets a near-equal share of each label.
    pub fn stratified(labels: &[u32], folds: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let classes = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
        for (i, &l) in labels.iter().enumerate() {
            by_class[l as usize].push(i);
        }
        let mut order = Vec::with_capacity(labels.len());
        for mut group in by_class {
            group.shuffle(&mut rng);
            order.extend(group);
        }
        Self::deal(labels.len(), &order, folds, seed, true)
    }

    fn deal(
        num_docs: usize,
        order: &[usize],
        folds: usize,
        seed: u64,
        stratified: bool,
    ) -> Result<Self> {
        if folds < 2 {
            return Err(Error::TooFewFolds(folds));
        }
        if num_docs < folds {
            return Err(Error::EmptyFold(num_docs));
        }
        let mut fold_of = vec![0; num_docs];
        for (position, &doc) in order.iter().enumerate() {
            fold_of[doc] = position % folds;
        }
        Ok(Self {
            fold_of,
            folds,
            seed,
            stratified,
        })
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_stratified(&self) -> bool {
        self.stratified
    }

    pub fn fold_of(&self, doc: usize) -> usize {
        self.fold_of[doc]
    }

    pub fn num_docs(&self) -> usize {
        self.fold_of.len()
    }

    /// Held-out documents of `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    /// Training documents for `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Retrieval,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Different,
    NotDifferent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Different => "different",
            Verdict::NotDifferent => "not-different",
        })
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Two means differ when their `mean ± 2·se` intervals do not overlap.
pub fn two_se_verdict(a: (f64, f64), b: (f64, f64)) -> Verdict {
    let (lo_a, hi_a) = (a.0 - 2.0 * a.1, a.0 + 2.0 * a.1);
    let (lo_b, hi_b) = (b.0 - 2.0 * b.1, b.0 + 2.0 * b.1);
    if hi_a < lo_b || hi_b < lo_a {
        Verdict::Different
    } else {
        Verdict::NotDifferent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub label: String,
    pub config: MeasureConfig,
    /// One value per fold, in fold order.
    pub runs: Vec<f64>,
    pub mean: f64,
    pub se: f64,
    /// Some query saw fewer than `k` candidates, so its precision curve was
    /// cut short.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub metric: String,
    pub k: usize,
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
    pub results: Vec<ConfigResult>,
    /// `significance[i][j]` compares `results[i]` with `results[j]`.
    pub significance: Vec<Vec<Verdict>>,
}

impl EvalReport {
    /// `config,run_1,...,run_n,mean,se,truncated`, values with 6 decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "config")?;
        for r in 1..=self.folds {
            write!(out, ",run_{r}")?;
        }
        writeln!(out, ",mean,se,truncated")?;
        for res in &self.results {
            write!(out, "{}", res.label)?;
            for v in &res.runs {
                write!(out, ",{v:.6}")?;
            }
            writeln!(out, ",{:.6},{:.6},{}", res.mean, res.se, res.truncated)?;
        }
        Ok(())
    }

    /// Square matrix: header `config,<label>...`, one row per configuration.
    pub fn write_significance_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "config")?;
        for res in &self.results {
            write!(out, ",{}", res.label)?;
        }
        writeln!(out)?;
        for (res, row) in self.results.iter().zip(&self.significance) {
            write!(out, "{}", res.label)?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }
}

/// Per-query outcome within one run.
enum Outcome {
    Precision { curve: Vec<f64>, truncated: bool },
    Correct(bool),
}

/// Runs the `task` for every configuration over every fold of `folds`.
///
/// `k` is the retrieval depth (MAP@k) or the neighbor count (kNN).
pub fn cross_validate(
    corpus: &Corpus,
    configs: &[MeasureConfig],
    task: Task,
    k: usize,
    folds: &FoldAssignment,
) -> Result<EvalReport> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if folds.num_docs() != corpus.len() {
        return Err(Error::DocumentOutOfRange {
            index: folds.num_docs(),
            len: corpus.len(),
        });
    }
    let labels = corpus.labels();
    let mut runs = vec![Vec::with_capacity(folds.folds()); configs.len()];
    let mut truncated = vec![false; configs.len()];

    for fold in 0..folds.folds() {
        let test = folds.test_indices(fold);
        if test.is_empty() {
            return Err(Error::EmptyFold(fold));
        }
        let train = folds.train_indices(fold);
        if train.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let collection = Collection::new(corpus, train)?;
        for (c, config) in configs.iter().enumerate() {
            let scorer = Scorer::new(*config, &collection)?;
            let outcomes = test
                .par_iter()
                .map(|&q| {
                    let ranked = top_k(&scorer, corpus.doc(q), k, None)?;
                    Ok(match task {
                        Task::Retrieval => Outcome::Precision {
                            truncated: ranked.len() < k,
                            curve: precision_curve(&ranked, labels[q], &labels, k),
                        },
                        Task::Classification => {
                            let predicted = majority_label(&ranked, &labels).expect("non-empty");
                            Outcome::Correct(predicted == labels[q])
                        }
                    })
                })
                .collect::<Result<Vec<_>>>()?;

            let value = match task {
                Task::Retrieval => {
                    let mut curves = Vec::with_capacity(outcomes.len());
                    for o in outcomes {
                        if let Outcome::Precision {
                            curve,
                            truncated: t,
                        } = o
                        {
                            truncated[c] |= t;
                            curves.push(curve);
                        }
                    }
                    map_at_k(&curves, k)
                }
                Task::Classification => {
                    let correct = outcomes
                        .iter()
                        .filter(|o| matches!(o, Outcome::Correct(true)))
                        .count();
                    correct as f64 / outcomes.len() as f64
                }
            };
            runs[c].push(value);
        }
    }

    let results: Vec<ConfigResult> = configs
        .iter()
        .zip(runs)
        .zip(truncated)
        .map(|((config, runs), truncated)| {
            let (mean, se) = mean_and_se(&runs);
            ConfigResult {
                label: config.label(),
                config: *config,
                runs,
                mean,
                se,
                truncated,
            }
        })
        .collect();
    let significance = results
        .iter()
        .map(|a| {
            results
                .iter()
                .map(|b| two_se_verdict((a.mean, a.se), (b.mean, b.se)))
                .collect()
        })
        .collect();
    let metric = match task {
        Task::Retrieval => format!("MAP@{k}"),
        Task::Classification => format!("accuracy@{k}NN"),
    };
    Ok(EvalReport {
        task,
        metric,
        k,
        folds: folds.folds(),
        seed: folds.seed(),
        stratified: folds.is_stratified(),
        results,
        significance,
    })
}
