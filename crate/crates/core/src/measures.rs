//! Pairwise document similarity: cosine, BM25, Jaccard, weighted Jaccard and
//! Sp.
//!
//! Every measure is symmetric and returns 0 when either side is empty.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, TermId};
use crate::error::{Error, Result};
use crate::index::FrequencyIndex;
use crate::weighting::{idf_bm25_from_counts, WeightedVector, WeightingScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    Cosine,
    Bm25,
    Jaccard,
    WeightedJaccard,
    Sp,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Cosine,
        Measure::Bm25,
        Measure::Jaccard,
        Measure::WeightedJaccard,
        Measure::Sp,
    ];

    /// Configuration name: `cosine`, `bm25`, `jaccard`, `wjaccard` or `sp`.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Cosine => "cosine",
            Measure::Bm25 => "bm25",
            Measure::Jaccard => "jaccard",
            Measure::WeightedJaccard => "wjaccard",
            Measure::Sp => "sp",
        }
    }

    /// Only cosine and weighted Jaccard operate on weighted vectors.
    pub fn accepts_weighting(self) -> bool {
        matches!(self, Measure::Cosine | Measure::WeightedJaccard)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

/// BM25 free parameters: `a` controls term-frequency saturation, `b` the
/// strength of document-length normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub a: f64,
    pub b: f64,
}

impl Bm25Params {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() && (0.0..=1.0).contains(&b) {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidBm25Params { a, b })
        }
    }
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { a: 1.2, b: 0.95 }
    }
}

/// A measure together with everything needed to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub measure: Measure,
    pub weighting: WeightingScheme,
    pub bm25: Bm25Params,
}

impl MeasureConfig {
    pub fn new(measure: Measure, weighting: WeightingScheme) -> Result<Self> {
        if !measure.accepts_weighting() && !weighting.is_identity() {
            return Err(Error::IllegalCombination {
                measure: measure.name().into(),
                weighting: weighting.name().into(),
            });
        }
        Ok(Self {
            measure,
            weighting,
            bm25: Bm25Params::default(),
        })
    }

    pub fn plain(measure: Measure) -> Self {
        Self {
            measure,
            weighting: WeightingScheme::IDENTITY,
            bm25: Bm25Params::default(),
        }
    }

    pub fn with_bm25(mut self, params: Bm25Params) -> Self {
        self.bm25 = params;
        self
    }

    /// Parses `<measure>[:<weighting>]`, e.g. `sp` or `cosine:tf-idf`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (measure, weighting) = match spec.trim().split_once(':') {
            Some((m, w)) => (m.trim().parse()?, w.trim().parse()?),
            None => (spec.trim().parse()?, WeightingScheme::IDENTITY),
        };
        Self::new(measure, weighting)
    }

    /// Short display label in the style `Cos.tf-idf`, `WJac`, `BM25`, `Sp`.
    pub fn label(&self) -> String {
        let base = match self.measure {
            Measure::Cosine => "Cos",
            Measure::Bm25 => "BM25",
            Measure::Jaccard => "Jac",
            Measure::WeightedJaccard => "WJac",
            Measure::Sp => "Sp",
        };
        if self.weighting.is_identity() {
            base.to_string()
        } else {
            format!("{base}.{}", self.weighting.name())
        }
    }
}

impl fmt::Display for MeasureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub(crate) fn l2_norm(v: &WeightedVector) -> f64 {
    v.entries().iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &WeightedVector, y: &WeightedVector) -> f64 {
    let (x, y) = (x.entries(), y.entries());
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += x[i].1 * y[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

#[inline]
pub(crate) fn cosine_with_norms(x: &WeightedVector, y: &WeightedVector, nx: f64, ny: f64) -> f64 {
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    dot(x, y) / (nx * ny)
}

/// Cosine of the angle between two weighted vectors.
pub fn cosine(x: &WeightedVector, y: &WeightedVector) -> f64 {
    cosine_with_norms(x, y, l2_norm(x), l2_norm(y))
}

/// `a * (1 - b + b * dl / avgdl)`, the denominator offset of BM25's
/// saturated term frequency.
#[inline]
pub(crate) fn bm25_length_factor(dl: u64, avgdl: f64, params: Bm25Params) -> f64 {
    params.a * (1.0 - params.b + params.b * (dl as f64 / avgdl))
}

#[inline]
pub(crate) fn bm25_saturate(freq: u32, length_factor: f64, a: f64) -> f64 {
    let v = f64::from(freq);
    v * (a + 1.0) / (v + length_factor)
}

/// Sums `idf * (sx * sy)` over shared terms; `idf_of` maps a shared term to
/// its BM25 idf.
#[inline]
pub(crate) fn bm25_shared(
    x: &Document,
    kx: f64,
    y: &Document,
    ky: f64,
    a: f64,
    idf_of: impl Fn(TermId) -> f64,
) -> f64 {
    let (x, y) = (x.entries(), y.entries());
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let sx = bm25_saturate(x[i].1, kx, a);
                let sy = bm25_saturate(y[j].1, ky, a);
                sum += idf_of(x[i].0) * (sx * sy);
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

/// BM25 similarity of two documents against the statistics of `index`.
///
/// Terms occurring in more than half of the collection have a negative idf
/// and lower the score.
pub fn bm25(x: &Document, y: &Document, index: &FrequencyIndex, params: Bm25Params) -> Result<f64> {
    let avgdl = index.avgdl();
    if avgdl <= 0.0 {
        return Err(Error::ZeroAverageLength);
    }
    let kx = bm25_length_factor(x.length(), avgdl, params);
    let ky = bm25_length_factor(y.length(), avgdl, params);
    let n = index.num_docs();
    Ok(bm25_shared(x, kx, y, ky, params.a, |t| {
        idf_bm25_from_counts(n, index.doc_freq(t))
    }))
}

/// Returns `(|shared|, |union|)` term counts.
fn overlap(x: &Document, y: &Document) -> (usize, usize) {
    let (x, y) = (x.entries(), y.entries());
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (shared, x.len() + y.len() - shared)
}

/// `|T_x ∩ T_y| / |T_x ∪ T_y|`.
pub fn jaccard(x: &Document, y: &Document) -> f64 {
    let (shared, union) = overlap(x, y);
    if union == 0 {
        0.0
    } else {
        shared as f64 / union as f64
    }
}

/// `Σ min(w_x, w_y) / Σ max(w_x, w_y)`.
pub fn weighted_jaccard(x: &WeightedVector, y: &WeightedVector) -> f64 {
    let (x, y) = (x.entries(), y.entries());
    let (mut i, mut j) = (0, 0);
    let (mut lo, mut hi) = (0.0, 0.0);
    while i < x.len() || j < y.len() {
        let ord = match (x.get(i), y.get(j)) {
            (Some(a), Some(b)) => a.0.cmp(&b.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, _) => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                hi += x[i].1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                hi += y[j].1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                lo += x[i].1.min(y[j].1);
                hi += x[i].1.max(y[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// `ln(N / count)` with the count floored at 1.
#[inline]
pub(crate) fn sp_summand(num_docs: usize, count: usize) -> f64 {
    (num_docs as f64 / count.max(1) as f64).ln()
}

/// Shared Sp loop; `summand` turns a range count into a log term.
#[inline]
pub(crate) fn sp_with(
    x: &Document,
    y: &Document,
    index: &FrequencyIndex,
    summand: impl Fn(usize) -> f64,
) -> f64 {
    let (xe, ye) = (x.entries(), y.entries());
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    let mut sum = 0.0;
    while i < xe.len() && j < ye.len() {
        match xe[i].0.cmp(&ye[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let (a, b) = (xe[i].1, ye[j].1);
                let count = index.range_count(xe[i].0, a.min(b), a.max(b));
                sum += summand(count);
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = xe.len() + ye.len() - shared;
    if union == 0 {
        0.0
    } else {
        sum / union as f64
    }
}

/// Sp similarity: for each shared term, the log of `N` over the number of
/// collection documents whose frequency lies between the two documents'
/// frequencies; the sum is normalized by the size of the union of terms.
///
/// A shared term no collection document matches in range (possible only
/// when both documents are external) counts as if one document matched.
pub fn sp(x: &Document, y: &Document, index: &FrequencyIndex) -> f64 {
    let n = index.num_docs();
    sp_with(x, y, index, |count| sp_summand(n, count))
}

/// Similarity under `config` for two documents, weighting on the fly.
/// Convenient for one-off comparisons; bulk scoring should go through
/// [`crate::scorer::Scorer`].
pub fn similarity(
    config: &MeasureConfig,
    x: &Document,
    y: &Document,
    index: &FrequencyIndex,
    stats: Option<&crate::weighting::ClassTermStats>,
) -> Result<f64> {
    use crate::weighting::weigh;
    match config.measure {
        Measure::Cosine => Ok(cosine(
            &weigh(x, config.weighting, index, stats)?,
            &weigh(y, config.weighting, index, stats)?,
        )),
        Measure::WeightedJaccard => Ok(weighted_jaccard(
            &weigh(x, config.weighting, index, stats)?,
            &weigh(y, config.weighting, index, stats)?,
        )),
        Measure::Bm25 => bm25(x, y, index, config.bm25),
        Measure::Jaccard => Ok(jaccard(x, y)),
        Measure::Sp => Ok(sp(x, y, index)),
    }
}
