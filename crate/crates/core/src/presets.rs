//! Standard measure line-ups for the two document representations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::measures::{Measure, MeasureConfig};
use crate::weighting::WeightingScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Raw term frequencies.
    #[default]
    Tf,
    /// Presence only; every stored frequency becomes 1.
    Binary,
}

impl Representation {
    pub fn apply(self, corpus: Corpus) -> Corpus {
        match self {
            Representation::Tf => corpus,
            Representation::Binary => corpus.to_binary(),
        }
    }

    pub fn apply_document(self, doc: Document) -> Document {
        match self {
            Representation::Tf => doc,
            Representation::Binary => doc.to_binary(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Representation::Tf => "tf",
            Representation::Binary => "binary",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tf" => Ok(Representation::Tf),
            "binary" => Ok(Representation::Binary),
            other => Err(format!(
                "unknown representation `{other}` (expected tf or binary)"
            )),
        }
    }
}

fn config(measure: Measure, weighting: WeightingScheme) -> MeasureConfig {
    MeasureConfig::new(measure, weighting).expect("preset combinations are legal")
}

/// Six retrieval contenders: BM25, two cosine and two weighted Jaccard
/// variants, and Sp. Term-frequency corpora use tf and tf-idf weighting,
/// binary corpora none and idf.
pub fn retrieval(representation: Representation) -> Vec<MeasureConfig> {
    let (plain, with_idf) = match representation {
        Representation::Tf => (WeightingScheme::TF, WeightingScheme::TF_IDF),
        Representation::Binary => (WeightingScheme::IDENTITY, WeightingScheme::IDF),
    };
    vec![
        MeasureConfig::plain(Measure::Bm25),
        config(Measure::Cosine, with_idf),
        config(Measure::Cosine, plain),
        config(Measure::WeightedJaccard, with_idf),
        config(Measure::WeightedJaccard, plain),
        MeasureConfig::plain(Measure::Sp),
    ]
}

/// Eight classification contenders: the retrieval line-up plus icf-weighted
/// cosine and weighted Jaccard.
pub fn classification(representation: Representation) -> Vec<MeasureConfig> {
    let (plain, with_idf, with_icf) = match representation {
        Representation::Tf => (
            WeightingScheme::TF,
            WeightingScheme::TF_IDF,
            WeightingScheme::TF_ICF,
        ),
        Representation::Binary => (
            WeightingScheme::IDENTITY,
            WeightingScheme::IDF,
            WeightingScheme::ICF,
        ),
    };
    vec![
        MeasureConfig::plain(Measure::Bm25),
        config(Measure::Cosine, with_icf),
        config(Measure::Cosine, with_idf),
        config(Measure::Cosine, plain),
        config(Measure::WeightedJaccard, with_icf),
        config(Measure::WeightedJaccard, with_idf),
        config(Measure::WeightedJaccard, plain),
        MeasureConfig::plain(Measure::Sp),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retrieval_labels() {
        let labels: Vec<_> = retrieval(Representation::Tf)
            .iter()
            .map(|c| c.label())
            .collect();
        assert_eq!(
            labels,
            [
                "BM25",
                "Cos.tf-idf",
                "Cos.tf",
                "WJac.tf-idf",
                "WJac.tf",
                "Sp"
            ]
        );
        let labels: Vec<_> = retrieval(Representation::Binary)
            .iter()
            .map(|c| c.label())
            .collect();
        assert_eq!(labels, ["BM25", "Cos.idf", "Cos", "WJac.idf", "WJac", "Sp"]);
    }

    #[test]
    fn classification_labels() {
        let labels: Vec<_> = classification(Representation::Tf)
            .iter()
            .map(|c| c.label())
            .collect();
        assert_eq!(
            labels,
            [
                "BM25",
                "Cos.tf-icf",
                "Cos.tf-idf",
                "Cos.tf",
                "WJac.tf-icf",
                "WJac.tf-idf",
                "WJac.tf",
                "Sp"
            ]
        );
        assert_eq!(classification(Representation::Binary).len(), 8);
    }
}
