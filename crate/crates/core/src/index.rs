//! Per-term cumulative frequency counts.
//!
//! For every term `i` the index keeps `F_i[j] = |{z in D : z_i <= j}|` for
//! `j = 0..=m_i`, where `m_i` is the largest frequency of the term in the
//! collection. The number of documents whose frequency lies in `[lo, hi]` is
//! then `F_i[hi] - F_i[lo - 1]`, a constant-time lookup.
//!
//! All arrays are stored back to back in one buffer with an offset table.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpus::{Corpus, Document, TermId};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DSFI";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyIndex {
    num_docs: usize,
    total_length: u64,
    avgdl: f64,
    /// `offsets[i]..offsets[i + 1]` is the slice of `cumulative` holding `F_i`.
    offsets: Vec<usize>,
    cumulative: Vec<u32>,
}

impl FrequencyIndex {
    /// Builds the index over `docs` for a dictionary of `dims` terms.
    ///
    /// Two passes over the entries: one for the per-term maxima, one to fill
    /// histograms that are then prefix-summed in place.
    pub fn build<'a, I>(docs: I, dims: usize) -> Self
    where
        I: IntoIterator<Item = &'a Document>,
        I::IntoIter: Clone,
    {
        let docs = docs.into_iter();
        let mut max_freq = vec![0u32; dims];
        let mut num_docs = 0usize;
        let mut total_length = 0u64;
        for doc in docs.clone() {
            num_docs += 1;
            total_length += doc.length();
            for (term, count) in doc.iter() {
                let slot = &mut max_freq[term.index()];
                *slot = (*slot).max(count);
            }
        }
        assert!(
            u32::try_from(num_docs).is_ok(),
            "collection too large for 32-bit counts"
        );

        let mut offsets = Vec::with_capacity(dims + 1);
        offsets.push(0usize);
        for &m in &max_freq {
            let last = *offsets.last().unwrap();
            offsets.push(last + m as usize + 1);
        }
        let mut cumulative = vec![0u32; *offsets.last().unwrap()];

        for doc in docs {
            for (term, count) in doc.iter() {
                cumulative[offsets[term.index()] + count as usize] += 1;
            }
        }
        let n = num_docs as u32;
        for term in 0..dims {
            let f = &mut cumulative[offsets[term]..offsets[term + 1]];
            let present: u32 = f[1..].iter().sum();
            f[0] = n - present;
            for j in 1..f.len() {
                f[j] += f[j - 1];
            }
        }

        let avgdl = if num_docs == 0 {
            0.0
        } else {
            total_length as f64 / num_docs as f64
        };
        Self {
            num_docs,
            total_length,
            avgdl,
            offsets,
            cumulative,
        }
    }

    /// Index over a whole corpus.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        Self::build(corpus.documents(), corpus.dims())
    }

    /// `N`.
    #[inline]
    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    /// `M`.
    #[inline]
    pub fn dims(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    #[inline]
    pub fn total_length(&self) -> u64 {
        self.total_length
    }

    /// `F_i`, or `None` for a term id beyond the dictionary.
    #[inline]
    pub fn cumulative(&self, term: TermId) -> Option<&[u32]> {
        let i = term.index();
        if i + 1 >= self.offsets.len() {
            return None;
        }
        Some(&self.cumulative[self.offsets[i]..self.offsets[i + 1]])
    }

    /// `n_i`: number of documents containing the term.
    pub fn doc_freq(&self, term: TermId) -> usize {
        self.cumulative(term)
            .map_or(0, |f| self.num_docs - f[0] as usize)
    }

    /// `m_i`: largest frequency of the term, 0 when it never occurs.
    pub fn max_freq(&self, term: TermId) -> u32 {
        self.cumulative(term).map_or(0, |f| (f.len() - 1) as u32)
    }

    /// Number of documents whose frequency of `term` lies in `[lo, hi]`.
    ///
    /// `hi` may exceed `m_i`; the range is clamped to the observed maximum.
    /// Terms outside the dictionary count as absent everywhere.
    ///
    /// Panics if `lo == 0` or `lo > hi`.
    #[inline]
    pub fn range_count(&self, term: TermId, lo: u32, hi: u32) -> usize {
        assert!(lo >= 1 && lo <= hi, "invalid frequency range [{lo}, {hi}]");
        let Some(f) = self.cumulative(term) else {
            return 0;
        };
        let max = f.len() - 1;
        let lo = lo as usize;
        if lo > max {
            return 0;
        }
        let hi = (hi as usize).min(max);
        (f[hi] - f[lo - 1]) as usize
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(self.num_docs as u64).to_le_bytes())?;
        out.write_all(&(self.dims() as u64).to_le_bytes())?;
        out.write_all(&self.total_length.to_le_bytes())?;
        out.write_all(&self.avgdl.to_bits().to_le_bytes())?;
        for i in 0..self.dims() {
            let term = TermId(i as u32);
            let f = self.cumulative(term).unwrap();
            out.write_all(&(self.doc_freq(term) as u32).to_le_bytes())?;
            out.write_all(&((f.len() - 1) as u32).to_le_bytes())?;
            for &v in f {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        out.flush()
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::IndexFormat("bad magic tag".into()));
        }
        let version = read_u32(&mut input)?;
        if version != FORMAT_VERSION {
            return Err(Error::IndexVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let num_docs = usize::try_from(read_u64(&mut input)?)
            .map_err(|_| Error::IndexFormat("document count overflows".into()))?;
        let dims = usize::try_from(read_u64(&mut input)?)
            .map_err(|_| Error::IndexFormat("dictionary size overflows".into()))?;
        let total_length = read_u64(&mut input)?;
        let avgdl = f64::from_bits(read_u64(&mut input)?);
        let expected_avgdl = if num_docs == 0 {
            0.0
        } else {
            total_length as f64 / num_docs as f64
        };
        if avgdl.to_bits() != expected_avgdl.to_bits() {
            return Err(Error::IndexFormat(
                "avgdl does not match stored lengths".into(),
            ));
        }

        let mut offsets = Vec::with_capacity(dims + 1);
        offsets.push(0);
        let mut cumulative = Vec::new();
        for i in 0..dims {
            let doc_freq = read_u32(&mut input)? as usize;
            let max = read_u32(&mut input)? as usize;
            let start = cumulative.len();
            for _ in 0..=max {
                cumulative.push(read_u32(&mut input)?);
            }
            let f = &cumulative[start..];
            let consistent = f.windows(2).all(|w| w[0] <= w[1])
                && f[max] as usize == num_docs
                && num_docs.checked_sub(f[0] as usize) == Some(doc_freq)
                && (max == 0 || f[max - 1] < f[max]);
            if !consistent {
                return Err(Error::IndexFormat(format!(
                    "inconsistent cumulative counts for term {i}"
                )));
            }
            offsets.push(cumulative.len());
        }
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(Error::IndexFormat("trailing bytes".into()));
        }
        Ok(Self {
            num_docs,
            total_length,
            avgdl,
            offsets,
            cumulative,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        self.write_to(BufWriter::new(file))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file))
    }
}

fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::IndexFormat("unexpected end of file".into())
    } else {
        Error::Io(e)
    }
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(u64::from_le_bytes(buf))
}
