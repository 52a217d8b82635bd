//! Horizontal LDPC codes: parity-check ingestion, systematic encoding,
//! sum-product decoding and puncturing.

pub mod alist;
mod bp;
pub mod construct;

use std::fmt;
use std::ops::Index;
use std::path::Path;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector};

pub use alist::{AlistError, SparseParityCheck};
pub use bp::bp_decode;

/// Saturation magnitude standing in for an infinite LLR.
pub const DEFAULT_CLAMP: f64 = 30.0;

/// Bundled (3,6)-regular PEG code of length 504.
pub const BUNDLED_504: &str = include_str!("../../codes/peg_504_3_6.alist");
/// Bundled (3,6)-regular PEG code of length 96.
pub const BUNDLED_96: &str = include_str!("../../codes/peg_96_3_6.alist");

#[derive(Debug, Error)]
pub enum LdpcError {
    #[error(transparent)]
    Alist(#[from] AlistError),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parity-check matrix has full column rank; no information bits")]
    NoInformation,
    #[error("puncture index {0} out of range")]
    PunctureOutOfRange(usize),
    #[error("puncture index {0} is an information position")]
    PunctureInformation(usize),
    #[error("cannot puncture {requested} of {available} parity positions")]
    PunctureCount { requested: usize, available: usize },
    #[error("unrecognised LDPC specifier `{0}` (expected bundled:504, bundled:96 or file:<path>)")]
    BadSpec(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Per-bit log-likelihood ratios, `log P(bit = 0) / P(bit = 1)`, saturated
/// at `±clamp`.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector {
    values: Vec<f64>,
    clamp: f64,
}

impl LlrVector {
    /// Wraps `values`, saturating each at `±clamp`. NaN maps to 0.
    pub fn new(values: Vec<f64>, clamp: f64) -> Self {
        assert!(clamp > 0.0, "clamp must be positive");
        let values = values.into_iter().map(|v| saturate(v, clamp)).collect();
        LlrVector { values, clamp }
    }

    pub fn with_default_clamp(values: Vec<f64>) -> Self {
        Self::new(values, DEFAULT_CLAMP)
    }

    pub fn zeros(len: usize, clamp: f64) -> Self {
        Self::new(vec![0.0; len], clamp)
    }

    /// LLRs of a known word: bit 0 maps to `+clamp`, bit 1 to `-clamp`.
    pub fn from_hard(word: &BitVector, clamp: f64) -> Self {
        LlrVector {
            values: word
                .iter()
                .map(|b| if b { -clamp } else { clamp })
                .collect(),
            clamp,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn clamp(&self) -> f64 {
        self.clamp
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Hard decision; a zero LLR decides 0.
    pub fn hard_decision(&self) -> BitVector {
        BitVector::from_bools(self.values.iter().map(|&v| v < 0.0))
    }

    /// Elementwise sum, saturated.
    pub fn add(&self, other: &LlrVector) -> Result<LlrVector, LdpcError> {
        if other.len() != self.len() {
            return Err(LdpcError::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(LlrVector::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            self.clamp,
        ))
    }
}

impl Index<usize> for LlrVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[inline]
pub(crate) fn saturate(v: f64, clamp: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-clamp, clamp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Success,
    Failure,
}

/// Result of one belief-propagation run.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Hard decision after the last iteration.
    pub codeword: BitVector,
    pub iterations_used: usize,
    /// Posterior LLRs after the last iteration.
    pub final_llrs: LlrVector,
}

impl DecodeOutcome {
    pub fn is_success(&self) -> bool {
        self.status == DecodeStatus::Success
    }
}

/// A binary LDPC code with a derived systematic encoder and an optional
/// puncturing pattern.
#[derive(Clone)]
pub struct LdpcCode {
    name: String,
    graph: SparseParityCheck,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    // Row r: information bits (by rank) summed into parity_positions[r].
    parity_map: Option<BitMatrix>,
    puncture: Vec<usize>,
}

impl fmt::Debug for LdpcCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LdpcCode")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("k", &self.k())
            .field("checks", &self.graph.m())
            .field("punctured", &self.puncture.len())
            .finish()
    }
}

impl LdpcCode {
    /// Derives the systematic encoder by Gauss-Jordan elimination, taking
    /// pivots from the rightmost columns first so parity bits sit at the end
    /// whenever the matrix allows it. A rank-deficient matrix yields
    /// `k = n - rank`.
    pub fn new(name: impl Into<String>, graph: SparseParityCheck) -> Result<Self, LdpcError> {
        let n = graph.n();
        let dense = graph.to_dense();
        let order: Vec<usize> = (0..n).rev().collect();
        let (rref, pivots) = dense.reduce_in_order(&order);
        if pivots.len() == n {
            return Err(LdpcError::NoInformation);
        }
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut rows: Vec<(usize, BitVector)> = pivots
            .iter()
            .enumerate()
            .map(|(r, &p)| {
                let bits = BitVector::from_bools(info_positions.iter().map(|&c| rref.get(r, c)));
                (p, bits)
            })
            .collect();
        rows.sort_by_key(|(p, _)| *p);
        let parity_positions: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
        let parity_map = if rows.is_empty() {
            None
        } else {
            let bits: Vec<BitVector> = rows.into_iter().map(|(_, b)| b).collect();
            Some(BitMatrix::from_bit_vectors(&bits).expect("uniform rows"))
        };
        Ok(LdpcCode {
            name: name.into(),
            graph,
            info_positions,
            parity_positions,
            parity_map,
            puncture: Vec::new(),
        })
    }

    pub fn from_alist(name: impl Into<String>, text: &str) -> Result<Self, LdpcError> {
        Self::new(name, alist::parse(text)?)
    }

    pub fn from_alist_file(path: impl AsRef<Path>) -> Result<Self, LdpcError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LdpcError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "file".into());
        Self::from_alist(name, &text)
    }

    /// Parses `bundled:504`, `bundled:96` or `file:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self, LdpcError> {
        match spec.split_once(':') {
            Some(("bundled", "504")) => Self::from_alist("peg504", BUNDLED_504),
            Some(("bundled", "96")) => Self::from_alist("peg96", BUNDLED_96),
            Some(("file", path)) => Self::from_alist_file(path),
            _ => Err(LdpcError::BadSpec(spec.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &SparseParityCheck {
        &self.graph
    }

    /// Block length `n'`.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Information length `k'`.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn rank(&self) -> usize {
        self.parity_positions.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Rate counting only transmitted bits.
    pub fn transmitted_rate(&self) -> f64 {
        self.k() as f64 / self.transmitted_len() as f64
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    /// Codeword positions in systematic order: information positions
    /// followed by parity positions.
    pub fn column_permutation(&self) -> Vec<usize> {
        self.info_positions
            .iter()
            .chain(&self.parity_positions)
            .copied()
            .collect()
    }

    /// Variables that take part in no check.
    pub fn zero_degree_variables(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.graph.vars()[v].is_empty())
            .collect()
    }

    pub fn puncture_pattern(&self) -> &[usize] {
        &self.puncture
    }

    pub fn transmitted_len(&self) -> usize {
        self.n() - self.puncture.len()
    }

    /// Sets an explicit puncturing pattern. Only parity positions may be
    /// punctured.
    pub fn with_puncture(mut self, mut pattern: Vec<usize>) -> Result<Self, LdpcError> {
        pattern.sort_unstable();
        pattern.dedup();
        for &p in &pattern {
            if p >= self.n() {
                return Err(LdpcError::PunctureOutOfRange(p));
            }
            if self.parity_positions.binary_search(&p).is_err() {
                return Err(LdpcError::PunctureInformation(p));
            }
        }
        self.puncture = pattern;
        Ok(self)
    }

    /// Punctures `count` parity positions spread evenly over the parity part.
    pub fn with_even_puncture(self, count: usize) -> Result<Self, LdpcError> {
        let available = self.parity_positions.len();
        if count > available {
            return Err(LdpcError::PunctureCount {
                requested: count,
                available,
            });
        }
        let pattern = (0..count)
            .map(|i| self.parity_positions[i * available / count.max(1)])
            .collect();
        self.with_puncture(pattern)
    }

    /// Systematic encoding of `k'` information bits.
    pub fn encode(&self, info: &BitVector) -> Result<BitVector, LdpcError> {
        if info.len() != self.k() {
            return Err(LdpcError::LengthMismatch {
                expected: self.k(),
                found: info.len(),
            });
        }
        let mut word = BitVector::zeros(self.n());
        for (rank, &pos) in self.info_positions.iter().enumerate() {
            if info.get(rank) {
                word.set(pos, true);
            }
        }
        if let Some(map) = &self.parity_map {
            for (r, &pos) in self.parity_positions.iter().enumerate() {
                let ones: usize = map
                    .row_words(r)
                    .iter()
                    .zip(info.words())
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum();
                if ones % 2 == 1 {
                    word.set(pos, true);
                }
            }
        }
        Ok(word)
    }

    /// Reads the information bits back out of a codeword.
    pub fn extract_info(&self, word: &BitVector) -> BitVector {
        word.select(&self.info_positions)
    }

    /// Dense `k' x n'` generator matrix.
    pub fn generator(&self) -> BitMatrix {
        let rows: Vec<BitVector> = (0..self.k())
            .map(|i| {
                self.encode(&BitVector::unit(self.k(), i))
                    .expect("unit length k")
            })
            .collect();
        BitMatrix::from_bit_vectors(&rows).expect("k >= 1")
    }

    /// `H · word` over GF(2).
    pub fn syndrome(&self, word: &BitVector) -> Result<BitVector, LdpcError> {
        if word.len() != self.n() {
            return Err(LdpcError::LengthMismatch {
                expected: self.n(),
                found: word.len(),
            });
        }
        let bits = self
            .graph
            .checks()
            .iter()
            .map(|row| row.iter().fold(false, |acc, &v| acc ^ word.get(v)));
        Ok(BitVector::from_bools(bits))
    }

    pub fn is_codeword(&self, word: &BitVector) -> bool {
        self.graph
            .checks()
            .iter()
            .all(|row| !row.iter().fold(false, |acc, &v| acc ^ word.get(v)))
    }

    /// Transmitted bits: the codeword with punctured positions removed.
    pub fn apply_puncture(&self, word: &BitVector) -> Vec<bool> {
        let mut skip = self.puncture.iter().peekable();
        let mut out = Vec::with_capacity(self.transmitted_len());
        for (i, b) in word.iter().enumerate() {
            if skip.peek() == Some(&&i) {
                skip.next();
            } else {
                out.push(b);
            }
        }
        out
    }

    /// Re-inserts punctured positions into received LLRs as zeros.
    pub fn depuncture(&self, received: &[f64], clamp: f64) -> Result<LlrVector, LdpcError> {
        if received.len() != self.transmitted_len() {
            return Err(LdpcError::LengthMismatch {
                expected: self.transmitted_len(),
                found: received.len(),
            });
        }
        let mut values = Vec::with_capacity(self.n());
        let mut skip = self.puncture.iter().peekable();
        let mut src = received.iter();
        for i in 0..self.n() {
            if skip.peek() == Some(&&i) {
                skip.next();
                values.push(0.0);
            } else {
                values.push(*src.next().expect("length checked"));
            }
        }
        Ok(LlrVector::new(values, clamp))
    }
}
