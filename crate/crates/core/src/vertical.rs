//! Vertical (column-direction) codes of the product structure.
//!
//! Built-in codes are cyclic codes laid out systematically with the
//! information rows first and the parity rows last. Column `i` of the
//! parity-check matrix is `x^e mod g(x)` read as an `m`-bit vector (row `r`
//! holds the coefficient of `x^r`), where information row `i` takes exponent
//! `m + i` and parity row `j` takes exponent `j`. With `g(x) = x^3 + x + 1`
//! this reproduces the classic (7,4) Hamming layout
//!
//! ```text
//! 1 0 1 1 1 0 0
//! 1 1 1 0 0 1 0
//! 0 1 1 1 0 0 1
//! ```

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::gf2::{self, BitMatrix, BitVector, Gf2Error};
use crate::ldpc::{alist, AlistError, LdpcCode};

/// Primitive polynomials used for the Hamming constructions, indexed by `m`.
/// Bit `i` is the coefficient of `x^i`.
const PRIMITIVE_POLYS: [(usize, u64); 9] = [
    (2, 0b111),          // x^2 + x + 1
    (3, 0b1011),         // x^3 + x + 1
    (4, 0b10011),        // x^4 + x + 1
    (5, 0b100101),       // x^5 + x^2 + 1
    (6, 0b1000011),      // x^6 + x + 1
    (7, 0b10001001),     // x^7 + x^3 + 1
    (8, 0b100011101),    // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0b1000010001),   // x^9 + x^4 + 1
    (10, 0b10000001001), // x^10 + x^3 + 1
];

/// Largest `k` for which [`compute_d_min`] enumerates every codeword.
pub const MAX_EXHAUSTIVE_K: usize = 24;

#[derive(Debug, Error)]
pub enum VerticalError {
    #[error("SPC length must be at least 2, got {0}")]
    SpcLength(usize),
    #[error("Hamming parameter m must lie in 2..=10, got {0}")]
    HammingOrder(usize),
    #[error("DPC length must be a positive multiple of 3, got {0}")]
    DpcLength(usize),
    #[error("parity-check matrix has rank equal to its length; the code carries no information")]
    NoInformation,
    #[error("expected {expected} information rows, got {found}")]
    RowCount { expected: usize, found: usize },
    #[error("information rows have unequal lengths")]
    RaggedRows,
    #[error("exhaustive search over 2^{k} codewords is beyond the limit of 2^{MAX_EXHAUSTIVE_K}")]
    ExhaustiveTooLarge { k: usize },
    #[error("minimum distance search exceeded its budget")]
    DistanceBudget,
    #[error(
        "unrecognised code specifier `{0}` (expected spc:<n>, hamming:<m>, dpc:<n> or file:<path>)"
    )]
    BadSpec(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Alist(#[from] AlistError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A binary linear code used along the columns of the codeword matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct VerticalCode {
    name: String,
    h: BitMatrix,
    k: usize,
    d_min: usize,
    systematic_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    // For each parity position, the systematic rows (by rank) it sums.
    parity_sources: Vec<Vec<usize>>,
}

impl fmt::Debug for VerticalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerticalCode")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("k", &self.k)
            .field("m", &self.m())
            .field("d_min", &self.d_min)
            .finish()
    }
}

impl fmt::Display for VerticalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn mul_x_mod(state: u64, g: u64, m: usize) -> u64 {
    let s = state << 1;
    if s >> m & 1 == 1 {
        s ^ g
    } else {
        s
    }
}

/// Parity-check matrix of the length-`n` cyclic code generated by `g`
/// (degree `m`), in systematic order with the parity rows last.
fn cyclic_parity_check(n: usize, g: u64) -> BitMatrix {
    let m = 63 - g.leading_zeros() as usize;
    let k = n - m;
    let mut powers = Vec::with_capacity(n);
    let mut state = 1u64;
    for _ in 0..n {
        powers.push(state);
        state = mul_x_mod(state, g, m);
    }
    let mut h = BitMatrix::zeros(m, n);
    for col in 0..n {
        let exponent = if col < k { m + col } else { col - k };
        let v = powers[exponent];
        for r in 0..m {
            if v >> r & 1 == 1 {
                h.set(r, col, true);
            }
        }
    }
    h
}

impl VerticalCode {
    /// Single parity-check code of length `n`.
    pub fn spc(n: usize) -> Result<Self, VerticalError> {
        if n < 2 {
            return Err(VerticalError::SpcLength(n));
        }
        let h = cyclic_parity_check(n, 0b11);
        Self::from_parity_check(format!("SPC({},{})", n, n - 1), h)
    }

    /// Hamming code with `m` parity rows, length `2^m - 1`.
    pub fn hamming(m: usize) -> Result<Self, VerticalError> {
        let &(_, g) = PRIMITIVE_POLYS
            .iter()
            .find(|(order, _)| *order == m)
            .ok_or(VerticalError::HammingOrder(m))?;
        let n = (1usize << m) - 1;
        let h = cyclic_parity_check(n, g);
        Self::from_parity_check(format!("Hamming({},{})", n, n - m), h)
    }

    /// Double parity-check code: cyclic, generated by `x^2 + x + 1`.
    pub fn dpc(n: usize) -> Result<Self, VerticalError> {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(VerticalError::DpcLength(n));
        }
        let h = cyclic_parity_check(n, 0b111);
        Self::from_parity_check(format!("DPC({},{})", n, n - 2), h)
    }

    /// Wraps an arbitrary parity-check matrix. Parity positions are the
    /// pivots found by eliminating from the rightmost column leftwards, so
    /// matrices of the form `[A | I]` keep their parity rows last.
    pub fn from_parity_check(name: impl Into<String>, h: BitMatrix) -> Result<Self, VerticalError> {
        if let Some(c) = (0..h.cols()).find(|&c| h.column_weight(c) == 0) {
            return Err(Gf2Error::ZeroColumn(c).into());
        }
        if h.rows() > gf2::MAX_EXTEND_ROWS {
            return Err(Gf2Error::TooManyRows {
                rows: h.rows(),
                max: gf2::MAX_EXTEND_ROWS,
            }
            .into());
        }
        let n = h.cols();
        let order: Vec<usize> = (0..n).rev().collect();
        let (rref, pivots) = h.reduce_in_order(&order);
        let k = n - pivots.len();
        if k == 0 {
            return Err(VerticalError::NoInformation);
        }
        let systematic_positions: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut parity: Vec<(usize, Vec<usize>)> = pivots
            .iter()
            .enumerate()
            .map(|(row, &p)| {
                let sources = systematic_positions
                    .iter()
                    .enumerate()
                    .filter_map(|(rank, &col)| rref.get(row, col).then_some(rank))
                    .collect();
                (p, sources)
            })
            .collect();
        parity.sort_by_key(|(p, _)| *p);
        let (parity_positions, parity_sources) = parity.into_iter().unzip();
        let mut code = VerticalCode {
            name: name.into(),
            h,
            k,
            d_min: 0,
            systematic_positions,
            parity_positions,
            parity_sources,
        };
        code.d_min = if k <= MAX_EXHAUSTIVE_K {
            compute_d_min(&code)?
        } else {
            min_dependent_columns(&code.h, 1_000_000_000).ok_or(VerticalError::DistanceBudget)?
        };
        Ok(code)
    }

    /// Parses `spc:<n>`, `hamming:<m>`, `dpc:<n>` or `file:<path>` (alist).
    pub fn from_spec(spec: &str) -> Result<Self, VerticalError> {
        let bad = || VerticalError::BadSpec(spec.to_string());
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        let number = || arg.trim().parse::<usize>().map_err(|_| bad());
        match kind.trim() {
            "spc" => Self::spc(number()?),
            "hamming" => Self::hamming(number()?),
            "dpc" => Self::dpc(number()?),
            "file" => Self::from_alist_file(arg),
            _ => Err(bad()),
        }
    }

    pub fn from_alist_file(path: impl AsRef<Path>) -> Result<Self, VerticalError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| VerticalError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let h = alist::parse(&text)?.to_dense();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "file".into());
        Self::from_parity_check(name, h)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    /// Code length: the number of horizontal codewords per matrix.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity-check rows.
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    /// `2^m - 1`, the number of rows of the extended parity-check matrix.
    pub fn big_m(&self) -> usize {
        (1usize << self.m()) - 1
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    /// Erasure correctability `d_min - 1`.
    pub fn tau(&self) -> usize {
        self.d_min - 1
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    pub fn systematic_positions(&self) -> &[usize] {
        &self.systematic_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    pub fn is_systematic_row(&self, row: usize) -> bool {
        self.systematic_positions.binary_search(&row).is_ok()
    }

    pub fn extended_parity_check(&self) -> BitMatrix {
        gf2::extend_parity_check(&self.h).expect("validated at construction")
    }

    /// Encodes a single column (a length-`k` message) into a length-`n`
    /// codeword.
    pub fn encode_column(&self, info: &BitVector) -> Result<BitVector, VerticalError> {
        if info.len() != self.k {
            return Err(VerticalError::RowCount {
                expected: self.k,
                found: info.len(),
            });
        }
        let mut word = BitVector::zeros(self.n());
        for (rank, &pos) in self.systematic_positions.iter().enumerate() {
            word.set(pos, info.get(rank));
        }
        for (&pos, sources) in self.parity_positions.iter().zip(&self.parity_sources) {
            let bit = sources.iter().fold(false, |acc, &s| acc ^ info.get(s));
            word.set(pos, bit);
        }
        Ok(word)
    }

    /// Generator matrix, one row per information position.
    pub fn generator(&self) -> BitMatrix {
        let rows: Vec<BitVector> = (0..self.k)
            .map(|i| {
                self.encode_column(&BitVector::unit(self.k, i))
                    .expect("unit message has length k")
            })
            .collect();
        BitMatrix::from_bit_vectors(&rows).expect("k >= 1")
    }
}

/// The `n x n'` array of horizontal codewords, row `i` being `c_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordMatrix {
    rows: Vec<BitVector>,
}

impl CodewordMatrix {
    pub fn new(rows: Vec<BitVector>) -> Result<Self, VerticalError> {
        let len = rows.first().ok_or(VerticalError::RaggedRows)?.len();
        if rows.iter().any(|r| r.len() != len) {
            return Err(VerticalError::RaggedRows);
        }
        Ok(CodewordMatrix { rows })
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    /// Number of rows, i.e. the vertical code length.
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Length of each horizontal codeword.
    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bools(self.rows.iter().map(|r| r.get(j)))
    }
}

/// Column-wise systematic encoding of `info_rows` with the vertical code.
///
/// Every parity row is the XOR of a subset of the information rows, so
/// when the inputs are horizontal codewords the parity rows are too.
pub fn encode_columns(
    info_rows: &[BitVector],
    code: &VerticalCode,
) -> Result<CodewordMatrix, VerticalError> {
    if info_rows.len() != code.k() {
        return Err(VerticalError::RowCount {
            expected: code.k(),
            found: info_rows.len(),
        });
    }
    let width = info_rows[0].len();
    if info_rows.iter().any(|r| r.len() != width) {
        return Err(VerticalError::RaggedRows);
    }
    let mut rows = vec![BitVector::zeros(width); code.n()];
    for (rank, &pos) in code.systematic_positions.iter().enumerate() {
        rows[pos] = info_rows[rank].clone();
    }
    for (&pos, sources) in code.parity_positions.iter().zip(&code.parity_sources) {
        let mut acc = BitVector::zeros(width);
        for &s in sources {
            acc.xor_assign(&info_rows[s])?;
        }
        rows[pos] = acc;
    }
    CodewordMatrix::new(rows)
}

/// Minimum distance by enumerating all `2^k - 1` nonzero codewords in Gray
/// code order.
pub fn compute_d_min(code: &VerticalCode) -> Result<usize, VerticalError> {
    let k = code.k();
    if k > MAX_EXHAUSTIVE_K {
        return Err(VerticalError::ExhaustiveTooLarge { k });
    }
    let g = code.generator();
    let rows: Vec<Vec<u64>> = (0..k).map(|i| g.row_words(i).to_vec()).collect();
    let mut word = vec![0u64; rows[0].len()];
    let mut best = usize::MAX;
    for step in 1u64..(1u64 << k) {
        let flip = step.trailing_zeros() as usize;
        for (w, r) in word.iter_mut().zip(&rows[flip]) {
            *w ^= r;
        }
        let weight: usize = word.iter().map(|w| w.count_ones() as usize).sum();
        best = best.min(weight);
    }
    Ok(best)
}

/// Minimum distance as the smallest number of columns of `h` summing to
/// zero. Explores column subsets by increasing size; returns `None` if
/// more than `budget` subsets would be needed.
pub fn min_dependent_columns(h: &BitMatrix, budget: u64) -> Option<usize> {
    let n = h.cols();
    let cols: Vec<BitVector> = (0..n).map(|c| h.column(c)).collect();
    if cols.iter().any(BitVector::is_zero) {
        return Some(1);
    }
    let mut seen = std::collections::HashSet::new();
    if cols.iter().any(|c| !seen.insert(c.clone())) {
        return Some(2);
    }
    // Weight 3: some pair sums to a third column.
    for i in 0..n {
        for j in i + 1..n {
            let mut s = cols[i].clone();
            s.xor_assign(&cols[j]).ok()?;
            if seen.contains(&s) {
                return Some(3);
            }
        }
    }
    let mut spent = 0u64;
    for w in 4..=n {
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            spent += 1;
            if spent > budget {
                return None;
            }
            let mut s = cols[idx[0]].clone();
            for &c in &idx[1..] {
                s.xor_assign(&cols[c]).ok()?;
            }
            if s.is_zero() {
                return Some(w);
            }
            // advance to the next w-subset in lexicographic order
            let mut pos = w;
            while pos > 0 && idx[pos - 1] == n - w + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for t in pos..w {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    None
}

/// Product code parameters: a vertical code over the columns of an LDPC
/// horizontal code.
#[derive(Clone, Debug)]
pub struct ProductCodeConfig {
    pub vertical: VerticalCode,
    pub horizontal: Arc<LdpcCode>,
}

impl ProductCodeConfig {
    pub fn new(vertical: VerticalCode, horizontal: Arc<LdpcCode>) -> Self {
        ProductCodeConfig {
            vertical,
            horizontal,
        }
    }

    /// `R * R'` where `R'` counts only transmitted (unpunctured) bits.
    pub fn overall_rate(&self) -> f64 {
        self.vertical.rate() * self.horizontal.transmitted_rate()
    }

    /// Systematically encodes `k x k'` information bits into the full
    /// codeword matrix: rows first, then columns.
    pub fn encode(&self, info: &[BitVector]) -> Result<CodewordMatrix, crate::Error> {
        let rows = info
            .iter()
            .map(|u| self.horizontal.encode(u))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(encode_columns(&rows, &self.vertical)?)
    }
}
