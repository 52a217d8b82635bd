//! Dense GF(2) vectors and matrices.
//!
//! Bits are packed into `u64` words, least significant bit first, so row
//! weights and masked intersections reduce to `count_ones` over a handful of
//! words. Besides the usual elimination routines this module provides the two
//! matrix modifications the product decoder is built on: the extended
//! parity-check matrix (every nonzero combination of the rows of `H`) and its
//! column-punctured restriction to a set of failed rows.

use std::fmt;

use thiserror::Error;

/// Largest number of parity rows accepted by [`extend_parity_check`].
pub const MAX_EXTEND_ROWS: usize = 20;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Errors raised by GF(2) operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no operands given")]
    NoOperands,
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry {value} at ({row}, {col}) is not a bit")]
    NotABit { row: usize, col: usize, value: u8 },
    #[error("{rows} parity rows exceed the limit of {max} for extension")]
    TooManyRows { rows: usize, max: usize },
    #[error("column {0} of the parity-check matrix is all-zero")]
    ZeroColumn(usize),
    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
    #[error("column index {0} selected twice")]
    DuplicateColumn(usize),
    #[error("column selection must be strictly increasing")]
    Unordered,
    #[error("column selection is empty")]
    EmptySelection,
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of `len` bits.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "bit vectors have at least one element");
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector from 0/1 bytes.
    pub fn from_bits(bits: &[u8]) -> Result<Self, Gf2Error> {
        if bits.is_empty() {
            return Err(Gf2Error::Empty);
        }
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => v.set(i, true),
                value => {
                    return Err(Gf2Error::NotABit {
                        row: 0,
                        col: i,
                        value,
                    })
                }
            }
        }
        Ok(v)
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; vectors hold at least one bit.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of positions where `self` and `other` differ.
    pub fn distance(&self, other: &BitVector) -> Result<usize, Gf2Error> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<(), Gf2Error> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Weight of `self AND other`.
    pub fn and_weight(&self, other: &BitVector) -> Result<usize, Gf2Error> {
        self.check_len(other)?;
        Ok(and_popcount(&self.words, &other.words))
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<bool, Gf2Error> {
        Ok(self.and_weight(other)? % 2 == 1)
    }

    /// Indices of the set bits in ascending order.
    pub fn ones_positions(&self) -> Vec<usize> {
        self.iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Packed storage, least significant bit first. Bits past `len` are zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bits as 0/1 bytes.
    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Keeps only the bits at `positions`, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        BitVector::from_bools(positions.iter().map(|&p| self.get(p)))
    }

    fn check_len(&self, other: &BitVector) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

#[inline]
fn and_popcount(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Elementwise XOR of equal-length vectors.
pub fn xor_rows<'a, I>(vs: I) -> Result<BitVector, Gf2Error>
where
    I: IntoIterator<Item = &'a BitVector>,
{
    let mut iter = vs.into_iter();
    let mut acc = iter.next().ok_or(Gf2Error::NoOperands)?.clone();
    for v in iter {
        acc.xor_assign(v)?;
    }
    Ok(acc)
}

/// A dense matrix over GF(2), stored row-major with packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, Gf2Error> {
        let first = rows.first().ok_or(Gf2Error::Empty)?.as_ref().len();
        if first == 0 {
            return Err(Gf2Error::Empty);
        }
        let mut m = Self::zeros(rows.len(), first);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != first {
                return Err(Gf2Error::RaggedRow {
                    row: r,
                    expected: first,
                    found: row.len(),
                });
            }
            for (c, &value) in row.iter().enumerate() {
                match value {
                    0 => {}
                    1 => m.set(r, c, true),
                    value => {
                        return Err(Gf2Error::NotABit {
                            row: r,
                            col: c,
                            value,
                        })
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_bit_vectors(rows: &[BitVector]) -> Result<Self, Gf2Error> {
        let first = rows.first().ok_or(Gf2Error::Empty)?;
        let mut m = Self::zeros(rows.len(), first.len());
        for (r, row) in rows.iter().enumerate() {
            if row.len() != first.len() {
                return Err(Gf2Error::RaggedRow {
                    row: r,
                    expected: first.len(),
                    found: row.len(),
                });
            }
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let word = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bools((0..self.rows).map(|r| self.get(r, c)))
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// Weight of row `r` restricted to the set bits of `mask`.
    pub fn row_weight_masked(&self, r: usize, mask: &BitVector) -> Result<usize, Gf2Error> {
        if mask.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                found: mask.len(),
            });
        }
        Ok(and_popcount(self.row_words(r), mask.words()))
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    /// Row `dst` ^= row `src`.
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let stride = self.stride;
        let (s, d) = (src * stride, dst * stride);
        for k in 0..stride {
            let w = self.data[s + k];
            self.data[d + k] ^= w;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// `self · v` over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(BitVector::from_bools((0..self.rows).map(|r| {
            and_popcount(self.row_words(r), v.words()) % 2 == 1
        })))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Reduced row echelon form by Gauss-Jordan elimination, pivoting on
    /// columns in the order given by `column_order`. Returns the reduced
    /// matrix and the pivot column of each nonzero row; rows past the rank
    /// are zero.
    pub fn reduce_in_order(&self, column_order: &[usize]) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for &c in column_order {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, next);
            for r in 0..m.rows {
                if r != next && m.get(r, c) {
                    m.xor_row_into(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        (m, pivots)
    }

    /// Reduced row echelon form with left-to-right pivoting.
    pub fn row_reduce(&self) -> BitMatrix {
        let order: Vec<usize> = (0..self.cols).collect();
        self.reduce_in_order(&order).0
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        self.reduce_in_order(&order).1.len()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// Builds the extended parity-check matrix `H_E` of `h`.
///
/// Row `b - 1` of the result is the XOR of the rows of `h` selected by the
/// bits of the nonzero mask `b` (bit `i` selects row `i`), for
/// `b = 1..=2^m - 1`. Rank-deficient inputs produce repeated rows.
pub fn extend_parity_check(h: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
    let m = h.rows();
    if m > MAX_EXTEND_ROWS {
        return Err(Gf2Error::TooManyRows {
            rows: m,
            max: MAX_EXTEND_ROWS,
        });
    }
    if let Some(c) = (0..h.cols()).find(|&c| h.column_weight(c) == 0) {
        return Err(Gf2Error::ZeroColumn(c));
    }
    let big_m = (1usize << m) - 1;
    let mut he = BitMatrix::zeros(big_m, h.cols());
    for mask in 1..=big_m {
        // row(mask) = row(mask without its lowest bit) ^ h[lowest bit]
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let dst = mask - 1;
        if rest != 0 {
            let src = (rest - 1) * he.stride;
            let d = dst * he.stride;
            for k in 0..he.stride {
                he.data[d + k] = he.data[src + k];
            }
        }
        let hrow = h.row_words(low);
        let d = dst * he.stride;
        for (k, w) in hrow.iter().enumerate() {
            he.data[d + k] ^= w;
        }
    }
    Ok(he)
}

/// Restricts `he` to the columns in `cols`, which must be strictly increasing.
pub fn puncture_columns(he: &BitMatrix, cols: &[usize]) -> Result<BitMatrix, Gf2Error> {
    if cols.is_empty() {
        return Err(Gf2Error::EmptySelection);
    }
    for (i, &c) in cols.iter().enumerate() {
        if c >= he.cols() {
            return Err(Gf2Error::ColumnOutOfRange {
                index: c,
                cols: he.cols(),
            });
        }
        if i > 0 {
            let prev = cols[i - 1];
            if prev == c {
                return Err(Gf2Error::DuplicateColumn(c));
            }
            if prev > c {
                return Err(Gf2Error::Unordered);
            }
        }
    }
    let mut hp = BitMatrix::zeros(he.rows(), cols.len());
    for r in 0..he.rows() {
        for (j, &c) in cols.iter().enumerate() {
            if he.get(r, c) {
                hp.set(r, j, true);
            }
        }
    }
    Ok(hp)
}

/// Smallest nonzero row weight and the first row attaining it, or `None`
/// when every row is zero.
pub fn min_nonzero_row_weight(m: &BitMatrix) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in 0..m.rows() {
        let w = m.row_weight(r);
        if w > 0 && best.is_none_or(|(bw, _)| w < bw) {
            best = Some((w, r));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming_h() -> BitMatrix {
        BitMatrix::from_rows(&[
            [1, 0, 1, 1, 1, 0, 0],
            [1, 1, 1, 0, 0, 1, 0],
            [0, 1, 1, 1, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn hamming_extension_matches_printed_rows() {
        let he = extend_parity_check(&hamming_h()).unwrap();
        assert_eq!(he.rows(), 7);
        // Printed order corresponds to masks 1, 2, 4, 3, 5, 6, 7.
        let printed: [[u8; 7]; 7] = [
            [1, 0, 1, 1, 1, 0, 0],
            [1, 1, 1, 0, 0, 1, 0],
            [0, 1, 1, 1, 0, 0, 1],
            [0, 1, 0, 1, 1, 1, 0],
            [1, 1, 0, 0, 1, 0, 1],
            [1, 0, 0, 1, 0, 1, 1],
            [0, 0, 1, 0, 1, 1, 1],
        ];
        let masks = [1, 2, 4, 3, 5, 6, 7];
        for (row, mask) in printed.iter().zip(masks) {
            assert_eq!(he.row(mask - 1), BitVector::from_bits(row).unwrap());
        }
    }

    #[test]
    fn spc_extension_is_itself() {
        let h = BitMatrix::from_rows(&[[1, 1, 1, 1]]).unwrap();
        assert_eq!(extend_parity_check(&h).unwrap(), h);
    }

    #[test]
    fn identity_extension() {
        let he = extend_parity_check(&BitMatrix::identity(2)).unwrap();
        let expected = BitMatrix::from_rows(&[[1, 0], [0, 1], [1, 1]]).unwrap();
        assert_eq!(he, expected);
    }

    #[test]
    fn extension_rejects_zero_column_and_large_m() {
        let h = BitMatrix::from_rows(&[[1, 0, 1]]).unwrap();
        assert_eq!(extend_parity_check(&h), Err(Gf2Error::ZeroColumn(1)));
        let big = BitMatrix::identity(21);
        assert!(matches!(
            extend_parity_check(&big),
            Err(Gf2Error::TooManyRows { rows: 21, .. })
        ));
    }

    #[test]
    fn rank_deficient_extension_repeats_rows() {
        let h = BitMatrix::from_rows(&[[1, 1], [1, 1]]).unwrap();
        let he = extend_parity_check(&h).unwrap();
        assert_eq!(he.rows(), 3);
        assert_eq!(he.row(0), he.row(1));
        assert!(he.row(2).is_zero());
    }

    #[test]
    fn puncture_printed_examples() {
        let he = extend_parity_check(&hamming_h()).unwrap();
        let hp = puncture_columns(&he, &[0, 1, 2]).unwrap();
        // Weight-1 rows of the first printed H_P sit at printed rows 6, 4
        // and 7, i.e. masks 6, 3 and 7.
        assert_eq!(hp.row(6 - 1).to_bits(), vec![1, 0, 0]);
        assert_eq!(hp.row(3 - 1).to_bits(), vec![0, 1, 0]);
        assert_eq!(hp.row(7 - 1).to_bits(), vec![0, 0, 1]);
        assert_eq!(min_nonzero_row_weight(&hp).map(|x| x.0), Some(1));

        let hp = puncture_columns(&he, &[0, 1, 3]).unwrap();
        assert_eq!(min_nonzero_row_weight(&hp), Some((2, 0)));
        assert_eq!(hp.row(0).to_bits(), vec![1, 0, 1]);
        let zero_rows = (0..hp.rows()).filter(|&r| hp.row_weight(r) == 0).count();
        assert_eq!(zero_rows, 1);
    }

    #[test]
    fn puncture_all_columns_is_identity() {
        let he = extend_parity_check(&hamming_h()).unwrap();
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(puncture_columns(&he, &all).unwrap(), he);
    }

    #[test]
    fn puncture_errors() {
        let he = extend_parity_check(&hamming_h()).unwrap();
        assert_eq!(
            puncture_columns(&he, &[0, 7]),
            Err(Gf2Error::ColumnOutOfRange { index: 7, cols: 7 })
        );
        assert_eq!(
            puncture_columns(&he, &[2, 2]),
            Err(Gf2Error::DuplicateColumn(2))
        );
        assert_eq!(puncture_columns(&he, &[3, 1]), Err(Gf2Error::Unordered));
        assert_eq!(puncture_columns(&he, &[]), Err(Gf2Error::EmptySelection));
    }

    #[test]
    fn min_weight_edge_cases() {
        let ones = BitMatrix::from_rows(&[[1, 1, 1, 1, 1]]).unwrap();
        assert_eq!(min_nonzero_row_weight(&ones), Some((5, 0)));
        let zero = BitMatrix::zeros(3, 4);
        assert_eq!(min_nonzero_row_weight(&zero), None);
    }

    #[test]
    fn xor_rows_cases() {
        let a = BitVector::from_bits(&[1, 0, 1, 0]).unwrap();
        let b = BitVector::from_bits(&[0, 1, 1, 0]).unwrap();
        assert_eq!(xor_rows([&a, &b]).unwrap().to_bits(), vec![1, 1, 0, 0]);
        assert_eq!(xor_rows([&a]).unwrap(), a);
        assert!(xor_rows([&a, &a]).unwrap().is_zero());
        let short = BitVector::zeros(3);
        assert!(matches!(
            xor_rows([&a, &short]),
            Err(Gf2Error::LengthMismatch { .. })
        ));
        assert_eq!(xor_rows(std::iter::empty()), Err(Gf2Error::NoOperands));
    }

    #[test]
    fn ranks() {
        assert_eq!(BitMatrix::identity(5).rank(), 5);
        assert_eq!(BitMatrix::zeros(4, 6).rank(), 0);
        assert_eq!(hamming_h().rank(), 3);
        let rref = hamming_h().row_reduce();
        assert_eq!(rref.row(0).to_bits(), vec![1, 0, 0, 1, 0, 1, 1]);
    }

    #[test]
    fn packed_rows_cross_word_boundaries() {
        let mut v = BitVector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.ones_positions(), vec![0, 64, 129]);
        let m = BitMatrix::from_bit_vectors(&[v.clone(), v.clone()]).unwrap();
        assert_eq!(m.row_weight_masked(1, &v).unwrap(), 3);
        assert_eq!(m.rank(), 1);
    }
}
