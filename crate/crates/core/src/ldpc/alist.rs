//! The alist sparse-matrix interchange format.
//!
//! Layout (all indices 1-based, whitespace separated):
//!
//! ```text
//! n m                      number of columns (variables), rows (checks)
//! max_col_deg max_row_deg
//! col degrees              n entries
//! row degrees              m entries
//! n lines                  check indices of each column, zero padded
//! m lines                  variable indices of each row, zero padded
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::gf2::BitMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlistError {
    #[error("alist line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("alist ended early: {0}")]
    Truncated(&'static str),
    #[error("alist line {line}: index {index} out of range 1..={max}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        max: usize,
    },
    #[error("alist line {line}: declared degree {declared}, found {found} entries")]
    DegreeMismatch {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("column and row lists describe different matrices")]
    Inconsistent,
}

/// A sparse parity-check matrix as adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseParityCheck {
    n: usize,
    checks: Vec<Vec<usize>>,
    vars: Vec<Vec<usize>>,
}

impl SparseParityCheck {
    /// Builds from the variable lists of each check. Duplicate entries
    /// within a check cancel over GF(2) and are dropped in pairs.
    pub fn from_checks(n: usize, checks: Vec<Vec<usize>>) -> Self {
        let mut vars = vec![Vec::new(); n];
        let checks: Vec<Vec<usize>> = checks
            .into_iter()
            .map(|mut row| {
                row.sort_unstable();
                let mut out: Vec<usize> = Vec::with_capacity(row.len());
                for v in row {
                    if out.last() == Some(&v) {
                        out.pop();
                    } else {
                        out.push(v);
                    }
                }
                out
            })
            .collect();
        for (c, row) in checks.iter().enumerate() {
            for &v in row {
                assert!(v < n, "variable {v} out of range {n}");
                vars[v].push(c);
            }
        }
        SparseParityCheck { n, checks, vars }
    }

    pub fn from_dense(h: &BitMatrix) -> Self {
        let checks = (0..h.rows()).map(|r| h.row(r).ones_positions()).collect();
        Self::from_checks(h.cols(), checks)
    }

    /// Number of variables (columns).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks (rows).
    pub fn m(&self) -> usize {
        self.checks.len()
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.checks
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.vars
    }

    pub fn edges(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.m().max(1), self.n);
        for (c, row) in self.checks.iter().enumerate() {
            for &v in row {
                h.set(c, v, true);
            }
        }
        h
    }

    /// Serialises in alist form with zero padding up to the maximum degree.
    pub fn to_alist(&self) -> String {
        let max_col = self.vars.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.checks.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        let join = |xs: &mut dyn Iterator<Item = usize>| {
            xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        writeln!(out, "{} {}", self.n, self.m()).unwrap();
        writeln!(out, "{max_col} {max_row}").unwrap();
        writeln!(out, "{}", join(&mut self.vars.iter().map(Vec::len))).unwrap();
        writeln!(out, "{}", join(&mut self.checks.iter().map(Vec::len))).unwrap();
        for list in &self.vars {
            let mut padded = list.iter().map(|c| c + 1).chain(std::iter::repeat(0));
            writeln!(out, "{}", join(&mut padded.by_ref().take(max_col))).unwrap();
        }
        for list in &self.checks {
            let mut padded = list.iter().map(|v| v + 1).chain(std::iter::repeat(0));
            writeln!(out, "{}", join(&mut padded.by_ref().take(max_row))).unwrap();
        }
        out
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &'static str) -> Result<(usize, Vec<usize>), AlistError> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let numbers = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| AlistError::Malformed {
                        line: i + 1,
                        msg: format!("`{t}` is not a non-negative integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((i + 1, numbers));
        }
        Err(AlistError::Truncated(what))
    }
}

fn expect_len(line: usize, numbers: &[usize], len: usize) -> Result<(), AlistError> {
    if numbers.len() != len {
        return Err(AlistError::Malformed {
            line,
            msg: format!("expected {len} entries, found {}", numbers.len()),
        });
    }
    Ok(())
}

/// Parses an alist description.
pub fn parse(text: &str) -> Result<SparseParityCheck, AlistError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (l, dims) = lines.next_numbers("dimensions")?;
    expect_len(l, &dims, 2)?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(AlistError::Malformed {
            line: l,
            msg: "dimensions must be positive".into(),
        });
    }
    let (l, maxes) = lines.next_numbers("maximum degrees")?;
    expect_len(l, &maxes, 2)?;
    let (l, col_deg) = lines.next_numbers("column degrees")?;
    expect_len(l, &col_deg, n)?;
    let (l, row_deg) = lines.next_numbers("row degrees")?;
    expect_len(l, &row_deg, m)?;

    let mut read_lists = |count: usize,
                          degrees: &[usize],
                          max: usize,
                          what: &'static str|
     -> Result<Vec<Vec<usize>>, AlistError> {
        let mut lists = Vec::with_capacity(count);
        for &declared in degrees.iter().take(count) {
            // Zero-degree entries may be written as an empty or all-zero line.
            let (line, numbers) = if declared == 0 {
                match lines.next_numbers(what) {
                    Ok((line, numbers)) if numbers.iter().all(|&x| x == 0) => (line, numbers),
                    Ok((line, numbers)) => {
                        return Err(AlistError::DegreeMismatch {
                            line,
                            declared,
                            found: numbers.iter().filter(|&&x| x != 0).count(),
                        })
                    }
                    Err(e) => return Err(e),
                }
            } else {
                lines.next_numbers(what)?
            };
            let entries: Vec<usize> = numbers.into_iter().filter(|&x| x != 0).collect();
            if entries.len() != declared {
                return Err(AlistError::DegreeMismatch {
                    line,
                    declared,
                    found: entries.len(),
                });
            }
            if let Some(&bad) = entries.iter().find(|&&x| x > max) {
                return Err(AlistError::IndexOutOfRange {
                    line,
                    index: bad,
                    max,
                });
            }
            lists.push(entries.into_iter().map(|x| x - 1).collect());
        }
        Ok(lists)
    };

    let col_lists = read_lists(n, &col_deg, m, "column lists")?;
    let row_lists = read_lists(m, &row_deg, n, "row lists")?;

    let sparse = SparseParityCheck::from_checks(n, row_lists);
    let mut from_cols = vec![Vec::new(); m];
    for (v, list) in col_lists.iter().enumerate() {
        for &c in list {
            from_cols[c].push(v);
        }
    }
    for (c, mut list) in from_cols.into_iter().enumerate() {
        list.sort_unstable();
        if list != sparse.checks[c] {
            return Err(AlistError::Inconsistent);
        }
    }
    Ok(sparse)
}
