//! Exhaustive combined-decodability analysis of vertical codes.
//!
//! A vertical code is *ε combinable* when, for every set of ε failed rows,
//! some row of the extended parity-check matrix meets the set in exactly one
//! or two positions; its *combined-decodability* η is the largest ε for
//! which this holds at every size up to ε. Both are decided here by
//! enumerating subsets as `u128` masks, in lexicographic order, split into
//! prefix blocks that are processed in parallel and merged in order.

use rayon::prelude::*;
use thiserror::Error;

use crate::vertical::VerticalCode;

/// Default cap on the number of subsets a single enumeration may visit.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Longest code the `u128` subset masks can hold.
pub const MAX_LENGTH: usize = 128;

#[derive(Debug, Error)]
pub enum DecodabilityError {
    #[error("code length {0} exceeds the supported maximum of {MAX_LENGTH}")]
    TooLong(usize),
    #[error("subset size {eps} is outside 1..={n}")]
    BadSize { eps: usize, n: usize },
    #[error("C({n}, {e}) = {subsets} subsets exceeds the budget of {budget}")]
    BudgetExceeded {
        n: usize,
        e: usize,
        subsets: u128,
        budget: u128,
    },
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// The rows of `H_E` as column masks, ready for enumeration.
#[derive(Clone, Debug)]
pub struct Analyzer {
    n: usize,
    rows: Vec<u128>,
    budget: u128,
}

impl Analyzer {
    pub fn new(code: &VerticalCode) -> Result<Self, DecodabilityError> {
        let n = code.n();
        if n > MAX_LENGTH {
            return Err(DecodabilityError::TooLong(n));
        }
        let he = code.extended_parity_check();
        let rows = (0..he.rows())
            .map(|j| {
                he.row(j)
                    .ones_positions()
                    .into_iter()
                    .fold(0u128, |m, c| m | (1u128 << c))
            })
            .collect();
        Ok(Analyzer {
            n,
            rows,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether some row of `H_E` meets `subset` in one or two positions.
    pub fn has_w12(&self, subset: u128) -> bool {
        self.rows.iter().any(|&r| {
            let c = (r & subset).count_ones();
            c == 1 || c == 2
        })
    }

    fn check_size(&self, e: usize) -> Result<(), DecodabilityError> {
        if e == 0 || e > self.n {
            return Err(DecodabilityError::BadSize { eps: e, n: self.n });
        }
        let subsets = binomial(self.n, e);
        if subsets > self.budget {
            return Err(DecodabilityError::BudgetExceeded {
                n: self.n,
                e,
                subsets,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Lexicographically first `e`-subset without a weight-1/2 row.
    pub fn first_failing(&self, e: usize) -> Result<Option<Vec<usize>>, DecodabilityError> {
        self.check_size(e)?;
        let found = prefixes(self.n, e)
            .into_par_iter()
            .map(|prefix| {
                let mut hit = None;
                scan(self.n, e, &prefix, |mask, idx| {
                    if self.has_w12(mask) {
                        true
                    } else {
                        hit = Some(idx.to_vec());
                        false
                    }
                });
                hit
            })
            .find_first(|h| h.is_some())
            .flatten();
        Ok(found)
    }

    /// Number of `e`-subsets that have a weight-1/2 row.
    pub fn count_with_w12(&self, e: usize) -> Result<u64, DecodabilityError> {
        self.check_size(e)?;
        Ok(prefixes(self.n, e)
            .into_par_iter()
            .map(|prefix| {
                let mut count = 0u64;
                scan(self.n, e, &prefix, |mask, _| {
                    count += self.has_w12(mask) as u64;
                    true
                });
                count
            })
            .sum())
    }
}

/// Fixed leading indices that partition the `e`-subsets into work blocks.
fn prefixes(n: usize, e: usize) -> Vec<Vec<usize>> {
    if e < 3 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if n - b > e - 2 {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// Visits, in lexicographic order, every `e`-subset starting with `prefix`,
/// until `visit` returns `false`.
fn scan(n: usize, e: usize, prefix: &[usize], mut visit: impl FnMut(u128, &[usize]) -> bool) {
    let fixed = prefix.len();
    let start = prefix.last().map_or(0, |&p| p + 1);
    let free = e - fixed;
    if n < start + free {
        return;
    }
    let mut idx: Vec<usize> = prefix.to_vec();
    idx.extend(start..start + free);
    let base = prefix.iter().fold(0u128, |m, &i| m | (1u128 << i));
    loop {
        let mask = idx[fixed..].iter().fold(base, |m, &i| m | (1u128 << i));
        if !visit(mask, &idx) {
            return;
        }
        let Some(pos) = (fixed..e).rev().find(|&p| idx[p] < n - e + p) else {
            return;
        };
        idx[pos] += 1;
        for t in pos + 1..e {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// `true` iff every `eps`-subset of rows has a check of weight one or two.
pub fn is_epsilon_combinable(
    code: &VerticalCode,
    eps: usize,
    budget: u128,
) -> Result<bool, DecodabilityError> {
    Ok(epsilon_witness(code, eps, budget)?.is_none())
}

/// The lexicographically first `eps`-subset with no check of weight one or
/// two, if any.
pub fn epsilon_witness(
    code: &VerticalCode,
    eps: usize,
    budget: u128,
) -> Result<Option<Vec<usize>>, DecodabilityError> {
    Analyzer::new(code)?.with_budget(budget).first_failing(eps)
}

/// Whether the `H_P` of `subset` has a row of weight one or two.
pub fn subset_has_w12(code: &VerticalCode, subset: &[usize]) -> Result<bool, DecodabilityError> {
    let a = Analyzer::new(code)?;
    Ok(a.has_w12(subset.iter().fold(0u128, |m, &i| m | (1u128 << i))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodabilityReport {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub eta: usize,
    /// First failing subset of size `eta + 1`; `None` when every size up to
    /// `n` is combinable.
    pub witness: Option<Vec<usize>>,
}

/// Combined-decodability with its witness.
pub fn combined_decodability(
    code: &VerticalCode,
    budget: u128,
) -> Result<DecodabilityReport, DecodabilityError> {
    let a = Analyzer::new(code)?.with_budget(budget);
    let mut witness = None;
    let mut eta = 0;
    for eps in 1..=code.n() {
        match a.first_failing(eps)? {
            None => eta = eps,
            Some(w) => {
                witness = Some(w);
                break;
            }
        }
    }
    Ok(DecodabilityReport {
        code: code.name().to_string(),
        n: code.n(),
        k: code.k(),
        eta,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HpRow {
    pub e: usize,
    pub total: u64,
    pub with_w12: u64,
    pub without_w12: u64,
}

/// Counts of failed-row patterns with and without a weight-1/2 check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpDistribution {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub rows: Vec<HpRow>,
}

impl HpDistribution {
    pub const CSV_HEADER: [&'static str; 7] =
        ["code", "n", "k", "e", "total", "with_w12", "without_w12"];

    /// CSV with the columns of [`Self::CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                self.code.clone(),
                self.n.to_string(),
                self.k.to_string(),
                r.e.to_string(),
                r.total.to_string(),
                r.with_w12.to_string(),
                r.without_w12.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
    }
}

pub fn hp_distribution(
    code: &VerticalCode,
    e_values: &[usize],
    budget: u128,
) -> Result<HpDistribution, DecodabilityError> {
    let a = Analyzer::new(code)?.with_budget(budget);
    let rows = e_values
        .iter()
        .map(|&e| {
            let with_w12 = a.count_with_w12(e)?;
            let total = binomial(code.n(), e) as u64;
            Ok(HpRow {
                e,
                total,
                with_w12,
                without_w12: total - with_w12,
            })
        })
        .collect::<Result<_, DecodabilityError>>()?;
    Ok(HpDistribution {
        code: code.name().to_string(),
        n: code.n(),
        k: code.k(),
        rows,
    })
}

/// One structural implication evaluated on a concrete code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub statement: &'static str,
    pub premise: bool,
    pub conclusion: bool,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub code: String,
    pub n: usize,
    /// `M = 2^m - 1`.
    pub big_m: usize,
    pub d_min: usize,
    /// ε-combinability for ε = 3, 4, 5 (`None` when ε > n).
    pub combinable: [Option<bool>; 3],
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(LemmaCheck::holds)
    }
}

/// Evaluates the structural implications between ε-combinability, code
/// length and the column multiset of `H`.
pub fn check_structural_lemmas(
    code: &VerticalCode,
    budget: u128,
) -> Result<LemmaReport, DecodabilityError> {
    let a = Analyzer::new(code)?.with_budget(budget);
    let n = code.n();
    let big_m = code.big_m();
    let mut combinable = [None; 3];
    for (slot, eps) in combinable.iter_mut().zip(3..=5) {
        if eps <= n {
            *slot = Some(a.first_failing(eps)?.is_none());
        }
    }
    let c = |eps: usize| combinable[eps - 3].unwrap_or(false);
    let each_column = |times: usize| column_multiplicities(code) == Some(times);

    let checks = vec![
        LemmaCheck {
            statement: "3-combinable implies n <= 2M",
            premise: c(3),
            conclusion: n <= 2 * big_m,
        },
        LemmaCheck {
            statement: "3-combinable with n = 2M implies every nonzero column appears twice",
            premise: c(3) && n == 2 * big_m,
            conclusion: each_column(2),
        },
        LemmaCheck {
            statement: "4-combinable implies n <= 3M",
            premise: c(4),
            conclusion: n <= 3 * big_m,
        },
        LemmaCheck {
            statement: "4-combinable with n = 3M implies every nonzero column appears three times",
            premise: c(4) && n == 3 * big_m,
            conclusion: each_column(3),
        },
        LemmaCheck {
            statement: "d_min >= 3 and 5-combinable imply n <= M with distinct columns",
            premise: code.d_min() >= 3 && c(5),
            conclusion: n <= big_m && distinct_columns(code),
        },
        LemmaCheck {
            statement: "3-combinable implies 4-combinable",
            premise: c(3) && n >= 4,
            conclusion: c(4),
        },
        LemmaCheck {
            statement: "5-combinable implies n <= 2M + 2 (empirical)",
            premise: c(5),
            conclusion: n <= 2 * big_m + 2,
        },
    ];
    Ok(LemmaReport {
        code: code.name().to_string(),
        n,
        big_m,
        d_min: code.d_min(),
        combinable,
        checks,
    })
}

fn column_values(code: &VerticalCode) -> Vec<u64> {
    let h = code.h();
    (0..h.cols())
        .map(|j| (0..h.rows()).fold(0u64, |v, r| v | ((h.get(r, j) as u64) << r)))
        .collect()
}

/// `Some(t)` when every nonzero m-tuple appears exactly `t` times as a
/// column of `H`.
fn column_multiplicities(code: &VerticalCode) -> Option<usize> {
    let m = code.m();
    if m >= 20 {
        return None;
    }
    let mut counts = vec![0usize; 1 << m];
    for v in column_values(code) {
        counts[v as usize] += 1;
    }
    let t = counts[1];
    counts[1..].iter().all(|&c| c == t).then_some(t)
}

fn distinct_columns(code: &VerticalCode) -> bool {
    let mut cols = column_values(code);
    let len = cols.len();
    cols.sort_unstable();
    cols.dedup();
    cols.len() == len
}
