//! Soft combining of failed rows through the vertical parity checks.
//!
//! Every row of the extended parity-check matrix `H_E` says that the XOR of
//! its participating rows is zero. Restricted to the rows that failed
//! belief propagation, a check of weight one pins the failed row down
//! directly (Case 1); a check of weight two or more yields a second,
//! independent soft observation of one failed row (Cases 2 and 3), which is
//! added to that row's own LLRs and decoded again.
//!
//! [`ProductDecoder`] runs the whole loop over a codeword matrix; the free
//! functions here are its building blocks.

mod boxplus;
mod decoder;

pub use boxplus::{boxplus, boxplus_vectors, flip_by, hard_to_llr};
pub use decoder::{
    product_decode, Action, CombinePolicy, Event, Groupings, ProductDecodeResult, ProductDecoder,
};

use thiserror::Error;

use crate::gf2::{puncture_columns, BitMatrix, BitVector};
use crate::ldpc::{bp_decode, DecodeOutcome, DecodeStatus, LdpcError, LlrVector};
use crate::vertical::ProductCodeConfig;

#[derive(Debug, Error)]
pub enum CombinerError {
    #[error("expected {expected} rows, got {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("Case 1 needs a plan with e_min = 1, got {0}")]
    NotCase1(usize),
    #[error("Case 2 needs a plan with e_min = 2, got {0}")]
    NotCase2(usize),
    #[error("Case 3 needs a plan with e_min >= 3, got {0}")]
    NotCase3(usize),
    #[error("row {0} is not in the plan's failed support")]
    TargetNotInSupport(usize),
    #[error("participant row {0} has not been decoded successfully")]
    ParticipantFailed(usize),
    #[error("grouping must split the support into two nonempty parts")]
    BadGrouping,
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Gf2(#[from] crate::gf2::Gf2Error),
}

/// Which soft values of a failed row enter a combination.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LlrSource {
    /// The received channel LLRs.
    #[default]
    Channel,
    /// The posterior LLRs left by the last BP run on the row.
    Posterior,
}

/// Received rows of one codeword matrix together with their current
/// decoding state.
#[derive(Clone, Debug)]
pub struct SoftMatrix<'a> {
    config: &'a ProductCodeConfig,
    rows: Vec<LlrVector>,
    outcomes: Vec<DecodeOutcome>,
    failed: Vec<usize>,
    source: LlrSource,
}

impl<'a> SoftMatrix<'a> {
    /// Wraps received rows and their decoding outcomes.
    pub fn new(
        config: &'a ProductCodeConfig,
        rows: Vec<LlrVector>,
        outcomes: Vec<DecodeOutcome>,
    ) -> Result<Self, CombinerError> {
        let n = config.vertical.n();
        let width = config.horizontal.n();
        for len in [rows.len(), outcomes.len()] {
            if len != n {
                return Err(CombinerError::RowCount {
                    expected: n,
                    found: len,
                });
            }
        }
        for (row, (r, o)) in rows.iter().zip(&outcomes).enumerate() {
            for found in [r.len(), o.codeword.len()] {
                if found != width {
                    return Err(CombinerError::RowLength {
                        row,
                        expected: width,
                        found,
                    });
                }
            }
        }
        let failed = (0..n).filter(|&i| !outcomes[i].is_success()).collect();
        Ok(SoftMatrix {
            config,
            rows,
            outcomes,
            failed,
            source: LlrSource::Channel,
        })
    }

    /// Belief-propagation decodes every received row.
    pub fn decode(
        config: &'a ProductCodeConfig,
        rows: Vec<LlrVector>,
        max_iters: usize,
    ) -> Result<Self, CombinerError> {
        let width = config.horizontal.n();
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(CombinerError::RowLength {
                row,
                expected: width,
                found: r.len(),
            });
        }
        let outcomes = rows
            .iter()
            .map(|r| bp_decode(&config.horizontal, r, max_iters))
            .collect();
        Self::new(config, rows, outcomes)
    }

    pub fn with_source(mut self, source: LlrSource) -> Self {
        self.source = source;
        self
    }

    pub fn config(&self) -> &ProductCodeConfig {
        self.config
    }

    pub fn rows(&self) -> &[LlrVector] {
        &self.rows
    }

    pub fn outcomes(&self) -> &[DecodeOutcome] {
        &self.outcomes
    }

    /// Indices of rows whose outcome is a failure, ascending.
    pub fn failed(&self) -> &[usize] {
        &self.failed
    }

    pub fn is_failed(&self, row: usize) -> bool {
        !self.outcomes[row].is_success()
    }

    /// Soft values of `row` used when it takes part in a combination.
    pub fn soft(&self, row: usize) -> &LlrVector {
        match self.source {
            LlrSource::Channel => &self.rows[row],
            LlrSource::Posterior => &self.outcomes[row].final_llrs,
        }
    }

    /// Marks `row` as decoded to `word`. The word is not checked here.
    pub fn mark_recovered(&mut self, row: usize, word: BitVector, iterations: usize) {
        let clamp = self.rows[row].clamp();
        self.outcomes[row] = DecodeOutcome {
            status: DecodeStatus::Success,
            final_llrs: hard_to_llr(&word, clamp),
            codeword: word,
            iterations_used: iterations,
        };
        self.failed.retain(|&i| i != row);
    }

    pub fn into_outcomes(self) -> Vec<DecodeOutcome> {
        self.outcomes
    }
}

/// One attempt to use a vertical check on the current failed set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedecodePlan {
    /// Index of the check: a row of `H_E`, or, at indices past the last
    /// row, a check derived during decoding.
    pub he_row: usize,
    /// All rows taking part in the check, ascending.
    pub participants: Vec<usize>,
    /// Participants that are currently failed, ascending.
    pub support: Vec<usize>,
    pub e_min: usize,
    /// Rows whose XOR is to be re-decoded.
    pub target: Vec<usize>,
    /// The remaining failed participants.
    pub complement: Vec<usize>,
    /// Known XOR of all participants; `None` means zero, as for every row
    /// of `H_E`.
    pub rhs: Option<BitVector>,
}

impl RedecodePlan {
    /// Plan for a check whose participants are `participants`, targeting the
    /// first failed participant. Returns `None` when no participant failed.
    pub fn for_check(
        soft: &SoftMatrix<'_>,
        he_row: usize,
        participants: Vec<usize>,
        rhs: Option<BitVector>,
    ) -> Option<Self> {
        let support: Vec<usize> = participants
            .iter()
            .copied()
            .filter(|&i| soft.is_failed(i))
            .collect();
        let (&first, rest) = support.split_first()?;
        Some(RedecodePlan {
            he_row,
            e_min: support.len(),
            target: vec![first],
            complement: rest.to_vec(),
            participants,
            support,
            rhs,
        })
    }

    /// Same check with a different target group; the complement becomes
    /// the rest of the support.
    pub fn with_target(&self, target: &[usize]) -> Result<Self, CombinerError> {
        if target.is_empty() {
            return Err(CombinerError::BadGrouping);
        }
        if let Some(&t) = target.iter().find(|t| !self.support.contains(t)) {
            return Err(CombinerError::TargetNotInSupport(t));
        }
        let mut target = target.to_vec();
        target.sort_unstable();
        target.dedup();
        let complement = self
            .support
            .iter()
            .copied()
            .filter(|i| !target.contains(i))
            .collect();
        Ok(RedecodePlan {
            target,
            complement,
            ..self.clone()
        })
    }

    /// XOR of the decoded words of every non-failed participant and the
    /// check's right-hand side.
    fn known_word(&self, soft: &SoftMatrix<'_>) -> Result<BitVector, CombinerError> {
        let mut acc = self
            .rhs
            .clone()
            .unwrap_or_else(|| BitVector::zeros(soft.config.horizontal.n()));
        for &i in &self.participants {
            if self.support.contains(&i) {
                continue;
            }
            let o = &soft.outcomes[i];
            if !o.is_success() {
                return Err(CombinerError::ParticipantFailed(i));
            }
            acc.xor_assign(&o.codeword)?;
        }
        Ok(acc)
    }
}

/// Picks the lowest-index row of `he` with the fewest failed participants.
///
/// Returns `None` when no row of `he` touches a failed row.
pub fn select_plan(soft: &SoftMatrix<'_>, he: &BitMatrix) -> Option<RedecodePlan> {
    if soft.failed.is_empty() {
        return None;
    }
    let hp = puncture_columns(he, &soft.failed).ok()?;
    let (_, j) = crate::gf2::min_nonzero_row_weight(&hp)?;
    RedecodePlan::for_check(soft, j, he.row(j).ones_positions(), None)
}

/// Case 1: recovers the single failed participant as the XOR of all others.
pub fn case1_recover(
    soft: &SoftMatrix<'_>,
    plan: &RedecodePlan,
) -> Result<BitVector, CombinerError> {
    if plan.e_min != 1 {
        return Err(CombinerError::NotCase1(plan.e_min));
    }
    plan.known_word(soft)
}

/// Case 2: `r_target + (r_other ⊞ r̄_known)` for a check with two failed
/// participants.
pub fn case2_combine(
    soft: &SoftMatrix<'_>,
    plan: &RedecodePlan,
    target: usize,
) -> Result<LlrVector, CombinerError> {
    if plan.e_min != 2 {
        return Err(CombinerError::NotCase2(plan.e_min));
    }
    combine(soft, &plan.with_target(&[target])?)
}

/// Case 3: `⊞ r_target-group + (⊞ r_complement ⊞ r̄_known)`, with a proper
/// split of three or more failed participants.
pub fn case3_combine(
    soft: &SoftMatrix<'_>,
    plan: &RedecodePlan,
) -> Result<LlrVector, CombinerError> {
    if plan.e_min < 3 {
        return Err(CombinerError::NotCase3(plan.e_min));
    }
    combine(soft, plan)
}

/// Combined observation of the XOR of `plan.target` for any proper split.
pub fn combine(soft: &SoftMatrix<'_>, plan: &RedecodePlan) -> Result<LlrVector, CombinerError> {
    if plan.target.is_empty() || plan.complement.is_empty() {
        return Err(CombinerError::BadGrouping);
    }
    let known = plan.known_word(soft)?;
    let target: Vec<&LlrVector> = plan.target.iter().map(|&i| soft.soft(i)).collect();
    let other: Vec<&LlrVector> = plan.complement.iter().map(|&i| soft.soft(i)).collect();
    // ⊞ over known words reduces to one sign flip by their XOR.
    let other = flip_by(&boxplus_vectors(&other)?, &known);
    Ok(boxplus_vectors(&target)?.add(&other)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::{LdpcCode, DEFAULT_CLAMP};
    use crate::vertical::VerticalCode;
    use std::sync::Arc;

    const C: f64 = DEFAULT_CLAMP;

    fn config(vertical: &str) -> ProductCodeConfig {
        ProductCodeConfig::new(
            VerticalCode::from_spec(vertical).unwrap(),
            Arc::new(LdpcCode::from_spec("bundled:96").unwrap()),
        )
    }

    fn word(seed: usize, len: usize) -> BitVector {
        BitVector::from_bools((0..len).map(|j| (j * 7 + seed * 13) % 5 < 2))
    }

    /// A soft matrix where rows in `failed` carry `r` values and failure
    /// outcomes, and the rest are decoded to `words`.
    fn fixture<'a>(
        cfg: &'a ProductCodeConfig,
        words: &[BitVector],
        failed: &[usize],
        r: impl Fn(usize) -> LlrVector,
    ) -> SoftMatrix<'a> {
        let rows: Vec<LlrVector> = (0..words.len()).map(&r).collect();
        let outcomes = (0..words.len())
            .map(|i| DecodeOutcome {
                status: if failed.contains(&i) {
                    DecodeStatus::Failure
                } else {
                    DecodeStatus::Success
                },
                codeword: words[i].clone(),
                iterations_used: 0,
                final_llrs: hard_to_llr(&words[i], C),
            })
            .collect();
        SoftMatrix::new(cfg, rows, outcomes).unwrap()
    }

    fn ramp(i: usize) -> LlrVector {
        LlrVector::with_default_clamp(
            (0..96)
                .map(|j| ((i * 31 + j * 7) % 17) as f64 - 8.0)
                .collect(),
        )
    }

    #[test]
    fn plan_selection_hamming() {
        let cfg = config("hamming:3");
        let he = cfg.vertical.extended_parity_check();
        let words: Vec<BitVector> = (0..7).map(|_| BitVector::zeros(96)).collect();
        // failed s1, s2, s3: some check touches exactly one of them
        let soft = fixture(&cfg, &words, &[0, 1, 2], ramp);
        assert_eq!(select_plan(&soft, &he).unwrap().e_min, 1);
        // failed s1, s2, s4: best check has weight 2 and is 1 0 1 1 1 0 0
        let soft = fixture(&cfg, &words, &[0, 1, 3], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        assert_eq!(plan.e_min, 2);
        assert_eq!(he.row(plan.he_row).to_bits(), vec![1, 0, 1, 1, 1, 0, 0]);
        assert_eq!(plan.support, vec![0, 3]);
        assert_eq!(plan.participants, vec![0, 2, 3, 4]);
        // nothing failed
        let soft = fixture(&cfg, &words, &[], ramp);
        assert!(select_plan(&soft, &he).is_none());
    }

    #[test]
    fn spc_parity_row_alone() {
        let cfg = config("spc:4");
        let he = cfg.vertical.extended_parity_check();
        let words: Vec<BitVector> = (0..4).map(|_| BitVector::zeros(96)).collect();
        let soft = fixture(&cfg, &words, &[3], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        assert_eq!((plan.e_min, plan.support.clone()), (1, vec![3]));
    }

    #[test]
    fn case1_xor_of_the_rest() {
        let cfg = config("spc:4");
        let he = cfg.vertical.extended_parity_check();
        let (s1, s3) = (word(1, 96), word(3, 96));
        let s2 = word(2, 96);
        let mut p = s1.clone();
        p.xor_assign(&s2).unwrap();
        p.xor_assign(&s3).unwrap();
        let words = vec![s1, BitVector::zeros(96), s3, p];
        let soft = fixture(&cfg, &words, &[1], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        assert_eq!(case1_recover(&soft, &plan).unwrap(), s2);
    }

    #[test]
    fn case1_hamming_last_check() {
        let cfg = config("hamming:3");
        let he = cfg.vertical.extended_parity_check();
        let info: Vec<BitVector> = (0..4).map(|i| word(i, 96)).collect();
        let m = crate::vertical::encode_columns(&info, &cfg.vertical).unwrap();
        let soft = fixture(&cfg, m.rows(), &[2], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        assert_eq!(plan.e_min, 1);
        assert_eq!(case1_recover(&soft, &plan).unwrap(), info[2]);
        // s3 ⊕ p1 ⊕ p2 ⊕ p3 = 0 is one of the usable checks
        let alt = RedecodePlan::for_check(&soft, 99, vec![2, 4, 5, 6], None).unwrap();
        assert_eq!(case1_recover(&soft, &alt).unwrap(), info[2]);
    }

    #[test]
    fn case2_flips_signs_by_known_rows() {
        let cfg = config("hamming:3");
        let he = cfg.vertical.extended_parity_check();
        let words: Vec<BitVector> = (0..7).map(|i| word(i, 96)).collect();
        let soft = fixture(&cfg, &words, &[0, 1, 3], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        let got = case2_combine(&soft, &plan, 0).unwrap();
        let mut known = words[2].clone();
        known.xor_assign(&words[4]).unwrap();
        let expected = ramp(0).add(&flip_by(&ramp(3), &known)).unwrap();
        assert_eq!(got, expected);
        // identical to the literal fold over r̄ vectors
        let literal = boxplus_vectors(&[
            &ramp(3),
            &hard_to_llr(&words[2], C),
            &hard_to_llr(&words[4], C),
        ])
        .unwrap();
        assert_eq!(got, ramp(0).add(&literal).unwrap());
        assert!(matches!(
            case2_combine(&soft, &plan, 1),
            Err(CombinerError::TargetNotInSupport(1))
        ));
    }

    #[test]
    fn case2_with_zero_participants_adds() {
        let cfg = config("spc:4");
        let he = cfg.vertical.extended_parity_check();
        let words: Vec<BitVector> = (0..4).map(|_| BitVector::zeros(96)).collect();
        let soft = fixture(&cfg, &words, &[0, 2], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        assert_eq!(
            case2_combine(&soft, &plan, 2).unwrap(),
            ramp(2).add(&ramp(0)).unwrap()
        );
    }

    #[test]
    fn case3_singleton_and_pair_groups() {
        let cfg = config("spc:6");
        let he = cfg.vertical.extended_parity_check();
        let words: Vec<BitVector> = (0..6).map(|i| word(i, 96)).collect();
        let soft = fixture(&cfg, &words, &[0, 1, 2], ramp);
        let plan = select_plan(&soft, &he).unwrap();
        assert_eq!(plan.e_min, 3);
        let mut known = words[3].clone();
        known.xor_assign(&words[4]).unwrap();
        known.xor_assign(&words[5]).unwrap();
        let got = case3_combine(&soft, &plan).unwrap();
        let rest = flip_by(&boxplus_vectors(&[&ramp(1), &ramp(2)]).unwrap(), &known);
        assert_eq!(got, ramp(0).add(&rest).unwrap());

        let pair = plan.with_target(&[2, 0]).unwrap();
        assert_eq!(pair.target, vec![0, 2]);
        assert_eq!(pair.complement, vec![1]);
        let got = case3_combine(&soft, &pair).unwrap();
        let lhs = boxplus_vectors(&[&ramp(0), &ramp(2)]).unwrap();
        assert_eq!(got, lhs.add(&flip_by(&ramp(1), &known)).unwrap());

        let all = plan.with_target(&[0, 1, 2]).unwrap();
        assert!(matches!(
            case3_combine(&soft, &all),
            Err(CombinerError::BadGrouping)
        ));
        assert!(matches!(
            case2_combine(&soft, &plan, 0),
            Err(CombinerError::NotCase2(3))
        ));
    }

    #[test]
    fn noiseless_combination_decides_the_target() {
        let cfg = config("spc:4");
        let he = cfg.vertical.extended_parity_check();
        let info: Vec<BitVector> = (0..3).map(|i| word(i + 4, 96)).collect();
        let m = crate::vertical::encode_columns(&info, &cfg.vertical).unwrap();
        let words = m.rows().to_vec();
        let soft = fixture(&cfg, &words, &[0, 2], |i| {
            LlrVector::new(
                words[i]
                    .iter()
                    .map(|b| if b { -2.0 } else { 2.0 })
                    .collect(),
                C,
            )
        });
        let plan = select_plan(&soft, &he).unwrap();
        for t in [0, 2] {
            let v = case2_combine(&soft, &plan, t).unwrap();
            assert_eq!(v.hard_decision(), words[t]);
        }
    }

    #[test]
    fn shape_validation() {
        let cfg = config("spc:4");
        let short = vec![LlrVector::zeros(96, C); 3];
        assert!(matches!(
            SoftMatrix::decode(&cfg, short, 5),
            Err(CombinerError::RowCount {
                expected: 4,
                found: 3
            })
        ));
        let mut rows = vec![LlrVector::zeros(96, C); 4];
        rows[2] = LlrVector::zeros(95, C);
        assert!(matches!(
            SoftMatrix::decode(&cfg, rows, 5),
            Err(CombinerError::RowLength { row: 2, .. })
        ));
    }
}
