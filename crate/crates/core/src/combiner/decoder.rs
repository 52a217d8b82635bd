//! Whole-matrix decoding loop.

use std::collections::HashSet;

use super::{case1_recover, combine, CombinerError, LlrSource, RedecodePlan, SoftMatrix};
use crate::gf2::BitVector;
use crate::ldpc::{bp_decode, LlrVector};
use crate::vertical::ProductCodeConfig;

/// Which splits of a check's failed participants are tried as targets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Groupings {
    /// One failed row against the rest.
    #[default]
    Singletons,
    /// Singletons first, then every larger proper subset up to half the
    /// support, skipping mirror images.
    Bipartitions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinePolicy {
    /// Largest number of failed participants a check may have to be used.
    /// `1` limits decoding to XOR recovery, `0` disables the vertical code.
    pub max_e: usize,
    /// Cap on combined re-decodes per matrix; `None` means `4 n`.
    pub attempt_budget: Option<usize>,
    pub use_posteriors: bool,
    pub groupings: Groupings,
    /// Belief-propagation iteration cap, for first decodes and re-decodes.
    pub max_iters: usize,
}

impl Default for CombinePolicy {
    fn default() -> Self {
        CombinePolicy {
            max_e: 2,
            attempt_budget: None,
            use_posteriors: false,
            groupings: Groupings::Singletons,
            max_iters: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Case1,
    Case2,
    Case3,
}

/// One recovery step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub action: Action,
    /// Check used; see [`RedecodePlan::he_row`].
    pub he_row: usize,
    /// Rows whose value (or XOR) was sought.
    pub target: Vec<usize>,
    pub success: bool,
    /// BP iterations of the re-decode; zero for Case 1.
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductDecodeResult {
    /// Every systematic row ends with a zero-syndrome word.
    pub systematic_success: bool,
    /// Final hard decision of every row.
    pub recovered_rows: Vec<BitVector>,
    pub row_success: Vec<bool>,
    pub events: Vec<Event>,
    pub redecode_attempts: usize,
    /// Case 1 results rejected for a nonzero syndrome.
    pub undetectable_anomalies: usize,
}

impl ProductDecodeResult {
    /// Number of successful events of the given kind.
    pub fn successes(&self, action: Action) -> usize {
        self.events
            .iter()
            .filter(|e| e.action == action && e.success)
            .count()
    }
}

struct Check {
    participants: Vec<usize>,
    rhs: Option<BitVector>,
}

/// Product decoder for one code configuration, reusable across matrices.
#[derive(Clone, Debug)]
pub struct ProductDecoder {
    config: ProductCodeConfig,
    policy: CombinePolicy,
    he_rows: Vec<Vec<usize>>,
}

impl ProductDecoder {
    pub fn new(config: ProductCodeConfig, policy: CombinePolicy) -> Self {
        let he = config.vertical.extended_parity_check();
        let he_rows = (0..he.rows()).map(|j| he.row(j).ones_positions()).collect();
        ProductDecoder {
            config,
            policy,
            he_rows,
        }
    }

    pub fn config(&self) -> &ProductCodeConfig {
        &self.config
    }

    pub fn policy(&self) -> &CombinePolicy {
        &self.policy
    }

    /// BP-decodes every received row, then repairs failures.
    pub fn decode(&self, received: Vec<LlrVector>) -> Result<ProductDecodeResult, CombinerError> {
        let soft = SoftMatrix::decode(&self.config, received, self.policy.max_iters)?;
        self.resolve(soft)
    }

    /// Repairs the failed rows of an already decoded matrix.
    ///
    /// Each pass first looks for a check with one failed participant and
    /// recovers it by XOR. Failing that, checks with two to `max_e` failed
    /// participants are swept in order of weight and index, combining and
    /// re-decoding each grouping once for a given failed set; the first
    /// success starts a new pass. Decoding stops when every systematic row
    /// is decoded, a sweep brings nothing, or the attempt budget runs out.
    pub fn resolve(&self, soft: SoftMatrix<'_>) -> Result<ProductDecodeResult, CombinerError> {
        let source = if self.policy.use_posteriors {
            LlrSource::Posterior
        } else {
            LlrSource::Channel
        };
        let mut soft = soft.with_source(source);
        let code = &soft.config().horizontal.clone();
        let vertical = &self.config.vertical;
        let budget = self.policy.attempt_budget.unwrap_or(4 * vertical.n());
        let mut checks: Vec<Check> = self
            .he_rows
            .iter()
            .map(|p| Check {
                participants: p.clone(),
                rhs: None,
            })
            .collect();
        let mut tried: HashSet<(usize, Vec<usize>, Vec<usize>)> = HashSet::new();
        let mut rejected: HashSet<(usize, usize)> = HashSet::new();
        let mut events = Vec::new();
        let mut attempts = 0;
        let mut anomalies = 0;

        loop {
            let done = soft
                .failed()
                .iter()
                .all(|&i| !vertical.is_systematic_row(i));
            if done || self.policy.max_e == 0 {
                break;
            }

            let plans: Vec<RedecodePlan> = checks
                .iter()
                .enumerate()
                .filter_map(|(j, c)| {
                    RedecodePlan::for_check(&soft, j, c.participants.clone(), c.rhs.clone())
                })
                .filter(|p| p.e_min <= self.policy.max_e)
                .collect();

            if let Some(plan) = plans
                .iter()
                .find(|p| p.e_min == 1 && !rejected.contains(&(p.he_row, p.support[0])))
            {
                let word = case1_recover(&soft, plan)?;
                let row = plan.support[0];
                let ok = code.is_codeword(&word);
                if ok {
                    soft.mark_recovered(row, word, 0);
                } else {
                    anomalies += 1;
                    rejected.insert((plan.he_row, row));
                }
                events.push(Event {
                    action: Action::Case1,
                    he_row: plan.he_row,
                    target: vec![row],
                    success: ok,
                    iterations: 0,
                });
                continue;
            }

            let mut sweep: Vec<&RedecodePlan> = plans.iter().filter(|p| p.e_min >= 2).collect();
            sweep.sort_by_key(|p| (p.e_min, p.he_row));
            let mut progressed = false;
            'sweep: for plan in sweep {
                for target in groupings(&plan.support, self.policy.groupings) {
                    let plan = plan.with_target(&target)?;
                    let key = (plan.he_row, plan.target.clone(), plan.support.clone());
                    if tried.contains(&key) {
                        continue;
                    }
                    if attempts >= budget {
                        break 'sweep;
                    }
                    tried.insert(key);
                    attempts += 1;
                    let combined = combine(&soft, &plan)?;
                    let out = bp_decode(code, &combined, self.policy.max_iters);
                    events.push(Event {
                        action: if plan.e_min == 2 {
                            Action::Case2
                        } else {
                            Action::Case3
                        },
                        he_row: plan.he_row,
                        target: plan.target.clone(),
                        success: out.is_success(),
                        iterations: out.iterations_used,
                    });
                    if !out.is_success() {
                        continue;
                    }
                    if let [row] = plan.target[..] {
                        soft.mark_recovered(row, out.codeword, out.iterations_used);
                    } else {
                        // The XOR of the target group is now known, and with
                        // it the XOR of the remaining participants.
                        let mut rest_rhs = plan
                            .rhs
                            .clone()
                            .unwrap_or_else(|| BitVector::zeros(code.n()));
                        rest_rhs.xor_assign(&out.codeword)?;
                        let rest = plan
                            .participants
                            .iter()
                            .copied()
                            .filter(|i| !plan.target.contains(i))
                            .collect();
                        checks.push(Check {
                            participants: plan.target.clone(),
                            rhs: Some(out.codeword),
                        });
                        checks.push(Check {
                            participants: rest,
                            rhs: Some(rest_rhs),
                        });
                    }
                    progressed = true;
                    break 'sweep;
                }
            }
            if !progressed {
                break;
            }
        }

        let outcomes = soft.into_outcomes();
        let row_success: Vec<bool> = outcomes.iter().map(|o| o.is_success()).collect();
        let systematic_success = vertical
            .systematic_positions()
            .iter()
            .all(|&i| row_success[i]);
        Ok(ProductDecodeResult {
            systematic_success,
            recovered_rows: outcomes.into_iter().map(|o| o.codeword).collect(),
            row_success,
            events,
            redecode_attempts: attempts,
            undetectable_anomalies: anomalies,
        })
    }
}

/// BP-decodes `received` row by row and repairs failures with `policy`.
pub fn product_decode(
    received: Vec<LlrVector>,
    config: &ProductCodeConfig,
    policy: &CombinePolicy,
) -> Result<ProductDecodeResult, CombinerError> {
    ProductDecoder::new(config.clone(), policy.clone()).decode(received)
}

fn groupings(support: &[usize], kind: Groupings) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = support.iter().map(|&s| vec![s]).collect();
    if kind == Groupings::Singletons {
        return out;
    }
    let w = support.len();
    for size in 2..=w / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            // an even split and its mirror describe the same information
            if 2 * size < w || idx[0] == 0 {
                out.push(idx.iter().map(|&i| support[i]).collect());
            }
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < w - size + p) else {
                break;
            };
            idx[pos] += 1;
            for t in pos + 1..size {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::{DecodeOutcome, DecodeStatus, LdpcCode};
    use crate::vertical::VerticalCode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn config(vertical: &str) -> ProductCodeConfig {
        ProductCodeConfig::new(
            VerticalCode::from_spec(vertical).unwrap(),
            Arc::new(LdpcCode::from_spec("bundled:96").unwrap()),
        )
    }

    fn random_matrix(cfg: &ProductCodeConfig, rng: &mut ChaCha8Rng) -> Vec<BitVector> {
        let info: Vec<BitVector> = (0..cfg.vertical.k())
            .map(|_| BitVector::from_bools((0..cfg.horizontal.k()).map(|_| rng.gen::<bool>())))
            .collect();
        cfg.encode(&info).unwrap().into_rows()
    }

    /// BPSK with fixed magnitude `a` and a fraction `p` of flipped signs.
    fn noisy(word: &BitVector, a: f64, p: f64, rng: &mut ChaCha8Rng) -> LlrVector {
        LlrVector::with_default_clamp(
            word.iter()
                .map(|b| {
                    let s = if b { -a } else { a };
                    if rng.gen::<f64>() < p {
                        -s
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    /// Soft matrix whose `failed` rows are forced to failure outcomes.
    fn forced<'a>(
        cfg: &'a ProductCodeConfig,
        words: &[BitVector],
        rows: Vec<LlrVector>,
        failed: &[usize],
    ) -> SoftMatrix<'a> {
        let outcomes = words
            .iter()
            .enumerate()
            .map(|(i, w)| DecodeOutcome {
                status: if failed.contains(&i) {
                    DecodeStatus::Failure
                } else {
                    DecodeStatus::Success
                },
                codeword: if failed.contains(&i) {
                    rows[i].hard_decision()
                } else {
                    w.clone()
                },
                iterations_used: 0,
                final_llrs: rows[i].clone(),
            })
            .collect();
        SoftMatrix::new(cfg, rows, outcomes).unwrap()
    }

    #[test]
    fn grouping_enumeration() {
        assert_eq!(
            groupings(&[1, 4], Groupings::Bipartitions),
            vec![vec![1], vec![4]]
        );
        let g = groupings(&[0, 1, 2, 3], Groupings::Bipartitions);
        assert_eq!(g.len(), 4 + 3);
        assert!(g.contains(&vec![0, 3]) && !g.contains(&vec![1, 2]));
        assert_eq!(
            groupings(&[0, 1, 2, 3, 4], Groupings::Bipartitions).len(),
            5 + 10
        );
        assert_eq!(groupings(&[0, 1, 2], Groupings::Singletons).len(), 3);
    }

    #[test]
    fn clean_matrix_needs_nothing() {
        let cfg = config("spc:6");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let words = random_matrix(&cfg, &mut rng);
        let rows = words.iter().map(|w| LlrVector::from_hard(w, 5.0)).collect();
        let res = product_decode(rows, &cfg, &CombinePolicy::default()).unwrap();
        assert!(res.systematic_success);
        assert_eq!(res.redecode_attempts, 0);
        assert!(res.events.is_empty());
        assert_eq!(res.recovered_rows, words);
    }

    #[test]
    fn one_failed_row_is_recovered_by_xor() {
        let cfg = config("spc:24");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let words = random_matrix(&cfg, &mut rng);
        let rows: Vec<LlrVector> = words.iter().map(|w| noisy(w, 1.0, 0.3, &mut rng)).collect();
        let soft = forced(&cfg, &words, rows, &[5]);
        let res = ProductDecoder::new(cfg.clone(), CombinePolicy::default())
            .resolve(soft)
            .unwrap();
        assert!(res.systematic_success);
        assert_eq!(res.recovered_rows, words);
        assert_eq!(res.events.len(), 1);
        assert_eq!(res.events[0].action, Action::Case1);
        assert_eq!(res.redecode_attempts, 0);
    }

    #[test]
    fn two_failed_rows_use_case2_then_case1() {
        let cfg = config("spc:24");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let words = random_matrix(&cfg, &mut rng);
        let rows: Vec<LlrVector> = words
            .iter()
            .map(|w| noisy(w, 1.5, 0.08, &mut rng))
            .collect();
        let soft = forced(&cfg, &words, rows, &[3, 17]);
        let res = ProductDecoder::new(cfg.clone(), CombinePolicy::default())
            .resolve(soft)
            .unwrap();
        assert!(res.systematic_success);
        assert_eq!(res.recovered_rows, words);
        let actions: Vec<Action> = res.events.iter().map(|e| e.action).collect();
        assert_eq!(actions, vec![Action::Case2, Action::Case1]);
        assert_eq!(res.events[0].target, vec![3]);
        assert_eq!(res.redecode_attempts, 1);
    }

    #[test]
    fn hopeless_matrix_fails_within_budget() {
        let cfg = config("hamming:3");
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let words = random_matrix(&cfg, &mut rng);
        let rows: Vec<LlrVector> = words
            .iter()
            .map(|w| noisy(w, 0.5, 0.45, &mut rng))
            .collect();
        let soft = forced(&cfg, &words, rows, &[0, 1, 2, 3, 4, 5, 6]);
        let policy = CombinePolicy {
            max_e: 7,
            ..CombinePolicy::default()
        };
        let res = ProductDecoder::new(cfg.clone(), policy)
            .resolve(soft)
            .unwrap();
        assert!(!res.systematic_success);
        assert!(res.redecode_attempts <= 28);
        assert!(res.events.iter().all(|e| !e.success));
    }

    #[test]
    fn budget_is_respected() {
        let cfg = config("spc:6");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let words = random_matrix(&cfg, &mut rng);
        let rows: Vec<LlrVector> = words
            .iter()
            .map(|w| noisy(w, 0.5, 0.45, &mut rng))
            .collect();
        let soft = forced(&cfg, &words, rows, &[0, 1]);
        let policy = CombinePolicy {
            attempt_budget: Some(1),
            ..CombinePolicy::default()
        };
        let res = ProductDecoder::new(cfg.clone(), policy)
            .resolve(soft)
            .unwrap();
        assert_eq!(res.redecode_attempts, 1);
        assert!(!res.systematic_success);
    }

    #[test]
    fn xor_only_policy_and_disabled_policy() {
        let cfg = config("hamming:3");
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let words = random_matrix(&cfg, &mut rng);
        let rows: Vec<LlrVector> = words
            .iter()
            .map(|w| noisy(w, 0.5, 0.45, &mut rng))
            .collect();
        let run = |max_e| {
            let soft = forced(&cfg, &words, rows.clone(), &[1, 5]);
            let policy = CombinePolicy {
                max_e,
                ..CombinePolicy::default()
            };
            ProductDecoder::new(cfg.clone(), policy)
                .resolve(soft)
                .unwrap()
        };
        let res = run(1);
        assert!(res.systematic_success);
        assert_eq!(res.recovered_rows[..4], words[..4]);
        assert_eq!(res.redecode_attempts, 0);
        let res = run(0);
        assert!(!res.systematic_success);
        assert!(res.events.is_empty());
    }

    #[test]
    fn wrong_contributor_is_rejected_as_anomaly() {
        let cfg = config("spc:4");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut words = random_matrix(&cfg, &mut rng);
        let truth = words.clone();
        // row 2 "succeeded" with a non-codeword; the XOR for row 0 is invalid
        words[2].flip(0);
        let rows: Vec<LlrVector> = truth
            .iter()
            .map(|w| noisy(w, 0.5, 0.45, &mut rng))
            .collect();
        let soft = forced(&cfg, &words, rows, &[0]);
        let res = ProductDecoder::new(cfg.clone(), CombinePolicy::default())
            .resolve(soft)
            .unwrap();
        assert_eq!(res.undetectable_anomalies, 1);
        assert!(!res.systematic_success);
        assert_eq!(res.events.len(), 1);
        assert!(!res.events[0].success);
    }

    #[test]
    fn decoding_is_deterministic() {
        let cfg = config("hamming:3");
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let words = random_matrix(&cfg, &mut rng);
        let rows: Vec<LlrVector> = words.iter().map(|w| noisy(w, 1.2, 0.1, &mut rng)).collect();
        let policy = CombinePolicy {
            max_e: 4,
            groupings: Groupings::Bipartitions,
            ..CombinePolicy::default()
        };
        let a = product_decode(rows.clone(), &cfg, &policy).unwrap();
        let b = product_decode(rows, &cfg, &policy).unwrap();
        assert_eq!(a, b);
        assert!(a.recovered_rows.iter().all(|w| w.len() == 96));
    }
}
