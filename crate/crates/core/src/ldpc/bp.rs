//! Flooding sum-product decoder in the LLR domain.

use super::{saturate, DecodeOutcome, DecodeStatus, LdpcCode, LlrVector};
use crate::gf2::BitVector;

/// Decodes `channel` with at most `max_iters` flooding iterations.
///
/// The channel hard decision is checked before the first iteration, then
/// the posterior hard decision after every iteration; the first zero
/// syndrome ends decoding with [`DecodeStatus::Success`]. All messages and
/// posteriors are saturated at the clamp of `channel`. Punctured positions
/// are expected to carry an LLR of exactly zero.
pub fn bp_decode(code: &LdpcCode, channel: &LlrVector, max_iters: usize) -> DecodeOutcome {
    assert_eq!(
        channel.len(),
        code.n(),
        "LLR length must equal the block length"
    );
    let clamp = channel.clamp();
    let graph = code.graph();
    let checks = graph.checks();

    // Edge e runs between check `edge_check` and variable `edge_var`, with
    // edges grouped by check.
    let mut check_start = Vec::with_capacity(checks.len() + 1);
    let mut edge_var = Vec::with_capacity(graph.edges());
    check_start.push(0);
    for row in checks {
        edge_var.extend_from_slice(row);
        check_start.push(edge_var.len());
    }
    let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); code.n()];
    for (e, &v) in edge_var.iter().enumerate() {
        var_edges[v].push(e);
    }

    let ch = channel.values();
    let mut hard = channel.hard_decision();
    if syndrome_is_zero(checks, &hard) {
        return DecodeOutcome {
            status: DecodeStatus::Success,
            codeword: hard,
            iterations_used: 0,
            final_llrs: channel.clone(),
        };
    }

    let edges = edge_var.len();
    let mut c2v = vec![0.0f64; edges];
    let mut v2c: Vec<f64> = edge_var.iter().map(|&v| ch[v]).collect();
    let mut posterior = ch.to_vec();
    let mut tanhs: Vec<f64> = Vec::new();
    let mut suffix: Vec<f64> = Vec::new();

    for iter in 1..=max_iters {
        // check nodes: tanh rule with leave-one-out products
        for c in 0..checks.len() {
            let (lo, hi) = (check_start[c], check_start[c + 1]);
            let deg = hi - lo;
            tanhs.clear();
            tanhs.extend(v2c[lo..hi].iter().map(|&m| (0.5 * m).tanh()));
            suffix.clear();
            suffix.resize(deg + 1, 1.0);
            for i in (0..deg).rev() {
                suffix[i] = suffix[i + 1] * tanhs[i];
            }
            let mut prefix = 1.0;
            for i in 0..deg {
                let p = prefix * suffix[i + 1];
                c2v[lo + i] = saturate(2.0 * p.atanh(), clamp);
                prefix *= tanhs[i];
            }
        }
        // variable nodes
        for (v, es) in var_edges.iter().enumerate() {
            let total: f64 = ch[v] + es.iter().map(|&e| c2v[e]).sum::<f64>();
            for &e in es {
                v2c[e] = saturate(total - c2v[e], clamp);
            }
            posterior[v] = total;
        }
        hard = BitVector::from_bools(posterior.iter().map(|&x| x < 0.0));
        if syndrome_is_zero(checks, &hard) {
            return DecodeOutcome {
                status: DecodeStatus::Success,
                codeword: hard,
                iterations_used: iter,
                final_llrs: LlrVector::new(posterior, clamp),
            };
        }
    }

    DecodeOutcome {
        status: DecodeStatus::Failure,
        codeword: hard,
        iterations_used: max_iters,
        final_llrs: LlrVector::new(posterior, clamp),
    }
}

fn syndrome_is_zero(checks: &[Vec<usize>], word: &BitVector) -> bool {
    checks
        .iter()
        .all(|row| !row.iter().fold(false, |acc, &v| acc ^ word.get(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::DEFAULT_CLAMP;

    fn code96() -> LdpcCode {
        LdpcCode::from_spec("bundled:96").unwrap()
    }

    fn noiseless(word: &BitVector) -> LlrVector {
        LlrVector::from_hard(word, DEFAULT_CLAMP)
    }

    #[test]
    fn noiseless_input_decodes_immediately() {
        let code = code96();
        let info = BitVector::from_bools((0..code.k()).map(|i| i % 3 == 0));
        let cw = code.encode(&info).unwrap();
        let out = bp_decode(&code, &noiseless(&cw), 50);
        assert!(out.is_success());
        assert_eq!(out.codeword, cw);
        assert!(out.iterations_used <= 1);
    }

    #[test]
    fn zero_llrs_decide_the_zero_codeword() {
        let code = code96();
        let out = bp_decode(&code, &LlrVector::zeros(96, DEFAULT_CLAMP), 50);
        assert!(out.is_success());
        assert!(out.codeword.is_zero());
        assert_eq!(out.iterations_used, 0);
    }

    #[test]
    fn corrects_one_confident_wrong_bit() {
        let code = code96();
        let info = BitVector::from_bools((0..code.k()).map(|i| i % 5 < 2));
        let cw = code.encode(&info).unwrap();
        let mut values: Vec<f64> = cw.iter().map(|b| if b { -4.0 } else { 4.0 }).collect();
        values[17] = -values[17];
        let out = bp_decode(&code, &LlrVector::with_default_clamp(values), 50);
        assert!(out.is_success());
        assert_eq!(out.codeword, cw);
        assert!(out.iterations_used >= 1);
    }

    #[test]
    fn hopeless_input_fails_after_max_iters() {
        let code = code96();
        // alternate strong and weak wrong-signed evidence that satisfies no check
        let values: Vec<f64> = (0..96)
            .map(|i| if i % 7 == 0 { -3.0 } else { 0.2 })
            .collect();
        let out = bp_decode(&code, &LlrVector::with_default_clamp(values.clone()), 3);
        if !out.is_success() {
            assert_eq!(out.iterations_used, 3);
            assert!(!code.is_codeword(&out.codeword));
        } else {
            assert!(code.is_codeword(&out.codeword));
        }
        assert_eq!(
            out,
            bp_decode(&code, &LlrVector::with_default_clamp(values), 3)
        );
    }

    #[test]
    fn posteriors_stay_within_clamp() {
        let code = code96();
        let values: Vec<f64> = (0..96)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) * 2.0)
            .collect();
        let out = bp_decode(&code, &LlrVector::new(values, 8.0), 20);
        assert!(out.final_llrs.values().iter().all(|v| v.abs() <= 8.0));
    }
}
