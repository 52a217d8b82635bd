use std::collections::HashSet;

use proptest::prelude::*;

use ldpc_product::combiner::{boxplus, boxplus_vectors, flip_by};
use ldpc_product::gf2::{extend_parity_check, BitMatrix, BitVector};
use ldpc_product::ldpc::{LdpcCode, LlrVector, DEFAULT_CLAMP};
use ldpc_product::sim::{emit_csv, format_g6, parse_csv, run_sweep, Scheme, SimConfig, WerRecord};
use ldpc_product::vertical::{encode_columns, VerticalCode};

const C: f64 = DEFAULT_CLAMP;

fn llr() -> impl Strategy<Value = f64> {
    -25.0f64..25.0
}

/// `[I_m | A]` with every column of `A` nonzero.
fn systematic_h() -> impl Strategy<Value = BitMatrix> {
    (1usize..=5, 0usize..=10).prop_flat_map(|(m, extra)| {
        prop::collection::vec(1u32..(1 << m), extra).prop_map(move |cols| {
            let n = m + cols.len();
            let mut h = BitMatrix::zeros(m, n);
            for i in 0..m {
                h.set(i, i, true);
            }
            for (j, c) in cols.iter().enumerate() {
                for i in 0..m {
                    h.set(i, m + j, (c >> i) & 1 == 1);
                }
            }
            h
        })
    })
}

fn bits(n: usize) -> impl Strategy<Value = BitVector> {
    prop::collection::vec(any::<bool>(), n).prop_map(BitVector::from_bools)
}

proptest! {
    #[test]
    fn extended_rows_closed_under_addition(h in systematic_h()) {
        let he = extend_parity_check(&h).unwrap();
        prop_assert_eq!(he.rows(), (1 << h.rows()) - 1);
        let set: HashSet<BitVector> = (0..he.rows()).map(|r| he.row(r)).collect();
        prop_assert_eq!(set.len(), he.rows());
        for a in 0..he.rows() {
            for b in a + 1..he.rows() {
                let mut x = he.row(a);
                x.xor_assign(&he.row(b)).unwrap();
                prop_assert!(set.contains(&x));
            }
        }
    }

    #[test]
    fn extended_column_weight_is_half(h in systematic_h()) {
        let he = extend_parity_check(&h).unwrap();
        for c in 0..he.cols() {
            prop_assert_eq!(he.column_weight(c), 1 << (h.rows() - 1));
        }
    }

    #[test]
    fn boxplus_commutes_and_keeps_sign(a in llr(), b in llr()) {
        let ab = boxplus(a, b, C);
        prop_assert_eq!(ab, boxplus(b, a, C));
        prop_assert!(ab.abs() <= a.abs().min(b.abs()) + 1e-12);
        if a != 0.0 && b != 0.0 && ab != 0.0 {
            prop_assert_eq!(ab.signum(), a.signum() * b.signum());
        }
        prop_assert_eq!(boxplus(a, 0.0, C), 0.0);
        prop_assert_eq!(boxplus(a, C, C), a);
        prop_assert_eq!(boxplus(a, -C, C), -a);
    }

    #[test]
    fn boxplus_associates(a in llr(), b in llr(), c in llr()) {
        let left = boxplus(boxplus(a, b, C), c, C);
        let right = boxplus(a, boxplus(b, c, C), C);
        prop_assert!((left - right).abs() < 1e-9, "{} vs {}", left, right);
    }

    #[test]
    fn known_rows_fold_to_sign_flips(
        a in prop::collection::vec(llr(), 16),
        b in prop::collection::vec(llr(), 16),
        w in bits(16),
    ) {
        let (a, b) = (LlrVector::new(a, C), LlrVector::new(b, C));
        let folded = boxplus_vectors(&[&a, &LlrVector::from_hard(&w, C), &b]).unwrap();
        let flipped = flip_by(&boxplus_vectors(&[&a, &b]).unwrap(), &w);
        for (x, y) in folded.values().iter().zip(flipped.values()) {
            prop_assert!((x - y).abs() < 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn column_encoding_satisfies_checks(
        spec in prop::sample::select(vec!["spc:3", "spc:9", "dpc:6", "dpc:12", "hamming:3", "hamming:4"]),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let code = VerticalCode::from_spec(spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<BitVector> = (0..code.k())
            .map(|_| BitVector::from_bools((0..20).map(|_| rng.gen::<bool>())))
            .collect();
        let m = encode_columns(&info, &code).unwrap();
        prop_assert_eq!(&m.rows()[..code.k()], &info[..]);
        for j in 0..m.width() {
            prop_assert!(code.h().mul_vec(&m.column(j)).unwrap().is_zero());
        }
    }

    #[test]
    fn ldpc_encoding_round_trips(info in bits(48)) {
        let code = LdpcCode::from_spec("bundled:96").unwrap();
        let word = code.encode(&info).unwrap();
        prop_assert!(code.is_codeword(&word));
        prop_assert_eq!(code.extract_info(&word), info);
    }

    #[test]
    fn csv_round_trip_at_printed_precision(
        snr in -5.0f64..10.0,
        counts in prop::collection::vec(0u64..1_000_000, 8),
        proposed in any::<bool>(),
    ) {
        let words = counts[0].max(1);
        let errors = counts[1] % (words + 1);
        let rec = WerRecord {
            scheme: if proposed { Scheme::Proposed } else { Scheme::Baseline },
            snr_db: snr,
            matrices: counts[2],
            systematic_words: words,
            word_errors: errors,
            wer: errors as f64 / words as f64,
            bit_errors: counts[3],
            ber: counts[3] as f64 / (words as f64 * 504.0),
            undetected: counts[4],
            redecode_attempts: counts[5],
            case1: counts[6],
            case2: counts[7],
            case3: 0,
        };
        let parsed = parse_csv(&emit_csv(std::slice::from_ref(&rec))).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        let p = &parsed[0];
        prop_assert_eq!(p.scheme, rec.scheme);
        prop_assert_eq!(format_g6(p.snr_db), format_g6(rec.snr_db));
        prop_assert_eq!(format_g6(p.wer), format_g6(rec.wer));
        prop_assert_eq!(format_g6(p.ber), format_g6(rec.ber));
        prop_assert_eq!(
            (p.matrices, p.systematic_words, p.word_errors, p.bit_errors, p.undetected),
            (rec.matrices, rec.systematic_words, rec.word_errors, rec.bit_errors, rec.undetected)
        );
        prop_assert_eq!((p.redecode_attempts, p.case1, p.case2), (rec.redecode_attempts, rec.case1, rec.case2));
    }
}

fn small_sweep(seed: u64) -> SimConfig {
    SimConfig {
        ldpc: "bundled:96".into(),
        vertical: "spc:6".into(),
        snr_db_points: vec![2.5, 3.5],
        trials: 40,
        seed,
        min_errors: None,
        ..SimConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn paired_runs_never_lose_words(seed in any::<u64>()) {
        let recs = run_sweep(&small_sweep(seed)).unwrap();
        for pair in recs.chunks(2) {
            prop_assert_eq!(pair[0].scheme, Scheme::Baseline);
            prop_assert_eq!(pair[1].scheme, Scheme::Proposed);
            prop_assert!(pair[1].word_errors <= pair[0].word_errors);
        }
    }
}

#[test]
fn sweep_independent_of_thread_count() {
    let config = small_sweep(99);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| emit_csv(&run_sweep(&config).unwrap()))
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, emit_csv(&run_sweep(&config).unwrap()));
}
