//! BPSK/AWGN Monte Carlo comparison of plain LDPC decoding with the
//! product decoder.
//!
//! Both schemes see the same transmitted matrices and the same noise: each
//! trial draws its information bits and noise from its own ChaCha8 stream,
//! seeded from `(seed, snr index, trial index)`, and the proposed decoder
//! starts from the very BP outcomes that the baseline is scored on. Trials
//! run in fixed-size batches in parallel and are merged in trial order, so
//! results do not depend on the number of worker threads.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::combiner::{Action, CombinePolicy, CombinerError, ProductDecoder, SoftMatrix};
use crate::gf2::BitVector;
use crate::ldpc::{LdpcCode, LdpcError, LlrVector, DEFAULT_CLAMP};
use crate::vertical::{ProductCodeConfig, VerticalCode, VerticalError};

/// Trials simulated between early-stop checks.
pub const BATCH: usize = 32;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Vertical(#[from] VerticalError),
    #[error(transparent)]
    Combiner(#[from] CombinerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Baseline,
    Proposed,
    /// Both schemes on shared trials.
    Both,
}

impl Scheme {
    fn runs(self, s: Scheme) -> bool {
        self == s || self == Scheme::Both
    }
}

impl FromStr for Scheme {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "baseline" => Ok(Scheme::Baseline),
            "proposed" => Ok(Scheme::Proposed),
            "both" => Ok(Scheme::Both),
            other => Err(SimError::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Baseline => "baseline",
            Scheme::Proposed => "proposed",
            Scheme::Both => "both",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Horizontal code spec, see [`LdpcCode::from_spec`].
    pub ldpc: String,
    /// Vertical code spec, see [`VerticalCode::from_spec`].
    pub vertical: String,
    /// Eb/N0 points in dB.
    pub snr_db_points: Vec<f64>,
    /// Maximum codeword matrices per point.
    pub trials: usize,
    pub max_iters: usize,
    pub policy: CombinePolicy,
    pub seed: u64,
    pub scheme: Scheme,
    /// Stop a point once this many word errors are counted (baseline errors
    /// when the baseline runs, proposed errors otherwise).
    pub min_errors: Option<u64>,
    /// Puncture parity bits of the horizontal code so that the product
    /// code keeps the horizontal code's rate.
    pub rate_match: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ldpc: "bundled:504".into(),
            vertical: "spc:24".into(),
            snr_db_points: vec![2.0],
            trials: 1000,
            max_iters: 50,
            policy: CombinePolicy::default(),
            seed: 1,
            scheme: Scheme::Both,
            min_errors: Some(100),
            rate_match: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.snr_db_points.is_empty() {
            return Err(SimError::Config("no SNR points".into()));
        }
        if let Some(x) = self.snr_db_points.iter().find(|x| !x.is_finite()) {
            return Err(SimError::Config(format!("SNR point {x} is not finite")));
        }
        if self.max_iters == 0 {
            return Err(SimError::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds the code pair described by the specs.
    pub fn product(&self) -> Result<ProductCodeConfig, SimError> {
        let vertical = VerticalCode::from_spec(&self.vertical)?;
        let mut ldpc = LdpcCode::from_spec(&self.ldpc)?;
        if self.rate_match {
            let count = rate_matching_puncture(ldpc.n(), vertical.n(), vertical.k());
            ldpc = ldpc.with_even_puncture(count)?;
        }
        Ok(ProductCodeConfig::new(vertical, Arc::new(ldpc)))
    }
}

/// Parity bits to puncture from a length-`n_h` horizontal code so that a
/// `(n, k)` vertical code costs no rate: `ceil(n_h (n - k) / n)`.
pub fn rate_matching_puncture(n_h: usize, n: usize, k: usize) -> usize {
    (n_h * (n - k)).div_ceil(n)
}

/// Noise standard deviation for Eb/N0 `snr_db` at code rate `rate`.
pub fn noise_sigma(snr_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// BPSK over AWGN: bit `b` is sent as `1 - 2b` and received as
/// `LLR = 2 a / sigma^2`, saturated at the default clamp.
pub fn channel_llr<R: Rng + ?Sized>(
    bits: &BitVector,
    snr_db: f64,
    rate: f64,
    rng: &mut R,
) -> LlrVector {
    let sigma = noise_sigma(snr_db, rate);
    let values = bits.iter().map(|b| bpsk_llr(b, sigma, rng)).collect();
    LlrVector::new(values, DEFAULT_CLAMP)
}

fn bpsk_llr<R: Rng + ?Sized>(bit: bool, sigma: f64, rng: &mut R) -> f64 {
    let symbol = if bit { -1.0 } else { 1.0 };
    let noise: f64 = rng.sample(StandardNormal);
    2.0 * (symbol + sigma * noise) / (sigma * sigma)
}

/// Sends the unpunctured bits of `word` and returns full-length LLRs with
/// zeros at punctured positions.
pub fn transmit<R: Rng + ?Sized>(
    code: &LdpcCode,
    word: &BitVector,
    snr_db: f64,
    rate: f64,
    rng: &mut R,
) -> LlrVector {
    let sigma = noise_sigma(snr_db, rate);
    let sent: Vec<f64> = code
        .apply_puncture(word)
        .into_iter()
        .map(|b| bpsk_llr(b, sigma, rng))
        .collect();
    code.depuncture(&sent, DEFAULT_CLAMP)
        .expect("punctured word has the transmitted length")
}

/// Per-trial generator, independent of scheduling.
pub fn trial_rng(seed: u64, snr_index: usize, trial: u64) -> ChaCha8Rng {
    let s = splitmix64(splitmix64(seed ^ splitmix64(snr_index as u64)) ^ trial);
    ChaCha8Rng::seed_from_u64(s)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    words: u64,
    word_errors: u64,
    bits: u64,
    bit_errors: u64,
    undetected: u64,
    attempts: u64,
    cases: [u64; 3],
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.words += o.words;
        self.word_errors += o.word_errors;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.undetected += o.undetected;
        self.attempts += o.attempts;
        for (a, b) in self.cases.iter_mut().zip(o.cases) {
            *a += b;
        }
    }

    fn score(
        &mut self,
        code: &LdpcCode,
        decided: &BitVector,
        success: bool,
        sent: &BitVector,
        info: &BitVector,
    ) {
        self.words += 1;
        self.bits += info.len() as u64;
        if decided != sent {
            self.word_errors += 1;
            self.undetected += success as u64;
            self.bit_errors += code
                .extract_info(decided)
                .distance(info)
                .expect("equal lengths") as u64;
        }
    }
}

/// Results of one scheme at one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct WerRecord {
    pub scheme: Scheme,
    pub snr_db: f64,
    pub matrices: u64,
    pub systematic_words: u64,
    pub word_errors: u64,
    pub wer: f64,
    pub bit_errors: u64,
    pub ber: f64,
    /// Wrong words that passed the LDPC syndrome check.
    pub undetected: u64,
    pub redecode_attempts: u64,
    pub case1: u64,
    pub case2: u64,
    pub case3: u64,
}

impl WerRecord {
    fn new(scheme: Scheme, snr_db: f64, matrices: u64, t: &Tally) -> Self {
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        WerRecord {
            scheme,
            snr_db,
            matrices,
            systematic_words: t.words,
            word_errors: t.word_errors,
            wer: ratio(t.word_errors, t.words),
            bit_errors: t.bit_errors,
            ber: ratio(t.bit_errors, t.bits),
            undetected: t.undetected,
            redecode_attempts: t.attempts,
            case1: t.cases[0],
            case2: t.cases[1],
            case3: t.cases[2],
        }
    }
}

/// Runs every SNR point; records come per point, baseline before proposed.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<WerRecord>, SimError> {
    config.validate()?;
    let product = config.product()?;
    let policy = CombinePolicy {
        max_iters: config.max_iters,
        ..config.policy.clone()
    };
    let decoder = ProductDecoder::new(product.clone(), policy);
    let rate = product.overall_rate();

    let mut out = Vec::new();
    for (si, &snr) in config.snr_db_points.iter().enumerate() {
        let mut base = Tally::default();
        let mut prop = Tally::default();
        let mut done = 0usize;
        while done < config.trials {
            let end = (done + BATCH).min(config.trials);
            let batch: Vec<(Tally, Tally)> = (done..end)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(config.seed, si, t as u64);
                    run_trial(&decoder, config.scheme, snr, rate, &mut rng)
                })
                .collect::<Result<_, SimError>>()?;
            for (b, p) in &batch {
                base.merge(b);
                prop.merge(p);
            }
            done = end;
            let errors = if config.scheme.runs(Scheme::Baseline) {
                base.word_errors
            } else {
                prop.word_errors
            };
            if config.min_errors.is_some_and(|m| errors >= m) {
                break;
            }
        }
        if config.scheme.runs(Scheme::Baseline) {
            out.push(WerRecord::new(Scheme::Baseline, snr, done as u64, &base));
        }
        if config.scheme.runs(Scheme::Proposed) {
            out.push(WerRecord::new(Scheme::Proposed, snr, done as u64, &prop));
        }
    }
    Ok(out)
}

fn run_trial(
    decoder: &ProductDecoder,
    scheme: Scheme,
    snr: f64,
    rate: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Tally, Tally), SimError> {
    let product = decoder.config();
    let code = &product.horizontal;
    let info: Vec<BitVector> = (0..product.vertical.k())
        .map(|_| BitVector::from_bools((0..code.k()).map(|_| rng.gen::<bool>())))
        .collect();
    let sent = product.encode(&info).map_err(|e| match e {
        crate::Error::Ldpc(e) => SimError::Ldpc(e),
        crate::Error::Vertical(e) => SimError::Vertical(e),
        other => SimError::Config(other.to_string()),
    })?;
    let received: Vec<LlrVector> = sent
        .rows()
        .iter()
        .map(|w| transmit(code, w, snr, rate, rng))
        .collect();
    let soft = SoftMatrix::decode(product, received, decoder.policy().max_iters)?;
    let systematic = product.vertical.systematic_positions();

    let mut base = Tally::default();
    if scheme.runs(Scheme::Baseline) {
        for (j, &row) in systematic.iter().enumerate() {
            let o = &soft.outcomes()[row];
            base.score(code, &o.codeword, o.is_success(), sent.row(row), &info[j]);
        }
    }
    let mut prop = Tally::default();
    if scheme.runs(Scheme::Proposed) {
        let res = decoder.resolve(soft)?;
        for (j, &row) in systematic.iter().enumerate() {
            prop.score(
                code,
                &res.recovered_rows[row],
                res.row_success[row],
                sent.row(row),
                &info[j],
            );
        }
        prop.attempts = res.redecode_attempts as u64;
        prop.cases = [
            res.successes(Action::Case1) as u64,
            res.successes(Action::Case2) as u64,
            res.successes(Action::Case3) as u64,
        ];
    }
    Ok((base, prop))
}

pub const CSV_HEADER: [&str; 13] = [
    "scheme",
    "snr_db",
    "matrices",
    "systematic_words",
    "word_errors",
    "wer",
    "bit_errors",
    "ber",
    "undetected",
    "redecode_attempts",
    "case1",
    "case2",
    "case3",
];

/// Formats a real with six significant digits, like C's `%g`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV text with [`CSV_HEADER`] and one line per record.
pub fn emit_csv(records: &[WerRecord]) -> String {
    let mut s = CSV_HEADER.join(",");
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scheme,
            format_g6(r.snr_db),
            r.matrices,
            r.systematic_words,
            r.word_errors,
            format_g6(r.wer),
            r.bit_errors,
            format_g6(r.ber),
            r.undetected,
            r.redecode_attempts,
            r.case1,
            r.case2,
            r.case3
        );
    }
    s
}

/// Reads back the output of [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<WerRecord>, SimError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| SimError::Csv(e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(SimError::Csv("unexpected header".into()));
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| SimError::Csv(e.to_string()))?;
        let int = |i: usize| {
            rec[i]
                .parse::<u64>()
                .map_err(|_| SimError::Csv(format!("bad integer `{}`", &rec[i])))
        };
        let real = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| SimError::Csv(format!("bad number `{}`", &rec[i])))
        };
        out.push(WerRecord {
            scheme: rec[0].parse()?,
            snr_db: real(1)?,
            matrices: int(2)?,
            systematic_words: int(3)?,
            word_errors: int(4)?,
            wer: real(5)?,
            bit_errors: int(6)?,
            ber: real(7)?,
            undetected: int(8)?,
            redecode_attempts: int(9)?,
            case1: int(10)?,
            case2: int(11)?,
            case3: int(12)?,
        });
    }
    Ok(out)
}
