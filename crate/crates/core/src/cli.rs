//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the operation fails, 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combiner::{CombinePolicy, Groupings, ProductDecoder};
use crate::decodability::{self, DEFAULT_BUDGET};
use crate::gf2::BitVector;
use crate::ldpc::{bp_decode, LdpcCode, LlrVector, DEFAULT_CLAMP};
use crate::sim::{self, Scheme, SimConfig};
use crate::vertical::{ProductCodeConfig, VerticalCode};

#[derive(Debug, Parser)]
#[command(
    name = "ldpc-product",
    version,
    about = "Product-structure LDPC decoding workbench"
)]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count failed-row patterns with and without a weight-1/2 check.
    Analyze {
        /// Vertical code: spc:<n>, hamming:<m>, dpc:<n> or file:<alist>.
        #[arg(long)]
        code: String,
        /// Pattern sizes: an inclusive range `a..b` or a list `a,b,c`.
        #[arg(long)]
        e: String,
        /// Maximum number of subsets per size.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Combined-decodability of a vertical code, with a witness pattern.
    Decodability {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Monte Carlo word error rates of baseline and product decoding.
    Simulate(SimulateArgs),
    /// Product-encode information bits into a codeword matrix.
    Encode {
        #[arg(long, default_value = "bundled:96")]
        ldpc: String,
        #[arg(long)]
        vertical: String,
        /// Information matrix: k lines of k' characters `0`/`1`. Random
        /// bits from `--seed` when absent.
        #[arg(long)]
        info: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode received LLR rows, one whitespace-separated row per line.
    Decode {
        #[arg(long, default_value = "bundled:96")]
        ldpc: String,
        /// Vertical code; without it every row is decoded on its own.
        #[arg(long)]
        vertical: Option<String>,
        #[arg(long)]
        llr: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Largest number of failed rows in a check used for recovery.
    #[arg(long, default_value_t = 2)]
    pub max_e: usize,
    /// Combined re-decodes allowed per matrix (default 4n).
    #[arg(long)]
    pub attempt_budget: Option<usize>,
    /// Combine BP posteriors instead of channel LLRs.
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    pub use_posteriors: bool,
    /// Try every split of a check's failed rows, not only single rows.
    #[arg(long)]
    pub bipartitions: bool,
    #[arg(long, default_value_t = 50)]
    pub max_iters: usize,
}

impl PolicyArgs {
    pub fn policy(&self) -> CombinePolicy {
        CombinePolicy {
            max_e: self.max_e,
            attempt_budget: self.attempt_budget,
            use_posteriors: self.use_posteriors,
            groupings: if self.bipartitions {
                Groupings::Bipartitions
            } else {
                Groupings::Singletons
            },
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "bundled:504")]
    pub ldpc: String,
    #[arg(long, default_value = "spc:24")]
    pub vertical: String,
    /// Eb/N0 points in dB as `start:step:stop`, or a single value.
    #[arg(long)]
    pub snr: String,
    /// Maximum codeword matrices per point.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value = "both", value_parser = ["baseline", "proposed", "both"])]
    pub scheme: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stop a point after this many word errors (0 disables early stop).
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    /// Transmit every bit instead of puncturing to keep the LDPC rate.
    #[arg(long)]
    pub no_rate_match: bool,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `a..b` (inclusive) or a comma-separated list.
pub fn parse_e_values(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a nonnegative integer"))
    };
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

/// `start:step:stop` inclusive of `stop`, or a single value.
pub fn parse_snr(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{t}` is not a finite number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [x] => Ok(vec![num(x)?]),
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step <= 0.0 || b < a {
                return Err(format!("`{s}` needs a positive step and start <= stop"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            // rounding to 1e-9 keeps 1.0 + 3 * 0.1 printing as 1.3
            Ok((0..count)
                .map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(format!("`{s}` is not start:step:stop")),
    }
}

/// Parses `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// Parses and runs, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Op(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

enum Failure {
    Usage(String),
    Op(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Op(e.to_string())
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Op(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::from),
    }
}

fn vertical(spec: &str) -> Result<VerticalCode, Failure> {
    VerticalCode::from_spec(spec).map_err(|e| Failure::Usage(e.to_string()))
}

fn ldpc(spec: &str) -> Result<LdpcCode, Failure> {
    LdpcCode::from_spec(spec).map_err(|e| match e {
        crate::ldpc::LdpcError::BadSpec(_) => Failure::Usage(e.to_string()),
        other => Failure::Op(other.to_string()),
    })
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Analyze {
            code,
            e,
            budget,
            emit: path,
        } => {
            let e = parse_e_values(&e).map_err(Failure::Usage)?;
            let code = vertical(&code)?;
            let dist = decodability::hp_distribution(&code, &e, budget)?;
            emit(&dist.to_csv(), path.as_deref(), out)
        }
        Command::Decodability { code, budget } => {
            let code = vertical(&code)?;
            let r = decodability::combined_decodability(&code, budget)?;
            let mut s = format!(
                "code: {}\nn = {}, k = {}\neta = {}\n",
                r.code, r.n, r.k, r.eta
            );
            match &r.witness {
                Some(w) => {
                    let verified = !decodability::subset_has_w12(&code, w)?;
                    let rows: Vec<String> = w.iter().map(usize::to_string).collect();
                    s += &format!(
                        "witness ({} rows): {}\nwitness has no weight-1/2 check: {}\n",
                        w.len(),
                        rows.join(" "),
                        verified
                    );
                }
                None => s += "witness: none (combinable at every size)\n",
            }
            emit(&s, None, out)
        }
        Command::Simulate(a) => {
            let snr = parse_snr(&a.snr).map_err(Failure::Usage)?;
            let config = SimConfig {
                ldpc: a.ldpc,
                vertical: a.vertical,
                snr_db_points: snr,
                trials: a.trials,
                max_iters: a.policy.max_iters,
                policy: a.policy.policy(),
                seed: a.seed,
                scheme: a.scheme.parse::<Scheme>()?,
                min_errors: (a.min_errors > 0).then_some(a.min_errors),
                rate_match: !a.no_rate_match,
            };
            config
                .validate()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let records = sim::run_sweep(&config)?;
            emit(&sim::emit_csv(&records), a.out.as_deref(), out)
        }
        Command::Encode {
            ldpc: l,
            vertical: v,
            info,
            seed,
            out: path,
        } => {
            let product = ProductCodeConfig::new(vertical(&v)?, Arc::new(ldpc(&l)?));
            let (k, kp) = (product.vertical.k(), product.horizontal.k());
            let info = match info {
                Some(p) => read_bits(&p, k, kp)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..k)
                        .map(|_| BitVector::from_bools((0..kp).map(|_| rng.gen::<bool>())))
                        .collect()
                }
            };
            let m = product.encode(&info)?;
            let text: String = m.rows().iter().map(|r| format!("{r}\n")).collect();
            emit(&text, path.as_deref(), out)
        }
        Command::Decode {
            ldpc: l,
            vertical: v,
            llr,
            policy,
            out: path,
        } => {
            let code = Arc::new(ldpc(&l)?);
            let rows = read_llrs(&llr, code.n())?;
            let mut s = String::new();
            match v {
                Some(v) => {
                    let product = ProductCodeConfig::new(vertical(&v)?, code);
                    let decoder = ProductDecoder::new(product, policy.policy());
                    let r = decoder.decode(rows)?;
                    s += &format!("systematic_success: {}\n", r.systematic_success);
                    s += &format!("redecode_attempts: {}\n", r.redecode_attempts);
                    s += &format!("undetectable_anomalies: {}\n", r.undetectable_anomalies);
                    for e in &r.events {
                        s += &format!(
                            "event: {:?} check {} target {:?} success {} iterations {}\n",
                            e.action, e.he_row, e.target, e.success, e.iterations
                        );
                    }
                    for (i, (w, ok)) in r.recovered_rows.iter().zip(&r.row_success).enumerate() {
                        s += &format!("row {i} {} {w}\n", if *ok { "ok" } else { "failed" });
                    }
                }
                None => {
                    for (i, r) in rows.iter().enumerate() {
                        let o = bp_decode(&code, r, policy.max_iters);
                        s += &format!(
                            "row {i} {} iterations {} {}\n",
                            if o.is_success() { "ok" } else { "failed" },
                            o.iterations_used,
                            o.codeword
                        );
                    }
                }
            }
            emit(&s, path.as_deref(), out)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Op(format!("{}: {e}", path.display())))
}

fn read_bits(path: &Path, rows: usize, cols: usize) -> Result<Vec<BitVector>, Failure> {
    let text = read_text(path)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != rows {
        return Err(Failure::Op(format!(
            "expected {rows} information rows, found {}",
            lines.len()
        )));
    }
    lines
        .iter()
        .map(|l| {
            let bits: Vec<bool> = l
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Failure::Op(format!("`{other}` is not a bit"))),
                })
                .collect::<Result<_, _>>()?;
            if bits.len() != cols {
                return Err(Failure::Op(format!(
                    "expected {cols} bits per row, found {}",
                    bits.len()
                )));
            }
            Ok(BitVector::from_bools(bits))
        })
        .collect()
}

fn read_llrs(path: &Path, n: usize) -> Result<Vec<LlrVector>, Failure> {
    let text = read_text(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Failure::Op(format!("`{t}` is not a number")))
                })
                .collect::<Result<_, _>>()?;
            if v.len() != n {
                return Err(Failure::Op(format!(
                    "expected {n} LLRs per row, found {}",
                    v.len()
                )));
            }
            Ok(LlrVector::new(v, DEFAULT_CLAMP))
        })
        .collect()
}
