//! Paired word-error-rate sweep of plain and product decoding.
//!
//! ```bash
//! cargo run --release --example wer_sweep -- 200
//! ```

use ldpc_product::sim::{emit_csv, run_sweep, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(200);
    let config = SimConfig {
        ldpc: "bundled:96".into(),
        vertical: "spc:8".into(),
        snr_db_points: vec![1.5, 2.0, 2.5, 3.0],
        trials,
        ..SimConfig::default()
    };
    let records = run_sweep(&config)?;
    print!("{}", emit_csv(&records));
    for pair in records.chunks(2) {
        if let [base, prop] = pair {
            println!(
                "# {} dB: WER {:.3e} -> {:.3e}",
                base.snr_db, base.wer, prop.wer
            );
        }
    }
    Ok(())
}
