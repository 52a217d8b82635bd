//! Decoding one noisy codeword matrix with and without the vertical code.
//!
//! ```bash
//! cargo run --release --example product_decoding -- 3.0 spc:8
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ldpc_product::combiner::{product_decode, CombinePolicy};
use ldpc_product::gf2::BitVector;
use ldpc_product::sim::{transmit, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let snr: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3.0);
    // rate matching punctures horizontal parity so the product keeps rate 1/2
    let config = SimConfig {
        ldpc: "bundled:96".into(),
        vertical: args.next().unwrap_or_else(|| "spc:8".into()),
        ..SimConfig::default()
    }
    .product()?;
    let (k, kp) = (config.vertical.k(), config.horizontal.k());
    let rate = config.overall_rate();
    println!(
        "{} over {}, overall rate {rate:.4}",
        config.vertical,
        config.horizontal.name()
    );

    let policy = CombinePolicy::default();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<BitVector> = (0..k)
            .map(|_| BitVector::from_bools((0..kp).map(|_| rng.gen::<bool>())))
            .collect();
        let matrix = config.encode(&info)?;
        let received = matrix
            .rows()
            .iter()
            .map(|w| transmit(&config.horizontal, w, snr, rate, &mut rng))
            .collect();
        let result = product_decode(received, &config, &policy)?;
        let wrong: Vec<usize> = (0..k)
            .filter(|&i| result.recovered_rows[i] != *matrix.row(i))
            .collect();
        println!(
            "matrix {seed:>2}: {} re-decodes, {} events, wrong systematic rows {wrong:?}",
            result.redecode_attempts,
            result.events.len()
        );
        for e in &result.events {
            println!(
                "    {:?} with check {} on rows {:?}: {}",
                e.action,
                e.he_row,
                e.target,
                if e.success { "recovered" } else { "failed" }
            );
        }
    }
    Ok(())
}
