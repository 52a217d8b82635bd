//! Sum-product decoding of the bundled length-96 LDPC code over BPSK/AWGN.
//!
//! ```bash
//! cargo run --release --example ldpc_bp -- 2.0 200
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ldpc_product::gf2::BitVector;
use ldpc_product::ldpc::{bp_decode, LdpcCode};
use ldpc_product::sim::channel_llr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let snr: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2.0);
    let words: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);

    let code = LdpcCode::from_spec("bundled:96")?;
    println!(
        "{}: n = {}, k = {}, rate = {:.3}",
        code.name(),
        code.n(),
        code.k(),
        code.rate()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut failures, mut undetected, mut iterations) = (0, 0, 0);
    for _ in 0..words {
        let info = BitVector::from_bools((0..code.k()).map(|_| rng.gen::<bool>()));
        let word = code.encode(&info)?;
        let llr = channel_llr(&word, snr, code.rate(), &mut rng);
        let out = bp_decode(&code, &llr, 50);
        iterations += out.iterations_used;
        if !out.is_success() {
            failures += 1;
        } else if out.codeword != word {
            undetected += 1;
        }
    }
    println!(
        "Eb/N0 {snr} dB, {words} words: {failures} detected failures, {undetected} undetected errors, {:.2} mean iterations",
        iterations as f64 / words as f64
    );
    Ok(())
}
