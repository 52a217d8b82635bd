//! Boxplus algebra and the gain of adding two independent observations.
//!
//! ```bash
//! cargo run --release --example llr_combining
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ldpc_product::combiner::{boxplus, boxplus_vectors, flip_by};
use ldpc_product::gf2::BitVector;
use ldpc_product::ldpc::{LlrVector, DEFAULT_CLAMP};
use ldpc_product::sim::channel_llr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = DEFAULT_CLAMP;
    println!("a      b      a [+] b");
    for (a, b) in [
        (2.0, 2.0),
        (2.0, -2.0),
        (5.0, 0.5),
        (0.0, 7.0),
        (c, -3.0),
        (-c, -c),
    ] {
        println!("{a:<6} {b:<6} {:.10}", boxplus(a, b, c));
    }

    // folding three rows, and the shortcut for a known row
    let r0 = LlrVector::new(vec![3.0, -1.0, 0.5, 8.0], c);
    let r1 = LlrVector::new(vec![-2.0, -4.0, 6.0, 1.0], c);
    let known = BitVector::from_bools([true, false, true, false]);
    let folded = boxplus_vectors(&[&r0, &r1, &LlrVector::from_hard(&known, c)])?;
    let shortcut = flip_by(&boxplus_vectors(&[&r0, &r1])?, &known);
    println!("\nfold with a hard row: {:?}", folded.values());
    println!("sign-flip shortcut:   {:?}", shortcut.values());

    // two copies at Eb/N0 x behave like one copy at x + 3.01 dB
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bits = BitVector::zeros(200_000);
    let errors = |v: &LlrVector| v.values().iter().filter(|&&x| x < 0.0).count();
    let one = channel_llr(&bits, 3.0, 1.0, &mut rng);
    let two = one.add(&channel_llr(&bits, 3.0, 1.0, &mut rng))?;
    let double = channel_llr(&bits, 3.0 + 10.0 * 2f64.log10(), 1.0, &mut rng);
    println!(
        "\nBER one copy at 3 dB: {:.5}\nBER two copies added: {:.5}\nBER one copy at 6.01 dB: {:.5}",
        errors(&one) as f64 / bits.len() as f64,
        errors(&two) as f64 / bits.len() as f64,
        errors(&double) as f64 / bits.len() as f64
    );
    Ok(())
}
