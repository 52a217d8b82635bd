//! Parameters of the vertical codes and column encoding of a small matrix.
//!
//! ```bash
//! cargo run --example vertical_codes
//! ```

use ldpc_product::gf2::BitVector;
use ldpc_product::vertical::{encode_columns, VerticalCode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let codes = [
        VerticalCode::spc(4)?,
        VerticalCode::spc(24)?,
        VerticalCode::dpc(6)?,
        VerticalCode::dpc(12)?,
        VerticalCode::hamming(3)?,
        VerticalCode::hamming(4)?,
        VerticalCode::hamming(5)?,
    ];
    println!(
        "{:<16} {:>3} {:>3} {:>3} {:>5} {:>3} {:>7}",
        "code", "n", "k", "m", "d_min", "tau", "rate"
    );
    for c in &codes {
        println!(
            "{:<16} {:>3} {:>3} {:>3} {:>5} {:>3} {:>7.4}",
            c.name(),
            c.n(),
            c.k(),
            c.m(),
            c.d_min(),
            c.tau(),
            c.rate()
        );
    }

    // four information rows of length 8 and their Hamming parity rows
    let code = VerticalCode::hamming(3)?;
    let info: Vec<BitVector> = ["10110010", "01100111", "11110000", "00011011"]
        .iter()
        .map(|s| BitVector::from_bools(s.chars().map(|c| c == '1')))
        .collect();
    let m = encode_columns(&info, &code)?;
    println!("\n{code} column encoding:");
    for (i, row) in m.rows().iter().enumerate() {
        let kind = if code.is_systematic_row(i) {
            "info"
        } else {
            "parity"
        };
        println!("  row {i} {row} {kind}");
    }
    for j in 0..m.width() {
        assert!(code.h().mul_vec(&m.column(j))?.is_zero());
    }
    println!("every column satisfies H");
    Ok(())
}
