//! Extended parity-check matrix of the (7,4) Hamming code and the checks
//! left over when some rows of a codeword matrix fail.
//!
//! ```bash
//! cargo run --example extended_checks -- 0 1 3
//! ```

use ldpc_product::gf2::{extend_parity_check, min_nonzero_row_weight, puncture_columns};
use ldpc_product::vertical::VerticalCode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let failed: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let failed = if failed.is_empty() {
        vec![0, 1, 3]
    } else {
        failed
    };

    let code = VerticalCode::hamming(3)?;
    let h = code.h();
    println!("H of {code}:\n{h}");

    let he = extend_parity_check(h)?;
    println!(
        "H_E ({} rows, every nonzero combination of rows of H):\n{he}",
        he.rows()
    );
    let weights: Vec<usize> = (0..he.cols()).map(|c| he.column_weight(c)).collect();
    println!("column weights: {weights:?}");

    let hp = puncture_columns(&he, &failed)?;
    println!("H_P for failed rows {failed:?}:\n{hp}");
    match min_nonzero_row_weight(&hp) {
        Some((w, row)) => println!(
            "lightest nonzero check: H_E row {row} ({}) touches {w} failed row(s)",
            he.row(row)
        ),
        None => println!("no check touches the failed rows"),
    }
    Ok(())
}
