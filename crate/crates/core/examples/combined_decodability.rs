//! Combined-decodability of the vertical codes and the distribution of
//! failed-row patterns with a light check.
//!
//! ```bash
//! cargo run --release --example combined_decodability
//! ```

use ldpc_product::decodability::{
    check_structural_lemmas, combined_decodability, hp_distribution, DEFAULT_BUDGET,
};
use ldpc_product::vertical::VerticalCode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spec in ["spc:24", "hamming:3", "hamming:4", "dpc:6", "dpc:12"] {
        let code = VerticalCode::from_spec(spec)?;
        let r = combined_decodability(&code, DEFAULT_BUDGET)?;
        println!("{:<16} eta = {:>2}  witness {:?}", r.code, r.eta, r.witness);
    }

    let code = VerticalCode::hamming(4)?;
    let dist = hp_distribution(&code, &(3..=10).collect::<Vec<_>>(), DEFAULT_BUDGET)?;
    println!("\n{}", dist.to_csv());

    let lemmas = check_structural_lemmas(&VerticalCode::dpc(6)?, DEFAULT_BUDGET)?;
    for c in &lemmas.checks {
        println!(
            "[{}] {}",
            if c.holds() { "ok" } else { "VIOLATED" },
            c.statement
        );
    }
    Ok(())
}
