//! Regenerates the bundled (3,6)-regular PEG parity-check matrices.
//!
//! ```bash
//! cargo run --release --example generate_codes -- crates/core/codes
//! ```

use std::path::PathBuf;

use ldpc_product::ldpc::{construct::peg_regular, LdpcCode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "codes".into()));
    std::fs::create_dir_all(&dir)?;
    for (n, seed) in [(96usize, 3u64), (504, 1)] {
        let h = peg_regular(n, 3, 6, seed);
        let code = LdpcCode::new(format!("peg{n}"), h.clone())?;
        let path = dir.join(format!("peg_{n}_3_6.alist"));
        std::fs::write(&path, h.to_alist())?;
        println!(
            "{}: n = {}, checks = {}, rank = {}, k = {}",
            path.display(),
            code.n(),
            h.m(),
            code.rank(),
            code.k()
        );
    }
    Ok(())
}
