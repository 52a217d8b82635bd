//! LDPC decoding aided by a simple product-code structure.
//!
//! Horizontal LDPC codewords are stacked into a matrix whose columns are
//! encoded with a short vertical code (single parity-check, double
//! parity-check or Hamming). Rows that fail belief propagation are repaired
//! with the vertical parity checks: a lone failed row is recovered by XOR,
//! and rows that fail together are re-decoded from a second, derived
//! soft-decision vector built with the boxplus operation.
//!
//! Modules:
//!
//! - [`gf2`]: packed GF(2) vectors and matrices, extended and punctured
//!   parity-check matrices.
//! - [`vertical`]: vertical code constructions and column encoding.
//! - [`ldpc`]: alist parsing, systematic encoding, sum-product decoding,
//!   puncturing.
//! - [`combiner`]: boxplus algebra and the product decoder.
//! - [`decodability`]: exhaustive combined-decodability analysis.
//! - [`sim`]: BPSK/AWGN Monte Carlo comparison of plain and product decoding.
//! - [`cli`]: argument parsing and dispatch for the `ldpc-product` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod combiner;
pub mod decodability;
pub mod gf2;
pub mod ldpc;
pub mod sim;
pub mod vertical;

use thiserror::Error;

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Decodability(#[from] decodability::DecodabilityError),
    #[error(transparent)]
    Gf2(#[from] gf2::Gf2Error),
    #[error(transparent)]
    Combiner(#[from] combiner::CombinerError),
    #[error(transparent)]
    Ldpc(#[from] ldpc::LdpcError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
    #[error(transparent)]
    Vertical(#[from] vertical::VerticalError),
}
