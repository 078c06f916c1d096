//! Multiply-Add-Permute (MAP) hypervector computing.
//!
//! Bipolar hypervectors are stored bit-packed with bit 1 for +1, so binding is
//! XNOR on words and the dot product is `N - 2 * popcount(a ^ b)`.
//! Unnormalized superpositions live in [`Accumulator`]s with exact integer
//! components.
//!
//! Module map:
//! - [`hv`], [`rng`]: vectors, accumulators, the three operations, seeded generation.
//! - [`memory`]: clean-up (auto-associative) and heteroassociative memories.
//! - [`encoders`]: sets, multisets, sequences, n-grams, graphs, trees, stacks, automata.
//! - [`resonator`]: factorization of bind-products.
//! - [`search`]: substring search with a string automaton held in superposition.
//! - [`universal`]: Turing-machine and rule-110 emulation with symbolic oracles.
//! - [`experiments`]: seeded parameter sweeps written as CSV.

pub mod codec;
pub mod encoders;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod hv;
pub mod memory;
pub mod resonator;
pub mod rng;
pub mod search;
pub mod stats;
pub mod universal;

pub use error::{HdError, Result};
pub use exec::Exec;
pub use hv::{Accumulator, Hypervector, TieBreak};
pub use memory::{HeteroMemory, ItemMemory};
pub use rng::Rng;
