//! Emulation of two small Turing-complete systems with hypervectors, each
//! paired with a direct symbolic interpreter used as an oracle.

pub mod ca;
pub mod tm;

pub use ca::{ca_build, ca_decode_grid, ca_encode_grid, ca_step, ca_step_with, CaGrid, CaMachine, CaOracle, CaRule, HoodQuery};
pub use tm::{
    tm_build, tm_dimension_search, tm_step, DimensionSearch, Move, SearchOutcome, TmMachine, TmOracle, TmRule, TmTable, TmTape,
};

use crate::error::{HdError, Result};

/// Non-empty, non-comment rows of a delimited table, split on commas,
/// semicolons, tabs and spaces. Each row comes with its 1-based line number.
pub(crate) fn table_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return None;
        }
        let fields = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        Some((i + 1, fields))
    })
}

pub(crate) fn parse_error(line: usize, msg: impl Into<String>) -> HdError {
    HdError::Parse { line, msg: msg.into() }
}

pub(crate) fn expect_fields(line: usize, fields: &[&str], n: usize) -> Result<()> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(parse_error(line, format!("expected {n} fields, found {}", fields.len())))
    }
}
