//! Text serialization of codebooks and heteroassociative memories.
//!
//! ```text
//! mapvsa-codebook 1
//! dim 10000
//! tiebreak 12345
//! entries 2
//! a 5f01...
//! b 9c3e...
//! ```
//!
//! Vector bits are hex-encoded packed bytes; component 0 is the
//! least-significant bit of byte 0. A heteroassociative memory is a codebook
//! of addresses named `r0`, `r1`, ... followed by `payload <rows>` and one
//! tab-delimited line per row: row index, then payload fields.

use std::io::{BufRead, Write};

use crate::error::{HdError, Result};
use crate::hv::Hypervector;
use crate::memory::{HeteroMemory, ItemMemory, Payload};

pub const FORMAT_TAG: &str = "mapvsa-codebook";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_codebook<W: Write>(mem: &ItemMemory, mut out: W) -> Result<()> {
    write_header(&mut out, mem.dim(), mem.tie_break().seed(), mem.len())?;
    for (name, v) in mem.iter() {
        check_name(name)?;
        writeln!(out, "{name} {}", hex::encode(v.to_bytes()))?;
    }
    Ok(())
}

fn write_header<W: Write>(out: &mut W, dim: usize, tie: u64, entries: usize) -> Result<()> {
    writeln!(out, "{FORMAT_TAG} {FORMAT_VERSION}")?;
    writeln!(out, "dim {dim}")?;
    writeln!(out, "tiebreak {tie}")?;
    writeln!(out, "entries {entries}")?;
    Ok(())
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        Err(HdError::InvalidArgument(format!(
            "name `{name}` must be non-empty without whitespace"
        )))
    } else {
        Ok(())
    }
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        loop {
            self.line += 1;
            match self.inner.next() {
                Some(l) => {
                    let l = l?;
                    if !l.trim().is_empty() {
                        return Ok(l);
                    }
                }
                None => return Err(self.err("unexpected end of input")),
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> HdError {
        HdError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let l = self.next_line()?;
        let mut parts = l.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(v), None) if k == key => {
                v.parse().map_err(|_| self.err(format!("bad value for `{key}`")))
            }
            _ => Err(self.err(format!("expected `{key} <value>`"))),
        }
    }
}

pub fn read_codebook<R: BufRead>(input: R) -> Result<ItemMemory> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    read_codebook_from(&mut lines)
}

fn read_codebook_from<R: BufRead>(lines: &mut Lines<R>) -> Result<ItemMemory> {
    let version: u32 = lines.keyed(FORMAT_TAG)?;
    if version != FORMAT_VERSION {
        return Err(lines.err(format!("unsupported format version {version}")));
    }
    let dim: usize = lines.keyed("dim")?;
    let tie: u64 = lines.keyed("tiebreak")?;
    let count: usize = lines.keyed("entries")?;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let l = lines.next_line()?;
        let mut parts = l.split_whitespace();
        let (name, bits) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(b), None) => (n, b),
            _ => return Err(lines.err("expected `<name> <hex>`")),
        };
        let bytes = hex::decode(bits).map_err(|e| lines.err(e.to_string()))?;
        let v = Hypervector::from_bytes(dim, &bytes).map_err(|e| lines.err(e.to_string()))?;
        entries.push((name.to_string(), v));
    }
    ItemMemory::from_entries(dim, tie, entries)
}

pub fn write_hetero<P: Payload, W: Write>(
    mem: &HeteroMemory<P>,
    tie_seed: u64,
    mut out: W,
) -> Result<()> {
    write_header(&mut out, mem.dim(), tie_seed, mem.len())?;
    for (i, (addr, _)) in mem.rows().enumerate() {
        writeln!(out, "r{i} {}", hex::encode(addr.to_bytes()))?;
    }
    writeln!(out, "payload {}", mem.len())?;
    for (i, (_, content)) in mem.rows().enumerate() {
        let fields = content.to_fields();
        for f in &fields {
            if f.contains(['\t', '\n']) {
                return Err(HdError::InvalidArgument(format!(
                    "payload field `{f}` contains a tab or newline"
                )));
            }
        }
        writeln!(out, "{i}\t{}", fields.join("\t"))?;
    }
    Ok(())
}

/// Returns the memory and the tie-break seed stored in its header.
pub fn read_hetero<P: Payload, R: BufRead>(input: R) -> Result<(HeteroMemory<P>, u64)> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let addresses = read_codebook_from(&mut lines)?;
    let rows: usize = lines.keyed("payload")?;
    if rows != addresses.len() {
        return Err(lines.err(format!(
            "{rows} payload rows for {} addresses",
            addresses.len()
        )));
    }
    let mut built = Vec::with_capacity(rows);
    for i in 0..rows {
        let l = lines.next_line()?;
        let fields: Vec<&str> = l.split('\t').collect();
        let idx: usize = fields[0]
            .parse()
            .map_err(|_| lines.err("bad row index"))?;
        if idx != i {
            return Err(lines.err(format!("expected row {i}, found {idx}")));
        }
        let content = P::from_fields(&fields[1..]).map_err(|e| lines.err(e.to_string()))?;
        built.push((addresses.vector(i).clone(), content));
    }
    let tie = addresses.tie_break().seed();
    Ok((HeteroMemory::build(addresses.dim(), built)?, tie))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn codebook_round_trip() {
        let m = ItemMemory::random(&["a", "b", "zeta"], 77, &mut Rng::new(3)).unwrap();
        let mut buf = Vec::new();
        write_codebook(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("mapvsa-codebook 1\ndim 77\n"));
        assert_eq!(read_codebook(&buf[..]).unwrap(), m);
    }

    #[test]
    fn known_bits_encode_lsb_first() {
        let v = Hypervector::from_signs(&[1, 1, -1, -1, -1, -1, -1, -1, 1]).unwrap();
        let m = ItemMemory::from_entries(9, 0, vec![("v".into(), v)]).unwrap();
        let mut buf = Vec::new();
        write_codebook(&m, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("v 0301\n"));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = "mapvsa-codebook 2\ndim 8\ntiebreak 0\nentries 0\n";
        assert!(matches!(
            read_codebook(bad.as_bytes()),
            Err(HdError::Parse { line: 1, .. })
        ));
        let short = "mapvsa-codebook 1\ndim 16\ntiebreak 0\nentries 1\nx ff\n";
        assert!(read_codebook(short.as_bytes()).is_err());
        let truncated = "mapvsa-codebook 1\ndim 8\ntiebreak 0\nentries 2\nx ff\n";
        assert!(read_codebook(truncated.as_bytes()).is_err());
    }

    #[test]
    fn hetero_round_trip() {
        let mut rng = Rng::new(9);
        let rows = (0..4)
            .map(|i| (Hypervector::random(40, &mut rng).unwrap(), format!("out{i}")))
            .collect();
        let h = HeteroMemory::build(40, rows).unwrap();
        let mut buf = Vec::new();
        write_hetero(&h, 5, &mut buf).unwrap();
        let (back, tie) = read_hetero::<String, _>(&buf[..]).unwrap();
        assert_eq!(back, h);
        assert_eq!(tie, 5);
    }
}
