//! Clean-up and heteroassociative memories.
//!
//! Nearest-neighbour search is an exhaustive scan with exact integer scores;
//! ties go to the lowest entry index.

use std::collections::HashMap;

use crate::error::{check_dims, HdError, Result};
use crate::exec::Exec;
use crate::hv::{Accumulator, Hypervector, Probe, TieBreak};
use crate::rng::Rng;

/// Result of a clean-up query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match<'a> {
    pub index: usize,
    pub name: &'a str,
    pub vector: &'a Hypervector,
    pub score: i64,
}

/// Named codebook of seed vectors. Entry order is fixed at build time.
#[derive(Clone, Debug)]
pub struct ItemMemory {
    dim: usize,
    names: Vec<String>,
    vectors: Vec<Hypervector>,
    index: HashMap<String, usize>,
    tie: TieBreak,
}

impl PartialEq for ItemMemory {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.names == other.names
            && self.vectors == other.vectors
            && self.tie == other.tie
    }
}

impl ItemMemory {
    /// Fresh i.i.d. seed vectors for `names`, plus a tie-break seed drawn from
    /// the same stream.
    pub fn random<S: AsRef<str>>(names: &[S], dim: usize, rng: &mut Rng) -> Result<Self> {
        let entries = names
            .iter()
            .map(|n| Ok((n.as_ref().to_string(), Hypervector::random(dim, rng)?)))
            .collect::<Result<Vec<_>>>()?;
        let tie_seed = rng.next_seed();
        Self::from_entries(dim, tie_seed, entries)
    }

    pub fn from_entries(
        dim: usize,
        tie_seed: u64,
        entries: Vec<(String, Hypervector)>,
    ) -> Result<Self> {
        let tie = TieBreak::new(dim, tie_seed)?;
        let mut index = HashMap::with_capacity(entries.len());
        let mut names = Vec::with_capacity(entries.len());
        let mut vectors = Vec::with_capacity(entries.len());
        for (i, (name, v)) in entries.into_iter().enumerate() {
            check_dims(dim, v.dim())?;
            if index.insert(name.clone(), i).is_some() {
                return Err(HdError::DuplicateName(name));
            }
            names.push(name);
            vectors.push(v);
        }
        Ok(Self {
            dim,
            names,
            vectors,
            index,
            tie,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn tie_break(&self) -> &TieBreak {
        &self.tie
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vectors(&self) -> &[Hypervector] {
        &self.vectors
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn vector(&self, i: usize) -> &Hypervector {
        &self.vectors[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| HdError::UnknownSymbol(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Result<&Hypervector> {
        Ok(&self.vectors[self.index_of(name)?])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Hypervector)> {
        self.names.iter().map(String::as_str).zip(&self.vectors)
    }

    /// Dot product of `query` with every entry, in entry order.
    pub fn scores<Q: Probe + ?Sized>(&self, query: &Q) -> Result<Vec<i64>> {
        check_dims(self.dim, query.dim())?;
        Ok(self.vectors.iter().map(|v| query.dot_with(v)).collect())
    }

    /// Best-matching entry; ties go to the lowest index.
    pub fn cleanup<Q: Probe + ?Sized>(&self, query: &Q) -> Result<Match<'_>> {
        let scores = self.scores(query)?;
        self.best(&scores)
    }

    /// [`ItemMemory::cleanup`] with the scan spread over `exec`; worthwhile
    /// only for large memories.
    pub fn cleanup_with<Q: Probe + Sync + ?Sized>(&self, query: &Q, exec: Exec) -> Result<Match<'_>> {
        check_dims(self.dim, query.dim())?;
        let scores = exec.map_slice(&self.vectors, |v| query.dot_with(v));
        self.best(&scores)
    }

    fn best(&self, scores: &[i64]) -> Result<Match<'_>> {
        let (index, &score) = scores
            .iter()
            .enumerate()
            .fold(None::<(usize, &i64)>, |best, (i, s)| match best {
                Some((_, b)) if b >= s => best,
                _ => Some((i, s)),
            })
            .ok_or(HdError::EmptyMemory)?;
        Ok(Match {
            index,
            name: &self.names[index],
            vector: &self.vectors[index],
            score,
        })
    }

    /// Indices of the `k` highest-scoring entries, best first (stable on ties).
    pub fn top_k<Q: Probe + ?Sized>(&self, query: &Q, k: usize) -> Result<Vec<(usize, i64)>> {
        let scores = self.scores(query)?;
        let mut ranked: Vec<(usize, i64)> = scores.into_iter().enumerate().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(k);
        Ok(ranked)
    }

    /// `Σ_k dot(query, v_k) · v_k`, exact.
    pub fn project<Q: Probe + ?Sized>(&self, query: &Q) -> Result<Accumulator> {
        if self.is_empty() {
            return Err(HdError::EmptyMemory);
        }
        let weights = self.scores(query)?;
        self.superpose(&weights)
    }

    /// `Σ_k weights[k] · v_k`.
    pub fn superpose(&self, weights: &[i64]) -> Result<Accumulator> {
        if weights.len() != self.len() {
            return Err(HdError::InvalidArgument(format!(
                "{} weights for {} entries",
                weights.len(),
                self.len()
            )));
        }
        let mut wide = vec![0i64; self.dim];
        for (v, &w) in self.vectors.iter().zip(weights) {
            if w == 0 {
                continue;
            }
            for (word, chunk) in v.words().iter().zip(wide.chunks_mut(64)) {
                for (b, x) in chunk.iter_mut().enumerate() {
                    if (word >> b) & 1 == 1 {
                        *x += w;
                    } else {
                        *x -= w;
                    }
                }
            }
        }
        let components = wide
            .into_iter()
            .map(|x| i32::try_from(x).map_err(|_| HdError::Overflow("projection")))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = Accumulator::from_components(components)?;
        let mass: u64 = weights.iter().map(|w| w.unsigned_abs()).sum();
        acc.set_weight(mass.max(acc.weight()));
        Ok(acc)
    }

    /// Normalized sum of all entries, tie-broken with this memory's seed.
    pub fn superposition(&self) -> Result<Hypervector> {
        let refs: Vec<&Hypervector> = self.vectors.iter().collect();
        Hypervector::majority(&refs, &self.tie)
    }

    /// Every entry (and the tie-break vector) rotated by `k`.
    pub fn permuted(&self, k: i64) -> ItemMemory {
        let mut out = self.clone();
        for v in &mut out.vectors {
            *v = v.permute(k);
        }
        out.tie = self.tie.permuted(k);
        out
    }
}

/// Content half of a heteroassociative row.
pub trait Payload: Sized {
    fn to_fields(&self) -> Vec<String>;
    fn from_fields(fields: &[&str]) -> Result<Self>;
}

impl Payload for String {
    fn to_fields(&self) -> Vec<String> {
        vec![self.clone()]
    }

    fn from_fields(fields: &[&str]) -> Result<Self> {
        match fields {
            [one] => Ok(one.to_string()),
            _ => Err(HdError::InvalidArgument(format!(
                "expected 1 payload field, got {}",
                fields.len()
            ))),
        }
    }
}

/// Address → content store queried by nearest address.
#[derive(Clone, Debug, PartialEq)]
pub struct HeteroMemory<P> {
    dim: usize,
    addresses: Vec<Hypervector>,
    contents: Vec<P>,
}

impl<P> HeteroMemory<P> {
    /// Rejects identical addresses (dot = N), which would make the table ambiguous.
    pub fn build(dim: usize, rows: Vec<(Hypervector, P)>) -> Result<Self> {
        let mut addresses = Vec::with_capacity(rows.len());
        let mut contents = Vec::with_capacity(rows.len());
        for (addr, content) in rows {
            check_dims(dim, addr.dim())?;
            addresses.push(addr);
            contents.push(content);
        }
        for i in 0..addresses.len() {
            for j in 0..i {
                if addresses[i] == addresses[j] {
                    return Err(HdError::DuplicateAddress(j, i));
                }
            }
        }
        Ok(Self {
            dim,
            addresses,
            contents,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.addresses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addresses.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Hypervector, &P)> {
        self.addresses.iter().zip(&self.contents)
    }

    pub fn address(&self, i: usize) -> &Hypervector {
        &self.addresses[i]
    }

    pub fn content(&self, i: usize) -> &P {
        &self.contents[i]
    }

    /// Row index and score of the best-matching address.
    pub fn lookup_row<Q: Probe + ?Sized>(&self, query: &Q) -> Result<(usize, i64)> {
        check_dims(self.dim, query.dim())?;
        let mut best: Option<(usize, i64)> = None;
        for (i, a) in self.addresses.iter().enumerate() {
            let s = query.dot_with(a);
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best.ok_or(HdError::EmptyMemory)
    }

    pub fn lookup<Q: Probe + ?Sized>(&self, query: &Q) -> Result<&P> {
        let (i, _) = self.lookup_row(query)?;
        Ok(&self.contents[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mem(names: &[&str], dim: usize, seed: u64) -> ItemMemory {
        ItemMemory::random(names, dim, &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn stored_vector_retrieves_itself_with_score_n() {
        let m = mem(&["a", "b", "c", "d"], 1000, 1);
        for (name, v) in m.iter() {
            let hit = m.cleanup(v).unwrap();
            assert_eq!(hit.name, name);
            assert_eq!(hit.score, 1000);
        }
    }

    #[test]
    fn empty_memory_errors() {
        let m = ItemMemory::from_entries(8, 0, vec![]).unwrap();
        let q = Hypervector::ones(8).unwrap();
        assert!(matches!(m.cleanup(&q), Err(HdError::EmptyMemory)));
        assert!(matches!(m.project(&q), Err(HdError::EmptyMemory)));
    }

    #[test]
    fn duplicate_names_rejected() {
        let v = Hypervector::ones(4).unwrap();
        let r = ItemMemory::from_entries(4, 0, vec![("x".into(), v.clone()), ("x".into(), v)]);
        assert!(matches!(r, Err(HdError::DuplicateName(_))));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let v = Hypervector::ones(4).unwrap();
        let m = ItemMemory::from_entries(
            4,
            0,
            vec![("p".into(), v.clone()), ("q".into(), v.clone())],
        )
        .unwrap();
        assert_eq!(m.cleanup(&v).unwrap().index, 0);
        let h = HeteroMemory::build(4, vec![(v.clone(), 1), (v.negate(), 2)]).unwrap();
        let zero = Accumulator::zeros(4).unwrap();
        assert_eq!(*h.lookup(&zero).unwrap(), 1);
    }

    #[test]
    fn project_single_entry_scales_by_n() {
        let m = mem(&["a"], 512, 3);
        let a = m.get("a").unwrap();
        let p = m.project(a).unwrap();
        let expect: Vec<i32> = a.to_signs().iter().map(|&s| s as i32 * 512).collect();
        assert_eq!(p.components(), &expect[..]);
    }

    #[test]
    fn project_of_zero_is_zero() {
        let m = mem(&["a", "b"], 256, 4);
        let p = m.project(&Accumulator::zeros(256).unwrap()).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn hetero_rejects_duplicate_addresses() {
        let v = Hypervector::ones(16).unwrap();
        let r = HeteroMemory::build(16, vec![(v.clone(), "a"), (v, "b")]);
        assert!(matches!(r, Err(HdError::DuplicateAddress(0, 1))));
    }

    #[test]
    fn hetero_single_row_always_wins() {
        let mut rng = Rng::new(8);
        let a = Hypervector::random(64, &mut rng).unwrap();
        let h = HeteroMemory::build(64, vec![(a, "only")]).unwrap();
        let q = Hypervector::random(64, &mut rng).unwrap();
        assert_eq!(*h.lookup(&q).unwrap(), "only");
    }

    #[test]
    fn permuted_memory_is_equivariant() {
        let m = mem(&["a", "b", "c"], 300, 5);
        let mut rng = Rng::new(6);
        let q = m.get("b").unwrap().flip_noise(0.3, &mut rng).unwrap();
        let plain = m.cleanup(&q).unwrap();
        let pm = m.permuted(17);
        let rotated = pm.cleanup(&q.permute(17)).unwrap();
        assert_eq!((plain.name, plain.score), (rotated.name, rotated.score));
    }
}
