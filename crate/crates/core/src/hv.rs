//! Bipolar hypervectors and integer accumulators.
//!
//! A [`Hypervector`] packs one component per bit: bit `1` is `+1`, bit `0` is
//! `-1`. Component `i` lives in bit `i % 64` of word `i / 64`; bits past `dim`
//! in the last word are always zero.

use rand::seq::index;
use rand::RngCore;

use crate::error::{check_dims, HdError, Result};
use crate::rng::Rng;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypervector {
    dim: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for Hypervector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Hypervector(dim={}, ", self.dim)?;
        for i in 0..self.dim.min(16) {
            f.write_str(if self.bit(i) { "+" } else { "-" })?;
        }
        if self.dim > 16 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

fn words_for(dim: usize) -> usize {
    dim.div_ceil(64)
}

fn tail_mask(dim: usize) -> u64 {
    match dim % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Hypervector {
    fn from_words(dim: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(dim));
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(dim);
        }
        Self { dim, words }
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            Err(HdError::InvalidDimension(dim))
        } else {
            Ok(())
        }
    }

    /// I.i.d. components, `+1` with probability 1/2.
    pub fn random(dim: usize, rng: &mut Rng) -> Result<Self> {
        Self::check_dim(dim)?;
        let words = (0..words_for(dim)).map(|_| rng.next_u64()).collect();
        Ok(Self::from_words(dim, words))
    }

    /// The all-`+1` vector, identity element of binding.
    pub fn ones(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self::from_words(dim, vec![u64::MAX; words_for(dim)]))
    }

    /// Builds from a slice of `±1` values.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        Self::check_dim(signs.len())?;
        let mut words = vec![0u64; words_for(signs.len())];
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => words[i / 64] |= 1 << (i % 64),
                -1 => {}
                other => {
                    return Err(HdError::InvalidArgument(format!(
                        "component {i} is {other}, expected -1 or +1"
                    )))
                }
            }
        }
        Ok(Self::from_words(signs.len(), words))
    }

    /// Packed little-endian bytes: component 0 is the least-significant bit of byte 0.
    pub fn from_bytes(dim: usize, bytes: &[u8]) -> Result<Self> {
        Self::check_dim(dim)?;
        let need = dim.div_ceil(8);
        if bytes.len() != need {
            return Err(HdError::InvalidArgument(format!(
                "expected {need} bytes for dim {dim}, got {}",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; words_for(dim)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        let hv = Self::from_words(dim, words.clone());
        if hv.words != words {
            return Err(HdError::InvalidArgument(
                "padding bits past dim must be zero".into(),
            ));
        }
        Ok(hv)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.dim.div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(n)
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    fn bit(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Component `i` as `±1`.
    pub fn get(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    pub fn to_signs(&self) -> Vec<i8> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    pub fn negate(&self) -> Self {
        Self::from_words(self.dim, self.words.iter().map(|w| !w).collect())
    }

    /// Component-wise product (XOR on the packed form).
    pub fn bind(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(self.bind_unchecked(other))
    }

    pub(crate) fn bind_unchecked(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| !(a ^ b))
                .collect(),
        }
        .masked()
    }

    fn masked(mut self) -> Self {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.dim);
        }
        self
    }

    /// Binds a sequence of vectors; the empty product is not defined.
    pub fn bind_all<'a, I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Hypervector>,
    {
        let mut it = vectors.into_iter();
        let first = it
            .next()
            .ok_or_else(|| HdError::InvalidArgument("empty product".into()))?;
        let mut acc = first.clone();
        for v in it {
            acc = acc.bind(v)?;
        }
        Ok(acc)
    }

    /// Number of positions where the two vectors disagree.
    pub fn hamming(&self, other: &Self) -> Result<u64> {
        check_dims(self.dim, other.dim)?;
        Ok(self.hamming_unchecked(other))
    }

    #[inline]
    pub(crate) fn hamming_unchecked(&self, other: &Self) -> u64 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    /// `Σ a[i] b[i] = N - 2 * hamming`.
    pub fn dot(&self, other: &Self) -> Result<i64> {
        check_dims(self.dim, other.dim)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &Self) -> i64 {
        self.dim as i64 - 2 * self.hamming_unchecked(other) as i64
    }

    /// Cyclic rotation: component `i` moves to `(i + k) mod N`. Negative `k`
    /// rotates the other way.
    pub fn permute(&self, k: i64) -> Self {
        let n = self.dim;
        let shift = k.rem_euclid(n as i64) as usize;
        if shift == 0 {
            return self.clone();
        }
        let mut out = vec![0u64; self.words.len()];
        for (wo, slot) in out.iter_mut().enumerate() {
            let lo = wo * 64;
            let len = (n - lo).min(64);
            // source index of output bit `lo` is lo - shift (mod n)
            let start = (lo + n - shift) % n;
            *slot = self.read_ring(start, len);
        }
        Self::from_words(n, out)
    }

    fn read_bits(&self, pos: usize, len: usize) -> u64 {
        debug_assert!(len <= 64 && pos + len <= self.dim);
        if len == 0 {
            return 0;
        }
        let wi = pos / 64;
        let s = pos % 64;
        let mut v = self.words[wi] >> s;
        if s != 0 && wi + 1 < self.words.len() {
            v |= self.words[wi + 1] << (64 - s);
        }
        v & low_mask(len)
    }

    fn read_ring(&self, start: usize, len: usize) -> u64 {
        let first = (self.dim - start).min(len);
        let mut v = self.read_bits(start, first);
        if first < len {
            v |= self.read_bits(0, len - first) << first;
        }
        v
    }

    /// Flips the sign of exactly `round(p * N)` distinct positions drawn
    /// uniformly without replacement.
    pub fn flip_noise(&self, p: f64, rng: &mut Rng) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(HdError::InvalidProbability(p));
        }
        let count = (p * self.dim as f64).round() as usize;
        let mut out = self.clone();
        if count == self.dim {
            return Ok(self.negate());
        }
        for i in index::sample(rng, self.dim, count) {
            out.words[i / 64] ^= 1 << (i % 64);
        }
        Ok(out)
    }

    /// Majority over an arbitrary number of bipolar vectors, computed with
    /// bit-sliced counters. Equal to `normalize` of their sum.
    pub fn majority(vectors: &[&Hypervector], tie: &TieBreak) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| HdError::InvalidArgument("majority of zero vectors".into()))?;
        let dim = first.dim;
        for v in vectors {
            check_dims(dim, v.dim)?;
        }
        check_dims(dim, tie.vector.dim)?;
        let k = vectors.len();
        let planes = usize::BITS as usize - k.leading_zeros() as usize;
        let threshold = k / 2;
        let even = k % 2 == 0;
        let mut counter = vec![0u64; planes];
        let mut out = vec![0u64; first.words.len()];
        for (w, slot) in out.iter_mut().enumerate() {
            counter.iter_mut().for_each(|p| *p = 0);
            for v in vectors {
                let mut carry = v.words[w];
                for plane in counter.iter_mut() {
                    if carry == 0 {
                        break;
                    }
                    let next = *plane & carry;
                    *plane ^= carry;
                    carry = next;
                }
            }
            // count > threshold, count == threshold
            let mut gt = 0u64;
            let mut eq = u64::MAX;
            for b in (0..planes).rev() {
                if (threshold >> b) & 1 == 1 {
                    eq &= counter[b];
                } else {
                    gt |= eq & counter[b];
                    eq &= !counter[b];
                }
            }
            *slot = if even {
                gt | (eq & tie.vector.words[w])
            } else {
                gt
            };
        }
        Ok(Self::from_words(dim, out))
    }
}

/// Deterministic sign per component used when a majority is tied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreak {
    seed: u64,
    vector: Hypervector,
}

impl TieBreak {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        let vector = Hypervector::random(dim, &mut Rng::new(seed))?;
        Ok(Self { seed, vector })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.vector.dim
    }

    pub fn vector(&self) -> &Hypervector {
        &self.vector
    }

    /// Tie-break signs rotated along with a permuted codebook.
    pub fn permuted(&self, k: i64) -> TieBreak {
        TieBreak {
            seed: self.seed,
            vector: self.vector.permute(k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Non-thresholded superposition with exact integer components.
///
/// `weight` counts the bipolar addends that went in (scaled additions count
/// `|c|` times), so `|component[i]| <= weight` always holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accumulator {
    components: Vec<i32>,
    weight: u64,
}

impl Accumulator {
    pub fn zeros(dim: usize) -> Result<Self> {
        Hypervector::check_dim(dim)?;
        Ok(Self {
            components: vec![0; dim],
            weight: 0,
        })
    }

    pub fn from_hypervector(v: &Hypervector) -> Self {
        let mut acc = Self {
            components: vec![0; v.dim],
            weight: 0,
        };
        acc.add_scaled_unchecked(v, 1);
        acc
    }

    /// Raw components; `weight` is set to the largest absolute component.
    pub fn from_components(components: Vec<i32>) -> Result<Self> {
        Hypervector::check_dim(components.len())?;
        let weight = components
            .iter()
            .map(|c| c.unsigned_abs() as u64)
            .max()
            .unwrap_or(0);
        Ok(Self { components, weight })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[i32] {
        &self.components
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub(crate) fn set_weight(&mut self, weight: u64) {
        self.weight = weight;
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }

    pub fn accumulate(&mut self, v: &Hypervector, sign: Sign) -> Result<()> {
        self.add_scaled(v, sign.factor())
    }

    pub fn add(&mut self, v: &Hypervector) -> Result<()> {
        self.add_scaled(v, 1)
    }

    pub fn sub(&mut self, v: &Hypervector) -> Result<()> {
        self.add_scaled(v, -1)
    }

    /// `self += c * v`.
    pub fn add_scaled(&mut self, v: &Hypervector, c: i32) -> Result<()> {
        check_dims(self.dim(), v.dim)?;
        self.add_scaled_unchecked(v, c);
        Ok(())
    }

    fn add_scaled_unchecked(&mut self, v: &Hypervector, c: i32) {
        for (w, chunk) in v.words.iter().zip(self.components.chunks_mut(64)) {
            for (b, x) in chunk.iter_mut().enumerate() {
                let s = (((w >> b) & 1) as i32) * 2 - 1;
                *x += c * s;
            }
        }
        self.weight += c.unsigned_abs() as u64;
    }

    /// Component-wise sum of two accumulators.
    pub fn add_acc(&mut self, other: &Accumulator) -> Result<()> {
        check_dims(self.dim(), other.dim())?;
        for (x, y) in self.components.iter_mut().zip(&other.components) {
            *x += *y;
        }
        self.weight += other.weight;
        Ok(())
    }

    pub fn sub_acc(&mut self, other: &Accumulator) -> Result<()> {
        check_dims(self.dim(), other.dim())?;
        for (x, y) in self.components.iter_mut().zip(&other.components) {
            *x -= *y;
        }
        self.weight += other.weight;
        Ok(())
    }

    /// Component-wise product. Distributes over the addends of both sides.
    pub fn mul(&self, other: &Accumulator) -> Result<Accumulator> {
        check_dims(self.dim(), other.dim())?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.checked_mul(*b).ok_or(HdError::Overflow("product")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            weight: self.weight.saturating_mul(other.weight),
        })
    }

    /// Binds every addend with `v` (sign flip where `v` is `-1`).
    pub fn bind(&self, v: &Hypervector) -> Result<Accumulator> {
        check_dims(self.dim(), v.dim)?;
        let mut out = self.clone();
        for (w, chunk) in v.words.iter().zip(out.components.chunks_mut(64)) {
            for (b, x) in chunk.iter_mut().enumerate() {
                if (w >> b) & 1 == 0 {
                    *x = -*x;
                }
            }
        }
        Ok(out)
    }

    /// Same rotation convention as [`Hypervector::permute`].
    pub fn permute(&self, k: i64) -> Accumulator {
        let shift = k.rem_euclid(self.dim() as i64) as usize;
        let mut out = self.clone();
        out.components.rotate_right(shift);
        out
    }

    pub fn dot_hv(&self, v: &Hypervector) -> Result<i64> {
        check_dims(self.dim(), v.dim)?;
        Ok(self.dot_hv_unchecked(v))
    }

    pub(crate) fn dot_hv_unchecked(&self, v: &Hypervector) -> i64 {
        let mut pos = 0i64;
        let mut total = 0i64;
        for (w, chunk) in v.words.iter().zip(self.components.chunks(64)) {
            for (b, &x) in chunk.iter().enumerate() {
                let bit = ((w >> b) & 1) as i64;
                pos += bit * x as i64;
                total += x as i64;
            }
        }
        2 * pos - total
    }

    pub fn dot(&self, other: &Accumulator) -> Result<i64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| *a as i64 * *b as i64)
            .sum())
    }

    /// Sign of each component; zeros take the tie-break sign for that index.
    pub fn normalize(&self, tie: &TieBreak) -> Result<Hypervector> {
        check_dims(self.dim(), tie.dim())?;
        let mut words = vec![0u64; words_for(self.dim())];
        for ((slot, chunk), t) in words
            .iter_mut()
            .zip(self.components.chunks(64))
            .zip(&tie.vector.words)
        {
            let mut w = 0u64;
            for (b, &x) in chunk.iter().enumerate() {
                let bit = match x.signum() {
                    1 => 1,
                    -1 => 0,
                    _ => (t >> b) & 1,
                };
                w |= bit << b;
            }
            *slot = w;
        }
        Ok(Hypervector::from_words(self.dim(), words))
    }
}

/// Anything that can be scored against a stored hypervector: a bipolar
/// vector or an accumulator.
pub trait Probe {
    fn dim(&self) -> usize;
    fn dot_with(&self, v: &Hypervector) -> i64;
}

impl Probe for Hypervector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn dot_with(&self, v: &Hypervector) -> i64 {
        self.dot_unchecked(v)
    }
}

impl Probe for Accumulator {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn dot_with(&self, v: &Hypervector) -> i64 {
        self.dot_hv_unchecked(v)
    }
}

/// Operations shared by bipolar vectors and accumulators, so encoders can
/// query either a normalized or a raw compound vector.
pub trait Compound: Probe + Sized {
    fn bind_with(&self, v: &Hypervector) -> Result<Self>;
    fn rotate(&self, k: i64) -> Self;
    /// Component-wise product with an accumulator.
    fn times(&self, acc: &Accumulator) -> Result<Accumulator>;
}

impl Compound for Hypervector {
    fn bind_with(&self, v: &Hypervector) -> Result<Self> {
        self.bind(v)
    }

    fn rotate(&self, k: i64) -> Self {
        self.permute(k)
    }

    fn times(&self, acc: &Accumulator) -> Result<Accumulator> {
        acc.bind(self)
    }
}

impl Compound for Accumulator {
    fn bind_with(&self, v: &Hypervector) -> Result<Self> {
        self.bind(v)
    }

    fn rotate(&self, k: i64) -> Self {
        self.permute(k)
    }

    fn times(&self, acc: &Accumulator) -> Result<Accumulator> {
        self.mul(acc)
    }
}
