//! Substring search with an automaton held in superposition.
//!
//! Position `i` of a base string `b_1 … b_n` becomes a state `s_i`, and the
//! automaton vector is `β = Σ_i s_{i-1} ⊙ b_i ⊙ ρ(s_i)`. A query is answered
//! by starting from the superposition of all states and, for every query
//! symbol `q_j`, stepping `p_j = ρ⁻¹(p_{j-1} ⊙ β ⊙ q_j)`. The clean-up variant
//! additionally projects `p_j` back onto the state memory after each step.
//!
//! The recurrence state is a dense `f64` vector. Its components are products
//! of up to `|Q|` automaton components, which overflow `i32` after a few steps
//! of the original variant. In the clean-up variant each projection is scaled
//! by `1/N`, so a state that is fully present keeps a coefficient near 1 and
//! its score stays near `N` at every step.

use crate::error::{HdError, Result};
use crate::hv::{Accumulator, Hypervector};
use crate::memory::ItemMemory;
use crate::rng::Rng;
use crate::stats::percentile;
use rand::Rng as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Original,
    Cleanup,
}

#[derive(Clone, Debug)]
pub struct StringAutomaton {
    beta: Accumulator,
    state_mem: ItemMemory,
    sym_cb: ItemMemory,
    base_len: usize,
    base: Vec<String>,
    /// `±1.0` components of every state, kept for the dense recurrence.
    dense_states: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryOutcome {
    pub present: bool,
    /// Best state score after the last step.
    pub score: i64,
    /// 1-based end positions of matches; clean-up variant only.
    pub positions: Vec<usize>,
    /// `weights[j][k]`: score of state `s_k` after step `j + 1`.
    pub weights: Option<Vec<Vec<i64>>>,
    pub steps: usize,
    pub projections: usize,
}

pub fn build_string_automaton<S: AsRef<str>>(
    base: &[S],
    sym_cb: &ItemMemory,
    rng: &mut Rng,
) -> Result<StringAutomaton> {
    if base.is_empty() {
        return Err(HdError::InvalidArgument("base string is empty".into()));
    }
    let dim = sym_cb.dim();
    let names: Vec<String> = (0..=base.len()).map(|i| format!("s{i}")).collect();
    let state_mem = ItemMemory::random(&names, dim, rng)?;
    let mut beta = Accumulator::zeros(dim)?;
    for (i, b) in base.iter().enumerate() {
        let t = state_mem
            .vector(i)
            .bind(sym_cb.get(b.as_ref())?)?
            .bind(&state_mem.vector(i + 1).permute(1))?;
        beta.add(&t)?;
    }
    let dense_states = state_mem
        .vectors()
        .iter()
        .map(|v| (0..dim).map(|i| sign_at(v, i)).collect())
        .collect();
    Ok(StringAutomaton {
        beta,
        dense_states,
        state_mem,
        sym_cb: sym_cb.clone(),
        base_len: base.len(),
        base: base.iter().map(|s| s.as_ref().to_string()).collect(),
    })
}

impl StringAutomaton {
    pub fn dim(&self) -> usize {
        self.state_mem.dim()
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn beta(&self) -> &Accumulator {
        &self.beta
    }

    /// States `s_0 … s_n`, named `s0 … sn`.
    pub fn state_mem(&self) -> &ItemMemory {
        &self.state_mem
    }

    pub fn sym_cb(&self) -> &ItemMemory {
        &self.sym_cb
    }

    /// Accept threshold used when none is supplied: `N / 2`.
    pub fn default_threshold(&self) -> i64 {
        self.dim() as i64 / 2
    }

    pub fn query<S: AsRef<str>>(&self, query: &[S], threshold: i64, variant: Variant) -> Result<QueryOutcome> {
        self.run(query, threshold, variant, true)
    }

    fn run<S: AsRef<str>>(&self, query: &[S], threshold: i64, variant: Variant, record: bool) -> Result<QueryOutcome> {
        if query.is_empty() {
            return Err(HdError::InvalidArgument("query is empty".into()));
        }
        let symbols = query
            .iter()
            .map(|q| self.sym_cb.get(q.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.dim();
        let mut p = vec![0f64; dim];
        for v in &self.dense_states {
            axpy(&mut p, v, 1.0);
        }
        let beta: Vec<f64> = self.beta.components().iter().map(|&c| c as f64).collect();
        let mut weights = record.then(Vec::new);
        let mut last = Vec::new();
        let mut projections = 0;
        for q in &symbols {
            for (chunk, (b, word)) in p.chunks_mut(64).zip(beta.chunks(64).zip(q.words())) {
                for (k, (x, &c)) in chunk.iter_mut().zip(b).enumerate() {
                    *x *= if (word >> k) & 1 == 1 { c } else { -c };
                }
            }
            p.rotate_left(1);
            last = self.state_scores(&p);
            if variant == Variant::Cleanup {
                p.iter_mut().for_each(|x| *x = 0.0);
                let scale = 1.0 / dim as f64;
                for (v, &w) in self.dense_states.iter().zip(&last) {
                    axpy(&mut p, v, w * scale);
                }
                projections += 1;
            }
            if let Some(w) = weights.as_mut() {
                w.push(last.iter().map(|&x| x.round() as i64).collect());
            }
        }
        let rounded: Vec<i64> = last.iter().map(|&x| x.round() as i64).collect();
        let score = rounded.iter().copied().max().unwrap_or(i64::MIN);
        let positions = match variant {
            Variant::Cleanup => rounded
                .iter()
                .enumerate()
                .filter(|(_, &w)| w >= threshold)
                .map(|(k, _)| k)
                .collect(),
            Variant::Original => Vec::new(),
        };
        Ok(QueryOutcome {
            present: score >= threshold,
            score,
            positions,
            weights,
            steps: symbols.len(),
            projections,
        })
    }

    fn state_scores(&self, p: &[f64]) -> Vec<f64> {
        self.dense_states
            .iter()
            .map(|v| p.iter().zip(v).map(|(x, s)| x * s).sum())
            .collect()
    }
}

fn sign_at(v: &Hypervector, i: usize) -> f64 {
    if (v.words()[i / 64] >> (i % 64)) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

fn axpy(p: &mut [f64], v: &[f64], w: f64) {
    for (x, s) in p.iter_mut().zip(v) {
        *x += w * s;
    }
}

pub fn query_original<S: AsRef<str>>(sa: &StringAutomaton, query: &[S], threshold: i64) -> Result<QueryOutcome> {
    sa.query(query, threshold, Variant::Original)
}

pub fn query_cleanup<S: AsRef<str>>(sa: &StringAutomaton, query: &[S], threshold: i64) -> Result<QueryOutcome> {
    sa.query(query, threshold, Variant::Cleanup)
}

/// 1-based end positions of every occurrence of `query` in `base`.
pub fn naive_match_ends<S: AsRef<str>, T: AsRef<str>>(base: &[S], query: &[T]) -> Vec<usize> {
    if query.is_empty() || query.len() > base.len() {
        return Vec::new();
    }
    (query.len()..=base.len())
        .filter(|&end| {
            base[end - query.len()..end]
                .iter()
                .zip(query)
                .all(|(a, b)| a.as_ref() == b.as_ref())
        })
        .collect()
}

/// Random query of `len` symbols from the automaton's alphabet that does not
/// occur in its base string.
pub fn random_absent_query(sa: &StringAutomaton, len: usize, rng: &mut Rng) -> Result<Vec<String>> {
    const ATTEMPTS: usize = 10_000;
    let alphabet = sa.sym_cb.names();
    for _ in 0..ATTEMPTS {
        let q: Vec<String> = (0..len)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone())
            .collect();
        if naive_match_ends(&sa.base, &q).is_empty() {
            return Ok(q);
        }
    }
    Err(HdError::InvalidArgument(format!(
        "no absent query of length {len} found in {ATTEMPTS} draws"
    )))
}

/// Midpoint between the 99.9th percentile of scores on random absent queries
/// and `N`.
pub fn calibrate_threshold(
    sa: &StringAutomaton,
    query_len: usize,
    variant: Variant,
    trials: usize,
    rng: &mut Rng,
) -> Result<i64> {
    if trials < 100 {
        return Err(HdError::InvalidArgument(format!("calibration needs at least 100 trials, got {trials}")));
    }
    let mut negatives = Vec::with_capacity(trials);
    for _ in 0..trials {
        let q = random_absent_query(sa, query_len, rng)?;
        negatives.push(sa.run(&q, i64::MAX, variant, false)?.score as f64);
    }
    let p999 = percentile(&negatives, 0.999);
    Ok(((p999 + sa.dim() as f64) / 2.0).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(dim: usize, seed: u64) -> ItemMemory {
        let names: Vec<String> = ('a'..='z').map(|c| c.to_string()).collect();
        ItemMemory::random(&names, dim, &mut Rng::new(seed)).unwrap()
    }

    fn chars(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn hello_automaton_shape() {
        let cb = letters(4096, 1);
        let sa = build_string_automaton(&chars("hello"), &cb, &mut Rng::new(2)).unwrap();
        assert_eq!(sa.state_mem().len(), 6);
        assert_eq!(sa.base_len(), 5);
        let first = sa
            .state_mem
            .vector(0)
            .bind(cb.get("h").unwrap())
            .unwrap()
            .bind(&sa.state_mem().vector(1).permute(1))
            .unwrap();
        let d = sa.beta().dot_hv(&first).unwrap();
        assert!((d - 4096).abs() < 4 * 4 * 64, "{d}");
    }

    #[test]
    fn single_symbol_base_is_one_transition() {
        let cb = letters(256, 1);
        let sa = build_string_automaton(&chars("q"), &cb, &mut Rng::new(3)).unwrap();
        let t = sa
            .state_mem
            .vector(0)
            .bind(cb.get("q").unwrap())
            .unwrap()
            .bind(&sa.state_mem().vector(1).permute(1))
            .unwrap();
        assert_eq!(sa.beta(), &Accumulator::from_hypervector(&t));
    }

    #[test]
    fn hello_queries() {
        // The original variant accumulates crosstalk at every step and needs
        // a much larger dimension than the clean-up variant.
        let cb = letters(1 << 16, 7);
        let sa = build_string_automaton(&chars("hello"), &cb, &mut Rng::new(8)).unwrap();
        let th = sa.default_threshold();
        assert!(query_original(&sa, &chars("ell"), th).unwrap().present);
        assert!(!query_original(&sa, &chars("lxo"), th).unwrap().present);

        let cb = letters(8192, 7);
        let sa = build_string_automaton(&chars("hello"), &cb, &mut Rng::new(8)).unwrap();
        let th = sa.default_threshold();
        let hit = query_cleanup(&sa, &chars("llo"), th).unwrap();
        assert!(hit.present);
        assert_eq!(hit.positions, vec![5]);
        let full = query_cleanup(&sa, &chars("hello"), th).unwrap();
        assert_eq!(full.positions, vec![5]);
        let repeated = query_cleanup(&sa, &chars("l"), th).unwrap();
        assert_eq!(repeated.positions, vec![3, 4]);
        assert!(!query_cleanup(&sa, &chars("lxo"), th).unwrap().present);
    }

    #[test]
    fn step_and_projection_counts() {
        let cb = letters(1024, 7);
        let sa = build_string_automaton(&chars("abcabc"), &cb, &mut Rng::new(8)).unwrap();
        let o = query_original(&sa, &chars("bca"), 0).unwrap();
        assert_eq!((o.steps, o.projections), (3, 0));
        let c = query_cleanup(&sa, &chars("bca"), 0).unwrap();
        assert_eq!((c.steps, c.projections), (3, 3));
        assert_eq!(c.weights.unwrap().len(), 3);
    }

    #[test]
    fn unknown_symbol_and_empty_query() {
        let cb = letters(256, 1);
        let sa = build_string_automaton(&chars("abc"), &cb, &mut Rng::new(3)).unwrap();
        assert!(matches!(query_original(&sa, &chars("A"), 0), Err(HdError::UnknownSymbol(_))));
        assert!(query_cleanup(&sa, &Vec::<String>::new(), 0).is_err());
        assert!(build_string_automaton(&Vec::<String>::new(), &cb, &mut Rng::new(3)).is_err());
    }

    #[test]
    fn naive_oracle() {
        assert_eq!(naive_match_ends(&chars("hello"), &chars("l")), vec![3, 4]);
        assert_eq!(naive_match_ends(&chars("aaaa"), &chars("aa")), vec![2, 3, 4]);
        assert!(naive_match_ends(&chars("ab"), &chars("abc")).is_empty());
    }

    #[test]
    fn calibration_is_deterministic_and_separates() {
        let cb = letters(4096, 5);
        let sa = build_string_automaton(&chars("hello"), &cb, &mut Rng::new(6)).unwrap();
        let a = calibrate_threshold(&sa, 3, Variant::Cleanup, 200, &mut Rng::new(9)).unwrap();
        let b = calibrate_threshold(&sa, 3, Variant::Cleanup, 200, &mut Rng::new(9)).unwrap();
        assert_eq!(a, b);
        assert!(a < 4096);
        assert!(query_cleanup(&sa, &chars("ell"), a).unwrap().present);
        assert!(!query_cleanup(&sa, &chars("lxo"), a).unwrap().present);
        assert!(calibrate_threshold(&sa, 3, Variant::Cleanup, 50, &mut Rng::new(9)).is_err());
    }
}
