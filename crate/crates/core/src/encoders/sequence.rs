use crate::error::{HdError, Result};
use crate::hv::{Accumulator, Hypervector};
use crate::memory::ItemMemory;

/// Permutation power carried by the last element of a sequence.
pub const LAST_ELEMENT_POWER: i64 = 0;

fn power(len: usize, position: usize) -> i64 {
    (len - position) as i64 + LAST_ELEMENT_POWER
}

/// `Σ_i ρ^(k-i)(v_i)` for a length-`k` sequence, positions 1-based.
pub fn encode_sequence_sum<S: AsRef<str>>(cb: &ItemMemory, seq: &[S]) -> Result<Accumulator> {
    let k = seq.len();
    let mut acc = Accumulator::zeros(cb.dim())?;
    for (i, name) in seq.iter().enumerate() {
        acc.add(&cb.get(name.as_ref())?.permute(power(k, i + 1)))?;
    }
    Ok(acc)
}

/// `Π_i ρ^(k-i)(v_i)`; distinct even for sequences that differ in one place.
pub fn encode_sequence_product<S: AsRef<str>>(cb: &ItemMemory, seq: &[S]) -> Result<Hypervector> {
    if seq.is_empty() {
        return Err(HdError::InvalidArgument("empty sequence".into()));
    }
    let k = seq.len();
    let mut out = Hypervector::ones(cb.dim())?;
    for (i, name) in seq.iter().enumerate() {
        out = out.bind(&cb.get(name.as_ref())?.permute(power(k, i + 1)))?;
    }
    Ok(out)
}

fn check_position(i: usize, k: usize) -> Result<()> {
    if (1..=k).contains(&i) {
        Ok(())
    } else {
        Err(HdError::InvalidArgument(format!(
            "position {i} outside 1..={k}"
        )))
    }
}

/// Which symbol sits at 1-based position `i` of a length-`k` sum-encoded sequence.
pub fn probe_position(seq: &Accumulator, i: usize, k: usize, cb: &ItemMemory) -> Result<String> {
    check_position(i, k)?;
    let probe = seq.permute(-power(k, i));
    Ok(cb.cleanup(&probe)?.name.to_string())
}

/// Swaps the known symbol `old` at position `i` for `new` in a sum encoding.
pub fn replace_at_sum(
    seq: &Accumulator,
    i: usize,
    old: &str,
    new: &str,
    k: usize,
    cb: &ItemMemory,
) -> Result<Accumulator> {
    check_position(i, k)?;
    let p = power(k, i);
    let mut out = seq.clone();
    out.sub(&cb.get(old)?.permute(p))?;
    out.add(&cb.get(new)?.permute(p))?;
    Ok(out)
}

/// Same as [`replace_at_sum`] for a product encoding: unbind `old`, bind `new`.
pub fn replace_at_product(
    seq: &Hypervector,
    i: usize,
    old: &str,
    new: &str,
    k: usize,
    cb: &ItemMemory,
) -> Result<Hypervector> {
    check_position(i, k)?;
    let p = power(k, i);
    seq.bind(&cb.get(old)?.permute(p))?
        .bind(&cb.get(new)?.permute(p))
}

/// Appends `suffix` to an already encoded sequence: `ρ^len(suffix)(seq) + enc(suffix)`.
pub fn shift_and_concat<S: AsRef<str>>(
    seq: &Accumulator,
    suffix: &[S],
    cb: &ItemMemory,
) -> Result<Accumulator> {
    let mut out = seq.permute(suffix.len() as i64);
    out.add_acc(&encode_sequence_sum(cb, suffix)?)?;
    Ok(out)
}

/// Sum of product-encoded n-grams over all stride-1 windows.
pub fn encode_ngram_stats<S: AsRef<str>>(cb: &ItemMemory, text: &[S], n: usize) -> Result<Accumulator> {
    if n == 0 {
        return Err(HdError::InvalidArgument("n-gram size must be at least 1".into()));
    }
    if text.len() < n {
        return Err(HdError::InvalidArgument(format!(
            "text of length {} shorter than n = {n}",
            text.len()
        )));
    }
    let mut acc = Accumulator::zeros(cb.dim())?;
    for window in text.windows(n) {
        acc.add(&encode_sequence_product(cb, window)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::encode_multiset;
    use crate::rng::Rng;

    const ABC: [&str; 9] = ["a", "b", "c", "d", "e", "x", "y", "z", "q"];

    fn cb(dim: usize) -> ItemMemory {
        ItemMemory::random(&ABC, dim, &mut Rng::new(5)).unwrap()
    }

    #[test]
    fn probe_third_of_five() {
        let c = cb(10_000);
        let s = encode_sequence_sum(&c, &["a", "b", "c", "d", "e"]).unwrap();
        assert_eq!(probe_position(&s, 3, 5, &c).unwrap(), "c");
        let direct = c.cleanup(&s.permute(-2)).unwrap();
        assert_eq!(direct.name, "c");
        assert!(probe_position(&s, 0, 5, &c).is_err());
        assert!(probe_position(&s, 6, 5, &c).is_err());
    }

    #[test]
    fn singletons() {
        let c = cb(256);
        let s = encode_sequence_sum(&c, &["x"]).unwrap();
        assert_eq!(s.components(), Accumulator::from_hypervector(c.get("x").unwrap()).components());
        assert_eq!(&encode_sequence_product(&c, &["x"]).unwrap(), c.get("x").unwrap());
        assert_eq!(probe_position(&s, 1, 1, &c).unwrap(), "x");
    }

    #[test]
    fn replace_sum_and_product() {
        let c = cb(1000);
        let s = encode_sequence_sum(&c, &["a", "b", "c", "d", "e"]).unwrap();
        let r = replace_at_sum(&s, 4, "d", "z", 5, &c).unwrap();
        let direct = encode_sequence_sum(&c, &["a", "b", "c", "z", "e"]).unwrap();
        assert_eq!(r.components(), direct.components());
        assert_eq!(replace_at_sum(&s, 2, "b", "b", 5, &c).unwrap().components(), s.components());

        let p = encode_sequence_product(&c, &["a", "b", "c", "d", "e"]).unwrap();
        let r = replace_at_product(&p, 4, "d", "z", 5, &c).unwrap();
        assert_eq!(r, encode_sequence_product(&c, &["a", "b", "c", "z", "e"]).unwrap());
    }

    #[test]
    fn concat_equals_direct_encoding() {
        let c = cb(10_000);
        let s = encode_sequence_sum(&c, &["a", "b", "c", "d", "e"]).unwrap();
        let joined = shift_and_concat(&s, &["x", "y", "z"], &c).unwrap();
        let direct = encode_sequence_sum(&c, &["a", "b", "c", "d", "e", "x", "y", "z"]).unwrap();
        assert_eq!(joined.components(), direct.components());
        assert_eq!(probe_position(&joined, 6, 8, &c).unwrap(), "x");
        let same = shift_and_concat::<&str>(&s, &[], &c).unwrap();
        assert_eq!(same.components(), s.components());
    }

    #[test]
    fn unigrams_are_the_multiset() {
        let c = cb(512);
        let text = ["a", "b", "a", "c", "a", "b"];
        let ng = encode_ngram_stats(&c, &text, 1).unwrap();
        let ms = encode_multiset(&c, &[("a", 3), ("b", 2), ("c", 1)]).unwrap();
        assert_eq!(ng.components(), ms.components());
    }

    #[test]
    fn abab_bigrams() {
        let c = cb(512);
        let ng = encode_ngram_stats(&c, &["a", "b", "a", "b"], 2).unwrap();
        let ab = encode_sequence_product(&c, &["a", "b"]).unwrap();
        let ba = encode_sequence_product(&c, &["b", "a"]).unwrap();
        let mut expect = Accumulator::zeros(512).unwrap();
        expect.add_scaled(&ab, 2).unwrap();
        expect.add(&ba).unwrap();
        assert_eq!(ng.components(), expect.components());
        assert!(encode_ngram_stats(&c, &["a"], 2).is_err());
        assert!(encode_ngram_stats(&c, &["a"], 0).is_err());
    }
}
