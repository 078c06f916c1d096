use std::collections::HashSet;

use crate::error::{HdError, Result};
use crate::hv::{Accumulator, Hypervector, Probe};
use crate::memory::ItemMemory;

/// Midpoint between the signal expectation `N` and the noise expectation 0.
pub fn default_threshold(dim: usize) -> i64 {
    dim as i64 / 2
}

/// Sum of the member vectors. Duplicates are rejected; use
/// [`encode_multiset`] for counts.
pub fn encode_set<S: AsRef<str>>(cb: &ItemMemory, members: &[S]) -> Result<Accumulator> {
    let mut seen = HashSet::new();
    let mut acc = Accumulator::zeros(cb.dim())?;
    for m in members {
        let m = m.as_ref();
        if !seen.insert(m) {
            return Err(HdError::DuplicateName(m.to_string()));
        }
        acc.add(cb.get(m)?)?;
    }
    Ok(acc)
}

/// `Σ count · vector`.
pub fn encode_multiset<S: AsRef<str>>(cb: &ItemMemory, counts: &[(S, u32)]) -> Result<Accumulator> {
    let mut acc = Accumulator::zeros(cb.dim())?;
    for (name, count) in counts {
        let c = i32::try_from(*count).map_err(|_| HdError::Overflow("multiset count"))?;
        acc.add_scaled(cb.get(name.as_ref())?, c)?;
    }
    Ok(acc)
}

/// Per-symbol frequency estimate `dot(v, symbol)`, in codebook order. Any
/// affine calibration to counts is left to the caller.
pub fn decode_histogram<'a>(v: &Hypervector, cb: &'a ItemMemory) -> Result<Vec<(&'a str, i64)>> {
    let scores = cb.scores(v)?;
    Ok(cb.names().iter().map(String::as_str).zip(scores).collect())
}

/// `dot(set, v) >= threshold`, defaulting to [`default_threshold`].
pub fn is_member<Q: Probe>(set: &Q, v: &Hypervector, threshold: Option<i64>) -> Result<bool> {
    crate::error::check_dims(set.dim(), v.dim())?;
    let t = threshold.unwrap_or_else(|| default_threshold(v.dim()));
    Ok(set.dot_with(v) >= t)
}

/// Binds every element of one set with every element of the other in a
/// single component-wise product.
pub fn cross_product(a: &Accumulator, b: &Accumulator) -> Result<Accumulator> {
    a.mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::TieBreak;
    use crate::rng::Rng;

    fn cb(names: &[&str], dim: usize) -> ItemMemory {
        ItemMemory::random(names, dim, &mut Rng::new(21)).unwrap()
    }

    #[test]
    fn empty_set_is_zero_and_duplicates_fail() {
        let c = cb(&["a", "b"], 64);
        assert!(encode_set::<&str>(&c, &[]).unwrap().is_zero());
        assert!(matches!(encode_set(&c, &["a", "a"]), Err(HdError::DuplicateName(_))));
        assert!(matches!(encode_set(&c, &["q"]), Err(HdError::UnknownSymbol(_))));
    }

    #[test]
    fn membership_signal_and_noise() {
        let c = cb(&["a", "b", "c", "d", "e", "f"], 10_000);
        let s = encode_set(&c, &["a", "b", "c", "d", "e"]).unwrap();
        assert!(is_member(&s, c.get("a").unwrap(), None).unwrap());
        assert!(!is_member(&s, c.get("f").unwrap(), None).unwrap());
    }

    #[test]
    fn multiset_worked_example() {
        let c = cb(&["a", "b", "c"], 500);
        let m = encode_multiset(&c, &[("a", 3), ("b", 2), ("c", 1)]).unwrap();
        let mut direct = Accumulator::zeros(500).unwrap();
        for n in ["a", "a", "a", "b", "b", "c"] {
            direct.add(c.get(n).unwrap()).unwrap();
        }
        assert_eq!(m.components(), direct.components());
        assert!(encode_multiset(&c, &[("a", 0), ("b", 0)]).unwrap().is_zero());
    }

    #[test]
    fn histogram_of_single_symbol() {
        let c = cb(&["a", "b", "c"], 1000);
        let m = encode_multiset(&c, &[("a", 5)]).unwrap();
        let v = m.normalize(&TieBreak::new(1000, 0).unwrap()).unwrap();
        assert_eq!(&v, c.get("a").unwrap());
        let est = decode_histogram(&v, &c).unwrap();
        assert_eq!(est[0], ("a", 1000));
        let best = est.iter().max_by_key(|e| e.1).unwrap();
        assert_eq!(best.0, "a");
    }

    #[test]
    fn cross_product_of_singletons_is_a_bind() {
        let c = cb(&["a", "x"], 300);
        let a = encode_set(&c, &["a"]).unwrap();
        let x = encode_set(&c, &["x"]).unwrap();
        let p = cross_product(&a, &x).unwrap();
        let direct = c.get("a").unwrap().bind(c.get("x").unwrap()).unwrap();
        assert_eq!(p.components(), Accumulator::from_hypervector(&direct).components());
    }

    #[test]
    fn cross_product_matches_pairwise_binds() {
        let c = cb(&["a", "b", "c", "d", "e", "x", "y", "z"], 1000);
        let left = ["a", "b", "c", "d", "e"];
        let right = ["x", "y", "z"];
        let p = cross_product(&encode_set(&c, &left).unwrap(), &encode_set(&c, &right).unwrap())
            .unwrap();
        let mut brute = Accumulator::zeros(1000).unwrap();
        for l in left {
            for r in right {
                brute
                    .add(&c.get(l).unwrap().bind(c.get(r).unwrap()).unwrap())
                    .unwrap();
            }
        }
        assert_eq!(p.components(), brute.components());
    }
}
