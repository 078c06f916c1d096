use std::collections::{BTreeSet, HashSet};

use crate::error::{HdError, Result};
use crate::hv::{Accumulator, Compound, Hypervector};
use crate::memory::ItemMemory;

/// States, input symbols, transitions `(from, symbol, to)`, start and
/// accepting states. Accepting states are carried along but not used by any
/// vector operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsaDescriptor {
    pub states: Vec<String>,
    pub symbols: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
    pub start: String,
    pub accepting: BTreeSet<String>,
}

impl FsaDescriptor {
    /// Every name must be declared; with `deterministic`, at most one
    /// transition per `(state, symbol)`.
    pub fn validate(&self, deterministic: bool) -> Result<()> {
        let states: HashSet<&str> = self.states.iter().map(String::as_str).collect();
        let symbols: HashSet<&str> = self.symbols.iter().map(String::as_str).collect();
        let known_state = |s: &str| {
            if states.contains(s) {
                Ok(())
            } else {
                Err(HdError::UnknownSymbol(s.to_string()))
            }
        };
        known_state(&self.start)?;
        for s in &self.accepting {
            known_state(s)?;
        }
        let mut seen = HashSet::new();
        for (from, sym, to) in &self.transitions {
            known_state(from)?;
            known_state(to)?;
            if !symbols.contains(sym.as_str()) {
                return Err(HdError::UnknownSymbol(sym.clone()));
            }
            if deterministic && !seen.insert((from.as_str(), sym.as_str())) {
                return Err(HdError::InvalidArgument(format!(
                    "two transitions from `{from}` on `{sym}`"
                )));
            }
        }
        Ok(())
    }

    /// Target of the transition from `state` on `symbol`, if any.
    pub fn next(&self, state: &str, symbol: &str) -> Option<&str> {
        self.transitions
            .iter()
            .find(|(f, s, _)| f == state && s == symbol)
            .map(|(_, _, t)| t.as_str())
    }
}

/// `symbol ⊙ from ⊙ ρ(to)`.
pub fn transition_vector(from: &Hypervector, symbol: &Hypervector, to: &Hypervector) -> Result<Hypervector> {
    symbol.bind(&from.bind(&to.permute(1))?)
}

/// Superposition of all transitions.
pub fn fsa_encode(desc: &FsaDescriptor, states: &ItemMemory, symbols: &ItemMemory) -> Result<Accumulator> {
    desc.validate(false)?;
    let mut a = Accumulator::zeros(states.dim())?;
    for (from, sym, to) in &desc.transitions {
        a.add(&transition_vector(states.get(from)?, symbols.get(sym)?, states.get(to)?)?)?;
    }
    Ok(a)
}

/// Next state of a deterministic automaton: clean-up of `ρ⁻¹(a ⊙ symbol ⊙ state)`.
pub fn fsa_step<A: Compound>(
    a: &A,
    state: &Hypervector,
    symbol: &Hypervector,
    states: &ItemMemory,
) -> Result<(String, Hypervector)> {
    let probe = a.bind_with(symbol)?.bind_with(state)?.rotate(-1);
    let hit = states.cleanup(&probe)?;
    Ok((hit.name.to_string(), hit.vector.clone()))
}

/// Next generalized state of a nondeterministic automaton:
/// `ρ⁻¹(a ⊙ symbol ⊙ gen_state)`, optionally projected onto the state memory.
pub fn nfsa_step<A: Compound>(
    a: &A,
    gen_state: &Accumulator,
    symbol: &Hypervector,
    states: &ItemMemory,
    with_cleanup: bool,
) -> Result<Accumulator> {
    let next = a.times(gen_state)?.bind(symbol)?.permute(-1);
    if with_cleanup {
        states.project(&next)
    } else {
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::encode_set;
    use crate::rng::Rng;

    fn turnstile() -> FsaDescriptor {
        let t = |a: &str, b: &str, c: &str| (a.to_string(), b.to_string(), c.to_string());
        FsaDescriptor {
            states: vec!["locked".into(), "unlocked".into()],
            symbols: vec!["push".into(), "token".into()],
            transitions: vec![
                t("locked", "push", "locked"),
                t("locked", "token", "unlocked"),
                t("unlocked", "push", "locked"),
                t("unlocked", "token", "unlocked"),
            ],
            start: "locked".into(),
            accepting: BTreeSet::new(),
        }
    }

    fn memories(desc: &FsaDescriptor, dim: usize) -> (ItemMemory, ItemMemory) {
        let mut rng = Rng::new(99);
        (
            ItemMemory::random(&desc.states, dim, &mut rng).unwrap(),
            ItemMemory::random(&desc.symbols, dim, &mut rng).unwrap(),
        )
    }

    #[test]
    fn turnstile_superposition_matches_hand_formula() {
        let d = turnstile();
        let (st, sy) = memories(&d, 2048);
        let a = fsa_encode(&d, &st, &sy).unwrap();
        let (l, u) = (st.get("locked").unwrap(), st.get("unlocked").unwrap());
        let (p, t) = (sy.get("push").unwrap(), sy.get("token").unwrap());
        let mut hand = Accumulator::zeros(2048).unwrap();
        for (x, y, z) in [(p, l, l), (t, l, u), (p, u, l), (t, u, u)] {
            hand.add(&x.bind(y).unwrap().bind(&z.permute(1)).unwrap()).unwrap();
        }
        assert_eq!(a.components(), hand.components());
    }

    #[test]
    fn turnstile_transitions() {
        let d = turnstile();
        let (st, sy) = memories(&d, 10_000);
        let a = fsa_encode(&d, &st, &sy).unwrap();
        for (from, sym, to) in &d.transitions {
            let (name, _) = fsa_step(&a, st.get(from).unwrap(), sy.get(sym).unwrap(), &st).unwrap();
            assert_eq!(&name, to);
        }
        let (name, _) = fsa_step(&a, st.get("locked").unwrap(), sy.get("push").unwrap(), &st).unwrap();
        assert_eq!(name, "locked");
    }

    #[test]
    fn single_transition_automaton() {
        let mut d = turnstile();
        d.transitions.truncate(2);
        d.transitions.remove(0);
        let (st, sy) = memories(&d, 256);
        let a = fsa_encode(&d, &st, &sy).unwrap();
        let v = transition_vector(
            st.get("locked").unwrap(),
            sy.get("token").unwrap(),
            st.get("unlocked").unwrap(),
        )
        .unwrap();
        assert_eq!(a.components(), Accumulator::from_hypervector(&v).components());
    }

    #[test]
    fn validation() {
        let mut d = turnstile();
        assert!(d.validate(true).is_ok());
        d.transitions.push(("locked".into(), "push".into(), "unlocked".into()));
        assert!(d.validate(true).is_err());
        assert!(d.validate(false).is_ok());
        d.transitions.push(("nowhere".into(), "push".into(), "locked".into()));
        assert!(matches!(d.validate(false), Err(HdError::UnknownSymbol(_))));
    }

    #[test]
    fn nondeterministic_step_reaches_all_successors() {
        // s0 -x-> s1, s0 -x-> s2, s3 -x-> s4, s1 -y-> s0
        let names: Vec<String> = (0..5).map(|i| format!("s{i}")).collect();
        let t = |a: usize, s: &str, b: usize| (names[a].clone(), s.to_string(), names[b].clone());
        let d = FsaDescriptor {
            states: names.clone(),
            symbols: vec!["x".into(), "y".into()],
            transitions: vec![t(0, "x", 1), t(0, "x", 2), t(3, "x", 4), t(1, "y", 0)],
            start: "s0".into(),
            accepting: BTreeSet::new(),
        };
        let (st, sy) = memories(&d, 10_000);
        let a = fsa_encode(&d, &st, &sy).unwrap();
        let gen = encode_set(&st, &["s0", "s3"]).unwrap();
        let next = nfsa_step(&a, &gen, sy.get("x").unwrap(), &st, true).unwrap();
        let weights = st.scores(&next).unwrap();
        // brute-force successor set of {s0, s3} on x
        let expect: BTreeSet<usize> = d
            .transitions
            .iter()
            .filter(|(f, s, _)| (f == "s0" || f == "s3") && s == "x")
            .map(|(_, _, to)| st.index_of(to).unwrap())
            .collect();
        let mut ranked: Vec<usize> = (0..5).collect();
        ranked.sort_by_key(|&i| -weights[i]);
        let top: BTreeSet<usize> = ranked[..expect.len()].iter().copied().collect();
        assert_eq!(top, expect);

        // singleton generalized state reduces to the deterministic step
        let single = encode_set(&st, &["s1"]).unwrap();
        let next = nfsa_step(&a, &single, sy.get("y").unwrap(), &st, true).unwrap();
        assert_eq!(st.cleanup(&next).unwrap().name, "s0");

        let zero = Accumulator::zeros(10_000).unwrap();
        assert!(nfsa_step(&a, &zero, sy.get("x").unwrap(), &st, false).unwrap().is_zero());
    }
}
