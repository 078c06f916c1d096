use crate::error::{HdError, Result};
use crate::hv::Accumulator;
use crate::memory::ItemMemory;

/// LIFO stack held as `Σ_k ρ^k(v_k)` with the top element at power 0.
/// Never normalized: popping relies on exact subtraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackState {
    acc: Accumulator,
    depth: usize,
}

impl StackState {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(Self {
            acc: Accumulator::zeros(dim)?,
            depth: 0,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.depth == 0
    }

    pub fn accumulator(&self) -> &Accumulator {
        &self.acc
    }

    /// `sym + ρ(stack)`.
    pub fn push(&self, sym: &str, cb: &ItemMemory) -> Result<StackState> {
        let mut acc = self.acc.permute(1);
        acc.add(cb.get(sym)?)?;
        Ok(Self {
            acc,
            depth: self.depth + 1,
        })
    }

    /// Cleans up the top, subtracts it and shifts the rest back.
    pub fn pop(&self, cb: &ItemMemory) -> Result<(String, StackState)> {
        if self.depth == 0 {
            return Err(HdError::EmptyStack);
        }
        let top = cb.cleanup(&self.acc)?;
        let mut acc = self.acc.clone();
        acc.sub(top.vector)?;
        Ok((
            top.name.to_string(),
            Self {
                acc: acc.permute(-1),
                depth: self.depth - 1,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn cb() -> ItemMemory {
        ItemMemory::random(&["a", "b", "c", "d", "x"], 10_000, &mut Rng::new(4)).unwrap()
    }

    #[test]
    fn push_order_matches_worked_example() {
        let c = cb();
        let mut st = StackState::new(10_000).unwrap();
        for s in ["d", "c", "b", "a"] {
            st = st.push(s, &c).unwrap();
        }
        let mut expect = Accumulator::zeros(10_000).unwrap();
        for (k, s) in ["a", "b", "c", "d"].iter().enumerate() {
            expect.add(&c.get(s).unwrap().permute(k as i64)).unwrap();
        }
        assert_eq!(st.accumulator().components(), expect.components());
        assert_eq!(st.depth(), 4);
    }

    #[test]
    fn push_then_pop_restores_state() {
        let c = cb();
        let empty = StackState::new(10_000).unwrap();
        let base = empty.push("a", &c).unwrap().push("b", &c).unwrap();
        let (top, back) = base.push("x", &c).unwrap().pop(&c).unwrap();
        assert_eq!(top, "x");
        assert_eq!(back.accumulator().components(), base.accumulator().components());
        assert_eq!(back.depth(), 2);

        let (top, e) = empty.push("x", &c).unwrap().pop(&c).unwrap();
        assert_eq!(top, "x");
        assert!(e.is_empty() && e.accumulator().is_zero());
    }

    #[test]
    fn pop_empty_fails() {
        let c = cb();
        assert!(matches!(StackState::new(10_000).unwrap().pop(&c), Err(HdError::EmptyStack)));
    }
}
