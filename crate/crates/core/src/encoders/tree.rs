use std::fmt;
use std::str::FromStr;

use crate::error::{HdError, Result};
use crate::hv::{Accumulator, Hypervector};
use crate::memory::ItemMemory;

pub const ROLE_LEFT: &str = "l";
pub const ROLE_RIGHT: &str = "r";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Left,
    Right,
}

/// Root-to-leaf trace. Step `d` (from 0) is the child taken at depth `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreePath(Vec<Branch>);

impl TreePath {
    pub fn new(steps: Vec<Branch>) -> Result<Self> {
        if steps.is_empty() {
            return Err(HdError::InvalidArgument("empty tree path".into()));
        }
        Ok(Self(steps))
    }

    pub fn steps(&self) -> &[Branch] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

/// Parses strings such as `"rrl"`.
impl FromStr for TreePath {
    type Err = HdError;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .chars()
            .map(|c| match c {
                'l' | 'L' => Ok(Branch::Left),
                'r' | 'R' => Ok(Branch::Right),
                other => Err(HdError::InvalidArgument(format!("bad tree step `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        TreePath::new(steps)
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(match b {
                Branch::Left => "l",
                Branch::Right => "r",
            })?;
        }
        Ok(())
    }
}

/// `Π_d ρ^d(role_d)`.
pub fn path_vector(path: &TreePath, roles: &ItemMemory) -> Result<Hypervector> {
    let left = roles.get(ROLE_LEFT)?;
    let right = roles.get(ROLE_RIGHT)?;
    let mut out = Hypervector::ones(roles.dim())?;
    for (depth, step) in path.steps().iter().enumerate() {
        let role = match step {
            Branch::Left => left,
            Branch::Right => right,
        };
        out = out.bind(&role.permute(depth as i64))?;
    }
    Ok(out)
}

/// Sum over leaves of `leaf ⊙ path_vector(path)`.
pub fn encode_binary_tree<S: AsRef<str>>(
    roles: &ItemMemory,
    leaves_cb: &ItemMemory,
    leaves: &[(TreePath, S)],
) -> Result<Accumulator> {
    let mut t = Accumulator::zeros(leaves_cb.dim())?;
    for (path, sym) in leaves {
        t.add(&leaves_cb.get(sym.as_ref())?.bind(&path_vector(path, roles)?)?)?;
    }
    Ok(t)
}

/// Unbinds the trace and cleans up against the leaf alphabet.
pub fn tree_leaf_lookup(
    t: &Accumulator,
    path: &TreePath,
    roles: &ItemMemory,
    leaves_cb: &ItemMemory,
) -> Result<String> {
    let probe = t.bind(&path_vector(path, roles)?)?;
    Ok(leaves_cb.cleanup(&probe)?.name.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    pub(crate) fn example_tree() -> Vec<(TreePath, &'static str)> {
        [
            ("lll", "a"),
            ("lrl", "b"),
            ("rrl", "c"),
            ("rrrl", "d"),
            ("rrrr", "e"),
            ("lrrll", "f"),
            ("lrrlr", "g"),
        ]
        .iter()
        .map(|(p, s)| (p.parse().unwrap(), *s))
        .collect()
    }

    fn memories(dim: usize, seed: u64) -> (ItemMemory, ItemMemory) {
        let mut rng = Rng::new(seed);
        let roles = ItemMemory::random(&[ROLE_LEFT, ROLE_RIGHT], dim, &mut rng).unwrap();
        let letters: Vec<String> = ('a'..='z').map(String::from).collect();
        let leaves = ItemMemory::random(&letters, dim, &mut rng).unwrap();
        (roles, leaves)
    }

    #[test]
    fn right_right_left_is_c() {
        let (roles, leaves) = memories(10_000, 1);
        let t = encode_binary_tree(&roles, &leaves, &example_tree()).unwrap();
        let path: TreePath = "rrl".parse().unwrap();
        assert_eq!(tree_leaf_lookup(&t, &path, &roles, &leaves).unwrap(), "c");
        for (p, s) in example_tree() {
            assert_eq!(tree_leaf_lookup(&t, &p, &roles, &leaves).unwrap(), s, "path {p}");
        }
    }

    #[test]
    fn single_left_leaf() {
        let (roles, leaves) = memories(512, 2);
        let path: TreePath = "l".parse().unwrap();
        let t = encode_binary_tree(&roles, &leaves, &[(path.clone(), "q")]).unwrap();
        let expect = leaves.get("q").unwrap().bind(roles.get("l").unwrap()).unwrap();
        assert_eq!(t.components(), Accumulator::from_hypervector(&expect).components());
        assert_eq!(tree_leaf_lookup(&t, &path, &roles, &leaves).unwrap(), "q");
    }

    #[test]
    fn path_parsing() {
        assert!("".parse::<TreePath>().is_err());
        assert!("lx".parse::<TreePath>().is_err());
        assert_eq!("LrL".parse::<TreePath>().unwrap().to_string(), "lrl");
    }
}
