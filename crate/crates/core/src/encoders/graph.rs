use crate::error::Result;
use crate::hv::{Accumulator, Hypervector};
use crate::memory::ItemMemory;

/// `u ⊙ v` for an undirected edge, `u ⊙ ρ(v)` for `u → v`.
pub fn edge_vector(cb: &ItemMemory, u: &str, v: &str, directed: bool) -> Result<Hypervector> {
    let head = cb.get(v)?;
    let head = if directed { head.permute(1) } else { head.clone() };
    cb.get(u)?.bind(&head)
}

/// Superposition of all edge vectors. Isolated vertices are not represented.
pub fn encode_graph<S: AsRef<str>>(
    cb: &ItemMemory,
    edges: &[(S, S)],
    directed: bool,
) -> Result<Accumulator> {
    let mut g = Accumulator::zeros(cb.dim())?;
    for (u, v) in edges {
        g.add(&edge_vector(cb, u.as_ref(), v.as_ref(), directed)?)?;
    }
    Ok(g)
}

/// Raw presence score `dot(g, edge)`; callers threshold it.
pub fn edge_query(g: &Accumulator, u: &str, v: &str, directed: bool, cb: &ItemMemory) -> Result<i64> {
    g.dot_hv(&edge_vector(cb, u, v, directed)?)
}

/// The `k` vertices most strongly bound to `u` in an undirected graph.
pub fn neighbours(g: &Accumulator, u: &str, k: usize, cb: &ItemMemory) -> Result<Vec<String>> {
    let probe = g.bind(cb.get(u)?)?;
    Ok(cb
        .top_k(&probe, k)?
        .into_iter()
        .map(|(i, _)| cb.name(i).to_string())
        .collect())
}
