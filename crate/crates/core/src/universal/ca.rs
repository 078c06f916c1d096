//! Elementary cellular automaton on a ring of `l` cells.
//!
//! A grid is one hypervector `a = [Σ_j ρ^j v_j]` for `j = 1..=l`, where `v_j`
//! is the seed of the state of cell `j`. To update cell `j` the neighbourhood
//! is recovered approximately as
//! `ĥ = [l ⊙ ρ^{-(j-1)} a + c ⊙ ρ^{-j} a + r ⊙ ρ^{-(j+1)} a]`
//! and looked up among the eight rule addresses. Neighbour indices wrap
//! around the ring, so cell 1's left neighbour is cell `l`.
//!
//! By default the three bound terms are scored as an exact integer sum
//! instead of their majority, see [`HoodQuery`].

use super::{expect_fields, parse_error, table_rows};
use crate::error::{check_dims, HdError, Result};
use crate::exec::Exec;
use crate::hv::{Hypervector, Probe, TieBreak};
use crate::memory::{HeteroMemory, ItemMemory, Payload};
use crate::rng::Rng;

const MAX_REGENERATIONS: usize = 10_000;

/// Wolfram-numbered rule: bit `4x + 2y + z` is the next state of a centre
/// cell `y` with left neighbour `x` and right neighbour `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaRule(pub u8);

impl CaRule {
    pub const RULE_110: CaRule = CaRule(110);

    pub fn next(self, x: u8, y: u8, z: u8) -> u8 {
        (self.0 >> (4 * x + 2 * y + z)) & 1
    }

    /// Either a bare rule number, or eight rows `xyz next` such as `110 1`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<_> = table_rows(text).collect();
        if let [(line, fields)] = rows.as_slice() {
            if let [n] = fields.as_slice() {
                return n
                    .parse::<u8>()
                    .map(CaRule)
                    .map_err(|e| parse_error(*line, e.to_string()));
            }
        }
        let mut rule = 0u8;
        let mut seen = 0u8;
        for (line, fields) in rows {
            expect_fields(line, &fields, 2)?;
            let hood = u8::from_str_radix(fields[0], 2)
                .ok()
                .filter(|_| fields[0].len() == 3)
                .ok_or_else(|| parse_error(line, format!("bad neighbourhood `{}`", fields[0])))?;
            let next = match fields[1] {
                "0" => 0,
                "1" => 1,
                other => return Err(parse_error(line, format!("bad next state `{other}`"))),
            };
            if seen & (1 << hood) != 0 {
                return Err(parse_error(line, format!("neighbourhood {} listed twice", fields[0])));
            }
            seen |= 1 << hood;
            rule |= next << hood;
        }
        if seen != u8::MAX {
            return Err(parse_error(0, "rule table must list all 8 neighbourhoods"));
        }
        Ok(CaRule(rule))
    }
}

impl Payload for u8 {
    fn to_fields(&self) -> Vec<String> {
        vec![self.to_string()]
    }

    fn from_fields(fields: &[&str]) -> Result<Self> {
        match fields {
            [one] => one
                .parse()
                .map_err(|_| HdError::InvalidArgument(format!("bad payload `{one}`"))),
            _ => Err(HdError::InvalidArgument(format!("expected 1 payload field, got {}", fields.len()))),
        }
    }
}

/// How the recovered neighbourhood is compared with the rule addresses.
///
/// `Majority` bipolarizes `ĥ` first. Its cubic term multiplies three shifted
/// copies of the same grid vector, which carries a bias set by how many
/// adjacent cells agree, so its lookup margin does not tighten as `N` grows.
/// `Sum` scores the exact sum of the three bound terms and has no such term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HoodQuery {
    #[default]
    Sum,
    Majority,
}

/// Three bound terms scored as their integer sum without materializing it.
struct HoodSum([Hypervector; 3]);

impl Probe for HoodSum {
    fn dim(&self) -> usize {
        self.0[0].dim()
    }

    fn dot_with(&self, v: &Hypervector) -> i64 {
        self.0.iter().map(|t| t.dot_with(v)).sum()
    }
}

#[derive(Clone, Debug)]
pub struct CaMachine {
    pub rule: CaRule,
    /// Roles `l`, `c`, `r`.
    pub role_cb: ItemMemory,
    /// States `0`, `1`.
    pub state_cb: ItemMemory,
    /// Eight rows keyed by the neighbourhood vector, holding the next centre state.
    pub rules: HeteroMemory<u8>,
    /// Resolves ties when an even number of cells is superposed.
    pub grid_tie: TieBreak,
    pub query: HoodQuery,
}

impl CaMachine {
    pub fn dim(&self) -> usize {
        self.state_cb.dim()
    }

    /// `[l ⊙ x + c ⊙ y + r ⊙ z]`.
    pub fn neighbourhood(&self, x: &Hypervector, y: &Hypervector, z: &Hypervector) -> Result<Hypervector> {
        let l = self.role_cb.vector(0).bind(x)?;
        let c = self.role_cb.vector(1).bind(y)?;
        let r = self.role_cb.vector(2).bind(z)?;
        Hypervector::majority(&[&l, &c, &r], &self.grid_tie)
    }

    /// Next centre state read from the rule rows, given approximate
    /// left, centre and right cell vectors.
    pub fn next_state(&self, x: &Hypervector, y: &Hypervector, z: &Hypervector) -> Result<u8> {
        match self.query {
            HoodQuery::Majority => Ok(*self.rules.lookup(&self.neighbourhood(x, y, z)?)?),
            HoodQuery::Sum => {
                let terms = [
                    self.role_cb.vector(0).bind(x)?,
                    self.role_cb.vector(1).bind(y)?,
                    self.role_cb.vector(2).bind(z)?,
                ];
                Ok(*self.rules.lookup(&HoodSum(terms))?)
            }
        }
    }

    pub fn with_query(mut self, query: HoodQuery) -> Self {
        self.query = query;
        self
    }
}

pub fn ca_build(rule: CaRule, dim: usize, rng: &mut Rng) -> Result<CaMachine> {
    for _ in 0..MAX_REGENERATIONS {
        let role_cb = ItemMemory::random(&["l", "c", "r"], dim, rng)?;
        let state_cb = ItemMemory::random(&["0", "1"], dim, rng)?;
        let grid_tie = TieBreak::new(dim, rng.next_seed())?;
        if state_cb.vector(0) == state_cb.vector(1) {
            continue;
        }
        let mut m = CaMachine {
            rule,
            role_cb,
            state_cb,
            rules: HeteroMemory::build(dim, Vec::new())?,
            grid_tie,
            query: HoodQuery::default(),
        };
        let mut rows = Vec::with_capacity(8);
        for hood in (0..8u8).rev() {
            let (x, y, z) = (hood >> 2, (hood >> 1) & 1, hood & 1);
            let s = |b: u8| m.state_cb.vector(b as usize);
            rows.push((m.neighbourhood(s(x), s(y), s(z))?, rule.next(x, y, z)));
        }
        match HeteroMemory::build(dim, rows) {
            Ok(rules) => {
                m.rules = rules;
                return Ok(m);
            }
            Err(HdError::DuplicateAddress(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(HdError::InvalidArgument(format!(
        "no collision-free rule addresses at dimension {dim} after {MAX_REGENERATIONS} draws"
    )))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaGrid {
    pub length: usize,
    pub acc: Hypervector,
}

fn check_bits(bits: &[u8]) -> Result<()> {
    if bits.len() < 3 {
        return Err(HdError::InvalidArgument(format!("grid needs at least 3 cells, got {}", bits.len())));
    }
    match bits.iter().find(|&&b| b > 1) {
        Some(b) => Err(HdError::InvalidArgument(format!("cell state {b} is not a bit"))),
        None => Ok(()),
    }
}

fn superpose_cells(m: &CaMachine, states: &[Hypervector]) -> Result<Hypervector> {
    let placed: Vec<Hypervector> = states
        .iter()
        .enumerate()
        .map(|(i, v)| v.permute(i as i64 + 1))
        .collect();
    let refs: Vec<&Hypervector> = placed.iter().collect();
    Hypervector::majority(&refs, &m.grid_tie)
}

pub fn ca_encode_grid(bits: &[u8], m: &CaMachine) -> Result<CaGrid> {
    check_bits(bits)?;
    let states: Vec<Hypervector> = bits.iter().map(|&b| m.state_cb.vector(b as usize).clone()).collect();
    Ok(CaGrid {
        length: bits.len(),
        acc: superpose_cells(m, &states)?,
    })
}

/// Cell `j` decodes to the state seed closest to `ρ^{-j} a`.
pub fn ca_decode_grid(g: &CaGrid, m: &CaMachine) -> Result<Vec<u8>> {
    check_dims(g.acc.dim(), m.dim())?;
    (1..=g.length)
        .map(|j| Ok(m.state_cb.cleanup(&g.acc.permute(-(j as i64)))?.index as u8))
        .collect()
}

pub fn ca_step(g: &CaGrid, m: &CaMachine, noise_p: f64, rng: &mut Rng) -> Result<CaGrid> {
    ca_step_with(g, m, noise_p, rng, Exec::Sequential)
}

/// [`ca_step`] with the per-cell updates spread over `exec`.
pub fn ca_step_with(g: &CaGrid, m: &CaMachine, noise_p: f64, rng: &mut Rng, exec: Exec) -> Result<CaGrid> {
    check_dims(g.acc.dim(), m.dim())?;
    let a = if noise_p > 0.0 {
        g.acc.flip_noise(noise_p, rng)?
    } else {
        g.acc.clone()
    };
    let l = g.length;
    let next = exec.try_map(l, |i| {
        let j = i + 1;
        let left = if j == 1 { l } else { j - 1 };
        let right = if j == l { 1 } else { j + 1 };
        let bit = m.next_state(
            &a.permute(-(left as i64)),
            &a.permute(-(j as i64)),
            &a.permute(-(right as i64)),
        )?;
        Ok::<_, HdError>(m.state_cb.vector(bit as usize).clone())
    })?;
    Ok(CaGrid {
        length: l,
        acc: superpose_cells(m, &next)?,
    })
}

/// Direct interpreter on the same ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaOracle {
    pub rule: CaRule,
    pub cells: Vec<u8>,
}

impl CaOracle {
    pub fn new(rule: CaRule, cells: &[u8]) -> Self {
        CaOracle {
            rule,
            cells: cells.to_vec(),
        }
    }

    pub fn step(&mut self) {
        let l = self.cells.len();
        let c = &self.cells;
        self.cells = (0..l)
            .map(|i| self.rule.next(c[(i + l - 1) % l], c[i], c[(i + 1) % l]))
            .collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn rule_110_table() {
        let r = CaRule::RULE_110;
        let expect = [(1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1), (1, 0, 0, 0), (0, 1, 1, 1), (0, 1, 0, 1), (0, 0, 1, 1), (0, 0, 0, 0)];
        for (x, y, z, n) in expect {
            assert_eq!(r.next(x, y, z), n, "{x}{y}{z}");
        }
    }

    #[test]
    fn rule_parsing() {
        let rows = "111 0\n110 1\n101 1\n100 0\n011 1\n010 1\n001 1\n000 0\n";
        assert_eq!(CaRule::parse(rows).unwrap(), CaRule::RULE_110);
        assert_eq!(CaRule::parse("110").unwrap(), CaRule::RULE_110);
        assert!(CaRule::parse("111 0\n110 1").is_err());
        assert!(CaRule::parse("11 0").is_err());
    }

    #[test]
    fn machine_rows_follow_rule() {
        let m = ca_build(CaRule::RULE_110, 1024, &mut Rng::new(1)).unwrap();
        assert_eq!(m.rules.len(), 8);
        let s = |b: usize| m.state_cb.vector(b);
        let h = m.neighbourhood(s(0), s(1), s(0)).unwrap();
        assert_eq!(*m.rules.lookup(&h).unwrap(), 1);
        let h = m.neighbourhood(s(1), s(1), s(1)).unwrap();
        assert_eq!(*m.rules.lookup(&h).unwrap(), 0);
    }

    #[test]
    fn round_trip_10101() {
        let m = ca_build(CaRule::RULE_110, 8192, &mut Rng::new(2)).unwrap();
        let g = ca_encode_grid(&[1, 0, 1, 0, 1], &m).unwrap();
        assert_eq!(ca_decode_grid(&g, &m).unwrap(), [1, 0, 1, 0, 1]);
        let zeros = ca_encode_grid(&[0; 6], &m).unwrap();
        assert_eq!(ca_decode_grid(&zeros, &m).unwrap(), [0; 6]);
    }

    #[test]
    fn step_matches_oracle() {
        let m = ca_build(CaRule::RULE_110, 8192, &mut Rng::new(3)).unwrap();
        let mut g = ca_encode_grid(&[1, 0, 1, 0, 1], &m).unwrap();
        let mut o = CaOracle::new(CaRule::RULE_110, &[1, 0, 1, 0, 1]);
        for _ in 0..10 {
            g = ca_step(&g, &m, 0.0, &mut Rng::new(0)).unwrap();
            o.step();
            assert_eq!(ca_decode_grid(&g, &m).unwrap(), o.cells);
        }
    }

    #[test]
    fn oracle_periodic_boundary() {
        // cell 1 sees cell 5 on its left
        let mut o = CaOracle::new(CaRule::RULE_110, &[1, 0, 1, 0, 1]);
        o.step();
        assert_eq!(o.cells, [1, 1, 1, 1, 1]);
    }

    #[test]
    fn rule_zero_clears_grid() {
        let m = ca_build(CaRule(0), 2048, &mut Rng::new(4)).unwrap();
        let mut rng = Rng::new(5);
        let bits: Vec<u8> = (0..16).map(|_| rng.gen_range(0..2)).collect();
        let g = ca_encode_grid(&bits, &m).unwrap();
        let g = ca_step(&g, &m, 0.0, &mut rng).unwrap();
        assert_eq!(ca_decode_grid(&g, &m).unwrap(), vec![0; 16]);
    }

    #[test]
    fn decode_after_rotation_rotates_grid() {
        let m = ca_build(CaRule::RULE_110, 8192, &mut Rng::new(6)).unwrap();
        let bits = [1, 1, 0, 1, 0, 0, 0, 1];
        let g = ca_encode_grid(&bits, &m).unwrap();
        let shifted = CaGrid {
            length: bits.len(),
            acc: g.acc.permute(1),
        };
        // position j of the rotated vector holds what was at j - 1
        let decoded = ca_decode_grid(&shifted, &m).unwrap();
        assert_eq!(&decoded[1..], &bits[..bits.len() - 1]);
    }

    #[test]
    fn parallel_step_agrees() {
        let m = ca_build(CaRule::RULE_110, 2048, &mut Rng::new(7)).unwrap();
        let g = ca_encode_grid(&[0, 1, 1, 0, 1, 1, 1, 0, 0, 1], &m).unwrap();
        let a = ca_step_with(&g, &m, 0.1, &mut Rng::new(8), Exec::Sequential).unwrap();
        let b = ca_step_with(&g, &m, 0.1, &mut Rng::new(8), Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sum_query_scores_the_integer_sum() {
        let m = ca_build(CaRule::RULE_110, 512, &mut Rng::new(9)).unwrap();
        let mut rng = Rng::new(10);
        let v: Vec<Hypervector> = (0..3).map(|_| Hypervector::random(512, &mut rng).unwrap()).collect();
        let mut acc = crate::hv::Accumulator::zeros(512).unwrap();
        for (role, x) in m.role_cb.vectors().iter().zip(&v) {
            acc.add(&role.bind(x).unwrap()).unwrap();
        }
        let expect = *m.rules.lookup(&acc).unwrap();
        assert_eq!(m.next_state(&v[0], &v[1], &v[2]).unwrap(), expect);
    }

    #[test]
    fn both_queries_exact_on_clean_cells() {
        for query in [HoodQuery::Sum, HoodQuery::Majority] {
            let m = ca_build(CaRule::RULE_110, 256, &mut Rng::new(11)).unwrap().with_query(query);
            let s = |b: u8| m.state_cb.vector(b as usize);
            for hood in 0..8u8 {
                let (x, y, z) = (hood >> 2, (hood >> 1) & 1, hood & 1);
                assert_eq!(m.next_state(s(x), s(y), s(z)).unwrap(), m.rule.next(x, y, z));
            }
        }
    }

    #[test]
    fn short_grid_rejected() {
        let m = ca_build(CaRule::RULE_110, 64, &mut Rng::new(1)).unwrap();
        assert!(ca_encode_grid(&[1, 0], &m).is_err());
        assert!(ca_encode_grid(&[1, 0, 2], &m).is_err());
    }
}
